// SPDX-License-Identifier: Apache-2.0

//! Verification suites over a model fixture and the text report.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{validate, ValidatedModel};
use crate::error::Result;
use crate::geometry::{
    apply_field, correspondence_residual, homogeneity_degree, rank_of_differentials, restrict, ContactChart, LiftSign,
    PoissonStructure,
};
use crate::gksl::{
    bilindblad_check, coherence_trajectory, convex_combine, cp_check, dephasing_rates, joint_sectors, Gksl, Picture,
    CP_TIMES, SECTOR_GAP,
};
use crate::linalg::{hs_norm, identity, op_norm, random_density, random_matrix, CMatrix};
use crate::models::{ExpectedValue, ModelFixture, Provenance, SuiteName};
use crate::moyal::{
    dirac_residual, dissipator_symbol, dissipator_symbol_residual, egorov_sweep, poisson_bracket, star_product,
    weyl_quantize, EgorovModel, PhaseSymbol,
};
use crate::symbolic::{Expression, ZeroVerdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    /// Passed, relying on the randomized zero test.
    Probabilistic,
    Fail,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Probabilistic => "probabilistic",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One line of the report.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: String,
    pub status: Status,
    pub residual: f64,
    pub tolerance: f64,
    pub detail: String,
}

/// Value a check produced, compared against the fixture's expectations.
#[derive(Clone, Debug, PartialEq)]
pub enum Observed {
    Expressions(Vec<Expression>),
    Number(f64),
    Count(usize),
    Truth(bool),
    Nothing,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub model: String,
    pub seed: u64,
    pub suites: Vec<SuiteName>,
    /// Sorted by name.
    pub records: Vec<CheckRecord>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status != Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.records.iter().filter(|r| r.status == status).count()
    }

    pub fn record(&self, name: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    /// Deterministic text form: a header, one line per check, a summary.
    pub fn to_text(&self) -> String {
        let suites: Vec<&str> = self.suites.iter().map(|s| s.as_str()).collect();
        let mut out = format!("model: {}\nseed: {}\nsuites: {}\n", self.model, self.seed, suites.join(","));
        for r in &self.records {
            out.push_str(&format!(
                "{:<13} {}  residual={:.3e} tol={:.1e}  [{}]  {}\n",
                r.status.as_str(),
                r.name,
                r.residual,
                r.tolerance,
                r.anchor,
                r.detail
            ));
        }
        out.push_str(&format!(
            "overall: {} ({} checks: {} pass, {} probabilistic, {} fail, {} skipped)\n",
            if self.passed() { "pass" } else { "fail" },
            self.records.len(),
            self.count(Status::Pass),
            self.count(Status::Probabilistic),
            self.count(Status::Fail),
            self.count(Status::Skipped),
        ));
        out
    }
}

/// Report plus CSV artifacts.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteRun {
    pub report: SuiteReport,
    /// `coherences.csv`, when a trajectory was computed.
    pub coherences: Option<String>,
    /// `egorov_sweep.csv`, when a sweep was computed.
    pub egorov: Option<String>,
}

/// Runs the suites selected in `fixture.suite`; errors only for invalid
/// configs, check failures are recorded in the report.
pub fn run_suites(fixture: &ModelFixture) -> Result<SuiteRun> {
    let model = validate(fixture)?;
    let mut runner = Runner {
        fixture,
        model,
        rng: ChaCha8Rng::seed_from_u64(fixture.suite.seed),
        records: Vec::new(),
        coherences: None,
        egorov: None,
    };
    let mut suites = fixture.suite.suites.clone();
    suites.sort();
    suites.dedup();
    for s in &suites {
        match s {
            SuiteName::Pencil => runner.pencil(),
            SuiteName::Contact => runner.contact(),
            SuiteName::Gksl => runner.gksl(),
            SuiteName::PencilQuantum => runner.pencil_quantum(),
            SuiteName::Dephasing => runner.dephasing(),
            SuiteName::Egorov => runner.egorov(),
        }
    }
    runner.apply_expectations();
    let mut records: Vec<CheckRecord> = runner.records.into_iter().map(|(r, _)| r).collect();
    records.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(SuiteRun {
        report: SuiteReport { model: fixture.name.clone(), seed: fixture.suite.seed, suites, records },
        coherences: runner.coherences,
        egorov: runner.egorov,
    })
}

const ANCHOR_JACOBI: &str = "Jacobi identity of a Poisson bivector";
const ANCHOR_PENCIL: &str = "compatibility of a Poisson pencil";
const ANCHOR_CASIMIR: &str = "Casimir functions of the pencil";
const ANCHOR_BIHAM: &str = "bi-Hamiltonian vector field";
const ANCHOR_INVOLUTION: &str = "commuting first integrals";
const ANCHOR_LIOUVILLE: &str = "Liouville field and homogeneity";
const ANCHOR_CONTACT: &str = "contact Hamiltonian dynamics and dissipated quantities";
const ANCHOR_NONDEGENERATE: &str = "contact form nondegeneracy";
const ANCHOR_CORRESPONDENCE: &str = "contact-homogeneous correspondence";
const ANCHOR_DUALITY: &str = "Heisenberg adjoint of a GKSL generator";
const ANCHOR_SEMIGROUP: &str = "quantum dynamical semigroup";
const ANCHOR_CP: &str = "complete positivity via the Choi matrix";
const ANCHOR_KERNEL: &str = "quantum constants of motion";
const ANCHOR_ALGEBRA: &str = "invariant commutative subalgebras for GKSL";
const ANCHOR_BILINDBLAD: &str = "bi-Lindblad pencil conditions";
const ANCHOR_DEPHASING: &str = "dephasing rates on joint spectral sectors";
const ANCHOR_DIRAC: &str = "Dirac condition for the Moyal bracket";
const ANCHOR_EGOROV: &str = "pseudodifferential Egorov criterion";

/// Combined zero-test verdict over a list of expressions.
fn verdicts(items: &[Expression]) -> (Status, usize) {
    let mut status = Status::Pass;
    let mut nonzero = 0;
    for e in items {
        match e.zero_test() {
            ZeroVerdict::Zero => {}
            ZeroVerdict::ProbablyZero => {
                if status == Status::Pass {
                    status = Status::Probabilistic;
                }
            }
            ZeroVerdict::NonZero | ZeroVerdict::Inconclusive => {
                status = Status::Fail;
                nonzero += 1;
            }
        }
    }
    (status, nonzero)
}

fn list(items: &[Expression]) -> String {
    let parts: Vec<String> = items.iter().map(|e| e.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn fmt_lambda(l: f64) -> String {
    format!("lambda={l}")
}

struct Runner<'a> {
    fixture: &'a ModelFixture,
    model: ValidatedModel,
    rng: ChaCha8Rng,
    records: Vec<(CheckRecord, Observed)>,
    coherences: Option<String>,
    egorov: Option<String>,
}

impl Runner<'_> {
    fn push(&mut self, name: impl Into<String>, anchor: &str, status: Status, residual: f64, tolerance: f64, detail: impl Into<String>, observed: Observed) {
        self.records.push((
            CheckRecord { name: name.into(), anchor: anchor.to_string(), status, residual, tolerance, detail: detail.into() },
            observed,
        ));
    }

    fn numeric(&mut self, name: impl Into<String>, anchor: &str, residual: f64, tolerance: f64, detail: impl Into<String>) {
        let status = if residual <= tolerance { Status::Pass } else { Status::Fail };
        self.push(name, anchor, status, residual, tolerance, detail, Observed::Number(residual));
    }

    /// Exact check: every expression must be zero.
    fn exact(&mut self, name: impl Into<String>, anchor: &str, items: Result<Vec<Expression>>, ok: &str, observed: Observed) {
        match items {
            Ok(items) => {
                let (status, nonzero) = verdicts(&items);
                let detail = if status == Status::Fail {
                    let bad: Vec<Expression> = items.iter().filter(|e| !e.zero_test().is_zero()).cloned().collect();
                    format!("nonzero: {}", list(&bad))
                } else {
                    ok.to_string()
                };
                self.push(name, anchor, status, nonzero as f64, 0.0, detail, observed);
            }
            Err(e) => self.error(name, anchor, e),
        }
    }

    fn error(&mut self, name: impl Into<String>, anchor: &str, e: crate::Error) {
        self.push(name, anchor, Status::Fail, f64::NAN, 0.0, format!("error: {e}"), Observed::Nothing);
    }

    fn skip(&mut self, name: impl Into<String>, anchor: &str, detail: impl Into<String>) {
        self.push(name, anchor, Status::Skipped, 0.0, 0.0, detail, Observed::Nothing);
    }

    fn random_points(&mut self, dim: usize, count: usize) -> Vec<Vec<f64>> {
        (0..count).map(|_| (0..dim).map(|_| self.rng.gen_range(-2.0..2.0)).collect()).collect()
    }

    fn random_polynomial(&mut self, vars: &[&str]) -> Expression {
        let terms = self.rng.gen_range(1..=3);
        let mut items = Vec::with_capacity(terms);
        for _ in 0..terms {
            let mut c = 0;
            while c == 0 {
                c = self.rng.gen_range(-3..=3);
            }
            let mut factors = vec![Expression::int(c)];
            for v in vars {
                let k = self.rng.gen_range(0..=2);
                if k > 0 {
                    factors.push(Expression::symbol(*v).pow(k));
                }
            }
            items.push(Expression::product(factors));
        }
        Expression::sum(items)
    }

    // ---- classical ---------------------------------------------------------

    fn pencil(&mut self) {
        let Some(p) = self.fixture.poisson.clone() else {
            self.skip("pencil", ANCHOR_PENCIL, "model has no poisson section");
            return;
        };
        let chart = self.fixture.chart.clone().expect("validated: poisson needs a chart");
        let coord_list = chart.coords.join(",");
        for (name, s) in self.model.structures.clone() {
            let jac = s.coordinate_jacobiators().map(|v| v.into_iter().map(|(_, e)| e).collect());
            self.exact(format!("poisson.{name}.jacobiator"), ANCHOR_JACOBI, jac, &format!("jacobiator ≡ 0 in ({coord_list})"), Observed::Nothing);
        }
        if let (Some(spec), Some(pencil)) = (&p.pencil, self.model.pencil.clone()) {
            let mode = spec.mode;
            let jac = pencil.coordinate_jacobiators().map(|v| v.into_iter().map(|(_, e)| e).collect());
            let vars = format!("{coord_list},{}", crate::geometry::PENCIL_PARAMETER);
            self.exact(format!("pencil.jacobiator.{mode}"), ANCHOR_PENCIL, jac, &format!("jacobiator ≡ 0 in ({vars})"), Observed::Nothing);
            let n = pencil.dim();
            let mut entries = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    entries.push(pencil.component(i, j).simplify());
                }
            }
            let detail = format!("upper entries {}", list(&entries));
            self.push(format!("pencil.entries.{mode}"), ANCHOR_PENCIL, Status::Pass, 0.0, 0.0, detail, Observed::Expressions(entries));
            let a = &self.model.structures[&spec.first];
            let b = &self.model.structures[&spec.second];
            let sum = a.combine(&Expression::one(), b, &Expression::one());
            let jac = sum.and_then(|s| s.coordinate_jacobiators()).map(|v| v.into_iter().map(|(_, e)| e).collect());
            self.exact(
                "pencil.sum.jacobiator",
                ANCHOR_PENCIL,
                jac,
                &format!("jacobiator of {} + {} ≡ 0", spec.first, spec.second),
                Observed::Nothing,
            );
        }
        for (sname, fs) in &p.casimirs {
            let s = self.model.structures[sname].clone();
            for fname in fs {
                let c = chart.functions[fname].clone();
                let items: Result<Vec<Expression>> =
                    s.coords().iter().map(|x| s.bracket(&Expression::symbol(x.clone()), &c)).collect();
                self.exact(
                    format!("pencil.casimir.{sname}.{fname}"),
                    ANCHOR_CASIMIR,
                    items,
                    &format!("{{x_i, {fname}}}_{sname} ≡ 0"),
                    Observed::Nothing,
                );
            }
        }
        if let Some(b) = &p.bihamiltonian {
            let (s0, s1) = (&self.model.structures[&b.first.structure], &self.model.structures[&b.second.structure]);
            let (h0, h1) = (&chart.functions[&b.first.function], &chart.functions[&b.second.function]);
            match crate::geometry::bihamiltonian_check(s0, h0, s1, h1) {
                Ok(res) => {
                    let (status, nonzero) = verdicts(&res.residual);
                    let trivial = res.field.iter().all(|e| e.zero_test().is_zero());
                    let detail = format!(
                        "{}♯d{} = {}♯d{}: X = {}{}",
                        b.first.structure,
                        b.first.function,
                        b.second.structure,
                        b.second.function,
                        list(&res.field),
                        if trivial { " (trivial field)" } else { "" }
                    );
                    self.push("pencil.bihamiltonian", ANCHOR_BIHAM, status, nonzero as f64, 0.0, detail, Observed::Expressions(res.field));
                }
                Err(e) => self.error("pencil.bihamiltonian", ANCHOR_BIHAM, e),
            }
        }
        if p.involutive.len() >= 2 {
            let mut structures: Vec<(String, PoissonStructure)> =
                self.model.structures.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
            if let Some(pencil) = &self.model.pencil {
                structures.push(("pencil".into(), pencil.clone()));
            }
            let mut items = Vec::new();
            let mut failure = None;
            for (i, a) in p.involutive.iter().enumerate() {
                for b in &p.involutive[i + 1..] {
                    for (_, s) in &structures {
                        match s.bracket(&chart.functions[a], &chart.functions[b]) {
                            Ok(e) => items.push(e),
                            Err(e) => failure = Some(e),
                        }
                    }
                }
            }
            let names: Vec<&str> = structures.iter().map(|(n, _)| n.as_str()).collect();
            let result = match failure {
                Some(e) => Err(e),
                None => Ok(items),
            };
            self.exact(
                "pencil.involution",
                ANCHOR_INVOLUTION,
                result,
                &format!("{} pairwise commute for {}", p.involutive.join(", "), names.join(", ")),
                Observed::Nothing,
            );
        }
        self.chart_checks();
    }

    fn chart_checks(&mut self) {
        let Some(chart) = self.fixture.chart.clone() else { return };
        for name in &chart.homogeneous {
            let f = &chart.functions[name];
            match homogeneity_degree(&chart.liouville, &chart.coords, f) {
                Some(w) => {
                    let value = crate::scalar::to_f64::<f64>(num_traits::ToPrimitive::to_f64(&w).unwrap_or(f64::NAN));
                    self.push(
                        format!("chart.homogeneity.{name}"),
                        ANCHOR_LIOUVILLE,
                        Status::Pass,
                        0.0,
                        0.0,
                        format!("degree {w}"),
                        Observed::Number(value),
                    );
                }
                None => self.push(
                    format!("chart.homogeneity.{name}"),
                    ANCHOR_LIOUVILLE,
                    Status::Fail,
                    1.0,
                    0.0,
                    "not homogeneous for the Liouville field",
                    Observed::Nothing,
                ),
            }
        }
        if !chart.restriction.is_empty() {
            let bindings: Vec<(&str, Expression)> = chart.restriction.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
            for name in &chart.restricted {
                let r = restrict(&chart.functions[name], &bindings);
                self.push(
                    format!("chart.restriction.{name}"),
                    ANCHOR_LIOUVILLE,
                    Status::Pass,
                    0.0,
                    0.0,
                    format!("restricts to {r}"),
                    Observed::Expressions(vec![r]),
                );
            }
        }
        if !chart.independent.is_empty() {
            let fs: Vec<Expression> = chart.independent.iter().map(|n| chart.functions[n].clone()).collect();
            let points = self.random_points(chart.coords.len(), self.fixture.suite.samples);
            self.rank_record("chart.independence", ANCHOR_LIOUVILLE, &fs, &chart.coords, &points);
        }
    }

    /// Rank of the differentials at each point; passes when every admissible
    /// point has full rank.
    fn rank_record(&mut self, name: &str, anchor: &str, fs: &[Expression], coords: &[String], points: &[Vec<f64>]) {
        let mut min_rank: Option<usize> = None;
        let mut deficient = 0usize;
        let mut admissible = 0usize;
        for p in points {
            if let Ok(r) = rank_of_differentials(fs, coords, std::slice::from_ref(p)) {
                admissible += 1;
                if r < fs.len() {
                    deficient += 1;
                }
                min_rank = Some(min_rank.map_or(r, |m| m.min(r)));
            }
        }
        match min_rank {
            Some(r) => self.push(
                name,
                anchor,
                if deficient == 0 { Status::Pass } else { Status::Fail },
                deficient as f64,
                0.0,
                format!("rank {r} of {} at {admissible} points", fs.len()),
                Observed::Count(r),
            ),
            None => self.push(name, anchor, Status::Fail, f64::NAN, 0.0, "no admissible sample point", Observed::Nothing),
        }
    }

    fn contact(&mut self) {
        let (Some(c), Some(chart)) = (self.fixture.contact.clone(), self.model.contact.clone()) else {
            self.skip("contact", ANCHOR_CONTACT, "model has no contact section");
            return;
        };
        let mut points = c.points.clone();
        points.extend(self.random_points(c.coords.len(), self.fixture.suite.samples));
        let h = c.hamiltonian.clone();

        match chart.contact_nondegeneracy(&points) {
            Ok(nd) => {
                let observed = match &nd.constant {
                    Some(k) => Observed::Number(num_traits::ToPrimitive::to_f64(k).unwrap_or(f64::NAN)),
                    None => Observed::Nothing,
                };
                let min = nd.values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
                self.push(
                    "contact.nondegeneracy",
                    ANCHOR_NONDEGENERATE,
                    if nd.nonzero_everywhere { Status::Pass } else { Status::Fail },
                    min,
                    0.0,
                    format!("α∧dα coefficient {}", nd.coefficient),
                    observed,
                );
            }
            Err(e) => self.error("contact.nondegeneracy", ANCHOR_NONDEGENERATE, e),
        }

        let field = if chart.is_standard() { chart.contact_vector_field(&h).ok() } else { None };
        match &field {
            Some(x) => {
                let x: Vec<Expression> = x.iter().map(Expression::simplify).collect();
                self.push("contact.flow", ANCHOR_CONTACT, Status::Pass, 0.0, 0.0, format!("X_h = {}", list(&x)), Observed::Expressions(x));
            }
            None => self.skip("contact.flow", ANCHOR_CONTACT, "flows need the standard chart"),
        }
        for (name, i) in &c.integrals {
            let bracket = chart.jacobi_bracket(i, &h).map(|b| b.simplify());
            match bracket {
                Ok(b) => {
                    let (status, nonzero) = verdicts(std::slice::from_ref(&b));
                    self.push(
                        format!("contact.dissipated.{name}"),
                        ANCHOR_CONTACT,
                        status,
                        nonzero as f64,
                        0.0,
                        format!("{{{i}, h}}_α = {b}"),
                        Observed::Truth(status != Status::Fail),
                    );
                }
                Err(e) => self.error(format!("contact.dissipated.{name}"), ANCHOR_CONTACT, e),
            }
            if let Some(x) = &field {
                let d = apply_field(x, chart.coords(), i);
                self.push(
                    format!("contact.flow_derivative.{name}"),
                    ANCHOR_CONTACT,
                    Status::Pass,
                    0.0,
                    0.0,
                    format!("X_h({i}) = {d}"),
                    Observed::Expressions(vec![d]),
                );
            }
        }
        if !c.integrals.is_empty() {
            let fs: Vec<Expression> = c.integrals.values().cloned().collect();
            self.rank_record("contact.rank", ANCHOR_CONTACT, &fs, &c.coords, &points);
        }
        if c.correspondence {
            self.correspondence(&chart);
        }
    }

    fn correspondence(&mut self, chart: &ContactChart) {
        let vars: Vec<&str> = chart.coords().iter().map(String::as_str).collect();
        let samples = self.fixture.suite.samples;
        let mut items = Vec::new();
        let mut failure = None;
        for _ in 0..samples {
            let f = self.random_polynomial(&vars);
            let g = self.random_polynomial(&vars);
            for sign in [LiftSign::Positive, LiftSign::Negative] {
                match correspondence_residual(&f, &g, sign) {
                    Ok(r) => items.push(r),
                    Err(e) => failure = Some(e),
                }
            }
        }
        let result = match failure {
            Some(e) => Err(e),
            None => Ok(items),
        };
        self.exact(
            "contact.correspondence",
            ANCHOR_CORRESPONDENCE,
            result,
            &format!("{{f^Σ, g^Σ}} = ({{f, g}}_α)^Σ for {samples} random pairs, both lift signs"),
            Observed::Nothing,
        );
    }

    // ---- quantum -----------------------------------------------------------

    fn gksl(&mut self) {
        let Some(g) = self.model.generator.clone() else {
            self.skip("gksl", ANCHOR_DUALITY, "model has no quantum section");
            return;
        };
        let tol = self.fixture.suite.tolerances.clone();
        let d = g.dim();
        let n = self.fixture.suite.samples;
        let (mut pairing, mut trace, mut herm) = (0.0f64, 0.0f64, 0.0f64);
        let mut failure = None;
        for _ in 0..n {
            let rho = random_density::<f64, _>(&mut self.rng, d);
            let a = random_matrix::<f64, _>(&mut self.rng, d);
            match (g.adjoint_pairing_residual(&rho, &a), g.lindblad_apply(&rho)) {
                (Ok(r), Ok(l)) => {
                    pairing = pairing.max(r);
                    trace = trace.max(l.trace().norm());
                    herm = herm.max(hs_norm(&(&l - l.adjoint())));
                }
                (Err(e), _) | (_, Err(e)) => failure = Some(e),
            }
        }
        if let Some(e) = failure {
            self.error("gksl.duality", ANCHOR_DUALITY, e);
            return;
        }
        self.numeric("gksl.duality", ANCHOR_DUALITY, pairing, tol.numeric, format!("|Tr(𝓛(ρ)A) − Tr(ρ𝓛†(A))| over {n} random pairs"));
        self.numeric("gksl.trace", ANCHOR_SEMIGROUP, trace, tol.numeric, format!("|Tr 𝓛(ρ)| over {n} random states"));
        self.numeric("gksl.hermiticity", ANCHOR_SEMIGROUP, herm, tol.numeric, "‖𝓛(ρ) − 𝓛(ρ)†‖");
        match g.heisenberg_apply(&identity(d)) {
            Ok(u) => self.numeric("gksl.unit", ANCHOR_KERNEL, hs_norm(&u), tol.numeric, "‖𝓛†(𝟙)‖"),
            Err(e) => self.error("gksl.unit", ANCHOR_KERNEL, e),
        }
        let s = g.to_superoperator(Picture::Schrodinger);
        let (t1, t2) = (0.4, 0.9);
        let lhs = s.exp(t1 + t2).matrix;
        let rhs = &s.exp(t1).matrix * &s.exp(t2).matrix;
        self.numeric("gksl.semigroup", ANCHOR_SEMIGROUP, hs_norm(&(lhs - rhs)), tol.semigroup, format!("‖e^{{{}𝓛}} − e^{{{t1}𝓛}}e^{{{t2}𝓛}}‖", t1 + t2));
        for t in CP_TIMES {
            let check = cp_check(&s.exp(t), tol.cp);
            self.push(
                format!("gksl.cp.t={t}"),
                ANCHOR_CP,
                if check.passed { Status::Pass } else { Status::Fail },
                -check.min_eigenvalue.min(0.0),
                tol.cp,
                format!("min Choi eigenvalue {:.3e}", check.min_eigenvalue),
                Observed::Number(check.min_eigenvalue),
            );
        }
        match g.kernel_of_adjoint(tol.kernel) {
            Ok(k) => {
                let unit = k.distance(&identity(d));
                let gap = k.smallest_range.map_or("none".to_string(), |s| format!("{s:.3e}"));
                self.push(
                    "gksl.kernel",
                    ANCHOR_KERNEL,
                    if unit <= tol.kernel { Status::Pass } else { Status::Fail },
                    unit,
                    tol.kernel,
                    format!("dim ker 𝓛† = {}; largest null singular value {:.3e}, smallest nonzero {gap}", k.dim(), k.largest_null),
                    Observed::Count(k.dim()),
                );
            }
            Err(e) => self.error("gksl.kernel", ANCHOR_KERNEL, e),
        }
        let integrals = self.model.integrals.clone();
        for (k, a) in integrals.iter().enumerate() {
            match g.commutant_membership(a, tol.numeric * a.norm().max(1.0)) {
                Ok(m) => {
                    let residual = m.max_commutator.max(m.adjoint_norm);
                    self.push(
                        format!("gksl.integral[{k}]"),
                        ANCHOR_KERNEL,
                        if m.member && m.adjoint_norm <= tol.numeric * a.norm().max(1.0) { Status::Pass } else { Status::Fail },
                        residual,
                        tol.numeric,
                        format!("max commutator {:.3e}, ‖𝓛†(I)‖ {:.3e}", m.max_commutator, m.adjoint_norm),
                        Observed::Truth(m.member),
                    );
                }
                Err(e) => self.error(format!("gksl.integral[{k}]"), ANCHOR_KERNEL, e),
            }
        }
        if !integrals.is_empty() {
            match g.invariant_algebra_check(&integrals, tol.numeric * 10.0) {
                Ok(a) => self.push(
                    "gksl.invariant_algebra",
                    ANCHOR_ALGEBRA,
                    if a.passed { Status::Pass } else { Status::Fail },
                    a.max_residual.max(a.max_commutator),
                    tol.numeric * 10.0,
                    format!("generated algebra dim {}, abelian {}, in commutant {}", a.dim, a.abelian, a.commutant),
                    Observed::Count(a.dim),
                ),
                Err(e) => self.error("gksl.invariant_algebra", ANCHOR_ALGEBRA, e),
            }
        }
        self.matrix_expectations(&g);
    }

    fn matrix_expectations(&mut self, g: &Gksl<f64>) {
        for e in self.fixture.suite.expectations.clone() {
            match &e.expected {
                ExpectedValue::Image { input, output } => {
                    let (Ok(a), Ok(b)) = (input.to_matrix::<f64>(), output.to_matrix::<f64>()) else { continue };
                    match g.heisenberg_apply(&a) {
                        Ok(img) => self.numeric(e.check.clone(), &e.anchor, hs_norm(&(img - b)), e.tolerance, "‖𝓛†(A) − expected‖"),
                        Err(err) => self.error(e.check.clone(), &e.anchor, err),
                    }
                }
                ExpectedValue::Evolution { observable, times, values } => {
                    let Ok(a) = observable.to_matrix::<f64>() else { continue };
                    let mut worst = 0.0f64;
                    let mut failure = None;
                    for (t, v) in times.iter().zip(values) {
                        let Ok(v) = v.to_matrix::<f64>() else { continue };
                        match g.evolve_heisenberg(&a, *t) {
                            Ok(at) => worst = worst.max(hs_norm(&(at - v))),
                            Err(err) => failure = Some(err),
                        }
                    }
                    match failure {
                        Some(err) => self.error(e.check.clone(), &e.anchor, err),
                        None => self.numeric(
                            e.check.clone(),
                            &e.anchor,
                            worst,
                            e.tolerance,
                            format!("max ‖A(t) − closed form‖ over {} times", times.len()),
                        ),
                    }
                }
                _ => {}
            }
        }
    }

    fn pencil_quantum(&mut self) {
        let (Some(g0), Some(g1)) = (self.model.generator.clone(), self.model.partner.clone()) else {
            self.skip("pencil-quantum", ANCHOR_BILINDBLAD, "model has no pencil partner generator");
            return;
        };
        let tol = self.fixture.suite.tolerances.clone();
        let lambdas = self.fixture.suite.lambdas.clone();
        match bilindblad_check(&g0, &g1, &self.model.integrals, &lambdas, tol.numeric, tol.cp) {
            Ok(rep) => {
                for p in &rep.points {
                    let l = fmt_lambda(p.lambda);
                    let min = p.cp.iter().fold(f64::INFINITY, |m, (_, v)| m.min(*v));
                    self.push(
                        format!("pencil-quantum.cp.{l}"),
                        ANCHOR_BILINDBLAD,
                        if min >= -tol.cp { Status::Pass } else { Status::Fail },
                        -min.min(0.0),
                        tol.cp,
                        format!("min Choi eigenvalue {min:.3e} over t in {CP_TIMES:?}"),
                        Observed::Number(min),
                    );
                    self.numeric(format!("pencil-quantum.integrals.{l}"), ANCHOR_BILINDBLAD, p.integral_residual, tol.numeric, "max ‖𝓛^(λ)†(I_j)‖");
                    self.numeric(format!("pencil-quantum.affinity.{l}"), ANCHOR_BILINDBLAD, p.affinity_residual, tol.numeric, "‖S_λ − (1−λ)S₀ − λS₁‖");
                    match convex_combine(&g0, &g1, p.lambda) {
                        Ok(g) => self.push(
                            format!("pencil-quantum.lindblads.{l}"),
                            ANCHOR_BILINDBLAD,
                            Status::Pass,
                            0.0,
                            0.0,
                            format!("{} Lindblad operators", g.lindblads().len()),
                            Observed::Count(g.lindblads().len()),
                        ),
                        Err(e) => self.error(format!("pencil-quantum.lindblads.{l}"), ANCHOR_BILINDBLAD, e),
                    }
                }
            }
            Err(e) => self.error("pencil-quantum", ANCHOR_BILINDBLAD, e),
        }
    }

    fn dephasing(&mut self) {
        let Some(g) = self.model.generator.clone() else {
            self.skip("dephasing", ANCHOR_DEPHASING, "model has no quantum section");
            return;
        };
        if self.model.integrals.is_empty() {
            self.skip("dephasing", ANCHOR_DEPHASING, "no integrals to define sectors");
            return;
        }
        let tol = self.fixture.suite.tolerances.clone();
        let sectors = match joint_sectors(&self.model.integrals, SECTOR_GAP) {
            Ok(s) => s,
            Err(e) => {
                self.error("dephasing.sectors", ANCHOR_DEPHASING, e);
                return;
            }
        };
        let mults: Vec<String> = sectors.sectors.iter().map(|s| s.multiplicity().to_string()).collect();
        self.push(
            "dephasing.sectors",
            ANCHOR_DEPHASING,
            Status::Pass,
            sectors.completeness_residual(),
            tol.numeric,
            format!("{} sectors, multiplicities [{}]", sectors.len(), mults.join(",")),
            Observed::Count(sectors.len()),
        );
        match dephasing_rates(&g, &sectors) {
            Ok(r) => {
                let max = r.iter().fold(0.0f64, |m, v| m.max(*v));
                self.push("dephasing.rates", ANCHOR_DEPHASING, Status::Pass, 0.0, 0.0, format!("max rate {max:.6}"), Observed::Number(max));
            }
            Err(e) => self.error("dephasing.rates", ANCHOR_DEPHASING, e),
        }
        let times = self.fixture.suite.times.clone();
        if times.is_empty() {
            self.skip("dephasing.coherence", ANCHOR_DEPHASING, "no trajectory times requested");
            return;
        }
        let rho0 = match &self.model.initial_state {
            Some(r) => r.clone(),
            None => random_density::<f64, _>(&mut self.rng, g.dim()),
        };
        match coherence_trajectory(&g, &rho0, &sectors, &times) {
            Ok(table) => {
                if table.law_applies {
                    self.numeric(
                        "dephasing.coherence",
                        ANCHOR_DEPHASING,
                        table.max_relative_error,
                        tol.coherence,
                        "‖ρ_νμ(t)‖ = e^{−rate·t}‖ρ_νμ(0)‖, relative error",
                    );
                } else {
                    self.skip("dephasing.coherence", ANCHOR_DEPHASING, "H does not commute with the sector projectors");
                }
                if table.hamiltonian_scalar {
                    self.numeric("dephasing.diagonal", ANCHOR_DEPHASING, table.max_diagonal_drift, tol.diagonal, "‖ρ_νν(t) − ρ_νν(0)‖");
                } else {
                    self.skip("dephasing.diagonal", ANCHOR_DEPHASING, "H is not scalar on every sector");
                }
                self.coherences = Some(table.to_csv());
            }
            Err(e) => self.error("dephasing.coherence", ANCHOR_DEPHASING, e),
        }
    }

    // ---- semiclassical -----------------------------------------------------

    fn egorov(&mut self) {
        let (Some(s), Some(model)) = (self.fixture.symbols.clone(), self.model.egorov.clone()) else {
            self.skip("egorov", ANCHOR_EGOROV, "model has no symbols section");
            return;
        };
        let tol = self.fixture.suite.tolerances.clone();
        let mut symbols = vec![model.hamiltonian.clone(), model.observable.clone()];
        symbols.extend(model.lindblads.iter().map(|(_, l)| l.clone()));
        symbols.extend(s.integrals.iter().cloned());

        let mut graded = true;
        for (i, a) in symbols.iter().enumerate() {
            for b in &symbols[i..] {
                let r = dirac_residual(a, b);
                graded &= r.hbar_coefficient(0).is_zero() && r.hbar_coefficient(1).is_zero();
            }
        }
        self.push(
            "egorov.dirac",
            ANCHOR_DIRAC,
            if graded { Status::Pass } else { Status::Fail },
            if graded { 0.0 } else { 1.0 },
            0.0,
            format!("ħ⁰ and ħ¹ parts of moyal − poisson vanish for {} symbols", symbols.len()),
            Observed::Truth(graded),
        );

        let mut cancel = true;
        let mut conditional = 0usize;
        for (_, l) in &model.lindblads {
            for f in [&model.observable, &model.hamiltonian] {
                let (d0, d1) = dissipator_symbol_residual(l, f);
                cancel &= d0.is_zero();
                let abs2 = star_product(&l.conj(), l);
                if poisson_bracket(l, f).is_zero() && poisson_bracket(&abs2, f).is_zero() {
                    conditional += 1;
                    cancel &= d1.is_zero();
                }
            }
        }
        self.push(
            "egorov.cancellation",
            ANCHOR_EGOROV,
            if cancel { Status::Pass } else { Status::Fail },
            if cancel { 0.0 } else { 1.0 },
            0.0,
            format!("d⁰ ≡ 0 for every pair; d¹ ≡ 0 on {conditional} pairs with vanishing brackets"),
            Observed::Truth(cancel),
        );

        let mut worst = 0.0f64;
        let mut failure = None;
        for &hbar in &s.hbars {
            match dissipator_identity(&model, hbar, s.truncation, s.margin) {
                Ok(r) => worst = worst.max(r),
                Err(e) => failure = Some(e),
            }
        }
        match failure {
            Some(e) => self.error("egorov.dissipator", ANCHOR_EGOROV, e),
            None => self.numeric(
                "egorov.dissipator",
                ANCHOR_EGOROV,
                worst,
                tol.weyl,
                "interior ‖D(Q f) − Q(Σγ d(l, f))‖ over the ħ grid",
            ),
        }

        match egorov_sweep(&model, &s.hbars, s.truncation, s.margin) {
            Ok(sweep) => {
                let max_ratio = sweep.max_ratio();
                let (status, detail, observed) = match sweep.slope {
                    Some(k) => (
                        if k >= 1.0 - tol.slope { Status::Pass } else { Status::Fail },
                        format!("log-log slope {k:.4} of r(ħ) over {} values", sweep.rows.len()),
                        Observed::Number(k),
                    ),
                    None if max_ratio <= tol.weyl => (Status::Pass, "residual vanishes at every ħ".to_string(), Observed::Nothing),
                    None => (Status::Fail, "slope undefined".to_string(), Observed::Nothing),
                };
                let slope = sweep.slope.unwrap_or(f64::NAN);
                self.push("egorov.slope", ANCHOR_EGOROV, status, slope, 1.0 - tol.slope, detail, observed);
                let expected_tol = self.fixture.expectation("egorov.slope").map_or(tol.slope, |e| e.tolerance);
                self.egorov = Some(sweep.to_csv(expected_tol));
            }
            Err(e) => self.error("egorov.slope", ANCHOR_EGOROV, e),
        }

        for (k, integral) in s.integrals.iter().enumerate() {
            let m = EgorovModel { observable: integral.clone(), ..model.clone() };
            match egorov_sweep(&m, &s.hbars, s.truncation, s.margin) {
                Ok(sweep) => self.numeric(
                    format!("egorov.integral[{k}]"),
                    ANCHOR_EGOROV,
                    sweep.max_ratio(),
                    tol.weyl,
                    "max r(ħ) with the integral as observable",
                ),
                Err(e) => self.error(format!("egorov.integral[{k}]"), ANCHOR_EGOROV, e),
            }
        }
    }

    // ---- expectations ------------------------------------------------------

    fn apply_expectations(&mut self) {
        for e in self.fixture.suite.expectations.clone() {
            if matches!(e.expected, ExpectedValue::Image { .. } | ExpectedValue::Evolution { .. }) {
                if !self.records.iter().any(|(r, _)| r.name == e.check) {
                    self.skip(e.check.clone(), &e.anchor, "not run");
                }
                continue;
            }
            let Some((record, observed)) = self.records.iter_mut().find(|(r, _)| r.name == e.check) else {
                self.skip(e.check.clone(), &e.anchor, "not run");
                continue;
            };
            if record.status == Status::Skipped {
                continue;
            }
            record.anchor = e.anchor.clone();
            let tag = match e.provenance {
                Provenance::Stated => "stated",
                Provenance::Computed => "computed",
                Provenance::Immediate => "immediate",
            };
            let (matches, shown) = compare(observed, &e.expected, e.tolerance);
            if matches {
                record.detail.push_str(&format!("; matches expected {shown} ({tag})"));
            } else {
                record.status = Status::Fail;
                record.detail.push_str(&format!("; expected {shown} ({tag})"));
            }
        }
    }
}

fn compare(observed: &Observed, expected: &ExpectedValue, tol: f64) -> (bool, String) {
    match expected {
        ExpectedValue::Expressions { values } => {
            let shown = list(values);
            let Observed::Expressions(got) = observed else { return (false, shown) };
            let ok = got.len() == values.len() && got.iter().zip(values).all(|(a, b)| (a - b).zero_test().is_zero());
            (ok, shown)
        }
        ExpectedValue::Number { value } => {
            let shown = if tol > 0.0 { format!("{value}±{tol}") } else { format!("{value}") };
            let Observed::Number(got) = observed else { return (false, shown) };
            ((got - value).abs() <= tol, shown)
        }
        ExpectedValue::Count { value } => (matches!(observed, Observed::Count(n) if n == value), value.to_string()),
        ExpectedValue::Truth { value } => (matches!(observed, Observed::Truth(b) if b == value), value.to_string()),
        ExpectedValue::Image { .. } | ExpectedValue::Evolution { .. } => (false, String::new()),
    }
}

/// Largest interior `‖D(Q f) − Q(Σ γ_k d(l_k, f))‖` at one `ħ`, where `D` is
/// the dissipator alone and `d` the exact dissipator symbol.
pub fn dissipator_identity(model: &EgorovModel, hbar: f64, n: usize, margin: usize) -> Result<f64> {
    let qf = weyl_quantize(&model.observable, n, hbar)?.matrix;
    let mut ls = Vec::with_capacity(model.lindblads.len());
    let mut symbol = PhaseSymbol::zero();
    for (rate, l) in &model.lindblads {
        ls.push(weyl_quantize(l, n, hbar)?.matrix * num_complex::Complex::new(rate.sqrt(), 0.0));
        let r = crate::scalar::GaussianRational::real(rational_from_f64(*rate));
        symbol = symbol + dissipator_symbol(l, &model.observable).scale(&r);
    }
    let zero_h = CMatrix::<f64>::zeros(n, n);
    let d = Gksl::new(hbar, zero_h, ls)?.heisenberg_apply(&qf)?;
    let target = weyl_quantize(&symbol, n, hbar)?.matrix;
    let k = n.saturating_sub(margin);
    Ok(op_norm(&(d - target).view((0, 0), (k, k)).into_owned()))
}

fn rational_from_f64(x: f64) -> crate::scalar::Rational {
    crate::scalar::Rational::from_float(x).unwrap_or_default()
}
