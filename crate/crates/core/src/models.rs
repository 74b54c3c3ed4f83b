// SPDX-License-Identifier: Apache-2.0

//! Built-in fixtures for the worked examples.
//!
//! A fixture is plain data in the config format: classical charts and
//! structures as expressions, quantum generators as matrices, phase-space
//! symbols, and a ledger of expected values keyed by check name.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PencilMode;
use crate::gksl::{functional_calculus, joint_sectors, SECTOR_GAP};
use crate::linalg::{c, diag, pauli_x, pauli_y, pauli_z, CMatrix, MatrixData};
use crate::moyal::PhaseSymbol;
use crate::symbolic::Expression;

/// Names and one-line descriptions of the built-in models.
pub const BUILTIN_MODELS: &[(&str, &str)] = &[
    ("euler_pencil", "Euler-top Poisson pencil on so(3)*: Casimirs, bi-Hamiltonian field, homogeneous lifts"),
    ("euler_quantum", "Euler-top dephasing generator built by joint functional calculus"),
    ("linear_contact", "linear contact Hamiltonian h = z - p with dissipated quantity exp(-z)"),
    ("oscillator", "harmonic oscillator with Hamiltonian dephasing: Egorov residual sweep"),
    ("pn_r4", "Poisson-Nijenhuis structure on the cotangent bundle of R^2"),
    ("qubit_dephasing", "qubit pure dephasing"),
    ("qubit_pencil", "bi-Lindblad qubit pencil between unitary and dephasing dynamics"),
];

/// Verification suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteName {
    Pencil,
    Contact,
    Gksl,
    PencilQuantum,
    Dephasing,
    Egorov,
}

impl SuiteName {
    pub const ALL: [SuiteName; 6] = [
        SuiteName::Pencil,
        SuiteName::Contact,
        SuiteName::Gksl,
        SuiteName::PencilQuantum,
        SuiteName::Dephasing,
        SuiteName::Egorov,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::Pencil => "pencil",
            SuiteName::Contact => "contact",
            SuiteName::Gksl => "gksl",
            SuiteName::PencilQuantum => "pencil-quantum",
            SuiteName::Dephasing => "dephasing",
            SuiteName::Egorov => "egorov",
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SuiteName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite `{s}`")))
    }
}

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Printed in the source text.
    Stated,
    /// Worked out independently of the code under test.
    Computed,
    /// Follows at once from the definitions.
    Immediate,
}

/// Expected outcome of a named check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ExpectedValue {
    /// Exact expressions, compared by the zero test.
    Expressions { values: Vec<Expression> },
    Number { value: f64 },
    Count { value: usize },
    Truth { value: bool },
    /// `𝓛†(input) = output` for the primary generator.
    Image { input: MatrixData, output: MatrixData },
    /// `e^{t𝓛†}(observable)` at each time.
    Evolution { observable: MatrixData, times: Vec<f64>, values: Vec<MatrixData> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub check: String,
    pub anchor: String,
    pub provenance: Provenance,
    pub expected: ExpectedValue,
    pub tolerance: f64,
}

/// Chart-level data shared by the classical checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSection {
    pub coords: Vec<String>,
    /// Liouville field components in chart order; empty when absent.
    #[serde(default)]
    pub liouville: Vec<Expression>,
    /// Named functions on the chart.
    #[serde(default)]
    pub functions: BTreeMap<String, Expression>,
    /// Functions whose Liouville weight is reported.
    #[serde(default)]
    pub homogeneous: Vec<String>,
    /// Functions whose differentials must be independent at random points.
    #[serde(default)]
    pub independent: Vec<String>,
    /// Hypersurface given by fixing coordinates.
    #[serde(default)]
    pub restriction: BTreeMap<String, Expression>,
    /// Functions restricted to the hypersurface.
    #[serde(default)]
    pub restricted: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PencilSpec {
    pub first: String,
    pub second: String,
    pub mode: PencilMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianPair {
    pub structure: String,
    pub function: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiHamiltonianSpec {
    pub first: HamiltonianPair,
    pub second: HamiltonianPair,
}

/// Poisson structures on the chart, keyed by name; entries keyed `"a,b"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoissonSection {
    pub structures: BTreeMap<String, BTreeMap<String, Expression>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pencil: Option<PencilSpec>,
    /// Structure name to the chart functions that must be its Casimirs.
    #[serde(default)]
    pub casimirs: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bihamiltonian: Option<BiHamiltonianSpec>,
    /// Chart functions that must pairwise commute for every structure and
    /// along the pencil.
    #[serde(default)]
    pub involutive: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContactSection {
    pub coords: Vec<String>,
    pub alpha: Vec<Expression>,
    pub reeb: Vec<Expression>,
    /// Jacobi bivector entries keyed `"a,b"`.
    pub lambda: BTreeMap<String, Expression>,
    pub hamiltonian: Expression,
    #[serde(default)]
    pub integrals: BTreeMap<String, Expression>,
    /// Points always included in rank and nondegeneracy sampling.
    #[serde(default)]
    pub points: Vec<Vec<f64>>,
    /// Run the symplectization correspondence on random polynomial pairs.
    #[serde(default)]
    pub correspondence: bool,
}

/// GKSL generator `{hbar, H, lindblads[]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorData {
    pub hbar: f64,
    #[serde(rename = "H")]
    pub hamiltonian: MatrixData,
    #[serde(default)]
    pub lindblads: Vec<MatrixData>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumSection {
    pub hbar: f64,
    #[serde(rename = "H")]
    pub hamiltonian: MatrixData,
    #[serde(default)]
    pub lindblads: Vec<MatrixData>,
    /// Second generator of a bi-Lindblad pencil.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partner: Option<GeneratorData>,
    /// Commuting quantum integrals; they also define the sectors.
    #[serde(default)]
    pub integrals: Vec<MatrixData>,
    /// Initial state for trajectories; a seeded random state when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<MatrixData>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatedSymbol {
    pub rate: f64,
    pub symbol: PhaseSymbol,
}

/// Phase-space symbols for the semiclassical checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSection {
    pub hamiltonian: PhaseSymbol,
    pub observable: PhaseSymbol,
    #[serde(default)]
    pub lindblads: Vec<RatedSymbol>,
    /// Symbols expected to be exact quantum integrals.
    #[serde(default)]
    pub integrals: Vec<PhaseSymbol>,
    pub truncation: usize,
    pub margin: usize,
    pub hbars: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Duality, trace, Hermiticity, unit and integral residuals.
    pub numeric: f64,
    /// Negative Choi eigenvalues.
    pub cp: f64,
    /// Kernel rank threshold.
    pub kernel: f64,
    /// Semigroup law and closed-form evolutions.
    pub semigroup: f64,
    /// Relative error of the coherence norm law.
    pub coherence: f64,
    /// Drift of diagonal blocks.
    pub diagonal: f64,
    /// Interior residuals of exact Weyl identities.
    pub weyl: f64,
    /// Allowed shortfall of the Egorov slope below 1.
    pub slope: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            numeric: 1e-12,
            cp: 1e-10,
            kernel: 1e-9,
            semigroup: 1e-9,
            coherence: 1e-8,
            diagonal: 1e-10,
            weyl: 1e-10,
            slope: 0.2,
        }
    }
}

pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_LAMBDAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
pub const DEFAULT_TIMES: [f64; 4] = [0.1, 0.5, 1.0, 2.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteSection {
    pub suites: Vec<SuiteName>,
    pub seed: u64,
    /// Randomized checks per property.
    pub samples: usize,
    /// Trajectory times; empty disables trajectories.
    pub times: Vec<f64>,
    /// Pencil parameters for the bi-Lindblad checks.
    pub lambdas: Vec<f64>,
    pub tolerances: Tolerances,
    pub expectations: Vec<Expectation>,
}

impl Default for SuiteSection {
    fn default() -> Self {
        SuiteSection {
            suites: Vec::new(),
            seed: 0,
            samples: DEFAULT_SAMPLES,
            times: DEFAULT_TIMES.to_vec(),
            lambdas: DEFAULT_LAMBDAS.to_vec(),
            tolerances: Tolerances::default(),
            expectations: Vec::new(),
        }
    }
}

/// A complete model in the config format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFixture {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<ChartSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poisson: Option<PoissonSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contact: Option<ContactSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantum: Option<QuantumSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbols: Option<SymbolSection>,
    #[serde(default)]
    pub suite: SuiteSection,
}

impl ModelFixture {
    pub fn expectation(&self, check: &str) -> Option<&Expectation> {
        self.suite.expectations.iter().find(|e| e.check == check)
    }
}

/// Built-in fixture by name, with default parameters.
pub fn builtin(name: &str) -> Result<ModelFixture> {
    match name {
        "euler_pencil" => Ok(euler_pencil()),
        "euler_quantum" => euler_quantum(&default_euler_grid(), &EULER_GAMMAS, &default_euler_phis()),
        "linear_contact" => Ok(linear_contact()),
        "oscillator" => Ok(oscillator(0.5)),
        "pn_r4" => Ok(pn_r4()),
        "qubit_dephasing" => Ok(qubit_dephasing(1.0, 0.5)),
        "qubit_pencil" => Ok(qubit_pencil(1.0, 2.0, 0.5)),
        other => Err(Error::InvalidInput(format!(
            "unknown model `{other}`; available: {}",
            BUILTIN_MODELS.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn e(text: &str) -> Expression {
    Expression::parse(text).expect("built-in expression parses")
}

fn exprs(items: &[&str]) -> Vec<Expression> {
    items.iter().map(|t| e(t)).collect()
}

fn entries(items: &[(&str, &str)]) -> BTreeMap<String, Expression> {
    items.iter().map(|(k, v)| (k.to_string(), e(v))).collect()
}

fn names(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn expect(check: &str, anchor: &str, provenance: Provenance, expected: ExpectedValue, tolerance: f64) -> Expectation {
    Expectation { check: check.into(), anchor: anchor.into(), provenance, expected, tolerance }
}

fn expect_exprs(check: &str, anchor: &str, provenance: Provenance, values: &[&str]) -> Expectation {
    expect(check, anchor, provenance, ExpectedValue::Expressions { values: exprs(values) }, 0.0)
}

fn md(m: &CMatrix<f64>) -> MatrixData {
    MatrixData::from_matrix(m)
}

fn standard_contact(hamiltonian: &str, integrals: &[(&str, &str)], points: Vec<Vec<f64>>) -> ContactSection {
    ContactSection {
        coords: names(&["q", "p", "z"]),
        alpha: exprs(&["-p", "0", "1"]),
        reeb: exprs(&["0", "0", "1"]),
        lambda: entries(&[("q,p", "1"), ("p,z", "-p")]),
        hamiltonian: e(hamiltonian),
        integrals: entries(integrals),
        points,
        correspondence: true,
    }
}

/// Cotangent bundle of `R²` with the canonical structure `Λ` and the
/// Nijenhuis-deformed `Λ₁ = p₁∂_{x¹}∧∂_{p₁} + p₂x²∂_{x²}∧∂_{p₂}`.
pub fn pn_r4() -> ModelFixture {
    let anchor = "cotangent bundle example: Poisson-Nijenhuis pair and eigenvalue integrals";
    let chart = ChartSection {
        coords: names(&["x1", "x2", "p1", "p2"]),
        liouville: exprs(&["0", "0", "p1", "p2"]),
        functions: entries(&[("lambda1", "p1"), ("lambda2", "p2*x2"), ("H", "p1 + p2*x2")]),
        homogeneous: names(&["H", "lambda1", "lambda2"]),
        independent: names(&["lambda1", "lambda2"]),
        restriction: BTreeMap::new(),
        restricted: Vec::new(),
    };
    let mut structures = BTreeMap::new();
    structures.insert("Lambda".to_string(), entries(&[("x1,p1", "1"), ("x2,p2", "1")]));
    structures.insert("Lambda1".to_string(), entries(&[("x1,p1", "p1"), ("x2,p2", "p2*x2")]));
    let poisson = PoissonSection {
        structures,
        pencil: Some(PencilSpec { first: "Lambda".into(), second: "Lambda1".into(), mode: PencilMode::Convex }),
        casimirs: BTreeMap::new(),
        bihamiltonian: None,
        involutive: names(&["lambda1", "lambda2"]),
    };
    // restriction data: α = dz − p dq, h = z − p, I₁ = p, I₂ = z
    let contact = standard_contact("z - p", &[("I1", "p"), ("I2", "z")], Vec::new());
    let expectations = vec![
        expect("chart.homogeneity.H", anchor, Provenance::Stated, ExpectedValue::Number { value: 1.0 }, 0.0),
        expect("chart.homogeneity.lambda1", anchor, Provenance::Computed, ExpectedValue::Number { value: 1.0 }, 0.0),
        expect("chart.homogeneity.lambda2", anchor, Provenance::Computed, ExpectedValue::Number { value: 1.0 }, 0.0),
        expect("contact.rank", anchor, Provenance::Computed, ExpectedValue::Count { value: 2 }, 0.0),
    ];
    ModelFixture {
        name: "pn_r4".into(),
        description: anchor.into(),
        chart: Some(chart),
        poisson: Some(poisson),
        contact: Some(contact),
        quantum: None,
        symbols: None,
        suite: SuiteSection {
            suites: vec![SuiteName::Pencil, SuiteName::Contact],
            samples: 10,
            expectations,
            ..SuiteSection::default()
        },
    }
}

/// Standard chart with `h = z − p` and the candidate integral `e^{−z}`.
pub fn linear_contact() -> ModelFixture {
    let anchor = "linear contact Hamiltonian h = z - p";
    let contact = standard_contact("z - p", &[("I0", "z - p"), ("I1", "exp(-z)")], vec![vec![0.0, 0.0, 0.0]]);
    let expectations = vec![
        expect_exprs("contact.flow", anchor, Provenance::Stated, &["1", "p", "z"]),
        expect("contact.dissipated.I1", anchor, Provenance::Stated, ExpectedValue::Truth { value: true }, 0.0),
        expect_exprs("contact.flow_derivative.I1", anchor, Provenance::Stated, &["exp(-z)"]),
        expect("contact.rank", anchor, Provenance::Stated, ExpectedValue::Count { value: 2 }, 0.0),
        expect("contact.nondegeneracy", anchor, Provenance::Computed, ExpectedValue::Number { value: 1.0 }, 0.0),
    ];
    ModelFixture {
        name: "linear_contact".into(),
        description: anchor.into(),
        chart: None,
        poisson: None,
        contact: Some(contact),
        quantum: None,
        symbols: None,
        suite: SuiteSection { suites: vec![SuiteName::Contact], samples: 20, expectations, ..SuiteSection::default() },
    }
}

/// `σ_x(t) = e^{−2γt}(cos ωt σ_x − sin ωt σ_y)`.
pub fn qubit_sigma_x(omega: f64, gamma: f64, t: f64) -> CMatrix<f64> {
    (pauli_x::<f64>() * c::<f64>((omega * t).cos(), 0.0) - pauli_y::<f64>() * c::<f64>((omega * t).sin(), 0.0))
        * c::<f64>((-2.0 * gamma * t).exp(), 0.0)
}

/// Times at which the closed-form `σ_x(t)` is compared: `[0, 5]` in steps of ¼.
pub fn qubit_evolution_times() -> Vec<f64> {
    (0..=20).map(|k| k as f64 * 0.25).collect()
}

/// `H = ħω/2·σ_z`, `L = √γ·σ_z`, `ħ = 1`.
pub fn qubit_dephasing(omega: f64, gamma: f64) -> ModelFixture {
    let anchor = "qubit pure dephasing";
    let h = pauli_z::<f64>() * c::<f64>(omega / 2.0, 0.0);
    let l = pauli_z::<f64>() * c::<f64>(gamma.sqrt(), 0.0);
    let times = qubit_evolution_times();
    let expectations = vec![
        expect("gksl.kernel", anchor, Provenance::Stated, ExpectedValue::Count { value: 2 }, 0.0),
        expect(
            "gksl.image.sigma_z",
            anchor,
            Provenance::Stated,
            ExpectedValue::Image { input: md(&pauli_z()), output: md(&CMatrix::zeros(2, 2)) },
            1e-12,
        ),
        expect(
            "gksl.image.sigma_x",
            anchor,
            Provenance::Computed,
            ExpectedValue::Image {
                input: md(&pauli_x()),
                output: md(&(pauli_x::<f64>() * c::<f64>(-2.0 * gamma, 0.0) - pauli_y::<f64>() * c::<f64>(omega, 0.0))),
            },
            1e-12,
        ),
        expect(
            "gksl.evolution.sigma_x",
            anchor,
            Provenance::Stated,
            ExpectedValue::Evolution {
                observable: md(&pauli_x()),
                values: times.iter().map(|t| md(&qubit_sigma_x(omega, gamma, *t))).collect(),
                times,
            },
            1e-9,
        ),
        expect("dephasing.sectors", anchor, Provenance::Immediate, ExpectedValue::Count { value: 2 }, 0.0),
    ];
    ModelFixture {
        name: "qubit_dephasing".into(),
        description: anchor.into(),
        chart: None,
        poisson: None,
        contact: None,
        quantum: Some(QuantumSection {
            hbar: 1.0,
            hamiltonian: md(&h),
            lindblads: vec![md(&l)],
            partner: None,
            integrals: vec![md(&pauli_z())],
            initial_state: None,
        }),
        symbols: None,
        suite: SuiteSection {
            suites: vec![SuiteName::Gksl, SuiteName::Dephasing],
            expectations,
            ..SuiteSection::default()
        },
    }
}

/// `G₀ = (ħω₀/2·σ_z, ∅)`, `G₁ = (ħω₁/2·σ_z, {√γ·σ_z})`, `ħ = 1`.
pub fn qubit_pencil(omega0: f64, omega1: f64, gamma: f64) -> ModelFixture {
    let anchor = "bi-Lindblad qubit pencil";
    let h0 = pauli_z::<f64>() * c::<f64>(omega0 / 2.0, 0.0);
    let h1 = pauli_z::<f64>() * c::<f64>(omega1 / 2.0, 0.0);
    let l = pauli_z::<f64>() * c::<f64>(gamma.sqrt(), 0.0);
    let expectations = vec![
        expect(
            "gksl.image.sigma_x",
            anchor,
            Provenance::Computed,
            ExpectedValue::Image { input: md(&pauli_x()), output: md(&(pauli_y::<f64>() * c::<f64>(-omega0, 0.0))) },
            1e-12,
        ),
        expect(
            "gksl.image.sigma_z",
            anchor,
            Provenance::Stated,
            ExpectedValue::Image { input: md(&pauli_z()), output: md(&CMatrix::zeros(2, 2)) },
            1e-12,
        ),
        expect("pencil-quantum.lindblads.lambda=0.5", anchor, Provenance::Stated, ExpectedValue::Count { value: 1 }, 0.0),
    ];
    ModelFixture {
        name: "qubit_pencil".into(),
        description: anchor.into(),
        chart: None,
        poisson: None,
        contact: None,
        quantum: Some(QuantumSection {
            hbar: 1.0,
            hamiltonian: md(&h0),
            lindblads: Vec::new(),
            partner: Some(GeneratorData { hbar: 1.0, hamiltonian: md(&h1), lindblads: vec![md(&l)] }),
            integrals: vec![md(&pauli_z())],
            initial_state: None,
        }),
        symbols: None,
        suite: SuiteSection {
            suites: vec![SuiteName::Gksl, SuiteName::PencilQuantum],
            expectations,
            ..SuiteSection::default()
        },
    }
}

/// Lie-Poisson pencil on `so(3)*` with Casimirs `C₀ = −½|m|²`, `C₁ = m₁² + m₂m₃`.
pub fn euler_pencil() -> ModelFixture {
    let anchor = "Euler-top pencil";
    let chart = ChartSection {
        coords: names(&["m1", "m2", "m3"]),
        liouville: exprs(&["m1", "m2", "m3"]),
        functions: entries(&[
            ("C0", "-1/2*(m1^2 + m2^2 + m3^2)"),
            ("C1", "m1^2 + m2*m3"),
            ("I0_lift", "sqrt(m1^2 + m2^2 + m3^2)"),
            ("I1_lift", "sqrt(m1^2 + m2*m3)"),
        ]),
        homogeneous: names(&["C0", "C1", "I0_lift", "I1_lift"]),
        independent: names(&["C0", "C1"]),
        restriction: entries(&[("m1", "1")]),
        restricted: names(&["I0_lift", "I1_lift"]),
    };
    let mut structures = BTreeMap::new();
    structures.insert("pi0".to_string(), entries(&[("m1,m2", "-m3"), ("m1,m3", "m2"), ("m2,m3", "-m1")]));
    structures.insert("pi1".to_string(), entries(&[("m1,m2", "-m2"), ("m1,m3", "m3"), ("m2,m3", "-2*m1")]));
    let mut casimirs = BTreeMap::new();
    casimirs.insert("pi0".to_string(), names(&["C0"]));
    casimirs.insert("pi1".to_string(), names(&["C1"]));
    let poisson = PoissonSection {
        structures,
        pencil: Some(PencilSpec { first: "pi0".into(), second: "pi1".into(), mode: PencilMode::Convex }),
        casimirs,
        bihamiltonian: Some(BiHamiltonianSpec {
            first: HamiltonianPair { structure: "pi0".into(), function: "C1".into() },
            second: HamiltonianPair { structure: "pi1".into(), function: "C0".into() },
        }),
        involutive: names(&["C0", "C1"]),
    };
    let expectations = vec![
        expect_exprs(
            "pencil.entries.convex",
            anchor,
            Provenance::Stated,
            &["(lambda - 1)*m3 - lambda*m2", "(1 - lambda)*m2 + lambda*m3", "-(1 + lambda)*m1"],
        ),
        expect_exprs(
            "pencil.bihamiltonian",
            anchor,
            Provenance::Computed,
            &["m2^2 - m3^2", "2*m1*m3 - m1*m2", "m1*m3 - 2*m1*m2"],
        ),
        expect("chart.homogeneity.C0", anchor, Provenance::Stated, ExpectedValue::Number { value: 2.0 }, 0.0),
        expect("chart.homogeneity.C1", anchor, Provenance::Stated, ExpectedValue::Number { value: 2.0 }, 0.0),
        expect("chart.homogeneity.I0_lift", anchor, Provenance::Stated, ExpectedValue::Number { value: 1.0 }, 0.0),
        expect("chart.homogeneity.I1_lift", anchor, Provenance::Stated, ExpectedValue::Number { value: 1.0 }, 0.0),
        expect_exprs("chart.restriction.I0_lift", anchor, Provenance::Stated, &["sqrt(1 + m2^2 + m3^2)"]),
        expect_exprs("chart.restriction.I1_lift", anchor, Provenance::Stated, &["sqrt(1 + m2*m3)"]),
    ];
    ModelFixture {
        name: "euler_pencil".into(),
        description: anchor.into(),
        chart: Some(chart),
        poisson: Some(poisson),
        contact: None,
        quantum: None,
        symbols: None,
        suite: SuiteSection { suites: vec![SuiteName::Pencil], samples: 10, expectations, ..SuiteSection::default() },
    }
}

/// Default dephasing rates of the Euler quantum fixture.
pub const EULER_GAMMAS: [f64; 3] = [0.5, 0.25, 0.1];

/// `(m₂, m₃) ∈ {−1, 0, 1}²`, row by row.
pub fn default_euler_grid() -> Vec<(f64, f64)> {
    let mut grid = Vec::with_capacity(9);
    for m2 in [-1.0, 0.0, 1.0] {
        for m3 in [-1.0, 0.0, 1.0] {
            grid.push((m2, m3));
        }
    }
    grid
}

/// `φ₁ = ν₀`, `φ₂ = ν₁`, `φ₃ = ν₀ν₁`, as expressions in `nu0` and `nu1`.
pub fn default_euler_phis() -> Vec<Expression> {
    exprs(&["nu0", "nu1", "nu0*nu1"])
}

/// Joint sector value `(ν₀, ν₁) = (√(1+m₂²+m₃²), √(1+m₂m₃))`.
pub fn euler_sector_value(m2: f64, m3: f64) -> (f64, f64) {
    ((1.0 + m2 * m2 + m3 * m3).sqrt(), (1.0 + m2 * m3).sqrt())
}

/// Diagonal `Î₀`, `Î₁` sampling the grid, `H = Î₀`, partner `H₁ = Î₁`, and
/// `L_k = √γ_k·φ_k(Î₀, Î₁)` by joint functional calculus.
pub fn euler_quantum(grid: &[(f64, f64)], gammas: &[f64], phis: &[Expression]) -> Result<ModelFixture> {
    let anchor = "Euler-top dephasing model";
    if gammas.len() != phis.len() {
        return Err(Error::DimensionMismatch { expected: phis.len(), found: gammas.len() });
    }
    if let Some(g) = gammas.iter().find(|g| !(**g >= 0.0)) {
        return Err(Error::InvalidInput(format!("negative rate {g}")));
    }
    let mut nu0 = Vec::with_capacity(grid.len());
    let mut nu1 = Vec::with_capacity(grid.len());
    for &(m2, m3) in grid {
        if 1.0 + m2 * m3 < 0.0 {
            return Err(Error::InvalidInput(format!("grid point ({m2}, {m3}) has 1 + m2*m3 < 0")));
        }
        let (a, b) = euler_sector_value(m2, m3);
        nu0.push(a);
        nu1.push(b);
    }
    let i0 = diag::<f64>(&nu0);
    let i1 = diag::<f64>(&nu1);
    let sectors = joint_sectors(&[i0.clone(), i1.clone()], SECTOR_GAP)?;
    let mut lindblads = Vec::with_capacity(phis.len());
    for (phi, gamma) in phis.iter().zip(gammas) {
        for s in phi.symbols() {
            if s != "nu0" && s != "nu1" {
                return Err(Error::UnknownSymbol(s));
            }
        }
        let failure = std::cell::RefCell::new(None);
        let l = functional_calculus(&sectors, &|v: &[f64]| {
            let env = |name: &str| match name {
                "nu0" => Some(v[0]),
                "nu1" => Some(v[1]),
                _ => None,
            };
            match phi.eval(&env) {
                Ok(x) => Complex::new(x, 0.0),
                Err(err) => {
                    failure.borrow_mut().get_or_insert(err);
                    Complex::new(0.0, 0.0)
                }
            }
        });
        if let Some(err) = failure.into_inner() {
            return Err(err);
        }
        lindblads.push(md(&(l * c::<f64>(gamma.sqrt(), 0.0))));
    }
    let expectations = vec![expect(
        "dephasing.sectors",
        anchor,
        Provenance::Computed,
        ExpectedValue::Count { value: sectors.len() },
        0.0,
    )];
    Ok(ModelFixture {
        name: "euler_quantum".into(),
        description: anchor.into(),
        chart: None,
        poisson: None,
        contact: None,
        quantum: Some(QuantumSection {
            hbar: 1.0,
            hamiltonian: md(&i0),
            lindblads: lindblads.clone(),
            partner: Some(GeneratorData { hbar: 1.0, hamiltonian: md(&i1), lindblads }),
            integrals: vec![md(&i0), md(&i1)],
            initial_state: None,
        }),
        symbols: None,
        suite: SuiteSection {
            suites: vec![SuiteName::Gksl, SuiteName::PencilQuantum, SuiteName::Dephasing],
            expectations,
            ..SuiteSection::default()
        },
    })
}

/// `ħ ∈ {1, ½, …, 1/32}`.
pub fn default_hbars() -> Vec<f64> {
    (0..6).map(|k| 0.5f64.powi(k)).collect()
}

/// `H = (x² + ξ²)/2`, `f = x`, one Lindblad `√γ·Q(H)`; `N = 60`, margin 6.
pub fn oscillator(gamma: f64) -> ModelFixture {
    let anchor = "oscillator with Hamiltonian dephasing";
    let h = PhaseSymbol::parse("(x^2 + xi^2)/2").expect("static symbol");
    let symbols = SymbolSection {
        hamiltonian: h.clone(),
        observable: PhaseSymbol::x(),
        lindblads: vec![RatedSymbol { rate: gamma, symbol: h.clone() }],
        integrals: vec![h],
        truncation: 60,
        margin: 6,
        hbars: default_hbars(),
    };
    let expectations =
        vec![expect("egorov.slope", anchor, Provenance::Computed, ExpectedValue::Number { value: 2.0 }, 0.2)];
    ModelFixture {
        name: "oscillator".into(),
        description: anchor.into(),
        chart: None,
        poisson: None,
        contact: None,
        quantum: None,
        symbols: Some(symbols),
        suite: SuiteSection { suites: vec![SuiteName::Egorov], expectations, ..SuiteSection::default() },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_builds() {
        for (name, _) in BUILTIN_MODELS {
            let m = builtin(name).unwrap();
            assert_eq!(&m.name, name);
            assert!(!m.suite.suites.is_empty());
        }
        assert!(builtin("nope").is_err());
    }

    #[test]
    fn euler_grid_origin_is_unit_sector() {
        assert_eq!(euler_sector_value(0.0, 0.0), (1.0, 1.0));
        let m = builtin("euler_quantum").unwrap();
        let q = m.quantum.unwrap();
        assert_eq!(q.hamiltonian.dim, 9);
        assert_eq!(q.lindblads.len(), 3);
        // grid index 4 is (0, 0)
        let h = q.hamiltonian.to_matrix::<f64>().unwrap();
        assert_eq!(h[(4, 4)].re, 1.0);
    }

    #[test]
    fn euler_lindblads_follow_functional_calculus() {
        let m = builtin("euler_quantum").unwrap();
        let q = m.quantum.unwrap();
        let l3 = q.lindblads[2].to_matrix::<f64>().unwrap();
        for (k, (m2, m3)) in default_euler_grid().into_iter().enumerate() {
            let (a, b) = euler_sector_value(m2, m3);
            assert!((l3[(k, k)].re - 0.1f64.sqrt() * a * b).abs() < 1e-12);
        }
    }

    #[test]
    fn euler_quantum_rejects_bad_input() {
        assert!(euler_quantum(&default_euler_grid(), &[0.1], &default_euler_phis()).is_err());
        assert!(euler_quantum(&[(2.0, -1.0)], &[0.1], &exprs(&["nu0"])).is_err());
        assert!(matches!(euler_quantum(&default_euler_grid(), &[0.1], &exprs(&["m1"])), Err(Error::UnknownSymbol(_))));
    }

    #[test]
    fn suite_names_parse() {
        for s in SuiteName::ALL {
            assert_eq!(s.as_str().parse::<SuiteName>().unwrap(), s);
        }
        assert!("nope".parse::<SuiteName>().is_err());
    }
}
