// SPDX-License-Identifier: Apache-2.0

//! Acceptance criteria 1-12, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always print. The process
//! fails when any criterion fails, except those listed in
//! [`KNOWN_UNATTAINABLE`], whose FAIL line is still printed.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use bilindblad_core::config::validate;
use bilindblad_core::geometry::{apply_field, bihamiltonian_check, correspondence_residual, ContactChart, LiftSign, PencilMode};
use bilindblad_core::gksl::{bilindblad_check, convex_combine, cp_check, Gksl, Picture, CP_TIMES};
use bilindblad_core::linalg::{c, hs_norm, identity, op_norm, pauli_x, pauli_y, pauli_z, random_density, random_hermitian, random_matrix};
use bilindblad_core::models::{builtin, SuiteName};
use bilindblad_core::moyal::{dirac_residual, egorov_sweep, moyal_bracket, star_product, weyl_quantize, EgorovModel, PhaseSymbol};
use bilindblad_core::scalar::{ratio, GaussianRational};
use bilindblad_core::suite::{run_suites, Status};
use bilindblad_core::Expression;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criterion 5 asserts `{e^{−z}, z − p}_α ≡ 0` and `X_h(e^{−z}) = e^{−z}`.
/// With `α = dz − p dq` the bracket is `(1 + z)e^{−z}` and the derivative
/// `−z e^{−z}`, so neither identity holds.
const KNOWN_UNATTAINABLE: &[u32] = &[5];

type Outcome = Result<String, String>;

fn expr(s: &str) -> Expression {
    Expression::parse(s).unwrap()
}

fn zero(e: &Expression) -> bool {
    e.zero_test().is_zero()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit, format!("took {:.2}s, limit {limit}s", elapsed.as_secs_f64()))
}

fn euler() -> bilindblad_core::config::ValidatedModel {
    validate(&builtin("euler_pencil").unwrap()).unwrap()
}

fn criterion_1() -> Outcome {
    let v = euler();
    let (p0, p1) = (&v.structures["pi0"], &v.structures["pi1"]);
    let mut notes = Vec::new();
    for mode in [PencilMode::Convex, PencilMode::Difference] {
        let start = Instant::now();
        let pencil = p0.build_pencil(p1, mode).map_err(|e| e.to_string())?;
        for (_, j) in pencil.coordinate_jacobiators().map_err(|e| e.to_string())? {
            ensure(j.zero_test() == bilindblad_core::symbolic::ZeroVerdict::Zero, format!("{mode}: jacobiator {j}"))?;
        }
        let elapsed = start.elapsed();
        within(elapsed, 1.0)?;
        notes.push(format!("{mode} {:.0} ms", elapsed.as_secs_f64() * 1e3));
    }
    Ok(format!("jacobiator exactly zero in (m1,m2,m3,lambda); {}", notes.join(", ")))
}

fn criterion_2() -> Outcome {
    let v = euler();
    let (p0, p1) = (&v.structures["pi0"], &v.structures["pi1"]);
    let c0 = expr("-1/2*(m1^2 + m2^2 + m3^2)");
    let c1 = expr("m1^2 + m2*m3");
    for m in ["m1", "m2", "m3"] {
        let m = Expression::symbol(m);
        ensure(p0.bracket(&m, &c0).map(|e| zero(&e)).unwrap_or(false), "{m_i, C0}_0 not zero")?;
        ensure(p1.bracket(&m, &c1).map(|e| zero(&e)).unwrap_or(false), "{m_i, C1}_1 not zero")?;
    }
    let r = bihamiltonian_check(p0, &c1, p1, &c0).map_err(|e| e.to_string())?;
    ensure(r.holds, "pi0♯dC1 − pi1♯dC0 not zero")?;
    let stated = [expr("m2^2 - m3^2"), expr("2*m1*m3 - m1*m2"), expr("m1*m3 - 2*m1*m2")];
    for (got, want) in r.field.iter().zip(&stated) {
        ensure(zero(&(got - want)), format!("field component {got} vs {want}"))?;
    }
    Ok("Casimirs exact; X = (m2^2 - m3^2, 2 m1 m3 - m1 m2, m1 m3 - 2 m1 m2)".into())
}

fn criterion_3() -> Outcome {
    let v = euler();
    let pencil = v.pencil.ok_or("no pencil")?;
    let c0 = expr("-1/2*(m1^2 + m2^2 + m3^2)");
    let c1 = expr("m1^2 + m2*m3");
    let b = pencil.bracket(&c0, &c1).map_err(|e| e.to_string())?;
    ensure(zero(&b), format!("{{C0, C1}}_lambda = {b}"))?;
    Ok("{C0, C1}_lambda is the zero polynomial in (m, lambda)".into())
}

fn criterion_4() -> Outcome {
    let run = run_suites(&builtin("pn_r4").unwrap()).map_err(|e| e.to_string())?;
    let r = &run.report;
    let pass = |name: &str| r.record(name).map(|x| x.status == Status::Pass).unwrap_or(false);
    ensure(pass("pencil.sum.jacobiator"), "jacobiator of Lambda + Lambda1 not zero")?;
    ensure(pass("pencil.involution"), "{lambda1, lambda2} not zero")?;
    for f in ["lambda1", "lambda2"] {
        let rec = r.record(&format!("chart.homogeneity.{f}")).ok_or("missing homogeneity")?;
        ensure(rec.status == Status::Pass && rec.detail.starts_with("degree 1"), format!("{f}: {}", rec.detail))?;
    }
    let rank = r.record("contact.rank").ok_or("missing rank record")?;
    ensure(rank.status == Status::Pass && rank.detail.starts_with("rank 2"), rank.detail.clone())?;
    Ok(format!("[Lambda, Lambda1] = 0, involution exact, degrees (1,1), {}", rank.detail.split(';').next().unwrap_or("")))
}

fn criterion_5() -> Outcome {
    let chart = ContactChart::standard();
    let h = expr("z - p");
    let field = chart.contact_vector_field(&h).map_err(|e| e.to_string())?;
    let flow_ok = field.iter().zip(["1", "p", "z"]).all(|(g, w)| zero(&(g - &expr(w))));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut poly = || {
        let mut terms = Vec::new();
        for _ in 0..3 {
            let mut f = vec![Expression::int(rng.gen_range(-3..=3))];
            for v in ["q", "p", "z"] {
                let k = rng.gen_range(0..=2);
                if k > 0 {
                    f.push(Expression::symbol(v).pow(k));
                }
            }
            terms.push(Expression::product(f));
        }
        Expression::sum(terms)
    };
    let mut corr_ok = true;
    for _ in 0..20 {
        let (f, g) = (poly(), poly());
        corr_ok &= correspondence_residual(&f, &g, LiftSign::Positive).map(|e| zero(&e)).unwrap_or(false);
    }
    let e = expr("exp(-z)");
    let bracket = chart.jacobi_bracket(&e, &h).map_err(|e| e.to_string())?.simplify();
    let derivative = apply_field(&field, chart.coords(), &e).simplify();
    let bracket_ok = zero(&bracket);
    let derivative_ok = zero(&(&derivative - &e));
    let summary = format!(
        "flow (1,p,z) {}; correspondence on 20 pairs {}; {{exp(-z), z-p}} = {bracket} ({}); X_h(exp(-z)) = {derivative} ({})",
        if flow_ok { "ok" } else { "wrong" },
        if corr_ok { "ok" } else { "nonzero" },
        if bracket_ok { "ok" } else { "expected 0" },
        if derivative_ok { "ok" } else { "expected exp(-z)" },
    );
    if flow_ok && corr_ok && bracket_ok && derivative_ok {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let (omega, gamma) = (1.0f64, 0.5f64);
    let g = Gksl::new(1.0, pauli_z::<f64>() * c::<f64>(omega / 2.0, 0.0), vec![pauli_z::<f64>() * c::<f64>(gamma.sqrt(), 0.0)])
        .map_err(|e| e.to_string())?;
    let k = g.kernel_of_adjoint(1e-9).map_err(|e| e.to_string())?;
    ensure(k.dim() == 2, format!("kernel dim {}", k.dim()))?;
    let mut worst = 0.0f64;
    for step in 0..=100 {
        let t = step as f64 * 0.05;
        let want = (pauli_x::<f64>() * c::<f64>((omega * t).cos(), 0.0) - pauli_y::<f64>() * c::<f64>((omega * t).sin(), 0.0))
            * c::<f64>((-2.0 * gamma * t).exp(), 0.0);
        worst = worst.max(hs_norm(&(g.evolve_heisenberg(&pauli_x(), t).map_err(|e| e.to_string())? - want)));
    }
    ensure(worst < 1e-9, format!("sigma_x(t) error {worst:e}"))?;
    let s = g.to_superoperator(Picture::Schrodinger);
    let mut min_eig = f64::INFINITY;
    for t in CP_TIMES {
        min_eig = min_eig.min(cp_check(&s.exp(t), 1e-10).min_eigenvalue);
    }
    ensure(min_eig >= -1e-10, format!("Choi min eigenvalue {min_eig:e}"))?;
    within(start.elapsed(), 1.0)?;
    Ok(format!("kernel dim 2; sigma_x(t) error {worst:.1e} on [0,5]; min Choi eigenvalue {min_eig:.1e}"))
}

fn criterion_7() -> Outcome {
    let v = validate(&builtin("qubit_pencil").unwrap()).map_err(|e| e.to_string())?;
    let (g0, g1) = (v.generator.ok_or("no G0")?, v.partner.ok_or("no G1")?);
    let lambdas = [0.0, 0.25, 0.5, 0.75, 1.0];
    let report = bilindblad_check(&g0, &g1, &[pauli_z()], &lambdas, 1e-12, 1e-10).map_err(|e| e.to_string())?;
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for p in &report.points {
        let g = convex_combine(&g0, &g1, p.lambda).map_err(|e| e.to_string())?;
        let unit = hs_norm(&g.heisenberg_apply(&identity(2)).map_err(|e| e.to_string())?);
        ensure(p.passed && unit < 1e-12, format!("lambda={}: cp {:?}, unit {unit:e}", p.lambda, p.cp))?;
        worst = (worst.0.max(p.integral_residual), worst.1.max(p.affinity_residual), worst.2.max(unit));
    }
    ensure(worst.0 < 1e-12 && worst.1 < 1e-12, format!("integral {:e}, affinity {:e}", worst.0, worst.1))?;
    Ok(format!(
        "5 pencil points CPTP; max ‖L†(sigma_z)‖ {:.1e}, affinity {:.1e}, trace {:.1e}",
        worst.0, worst.1, worst.2
    ))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut f = builtin("euler_quantum").map_err(|e| e.to_string())?;
    f.suite.suites = vec![SuiteName::Dephasing];
    let channels = f.quantum.as_ref().map_or(0, |q| q.lindblads.len());
    ensure(channels == 3, format!("{channels} channels"))?;
    let run = run_suites(&f).map_err(|e| e.to_string())?;
    let r = &run.report;
    let coherence = r.record("dephasing.coherence").ok_or("no coherence record")?;
    let diagonal = r.record("dephasing.diagonal").ok_or("no diagonal record")?;
    let sectors = r.record("dephasing.sectors").ok_or("no sector record")?;
    ensure(coherence.status == Status::Pass && coherence.residual < 1e-8, coherence.detail.clone())?;
    ensure(diagonal.status == Status::Pass && diagonal.residual < 1e-10, diagonal.detail.clone())?;
    within(start.elapsed(), 10.0)?;
    Ok(format!(
        "9 grid points, dim 9, {}; relative error {:.1e}, diagonal drift {:.1e}",
        sectors.detail.split(';').next().unwrap_or(""),
        coherence.residual,
        diagonal.residual
    ))
}

fn random_symbol(rng: &mut ChaCha8Rng) -> PhaseSymbol {
    let mut s = PhaseSymbol::zero();
    for _ in 0..3 {
        let c = GaussianRational::new(ratio(rng.gen_range(-3..=3), 1), ratio(rng.gen_range(-2..=2), 2));
        let mut m = PhaseSymbol::constant(c);
        let (a, b) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
        for _ in 0..a {
            m = &m * &PhaseSymbol::x();
        }
        for _ in 0..b {
            m = &m * &PhaseSymbol::xi();
        }
        if rng.gen_bool(0.3) {
            m = &m * &PhaseSymbol::hbar();
        }
        s = &s + &m;
    }
    s
}

fn criterion_9() -> Outcome {
    let monomials = ["1", "x", "xi", "x^2", "x*xi", "xi^2"];
    for a in monomials {
        for b in monomials {
            let (sa, sb) = (PhaseSymbol::parse(a).unwrap(), PhaseSymbol::parse(b).unwrap());
            ensure(dirac_residual(&sa, &sb).is_zero(), format!("dirac residual of ({a}, {b})"))?;
        }
    }
    let cubes = moyal_bracket(&PhaseSymbol::parse("x^3").unwrap(), &PhaseSymbol::parse("xi^3").unwrap());
    let want = PhaseSymbol::parse("9*x^2*xi^2 - 3/2*hbar^2").unwrap();
    ensure(cubes == want, format!("moyal(x^3, xi^3) = {cubes}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let (a, b, c) = (random_symbol(&mut rng), random_symbol(&mut rng), random_symbol(&mut rng));
        let d = &star_product(&star_product(&a, &b), &c) - &star_product(&a, &star_product(&b, &c));
        ensure(d.is_zero(), "associativity residual nonzero")?;
    }
    Ok(format!("Dirac exact on degree <= 2; moyal(x^3, xi^3) = {cubes}; associative on 20 triples"))
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let gamma = 0.5f64;
    let (n, margin) = (60, 6);
    let hamiltonian = PhaseSymbol::parse("1/2*x^2 + 1/2*xi^2").unwrap();
    let hbars: Vec<f64> = (0..6).map(|k| 0.5f64.powi(k)).collect();
    let mut worst = 0.0f64;
    for &hbar in &hbars {
        let qh = weyl_quantize(&hamiltonian, n, hbar).map_err(|e| e.to_string())?.matrix;
        let qx = weyl_quantize(&PhaseSymbol::x(), n, hbar).map_err(|e| e.to_string())?.matrix;
        let g = Gksl::new(hbar, qh.clone() * c::<f64>(0.0, 0.0), vec![qh * c::<f64>(gamma.sqrt(), 0.0)])
            .map_err(|e| e.to_string())?;
        let d = g.heisenberg_apply(&qx).map_err(|e| e.to_string())? - &qx * c::<f64>(-gamma * hbar * hbar / 2.0, 0.0);
        let k = n - margin;
        worst = worst.max(op_norm(&d.view((0, 0), (k, k)).into_owned()));
    }
    ensure(worst < 1e-10, format!("D(X) + (gamma hbar^2/2) X = {worst:e}"))?;
    let model = EgorovModel { hamiltonian: hamiltonian.clone(), observable: PhaseSymbol::x(), lindblads: vec![(gamma, hamiltonian.clone())] };
    let sweep = egorov_sweep(&model, &hbars, n, margin).map_err(|e| e.to_string())?;
    let slope = sweep.slope.ok_or("slope undefined")?;
    ensure((1.8..=2.2).contains(&slope), format!("slope {slope}"))?;
    let exact = EgorovModel { observable: hamiltonian.clone(), ..model };
    let cc1 = egorov_sweep(&exact, &hbars, n, margin).map_err(|e| e.to_string())?.max_ratio();
    ensure(cc1 < 1e-10, format!("f = H residual {cc1:e}"))?;
    let elapsed = start.elapsed();
    within(elapsed, 30.0)?;
    Ok(format!(
        "dissipator error {worst:.1e}; slope {slope:.4}; f = H residual {cc1:.1e}; {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let d = 6;
    let h = random_hermitian::<f64, _>(&mut rng, d);
    let ls = (0..3).map(|_| random_matrix::<f64, _>(&mut rng, d) * c::<f64>(0.5, 0.0)).collect();
    let g = Gksl::new(1.0, h, ls).map_err(|e| e.to_string())?;
    let (mut pairing, mut trace, mut herm) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let rho = random_density::<f64, _>(&mut rng, d);
        let a = random_matrix::<f64, _>(&mut rng, d);
        pairing = pairing.max(g.adjoint_pairing_residual(&rho, &a).map_err(|e| e.to_string())?);
        let l = g.lindblad_apply(&rho).map_err(|e| e.to_string())?;
        trace = trace.max(l.trace().norm());
        herm = herm.max(hs_norm(&(&l - l.adjoint())));
    }
    let unit = hs_norm(&g.heisenberg_apply(&identity(d)).map_err(|e| e.to_string())?);
    let rho = random_density::<f64, _>(&mut rng, d);
    let (s, t) = (0.7, 1.3);
    let once = g.evolve(&rho, s + t).map_err(|e| e.to_string())?;
    let twice = g.evolve(&g.evolve(&rho, s).map_err(|e| e.to_string())?, t).map_err(|e| e.to_string())?;
    let semigroup = hs_norm(&(once - twice));
    ensure(pairing < 1e-12, format!("pairing {pairing:e}"))?;
    ensure(trace < 1e-12 && herm < 1e-12 && unit < 1e-12, format!("trace {trace:e}, hermiticity {herm:e}, unit {unit:e}"))?;
    ensure(semigroup < 1e-9, format!("semigroup {semigroup:e}"))?;
    Ok(format!("dim 6, 100 pairs: pairing {pairing:.1e}, trace {trace:.1e}, hermiticity {herm:.1e}, unit {unit:.1e}, semigroup {semigroup:.1e}"))
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_bilindblad")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run_cli(args: &[&str]) -> Result<(i32, Vec<u8>), String> {
    let out = Command::new(bin()).args(args).env_remove("BILINDBLAD_SEED").output().map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn criterion_12() -> Outcome {
    let (c1, a) = run_cli(&["verify", "--model", "euler_pencil", "--seed", "7"])?;
    let (c2, b) = run_cli(&["verify", "--model", "euler_pencil", "--seed", "7"])?;
    ensure(c1 == 0 && c2 == 0, format!("exit codes {c1}, {c2}"))?;
    ensure(a == b && !a.is_empty(), "reports differ between runs")?;
    let mut codes = Vec::new();
    for (file, want) in [
        ("euler_pencil_pass.json", 0),
        ("euler_pencil_swapped_casimirs.json", 1),
        ("qubit_non_hermitian.json", 2),
    ] {
        let path = fixture(file);
        let (code, _) = run_cli(&["verify", "--config", path.to_str().unwrap()])?;
        ensure(code == want, format!("{file}: exit {code}, expected {want}"))?;
        codes.push(code.to_string());
    }
    Ok(format!("byte-identical reports ({} bytes); exit codes pass/fail/config = {}", a.len(), codes.join("/")))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 12] = [
        (1, "Euler pencil compatibility", criterion_1),
        (2, "Casimirs and bi-Hamiltonian field", criterion_2),
        (3, "Casimirs commute for the whole pencil", criterion_3),
        (4, "Poisson-Nijenhuis example on R^4", criterion_4),
        (5, "linear contact example", criterion_5),
        (6, "qubit dephasing", criterion_6),
        (7, "bi-Lindblad qubit pencil", criterion_7),
        (8, "dephasing rate law on the Euler fixture", criterion_8),
        (9, "Moyal product and Dirac condition", criterion_9),
        (10, "Egorov criterion on the oscillator", criterion_10),
        (11, "duality and structure laws", criterion_11),
        (12, "CLI determinism and exit codes", criterion_12),
    ];
    let mut unexpected = Vec::new();
    for (n, title, check) in criteria {
        match check() {
            Ok(detail) => println!("criterion {n:>2} PASS  {title}: {detail}"),
            Err(detail) => {
                let known = KNOWN_UNATTAINABLE.contains(&n);
                println!("criterion {n:>2} FAIL  {title}: {detail}{}", if known { " [known unattainable]" } else { "" });
                if !known {
                    unexpected.push(n);
                }
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
