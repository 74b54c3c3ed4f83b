// SPDX-License-Identifier: Apache-2.0

//! JSON config format: parsing, export and semantic validation.
//!
//! Syntax errors carry line and column; semantic errors name the offending
//! key, e.g. `quantum.H` or `poisson.structures.pi0.{m1,q}`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::geometry::{ContactChart, PoissonStructure};
use crate::gksl::{hermitian_tolerance, Gksl};
use crate::linalg::{is_hermitian, min_eigenvalue, CMatrix, MatrixData, MAX_DIM};
use crate::models::{ExpectedValue, GeneratorData, ModelFixture};
use crate::moyal::{EgorovModel, PhaseSymbol};
use crate::symbolic::Expression;

/// Parses and validates a model config.
pub fn parse_config(text: &str) -> Result<ModelFixture> {
    let fixture = deserialize(text)?;
    validate(&fixture)?;
    Ok(fixture)
}

/// Deserializes without semantic validation.
pub fn deserialize(text: &str) -> Result<ModelFixture> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let result: std::result::Result<ModelFixture, _> = serde_path_to_error::deserialize(de);
    let fixture = result.map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        if inner.is_syntax() || inner.is_eof() || path == "." {
            Error::Parse { line: inner.line(), column: inner.column(), message: strip_position(&inner.to_string()) }
        } else {
            Error::config(path, inner.to_string())
        }
    })?;
    // trailing content is reported by the deserializer itself
    Ok(fixture)
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(k) => message[..k].to_string(),
        None => message.to_string(),
    }
}

/// Pretty-printed JSON; [`parse_config`] reads it back to an equal fixture.
pub fn export_config(fixture: &ModelFixture) -> String {
    let mut text = serde_json::to_string_pretty(fixture).expect("fixtures serialize");
    text.push('\n');
    text
}

/// Objects built from a validated fixture.
#[derive(Clone, Debug)]
pub struct ValidatedModel {
    pub structures: BTreeMap<String, PoissonStructure>,
    /// Pencil of the two declared structures, in the parameter `lambda`.
    pub pencil: Option<PoissonStructure>,
    pub contact: Option<ContactChart>,
    pub generator: Option<Gksl<f64>>,
    pub partner: Option<Gksl<f64>>,
    pub integrals: Vec<CMatrix<f64>>,
    pub initial_state: Option<CMatrix<f64>>,
    pub egorov: Option<EgorovModel>,
}

fn check_symbols(e: &Expression, allowed: &BTreeSet<String>, key: &str) -> Result<()> {
    for s in e.symbols() {
        if !allowed.contains(&s) {
            return Err(Error::config(key, format!("unknown symbol `{s}` in `{e}`")));
        }
    }
    Ok(())
}

fn split_pair(key: &str, path: &str) -> Result<(String, String)> {
    let mut parts = key.split(',').map(str::trim);
    match (parts.next(), parts.next(), parts.next()) {
        (Some(a), Some(b), None) if !a.is_empty() && !b.is_empty() => Ok((a.to_string(), b.to_string())),
        _ => Err(Error::config(path, format!("entry key `{key}` must have the form `a,b`"))),
    }
}

fn matrix(data: &MatrixData, key: &str) -> Result<CMatrix<f64>> {
    if data.dim == 0 || data.dim > MAX_DIM {
        return Err(Error::config(key, format!("dimension {} outside 1..={MAX_DIM}", data.dim)));
    }
    data.to_matrix().map_err(|e| Error::config(key, e.to_string()))
}

fn generator(hbar: f64, h: &MatrixData, ls: &[MatrixData], prefix: &str) -> Result<Gksl<f64>> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::config(format!("{prefix}hbar"), format!("must be positive, got {hbar}")));
    }
    let key_h = format!("{prefix}H");
    let hm = matrix(h, &key_h)?;
    let tol = hermitian_tolerance::<f64>() * hm.norm().max(1.0);
    if !is_hermitian(&hm, tol) {
        return Err(Error::config(key_h, "Hamiltonian is not Hermitian"));
    }
    let mut lindblads = Vec::with_capacity(ls.len());
    for (k, l) in ls.iter().enumerate() {
        let key = format!("{prefix}lindblads[{k}]");
        let m = matrix(l, &key)?;
        if m.nrows() != hm.nrows() {
            return Err(Error::config(key, format!("dimension {} differs from H ({})", m.nrows(), hm.nrows())));
        }
        lindblads.push(m);
    }
    Gksl::new(hbar, hm, lindblads).map_err(|e| Error::config(prefix.trim_end_matches('.'), e.to_string()))
}

/// Semantic validation; builds every object the suites need.
pub fn validate(f: &ModelFixture) -> Result<ValidatedModel> {
    let mut model = ValidatedModel {
        structures: BTreeMap::new(),
        pencil: None,
        contact: None,
        generator: None,
        partner: None,
        integrals: Vec::new(),
        initial_state: None,
        egorov: None,
    };
    if f.name.trim().is_empty() {
        return Err(Error::config("name", "must not be empty"));
    }

    let mut coords = BTreeSet::new();
    if let Some(chart) = &f.chart {
        if chart.coords.is_empty() {
            return Err(Error::config("chart.coords", "no coordinates"));
        }
        for c in &chart.coords {
            if !coords.insert(c.clone()) {
                return Err(Error::config("chart.coords", format!("duplicate coordinate `{c}`")));
            }
            if c == crate::geometry::PENCIL_PARAMETER {
                return Err(Error::config("chart.coords", format!("`{c}` is reserved for the pencil parameter")));
            }
        }
        if !chart.liouville.is_empty() && chart.liouville.len() != chart.coords.len() {
            return Err(Error::config(
                "chart.liouville",
                format!("{} components for {} coordinates", chart.liouville.len(), chart.coords.len()),
            ));
        }
        for (k, v) in chart.liouville.iter().enumerate() {
            check_symbols(v, &coords, &format!("chart.liouville[{k}]"))?;
        }
        for (name, v) in &chart.functions {
            check_symbols(v, &coords, &format!("chart.functions.{name}"))?;
        }
        for (list, key) in [(&chart.homogeneous, "homogeneous"), (&chart.independent, "independent"), (&chart.restricted, "restricted")] {
            for name in list {
                if !chart.functions.contains_key(name) {
                    return Err(Error::config(format!("chart.{key}"), format!("unknown function `{name}`")));
                }
            }
        }
        if !chart.homogeneous.is_empty() && chart.liouville.is_empty() {
            return Err(Error::config("chart.homogeneous", "needs a Liouville field"));
        }
        for (c, v) in &chart.restriction {
            if !coords.contains(c) {
                return Err(Error::config(format!("chart.restriction.{c}"), "not a chart coordinate"));
            }
            check_symbols(v, &coords, &format!("chart.restriction.{c}"))?;
        }
    }

    if let Some(p) = &f.poisson {
        let chart = f.chart.as_ref().ok_or_else(|| Error::config("poisson", "requires a `chart` section"))?;
        for (name, items) in &p.structures {
            let mut entries = Vec::with_capacity(items.len());
            for (pair, v) in items {
                let path = format!("poisson.structures.{name}");
                let (a, b) = split_pair(pair, &path)?;
                for c in [&a, &b] {
                    if !coords.contains(c) {
                        return Err(Error::config(
                            format!("{path}.{{{a},{b}}}"),
                            format!("unknown coordinate `{c}` in pair {{{a},{b}}}"),
                        ));
                    }
                }
                check_symbols(v, &coords, &format!("{path}.{{{a},{b}}}"))?;
                entries.push((a, b, v.clone()));
            }
            let s = PoissonStructure::new(&chart.coords, &[] as &[String], entries)
                .map_err(|e| Error::config(format!("poisson.structures.{name}"), e.to_string()))?;
            model.structures.insert(name.clone(), s);
        }
        let structure = |name: &str, key: &str| {
            model
                .structures
                .get(name)
                .ok_or_else(|| Error::config(key, format!("unknown structure `{name}`")))
        };
        let function = |name: &str, key: &str| {
            if chart.functions.contains_key(name) {
                Ok(())
            } else {
                Err(Error::config(key, format!("unknown function `{name}`")))
            }
        };
        if let Some(spec) = &p.pencil {
            let a = structure(&spec.first, "poisson.pencil.first")?;
            let b = structure(&spec.second, "poisson.pencil.second")?;
            model.pencil = Some(a.build_pencil(b, spec.mode).map_err(|e| Error::config("poisson.pencil", e.to_string()))?);
        }
        for (s, fs) in &p.casimirs {
            let key = format!("poisson.casimirs.{s}");
            structure(s, &key)?;
            for name in fs {
                function(name, &key)?;
            }
        }
        if let Some(b) = &p.bihamiltonian {
            for (pair, key) in [(&b.first, "poisson.bihamiltonian.first"), (&b.second, "poisson.bihamiltonian.second")] {
                structure(&pair.structure, key)?;
                function(&pair.function, key)?;
            }
        }
        for name in &p.involutive {
            function(name, "poisson.involutive")?;
        }
    }

    if let Some(c) = &f.contact {
        let allowed: BTreeSet<String> = c.coords.iter().cloned().collect();
        if allowed.len() != c.coords.len() {
            return Err(Error::config("contact.coords", "duplicate coordinate"));
        }
        let mut lambda = Vec::with_capacity(c.lambda.len());
        for (pair, v) in &c.lambda {
            let (a, b) = split_pair(pair, "contact.lambda")?;
            for x in [&a, &b] {
                if !allowed.contains(x) {
                    return Err(Error::config(
                        format!("contact.lambda.{{{a},{b}}}"),
                        format!("unknown coordinate `{x}` in pair {{{a},{b}}}"),
                    ));
                }
            }
            lambda.push((a, b, v.clone()));
        }
        let chart = ContactChart::new(&c.coords, c.alpha.clone(), c.reeb.clone(), lambda)
            .map_err(|e| Error::config("contact", e.to_string()))?;
        let standard = ContactChart::standard();
        let is_standard = chart.coords() == standard.coords()
            && chart.alpha() == standard.alpha()
            && chart.reeb() == standard.reeb()
            && chart.lambda_entries().eq(standard.lambda_entries());
        check_symbols(&c.hamiltonian, &allowed, "contact.hamiltonian")?;
        for (name, v) in &c.integrals {
            check_symbols(v, &allowed, &format!("contact.integrals.{name}"))?;
        }
        for (k, p) in c.points.iter().enumerate() {
            if p.len() != c.coords.len() {
                return Err(Error::config(format!("contact.points[{k}]"), format!("expected {} coordinates", c.coords.len())));
            }
        }
        if c.correspondence && !is_standard {
            return Err(Error::config("contact.correspondence", "only available on the standard chart"));
        }
        model.contact = Some(if is_standard { standard } else { chart });
    }

    if let Some(q) = &f.quantum {
        let g = generator(q.hbar, &q.hamiltonian, &q.lindblads, "quantum.")?;
        let d = g.dim();
        if let Some(GeneratorData { hbar, hamiltonian, lindblads }) = &q.partner {
            let p = generator(*hbar, hamiltonian, lindblads, "quantum.partner.")?;
            if p.dim() != d {
                return Err(Error::config("quantum.partner.H", format!("dimension {} differs from {d}", p.dim())));
            }
            if *hbar != q.hbar {
                return Err(Error::config("quantum.partner.hbar", "must equal quantum.hbar"));
            }
            model.partner = Some(p);
        }
        for (k, m) in q.integrals.iter().enumerate() {
            let key = format!("quantum.integrals[{k}]");
            let a = matrix(m, &key)?;
            if a.nrows() != d {
                return Err(Error::config(key, format!("dimension {} differs from {d}", a.nrows())));
            }
            if !is_hermitian(&a, hermitian_tolerance::<f64>() * a.norm().max(1.0)) {
                return Err(Error::config(key, "integral is not Hermitian"));
            }
            model.integrals.push(a);
        }
        if let Some(rho) = &q.initial_state {
            let key = "quantum.initial_state";
            let r = matrix(rho, key)?;
            if r.nrows() != d {
                return Err(Error::config(key, format!("dimension {} differs from {d}", r.nrows())));
            }
            if !is_hermitian(&r, 1e-10) || (r.trace().re - 1.0).abs() > 1e-10 || min_eigenvalue(&r) < -1e-10 {
                return Err(Error::config(key, "not a density matrix"));
            }
            model.initial_state = Some(r);
        }
        for (k, e) in f.suite.expectations.iter().enumerate() {
            let key = format!("suite.expectations[{k}]");
            let dims: Vec<usize> = match &e.expected {
                ExpectedValue::Image { input, output } => vec![input.dim, output.dim],
                ExpectedValue::Evolution { observable, times, values } => {
                    if times.len() != values.len() {
                        return Err(Error::config(key, format!("{} times but {} values", times.len(), values.len())));
                    }
                    std::iter::once(observable.dim).chain(values.iter().map(|v| v.dim)).collect()
                }
                _ => vec![],
            };
            if let Some(bad) = dims.into_iter().find(|x| *x != d) {
                return Err(Error::config(key, format!("matrix dimension {bad} differs from {d}")));
            }
        }
        model.generator = Some(g);
    }

    if let Some(s) = &f.symbols {
        let mut all: Vec<(&PhaseSymbol, String)> = vec![
            (&s.hamiltonian, "symbols.hamiltonian".into()),
            (&s.observable, "symbols.observable".into()),
        ];
        for (k, l) in s.lindblads.iter().enumerate() {
            if !(l.rate >= 0.0 && l.rate.is_finite()) {
                return Err(Error::config(format!("symbols.lindblads[{k}].rate"), format!("must be non-negative, got {}", l.rate)));
            }
            all.push((&l.symbol, format!("symbols.lindblads[{k}].symbol")));
        }
        for (k, i) in s.integrals.iter().enumerate() {
            all.push((i, format!("symbols.integrals[{k}]")));
        }
        if s.truncation > MAX_DIM {
            return Err(Error::config("symbols.truncation", format!("at most {MAX_DIM}")));
        }
        for (sym, key) in &all {
            let need = sym.phase_degree().max(0) as usize + 2;
            if s.truncation < need {
                return Err(Error::config("symbols.truncation", format!("`{key}` needs at least {need} levels")));
            }
            if sym.poly().terms().any(|(m, _)| m.exponent(&crate::moyal::PhaseVar::Hbar) < 0) {
                return Err(Error::config(key.as_str(), "negative power of hbar"));
            }
        }
        if s.margin >= s.truncation {
            return Err(Error::config("symbols.margin", "must be smaller than the truncation"));
        }
        if let Some(h) = s.hbars.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
            return Err(Error::config("symbols.hbars", format!("must be positive, got {h}")));
        }
        if !s.hamiltonian.is_real() {
            return Err(Error::config("symbols.hamiltonian", "symbol must be real"));
        }
        model.egorov = Some(EgorovModel {
            hamiltonian: s.hamiltonian.clone(),
            observable: s.observable.clone(),
            lindblads: s.lindblads.iter().map(|l| (l.rate, l.symbol.clone())).collect(),
        });
    }

    let suite = &f.suite;
    if suite.samples == 0 {
        return Err(Error::config("suite.samples", "must be at least 1"));
    }
    if let Some(t) = suite.times.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Error::config("suite.times", format!("must be non-negative, got {t}")));
    }
    if let Some(l) = suite.lambdas.iter().find(|l| !(**l >= 0.0 && **l <= 1.0)) {
        return Err(Error::config("suite.lambdas", format!("must lie in [0, 1], got {l}")));
    }
    let t = &suite.tolerances;
    for (v, key) in [
        (t.numeric, "numeric"),
        (t.cp, "cp"),
        (t.kernel, "kernel"),
        (t.semigroup, "semigroup"),
        (t.coherence, "coherence"),
        (t.diagonal, "diagonal"),
        (t.weyl, "weyl"),
        (t.slope, "slope"),
    ] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::config(format!("suite.tolerances.{key}"), format!("must be non-negative, got {v}")));
        }
    }
    let mut seen = BTreeSet::new();
    for (k, e) in suite.expectations.iter().enumerate() {
        if !seen.insert(e.check.as_str()) {
            return Err(Error::config(format!("suite.expectations[{k}]"), format!("duplicate check `{}`", e.check)));
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{builtin, BUILTIN_MODELS};

    #[test]
    fn builtins_round_trip() {
        for (name, _) in BUILTIN_MODELS {
            let m = builtin(name).unwrap();
            let text = export_config(&m);
            let back = parse_config(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(back, m, "{name}");
            assert_eq!(export_config(&back), text, "{name}");
        }
    }

    #[test]
    fn syntax_errors_are_located() {
        let err = parse_config("{\n  \"name\": \"x\",\n  oops\n}").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config(r#"{"name": "x", "suite": {"bogus": 1}}"#).unwrap_err();
        match err {
            Error::Config { key, .. } => assert_eq!(key, "suite.bogus"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_hermitian_hamiltonian_names_key() {
        let mut m = builtin("qubit_dephasing").unwrap();
        m.quantum.as_mut().unwrap().hamiltonian.data[1] = [1.0, 0.0];
        let err = parse_config(&export_config(&m)).unwrap_err();
        match err {
            Error::Config { key, .. } => assert_eq!(key, "quantum.H"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_coordinate_names_pair() {
        let mut m = builtin("euler_pencil").unwrap();
        let pi0 = m.poisson.as_mut().unwrap().structures.get_mut("pi0").unwrap();
        pi0.insert("m1,q".into(), Expression::one());
        let err = parse_config(&export_config(&m)).unwrap_err();
        match err {
            Error::Config { key, message } => {
                assert_eq!(key, "poisson.structures.pi0.{m1,q}");
                assert!(message.contains("{m1,q}"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_expression_names_key() {
        let text = export_config(&builtin("linear_contact").unwrap()).replace("\"z - p\"", "\"z - (p\"");
        match parse_config(&text).unwrap_err() {
            Error::Config { key, .. } => assert!(key.starts_with("contact."), "{key}"),
            other => panic!("{other:?}"),
        }
    }
}
