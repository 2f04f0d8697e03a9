//! Registry of degenerate wave and fluid models written as frequency-side symbols,
//! with closed-form per-mode dispersion relations.
//!
//! Conventions: symbol(Δ) = −|ξ|², symbol(∂_j) = iξ_j. Second-order-in-time models have two
//! realizations: a scalar problem of order α = 2 (zero initial velocity), and a first-order
//! 2×2 system in the state (u_t, u).

use std::collections::BTreeMap;

use crate::degenerate_solver::ModelSpec;
use crate::spectral_calculus::SpectralGrid;
use crate::special_functions::complex_eigenvalues;
use crate::symbol_algebra::{choose_kprime, fit_growth, CutoffSpec, Polynomial, PolynomialMatrix, RegularizerSpec};
use crate::{Error, Result, C64};

pub const MODEL_NAMES: [&str; 5] = ["rossby", "sobolev", "boussinesq", "gravity_gyroscopic", "rotating_viscous"];

pub const DEFAULT_REGULARIZER_A: f64 = 0.01;
pub const DEFAULT_CUTOFF: (f64, f64) = (0.5, 1.5);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Formulation {
    ScalarAlpha2,
    MatricialFirstOrder,
}

impl Formulation {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "scalar_alpha2" => Ok(Formulation::ScalarAlpha2),
            "matricial_first_order" | "matricial" => Ok(Formulation::MatricialFirstOrder),
            other => Err(Error::BadParams(format!(
                "unknown formulation '{other}' (expected scalar_alpha2 or matricial_first_order)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Formulation::ScalarAlpha2 => "scalar_alpha2",
            Formulation::MatricialFirstOrder => "matricial_first_order",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedModel {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub formulation: Formulation,
    pub spec: ModelSpec,
}

fn unknown_model(name: &str) -> Error {
    Error::UnknownModel { name: name.to_string(), valid: MODEL_NAMES.join(", ") }
}

/// Physical parameters each model accepts, with defaults. `a` and `kprime` (regularizer) are
/// accepted by every model.
pub fn default_params(name: &str) -> Result<BTreeMap<String, f64>> {
    let pairs: &[(&str, f64)] = match name {
        "rossby" => &[("beta", 1.0)],
        "sobolev" => &[("omega", 3.0)],
        "boussinesq" => &[("N", 2.0)],
        "gravity_gyroscopic" => &[("N", 2.0), ("omega", 3.0)],
        "rotating_viscous" => &[("omega", 3.0), ("nu", 0.1)],
        _ => return Err(unknown_model(name)),
    };
    Ok(pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect())
}

pub fn default_formulation(name: &str) -> Result<Formulation> {
    if !MODEL_NAMES.contains(&name) {
        return Err(unknown_model(name));
    }
    Ok(Formulation::MatricialFirstOrder)
}

/// 32² for rossby, 16³ otherwise, period 2π on every axis.
pub fn default_grid(name: &str) -> Result<SpectralGrid> {
    let tau = 2.0 * std::f64::consts::PI;
    match name {
        "rossby" => SpectralGrid::cube(2, 32, tau),
        _ if MODEL_NAMES.contains(&name) => SpectralGrid::cube(3, 16, tau),
        _ => Err(unknown_model(name)),
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Spatial coefficient q(ξ) of the wave models: −|ξ|² u_tt = q(ξ) u.
fn wave_coefficient(name: &str, p: &BTreeMap<String, f64>) -> Polynomial {
    let n = 3;
    let horiz = |c: f64| {
        Polynomial::monomial(n, re(c), &[(0, 2)]).add(&Polynomial::monomial(n, re(c), &[(1, 2)]))
    };
    let vert = |c: f64| Polynomial::monomial(n, re(c), &[(2, 2)]);
    match name {
        "sobolev" => vert(p["omega"].powi(2)),
        "boussinesq" => horiz(p["N"].powi(2)),
        _ => horiz(p["N"].powi(2)).add(&vert(p["omega"].powi(2))),
    }
}

pub fn build_model(name: &str, params: &BTreeMap<String, f64>, formulation: Formulation) -> Result<NamedModel> {
    let mut p = default_params(name)?;
    for (k, v) in params {
        if !(p.contains_key(k) || k == "a" || k == "kprime") {
            return Err(Error::BadParams(format!(
                "model '{name}' has no parameter '{k}' (accepted: {}, a, kprime)",
                p.keys().cloned().collect::<Vec<_>>().join(", ")
            )));
        }
        if !v.is_finite() {
            return Err(Error::BadParams(format!("parameter {k} must be finite")));
        }
        p.insert(k.clone(), *v);
    }
    if p.get("nu").is_some_and(|&nu| nu <= 0.0) {
        return Err(Error::BadParams("the viscosity nu must be positive".into()));
    }
    for k in ["omega", "N"] {
        if p.get(k).is_some_and(|&v| v < 0.0) {
            return Err(Error::BadParams(format!("{k} must be non-negative")));
        }
    }

    let (p1, p2, alpha) = match (name, formulation) {
        ("rossby", Formulation::MatricialFirstOrder) => {
            let p1 = PolynomialMatrix::scalar(Polynomial::monomial(2, C64::new(0.0, -p["beta"]), &[(1, 1)]));
            let p2 = PolynomialMatrix::scalar(Polynomial::norm_power(2, re(-1.0), 1));
            (p1, p2, 1.0)
        }
        ("rossby", Formulation::ScalarAlpha2) | ("rotating_viscous", Formulation::ScalarAlpha2) => {
            return Err(Error::BadParams(format!("model '{name}' has no scalar_alpha2 formulation")));
        }
        ("rotating_viscous", Formulation::MatricialFirstOrder) => {
            let (om, nu) = (p["omega"], p["nu"]);
            let n = 3;
            let lap = |c: f64, k: u32| Polynomial::norm_power(n, re(c), k);
            let stiff = lap(nu * nu, 3).add(&Polynomial::monomial(n, re(om * om), &[(2, 2)]));
            let p1 = PolynomialMatrix::from_rows(
                n,
                vec![vec![lap(2.0 * nu, 2), stiff], vec![Polynomial::constant(n, re(1.0)), Polynomial::zero(n)]],
            )?;
            let p2 = PolynomialMatrix::from_rows(
                n,
                vec![vec![lap(-1.0, 1), Polynomial::zero(n)], vec![Polynomial::zero(n), Polynomial::constant(n, re(1.0))]],
            )?;
            (p1, p2, 1.0)
        }
        (_, Formulation::ScalarAlpha2) => {
            let p1 = PolynomialMatrix::scalar(wave_coefficient(name, &p));
            let p2 = PolynomialMatrix::scalar(Polynomial::norm_power(3, re(-1.0), 1));
            (p1, p2, 2.0)
        }
        (_, Formulation::MatricialFirstOrder) => {
            let n = 3;
            let p1 = PolynomialMatrix::from_rows(
                n,
                vec![
                    vec![Polynomial::zero(n), wave_coefficient(name, &p)],
                    vec![Polynomial::constant(n, re(1.0)), Polynomial::zero(n)],
                ],
            )?;
            let p2 = PolynomialMatrix::from_rows(
                n,
                vec![
                    vec![Polynomial::norm_power(n, re(-1.0), 1), Polynomial::zero(n)],
                    vec![Polynomial::zero(n), Polynomial::constant(n, re(1.0))],
                ],
            )?;
            (p1, p2, 1.0)
        }
    };

    let d = p1.d.max(p2.d).max(1);
    let kprime = match p.get("kprime") {
        Some(&k) if k >= 2.0 && k == k.round() && (k as u32) % 2 == 0 => k as u32,
        Some(&k) => return Err(Error::BadParams(format!("kprime must be an even integer >= 2, got {k}"))),
        None => {
            let fit = fit_growth(&p1, &p2, 6)?;
            choose_kprime(p1.m, d, alpha, fit.m2, p1.n)?
        }
    };
    let a = p.get("a").copied().unwrap_or(DEFAULT_REGULARIZER_A);
    let regularizer = RegularizerSpec::new(a, kprime, d).map_err(|e| Error::BadParams(e.to_string()))?;
    let cutoff = CutoffSpec::new(DEFAULT_CUTOFF.0, DEFAULT_CUTOFF.1)?;
    let spec = ModelSpec::new(p1, p2, alpha, regularizer, Some(cutoff), "xi = 0 (kernel of the Laplacian)")?;
    Ok(NamedModel { name: name.to_string(), params: p, formulation, spec })
}

/// Default parameters and formulation.
pub fn named_model(name: &str) -> Result<NamedModel> {
    build_model(name, &BTreeMap::new(), default_formulation(name)?)
}

/// Eigenvalues of M(ξ) = P2(ξ)⁻¹P1(ξ).
pub fn dispersion(model: &NamedModel, xi: &[f64]) -> Result<Vec<C64>> {
    Ok(complex_eigenvalues(&model.spec.generator(xi)?))
}

/// Closed-form spectrum of M(ξ) from single-mode substitution.
pub fn closed_form_dispersion(model: &NamedModel, xi: &[f64]) -> Result<Vec<C64>> {
    let p = &model.params;
    let r2: f64 = xi.iter().map(|v| v * v).sum();
    if r2 == 0.0 {
        return Err(Error::SingularSymbol { at: xi.to_vec(), det: 0.0 });
    }
    let r = r2.sqrt();
    let h2 = if xi.len() >= 2 { xi[0] * xi[0] + xi[1] * xi[1] } else { 0.0 };
    let z2 = if xi.len() >= 3 { xi[2] * xi[2] } else { 0.0 };
    let pair = |re: f64, freq: f64| vec![C64::new(re, -freq), C64::new(re, freq)];
    let wave_sq = match model.name.as_str() {
        "rossby" => return Ok(vec![C64::new(0.0, p["beta"] * xi[1] / r2)]),
        "sobolev" => p["omega"].powi(2) * z2 / r2,
        "boussinesq" => p["N"].powi(2) * h2 / r2,
        "gravity_gyroscopic" => (p["N"].powi(2) * h2 + p["omega"].powi(2) * z2) / r2,
        "rotating_viscous" => return Ok(pair(-p["nu"] * r2, p["omega"] * z2.sqrt() / r)),
        other => return Err(unknown_model(other)),
    };
    Ok(match model.formulation {
        Formulation::ScalarAlpha2 => vec![C64::new(-wave_sq, 0.0)],
        Formulation::MatricialFirstOrder => pair(0.0, wave_sq.sqrt()),
    })
}

/// Greedy nearest matching of two spectra; max distance relative to the largest magnitude.
pub fn spectrum_mismatch(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let scale = a.iter().chain(b).map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("equal lengths");
        used[j] = true;
        worst = worst.max(d);
    }
    worst / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol_algebra::symbol_iterate;

    #[test]
    fn rossby_examples() {
        let m = named_model("rossby").unwrap();
        assert_eq!(m.spec.p2.det_at(&[1.0, 2.0]).unwrap(), re(-5.0));
        let it = symbol_iterate(&m.spec.p1, &m.spec.p2, &[1.0, 2.0], 1).unwrap()[(0, 0)];
        assert!((it - C64::new(0.0, 0.4)).norm() < 1e-15);
        let ev = dispersion(&m, &[1.0, 2.0]).unwrap();
        assert!((ev[0] - C64::new(0.0, 0.4)).norm() < 1e-15);
    }

    #[test]
    fn sobolev_symbols() {
        let m = named_model("sobolev").unwrap();
        let x = [0.0, 0.0, 1.0];
        let p2 = m.spec.p2.eval(&x).unwrap();
        let p1 = m.spec.p1.eval(&x).unwrap();
        assert_eq!(p2[(0, 0)], re(-1.0));
        assert_eq!(p2[(1, 1)], re(1.0));
        assert_eq!(p1[(0, 1)], re(9.0));
        assert_eq!(p1[(1, 0)], re(1.0));
        let ev = dispersion(&m, &x).unwrap();
        assert!(spectrum_mismatch(&ev, &[C64::new(0.0, 3.0), C64::new(0.0, -3.0)]) < 1e-14);
        let b = named_model("boussinesq").unwrap();
        let ev = dispersion(&b, &[1.0, 0.0, 0.0]).unwrap();
        assert!(spectrum_mismatch(&ev, &[C64::new(0.0, 2.0), C64::new(0.0, -2.0)]) < 1e-14);
    }

    #[test]
    fn origin_is_singular_for_all() {
        for name in MODEL_NAMES {
            let m = named_model(name).unwrap();
            let zero = vec![0.0; m.spec.n()];
            assert_eq!(m.spec.p2.det_at(&zero).unwrap().norm(), 0.0);
            assert_eq!(m.spec.weight(&zero), 0.0);
        }
    }

    #[test]
    fn registry_errors() {
        match named_model("rosby") {
            Err(Error::UnknownModel { valid, .. }) => assert!(valid.contains("rossby")),
            other => panic!("{other:?}"),
        }
        let mut p = BTreeMap::new();
        p.insert("nu".to_string(), -1.0);
        assert!(matches!(
            build_model("rotating_viscous", &p, Formulation::MatricialFirstOrder),
            Err(Error::BadParams(_))
        ));
        assert!(build_model("rossby", &BTreeMap::new(), Formulation::ScalarAlpha2).is_err());
    }

    #[test]
    fn viscous_spectrum_is_dissipative() {
        let m = named_model("rotating_viscous").unwrap();
        let x = [0.7, -1.2, 2.0];
        let ev = dispersion(&m, &x).unwrap();
        assert!(ev.iter().all(|z| z.re <= 0.0));
        assert!(spectrum_mismatch(&ev, &closed_form_dispersion(&m, &x).unwrap()) < 1e-10);
    }
}
