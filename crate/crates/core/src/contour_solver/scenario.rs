use std::f64::consts::PI;

use super::pencil::{sector_boundary_samples, PencilProblem};
use crate::special_functions::{complex_eigenvalues, CMatrix};
use crate::{Error, Result, C64};

/// Distance from σ(A) below which a point no longer counts as inside the sampled resolvent region.
pub const RESOLVENT_MARGIN: f64 = 0.25;

/// Sector geometry shared by the scenario builder and the pencil problem it returns.
#[derive(Clone, Copy, Debug)]
pub struct Geometry {
    pub zeta: f64,
    pub phi: f64,
    pub theta: f64,
    pub r: f64,
    pub a: f64,
    pub nu_prime: f64,
}

/// P(A) for a polynomial given by ascending coefficients.
pub fn matrix_polynomial(coeffs: &[C64], a: &CMatrix) -> CMatrix {
    let m = a.nrows();
    let mut out = CMatrix::zeros(m, m);
    for c in coeffs.iter().rev() {
        out = &out * a + CMatrix::identity(m, m) * *c;
    }
    out
}

/// Roots of an ascending-coefficient polynomial through its companion matrix; None when it vanishes.
pub fn polynomial_roots(coeffs: &[C64]) -> Option<Vec<C64>> {
    let big = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if big == 0.0 {
        return None;
    }
    let deg = coeffs.iter().rposition(|c| c.norm() > 1e-14 * big)?;
    if deg == 0 {
        return Some(Vec::new());
    }
    let lead = coeffs[deg];
    let comp = CMatrix::from_fn(deg, deg, |i, j| {
        if j == deg - 1 {
            -coeffs[i] / lead
        } else if i == j + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Some(complex_eigenvalues(&comp))
}

/// Least-squares slope of log‖(z−A)^{−1}‖ against log(1+|z|) on far samples of the resolvent region.
fn resolvent_growth(a: &CMatrix, spectrum: &[C64]) -> f64 {
    let m = a.nrows();
    let mut pts = Vec::new();
    for rho in [1e2, 3e2, 1e3, 3e3, 1e4] {
        for k in 0..8 {
            let z = C64::from_polar(rho, 2.0 * PI * (k as f64 + 0.5) / 8.0);
            if spectrum.iter().any(|s| (z - s).norm() < RESOLVENT_MARGIN) {
                continue;
            }
            let zm = CMatrix::identity(m, m) * z - a;
            if let Some(inv) = zm.try_inverse() {
                pts.push(((1.0 + rho).ln(), inv.norm().ln()));
            }
        }
    }
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |s, p| (s.0 + p.0 / n, s.1 + p.1 / n));
    let (sxx, sxy) = pts.iter().fold((0.0, 0.0), |s, p| (s.0 + (p.0 - mx).powi(2), s.1 + (p.0 - mx) * (p.1 - my)));
    sxy / sxx
}

/// Pencil problem built from one operator A: A_i = P_i(A), B = P_n(A), and the regularizer
/// C = (λ₀ − A)^{−Q′} with Q′ = N + 2, N the fitted polynomial growth of the resolvent.
pub fn resolvent_scenario(a: &CMatrix, polys: &[Vec<C64>], q: Vec<u32>, lambda0: C64, g: Geometry) -> Result<PencilProblem> {
    let m = a.nrows();
    if m == 0 || a.ncols() != m {
        return Err(Error::BadParams("A must be square".into()));
    }
    if polys.len() != q.len() {
        return Err(Error::BadParams(format!("{} polynomials for {} exponents", polys.len(), q.len())));
    }
    let shifted = CMatrix::identity(m, m) * lambda0 - a;
    let sv = shifted.clone().singular_values();
    if sv.min() <= 1e-12 * (1.0 + a.norm()) {
        return Err(Error::NotResolvent(format!("lambda0 = {lambda0} is in the spectrum of A")));
    }
    let spectrum = complex_eigenvalues(a);

    // Root test on the sampled contour geometry.
    let psi = g.zeta * PI / 2.0 + g.theta;
    for lam in sector_boundary_samples(psi, g.r) {
        let mu = lam * C64::from_polar(1.0, g.phi);
        let deg = polys.iter().map(|p| p.len()).max().unwrap_or(0);
        let mut coeffs = vec![C64::new(0.0, 0.0); deg];
        for (poly, qi) in polys.iter().zip(&q) {
            let w = mu.powi(*qi as i32);
            for (c, pc) in coeffs.iter_mut().zip(poly) {
                *c += w * pc;
            }
        }
        let roots = polynomial_roots(&coeffs)
            .ok_or_else(|| Error::RootEscape(format!("symbol polynomial vanishes identically at lambda = {lam}")))?;
        for z in roots {
            if spectrum.iter().any(|s| (z - s).norm() < RESOLVENT_MARGIN) {
                return Err(Error::RootEscape(format!("root {z} at lambda = {lam} leaves the resolvent region")));
            }
        }
    }

    let slope = resolvent_growth(a, &spectrum);
    let n_growth = slope.ceil().max(0.0) as u32;
    let q_prime = n_growth + 2;
    let inv = shifted.try_inverse().ok_or_else(|| Error::NotResolvent(format!("lambda0 = {lambda0}")))?;
    let mut c = CMatrix::identity(m, m);
    for _ in 0..q_prime {
        c = &c * &inv;
    }
    let ops: Vec<CMatrix> = polys.iter().map(|p| matrix_polynomial(p, a)).collect();
    PencilProblem::new(q, g.zeta, ops, c, g.phi, g.theta, g.r, g.a, g.nu_prime)
}

fn cm(v: f64) -> C64 {
    C64::new(v, 0.0)
}

fn diag(v: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(v.len(), v.iter().map(|&x| cm(x))))
}

/// u′ + α₀u = 0 with α₀ = 1/2: q = (0, 1), ζ = 1, θ = π/4, r = 1, a = 1.2, x₀ = 1.
pub fn scalar_scenario() -> Result<(PencilProblem, super::ContourData)> {
    let p = PencilProblem::new(vec![0, 1], 1.0, vec![diag(&[0.5]), diag(&[1.0])], diag(&[1.0]), 0.0, PI / 4.0, 1.0, 1.2, -0.5)?;
    Ok((p, super::ContourData::new(vec![vec![cm(1.0)]], None)))
}

/// B = diag(1, 0), A₀ = diag(1/2, 1): one evolving component and one algebraic constraint.
pub fn degenerate_scenario(x0: [f64; 2]) -> Result<(PencilProblem, super::ContourData)> {
    let p = PencilProblem::new(
        vec![0, 1],
        1.0,
        vec![diag(&[0.5, 1.0]), diag(&[1.0, 0.0])],
        CMatrix::identity(2, 2),
        0.0,
        PI / 4.0,
        1.0,
        1.2,
        -0.5,
    )?;
    Ok((p, super::ContourData::new(vec![vec![cm(x0[0]), cm(x0[1])]], None)))
}

/// Seeded diagonal commuting family with q = (0, 1, 2) and ζ = 0.8; every pencil root sits inside |λ| < r.
pub fn diagonal_scenario(seed: u64) -> Result<(PencilProblem, super::ContourData)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |lo: f64, hi: f64, n: usize| (0..n).map(|_| rng.gen_range(lo..hi)).collect::<Vec<_>>();
    let a0 = draw(0.05, 0.3, 3);
    let a1 = draw(0.2, 0.8, 3);
    let c = draw(0.5, 1.5, 3);
    let xs = draw(-1.0, 1.0, 12);
    let p = PencilProblem::new(
        vec![0, 1, 2],
        0.8,
        vec![diag(&a0), diag(&a1), CMatrix::identity(3, 3)],
        diag(&c),
        0.0,
        0.4 * PI,
        1.0,
        1.5,
        -1.5,
    )?;
    let x = vec![
        (0..3).map(|i| C64::new(xs[i], xs[3 + i])).collect(),
        (0..3).map(|i| C64::new(xs[6 + i], xs[9 + i])).collect(),
    ];
    Ok((p, super::ContourData::new(x, None)))
}

/// u″ + u/4 = 0 written with q = (0, 2), ζ = 1; roots ±i/2 lie inside |λ| < 1.
pub fn second_order_scenario() -> Result<(PencilProblem, super::ContourData)> {
    let p = PencilProblem::new(vec![0, 2], 1.0, vec![diag(&[0.25]), diag(&[1.0])], diag(&[1.0]), 0.0, PI / 4.0, 1.0, 1.2, -1.5)?;
    Ok((p, super::ContourData::new(vec![vec![cm(1.0)], vec![cm(0.5)]], None)))
}
