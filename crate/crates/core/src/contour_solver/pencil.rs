use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::special_functions::CMatrix;
use crate::{Error, Result, C64};

/// Smallest value of −(q_n − 1 − ω + max{q_j : q_j − 1 < ω}) over ω = 0..q_n−1; ν′ must lie below it.
pub fn admissible_nu_bound(q: &[u32]) -> Result<f64> {
    check_exponents(q)?;
    let qn = *q.last().expect("nonempty") as i64;
    let mut best = f64::INFINITY;
    for omega in 0..qn {
        let max_rest = q.iter().filter(|&&qj| (qj as i64) - 1 < omega).map(|&qj| qj as i64).max().unwrap_or(0);
        best = best.min(-((qn - 1 - omega + max_rest) as f64));
    }
    Ok(best)
}

/// 40 points on the arc |λ| = r and 80 per ray (|λ| log-spaced in [r, 1e6]) of the sector boundary.
pub fn sector_boundary_samples(psi: f64, r: f64) -> Vec<C64> {
    let mut out = Vec::with_capacity(200);
    for k in 0..40 {
        let t = -psi + 2.0 * psi * (k as f64 + 0.5) / 40.0;
        out.push(C64::from_polar(r, t));
    }
    let (l0, l1) = (r.ln(), 1e6f64.ln().max(r.ln() + 1.0));
    for sign in [-1.0, 1.0] {
        for k in 0..80 {
            let s = (l0 + (l1 - l0) * k as f64 / 79.0).exp();
            out.push(C64::from_polar(s, sign * psi));
        }
    }
    out
}

pub fn check_exponents(q: &[u32]) -> Result<()> {
    if q.len() < 2 {
        return Err(Error::BadExponents(format!("need at least q_0, q_1, got {q:?}")));
    }
    if q[0] != 0 {
        return Err(Error::BadExponents(format!("q_0 must be 0, got {}", q[0])));
    }
    if q[1] == 0 {
        return Err(Error::BadExponents("q_1 must exceed q_0 = 0".into()));
    }
    if q.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::BadExponents(format!("exponents must be nondecreasing, got {q:?}")));
    }
    Ok(())
}

/// Pencil Q(μ) = Σ_i μ^{q_i} A_i (A_n = B) with regularizer C and the sector geometry.
#[derive(Clone, Debug)]
pub struct PencilProblem {
    pub q: Vec<u32>,
    pub zeta: f64,
    /// A_0, …, A_{n−1}, B.
    pub ops: Vec<CMatrix>,
    pub c: CMatrix,
    pub phi: f64,
    pub theta: f64,
    pub r: f64,
    pub a: f64,
    pub nu_prime: f64,
    /// max ‖(1+|λ|)^{−ν′} Q(λe^{iφ})^{−1} C‖ over the sampled sector boundary.
    pub sector_constant: f64,
    /// Fitted growth exponents of ‖μ^{q_i} A_i Q(μ)^{−1} C‖ in |λ| along the far rays.
    pub growth_exponents: Vec<f64>,
}

fn commute_gap(x: &CMatrix, y: &CMatrix) -> f64 {
    (x * y - y * x).norm() / (1.0 + x.norm() * y.norm())
}

impl PencilProblem {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        q: Vec<u32>,
        zeta: f64,
        ops: Vec<CMatrix>,
        c: CMatrix,
        phi: f64,
        theta: f64,
        r: f64,
        a: f64,
        nu_prime: f64,
    ) -> Result<Self> {
        check_exponents(&q)?;
        if !(zeta > 0.0 && zeta <= 2.0) {
            return Err(Error::BadParams(format!("zeta must lie in (0, 2], got {zeta}")));
        }
        if ops.len() != q.len() {
            return Err(Error::BadParams(format!("{} exponents but {} operators", q.len(), ops.len())));
        }
        let m = c.nrows();
        if m == 0 || c.ncols() != m || ops.iter().any(|o| o.nrows() != m || o.ncols() != m) {
            return Err(Error::BadParams("operators and C must all be square of one size".into()));
        }
        if !(phi > -PI && phi <= PI) {
            return Err(Error::BadParams(format!("phi must lie in (-pi, pi], got {phi}")));
        }
        let (lo, hi) = (PI - PI * zeta, PI - PI * zeta / 2.0);
        if !(theta > lo && theta < hi) {
            return Err(Error::BadParams(format!("theta = {theta} outside ({lo}, {hi})")));
        }
        if !(r > 0.0 && a > r && a.is_finite()) {
            return Err(Error::BadParams(format!("need a > r > 0, got a = {a}, r = {r}")));
        }
        let sv = c.clone().singular_values();
        let smax = sv.max();
        if !(sv.min() > 1e-12 * smax) {
            return Err(Error::BadParams("C is not injective".into()));
        }
        if let Some(i) = ops.iter().position(|o| commute_gap(&c, o) > 1e-12) {
            return Err(Error::BadParams(format!("C does not commute with operator {i}")));
        }
        let bound = admissible_nu_bound(&q)?;
        if !(nu_prime < bound) {
            return Err(Error::BadParams(format!("nu' = {nu_prime} must be below the admissible bound {bound}")));
        }
        let mut p = PencilProblem {
            q,
            zeta,
            ops,
            c,
            phi,
            theta,
            r,
            a,
            nu_prime,
            sector_constant: 0.0,
            growth_exponents: Vec::new(),
        };
        p.sample_sector()?;
        Ok(p)
    }

    pub fn m(&self) -> usize {
        self.c.nrows()
    }

    pub fn n_terms(&self) -> usize {
        self.q.len() - 1
    }

    pub fn q_n(&self) -> u32 {
        *self.q.last().expect("nonempty")
    }

    /// Half-opening ψ = ζπ/2 + θ of the sector bounded by the contour.
    pub fn psi(&self) -> f64 {
        self.zeta * PI / 2.0 + self.theta
    }

    /// S_ω = {j : q_j − 1 ≥ ω}.
    pub fn s_set(&self, omega: u32) -> Vec<usize> {
        (0..self.q.len()).filter(|&j| self.q[j] as i64 - 1 >= omega as i64).collect()
    }

    /// μ = λe^{iφ}.
    pub fn mu(&self, lambda: C64) -> C64 {
        lambda * C64::from_polar(1.0, self.phi)
    }

    /// Q(μ) = Σ μ^{q_i} A_i, the pencil P_{μ^{1/ζ}} written in the variable μ.
    pub fn pencil(&self, mu: C64) -> CMatrix {
        let m = self.m();
        let mut out = CMatrix::zeros(m, m);
        for (qi, op) in self.q.iter().zip(&self.ops) {
            out += op * mu.powi(*qi as i32);
        }
        out
    }

    /// Q(μ)^{−1}·rhs, PencilSingular when the solve fails or the pencil is numerically singular.
    pub fn solve(&self, mu: C64, rhs: &CMatrix) -> Result<CMatrix> {
        let qm = self.pencil(mu);
        let scale = qm.norm().max(f64::MIN_POSITIVE);
        let sv = qm.clone().singular_values();
        if sv.min() <= 1e-13 * scale {
            return Err(Error::PencilSingular(mu.to_string()));
        }
        qm.lu().solve(rhs).ok_or_else(|| Error::PencilSingular(mu.to_string()))
    }

    /// λ ↦ Q(λe^{iφ})^{−1} C x.
    pub fn resolvent_map(&self, lambda: C64, x: &[C64]) -> Result<Vec<C64>> {
        let cx = &self.c * DVector::from_column_slice(x);
        let rhs = CMatrix::from_column_slice(self.m(), 1, cx.as_slice());
        Ok(self.solve(self.mu(lambda), &rhs)?.iter().copied().collect())
    }

    pub fn boundary_samples(&self) -> Vec<C64> {
        sector_boundary_samples(self.psi(), self.r)
    }

    fn sample_sector(&mut self) -> Result<()> {
        let samples = self.boundary_samples();
        let mut k = 0.0f64;
        let mut far: Vec<Vec<(f64, f64)>> = vec![Vec::new(); self.q.len()];
        for lam in &samples {
            let inv_c = self.solve(self.mu(*lam), &self.c)?;
            k = k.max((1.0 + lam.norm()).powf(-self.nu_prime) * inv_c.norm());
            if lam.norm() >= 1e3 {
                for (i, (qi, op)) in self.q.iter().zip(&self.ops).enumerate() {
                    let v = (op * &inv_c).norm() * lam.norm().powi(*qi as i32);
                    if v > 0.0 {
                        far[i].push(((1.0 + lam.norm()).ln(), v.ln()));
                    }
                }
            }
        }
        self.sector_constant = k;
        self.growth_exponents = far
            .iter()
            .map(|pts| {
                if pts.len() < 2 {
                    return f64::NEG_INFINITY;
                }
                let n = pts.len() as f64;
                let (mx, my) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
                let (sxx, sxy) =
                    pts.iter().fold((0.0, 0.0), |a, p| (a.0 + (p.0 - mx).powi(2), a.1 + (p.0 - mx) * (p.1 - my)));
                sxy / sxx
            })
            .collect();
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PencilDoc::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let d: PencilDoc = serde_json::from_str(s)?;
        let mat = |rows: &Vec<Vec<[f64; 2]>>| -> Result<CMatrix> {
            let m = rows.len();
            if m == 0 || rows.iter().any(|r| r.len() != m) {
                return Err(Error::Config("matrices must be square nested arrays of [re, im]".into()));
            }
            Ok(CMatrix::from_fn(m, m, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
        };
        let ops = d.matrices.iter().map(mat).collect::<Result<Vec<_>>>()?;
        PencilProblem::new(d.q, d.zeta, ops, mat(&d.c)?, d.phi, d.theta, d.r, d.a, d.nu_prime)
    }
}

#[derive(Serialize, Deserialize)]
struct PencilDoc {
    q: Vec<u32>,
    zeta: f64,
    phi: f64,
    theta: f64,
    r: f64,
    a: f64,
    nu_prime: f64,
    /// A_0, …, A_{n−1}, B as rows of [re, im].
    matrices: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(rename = "C")]
    c: Vec<Vec<[f64; 2]>>,
}

fn rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

impl From<&PencilProblem> for PencilDoc {
    fn from(p: &PencilProblem) -> Self {
        PencilDoc {
            q: p.q.clone(),
            zeta: p.zeta,
            phi: p.phi,
            theta: p.theta,
            r: p.r,
            a: p.a,
            nu_prime: p.nu_prime,
            matrices: p.ops.iter().map(rows).collect(),
            c: rows(&p.c),
        }
    }
}
