use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;

use super::dd::{ln_gamma_signed, Dd};
use super::mittag_leffler::MittagLeffler;
use crate::{Error, Result, C64};

pub type CMatrix = DMatrix<C64>;

const MATRIX_TERM_CAP: usize = 2_000;
const MATRIX_SERIES_TOL: f64 = 1e-17;
/// Largest tolerated peak-term/result ratio times machine epsilon before the series result is
/// replaced by the Schur route.
const CANCELLATION_LIMIT: f64 = 1e-10;
/// Minimum eigenvalue separation, relative to 1 + ‖T‖, for the Parlett recurrence.
const PARLETT_SEPARATION: f64 = 1e-3;

/// Ratios Γ(α(l−1)+1)/Γ(αl+1), l = 1..cap, so term_l = term_{l−1}·(sM)·ratio_l never
/// forms a huge power or a tiny reciprocal Gamma on its own.
#[derive(Debug)]
pub struct MatrixMl {
    alpha: f64,
    ratios: Vec<f64>,
    /// Scalar E_α for 1×1 symbols and the Schur route; None if its construction failed.
    scalar: Option<MittagLeffler>,
}

impl MatrixMl {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::DomainError(format!("alpha must be positive, got {alpha}")));
        }
        let mut ratios = Vec::with_capacity(MATRIX_TERM_CAP);
        let mut prev = Dd::ZERO; // ln Γ(1)
        for l in 1..=MATRIX_TERM_CAP {
            let (lg, _) = ln_gamma_signed(Dd::new(alpha).mul_f64(l as f64) + Dd::ONE).expect("positive argument");
            ratios.push((prev - lg).exp().to_f64());
            prev = lg;
        }
        Ok(MatrixMl { alpha, ratios, scalar: MittagLeffler::with(alpha, 1.0).ok() })
    }

    /// Shared evaluator per α (construction costs a few thousand log-Gamma calls).
    pub fn cached(alpha: f64) -> Result<Arc<MatrixMl>> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<MatrixMl>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(v) = cache.lock().expect("cache lock").get(&alpha.to_bits()) {
            return Ok(v.clone());
        }
        let v = Arc::new(MatrixMl::new(alpha)?);
        cache.lock().expect("cache lock").insert(alpha.to_bits(), v.clone());
        Ok(v)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// 1/Γ(αl+1) as a running product of the ratios (l=0 gives 1).
    pub fn ratio(&self, l: usize) -> f64 {
        self.ratios[l - 1]
    }

    /// E_α(scale·M) = Σ scale^l M^l / Γ(αl+1). A 1×1 M goes to the scalar evaluator; when the
    /// series cancels badly and the eigenvalues are well separated, Schur–Parlett replaces it.
    pub fn eval(&self, m: &CMatrix, scale: C64) -> Result<CMatrix> {
        let n = m.nrows();
        if n != m.ncols() {
            return Err(Error::DomainError("matrix must be square".into()));
        }
        let sm = m * scale;
        if let (1, Some(ml)) = (n, &self.scalar) {
            return Ok(CMatrix::from_element(1, 1, ml.eval(sm[(0, 0)])?));
        }
        let mut term = CMatrix::identity(n, n);
        let mut sum = term.clone();
        let mut peak = 1.0f64;
        let mut small = 0;
        for l in 1..=MATRIX_TERM_CAP {
            term = (&sm * &term) * C64::new(self.ratios[l - 1], 0.0);
            sum += &term;
            let tn = term.norm();
            peak = peak.max(tn);
            if tn < MATRIX_SERIES_TOL * (1.0 + sum.norm()) {
                small += 1;
                if small >= 3 {
                    if peak * f64::EPSILON > CANCELLATION_LIMIT * sum.norm() {
                        if let Some(f) = self.schur_parlett(&sm) {
                            return Ok(f);
                        }
                    }
                    return Ok(sum);
                }
            } else {
                small = 0;
            }
            if !tn.is_finite() {
                break;
            }
        }
        self.schur_parlett(&sm).ok_or_else(|| Error::NonConvergence {
            cap: MATRIX_TERM_CAP,
            context: format!("matrix E_{}(scale*M), |scale*M| = {:e}", self.alpha, sm.norm()),
        })
    }

    /// E_α(A) = Q F Q* from the complex Schur form A = Q T Q*, with F = E_α(T) by the Parlett
    /// recurrence. None when the eigenvalues are too close for the recurrence.
    fn schur_parlett(&self, a: &CMatrix) -> Option<CMatrix> {
        let ml = self.scalar.as_ref()?;
        let n = a.nrows();
        let (q, t) = a.clone().schur().unpack();
        let tol = PARLETT_SEPARATION * (1.0 + t.norm());
        for i in 0..n {
            for j in i + 1..n {
                if (t[(i, i)] - t[(j, j)]).norm() < tol {
                    return None;
                }
            }
        }
        let mut f = CMatrix::zeros(n, n);
        for i in 0..n {
            f[(i, i)] = ml.eval(t[(i, i)]).ok()?;
        }
        for d in 1..n {
            for i in 0..n - d {
                let j = i + d;
                let mut s = t[(i, j)] * (f[(j, j)] - f[(i, i)]);
                for k in i + 1..j {
                    s += f[(i, k)] * t[(k, j)] - t[(i, k)] * f[(k, j)];
                }
                f[(i, j)] = s / (t[(j, j)] - t[(i, i)]);
            }
        }
        let out = &q * f * q.adjoint();
        out.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then_some(out)
    }

    /// E_α(scale·M) x without forming the matrix function, with the same fallbacks as `eval`.
    pub fn apply(&self, m: &CMatrix, scale: C64, x: &nalgebra::DVector<C64>) -> Result<nalgebra::DVector<C64>> {
        let sm = m * scale;
        if let (1, Some(ml)) = (sm.nrows(), &self.scalar) {
            return Ok(x * ml.eval(sm[(0, 0)])?);
        }
        let mut term = x.clone();
        let mut sum = x.clone();
        let mut peak = x.norm();
        let mut small = 0;
        for l in 1..=MATRIX_TERM_CAP {
            term = (&sm * &term) * C64::new(self.ratios[l - 1], 0.0);
            sum += &term;
            let tn = term.norm();
            peak = peak.max(tn);
            if tn < MATRIX_SERIES_TOL * (x.norm() + sum.norm()) || tn == 0.0 {
                small += 1;
                if small >= 3 {
                    if peak * f64::EPSILON > CANCELLATION_LIMIT * sum.norm() {
                        if let Some(f) = self.schur_parlett(&sm) {
                            return Ok(f * x);
                        }
                    }
                    return Ok(sum);
                }
            } else {
                small = 0;
            }
            if !tn.is_finite() {
                break;
            }
        }
        match self.schur_parlett(&sm) {
            Some(f) => Ok(f * x),
            None => Err(Error::NonConvergence {
                cap: MATRIX_TERM_CAP,
                context: format!("matrix E_{}(scale*M) x, |scale*M| = {:e}", self.alpha, sm.norm()),
            }),
        }
    }
}

pub fn ml_matrix(alpha: f64, m: &CMatrix, scale: C64) -> Result<CMatrix> {
    if m.nrows() > 8 {
        return Err(Error::DomainError(format!("matrix size {} exceeds 8", m.nrows())));
    }
    MatrixMl::cached(alpha)?.eval(m, scale)
}

/// Eigenvalues of a complex square matrix from its complex Schur form.
pub fn complex_eigenvalues(m: &CMatrix) -> Vec<C64> {
    match m.nrows() {
        0 => Vec::new(),
        1 => vec![m[(0, 0)]],
        _ => m.clone().schur().unpack().1.diagonal().iter().copied().collect(),
    }
}
