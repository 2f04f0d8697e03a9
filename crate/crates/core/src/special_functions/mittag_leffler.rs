use std::f64::consts::PI;

use super::dd::{ln_gamma_signed, CDd, Dd};
use crate::{Error, Result, C64};

/// Terms beyond the series/asymptotic crossover are negligible once |z|^{1/β} reaches this.
const CROSSOVER_EXPONENT: f64 = 37.0;
const SCALAR_TERM_CAP: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct MLParams {
    pub beta: f64,
    pub gamma: f64,
    pub series_tol: f64,
    pub switch_radius: f64,
    pub asymptotic_terms: usize,
    pub sigma: f64,
}

impl MLParams {
    pub fn new(beta: f64, gamma: f64) -> Self {
        let beta_ok = beta > 0.0 && beta.is_finite();
        let b = if beta_ok { beta } else { 1.0 };
        MLParams {
            beta,
            gamma,
            series_tol: 1e-16,
            switch_radius: Self::default_switch_radius(b, gamma),
            asymptotic_terms: ((64.0 / b).ceil() as usize + 2).min(SCALAR_TERM_CAP),
            sigma: 0.46 * PI,
        }
    }

    /// |z| at which the asymptotic tail e^{-|z|^{1/β}} and the double-double
    /// cancellation floor of the series balance. Pure exponential sums switch at 1.
    pub fn default_switch_radius(beta: f64, gamma: f64) -> f64 {
        if is_exponential_sum(beta, gamma) {
            1.0
        } else {
            CROSSOVER_EXPONENT.powf(beta)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::DomainError(format!("beta must be positive, got {}", self.beta)));
        }
        if !self.gamma.is_finite() {
            return Err(Error::DomainError("gamma must be finite".into()));
        }
        if !(self.series_tol > 0.0) {
            return Err(Error::DomainError("series_tol must be positive".into()));
        }
        if !(self.switch_radius > 0.0) {
            return Err(Error::DomainError("switch_radius must be positive".into()));
        }
        if self.asymptotic_terms < 2 {
            return Err(Error::DomainError("asymptotic_terms must be at least 2".into()));
        }
        if !(self.sigma > 0.0 && self.sigma < PI / 2.0) {
            return Err(Error::DomainError(format!("sigma must lie in (0, pi/2), got {}", self.sigma)));
        }
        Ok(())
    }
}

/// β ∈ ℕ and γ ∈ ℤ with γ ≤ β: every inverse-power coefficient 1/Γ(γ−βj) vanishes and
/// E_{β,γ} is exactly (1/β) Σ Z_s^{1−γ} e^{Z_s} over the β branches of z^{1/β}.
pub fn is_exponential_sum(beta: f64, gamma: f64) -> bool {
    beta == beta.round() && gamma == gamma.round() && gamma <= beta && beta <= 64.0
}

#[derive(Clone, Debug)]
struct SeriesCoeff {
    /// c_k / c_{previous nonzero}; c_{k0} itself for the first nonzero index.
    rel: Dd,
    zero: bool,
}

/// Reusable E_{β,γ} evaluator: coefficients precomputed, series/asymptotic handoff
/// checked once at construction.
#[derive(Clone, Debug)]
pub struct MittagLeffler {
    params: MLParams,
    coeffs: Vec<SeriesCoeff>,
    last_ln_gamma: Option<(Dd, f64)>,
    first_positive: usize,
    algebraic: Vec<Option<(f64, f64)>>,
    /// ln Γ(1−γ+βj) − ln π, the smooth envelope of ln|1/Γ(γ−βj)|; None while 1−γ+βj < 1.5.
    envelope: Vec<Option<f64>>,
    exponential_sum: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct SeriesValue {
    pub value: C64,
    pub terms: usize,
    /// Σ|terms|: the cancellation mass that bounds the rounding error.
    pub mass: f64,
}

impl MittagLeffler {
    pub fn new(params: MLParams) -> Result<Self> {
        let ml = Self::new_unchecked(params)?;
        ml.check_handoff()?;
        Ok(ml)
    }

    pub fn with(beta: f64, gamma: f64) -> Result<Self> {
        Self::new(MLParams::new(beta, gamma))
    }

    /// Construct without the handoff check (used by the check itself and by tests
    /// that probe deliberately bad switch radii).
    pub fn new_unchecked(params: MLParams) -> Result<Self> {
        params.validate()?;
        let beta = params.beta;
        let gamma = params.gamma;
        let first_positive = if gamma > 0.0 { 0 } else { ((-gamma) / beta).floor() as usize + 1 };

        let mut ml = MittagLeffler {
            coeffs: Vec::new(),
            last_ln_gamma: None,
            first_positive,
            algebraic: Vec::new(),
            envelope: Vec::new(),
            exponential_sum: is_exponential_sum(beta, gamma),
            params,
        };

        // Precompute until terms at |z| = switch radius are far below tolerance.
        let ln_r = ml.params.switch_radius.ln();
        let ln_tol = ml.params.series_tol.ln() - 30.0;
        let peak = (ml.params.switch_radius.powf(1.0 / beta) / beta).ceil() as usize;
        let mut k = 0usize;
        loop {
            ml.push_coeff();
            if k >= 64 && k >= peak && k > first_positive {
                let x = beta * k as f64 + gamma;
                if let Some((lg, _)) = ln_gamma_signed(Dd::new(x)) {
                    if k as f64 * ln_r - lg.to_f64() < ln_tol {
                        break;
                    }
                }
            }
            k += 1;
            if k >= SCALAR_TERM_CAP {
                break;
            }
        }

        let l = ml.params.asymptotic_terms;
        ml.algebraic = (1..l)
            .map(|j| {
                ln_gamma_signed(Dd::new(gamma) - Dd::new(beta).mul_f64(j as f64)).map(|(lg, s)| (lg.to_f64(), s))
            })
            .collect();
        ml.envelope = (1..l)
            .map(|j| {
                let x = Dd::ONE - Dd::new(gamma) + Dd::new(beta).mul_f64(j as f64);
                if x.to_f64() < 1.5 {
                    return None;
                }
                ln_gamma_signed(x).map(|(lg, _)| lg.to_f64() - PI.ln())
            })
            .collect();
        Ok(ml)
    }

    fn push_coeff(&mut self) {
        let k = self.coeffs.len();
        let x = Dd::new(self.params.beta).mul_f64(k as f64) + Dd::new(self.params.gamma);
        match ln_gamma_signed(x) {
            None => self.coeffs.push(SeriesCoeff { rel: Dd::ZERO, zero: true }),
            Some((lg, s)) => {
                let rel = match self.last_ln_gamma {
                    None => (-lg).exp().mul_f64(s),
                    Some((prev, ps)) => (prev - lg).exp().mul_f64(s * ps),
                };
                self.last_ln_gamma = Some((lg, s));
                self.coeffs.push(SeriesCoeff { rel, zero: false });
            }
        }
    }

    pub fn params(&self) -> &MLParams {
        &self.params
    }

    pub fn beta(&self) -> f64 {
        self.params.beta
    }

    pub fn gamma(&self) -> f64 {
        self.params.gamma
    }

    /// Power series with the three-consecutive-small-terms stopping rule.
    pub fn series(&self, z: C64) -> Result<C64> {
        self.series_detail(z).map(|s| s.value)
    }

    pub fn series_detail(&self, z: C64) -> Result<SeriesValue> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::DomainError(format!("non-finite argument {z}")));
        }
        let zd = CDd::from_c64(z);
        let tol = self.params.series_tol;
        let mut sum = CDd::ZERO;
        let mut last = CDd { re: Dd::ONE, im: Dd::ZERO };
        let mut zpow = CDd { re: Dd::ONE, im: Dd::ZERO };
        let mut small = 0usize;
        let mut mass = 0.0f64;
        // Coefficients past the precomputed table are generated on demand.
        let mut extra: Option<MittagLeffler> = None;
        for k in 0..SCALAR_TERM_CAP {
            let coeff = if k < self.coeffs.len() {
                self.coeffs[k].clone()
            } else {
                let ext = extra.get_or_insert_with(|| self.clone());
                while ext.coeffs.len() <= k {
                    ext.push_coeff();
                }
                ext.coeffs[k].clone()
            };
            let mag;
            if coeff.zero {
                mag = 0.0;
                zpow = zpow * zd;
            } else {
                let term = (last * zpow).scale(coeff.rel);
                last = term;
                zpow = zd;
                sum = sum + term;
                mag = term.norm_f64();
                mass += mag;
            }
            if k >= self.first_positive {
                if mag < tol * (1.0 + sum.norm_f64()) {
                    small += 1;
                    if small >= 3 {
                        return Ok(SeriesValue { value: sum.to_c64(), terms: k + 1, mass });
                    }
                } else {
                    small = 0;
                }
            }
        }
        Err(Error::NonConvergence {
            cap: SCALAR_TERM_CAP,
            context: format!("E_{{{},{}}}({z}) series", self.params.beta, self.params.gamma),
        })
    }

    /// Exponential terms over the admissible branches plus the optimally truncated
    /// inverse-power sum.
    pub fn asymptotic(&self, z: C64) -> Result<C64> {
        let r = z.norm();
        if r < self.params.switch_radius {
            return Err(Error::DomainError(format!(
                "|z| = {r} is below the switch radius {}",
                self.params.switch_radius
            )));
        }
        let beta = self.params.beta;
        let gamma = self.params.gamma;
        let th = z.arg();
        let ln_r = r.ln();

        let mut exp_part = C64::new(0.0, 0.0);
        let s_lo;
        let s_hi;
        if self.exponential_sum {
            // Half-open window (−βπ, βπ]: exactly β branches.
            s_lo = ((-beta * PI - th) / (2.0 * PI)).floor() as i64;
            s_hi = ((beta * PI - th) / (2.0 * PI)).ceil() as i64;
        } else {
            let bound = beta * (PI / 2.0 + self.params.sigma);
            s_lo = ((-bound - th) / (2.0 * PI)).floor() as i64;
            s_hi = ((bound - th) / (2.0 * PI)).ceil() as i64;
        }
        for s in s_lo..=s_hi {
            let phase = th + 2.0 * PI * s as f64;
            let keep = if self.exponential_sum {
                phase > -beta * PI && phase <= beta * PI
            } else {
                phase.abs() < beta * (PI / 2.0 + self.params.sigma)
            };
            if !keep {
                continue;
            }
            let ln_z = C64::new(ln_r / beta, phase / beta);
            let big_z = ln_z.exp();
            exp_part += ((1.0 - gamma) * ln_z + big_z).exp();
        }
        exp_part /= beta;

        let mut alg = C64::new(0.0, 0.0);
        if !self.exponential_sum {
            let ln_z = C64::new(ln_r, th);
            // Truncate where the envelope is smallest: the coefficients themselves dip near the
            // poles of Γ(γ−βj) and would stop the sum early.
            let mut prev = f64::INFINITY;
            for (idx, c) in self.algebraic.iter().enumerate() {
                let j = (idx + 1) as f64;
                let env = self.envelope[idx].map(|e| -j * ln_r + e);
                if let Some(e) = env {
                    if e > prev {
                        break;
                    }
                    prev = e;
                }
                let Some((lg, sign)) = *c else { continue };
                alg += sign * (-j * ln_z - lg).exp();
                if env.is_some_and(|e| e.exp() < 1e-17 * alg.norm()) {
                    break;
                }
            }
        }
        Ok(exp_part - alg)
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        if z.norm() < self.params.switch_radius {
            self.series(z)
        } else {
            self.asymptotic(z)
        }
    }

    fn check_handoff(&self) -> Result<()> {
        let r = self.params.switch_radius;
        let beta = self.params.beta;
        let stokes = beta * (PI / 2.0 + self.params.sigma);
        let n = 24;
        let mut worst = 0.0f64;
        for k in 0..n {
            let th = -PI + 2.0 * PI * (k as f64 + 0.5) / n as f64;
            if !self.exponential_sum && near_stokes(th, stokes, 0.2) {
                continue;
            }
            if r.powf(1.0 / beta) * (th / beta).cos().max(0.0) > 700.0 {
                continue;
            }
            let z = C64::from_polar(r * (1.0 + 1e-12), th);
            let s = self.series(z)?;
            let a = self.asymptotic(z)?;
            if !(s.re.is_finite() && a.re.is_finite()) {
                continue;
            }
            let rel = (s - a).norm() / a.norm().max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
        }
        if worst > 1e-6 {
            return Err(Error::ValidationFailed(format!(
                "series and asymptotic branches disagree by {worst:e} at |z| = {r} (beta={}, gamma={})",
                beta, self.params.gamma
            )));
        }
        Ok(())
    }
}

/// True when arg z is within `band` of a Stokes direction ±`stokes` (mod 2π).
pub fn near_stokes(th: f64, stokes: f64, band: f64) -> bool {
    let mut k = -4i32;
    while k <= 4 {
        let c = 2.0 * PI * k as f64;
        if (th - (stokes + c)).abs() < band || (th - (-stokes + c)).abs() < band {
            return true;
        }
        k += 1;
    }
    false
}

pub fn ml_series(params: &MLParams, z: C64) -> Result<C64> {
    MittagLeffler::new_unchecked(params.clone())?.series(z)
}

pub fn ml_asymptotic(params: &MLParams, z: C64) -> Result<C64> {
    MittagLeffler::new_unchecked(params.clone())?.asymptotic(z)
}

pub fn ml_eval(params: &MLParams, z: C64) -> Result<C64> {
    MittagLeffler::new(params.clone())?.eval(z)
}

/// F_λ(z) = z E_{ζ,2}(z^ζ λ e^{iφ}) for ζ ∈ (1, 2].
pub fn f_lambda(zeta: f64, phi: f64, lambda: C64, z: C64) -> Result<C64> {
    let ml = MittagLeffler::with(zeta, 2.0)?;
    f_lambda_with(&ml, phi, lambda, z)
}

pub fn f_lambda_with(ml: &MittagLeffler, phi: f64, lambda: C64, z: C64) -> Result<C64> {
    let zeta = ml.beta();
    if !(zeta > 1.0 && zeta <= 2.0) {
        return Err(Error::DomainError(format!("F_lambda needs zeta in (1, 2], got {zeta}")));
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(Error::DomainError(format!("z = {z} lies on the negative real axis")));
    }
    if z == C64::new(0.0, 0.0) {
        return Ok(z);
    }
    let w = principal_pow(z, zeta) * lambda * C64::from_polar(1.0, phi);
    Ok(z * ml.eval(w)?)
}

/// Principal branch z^p, cut along (−∞, 0].
pub fn principal_pow(z: C64, p: f64) -> C64 {
    if z == C64::new(0.0, 0.0) {
        return if p == 0.0 { C64::new(1.0, 0.0) } else { z };
    }
    if p == p.round() && p.abs() <= 64.0 {
        return z.powi(p as i32);
    }
    C64::from_polar(z.norm().powf(p), z.arg() * p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn series_examples() {
        let p = MLParams::new(1.0, 1.0);
        assert!((ml_series(&p, c(1.0, 0.0)).unwrap().re - std::f64::consts::E).abs() < 1e-15);
        let p = MLParams::new(2.0, 1.0);
        let v = ml_series(&p, c(-(PI / 2.0).powi(2), 0.0)).unwrap();
        assert!(v.norm() <= p.series_tol, "{v}");
        let p = MLParams::new(0.5, 1.0);
        let v = ml_series(&p, c(-1.0, 0.0)).unwrap();
        assert!((v.re - 0.4275835761558070).abs() < 1e-15, "{v}");
    }

    #[test]
    fn exponential_case_asymptotic() {
        let p = MLParams::new(1.0, 1.0);
        let v = ml_asymptotic(&p, c(30.0, 0.0)).unwrap();
        assert!((v.re / 30f64.exp() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn eval_examples() {
        let v = ml_eval(&MLParams::new(1.0, 2.0), c(1.0, 0.0)).unwrap();
        assert!((v.re - 1.718281828459045).abs() < 1e-15);
        let v = ml_eval(&MLParams::new(2.0, 2.0), c(1.0, 0.0)).unwrap();
        assert!((v.re - 1.1752011936438014).abs() < 1e-15);
    }

    #[test]
    fn zero_coefficients_and_origin() {
        // E_{1,0}(z) = z e^z; the k=0 coefficient is 1/Γ(0) = 0.
        let ml = MittagLeffler::with(1.0, 0.0).unwrap();
        let z = c(0.7, -0.3);
        assert!((ml.series(z).unwrap() - z * z.exp()).norm() < 1e-15);
        assert_eq!(ml.series(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        let ml = MittagLeffler::with(0.5, 1.5).unwrap();
        assert!((ml.eval(c(0.0, 0.0)).unwrap().re - 1.0 / crate::special_functions::gamma(1.5)).abs() < 1e-16);
    }

    #[test]
    fn invalid_params_rejected() {
        let mut p = MLParams::new(1.0, 1.0);
        p.sigma = 2.0;
        assert!(matches!(ml_eval(&p, c(1.0, 0.0)), Err(Error::DomainError(_))));
        let p = MLParams::new(-1.0, 1.0);
        assert!(p.validate().is_err());
        let mut p = MLParams::new(1.0, 1.0);
        p.asymptotic_terms = 1;
        assert!(p.validate().is_err());
    }

    #[test]
    fn asymptotic_below_radius_is_domain_error() {
        let p = MLParams::new(0.5, 1.0);
        assert!(matches!(ml_asymptotic(&p, c(1.0, 0.0)), Err(Error::DomainError(_))));
    }

    #[test]
    fn short_switch_radius_fails_handoff() {
        let mut p = MLParams::new(0.5, 1.0);
        p.switch_radius = 25.0;
        assert!(matches!(MittagLeffler::new(p), Err(Error::ValidationFailed(_))));
    }

    #[test]
    fn f_lambda_examples() {
        let v = f_lambda(2.0, 0.0, c(-1.0, 0.0), c(PI / 2.0, 0.0)).unwrap();
        assert!((v.re - 1.0).abs() < 1e-14 && v.im.abs() < 1e-14);
        assert_eq!(f_lambda(2.0, 0.0, c(3.0, 1.0), c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!(f_lambda(1.5, 0.0, c(-1.0, 0.0), c(-1.0, 0.0)).is_err());
    }
}
