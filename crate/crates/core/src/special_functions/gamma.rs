use super::dd::{ln_gamma_signed, rgamma_dd, Dd};

/// 1/Γ(x), exactly 0 at x ∈ {0, −1, −2, …}.
pub fn reciprocal_gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    rgamma_dd(Dd::new(x)).to_f64()
}

/// Γ(x) in double precision (infinite at the poles).
pub fn gamma(x: f64) -> f64 {
    match ln_gamma_signed(Dd::new(x)) {
        None => f64::INFINITY,
        Some((lg, s)) => s * lg.exp().to_f64(),
    }
}

/// ln|Γ(x)| together with the sign of Γ(x); `None` at poles.
pub fn ln_gamma(x: f64) -> Option<(f64, f64)> {
    ln_gamma_signed(Dd::new(x)).map(|(lg, s)| (lg.to_f64(), s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        assert_eq!(reciprocal_gamma(1.0), 1.0);
        assert_eq!(reciprocal_gamma(-2.0), 0.0);
        assert!((reciprocal_gamma(0.5) - 0.5641895835477563).abs() < 1e-16);
    }

    #[test]
    fn factorials() {
        let mut f = 1.0f64;
        for n in 1..=20u32 {
            assert!((gamma(n as f64 + 1.0) / (f * n as f64) - 1.0).abs() < 1e-15);
            f *= n as f64;
        }
        assert!(reciprocal_gamma(200.0) < 1e-300);
    }
}
