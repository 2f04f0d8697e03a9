//! Double-double arithmetic (unevaluated sum hi + lo, ~106-bit significand).
//!
//! Only the handful of operations the Mittag-Leffler series needs: ring ops,
//! division, exp, ln, sin and the log-Gamma function.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const LN2: Dd = Dd { hi: std::f64::consts::LN_2, lo: 2.319046813846299558e-17 };
    pub const PI: Dd = Dd { hi: std::f64::consts::PI, lo: 1.224646799147353207e-16 };

    #[inline]
    pub const fn new(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    pub fn sqr(self) -> Dd {
        self * self
    }

    pub fn ldexp(self, k: i32) -> Dd {
        let s = 2f64.powi(k);
        Dd { hi: self.hi * s, lo: self.lo * s }
    }

    pub fn powi(self, mut n: u32) -> Dd {
        let mut base = self;
        let mut acc = Dd::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base.sqr();
            n >>= 1;
        }
        acc
    }

    pub fn exp(self) -> Dd {
        if self.hi > 709.78 {
            return Dd::new(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Dd::ZERO;
        }
        let k = (self.hi / Dd::LN2.hi).round();
        let r = self - Dd::LN2.mul_f64(k);
        // r/8 keeps the Taylor series short; each squaring doubles the relative error.
        let r = r.ldexp(-3);
        let mut term = r;
        let mut sum = Dd::ONE + r;
        let mut n = 2.0;
        loop {
            term = term * r / Dd::new(n);
            sum = sum + term;
            if term.hi.abs() < 1e-34 {
                break;
            }
            n += 1.0;
        }
        for _ in 0..3 {
            sum = sum.sqr();
        }
        sum.ldexp(k as i32)
    }

    pub fn ln(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::new(f64::NAN);
        }
        let y = Dd::new(self.hi.ln());
        // One Newton step on exp(y) = x doubles the number of correct digits.
        y + self * (-y).exp() - Dd::ONE
    }

    /// sin(x) for moderate |x| (argument reduced by multiples of pi).
    pub fn sin(self) -> Dd {
        let n = (self.hi / Dd::PI.hi).round();
        let r = self - Dd::PI.mul_f64(n);
        let r2 = r.sqr();
        let mut term = r;
        let mut sum = r;
        let mut k = 1.0;
        loop {
            term = -(term * r2) / Dd::new((k + 1.0) * (k + 2.0));
            sum = sum + term;
            if term.hi.abs() < 1e-34 * sum.hi.abs().max(1e-300) {
                break;
            }
            k += 2.0;
        }
        if (n as i64) % 2 != 0 {
            -sum
        } else {
            sum
        }
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd::new(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * b.lo + self.lo * b.hi));
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

/// Complex double-double, enough for the series accumulation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub const ZERO: CDd = CDd { re: Dd::ZERO, im: Dd::ZERO };

    pub fn from_c64(z: num_complex::Complex64) -> CDd {
        CDd { re: Dd::new(z.re), im: Dd::new(z.im) }
    }

    pub fn to_c64(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn norm_f64(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }

    pub fn scale(self, s: Dd) -> CDd {
        CDd { re: self.re * s, im: self.im * s }
    }
}

impl Add for CDd {
    type Output = CDd;
    fn add(self, b: CDd) -> CDd {
        CDd { re: self.re + b.re, im: self.im + b.im }
    }
}

impl Mul for CDd {
    type Output = CDd;
    fn mul(self, b: CDd) -> CDd {
        CDd { re: self.re * b.re - self.im * b.im, im: self.re * b.im + self.im * b.re }
    }
}

// B_{2k} / (2k (2k-1)) as exact numerator/denominator pairs, k = 1..15.
const STIRLING: [(f64, f64); 15] = [
    (1.0, 12.0),
    (-1.0, 360.0),
    (1.0, 1260.0),
    (-1.0, 1680.0),
    (1.0, 1188.0),
    (-691.0, 360360.0),
    (1.0, 156.0),
    (-3617.0, 122400.0),
    (43867.0, 244188.0),
    (-174611.0, 125400.0),
    (77683.0, 5796.0),
    (-236364091.0, 1506960.0),
    (657931.0, 300.0),
    (-3392780147.0, 93960.0),
    (1723168255201.0, 2492028.0),
];

fn half_ln_two_pi() -> Dd {
    static V: OnceLock<Dd> = OnceLock::new();
    *V.get_or_init(|| (Dd::PI.mul_f64(2.0)).ln().mul_f64(0.5))
}

fn stirling_coeffs() -> &'static [Dd; 15] {
    static V: OnceLock<[Dd; 15]> = OnceLock::new();
    V.get_or_init(|| {
        let mut out = [Dd::ZERO; 15];
        for (o, &(n, d)) in out.iter_mut().zip(STIRLING.iter()) {
            *o = Dd::new(n) / Dd::new(d);
        }
        out
    })
}

/// ln|Γ(x)| and the sign of Γ(x). Returns `None` at the poles x ∈ −ℕ₀.
pub fn ln_gamma_signed(x: Dd) -> Option<(Dd, f64)> {
    let xf = x.to_f64();
    if xf <= 0.0 {
        if xf == xf.floor() {
            return None;
        }
        // Γ(x) = π / (sin(πx) Γ(1−x))
        let s = (Dd::PI * x).sin();
        let (lg, _) = ln_gamma_signed(Dd::ONE - x)?;
        let sign = if s.hi < 0.0 { -1.0 } else { 1.0 };
        return Some((Dd::PI.ln() - s.abs().ln() - lg, sign));
    }
    const SHIFT: f64 = 25.0;
    let mut y = x;
    let mut prod = Dd::ONE;
    let mut shifted = false;
    while y.hi < SHIFT {
        prod = prod * y;
        y = y + Dd::ONE;
        shifted = true;
    }
    let inv = Dd::ONE / y;
    let inv2 = inv.sqr();
    let mut series = Dd::ZERO;
    let mut p = inv;
    for c in stirling_coeffs().iter() {
        series = series + *c * p;
        p = p * inv2;
    }
    let mut lg = (y - Dd::new(0.5)) * y.ln() - y + half_ln_two_pi() + series;
    if shifted {
        lg = lg - prod.ln();
    }
    Some((lg, 1.0))
}

/// 1/Γ(x) in double-double; exactly zero at the poles.
pub fn rgamma_dd(x: Dd) -> Dd {
    match ln_gamma_signed(x) {
        None => Dd::ZERO,
        Some((lg, sign)) => (-lg).exp().mul_f64(sign),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_ln_roundtrip() {
        for &x in &[0.1, 1.0, 2.5, 37.0, -20.0, 300.0] {
            let v = Dd::new(x).exp().ln();
            assert!((v - Dd::new(x)).to_f64().abs() <= 1e-30 * x.abs().max(1.0), "x={x}");
        }
        let e = Dd::ONE.exp();
        assert_eq!(e.hi, std::f64::consts::E);
        assert!((e.lo - 1.445646891729250158e-16).abs() < 1e-31);
    }

    #[test]
    fn ln_gamma_at_integers_and_halves() {
        // ln Γ(n) = ln (n−1)!
        let mut fact = Dd::ONE;
        for n in 1..40u32 {
            let (lg, s) = ln_gamma_signed(Dd::new(n as f64)).unwrap();
            assert_eq!(s, 1.0);
            assert!((lg - fact.ln()).to_f64().abs() < 1e-29 * (1.0 + lg.hi.abs()), "n={n}");
            fact = fact.mul_f64(n as f64);
        }
        let (lg, _) = ln_gamma_signed(Dd::new(0.5)).unwrap();
        let want = Dd::PI.ln().mul_f64(0.5);
        let err = (lg - want).to_f64().abs();
        assert!(err < 1e-29, "{err:e}");
    }

    #[test]
    fn reflection_signs() {
        // Γ(−0.5) = −2√π
        let r = rgamma_dd(Dd::new(-0.5)).to_f64();
        assert!((r + 1.0 / (2.0 * std::f64::consts::PI.sqrt())).abs() < 1e-15);
        // Γ(−1.5) = 4√π/3
        let r = rgamma_dd(Dd::new(-1.5)).to_f64();
        assert!((r - 3.0 / (4.0 * std::f64::consts::PI.sqrt())).abs() < 1e-15);
        assert_eq!(rgamma_dd(Dd::new(-3.0)).to_f64(), 0.0);
        assert_eq!(rgamma_dd(Dd::new(0.0)).to_f64(), 0.0);
    }

    #[test]
    fn sin_matches_double() {
        for &x in &[0.3, 1.0, 2.0, -2.7, 10.0] {
            assert!((Dd::new(x).sin().to_f64() - x.sin()).abs() < 2e-16);
        }
    }
}
