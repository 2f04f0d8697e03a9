use std::f64::consts::PI;
use std::sync::OnceLock;

use super::pencil::PencilProblem;
use crate::{Error, Result, C64};

/// ln 1e-16: damping target at the truncation radius.
const LN_DAMP_TARGET: f64 = -36.841361487904734;
/// Largest phase change of the integrand allowed on one panel.
const PANEL_PHASE_BUDGET: f64 = 10.0;

/// Gauss-Legendre nodes and weights on [−1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn cached_gl(n: usize) -> (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<std::sync::Mutex<std::collections::HashMap<usize, (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let c = CACHE.get_or_init(Default::default);
    c.lock().expect("gl cache").entry(n).or_insert_with(|| gauss_legendre(n)).clone()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Segment {
    /// λ = s·e^{−iψ}, s decreasing (incoming ray).
    RayIn,
    /// λ = r·e^{it}.
    Arc,
    /// λ = s·e^{iψ}, s increasing.
    RayOut,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Panel {
    pub segment: Segment,
    pub lo: f64,
    pub hi: f64,
}

/// Upward-oriented boundary of {|arg λ| < ψ, |λ| > r}: incoming ray at −ψ, arc |λ| = r, outgoing ray at ψ.
#[derive(Clone, Debug)]
pub struct ContourQuadrature {
    pub nodes: Vec<C64>,
    /// dλ weights (orientation included); integrals are (1/2πi) Σ w_k f(λ_k).
    pub weights: Vec<C64>,
    pub truncation_radius: f64,
    pub epsilon_floor: f64,
    pub points_per_segment: usize,
    pub b: f64,
    pub psi: f64,
    pub r: f64,
    pub panels: Vec<Panel>,
}

/// Admissible interval (1, (πζ/2)/(π − πζ/2 − θ)) for b.
pub fn b_interval(zeta: f64, theta: f64) -> Result<(f64, f64)> {
    let denom = PI - PI * zeta / 2.0 - theta;
    if !(denom > 0.0) {
        return Err(Error::EmptyInterval(format!("pi - pi*zeta/2 - theta = {denom} is not positive")));
    }
    let hi = (PI * zeta / 2.0) / denom;
    if !(hi > 1.0) {
        return Err(Error::EmptyInterval(format!("upper end {hi} does not exceed 1")));
    }
    Ok((1.0, hi))
}

/// ln |e^{−ε(a−λ)^{b/ζ}}|.
pub fn ln_damping(eps: f64, a: f64, b: f64, zeta: f64, lambda: C64) -> f64 {
    let w = C64::new(a, 0.0) - lambda;
    let e = b / zeta;
    -eps * w.norm().powf(e) * (e * w.arg()).cos()
}

pub fn damping(eps: f64, a: f64, b: f64, zeta: f64, lambda: C64) -> C64 {
    let w = C64::new(a, 0.0) - lambda;
    let e = b / zeta;
    (-eps * C64::from_polar(w.norm().powf(e), e * w.arg())).exp()
}

impl ContourQuadrature {
    /// Same panels with a different number of Gauss points per panel.
    pub fn with_points(&self, points_per_segment: usize) -> ContourQuadrature {
        let (gx, gw) = cached_gl(points_per_segment);
        let mut nodes = Vec::with_capacity(self.panels.len() * points_per_segment);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for p in &self.panels {
            let (mid, half) = ((p.lo + p.hi) / 2.0, (p.hi - p.lo) / 2.0);
            for (x, w) in gx.iter().zip(&gw) {
                let s = mid + half * x;
                let (lam, dl) = match p.segment {
                    Segment::RayIn => {
                        // lo > hi here, so the negative half-length carries the inward orientation.
                        let d = C64::from_polar(1.0, -self.psi);
                        (d * s, d)
                    }
                    Segment::Arc => {
                        let l = C64::from_polar(self.r, s);
                        (l, C64::new(0.0, 1.0) * l)
                    }
                    Segment::RayOut => {
                        let d = C64::from_polar(1.0, self.psi);
                        (d * s, d)
                    }
                };
                nodes.push(lam);
                weights.push(dl * (w * half));
            }
        }
        ContourQuadrature { nodes, weights, points_per_segment, ..self.clone() }
    }

    /// (1/2πi) Σ w_k f(λ_k).
    pub fn integrate(&self, f: impl Fn(C64) -> C64) -> C64 {
        let s: C64 = self.nodes.iter().zip(&self.weights).map(|(l, w)| w * f(*l)).sum();
        s / C64::new(0.0, 2.0 * PI)
    }
}

/// Gauss-Legendre panels on Γ. b is the midpoint of its admissible interval; the truncation
/// radius makes the damping factor ≤ 1e-16·(1+R)^{−(2q_n+2)} at ε = epsilon_floor; ray panels
/// grow geometrically from |λ| = r with a ratio capped so no panel carries more than a fixed
/// phase change of the damped integrand.
pub fn build_contour(p: &PencilProblem, points_per_segment: usize, epsilon_floor: f64) -> Result<ContourQuadrature> {
    if points_per_segment < 16 {
        return Err(Error::DomainError(format!("points_per_segment must be at least 16, got {points_per_segment}")));
    }
    if !(epsilon_floor > 0.0) {
        return Err(Error::DomainError("epsilon_floor must be positive".into()));
    }
    let (lo, hi) = b_interval(p.zeta, p.theta)?;
    let b = (lo + hi) / 2.0;
    let psi = p.psi();
    let zeta = p.zeta;
    let margin = (2 * p.q_n() + 2) as f64;
    let ok = |s: f64| ln_damping(epsilon_floor, p.a, b, zeta, C64::from_polar(s, psi)) + margin * (1.0 + s).ln() <= LN_DAMP_TARGET;
    let mut upper = (2.0 * p.a).max(2.0 * p.r);
    while !ok(upper) {
        upper *= 2.0;
        if upper > 1e300 {
            return Err(Error::DomainError("no truncation radius reaches the damping target".into()));
        }
    }
    let mut lower = p.r;
    for _ in 0..200 {
        let mid = 0.5 * (lower + upper);
        if ok(mid) {
            upper = mid;
        } else {
            lower = mid;
        }
    }
    let radius = upper.max(p.r * 1.5);

    // Phase per unit log-radius of the damping factor near its cut-off and of E_ζ on the rays.
    let chi = b * (PI - psi) / zeta;
    let e_rate = ((psi / zeta).tan().abs() / zeta).min(1e6);
    let rate = (-LN_DAMP_TARGET) * (chi.tan().abs() * b / zeta).max(e_rate).max(1.0);
    let step = (PANEL_PHASE_BUDGET / rate).min(0.5);
    let mut ends = vec![p.r];
    while *ends.last().expect("nonempty") < radius {
        let s = *ends.last().expect("nonempty");
        ends.push((s * (1.0 + step)).min(radius));
    }
    let mut panels = Vec::new();
    for w in ends.windows(2).rev() {
        panels.push(Panel { segment: Segment::RayIn, lo: w[1], hi: w[0] });
    }
    let n_arc = ((2.0 * psi) / (PI / 8.0)).ceil().max(2.0) as usize;
    for k in 0..n_arc {
        let t0 = -psi + 2.0 * psi * k as f64 / n_arc as f64;
        let t1 = -psi + 2.0 * psi * (k + 1) as f64 / n_arc as f64;
        panels.push(Panel { segment: Segment::Arc, lo: t0, hi: t1 });
    }
    for w in ends.windows(2) {
        panels.push(Panel { segment: Segment::RayOut, lo: w[0], hi: w[1] });
    }
    let base = ContourQuadrature {
        nodes: Vec::new(),
        weights: Vec::new(),
        truncation_radius: radius,
        epsilon_floor,
        points_per_segment,
        b,
        psi,
        r: p.r,
        panels,
    };
    Ok(base.with_points(points_per_segment))
}
