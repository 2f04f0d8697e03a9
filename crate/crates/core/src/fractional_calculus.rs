//! Riemann-Liouville kernels, fractional integrals and Caputo derivatives on uniform grids.

use crate::special_functions::{gamma, reciprocal_gamma};
use crate::{Error, Result, C64};

/// Uniform samples u(t_k), t_k = k·dt, of a vector-valued function.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<Vec<C64>>,
    pub dim: usize,
    /// Nodes whose value is a finite stand-in for an integrable singularity.
    pub flagged: Vec<usize>,
}

impl Trajectory {
    pub fn new(dt: f64, values: Vec<Vec<C64>>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::DomainError(format!("dt must be positive, got {dt}")));
        }
        if values.len() < 2 {
            return Err(Error::DomainError("a trajectory needs at least 2 samples".into()));
        }
        let dim = values[0].len();
        if dim == 0 || values.iter().any(|v| v.len() != dim) {
            return Err(Error::DomainError("all samples must share a nonzero dimension".into()));
        }
        Ok(Trajectory { t0: 0.0, dt, values, dim, flagged: Vec::new() })
    }

    pub fn scalar(dt: f64, values: Vec<C64>) -> Result<Self> {
        Self::new(dt, values.into_iter().map(|v| vec![v]).collect())
    }

    /// Samples f(t_k) for k = 0..=steps.
    pub fn sample(dt: f64, steps: usize, f: impl Fn(f64) -> Vec<C64>) -> Result<Self> {
        Self::new(dt, (0..=steps).map(|k| f(k as f64 * dt)).collect())
    }

    pub fn sample_scalar(dt: f64, steps: usize, f: impl Fn(f64) -> C64) -> Result<Self> {
        Self::sample(dt, steps, |t| vec![f(t)])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn component(&self, c: usize) -> Vec<C64> {
        self.values.iter().map(|v| v[c]).collect()
    }

    fn with_values(&self, values: Vec<Vec<C64>>) -> Trajectory {
        Trajectory { t0: self.t0, dt: self.dt, dim: self.dim, values, flagged: Vec::new() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FracOrder {
    pub zeta: f64,
    pub ceil: usize,
}

impl FracOrder {
    pub fn new(zeta: f64) -> Result<Self> {
        if !(zeta > 0.0 && zeta.is_finite()) {
            return Err(Error::DomainError(format!("fractional order must be positive, got {zeta}")));
        }
        Ok(FracOrder { zeta, ceil: zeta.ceil() as usize })
    }

    pub fn is_integer(&self) -> bool {
        self.zeta == self.ceil as f64
    }
}

/// g_ζ(t) = t^{ζ−1}/Γ(ζ).
pub fn g_kernel(zeta: f64, t: f64) -> Result<f64> {
    if zeta == 0.0 {
        return Err(Error::DomainError("g_0 is the Dirac mass, not a function".into()));
    }
    if !(zeta > 0.0) || !(t > 0.0) {
        return Err(Error::DomainError(format!("g_kernel needs zeta > 0 and t > 0 (zeta={zeta}, t={t})")));
    }
    Ok(t.powf(zeta - 1.0) * reciprocal_gamma(zeta))
}

/// (g_α ∗ u)(t_k) by product integration, exact for piecewise-linear u.
pub fn frac_integral(alpha: f64, u: &Trajectory) -> Result<Trajectory> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::DomainError(format!("alpha must be positive, got {alpha}")));
    }
    let n = u.len();
    let a1 = alpha + 1.0;
    let pw: Vec<f64> = (0..=n).map(|m| (m as f64).powf(a1)).collect();
    // Interior weights depend only on k − j.
    let mid: Vec<f64> = (0..n).map(|m| if m == 0 { 0.0 } else { pw[m + 1] - 2.0 * pw[m] + pw[m - 1] }).collect();
    let scale = u.dt.powf(alpha) / gamma(alpha + 2.0);
    let mut out = vec![vec![C64::new(0.0, 0.0); u.dim]; n];
    for k in 1..n {
        let kf = k as f64;
        let w0 = pw[k - 1] - (kf - alpha - 1.0) * kf.powf(alpha);
        let row = &mut out[k];
        for c in 0..u.dim {
            let mut acc = u.values[0][c] * w0 + u.values[k][c];
            for j in 1..k {
                acc += u.values[j][c] * mid[k - j];
            }
            row[c] = acc * scale;
        }
    }
    Ok(u.with_values(out))
}

/// L1 weights b_i = (i+1)^{1−ζ} − i^{1−ζ}.
fn l1_weights(zeta: f64, n: usize) -> Vec<f64> {
    let e = 1.0 - zeta;
    (0..n).map(|i| ((i + 1) as f64).powf(e) - (i as f64).powf(e)).collect()
}

/// L1 Caputo derivative of order ζ ∈ (0, 1) of nodal samples v (v[0] is the value at 0).
fn l1_apply(zeta: f64, dt: f64, v: &[Vec<C64>], dim: usize) -> Vec<Vec<C64>> {
    let n = v.len();
    let b = l1_weights(zeta, n);
    let scale = dt.powf(-zeta) * reciprocal_gamma(2.0 - zeta);
    let diffs: Vec<Vec<C64>> = (0..n - 1).map(|j| (0..dim).map(|c| v[j + 1][c] - v[j][c]).collect()).collect();
    let mut out = vec![vec![C64::new(0.0, 0.0); dim]; n];
    for k in 1..n {
        for c in 0..dim {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..k {
                acc += diffs[j][c] * b[k - 1 - j];
            }
            out[k][c] = acc * scale;
        }
    }
    out
}

/// First derivative by 5-point stencils (one-sided near the ends); exact on quartics.
fn derivative_5pt(v: &[Vec<C64>], dt: f64, dim: usize) -> Vec<Vec<C64>> {
    let n = v.len();
    if n < 5 {
        return derivative_3pt(v, dt, dim, None);
    }
    const ST: [[f64; 5]; 5] = [
        [-25.0, 48.0, -36.0, 16.0, -3.0],
        [-3.0, -10.0, 18.0, -6.0, 1.0],
        [1.0, -8.0, 0.0, 8.0, -1.0],
        [-1.0, 6.0, -18.0, 10.0, 3.0],
        [3.0, -16.0, 36.0, -48.0, 25.0],
    ];
    let mut out = vec![vec![C64::new(0.0, 0.0); dim]; n];
    for (k, row) in out.iter_mut().enumerate() {
        let (start, st) = match k {
            0 => (0, &ST[0]),
            1 => (0, &ST[1]),
            _ if k + 2 < n => (k - 2, &ST[2]),
            _ if k + 2 == n => (n - 5, &ST[3]),
            _ => (n - 5, &ST[4]),
        };
        for c in 0..dim {
            let mut acc = C64::new(0.0, 0.0);
            for (i, w) in st.iter().enumerate() {
                acc += v[start + i][c] * *w;
            }
            row[c] = acc / (12.0 * dt);
        }
    }
    out
}

/// Fourth-order second derivative: 5-point central inside, 6-point one-sided at the ends.
fn second_derivative_6pt(v: &[Vec<C64>], dt: f64, dim: usize) -> Vec<Vec<C64>> {
    let n = v.len();
    if n < 6 {
        return derivative_5pt(&derivative_5pt(v, dt, dim), dt, dim);
    }
    const EDGE: [[f64; 6]; 2] = [[45.0, -154.0, 214.0, -156.0, 61.0, -10.0], [10.0, -15.0, -4.0, 14.0, -6.0, 1.0]];
    const MID: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];
    let h2 = 12.0 * dt * dt;
    let mut out = vec![vec![C64::new(0.0, 0.0); dim]; n];
    for (k, row) in out.iter_mut().enumerate() {
        for c in 0..dim {
            let acc: C64 = match k {
                0 | 1 => EDGE[k].iter().enumerate().map(|(i, w)| v[i][c] * *w).sum(),
                _ if k + 2 >= n => EDGE[n - 1 - k].iter().enumerate().map(|(i, w)| v[n - 1 - i][c] * *w).sum(),
                _ => MID.iter().enumerate().map(|(i, w)| v[k - 2 + i][c] * *w).sum(),
            };
            row[c] = acc / h2;
        }
    }
    out
}

/// Central differences inside, second-order one-sided at the ends; node 0 may be pinned.
fn derivative_3pt(v: &[Vec<C64>], dt: f64, dim: usize, at_zero: Option<&[C64]>) -> Vec<Vec<C64>> {
    let n = v.len();
    let mut out = vec![vec![C64::new(0.0, 0.0); dim]; n];
    for c in 0..dim {
        for k in 0..n {
            out[k][c] = if n == 2 {
                (v[1][c] - v[0][c]) / dt
            } else if k == 0 {
                (-3.0 * v[0][c] + 4.0 * v[1][c] - v[2][c]) / (2.0 * dt)
            } else if k == n - 1 {
                (3.0 * v[k][c] - 4.0 * v[k - 1][c] + v[k - 2][c]) / (2.0 * dt)
            } else {
                (v[k + 1][c] - v[k - 1][c]) / (2.0 * dt)
            };
        }
        if let Some(d0) = at_zero {
            out[0][c] = d0[c];
        }
    }
    out
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Local power p in u(t) − T(t) ~ t^p from the first two steps, where T is the
/// Taylor polynomial built from the supplied initial derivatives.
fn leading_exponent(u: &Trajectory, initial_derivs: &[Vec<C64>]) -> Option<f64> {
    if u.len() < 3 {
        return None;
    }
    let rem = |k: usize| -> Vec<C64> {
        let t = u.time(k);
        (0..u.dim)
            .map(|c| {
                let mut v = u.values[k][c];
                let mut fact = 1.0;
                for (j, d) in initial_derivs.iter().enumerate() {
                    if j > 0 {
                        fact *= j as f64;
                    }
                    v -= d[c] * (t.powi(j as i32) / fact);
                }
                v
            })
            .collect()
    };
    let (n1, n2) = (vec_norm(&rem(1)), vec_norm(&rem(2)));
    let scale = u.values.iter().map(|v| vec_norm(v)).fold(0.0, f64::max);
    if n1 <= 1e-13 * scale || n2 <= 1e-13 * scale {
        return None;
    }
    Some((n2 / n1).log2())
}

/// Caputo derivative D^ζ u at every node; `initial_derivs[j]` is u^{(j)}(0), j < ⌈ζ⌉.
pub fn caputo(order: FracOrder, u: &Trajectory, initial_derivs: &[Vec<C64>]) -> Result<Trajectory> {
    if initial_derivs.len() < order.ceil {
        return Err(Error::InconsistentInitialData(format!(
            "order {} needs {} initial derivatives, got {}",
            order.zeta,
            order.ceil,
            initial_derivs.len()
        )));
    }
    if initial_derivs.iter().any(|d| d.len() != u.dim) {
        return Err(Error::InconsistentInitialData("initial derivative dimension mismatch".into()));
    }
    let u0 = &u.values[0];
    let gap: f64 = (0..u.dim).map(|c| (initial_derivs[0][c] - u0[c]).norm()).fold(0.0, f64::max);
    if gap > 1e-9 * (1.0 + vec_norm(u0)) {
        return Err(Error::InconsistentInitialData(format!("|u(0) - initial_derivs[0]| = {gap:e}")));
    }

    let values = if order.is_integer() {
        let mut v = u.values.clone();
        let mut left = order.ceil;
        while left > 0 {
            if left >= 2 {
                v = second_derivative_6pt(&v, u.dt, u.dim);
                left -= 2;
            } else {
                v = derivative_5pt(&v, u.dt, u.dim);
                left -= 1;
            }
        }
        v
    } else if order.ceil == 1 {
        l1_apply(order.zeta, u.dt, &u.values, u.dim)
    } else {
        if u.len() < 3 {
            return Err(Error::DomainError("orders above 1 need at least 3 samples".into()));
        }
        // Reduce to an L1 derivative of order ζ − (⌈ζ⌉−1) of the (⌈ζ⌉−1)-th derivative.
        let mut v = u.values.clone();
        for j in 1..order.ceil {
            v = derivative_3pt(&v, u.dt, u.dim, Some(&initial_derivs[j]));
        }
        l1_apply(order.zeta - (order.ceil - 1) as f64, u.dt, &v, u.dim)
    };
    let mut out = u.with_values(values);
    if !order.is_integer() {
        if let Some(p) = leading_exponent(u, &initial_derivs[..order.ceil]) {
            if p < order.zeta - 0.05 {
                out.flagged.push(0);
            }
        }
    }
    Ok(out)
}

/// Initial data for stages after the first of an iterated derivative.
#[derive(Clone, Debug)]
pub enum LaterStages {
    /// u(0) from the previous stage's output at node 0; for ζ > 1 the higher
    /// derivatives at 0 are estimated with a one-sided 5-point stencil.
    FromOutput,
    /// Derivatives of order ≥ 1 at 0 for stages 2..=p (value at 0 is still taken from the output).
    Explicit(Vec<Vec<Vec<C64>>>),
}

/// (D^ζ)^p u by p successive Caputo derivatives.
pub fn caputo_iterated(
    order: FracOrder,
    p: usize,
    u: &Trajectory,
    initial_derivs: &[Vec<C64>],
    later: &LaterStages,
) -> Result<Trajectory> {
    if p == 0 {
        return Err(Error::DomainError("iteration count must be at least 1".into()));
    }
    let mut cur = caputo(order, u, initial_derivs)?;
    let mut flagged = cur.flagged.clone();
    for stage in 1..p {
        let mut init = vec![cur.values[0].clone()];
        for j in 1..order.ceil {
            let d = match later {
                LaterStages::Explicit(v) => v
                    .get(stage - 1)
                    .and_then(|s| s.get(j - 1))
                    .cloned()
                    .ok_or_else(|| Error::InconsistentInitialData(format!("missing derivative {j} for stage {}", stage + 1)))?,
                LaterStages::FromOutput => {
                    let mut v = cur.values.clone();
                    for _ in 0..j {
                        v = derivative_5pt(&v, cur.dt, cur.dim);
                    }
                    v[0].clone()
                }
            };
            init.push(d);
        }
        cur = caputo(order, &cur, &init)?;
        flagged.extend(cur.flagged.iter().copied());
    }
    flagged.sort_unstable();
    flagged.dedup();
    cur.flagged = flagged;
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_functions::MittagLeffler;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(g_kernel(1.0, 2.5).unwrap(), 1.0);
        assert!((g_kernel(2.0, 3.0).unwrap() - 3.0).abs() < 1e-15);
        assert!((g_kernel(0.5, 4.0).unwrap() - 0.28209479177387814).abs() < 1e-15);
        assert!(matches!(g_kernel(0.0, 1.0), Err(Error::DomainError(_))));
    }

    #[test]
    fn integral_of_one_is_t() {
        let u = Trajectory::sample_scalar(0.1, 20, |_| c(1.0)).unwrap();
        let i = frac_integral(1.0, &u).unwrap();
        for k in 0..u.len() {
            assert!((i.values[k][0].re - u.time(k)).abs() < 1e-14);
        }
    }

    #[test]
    fn power_rule_integral() {
        let dt = 1.0 / 1024.0;
        let u = Trajectory::sample_scalar(dt, 1024, |t| c(t * t)).unwrap();
        let i = frac_integral(0.3, &u).unwrap();
        let want = 2.0 / gamma(3.3);
        assert!((i.values[1024][0].re / want - 1.0).abs() < 1e-4);
    }

    #[test]
    fn half_integral_of_kernel_is_one() {
        let dt = 1.0 / 2048.0;
        let u = Trajectory::sample_scalar(dt, 2048, |t| c(if t > 0.0 { g_kernel(0.5, t).unwrap() } else { 0.0 }))
            .unwrap();
        let i = frac_integral(0.5, &u).unwrap();
        // The sampled kernel misses the integrable spike at 0, which costs O(sqrt(dt)).
        for k in [512usize, 1024, 2048] {
            assert!((i.values[k][0].re - 1.0).abs() < 3.0 * dt.sqrt(), "{}", i.values[k][0]);
        }
    }

    #[test]
    fn caputo_constants_and_linear() {
        let o = FracOrder::new(0.5).unwrap();
        let u = Trajectory::sample_scalar(0.01, 100, |_| c(3.0)).unwrap();
        let d = caputo(o, &u, &[vec![c(3.0)]]).unwrap();
        assert!(d.values.iter().all(|v| v[0] == c(0.0)));
        let dt = 1.0 / 1024.0;
        let u = Trajectory::sample_scalar(dt, 1024, c).unwrap();
        let d = caputo(o, &u, &[vec![c(0.0)]]).unwrap();
        let want = 1.0 / gamma(1.5);
        assert!((d.values[1024][0].re / want - 1.0).abs() < 1e-3);
    }

    #[test]
    fn caputo_eigenfunction() {
        let ml = MittagLeffler::with(0.6, 1.0).unwrap();
        let dt = 1.0 / 512.0;
        let u = Trajectory::sample_scalar(dt, 512, |t| ml.eval(c(-t.powf(0.6))).unwrap()).unwrap();
        let d = caputo(FracOrder::new(0.6).unwrap(), &u, &[vec![c(1.0)]]).unwrap();
        let (got, want) = (d.values[512][0], -u.values[512][0]);
        assert!((got - want).norm() / want.norm() < 1e-2);
    }

    #[test]
    fn inconsistent_initial_value() {
        let u = Trajectory::sample_scalar(0.1, 10, |_| c(1.0)).unwrap();
        let r = caputo(FracOrder::new(0.5).unwrap(), &u, &[vec![c(2.0)]]);
        assert!(matches!(r, Err(Error::InconsistentInitialData(_))));
        let r = caputo(FracOrder::new(1.5).unwrap(), &u, &[vec![c(1.0)]]);
        assert!(matches!(r, Err(Error::InconsistentInitialData(_))));
    }

    #[test]
    fn iterated_examples() {
        let dt = 1.0 / 1024.0;
        let u = Trajectory::sample_scalar(dt, 1024, c).unwrap();
        let twice = caputo_iterated(FracOrder::new(0.6).unwrap(), 2, &u, &[vec![c(0.0)]], &LaterStages::FromOutput)
            .unwrap();
        assert_eq!(twice.flagged, vec![0]);
        let want = 1.0 / gamma(0.8);
        assert!((twice.values[1024][0].re / want - 1.0).abs() < 1e-2, "{}", twice.values[1024][0]);
        let once = caputo(FracOrder::new(1.2).unwrap(), &u, &[vec![c(0.0)], vec![c(1.0)]]).unwrap();
        assert!(once.values.iter().all(|v| v[0].norm() <= 1e-10));
        assert!(once.flagged.is_empty());

        let cube = Trajectory::sample_scalar(0.01, 200, |t| c(t * t * t)).unwrap();
        let d3 = caputo_iterated(FracOrder::new(1.0).unwrap(), 3, &cube, &[vec![c(0.0)]], &LaterStages::FromOutput)
            .unwrap();
        assert!(d3.values.iter().all(|v| (v[0].re - 6.0).abs() < 1e-6), "{:?}", &d3.values[..3]);
    }
}
