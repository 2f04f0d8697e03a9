use std::f64::consts::PI;

use serde::Serialize;

use super::contour::{damping, ContourQuadrature};
use super::pencil::PencilProblem;
use crate::special_functions::{principal_pow, CMatrix, MittagLeffler};
use crate::{try_par_map, Error, Result, C64};

/// Largest relative change tolerated when the Gauss points per panel double.
pub const DOUBLING_TOLERANCE: f64 = 1e-8;

/// Initial data: x_w for w = 0..q_n−1, and y_w (same shape) exactly when ζ ∈ (1, 2].
#[derive(Clone, Debug)]
pub struct ContourData {
    pub x: Vec<Vec<C64>>,
    pub y: Option<Vec<Vec<C64>>>,
}

impl ContourData {
    pub fn new(x: Vec<Vec<C64>>, y: Option<Vec<Vec<C64>>>) -> Self {
        ContourData { x, y }
    }

    /// Euclidean norm over every entry of x and y.
    pub fn norm(&self) -> f64 {
        let sq = |v: &Vec<Vec<C64>>| v.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>();
        (sq(&self.x) + self.y.as_ref().map(sq).unwrap_or(0.0)).sqrt()
    }

    fn check(&self, p: &PencilProblem) -> Result<()> {
        let (qn, m) = (p.q_n() as usize, p.m());
        let shape_ok = |v: &Vec<Vec<C64>>| v.len() == qn && v.iter().all(|x| x.len() == m);
        if !shape_ok(&self.x) {
            return Err(Error::BadParams(format!("need {qn} vectors x_w of length {m}")));
        }
        match (&self.y, p.zeta > 1.0) {
            (Some(y), true) if shape_ok(y) => Ok(()),
            (Some(_), true) => Err(Error::BadParams(format!("need {qn} vectors y_w of length {m}"))),
            (None, true) => Err(Error::BadParams("y_w data is required when zeta > 1".into())),
            (Some(_), false) => Err(Error::BadParams("y_w data only applies when zeta > 1".into())),
            (None, false) => Ok(()),
        }
    }
}

/// Per-node quantities that do not depend on ε, z or the derivative index.
struct NodeSet {
    lambda: Vec<C64>,
    weight: Vec<C64>,
    mu: Vec<C64>,
    /// vx[k][w] = Σ_{j∈S_w} μ^{q_j−1−w} Q(μ)^{−1} C A_j x_w at node k.
    vx: Vec<Vec<Vec<C64>>>,
    vy: Vec<Vec<Vec<C64>>>,
}

fn data_vectors(p: &PencilProblem, mu: C64, data: &[Vec<C64>]) -> Result<Vec<Vec<C64>>> {
    let m = p.m();
    let qn = data.len();
    let mut rhs = CMatrix::zeros(m, qn);
    for (w, xw) in data.iter().enumerate() {
        let x = nalgebra::DVector::from_column_slice(xw);
        for j in p.s_set(w as u32) {
            let col = (&p.c * &p.ops[j] * &x) * mu.powi(p.q[j] as i32 - 1 - w as i32);
            for i in 0..m {
                rhs[(i, w)] += col[i];
            }
        }
    }
    let sol = p.solve(mu, &rhs)?;
    Ok((0..qn).map(|w| sol.column(w).iter().copied().collect()).collect())
}

impl NodeSet {
    fn new(p: &PencilProblem, quad: &ContourQuadrature, data: &ContourData) -> Result<Self> {
        let per_node = try_par_map(quad.nodes.len(), |k| {
            let mu = p.mu(quad.nodes[k]);
            let vx = data_vectors(p, mu, &data.x)?;
            let vy = match &data.y {
                Some(y) => data_vectors(p, mu, y)?,
                None => Vec::new(),
            };
            Ok((mu, vx, vy))
        })?;
        let mut set = NodeSet {
            lambda: quad.nodes.clone(),
            weight: quad.weights.clone(),
            mu: Vec::with_capacity(per_node.len()),
            vx: Vec::with_capacity(per_node.len()),
            vy: Vec::with_capacity(per_node.len()),
        };
        for (mu, vx, vy) in per_node {
            set.mu.push(mu);
            set.vx.push(vx);
            set.vy.push(vy);
        }
        Ok(set)
    }
}

/// Quadrature evaluator for u_ε and its iterated-Caputo traces, holding the base rule and its
/// node-doubled refinement so every value comes with a self-convergence check.
pub struct ContourEvaluator<'a> {
    pub problem: &'a PencilProblem,
    pub quad: &'a ContourQuadrature,
    base: NodeSet,
    fine: NodeSet,
    e1: MittagLeffler,
    e2: Option<MittagLeffler>,
    data_norm: f64,
    /// Largest relative doubling shift seen so far.
    max_shift: std::sync::Mutex<f64>,
}

impl<'a> ContourEvaluator<'a> {
    pub fn new(p: &'a PencilProblem, quad: &'a ContourQuadrature, data: &ContourData) -> Result<Self> {
        data.check(p)?;
        let fine_quad = quad.with_points(2 * quad.points_per_segment);
        let e2 = if p.zeta > 1.0 { Some(MittagLeffler::with(p.zeta, 2.0)?) } else { None };
        Ok(ContourEvaluator {
            problem: p,
            quad,
            base: NodeSet::new(p, quad, data)?,
            fine: NodeSet::new(p, &fine_quad, data)?,
            e1: MittagLeffler::with(p.zeta, 1.0)?,
            e2,
            data_norm: data.norm() * p.c.norm(),
            max_shift: std::sync::Mutex::new(0.0),
        })
    }

    fn check_z(&self, eps: f64, z: C64) -> Result<()> {
        if !(eps >= self.quad.epsilon_floor) {
            return Err(Error::DomainError(format!("epsilon {eps} is below the contour floor {}", self.quad.epsilon_floor)));
        }
        let integer = self.problem.zeta == self.problem.zeta.round();
        if !integer && z.im == 0.0 && z.re < 0.0 {
            return Err(Error::BranchCut(format!("z = {z} lies on the negative real axis")));
        }
        Ok(())
    }

    /// Σ over nodes for every derivative index in `derivs`; `omega` restricts to one w-summand.
    fn sum(&self, nodes: &NodeSet, eps: f64, z: C64, derivs: &[u32], omega: Option<usize>) -> Result<Vec<Vec<C64>>> {
        let p = self.problem;
        let m = p.m();
        let zz = principal_pow(z, p.zeta);
        let zero = z == C64::new(0.0, 0.0);
        let ws: Vec<usize> = match omega {
            Some(w) => vec![w],
            None => (0..p.q_n() as usize).collect(),
        };
        let chunk = 64;
        let n = nodes.lambda.len();
        let partials = try_par_map(n.div_ceil(chunk), |c| {
            let mut acc = vec![vec![C64::new(0.0, 0.0); m]; derivs.len()];
            for k in c * chunk..((c + 1) * chunk).min(n) {
                let mu = nodes.mu[k];
                let base = nodes.weight[k] * damping(eps, p.a, self.quad.b, p.zeta, nodes.lambda[k]);
                if base == C64::new(0.0, 0.0) {
                    continue;
                }
                let ex = if zero { C64::new(1.0, 0.0) } else { self.e1.eval(zz * mu)? };
                let fy = match &self.e2 {
                    Some(e2) if !zero => z * e2.eval(zz * mu)?,
                    _ => C64::new(0.0, 0.0),
                };
                for (d, &dp) in derivs.iter().enumerate() {
                    let f = base * mu.powi(dp as i32);
                    for &w in &ws {
                        for i in 0..m {
                            let mut v = ex * nodes.vx[k][w][i];
                            if let Some(y) = nodes.vy.get(k).and_then(|v| v.get(w)) {
                                v += fy * y[i];
                            }
                            acc[d][i] += f * v;
                        }
                    }
                }
            }
            Ok(acc)
        })?;
        let scale = C64::new(0.0, 2.0 * PI);
        let mut out = vec![vec![C64::new(0.0, 0.0); m]; derivs.len()];
        for part in partials {
            for (o, pd) in out.iter_mut().zip(part) {
                for (oi, v) in o.iter_mut().zip(pd) {
                    *oi += v;
                }
            }
        }
        for o in out.iter_mut() {
            for v in o.iter_mut() {
                *v /= scale;
            }
        }
        Ok(out)
    }

    fn checked(&self, eps: f64, z: C64, derivs: &[u32], omega: Option<usize>) -> Result<Vec<Vec<C64>>> {
        self.check_z(eps, z)?;
        if let Some(w) = omega {
            if w >= self.problem.q_n() as usize {
                return Err(Error::BadParams(format!("omega {w} must be below q_n = {}", self.problem.q_n())));
            }
        }
        let coarse = self.sum(&self.base, eps, z, derivs, omega)?;
        let fine = self.sum(&self.fine, eps, z, derivs, omega)?;
        for (c, f) in coarse.iter().zip(&fine) {
            let diff = c.iter().zip(f).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            let size = f.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let floor = 1e-6 * self.data_norm;
            if diff == 0.0 {
                continue;
            }
            let shift = diff / size.max(floor).max(f64::MIN_POSITIVE);
            {
                let mut g = self.max_shift.lock().expect("shift lock");
                *g = g.max(shift);
            }
            if shift > DOUBLING_TOLERANCE {
                return Err(Error::QuadratureUnderResolved { shift });
            }
        }
        Ok(fine)
    }

    pub fn max_shift(&self) -> f64 {
        *self.max_shift.lock().expect("shift lock")
    }

    /// (D^ζ)^p u_ε(z).
    pub fn eval(&self, eps: f64, z: C64, deriv_p: u32) -> Result<Vec<C64>> {
        Ok(self.checked(eps, z, &[deriv_p], None)?.remove(0))
    }

    /// Several derivative traces sharing one pass of Mittag-Leffler evaluations.
    pub fn eval_many(&self, eps: f64, z: C64, derivs: &[u32]) -> Result<Vec<Vec<C64>>> {
        self.checked(eps, z, derivs, None)
    }

    /// The w = ω summand alone.
    pub fn eval_summand(&self, eps: f64, z: C64, deriv_p: u32, omega: usize) -> Result<Vec<C64>> {
        Ok(self.checked(eps, z, &[deriv_p], Some(omega))?.remove(0))
    }
}

/// Quadrature value of u_ε (or its p-th iterated Caputo trace) at z.
pub fn u_epsilon(
    p: &PencilProblem,
    quad: &ContourQuadrature,
    data: &ContourData,
    epsilon: f64,
    z: C64,
    deriv_p: u32,
) -> Result<Vec<C64>> {
    ContourEvaluator::new(p, quad, data)?.eval(epsilon, z, deriv_p)
}

#[derive(Clone, Debug, Serialize)]
pub struct PdeReport {
    pub epsilon: f64,
    pub times: Vec<f64>,
    /// max_k ‖Σ_i A_i (D^ζ)^{q_i} u_ε(t_k)‖.
    pub max_residual: f64,
    pub data_norm: f64,
    pub relative_residual: f64,
    pub max_doubling_shift: f64,
}

/// Assembles Σ_i A_i (D^ζ)^{q_i} u_ε(t) on the time grid.
pub fn verify_pde(
    p: &PencilProblem,
    quad: &ContourQuadrature,
    data: &ContourData,
    epsilon: f64,
    times: &[f64],
) -> Result<PdeReport> {
    let ev = ContourEvaluator::new(p, quad, data)?;
    let mut worst = 0.0f64;
    for &t in times {
        let traces = ev.eval_many(epsilon, C64::new(t, 0.0), &p.q)?;
        let mut res = nalgebra::DVector::<C64>::zeros(p.m());
        for (op, tr) in p.ops.iter().zip(&traces) {
            res += op * nalgebra::DVector::from_column_slice(tr);
        }
        worst = worst.max(res.norm());
    }
    let data_norm = data.norm();
    Ok(PdeReport {
        epsilon,
        times: times.to_vec(),
        max_residual: worst,
        data_norm,
        relative_residual: if data_norm > 0.0 { worst / data_norm } else { worst },
        max_doubling_shift: ev.max_shift(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitReport {
    pub l: u32,
    pub omega: usize,
    pub epsilons: Vec<f64>,
    pub deviations: Vec<f64>,
    pub monotone: bool,
    pub target: Vec<C64>,
    pub extrapolated: Vec<C64>,
    /// ‖extrapolated − target‖.
    pub limit_error: f64,
    /// ‖C x_ω‖, the natural scale of the limit.
    pub scale: f64,
}

/// Neville extrapolation of samples (ε_k, v_k) to ε = 0, componentwise.
pub fn richardson_limit(eps: &[f64], values: &[Vec<C64>]) -> Vec<C64> {
    let m = values.first().map(|v| v.len()).unwrap_or(0);
    (0..m)
        .map(|i| {
            let mut t: Vec<C64> = values.iter().map(|v| v[i]).collect();
            let n = t.len();
            for lvl in 1..n {
                for k in 0..n - lvl {
                    let (e0, e1) = (eps[k], eps[k + lvl]);
                    t[k] = (t[k + 1] * e0 - t[k] * e1) / (e0 - e1);
                }
            }
            t[0]
        })
        .collect()
}

/// t = 0 trace of the w = ω summand at derivative index l along a decreasing ε sequence,
/// compared with e^{−iφ} δ_{ωl} C x_ω.
pub fn initial_limit_check(
    p: &PencilProblem,
    quad: &ContourQuadrature,
    data: &ContourData,
    epsilons: &[f64],
    l: u32,
    omega: usize,
) -> Result<LimitReport> {
    if epsilons.len() < 2 || epsilons.windows(2).any(|w| !(w[1] < w[0])) || epsilons.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::BadParams("epsilons must be positive and strictly decreasing".into()));
    }
    let ev = ContourEvaluator::new(p, quad, data)?;
    let cx: Vec<C64> = data
        .x
        .get(omega)
        .map(|x| (&p.c * nalgebra::DVector::from_column_slice(x)).iter().copied().collect())
        .ok_or_else(|| Error::BadParams(format!("omega {omega} must be below q_n = {}", p.q_n())))?;
    let rot = C64::from_polar(1.0, -p.phi);
    let target: Vec<C64> =
        if l as usize == omega { cx.iter().map(|v| v * rot).collect() } else { vec![C64::new(0.0, 0.0); p.m()] };
    let values = epsilons
        .iter()
        .map(|&e| ev.eval_summand(e, C64::new(0.0, 0.0), l, omega))
        .collect::<Result<Vec<_>>>()?;
    let dist = |v: &[C64]| v.iter().zip(&target).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let deviations: Vec<f64> = values.iter().map(|v| dist(v)).collect();
    let monotone = deviations.windows(2).all(|w| w[1] < w[0]) || deviations.iter().all(|&d| d == 0.0);
    let extrapolated = richardson_limit(epsilons, &values);
    Ok(LimitReport {
        l,
        omega,
        epsilons: epsilons.to_vec(),
        limit_error: dist(&extrapolated),
        deviations,
        monotone,
        target,
        extrapolated,
        scale: cx.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt(),
    })
}

/// Smallest c with |e^{−ε(a−λ)^{b/ζ}} E_ζ(z^ζ λe^{iφ})| ≤ c·exp(−ε|a−λ|^{b/ζ}cos(bζ^{−1}(π−πζ/2−θ)) + |z||λ|^{1/ζ})
/// over every node and every sample z.
pub fn damping_constant(p: &PencilProblem, quad: &ContourQuadrature, eps: f64, zs: &[C64]) -> Result<f64> {
    let ml = MittagLeffler::with(p.zeta, 1.0)?;
    let cosc = (quad.b / p.zeta * (PI - PI * p.zeta / 2.0 - p.theta)).cos();
    let mut worst = 0.0f64;
    for &lam in &quad.nodes {
        let mu = p.mu(lam);
        let d = damping(eps, p.a, quad.b, p.zeta, lam);
        let dist = (C64::new(p.a, 0.0) - lam).norm();
        for &z in zs {
            let e = ml.eval(principal_pow(z, p.zeta) * mu)?;
            let ln_bound = -eps * dist.powf(quad.b / p.zeta) * cosc + z.norm() * lam.norm().powf(1.0 / p.zeta);
            let val = (d * e).norm();
            if val > 0.0 {
                worst = worst.max((val.ln() - ln_bound).exp());
            }
        }
    }
    Ok(worst)
}
