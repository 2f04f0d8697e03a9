//! Polynomial-matrix symbols P(x), rational iterates (P2⁻¹P1)^l, regularizers and cutoffs.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::special_functions::{ln_gamma, CMatrix};
use crate::{Error, Result, C64};

/// Multivariate polynomial as sorted (exponent, coefficient) terms with no zero coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Polynomial {
    n: usize,
    terms: Vec<(Vec<u32>, C64)>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial { n, terms: Vec::new() }
    }

    pub fn constant(n: usize, c: C64) -> Self {
        Self::new(n, vec![(vec![0; n], c)]).expect("well-formed constant")
    }

    pub fn new(n: usize, terms: Vec<(Vec<u32>, C64)>) -> Result<Self> {
        if let Some((eta, _)) = terms.iter().find(|(eta, _)| eta.len() != n) {
            return Err(Error::DomainError(format!("exponent {eta:?} does not have {n} components")));
        }
        let mut terms: Vec<_> = terms.into_iter().filter(|(_, c)| *c != C64::new(0.0, 0.0)).collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Vec<u32>, C64)> = Vec::with_capacity(terms.len());
        for (eta, c) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == eta => last.1 += c,
                _ => merged.push((eta, c)),
            }
        }
        merged.retain(|(_, c)| *c != C64::new(0.0, 0.0));
        Ok(Polynomial { n, terms: merged })
    }

    /// c·x_i^e.
    pub fn monomial(n: usize, c: C64, powers: &[(usize, u32)]) -> Self {
        let mut eta = vec![0u32; n];
        for &(i, e) in powers {
            eta[i] += e;
        }
        Self::new(n, vec![(eta, c)]).expect("well-formed monomial")
    }

    /// c·|x|^{2k} expanded.
    pub fn norm_power(n: usize, c: C64, k: u32) -> Self {
        let mut p = Self::constant(n, c);
        for _ in 0..k {
            let sq = Self::new(n, (0..n).map(|i| {
                let mut eta = vec![0; n];
                eta[i] = 2;
                (eta, C64::new(1.0, 0.0))
            }).collect())
            .expect("well-formed");
            p = p.mul(&sq);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(Vec<u32>, C64)] {
        &self.terms
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(eta, _)| eta.iter().sum()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut t = self.terms.clone();
        t.extend(other.terms.iter().cloned());
        Polynomial::new(self.n, t).expect("same arity")
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut t = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                t.push((ea.iter().zip(eb).map(|(a, b)| a + b).collect(), ca * cb));
            }
        }
        Polynomial::new(self.n, t).expect("same arity")
    }

    pub fn scale(&self, c: C64) -> Polynomial {
        Polynomial::new(self.n, self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect()).expect("same arity")
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        self.terms
            .iter()
            .map(|(eta, c)| c * eta.iter().zip(x).map(|(&e, &xi)| xi.powi(e as i32)).product::<f64>())
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialMatrix {
    pub m: usize,
    pub n: usize,
    /// Row-major m×m entries.
    pub entries: Vec<Polynomial>,
    pub d: u32,
}

impl PolynomialMatrix {
    pub fn new(m: usize, n: usize, entries: Vec<Polynomial>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::DomainError("m and n must be at least 1".into()));
        }
        if entries.len() != m * m {
            return Err(Error::DomainError(format!("expected {} entries, got {}", m * m, entries.len())));
        }
        if entries.iter().any(|p| p.n != n) {
            return Err(Error::DomainError(format!("every entry must have {n} variables")));
        }
        let d = entries.iter().map(Polynomial::degree).max().unwrap_or(0);
        Ok(PolynomialMatrix { m, n, entries, d })
    }

    pub fn from_rows(n: usize, rows: Vec<Vec<Polynomial>>) -> Result<Self> {
        let m = rows.len();
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::DomainError("rows must form a square matrix".into()));
        }
        Self::new(m, n, rows.into_iter().flatten().collect())
    }

    pub fn scalar(p: Polynomial) -> Self {
        let n = p.n;
        Self::new(1, n, vec![p]).expect("1x1")
    }

    pub fn identity(m: usize, n: usize) -> Self {
        let one = Polynomial::constant(n, C64::new(1.0, 0.0));
        let entries = (0..m * m).map(|k| if k / m == k % m { one.clone() } else { Polynomial::zero(n) }).collect();
        Self::new(m, n, entries).expect("identity")
    }

    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.m + j]
    }

    pub fn eval(&self, x: &[f64]) -> Result<CMatrix> {
        if x.len() != self.n {
            return Err(Error::DomainError(format!("point has {} components, expected {}", x.len(), self.n)));
        }
        Ok(DMatrix::from_fn(self.m, self.m, |i, j| self.entry(i, j).eval(x)))
    }

    /// Σ_i max_j deg p_ij, an upper bound for deg det P.
    pub fn det_degree_bound(&self) -> u32 {
        (0..self.m).map(|i| (0..self.m).map(|j| self.entry(i, j).degree()).max().unwrap_or(0)).sum()
    }

    pub fn det_at(&self, x: &[f64]) -> Result<C64> {
        Ok(self.eval(x)?.determinant())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PolyMatrixDoc::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: PolyMatrixDoc = serde_json::from_str(s)?;
        doc.try_into()
    }
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    eta: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct EntryDoc {
    coeffs: Vec<TermDoc>,
}

#[derive(Serialize, Deserialize)]
struct PolyMatrixDoc {
    m: usize,
    n: usize,
    entries: Vec<Vec<EntryDoc>>,
}

impl From<&PolynomialMatrix> for PolyMatrixDoc {
    fn from(p: &PolynomialMatrix) -> Self {
        let entries = (0..p.m)
            .map(|i| {
                (0..p.m)
                    .map(|j| EntryDoc {
                        coeffs: p
                            .entry(i, j)
                            .terms
                            .iter()
                            .map(|(eta, c)| TermDoc { eta: eta.clone(), re: c.re, im: c.im })
                            .collect(),
                    })
                    .collect()
            })
            .collect();
        PolyMatrixDoc { m: p.m, n: p.n, entries }
    }
}

impl TryFrom<PolyMatrixDoc> for PolynomialMatrix {
    type Error = Error;

    fn try_from(doc: PolyMatrixDoc) -> Result<Self> {
        if doc.entries.len() != doc.m || doc.entries.iter().any(|r| r.len() != doc.m) {
            return Err(Error::DomainError("entries must be an m×m array".into()));
        }
        let mut entries = Vec::with_capacity(doc.m * doc.m);
        for row in doc.entries {
            for e in row {
                let terms = e.coeffs.into_iter().map(|t| (t.eta, C64::new(t.re, t.im))).collect();
                entries.push(Polynomial::new(doc.n, terms)?);
            }
        }
        PolynomialMatrix::new(doc.m, doc.n, entries)
    }
}

pub fn eval_poly_matrix(p: &PolynomialMatrix, x: &[f64]) -> Result<CMatrix> {
    p.eval(x)
}

/// |det P2(x)| below this marks x as part of the singular set.
pub fn singular_floor(p2: &PolynomialMatrix, x: &[f64]) -> f64 {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    1e-12 * (1.0 + r).powi(p2.det_degree_bound() as i32)
}

fn check_pair(p1: &PolynomialMatrix, p2: &PolynomialMatrix) -> Result<()> {
    if p1.m != p2.m || p1.n != p2.n {
        return Err(Error::DomainError(format!(
            "P1 is {}x{} in {} variables, P2 is {}x{} in {}",
            p1.m, p1.m, p1.n, p2.m, p2.m, p2.n
        )));
    }
    Ok(())
}

/// M_0..=M_lmax with M_l = (P2⁻¹P1)^l, each step a linear solve P2·M_{l+1} = P1·M_l.
pub fn symbol_iterates(p1: &PolynomialMatrix, p2: &PolynomialMatrix, x: &[f64], lmax: usize) -> Result<Vec<CMatrix>> {
    check_pair(p1, p2)?;
    let a1 = p1.eval(x)?;
    let a2 = p2.eval(x)?;
    let lu = a2.lu();
    let det = lu.determinant();
    if det.norm() < singular_floor(p2, x) {
        return Err(Error::SingularSymbol { at: x.to_vec(), det: det.norm() });
    }
    let mut out = Vec::with_capacity(lmax + 1);
    out.push(CMatrix::identity(p1.m, p1.m));
    for l in 0..lmax {
        let rhs = &a1 * &out[l];
        let next = lu.solve(&rhs).ok_or_else(|| Error::SingularSymbol { at: x.to_vec(), det: det.norm() })?;
        out.push(next);
    }
    Ok(out)
}

pub fn symbol_iterate(p1: &PolynomialMatrix, p2: &PolynomialMatrix, x: &[f64], l: usize) -> Result<CMatrix> {
    Ok(symbol_iterates(p1, p2, x, l)?.pop().expect("nonempty"))
}

/// ‖P2 M_{l+1} − P1 M_l‖_F.
pub fn recurrence_residual(p1: &PolynomialMatrix, p2: &PolynomialMatrix, x: &[f64], l: usize) -> Result<f64> {
    let it = symbol_iterates(p1, p2, x, l + 1)?;
    let a1 = p1.eval(x)?;
    let a2 = p2.eval(x)?;
    Ok((a2 * &it[l + 1] - a1 * &it[l]).norm())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularizerSpec {
    pub a: f64,
    pub kprime: u32,
    pub d: u32,
}

impl RegularizerSpec {
    pub fn new(a: f64, kprime: u32, d: u32) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::DomainError(format!("regularizer a must be positive, got {a}")));
        }
        if kprime < 2 || kprime % 2 != 0 {
            return Err(Error::DomainError(format!("k' must be even and at least 2, got {kprime}")));
        }
        if d == 0 {
            return Err(Error::DomainError("d must be at least 1".into()));
        }
        Ok(RegularizerSpec { a, kprime, d })
    }

    pub fn exponent(&self) -> i32 {
        (self.kprime * self.d) as i32
    }
}

/// e^{−a|x|^{k'd}}.
pub fn regularizer(spec: &RegularizerSpec, x: &[f64]) -> f64 {
    // k'd is even, so |x|^{k'd} = (|x|²)^{k'd/2} without a square root.
    let r2: f64 = x.iter().map(|v| v * v).sum();
    (-spec.a * r2.powi(spec.exponent() / 2)).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub inner_radius: f64,
    pub outer_radius: f64,
}

impl CutoffSpec {
    pub fn new(inner_radius: f64, outer_radius: f64) -> Result<Self> {
        if !(inner_radius > 0.0 && outer_radius > inner_radius && outer_radius.is_finite()) {
            return Err(Error::DomainError(format!(
                "cutoff radii must satisfy 0 < inner < outer, got {inner_radius}, {outer_radius}"
            )));
        }
        Ok(CutoffSpec { inner_radius, outer_radius })
    }
}

/// Smooth step e^{−1/s}/(e^{−1/s}+e^{−1/(1−s)}) on [0,1].
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / s).exp();
        let b = (-1.0 / (1.0 - s)).exp();
        a / (a + b)
    }
}

pub fn cutoff(spec: &CutoffSpec, x: &[f64]) -> f64 {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    smooth_step((r - spec.inner_radius) / (spec.outer_radius - spec.inner_radius))
}

/// Γ((2M2(l+1)md+n)/(k'd))^{1/(2l)} / Γ(αl+1)^{1/l}, in logs.
fn ln_kprime_ratio(m: usize, d: u32, alpha: f64, m2: f64, n: usize, kprime: u32, l: usize) -> f64 {
    let lf = l as f64;
    let num = (2.0 * m2 * (lf + 1.0) * m as f64 * d as f64 + n as f64) / (kprime as f64 * d as f64);
    let (a, _) = ln_gamma(num).expect("positive");
    let (b, _) = ln_gamma(alpha * lf + 1.0).expect("positive");
    a / (2.0 * lf) - b / lf
}

/// Smallest even k' with M2·m/k' < α, confirmed by a decreasing ratio sequence for l = 10..50.
pub fn choose_kprime(m: usize, d: u32, alpha: f64, m2: f64, n: usize) -> Result<u32> {
    if m == 0 || d == 0 || n == 0 || !(alpha > 0.0) || !(m2 > 0.0) {
        return Err(Error::DomainError("choose_kprime needs m, d, n ≥ 1 and alpha, M2 > 0".into()));
    }
    let bound = m2 * m as f64 / alpha;
    let mut k = 2u32 * ((bound / 2.0).floor() as u32 + 1);
    // The strict inequality fails when bound is itself an even integer below k.
    while m2 * m as f64 / k as f64 >= alpha {
        k += 2;
    }
    while k >= 4 && m2 * (m as f64) / ((k - 2) as f64) < alpha {
        k -= 2;
    }
    let seq: Vec<f64> = (10..=50).map(|l| ln_kprime_ratio(m, d, alpha, m2, n, k, l)).collect();
    if seq.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::ValidationFailed(format!("ratio sequence for k'={k} is not decreasing on l=10..50")));
    }
    Ok(k)
}

/// Fitted constants of ‖M_l(x)‖ ≤ M1^l (1+|x|)^{l·m·d·M2}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthFit {
    pub m1: f64,
    pub m2: f64,
}

/// Least-squares fit of log‖M_l‖/l against log(1+|x|) along a few fixed rays, safety factor 1.5
/// on M2, then M1 raised until the bound holds at every sample. Both are clamped to ≥ 1.
pub fn fit_growth(p1: &PolynomialMatrix, p2: &PolynomialMatrix, lmax: usize) -> Result<GrowthFit> {
    check_pair(p1, p2)?;
    let n = p1.n;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let dirs: Vec<Vec<f64>> = (0..8)
        .map(|_| {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-12);
            v.into_iter().map(|a| a / nv).collect()
        })
        .collect();
    let mut samples = Vec::new();
    for dir in &dirs {
        for k in 0..12 {
            let r = 0.5 * 1.6f64.powi(k);
            let x: Vec<f64> = dir.iter().map(|a| a * r).collect();
            let Ok(it) = symbol_iterates(p1, p2, &x, lmax) else { continue };
            for (l, m) in it.iter().enumerate().skip(1) {
                let nm = m.norm();
                if nm > 0.0 && nm.is_finite() {
                    samples.push(((1.0 + r).ln(), l as f64, nm.ln()));
                }
            }
        }
    }
    if samples.len() < 3 {
        return Err(Error::DomainError("too few nonsingular samples to fit growth".into()));
    }
    // y = log‖M_l‖/l = log M1 + s·log(1+|x|).
    let npts = samples.len() as f64;
    let (sx, sy) = samples.iter().fold((0.0, 0.0), |a, s| (a.0 + s.0, a.1 + s.2 / s.1));
    let (mx, my) = (sx / npts, sy / npts);
    let (sxx, sxy) = samples.iter().fold((0.0, 0.0), |a, s| {
        let dx = s.0 - mx;
        (a.0 + dx * dx, a.1 + dx * (s.2 / s.1 - my))
    });
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let md = (p1.m as f64) * (p1.d.max(p2.d).max(1) as f64);
    let m2 = (1.5 * slope / md).max(1.0);
    let ln_m1 = samples
        .iter()
        .map(|s| s.2 / s.1 - m2 * md * s.0)
        .fold(0.0f64, f64::max);
    Ok(GrowthFit { m1: ln_m1.exp().max(1.0), m2 })
}

/// Random dense m×m polynomial matrix of total degree ≤ d with coefficients in the unit box.
pub fn random_poly_matrix(m: usize, n: usize, d: u32, seed: u64) -> Result<PolynomialMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut exps: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..n {
        exps = exps
            .into_iter()
            .flat_map(|e| (0..=d).map(move |k| {
                let mut e2 = e.clone();
                e2.push(k);
                e2
            }))
            .filter(|e| e.iter().sum::<u32>() <= d)
            .collect();
    }
    let entries = (0..m * m)
        .map(|_| {
            let terms = exps
                .iter()
                .map(|e| (e.clone(), C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
                .collect();
            Polynomial::new(n, terms)
        })
        .collect::<Result<Vec<_>>>()?;
    PolynomialMatrix::new(m, n, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rossby() -> (PolynomialMatrix, PolynomialMatrix) {
        let p1 = PolynomialMatrix::scalar(Polynomial::monomial(2, c(0.0, -1.0), &[(1, 1)]));
        let p2 = PolynomialMatrix::scalar(Polynomial::norm_power(2, c(-1.0, 0.0), 1));
        (p1, p2)
    }

    #[test]
    fn eval_examples() {
        let (_, p2) = rossby();
        assert_eq!(p2.eval(&[1.0, 2.0]).unwrap()[(0, 0)], c(-5.0, 0.0));
        let z = Polynomial::zero(3);
        let om2 = Polynomial::monomial(3, c(9.0, 0.0), &[(2, 2)]);
        let one = Polynomial::constant(3, c(1.0, 0.0));
        let sob = PolynomialMatrix::from_rows(3, vec![vec![z.clone(), om2], vec![one, z]]).unwrap();
        let v = sob.eval(&[0.0, 0.0, 2.0]).unwrap();
        assert_eq!(v, CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(36.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]));
        assert_eq!(sob.eval(&[0.0; 3]).unwrap()[(1, 0)], c(1.0, 0.0));
        assert_eq!(sob.d, 2);
    }

    #[test]
    fn iterate_examples() {
        let (p1, p2) = rossby();
        assert_eq!(symbol_iterate(&p1, &p2, &[1.0, 2.0], 0).unwrap(), CMatrix::identity(1, 1));
        let m1 = symbol_iterate(&p1, &p2, &[1.0, 2.0], 1).unwrap()[(0, 0)];
        assert!((m1 - c(0.0, 0.4)).norm() < 1e-15);
        assert!(matches!(symbol_iterate(&p1, &p2, &[0.0, 0.0], 1), Err(Error::SingularSymbol { .. })));
    }

    #[test]
    fn residual_on_random_model() {
        let p1 = random_poly_matrix(3, 2, 2, 1).unwrap();
        let p2 = random_poly_matrix(3, 2, 2, 2).unwrap();
        let x = [0.3, -1.1];
        let it = symbol_iterates(&p1, &p2, &x, 8).unwrap();
        let scale = p1.eval(&x).unwrap().norm() + p2.eval(&x).unwrap().norm();
        let r = recurrence_residual(&p1, &p2, &x, 8).unwrap();
        assert!(r <= 1e-9 * (1.0 + it[8].norm()) * scale);
        let prod = &it[3] * &it[5];
        assert!((prod - &it[8]).norm() <= 1e-9 * it[8].norm());
    }

    #[test]
    fn regularizer_examples() {
        let s = RegularizerSpec::new(1.0, 2, 1).unwrap();
        assert_eq!(regularizer(&s, &[0.0, 0.0]), 1.0);
        assert!((regularizer(&s, &[0.6, 0.8]) - 0.36787944117144233).abs() < 1e-15);
        let s = RegularizerSpec::new(0.5, 4, 2).unwrap();
        assert!((regularizer(&s, &[1.2]) - (-2.14990848f64).exp()).abs() < 1e-14);
        assert!(RegularizerSpec::new(1.0, 3, 1).is_err());
    }

    #[test]
    fn cutoff_examples() {
        let s = CutoffSpec::new(1.0, 3.0).unwrap();
        assert_eq!(cutoff(&s, &[0.5]), 0.0);
        assert_eq!(cutoff(&s, &[6.0]), 1.0);
        assert!((cutoff(&s, &[2.0]) - 0.5).abs() < 1e-15);
        assert!(CutoffSpec::new(2.0, 1.0).is_err());
    }

    #[test]
    fn kprime_examples() {
        assert_eq!(choose_kprime(2, 2, 1.0, 1.0, 2).unwrap(), 4);
        assert_eq!(choose_kprime(1, 1, 2.0, 1.0, 1).unwrap(), 2);
        assert_eq!(choose_kprime(3, 2, 0.5, 2.0, 3).unwrap(), 14);
    }

    #[test]
    fn json_round_trip() {
        let p = random_poly_matrix(2, 3, 2, 7).unwrap();
        let back = PolynomialMatrix::from_json(&p.to_json()).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn growth_fit_bounds_samples() {
        let (p1, p2) = rossby();
        let g = fit_growth(&p1, &p2, 6).unwrap();
        assert!(g.m1 >= 1.0 && g.m2 >= 1.0);
        let x = [3.0, 4.0];
        let m = symbol_iterate(&p1, &p2, &x, 4).unwrap().norm();
        assert!(m <= g.m1.powi(4) * 6f64.powf(4.0 * g.m2 * 2.0));
    }
}
