//! Periodic-grid functional calculus: unitary DFTs, Fourier multipliers, snapshots.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

use crate::special_functions::CMatrix;
use crate::{try_par_map, Error, Result, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralGrid {
    pub n: usize,
    pub sizes: Vec<usize>,
    pub extent: Vec<f64>,
}

impl SpectralGrid {
    pub fn new(sizes: Vec<usize>, extent: Vec<f64>) -> Result<Self> {
        if sizes.is_empty() || sizes.len() != extent.len() {
            return Err(Error::DomainError("sizes and extent must be nonempty and of equal length".into()));
        }
        if let Some(s) = sizes.iter().find(|&&s| s < 4 || !s.is_power_of_two()) {
            return Err(Error::DomainError(format!("axis size {s} is not a power of two ≥ 4")));
        }
        if extent.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::DomainError("extent must be positive".into()));
        }
        Ok(SpectralGrid { n: sizes.len(), sizes, extent })
    }

    /// Same size and period on every axis.
    pub fn cube(n: usize, size: usize, extent: f64) -> Result<Self> {
        Self::new(vec![size; n], vec![extent; n])
    }

    pub fn total(&self) -> usize {
        self.sizes.iter().product()
    }

    fn stride(&self, axis: usize) -> usize {
        self.sizes[axis + 1..].iter().product()
    }

    /// Row-major multi-index of flat gridpoint g (last axis fastest).
    pub fn multi_index(&self, mut g: usize) -> Vec<usize> {
        let mut idx = vec![0; self.n];
        for a in (0..self.n).rev() {
            idx[a] = g % self.sizes[a];
            g /= self.sizes[a];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.sizes).fold(0, |acc, (&i, &s)| acc * s + i)
    }

    /// Signed integer frequency of index k on an axis of size s: 0..s/2−1, then −s/2..−1.
    pub fn signed_mode(k: usize, s: usize) -> i64 {
        if k < s / 2 {
            k as i64
        } else {
            k as i64 - s as i64
        }
    }

    /// Frequency vector ξ at gridpoint g, ξ_a = 2π·mode/extent_a.
    pub fn freq(&self, g: usize) -> Vec<f64> {
        self.multi_index(g)
            .iter()
            .enumerate()
            .map(|(a, &k)| 2.0 * std::f64::consts::PI * Self::signed_mode(k, self.sizes[a]) as f64 / self.extent[a])
            .collect()
    }

    /// Physical coordinate at gridpoint g, x_a = k·extent_a/size_a.
    pub fn coord(&self, g: usize) -> Vec<f64> {
        self.multi_index(g)
            .iter()
            .enumerate()
            .map(|(a, &k)| k as f64 * self.extent[a] / self.sizes[a] as f64)
            .collect()
    }

    /// Flat index of the lattice frequency with the given signed modes.
    pub fn mode_index(&self, modes: &[i64]) -> usize {
        let idx: Vec<usize> = modes
            .iter()
            .zip(&self.sizes)
            .map(|(&k, &s)| k.rem_euclid(s as i64) as usize)
            .collect();
        self.flat_index(&idx)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    Physical,
    Frequency,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// m-component field on a grid; data[c·G + g].
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    pub grid: SpectralGrid,
    pub m: usize,
    pub data: Vec<C64>,
    pub space: Space,
}

impl SpectralField {
    pub fn zeros(grid: &SpectralGrid, m: usize, space: Space) -> Self {
        SpectralField { grid: grid.clone(), m, data: vec![C64::new(0.0, 0.0); m * grid.total()], space }
    }

    pub fn new(grid: &SpectralGrid, m: usize, data: Vec<C64>, space: Space) -> Result<Self> {
        if m == 0 || data.len() != m * grid.total() {
            return Err(Error::DomainError(format!(
                "data length {} does not match m·G = {}·{}",
                data.len(),
                m,
                grid.total()
            )));
        }
        Ok(SpectralField { grid: grid.clone(), m, data, space })
    }

    /// Physical field with u(x) from a closure returning m components.
    pub fn from_fn(grid: &SpectralGrid, m: usize, f: impl Fn(&[f64]) -> Vec<C64>) -> Self {
        let mut out = Self::zeros(grid, m, Space::Physical);
        let gt = grid.total();
        for g in 0..gt {
            let v = f(&grid.coord(g));
            for c in 0..m {
                out.data[c * gt + g] = v[c];
            }
        }
        out
    }

    /// Frequency field with û(ξ) from a closure.
    pub fn from_freq_fn(grid: &SpectralGrid, m: usize, f: impl Fn(&[f64]) -> Vec<C64>) -> Self {
        let mut out = Self::zeros(grid, m, Space::Frequency);
        let gt = grid.total();
        for g in 0..gt {
            let v = f(&grid.freq(g));
            for c in 0..m {
                out.data[c * gt + g] = v[c];
            }
        }
        out
    }

    /// Physical field with independent uniform entries in the unit box.
    pub fn random(grid: &SpectralGrid, m: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..m * grid.total())
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        SpectralField { grid: grid.clone(), m, data, space: Space::Physical }
    }

    pub fn component(&self, c: usize) -> &[C64] {
        let gt = self.grid.total();
        &self.data[c * gt..(c + 1) * gt]
    }

    /// The m-vector at gridpoint g.
    pub fn at(&self, g: usize) -> Vec<C64> {
        let gt = self.grid.total();
        (0..self.m).map(|c| self.data[c * gt + g]).collect()
    }

    pub fn l2_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max |a − b| / max |b|.
    pub fn rel_diff(&self, other: &SpectralField) -> f64 {
        let num = self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        num / other.max_abs().max(f64::MIN_POSITIVE)
    }

    pub fn to_frequency(&self) -> Result<SpectralField> {
        match self.space {
            Space::Frequency => Ok(self.clone()),
            Space::Physical => transform(self, Direction::Forward),
        }
    }

    pub fn to_physical(&self) -> Result<SpectralField> {
        match self.space {
            Space::Physical => Ok(self.clone()),
            Space::Frequency => transform(self, Direction::Inverse),
        }
    }
}

/// In-place unitary DFT of one component along every axis.
fn dft_component(grid: &SpectralGrid, data: &mut [C64], dir: Direction, planner: &mut FftPlanner<f64>) {
    for axis in 0..grid.n {
        let s = grid.sizes[axis];
        let stride = grid.stride(axis);
        let fft = match dir {
            Direction::Forward => planner.plan_fft_forward(s),
            Direction::Inverse => planner.plan_fft_inverse(s),
        };
        let scale = 1.0 / (s as f64).sqrt();
        let mut line = vec![C64::new(0.0, 0.0); s];
        let block = s * stride;
        for base in (0..data.len()).step_by(block) {
            for off in 0..stride {
                for (k, v) in line.iter_mut().enumerate() {
                    *v = data[base + off + k * stride];
                }
                fft.process(&mut line);
                for (k, v) in line.iter().enumerate() {
                    data[base + off + k * stride] = v * scale;
                }
            }
        }
    }
}

pub fn transform(f: &SpectralField, dir: Direction) -> Result<SpectralField> {
    let (from, to) = match dir {
        Direction::Forward => (Space::Physical, Space::Frequency),
        Direction::Inverse => (Space::Frequency, Space::Physical),
    };
    if f.space != from {
        return Err(Error::WrongSpace {
            expected: if from == Space::Physical { "physical" } else { "frequency" },
        });
    }
    let mut out = f.clone();
    let gt = f.grid.total();
    let mut planner = FftPlanner::new();
    for c in 0..f.m {
        dft_component(&f.grid, &mut out.data[c * gt..(c + 1) * gt], dir, &mut planner);
    }
    out.space = to;
    Ok(out)
}

/// Pointwise symbol(ξ)·f̂(ξ). Physical input is transformed first; the result is frequency-side.
pub fn apply_multiplier<S>(symbol: S, f: &SpectralField) -> Result<SpectralField>
where
    S: Fn(&[f64]) -> Result<CMatrix> + Sync,
{
    let fh = f.to_frequency()?;
    let gt = fh.grid.total();
    let m = fh.m;
    let cols = try_par_map(gt, |g| {
        let xi = fh.grid.freq(g);
        let s = symbol(&xi).map_err(|e| match e {
            Error::SymbolEvaluationError { .. } => e,
            other => Error::SymbolEvaluationError { at: xi.clone(), reason: other.to_string() },
        })?;
        if s.nrows() != m || s.ncols() != m {
            return Err(Error::SymbolEvaluationError {
                at: xi,
                reason: format!("symbol is {}x{}, field has {m} components", s.nrows(), s.ncols()),
            });
        }
        let v = nalgebra::DVector::from_vec(fh.at(g));
        let r = s * v;
        if r.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::SymbolEvaluationError { at: xi, reason: "non-finite value".into() });
        }
        Ok(r)
    })?;
    let mut out = SpectralField::zeros(&fh.grid, m, Space::Frequency);
    for (g, r) in cols.into_iter().enumerate() {
        for c in 0..m {
            out.data[c * gt + g] = r[c];
        }
    }
    Ok(out)
}

/// Scalar symbol applied to every component.
pub fn apply_scalar_multiplier<S>(symbol: S, f: &SpectralField) -> Result<SpectralField>
where
    S: Fn(&[f64]) -> C64 + Sync,
{
    let m = f.m;
    apply_multiplier(|xi| Ok(CMatrix::identity(m, m) * symbol(xi)), f)
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormBoundReport {
    /// Largest observed amplification ‖Tf‖_p/‖f‖_p.
    pub operator_norm: f64,
    /// Σ_j |κ_j| of the discrete convolution kernel κ = F⁻¹ symbol.
    pub l1_norm: f64,
    pub ratio: f64,
    /// Share of Σ|κ| within 10% of the half period (wrap-around zone).
    pub tail_mass: f64,
    pub p: u32,
}

fn lp_norm(v: &[C64], p: u32) -> f64 {
    if p == 2 {
        v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    } else {
        v.iter().map(|z| z.norm().powi(p as i32)).sum::<f64>().powf(1.0 / p as f64)
    }
}

/// Compares the grid operator norm of a scalar multiplier with ‖F⁻¹ symbol‖_{L¹}.
/// For p = 2 the norm comes from power iteration on T*T started from `trials` random fields;
/// for other p it is the largest amplification over random fields and the unit impulse.
pub fn l1_norm_bound_check<S>(symbol: S, grid: &SpectralGrid, trials: usize, p: u32, seed: u64) -> Result<NormBoundReport>
where
    S: Fn(&[f64]) -> C64 + Sync,
{
    if p == 0 {
        return Err(Error::DomainError("p must be at least 1".into()));
    }
    let gt = grid.total();
    // κ_j = (1/G) Σ_k s_k e^{iξ_k·x_j}: the unitary inverse scaled by 1/sqrt(G).
    let sym = SpectralField::from_freq_fn(grid, 1, |xi| vec![symbol(xi)]);
    if let Some(g) = sym.data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::SymbolEvaluationError { at: grid.freq(g), reason: "non-finite value".into() });
    }
    let kernel = transform(&sym, Direction::Inverse)?;
    let kscale = 1.0 / (gt as f64).sqrt();
    let mut l1 = 0.0;
    let mut tail = 0.0;
    for g in 0..gt {
        let a = kernel.data[g].norm() * kscale;
        l1 += a;
        let x = grid.coord(g);
        let near_half = x.iter().zip(&grid.extent).any(|(&xa, &l)| {
            let w = if xa > l / 2.0 { l - xa } else { xa };
            w > 0.9 * l / 2.0
        });
        if near_half {
            tail += a;
        }
    }
    let tail_mass = if l1 > 0.0 { tail / l1 } else { 0.0 };
    if tail_mass > 1e-6 {
        return Err(Error::UnresolvedSymbol { tail: tail_mass });
    }

    // Symbol samples are reused for every application of T and T*.
    let mult = |f: &SpectralField, adjoint: bool| -> Result<SpectralField> {
        let mut fh = f.to_frequency()?;
        for (v, s) in fh.data.iter_mut().zip(&sym.data) {
            *v *= if adjoint { s.conj() } else { *s };
        }
        fh.to_physical()
    };
    let apply = |f: &SpectralField| mult(f, false);
    let mut best = 0.0f64;
    for t in 0..trials.max(1) {
        let f0 = SpectralField::random(grid, 1, seed.wrapping_add(t as u64));
        if p == 2 {
            let mut f = f0;
            let mut est = 0.0f64;
            for _ in 0..60 {
                let nf = f.l2_norm();
                if nf == 0.0 {
                    break;
                }
                let tf = apply(&f)?;
                let prev = est;
                est = tf.l2_norm() / nf;
                if (est - prev).abs() <= 1e-12 * est {
                    break;
                }
                let ttf = mult(&tf, true)?;
                let nn = ttf.l2_norm();
                if nn == 0.0 {
                    break;
                }
                f = SpectralField { data: ttf.data.iter().map(|z| z / nn).collect(), ..ttf };
            }
            best = best.max(est);
        } else {
            let tf = apply(&f0)?;
            best = best.max(lp_norm(&tf.data, p) / lp_norm(&f0.data, p));
        }
    }
    if p != 2 {
        let mut delta = SpectralField::zeros(grid, 1, Space::Physical);
        delta.data[0] = C64::new(1.0, 0.0);
        let tf = apply(&delta)?;
        best = best.max(lp_norm(&tf.data, p));
    }
    Ok(NormBoundReport {
        operator_norm: best,
        l1_norm: l1,
        ratio: if l1 > 0.0 { best / l1 } else { f64::INFINITY },
        tail_mass,
        p,
    })
}

const MAGIC: &[u8; 5] = b"DFRC1";

/// Binary snapshot: "DFRC1", n (u32), sizes (u32 each), m (u32), space (u8), then f64 LE (re, im).
pub fn write_snapshot<W: Write>(f: &SpectralField, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(f.grid.n as u32).to_le_bytes())?;
    for &s in &f.grid.sizes {
        w.write_all(&(s as u32).to_le_bytes())?;
    }
    w.write_all(&(f.m as u32).to_le_bytes())?;
    w.write_all(&[match f.space {
        Space::Physical => 0u8,
        Space::Frequency => 1u8,
    }])?;
    for z in &f.data {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

/// Reads a snapshot; the format does not store the period, so `extent` supplies it.
pub fn read_snapshot<R: Read>(mut r: R, extent: Vec<f64>) -> Result<SpectralField> {
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Io("not a DFRC1 snapshot".into()));
    }
    let mut u32buf = [0u8; 4];
    let mut read_u32 = |r: &mut R| -> Result<usize> {
        r.read_exact(&mut u32buf)?;
        Ok(u32::from_le_bytes(u32buf) as usize)
    };
    let n = read_u32(&mut r)?;
    if n == 0 || n > 16 {
        return Err(Error::Io(format!("implausible dimension {n}")));
    }
    let sizes = (0..n).map(|_| read_u32(&mut r)).collect::<Result<Vec<_>>>()?;
    let m = read_u32(&mut r)?;
    let mut flag = [0u8; 1];
    r.read_exact(&mut flag)?;
    let space = match flag[0] {
        0 => Space::Physical,
        1 => Space::Frequency,
        x => return Err(Error::Io(format!("bad space flag {x}"))),
    };
    let grid = SpectralGrid::new(sizes, extent)?;
    let mut data = Vec::with_capacity(m * grid.total());
    let mut b = [0u8; 8];
    for _ in 0..m * grid.total() {
        r.read_exact(&mut b)?;
        let re = f64::from_le_bytes(b);
        r.read_exact(&mut b)?;
        data.push(C64::new(re, f64::from_le_bytes(b)));
    }
    SpectralField::new(&grid, m, data, space)
}

/// CSV with one row per gridpoint: coordinates (or frequencies), then re/im per component.
pub fn write_csv<W: Write>(f: &SpectralField, mut w: W) -> Result<()> {
    let axis = if f.space == Space::Physical { "x" } else { "xi" };
    let mut head: Vec<String> = (0..f.grid.n).map(|a| format!("{axis}{a}")).collect();
    for c in 0..f.m {
        head.push(format!("c{c}_re"));
        head.push(format!("c{c}_im"));
    }
    writeln!(w, "{}", head.join(","))?;
    for g in 0..f.grid.total() {
        let pos = if f.space == Space::Physical { f.grid.coord(g) } else { f.grid.freq(g) };
        let mut row: Vec<String> = pos.iter().map(|v| v.to_string()).collect();
        for z in f.at(g) {
            row.push(z.re.to_string());
            row.push(z.im.to_string());
        }
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
