//! Sampled fields on the circle-sphere product and their coefficient
//! containers: partially transformed (sphere side only, time retained)
//! and doubly transformed (both sides).
//!
//! The doubly transformed container is a sparse ordered map because the
//! interesting counterexample data lives at isolated astronomically large
//! modes; those keys are arbitrary-precision integers and their blocks
//! carry a single entry.  Desk-scale data uses dense matrix blocks with
//! small keys.  Values are double precision throughout; exact certificates
//! for the astronomical modes live in the diophantine module, not here.

use ndarray::{Array2, Array3};
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::repr::{weight_su2, weight_torus, HalfInt};
use crate::su2::{HaarQuadrature, WignerTable, STABLE_TWICE_ELL};
use crate::timefreq::{check_band, dft, idft, resample, Spectrum, TAU};

/// Uniform periodic grid `t_k = 2 pi k / n_t`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TimeGrid {
    n_t: usize,
}

impl TimeGrid {
    pub fn new(n_t: usize) -> Result<Self> {
        if n_t == 0 {
            return Err(Error::BadData("time grid needs at least one point".into()));
        }
        Ok(TimeGrid { n_t })
    }

    pub fn n_t(self) -> usize {
        self.n_t
    }

    pub fn point(self, k: usize) -> f64 {
        TAU * (k % self.n_t) as f64 / self.n_t as f64
    }

    pub fn points(self) -> Vec<f64> {
        (0..self.n_t).map(|k| self.point(k)).collect()
    }

    pub fn refine(self, factor: usize) -> TimeGrid {
        TimeGrid {
            n_t: self.n_t * factor.max(1),
        }
    }
}

/// Samples `f(t_k, x_i)` of a scalar field, rows indexed by the time grid
/// and columns by the nodes of a Haar quadrature.
#[derive(Clone, Debug)]
pub struct SampledField {
    pub grid: TimeGrid,
    pub values: Array2<Complex64>,
}

impl SampledField {
    pub fn new(grid: TimeGrid, values: Array2<Complex64>) -> Result<Self> {
        if values.nrows() != grid.n_t() {
            return Err(Error::Shape(format!(
                "{} sample rows for a {}-point time grid",
                values.nrows(),
                grid.n_t()
            )));
        }
        Ok(SampledField { grid, values })
    }
}

/// Sphere-side coefficients with time retained: one `[n_t, d, d]` stack per
/// spin through `ell_max`.
#[derive(Clone, Debug)]
pub struct PartialCoeffField {
    grid: TimeGrid,
    ell_max: HalfInt,
    blocks: BTreeMap<HalfInt, Array3<Complex64>>,
}

impl PartialCoeffField {
    pub fn zeros(grid: TimeGrid, ell_max: HalfInt) -> Self {
        let mut blocks = BTreeMap::new();
        for ell in ell_max.spins_through() {
            let d = ell.dim();
            blocks.insert(ell, Array3::zeros((grid.n_t(), d, d)));
        }
        PartialCoeffField {
            grid,
            ell_max,
            blocks,
        }
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn ell_max(&self) -> HalfInt {
        self.ell_max
    }

    pub fn block(&self, ell: HalfInt) -> Option<&Array3<Complex64>> {
        self.blocks.get(&ell)
    }

    pub fn block_mut(&mut self, ell: HalfInt) -> Option<&mut Array3<Complex64>> {
        self.blocks.get_mut(&ell)
    }

    pub fn set_block(&mut self, ell: HalfInt, block: Array3<Complex64>) -> Result<()> {
        if ell > self.ell_max {
            return Err(Error::IndexRange(format!(
                "spin {ell} beyond ell_max {}",
                self.ell_max
            )));
        }
        let d = ell.dim();
        if block.shape() != [self.grid.n_t(), d, d] {
            return Err(Error::Shape(format!(
                "block for spin {ell} has shape {:?}, expected [{}, {d}, {d}]",
                block.shape(),
                self.grid.n_t()
            )));
        }
        self.blocks.insert(ell, block);
        Ok(())
    }

    pub fn spins(&self) -> impl Iterator<Item = HalfInt> + '_ {
        self.blocks.keys().copied()
    }

    /// Time series of one matrix entry, by storage row/column.
    pub fn mode_series(&self, ell: HalfInt, row: usize, col: usize) -> Option<Vec<Complex64>> {
        self.blocks
            .get(&ell)
            .map(|b| (0..self.grid.n_t()).map(|k| b[[k, row, col]]).collect())
    }

    /// Largest entry modulus across all blocks and times.
    pub fn max_abs(&self) -> f64 {
        self.blocks
            .values()
            .flat_map(|b| b.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Band-limited resampling of every entry onto a grid refined by
    /// `factor`; exact when the stored grid already resolves the content.
    pub fn refined(&self, factor: usize) -> PartialCoeffField {
        let factor = factor.max(1);
        if factor == 1 {
            return self.clone();
        }
        let work = self.grid.refine(factor);
        let mut out = PartialCoeffField::zeros(work, self.ell_max);
        for (ell, block) in &self.blocks {
            let d = ell.dim();
            let dst = out.blocks.get_mut(ell).expect("allocated");
            for row in 0..d {
                for col in 0..d {
                    let series: Vec<Complex64> =
                        (0..self.grid.n_t()).map(|k| block[[k, row, col]]).collect();
                    let fine = resample(&series, factor);
                    for (k, v) in fine.into_iter().enumerate() {
                        dst[[k, row, col]] = v;
                    }
                }
            }
        }
        out
    }
}

/// Key of a doubly transformed mode `(tau, l)`; arbitrary precision so the
/// counterexample modes fit.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ModeIndex {
    pub tau: BigInt,
    pub two_ell: BigUint,
}

impl ModeIndex {
    pub fn new(tau: BigInt, two_ell: BigUint) -> Self {
        ModeIndex { tau, two_ell }
    }

    pub fn small(tau: i64, ell: HalfInt) -> Self {
        ModeIndex {
            tau: BigInt::from(tau),
            two_ell: BigUint::from(ell.twice()),
        }
    }

    pub fn tau_small(&self) -> Option<i64> {
        self.tau.to_i64()
    }

    pub fn ell_small(&self) -> Option<HalfInt> {
        self.two_ell.to_u64().map(HalfInt::from_twice)
    }

    /// Natural log of the combined weight `<tau> + <l>`, stable far beyond
    /// the double-precision range of the weight itself.
    pub fn ln_weight(&self) -> f64 {
        let ln_wt = ln_weight_torus(&self.tau);
        let ln_wl = ln_weight_su2(&self.two_ell);
        let (hi, lo) = if ln_wt >= ln_wl {
            (ln_wt, ln_wl)
        } else {
            (ln_wl, ln_wt)
        };
        hi + (1.0 + (lo - hi).exp()).ln()
    }

    /// Combined weight in double precision; use only on desk-scale keys.
    pub fn weight(&self) -> f64 {
        self.ln_weight().exp()
    }
}

pub(crate) fn approx_ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v.ln();
        }
    }
    let s = x.to_string();
    let head_len = s.len().min(17);
    let head: f64 = s[..head_len].parse().expect("decimal digits");
    head.ln() + (s.len() - head_len) as f64 * std::f64::consts::LN_10
}

fn ln_weight_torus(tau: &BigInt) -> f64 {
    match tau.to_i64() {
        Some(t) => weight_torus(t).ln(),
        // |tau| here is far beyond 2^53; the +1 under the root is invisible.
        None => approx_ln_biguint(tau.magnitude()),
    }
}

fn ln_weight_su2(two_ell: &BigUint) -> f64 {
    match two_ell.to_u64() {
        Some(t) => weight_su2(HalfInt::from_twice(t)).ln(),
        None => approx_ln_biguint(two_ell) - std::f64::consts::LN_2,
    }
}

/// One doubly transformed block: dense for desk-scale spins, or a single
/// labelled entry for sparse counterexample modes.
#[derive(Clone, Debug)]
pub enum CoeffBlock {
    Dense(Array2<Complex64>),
    /// Entry at row label `m`, column label `n` (doubled); everything else zero.
    Single {
        two_m: BigInt,
        two_n: BigInt,
        value: Complex64,
    },
}

impl CoeffBlock {
    pub fn hs_norm(&self) -> f64 {
        match self {
            CoeffBlock::Dense(m) => crate::repr::hs_norm(m.view()),
            CoeffBlock::Single { value, .. } => value.norm(),
        }
    }

    pub fn scaled(&self, factor: f64) -> CoeffBlock {
        match self {
            CoeffBlock::Dense(m) => CoeffBlock::Dense(m * Complex64::new(factor, 0.0)),
            CoeffBlock::Single { two_m, two_n, value } => CoeffBlock::Single {
                two_m: two_m.clone(),
                two_n: two_n.clone(),
                value: value * factor,
            },
        }
    }
}

/// Doubly transformed coefficients: ordered sparse map `(tau, l) -> block`.
#[derive(Clone, Debug, Default)]
pub struct FullCoeff {
    entries: BTreeMap<ModeIndex, CoeffBlock>,
}

impl FullCoeff {
    pub fn new() -> Self {
        FullCoeff::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert_dense(&mut self, tau: i64, ell: HalfInt, mat: Array2<Complex64>) -> Result<()> {
        let d = ell.dim();
        if mat.shape() != [d, d] {
            return Err(Error::Shape(format!(
                "block for spin {ell} has shape {:?}, expected {d}x{d}",
                mat.shape()
            )));
        }
        self.entries
            .insert(ModeIndex::small(tau, ell), CoeffBlock::Dense(mat));
        Ok(())
    }

    /// Inserts a one-entry block at an arbitrary-precision mode.  The row
    /// and column labels must be admissible for the spin: `|2m| <= 2l` with
    /// matching parity.
    pub fn insert_single(
        &mut self,
        key: ModeIndex,
        two_m: BigInt,
        two_n: BigInt,
        value: Complex64,
    ) -> Result<()> {
        let two_ell = BigInt::from(key.two_ell.clone());
        for (name, lbl) in [("m", &two_m), ("n", &two_n)] {
            if lbl.abs() > two_ell {
                return Err(Error::IndexRange(format!(
                    "|2{name}| exceeds 2l at mode (tau = {}, 2l = {})",
                    key.tau, key.two_ell
                )));
            }
            if (lbl - &two_ell) % 2 != BigInt::zero() {
                return Err(Error::IndexRange(format!(
                    "2{name} has the wrong parity at mode (tau = {}, 2l = {})",
                    key.tau, key.two_ell
                )));
            }
        }
        self.entries
            .insert(key, CoeffBlock::Single { two_m, two_n, value });
        Ok(())
    }

    pub fn get(&self, key: &ModeIndex) -> Option<&CoeffBlock> {
        self.entries.get(key)
    }

    pub fn get_dense(&self, tau: i64, ell: HalfInt) -> Option<&Array2<Complex64>> {
        match self.entries.get(&ModeIndex::small(tau, ell)) {
            Some(CoeffBlock::Dense(m)) => Some(m),
            _ => None,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ModeIndex, &CoeffBlock)> {
        self.entries.iter()
    }

    /// Sum of `(2l+1) |block|_HS^2` over all modes; the squared field norm
    /// by the product Plancherel identity.
    pub fn plancherel_sum(&self) -> f64 {
        self.entries
            .iter()
            .map(|(k, b)| {
                let h = b.hs_norm();
                if h == 0.0 {
                    return 0.0;
                }
                match k.two_ell.to_f64() {
                    Some(t) if t.is_finite() => (t + 1.0) * h * h,
                    // Astronomical spin with nonzero block: the dimension
                    // factor alone overflows; report infinity honestly.
                    _ => f64::INFINITY,
                }
            })
            .sum()
    }
}

/// Sphere-side transform of each time slice.
pub fn analyze_partial(
    field: &SampledField,
    quad: &HaarQuadrature,
    table: &WignerTable,
    ell_max: HalfInt,
) -> Result<PartialCoeffField> {
    if ell_max > quad.max_exact_ell {
        return Err(Error::QuadratureOrder(format!(
            "requested spins through {ell_max} but the rule is exact only through {}",
            quad.max_exact_ell
        )));
    }
    if ell_max > table.ell_max {
        return Err(Error::QuadratureOrder(format!(
            "Wigner table stops at spin {}, need {ell_max}",
            table.ell_max
        )));
    }
    if field.values.ncols() != quad.nodes.len() {
        return Err(Error::Shape(format!(
            "{} sample columns for {} quadrature nodes",
            field.values.ncols(),
            quad.nodes.len()
        )));
    }
    let mut out = PartialCoeffField::zeros(field.grid, ell_max);
    for ell in ell_max.spins_through() {
        let d = ell.dim();
        let block = out.block_mut(ell).expect("allocated above");
        for k in 0..field.grid.n_t() {
            for (i, w) in quad.weights.iter().enumerate() {
                let wf = field.values[[k, i]] * *w;
                let t = table.matrix(i, ell);
                for m in 0..d {
                    for n in 0..d {
                        block[[k, m, n]] += wf * t[[n, m]].conj();
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Circle-side transform of the retained time dependence.  Requires the
/// grid to resolve the requested band: `n_t >= 2 tau_max + 1`.
pub fn analyze_full(pc: &PartialCoeffField, tau_max: i64) -> Result<FullCoeff> {
    check_band(pc.grid().n_t(), tau_max)?;
    let mut out = FullCoeff::new();
    for ell in pc.spins() {
        let d = ell.dim();
        let mut mats: Vec<Array2<Complex64>> =
            (0..(2 * tau_max + 1)).map(|_| Array2::zeros((d, d))).collect();
        for m in 0..d {
            for n in 0..d {
                let series = pc.mode_series(ell, m, n).expect("spin present");
                let spec = dft(&series);
                for (idx, mat) in mats.iter_mut().enumerate() {
                    let tau = idx as i64 - tau_max;
                    mat[[m, n]] = spec.at(tau);
                }
            }
        }
        for (idx, mat) in mats.into_iter().enumerate() {
            out.insert_dense(idx as i64 - tau_max, ell, mat)?;
        }
    }
    Ok(out)
}

/// Same double transform with the factors in the opposite order: circle
/// first at every quadrature node, then the sphere transform per frequency.
/// Agrees with [`analyze_partial`] followed by [`analyze_full`].
pub fn analyze_full_via_torus(
    field: &SampledField,
    quad: &HaarQuadrature,
    table: &WignerTable,
    ell_max: HalfInt,
    tau_max: i64,
) -> Result<FullCoeff> {
    check_band(field.grid.n_t(), tau_max)?;
    if ell_max > quad.max_exact_ell || ell_max > table.ell_max {
        return Err(Error::QuadratureOrder(format!(
            "requested spins through {ell_max} beyond the prepared band"
        )));
    }
    let n_nodes = quad.nodes.len();
    if field.values.ncols() != n_nodes {
        return Err(Error::Shape("samples do not match quadrature nodes".into()));
    }
    // Circle coefficients per node.
    let mut per_node: Vec<Spectrum> = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        let series: Vec<Complex64> = (0..field.grid.n_t())
            .map(|k| field.values[[k, i]])
            .collect();
        per_node.push(dft(&series));
    }
    let mut out = FullCoeff::new();
    for tau in -tau_max..=tau_max {
        for ell in ell_max.spins_through() {
            let d = ell.dim();
            let mut mat = Array2::<Complex64>::zeros((d, d));
            for (i, w) in quad.weights.iter().enumerate() {
                let wf = per_node[i].at(tau) * *w;
                let t = table.matrix(i, ell);
                for m in 0..d {
                    for n in 0..d {
                        mat[[m, n]] += wf * t[[n, m]].conj();
                    }
                }
            }
            out.insert_dense(tau, ell, mat)?;
        }
    }
    Ok(out)
}

/// Inverts the circle side only, producing sphere coefficients with time
/// retained.  All modes must be dense, desk-scale, and within the grid band.
pub fn synthesize_partial(fc: &FullCoeff, grid: TimeGrid) -> Result<PartialCoeffField> {
    let mut ell_max = HalfInt::ZERO;
    for (key, block) in fc.iter() {
        let ell = key.ell_small().filter(|l| l.twice() <= STABLE_TWICE_ELL).ok_or_else(|| {
            Error::BadData(format!(
                "mode with 2l = {} cannot be densified; counterexample-scale \
                 modes stay in the sparse container",
                key.two_ell
            ))
        })?;
        let tau = key.tau_small().ok_or_else(|| {
            Error::BadData(format!("frequency {} too large for a dense grid", key.tau))
        })?;
        check_band(grid.n_t(), tau.abs())?;
        if matches!(block, CoeffBlock::Single { .. }) {
            return Err(Error::BadData(
                "single-entry blocks are not synthesized; they exist only as \
                 sparse counterexample data"
                    .into(),
            ));
        }
        ell_max = ell_max.max(ell);
    }
    let mut out = PartialCoeffField::zeros(grid, ell_max);
    for (key, block) in fc.iter() {
        let ell = key.ell_small().expect("validated above");
        let tau = key.tau_small().expect("validated above");
        let CoeffBlock::Dense(mat) = block else {
            unreachable!("validated above")
        };
        let stack = out.block_mut(ell).expect("allocated above");
        for k in 0..grid.n_t() {
            let phase = Complex64::from_polar(1.0, tau as f64 * grid.point(k));
            for m in 0..ell.dim() {
                for n in 0..ell.dim() {
                    stack[[k, m, n]] += mat[[m, n]] * phase;
                }
            }
        }
    }
    Ok(out)
}

/// Inverts the sphere side at every time, recovering samples at the
/// quadrature nodes.
pub fn synthesize(
    pc: &PartialCoeffField,
    quad: &HaarQuadrature,
    table: &WignerTable,
) -> Result<SampledField> {
    if pc.ell_max() > table.ell_max {
        return Err(Error::QuadratureOrder(format!(
            "Wigner table stops at spin {}, need {}",
            table.ell_max,
            pc.ell_max()
        )));
    }
    let n_t = pc.grid().n_t();
    let mut values = Array2::<Complex64>::zeros((n_t, quad.nodes.len()));
    for ell in pc.spins() {
        let d = ell.dim();
        let block = pc.block(ell).expect("spin present");
        let dim_factor = d as f64;
        for (i, _) in quad.nodes.iter().enumerate() {
            let t = table.matrix(i, ell);
            for k in 0..n_t {
                let mut tr = Complex64::new(0.0, 0.0);
                for m in 0..d {
                    for n in 0..d {
                        tr += t[[m, n]] * block[[k, n, m]];
                    }
                }
                values[[k, i]] += tr * dim_factor;
            }
        }
    }
    SampledField::new(pc.grid(), values)
}

/// Field norm in `L^2` of the normalized product measure.
pub fn l2_norm(field: &SampledField, quad: &HaarQuadrature) -> f64 {
    let n_t = field.grid.n_t();
    let mut acc = 0.0;
    for k in 0..n_t {
        for (i, w) in quad.weights.iter().enumerate() {
            acc += w * field.values[[k, i]].norm_sqr();
        }
    }
    (acc / n_t as f64).sqrt()
}

/// Scales every mode by `(<tau> <l>)^order`; the factorized smoothing (or
/// roughening, for negative order) multiplier.
pub fn sobolev_multiplier(fc: &FullCoeff, order: f64) -> Result<FullCoeff> {
    let mut out = FullCoeff::new();
    for (key, block) in fc.iter() {
        let ln_wt = ln_weight_torus(&key.tau);
        let ln_wl = ln_weight_su2(&key.two_ell);
        let ln_scale = order * (ln_wt + ln_wl);
        if ln_scale > 700.0 {
            return Err(Error::BadData(format!(
                "multiplier overflows double precision at mode (tau = {}, 2l = {})",
                key.tau, key.two_ell
            )));
        }
        let scale = ln_scale.exp();
        out.entries.insert(key.clone(), block.scaled(scale));
    }
    Ok(out)
}

/// Deterministic random dense coefficients supported on `|tau| <= tau_max`,
/// spins through `ell_max`, with a caller-supplied magnitude profile.
pub fn random_full_coeff(
    seed: u64,
    ell_max: HalfInt,
    tau_max: i64,
    profile: impl Fn(i64, HalfInt) -> f64,
) -> FullCoeff {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = FullCoeff::new();
    for tau in -tau_max..=tau_max {
        for ell in ell_max.spins_through() {
            let d = ell.dim();
            let amp = profile(tau, ell);
            let mat = Array2::from_shape_fn((d, d), |_| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * amp
            });
            out.insert_dense(tau, ell, mat).expect("shape by construction");
        }
    }
    out
}

/// Deterministic random partially transformed field: every matrix entry is a
/// trigonometric polynomial of degree `tau_band` with coefficients drawn
/// uniformly from the unit square, sampled on an `n_t`-point grid.
pub fn random_partial_field(
    seed: u64,
    n_t: usize,
    ell_max: HalfInt,
    tau_band: i64,
) -> Result<PartialCoeffField> {
    if tau_band < 0 {
        return Err(Error::BadData("frequency band must be nonnegative".into()));
    }
    check_band(n_t, tau_band)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = TimeGrid::new(n_t)?;
    let mut out = PartialCoeffField::zeros(grid, ell_max);
    for ell in ell_max.spins_through() {
        let d = ell.dim();
        let block = out.block_mut(ell).expect("zeros covers every spin");
        for row in 0..d {
            for col in 0..d {
                let coeffs: Vec<Complex64> = (-tau_band..=tau_band)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let spec = Spectrum { coeffs, min_freq: -tau_band };
                for (k, v) in idft(&spec, n_t).into_iter().enumerate() {
                    block[[k, row, col]] = v;
                }
            }
        }
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct CoeffRecord {
    two_ell: u64,
    tau: i64,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct CoeffFile {
    entries: Vec<CoeffRecord>,
}

/// Writes dense coefficients as JSON records `{two_ell, tau, re, im}`.
/// Counterexample-scale sparse modes are refused; export those as witness
/// tables instead.
pub fn write_coefficients<W: Write>(writer: W, fc: &FullCoeff) -> Result<()> {
    let mut entries = Vec::with_capacity(fc.len());
    for (key, block) in fc.iter() {
        let (Some(tau), Some(ell)) = (key.tau_small(), key.ell_small()) else {
            return Err(Error::BadData(format!(
                "mode (tau = {}, 2l = {}) does not fit the dense record format",
                key.tau, key.two_ell
            )));
        };
        let CoeffBlock::Dense(mat) = block else {
            return Err(Error::BadData(
                "single-entry blocks have no dense record format".into(),
            ));
        };
        let d = ell.dim();
        let re = (0..d)
            .map(|i| (0..d).map(|j| mat[[i, j]].re).collect())
            .collect();
        let im = (0..d)
            .map(|i| (0..d).map(|j| mat[[i, j]].im).collect())
            .collect();
        entries.push(CoeffRecord {
            two_ell: ell.twice(),
            tau,
            re,
            im,
        });
    }
    serde_json::to_writer_pretty(writer, &CoeffFile { entries })?;
    Ok(())
}

/// Reads coefficients written by [`write_coefficients`], validating shapes.
pub fn read_coefficients<R: Read>(reader: R) -> Result<FullCoeff> {
    let file: CoeffFile = serde_json::from_reader(reader)?;
    let mut out = FullCoeff::new();
    for rec in file.entries {
        let ell = HalfInt::from_twice(rec.two_ell);
        let d = ell.dim();
        if rec.re.len() != d || rec.im.len() != d {
            return Err(Error::Shape(format!(
                "record (tau = {}, 2l = {}) has {} rows, expected {d}",
                rec.tau,
                rec.two_ell,
                rec.re.len()
            )));
        }
        let mut mat = Array2::<Complex64>::zeros((d, d));
        for i in 0..d {
            if rec.re[i].len() != d || rec.im[i].len() != d {
                return Err(Error::Shape(format!(
                    "record (tau = {}, 2l = {}) row {i} has wrong length",
                    rec.tau, rec.two_ell
                )));
            }
            for j in 0..d {
                mat[[i, j]] = Complex64::new(rec.re[i][j], rec.im[i][j]);
            }
        }
        out.insert_dense(rec.tau, ell, mat)?;
    }
    Ok(out)
}

/// CSV rows `tau,ell,hs_norm` for decay plots, in key order.
pub fn write_decay_csv<W: Write>(mut writer: W, fc: &FullCoeff) -> Result<()> {
    writeln!(writer, "tau,ell,hs_norm")?;
    for (key, block) in fc.iter() {
        let ell_str = if (&key.two_ell % 2u8).is_zero() {
            (&key.two_ell / 2u8).to_string()
        } else {
            format!("{}.5", &key.two_ell / 2u8)
        };
        writeln!(writer, "{},{},{:e}", key.tau, ell_str, block.hs_norm())?;
    }
    Ok(())
}
