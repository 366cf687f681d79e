//! Mode-by-mode solution of `d/dt + a(t) X` on the product of the circle
//! and the rotation group.
//!
//! After both transforms the operator acts on each matrix entry of each
//! spin block as an independent scalar ODE on the circle,
//! `u'(t) + i m a(t) u(t) = f(t)`, where `m` is the row label of the entry.
//! Whether that equation admits a periodic solution for every right-hand
//! side depends only on the arithmetic of `m` times the mean of `a`:
//! nonresonant rows (`m a0` not an integer) invert unconditionally through
//! a gauge that reduces them to the constant-mean equation, while resonant
//! rows need one obstruction integral to vanish and then integrate
//! directly.  The mean is carried as an exact arithmetic class so the
//! resonant/nonresonant split never rests on floating-point comparison.

use ndarray::Array2;
use num_complex::Complex64;

use crate::diophantine::A0Class;
use crate::error::{Error, Result};
use crate::repr::HalfInt;
use crate::su2::gauss_legendre;
use crate::timefreq::{dft, idft, resample, spectral_derivative, Spectrum, TrigPoly, TAU};
use crate::transform::{FullCoeff, PartialCoeffField, TimeGrid};

/// Real trigonometric coefficient `a(t) = a0 + sum_k (c_k cos kt + s_k sin kt)`
/// with the mean kept as an exact arithmetic class.  The oscillating part is
/// plain floating point; only the mean enters resonance decisions.
#[derive(Clone, Debug)]
pub struct CoefficientA {
    mean: A0Class,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl CoefficientA {
    pub fn constant(mean: A0Class) -> Self {
        CoefficientA {
            mean,
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    /// `cos[k]` and `sin[k]` multiply `cos((k+1) t)` and `sin((k+1) t)`.
    pub fn new(mean: A0Class, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        if cos.iter().chain(&sin).any(|c| !c.is_finite()) {
            return Err(Error::BadData(
                "coefficient harmonics must be finite".into(),
            ));
        }
        Ok(CoefficientA { mean, cos, sin })
    }

    pub fn mean(&self) -> &A0Class {
        &self.mean
    }

    pub fn mean_value(&self) -> f64 {
        self.mean.value()
    }

    /// Highest oscillating harmonic.
    pub fn degree(&self) -> usize {
        self.cos.len().max(self.sin.len())
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut acc = self.mean.value();
        for (k, c) in self.cos.iter().enumerate() {
            acc += c * ((k + 1) as f64 * t).cos();
        }
        for (k, s) in self.sin.iter().enumerate() {
            acc += s * ((k + 1) as f64 * t).sin();
        }
        acc
    }

    /// Mean-zero primitive `A(t) = int_0^t (a(r) - a0) dr`, periodic with
    /// `A(0) = A(2 pi) = 0`.
    pub fn primitive(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (k, c) in self.cos.iter().enumerate() {
            let k1 = (k + 1) as f64;
            acc += c * (k1 * t).sin() / k1;
        }
        for (k, s) in self.sin.iter().enumerate() {
            let k1 = (k + 1) as f64;
            acc += s * (1.0 - (k1 * t).cos()) / k1;
        }
        acc
    }

    /// Full primitive `int_0^t a = A(t) + a0 t`; gains `2 pi a0` per turn.
    pub fn winding(&self, t: f64) -> f64 {
        self.primitive(t) + self.mean.value() * t
    }

    /// Two-time kernel phase `int_{t-s}^{t} a = A(t) - A(t-s) + a0 s`.
    pub fn kernel_phase(&self, t: f64, s: f64) -> f64 {
        self.primitive(t) - self.primitive(t - s) + self.mean.value() * s
    }

    /// The oscillating part `a(t) - a0` as an exact trigonometric polynomial.
    pub(crate) fn fluctuation_poly(&self) -> TrigPoly {
        TrigPoly::from_cos_sin(0.0, &self.cos, &self.sin)
    }
}

/// `kappa + m a0` without cancellation: for a rational mean the numerator
/// `2 q kappa + twice_m p` is formed in integers, so a tiny shifted
/// frequency is exact instead of a difference of large doubles.
fn shifted_frequency(mean: &A0Class, twice_m: i64, kappa: i64) -> f64 {
    match mean {
        A0Class::Rational { p, q } => {
            let num = 2 * *q as i128 * kappa as i128 + twice_m as i128 * *p as i128;
            num as f64 / (2.0 * *q as f64)
        }
        _ => kappa as f64 + 0.5 * twice_m as f64 * mean.value(),
    }
}

fn primitive_table(a: &CoefficientA, grid: TimeGrid) -> Vec<f64> {
    grid.points().iter().map(|&t| a.primitive(t)).collect()
}

fn unit_phase(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// Periodic solution of one nonresonant scalar mode, `u' + i m a(t) u = f`,
/// from samples of `f` on the uniform grid the samples define.
///
/// The gauge `v = e^{i m A} u` removes the oscillation of `a`, leaving the
/// constant-mean equation `v' + i m a0 v = e^{i m A} f`, which divides
/// exactly in frequency: no `kappa + m a0` vanishes precisely because the
/// row is nonresonant.  The output solves the equation with spectral
/// accuracy in the grid size; callers refine the grid first when `e^{i m A}`
/// carries more bandwidth than the data grid resolves.
pub fn solve_mode_nonresonant(
    a: &CoefficientA,
    twice_m: i64,
    samples: &[Complex64],
) -> Result<Vec<Complex64>> {
    if a.mean.resonates(twice_m) {
        return Err(Error::WrongBranch {
            twice_m,
            actual: "resonant",
            expected: "nonresonant",
        });
    }
    let n = samples.len();
    let grid = TimeGrid::new(n)?;
    let m = 0.5 * twice_m as f64;
    let prim = primitive_table(a, grid);
    let gauged: Vec<Complex64> = samples
        .iter()
        .zip(&prim)
        .map(|(f, &av)| f * unit_phase(m * av))
        .collect();
    let mut spec = dft(&gauged);
    let min_freq = spec.min_freq;
    for (idx, c) in spec.coeffs.iter_mut().enumerate() {
        let kappa = min_freq + idx as i64;
        *c /= Complex64::new(0.0, shifted_frequency(&a.mean, twice_m, kappa));
    }
    let v = idft(&spec, n);
    Ok(v
        .iter()
        .zip(&prim)
        .map(|(v, &av)| v * unit_phase(-m * av))
        .collect())
}

/// Gauged spectrum of a resonant mode: coefficients of
/// `G(t) = e^{i m winding(t)} f(t)`, which is periodic exactly because
/// `m a0` is an integer.
fn resonant_gauge_spectrum(
    a: &CoefficientA,
    twice_m: i64,
    samples: &[Complex64],
) -> Result<(Spectrum, Vec<f64>, i64)> {
    let k_res = a.mean.resonant_product(twice_m).ok_or(Error::WrongBranch {
        twice_m,
        actual: "nonresonant",
        expected: "resonant",
    })?;
    let n = samples.len();
    let grid = TimeGrid::new(n)?;
    let m = 0.5 * twice_m as f64;
    let prim = primitive_table(a, grid);
    let gauged: Vec<Complex64> = samples
        .iter()
        .enumerate()
        .map(|(j, f)| f * unit_phase(m * prim[j] + k_res as f64 * grid.point(j)))
        .collect();
    Ok((dft(&gauged), prim, k_res))
}

/// The obstruction integral `int_0^{2 pi} e^{i m winding(t)} f(t) dt` of a
/// resonant mode: the equation has a periodic solution exactly when it
/// vanishes.
pub fn obstruction_integral(
    a: &CoefficientA,
    twice_m: i64,
    samples: &[Complex64],
) -> Result<Complex64> {
    let (spec, _, _) = resonant_gauge_spectrum(a, twice_m, samples)?;
    Ok(TAU * spec.at(0))
}

/// Solves one resonant scalar mode against the obstruction-free part of the
/// data, returning the solution with `u(0) = 0` together with the
/// obstruction integral that was dropped.  Callers decide how large a
/// dropped obstruction they tolerate; the full kernel of the mode is the
/// line through `e^{-i m winding(t)}`, so any multiple of that may be added.
pub fn solve_mode_resonant(
    a: &CoefficientA,
    twice_m: i64,
    samples: &[Complex64],
) -> Result<(Vec<Complex64>, Complex64)> {
    let (spec, prim, k_res) = resonant_gauge_spectrum(a, twice_m, samples)?;
    let obstruction = TAU * spec.at(0);
    let n = samples.len();
    let m = 0.5 * twice_m as f64;
    // Antiderivative of the mean-free gauged data, pinned to 0 at t = 0:
    // w(t) = sum_{kappa != 0} G_kappa (e^{i kappa t} - 1) / (i kappa).
    let mut anti = spec.clone();
    let mut at_zero = Complex64::new(0.0, 0.0);
    let min_freq = anti.min_freq;
    for (idx, c) in anti.coeffs.iter_mut().enumerate() {
        let kappa = min_freq + idx as i64;
        if kappa == 0 {
            *c = Complex64::new(0.0, 0.0);
        } else {
            *c /= Complex64::new(0.0, kappa as f64);
            at_zero += *c;
        }
    }
    let zero_idx = (-min_freq) as usize;
    anti.coeffs[zero_idx] = -at_zero;
    let w = idft(&anti, n);
    let grid = TimeGrid::new(n)?;
    let u = w
        .iter()
        .enumerate()
        .map(|(j, w)| w * unit_phase(-(m * prim[j] + k_res as f64 * grid.point(j))))
        .collect();
    Ok((u, obstruction))
}

/// The operator applied spectrally, entrywise: time derivative of each
/// entry series plus `i m a(t)` times it, on the field's own grid.  Exact
/// for band-limited entries; constant series short-circuit the transform so
/// time-flat data stays exactly flat.
pub fn apply_l(a: &CoefficientA, u: &PartialCoeffField) -> PartialCoeffField {
    let grid = u.grid();
    let n_t = grid.n_t();
    let a_vals: Vec<f64> = grid.points().iter().map(|&t| a.eval(t)).collect();
    let mut out = PartialCoeffField::zeros(grid, u.ell_max());
    for ell in u.spins() {
        let d = ell.dim();
        let Some(src) = u.block(ell) else { continue };
        let src = src.clone();
        let dst = out.block_mut(ell).expect("same spins allocated");
        for (row, twice_m) in ell.twice_m_values().enumerate() {
            let m = 0.5 * twice_m as f64;
            for col in 0..d {
                let series: Vec<Complex64> = (0..n_t).map(|k| src[[k, row, col]]).collect();
                if series.iter().all(|z| z.norm_sqr() == 0.0) {
                    continue;
                }
                let flat = series.iter().all(|z| *z == series[0]);
                let deriv = if flat {
                    vec![Complex64::new(0.0, 0.0); n_t]
                } else {
                    spectral_derivative(&series)
                };
                for k in 0..n_t {
                    dst[[k, row, col]] =
                        deriv[k] + Complex64::new(0.0, m * a_vals[k]) * series[k];
                }
            }
        }
    }
    out
}

/// Constant central entries at every integer spin: the symbol vanishes on
/// the `m = 0` row and the entries carry no time dependence, so the
/// operator annihilates this field exactly, for every coefficient.  The
/// entries do not decay in the spin, which pins the smoothness classifier
/// at bounded order zero: a one-parameter-per-spin family of obstructions
/// to improving "bounded" to "rapidly decaying" on the solution side.
pub fn kernel_witness(n_t: usize, ell_max: HalfInt) -> Result<PartialCoeffField> {
    let grid = TimeGrid::new(n_t)?;
    let mut out = PartialCoeffField::zeros(grid, ell_max);
    for ell in ell_max.spins_through().filter(|e| e.is_integer()) {
        let center = (ell.twice() / 2) as usize;
        let block = out.block_mut(ell).expect("allocated");
        for k in 0..n_t {
            block[[k, center, center]] = Complex64::new(1.0, 0.0);
        }
    }
    Ok(out)
}

/// The same witness in doubly transformed form: unit mass at time frequency
/// zero, central entry, every integer spin.
pub fn kernel_witness_full(ell_max: HalfInt) -> Result<FullCoeff> {
    let mut out = FullCoeff::new();
    for ell in ell_max.spins_through().filter(|e| e.is_integer()) {
        let d = ell.dim();
        let center = (ell.twice() / 2) as usize;
        let mut mat = Array2::zeros((d, d));
        mat[[center, center]] = Complex64::new(1.0, 0.0);
        out.insert_dense(0, ell, mat)?;
    }
    Ok(out)
}

/// What `solve` does with a resonant entry whose obstruction integral
/// exceeds tolerance.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ObstructionPolicy {
    /// Fail the whole solve: the data is not in the solvable set.
    Error,
    /// Zero that entry's solution and record it.
    Skip,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Refinement factor from the data grid to the working grid.  The gauge
    /// phase carries more bandwidth than the data, so the working grid must
    /// out-resolve the data grid for the residual to vanish spectrally.
    pub upsample: usize,
    /// Obstruction tolerance, relative to `1 + sup |f|`.
    pub compat_rel_tol: f64,
    pub on_obstruction: ObstructionPolicy,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            upsample: 4,
            compat_rel_tol: 1e-9,
            on_obstruction: ObstructionPolicy::Error,
        }
    }
}

/// A resonant entry whose data violated compatibility and was skipped.
#[derive(Clone, Debug)]
pub struct SkippedMode {
    pub ell: HalfInt,
    pub twice_m: i64,
    pub twice_n: i64,
    pub obstruction: f64,
}

#[derive(Debug)]
pub struct SolveOutcome {
    /// The solution field, on the refined working grid.
    pub solution: PartialCoeffField,
    /// Rows `(spin, 2m)` whose label resonates with the mean.
    pub resonant_rows: Vec<(HalfInt, i64)>,
    pub skipped: Vec<SkippedMode>,
    /// Largest pointwise residual of the mode equations on the working grid.
    pub residual_sup: f64,
    pub rhs_sup: f64,
}

/// Solves `u' + i m a(t) u = f` for every entry of every spin block,
/// returning the solution on a grid refined by `cfg.upsample` together with
/// per-solve diagnostics.  Fails (or skips, per policy) on resonant entries
/// whose obstruction integral exceeds `cfg.compat_rel_tol * (1 + sup |f|)`.
pub fn solve(
    a: &CoefficientA,
    f: &PartialCoeffField,
    cfg: &SolverConfig,
) -> Result<SolveOutcome> {
    let upsample = cfg.upsample.max(1);
    let work = f.grid().refine(upsample);
    let n_work = work.n_t();
    let rhs_sup = f.max_abs();
    let tol = cfg.compat_rel_tol * (1.0 + rhs_sup);
    let a_vals: Vec<f64> = work.points().iter().map(|&t| a.eval(t)).collect();
    let mut solution = PartialCoeffField::zeros(work, f.ell_max());
    let mut resonant_rows = Vec::new();
    let mut skipped = Vec::new();
    let mut residual_sup = 0.0f64;
    for ell in f.spins() {
        let d = ell.dim();
        for (row, twice_m) in ell.twice_m_values().enumerate() {
            let resonant = a.mean.resonates(twice_m);
            if resonant {
                resonant_rows.push((ell, twice_m));
            }
            for col in 0..d {
                let series = f.mode_series(ell, row, col).expect("spin present");
                if series.iter().all(|z| z.norm_sqr() == 0.0) {
                    continue;
                }
                let fine = resample(&series, upsample);
                let u = if resonant {
                    let (u, obstruction) = solve_mode_resonant(a, twice_m, &fine)?;
                    if obstruction.norm() > tol {
                        let twice_n = 2 * col as i64 - ell.twice() as i64;
                        match cfg.on_obstruction {
                            ObstructionPolicy::Error => {
                                return Err(Error::NoSolution {
                                    two_ell: ell.twice(),
                                    twice_m,
                                    twice_n,
                                    integral: obstruction,
                                    magnitude: obstruction.norm(),
                                    tol,
                                });
                            }
                            ObstructionPolicy::Skip => {
                                skipped.push(SkippedMode {
                                    ell,
                                    twice_m,
                                    twice_n,
                                    obstruction: obstruction.norm(),
                                });
                                continue;
                            }
                        }
                    }
                    u
                } else {
                    solve_mode_nonresonant(a, twice_m, &fine)?
                };
                let deriv = spectral_derivative(&u);
                let m = 0.5 * twice_m as f64;
                for k in 0..n_work {
                    let lhs = deriv[k] + Complex64::new(0.0, m * a_vals[k]) * u[k];
                    residual_sup = residual_sup.max((lhs - fine[k]).norm());
                }
                let block = solution.block_mut(ell).expect("allocated");
                for k in 0..n_work {
                    block[[k, row, col]] = u[k];
                }
            }
        }
    }
    Ok(SolveOutcome {
        solution,
        resonant_rows,
        skipped,
        residual_sup,
        rhs_sup,
    })
}

/// Moves data into the solvable set: for each resonant entry the gauged
/// mean is subtracted along `e^{-i m winding(t)}`, the direction spanning
/// that mode's obstruction.  Returns the corrected field on a grid refined
/// by `upsample` (the correction direction carries the gauge bandwidth, so
/// it cannot be represented faithfully on a coarse data grid) and the
/// number of entries that changed.
pub fn project_into_compatible(
    a: &CoefficientA,
    f: &PartialCoeffField,
    upsample: usize,
) -> Result<(PartialCoeffField, usize)> {
    let upsample = upsample.max(1);
    let work = f.grid().refine(upsample);
    let n_work = work.n_t();
    let mut out = PartialCoeffField::zeros(work, f.ell_max());
    let prim = primitive_table(a, work);
    let mut adjusted = 0usize;
    for ell in f.spins() {
        let d = ell.dim();
        for (row, twice_m) in ell.twice_m_values().enumerate() {
            let resonant = a.mean.resonates(twice_m);
            let m = 0.5 * twice_m as f64;
            for col in 0..d {
                let series = f.mode_series(ell, row, col).expect("spin present");
                let mut fine = resample(&series, upsample);
                if resonant && fine.iter().any(|z| z.norm_sqr() > 0.0) {
                    let k_res = a.mean.resonant_product(twice_m).expect("resonant row");
                    let mut mean = Complex64::new(0.0, 0.0);
                    for (j, v) in fine.iter().enumerate() {
                        mean += v * unit_phase(m * prim[j] + k_res as f64 * work.point(j));
                    }
                    mean /= n_work as f64;
                    if mean.norm_sqr() > 0.0 {
                        for (j, v) in fine.iter_mut().enumerate() {
                            *v -= mean
                                * unit_phase(-(m * prim[j] + k_res as f64 * work.point(j)));
                        }
                        adjusted += 1;
                    }
                }
                let block = out.block_mut(ell).expect("allocated");
                for k in 0..n_work {
                    block[[k, row, col]] = fine[k];
                }
            }
        }
    }
    Ok((out, adjusted))
}

/// Which one-sided kernel to integrate: backward reaches into the past of
/// `t` with weight `e^{-lambda s}`, forward into the future with
/// `e^{+lambda s}`.  Both express the same periodic solution.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum KernelForm {
    Backward,
    Forward,
}

/// Periodic solution of `u' + lambda u = f` by exact division in frequency,
/// for `lambda` off the imaginary integers.
pub fn constant_mode_spectral(lambda: Complex64, f: &Spectrum) -> Result<Spectrum> {
    let mut out = f.clone();
    let min_freq = out.min_freq;
    for (idx, c) in out.coeffs.iter_mut().enumerate() {
        let tau = min_freq + idx as i64;
        let denom = lambda + Complex64::new(0.0, tau as f64);
        if denom.norm() < 1e-12 {
            return Err(Error::BadData(format!(
                "lambda = {lambda} collides with imaginary integer frequency {tau}"
            )));
        }
        *c /= denom;
    }
    Ok(out)
}

/// The same solution through a one-sided kernel: for the backward form
/// `u(t) = (1 - e^{-2 pi lambda})^{-1} int_0^{2 pi} e^{-lambda s} f(t-s) ds`,
/// integrated with Gauss-Legendre nodes (the integrand is analytic in `s`
/// but not periodic, so uniform sums would stall at low order).  Returns
/// samples on a uniform grid of `n_out` points.
pub fn constant_mode_quadrature(
    lambda: Complex64,
    f: &Spectrum,
    form: KernelForm,
    n_nodes: usize,
    n_out: usize,
) -> Result<Vec<Complex64>> {
    let grid = TimeGrid::new(n_out)?;
    let pref = kernel_prefactor(Complex64::new(1.0, 0.0) - (-TAU * lambda).exp(), form)?;
    let (nodes, weights) = gauss_legendre(n_nodes);
    let mut out = Vec::with_capacity(n_out);
    for j in 0..n_out {
        let t = grid.point(j);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in nodes.iter().zip(&weights) {
            let s = std::f64::consts::PI * (x + 1.0);
            let term = match form {
                KernelForm::Backward => (-lambda * s).exp() * f.eval(t - s),
                KernelForm::Forward => (lambda * s).exp() * f.eval(t + s),
            };
            acc += term * (std::f64::consts::PI * w);
        }
        out.push(pref * acc);
    }
    Ok(out)
}

/// One-sided kernel quadrature for a nonresonant variable-coefficient mode:
/// the backward form integrates `e^{-i m phase} f(t-s)` with the two-time
/// kernel phase `int_{t-s}^t a`.  Quadratic cost in the node counts; this
/// is the cross-check for the spectral path, not the production solver.
pub fn mode_quadrature(
    a: &CoefficientA,
    twice_m: i64,
    f: &Spectrum,
    form: KernelForm,
    n_nodes: usize,
    n_out: usize,
) -> Result<Vec<Complex64>> {
    if a.mean.resonates(twice_m) {
        return Err(Error::WrongBranch {
            twice_m,
            actual: "resonant",
            expected: "nonresonant",
        });
    }
    let grid = TimeGrid::new(n_out)?;
    let m = 0.5 * twice_m as f64;
    // 1 - e^{-2 pi i m a0}, from the exact residue for rational means.
    let pref = kernel_prefactor(a.mean.divisor(twice_m), form)?;
    let (nodes, weights) = gauss_legendre(n_nodes);
    let mut out = Vec::with_capacity(n_out);
    for j in 0..n_out {
        let t = grid.point(j);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in nodes.iter().zip(&weights) {
            let s = std::f64::consts::PI * (x + 1.0);
            let term = match form {
                KernelForm::Backward => {
                    unit_phase(-m * a.kernel_phase(t, s)) * f.eval(t - s)
                }
                KernelForm::Forward => {
                    unit_phase(m * a.kernel_phase(t + s, s)) * f.eval(t + s)
                }
            };
            acc += term * (std::f64::consts::PI * w);
        }
        out.push(pref * acc);
    }
    Ok(out)
}

/// Prefactor of the chosen kernel form from the backward divisor
/// `1 - e^{-2 pi lambda}`: the forward form flips both the sign and the
/// exponent, giving `-(1 - e^{+2 pi lambda})^{-1}`.
fn kernel_prefactor(backward_divisor: Complex64, form: KernelForm) -> Result<Complex64> {
    if backward_divisor.norm() < 1e-10 {
        return Err(Error::BadData(format!(
            "kernel prefactor singular: |1 - e^{{-2 pi lambda}}| = {:.3e}",
            backward_divisor.norm()
        )));
    }
    Ok(match form {
        KernelForm::Backward => 1.0 / backward_divisor,
        // 1 - e^{+2 pi lambda} = -e^{+2 pi lambda} (1 - e^{-2 pi lambda}).
        KernelForm::Forward => {
            let one = Complex64::new(1.0, 0.0);
            let e_plus = one - backward_divisor; // e^{-2 pi lambda}
            -1.0 / (one - 1.0 / e_plus)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify_partial_smooth, Verdict};
    use crate::transform::random_partial_field;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sample_on_grid(n: usize, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        let grid = TimeGrid::new(n).unwrap();
        grid.points().iter().map(|&t| f(t)).collect()
    }

    fn sup_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn coefficient_primitive_identities() {
        let a = CoefficientA::new(
            A0Class::rational(1, 2).unwrap(),
            vec![0.3],
            vec![0.0, 0.2],
        )
        .unwrap();
        assert!((a.eval(0.7) - (0.5 + 0.3 * 0.7f64.cos() + 0.2 * 1.4f64.sin())).abs() < 1e-15);
        assert_eq!(a.primitive(0.0), 0.0);
        assert!(a.primitive(TAU).abs() < 1e-14);
        assert!((a.winding(TAU) - 0.5 * TAU).abs() < 1e-13);
        assert!(a.kernel_phase(1.3, 0.0).abs() < 1e-15);
        // Centered difference of the primitive recovers the fluctuation.
        let h = 1e-5;
        for t in [0.4f64, 2.0, 5.1] {
            let slope = (a.primitive(t + h) - a.primitive(t - h)) / (2.0 * h);
            assert!((slope - (a.eval(t) - 0.5)).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_coefficient_modes_match_closed_forms() {
        let a = CoefficientA::constant(A0Class::rational(1, 2).unwrap());
        // m = 1: u' + (i/2) u = c has the constant solution -2 i c.
        let c = Complex64::new(2.0, 1.0);
        let u = solve_mode_nonresonant(&a, 2, &vec![c; 16]).unwrap();
        for v in &u {
            assert!((v - Complex64::new(0.0, -2.0) * c).norm() < 1e-12);
        }
        // f = e^{it}: u = e^{it} / (i (1 + 1/2)).
        let f = sample_on_grid(16, unit_phase);
        let u = solve_mode_nonresonant(&a, 2, &f).unwrap();
        let expect = sample_on_grid(16, |t| unit_phase(t) / Complex64::new(0.0, 1.5));
        assert!(sup_diff(&u, &expect) < 1e-12);
        // A third of an integer mean: f = 1, m = 1 gives |u| = 3 exactly.
        let third = CoefficientA::constant(A0Class::rational(1, 3).unwrap());
        let ones = vec![Complex64::new(1.0, 0.0); 16];
        let u = solve_mode_nonresonant(&third, 2, &ones).unwrap();
        for v in &u {
            assert!((v.norm() - 3.0).abs() < 1e-12);
        }
        // Wrong branch is rejected exactly, not by float comparison.
        assert!(matches!(
            solve_mode_nonresonant(&a, 4, &ones),
            Err(Error::WrongBranch { .. })
        ));
    }

    #[test]
    fn resonant_modes_integrate_with_pinned_start() {
        let a = CoefficientA::constant(A0Class::integer(0));
        // f = e^{it}, m anything (all labels resonate at mean zero):
        // u(t) = (e^{it} - 1) / i with u(0) = 0.
        let f = sample_on_grid(16, unit_phase);
        let (u, obstruction) = solve_mode_resonant(&a, 2, &f).unwrap();
        assert!(obstruction.norm() < 1e-14);
        let expect = sample_on_grid(16, |t| {
            (unit_phase(t) - 1.0) / Complex64::new(0.0, 1.0)
        });
        assert!(sup_diff(&u, &expect) < 1e-12);
        // f = cos t integrates to sin t.
        let f = sample_on_grid(16, |t| Complex64::new(t.cos(), 0.0));
        let (u, _) = solve_mode_resonant(&a, 0, &f).unwrap();
        let expect = sample_on_grid(16, |t| Complex64::new(t.sin(), 0.0));
        assert!(sup_diff(&u, &expect) < 1e-12);
        // Constant data is pure obstruction: integral 2 pi.
        let ones = vec![Complex64::new(1.0, 0.0); 16];
        let obstruction = obstruction_integral(&a, 0, &ones).unwrap();
        assert!((obstruction - Complex64::new(TAU, 0.0)).norm() < 1e-13);
        // The resonant branch rejects nonresonant labels.
        let half = CoefficientA::constant(A0Class::rational(1, 2).unwrap());
        assert!(matches!(
            solve_mode_resonant(&half, 2, &ones),
            Err(Error::WrongBranch { .. })
        ));
    }

    #[test]
    fn kernel_family_is_annihilated_exactly() {
        let a = CoefficientA::new(
            A0Class::rational(1, 2).unwrap(),
            vec![1.0],
            vec![],
        )
        .unwrap();
        let witness = kernel_witness(12, HalfInt::from_int(3)).unwrap();
        let image = apply_l(&a, &witness);
        assert_eq!(image.max_abs(), 0.0);
        // Flat in the spin: bounded at order zero, not rapidly decaying.
        let report = classify_partial_smooth(&witness, 2, 4).unwrap();
        assert_eq!(report.verdict, Verdict::PolyBounded { order: 0 });
        assert_ne!(report.verdict, Verdict::RapidDecay);
        // Same verdict through the doubly transformed container.
        let full = kernel_witness_full(HalfInt::from_int(3)).unwrap();
        let full_report = crate::classify::classify_full(&full, 4).unwrap();
        assert_eq!(full_report.verdict, Verdict::PolyBounded { order: 0 });
    }

    #[test]
    fn apply_l_matches_hand_computation() {
        let a = CoefficientA::new(
            A0Class::rational(1, 2).unwrap(),
            vec![0.4],
            vec![],
        )
        .unwrap();
        // Single entry u = e^{2it} at spin 1, row m = 1:
        // (L u)(t) = (2i + i a(t)) e^{2it}.
        let grid = TimeGrid::new(16).unwrap();
        let mut u = PartialCoeffField::zeros(grid, HalfInt::from_int(1));
        {
            let block = u.block_mut(HalfInt::from_int(1)).unwrap();
            for k in 0..16 {
                block[[k, 2, 0]] = unit_phase(2.0 * grid.point(k));
            }
        }
        let image = apply_l(&a, &u);
        let block = image.block(HalfInt::from_int(1)).unwrap();
        for k in 0..16 {
            let t = grid.point(k);
            let expect = Complex64::new(0.0, 2.0 + a.eval(t)) * unit_phase(2.0 * t);
            assert!((block[[k, 2, 0]] - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn field_solve_meets_residual_invariant_after_projection() {
        let a = CoefficientA::new(
            A0Class::rational(1, 2).unwrap(),
            vec![0.3],
            vec![0.0, 0.2],
        )
        .unwrap();
        let f = random_partial_field(7, 16, HalfInt::from_int(2), 3).unwrap();
        // Rows with 2m in {-4, 0, 4} resonate against mean 1/2, and random
        // data violates their compatibility, so solve must refuse...
        let err = solve(&a, &f, &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NoSolution { .. }));
        // ...but the projected data solves with a spectrally small residual.
        let (f_ok, adjusted) = project_into_compatible(&a, &f, 8).unwrap();
        assert!(adjusted > 0);
        let cfg = SolverConfig {
            upsample: 1,
            ..SolverConfig::default()
        };
        let outcome = solve(&a, &f_ok, &cfg).unwrap();
        assert!(outcome.skipped.is_empty());
        assert!(!outcome.resonant_rows.is_empty());
        assert!(
            outcome.residual_sup <= 1e-8 * (1.0 + outcome.rhs_sup),
            "residual {} vs rhs {}",
            outcome.residual_sup,
            outcome.rhs_sup
        );
        // Independent check: push the solution back through the operator on
        // the working grid and compare with the projected data.
        let image = apply_l(&a, &outcome.solution);
        let mut worst = 0.0f64;
        for ell in f_ok.spins() {
            let d = ell.dim();
            let lhs = image.block(ell).unwrap();
            let rhs = f_ok.block(ell).unwrap();
            for k in 0..f_ok.grid().n_t() {
                for i in 0..d {
                    for j in 0..d {
                        worst = worst.max((lhs[[k, i, j]] - rhs[[k, i, j]]).norm());
                    }
                }
            }
        }
        assert!(worst <= 1e-8 * (1.0 + outcome.rhs_sup));
    }

    #[test]
    fn skip_policy_records_obstructed_entries() {
        let a = CoefficientA::constant(A0Class::integer(0));
        let grid = TimeGrid::new(8).unwrap();
        let mut f = PartialCoeffField::zeros(grid, HalfInt::ZERO);
        {
            let block = f.block_mut(HalfInt::ZERO).unwrap();
            for k in 0..8 {
                block[[k, 0, 0]] = Complex64::new(1.0, 0.0);
            }
        }
        let cfg = SolverConfig {
            on_obstruction: ObstructionPolicy::Skip,
            ..SolverConfig::default()
        };
        let outcome = solve(&a, &f, &cfg).unwrap();
        assert_eq!(outcome.skipped.len(), 1);
        assert!((outcome.skipped[0].obstruction - TAU).abs() < 1e-12);
        assert_eq!(outcome.solution.max_abs(), 0.0);
        // Projection of pure obstruction removes the data entirely.
        let (f_ok, adjusted) = project_into_compatible(&a, &f, 2).unwrap();
        assert_eq!(adjusted, 1);
        assert!(f_ok.max_abs() < 1e-14);
    }

    #[test]
    fn one_sided_kernels_agree_with_spectral_division() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let lambda = loop {
                let cand = Complex64::new(
                    rng.gen_range(-1.5..1.5),
                    rng.gen_range(-3.0..3.0),
                );
                if (Complex64::new(1.0, 0.0) - (-TAU * cand).exp()).norm() > 0.1 {
                    break cand;
                }
            };
            let coeffs: Vec<Complex64> = (0..13)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let f = Spectrum {
                coeffs,
                min_freq: -6,
            };
            let exact = constant_mode_spectral(lambda, &f).unwrap();
            let on_grid: Vec<Complex64> = idft(&exact, 24);
            let back =
                constant_mode_quadrature(lambda, &f, KernelForm::Backward, 80, 24).unwrap();
            let fwd =
                constant_mode_quadrature(lambda, &f, KernelForm::Forward, 80, 24).unwrap();
            assert!(sup_diff(&back, &on_grid) < 1e-11, "{}", sup_diff(&back, &on_grid));
            assert!(sup_diff(&fwd, &on_grid) < 1e-11);
            assert!(sup_diff(&back, &fwd) < 1e-11);
        }
    }

    #[test]
    fn variable_coefficient_quadrature_cross_checks_spectral_path() {
        let a = CoefficientA::new(
            A0Class::rational(1, 2).unwrap(),
            vec![1.0],
            vec![],
        )
        .unwrap();
        let f = Spectrum {
            coeffs: vec![
                Complex64::new(0.3, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.5),
            ],
            min_freq: -1,
        };
        let n_out = 64;
        let samples: Vec<Complex64> = idft(&f, n_out);
        let spectral = solve_mode_nonresonant(&a, 2, &samples).unwrap();
        let back = mode_quadrature(&a, 2, &f, KernelForm::Backward, 96, n_out).unwrap();
        let fwd = mode_quadrature(&a, 2, &f, KernelForm::Forward, 96, n_out).unwrap();
        assert!(sup_diff(&back, &spectral) < 1e-9, "{}", sup_diff(&back, &spectral));
        assert!(sup_diff(&fwd, &spectral) < 1e-9);
        assert!(sup_diff(&back, &fwd) < 1e-10);
    }
}
