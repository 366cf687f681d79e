//! The gauge transform that conjugates the variable-coefficient operator to
//! its constant-mean normal form.
//!
//! With `A` the mean-zero primitive of the coefficient's oscillation, the
//! map multiplying each row-`m` entry by `e^{i m A(t)}` turns
//! `d/dt + i m a(t)` into `d/dt + i m a0`: one unimodular multiplier per
//! row absorbs the whole oscillating part.  Everything here acts on partial
//! coefficients directly; nothing is synthesized back to spatial samples.

use num_complex::Complex64;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::repr::{hs_norm, HalfInt};
use crate::solver::{apply_l, CoefficientA};
use crate::timefreq::TrigPoly;
use crate::transform::{PartialCoeffField, TimeGrid};

/// Time-sampled gauge phases `e^{i m A(t)}`, one row per doubled label.
/// Unimodular by construction, and exactly one on the `m = 0` row.
#[derive(Clone, Debug)]
pub struct GaugePhase {
    grid: TimeGrid,
    rows: BTreeMap<i64, Vec<Complex64>>,
}

impl GaugePhase {
    /// Phases for every row label appearing through `ell_max`.
    pub fn new(a: &CoefficientA, grid: TimeGrid, ell_max: HalfInt) -> Self {
        let prim: Vec<f64> = grid.points().iter().map(|&t| a.primitive(t)).collect();
        let top = ell_max.twice() as i64;
        let mut rows = BTreeMap::new();
        for twice_m in -top..=top {
            let samples = if twice_m == 0 {
                vec![Complex64::new(1.0, 0.0); grid.n_t()]
            } else {
                let m = 0.5 * twice_m as f64;
                prim.iter()
                    .map(|&av| Complex64::from_polar(1.0, m * av))
                    .collect()
            };
            rows.insert(twice_m, samples);
        }
        GaugePhase { grid, rows }
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    /// Phase sample for one row label at one grid index.
    pub fn at(&self, twice_m: i64, k: usize) -> Option<Complex64> {
        self.rows.get(&twice_m).map(|r| r[k])
    }
}

/// Direction of the gauge: `Plus` applies `e^{i m A(t)}`, `Minus` its exact
/// complex conjugate, so the two compose to the identity up to one rounding
/// of `cos^2 + sin^2` per entry.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GaugeSign {
    Plus,
    Minus,
}

/// The gauge transform on partial coefficients: every entry of row label
/// `m` is multiplied by `e^{sign * i m A(t)}`.  A constant coefficient has
/// `A = 0` and the map is the identity, bit for bit.
pub fn psi(a: &CoefficientA, u: &PartialCoeffField, sign: GaugeSign) -> PartialCoeffField {
    let phase = GaugePhase::new(a, u.grid(), u.ell_max());
    let n_t = u.grid().n_t();
    let mut out = u.clone();
    for ell in u.ell_max().spins_through() {
        let d = ell.dim();
        let Some(block) = out.block_mut(ell) else { continue };
        for (row, twice_m) in ell.twice_m_values().enumerate() {
            if twice_m == 0 {
                continue;
            }
            for k in 0..n_t {
                let p = match sign {
                    GaugeSign::Plus => phase.at(twice_m, k).expect("row present"),
                    GaugeSign::Minus => phase.at(twice_m, k).expect("row present").conj(),
                };
                for col in 0..d {
                    block[[k, row, col]] *= p;
                }
            }
        }
    }
    out
}

/// Sup-norm residual of the conjugation identity: the gauge applied after
/// the variable-coefficient operator must match the constant-mean operator
/// applied after the gauge.  Both sides are evaluated on a grid refined
/// four-fold, because the gauged field carries the phase's bandwidth on top
/// of the data's own.
pub fn verify_intertwine(a: &CoefficientA, u: &PartialCoeffField) -> Result<f64> {
    let fine = u.refined(4);
    let lhs = psi(a, &apply_l(a, &fine), GaugeSign::Plus);
    let normal_form = CoefficientA::constant(a.mean().clone());
    let rhs = apply_l(&normal_form, &psi(a, &fine, GaugeSign::Plus));
    let mut worst = 0.0f64;
    for ell in fine.spins() {
        let d = ell.dim();
        let lb = lhs.block(ell).expect("spin present");
        let rb = rhs.block(ell).expect("spin present");
        for k in 0..fine.grid().n_t() {
            for i in 0..d {
                for j in 0..d {
                    worst = worst.max((lb[[k, i, j]] - rb[[k, i, j]]).norm());
                }
            }
        }
    }
    Ok(worst)
}

/// One fitted derivative-growth law: the sup over time of the `alpha`-th
/// time derivative of `e^{i m A(t)}`, as a power of `m`.
#[derive(Clone, Debug)]
pub struct GrowthFit {
    pub alpha: u32,
    /// Least-squares slope of `ln sup` against `ln m`.
    pub exponent: f64,
    /// The measured suprema, one per requested label.
    pub sups: Vec<(i64, f64)>,
}

/// Measures how fast derivatives of the gauge phase grow in the row label:
/// `d^alpha/dt^alpha e^{i m A} = B_alpha e^{i m A}` with
/// `B_1 = i m (a - a0)` and `B_{alpha+1} = B_alpha' + B_alpha B_1`, all
/// exact trigonometric polynomials, so the supremum needs no sampling of
/// the oscillatory exponential itself.  The fitted exponent of order
/// `alpha` sits at `alpha` because the top term of `B_alpha` is
/// `(i m (a - a0))^alpha`.
pub fn gauge_growth_check(
    a: &CoefficientA,
    alpha_max: u32,
    ms: &[i64],
) -> Result<Vec<GrowthFit>> {
    if ms.len() < 2 {
        return Err(Error::BadData(
            "fitting a growth exponent needs at least two labels".into(),
        ));
    }
    if ms.iter().any(|&m| m <= 0) {
        return Err(Error::BadData("growth labels must be positive".into()));
    }
    let mut out = Vec::with_capacity(alpha_max as usize + 1);
    for alpha in 0..=alpha_max {
        let mut sups = Vec::with_capacity(ms.len());
        for &m in ms {
            let sup = if alpha == 0 {
                1.0
            } else {
                let b1 = a
                    .fluctuation_poly()
                    .mul(&TrigPoly::constant(Complex64::new(0.0, m as f64)));
                let mut b = b1.clone();
                for _ in 1..alpha {
                    b = b.derivative().add(&b.mul(&b1));
                }
                let dense = 8 * (b.deg().unsigned_abs() as usize) + 64;
                b.sup_on_grid(dense)
            };
            sups.push((m, sup));
        }
        let exponent = if alpha == 0 {
            0.0
        } else {
            fit_slope(
                &sups
                    .iter()
                    .map(|&(m, s)| ((m as f64).ln(), s.ln()))
                    .collect::<Vec<_>>(),
            )
        };
        out.push(GrowthFit {
            alpha,
            exponent,
            sups,
        });
    }
    Ok(out)
}

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Pointwise Hilbert-Schmidt norms of one spin block, for invariance checks.
pub fn block_hs_profile(u: &PartialCoeffField, ell: HalfInt) -> Option<Vec<f64>> {
    let block = u.block(ell)?;
    let d = ell.dim();
    let n_t = u.grid().n_t();
    let mut out = Vec::with_capacity(n_t);
    for k in 0..n_t {
        let slice = block.slice(ndarray::s![k, .., ..]);
        let mut mat = ndarray::Array2::zeros((d, d));
        mat.assign(&slice);
        out.push(hs_norm(mat.view()));
    }
    Some(out)
}
