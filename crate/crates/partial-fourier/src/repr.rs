//! Representation bookkeeping shared by every other module.
//!
//! Irreducible unitary representations of the 3-sphere group are labelled
//! by spins `l = 0, 1/2, 1, 3/2, ...`; the circle factor is labelled by an
//! integer frequency `tau`.  Spins and their row labels `m` are stored as
//! doubled integers so that half-integers stay exact.  Matrix rows and
//! columns are ordered by increasing `m`, from `-l` to `l`.

use ndarray::ArrayView2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A non-negative half-integer stored as `2l`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HalfInt {
    twice: u64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };
    pub const ONE: HalfInt = HalfInt { twice: 2 };

    pub fn from_twice(twice: u64) -> Self {
        HalfInt { twice }
    }

    pub fn from_int(ell: u64) -> Self {
        HalfInt { twice: 2 * ell }
    }

    pub fn twice(self) -> u64 {
        self.twice
    }

    pub fn to_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.twice.is_multiple_of(2)
    }

    /// Dimension `2l + 1` of the spin-`l` representation.
    pub fn dim(self) -> usize {
        self.twice as usize + 1
    }

    /// Row labels `2m` for `m = -l, -l+1, ..., l`, in storage order.
    pub fn twice_m_values(self) -> impl Iterator<Item = i64> {
        let t = self.twice as i64;
        (0..=t).map(move |k| 2 * k - t)
    }

    /// Spins `0, 1/2, 1, ...` up to and including `self`.
    pub fn spins_through(self) -> impl Iterator<Item = HalfInt> {
        (0..=self.twice).map(HalfInt::from_twice)
    }
}

impl std::fmt::Display for HalfInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.twice.is_multiple_of(2) {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// A row label `m` within a spin-`l` block, stored as `2m`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct MIndex {
    twice: i64,
}

impl MIndex {
    /// Accepts only labels belonging to the spin: `|m| <= l` and `m = l (mod 1)`.
    pub fn new(ell: HalfInt, twice_m: i64) -> Result<Self> {
        let t = ell.twice() as i64;
        if twice_m.abs() > t {
            return Err(Error::IndexRange(format!(
                "2m = {twice_m} outside [-{t}, {t}] for spin 2l = {t}"
            )));
        }
        if (twice_m - t) % 2 != 0 {
            return Err(Error::IndexRange(format!(
                "2m = {twice_m} has the wrong parity for spin 2l = {t}"
            )));
        }
        Ok(MIndex { twice: twice_m })
    }

    pub fn twice(self) -> i64 {
        self.twice
    }

    pub fn to_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// Zero-based storage row of this label inside its spin block.
    pub fn row(self, ell: HalfInt) -> usize {
        ((self.twice + ell.twice() as i64) / 2) as usize
    }
}

/// Weight `<l> = 1 + l` of a sphere representation.
pub fn weight_su2(ell: HalfInt) -> f64 {
    1.0 + ell.to_f64()
}

/// Weight `<tau> = (1 + tau^2)^(1/2)` of a circle frequency.
pub fn weight_torus(tau: i64) -> f64 {
    (1.0 + (tau as f64) * (tau as f64)).sqrt()
}

/// Two-sided bounds for the weight of a product representation in terms of
/// the factor weights: `(w1 + w2)/2 <= w <= w1 + w2`.  Factor weights are
/// at least 1 by construction.
pub fn product_weight_bounds(w1: f64, w2: f64) -> Result<(f64, f64)> {
    if w1.is_nan() || w2.is_nan() || w1 < 1.0 || w2 < 1.0 {
        return Err(Error::BadData(format!(
            "weights must be >= 1, got {w1} and {w2}"
        )));
    }
    Ok((0.5 * (w1 + w2), w1 + w2))
}

/// Kronecker position of the 4-index entry `(m, n, r, s)` inside the flat
/// `d_xi d_eta`-dimensional product block.  All indices are 1-based here;
/// `(m, n)` addresses the first factor (dimension `d_xi`), `(r, s)` the
/// second (dimension `d_eta`).
pub fn flatten_index(
    m: usize,
    n: usize,
    r: usize,
    s: usize,
    d_xi: usize,
    d_eta: usize,
) -> Result<(usize, usize)> {
    check_1based("m", m, d_xi)?;
    check_1based("n", n, d_xi)?;
    check_1based("r", r, d_eta)?;
    check_1based("s", s, d_eta)?;
    Ok((d_eta * (m - 1) + r, d_eta * (n - 1) + s))
}

/// Inverse of [`flatten_index`]: recovers `(m, n, r, s)` from the flat
/// 1-based position `(i, j)`.
pub fn unflatten_index(
    i: usize,
    j: usize,
    d_xi: usize,
    d_eta: usize,
) -> Result<(usize, usize, usize, usize)> {
    check_1based("i", i, d_xi * d_eta)?;
    check_1based("j", j, d_xi * d_eta)?;
    let m = (i - 1) / d_eta + 1;
    let r = i - (m - 1) * d_eta;
    let n = (j - 1) / d_eta + 1;
    let s = j - (n - 1) * d_eta;
    Ok((m, n, r, s))
}

fn check_1based(name: &str, value: usize, dim: usize) -> Result<()> {
    if value == 0 || value > dim {
        return Err(Error::IndexRange(format!(
            "{name} = {value} outside 1..={dim}"
        )));
    }
    Ok(())
}

/// Hilbert-Schmidt norm `(sum |a_ij|^2)^(1/2)`.
pub fn hs_norm(mat: ArrayView2<'_, Complex64>) -> f64 {
    mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
