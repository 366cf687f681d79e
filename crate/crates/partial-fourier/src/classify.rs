//! Decay classification of coefficient magnitudes.
//!
//! Smoothness of a field shows up as rapid decay of its transform: for
//! every order `N` the magnitudes stay below `C_N w^{-N}` in the combined
//! weight `w = <tau> + <l>`.  Distributions instead admit a polynomial
//! bound `C w^{+N}` for some finite `N`.  On finite data both statements
//! are about trend, not pointwise bounds, so the tests here compare where
//! the weighted magnitude `h w^{s}` achieves its maximum: decay means the
//! outermost weight shell never carries the peak.
//!
//! All comparisons run in log space so that astronomically large sparse
//! modes (whose weights overflow double precision) classify correctly.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::repr::hs_norm;
use crate::timefreq::spectral_derivative;
use crate::transform::{FullCoeff, PartialCoeffField};

/// Outcome of a decay test battery.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Verdict {
    /// Peak never on the frontier for any tested order: smooth-type decay.
    RapidDecay,
    /// Bounded by `C w^{order}` in trend: distribution-type growth.
    PolyBounded { order: u32 },
    /// Grows faster than every tested polynomial order.
    Neither,
}

/// Which weight the magnitudes were measured against.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum WeightKind {
    /// `<tau> + <l>` on doubly transformed data.
    Combined,
    /// `1 + l` on sphere-side data with time retained.
    Sphere,
}

/// Classification result with per-order diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub verdict: Verdict,
    pub weight_kind: WeightKind,
    /// Modes with nonzero magnitude.
    pub samples_used: usize,
    /// Weight shells represented in the data.
    pub distinct_weights: usize,
    pub max_order: u32,
    /// Per order `N`: how far below the interior peak the frontier value of
    /// `ln h + N ln w` sits.  Positive margin at every order means rapid decay.
    pub rapid_margins: Vec<(u32, f64)>,
    /// Per order `N`: the same margin for `ln h - N ln w`.  A nonnegative
    /// margin means the data is bounded by `C w^N` in trend.
    pub poly_margins: Vec<(u32, f64)>,
    /// Least-squares envelope slope `s` in `h ~ C w^{-s}` (positive = decay).
    pub fitted_exponent: Option<f64>,
    pub fitted_ln_constant: Option<f64>,
    /// Per order `N`: the smallest `C_N` with `h <= C_N w^{-N}` over the data,
    /// i.e. `max h w^N`.  Infinite when the product overflows.
    pub rapid_constants: Vec<(u32, f64)>,
    /// For a poly-bounded verdict at order `N`: `max h w^{-N}`.
    pub poly_constant: Option<f64>,
}

const SHELL_REL_TOL: f64 = 1e-9;

/// Deadband around zero margin: data exactly on a power law lands at margin
/// zero up to rounding, and must count as bounded (not rapid) either way.
const MARGIN_TOL: f64 = 1e-9;

fn shell_key(ln_w: f64) -> i64 {
    // Quantize so equal weights land in one shell despite rounding.
    (ln_w / SHELL_REL_TOL).round() as i64
}

/// Core rule on `(ln w, ln h)` pairs.  Magnitude zero enters as `-inf` and
/// never carries a peak.  Needs at least two weight shells unless the data
/// is identically zero.
pub fn classify_ln_samples(
    samples: &[(f64, f64)],
    weight_kind: WeightKind,
    max_order: u32,
) -> Result<DecayReport> {
    if samples.is_empty() {
        return Err(Error::BadData("no modes to classify".into()));
    }
    if samples.iter().any(|(w, _)| !w.is_finite()) {
        return Err(Error::BadData("weights must be finite in log scale".into()));
    }
    let samples_used = samples.iter().filter(|(_, h)| h.is_finite()).count();
    let mut shells: Vec<i64> = samples.iter().map(|(w, _)| shell_key(*w)).collect();
    shells.sort_unstable();
    shells.dedup();
    let distinct_weights = shells.len();

    if samples_used == 0 {
        // Identically zero: decays faster than everything, vacuously.
        return Ok(DecayReport {
            verdict: Verdict::RapidDecay,
            weight_kind,
            samples_used,
            distinct_weights,
            max_order,
            rapid_margins: (0..=max_order).map(|n| (n, f64::INFINITY)).collect(),
            poly_margins: (0..=max_order).map(|n| (n, f64::INFINITY)).collect(),
            fitted_exponent: None,
            fitted_ln_constant: None,
            rapid_constants: (0..=max_order).map(|n| (n, 0.0)).collect(),
            poly_constant: None,
        });
    }
    if distinct_weights < 2 {
        return Err(Error::BadData(
            "decay needs at least two weight shells to compare".into(),
        ));
    }

    let frontier = *shells.last().expect("nonempty");
    let margin_at = |exponent: f64| -> f64 {
        let mut tail = f64::NEG_INFINITY;
        let mut body = f64::NEG_INFINITY;
        for &(ln_w, ln_h) in samples {
            let v = ln_h + exponent * ln_w;
            if shell_key(ln_w) == frontier {
                tail = tail.max(v);
            } else {
                body = body.max(v);
            }
        }
        body - tail
    };

    let rapid_margins: Vec<(u32, f64)> =
        (0..=max_order).map(|n| (n, margin_at(n as f64))).collect();
    let poly_margins: Vec<(u32, f64)> =
        (0..=max_order).map(|n| (n, margin_at(-(n as f64)))).collect();

    let sup_weighted = |exponent: f64| -> f64 {
        samples
            .iter()
            .map(|&(ln_w, ln_h)| (ln_h + exponent * ln_w).exp())
            .fold(0.0, f64::max)
    };
    let rapid_constants: Vec<(u32, f64)> = (0..=max_order)
        .map(|n| (n, sup_weighted(n as f64)))
        .collect();

    let verdict = if rapid_margins.iter().all(|&(_, m)| m > MARGIN_TOL)
        && rapid_constants.iter().all(|&(_, c)| c.is_finite())
    {
        Verdict::RapidDecay
    } else if let Some(&(order, _)) = poly_margins.iter().find(|&&(_, m)| m >= -MARGIN_TOL) {
        Verdict::PolyBounded { order }
    } else {
        Verdict::Neither
    };
    let poly_constant = match verdict {
        Verdict::PolyBounded { order } => Some(sup_weighted(-(order as f64))),
        _ => None,
    };

    // Envelope fit: per-shell maxima of ln h against ln w.
    let mut envelope: Vec<(f64, f64)> = Vec::new();
    for &shell in &shells {
        let mut ln_w_rep = 0.0;
        let mut peak = f64::NEG_INFINITY;
        for &(ln_w, ln_h) in samples {
            if shell_key(ln_w) == shell {
                ln_w_rep = ln_w;
                peak = peak.max(ln_h);
            }
        }
        if peak.is_finite() {
            envelope.push((ln_w_rep, peak));
        }
    }
    let (fitted_exponent, fitted_ln_constant) = fit_line(&envelope);

    Ok(DecayReport {
        verdict,
        weight_kind,
        samples_used,
        distinct_weights,
        max_order,
        rapid_margins,
        poly_margins,
        fitted_exponent,
        fitted_ln_constant,
        rapid_constants,
        poly_constant,
    })
}

/// Least squares `y = c - s x`; returns `(s, c)`.
fn fit_line(points: &[(f64, f64)]) -> (Option<f64>, Option<f64>) {
    if points.len() < 2 {
        return (None, None);
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let det = n * sxx - sx * sx;
    if det.abs() < 1e-12 * n * sxx.max(1.0) {
        return (None, None);
    }
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / n;
    (Some(-slope), Some(intercept))
}

/// Classifies a doubly transformed field against the combined weight.
pub fn classify_full(fc: &FullCoeff, max_order: u32) -> Result<DecayReport> {
    let samples: Vec<(f64, f64)> = fc
        .iter()
        .map(|(key, block)| {
            let h = block.hs_norm();
            (key.ln_weight(), if h > 0.0 { h.ln() } else { f64::NEG_INFINITY })
        })
        .collect();
    classify_ln_samples(&samples, WeightKind::Combined, max_order)
}

/// Joint smoothness report from sphere-side coefficients with time retained:
/// one decay test per time derivative order.
#[derive(Clone, Debug, Serialize)]
pub struct SmoothnessReport {
    pub verdict: Verdict,
    pub per_derivative: Vec<DecayReport>,
}

/// Classifies sphere-side decay of `sup_t |d^beta/dt^beta u(t, l)|` for each
/// `beta` through `beta_max`.  Smoothness in both variables jointly requires
/// every derivative order to decay rapidly in `l`.
pub fn classify_partial_smooth(
    pc: &PartialCoeffField,
    beta_max: u32,
    max_order: u32,
) -> Result<SmoothnessReport> {
    let n_t = pc.grid().n_t();
    let mut per_derivative = Vec::with_capacity(beta_max as usize + 1);
    for beta in 0..=beta_max {
        let mut samples = Vec::new();
        for ell in pc.spins() {
            let d = ell.dim();
            // sup over the grid of the HS norm of the differentiated block.
            let mut slices = vec![ndarray::Array2::<Complex64>::zeros((d, d)); n_t];
            for m in 0..d {
                for n in 0..d {
                    let series = pc.mode_series(ell, m, n).expect("spin present");
                    let ds = if beta == 0 {
                        series
                    } else {
                        let mut out = series;
                        for _ in 0..beta {
                            out = spectral_derivative(&out);
                        }
                        out
                    };
                    for (k, v) in ds.iter().enumerate() {
                        slices[k][[m, n]] = *v;
                    }
                }
            }
            let sup = slices
                .iter()
                .map(|s| hs_norm(s.view()))
                .fold(0.0, f64::max);
            let ln_h = if sup > 0.0 { sup.ln() } else { f64::NEG_INFINITY };
            samples.push((crate::repr::weight_su2(ell).ln(), ln_h));
        }
        per_derivative.push(classify_ln_samples(&samples, WeightKind::Sphere, max_order)?);
    }
    let verdict = combine_verdicts(per_derivative.iter().map(|r| r.verdict));
    Ok(SmoothnessReport {
        verdict,
        per_derivative,
    })
}

fn combine_verdicts(verdicts: impl Iterator<Item = Verdict>) -> Verdict {
    let mut worst_poly = 0;
    let mut all_rapid = true;
    for v in verdicts {
        match v {
            Verdict::RapidDecay => {}
            Verdict::PolyBounded { order } => {
                all_rapid = false;
                worst_poly = worst_poly.max(order);
            }
            Verdict::Neither => return Verdict::Neither,
        }
    }
    if all_rapid {
        Verdict::RapidDecay
    } else {
        Verdict::PolyBounded { order: worst_poly }
    }
}

/// Continuity-order test for a periodic functional from its pairings with
/// the characters `e^{i tau t}`.
///
/// A functional of order `K` satisfies `|<u, phi>| <= C sum_{b <= K}
/// sup |phe^(b)|`; on characters the right side is the seminorm polynomial
/// `p_K(tau) = sum_{b <= K} |tau|^b`.  The check compares the ratio
/// `|pairing| / p_K` across frequency shells with the same frontier rule as
/// the decay tests: data following the seminorm law passes at its own degree
/// and fails below it.
#[derive(Clone, Copy, Debug)]
pub struct TestBattery {
    pub max_degree: u32,
}

impl TestBattery {
    pub fn new(max_degree: u32) -> Self {
        TestBattery { max_degree }
    }

    pub fn seminorm(&self, degree: u32, tau: i64) -> f64 {
        let a = tau.unsigned_abs() as f64;
        (0..=degree).map(|b| a.powi(b as i32)).sum()
    }

    /// Smallest degree whose seminorm bounds the pairings in trend, or
    /// `None` if every degree through `max_degree` fails.
    pub fn order(&self, pairings: &[(i64, Complex64)]) -> Result<Option<u32>> {
        if pairings.len() < 2 {
            return Err(Error::BadData(
                "need pairings at two frequencies or more".into(),
            ));
        }
        for degree in 0..=self.max_degree {
            let samples: Vec<(f64, f64)> = pairings
                .iter()
                .map(|&(tau, v)| {
                    let ratio = v.norm() / self.seminorm(degree, tau);
                    let ln_h = if ratio > 0.0 {
                        ratio.ln()
                    } else {
                        f64::NEG_INFINITY
                    };
                    (crate::repr::weight_torus(tau).ln(), ln_h)
                })
                .collect();
            let report = classify_ln_samples(&samples, WeightKind::Combined, 0)?;
            // Bounded ratio: the frontier shell does not carry the peak.
            if report.poly_margins[0].1 >= -MARGIN_TOL {
                return Ok(Some(degree));
            }
        }
        Ok(None)
    }
}

/// Pairings of a sampled time series with the characters `e^{i tau t}`:
/// `<u, e^{i tau .}> = integral u(t) e^{i tau t} dt`, exact for band-limited
/// series on their grid.
pub fn character_pairings(series: &[Complex64], tau_max: i64) -> Vec<(i64, Complex64)> {
    let spec = crate::timefreq::dft(series);
    (-tau_max..=tau_max)
        .map(|tau| (tau, spec.at(-tau) * crate::timefreq::TAU))
        .collect()
}

/// Distribution-order check across spins: true iff one `(C, K)` pair covers
/// `|<u(., l), phi>| <= C p_K(phi) (1+l)^K` over the whole battery, measured
/// by the same frontier rule per spin shell.
///
/// Each spin maps to its character pairings; the per-spin `p_K`-normalized
/// peak is then tested against `(1+l)^K` growth.
pub fn seminorm_bound_check(
    pairings: &std::collections::BTreeMap<crate::repr::HalfInt, Vec<(i64, Complex64)>>,
    degree: u32,
) -> Result<bool> {
    if pairings.len() < 2 {
        return Err(Error::BadData(
            "need pairings at two spins or more to compare shells".into(),
        ));
    }
    let battery = TestBattery::new(degree);
    let samples: Vec<(f64, f64)> = pairings
        .iter()
        .map(|(ell, rows)| {
            let peak = rows
                .iter()
                .map(|&(tau, v)| v.norm() / battery.seminorm(degree, tau))
                .fold(0.0, f64::max);
            let ln_h = if peak > 0.0 {
                peak.ln()
            } else {
                f64::NEG_INFINITY
            };
            (crate::repr::weight_su2(*ell).ln(), ln_h)
        })
        .collect();
    let report = classify_ln_samples(&samples, WeightKind::Sphere, degree)?;
    // Bounded by (1+l)^degree in trend across spin shells.
    Ok(report.poly_margins[degree as usize].1 >= -MARGIN_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repr::{weight_su2, weight_torus, HalfInt};
    use crate::transform::{ModeIndex, TimeGrid};
    use ndarray::{Array2, Array3};
    use num_bigint::{BigInt, BigUint};
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// 1x1 blocks at spin 0 whose norms follow `law` of the combined weight.
    fn scalar_modes(tau_range: std::ops::RangeInclusive<i64>, law: impl Fn(f64) -> f64) -> FullCoeff {
        let mut fc = FullCoeff::new();
        for tau in tau_range {
            let w = weight_torus(tau) + 1.0;
            fc.insert_dense(tau, HalfInt::ZERO, Array2::from_elem((1, 1), c(law(w))))
                .unwrap();
        }
        fc
    }

    #[test]
    fn exponential_decay_is_rapid() {
        let fc = scalar_modes(0..=12, |w| (-w).exp());
        let report = classify_full(&fc, 4).unwrap();
        assert_eq!(report.verdict, Verdict::RapidDecay);
        let s = report.fitted_exponent.unwrap();
        // The envelope of e^{-w} steepens without bound; on this range the
        // fitted power is already far beyond the tested orders.
        assert!(s > 4.0, "fitted slope {s}");
    }

    #[test]
    fn flat_magnitudes_are_order_zero() {
        let fc = scalar_modes(0..=12, |_| 0.7);
        let report = classify_full(&fc, 4).unwrap();
        assert_eq!(report.verdict, Verdict::PolyBounded { order: 0 });
        assert!(report.rapid_margins.iter().all(|&(_, m)| m <= 0.0));
        let s = report.fitted_exponent.unwrap();
        assert!(s.abs() < 1e-9, "flat data fitted slope {s}");
    }

    #[test]
    fn linear_growth_is_order_one() {
        let fc = scalar_modes(0..=12, |w| w);
        let report = classify_full(&fc, 4).unwrap();
        assert_eq!(report.verdict, Verdict::PolyBounded { order: 1 });
    }

    #[test]
    fn exponential_growth_is_neither() {
        let fc = scalar_modes(0..=12, |w| w.exp());
        let report = classify_full(&fc, 4).unwrap();
        assert_eq!(report.verdict, Verdict::Neither);
    }

    #[test]
    fn astronomical_sparse_modes_classify_in_log_space() {
        // Unit entries at four modes whose weights span 10^2 .. 10^120.
        // Flat magnitudes across shells: bounded, order zero, not rapid.
        let mut fc = FullCoeff::new();
        let ten = BigUint::from(10u8);
        for (p, f) in [(11u32, 2u32), (100_001, 6), (3, 24), (7, 120)] {
            let q = ten.pow(f);
            let key = ModeIndex::new(-BigInt::from(p), 2u8 * q.clone());
            let two_m = BigInt::from(q);
            fc.insert_single(key, two_m.clone(), two_m, c(1.0)).unwrap();
        }
        let report = classify_full(&fc, 4).unwrap();
        assert_eq!(report.verdict, Verdict::PolyBounded { order: 0 });
        assert_ne!(report.verdict, Verdict::RapidDecay);
        assert_eq!(report.distinct_weights, 4);
    }

    #[test]
    fn all_zero_data_is_vacuously_rapid() {
        let fc = scalar_modes(0..=5, |_| 0.0);
        let report = classify_full(&fc, 3).unwrap();
        assert_eq!(report.verdict, Verdict::RapidDecay);
        assert_eq!(report.samples_used, 0);
    }

    #[test]
    fn single_shell_is_rejected() {
        let fc = scalar_modes(0..=0, |_| 1.0);
        assert!(classify_full(&fc, 3).is_err());
    }

    #[test]
    fn partial_field_rapid_and_flat() {
        let grid = TimeGrid::new(8).unwrap();
        let ell_max = HalfInt::from_twice(6);
        // Rapid: norms e^{-(1+l)} with a rotating phase in t.
        let mut smooth = PartialCoeffField::zeros(grid, ell_max);
        // Flat: constant unit entry at every spin.
        let mut rough = PartialCoeffField::zeros(grid, ell_max);
        for ell in ell_max.spins_through() {
            let d = ell.dim();
            let mut s_block = Array3::zeros((grid.n_t(), d, d));
            let mut r_block = Array3::zeros((grid.n_t(), d, d));
            for k in 0..grid.n_t() {
                let phase = Complex64::from_polar((-weight_su2(ell)).exp(), grid.point(k));
                s_block[[k, 0, 0]] = phase;
                r_block[[k, 0, 0]] = c(1.0);
            }
            smooth.set_block(ell, s_block).unwrap();
            rough.set_block(ell, r_block).unwrap();
        }
        let sr = classify_partial_smooth(&smooth, 2, 3).unwrap();
        assert_eq!(sr.verdict, Verdict::RapidDecay);
        assert_eq!(sr.per_derivative.len(), 3);
        let rr = classify_partial_smooth(&rough, 2, 3).unwrap();
        assert_eq!(rr.verdict, Verdict::PolyBounded { order: 0 });
    }

    #[test]
    fn seminorm_check_finds_functional_order_in_spin() {
        use std::collections::BTreeMap;
        // Point-evaluation pairings at every spin: order zero suffices.
        let taus: Vec<i64> = (-6..=6).collect();
        let mut flat = BTreeMap::new();
        let mut growing = BTreeMap::new();
        for te in 0..=8u64 {
            let ell = HalfInt::from_twice(2 * te);
            let rows: Vec<(i64, Complex64)> = taus.iter().map(|&t| (t, c(1.0))).collect();
            flat.insert(ell, rows);
            let scale = weight_su2(ell).powi(2);
            let rows2: Vec<(i64, Complex64)> =
                taus.iter().map(|&t| (t, c(scale))).collect();
            growing.insert(ell, rows2);
        }
        assert!(seminorm_bound_check(&flat, 0).unwrap());
        // Pairings growing like (1+l)^2 need degree 2, not less.
        assert!(seminorm_bound_check(&growing, 2).unwrap());
        assert!(!seminorm_bound_check(&growing, 1).unwrap());
        assert!(!seminorm_bound_check(&growing, 0).unwrap());
    }

    #[test]
    fn battery_matches_functional_order() {
        let battery = TestBattery::new(4);
        // Point evaluation pairs to 1 at every character: order zero.
        let delta: Vec<(i64, Complex64)> = (-10..=10).map(|t| (t, c(1.0))).collect();
        assert_eq!(battery.order(&delta).unwrap(), Some(0));
        // Pairings following the degree-2 seminorm exactly.
        let second: Vec<(i64, Complex64)> = (-10..=10)
            .map(|t| (t, c(0.3 * battery.seminorm(2, t))))
            .collect();
        assert_eq!(battery.order(&second).unwrap(), Some(2));
        // Exponentially growing pairings exceed every degree.
        let wild: Vec<(i64, Complex64)> = (-10i64..=10)
            .map(|t| (t, c((t.abs() as f64).exp())))
            .collect();
        assert_eq!(battery.order(&wild).unwrap(), None);
    }

    proptest! {
        /// Data following one power law keeps its verdict when the sampled
        /// range is extended under the same law.
        #[test]
        fn verdict_stable_under_same_law_extension(
            s in 0u32..=3,
            scale in 0.1f64..10.0,
        ) {
            let law = |w: f64| scale * w.powi(s as i32);
            let short = scalar_modes(0..=8, law);
            let long = scalar_modes(0..=14, law);
            let v1 = classify_full(&short, 4).unwrap().verdict;
            let v2 = classify_full(&long, 4).unwrap().verdict;
            prop_assert_eq!(v1, Verdict::PolyBounded { order: s });
            prop_assert_eq!(v1, v2);
        }

        #[test]
        fn rapid_law_stays_rapid_under_extension(scale in 0.1f64..10.0) {
            let law = move |w: f64| scale * (-2.0 * w).exp();
            let v1 = classify_full(&scalar_modes(0..=8, law), 4).unwrap().verdict;
            let v2 = classify_full(&scalar_modes(0..=14, law), 4).unwrap().verdict;
            prop_assert_eq!(v1, Verdict::RapidDecay);
            prop_assert_eq!(v1, v2);
        }
    }
}
