//! Exact arithmetic around the mean coefficient value: rationality classes,
//! resonance tests, small-divisor floors, and certified near-resonance
//! witnesses for the Liouville construction.
//!
//! Everything a certificate touches runs in big-integer rationals; floating
//! point appears only in exported summaries.  The witness modes sit at
//! astronomically large frequencies, far beyond double range, which is why
//! the sparse coefficient container keys on big integers.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::error::{Error, Result};
use crate::transform::{approx_ln_biguint, FullCoeff, ModeIndex};

/// Levels beyond this make the certificate denominators (doubly factorial
/// digit counts) impractical.
pub const LEVEL_CAP: u32 = 8;

/// Largest witness exponent the generator accepts.
pub const EXPONENT_CAP: u32 = 6;

fn factorial(n: u32) -> u32 {
    (1..=n).product::<u32>().max(1)
}

/// The lacunary series `sum_k base^{-k!}`, the stock example of a number
/// approximable to every polynomial order.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LiouvilleSeries {
    base: u32,
}

impl LiouvilleSeries {
    pub fn standard() -> Self {
        LiouvilleSeries { base: 10 }
    }

    pub fn new(base: u32) -> Result<Self> {
        if base < 2 {
            return Err(Error::BadData("series base must be at least 2".into()));
        }
        Ok(LiouvilleSeries { base })
    }

    pub fn base(self) -> u32 {
        self.base
    }

    /// Denominator of the level-`j` truncation: `base^{j!}`.
    pub fn denominator(self, level: u32) -> BigUint {
        BigUint::from(self.base).pow(factorial(level))
    }

    /// Partial sum through `k = level`, as an exact fraction `p / base^{level!}`.
    /// The numerator ends in 1, so the fraction is already in lowest terms.
    pub fn truncation(self, level: u32) -> BigRational {
        let b = BigUint::from(self.base);
        let top = factorial(level);
        let p: BigUint = (1..=level).map(|k| b.pow(top - factorial(k))).sum();
        BigRational::new(BigInt::from(p), BigInt::from(self.denominator(level)))
    }

    /// Rigorous enclosure of the tail `sum_{k > level} base^{-k!}`: at least
    /// the first omitted term, at most twice it (the rest shrinks faster
    /// than geometrically).
    pub fn tail_bounds(self, level: u32) -> (BigRational, BigRational) {
        let den = BigInt::from(BigUint::from(self.base).pow(factorial(level + 1)));
        (
            BigRational::new(BigInt::one(), den.clone()),
            BigRational::new(BigInt::from(2), den),
        )
    }

    /// Double-precision value of the full series.
    pub fn value(self) -> f64 {
        let mut sum = 0.0;
        let ln_b = f64::from(self.base).ln();
        for k in 1..=10u32 {
            let e = factorial(k) as f64 * ln_b;
            if e > 745.0 {
                break;
            }
            sum += (-e).exp();
        }
        sum
    }
}

/// Arithmetic class of the mean value, with exact data where exactness is
/// possible.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum A0Class {
    /// `p/q` in lowest terms, `q >= 1`.
    Rational { p: i64, q: u64 },
    /// Irrational accepted by tag, optionally with a known irrationality
    /// measure; the tag is the caller's claim, never verified here.
    NonLiouville {
        name: String,
        value: f64,
        measure: Option<f64>,
    },
    /// The lacunary series above; arbitrary-precision truncations available.
    Liouville { base: u32 },
}

impl A0Class {
    pub fn rational(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::BadData("rational mean needs a nonzero denominator".into()));
        }
        let sign = if q < 0 { -1 } else { 1 };
        let (mut p, mut q) = (p * sign, q.unsigned_abs());
        let g = gcd(p.unsigned_abs(), q);
        if g > 1 {
            p /= g as i64;
            q /= g;
        }
        Ok(A0Class::Rational { p, q })
    }

    pub fn integer(n: i64) -> Self {
        A0Class::Rational { p: n, q: 1 }
    }

    pub fn liouville_standard() -> Self {
        A0Class::Liouville { base: 10 }
    }

    pub fn series(&self) -> Option<LiouvilleSeries> {
        match self {
            A0Class::Liouville { base } => LiouvilleSeries::new(*base).ok(),
            _ => None,
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            A0Class::Rational { p, q } => *p as f64 / *q as f64,
            A0Class::NonLiouville { value, .. } => *value,
            A0Class::Liouville { base } => LiouvilleSeries { base: *base }.value(),
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, A0Class::Rational { .. })
    }

    /// Exact resonance test for the sphere label `m = twice_m / 2`: whether
    /// `m * a0` is an integer.  Decided without floating point: for `p/q`
    /// this is `2q | twice_m * p`; irrationals resonate only at `m = 0`.
    pub fn resonates(&self, twice_m: i64) -> bool {
        match self {
            A0Class::Rational { p, q } => {
                (twice_m as i128 * *p as i128).rem_euclid(2 * *q as i128) == 0
            }
            _ => twice_m == 0,
        }
    }

    /// For a resonant label, the exact integer `m * a0`.
    pub fn resonant_product(&self, twice_m: i64) -> Option<i64> {
        if !self.resonates(twice_m) {
            return None;
        }
        match self {
            A0Class::Rational { p, q } => {
                Some(((twice_m as i128 * *p as i128) / (2 * *q as i128)) as i64)
            }
            _ => Some(0),
        }
    }

    /// The divisor `1 - e^{-2 pi i m a0}`, computed from the exact residue
    /// for rationals so its magnitude never drifts for large `m`.
    pub fn divisor(&self, twice_m: i64) -> Complex64 {
        let angle = match self {
            A0Class::Rational { p, q } => {
                let two_q = 2 * *q as i128;
                let k = (twice_m as i128 * *p as i128).rem_euclid(two_q);
                std::f64::consts::TAU * k as f64 / two_q as f64
            }
            _ => std::f64::consts::TAU * (twice_m as f64 / 2.0) * self.value(),
        };
        Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -angle)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Outcome of one exact certificate comparison.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum CertStatus {
    /// Gap enclosure entirely below the required bound.
    Pass,
    /// Gap enclosure entirely above: this level cannot witness the exponent.
    Fail,
    /// Enclosure straddles the bound; tighter precision would be needed.
    Inconclusive,
}

/// Exact comparison of the near-resonance gap at one truncation level
/// against the polynomial smallness required for one exponent.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub exponent: u32,
    pub level: u32,
    /// Torus frequency `-p_J` of the candidate mode.
    pub tau: BigInt,
    /// Sphere spin `q_J` (integer) of the candidate mode.
    pub ell: BigUint,
    /// Enclosure of `|tau + a0 * ell|`, exact and strictly positive.
    pub gap_lower: BigRational,
    pub gap_upper: BigRational,
    /// The required bound `(|tau| + ell)^{-exponent}`.
    pub bound: BigRational,
    pub status: CertStatus,
}

/// Runs the exact comparison for one `(level, exponent)` pair.
///
/// With `p/q` the level truncation and `t` the series tail, the candidate
/// mode `(tau, ell) = (-p, q)` has `tau + a0 ell = q t`, enclosed by
/// `[q t_lo, q t_hi] = [1, 2] / base^{level! * level}`.
pub fn certify(series: LiouvilleSeries, level: u32, exponent: u32) -> Result<Certificate> {
    if level == 0 || level > LEVEL_CAP {
        return Err(Error::IndexRange(format!(
            "truncation level {level} outside 1..={LEVEL_CAP}"
        )));
    }
    let trunc = series.truncation(level);
    let p = trunc.numer().magnitude().clone();
    let q = series.denominator(level);
    let gap_den = BigInt::from(
        BigUint::from(series.base()).pow(factorial(level + 1) - factorial(level)),
    );
    let gap_lower = BigRational::new(BigInt::one(), gap_den.clone());
    let gap_upper = BigRational::new(BigInt::from(2), gap_den);
    let weight = &p + &q;
    let bound = BigRational::new(BigInt::one(), BigInt::from(weight.pow(exponent)));
    let status = if gap_upper <= bound {
        CertStatus::Pass
    } else if gap_lower > bound {
        CertStatus::Fail
    } else {
        CertStatus::Inconclusive
    };
    Ok(Certificate {
        exponent,
        level,
        tau: -BigInt::from(p),
        ell: q,
        gap_lower,
        gap_upper,
        bound,
        status,
    })
}

/// A certified near-resonant mode: `0 < |tau + a0 ell| <= (|tau| + ell)^{-M}`
/// with `M` the exponent, proven by exact rational comparison.
#[derive(Clone, Debug)]
pub struct LiouvilleWitness {
    pub exponent: u32,
    /// Truncation level that certified; lower levels were rejected.
    pub level: u32,
    pub tau: BigInt,
    /// Sphere spin (integer, not doubled).
    pub ell: BigUint,
    pub gap_lower: BigRational,
    pub gap_upper: BigRational,
    pub rejected_levels: Vec<u32>,
    series: LiouvilleSeries,
}

impl LiouvilleWitness {
    /// The sparse-container key of the witness mode.
    pub fn mode(&self) -> ModeIndex {
        ModeIndex::new(self.tau.clone(), 2u8 * &self.ell)
    }

    /// `|tau| + ell`, the combined size entering the bound.
    pub fn mode_weight(&self) -> BigUint {
        self.tau.magnitude() + &self.ell
    }

    /// `(|tau| + ell)^{-exponent}` as an exact rational.
    pub fn bound(&self) -> BigRational {
        BigRational::new(
            BigInt::one(),
            BigInt::from(self.mode_weight().pow(self.exponent)),
        )
    }

    /// The gap to far better than double accuracy: midpoint of an enclosure
    /// evaluated two truncation levels deeper than the certificate, which
    /// shrinks the certificate's factor-two tail slack to relative width
    /// around `base^{-(level+3)!}`.
    pub fn gap_midpoint(&self) -> BigRational {
        let deep = (self.level + 2).min(LEVEL_CAP);
        let q = BigRational::from(BigInt::from(self.series.denominator(self.level)));
        let shift = self.series.truncation(deep) - self.series.truncation(self.level);
        let (t_lo, t_hi) = self.series.tail_bounds(deep);
        q * (shift + (t_lo + t_hi) / BigRational::from(BigInt::from(2)))
    }

    /// Refined midpoint in double precision; underflows to zero at high
    /// levels, which is the point of keeping the exact fields.
    pub fn gap_f64(&self) -> f64 {
        rational_to_f64(&self.gap_midpoint())
    }
}

/// One certified witness per exponent `1..=max_exponent`, scanning truncation
/// levels upward and recording every exact rejection on the way.
pub fn witnesses(series: LiouvilleSeries, max_exponent: u32) -> Result<Vec<LiouvilleWitness>> {
    if max_exponent == 0 || max_exponent > EXPONENT_CAP {
        return Err(Error::IndexRange(format!(
            "witness exponent must lie in 1..={EXPONENT_CAP}"
        )));
    }
    let mut out = Vec::with_capacity(max_exponent as usize);
    for exponent in 1..=max_exponent {
        let mut rejected = Vec::new();
        let mut found = None;
        for level in 1..=LEVEL_CAP {
            let cert = certify(series, level, exponent)?;
            match cert.status {
                CertStatus::Pass => {
                    found = Some(LiouvilleWitness {
                        exponent,
                        level,
                        tau: cert.tau,
                        ell: cert.ell,
                        gap_lower: cert.gap_lower,
                        gap_upper: cert.gap_upper,
                        rejected_levels: rejected.clone(),
                        series,
                    });
                    break;
                }
                CertStatus::Fail => rejected.push(level),
                CertStatus::Inconclusive => {
                    return Err(Error::Certification(format!(
                        "enclosure straddles the bound at level {level}, exponent {exponent}; \
                         a tighter tail estimate would be needed"
                    )));
                }
            }
        }
        out.push(found.ok_or_else(|| {
            Error::Certification(format!(
                "no level through {LEVEL_CAP} certifies exponent {exponent}"
            ))
        })?);
    }
    Ok(out)
}

/// The sparse right-hand side supported exactly on the witness modes, value
/// `tau + a0 ell` (the gap) at matrix entry `m = n = ell`.  Stored in double
/// precision, so high-level entries underflow to zero; the exact magnitudes
/// live on the witnesses.  Classifies as rapidly decaying: a smooth field
/// whose forced solution has unit-size coefficients at unbounded modes.
pub fn nonsolvable_rhs(witnesses: &[LiouvilleWitness]) -> FullCoeff {
    let mut out = FullCoeff::new();
    for w in witnesses {
        let two_m = BigInt::from(2u8 * &w.ell);
        out.insert_single(
            w.mode(),
            two_m.clone(),
            two_m,
            Complex64::new(w.gap_f64(), 0.0),
        )
        .expect("corner entry is always admissible");
    }
    out
}

/// The solution forced by the mode equation: division by `i(tau + a0 ell)`
/// leaves unit magnitude at every witness mode.  Flat non-decaying data:
/// a distribution, not a smooth field.
pub fn forced_solution(witnesses: &[LiouvilleWitness]) -> FullCoeff {
    let mut out = FullCoeff::new();
    for w in witnesses {
        let two_m = BigInt::from(2u8 * &w.ell);
        out.insert_single(w.mode(), two_m.clone(), two_m, Complex64::new(0.0, -1.0))
            .expect("corner entry is always admissible");
    }
    out
}

/// Exact small-divisor table for a rational mean: `|1 - e^{-2 pi i m a0}|`
/// depends only on the residue `k = twice_m * p mod 2q` and equals
/// `2 sin(pi k / (2q))`.
#[derive(Clone, Debug, Serialize)]
pub struct DivisorRow {
    pub twice_m: i64,
    pub residue: u64,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DivisorFloor {
    /// Minimum over the nonresonant labels scanned.
    pub minimum: f64,
    pub rows: Vec<DivisorRow>,
}

/// Scans the given doubled labels and returns the exact positive floor of
/// the divisor magnitude over the nonresonant ones.  Rational means only:
/// this floor is what makes the rational case uniformly solvable.  The label
/// set matters: integer spins see only even `twice_m`, and admitting
/// half-integer labels can lower the floor (mean `1/3` has floor `sqrt(3)`
/// on integer labels but reaches `1` at `m = 5/2`).
pub fn divisor_floor(
    a0: &A0Class,
    twice_ms: impl IntoIterator<Item = i64>,
) -> Result<DivisorFloor> {
    let A0Class::Rational { p, q } = a0 else {
        return Err(Error::BadData(
            "divisor floor is exact only for a rational mean".into(),
        ));
    };
    let two_q = 2 * *q as i128;
    let mut rows = Vec::new();
    for twice_m in twice_ms {
        let k = (twice_m as i128 * *p as i128).rem_euclid(two_q) as u64;
        if k == 0 {
            continue; // resonant
        }
        let value = 2.0 * (std::f64::consts::PI * k as f64 / two_q as f64).sin();
        rows.push(DivisorRow {
            twice_m,
            residue: k,
            value,
        });
    }
    let minimum = rows.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
    if rows.is_empty() {
        return Err(Error::BadData(
            "every label scanned is resonant; no divisor to bound".into(),
        ));
    }
    Ok(DivisorFloor { minimum, rows })
}

/// Double-precision divisor magnitudes for any mean class, for empirical
/// reports (exact version above for rationals).
pub fn divisor_values(a0: &A0Class, twice_ms: impl IntoIterator<Item = i64>) -> Vec<(i64, f64)> {
    twice_ms
        .into_iter()
        .filter(|&tm| !a0.resonates(tm))
        .map(|tm| (tm, a0.divisor(tm).norm()))
        .collect()
}

fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    let l10 = log10_rational(r);
    if l10 < -300.0 {
        return 0.0;
    }
    if l10 > 308.0 {
        return sign * f64::INFINITY;
    }
    // Numerator and denominator can each overflow a double even when the
    // ratio is mid-range, so shift to an ~18-digit integer quotient first
    // and scale back in two halves to stay clear of subnormals.
    let shift = 18 - l10.floor() as i64;
    let mut num = r.numer().magnitude().clone();
    let mut den = r.denom().magnitude().clone();
    if shift >= 0 {
        num *= BigUint::from(10u32).pow(shift as u32);
    } else {
        den *= BigUint::from(10u32).pow((-shift) as u32);
    }
    let quotient = (num / den).to_f64().unwrap_or(f64::INFINITY);
    let half = (-shift as i32) / 2;
    sign * quotient * 10f64.powi(half) * 10f64.powi(-shift as i32 - half)
}

/// Base-10 logarithm of a positive rational, stable for astronomical sizes.
pub fn log10_rational(r: &BigRational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    (approx_ln_biguint(r.numer().magnitude()) - approx_ln_biguint(r.denom().magnitude()))
        / std::f64::consts::LN_10
}

/// Scientific-notation rendering of a positive rational, computed from its
/// exact digits rather than a float round-trip.
pub fn rational_sci(r: &BigRational, digits: usize) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let l10 = log10_rational(r);
    let e = l10.floor() as i64;
    let mantissa = 10f64.powf(l10 - e as f64);
    format!("{mantissa:.digits$}e{e}")
}

/// One row of the non-solvability demonstration: a certified witness paired
/// with the magnitudes on the two sides of the mode equation.
#[derive(Clone, Debug, Serialize)]
pub struct DemoRow {
    pub exponent: u32,
    pub level: u32,
    pub tau: String,
    pub ell: String,
    /// log10 of the gap midpoint (the RHS magnitude), from exact digits.
    pub rhs_log10: f64,
    pub rhs_scientific: String,
    /// log10 of the certified bound `(|tau|+ell)^{-M}`.
    pub bound_log10: f64,
    pub bound_scientific: String,
    /// Magnitude forced on the solution coefficient: exactly one.
    pub solution_magnitude: f64,
    pub certified: bool,
    pub rejected_levels: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DemoReport {
    pub a0_description: String,
    pub rows: Vec<DemoRow>,
}

/// Pairs each witness's rapidly shrinking RHS magnitude against the unit
/// solution magnitude it forces.  A rational or tagged-irrational mean has
/// no witnesses and yields an empty report.
pub fn demo_nonsolvable(a0: &A0Class, max_exponent: u32) -> Result<DemoReport> {
    let Some(series) = a0.series() else {
        return Ok(DemoReport {
            a0_description: format!("{a0:?} admits no near-resonance witnesses"),
            rows: Vec::new(),
        });
    };
    let list = witnesses(series, max_exponent)?;
    let rows = list
        .iter()
        .map(|w| {
            let mid = w.gap_midpoint();
            let bound = w.bound();
            DemoRow {
                exponent: w.exponent,
                level: w.level,
                tau: w.tau.to_string(),
                ell: w.ell.to_string(),
                rhs_log10: log10_rational(&mid),
                rhs_scientific: rational_sci(&mid, 6),
                bound_log10: log10_rational(&bound),
                bound_scientific: rational_sci(&bound, 6),
                solution_magnitude: 1.0,
                certified: true,
                rejected_levels: w.rejected_levels.clone(),
            }
        })
        .collect();
    Ok(DemoReport {
        a0_description: format!(
            "lacunary series base {}, value ~ {:.6}",
            series.base(),
            series.value()
        ),
        rows,
    })
}

#[derive(Serialize)]
struct WitnessRecord {
    exponent: u32,
    level: u32,
    tau: String,
    ell: String,
    gap_lower: [String; 2],
    gap_upper: [String; 2],
    rejected_levels: Vec<u32>,
}

/// JSON export with decimal-string big integers (numerator/denominator pairs
/// for the exact gap enclosure).
pub fn write_witnesses<W: Write>(writer: W, list: &[LiouvilleWitness]) -> Result<()> {
    let records: Vec<WitnessRecord> = list
        .iter()
        .map(|w| WitnessRecord {
            exponent: w.exponent,
            level: w.level,
            tau: w.tau.to_string(),
            ell: w.ell.to_string(),
            gap_lower: [w.gap_lower.numer().to_string(), w.gap_lower.denom().to_string()],
            gap_upper: [w.gap_upper.numer().to_string(), w.gap_upper.denom().to_string()],
            rejected_levels: w.rejected_levels.clone(),
        })
        .collect();
    serde_json::to_writer_pretty(writer, &records)?;
    Ok(())
}

/// CSV rows of the demonstration report.
pub fn write_demo_csv<W: Write>(mut writer: W, report: &DemoReport) -> Result<()> {
    writeln!(
        writer,
        "exponent,level,tau,ell,rhs_log10,bound_log10,solution_magnitude,certified"
    )?;
    for r in &report.rows {
        writeln!(
            writer,
            "{},{},{},{},{:.4},{:.4},{},{}",
            r.exponent,
            r.level,
            r.tau,
            r.ell,
            r.rhs_log10,
            r.bound_log10,
            r.solution_magnitude,
            r.certified
        )?;
    }
    Ok(())
}
