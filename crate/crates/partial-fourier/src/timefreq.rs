//! Small spectral toolbox for 2pi-periodic sample vectors.
//!
//! Grids here are always uniform, `t_k = 2 pi k / n`.  The direct O(n^2)
//! transforms are deliberate: desk-scale grids stay below a few hundred
//! points and the explicit sums keep frequency bookkeeping transparent.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Fourier coefficients `c_k` for `k = min_freq ..= min_freq + len - 1`,
/// representing `sum_k c_k e^{i k t}`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub coeffs: Vec<Complex64>,
    pub min_freq: i64,
}

impl Spectrum {
    pub fn freq(&self, idx: usize) -> i64 {
        self.min_freq + idx as i64
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (idx, c) in self.coeffs.iter().enumerate() {
            let k = self.freq(idx) as f64;
            acc += c * Complex64::from_polar(1.0, k * t);
        }
        acc
    }

    /// Coefficient at frequency `k`, zero outside the stored band.
    pub fn at(&self, k: i64) -> Complex64 {
        let idx = k - self.min_freq;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// Termwise derivative: `c_k -> i k c_k`.
    pub fn derivative(&self) -> Spectrum {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| c * Complex64::new(0.0, self.freq(idx) as f64))
            .collect();
        Spectrum {
            coeffs,
            min_freq: self.min_freq,
        }
    }
}

/// Forward transform of samples on the uniform grid:
/// `c_k = (1/n) sum_j f(t_j) e^{-i k t_j}` for `k` in the symmetric band.
/// For even `n` the band is `-n/2 ..= n/2 - 1`.
pub fn dft(samples: &[Complex64]) -> Spectrum {
    let n = samples.len();
    assert!(n > 0, "empty sample vector");
    let min_freq = -((n as i64) / 2);
    let mut coeffs = Vec::with_capacity(n);
    for idx in 0..n {
        let k = min_freq + idx as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, f) in samples.iter().enumerate() {
            let phase = -(k as f64) * TAU * (j as f64) / (n as f64);
            acc += f * Complex64::from_polar(1.0, phase);
        }
        coeffs.push(acc / n as f64);
    }
    Spectrum { coeffs, min_freq }
}

/// Evaluates the spectrum on the uniform grid with `n` points.
pub fn idft(spec: &Spectrum, n: usize) -> Vec<Complex64> {
    (0..n).map(|j| spec.eval(TAU * j as f64 / n as f64)).collect()
}

/// Band-limited resampling onto a grid refined by `factor`.
pub fn resample(samples: &[Complex64], factor: usize) -> Vec<Complex64> {
    assert!(factor >= 1);
    if factor == 1 {
        return samples.to_vec();
    }
    idft(&dft(samples), samples.len() * factor)
}

/// Spectral derivative of band-limited samples, on the same grid.
pub fn spectral_derivative(samples: &[Complex64]) -> Vec<Complex64> {
    idft(&dft(samples).derivative(), samples.len())
}

/// A trigonometric polynomial `sum_{|k| <= deg} c_k e^{i k t}` with exact
/// term arithmetic; used for closed-form derivative growth bounds.
#[derive(Clone, Debug)]
pub struct TrigPoly {
    /// Coefficient of `e^{i k t}` at index `k + deg`.
    coeffs: Vec<Complex64>,
    deg: i64,
}

impl TrigPoly {
    pub fn zero(deg: i64) -> Self {
        TrigPoly {
            coeffs: vec![Complex64::new(0.0, 0.0); (2 * deg + 1) as usize],
            deg,
        }
    }

    pub fn constant(c: Complex64) -> Self {
        TrigPoly {
            coeffs: vec![c],
            deg: 0,
        }
    }

    pub fn deg(&self) -> i64 {
        self.deg
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        if k.abs() > self.deg {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.deg) as usize]
        }
    }

    pub fn set_coeff(&mut self, k: i64, c: Complex64) {
        assert!(k.abs() <= self.deg);
        self.coeffs[(k + self.deg) as usize] = c;
    }

    /// Real cosine/sine series `a0 + sum (cos_k cos kt + sin_k sin kt)`.
    pub fn from_cos_sin(a0: f64, cos: &[f64], sin: &[f64]) -> Self {
        let deg = cos.len().max(sin.len()) as i64;
        let mut p = TrigPoly::zero(deg);
        p.set_coeff(0, Complex64::new(a0, 0.0));
        for (i, &c) in cos.iter().enumerate() {
            let k = i as i64 + 1;
            p.set_coeff(k, p.coeff(k) + Complex64::new(c / 2.0, 0.0));
            p.set_coeff(-k, p.coeff(-k) + Complex64::new(c / 2.0, 0.0));
        }
        for (i, &s) in sin.iter().enumerate() {
            let k = i as i64 + 1;
            p.set_coeff(k, p.coeff(k) + Complex64::new(0.0, -s / 2.0));
            p.set_coeff(-k, p.coeff(-k) + Complex64::new(0.0, s / 2.0));
        }
        p
    }

    pub fn derivative(&self) -> TrigPoly {
        let mut out = TrigPoly::zero(self.deg);
        for k in -self.deg..=self.deg {
            out.set_coeff(k, self.coeff(k) * Complex64::new(0.0, k as f64));
        }
        out
    }

    pub fn mul(&self, other: &TrigPoly) -> TrigPoly {
        let deg = self.deg + other.deg;
        let mut out = TrigPoly::zero(deg);
        for a in -self.deg..=self.deg {
            let ca = self.coeff(a);
            if ca == Complex64::new(0.0, 0.0) {
                continue;
            }
            for b in -other.deg..=other.deg {
                out.set_coeff(a + b, out.coeff(a + b) + ca * other.coeff(b));
            }
        }
        out
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        let deg = self.deg.max(other.deg);
        let mut out = TrigPoly::zero(deg);
        for k in -deg..=deg {
            out.set_coeff(k, self.coeff(k) + other.coeff(k));
        }
        out
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in -self.deg..=self.deg {
            acc += self.coeff(k) * Complex64::from_polar(1.0, k as f64 * t);
        }
        acc
    }

    /// Max modulus over a uniform scan grid; `n` should comfortably exceed
    /// twice the degree.
    pub fn sup_on_grid(&self, n: usize) -> f64 {
        (0..n)
            .map(|j| self.eval(TAU * j as f64 / n as f64).norm())
            .fold(0.0, f64::max)
    }
}

/// Rejects grids too coarse for the stated frequency band.
pub fn check_band(n_t: usize, tau_max: i64) -> Result<()> {
    if (n_t as i64) < 2 * tau_max + 1 {
        return Err(Error::Aliasing(format!(
            "n_t = {n_t} cannot resolve |tau| <= {tau_max}; need n_t >= {}",
            2 * tau_max + 1
        )));
    }
    Ok(())
}
