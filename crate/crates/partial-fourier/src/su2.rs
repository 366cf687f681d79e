//! The 3-sphere as the group of unit quaternions: representation matrices,
//! exact-band Haar quadrature, and the sphere-side Fourier transform.
//!
//! Conventions, fixed once here and relied on everywhere else:
//!
//! * a quaternion `(w, x, y, z)` acts in the defining spin-1/2
//!   representation as `w I - i (x s1 + y s2 + z s3)` with the standard
//!   Pauli matrices, rows and columns ordered by increasing `m`;
//! * every element factors as `q = q_z(alpha) q_y(beta) q_z(gamma)` with
//!   `alpha in [0, 2pi)`, `beta in [0, pi]`, `gamma in [0, 4pi)`; the
//!   4pi range of `gamma` covers both sheets of the double cover.  When
//!   `beta` is 0 or pi only a combination of `alpha` and `gamma` is
//!   determined; `atan2(0, 0) = 0` then resolves the split deterministically;
//! * with these choices the one-parameter subgroup `q_z(theta)` is
//!   represented by `diag(e^{i m theta})`, so the invariant field `X`
//!   generating it has symbol `i m delta_{mn}` on each spin block.
//!
//! Matrix elements are evaluated by the explicit factorial sum over Euler
//! angles with log-factorial accumulation.  The sum alternates, and above
//! spin 25 double precision can no longer absorb the cancellation, so
//! requests beyond the cap are refused rather than silently degraded.

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::repr::{hs_norm, HalfInt};
use crate::timefreq::TAU;

/// Largest `2l` whose Wigner matrix keeps roughly 1e-12 accuracy in f64.
pub const STABLE_TWICE_ELL: u64 = 50;

/// A point of the 3-sphere, stored as a unit quaternion `(w, x, y, z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SU2Element {
    q: [f64; 4],
}

impl SU2Element {
    /// Normalizes the given quaternion; rejects vectors too close to zero
    /// for the direction to be meaningful.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (w * w + x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm <= 1e-8 {
            return Err(Error::BadData(format!(
                "quaternion norm {norm} too small or not finite"
            )));
        }
        Ok(SU2Element {
            q: [w / norm, x / norm, y / norm, z / norm],
        })
    }

    pub fn identity() -> Self {
        SU2Element { q: [1.0, 0.0, 0.0, 0.0] }
    }

    pub fn components(&self) -> [f64; 4] {
        self.q
    }

    pub fn mul(&self, rhs: &SU2Element) -> SU2Element {
        let [a0, a1, a2, a3] = self.q;
        let [b0, b1, b2, b3] = rhs.q;
        // Renormalize to keep long products on the sphere.
        SU2Element::new(
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        )
        .expect("product of unit quaternions is unit")
    }

    pub fn inverse(&self) -> SU2Element {
        let [w, x, y, z] = self.q;
        SU2Element { q: [w, -x, -y, -z] }
    }

    /// The rotation `q_z(theta)`: `(cos(theta/2), 0, 0, sin(theta/2))`.
    pub fn z_rotation(theta: f64) -> SU2Element {
        SU2Element {
            q: [(theta / 2.0).cos(), 0.0, 0.0, (theta / 2.0).sin()],
        }
    }

    /// Haar-uniform random element: a normalized 4-vector of gaussians.
    pub fn random<R: Rng>(rng: &mut R) -> SU2Element {
        loop {
            let mut g = [0.0f64; 4];
            for pair in g.chunks_mut(2) {
                let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                let u2: f64 = rng.gen_range(0.0..TAU);
                let r = (-2.0 * u1.ln()).sqrt();
                pair[0] = r * u2.cos();
                pair[1] = r * u2.sin();
            }
            if let Ok(e) = SU2Element::new(g[0], g[1], g[2], g[3]) {
                return e;
            }
        }
    }

    /// Builds `q_z(alpha) q_y(beta) q_z(gamma)`.
    pub fn from_euler(alpha: f64, beta: f64, gamma: f64) -> SU2Element {
        let cb = (beta / 2.0).cos();
        let sb = (beta / 2.0).sin();
        let u = (alpha + gamma) / 2.0;
        let v = (alpha - gamma) / 2.0;
        SU2Element {
            q: [cb * u.cos(), -sb * v.sin(), sb * v.cos(), cb * u.sin()],
        }
    }

    /// Euler angles `(alpha, beta, gamma)` with `alpha in [0, 2pi)`,
    /// `beta in [0, pi]`, `gamma in [0, 4pi)` reproducing this element
    /// exactly, sheet included.
    pub fn euler_zyz(&self) -> (f64, f64, f64) {
        let [w, x, y, z] = self.q;
        let u = f64::atan2(z, w);
        let v = f64::atan2(-x, y);
        let beta = 2.0 * f64::atan2((x * x + y * y).sqrt(), (w * w + z * z).sqrt());
        let alpha_raw = u + v;
        let gamma_raw = u - v;
        let alpha = alpha_raw.rem_euclid(TAU);
        // Shifting alpha by 2 pi k must shift gamma by -2 pi k to fix the element.
        let gamma = (gamma_raw - (alpha - alpha_raw)).rem_euclid(2.0 * TAU);
        (alpha, beta, gamma)
    }

    /// The defining spin-1/2 matrix `w I - i (x s1 + y s2 + z s3)`.
    pub fn defining_matrix(&self) -> Array2<Complex64> {
        let [w, x, y, z] = self.q;
        let mut mat = Array2::zeros((2, 2));
        mat[[0, 0]] = Complex64::new(w, -z);
        mat[[0, 1]] = Complex64::new(-y, -x);
        mat[[1, 0]] = Complex64::new(y, -x);
        mat[[1, 1]] = Complex64::new(w, z);
        mat
    }
}

/// The spin-`l` representation matrix of one group element.
#[derive(Clone, Debug)]
pub struct WignerMatrix {
    pub ell: HalfInt,
    pub mat: Array2<Complex64>,
}

/// Spin-`l` matrix of `g`, refusing spins beyond [`STABLE_TWICE_ELL`].
pub fn wigner(ell: HalfInt, g: &SU2Element) -> Result<WignerMatrix> {
    wigner_with_cap(ell, g, STABLE_TWICE_ELL)
}

/// Spin-`l` matrix of `g` with an explicit stability cap on `2l`.
pub fn wigner_with_cap(ell: HalfInt, g: &SU2Element, cap_twice: u64) -> Result<WignerMatrix> {
    if ell.twice() > cap_twice {
        return Err(Error::SpinCap {
            two_ell: ell.twice(),
            cap_two_ell: cap_twice,
        });
    }
    let (alpha, beta, gamma) = g.euler_zyz();
    let dim = ell.dim();
    let lnf = ln_factorials(ell.twice() as usize + 1);
    let mut mat = Array2::zeros((dim, dim));
    for (row, two_mp) in ell.twice_m_values().enumerate() {
        for (col, two_m) in ell.twice_m_values().enumerate() {
            let d = little_d(&lnf, ell.twice(), two_mp, two_m, beta);
            let phase = 0.5 * (two_mp as f64 * alpha + two_m as f64 * gamma);
            mat[[row, col]] = Complex64::from_polar(1.0, phase) * d;
        }
    }
    Ok(WignerMatrix { ell, mat })
}

/// Real reduced matrix element for the `q_y(beta)` factor, in the row/column
/// order of increasing `m`.  Evaluated by the alternating factorial sum with
/// log-factorial accumulation.
fn little_d(lnf: &[f64], two_ell: u64, two_mp: i64, two_m: i64, beta: f64) -> f64 {
    let tj = two_ell as i64;
    let j_minus_m = (tj - two_m) / 2;
    let j_plus_m = (tj + two_m) / 2;
    let j_minus_mp = (tj - two_mp) / 2;
    let j_plus_mp = (tj + two_mp) / 2;
    let half_ln = 0.5
        * (lnf[j_minus_mp as usize]
            + lnf[j_plus_mp as usize]
            + lnf[j_minus_m as usize]
            + lnf[j_plus_m as usize]);
    let s_min = 0.max((two_mp - two_m) / 2);
    let s_max = j_minus_m.min(j_plus_mp);
    let c = (beta / 2.0).cos();
    let sn = (beta / 2.0).sin();
    let mut acc = 0.0;
    for s in s_min..=s_max {
        let m_shift = (two_m - two_mp) / 2 + s;
        let ln_den = lnf[(j_minus_m - s) as usize]
            + lnf[s as usize]
            + lnf[m_shift as usize]
            + lnf[(j_plus_mp - s) as usize];
        let cos_pow = (2 * tj - two_m + two_mp) / 2 - 2 * s;
        let sin_pow = (two_m - two_mp) / 2 + 2 * s;
        let sign = if m_shift % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * (half_ln - ln_den).exp() * c.powi(cos_pow as i32) * sn.powi(sin_pow as i32);
    }
    acc
}

fn ln_factorials(upto: usize) -> Vec<f64> {
    let mut lnf = vec![0.0; upto + 1];
    for k in 1..=upto {
        lnf[k] = lnf[k - 1] + (k as f64).ln();
    }
    lnf
}

/// Symbol of the invariant field `X` on the spin-`l` block: `diag(i m)`.
pub fn symbol_x(ell: HalfInt) -> Array2<Complex64> {
    let dim = ell.dim();
    let mut mat = Array2::zeros((dim, dim));
    for (row, two_m) in ell.twice_m_values().enumerate() {
        mat[[row, row]] = Complex64::new(0.0, two_m as f64 / 2.0);
    }
    mat
}

/// Product quadrature exact on all matrix-element products up to the stated
/// spin: uniform in the two circle angles, Gauss-Legendre in `cos(beta)`.
#[derive(Clone, Debug)]
pub struct HaarQuadrature {
    pub nodes: Vec<SU2Element>,
    pub weights: Vec<f64>,
    pub max_exact_ell: HalfInt,
}

/// Builds the product rule for a given exactness spin.  Node count grows as
/// `(4l+1)^2 (2l+1)`; spin 4 already needs 2601 nodes, so build once and share.
pub fn haar_quadrature(max_exact_ell: HalfInt) -> HaarQuadrature {
    let twice = max_exact_ell.twice() as usize;
    let n_circle = 2 * twice + 1; // 4 l + 1 points on each circle angle
    let n_beta = twice + 1; // 2 l + 1 Gauss-Legendre points in cos(beta)
    let (gl_nodes, gl_weights) = gauss_legendre(n_beta);
    let mut nodes = Vec::with_capacity(n_circle * n_circle * n_beta);
    let mut weights = Vec::with_capacity(n_circle * n_circle * n_beta);
    let w_circle = 1.0 / (n_circle * n_circle) as f64;
    for i in 0..n_circle {
        let alpha = TAU * i as f64 / n_circle as f64;
        for (u, wb) in gl_nodes.iter().zip(&gl_weights) {
            let beta = u.clamp(-1.0, 1.0).acos();
            for k in 0..n_circle {
                let gamma = 2.0 * TAU * k as f64 / n_circle as f64;
                nodes.push(SU2Element::from_euler(alpha, beta, gamma));
                weights.push(0.5 * wb * w_circle);
            }
        }
    }
    HaarQuadrature {
        nodes,
        weights,
        max_exact_ell,
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_n'(x) via the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 && n > 1 {
        // The middle node is exactly zero by symmetry.
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Sphere-side Fourier coefficient `sum_i w_i f(x_i) D^l(x_i)*` of samples
/// aligned with the quadrature nodes.  Exact whenever the sampled function
/// is band-limited so that the product stays within the rule's exact band.
pub fn fourier_su2(
    quad: &HaarQuadrature,
    samples: &[Complex64],
    ell: HalfInt,
) -> Result<Array2<Complex64>> {
    if samples.len() != quad.nodes.len() {
        return Err(Error::Shape(format!(
            "{} samples for {} quadrature nodes",
            samples.len(),
            quad.nodes.len()
        )));
    }
    if ell > quad.max_exact_ell {
        return Err(Error::QuadratureOrder(format!(
            "spin {ell} beyond the rule's exact band {}",
            quad.max_exact_ell
        )));
    }
    let dim = ell.dim();
    let mut out = Array2::<Complex64>::zeros((dim, dim));
    for ((node, w), f) in quad.nodes.iter().zip(&quad.weights).zip(samples) {
        let t = wigner(ell, node)?;
        let wf = f * *w;
        for m in 0..dim {
            for n in 0..dim {
                // (D*)_{mn} = conj(D_{nm})
                out[[m, n]] += wf * t.mat[[n, m]].conj();
            }
        }
    }
    Ok(out)
}

/// Pointwise inversion `sum_l (2l+1) Tr(D^l(g) c_l)` of a coefficient family.
pub fn synthesize_point(
    coeffs: &BTreeMap<HalfInt, Array2<Complex64>>,
    g: &SU2Element,
) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (ell, c) in coeffs {
        let dim = ell.dim();
        if c.shape() != [dim, dim] {
            return Err(Error::Shape(format!(
                "block for spin {ell} has shape {:?}, expected {dim}x{dim}",
                c.shape()
            )));
        }
        let t = wigner(*ell, g)?;
        let mut tr = Complex64::new(0.0, 0.0);
        for m in 0..dim {
            for n in 0..dim {
                tr += t.mat[[m, n]] * c[[n, m]];
            }
        }
        acc += tr * dim as f64;
    }
    Ok(acc)
}

/// Representation matrices of every node of a quadrature, for all spins up
/// to `ell_max`, indexed `[node][2l]`.  Shared by the transforms to avoid
/// recomputing Wigner matrices in inner loops.
pub struct WignerTable {
    pub ell_max: HalfInt,
    pub per_node: Vec<Vec<Array2<Complex64>>>,
}

impl WignerTable {
    pub fn build(quad: &HaarQuadrature, ell_max: HalfInt) -> Result<WignerTable> {
        let mut per_node = Vec::with_capacity(quad.nodes.len());
        for node in &quad.nodes {
            let mut stack = Vec::with_capacity(ell_max.twice() as usize + 1);
            for ell in ell_max.spins_through() {
                stack.push(wigner(ell, node)?.mat);
            }
            per_node.push(stack);
        }
        Ok(WignerTable { ell_max, per_node })
    }

    pub fn matrix(&self, node: usize, ell: HalfInt) -> &Array2<Complex64> {
        &self.per_node[node][ell.twice() as usize]
    }
}

/// Unitarity defect `max(|D D* - I|)` of one representation matrix.
pub fn unitarity_defect(t: &WignerMatrix) -> f64 {
    let dim = t.ell.dim();
    let mut worst = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                acc += t.mat[[i, k]] * t.mat[[j, k]].conj();
            }
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((acc - want).norm());
        }
    }
    worst
}

/// Homomorphism defect `|D(gh) - D(g) D(h)|_HS`.
pub fn homomorphism_defect(ell: HalfInt, g: &SU2Element, h: &SU2Element) -> Result<f64> {
    let tg = wigner(ell, g)?.mat;
    let th = wigner(ell, h)?.mat;
    let tgh = wigner(ell, &g.mul(h))?.mat;
    let prod = tg.dot(&th);
    Ok(hs_norm((&tgh - &prod).view()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn defining_matrix_is_special_unitary() {
        let g = SU2Element::new(0.3, -0.4, 0.5, 0.1).unwrap();
        let u = g.defining_matrix();
        let det = u[[0, 0]] * u[[1, 1]] - u[[0, 1]] * u[[1, 0]];
        assert!((det - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn euler_roundtrip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let g = SU2Element::random(&mut rng);
            let (a, b, gm) = g.euler_zyz();
            assert!((0.0..TAU).contains(&a), "alpha = {a}");
            assert!((0.0..=std::f64::consts::PI).contains(&b), "beta = {b}");
            assert!((0.0..2.0 * TAU).contains(&gm), "gamma = {gm}");
            let back = SU2Element::from_euler(a, b, gm);
            let d: f64 = g
                .components()
                .iter()
                .zip(back.components().iter())
                .map(|(p, q)| (p - q) * (p - q))
                .sum::<f64>()
                .sqrt();
            assert!(d < 1e-12, "roundtrip defect {d}");
        }
    }

    #[test]
    fn euler_roundtrip_degenerate_axes() {
        for theta in [0.0, 0.3, std::f64::consts::PI, 4.0, 6.0, 9.0] {
            let g = SU2Element::z_rotation(theta);
            let (a, b, gm) = g.euler_zyz();
            let back = SU2Element::from_euler(a, b, gm);
            for (p, q) in g.components().iter().zip(back.components().iter()) {
                assert!((p - q).abs() < 1e-12, "theta = {theta}");
            }
        }
        // beta = pi sheet: pure y-type elements, both signs.
        for v in [0.0f64, 1.0, 2.5, 4.0] {
            let g = SU2Element::new(0.0, -v.sin(), v.cos(), 0.0).unwrap();
            let (a, b, gm) = g.euler_zyz();
            let back = SU2Element::from_euler(a, b, gm);
            for (p, q) in g.components().iter().zip(back.components().iter()) {
                assert!((p - q).abs() < 1e-12, "beta=pi case v = {v}");
            }
        }
    }

    #[test]
    fn wigner_identity_is_identity() {
        for twice in 0..=6 {
            let ell = HalfInt::from_twice(twice);
            let t = wigner(ell, &SU2Element::identity()).unwrap();
            for i in 0..ell.dim() {
                for j in 0..ell.dim() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((t.mat[[i, j]] - c(want, 0.0)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn wigner_half_is_defining_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let g = SU2Element::random(&mut rng);
            let t = wigner(HalfInt::HALF, &g).unwrap();
            let u = g.defining_matrix();
            for i in 0..2 {
                for j in 0..2 {
                    assert!(
                        (t.mat[[i, j]] - u[[i, j]]).norm() < 1e-13,
                        "entry ({i},{j}): {} vs {}",
                        t.mat[[i, j]],
                        u[[i, j]]
                    );
                }
            }
        }
    }

    #[test]
    fn z_rotation_is_diagonal_with_increasing_phases() {
        let theta = 0.83;
        let g = SU2Element::z_rotation(theta);
        for twice in [1u64, 2, 3, 4] {
            let ell = HalfInt::from_twice(twice);
            let t = wigner(ell, &g).unwrap();
            for (row, two_m) in ell.twice_m_values().enumerate() {
                for (col, _) in ell.twice_m_values().enumerate() {
                    let want = if row == col {
                        Complex64::from_polar(1.0, two_m as f64 / 2.0 * theta)
                    } else {
                        c(0.0, 0.0)
                    };
                    assert!(
                        (t.mat[[row, col]] - want).norm() < 1e-13,
                        "2l = {twice}, row {row}, col {col}"
                    );
                }
            }
        }
    }

    #[test]
    fn double_cover_sign_flips_on_odd_spins() {
        let g = SU2Element::new(0.2, 0.3, -0.8, 0.4).unwrap();
        let minus_g = {
            let [w, x, y, z] = g.components();
            SU2Element::new(-w, -x, -y, -z).unwrap()
        };
        for twice in 0..=5u64 {
            let ell = HalfInt::from_twice(twice);
            let a = wigner(ell, &g).unwrap().mat;
            let b = wigner(ell, &minus_g).unwrap().mat;
            let sign = if twice % 2 == 0 { 1.0 } else { -1.0 };
            let defect = hs_norm((&a - &(&b * c(sign, 0.0))).view());
            assert!(defect < 1e-12, "2l = {twice}: defect {defect}");
        }
    }

    /// Independent construction of the spin-1 matrix: the symmetric square
    /// of the defining representation on the basis (e-*e-, sym, e+*e+).
    fn spin1_from_tensor_square(g: &SU2Element) -> Array2<Complex64> {
        let u = g.defining_matrix();
        let mut kron = Array2::<Complex64>::zeros((4, 4));
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        kron[[2 * i + k, 2 * j + l]] = u[[i, j]] * u[[k, l]];
                    }
                }
            }
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // Columns: isometry from the 3-dim symmetric subspace into C^2 (x) C^2.
        let p = [
            [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(s, 0.0), c(s, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        ];
        let mut out = Array2::zeros((3, 3));
        for a in 0..3 {
            for b in 0..3 {
                let mut acc = c(0.0, 0.0);
                for i in 0..4 {
                    for j in 0..4 {
                        acc += p[a][i].conj() * kron[[i, j]] * p[b][j];
                    }
                }
                out[[a, b]] = acc;
            }
        }
        out
    }

    #[test]
    fn spin1_matches_symmetric_square_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..60 {
            let g = SU2Element::random(&mut rng);
            let direct = wigner(HalfInt::ONE, &g).unwrap().mat;
            let oracle = spin1_from_tensor_square(&g);
            let defect = hs_norm((&direct - &oracle).view());
            assert!(defect < 1e-12, "defect {defect}");
        }
    }

    #[test]
    fn wigner_unitary_and_homomorphic() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let g = SU2Element::random(&mut rng);
            let h = SU2Element::random(&mut rng);
            for twice in [0u64, 1, 2, 3, 5, 8] {
                let ell = HalfInt::from_twice(twice);
                let t = wigner(ell, &g).unwrap();
                assert!(unitarity_defect(&t) < 1e-11);
                assert!(homomorphism_defect(ell, &g, &h).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn wigner_refuses_beyond_cap() {
        let g = SU2Element::identity();
        let err = wigner(HalfInt::from_twice(STABLE_TWICE_ELL + 1), &g).unwrap_err();
        match err {
            Error::SpinCap { two_ell, cap_two_ell } => {
                assert_eq!(two_ell, STABLE_TWICE_ELL + 1);
                assert_eq!(cap_two_ell, STABLE_TWICE_ELL);
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(wigner_with_cap(HalfInt::from_twice(52), &g, 60).is_ok());
    }

    #[test]
    fn symbol_x_worked_example() {
        let s = symbol_x(HalfInt::ONE);
        assert!((s[[0, 0]] - c(0.0, -1.0)).norm() < 1e-15);
        assert!((s[[1, 1]] - c(0.0, 0.0)).norm() < 1e-15);
        assert!((s[[2, 2]] - c(0.0, 1.0)).norm() < 1e-15);
        assert!(s[[0, 1]].norm() == 0.0);
    }

    #[test]
    fn symbol_x_is_derivative_of_z_subgroup() {
        // Finite-difference check: d/ds D^l(q_z(s)) at s=0 equals diag(i m).
        let ell = HalfInt::from_twice(3);
        let eps = 1e-6;
        let plus = wigner(ell, &SU2Element::z_rotation(eps)).unwrap().mat;
        let minus = wigner(ell, &SU2Element::z_rotation(-eps)).unwrap().mat;
        let fd = (&plus - &minus) / c(2.0 * eps, 0.0);
        let sym = symbol_x(ell);
        assert!(hs_norm((&fd - &sym).view()) < 1e-9);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // Exact through degree 9: check x^8 and x^9.
        let m8: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        let m9: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(9)).sum();
        assert!((m8 - 2.0 / 9.0).abs() < 1e-13);
        assert!(m9.abs() < 1e-13);
    }

    #[test]
    fn haar_weights_sum_to_one() {
        let quad = haar_quadrature(HalfInt::from_twice(3));
        let total: f64 = quad.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_quadrature_orthonormality_small() {
        // <sqrt(d) D^l_ij, sqrt(d') D^l'_i'j'> = delta over all spins <= 3/2.
        let max = HalfInt::from_twice(3);
        let quad = haar_quadrature(max);
        let table = WignerTable::build(&quad, max).unwrap();
        let mut basis: Vec<(usize, usize, usize)> = Vec::new();
        for ell in max.spins_through() {
            let d = ell.dim();
            for i in 0..d {
                for j in 0..d {
                    basis.push((ell.twice() as usize, i, j));
                }
            }
        }
        for (a, &(ta, ia, ja)) in basis.iter().enumerate() {
            for (b, &(tb, ib, jb)) in basis.iter().enumerate() {
                let mut acc = c(0.0, 0.0);
                for node in 0..quad.nodes.len() {
                    let fa = table.per_node[node][ta][[ia, ja]];
                    let fb = table.per_node[node][tb][[ib, jb]];
                    acc += quad.weights[node] * fa * fb.conj();
                }
                let scale = ((ta + 1) as f64 * (tb + 1) as f64).sqrt();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!(
                    (acc * scale - c(want, 0.0)).norm() < 1e-10,
                    "pair {a},{b}: got {}",
                    acc * scale
                );
            }
        }
    }

    #[test]
    fn fourier_of_matrix_element_hits_transposed_slot() {
        // f = D^1_{0,1} has coefficient 1/3 at position (m,n) = (1,0), i.e.
        // storage (2,1), and vanishes on every other spin <= exact band.
        let max = HalfInt::from_twice(4);
        let quad = haar_quadrature(max);
        let samples: Vec<Complex64> = quad
            .nodes
            .iter()
            .map(|g| wigner(HalfInt::ONE, g).unwrap().mat[[1, 2]])
            .collect();
        let coef = fourier_su2(&quad, &samples, HalfInt::ONE).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if (i, j) == (2, 1) { 1.0 / 3.0 } else { 0.0 };
                assert!(
                    (coef[[i, j]] - c(want, 0.0)).norm() < 1e-12,
                    "entry ({i},{j}) = {}",
                    coef[[i, j]]
                );
            }
        }
        let other = fourier_su2(&quad, &samples, HalfInt::from_twice(3)).unwrap();
        assert!(hs_norm(other.view()) < 1e-12);
    }

    #[test]
    fn fourier_respects_exact_band() {
        let quad = haar_quadrature(HalfInt::ONE);
        let samples = vec![c(1.0, 0.0); quad.nodes.len()];
        assert!(fourier_su2(&quad, &samples, HalfInt::from_twice(3)).is_err());
    }

    #[test]
    fn synthesize_point_inverts_fourier() {
        let max = HalfInt::from_twice(2);
        let quad = haar_quadrature(max);
        // Band-limited test function with spin-0 and spin-1 content.
        let samples: Vec<Complex64> = quad
            .nodes
            .iter()
            .map(|g| {
                let t1 = wigner(HalfInt::ONE, g).unwrap().mat;
                c(0.7, 0.0) + t1[[0, 2]] * c(0.0, 1.5) + t1[[1, 1]] * c(-0.4, 0.2)
            })
            .collect();
        let mut coeffs = BTreeMap::new();
        for ell in max.spins_through() {
            coeffs.insert(ell, fourier_su2(&quad, &samples, ell).unwrap());
        }
        for (idx, node) in quad.nodes.iter().enumerate().step_by(97) {
            let back = synthesize_point(&coeffs, node).unwrap();
            assert!(
                (back - samples[idx]).norm() < 1e-10,
                "node {idx}: {back} vs {}",
                samples[idx]
            );
        }
    }
}
