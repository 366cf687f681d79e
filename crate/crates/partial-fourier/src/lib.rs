//! Fourier analysis on the product of the circle with the 3-sphere, done
//! one factor at a time.
//!
//! A function `f(t, x)` on `T^1 x S^3` (with `S^3` carrying its group
//! structure as the unit quaternions) has a matrix-valued partial
//! coefficient `u(t, l) = \int f(t, x) D^l(x)* dx` for every irreducible
//! unitary representation `D^l`, and a doubly transformed coefficient
//! `u(tau, l)` after a further circle transform in `t`.  This crate
//! provides:
//!
//! * the representation bookkeeping (half-integer spins, Kronecker index
//!   flattening, weights and Hilbert-Schmidt norms) in [`repr`];
//! * Wigner matrices, Haar-exact quadrature and the sphere-side transform
//!   in [`su2`];
//! * sampled fields, partial/double coefficient containers and the
//!   transforms between them in [`transform`];
//! * decay classification of coefficient data (smooth vs. distributional
//!   vs. undecided) in [`classify`];
//! * a spectral solver for `Lu = du/dt + a(t) X u = f`, where `X` is the
//!   left-invariant field whose symbol is `i m` on each representation,
//!   in [`solver`];
//! * the gauge conjugation that reduces `L` to constant coefficients in
//!   [`conjugation`];
//! * exact rational certificates for small-divisor behaviour of the mean
//!   value `a0` (resonances, divisor floors, Liouville witnesses) in
//!   [`diophantine`].
//!
//! Everything numerical is deterministic: containers are ordered maps,
//! random field generators take explicit seeds, and quadratures are
//! constructed from their orders alone.

pub mod classify;
pub mod conjugation;
pub mod diophantine;
pub mod error;
pub mod repr;
pub mod solver;
pub mod su2;
pub mod transform;

mod timefreq;

pub use error::{Error, Result};
pub use timefreq::Spectrum;
