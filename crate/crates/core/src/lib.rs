//! Certified numerics for proportional-delay ("pantograph") differential equations.
//!
//! The centre of the crate is the entire function
//! `f(x) = Σ xⁿ / (n! · 2^{n(n-1)/2})`, the solution of `y'(x) = y(x/2)`, `y(0) = 1`.
//! It is evaluated in exact rational arithmetic with a rigorous tail bound
//! ([`series`]), its real zeros are localized by certified bisection ([`zeros`]),
//! and its partial sums are analysed with Sturm sequences ([`truncation`]).
//!
//! Around that core sit a general adaptive solver for delay systems
//! `x' = A(t)x + F(x(φ(t)))x + G(x(ψ(t)))` ([`fode`]), a Fourier solver for the
//! half-time heat equation `u_t = u_xx(t/2, x)` ([`heat`]) and a Burgers-type
//! transport demonstration ([`transport`]).
//!
//! Batch operations take an [`Exec`] argument. With the default `parallel`
//! feature, [`Exec::Parallel`] fans work out over rayon; without it every mode runs
//! sequentially. Results are identical in both modes.

pub mod exec;
pub mod fode;
pub mod heat;
pub mod rational;
pub mod series;
pub mod transport;
pub mod truncation;
pub mod zeros;

pub use exec::Exec;
pub use rational::{Rational, RationalInterval};
pub use series::{Budget, CertifiedSign, IntervalValue, SeriesError, SeriesSpec};
