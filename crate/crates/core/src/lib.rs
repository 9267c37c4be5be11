//! Verification toolkit for the non-elliptic terms of the GL(2) trace formula.
//!
//! The crate has two layers:
//!
//! * an **exact layer** built on arbitrary-precision rationals: the
//!   `Q ⊕ ⊕_p Q·log p` value field ([`exact::LogNumber`]), half-integer prime
//!   powers ([`exact::HalfPowRational`]), p-adic valuations and the modified
//!   norm ([`padic`]), exact Haar integration over p-adic shells ([`shells`]),
//!   and closed-form weighted orbital integrals ([`orbital`]);
//! * a **numeric layer** for everything archimedean or asymptotic: the
//!   θ-profile and its quadratures ([`orbital::profile`], [`orbital::arch`]),
//!   multiplicative-function sieves and Dirichlet L-values ([`arith`]),
//!   global hyperbolic sums ([`hyperbolic`]) and the spectral-side coefficient
//!   ledger with its residual sweeps ([`spectral`]).
//!
//! The exact layer reproduces the split-torus shell constants structurally
//! (equality of `LogNumber`s, never a float comparison); the numeric layer
//! checks the `X log X` / `X` main terms against direct partial sums.

pub mod arith;
pub mod exact;
pub mod hyperbolic;
pub mod orbital;
pub mod padic;
pub mod shells;
pub mod spectral;

pub use exact::{HalfPowRational, LogNumber, Rational};
pub use padic::PlaceSet;
