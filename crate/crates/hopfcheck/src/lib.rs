//! Exact-arithmetic analysis of mass-action reaction networks.
//!
//! This crate decides whether a reaction network can be *certified* not to
//! undergo a simple Hopf bifurcation, by working with the Jacobian of the
//! mass-action system in convex parameters `(h, ℓ)` and certifying sign
//! conditions on Hurwitz determinants of its reduced characteristic
//! polynomial. All load-bearing computation is exact: big-rational sparse
//! multivariate polynomials, integer linear algebra, and quadratic field
//! extensions. Floating point appears only to seed eigenvalue iterations and
//! in JSON echoes of decimal inputs.
//!
//! # Pipeline
//!
//! 1. [`net`] parses a small reaction DSL into a [`net::Network`], builds the
//!    stoichiometric and reactant matrices, finds `y ⇌ Y → y′` motifs and
//!    checks the structural assumptions under which removing the backward
//!    reaction preserves the set of reduced characteristic polynomials.
//! 2. [`cone`] computes the extreme rays of the flux cone `ker(N) ∩ ℝ^r_{≥0}`
//!    with integer arithmetic (double description), yielding the matrix `E`.
//! 3. [`spectral`] forms the convex-parameter Jacobian
//!    `J(h,ℓ) = N·diag(Eℓ)·Bᵀ·diag(h)`, its reduced characteristic
//!    polynomial, and the Hurwitz determinant chain with exact sign verdicts.
//! 4. [`prover`] runs the case-split certification campaign showing that the
//!    trailing coefficient being positive forces the second Hurwitz
//!    determinant from the top to be positive, plus randomized exact
//!    implication sampling.
//! 5. [`witness`] realizes rate constants and steady states from convex
//!    parameters, computes eigenvalue configurations with exact trailing-zero
//!    splitting and certified pure-imaginary detection, and transports
//!    parameters across a motif reduction through the quadratic-extension
//!    map `phi`.
//!
//! # Design notes
//!
//! * Polynomial coefficients are always `BigRational`; there is no
//!   float-backed polynomial type. Modules that interface with decimal input
//!   parse it exactly (`0.9` becomes `9/10`).
//! * Matrix algorithms that must work over several exact coefficient domains
//!   (rationals, quadratic extensions, polynomials) are generic over the
//!   small context trait [`ring::Ring`].
//! * Determinant-style computations are division free (Berkowitz, binomial
//!   recombination) so they stay inside the ring.

#![deny(unsafe_code)]
#![warn(missing_docs)]
#![warn(unreachable_pub)]
#![warn(rust_2018_idioms)]

pub mod cone;
pub mod fixtures;
pub mod matrix;
pub mod net;
pub mod poly;
pub mod prover;
pub mod ring;
pub mod roots;
pub mod spectral;
pub mod witness;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

/// Convenience result alias used throughout the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Top-level error type aggregating the per-module error kinds.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Error while parsing or validating a network description.
    #[error(transparent)]
    Net(#[from] net::NetError),
    /// Error in polynomial construction or arithmetic.
    #[error(transparent)]
    Poly(#[from] poly::PolyError),
    /// Error in cone/extreme-ray computation.
    #[error(transparent)]
    Cone(#[from] cone::ConeError),
    /// Error in Jacobian/characteristic-polynomial/Hurwitz computation.
    #[error(transparent)]
    Spectral(#[from] spectral::SpectralError),
    /// Error in the certification campaign.
    #[error(transparent)]
    Prover(#[from] prover::ProverError),
    /// Error in witness realization, spectra, or parameter transport.
    #[error(transparent)]
    Witness(#[from] witness::WitnessError),
}
