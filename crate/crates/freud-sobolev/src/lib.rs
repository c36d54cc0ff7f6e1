//! Orthogonal polynomials for the exponential weight e^{-x⁴} on the real
//! line, and their Sobolev-type modification by point masses M₀ (function
//! value) and M₁ (derivative value) at the origin.
//!
//! The crate provides:
//! - recurrence coefficients a_n², norms, and orthonormalization constants,
//!   built by a damped Newton iteration on the string equation with two
//!   independent cross-validation oracles ([`coeffs`]);
//! - stable evaluation of the polynomials, their derivatives, and the
//!   Christoffel–Darboux kernels, including confluent forms at the origin
//!   ([`freud`]);
//! - the modified (Sobolev-type) family: connection coefficients, five-term
//!   recurrence, limit polynomials for M → ∞, and a quadrature oracle for the
//!   modified inner product ([`sobolev`]);
//! - zero finding, interlacing reports, and zero trajectories as the masses
//!   vary ([`zeros`]);
//! - ladder (raising/lowering) operators, the second-order differential
//!   equation, its rational coefficient r(x) = P(x)/u(x) with biquartic
//!   denominator u, and the electrostatic interpretation of the zeros
//!   ([`holonomic`]);
//! - a command-line interface reproducing the reference tables ([`cli`]).

pub mod cli;
pub mod coeffs;
pub mod error;
pub mod freud;
pub mod hp;
pub mod quad;
pub mod sobolev;
pub mod zeros;
pub mod holonomic;
