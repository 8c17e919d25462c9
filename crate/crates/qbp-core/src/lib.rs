//! Exact simulation, transpilation and degree analysis for quantum branching
//! programs and query circuits.
//!
//! # Overview
//!
//! A *generalized quantum branching program* (GQBP) is a levelled directed
//! acyclic multi-graph whose nodes each query one input bit. Edges between
//! consecutive levels carry complex amplitudes conditioned on the queried
//! bit, and a single computational-basis measurement at the last level
//! decides acceptance. This crate implements that model exactly (no
//! sampling), together with its relatives and the reductions between them:
//!
//! * [`model`] — program representations ([`GqbpProgram`], [`AqbpProgram`],
//!   [`NqbpProgram`], [`ClassicalBp`]) and validation of every structural and
//!   algebraic invariant, in particular the *quantumly well-behaved*
//!   condition that makes each level step an isometry for every input.
//! * [`sim`] — state-vector evolution and measurement semantics for every
//!   program model, plus exhaustive truth-table construction.
//! * [`circuit`] — an intermediate representation and exact simulator for
//!   quantum query circuits under phase, standard and QRAM oracle models.
//! * [`transpile`] — model-to-model reductions (AQBP ↔ GQBP ↔ NQBP,
//!   circuits ↔ programs) with certificates recording the width/length/qubit
//!   accounting of each construction, and a dummy-level elimination pass.
//! * [`analysis`] — multilinear (Möbius) interpolation of acceptance
//!   tables, exact degree, degree-based length lower bounds and a
//!   brute-force equivalence oracle.
//! * [`zoo`] — canonical constructions (Parity, Maj₃, Deutsch–Jozsa) and
//!   seeded random-instance generators.
//!
//! # Conventions
//!
//! * Input bits are 0-based: an input `x ∈ {0,1}ⁿ` has bits `x₀ … x_{n−1}`.
//! * Inputs are packed into `u64` masks little-endian: bit `i` of the mask
//!   is `xᵢ`. Truth tables are indexed by that mask.
//! * Qubit 0 is the least significant bit of a circuit basis-state index;
//!   register values are read little-endian from their qubit range.
//! * All numeric comparisons take an explicit absolute tolerance; the
//!   default is [`DEFAULT_TOL`] (`1e-9`). Degree extraction uses the looser
//!   [`DEGREE_TOL`] (`1e-8`) because Möbius sums accumulate `2ⁿ` roundings.
//!
//! # Scalar genericity
//!
//! Everything is generic over the floating-point scalar through the
//! [`Scalar`] trait (implemented for `f32` and `f64`); amplitudes are
//! `num_complex::Complex<T>`. The crate root exports `f64` aliases
//! ([`Gqbp`], [`Aqbp`], [`Nqbp`], [`Classical`], [`Circuit`], …) which are
//! what the CLI and most tests use.
//!
//! # Example
//!
//! ```
//! use qbp_core::{sim, zoo};
//!
//! // Width-2 program computing the parity of 4 bits in 2 level steps.
//! let g = zoo::build_parity::<f64>(4).unwrap();
//! assert!(g.validate().ok);
//!
//! // x = 1110 (x₀=1, x₁=1, x₂=1, x₃=0) has odd parity: accepted.
//! let p = sim::accept_prob_gqbp(&g, 0b0111).unwrap();
//! assert!((p - 1.0).abs() < 1e-9);
//! ```

pub mod analysis;
pub mod circuit;
pub mod error;
pub mod linalg;
pub mod model;
pub mod sim;
pub mod transpile;
pub mod zoo;

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

pub use error::{Error, Result};

/// Floating-point scalar for amplitudes and probabilities: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + LowerExp + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Default absolute tolerance for validation and equivalence checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Coefficient tolerance for degree extraction from multilinear transforms.
pub const DEGREE_TOL: f64 = 1e-8;

/// Default cap on exhaustive input enumeration (`2ⁿ` simulations).
pub const DEFAULT_MAX_N: usize = 20;

/// [`DEFAULT_TOL`] converted to the scalar type `T`.
pub fn default_tol<T: Scalar>() -> T {
    T::from_f64(DEFAULT_TOL).unwrap()
}

/// [`DEGREE_TOL`] converted to the scalar type `T`.
pub fn degree_tol<T: Scalar>() -> T {
    T::from_f64(DEGREE_TOL).unwrap()
}

/// Complex amplitude over the scalar `T` (finite components required by
/// every validator).
pub type ComplexAmp<T> = num_complex::Complex<T>;

/// Double-precision amplitude.
pub type Amp = ComplexAmp<f64>;

/// Double-precision aliases for the program and circuit types.
pub type Gqbp = model::GqbpProgram<f64>;
/// See [`model::AqbpProgram`].
pub type Aqbp = model::AqbpProgram<f64>;
/// See [`model::NqbpProgram`].
pub type Nqbp = model::NqbpProgram<f64>;
/// See [`model::ClassicalBp`].
pub type Classical = model::ClassicalBp<f64>;
/// See [`circuit::QueryCircuit`].
pub type Circuit = circuit::QueryCircuit<f64>;
/// See [`sim::BooleanTable`].
pub type Table = sim::BooleanTable<f64>;
/// See [`sim::StateVector`].
pub type State = sim::StateVector<f64>;
/// See [`analysis::MultilinearPoly`].
pub type Poly = analysis::MultilinearPoly<f64>;
