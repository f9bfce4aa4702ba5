//! Exact-arithmetic engine for quivers with potentials and quantum cluster
//! algebras.
//!
//! The crate is organised around six building blocks:
//!
//! * [`quiver`] — the quiver data model, combinatorial mutation, exchange
//!   matrices, framing, gluing and cycle enumeration.
//! * [`path_algebra`] — noncommutative path-algebra arithmetic over exact
//!   rationals: cyclic words, potentials with truncation tracking, cyclic
//!   derivatives and grading checks.
//! * [`qp`] — premutation, splitting into trivial and reduced parts, full QP
//!   mutation and nondegeneracy verification along vertex sequences.
//! * [`grading`] — feasibility of arrow gradings (equal positive degree on a
//!   prescribed cycle set) with exact certificates either way.
//! * [`quantum`] — the quantum torus over `Z[q^{±1/2}]`, compatible pairs,
//!   quantization, quantum seed mutation and Laurent expansion.
//! * [`positivity`] — positivity and Lefschetz decomposition of expansion
//!   coefficients.
//!
//! All coefficient arithmetic is exact (`num::BigRational`, `num::BigInt`);
//! there is no floating point anywhere. Values are immutable and operations
//! are pure, so everything can be used concurrently without coordination.
//! With the `parallel` feature (on by default) the batch helpers in [`par`]
//! fan work out over rayon; without it they degrade to sequential loops with
//! identical results.

pub mod catalog;
pub mod classical;
pub mod error;
pub mod grading;
pub mod linalg;
pub mod par;
pub mod path_algebra;
pub mod positivity;
pub mod qp;
pub mod quantum;
pub mod quiver;
pub mod subst;

pub use error::*;

/// Exact rational scalar used throughout the crate.
pub type Rat = num::BigRational;
/// Arbitrary-precision integer.
pub type Int = num::BigInt;

pub(crate) fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub(crate) fn rat_int(n: i64) -> Rat {
    Rat::from(Int::from(n))
}
