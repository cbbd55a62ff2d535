//! A desk-scale laboratory for the *-distribution of partial transposes of
//! Haar unitary random matrices.
//!
//! The crate has two faces that are meant to agree with each other:
//!
//! * **Exact combinatorics**: entry permutations of `[N]²` ([`perms`]),
//!   non-crossing partition machinery ([`ncpart`]), the unitary Weingarten
//!   function in exact rational arithmetic ([`weingarten`]), and closed-form
//!   expected traces of words in entry-permuted Haar unitaries ([`moments`]).
//! * **Simulation**: Haar sampling and seeded Monte Carlo estimation of the
//!   same traces ([`sampler`]), plus the asymptotic-freeness criterion for
//!   families of partial transposes ([`freeness`]).
//!
//! Every prediction that the exact side produces can be replayed against the
//! sampling side, and the `reproduce` command of the bundled CLI (see
//! [`cli`]) packages the headline experiments with pass/fail verdicts.
//!
//! Start with the runnable examples (`cargo run --example <name>`); each one
//! demonstrates a single capability end to end.

pub mod cli;
pub mod error;
pub mod freeness;
pub mod moments;
pub mod ncpart;
pub mod perms;
pub mod sampler;
pub mod util;
pub mod weingarten;

pub use error::Error;
pub use perms::{BlockCoords, BlockShape, EntryPermutation, Side};

/// Convenience alias used throughout: exact arbitrary-precision rationals.
pub type Rational = num_rational::BigRational;
