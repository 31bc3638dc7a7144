//! Sums of squares in real quadratic rings of integers `𝒪 = ℤ[ω]` and in
//! their S-integer rings `𝒪[1/m]`.
//!
//! * [`quadfield`]: exact ring arithmetic, norms, traces, total positivity.
//! * [`residues`]: `𝒪/2𝒪`, square classes, dyadic valuation.
//! * [`decompose`]: the exhaustive decomposition search used as ground truth.
//! * [`criteria`]: Peters' five-square interval test and witness elements.
//! * [`sintegers`]: representability in `𝒪[1/m]`.
//! * [`verify`]: parallel scanning harness with JSONL reports.
//! * [`cli`]: the `soslab` command line.

pub mod cli;
pub mod criteria;
pub mod decompose;
pub mod error;
pub mod quadfield;
pub mod residues;
pub mod sintegers;
pub mod verify;

pub use decompose::{
    candidate_roots, decompose_sos, is_sum_of_squares, pythagoras_length, Decomposition,
    SearchOptions, SearchOutcome, SearchVerdict,
};
pub use error::{Error, Result};
pub use quadfield::{Dyadic, OmegaKind, QuadInt, RingContext};
pub use residues::{is_square_mod_2o, Residue2O, ValuationClass};
