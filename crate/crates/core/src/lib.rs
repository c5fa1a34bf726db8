//! Generalized Kasami sequence families over `GF(2^n)`.
//!
//! The crate builds the families, computes their periodic correlation and
//! imbalance distributions with two independent engines, and evaluates the
//! closed-form distributions those engines are checked against.
//!
//! Module map, bottom up:
//!
//! * [`gf2n`]: field arithmetic, traces, the subfield `F = GF(2^{n/2})`
//! * [`bitmatrix`]: GF(2) kernels
//! * [`histogram`]: exact value/count multisets
//! * [`quadform`]: the quadratic forms `f_{b,c}`, their ranks and Walsh spectra
//! * [`fieldeq`]: exhaustive root counting for the associated field equations
//! * [`families`]: sequence construction, including a shift-register route
//! * [`correlation`]: brute-force and spectral correlation engines
//! * [`theory`]: closed-form predictions and the associated linear code
//! * [`verify`]: the full claim suite used by the command-line tool

pub mod bitmatrix;
pub mod correlation;
pub mod families;
pub mod fieldeq;
pub mod gf2n;
pub mod histogram;
pub mod quadform;
pub mod theory;
pub mod verify;

pub use gf2n::{FieldCtx, FieldElement, FieldError};
pub use histogram::ValueHistogram;

/// Histogram with arbitrary-precision counts; the type every public result uses.
pub type Histogram = ValueHistogram<num_bigint::BigUint>;

/// Histogram with machine-word counts for hot tallying loops.
pub type Tally = ValueHistogram<u64>;
