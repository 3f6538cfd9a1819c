//! Exact computational engine for matroids represented over prime fields GF(p).
//!
//! The crate is organized around a small stack of layers:
//!
//! * [`gf`] — branch-free arithmetic and exact linear algebra over GF(p)
//!   for small primes (bit-packed rows for p = 2, byte rows otherwise);
//! * [`subset`] — ground-set subsets as bitsets with a total
//!   lexicographic order used for all deterministic tie-breaking;
//! * [`matroid`] — represented matroids with rank, closure, minors,
//!   connectivity, girth, points and lines;
//! * [`flats`] / [`catalog`] — flat enumeration and classification
//!   (independent / affine geometry / projective geometry) plus the
//!   fixture catalog (`pg`, `ag`, `reid`, `free`, `sum`, `random`);
//! * [`lemmas`] — certificate-emitting checkers for the structural
//!   lemmas and the two flat-search strategies;
//! * [`ramsey`] — coloring searches, cap (flat-free set) searches and
//!   exhaustive small-case census runs;
//! * [`textio`] / [`cert`] — the text matrix format and the JSON
//!   certificate schema, with an independent validator.
//!
//! All values are immutable after construction and all searches report
//! the lexicographically least success, so results are deterministic and
//! independent of thread count.

pub mod catalog;
pub mod cert;
pub mod flats;
pub mod gf;
pub mod lemmas;
pub mod matroid;
pub mod ramsey;
pub mod subset;
pub mod textio;

pub use catalog::CatalogSpec;
pub use cert::{Certificate, CertificateFile, ValidationError};
pub use flats::{Classification, Flat, FlatClass};
pub use gf::{GfError, GfMat, GfVec, PrimeField, RrefOutcome};
pub use matroid::{Girth, Matroid, MinorRecipe, PointMap};
pub use subset::Subset;
