//! Zeta functions of smooth projective curves over finite fields, computed
//! through the action of a Frobenius lift on p-adic cohomology of a plane
//! model with supplied integral-basis matrices, with an independent
//! brute-force counting oracle for verification.
//!
//! See the `examples/` directory for one runnable example per capability;
//! the `rigid-zeta` binary drives the same pipeline from JSON documents.

pub mod cohomology;
pub mod doc;
pub mod curve;
pub mod error;
pub mod frobenius;
pub mod oracle;
pub mod padic;
pub mod precision;
pub mod report;
pub mod run;
pub mod zeta;

pub use doc::CurveDocument;
pub use error::Error;
pub use report::ReportDocument;
pub use run::{run, run_hyperelliptic, RunOptions};
