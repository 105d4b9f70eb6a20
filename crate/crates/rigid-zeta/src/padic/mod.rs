//! Exact arithmetic in Z_q and Q_q at fixed working precision, polynomials
//! and matrices over these rings, and the Frobenius automorphism sigma.

pub mod context;
pub mod hensel;
pub mod linalg;
pub mod poly;

pub use context::{is_prime, PadicContext, ZqElem};
pub use linalg::{QqMat, QqPoly, QqScalar};
pub use poly::{LaurentPoly, ZqPoly};

use crate::error::PadicError;

/// sigma^k applied to an element (sigma^n = id).
pub fn frobenius_sigma(ctx: &PadicContext, a: &ZqElem, k: usize) -> ZqElem {
    ctx.sigma_iter(a, k)
}

/// Inverse of a unit in Z_q.
pub fn zq_invert(ctx: &PadicContext, a: &ZqElem) -> Result<ZqElem, PadicError> {
    ctx.invert(a)
}
