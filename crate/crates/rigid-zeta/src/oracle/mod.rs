//! Brute-force point counting on the smooth model, independent of the
//! p-adic pipeline: affine points where r != 0 by direct enumeration,
//! boundary points through the etale boundary algebras, and L-polynomial
//! reconstruction from counts.
//!
//! The oracle deliberately uses its own word-sized finite-field arithmetic.

pub mod algebra;
pub mod field;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::curve::CurveData;
use crate::error::OracleError;
use crate::zeta::{binomial, LPolynomial};
use algebra::BoundaryAlgebra;
use field::FqContext;

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// The mod-p data the oracle works from: the plane model, the branch
/// radical, and the boundary multiplication tables.
pub struct OracleData {
    pub p: u64,
    pub n: usize,
    /// f_mod mod p, ascending, length n+1.
    pub f_mod: Vec<u64>,
    /// Q mod p: q_bar[yexp][xexp] = coefficient in F_q (length-n vector).
    pub q_bar: Vec<Vec<Vec<u64>>>,
    /// r mod p, coefficients in F_q.
    pub r_bar: Vec<Vec<u64>>,
    pub finite_boundary: Option<BoundaryAlgebra>,
    pub infinite_boundary: Option<BoundaryAlgebra>,
}

impl OracleData {
    pub fn from_curve(cd: &CurveData) -> Result<OracleData, OracleError> {
        let ctx = &cd.ctx;
        let p_big = ctx.prime();
        if p_big.bits() > 31 {
            return Err(OracleError::PrimeTooLarge);
        }
        let p = p_big.to_u64_digits()[0];
        let n = ctx.degree();
        let to_fq = |c: &crate::padic::ZqElem| -> Vec<u64> {
            let mut v: Vec<u64> = ctx
                .reduce_mod_p(c)
                .iter()
                .map(|x| x.to_u64_digits().first().copied().unwrap_or(0))
                .collect();
            v.resize(n, 0);
            v
        };
        let f_mod: Vec<u64> = ctx
            .defining_poly()
            .iter()
            .map(|c| (c % p_big).to_u64_digits().first().copied().unwrap_or(0))
            .collect();
        let q_bar: Vec<Vec<Vec<u64>>> = cd
            .q
            .ycoeffs
            .iter()
            .map(|poly| poly.coeffs.iter().map(&to_fq).collect())
            .collect();
        let r_bar: Vec<Vec<u64>> = cd.r.coeffs.iter().map(&to_fq).collect();

        // boundary algebras from the structure tensors, reduced mod p
        let finite_boundary = cd.boundary.fin_tensor.as_ref().map(|tensor| {
            let deg_r = cd.deg_r();
            algebra::finite_boundary_algebra(p, n, &f_mod, tensor, &cd.r, ctx, deg_r)
        });
        let infinite_boundary = cd.boundary.inf_tensor.as_ref().map(|tensor| {
            algebra::infinite_boundary_algebra(p, n, &f_mod, tensor, ctx)
        });
        Ok(OracleData {
            p,
            n,
            f_mod,
            q_bar,
            r_bar,
            finite_boundary,
            infinite_boundary,
        })
    }

    /// #X(F_{q^i}) = affine + finite boundary + infinite boundary.
    pub fn count_total(&self, i: usize, budget: u64) -> Result<BigUint, OracleError> {
        let affine = count_affine(self, i, budget)?;
        let fin = match &self.finite_boundary {
            Some(a) => a.count_points(i)?,
            None => return Err(OracleError::NoPrimitiveElement),
        };
        let inf = match &self.infinite_boundary {
            Some(a) => a.count_points(i)?,
            None => return Err(OracleError::NoPrimitiveElement),
        };
        Ok(affine + BigUint::from(fin) + BigUint::from(inf))
    }
}

/// #{(x0, y0) in F_{q^i}^2 : Q(x0, y0) = 0, r(x0) != 0}, counting y-roots
/// per x0 through gcd(Q(x0, y), y^{q^i} - y).
pub fn count_affine(data: &OracleData, i: usize, budget: u64) -> Result<BigUint, OracleError> {
    let fq = FqContext::for_extension(data.p, data.n, i)?;
    let size = fq.size_bounded(budget)?;
    // embed F_q into F_{q^i}: root of f_mod
    let embed = fq.embedding_of_base(&data.f_mod)?;
    // coefficients of Q and r mapped into F_{q^i}
    let q_cast: Vec<Vec<Vec<u64>>> = data
        .q_bar
        .iter()
        .map(|row| row.iter().map(|c| fq.cast(c, &embed)).collect())
        .collect();
    let r_cast: Vec<Vec<u64>> = data.r_bar.iter().map(|c| fq.cast(c, &embed)).collect();

    let mut total = BigUint::zero();
    let mut x0 = fq.zero();
    for _ in 0..size {
        // r(x0) != 0
        let rv = fq.eval_poly(&r_cast, &x0);
        if !fq.is_zero(&rv) {
            // Q(x0, y) as univariate in y
            let qy: Vec<Vec<u64>> = q_cast
                .iter()
                .map(|xcoeffs| fq.eval_poly(xcoeffs, &x0))
                .collect();
            total += BigUint::from(fq.count_roots(&qy));
        }
        x0 = fq.next_element(&x0);
    }
    Ok(total)
}

/// chi from oracle counts over F_q, .., F_{q^g} by Newton's identities and
/// the functional equation.
pub fn lpoly_from_counts(
    counts: &[BigUint],
    q: &BigUint,
    g: usize,
) -> Result<LPolynomial, OracleError> {
    if g == 0 {
        return Ok(LPolynomial::trivial(q.clone()));
    }
    assert_eq!(counts.len(), g, "need exactly g counts");
    let qz = BigInt::from(q.clone());
    let mut p_sums: Vec<BigInt> = vec![BigInt::zero(); g + 1];
    let mut coeffs = vec![BigInt::zero(); 2 * g + 1];
    coeffs[0] = BigInt::one();
    for i in 1..=g {
        p_sums[i] = qz.pow(i as u32) + BigInt::one() - BigInt::from(counts[i - 1].clone());
        // a_i = -(s_i + sum_{j=1}^{i-1} a_j s_{i-j}) / i
        let mut num = p_sums[i].clone();
        for j in 1..i {
            num += &coeffs[j] * &p_sums[i - j];
        }
        let iz = BigInt::from(i as u64);
        if (&num % &iz) != BigInt::zero() {
            return Err(OracleError::InconsistentCounts);
        }
        coeffs[i] = -num / iz;
    }
    for i in 0..g {
        coeffs[2 * g - i] = qz.pow((g - i) as u32) * &coeffs[i];
    }
    let l = LPolynomial {
        coeffs,
        genus: g,
        q: q.clone(),
    };
    // Weil bounds
    for (i, a) in l.coeffs.iter().enumerate() {
        let c = BigInt::from(binomial(2 * g, i));
        let bound = &c * &c * BigInt::from(q.pow(i as u32));
        if a * a > bound {
            return Err(OracleError::InconsistentCounts);
        }
    }
    let chi1: BigInt = l.coeffs.iter().sum();
    if !chi1.is_positive() {
        return Err(OracleError::InconsistentCounts);
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{build_curve, builtin_hyperelliptic};
    use crate::padic::{PadicContext, ZqPoly};

    fn elliptic_data(p: u64) -> OracleData {
        let ctx = PadicContext::new(&BigUint::from(p), 1, 6, None).unwrap();
        let f = ZqPoly::from_i64_coeffs(&ctx, &[1, 1, 0, 1]);
        let (q, w0, winf) = builtin_hyperelliptic(&f, &ctx).unwrap();
        let cd = build_curve(q, w0, winf, &ctx, None).unwrap();
        OracleData::from_curve(&cd).unwrap()
    }

    #[test]
    fn elliptic_counts_over_f5_and_f25() {
        let data = elliptic_data(5);
        // affine: 8 points with f(x) != 0 (f has no roots mod 5)
        let affine = count_affine(&data, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(affine, BigUint::from(8u8));
        let total = data.count_total(1, DEFAULT_BUDGET).unwrap();
        assert_eq!(total, BigUint::from(9u8));
        // #X(F_25) = 27 from chi = 1 + 3T + 5T^2
        let total2 = data.count_total(2, DEFAULT_BUDGET).unwrap();
        assert_eq!(total2, BigUint::from(27u8));
    }

    #[test]
    fn lpoly_round_trip() {
        // counts from a valid genus-1 polynomial and back
        let q5 = BigUint::from(5u8);
        let l = lpoly_from_counts(&[BigUint::from(9u8)], &q5, 1).unwrap();
        assert_eq!(
            l.coeffs,
            vec![BigInt::from(1), BigInt::from(3), BigInt::from(5)]
        );
        let counts = crate::zeta::counts_from_lpoly(&l, 1).unwrap();
        assert_eq!(counts[0], BigUint::from(9u8));
        // genus 0: chi = 1
        let l0 = lpoly_from_counts(&[], &q5, 0).unwrap();
        assert_eq!(l0.coeffs.len(), 1);
    }

    #[test]
    fn genus2_counts_consistent() {
        // y^2 = x^5 + 2x + 1 over F_7 (squarefree mod 7)
        let ctx = PadicContext::new(&BigUint::from(7u8), 1, 6, None).unwrap();
        let f = ZqPoly::from_i64_coeffs(&ctx, &[1, 2, 0, 0, 0, 1]);
        let (q, w0, winf) = builtin_hyperelliptic(&f, &ctx).unwrap();
        let cd = build_curve(q, w0, winf, &ctx, None).unwrap();
        let data = OracleData::from_curve(&cd).unwrap();
        let n1 = data.count_total(1, DEFAULT_BUDGET).unwrap();
        let n2 = data.count_total(2, DEFAULT_BUDGET).unwrap();
        let l = lpoly_from_counts(&[n1.clone(), n2.clone()], &BigUint::from(7u8), 2).unwrap();
        // round trip through the main-pipeline Newton direction
        let counts = crate::zeta::counts_from_lpoly(&l, 2).unwrap();
        assert_eq!(counts, vec![n1, n2]);
    }
}
