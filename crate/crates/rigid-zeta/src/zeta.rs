//! From the Frobenius matrix to the zeta function: the sigma-twisted norm,
//! its reverse characteristic polynomial, integer recovery of chi(T) through
//! the Weil bounds and the functional equation, and point counts.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::ZetaError;
use crate::padic::linalg::{berkowitz_charpoly, qq_mat_mul, QqMat, QqRing, VAL_INF};
use crate::padic::{PadicContext, QqScalar};
use crate::precision::PrecisionPlan;

/// chi(T) with exact integer coefficients a_0 .. a_2g.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPolynomial {
    pub coeffs: Vec<BigInt>,
    pub genus: usize,
    pub q: BigUint,
}

impl LPolynomial {
    pub fn trivial(q: BigUint) -> Self {
        LPolynomial {
            coeffs: vec![BigInt::one()],
            genus: 0,
            q,
        }
    }

    /// All structural invariants: a_0 = 1, functional equation, Weil bounds,
    /// chi(1) > 0.
    pub fn validate(&self) -> Result<(), ZetaError> {
        let g = self.genus;
        if self.coeffs.len() != 2 * g + 1 {
            return Err(ZetaError::BoundBreach(0));
        }
        if !self.coeffs[0].is_one() {
            return Err(ZetaError::BoundBreach(0));
        }
        let qz = BigInt::from(self.q.clone());
        for i in 0..=g {
            // a_{2g-i} = q^{g-i} a_i
            let lhs = self.coeffs[2 * g - i].clone();
            let rhs = qz.pow((g - i) as u32) * &self.coeffs[i];
            if lhs != rhs {
                return Err(ZetaError::BoundBreach(2 * g - i));
            }
        }
        for (i, a) in self.coeffs.iter().enumerate() {
            // |a_i|^2 <= C(2g, i)^2 q^i
            let c = binomial(2 * g, i);
            let bound = BigInt::from(c.pow(2)) * qz.pow(i as u32);
            if a * a > bound {
                return Err(ZetaError::BoundBreach(i));
            }
        }
        // chi(1) = order of the Jacobian group
        let chi1: BigInt = self.coeffs.iter().sum();
        if chi1 <= BigInt::zero() {
            return Err(ZetaError::BoundBreach(0));
        }
        Ok(())
    }

    /// chi(1), the group order of the Jacobian.
    pub fn class_number(&self) -> BigInt {
        self.coeffs.iter().sum()
    }
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for j in 0..k.min(n - k) {
        num *= BigUint::from(n - j);
        den *= BigUint::from(j + 1);
    }
    num / den
}

/// F^(n) = F^{sigma^{n-1}} F^{sigma^{n-2}} ... F.
pub fn twisted_norm(ctx: &PadicContext, f: &QqMat) -> QqMat {
    let n = ctx.degree();
    if n == 1 || f.is_empty() {
        return f.to_vec();
    }
    // accumulate twists from the left
    let mut acc = twist(ctx, f, n - 1);
    for k in (1..n - 1).rev() {
        let t = twist(ctx, f, k);
        acc = qq_mat_mul(ctx, &acc, &t);
    }
    qq_mat_mul(ctx, &acc, f)
}

fn twist(ctx: &PadicContext, f: &QqMat, k: usize) -> QqMat {
    f.iter()
        .map(|row| {
            row.iter()
                .map(|x| QqScalar {
                    m: ctx.sigma_iter(&x.m, k),
                    shift: x.shift,
                })
                .collect()
        })
        .collect()
}

/// Coefficients of det(1 - M T), ascending in T: the reversed characteristic
/// polynomial, computed division-free.
pub fn char_poly_reverse(ctx: &PadicContext, m: &QqMat) -> Vec<QqScalar> {
    if m.is_empty() {
        return vec![ctx.qq_one()];
    }
    let ring = QqRing { ctx };
    let mut cp = berkowitz_charpoly(&ring, m);
    cp.reverse();
    cp
}

/// Recover the integer coefficients of chi from their Q_q approximations.
///
/// The reconstruction runs through the power sums: knowing a_1 .. a_{i-1}
/// exactly and a_i modulo p^{k_i}, the power sum s_i of the inverse roots is
/// determined modulo i * p^{k_i}, and |s_i| <= 2g q^{i/2} pins it uniquely
/// precisely when k_i >= floor(log_p(4g/i) + n i/2) + 1.  The remaining
/// coefficients follow from the functional equation.
pub fn recover_integer_lpoly(
    ctx: &PadicContext,
    approx: &[QqScalar],
    plan: &PrecisionPlan,
    q: &BigUint,
    genus: usize,
) -> Result<LPolynomial, ZetaError> {
    let g = genus;
    if g == 0 {
        return Ok(LPolynomial::trivial(q.clone()));
    }
    assert_eq!(approx.len(), 2 * g + 1);
    let mut coeffs = vec![BigInt::zero(); 2 * g + 1];
    coeffs[0] = BigInt::one();
    let qz = BigInt::from(q.clone());
    let mut p_sums: Vec<BigInt> = vec![BigInt::zero(); g + 1];
    for i in 1..=g {
        let digits = plan.chi_digits_per[i - 1].min(ctx.precision());
        let a_lift = rational_lift(ctx, &approx[i], digits)?;
        // s_i = -i a_i - sum_{j<i} a_j s_{i-j}, known modulo i p^{k_i}
        let mut s_approx = -BigInt::from(i as u64) * &a_lift;
        for j in 1..i {
            s_approx -= &coeffs[j] * &p_sums[i - j];
        }
        let modulus = BigInt::from(i as u64) * BigInt::from(ctx.p_pow(digits).clone());
        // |s_i| <= 2 g q^{i/2}: compare squares exactly
        let bound_sq = BigInt::from(4 * (g * g) as u64) * BigInt::from(q.pow(i as u32));
        let s_i = unique_in_window(&s_approx, &modulus, &bound_sq).ok_or(ZetaError::BoundBreach(i))?;
        // a_i = -(s_i + sum_{j<i} a_j s_{i-j}) / i, exactly
        let mut num = s_i.clone();
        for j in 1..i {
            num += &coeffs[j] * &p_sums[i - j];
        }
        let (a_i, rem) = num_div_rem(&-num, i as u64);
        if !rem.is_zero() {
            return Err(ZetaError::BoundBreach(i));
        }
        coeffs[i] = a_i;
        p_sums[i] = s_i;
    }
    // pre-rounding functional equation congruence: a_{2g-i} = q^{g-i} a_i
    for i in 0..g {
        let digits = plan
            .chi_digits_per
            .get(i.max(1) - 1)
            .copied()
            .unwrap_or(plan.chi_digits)
            .min(plan.chi_digits)
            .min(ctx.precision());
        let expected = qz.pow((g - i) as u32) * &coeffs[i];
        if !congruent_mod(ctx, &approx[2 * g - i], &expected, digits) {
            return Err(ZetaError::BoundBreach(2 * g - i));
        }
    }
    for i in 0..g {
        coeffs[2 * g - i] = qz.pow((g - i) as u32) * &coeffs[i];
    }
    let l = LPolynomial {
        coeffs,
        genus: g,
        q: q.clone(),
    };
    l.validate()?;
    Ok(l)
}

fn num_div_rem(a: &BigInt, d: u64) -> (BigInt, BigInt) {
    let dz = BigInt::from(d);
    (a / &dz, a % &dz)
}

/// The unique integer congruent to x modulo m with square at most bound_sq;
/// None when there is no such integer or it is ambiguous.
fn unique_in_window(x: &BigInt, m: &BigInt, bound_sq: &BigInt) -> Option<BigInt> {
    // centered representative
    let mut c = ((x % m) + m) % m;
    if &c + &c > *m {
        c -= m;
    }
    let mut candidates = vec![];
    for t in [-2i64, -1, 0, 1, 2] {
        let cand = &c + BigInt::from(t) * m;
        if &cand * &cand <= *bound_sq {
            candidates.push(cand);
        }
    }
    if candidates.len() == 1 {
        candidates.pop()
    } else {
        None
    }
}

/// Integer lift of a Q_p-rational integral scalar, checked to `digits`.
fn rational_lift(ctx: &PadicContext, a: &QqScalar, digits: u32) -> Result<BigInt, ZetaError> {
    let n = ctx.qq_normalize(a);
    if ctx.is_zero(&n.m) {
        return Ok(BigInt::zero());
    }
    if n.shift < 0 {
        return Err(ZetaError::NotRational);
    }
    let v = ctx.mul_by_p_pow(&n.m, n.shift.min(ctx.precision() as i64) as u32);
    let pk = ctx.p_pow(digits);
    for c in v.coeffs().iter().skip(1) {
        if !(c % pk).is_zero() {
            return Err(ZetaError::NotRational);
        }
    }
    Ok(BigInt::from((&v.coeffs()[0] % pk).clone()))
}

fn congruent_mod(ctx: &PadicContext, a: &QqScalar, expected: &BigInt, digits: u32) -> bool {
    let digits = digits.min(ctx.precision());
    let pk = BigInt::from(ctx.p_pow(digits).clone());
    let n = ctx.qq_normalize(a);
    if ctx.is_zero(&n.m) {
        return (expected % &pk).is_zero();
    }
    if n.shift < 0 {
        return false;
    }
    let v = ctx.mul_by_p_pow(&n.m, n.shift.min(ctx.precision() as i64) as u32);
    let pku = ctx.p_pow(digits);
    for c in v.coeffs().iter().skip(1) {
        if !(c % pku).is_zero() {
            return false;
        }
    }
    let got = BigInt::from((&v.coeffs()[0] % pku).clone());
    let want = ((expected % &pk) + &pk) % &pk;
    got == want
}

/// #X(F_{q^i}) = q^i + 1 - p_i with p_i the power sums of the inverse roots
/// of chi, from the Newton recurrence.
pub fn counts_from_lpoly(l: &LPolynomial, imax: usize) -> Result<Vec<BigUint>, ZetaError> {
    let g = l.genus;
    let a = &l.coeffs;
    let qz = BigInt::from(l.q.clone());
    let mut p_sums: Vec<BigInt> = vec![BigInt::zero(); imax + 1];
    for k in 1..=imax {
        // p_k = -k a_k - sum_{j=1}^{k-1} a_j p_{k-j}
        let mut s = if k <= 2 * g {
            -BigInt::from(k as u64) * &a[k]
        } else {
            BigInt::zero()
        };
        for j in 1..k.min(2 * g + 1) {
            if j <= 2 * g {
                s -= &a[j] * &p_sums[k - j];
            }
        }
        p_sums[k] = s;
    }
    let mut counts = vec![];
    for i in 1..=imax {
        let c = qz.pow(i as u32) + BigInt::one() - &p_sums[i];
        if c.is_negative() {
            return Err(ZetaError::NegativeCount);
        }
        counts.push(c.to_biguint().unwrap());
    }
    Ok(counts)
}

/// The valuation floor of a Frobenius matrix (for the ord_p(F) >= -delta
/// invariant).
pub fn matrix_min_val(ctx: &PadicContext, m: &QqMat) -> i64 {
    let mut v = VAL_INF;
    for row in m {
        for x in row {
            v = v.min(ctx.qq_val(x));
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, n: usize, prec: u32) -> PadicContext {
        PadicContext::new(&BigUint::from(p), n, prec, None).unwrap()
    }

    #[test]
    fn char_poly_reverse_trivial_and_diag() {
        let c = ctx(7, 1, 5);
        // M = 0 (2x2) -> 1
        let zero = vec![vec![c.qq_zero(); 2]; 2];
        let cp = char_poly_reverse(&c, &zero);
        assert!(c.qq_is_zero(&c.qq_sub(&cp[0], &c.qq_one())));
        assert!(c.qq_is_zero(&cp[1]));
        assert!(c.qq_is_zero(&cp[2]));
        // M = diag(2, 3) -> (1 - 2T)(1 - 3T) = 1 - 5T + 6T^2
        let mut d = vec![vec![c.qq_zero(); 2]; 2];
        d[0][0] = QqScalar::from_zq(c.from_u64(2));
        d[1][1] = QqScalar::from_zq(c.from_u64(3));
        let cp = char_poly_reverse(&c, &d);
        assert!(c.qq_is_zero(&c.qq_sub(&cp[0], &c.qq_one())));
        assert!(c.qq_is_zero(&c.qq_add(&cp[1], &QqScalar::from_zq(c.from_u64(5)))));
        assert!(c.qq_is_zero(&c.qq_sub(&cp[2], &QqScalar::from_zq(c.from_u64(6)))));
    }

    #[test]
    fn twisted_norm_identity_for_n1_and_sigma_for_n2() {
        let c1 = ctx(5, 1, 4);
        let f = vec![vec![QqScalar::from_zq(c1.from_u64(3))]];
        assert_eq!(twisted_norm(&c1, &f), f);

        let f_mod = vec![
            BigUint::from(2u8),
            BigUint::zero(),
            BigUint::one(),
        ];
        let c2 = PadicContext::new(&BigUint::from(5u8), 2, 4, Some(f_mod)).unwrap();
        // F = [[t]]: F^(2) = sigma(t) * t = -t * t = -t^2 = 2 (t^2 = -2)
        let t = c2.gen();
        let f = vec![vec![QqScalar::from_zq(t.clone())]];
        let f2 = twisted_norm(&c2, &f);
        let expect = QqScalar::from_zq(c2.from_u64(2));
        assert!(c2.qq_is_zero(&c2.qq_sub(&f2[0][0], &expect)));
    }

    #[test]
    fn counts_and_recovery_round_trip() {
        // chi = 1 + 3T + 5T^2 for the F_5 curve with 9 points
        let l = LPolynomial {
            coeffs: vec![BigInt::from(1), BigInt::from(3), BigInt::from(5)],
            genus: 1,
            q: BigUint::from(5u8),
        };
        l.validate().unwrap();
        let counts = counts_from_lpoly(&l, 2).unwrap();
        assert_eq!(counts[0], BigUint::from(9u8));
        // #X(F_25) = 25 + 1 - (p_2); p_2 = p_1^2 - 2*5 = 9 - 10 = -1 -> 27
        assert_eq!(counts[1], BigUint::from(27u8));

        // genus 0
        let l0 = LPolynomial::trivial(BigUint::from(7u8));
        let c0 = counts_from_lpoly(&l0, 2).unwrap();
        assert_eq!(c0, vec![BigUint::from(8u8), BigUint::from(50u8)]);

        // Hasse window
        for (i, c) in counts.iter().enumerate() {
            let qi = BigInt::from(5u64.pow(i as u32 + 1));
            let diff = (qi.clone() + BigInt::one() - BigInt::from(c.clone())).abs();
            let bound_sq = BigInt::from(4) * qi;
            assert!(&diff * &diff <= bound_sq);
        }
    }

    #[test]
    fn recover_small_lpoly() {
        let c = ctx(5, 1, 6);
        let plan = crate::precision::choose_n(
            &BigUint::from(5u8),
            1,
            1,
            2,
            &crate::curve::OrdTable {
                ord0_w: -2,
                ordinf_w: 0,
                ordinf_winv: -2,
                ordneinf_w0: 0,
                ordneinf_w0inv: 0,
                ordinf_winf: 0,
                ordinf_winfinv: -2,
            },
            2,
            2,
            1,
            None,
        );
        // approximations of (1, 3, 5) at full precision
        let approx = vec![
            QqScalar::from_zq(c.one()),
            QqScalar::from_zq(c.from_u64(3)),
            QqScalar::from_zq(c.from_u64(5)),
        ];
        let l = recover_integer_lpoly(&c, &approx, &plan, &BigUint::from(5u8), 1).unwrap();
        assert_eq!(l.coeffs, vec![BigInt::from(1), BigInt::from(3), BigInt::from(5)]);

        // a negative trace: -3 stored as p^N - 3
        let m3 = c.neg(&c.from_u64(3));
        let approx2 = vec![
            QqScalar::from_zq(c.one()),
            QqScalar::from_zq(m3),
            QqScalar::from_zq(c.from_u64(5)),
        ];
        let l2 = recover_integer_lpoly(&c, &approx2, &plan, &BigUint::from(5u8), 1).unwrap();
        assert_eq!(l2.coeffs[1], BigInt::from(-3));
    }
}
