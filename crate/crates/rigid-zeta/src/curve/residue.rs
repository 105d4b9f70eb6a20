//! Residue matrices of the connection and their exponents.
//!
//! The finite residue conditions are handled collectively over Q_q[x]/(r)
//! through M0 = (r G^0)(r')^{-1} mod r; evaluating M0 at a root x_0 of r
//! recovers the residue matrix (x - x_0) G^0 |_{x = x_0}.

use super::CurveData;
use crate::error::CurveError;
use crate::padic::linalg::{
    field_kernel, qq_poly_from_zq, qq_poly_invert_mod, qq_poly_rem, FieldOps, KfRing, QqMat,
    QqRing,
};
use crate::padic::{PadicContext, QqPoly, QqScalar, ZqPoly};

/// Reduced fraction in [0, 1) with multiplicity (counted over geometric
/// points).
pub type Exponent = (u32, u32, usize);

#[derive(Clone, Debug)]
pub struct ResidueData {
    /// M0 over Z_q[x]/(r): all finite residue matrices at once.
    pub m0: Vec<Vec<ZqPoly>>,
    /// Residue matrix of G^inf dx at x = infinity.
    pub minf: QqMat,
    pub exponents0: Vec<Exponent>,
    pub exponents_inf: Vec<Exponent>,
}

pub fn residue_matrices(cd: &CurveData) -> Result<ResidueData, CurveError> {
    let ctx = &cd.ctx;
    let dx = cd.dx;

    // (r')^{-1} mod r; integral with no loss because disc(r) is a unit.
    let (rp_inv_qq, loss) = qq_poly_invert_mod(ctx, &qq_poly_from_zq(&cd.rprime), &cd.r)
        .map_err(|_| CurveError::RPrimeNotInvertible)?;
    if loss != 0 {
        return Err(CurveError::RPrimeNotInvertible);
    }
    let rp_inv = qq_poly_to_zq(ctx, &rp_inv_qq).ok_or(CurveError::RPrimeNotInvertible)?;

    let mut m0 = vec![vec![ZqPoly::zero(); dx]; dx];
    for i in 0..dx {
        for j in 0..dx {
            if cd.rg0[i][j].is_zero() {
                continue;
            }
            let red = cd.rg0[i][j].rem(&cd.r, ctx).map_err(CurveError::Padic)?;
            m0[i][j] = red
                .mul(&rp_inv, ctx)
                .rem(&cd.r, ctx)
                .map_err(CurveError::Padic)?;
        }
    }

    let minf = infinite_residue_matrix(cd)?;

    // exponents per Hensel factor of r, working in K_f = Q_q[x]/(f)
    let mut exponents0: Vec<Exponent> = vec![];
    for f in &cd.rfactors {
        let fld = KfRing { ctx, f };
        let mf: Vec<Vec<QqPoly>> = (0..dx)
            .map(|i| {
                (0..dx)
                    .map(|j| qq_poly_rem(ctx, &qq_poly_from_zq(&m0[i][j]), f))
                    .collect()
            })
            .collect();
        let found = eigen_exponents(&fld, &mf, cd.e0, ctx)?;
        let df = f.degree().unwrap();
        for (a, b, mult) in found {
            merge_exponent(&mut exponents0, (a, b, mult * df));
        }
    }

    let fld = QqRing { ctx };
    let minf_el: Vec<Vec<QqScalar>> = minf.clone();
    let exponents_inf = eigen_exponents(&fld, &minf_el, cd.einf, ctx)?;

    Ok(ResidueData {
        m0,
        minf,
        exponents0,
        exponents_inf,
    })
}

fn merge_exponent(list: &mut Vec<Exponent>, e: Exponent) {
    for item in list.iter_mut() {
        if item.0 == e.0 && item.1 == e.1 {
            item.2 += e.2;
            return;
        }
    }
    list.push(e);
}

/// Residue matrix at infinity: minus the x^{-1} coefficient of G^inf in its
/// expansion at x = infinity.
fn infinite_residue_matrix(cd: &CurveData) -> Result<QqMat, CurveError> {
    let ctx = &cd.ctx;
    let dx = cd.dx;
    let dr = cd.deg_r() as i64;
    // r = x^dr * rho(1/x) with rho(0) = 1
    let rho: ZqPoly = {
        let mut coeffs = vec![];
        for j in 0..=cd.deg_r() {
            coeffs.push(cd.r.coeff(cd.deg_r() - j, ctx));
        }
        let mut p = ZqPoly { coeffs };
        p.trim(ctx);
        p
    };
    let mut out = vec![vec![ctx.qq_zero(); dx]; dx];
    for i in 0..dx {
        for j in 0..dx {
            let e = &cd.ginf[i][j];
            if e.is_zero() {
                continue;
            }
            let k = e.rpow as i64;
            // coefficient of x^{-1} in num * x^{-k dr} * rho^{-k}(1/x)
            let top = e.num.shift + e.num.poly.deg_i();
            let depth = top - k * dr + 1;
            if depth < 0 {
                continue;
            }
            let inv_pow = series_inverse_pow(ctx, &rho, e.rpow as usize, depth as usize + 1);
            let mut acc = ctx.zero();
            for (idx, c) in e.num.poly.coeffs.iter().enumerate() {
                if ctx.is_zero(c) {
                    continue;
                }
                let m = e.num.shift + idx as i64;
                let jj = m - k * dr + 1;
                if jj < 0 || jj as usize >= inv_pow.coeffs.len() {
                    continue;
                }
                acc = ctx.add(&acc, &ctx.mul(c, &inv_pow.coeffs[jj as usize]));
            }
            out[i][j] = ctx.qq_neg(&QqScalar::from_zq(acc));
        }
    }
    Ok(out)
}

/// (rho^{-k}) as a power series in u, truncated to `len` terms;
/// rho(0) must be 1.
fn series_inverse_pow(ctx: &PadicContext, rho: &ZqPoly, k: usize, len: usize) -> ZqPoly {
    let mut inv = vec![ctx.one()];
    // naive series inversion
    for n in 1..len {
        let mut acc = ctx.zero();
        for i in 1..=n.min(rho.coeffs.len().saturating_sub(1)) {
            let t = ctx.mul(&rho.coeffs[i], &inv[n - i]);
            acc = ctx.add(&acc, &t);
        }
        inv.push(ctx.neg(&acc));
    }
    let inv = ZqPoly { coeffs: inv };
    // raise to k-th power, truncating
    let mut acc = ZqPoly::one(ctx);
    for _ in 0..k {
        acc = acc.mul(&inv, ctx);
        acc.coeffs.truncate(len);
    }
    acc
}

fn qq_poly_to_zq(ctx: &PadicContext, p: &QqPoly) -> Option<ZqPoly> {
    let mut coeffs = vec![];
    for c in p {
        if c.shift < 0 {
            if ctx.qq_val(c) < 0 {
                return None;
            }
            // value is integral but stored with a negative shift: renormalize
            let n = ctx.qq_normalize(c);
            if n.shift < 0 {
                return None;
            }
            coeffs.push(ctx.mul_by_p_pow(&n.m, n.shift as u32));
        } else {
            coeffs.push(ctx.mul_by_p_pow(&c.m, c.shift as u32));
        }
    }
    let mut out = ZqPoly { coeffs };
    out.trim(ctx);
    Some(out)
}

/// Eigen-exponents of a matrix over a field: candidates are the reduced
/// fractions a/b in [0,1) with b <= e_bound and p not dividing b; the
/// multiplicity is the generalized eigenspace dimension.
fn eigen_exponents<F: FieldOps>(
    fld: &F,
    m: &[Vec<F::El>],
    e_bound: u32,
    ctx: &PadicContext,
) -> Result<Vec<Exponent>, CurveError> {
    let d = m.len();
    if d == 0 {
        return Ok(vec![]);
    }
    let mut found = vec![];
    let mut total = 0usize;
    for (a, b) in exponent_candidates(e_bound, ctx) {
        // lambda = a / b in the prime field
        let b_inv = ctx
            .qq_inv(&QqScalar::from_zq(ctx.from_u64(b as u64)))
            .map_err(|_| CurveError::ExponentOutsideRange)?;
        let lam = ctx.qq_mul(&QqScalar::from_zq(ctx.from_u64(a as u64)), &b_inv);
        let lam_el = fld.from_scalar(&lam);
        // (M - lambda I)^d
        let mut shifted: Vec<Vec<F::El>> = m.to_vec();
        for i in 0..d {
            shifted[i][i] = fld.sub(&shifted[i][i], &lam_el);
        }
        let mut pow = shifted.clone();
        for _ in 1..d {
            pow = crate::padic::linalg::mat_mul_ring(fld, &pow, &shifted);
        }
        let dim = field_kernel(fld, &pow).len();
        if dim > 0 {
            found.push((a, b, dim));
            total += dim;
        }
        if total == d {
            break;
        }
    }
    if total != d {
        return Err(CurveError::ExponentOutsideRange);
    }
    Ok(found)
}

/// Reduced fractions a/b in [0,1), denominators up to e_bound, p not
/// dividing b; 0/1 first, then by denominator.
fn exponent_candidates(e_bound: u32, ctx: &PadicContext) -> Vec<(u32, u32)> {
    let mut out = vec![(0u32, 1u32)];
    let p = ctx.prime();
    for b in 2..=e_bound.max(1) {
        if (num_bigint::BigUint::from(b) % p).bits() == 0 {
            continue;
        }
        for a in 1..b {
            if gcd_u32(a, b) == 1 {
                out.push((a, b));
            }
        }
    }
    out
}

fn gcd_u32(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd_u32(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{build_curve, builtin_hyperelliptic};
    use num_bigint::BigUint;

    fn elliptic_cd(p: u64) -> CurveData {
        let ctx = PadicContext::new(&BigUint::from(p), 1, 8, None).unwrap();
        let f = ZqPoly::from_i64_coeffs(&ctx, &[1, 1, 0, 1]);
        let (q, w0, winf) = builtin_hyperelliptic(&f, &ctx).unwrap();
        build_curve(q, w0, winf, &ctx, None).unwrap()
    }

    #[test]
    fn hyperelliptic_residues_are_zero_and_half() {
        let cd = elliptic_cd(7);
        let rd = residue_matrices(&cd).unwrap();
        // finite: exponents {0, 1/2} at each of the three roots of f
        let mut exps = rd.exponents0.clone();
        exps.sort();
        assert_eq!(exps, vec![(0, 1, 3), (1, 2, 3)]);
        // infinity: one doubly-ramified point, exponents {0, 1/2}
        let mut einf = rd.exponents_inf.clone();
        einf.sort();
        assert_eq!(einf, vec![(0, 1, 1), (1, 2, 1)]);
        // M0 is diag(0, 1/2): the (1,1) entry is the constant (p^N+1)/2
        assert!(rd.m0[0][0].is_zero());
        assert!(rd.m0[0][1].is_zero());
        assert!(rd.m0[1][0].is_zero());
        let half = cd.ctx.invert(&cd.ctx.from_u64(2)).unwrap();
        assert_eq!(rd.m0[1][1], ZqPoly::constant(half, &cd.ctx));
    }
}
