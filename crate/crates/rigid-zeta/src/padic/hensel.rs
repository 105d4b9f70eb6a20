//! Polynomial factorization over the residue field F_q and Hensel lifting of
//! coprime factorizations back to working precision.
//!
//! Residue-field arithmetic reuses the Z_q machinery through a precision-1
//! context.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::context::PadicContext;
use super::poly::ZqPoly;
use crate::error::PadicError;

/// Monic gcd over the residue field (callers pass precision-1 contexts).
pub fn fq_gcd(ctx1: &PadicContext, a: &ZqPoly, b: &ZqPoly) -> ZqPoly {
    let mut a = a.clone();
    let mut b = b.clone();
    a.trim(ctx1);
    b.trim(ctx1);
    while !b.is_zero() {
        let lc = b.leading(ctx1);
        let lc_inv = ctx1.invert(&lc).expect("field");
        let bm = b.scale(&lc_inv, ctx1);
        let r = a.rem(&bm, ctx1).expect("monic divisor");
        a = b;
        b = r;
    }
    if a.is_zero() {
        return a;
    }
    let lc_inv = ctx1.invert(&a.leading(ctx1)).expect("field");
    a.scale(&lc_inv, ctx1)
}

/// x^(q^k) mod f by iterated q-power maps.
fn fq_pow_x_q(ctx1: &PadicContext, f: &ZqPoly, k: usize, q: &BigUint) -> ZqPoly {
    let mut h = ZqPoly::x(ctx1).rem(f, ctx1).expect("deg f >= 1");
    for _ in 0..k {
        h = fq_poly_pow_mod(ctx1, &h, q, f);
    }
    h
}

pub fn fq_poly_pow_mod(ctx1: &PadicContext, base: &ZqPoly, e: &BigUint, m: &ZqPoly) -> ZqPoly {
    let mut acc = ZqPoly::one(ctx1);
    let mut b = base.rem(m, ctx1).expect("modulus");
    let mut e = e.clone();
    while !e.is_zero() {
        if (&e % 2u8).is_one() {
            acc = acc.mul(&b, ctx1).rem(m, ctx1).unwrap();
        }
        b = b.mul(&b, ctx1).rem(m, ctx1).unwrap();
        e >>= 1;
    }
    acc
}

/// Squarefree decomposition of a monic polynomial over F_q (char p), as a
/// list of (monic squarefree factor, multiplicity).
pub fn fq_squarefree_decomposition(ctx1: &PadicContext, f: &ZqPoly) -> Vec<(ZqPoly, u32)> {
    let p_usize: usize = {
        let d = ctx1.prime().to_u64_digits();
        if d.len() == 1 {
            d[0] as usize
        } else {
            usize::MAX
        }
    };
    let mut out: Vec<(ZqPoly, u32)> = vec![];
    sfd_rec(ctx1, f, 1, p_usize, &mut out);
    out.sort_by_key(|(g, _)| g.coeffs.len());
    out
}

fn sfd_rec(ctx1: &PadicContext, f: &ZqPoly, outer_mult: u32, p: usize, out: &mut Vec<(ZqPoly, u32)>) {
    if f.degree().map_or(true, |d| d == 0) {
        return;
    }
    let df = f.derivative(ctx1);
    if df.is_zero() {
        // f = h(x^p); take p-th root of coefficients via t -> t^{p^(n-1)}.
        let h = fq_pth_root_poly(ctx1, f, p);
        sfd_rec(ctx1, &h, outer_mult * p as u32, p, out);
        return;
    }
    let mut c = fq_gcd(ctx1, f, &df);
    let mut w = f.exact_div(&c, ctx1).expect("gcd divides");
    // w carries each squarefree part once; peel multiplicities.
    let mut i = 1u32;
    while w.degree().map_or(false, |d| d > 0) {
        let y = fq_gcd(ctx1, &w, &c);
        let part = w.exact_div(&y, ctx1).expect("gcd divides");
        if part.degree().map_or(false, |d| d > 0) {
            out.push((part, outer_mult * i));
        }
        w = y.clone();
        c = c.exact_div(&y, ctx1).expect("gcd divides");
        i += 1;
    }
    if c.degree().map_or(false, |d| d > 0) {
        sfd_rec(ctx1, &c, outer_mult, p, out);
    }
}

/// Coefficientwise p-th root of h(x^p) over F_q, q = p^n: c -> c^{p^(n-1)}.
fn fq_pth_root_poly(ctx1: &PadicContext, f: &ZqPoly, p: usize) -> ZqPoly {
    let n = ctx1.degree();
    let mut root_exp = BigUint::one();
    for _ in 0..n.saturating_sub(1) {
        root_exp *= ctx1.prime();
    }
    let mut coeffs = vec![];
    let d = f.degree().unwrap();
    let mut k = 0;
    while k * p <= d {
        let c = f.coeff(k * p, ctx1);
        coeffs.push(ctx1.pow_u(&c, &root_exp));
        k += 1;
    }
    let mut out = ZqPoly { coeffs };
    out.trim(ctx1);
    out
}

/// Irreducible factors of a monic squarefree polynomial over F_q.
/// Deterministically seeded Cantor-Zassenhaus; output sorted.
pub fn fq_factor_squarefree(ctx1: &PadicContext, f: &ZqPoly) -> Vec<ZqPoly> {
    let n = ctx1.degree() as u32;
    let q = ctx1.prime().pow(n);
    let mut out = vec![];
    // distinct-degree split
    let mut rest = f.clone();
    let mut d = 1usize;
    let mut frob = fq_pow_x_q(ctx1, f, 1, &q); // x^q mod f
    let x = ZqPoly::x(ctx1);
    while rest.degree().map_or(false, |deg| deg >= 2 * d) {
        // gcd(rest, x^{q^d} - x)
        let h = frob.rem(&rest, ctx1).unwrap();
        let diff = h.sub(&x.rem(&rest, ctx1).unwrap(), ctx1);
        let g = fq_gcd(ctx1, &rest, &diff);
        if g.degree().map_or(false, |deg| deg > 0) {
            equal_degree_split(ctx1, &g, d, &q, &mut out);
            rest = rest.exact_div(&g, ctx1).unwrap();
        }
        d += 1;
        frob = fq_poly_pow_mod(ctx1, &frob, &q, f);
    }
    if rest.degree().map_or(false, |deg| deg > 0) {
        out.push(rest);
    }
    out.sort_by(|a, b| {
        a.coeffs
            .len()
            .cmp(&b.coeffs.len())
            .then_with(|| format_key(a).cmp(&format_key(b)))
    });
    out
}

fn format_key(p: &ZqPoly) -> Vec<Vec<BigUint>> {
    p.coeffs.iter().map(|c| c.coeffs().to_vec()).collect()
}

fn equal_degree_split(ctx1: &PadicContext, f: &ZqPoly, d: usize, q: &BigUint, out: &mut Vec<ZqPoly>) {
    let deg = f.degree().unwrap();
    if deg == d {
        out.push(f.clone());
        return;
    }
    let mut rng_state: u64 = 0x5eed_1234_abcd_0001
        ^ (deg as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ (d as u64).wrapping_mul(0xd1b5_4a32_d192_ed03);
    loop {
        // deterministic pseudo-random h of degree < deg
        let mut coeffs = vec![];
        for _ in 0..deg {
            rng_state ^= rng_state << 13;
            rng_state ^= rng_state >> 7;
            rng_state ^= rng_state << 17;
            coeffs.push(ctx1.from_u64(rng_state));
        }
        let mut h = ZqPoly { coeffs };
        h.trim(ctx1);
        if h.is_zero() {
            continue;
        }
        let g = if (ctx1.prime() % 2u8).is_one() {
            // odd characteristic: h^((q^d-1)/2) - 1
            let e = (q.pow(d as u32) - BigUint::one()) >> 1;
            let hp = fq_poly_pow_mod(ctx1, &h, &e, f);
            let g1 = fq_gcd(ctx1, f, &hp.sub(&ZqPoly::one(ctx1), ctx1));
            g1
        } else {
            // char 2: trace map T(h) = h + h^2 + h^4 + ... over F_{2^(n d)}
            let n = ctx1.degree();
            let mut t = h.clone();
            let mut acc = h.clone();
            for _ in 1..(n * d) {
                t = t.mul(&t, ctx1).rem(f, ctx1).unwrap();
                acc = acc.add(&t, ctx1);
            }
            fq_gcd(ctx1, f, &acc)
        };
        if let Some(gd) = g.degree() {
            if gd > 0 && gd < deg {
                let rest = f.exact_div(&g, ctx1).unwrap();
                equal_degree_split(ctx1, &g, d, q, out);
                equal_degree_split(ctx1, &rest, d, q, out);
                return;
            }
        }
    }
}

/// Lift a coprime monic factorization of f mod p to the full precision of
/// `ctx`.  `f` must be monic with product of `factors_mod_p` congruent to f
/// mod p; factors must be pairwise coprime mod p.
pub fn hensel_lift_coprime(
    ctx: &PadicContext,
    f: &ZqPoly,
    factors_mod_p: &[ZqPoly],
) -> Result<Vec<ZqPoly>, PadicError> {
    if factors_mod_p.len() == 1 {
        return Ok(vec![f.clone()]);
    }
    let ctx1 = ctx.truncated(1)?;
    let mid = factors_mod_p.len() / 2;
    let g_bar = product_mod_p(&ctx1, &factors_mod_p[..mid]);
    let h_bar = product_mod_p(&ctx1, &factors_mod_p[mid..]);
    let (g, h) = hensel_lift_pair(ctx, f, &g_bar, &h_bar)?;
    let mut left = hensel_lift_coprime(ctx, &g, &factors_mod_p[..mid])?;
    let right = hensel_lift_coprime(ctx, &h, &factors_mod_p[mid..])?;
    left.extend(right);
    Ok(left)
}

fn product_mod_p(ctx1: &PadicContext, fs: &[ZqPoly]) -> ZqPoly {
    let mut acc = ZqPoly::one(ctx1);
    for f in fs {
        acc = acc.mul(&f.truncate_to(ctx1), ctx1);
    }
    acc
}

/// Linear Hensel lift of a coprime pair g_bar * h_bar == f mod p.
fn hensel_lift_pair(
    ctx: &PadicContext,
    f: &ZqPoly,
    g_bar: &ZqPoly,
    h_bar: &ZqPoly,
) -> Result<(ZqPoly, ZqPoly), PadicError> {
    let ctx1 = ctx.truncated(1)?;
    // Bezout: s*g + t*h = 1 over F_q
    let (s, t) = fq_bezout(&ctx1, g_bar, h_bar).ok_or(PadicError::SingularToPrecision)?;
    // initial lift: coefficients of g_bar, h_bar as integers
    let mut g = lift_to(ctx, &g_bar.truncate_to(&ctx1));
    let mut h = lift_to(ctx, &h_bar.truncate_to(&ctx1));
    for k in 1..ctx.precision() {
        let e = f.sub(&g.mul(&h, ctx), ctx);
        if e.is_zero() {
            break;
        }
        let e_div = e.div_by_p_pow(k, ctx).map_err(|_| PadicError::SingularToPrecision)?;
        let e_bar = e_div.truncate_to(&ctx1);
        // delta_g = (t*e) rem g ; delta_h = (e - h*delta_g)/g   (all mod p)
        let te = t.mul(&e_bar, &ctx1);
        let dg = te.rem(&g.truncate_to(&ctx1), &ctx1)?;
        let num = e_bar.sub(&h.truncate_to(&ctx1).mul(&dg, &ctx1), &ctx1);
        let dh = num.exact_div(&g.truncate_to(&ctx1), &ctx1)?;
        g = g.add(&lift_to(ctx, &dg).mul_by_p_pow(k, ctx), ctx);
        h = h.add(&lift_to(ctx, &dh).mul_by_p_pow(k, ctx), ctx);
        let _ = &s;
    }
    debug_assert!(f.sub(&g.mul(&h, ctx), ctx).is_zero());
    Ok((g, h))
}

fn lift_to(ctx: &PadicContext, p1: &ZqPoly) -> ZqPoly {
    let ints: Vec<Vec<num_bigint::BigInt>> = p1
        .coeffs
        .iter()
        .map(|c| c.coeffs().iter().map(|x| num_bigint::BigInt::from(x.clone())).collect())
        .collect();
    let mut coeffs = vec![];
    for c in ints {
        coeffs.push(ctx.from_int_coeffs(&c));
    }
    let mut p = ZqPoly { coeffs };
    p.trim(ctx);
    p
}

/// Extended Euclid over F_q: returns (s, t) with s*a + t*b = 1.
pub fn fq_bezout(ctx1: &PadicContext, a: &ZqPoly, b: &ZqPoly) -> Option<(ZqPoly, ZqPoly)> {
    let mut r0 = a.clone();
    let mut r1 = b.clone();
    let mut s0 = ZqPoly::one(ctx1);
    let mut s1 = ZqPoly::zero();
    let mut t0 = ZqPoly::zero();
    let mut t1 = ZqPoly::one(ctx1);
    r0.trim(ctx1);
    r1.trim(ctx1);
    while !r1.is_zero() {
        let lc = r1.leading(ctx1);
        let lc_inv = ctx1.invert(&lc).ok()?;
        let r1m = r1.scale(&lc_inv, ctx1);
        let (q, r) = r0.divrem(&r1m, ctx1).ok()?;
        let q = q.scale(&lc_inv, ctx1);
        let ns = s0.sub(&q.mul(&s1, ctx1), ctx1);
        let nt = t0.sub(&q.mul(&t1, ctx1), ctx1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, ns);
        t0 = std::mem::replace(&mut t1, nt);
    }
    if r0.degree() != Some(0) {
        return None;
    }
    let c_inv = ctx1.invert(&r0.coeffs[0]).ok()?;
    Some((s0.scale(&c_inv, ctx1), t0.scale(&c_inv, ctx1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, n: usize, prec: u32) -> PadicContext {
        PadicContext::new(&BigUint::from(p), n, prec, None).unwrap()
    }

    #[test]
    fn factor_squarefree_over_f7() {
        let c1 = ctx(7, 1, 1);
        // (x^2+1)(x+3) over F_7: x^2+1 irreducible mod 7? -1 is QR mod 7? 7=3 mod 4 -> no.
        let a = ZqPoly::from_i64_coeffs(&c1, &[1, 0, 1]);
        let b = ZqPoly::from_i64_coeffs(&c1, &[3, 1]);
        let f = a.mul(&b, &c1);
        let factors = fq_factor_squarefree(&c1, &f);
        assert_eq!(factors.len(), 2);
        let prod = factors[0].mul(&factors[1], &c1);
        assert_eq!(prod, f);
    }

    #[test]
    fn squarefree_decomposition_multiplicities() {
        let c1 = ctx(5, 1, 1);
        // f = (x+1)^2 (x+2)
        let f = ZqPoly::from_i64_coeffs(&c1, &[1, 1])
            .pow(2, &c1)
            .mul(&ZqPoly::from_i64_coeffs(&c1, &[2, 1]), &c1);
        let sfd = fq_squarefree_decomposition(&c1, &f);
        let mut mults: Vec<u32> = sfd.iter().map(|(_, m)| *m).collect();
        mults.sort();
        assert_eq!(mults, vec![1, 2]);
    }

    #[test]
    fn hensel_lift_recovers_factors() {
        let c = ctx(5, 1, 6);
        // f = (x^2+2)(x+1)(x+3) over Z_5 at full precision
        let f = ZqPoly::from_i64_coeffs(&c, &[2, 0, 1])
            .mul(&ZqPoly::from_i64_coeffs(&c, &[1, 1]), &c)
            .mul(&ZqPoly::from_i64_coeffs(&c, &[3, 1]), &c);
        let c1 = c.truncated(1).unwrap();
        let bars = vec![
            ZqPoly::from_i64_coeffs(&c1, &[2, 0, 1]),
            ZqPoly::from_i64_coeffs(&c1, &[1, 1]),
            ZqPoly::from_i64_coeffs(&c1, &[3, 1]),
        ];
        let lifted = hensel_lift_coprime(&c, &f, &bars).unwrap();
        assert_eq!(lifted.len(), 3);
        let prod = lifted.iter().fold(ZqPoly::one(&c), |a, b| a.mul(b, &c));
        assert_eq!(prod, f);
        for g in &lifted {
            assert!(g.is_monic(&c));
        }
    }

    #[test]
    fn factor_over_extension_field() {
        let c1 = ctx(3, 2, 1);
        // x^2 - t over F_9 where t generates: either splits or stays irreducible;
        // just check the product of factors reproduces the input.
        let t = c1.gen();
        let f = ZqPoly {
            coeffs: vec![c1.neg(&t), c1.zero(), c1.one()],
        };
        let sfd = fq_squarefree_decomposition(&c1, &f);
        let mut prod = ZqPoly::one(&c1);
        for (g, m) in &sfd {
            for fac in fq_factor_squarefree(&c1, g) {
                for _ in 0..*m {
                    prod = prod.mul(&fac, &c1);
                }
            }
        }
        // compare monic-normalized
        assert_eq!(prod, f);
    }
}
