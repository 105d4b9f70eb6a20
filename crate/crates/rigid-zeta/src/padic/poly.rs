//! Dense polynomials over Z_q at working precision, plus Laurent wrappers.
//!
//! Multiplication and division route through a flat word-sized kernel when
//! the modulus fits in a machine word (n = 1); everything else falls back to
//! schoolbook big-integer arithmetic.

use num_bigint::BigUint;

use super::context::{PadicContext, ZqElem};
use crate::error::PadicError;

/// Polynomial in x over Z_q, ascending coefficients, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZqPoly {
    pub coeffs: Vec<ZqElem>,
}

impl ZqPoly {
    pub fn zero() -> Self {
        ZqPoly { coeffs: vec![] }
    }

    pub fn one(ctx: &PadicContext) -> Self {
        ZqPoly {
            coeffs: vec![ctx.one()],
        }
    }

    pub fn x(ctx: &PadicContext) -> Self {
        ZqPoly {
            coeffs: vec![ctx.zero(), ctx.one()],
        }
    }

    pub fn constant(c: ZqElem, ctx: &PadicContext) -> Self {
        let mut p = ZqPoly { coeffs: vec![c] };
        p.trim(ctx);
        p
    }

    pub fn monomial(ctx: &PadicContext, c: ZqElem, deg: usize) -> Self {
        let mut coeffs = vec![ctx.zero(); deg + 1];
        coeffs[deg] = c;
        let mut p = ZqPoly { coeffs };
        p.trim(ctx);
        p
    }

    pub fn from_int_coeffs(ctx: &PadicContext, cs: &[num_bigint::BigInt]) -> Self {
        let coeffs = cs.iter().map(|c| ctx.from_bigint(c)).collect();
        let mut p = ZqPoly { coeffs };
        p.trim(ctx);
        p
    }

    pub fn from_i64_coeffs(ctx: &PadicContext, cs: &[i64]) -> Self {
        let cs: Vec<num_bigint::BigInt> = cs.iter().map(|&c| c.into()).collect();
        Self::from_int_coeffs(ctx, &cs)
    }

    pub fn trim(&mut self, ctx: &PadicContext) {
        while self.coeffs.last().map_or(false, |c| ctx.is_zero(c)) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn deg_i(&self) -> i64 {
        self.degree().map_or(i64::MIN / 4, |d| d as i64)
    }

    pub fn leading(&self, ctx: &PadicContext) -> ZqElem {
        self.coeffs.last().cloned().unwrap_or_else(|| ctx.zero())
    }

    pub fn coeff(&self, i: usize, ctx: &PadicContext) -> ZqElem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| ctx.zero())
    }

    pub fn is_monic(&self, ctx: &PadicContext) -> bool {
        self.coeffs
            .last()
            .map_or(false, |c| *c == ctx.one())
    }

    pub fn add(&self, other: &Self, ctx: &PadicContext) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(len);
        for i in 0..len {
            let a = self.coeffs.get(i);
            let b = other.coeffs.get(i);
            coeffs.push(match (a, b) {
                (Some(a), Some(b)) => ctx.add(a, b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        let mut p = ZqPoly { coeffs };
        p.trim(ctx);
        p
    }

    pub fn sub(&self, other: &Self, ctx: &PadicContext) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(len);
        for i in 0..len {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(|| ctx.zero());
            let b = other.coeffs.get(i).cloned().unwrap_or_else(|| ctx.zero());
            coeffs.push(ctx.sub(&a, &b));
        }
        let mut p = ZqPoly { coeffs };
        p.trim(ctx);
        p
    }

    pub fn neg(&self, ctx: &PadicContext) -> Self {
        ZqPoly {
            coeffs: self.coeffs.iter().map(|c| ctx.neg(c)).collect(),
        }
    }

    pub fn scale(&self, c: &ZqElem, ctx: &PadicContext) -> Self {
        let mut p = ZqPoly {
            coeffs: self.coeffs.iter().map(|a| ctx.mul(a, c)).collect(),
        };
        p.trim(ctx);
        p
    }

    pub fn mul_by_p_pow(&self, k: u32, ctx: &PadicContext) -> Self {
        let mut p = ZqPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|a| ctx.mul_by_p_pow(a, k))
                .collect(),
        };
        p.trim(ctx);
        p
    }

    pub fn shift_up(&self, k: usize, ctx: &PadicContext) -> Self {
        if self.is_zero() {
            return ZqPoly::zero();
        }
        let mut coeffs = vec![ctx.zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        ZqPoly { coeffs }
    }

    pub fn mul(&self, other: &Self, ctx: &PadicContext) -> Self {
        if self.is_zero() || other.is_zero() {
            return ZqPoly::zero();
        }
        if let Some(m) = small_modulus(ctx) {
            let a = flatten_u64(self);
            let b = flatten_u64(other);
            let prod = u64_poly_mul(&a, &b, m);
            return lift_u64(&prod, ctx);
        }
        // Generic schoolbook over Z_q.
        let mut out = vec![ctx.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if ctx.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let t = ctx.mul(a, b);
                out[i + j] = ctx.add(&out[i + j], &t);
            }
        }
        let mut p = ZqPoly { coeffs: out };
        p.trim(ctx);
        p
    }

    /// Division with remainder by a divisor whose leading coefficient is a
    /// unit.  Routes through a Newton kernel for large balanced sizes.
    pub fn divrem(&self, divisor: &Self, ctx: &PadicContext) -> Result<(Self, Self), PadicError> {
        let dd = match divisor.degree() {
            None => return Err(PadicError::NotAUnit),
            Some(d) => d,
        };
        let nd = match self.degree() {
            None => return Ok((ZqPoly::zero(), ZqPoly::zero())),
            Some(d) => d,
        };
        if nd < dd {
            return Ok((ZqPoly::zero(), self.clone()));
        }
        let lc = divisor.leading(ctx);
        let lc_inv = ctx.invert(&lc)?;
        if let Some(m) = small_modulus(ctx) {
            if nd - dd > 80 && dd > 80 {
                let a = flatten_u64(self);
                let b = flatten_u64(divisor);
                let (q, r) = u64_divrem_newton(&a, &b, m);
                return Ok((lift_u64(&q, ctx), lift_u64(&r, ctx)));
            }
        }
        // Schoolbook.
        let mut rem = self.coeffs.clone();
        let mut quo = vec![ctx.zero(); nd - dd + 1];
        for k in (dd..=nd).rev() {
            let c = rem[k].clone();
            if ctx.is_zero(&c) {
                continue;
            }
            let qc = ctx.mul(&c, &lc_inv);
            quo[k - dd] = qc.clone();
            for i in 0..=dd {
                let t = ctx.mul(&qc, &divisor.coeffs[i]);
                rem[k - dd + i] = ctx.sub(&rem[k - dd + i], &t);
            }
        }
        rem.truncate(dd);
        let mut q = ZqPoly { coeffs: quo };
        let mut r = ZqPoly { coeffs: rem };
        q.trim(ctx);
        r.trim(ctx);
        Ok((q, r))
    }

    /// Exact division: remainder must vanish at working precision.
    pub fn exact_div(&self, divisor: &Self, ctx: &PadicContext) -> Result<Self, PadicError> {
        let (q, r) = self.divrem(divisor, ctx)?;
        if !r.is_zero() {
            return Err(PadicError::InexactDivision);
        }
        Ok(q)
    }

    pub fn rem(&self, divisor: &Self, ctx: &PadicContext) -> Result<Self, PadicError> {
        Ok(self.divrem(divisor, ctx)?.1)
    }

    pub fn mul_mod(&self, other: &Self, modulus: &Self, ctx: &PadicContext) -> Result<Self, PadicError> {
        self.mul(other, ctx).rem(modulus, ctx)
    }

    pub fn derivative(&self, ctx: &PadicContext) -> Self {
        if self.coeffs.len() <= 1 {
            return ZqPoly::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() - 1);
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            let k = ctx.from_u64(i as u64);
            coeffs.push(ctx.mul(c, &k));
        }
        let mut p = ZqPoly { coeffs };
        p.trim(ctx);
        p
    }

    pub fn eval(&self, x: &ZqElem, ctx: &PadicContext) -> ZqElem {
        let mut acc = ctx.zero();
        for c in self.coeffs.iter().rev() {
            acc = ctx.mul(&acc, x);
            acc = ctx.add(&acc, c);
        }
        acc
    }

    /// Substitute x -> x^k.
    pub fn subst_x_pow(&self, k: usize, ctx: &PadicContext) -> Self {
        if self.is_zero() || k == 1 {
            return self.clone();
        }
        let mut coeffs = vec![ctx.zero(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k] = c.clone();
        }
        ZqPoly { coeffs }
    }

    /// Apply sigma to every coefficient.
    pub fn map_sigma(&self, ctx: &PadicContext) -> Self {
        ZqPoly {
            coeffs: self.coeffs.iter().map(|c| ctx.sigma(c)).collect(),
        }
    }

    /// Minimal p-adic valuation over the coefficients (N for the zero poly).
    pub fn content_val(&self, ctx: &PadicContext) -> u32 {
        let mut v = ctx.precision();
        for c in &self.coeffs {
            v = v.min(ctx.valuation(c));
            if v == 0 {
                break;
            }
        }
        v
    }

    pub fn div_by_p_pow(&self, k: u32, ctx: &PadicContext) -> Result<Self, PadicError> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            coeffs.push(ctx.div_by_p_pow(c, k)?);
        }
        let mut p = ZqPoly { coeffs };
        p.trim(ctx);
        Ok(p)
    }

    pub fn pow(&self, e: usize, ctx: &PadicContext) -> Self {
        let mut acc = ZqPoly::one(ctx);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, ctx);
            }
            base = base.mul(&base, ctx);
            e >>= 1;
        }
        acc
    }

    /// Truncate coefficients into a lower-precision context.
    pub fn truncate_to(&self, ctx: &PadicContext) -> Self {
        let m = ctx.modulus();
        let mut p = ZqPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| {
                    let v: Vec<BigUint> = c.coeffs().iter().map(|x| x % m).collect();
                    let ints: Vec<num_bigint::BigInt> =
                        v.into_iter().map(num_bigint::BigInt::from).collect();
                    ctx.from_int_coeffs(&ints)
                })
                .collect(),
        };
        p.trim(ctx);
        p
    }
}

fn small_modulus(ctx: &PadicContext) -> Option<u64> {
    if ctx.degree() != 1 {
        return None;
    }
    let m = ctx.modulus();
    if m.bits() <= 62 {
        let digits = m.to_u64_digits();
        Some(digits.first().copied().unwrap_or(0))
    } else {
        None
    }
}

fn flatten_u64(p: &ZqPoly) -> Vec<u64> {
    p.coeffs
        .iter()
        .map(|c| c.coeffs()[0].to_u64_digits().first().copied().unwrap_or(0))
        .collect()
}

fn lift_u64(v: &[u64], ctx: &PadicContext) -> ZqPoly {
    let mut p = ZqPoly {
        coeffs: v
            .iter()
            .map(|&c| ctx.from_u64(c))
            .collect(),
    };
    p.trim(ctx);
    p
}

// ---------------------------------------------------------------------------
// Flat word-sized kernels (modulus < 2^62, n = 1).
// ---------------------------------------------------------------------------

const KARATSUBA_THRESHOLD: usize = 32;

fn u64_poly_mul(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    if a.len().min(b.len()) < KARATSUBA_THRESHOLD {
        return u64_schoolbook(a, b, m);
    }
    u64_karatsuba(a, b, m)
}

fn u64_schoolbook(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    let m128 = m as u128;
    // Each product is < m^2; a u128 accumulator can absorb at least
    // 2^128 / m^2 terms before reduction.
    let cap: u128 = (u128::MAX / (m128 * m128)).max(1);
    for (k, o) in out.iter_mut().enumerate() {
        let lo = k.saturating_sub(b.len() - 1);
        let hi = k.min(a.len() - 1);
        let mut acc: u128 = 0;
        let mut cnt: u128 = 0;
        for i in lo..=hi {
            acc += a[i] as u128 * b[k - i] as u128;
            cnt += 1;
            if cnt == cap {
                acc %= m128;
                cnt = 0;
            }
        }
        *o = (acc % m128) as u64;
    }
    out
}

fn u64_add_into(dst: &mut [u64], src: &[u64], m: u64) {
    for (d, s) in dst.iter_mut().zip(src) {
        let t = *d + *s;
        *d = if t >= m { t - m } else { t };
    }
}

fn u64_sub_into(dst: &mut [u64], src: &[u64], m: u64) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d = if *d >= *s { *d - *s } else { *d + m - *s };
    }
}

fn u64_karatsuba(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    if a.len().min(b.len()) < KARATSUBA_THRESHOLD {
        return u64_schoolbook(a, b, m);
    }
    let h = a.len().max(b.len()).div_ceil(2);
    let (a0, a1) = a.split_at(a.len().min(h));
    let (b0, b1) = b.split_at(b.len().min(h));
    let z0 = u64_poly_mul(a0, b0, m);
    let z2 = if a1.is_empty() || b1.is_empty() {
        vec![]
    } else {
        u64_poly_mul(a1, b1, m)
    };
    // (a0+a1)(b0+b1)
    let mut sa = a0.to_vec();
    if sa.len() < a1.len() {
        sa.resize(a1.len(), 0);
    }
    u64_add_into(&mut sa, a1, m);
    let mut sb = b0.to_vec();
    if sb.len() < b1.len() {
        sb.resize(b1.len(), 0);
    }
    u64_add_into(&mut sb, b1, m);
    let mut z1 = u64_poly_mul(&sa, &sb, m);
    if z1.len() < z0.len() {
        z1.resize(z0.len(), 0);
    }
    u64_sub_into(&mut z1[..z0.len()], &z0, m);
    if z1.len() < z2.len() {
        z1.resize(z2.len(), 0);
    }
    u64_sub_into(&mut z1[..z2.len()], &z2, m);

    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &c) in z0.iter().enumerate() {
        let t = out[i] + c;
        out[i] = if t >= m { t - m } else { t };
    }
    for (i, &c) in z1.iter().enumerate() {
        if i + h >= out.len() {
            break;
        }
        let t = out[i + h] + c;
        out[i + h] = if t >= m { t - m } else { t };
    }
    for (i, &c) in z2.iter().enumerate() {
        let t = out[i + 2 * h] + c;
        out[i + 2 * h] = if t >= m { t - m } else { t };
    }
    out
}

fn u64_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Newton division with remainder; divisor leading coefficient must be a
/// unit mod m.
fn u64_divrem_newton(a: &[u64], b: &[u64], m: u64) -> (Vec<u64>, Vec<u64>) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    u64_trim(&mut a);
    u64_trim(&mut b);
    let (na, nb) = (a.len(), b.len());
    if na < nb {
        return (vec![], a);
    }
    let qlen = na - nb + 1;
    // reverse
    let ar: Vec<u64> = a.iter().rev().cloned().collect();
    let br: Vec<u64> = b.iter().rev().cloned().collect();
    let binv = u64_series_inverse(&br, qlen, m);
    let mut qr = u64_poly_mul(&ar[..qlen.min(ar.len())], &binv, m);
    qr.truncate(qlen);
    qr.resize(qlen, 0);
    let q: Vec<u64> = qr.iter().rev().cloned().collect();
    // r = a - q*b, degree < nb-1
    let qb = u64_poly_mul(&q, &b, m);
    let mut r = a;
    let len = r.len().min(qb.len());
    u64_sub_into(&mut r[..len], &qb[..len], m);
    r.truncate(nb - 1);
    u64_trim(&mut r);
    let mut q = q;
    u64_trim(&mut q);
    (q, r)
}

/// Inverse of a power series with unit constant term, to `len` terms.
fn u64_series_inverse(f: &[u64], len: usize, m: u64) -> Vec<u64> {
    let c0 = f[0];
    let c0_inv = u64_mod_inverse(c0, m).expect("unit constant term");
    let mut g = vec![c0_inv];
    let mut k = 1;
    while k < len {
        k = (2 * k).min(len);
        // g <- g(2 - f g) mod x^k
        let fg = {
            let mut t = u64_poly_mul(&f[..f.len().min(k)], &g, m);
            t.truncate(k);
            t
        };
        let mut two_minus = vec![0u64; fg.len().max(1)];
        two_minus[0] = 2 % m;
        u64_sub_into(&mut two_minus[..fg.len()], &fg, m);
        let mut ng = u64_poly_mul(&g, &two_minus, m);
        ng.truncate(k);
        g = ng;
    }
    g
}

fn u64_mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        let tt = t - q * new_t;
        t = std::mem::replace(&mut new_t, tt);
        let rr = r - q * new_r;
        r = std::mem::replace(&mut new_r, rr);
    }
    if r != 1 {
        return None;
    }
    Some(((t % m as i128 + m as i128) % m as i128) as u64)
}

// ---------------------------------------------------------------------------
// Laurent polynomials: x^shift * poly.
// ---------------------------------------------------------------------------

/// Laurent polynomial in x over Z_q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    pub poly: ZqPoly,
    pub shift: i64,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly {
            poly: ZqPoly::zero(),
            shift: 0,
        }
    }

    pub fn from_poly(poly: ZqPoly) -> Self {
        LaurentPoly { poly, shift: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// Remove a zero constant term into the shift.
    pub fn normalize(&mut self, ctx: &PadicContext) {
        self.poly.trim(ctx);
        if self.poly.is_zero() {
            self.shift = 0;
            return;
        }
        let mut k = 0;
        while k < self.poly.coeffs.len() && ctx.is_zero(&self.poly.coeffs[k]) {
            k += 1;
        }
        if k > 0 {
            self.poly.coeffs.drain(..k);
            self.shift += k as i64;
        }
    }

    /// Valuation at infinity: -(top x-degree); large sentinel for zero.
    pub fn ord_inf(&self) -> i64 {
        match self.poly.degree() {
            None => i64::MAX / 4,
            Some(d) => -(d as i64 + self.shift),
        }
    }

    /// Valuation at x = 0 (order of vanishing; negative for poles).
    pub fn ord_zero(&self, ctx: &PadicContext) -> i64 {
        if self.poly.is_zero() {
            return i64::MAX / 4;
        }
        let mut k = 0;
        while ctx.is_zero(&self.poly.coeffs[k]) {
            k += 1;
        }
        self.shift + k as i64
    }

    pub fn add(&self, other: &Self, ctx: &PadicContext) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let shift = self.shift.min(other.shift);
        let a = self.poly.shift_up((self.shift - shift) as usize, ctx);
        let b = other.poly.shift_up((other.shift - shift) as usize, ctx);
        let mut out = LaurentPoly {
            poly: a.add(&b, ctx),
            shift,
        };
        out.normalize(ctx);
        out
    }

    pub fn sub(&self, other: &Self, ctx: &PadicContext) -> Self {
        self.add(&other.neg(ctx), ctx)
    }

    pub fn neg(&self, ctx: &PadicContext) -> Self {
        LaurentPoly {
            poly: self.poly.neg(ctx),
            shift: self.shift,
        }
    }

    pub fn mul(&self, other: &Self, ctx: &PadicContext) -> Self {
        let mut out = LaurentPoly {
            poly: self.poly.mul(&other.poly, ctx),
            shift: self.shift + other.shift,
        };
        out.normalize(ctx);
        out
    }

    pub fn scale(&self, c: &ZqElem, ctx: &PadicContext) -> Self {
        let mut out = LaurentPoly {
            poly: self.poly.scale(c, ctx),
            shift: self.shift,
        };
        out.normalize(ctx);
        out
    }

    /// Coefficient of x^k.
    pub fn coeff_at(&self, k: i64, ctx: &PadicContext) -> ZqElem {
        let idx = k - self.shift;
        if idx < 0 {
            return ctx.zero();
        }
        self.poly.coeff(idx as usize, ctx)
    }

    /// d/dx.
    pub fn derivative(&self, ctx: &PadicContext) -> Self {
        // d(x^(s) * sum c_i x^i) = sum (s+i) c_i x^(s+i-1)
        if self.poly.is_zero() {
            return LaurentPoly::zero();
        }
        let mut coeffs = Vec::with_capacity(self.poly.coeffs.len());
        for (i, c) in self.poly.coeffs.iter().enumerate() {
            let k = self.shift + i as i64;
            let kk = ctx.from_bigint(&num_bigint::BigInt::from(k));
            coeffs.push(ctx.mul(c, &kk));
        }
        let mut out = LaurentPoly {
            poly: ZqPoly { coeffs },
            shift: self.shift - 1,
        };
        out.normalize(ctx);
        out
    }

    pub fn map_sigma(&self, ctx: &PadicContext) -> Self {
        LaurentPoly {
            poly: self.poly.map_sigma(ctx),
            shift: self.shift,
        }
    }

    /// Substitute x -> x^k (k >= 1).
    pub fn subst_x_pow(&self, k: usize, ctx: &PadicContext) -> Self {
        LaurentPoly {
            poly: self.poly.subst_x_pow(k, ctx),
            shift: self.shift * k as i64,
        }
    }

    pub fn content_val(&self, ctx: &PadicContext) -> u32 {
        self.poly.content_val(ctx)
    }

    /// True if no negative powers of x remain.
    pub fn is_polynomial(&self, _ctx: &PadicContext) -> bool {
        self.is_zero() || self.shift >= 0
    }

    pub fn to_poly(&self, ctx: &PadicContext) -> Option<ZqPoly> {
        if self.is_zero() {
            return Some(ZqPoly::zero());
        }
        if self.shift < 0 {
            return None;
        }
        Some(self.poly.shift_up(self.shift as usize, ctx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn ctx(p: u64, prec: u32) -> PadicContext {
        PadicContext::new(&BigUint::from(p), 1, prec, None).unwrap()
    }

    #[test]
    fn mul_matches_schoolbook_small() {
        let c = ctx(5, 6);
        let a = ZqPoly::from_i64_coeffs(&c, &[1, 2, 3, 4]);
        let b = ZqPoly::from_i64_coeffs(&c, &[7, 0, 5]);
        let ab = a.mul(&b, &c);
        // (1+2x+3x^2+4x^3)(7+5x^2)
        let expect = ZqPoly::from_i64_coeffs(&c, &[7, 14, 26, 38, 15, 20]);
        assert_eq!(ab, expect);
    }

    #[test]
    fn divrem_round_trips() {
        let c = ctx(7, 5);
        let a = ZqPoly::from_i64_coeffs(&c, &[3, 1, 4, 1, 5, 9, 2, 6]);
        let b = ZqPoly::from_i64_coeffs(&c, &[2, 0, 1]); // x^2 + 2
        let (q, r) = a.divrem(&b, &c).unwrap();
        let back = q.mul(&b, &c).add(&r, &c);
        assert_eq!(back, a);
        assert!(r.degree().map_or(true, |d| d < 2));
    }

    #[test]
    fn newton_divrem_matches_schoolbook() {
        let c = ctx(11, 8);
        // Large random-ish polynomials to hit the Newton path.
        let a_coeffs: Vec<i64> = (0..400).map(|i| (i * i * 37 + i * 5 + 1) % 214358881).collect();
        let b_coeffs: Vec<i64> = (0..150).map(|i| (i * 13 + 3) % 214358881).collect();
        let a = ZqPoly::from_i64_coeffs(&c, &a_coeffs);
        let mut b = ZqPoly::from_i64_coeffs(&c, &b_coeffs);
        // ensure lc unit
        b.coeffs[149] = c.one();
        let (q, r) = a.divrem(&b, &c).unwrap();
        let back = q.mul(&b, &c).add(&r, &c);
        assert_eq!(back, a);
    }

    #[test]
    fn laurent_ord_and_derivative() {
        let c = ctx(5, 4);
        // x^{-2}(1 + x^3) = x^{-2} + x
        let l = LaurentPoly {
            poly: ZqPoly::from_i64_coeffs(&c, &[1, 0, 0, 1]),
            shift: -2,
        };
        assert_eq!(l.ord_inf(), -1);
        assert_eq!(l.ord_zero(&c), -2);
        let d = l.derivative(&c);
        // d/dx = -2x^{-3} + 1
        assert_eq!(d.coeff_at(-3, &c), c.neg(&c.from_u64(2)));
        assert_eq!(d.coeff_at(0, &c), c.one());
    }
}
