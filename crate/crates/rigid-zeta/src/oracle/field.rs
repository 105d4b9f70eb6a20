//! Word-sized arithmetic in F_{p^k} for the enumeration oracle, independent
//! of the big-integer p-adic stack.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::OracleError;

/// F_{p^deg} = F_p[z]/(modulus), modulus found by deterministic search.
pub struct FqContext {
    pub p: u64,
    pub deg: usize,
    /// monic irreducible over F_p, ascending, length deg+1
    pub modulus: Vec<u64>,
}

pub type FqElem = Vec<u64>;

impl FqContext {
    pub fn for_extension(p: u64, n: usize, i: usize) -> Result<FqContext, OracleError> {
        if p >= 1 << 31 {
            return Err(OracleError::PrimeTooLarge);
        }
        let deg = n * i;
        let modulus = find_irreducible(p, deg);
        Ok(FqContext { p, deg, modulus })
    }

    pub fn size_bounded(&self, budget: u64) -> Result<u64, OracleError> {
        let mut size: u64 = 1;
        for _ in 0..self.deg {
            size = size
                .checked_mul(self.p)
                .filter(|&s| s <= budget)
                .ok_or_else(|| {
                    OracleError::BudgetExceeded(format!("{}^{}", self.p, self.deg))
                })?;
        }
        Ok(size)
    }

    pub fn zero(&self) -> FqElem {
        vec![0; self.deg]
    }

    pub fn one(&self) -> FqElem {
        let mut e = vec![0; self.deg];
        e[0] = 1;
        e
    }

    pub fn is_zero(&self, a: &FqElem) -> bool {
        a.iter().all(|&c| c == 0)
    }

    /// Counter-style successor for deterministic enumeration.
    pub fn next_element(&self, a: &FqElem) -> FqElem {
        let mut e = a.clone();
        for c in e.iter_mut() {
            *c += 1;
            if *c < self.p {
                return e;
            }
            *c = 0;
        }
        e
    }

    pub fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| {
                let s = x + y;
                if s >= self.p {
                    s - self.p
                } else {
                    s
                }
            })
            .collect()
    }

    pub fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| if x >= y { x - y } else { x + self.p - y })
            .collect()
    }

    pub fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        let d = self.deg;
        let mut prod = vec![0u128; 2 * d - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] += x as u128 * y as u128;
            }
        }
        // reduce by the monic modulus
        for k in (d..2 * d - 1).rev() {
            let c = (prod[k] % self.p as u128) as u64;
            prod[k] = 0;
            if c == 0 {
                continue;
            }
            for i in 0..d {
                let m = self.modulus[i];
                if m == 0 {
                    continue;
                }
                // subtract c * m at position k - d + i
                let sub = c as u128 * m as u128 % self.p as u128;
                let cur = prod[k - d + i] % self.p as u128;
                prod[k - d + i] = (cur + self.p as u128 - sub) % self.p as u128;
            }
        }
        (0..d).map(|i| (prod[i] % self.p as u128) as u64).collect()
    }

    /// Inverse through extended Euclid over F_p[z].
    pub fn inv(&self, a: &FqElem) -> Option<FqElem> {
        let inv = fp_poly_invert(a, &self.modulus, self.p)?;
        let mut out = inv;
        out.resize(self.deg, 0);
        Some(out)
    }

    /// Horner evaluation of a polynomial with F_{q^i} coefficients.
    pub fn eval_poly(&self, coeffs: &[FqElem], x: &FqElem) -> FqElem {
        let mut acc = self.zero();
        for c in coeffs.iter().rev() {
            acc = self.mul(&acc, x);
            acc = self.add(&acc, c);
        }
        acc
    }

    /// Image of the base field F_q = F_p[t]/(f_mod): a root of f_mod here.
    pub fn embedding_of_base(&self, f_mod: &[u64]) -> Result<FqElem, OracleError> {
        if f_mod.len() == 2 {
            // prime base field: t maps to the root -f_mod[0]
            let c = (self.p - f_mod[0] % self.p) % self.p;
            let mut e = self.zero();
            e[0] = c;
            return Ok(e);
        }
        let coeffs: Vec<FqElem> = f_mod
            .iter()
            .map(|&c| {
                let mut e = self.zero();
                e[0] = c % self.p;
                e
            })
            .collect();
        let mut x = self.zero();
        let mut tries: u64 = 1;
        for _ in 0..self.deg {
            tries = tries.saturating_mul(self.p);
        }
        for _ in 0..tries {
            if self.is_zero(&self.eval_poly(&coeffs, &x)) {
                return Ok(x);
            }
            x = self.next_element(&x);
        }
        Err(OracleError::BudgetExceeded("no base-field root found".into()))
    }

    /// Base-field element (coordinates in t) mapped through the embedding.
    pub fn cast(&self, c: &[u64], root: &FqElem) -> FqElem {
        let mut acc = self.zero();
        for &coef in c.iter().rev() {
            acc = self.mul(&acc, root);
            if coef != 0 {
                let mut e = self.zero();
                e[0] = coef % self.p;
                acc = self.add(&acc, &e);
            }
        }
        acc
    }

    /// Number of distinct roots of f in this field:
    /// deg gcd(f, y^{p^deg} - y).
    pub fn count_roots(&self, f: &[FqElem]) -> u64 {
        let mut f = f.to_vec();
        while f.last().map_or(false, |c| self.is_zero(c)) {
            f.pop();
        }
        if f.len() <= 1 {
            return 0;
        }
        // y^{p^deg} mod f
        let e = BigUint::from(self.p).pow(self.deg as u32);
        let mut acc = vec![self.zero(), self.one()]; // y
        acc = self.poly_rem(&acc, &f);
        let mut result = vec![self.one()]; // 1
        let mut bits: Vec<bool> = vec![];
        {
            let mut ee = e.clone();
            while !ee.is_zero() {
                bits.push((&ee % 2u8) == BigUint::from(1u8));
                ee >>= 1;
            }
        }
        for (idx, bit) in bits.iter().enumerate().rev() {
            if idx != bits.len() - 1 {
                result = self.poly_rem(&self.poly_mul(&result, &result), &f);
            }
            if *bit {
                result = self.poly_rem(&self.poly_mul(&result, &acc), &f);
            }
        }
        // result = y^{p^deg} mod f; gcd(f, result - y)
        let mut diff = result;
        if diff.len() < 2 {
            diff.resize(2, self.zero());
        }
        diff[1] = self.sub(&diff[1], &self.one());
        let g = self.poly_gcd(&f, &diff);
        (g.len().max(1) - 1) as u64
    }

    pub fn poly_mul(&self, a: &[FqElem], b: &[FqElem]) -> Vec<FqElem> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![self.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if self.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                let t = self.mul(x, y);
                out[i + j] = self.add(&out[i + j], &t);
            }
        }
        out
    }

    pub fn poly_rem(&self, a: &[FqElem], m: &[FqElem]) -> Vec<FqElem> {
        let mut r = a.to_vec();
        while r.last().map_or(false, |c| self.is_zero(c)) {
            r.pop();
        }
        let dm = m.len() - 1;
        let lc_inv = self.inv(&m[dm]).expect("monic-ish divisor");
        while r.len() > dm {
            let lead = self.mul(r.last().unwrap(), &lc_inv);
            let k = r.len() - 1 - dm;
            if !self.is_zero(&lead) {
                for i in 0..dm {
                    let t = self.mul(&lead, &m[i]);
                    r[k + i] = self.sub(&r[k + i], &t);
                }
            }
            r.pop();
            while r.last().map_or(false, |c| self.is_zero(c)) {
                r.pop();
            }
        }
        r
    }

    pub fn poly_gcd(&self, a: &[FqElem], b: &[FqElem]) -> Vec<FqElem> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        loop {
            while b.last().map_or(false, |c| self.is_zero(c)) {
                b.pop();
            }
            if b.is_empty() {
                return a;
            }
            let r = self.poly_rem(&a, &b);
            a = b;
            b = r;
        }
    }
}

fn fp_norm(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y % p) % p;
        }
    }
    fp_norm(&mut out);
    out
}

fn fp_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    fp_norm(&mut r);
    let dm = m.len() - 1;
    let lc_inv = fp_inv_scalar(m[dm], p);
    while r.len() > dm {
        let lead = r.last().unwrap() * lc_inv % p;
        let k = r.len() - 1 - dm;
        if lead != 0 {
            for i in 0..dm {
                let sub = lead * m[i] % p;
                r[k + i] = (r[k + i] + p - sub) % p;
            }
        }
        r.pop();
        fp_norm(&mut r);
    }
    r
}

fn fp_inv_scalar(a: u64, p: u64) -> u64 {
    // extended Euclid on integers
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        let tt = t - q * new_t;
        t = std::mem::replace(&mut new_t, tt);
        let rr = r - q * new_r;
        r = std::mem::replace(&mut new_r, rr);
    }
    ((t % p as i128 + p as i128) % p as i128) as u64
}

fn fp_poly_invert(a: &[u64], m: &[u64], p: u64) -> Option<Vec<u64>> {
    let mut r0 = m.to_vec();
    let mut r1 = fp_rem(a, m, p);
    let mut s0: Vec<u64> = vec![];
    let mut s1: Vec<u64> = vec![1];
    fp_norm(&mut r1);
    while !r1.is_empty() {
        // divide r0 by r1
        let lc_inv = fp_inv_scalar(*r1.last().unwrap(), p);
        let mut r = r0.clone();
        fp_norm(&mut r);
        let mut q = vec![0u64; r.len().saturating_sub(r1.len()) + 1];
        while r.len() >= r1.len() && !r.is_empty() {
            let k = r.len() - r1.len();
            let coef = r.last().unwrap() * lc_inv % p;
            q[k] = (q[k] + coef) % p;
            for i in 0..r1.len() {
                let sub = coef * r1[i] % p;
                r[k + i] = (r[k + i] + p - sub) % p;
            }
            fp_norm(&mut r);
        }
        fp_norm(&mut q);
        let qs1 = fp_mul(&q, &s1, p);
        let mut s = s0.clone();
        s.resize(s.len().max(qs1.len()), 0);
        for (i, &c) in qs1.iter().enumerate() {
            s[i] = (s[i] + p - c) % p;
        }
        fp_norm(&mut s);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    if r0.len() != 1 {
        return None;
    }
    let ginv = fp_inv_scalar(r0[0], p);
    Some(s0.iter().map(|&c| c * ginv % p).collect())
}

/// Deterministic counter search for a monic irreducible of the given degree.
pub fn find_irreducible(p: u64, deg: usize) -> Vec<u64> {
    if deg == 1 {
        return vec![0, 1];
    }
    let mut k: u64 = 0;
    loop {
        let mut coeffs = Vec::with_capacity(deg + 1);
        let mut rem = k;
        for _ in 0..deg {
            coeffs.push(rem % p);
            rem /= p;
        }
        coeffs.push(1);
        if fp_poly_irreducible(&coeffs, p) {
            return coeffs;
        }
        k += 1;
    }
}

fn fp_pow_x_mod(e: &BigUint, m: &[u64], p: u64) -> Vec<u64> {
    let x = fp_rem(&[0, 1], m, p);
    let mut acc = vec![1u64];
    let mut bits: Vec<bool> = vec![];
    let mut ee = e.clone();
    while !ee.is_zero() {
        bits.push((&ee % 2u8) == BigUint::from(1u8));
        ee >>= 1;
    }
    for (idx, bit) in bits.iter().enumerate().rev() {
        if idx != bits.len() - 1 {
            acc = fp_rem(&fp_mul(&acc, &acc, p), m, p);
        }
        if *bit {
            acc = fp_rem(&fp_mul(&acc, &x, p), m, p);
        }
    }
    acc
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    fp_norm(&mut a);
    fp_norm(&mut b);
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
        fp_norm(&mut b);
    }
    a
}

pub fn fp_poly_irreducible(f: &[u64], p: u64) -> bool {
    let n = f.len() - 1;
    if n == 1 {
        return true;
    }
    let pn = BigUint::from(p).pow(n as u32);
    // x^{p^n} == x mod f
    let mut t = fp_pow_x_mod(&pn, f, p);
    if t.len() < 2 {
        t.resize(2, 0);
    }
    t[1] = (t[1] + p - 1) % p;
    fp_norm(&mut t);
    if !t.is_empty() {
        return false;
    }
    let mut m = n;
    let mut prime_divs = vec![];
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            prime_divs.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        prime_divs.push(m);
    }
    for l in prime_divs {
        let e = BigUint::from(p).pow((n / l) as u32);
        let mut t = fp_pow_x_mod(&e, f, p);
        if t.len() < 2 {
            t.resize(2, 0);
        }
        t[1] = (t[1] + p - 1) % p;
        fp_norm(&mut t);
        let g = fp_gcd(f, &t, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_arithmetic_f25() {
        let fq = FqContext::for_extension(5, 1, 2).unwrap();
        assert_eq!(fq.deg, 2);
        let a = vec![2, 3];
        let ainv = fq.inv(&a).unwrap();
        let prod = fq.mul(&a, &ainv);
        assert_eq!(prod, fq.one());
    }

    #[test]
    fn count_roots_of_split_poly() {
        // (y - 1)(y - 2) over F_7
        let fq = FqContext::for_extension(7, 1, 1).unwrap();
        let one = fq.one();
        let two = {
            let mut e = fq.zero();
            e[0] = 2;
            e
        };
        let f = vec![fq.mul(&one, &two), fq.sub(&fq.zero(), &fq.add(&one, &two)), fq.one()];
        assert_eq!(fq.count_roots(&f), 2);
        // y^2 + 1 over F_7: -1 is not a square mod 7
        let f2 = vec![fq.one(), fq.zero(), fq.one()];
        assert_eq!(fq.count_roots(&f2), 0);
    }
}
