//! The coefficient ring Z_q = Z_p[t]/(f_mod) at a fixed working precision,
//! together with the Frobenius automorphism sigma.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::PadicError;

/// Unramified coefficient ring Z_q of degree `n` over Z_p, truncated at p^N.
///
/// Immutable after construction; all element operations borrow the context.
#[derive(Clone, Debug)]
pub struct PadicContext {
    p: BigUint,
    n: usize,
    precision: u32,
    modulus: BigUint,
    /// Powers p^0 .. p^N.
    p_pows: Vec<BigUint>,
    /// Monic defining polynomial, ascending coefficients, length n+1, f_mod[n] = 1.
    f_mod: Vec<BigUint>,
    /// sigma(t) in coordinates 1, t, .., t^{n-1}.
    sigma_image: Vec<BigUint>,
}

/// Element of Z_q: coordinates with respect to 1, t, .., t^{n-1}, reduced mod p^N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZqElem {
    pub(crate) coeffs: Vec<BigUint>,
}

impl PadicContext {
    pub fn new(
        p: &BigUint,
        n: usize,
        precision: u32,
        f_mod: Option<Vec<BigUint>>,
    ) -> Result<Self, PadicError> {
        if precision < 1 {
            return Err(PadicError::PrecisionTooSmall);
        }
        if n < 1 {
            return Err(PadicError::BadExtensionDegree(n));
        }
        if !is_prime(p) {
            return Err(PadicError::NotPrime(p.to_string()));
        }
        let mut p_pows = Vec::with_capacity(precision as usize + 1);
        let mut acc = BigUint::one();
        for _ in 0..=precision {
            p_pows.push(acc.clone());
            acc *= p;
        }
        let modulus = p_pows[precision as usize].clone();

        let f_mod = match f_mod {
            Some(f) => {
                if f.len() != n + 1 || !f[n].is_one() {
                    return Err(PadicError::ReducibleDefiningPolynomial);
                }
                let fp: Vec<BigUint> = f.iter().map(|c| c % p).collect();
                if !poly_irreducible_mod_p(&fp, p) {
                    return Err(PadicError::ReducibleDefiningPolynomial);
                }
                f.into_iter().map(|c| c % &modulus).collect::<Vec<_>>()
            }
            None => default_defining_poly(p, n, &modulus)?,
        };

        let mut ctx = PadicContext {
            p: p.clone(),
            n,
            precision,
            modulus,
            p_pows,
            f_mod,
            sigma_image: vec![BigUint::zero(); n],
        };
        ctx.sigma_image = ctx.compute_sigma_image()?;
        Ok(ctx)
    }

    pub fn prime(&self) -> &BigUint {
        &self.p
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn p_pow(&self, k: u32) -> &BigUint {
        &self.p_pows[k as usize]
    }

    pub fn defining_poly(&self) -> &[BigUint] {
        &self.f_mod
    }

    pub fn sigma_image(&self) -> ZqElem {
        ZqElem {
            coeffs: self.sigma_image.clone(),
        }
    }

    /// Same ring at a lower precision.  Elements truncate coefficientwise.
    pub fn truncated(&self, precision: u32) -> Result<Self, PadicError> {
        if precision < 1 || precision > self.precision {
            return Err(PadicError::PrecisionTooSmall);
        }
        let modulus = self.p_pows[precision as usize].clone();
        Ok(PadicContext {
            p: self.p.clone(),
            n: self.n,
            precision,
            modulus: modulus.clone(),
            p_pows: self.p_pows[..=precision as usize].to_vec(),
            f_mod: self.f_mod.iter().map(|c| c % &modulus).collect(),
            sigma_image: self.sigma_image.iter().map(|c| c % &modulus).collect(),
        })
    }

    pub fn zero(&self) -> ZqElem {
        ZqElem {
            coeffs: vec![BigUint::zero(); self.n],
        }
    }

    pub fn one(&self) -> ZqElem {
        let mut coeffs = vec![BigUint::zero(); self.n];
        coeffs[0] = BigUint::one();
        ZqElem { coeffs }
    }

    /// The generator t of Z_q over Z_p (equals the defining root for n = 1).
    pub fn gen(&self) -> ZqElem {
        if self.n == 1 {
            // t is congruent to the root of the linear f_mod: t = -f_mod[0].
            let c = (&self.modulus - &self.f_mod[0]) % &self.modulus;
            return ZqElem { coeffs: vec![c] };
        }
        let mut coeffs = vec![BigUint::zero(); self.n];
        coeffs[1] = BigUint::one();
        ZqElem { coeffs }
    }

    pub fn from_u64(&self, v: u64) -> ZqElem {
        let mut coeffs = vec![BigUint::zero(); self.n];
        coeffs[0] = BigUint::from(v) % &self.modulus;
        ZqElem { coeffs }
    }

    pub fn from_bigint(&self, v: &num_bigint::BigInt) -> ZqElem {
        let mut coeffs = vec![BigUint::zero(); self.n];
        coeffs[0] = bigint_mod(v, &self.modulus);
        ZqElem { coeffs }
    }

    /// Element from integer coordinates (arbitrary sign), length <= n.
    pub fn from_int_coeffs(&self, v: &[num_bigint::BigInt]) -> ZqElem {
        assert!(v.len() <= self.n, "coordinate vector longer than degree");
        let mut coeffs = vec![BigUint::zero(); self.n];
        for (i, c) in v.iter().enumerate() {
            coeffs[i] = bigint_mod(c, &self.modulus);
        }
        ZqElem { coeffs }
    }

    pub fn add(&self, a: &ZqElem, b: &ZqElem) -> ZqElem {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| {
                let s = x + y;
                if s >= self.modulus {
                    s - &self.modulus
                } else {
                    s
                }
            })
            .collect();
        ZqElem { coeffs }
    }

    pub fn sub(&self, a: &ZqElem, b: &ZqElem) -> ZqElem {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| {
                if x >= y {
                    x - y
                } else {
                    x + &self.modulus - y
                }
            })
            .collect();
        ZqElem { coeffs }
    }

    pub fn neg(&self, a: &ZqElem) -> ZqElem {
        let coeffs = a
            .coeffs
            .iter()
            .map(|x| {
                if x.is_zero() {
                    BigUint::zero()
                } else {
                    &self.modulus - x
                }
            })
            .collect();
        ZqElem { coeffs }
    }

    pub fn mul(&self, a: &ZqElem, b: &ZqElem) -> ZqElem {
        if self.n == 1 {
            return ZqElem {
                coeffs: vec![&a.coeffs[0] * &b.coeffs[0] % &self.modulus],
            };
        }
        // Convolve, then fold degrees >= n with the monic relation
        // t^n = -(f_mod[0] + .. + f_mod[n-1] t^{n-1}).
        let n = self.n;
        let mut prod = vec![BigUint::zero(); 2 * n - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        for k in (n..2 * n - 1).rev() {
            let c = std::mem::replace(&mut prod[k], BigUint::zero()) % &self.modulus;
            if c.is_zero() {
                continue;
            }
            for i in 0..n {
                if self.f_mod[i].is_zero() {
                    continue;
                }
                // t^k = t^{k-n} * t^n = -sum f_i t^{k-n+i}
                let sub = &c * &self.f_mod[i] % &self.modulus;
                let idx = k - n + i;
                let cur = &prod[idx] % &self.modulus;
                prod[idx] = if cur >= sub {
                    cur - sub
                } else {
                    cur + &self.modulus - sub
                };
            }
        }
        let coeffs = prod[..n].iter().map(|c| c % &self.modulus).collect();
        ZqElem { coeffs }
    }

    pub fn mul_by_p_pow(&self, a: &ZqElem, k: u32) -> ZqElem {
        if k >= self.precision {
            return self.zero();
        }
        let pk = &self.p_pows[k as usize];
        ZqElem {
            coeffs: a.coeffs.iter().map(|c| c * pk % &self.modulus).collect(),
        }
    }

    /// Exact division by p^k.  The top k digits of the result are not
    /// determined by `a`; callers account for the lost precision.
    pub fn div_by_p_pow(&self, a: &ZqElem, k: u32) -> Result<ZqElem, PadicError> {
        if k == 0 {
            return Ok(a.clone());
        }
        let pk = &self.p_pows[(k.min(self.precision)) as usize];
        let mut coeffs = Vec::with_capacity(self.n);
        for c in &a.coeffs {
            if (c % pk).is_zero() {
                coeffs.push(c / pk);
            } else {
                return Err(PadicError::InexactDivision);
            }
        }
        Ok(ZqElem { coeffs })
    }

    pub fn is_zero(&self, a: &ZqElem) -> bool {
        a.coeffs.iter().all(|c| c.is_zero())
    }

    /// p-adic valuation in 0..=N; N means zero at this precision.
    pub fn valuation(&self, a: &ZqElem) -> u32 {
        let mut v = self.precision;
        for c in &a.coeffs {
            if c.is_zero() {
                continue;
            }
            let mut cv = 0u32;
            let mut cur = c.clone();
            while cv < v && (&cur % &self.p).is_zero() {
                cur /= &self.p;
                cv += 1;
            }
            v = v.min(cv);
            if v == 0 {
                return 0;
            }
        }
        v
    }

    pub fn is_unit(&self, a: &ZqElem) -> bool {
        self.valuation(a) == 0
    }

    /// Multiplicative inverse of a unit, by Hensel lifting the mod-p inverse.
    pub fn invert(&self, a: &ZqElem) -> Result<ZqElem, PadicError> {
        if !self.is_unit(a) {
            return Err(PadicError::NotAUnit);
        }
        let mut b = self.invert_mod_p(a)?;
        // b <- b(2 - ab) doubles the precision of the inverse each step.
        let two = self.from_u64(2);
        let mut digits = 1u32;
        while digits < self.precision {
            let ab = self.mul(a, &b);
            let corr = self.sub(&two, &ab);
            b = self.mul(&b, &corr);
            digits *= 2;
        }
        debug_assert!(self.is_zero(&self.sub(&self.mul(a, &b), &self.one())));
        Ok(b)
    }

    fn invert_mod_p(&self, a: &ZqElem) -> Result<ZqElem, PadicError> {
        // Inverse in F_q = F_p[t]/(f~): a^(q-2) would need q; use extended
        // Euclid on the coordinate polynomial instead.
        let fp: Vec<BigUint> = self.f_mod.iter().map(|c| c % &self.p).collect();
        let ap: Vec<BigUint> = a.coeffs.iter().map(|c| c % &self.p).collect();
        let inv = fp_poly_invert_mod(&ap, &fp, &self.p).ok_or(PadicError::NotAUnit)?;
        let mut coeffs = vec![BigUint::zero(); self.n];
        for (i, c) in inv.into_iter().enumerate() {
            coeffs[i] = c;
        }
        Ok(ZqElem { coeffs })
    }

    /// sigma^k(a) for the Frobenius lift sigma; sigma^n = id.
    pub fn sigma_iter(&self, a: &ZqElem, k: usize) -> ZqElem {
        let mut out = a.clone();
        for _ in 0..(k % self.n) {
            out = self.sigma(&out);
        }
        out
    }

    /// Frobenius sigma, applied by substituting sigma(t) into the coordinates.
    pub fn sigma(&self, a: &ZqElem) -> ZqElem {
        if self.n == 1 {
            return a.clone();
        }
        let s = self.sigma_image();
        // Horner in sigma(t).
        let mut acc = self.zero();
        for c in a.coeffs.iter().rev() {
            acc = self.mul(&acc, &s);
            let mut c_el = self.zero();
            c_el.coeffs[0] = c.clone();
            acc = self.add(&acc, &c_el);
        }
        acc
    }

    fn compute_sigma_image(&self) -> Result<Vec<BigUint>, PadicError> {
        if self.n == 1 {
            return Ok(vec![(&self.modulus - &self.f_mod[0]) % &self.modulus]);
        }
        // Newton iteration x <- x - f(x)/f'(x) from x = t^p mod p; converges
        // because f mod p is separable, so f'(x0) is a unit.
        let t = self.gen();
        let mut x = self.pow_u(&t, &self.p);
        // Reduce the start mod p.
        for c in x.coeffs.iter_mut() {
            *c = &*c % &self.p;
        }
        let steps = 64 - u64::from(self.precision).leading_zeros() + 1;
        for _ in 0..=steps {
            let fx = self.eval_f(&x);
            if self.is_zero(&fx) {
                break;
            }
            let dfx = self.eval_df(&x);
            let inv = self
                .invert(&dfx)
                .map_err(|_| PadicError::ReducibleDefiningPolynomial)?;
            let corr = self.mul(&fx, &inv);
            x = self.sub(&x, &corr);
        }
        let res = self.eval_f(&x);
        if !self.is_zero(&res) {
            return Err(PadicError::ReducibleDefiningPolynomial);
        }
        Ok(x.coeffs)
    }

    fn eval_f(&self, x: &ZqElem) -> ZqElem {
        let mut acc = self.zero();
        for c in self.f_mod.iter().rev() {
            acc = self.mul(&acc, x);
            let mut c_el = self.zero();
            c_el.coeffs[0] = c.clone();
            acc = self.add(&acc, &c_el);
        }
        acc
    }

    fn eval_df(&self, x: &ZqElem) -> ZqElem {
        let mut acc = self.zero();
        for i in (1..self.f_mod.len()).rev() {
            acc = self.mul(&acc, x);
            let mut c_el = self.zero();
            c_el.coeffs[0] = &self.f_mod[i] * BigUint::from(i) % &self.modulus;
            acc = self.add(&acc, &c_el);
        }
        acc
    }

    pub fn pow_u(&self, a: &ZqElem, e: &BigUint) -> ZqElem {
        let mut base = a.clone();
        let mut e = e.clone();
        let mut acc = self.one();
        while !e.is_zero() {
            if (&e % 2u8).is_one() {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Reduction of `a` modulo p, as coordinates in F_q.
    pub fn reduce_mod_p(&self, a: &ZqElem) -> Vec<BigUint> {
        a.coeffs.iter().map(|c| c % &self.p).collect()
    }
}

impl ZqElem {
    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }
}

pub(crate) fn bigint_mod(v: &num_bigint::BigInt, m: &BigUint) -> BigUint {
    use num_bigint::Sign;
    let mm = num_bigint::BigInt::from(m.clone());
    let r = ((v % &mm) + &mm) % &mm;
    match r.to_biguint() {
        Some(u) => u,
        None => unreachable!("nonnegative by construction: sign {:?}", r.sign() == Sign::Minus),
    }
}

// ---------------------------------------------------------------------------
// Small F_p[t] helpers used for context construction only.
// ---------------------------------------------------------------------------

fn fp_norm(a: &mut Vec<BigUint>) {
    while a.last().map_or(false, |c| c.is_zero()) {
        a.pop();
    }
}

fn fp_mul(a: &[BigUint], b: &[BigUint], p: &BigUint) -> Vec<BigUint> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigUint::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (&out[i + j] + x * y) % p;
        }
    }
    fp_norm(&mut out);
    out
}

fn fp_rem(a: &[BigUint], m: &[BigUint], p: &BigUint) -> Vec<BigUint> {
    // m monic
    let mut r: Vec<BigUint> = a.to_vec();
    fp_norm(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = r.last().unwrap().clone();
        let shift = r.len() - 1 - dm;
        if !lead.is_zero() {
            for i in 0..dm {
                let sub = &lead * &m[i] % p;
                let idx = shift + i;
                r[idx] = ((&r[idx] + p) - sub) % p;
            }
        }
        r.pop();
        fp_norm(&mut r);
    }
    r
}

fn fp_pow_t_mod(e: &BigUint, m: &[BigUint], p: &BigUint) -> Vec<BigUint> {
    // t^e mod m
    let mut base = vec![BigUint::zero(), BigUint::one()];
    base = fp_rem(&base, m, p);
    let mut acc = vec![BigUint::one()];
    let mut e = e.clone();
    while !e.is_zero() {
        if (&e % 2u8).is_one() {
            acc = fp_rem(&fp_mul(&acc, &base, p), m, p);
        }
        base = fp_rem(&fp_mul(&base, &base, p), m, p);
        e >>= 1;
    }
    acc
}

fn fp_gcd(a: &[BigUint], b: &[BigUint], p: &BigUint) -> Vec<BigUint> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    fp_norm(&mut a);
    fp_norm(&mut b);
    while !b.is_empty() {
        // normalize b monic
        let lc = b.last().unwrap().clone();
        let lc_inv = mod_inverse(&lc, p).expect("prime modulus");
        let bm: Vec<BigUint> = b.iter().map(|c| c * &lc_inv % p).collect();
        let r = fp_rem(&a, &bm, p);
        a = b;
        b = r;
    }
    a
}

fn fp_poly_invert_mod(a: &[BigUint], m: &[BigUint], p: &BigUint) -> Option<Vec<BigUint>> {
    // extended Euclid for a mod m over F_p, m monic
    let mut r0: Vec<BigUint> = m.to_vec();
    let mut r1: Vec<BigUint> = fp_rem(a, m, p);
    let mut s0: Vec<BigUint> = vec![];
    let mut s1: Vec<BigUint> = vec![BigUint::one()];
    fp_norm(&mut r1);
    while !r1.is_empty() {
        // divide r0 by r1
        let lc = r1.last().unwrap().clone();
        let lc_inv = mod_inverse(&lc, p)?;
        let mut r = r0.clone();
        let mut q = vec![BigUint::zero(); r.len().saturating_sub(r1.len()) + 1];
        fp_norm(&mut r);
        while r.len() >= r1.len() && !r.is_empty() {
            let shift = r.len() - r1.len();
            let coef = r.last().unwrap() * &lc_inv % p;
            q[shift] = coef.clone();
            for i in 0..r1.len() {
                let sub = &coef * &r1[i] % p;
                let idx = shift + i;
                r[idx] = ((&r[idx] + p) - sub) % p;
            }
            fp_norm(&mut r);
        }
        fp_norm(&mut q);
        // s = s0 - q*s1
        let qs1 = fp_mul(&q, &s1, p);
        let len = s0.len().max(qs1.len());
        let mut s = vec![BigUint::zero(); len];
        for (i, c) in s0.iter().enumerate() {
            s[i] = c.clone();
        }
        for (i, c) in qs1.iter().enumerate() {
            s[i] = ((&s[i] + p) - c % p) % p;
        }
        fp_norm(&mut s);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    // r0 = gcd; need degree 0
    if r0.len() != 1 {
        return None;
    }
    let ginv = mod_inverse(&r0[0], p)?;
    Some(s0.iter().map(|c| c * &ginv % p).collect())
}

pub(crate) fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    use num_bigint::BigInt;
    let mut t = BigInt::from(0);
    let mut new_t = BigInt::from(1);
    let mut r = BigInt::from(m.clone());
    let mut new_r = BigInt::from(a % m);
    while new_r != BigInt::from(0) {
        let q = &r / &new_r;
        let tmp_t = &t - &q * &new_t;
        t = std::mem::replace(&mut new_t, tmp_t);
        let tmp_r = &r - &q * &new_r;
        r = std::mem::replace(&mut new_r, tmp_r);
    }
    if r != BigInt::from(1) {
        return None;
    }
    Some(bigint_mod(&t, m))
}

fn poly_irreducible_mod_p(f: &[BigUint], p: &BigUint) -> bool {
    let mut f = f.to_vec();
    fp_norm(&mut f);
    if f.len() < 2 {
        return false;
    }
    let n = f.len() - 1;
    if n == 1 {
        return true;
    }
    // Make monic.
    let lc_inv = match mod_inverse(f.last().unwrap(), p) {
        Some(v) => v,
        None => return false,
    };
    let fm: Vec<BigUint> = f.iter().map(|c| c * &lc_inv % p).collect();
    // t^{p^n} == t mod f, and gcd(t^{p^{n/l}} - t, f) = 1 for primes l | n.
    let pn = p.pow(n as u32);
    let tp = fp_pow_t_mod(&pn, &fm, p);
    let mut tpmt = tp;
    if tpmt.len() < 2 {
        tpmt.resize(2, BigUint::zero());
    }
    tpmt[1] = ((&tpmt[1] + p) - BigUint::one()) % p;
    fp_norm(&mut tpmt);
    if !tpmt.is_empty() {
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
        let e = p.pow((n / l) as u32);
        let t_e = fp_pow_t_mod(&e, &fm, p);
        let mut diff = t_e;
        if diff.len() < 2 {
            diff.resize(2, BigUint::zero());
        }
        diff[1] = ((&diff[1] + p) - BigUint::one()) % p;
        fp_norm(&mut diff);
        let g = fp_gcd(&fm, &diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn default_defining_poly(
    p: &BigUint,
    n: usize,
    modulus: &BigUint,
) -> Result<Vec<BigUint>, PadicError> {
    if n == 1 {
        return Ok(vec![BigUint::zero(), BigUint::one()]);
    }
    // Smallest coefficient vector (constant term least significant) that is
    // irreducible mod p.
    let pn = p.pow(n as u32);
    let mut k = BigUint::zero();
    while k < pn {
        let mut coeffs = Vec::with_capacity(n + 1);
        let mut rem = k.clone();
        for _ in 0..n {
            coeffs.push(&rem % p);
            rem /= p;
        }
        coeffs.push(BigUint::one());
        if poly_irreducible_mod_p(&coeffs, p) {
            return Ok(coeffs.into_iter().map(|c| c % modulus).collect());
        }
        k += 1u8;
    }
    Err(PadicError::ReducibleDefiningPolynomial)
}

/// Deterministic Miller-Rabin for the desk-scale range we care about.
pub fn is_prime(p: &BigUint) -> bool {
    if *p < BigUint::from(2u8) {
        return false;
    }
    for small in [2u8, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let s = BigUint::from(small);
        if *p == s {
            return true;
        }
        if (p % &s).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let pm1 = p - &one;
    let mut d = pm1.clone();
    let mut r = 0u32;
    while (&d % 2u8).is_zero() {
        d >>= 1;
        r += 1;
    }
    'witness: for a in [2u8, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let a = BigUint::from(a);
        let mut x = a.modpow(&d, p);
        if x == one || x == pm1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = &x * &x % p;
            if x == pm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, n: usize, prec: u32) -> PadicContext {
        PadicContext::new(&BigUint::from(p), n, prec, None).unwrap()
    }

    #[test]
    fn context_rejects_bad_input() {
        assert!(PadicContext::new(&BigUint::from(6u8), 1, 3, None).is_err());
        assert!(PadicContext::new(&BigUint::from(5u8), 1, 0, None).is_err());
        // t^2 + 1 is reducible mod 5 (roots 2, 3)
        let f = vec![BigUint::one(), BigUint::zero(), BigUint::one()];
        assert!(PadicContext::new(&BigUint::from(5u8), 2, 2, Some(f)).is_err());
    }

    #[test]
    fn sigma_identity_for_prime_field() {
        let c = ctx(7, 1, 5);
        let a = c.from_u64(1234);
        assert_eq!(c.sigma(&a), a);
    }

    #[test]
    fn sigma_conjugate_for_t2_plus_2() {
        // f = t^2 + 2 over Z_5: sigma(t) = -t exactly, since f(-t) = f(t)
        // and -t == t^5 mod 5.
        let f = vec![BigUint::from(2u8), BigUint::zero(), BigUint::one()];
        let c = PadicContext::new(&BigUint::from(5u8), 2, 4, Some(f)).unwrap();
        let t = c.gen();
        let st = c.sigma(&t);
        assert_eq!(st, c.neg(&t));
        // sigma^2 = id
        assert_eq!(c.sigma(&st), t);
    }

    #[test]
    fn sigma_root_for_degree_three() {
        // f = t^3 - t + 1 over Z_3: sigma(t) == t^3 mod 3 and f(sigma(t)) == 0 mod 27.
        let m = BigUint::from(27u8);
        let f = vec![
            BigUint::one(),
            &m - BigUint::one(),
            BigUint::zero(),
            BigUint::one(),
        ];
        let c = PadicContext::new(&BigUint::from(3u8), 3, 3, Some(f)).unwrap();
        let s = c.sigma_image();
        let t = c.gen();
        let t3 = c.mul(&t, &c.mul(&t, &t));
        // sigma(t) = t^3 mod 3
        for (a, b) in s.coeffs().iter().zip(t3.coeffs()) {
            assert_eq!(a % BigUint::from(3u8), b % BigUint::from(3u8));
        }
        // f(sigma(t)) = 0 mod 3^3: evaluate
        let s3 = c.mul(&s, &c.mul(&s, &s));
        let val = c.add(&c.sub(&s3, &s), &c.one());
        assert!(c.is_zero(&val));
        // applying sigma with k to t+1 matches substitution
        let a = c.add(&t, &c.one());
        let sa = c.sigma_iter(&a, 1);
        assert_eq!(sa, c.add(&s, &c.one()));
        // sigma^3 = id
        assert_eq!(c.sigma_iter(&a, 3), a);
    }

    #[test]
    fn invert_examples() {
        let c = ctx(5, 1, 3);
        assert_eq!(c.invert(&c.one()).unwrap(), c.one());
        // 2 * 63 = 126 == 1 mod 125
        assert_eq!(c.invert(&c.from_u64(2)).unwrap(), c.from_u64(63));
        assert!(c.invert(&c.from_u64(5)).is_err());

        // t * b == 1 mod 25 in Z_5[t]/(t^2+2)
        let f = vec![BigUint::from(2u8), BigUint::zero(), BigUint::one()];
        let c2 = PadicContext::new(&BigUint::from(5u8), 2, 2, Some(f)).unwrap();
        let t = c2.gen();
        let b = c2.invert(&t).unwrap();
        assert_eq!(c2.mul(&t, &b), c2.one());
    }

    #[test]
    fn valuation_and_p_shift() {
        let c = ctx(5, 1, 4);
        assert_eq!(c.valuation(&c.from_u64(50)), 2);
        assert_eq!(c.valuation(&c.zero()), 4);
        let a = c.from_u64(75);
        let d = c.div_by_p_pow(&a, 2).unwrap();
        assert_eq!(d, c.from_u64(3));
        assert!(c.div_by_p_pow(&c.from_u64(7), 1).is_err());
    }

    #[test]
    fn sigma_is_frobenius_mod_p() {
        let c = ctx(3, 3, 4);
        let t = c.gen();
        let a = c.add(&c.mul(&t, &t), &c.from_u64(2));
        let sa = c.sigma(&a);
        let a3 = c.pow_u(&a, &BigUint::from(3u8));
        for (x, y) in sa.coeffs().iter().zip(a3.coeffs()) {
            assert_eq!(x % BigUint::from(3u8), y % BigUint::from(3u8));
        }
    }
}
