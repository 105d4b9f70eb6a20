//! Scalars of Q_q as (mantissa, p-shift) pairs, dense linear algebra with
//! valuation pivoting, lattice echelon with saturation, and the
//! division-free characteristic polynomial used by the reduction caches.
//!
//! Divisions by non-units are never silent: every routine reports the total
//! valuation it divided out.

use super::context::{PadicContext, ZqElem};
use super::poly::ZqPoly;
use crate::error::PadicError;

pub const VAL_INF: i64 = i64::MAX / 4;

/// Element of Q_q: value = p^shift * mantissa, mantissa known mod p^N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QqScalar {
    pub m: ZqElem,
    pub shift: i64,
}

impl QqScalar {
    pub fn from_zq(m: ZqElem) -> Self {
        QqScalar { m, shift: 0 }
    }
}

impl PadicContext {
    pub fn qq_zero(&self) -> QqScalar {
        QqScalar {
            m: self.zero(),
            shift: 0,
        }
    }

    pub fn qq_one(&self) -> QqScalar {
        QqScalar {
            m: self.one(),
            shift: 0,
        }
    }

    pub fn qq_is_zero(&self, a: &QqScalar) -> bool {
        self.is_zero(&a.m)
    }

    /// Valuation; VAL_INF when the mantissa carries no known digits.
    pub fn qq_val(&self, a: &QqScalar) -> i64 {
        if self.is_zero(&a.m) {
            VAL_INF
        } else {
            a.shift + self.valuation(&a.m) as i64
        }
    }

    /// Move mantissa p-powers into the shift.
    pub fn qq_normalize(&self, a: &QqScalar) -> QqScalar {
        if self.is_zero(&a.m) {
            return self.qq_zero();
        }
        let v = self.valuation(&a.m);
        if v == 0 {
            return a.clone();
        }
        let m = self
            .div_by_p_pow(&a.m, v)
            .expect("valuation counted the factors");
        QqScalar {
            m,
            shift: a.shift + v as i64,
        }
    }

    pub fn qq_add(&self, a: &QqScalar, b: &QqScalar) -> QqScalar {
        if self.is_zero(&a.m) {
            return b.clone();
        }
        if self.is_zero(&b.m) {
            return a.clone();
        }
        let shift = a.shift.min(b.shift);
        let da = (a.shift - shift) as u32;
        let db = (b.shift - shift) as u32;
        let ma = self.mul_by_p_pow(&a.m, da);
        let mb = self.mul_by_p_pow(&b.m, db);
        QqScalar {
            m: self.add(&ma, &mb),
            shift,
        }
    }

    pub fn qq_sub(&self, a: &QqScalar, b: &QqScalar) -> QqScalar {
        self.qq_add(a, &self.qq_neg(b))
    }

    pub fn qq_neg(&self, a: &QqScalar) -> QqScalar {
        QqScalar {
            m: self.neg(&a.m),
            shift: a.shift,
        }
    }

    pub fn qq_mul(&self, a: &QqScalar, b: &QqScalar) -> QqScalar {
        if self.is_zero(&a.m) || self.is_zero(&b.m) {
            return self.qq_zero();
        }
        QqScalar {
            m: self.mul(&a.m, &b.m),
            shift: a.shift + b.shift,
        }
    }

    pub fn qq_inv(&self, a: &QqScalar) -> Result<QqScalar, PadicError> {
        let n = self.qq_normalize(a);
        if self.is_zero(&n.m) {
            return Err(PadicError::NotAUnit);
        }
        Ok(QqScalar {
            m: self.invert(&n.m)?,
            shift: -n.shift,
        })
    }

    pub fn qq_sigma(&self, a: &QqScalar) -> QqScalar {
        QqScalar {
            m: self.sigma(&a.m),
            shift: a.shift,
        }
    }
}

// ---------------------------------------------------------------------------
// Dense matrices over Q_q.
// ---------------------------------------------------------------------------

pub type QqMat = Vec<Vec<QqScalar>>;

pub fn qq_identity(ctx: &PadicContext, n: usize) -> QqMat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { ctx.qq_one() } else { ctx.qq_zero() })
                .collect()
        })
        .collect()
}

pub fn qq_mat_mul(ctx: &PadicContext, a: &QqMat, b: &QqMat) -> QqMat {
    let n = a.len();
    let k = b.len();
    let m = if k > 0 { b[0].len() } else { 0 };
    let mut out = vec![vec![ctx.qq_zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if ctx.qq_is_zero(&a[i][l]) {
                continue;
            }
            for j in 0..m {
                let t = ctx.qq_mul(&a[i][l], &b[l][j]);
                out[i][j] = ctx.qq_add(&out[i][j], &t);
            }
        }
    }
    out
}

pub fn qq_mat_vec(ctx: &PadicContext, a: &QqMat, v: &[QqScalar]) -> Vec<QqScalar> {
    a.iter()
        .map(|row| {
            let mut acc = ctx.qq_zero();
            for (x, y) in row.iter().zip(v) {
                acc = ctx.qq_add(&acc, &ctx.qq_mul(x, y));
            }
            acc
        })
        .collect()
}

pub fn qq_mat_sigma(ctx: &PadicContext, a: &QqMat) -> QqMat {
    a.iter()
        .map(|row| row.iter().map(|x| ctx.qq_sigma(x)).collect())
        .collect()
}

/// Minimal entry valuation of the matrix.
pub fn qq_mat_min_val(ctx: &PadicContext, a: &QqMat) -> i64 {
    let mut v = VAL_INF;
    for row in a {
        for x in row {
            v = v.min(ctx.qq_val(x));
        }
    }
    v
}

/// Solve M x = b by Gaussian elimination with full valuation pivoting.
/// Returns the solution and the total valuation divided out (the loss).
pub fn qq_solve(
    ctx: &PadicContext,
    m: &QqMat,
    b: &[QqScalar],
) -> Result<(Vec<QqScalar>, u32), PadicError> {
    let n = m.len();
    assert!(n > 0 && m[0].len() == n && b.len() == n);
    let mut a: QqMat = m.to_vec();
    let mut rhs: Vec<QqScalar> = b.to_vec();
    let mut col_perm: Vec<usize> = (0..n).collect();
    let mut loss = 0i64;

    for step in 0..n {
        // full pivot: minimal valuation in the remaining block
        let mut best: Option<(i64, usize, usize)> = None;
        for i in step..n {
            for j in step..n {
                let v = ctx.qq_val(&a[i][j]);
                if v < VAL_INF && best.map_or(true, |(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                }
            }
        }
        let (pv, pi, pj) = best.ok_or(PadicError::SingularToPrecision)?;
        loss += pv;
        a.swap(step, pi);
        for row in a.iter_mut() {
            row.swap(step, pj);
        }
        rhs.swap(step, pi);
        col_perm.swap(step, pj);

        let pinv = ctx.qq_inv(&a[step][step])?;
        for i in 0..n {
            if i == step || ctx.qq_is_zero(&a[i][step]) {
                continue;
            }
            let factor = ctx.qq_mul(&a[i][step], &pinv);
            for j in step..n {
                let t = ctx.qq_mul(&factor, &a[step][j]);
                a[i][j] = ctx.qq_sub(&a[i][j], &t);
            }
            let t = ctx.qq_mul(&factor, &rhs[step]);
            rhs[i] = ctx.qq_sub(&rhs[i], &t);
        }
    }
    let mut x = vec![ctx.qq_zero(); n];
    for i in 0..n {
        let pinv = ctx.qq_inv(&a[i][i])?;
        x[col_perm[i]] = ctx.qq_mul(&rhs[i], &pinv);
    }
    Ok((x, loss.max(0) as u32))
}

/// Right kernel of M (solutions of M x = 0), with saturation-style scaling
/// left to the caller.
pub fn qq_kernel(ctx: &PadicContext, m: &QqMat) -> Vec<Vec<QqScalar>> {
    if m.is_empty() {
        return vec![];
    }
    let rows = m.len();
    let cols = m[0].len();
    let mut a: QqMat = m.to_vec();
    let mut col_perm: Vec<usize> = (0..cols).collect();
    let mut rank = 0usize;

    for step in 0..rows.min(cols) {
        let mut best: Option<(i64, usize, usize)> = None;
        for i in rank..rows {
            for j in rank..cols {
                let v = ctx.qq_val(&a[i][j]);
                if v < VAL_INF && best.map_or(true, |(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                }
            }
        }
        let (_, pi, pj) = match best {
            Some(t) => t,
            None => break,
        };
        a.swap(step, pi);
        for row in a.iter_mut() {
            row.swap(step, pj);
        }
        col_perm.swap(step, pj);
        let pinv = ctx
            .qq_inv(&a[step][step])
            .expect("pivot has finite valuation");
        for j in step..cols {
            a[step][j] = ctx.qq_mul(&a[step][j], &pinv);
        }
        for i in 0..rows {
            if i == step || ctx.qq_is_zero(&a[i][step]) {
                continue;
            }
            let factor = a[i][step].clone();
            for j in step..cols {
                let t = ctx.qq_mul(&factor, &a[step][j]);
                a[i][j] = ctx.qq_sub(&a[i][j], &t);
            }
        }
        rank += 1;
    }

    let mut basis = vec![];
    for free in rank..cols {
        let mut v = vec![ctx.qq_zero(); cols];
        v[col_perm[free]] = ctx.qq_one();
        for i in 0..rank {
            v[col_perm[i]] = ctx.qq_neg(&a[i][free]);
        }
        basis.push(v);
    }
    basis
}

// ---------------------------------------------------------------------------
// Lattice rows over Z_q with saturation.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct Echelon {
    /// Rows with unit pivots normalized to 1, at distinct columns.
    pub rows: Vec<Vec<QqScalar>>,
    pub pivot_cols: Vec<usize>,
    /// Total p-powers divided out of rows (saturation moves).
    pub loss: u32,
}

/// Bring lattice generators to a saturated echelon basis: the output rows
/// are a Z_q-basis of (span of input) saturated inside Z_q^cols.
pub fn lattice_saturated_echelon(ctx: &PadicContext, gens: &[Vec<QqScalar>]) -> Echelon {
    let mut work: Vec<Vec<QqScalar>> = gens.to_vec();
    let mut out_rows: Vec<Vec<QqScalar>> = vec![];
    let mut pivot_cols: Vec<usize> = vec![];
    let mut loss = 0u32;

    loop {
        // primitivize: divide each remaining row by its content
        let mut next_work = vec![];
        for mut row in work {
            let mut minv = VAL_INF;
            for x in &row {
                minv = minv.min(ctx.qq_val(x));
            }
            if minv == VAL_INF {
                continue; // zero row
            }
            if minv != 0 {
                for x in row.iter_mut() {
                    x.shift -= minv;
                }
                if minv > 0 {
                    loss += minv as u32;
                }
            }
            next_work.push(row);
        }
        if next_work.is_empty() {
            break;
        }
        // pick the first row with a unit entry (exists after primitivization)
        let mut row = next_work.remove(0);
        let pj = (0..row.len())
            .find(|&j| ctx.qq_val(&row[j]) == 0)
            .expect("primitive row has a unit entry");
        let pinv = ctx.qq_inv(&row[pj]).unwrap();
        for x in row.iter_mut() {
            *x = ctx.qq_mul(x, &pinv);
        }
        // eliminate from remaining rows and from previous basis rows
        for other in next_work.iter_mut().chain(out_rows.iter_mut()) {
            if ctx.qq_is_zero(&other[pj]) {
                continue;
            }
            let factor = other[pj].clone();
            for j in 0..other.len() {
                let t = ctx.qq_mul(&factor, &row[j]);
                other[j] = ctx.qq_sub(&other[j], &t);
            }
        }
        out_rows.push(row);
        pivot_cols.push(pj);
        work = next_work;
    }
    Echelon {
        rows: out_rows,
        pivot_cols,
        loss,
    }
}

impl Echelon {
    /// Reduce a vector modulo the echelon rows; returns (coordinates at the
    /// pivot columns, remainder).
    pub fn reduce(&self, ctx: &PadicContext, v: &[QqScalar]) -> (Vec<QqScalar>, Vec<QqScalar>) {
        let mut rem = v.to_vec();
        let mut coords = Vec::with_capacity(self.rows.len());
        for (row, &pj) in self.rows.iter().zip(&self.pivot_cols) {
            let c = rem[pj].clone();
            coords.push(c.clone());
            if ctx.qq_is_zero(&c) {
                continue;
            }
            for j in 0..rem.len() {
                let t = ctx.qq_mul(&c, &row[j]);
                rem[j] = ctx.qq_sub(&rem[j], &t);
            }
        }
        (coords, rem)
    }
}

// ---------------------------------------------------------------------------
// Division-free characteristic polynomial (Berkowitz) over a commutative
// ring presented through closures on a context type.
// ---------------------------------------------------------------------------

pub trait CommutativeRing {
    type El: Clone;
    fn zero(&self) -> Self::El;
    fn one(&self) -> Self::El;
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn sub(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn neg(&self, a: &Self::El) -> Self::El;
    fn is_zero(&self, a: &Self::El) -> bool;
}

/// Coefficients of det(lambda I - A), ascending in lambda, length n+1, monic.
pub fn berkowitz_charpoly<R: CommutativeRing>(ring: &R, a: &[Vec<R::El>]) -> Vec<R::El> {
    let n = a.len();
    if n == 0 {
        return vec![ring.one()];
    }
    // c holds coefficients descending: [lambda^r, .., const] for the r x r
    // leading principal submatrix.
    let mut c: Vec<R::El> = vec![ring.one(), ring.neg(&a[0][0])];
    for r in 2..=n {
        // new principal block: row R = a[r-1][0..r-1], col S = a[0..r-1][r-1]
        let arr = &a[r - 1][r - 1];
        // t_k sequence: t0 = 1, t1 = -a_rr, t_{k} = -(R A^{k-2} S)
        let mut t: Vec<R::El> = Vec::with_capacity(r + 1);
        t.push(ring.one());
        t.push(ring.neg(arr));
        let mut vec_s: Vec<R::El> = (0..r - 1).map(|i| a[i][r - 1].clone()).collect();
        for k in 2..=r {
            // R . vec_s
            let mut dot = ring.zero();
            for i in 0..r - 1 {
                dot = ring.add(&dot, &ring.mul(&a[r - 1][i], &vec_s[i]));
            }
            t.push(ring.neg(&dot));
            if k < r {
                // vec_s <- A_{r-1} vec_s
                let mut nv = vec![ring.zero(); r - 1];
                for i in 0..r - 1 {
                    for j in 0..r - 1 {
                        if ring.is_zero(&a[i][j]) {
                            continue;
                        }
                        nv[i] = ring.add(&nv[i], &ring.mul(&a[i][j], &vec_s[j]));
                    }
                }
                vec_s = nv;
            }
        }
        // c_new (length r+1) = Toeplitz(t) * c
        let mut c_new = vec![ring.zero(); r + 1];
        for (i, ci) in c.iter().enumerate() {
            if ring.is_zero(ci) {
                continue;
            }
            for (k, tk) in t.iter().enumerate() {
                if i + k <= r {
                    c_new[i + k] = ring.add(&c_new[i + k], &ring.mul(tk, ci));
                }
            }
        }
        c = c_new;
    }
    // Convert descending -> ascending.
    c.reverse();
    c
}

/// Adjugate coefficient matrices of (lambda I - A): adj = sum lambda^k B_k,
/// with B_{n-1} = I and B_{k-1} = A B_k + c_k I for the monic charpoly
/// lambda^n + c_{n-1} lambda^{n-1} + ... + c_0.
pub fn adjugate_series<R: CommutativeRing>(
    ring: &R,
    a: &[Vec<R::El>],
    charpoly_asc: &[R::El],
) -> Vec<Vec<Vec<R::El>>> {
    let n = a.len();
    let ident: Vec<Vec<R::El>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { ring.one() } else { ring.zero() })
                .collect()
        })
        .collect();
    let mut bs = vec![ident.clone(); n];
    // bs[n-1] = I; bs[k-1] = A*bs[k] + c_k*I
    for k in (1..n).rev() {
        let mut m = mat_mul_ring(ring, a, &bs[k]);
        for i in 0..n {
            m[i][i] = ring.add(&m[i][i], &charpoly_asc[k]);
        }
        bs[k - 1] = m;
    }
    bs
}

pub fn mat_mul_ring<R: CommutativeRing>(
    ring: &R,
    a: &[Vec<R::El>],
    b: &[Vec<R::El>],
) -> Vec<Vec<R::El>> {
    let n = a.len();
    let k = b.len();
    let m = if k > 0 { b[0].len() } else { 0 };
    let mut out = vec![vec![ring.zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if ring.is_zero(&a[i][l]) {
                continue;
            }
            for j in 0..m {
                out[i][j] = ring.add(&out[i][j], &ring.mul(&a[i][l], &b[l][j]));
            }
        }
    }
    out
}

pub fn mat_vec_ring<R: CommutativeRing>(
    ring: &R,
    a: &[Vec<R::El>],
    v: &[R::El],
) -> Vec<R::El> {
    a.iter()
        .map(|row| {
            let mut acc = ring.zero();
            for (x, y) in row.iter().zip(v) {
                if ring.is_zero(x) || ring.is_zero(y) {
                    continue;
                }
                acc = ring.add(&acc, &ring.mul(x, y));
            }
            acc
        })
        .collect()
}

/// Z_q[x] as a commutative ring.
pub struct ZqPolyRing<'a> {
    pub ctx: &'a PadicContext,
}

impl<'a> CommutativeRing for ZqPolyRing<'a> {
    type El = ZqPoly;
    fn zero(&self) -> ZqPoly {
        ZqPoly::zero()
    }
    fn one(&self) -> ZqPoly {
        ZqPoly::one(self.ctx)
    }
    fn add(&self, a: &ZqPoly, b: &ZqPoly) -> ZqPoly {
        a.add(b, self.ctx)
    }
    fn sub(&self, a: &ZqPoly, b: &ZqPoly) -> ZqPoly {
        a.sub(b, self.ctx)
    }
    fn mul(&self, a: &ZqPoly, b: &ZqPoly) -> ZqPoly {
        a.mul(b, self.ctx)
    }
    fn neg(&self, a: &ZqPoly) -> ZqPoly {
        a.neg(self.ctx)
    }
    fn is_zero(&self, a: &ZqPoly) -> bool {
        a.is_zero()
    }
}

/// Z_q[x]/(modulus) as a commutative ring (modulus monic and integral).
pub struct ModPolyRing<'a> {
    pub ctx: &'a PadicContext,
    pub modulus: &'a ZqPoly,
}

impl<'a> CommutativeRing for ModPolyRing<'a> {
    type El = ZqPoly;
    fn zero(&self) -> ZqPoly {
        ZqPoly::zero()
    }
    fn one(&self) -> ZqPoly {
        ZqPoly::one(self.ctx)
    }
    fn add(&self, a: &ZqPoly, b: &ZqPoly) -> ZqPoly {
        a.add(b, self.ctx)
    }
    fn sub(&self, a: &ZqPoly, b: &ZqPoly) -> ZqPoly {
        a.sub(b, self.ctx)
    }
    fn mul(&self, a: &ZqPoly, b: &ZqPoly) -> ZqPoly {
        a.mul(b, self.ctx)
            .rem(self.modulus, self.ctx)
            .expect("monic modulus")
    }
    fn neg(&self, a: &ZqPoly) -> ZqPoly {
        a.neg(self.ctx)
    }
    fn is_zero(&self, a: &ZqPoly) -> bool {
        a.is_zero()
    }
}

/// Q_q as a commutative ring of (mantissa, shift) scalars.
pub struct QqRing<'a> {
    pub ctx: &'a PadicContext,
}

impl<'a> CommutativeRing for QqRing<'a> {
    type El = QqScalar;
    fn zero(&self) -> QqScalar {
        self.ctx.qq_zero()
    }
    fn one(&self) -> QqScalar {
        self.ctx.qq_one()
    }
    fn add(&self, a: &QqScalar, b: &QqScalar) -> QqScalar {
        self.ctx.qq_add(a, b)
    }
    fn sub(&self, a: &QqScalar, b: &QqScalar) -> QqScalar {
        self.ctx.qq_sub(a, b)
    }
    fn mul(&self, a: &QqScalar, b: &QqScalar) -> QqScalar {
        self.ctx.qq_mul(a, b)
    }
    fn neg(&self, a: &QqScalar) -> QqScalar {
        self.ctx.qq_neg(a)
    }
    fn is_zero(&self, a: &QqScalar) -> bool {
        self.ctx.qq_is_zero(a)
    }
}

// ---------------------------------------------------------------------------
// Polynomials over Q_q (coefficients carry shifts); used for arithmetic
// modulo r where inverses introduce denominators.
// ---------------------------------------------------------------------------

pub type QqPoly = Vec<QqScalar>;

pub fn qq_poly_trim(ctx: &PadicContext, a: &mut QqPoly) {
    while a.last().map_or(false, |c| ctx.qq_is_zero(c)) {
        a.pop();
    }
}

pub fn qq_poly_from_zq(p: &ZqPoly) -> QqPoly {
    p.coeffs.iter().cloned().map(QqScalar::from_zq).collect()
}

/// Lowest coefficient valuation; VAL_INF for zero.
pub fn qq_poly_min_val(ctx: &PadicContext, a: &QqPoly) -> i64 {
    let mut v = VAL_INF;
    for c in a {
        v = v.min(ctx.qq_val(c));
    }
    v
}

pub fn qq_poly_add(ctx: &PadicContext, a: &QqPoly, b: &QqPoly) -> QqPoly {
    let len = a.len().max(b.len());
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        let x = a.get(i).cloned().unwrap_or_else(|| ctx.qq_zero());
        let y = b.get(i).cloned().unwrap_or_else(|| ctx.qq_zero());
        out.push(ctx.qq_add(&x, &y));
    }
    qq_poly_trim(ctx, &mut out);
    out
}

pub fn qq_poly_scale(ctx: &PadicContext, a: &QqPoly, c: &QqScalar) -> QqPoly {
    let mut out: QqPoly = a.iter().map(|x| ctx.qq_mul(x, c)).collect();
    qq_poly_trim(ctx, &mut out);
    out
}

pub fn qq_poly_mul(ctx: &PadicContext, a: &QqPoly, b: &QqPoly) -> QqPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![ctx.qq_zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if ctx.qq_is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            let t = ctx.qq_mul(x, y);
            out[i + j] = ctx.qq_add(&out[i + j], &t);
        }
    }
    qq_poly_trim(ctx, &mut out);
    out
}

/// Remainder of a modulo the monic integral polynomial m.
pub fn qq_poly_rem(ctx: &PadicContext, a: &QqPoly, m: &ZqPoly) -> QqPoly {
    let dm = m.degree().expect("nonzero modulus");
    let mut r = a.to_vec();
    qq_poly_trim(ctx, &mut r);
    while r.len() > dm {
        let lead = r.last().unwrap().clone();
        let k = r.len() - 1 - dm;
        if !ctx.qq_is_zero(&lead) {
            for i in 0..dm {
                let t = ctx.qq_mul(&lead, &QqScalar::from_zq(m.coeffs[i].clone()));
                r[k + i] = ctx.qq_sub(&r[k + i], &t);
            }
        }
        r.pop();
        qq_poly_trim(ctx, &mut r);
    }
    r
}

pub fn qq_poly_mul_mod(ctx: &PadicContext, a: &QqPoly, b: &QqPoly, m: &ZqPoly) -> QqPoly {
    qq_poly_rem(ctx, &qq_poly_mul(ctx, a, b), m)
}

/// Inverse of `a` modulo the monic integral polynomial `m`, by extended
/// Euclid with valuation-tracked leading-coefficient divisions, verified and
/// falling back to a dense solve.  Returns (inverse, loss).
pub fn qq_poly_invert_mod(
    ctx: &PadicContext,
    a: &QqPoly,
    m: &ZqPoly,
) -> Result<(QqPoly, u32), PadicError> {
    let dm = m.degree().expect("nonzero modulus");
    if let Some(res) = euclid_invert(ctx, a, m) {
        // verify a * res == 1 mod m
        let prod = qq_poly_mul_mod(ctx, a, &res.0, m);
        if is_one_to_precision(ctx, &prod) {
            let loss = (-qq_poly_min_val(ctx, &res.0)).max(0) as u32;
            return Ok((res.0, loss));
        }
    }
    // Dense fallback: multiplication-by-a matrix in the monomial basis.
    let mut cols: Vec<QqPoly> = Vec::with_capacity(dm);
    let mut xk: QqPoly = vec![ctx.qq_one()];
    for _ in 0..dm {
        cols.push(qq_poly_mul_mod(ctx, a, &xk, m));
        // xk *= x
        xk.insert(0, ctx.qq_zero());
        xk = qq_poly_rem(ctx, &xk, m);
    }
    let mat: QqMat = (0..dm)
        .map(|i| {
            (0..dm)
                .map(|j| cols[j].get(i).cloned().unwrap_or_else(|| ctx.qq_zero()))
                .collect()
        })
        .collect();
    let mut rhs = vec![ctx.qq_zero(); dm];
    rhs[0] = ctx.qq_one();
    let (sol, _pivot_loss) = qq_solve(ctx, &mat, &rhs)?;
    let mut inv = sol;
    qq_poly_trim(ctx, &mut inv);
    let loss = (-qq_poly_min_val(ctx, &inv)).max(0) as u32;
    Ok((inv, loss))
}

fn is_one_to_precision(ctx: &PadicContext, a: &QqPoly) -> bool {
    if a.is_empty() {
        return false;
    }
    for (i, c) in a.iter().enumerate() {
        if i == 0 {
            let diff = ctx.qq_sub(c, &ctx.qq_one());
            // tolerate junk below half the working precision
            if ctx.qq_val(&diff) < (ctx.precision() as i64) / 2 {
                return false;
            }
        } else if ctx.qq_val(c) < (ctx.precision() as i64) / 2 {
            return false;
        }
    }
    true
}

fn euclid_invert(ctx: &PadicContext, a: &QqPoly, m: &ZqPoly) -> Option<(QqPoly, u32)> {
    let mut r0: QqPoly = qq_poly_from_zq(m);
    let mut r1: QqPoly = qq_poly_rem(ctx, a, m);
    let mut s0: QqPoly = vec![];
    let mut s1: QqPoly = vec![ctx.qq_one()];
    let mut loss = 0u32;
    while !r1.is_empty() {
        let lc = r1.last().unwrap().clone();
        let v = ctx.qq_val(&lc);
        if v >= ctx.precision() as i64 {
            return None;
        }
        if v > 0 {
            loss += v as u32;
        }
        let lc_inv = ctx.qq_inv(&lc).ok()?;
        // divide r0 by r1
        let mut r = r0.clone();
        qq_poly_trim(ctx, &mut r);
        let mut q: QqPoly = vec![ctx.qq_zero(); r.len().saturating_sub(r1.len()) + 1];
        while r.len() >= r1.len() && !r.is_empty() {
            let k = r.len() - r1.len();
            let coef = ctx.qq_mul(r.last().unwrap(), &lc_inv);
            q[k] = ctx.qq_add(&q[k], &coef);
            for i in 0..r1.len() {
                let t = ctx.qq_mul(&coef, &r1[i]);
                r[k + i] = ctx.qq_sub(&r[k + i], &t);
            }
            // force the leading slot to drop even if junk digits remain
            r.pop();
            qq_poly_trim(ctx, &mut r);
        }
        qq_poly_trim(ctx, &mut q);
        let qs1 = qq_poly_mul(ctx, &q, &s1);
        let mut s = s0.clone();
        s.resize(s.len().max(qs1.len()), ctx.qq_zero());
        for (i, c) in qs1.iter().enumerate() {
            s[i] = ctx.qq_sub(&s[i], c);
        }
        qq_poly_trim(ctx, &mut s);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    // r0 should be a nonzero constant
    if r0.len() != 1 {
        return None;
    }
    let c_inv = ctx.qq_inv(&r0[0]).ok()?;
    let v = ctx.qq_val(&r0[0]);
    if v > 0 {
        loss += v as u32;
    }
    Some((qq_poly_scale(ctx, &s0, &c_inv), loss))
}

// ---------------------------------------------------------------------------
// Generic field linear algebra, shared by Q_q and the Hensel-factor fields
// K_f = Q_q[x]/(f).
// ---------------------------------------------------------------------------

pub trait FieldOps: CommutativeRing {
    /// p-adic valuation (VAL_INF when no digits are known).
    fn val(&self, a: &Self::El) -> i64;
    fn inv(&self, a: &Self::El) -> Result<Self::El, PadicError>;
    /// Multiply by p^k (k may be negative).
    fn shift_p(&self, a: &Self::El, k: i64) -> Self::El;
    /// Embed a Q_q scalar.
    fn from_scalar(&self, a: &QqScalar) -> Self::El;
}

impl<'a> FieldOps for QqRing<'a> {
    fn val(&self, a: &QqScalar) -> i64 {
        self.ctx.qq_val(a)
    }
    fn inv(&self, a: &QqScalar) -> Result<QqScalar, PadicError> {
        self.ctx.qq_inv(a)
    }
    fn shift_p(&self, a: &QqScalar, k: i64) -> QqScalar {
        QqScalar {
            m: a.m.clone(),
            shift: a.shift + k,
        }
    }
    fn from_scalar(&self, a: &QqScalar) -> QqScalar {
        a.clone()
    }
}

/// The unramified field K_f = Q_q[x]/(f), f monic irreducible mod p.
/// The monomial basis is an integral basis, so the valuation is the minimum
/// coefficient valuation.
pub struct KfRing<'a> {
    pub ctx: &'a PadicContext,
    pub f: &'a ZqPoly,
}

impl<'a> CommutativeRing for KfRing<'a> {
    type El = QqPoly;
    fn zero(&self) -> QqPoly {
        vec![]
    }
    fn one(&self) -> QqPoly {
        vec![self.ctx.qq_one()]
    }
    fn add(&self, a: &QqPoly, b: &QqPoly) -> QqPoly {
        qq_poly_add(self.ctx, a, b)
    }
    fn sub(&self, a: &QqPoly, b: &QqPoly) -> QqPoly {
        let nb: QqPoly = b.iter().map(|c| self.ctx.qq_neg(c)).collect();
        qq_poly_add(self.ctx, a, &nb)
    }
    fn mul(&self, a: &QqPoly, b: &QqPoly) -> QqPoly {
        qq_poly_mul_mod(self.ctx, a, b, self.f)
    }
    fn neg(&self, a: &QqPoly) -> QqPoly {
        a.iter().map(|c| self.ctx.qq_neg(c)).collect()
    }
    fn is_zero(&self, a: &QqPoly) -> bool {
        a.iter().all(|c| self.ctx.qq_is_zero(c))
    }
}

impl<'a> FieldOps for KfRing<'a> {
    fn val(&self, a: &QqPoly) -> i64 {
        qq_poly_min_val(self.ctx, a)
    }
    fn inv(&self, a: &QqPoly) -> Result<QqPoly, PadicError> {
        let (inv, _loss) = qq_poly_invert_mod(self.ctx, a, self.f)?;
        Ok(inv)
    }
    fn shift_p(&self, a: &QqPoly, k: i64) -> QqPoly {
        a.iter()
            .map(|c| QqScalar {
                m: c.m.clone(),
                shift: c.shift + k,
            })
            .collect()
    }
    fn from_scalar(&self, a: &QqScalar) -> QqPoly {
        if self.ctx.qq_is_zero(a) {
            vec![]
        } else {
            vec![a.clone()]
        }
    }
}

/// Right kernel over a field.
pub fn field_kernel<F: FieldOps>(fld: &F, m: &[Vec<F::El>]) -> Vec<Vec<F::El>> {
    if m.is_empty() {
        return vec![];
    }
    let rows = m.len();
    let cols = m[0].len();
    let mut a: Vec<Vec<F::El>> = m.to_vec();
    let mut col_perm: Vec<usize> = (0..cols).collect();
    let mut rank = 0usize;
    for step in 0..rows.min(cols) {
        let mut best: Option<(i64, usize, usize)> = None;
        for i in rank..rows {
            for j in rank..cols {
                let v = fld.val(&a[i][j]);
                if v < VAL_INF && best.map_or(true, |(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                }
            }
        }
        let (_, pi, pj) = match best {
            Some(t) => t,
            None => break,
        };
        a.swap(step, pi);
        for row in a.iter_mut() {
            row.swap(step, pj);
        }
        col_perm.swap(step, pj);
        let pinv = fld.inv(&a[step][step]).expect("finite valuation pivot");
        for j in step..cols {
            a[step][j] = fld.mul(&a[step][j], &pinv);
        }
        for i in 0..rows {
            if i == step || fld.is_zero(&a[i][step]) {
                continue;
            }
            let factor = a[i][step].clone();
            for j in step..cols {
                let t = fld.mul(&factor, &a[step][j]);
                a[i][j] = fld.sub(&a[i][j], &t);
            }
        }
        rank += 1;
    }
    let mut basis = vec![];
    for free in rank..cols {
        let mut v = vec![fld.zero(); cols];
        v[col_perm[free]] = fld.one();
        for i in 0..rank {
            v[col_perm[i]] = fld.neg(&a[i][free]);
        }
        basis.push(v);
    }
    basis
}

pub fn field_rank<F: FieldOps>(fld: &F, m: &[Vec<F::El>]) -> usize {
    if m.is_empty() {
        return 0;
    }
    let cols = m[0].len();
    cols - field_kernel(fld, m).len()
}

/// Saturated lattice echelon over the ring of integers of the field: row ops
/// plus dividing a row by its p-content.  Output rows have unit pivots.
pub struct FieldEchelon<E> {
    pub rows: Vec<Vec<E>>,
    pub pivot_cols: Vec<usize>,
    pub loss: u32,
}

pub fn field_lattice_echelon<F: FieldOps>(fld: &F, gens: &[Vec<F::El>]) -> FieldEchelon<F::El> {
    let mut work: Vec<Vec<F::El>> = gens.to_vec();
    let mut out_rows: Vec<Vec<F::El>> = vec![];
    let mut pivot_cols: Vec<usize> = vec![];
    let mut loss = 0u32;
    loop {
        let mut next_work = vec![];
        for mut row in work {
            let mut minv = VAL_INF;
            for x in &row {
                minv = minv.min(fld.val(x));
            }
            if minv == VAL_INF {
                continue;
            }
            if minv != 0 {
                for x in row.iter_mut() {
                    *x = fld.shift_p(x, -minv);
                }
                if minv > 0 {
                    loss += minv as u32;
                }
            }
            next_work.push(row);
        }
        if next_work.is_empty() {
            break;
        }
        let mut row = next_work.remove(0);
        let pj = (0..row.len())
            .find(|&j| fld.val(&row[j]) == 0)
            .expect("primitive row has a unit entry");
        let pinv = fld.inv(&row[pj]).unwrap();
        for x in row.iter_mut() {
            *x = fld.mul(x, &pinv);
        }
        for other in next_work.iter_mut().chain(out_rows.iter_mut()) {
            if fld.is_zero(&other[pj]) {
                continue;
            }
            let factor = other[pj].clone();
            for j in 0..other.len() {
                let t = fld.mul(&factor, &row[j]);
                other[j] = fld.sub(&other[j], &t);
            }
        }
        out_rows.push(row);
        pivot_cols.push(pj);
        work = next_work;
    }
    FieldEchelon {
        rows: out_rows,
        pivot_cols,
        loss,
    }
}

impl<E: Clone> FieldEchelon<E> {
    pub fn reduce<F: FieldOps<El = E>>(&self, fld: &F, v: &[E]) -> (Vec<E>, Vec<E>) {
        let mut rem = v.to_vec();
        let mut coords = Vec::with_capacity(self.rows.len());
        for (row, &pj) in self.rows.iter().zip(&self.pivot_cols) {
            let c = rem[pj].clone();
            coords.push(c.clone());
            if fld.is_zero(&c) {
                continue;
            }
            for j in 0..rem.len() {
                let t = fld.mul(&c, &row[j]);
                rem[j] = fld.sub(&rem[j], &t);
            }
        }
        (coords, rem)
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
    fn solve_identity_and_diagonal() {
        let c = ctx(7, 6);
        let id = qq_identity(&c, 3);
        let b: Vec<QqScalar> = (1..=3).map(|i| QqScalar::from_zq(c.from_u64(i))).collect();
        let (x, loss) = qq_solve(&c, &id, &b).unwrap();
        assert_eq!(x, b);
        assert_eq!(loss, 0);

        let mut d = qq_identity(&c, 3);
        d[1][1] = QqScalar::from_zq(c.from_u64(2));
        let (x, _) = qq_solve(&c, &d, &b).unwrap();
        assert_eq!(ctx_val(&c, &x[1]), 0);
        let two = QqScalar::from_zq(c.from_u64(2));
        assert!(c.qq_is_zero(&c.qq_sub(&c.qq_mul(&two, &x[1]), &b[1])));
    }

    fn ctx_val(c: &PadicContext, x: &QqScalar) -> i64 {
        c.qq_val(x)
    }

    #[test]
    fn solve_reports_loss_and_residual_holds() {
        // matrix with determinant divisible by p
        let c = ctx(5, 8);
        let m: QqMat = vec![
            vec![
                QqScalar::from_zq(c.from_u64(5)),
                QqScalar::from_zq(c.from_u64(1)),
            ],
            vec![
                QqScalar::from_zq(c.from_u64(0)),
                QqScalar::from_zq(c.from_u64(3)),
            ],
        ];
        let b = vec![
            QqScalar::from_zq(c.from_u64(7)),
            QqScalar::from_zq(c.from_u64(2)),
        ];
        let (x, loss) = qq_solve(&c, &m, &b).unwrap();
        assert_eq!(loss, 1);
        // residual M x - b vanishes where determined
        let r = qq_mat_vec(&c, &m, &x);
        for (ri, bi) in r.iter().zip(&b) {
            let d = c.qq_sub(ri, bi);
            assert!(c.qq_val(&d) >= 7, "residual too large: {:?}", d);
        }
    }

    #[test]
    fn kernel_of_rank_one() {
        let c = ctx(7, 5);
        // (1 2; 2 4): kernel spanned by (2, -1) up to scaling
        let m: QqMat = vec![
            vec![
                QqScalar::from_zq(c.from_u64(1)),
                QqScalar::from_zq(c.from_u64(2)),
            ],
            vec![
                QqScalar::from_zq(c.from_u64(2)),
                QqScalar::from_zq(c.from_u64(4)),
            ],
        ];
        let k = qq_kernel(&c, &m);
        assert_eq!(k.len(), 1);
        let v = &k[0];
        let lhs = c.qq_add(&v[0], &c.qq_mul(&QqScalar::from_zq(c.from_u64(2)), &v[1]));
        assert!(c.qq_is_zero(&lhs));
    }

    #[test]
    fn berkowitz_matches_diag() {
        let c = ctx(11, 5);
        let ring = QqRing { ctx: &c };
        let a: Vec<Vec<QqScalar>> = vec![
            vec![QqScalar::from_zq(c.from_u64(2)), c.qq_zero()],
            vec![c.qq_zero(), QqScalar::from_zq(c.from_u64(3))],
        ];
        let cp = berkowitz_charpoly(&ring, &a);
        // (x-2)(x-3) = x^2 - 5x + 6
        assert_eq!(cp.len(), 3);
        assert!(c.qq_is_zero(&c.qq_sub(&cp[0], &QqScalar::from_zq(c.from_u64(6)))));
        assert!(c.qq_is_zero(&c.qq_add(&cp[1], &QqScalar::from_zq(c.from_u64(5)))));
        assert!(c.qq_is_zero(&c.qq_sub(&cp[2], &c.qq_one())));
    }

    #[test]
    fn poly_inverse_mod() {
        let c = ctx(7, 6);
        let m = ZqPoly::from_i64_coeffs(&c, &[1, 0, 1]); // x^2+1, irreducible mod 7
        let a: QqPoly = qq_poly_from_zq(&ZqPoly::from_i64_coeffs(&c, &[2, 3]));
        let (inv, loss) = qq_poly_invert_mod(&c, &a, &m).unwrap();
        assert_eq!(loss, 0);
        let prod = qq_poly_mul_mod(&c, &a, &inv, &m);
        assert_eq!(prod.len(), 1);
        assert!(c.qq_is_zero(&c.qq_sub(&prod[0], &c.qq_one())));
    }

    #[test]
    fn saturated_echelon_saturates() {
        let c = ctx(5, 6);
        // rows (5, 0), (0, 1): saturation divides the first row by 5
        let rows = vec![
            vec![
                QqScalar::from_zq(c.from_u64(5)),
                QqScalar::from_zq(c.from_u64(0)),
            ],
            vec![
                QqScalar::from_zq(c.from_u64(0)),
                QqScalar::from_zq(c.from_u64(1)),
            ],
        ];
        let ech = lattice_saturated_echelon(&c, &rows);
        assert_eq!(ech.rows.len(), 2);
        assert_eq!(ech.loss, 1);
        for row in &ech.rows {
            assert!(row.iter().any(|x| c.qq_val(x) == 0));
        }
    }
}
