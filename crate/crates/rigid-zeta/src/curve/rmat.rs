//! Matrix entries of the form x^s * P(x) / r(x)^k, the common shape of the
//! integral-basis matrices W^0, W^inf and the connection matrices.

use crate::padic::{LaurentPoly, PadicContext, ZqPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct REntry {
    pub num: LaurentPoly,
    pub rpow: u32,
}

impl REntry {
    pub fn zero() -> Self {
        REntry {
            num: LaurentPoly::zero(),
            rpow: 0,
        }
    }

    pub fn one(ctx: &PadicContext) -> Self {
        REntry {
            num: LaurentPoly::from_poly(ZqPoly::one(ctx)),
            rpow: 0,
        }
    }

    pub fn from_poly(p: ZqPoly) -> Self {
        REntry {
            num: LaurentPoly::from_poly(p),
            rpow: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Cancel whole powers of r that divide the numerator polynomial.
    pub fn normalize(&mut self, r: &ZqPoly, ctx: &PadicContext) {
        self.num.normalize(ctx);
        if self.num.is_zero() {
            self.rpow = 0;
            return;
        }
        while self.rpow > 0 {
            match self.num.poly.exact_div(r, ctx) {
                Ok(q) => {
                    self.num.poly = q;
                    self.rpow -= 1;
                }
                Err(_) => break,
            }
        }
        self.num.normalize(ctx);
    }

    pub fn add(&self, other: &Self, r: &ZqPoly, ctx: &PadicContext) -> Self {
        let k = self.rpow.max(other.rpow);
        let ra = r.pow((k - self.rpow) as usize, ctx);
        let rb = r.pow((k - other.rpow) as usize, ctx);
        let a = self.num.mul(&LaurentPoly::from_poly(ra), ctx);
        let b = other.num.mul(&LaurentPoly::from_poly(rb), ctx);
        let mut out = REntry {
            num: a.add(&b, ctx),
            rpow: k,
        };
        out.normalize(r, ctx);
        out
    }

    pub fn sub(&self, other: &Self, r: &ZqPoly, ctx: &PadicContext) -> Self {
        self.add(&other.neg(ctx), r, ctx)
    }

    pub fn neg(&self, ctx: &PadicContext) -> Self {
        REntry {
            num: self.num.neg(ctx),
            rpow: self.rpow,
        }
    }

    pub fn mul(&self, other: &Self, r: &ZqPoly, ctx: &PadicContext) -> Self {
        let mut out = REntry {
            num: self.num.mul(&other.num, ctx),
            rpow: self.rpow + other.rpow,
        };
        out.normalize(r, ctx);
        out
    }

    /// d/dx of num / r^k = (num' r - k r' num) / r^{k+1}.
    pub fn derivative(&self, r: &ZqPoly, rprime: &ZqPoly, ctx: &PadicContext) -> Self {
        if self.num.is_zero() {
            return REntry::zero();
        }
        if self.rpow == 0 {
            return REntry {
                num: self.num.derivative(ctx),
                rpow: 0,
            };
        }
        let dnum = self.num.derivative(ctx);
        let t1 = dnum.mul(&LaurentPoly::from_poly(r.clone()), ctx);
        let kk = ctx.from_u64(self.rpow as u64);
        let t2 = self
            .num
            .mul(&LaurentPoly::from_poly(rprime.scale(&kk, ctx)), ctx);
        let mut out = REntry {
            num: t1.sub(&t2, ctx),
            rpow: self.rpow + 1,
        };
        out.normalize(r, ctx);
        out
    }

    /// Order of vanishing at infinity (negative of x-degree, with r-poles
    /// counted as deg(r) each).
    pub fn ord_inf(&self, rdeg: i64) -> i64 {
        if self.num.is_zero() {
            return crate::padic::linalg::VAL_INF;
        }
        self.num.ord_inf() + self.rpow as i64 * rdeg
    }

    /// Order of vanishing at x = 0 through the x-shift, with r-poles counted
    /// as ord_0(r) each.
    pub fn ord_zero(&self, r_ord0: i64, ctx: &PadicContext) -> i64 {
        if self.num.is_zero() {
            return crate::padic::linalg::VAL_INF;
        }
        self.num.ord_zero(ctx) - self.rpow as i64 * r_ord0
    }

    /// min over finite points of the pole/vanishing order: min(0, -rpow + the
    /// number of whole r-factor multiplicities left in the numerator per
    /// Hensel factor).
    pub fn ord_ne_inf(&self, rfactors: &[ZqPoly], ctx: &PadicContext) -> i64 {
        if self.num.is_zero() {
            return crate::padic::linalg::VAL_INF;
        }
        if self.rpow == 0 {
            return 0;
        }
        let mut min_mult = u32::MAX;
        for f in rfactors {
            let mut m = 0u32;
            let mut cur = self.num.poly.clone();
            while m < self.rpow {
                match cur.exact_div(f, ctx) {
                    Ok(q) => {
                        cur = q;
                        m += 1;
                    }
                    Err(_) => break,
                }
            }
            min_mult = min_mult.min(m);
            if min_mult == 0 {
                break;
            }
        }
        (min_mult as i64 - self.rpow as i64).min(0)
    }
}

pub type RMat = Vec<Vec<REntry>>;

pub fn rmat_identity(n: usize, ctx: &PadicContext) -> RMat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { REntry::one(ctx) } else { REntry::zero() })
                .collect()
        })
        .collect()
}

pub fn rmat_mul(a: &RMat, b: &RMat, r: &ZqPoly, ctx: &PadicContext) -> RMat {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    let mut out = vec![vec![REntry::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                if b[l][j].is_zero() {
                    continue;
                }
                let t = a[i][l].mul(&b[l][j], r, ctx);
                out[i][j] = out[i][j].add(&t, r, ctx);
            }
        }
    }
    out
}

pub fn rmat_add(a: &RMat, b: &RMat, r: &ZqPoly, ctx: &PadicContext) -> RMat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| {
            ra.iter()
                .zip(rb)
                .map(|(x, y)| x.add(y, r, ctx))
                .collect()
        })
        .collect()
}

pub fn rmat_derivative(a: &RMat, r: &ZqPoly, rprime: &ZqPoly, ctx: &PadicContext) -> RMat {
    a.iter()
        .map(|row| row.iter().map(|e| e.derivative(r, rprime, ctx)).collect())
        .collect()
}

/// Matrix-level minimum of `ord_inf` / `ord_zero` / `ord_ne_inf`.
pub fn rmat_ord_inf(a: &RMat, rdeg: i64) -> i64 {
    let mut v = crate::padic::linalg::VAL_INF;
    for row in a {
        for e in row {
            v = v.min(e.ord_inf(rdeg));
        }
    }
    v
}

pub fn rmat_ord_zero(a: &RMat, r_ord0: i64, ctx: &PadicContext) -> i64 {
    let mut v = crate::padic::linalg::VAL_INF;
    for row in a {
        for e in row {
            v = v.min(e.ord_zero(r_ord0, ctx));
        }
    }
    v
}

pub fn rmat_ord_ne_inf(a: &RMat, rfactors: &[ZqPoly], ctx: &PadicContext) -> i64 {
    let mut v = 0i64;
    for row in a {
        for e in row {
            if !e.is_zero() {
                v = v.min(e.ord_ne_inf(rfactors, ctx));
            }
        }
    }
    v
}

/// Max r-pole order over the entries (after normalization).
pub fn rmat_max_rpow(a: &RMat) -> u32 {
    a.iter()
        .flat_map(|row| row.iter())
        .filter(|e| !e.is_zero())
        .map(|e| e.rpow)
        .max()
        .unwrap_or(0)
}
