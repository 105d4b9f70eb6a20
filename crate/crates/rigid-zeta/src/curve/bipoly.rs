//! Bivariate polynomials Q(x, y) monic in y, and elements of the quotient
//! A = Z_q[x, y]/(Q) in y-power coordinates.

use crate::padic::{PadicContext, ZqPoly};

/// sum ycoeffs[i](x) * y^i; monic in y means the top coefficient is 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiPoly {
    pub ycoeffs: Vec<ZqPoly>,
}

impl BiPoly {
    pub fn deg_y(&self) -> usize {
        self.ycoeffs.len().saturating_sub(1)
    }

    pub fn deg_x(&self) -> usize {
        self.ycoeffs
            .iter()
            .filter_map(|c| c.degree())
            .max()
            .unwrap_or(0)
    }

    pub fn is_monic_in_y(&self, ctx: &PadicContext) -> bool {
        self.ycoeffs
            .last()
            .map_or(false, |c| c.degree() == Some(0) && c.coeffs[0] == ctx.one())
    }

    /// Partial derivative in y.
    pub fn d_dy(&self, ctx: &PadicContext) -> BiPoly {
        if self.ycoeffs.len() <= 1 {
            return BiPoly {
                ycoeffs: vec![ZqPoly::zero()],
            };
        }
        let mut ycoeffs = Vec::with_capacity(self.ycoeffs.len() - 1);
        for (i, c) in self.ycoeffs.iter().enumerate().skip(1) {
            let k = ctx.from_u64(i as u64);
            ycoeffs.push(c.scale(&k, ctx));
        }
        BiPoly { ycoeffs }
    }

    /// Partial derivative in x.
    pub fn d_dx(&self, ctx: &PadicContext) -> BiPoly {
        BiPoly {
            ycoeffs: self.ycoeffs.iter().map(|c| c.derivative(ctx)).collect(),
        }
    }

    /// Coefficients with sigma applied and x replaced by x^k.
    pub fn frob_transform(&self, k: usize, ctx: &PadicContext) -> BiPoly {
        BiPoly {
            ycoeffs: self
                .ycoeffs
                .iter()
                .map(|c| c.map_sigma(ctx).subst_x_pow(k, ctx))
                .collect(),
        }
    }

    pub fn truncate_to(&self, ctx: &PadicContext) -> BiPoly {
        BiPoly {
            ycoeffs: self.ycoeffs.iter().map(|c| c.truncate_to(ctx)).collect(),
        }
    }
}

/// Element of A = Z_q[x,y]/(Q) as y-power coordinates of length deg_y(Q).
pub type AVec = Vec<ZqPoly>;

pub fn avec_zero(dx: usize) -> AVec {
    vec![ZqPoly::zero(); dx]
}

pub fn avec_add(a: &AVec, b: &AVec, ctx: &PadicContext) -> AVec {
    a.iter().zip(b).map(|(x, y)| x.add(y, ctx)).collect()
}

pub fn avec_sub(a: &AVec, b: &AVec, ctx: &PadicContext) -> AVec {
    a.iter().zip(b).map(|(x, y)| x.sub(y, ctx)).collect()
}

pub fn avec_scale(a: &AVec, c: &ZqPoly, ctx: &PadicContext) -> AVec {
    a.iter().map(|x| x.mul(c, ctx)).collect()
}

/// Multiply in A: convolve in y, then fold y^k for k >= d with the monic
/// relation from Q.
pub fn avec_mul(a: &AVec, b: &AVec, q: &BiPoly, ctx: &PadicContext) -> AVec {
    let d = q.deg_y();
    let mut conv = vec![ZqPoly::zero(); 2 * d - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            conv[i + j] = conv[i + j].add(&x.mul(y, ctx), ctx);
        }
    }
    fold_y(&mut conv, q, ctx);
    conv.truncate(d);
    conv
}

/// In-place reduction of a y-coefficient vector by the monic Q.
pub fn fold_y(conv: &mut Vec<ZqPoly>, q: &BiPoly, ctx: &PadicContext) {
    let d = q.deg_y();
    for k in (d..conv.len()).rev() {
        let c = std::mem::replace(&mut conv[k], ZqPoly::zero());
        if c.is_zero() {
            continue;
        }
        for i in 0..d {
            if q.ycoeffs[i].is_zero() {
                continue;
            }
            let t = c.mul(&q.ycoeffs[i], ctx);
            conv[k - d + i] = conv[k - d + i].sub(&t, ctx);
        }
    }
    conv.truncate(d.max(1));
}

/// Evaluate a bivariate polynomial at y = beta where beta is an AVec
/// (Horner in y inside A).
pub fn bipoly_eval_avec(f: &BiPoly, beta: &AVec, q: &BiPoly, ctx: &PadicContext) -> AVec {
    let d = q.deg_y();
    let mut acc = avec_zero(d);
    for c in f.ycoeffs.iter().rev() {
        acc = avec_mul(&acc, beta, q, ctx);
        acc[0] = acc[0].add(c, ctx);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn ctx() -> PadicContext {
        PadicContext::new(&BigUint::from(7u8), 1, 5, None).unwrap()
    }

    #[test]
    fn avec_mul_respects_relation() {
        let c = ctx();
        // Q = y^2 - (x^3 + x + 1)
        let f = ZqPoly::from_i64_coeffs(&c, &[1, 1, 0, 1]);
        let q = BiPoly {
            ycoeffs: vec![f.neg(&c), ZqPoly::zero(), ZqPoly::one(&c)],
        };
        // y * y = f
        let y = vec![ZqPoly::zero(), ZqPoly::one(&c)];
        let y2 = avec_mul(&y, &y, &q, &c);
        assert_eq!(y2[0], f);
        assert!(y2[1].is_zero());
    }

    #[test]
    fn eval_at_y_itself_is_zero_for_q() {
        let c = ctx();
        let f = ZqPoly::from_i64_coeffs(&c, &[1, 1, 0, 1]);
        let q = BiPoly {
            ycoeffs: vec![f.neg(&c), ZqPoly::zero(), ZqPoly::one(&c)],
        };
        let y = vec![ZqPoly::zero(), ZqPoly::one(&c)];
        let v = bipoly_eval_avec(&q, &y, &q, &c);
        assert!(v.iter().all(|p| p.is_zero()));
    }
}
