//! Convenience constructor for hyperelliptic models y^2 = f(x).

use super::bipoly::BiPoly;
use super::rmat::{rmat_identity, REntry, RMat};
use crate::error::CurveError;
use crate::padic::hensel::fq_gcd;
use crate::padic::{LaurentPoly, PadicContext, ZqPoly};

/// Q = y^2 - f, W0 = I, Winf = diag(1, x^{-ceil(deg f / 2)}).
pub fn builtin_hyperelliptic(
    f: &ZqPoly,
    ctx: &PadicContext,
) -> Result<(BiPoly, RMat, RMat), CurveError> {
    if (ctx.prime() % 2u8) == num_bigint::BigUint::from(0u8) {
        return Err(CurveError::EvenCharacteristic);
    }
    let d = f.degree().ok_or(CurveError::NotSquarefreeModP)?;
    if d < 3 {
        return Err(CurveError::DegenerateCurve);
    }
    let ctx1 = ctx.truncated(1)?;
    let fbar = f.truncate_to(&ctx1);
    if fbar.degree() != Some(d) {
        // leading coefficient vanishes mod p; the plane model degenerates
        return Err(CurveError::SupportChangedModP { xdeg: d, ydeg: 0 });
    }
    let g = fq_gcd(&ctx1, &fbar, &fbar.derivative(&ctx1));
    if g.degree() != Some(0) {
        return Err(CurveError::NotSquarefreeModP);
    }
    let q = BiPoly {
        ycoeffs: vec![f.neg(ctx), ZqPoly::zero(), ZqPoly::one(ctx)],
    };
    let w0 = rmat_identity(2, ctx);
    let mut winf = rmat_identity(2, ctx);
    let half = (d as i64 + 1) / 2;
    winf[1][1] = REntry {
        num: LaurentPoly {
            poly: ZqPoly::one(ctx),
            shift: -half,
        },
        rpow: 0,
    };
    Ok((q, w0, winf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn ctx(p: u64) -> PadicContext {
        PadicContext::new(&BigUint::from(p), 1, 6, None).unwrap()
    }

    #[test]
    fn winf_scaling_matches_degree() {
        let c = ctx(5);
        let f3 = ZqPoly::from_i64_coeffs(&c, &[1, 1, 0, 1]);
        let (_, _, winf) = builtin_hyperelliptic(&f3, &c).unwrap();
        assert_eq!(winf[1][1].num.shift, -2);

        let f5 = ZqPoly::from_i64_coeffs(&c, &[1, 1, 0, 0, 0, 1]);
        let (_, _, winf5) = builtin_hyperelliptic(&f5, &c).unwrap();
        assert_eq!(winf5[1][1].num.shift, -3);
    }

    #[test]
    fn rejects_non_squarefree_and_even_char() {
        let c = ctx(5);
        let x2 = ZqPoly::from_i64_coeffs(&c, &[0, 0, 1]);
        assert!(matches!(
            builtin_hyperelliptic(&x2, &c),
            Err(CurveError::DegenerateCurve)
        ));
        let f = ZqPoly::from_i64_coeffs(&c, &[0, 0, 1, 1]); // x^2(x+1): not squarefree
        assert!(matches!(
            builtin_hyperelliptic(&f, &c),
            Err(CurveError::NotSquarefreeModP)
        ));
        let c2 = ctx(2);
        let f3 = ZqPoly::from_i64_coeffs(&c2, &[1, 1, 0, 1]);
        assert!(matches!(
            builtin_hyperelliptic(&f3, &c2),
            Err(CurveError::EvenCharacteristic)
        ));
    }
}
