//! First integration milestone: the full Frobenius/reduction pipeline on an
//! elliptic curve reproduces the trace known from direct point counting.

use num_bigint::BigUint;
use rigid_zeta::cohomology::{build_basis, reduce_to_matrix, ReductionCache};
use rigid_zeta::curve::{build_curve, builtin_hyperelliptic, residue_matrices};
use rigid_zeta::frobenius::{frobenius_matrices, lift_inverse_r, lift_y, push_forward_forms, FrobEngine};
use rigid_zeta::padic::{PadicContext, ZqPoly};

#[test]
fn elliptic_f5_trace_matches_count() {
    // y^2 = x^3 + x + 1 over F_5: #X(F_5) = 9, so trace(F) = -3 and
    // chi(T) = 1 + 3T + 5T^2.
    let prec = 6u32;
    let ctx = PadicContext::new(&BigUint::from(5u8), 1, prec, None).unwrap();
    let f = ZqPoly::from_i64_coeffs(&ctx, &[1, 1, 0, 1]);
    let (q, w0, winf) = builtin_hyperelliptic(&f, &ctx).unwrap();
    let cd = build_curve(q, w0, winf, &ctx, None).unwrap();
    let rd = residue_matrices(&cd).unwrap();
    let basis = build_basis(&cd, &rd).unwrap();
    assert_eq!(basis.kappa, 5, "dim H^1(U) for the elliptic curve");
    assert_eq!(basis.genus, 1);

    let mut engine = FrobEngine::new(&cd, &ctx, 5 * prec as usize);
    let (alpha, resid_a) = lift_inverse_r(&mut engine, prec).unwrap();
    assert!(resid_a.windows(2).all(|w| w[1] >= w[0]));
    let (beta, _resid_b) = lift_y(&mut engine, &alpha, prec).unwrap();
    // beta^2 = f^sigma(x^5) in R-dagger
    let fm = frobenius_matrices(&mut engine, &alpha, &beta, prec).unwrap();
    let forms: Vec<Vec<ZqPoly>> = basis.omega_vecs[..2].to_vec();
    let pushed = push_forward_forms(&mut engine, &fm.psi, &forms, prec).unwrap();

    let mut cache = ReductionCache::new(&cd, &rd).unwrap();
    let fmat = reduce_to_matrix(&cd, &basis, &mut cache, &pushed, 0, 2).unwrap();
    assert_eq!(fmat.entries.len(), 2);

    // trace mod 25 must be -3
    let tr = ctx.qq_add(&fmat.entries[0][0], &fmat.entries[1][1]);
    let trn = ctx.qq_normalize(&tr);
    assert!(trn.shift >= 0, "trace should be integral, got {:?}", trn);
    let val = ctx.mul_by_p_pow(&trn.m, trn.shift as u32);
    let m25 = (&val.coeffs()[0] % BigUint::from(25u8)).to_u64_digits();
    let tr_mod_25 = m25.first().copied().unwrap_or(0);
    assert_eq!(tr_mod_25, 22, "trace = -3 mod 25, got {tr_mod_25}");
}
