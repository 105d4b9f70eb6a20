// Scratch driver used during development; prints pipeline internals for a
// small elliptic curve.

use num_bigint::BigUint;
use rigid_zeta::cohomology::{build_basis, reduce_to_matrix, ReductionCache};
use rigid_zeta::curve::{build_curve, builtin_hyperelliptic, residue_matrices};
use rigid_zeta::frobenius::{
    frobenius_matrices, lift_inverse_r, lift_y, psi_identity_w0, push_forward_forms, FrobEngine,
};
use rigid_zeta::padic::{PadicContext, QqScalar, ZqPoly};

fn show(ctx: &PadicContext, s: &QqScalar) -> String {
    let n = ctx.qq_normalize(s);
    if ctx.is_zero(&n.m) {
        return "0".into();
    }
    format!("p^{}*{:?}", n.shift, n.m.coeffs()[0].to_u64_digits())
}

fn main() {
    let prec = 6u32;
    let ctx = PadicContext::new(&BigUint::from(5u8), 1, prec, None).unwrap();
    let f = ZqPoly::from_i64_coeffs(&ctx, &[1, 1, 0, 1]);
    let (q, w0, winf) = builtin_hyperelliptic(&f, &ctx).unwrap();
    let cd = build_curve(q, w0, winf, &ctx, None).unwrap();
    let rd = residue_matrices(&cd).unwrap();
    let basis = build_basis(&cd, &rd).unwrap();
    println!("kappa = {}, genus = {}, d_max = {}", basis.kappa, basis.genus, basis.d_max);
    for (i, w) in basis.omega_vecs.iter().enumerate() {
        println!(
            "omega_{i}: [{}]",
            w.iter()
                .map(|p| format!("{:?}", p.coeffs.iter().map(|c| c.coeffs()[0].to_u64_digits()).collect::<Vec<_>>()))
                .collect::<Vec<_>>()
                .join(" | ")
        );
    }

    let mut engine = FrobEngine::new(&cd, &ctx, 40);
    let (alpha, ra) = lift_inverse_r(&mut engine, prec).unwrap();
    println!("alpha residuals {:?}, poles {}", ra, alpha.max_pole());
    let (beta, rb) = lift_y(&mut engine, &alpha, prec).unwrap();
    println!("beta residuals {:?}", rb);
    let fm = frobenius_matrices(&mut engine, &alpha, &beta, prec).unwrap();
    // psi consistency for W0 = I
    let psi2 = psi_identity_w0(&mut engine, &fm.phi, &alpha, prec).unwrap();
    let mut max_dev = 0u32;
    let mut consistent = true;
    for i in 0..2 {
        for j in 0..2 {
            let d = fm.psi[i][j].sub(&psi2[i][j], &ctx);
            let v = d.content_val(&ctx);
            if v < prec {
                consistent = false;
                max_dev = max_dev.max(v);
            }
        }
    }
    println!("psi consistency (W0=I): {} (worst dev val {})", consistent, max_dev);

    let forms: Vec<Vec<ZqPoly>> = basis.omega_vecs[..2].to_vec();
    let pushed = push_forward_forms(&mut engine, &fm.psi, &forms, prec).unwrap();
    for (i, pf) in pushed.iter().enumerate() {
        println!(
            "pushed {}: levels {}, tail degs {:?}",
            i,
            pf.levels.len(),
            pf.tail.iter().map(|t| t.degree()).collect::<Vec<_>>()
        );
    }
    let mut cache = ReductionCache::new(&cd, &rd).unwrap();
    let fmat = reduce_to_matrix(&cd, &basis, &mut cache, &pushed, 0, 2).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            println!("F[{i}][{j}] = {}", show(&ctx, &fmat.entries[i][j]));
        }
    }
    println!("stats: {:?}", fmat.stats);

    // exactness: reduce d(h) for h in B0 cap Binf, expect zero coordinates
    use rigid_zeta::cohomology::reduce::PushedForm;
    let h = vec![ZqPoly::x(&ctx), ZqPoly::zero()];
    let dh = rigid_zeta::cohomology::function_differential(&cd, &h, &ctx);
    println!("dh = {:?}", dh.iter().map(|p| p.coeffs.iter().map(|c| c.coeffs()[0].to_u64_digits()).collect::<Vec<_>>()).collect::<Vec<_>>());
    let pf = PushedForm {
        levels: vec![],
        tail: dh,
    };
    let fz = reduce_to_matrix(&cd, &basis, &mut cache, &[pf], 0, 2);
    match fz {
        Ok(m) => {
            println!(
                "exact form coords: {} {}",
                show(&ctx, &m.entries[0][0]),
                show(&ctx, &m.entries[1][0])
            );
        }
        Err(e) => println!("exact form reduce error: {e}"),
    }
}
