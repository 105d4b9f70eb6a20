//! Reduction of 1-forms to the cohomology basis: the finite cascade over the
//! pole levels in r, the infinite cascade at x = infinity, and the assembly
//! of the Frobenius matrix F.
//!
//! The parametric finite solve is cached once: the characteristic polynomial
//! and adjugate series of M0 turn every level into a matrix-vector product
//! plus one scalar inversion modulo r per level.

use rayon::prelude::*;

use super::{from_infinity_frame, to_infinity_frame, CohomologyBasis, QqLaurent};
use crate::curve::{CurveData, ResidueData};
use crate::error::CohomologyError;
use crate::padic::linalg::{
    adjugate_series, berkowitz_charpoly, qq_poly_add, qq_poly_from_zq, qq_poly_invert_mod,
    qq_poly_mul_mod, qq_poly_rem, qq_poly_scale, qq_poly_trim, qq_solve, ModPolyRing, QqMat,
    QqPoly, VAL_INF,
};
use crate::padic::{LaurentPoly, PadicContext, QqScalar, ZqPoly};

/// A 1-form as produced by the Frobenius push-forward:
/// sum_k (levels[k-1] / r^k) b^0 dx/r + tail b^0 dx/r, all integral.
#[derive(Clone, Debug)]
pub struct PushedForm {
    /// levels[k][i]: coefficient of b^0_i at pole level k+1, degree < deg r.
    pub levels: Vec<Vec<ZqPoly>>,
    /// Polynomial tail per component (pole level 0).
    pub tail: Vec<ZqPoly>,
}

#[derive(Clone, Debug, Default)]
pub struct ReductionStats {
    /// Worst single-level denominator valuation in the finite cascade.
    pub max_finite_step_loss: u32,
    /// Finite-reduction loss bound floor(log_p(l * e0)) at the worst level.
    pub finite_bound: u32,
    pub finite_ok: bool,
    /// Total loss in the infinite cascade, worst form.
    pub max_infinite_loss: u32,
    pub infinite_bound: u32,
    pub infinite_ok: bool,
    /// Worst denominator valuation among the final F entries (>= 0).
    pub coordinate_loss: u32,
    /// Worst junk valuation among dropped remainders (VAL_INF when clean).
    pub junk_min_val: i64,
}

/// The 2g x 2g matrix of Frobenius on H^1_rig(X).
#[derive(Clone, Debug)]
pub struct FrobMatrixF {
    pub entries: QqMat,
    pub delta: u32,
    pub stats: ReductionStats,
}

pub struct ReductionCache {
    /// (r')^{-1} mod r (integral).
    pub rp_inv: ZqPoly,
    /// charpoly of M0 over Z_q[x]/(r), ascending.
    pub charpoly: Vec<ZqPoly>,
    /// adjugate series of (lambda I - M0).
    pub adj_b: Vec<Vec<Vec<ZqPoly>>>,
    /// Per-level inverse of charpoly(l) mod r with its loss; index l-1.
    pub inv_chi: Vec<(QqPoly, u32)>,
    /// r * Ginf with Laurent entries.
    pub rginf: Vec<Vec<LaurentPoly>>,
    pub minf: QqMat,
}

impl ReductionCache {
    pub fn new(cd: &CurveData, rd: &ResidueData) -> Result<Self, CohomologyError> {
        let ctx = &cd.ctx;
        let (rp_inv_qq, loss) =
            qq_poly_invert_mod(ctx, &qq_poly_from_zq(&cd.rprime), &cd.r)
                .map_err(CohomologyError::Padic)?;
        if loss != 0 {
            return Err(CohomologyError::SystemSingular);
        }
        let rp_inv = qq_to_zq_poly(ctx, &rp_inv_qq).ok_or(CohomologyError::SystemSingular)?;
        let ring = ModPolyRing {
            ctx,
            modulus: &cd.r,
        };
        let charpoly = berkowitz_charpoly(&ring, &rd.m0);
        let adj_b = adjugate_series(&ring, &rd.m0, &charpoly);
        // r * Ginf as Laurent entries
        let dx = cd.dx;
        let mut rginf = vec![vec![LaurentPoly::zero(); dx]; dx];
        for i in 0..dx {
            for j in 0..dx {
                let e = &cd.ginf[i][j];
                if e.is_zero() {
                    continue;
                }
                if e.rpow > 1 {
                    return Err(CohomologyError::SystemSingular);
                }
                rginf[i][j] = if e.rpow == 1 {
                    e.num.clone()
                } else {
                    e.num.mul(&LaurentPoly::from_poly(cd.r.clone()), ctx)
                };
            }
        }
        Ok(ReductionCache {
            rp_inv,
            charpoly,
            adj_b,
            inv_chi: vec![],
            rginf,
            minf: rd.minf.clone(),
        })
    }

    /// Precompute inverse of charpoly(l) mod r for l = 1..=lmax.
    pub fn ensure_levels(
        &mut self,
        cd: &CurveData,
        lmax: u32,
    ) -> Result<(), CohomologyError> {
        let ctx = &cd.ctx;
        while (self.inv_chi.len() as u32) < lmax {
            let ell = self.inv_chi.len() as u32 + 1;
            let ell_el = ctx.from_u64(ell as u64);
            // chi(ell) mod r by Horner
            let mut acc = ZqPoly::zero();
            for c in self.charpoly.iter().rev() {
                acc = acc.scale(&ell_el, ctx).rem(&cd.r, ctx).map_err(CohomologyError::Padic)?;
                acc = acc.add(c, ctx);
            }
            let acc = acc.rem(&cd.r, ctx).map_err(CohomologyError::Padic)?;
            let (inv, loss) = qq_poly_invert_mod(ctx, &qq_poly_from_zq(&acc), &cd.r)
                .map_err(|_| CohomologyError::SystemSingular)?;
            self.inv_chi.push((inv, loss));
        }
        Ok(())
    }
}

fn qq_to_zq_poly(ctx: &PadicContext, p: &QqPoly) -> Option<ZqPoly> {
    let mut coeffs = vec![];
    for c in p {
        let n = ctx.qq_normalize(c);
        if ctx.is_zero(&n.m) {
            coeffs.push(ctx.zero());
            continue;
        }
        if n.shift < 0 {
            return None;
        }
        coeffs.push(ctx.mul_by_p_pow(&n.m, n.shift.min(ctx.precision() as i64) as u32));
    }
    let mut out = ZqPoly { coeffs };
    out.trim(ctx);
    Some(out)
}

/// One finite reduction step at pole level ell >= 1: returns (v, u, loss)
/// with w/r^ell dx/r = d(v b^0 / r^ell) + u/r^{ell-1} dx/r.
pub fn finite_step(
    cd: &CurveData,
    cache: &ReductionCache,
    w: &[QqPoly],
    ell: u32,
) -> Result<(Vec<QqPoly>, Vec<QqPoly>, u32), CohomologyError> {
    let ctx = &cd.ctx;
    let dx = cd.dx;
    let (inv_chi, chi_loss) = cache
        .inv_chi
        .get(ell as usize - 1)
        .expect("levels precomputed")
        .clone();
    // rhs = (r')^{-1} w mod r
    let rhs: Vec<QqPoly> = w
        .iter()
        .map(|wi| {
            let prod = qq_poly_mul_mod(ctx, wi, &qq_poly_from_zq(&cache.rp_inv), &cd.r);
            prod
        })
        .collect();
    // madj(ell) rhs via Horner over the adjugate series
    let ell_el = QqScalar::from_zq(ctx.from_u64(ell as u64));
    let n_b = cache.adj_b.len();
    let mut acc: Vec<QqPoly> = mat_vec_mod(ctx, &cache.adj_b[n_b - 1], &rhs, &cd.r);
    for k in (0..n_b - 1).rev() {
        // acc = acc * ell + B_k rhs
        for a in acc.iter_mut() {
            *a = qq_poly_scale(ctx, a, &ell_el);
        }
        let t = mat_vec_mod(ctx, &cache.adj_b[k], &rhs, &cd.r);
        for (a, b) in acc.iter_mut().zip(&t) {
            *a = qq_poly_add(ctx, a, b);
        }
    }
    // v = -acc * inv_chi mod r
    let v: Vec<QqPoly> = acc
        .iter()
        .map(|a| {
            let t = qq_poly_mul_mod(ctx, a, &inv_chi, &cd.r);
            t.iter().map(|c| ctx.qq_neg(c)).collect()
        })
        .collect();
    // u = (w + ell r' v - r v' - (r G0) v) / r
    let r_qq = qq_poly_from_zq(&cd.r);
    let rp_qq = qq_poly_from_zq(&cd.rprime);
    let mut u = Vec::with_capacity(dx);
    let ell_qq = QqScalar::from_zq(ctx.from_u64(ell as u64));
    for i in 0..dx {
        let mut num = w[i].clone();
        // + ell r' v_i
        let t = crate::padic::linalg::qq_poly_mul(ctx, &rp_qq, &v[i]);
        let t = qq_poly_scale(ctx, &t, &ell_qq);
        num = qq_poly_add(ctx, &num, &t);
        // - r v_i'
        let vp = qq_poly_derivative(ctx, &v[i]);
        let t = crate::padic::linalg::qq_poly_mul(ctx, &r_qq, &vp);
        num = qq_poly_sub(ctx, &num, &t);
        // - (r G0 v)_i
        for j in 0..dx {
            if cd.rg0[i][j].is_zero() || v[j].is_empty() {
                continue;
            }
            let t = crate::padic::linalg::qq_poly_mul(ctx, &qq_poly_from_zq(&cd.rg0[i][j]), &v[j]);
            num = qq_poly_sub(ctx, &num, &t);
        }
        // exact division by r
        let (q, junk) = qq_poly_divrem_monic(ctx, &num, &cd.r);
        if junk < (ctx.precision() as i64) / 4 {
            return Err(CohomologyError::SystemSingular);
        }
        u.push(q);
    }
    Ok((v, u, chi_loss))
}

fn qq_poly_sub(ctx: &PadicContext, a: &QqPoly, b: &QqPoly) -> QqPoly {
    let nb: QqPoly = b.iter().map(|c| ctx.qq_neg(c)).collect();
    qq_poly_add(ctx, a, &nb)
}

fn qq_poly_derivative(ctx: &PadicContext, a: &QqPoly) -> QqPoly {
    if a.len() <= 1 {
        return vec![];
    }
    let mut out = Vec::with_capacity(a.len() - 1);
    for (i, c) in a.iter().enumerate().skip(1) {
        let k = QqScalar::from_zq(ctx.from_u64(i as u64));
        out.push(ctx.qq_mul(c, &k));
    }
    qq_poly_trim(ctx, &mut out);
    out
}

/// Division by a monic integral polynomial; returns (quotient, minimal
/// valuation of the discarded remainder).
fn qq_poly_divrem_monic(ctx: &PadicContext, a: &QqPoly, m: &ZqPoly) -> (QqPoly, i64) {
    let dm = m.degree().expect("nonzero modulus");
    let mut r = a.to_vec();
    qq_poly_trim(ctx, &mut r);
    if r.len() <= dm {
        let mut junk = VAL_INF;
        for c in &r {
            junk = junk.min(ctx.qq_val(c));
        }
        return (vec![], junk);
    }
    let mut q = vec![ctx.qq_zero(); r.len() - dm];
    while r.len() > dm {
        let lead = r.last().unwrap().clone();
        let k = r.len() - 1 - dm;
        if !ctx.qq_is_zero(&lead) {
            q[k] = lead.clone();
            for i in 0..dm {
                let t = ctx.qq_mul(&lead, &QqScalar::from_zq(m.coeffs[i].clone()));
                r[k + i] = ctx.qq_sub(&r[k + i], &t);
            }
        }
        r.pop();
        qq_poly_trim(ctx, &mut r);
    }
    let mut junk = VAL_INF;
    for c in &r {
        junk = junk.min(ctx.qq_val(c));
    }
    qq_poly_trim(ctx, &mut q);
    (q, junk)
}

fn mat_vec_mod(
    ctx: &PadicContext,
    m: &[Vec<ZqPoly>],
    v: &[QqPoly],
    r: &ZqPoly,
) -> Vec<QqPoly> {
    let n = m.len();
    let mut out = vec![vec![]; n];
    for i in 0..n {
        let mut acc: QqPoly = vec![];
        for j in 0..n {
            if m[i][j].is_zero() || v[j].is_empty() {
                continue;
            }
            let t = qq_poly_mul_mod(ctx, &qq_poly_from_zq(&m[i][j]), &v[j], r);
            acc = qq_poly_add(ctx, &acc, &t);
        }
        out[i] = acc;
    }
    out
}

/// One infinite reduction step (functional form, used in small peels):
/// returns the new w and the solve loss.
pub fn infinite_step(
    cd: &CurveData,
    cache: &ReductionCache,
    w: &[QqLaurent],
    ctx: &PadicContext,
) -> Result<(Vec<QqLaurent>, i64, u32), CohomologyError> {
    let deg_r = cd.deg_r() as i64;
    let m_top = -(w
        .iter()
        .map(|l| l.ord_inf(ctx))
        .min()
        .unwrap_or(VAL_INF));
    let s = m_top - deg_r + 1;
    let w_top: Vec<QqScalar> = w.iter().map(|l| l.coeff_at(m_top, ctx)).collect();
    // (s I - Minf) v0 = w_top
    let dx = cd.dx;
    let s_el = QqScalar::from_zq(ctx.from_bigint(&num_bigint::BigInt::from(s)));
    let mut mat = vec![vec![ctx.qq_zero(); dx]; dx];
    for i in 0..dx {
        for j in 0..dx {
            mat[i][j] = ctx.qq_neg(&cache.minf[i][j]);
            if i == j {
                mat[i][j] = ctx.qq_add(&mat[i][j], &s_el);
            }
        }
    }
    let (v0, loss) = qq_solve(ctx, &mat, &w_top).map_err(|_| CohomologyError::SystemSingular)?;
    // u = w - r v' - (r Ginf) v with v = v0 x^s
    let mut out = w.to_vec();
    for i in 0..dx {
        if ctx.qq_is_zero(&v0[i]) {
            continue;
        }
        // r * (v0_i x^s)' = s v0_i r x^{s-1}
        let coef = ctx.qq_mul(&v0[i], &s_el);
        let term = QqLaurent {
            coeffs: cd
                .r
                .coeffs
                .iter()
                .map(|c| ctx.qq_mul(&coef, &QqScalar::from_zq(c.clone())))
                .collect(),
            shift: s - 1,
        };
        out[i] = out[i].sub(&term, ctx);
        // (r Ginf)_{ji} contributions: column i of rGinf times v0_i x^s
        for jrow in 0..dx {
            let l = &cache.rginf[jrow][i];
            if l.is_zero() {
                continue;
            }
            let term = QqLaurent {
                coeffs: l
                    .poly
                    .coeffs
                    .iter()
                    .map(|c| ctx.qq_mul(&v0[i], &QqScalar::from_zq(c.clone())))
                    .collect(),
                shift: l.shift + s,
            };
            out[jrow] = out[jrow].sub(&term, ctx);
        }
    }
    // degrees >= m_top cancel by construction; drop them and record junk
    let mut junk = VAL_INF;
    for l in out.iter_mut() {
        while !l.coeffs.is_empty() {
            let top_deg = l.shift + l.coeffs.len() as i64 - 1;
            if top_deg >= m_top {
                let c = l.coeffs.pop().unwrap();
                junk = junk.min(ctx.qq_val(&c));
            } else {
                break;
            }
        }
        l.normalize(ctx);
    }
    Ok((out, junk, loss))
}

/// Reduce every pushed form and assemble F column-wise.
pub fn reduce_to_matrix(
    cd: &CurveData,
    basis: &CohomologyBasis,
    cache: &mut ReductionCache,
    pushed: &[PushedForm],
    delta: u32,
    junk_floor: i64,
) -> Result<FrobMatrixF, CohomologyError> {
    let ctx = &cd.ctx;
    let two_g = 2 * basis.genus;
    let lmax = pushed.iter().map(|f| f.levels.len()).max().unwrap_or(0) as u32;
    cache.ensure_levels(cd, lmax)?;

    // per-level solve losses against the finite-reduction bound: the
    // denominator introduced at level l is at most floor(log_p(l * e0))
    let p = ctx.prime();
    let mut finite_bound = 0u32;
    let mut max_finite_step_loss = 0u32;
    let mut finite_ok = true;
    for ell in 1..=lmax {
        let step_loss = cache.inv_chi[ell as usize - 1].1;
        let bound = crate::precision::floor_log_p(p, ell as i64 * cd.e0 as i64);
        max_finite_step_loss = max_finite_step_loss.max(step_loss);
        finite_bound = finite_bound.max(bound);
        if step_loss > bound {
            finite_ok = false;
        }
    }

    let results: Vec<Result<(Vec<QqScalar>, u32, i64), CohomologyError>> = pushed
        .par_iter()
        .map(|form| reduce_one(cd, basis, cache, form, ctx))
        .collect();

    let mut entries = vec![vec![ctx.qq_zero(); pushed.len()]; two_g];
    let mut stats = ReductionStats {
        max_finite_step_loss,
        finite_bound,
        finite_ok,
        max_infinite_loss: 0,
        infinite_bound: 0,
        infinite_ok: true,
        coordinate_loss: 0,
        junk_min_val: VAL_INF,
    };
    // infinite bound: max(f2, trailing term of f1)
    let f2 = crate::precision::loss_f2(p, &cd.ords, cd.einf);
    let t2 = crate::precision::floor_log_p(p, -(cd.ords.ordinf_winv + 1) * cd.einf as i64);
    stats.infinite_bound = f2.max(t2);

    for (col, res) in results.into_iter().enumerate() {
        let (coords, inf_loss, junk) = res?;
        stats.max_infinite_loss = stats.max_infinite_loss.max(inf_loss);
        stats.junk_min_val = stats.junk_min_val.min(junk);
        // components beyond 2g must vanish
        for (idx, c) in coords.iter().enumerate() {
            let v = ctx.qq_val(c);
            if idx < two_g {
                if v < -(delta as i64) && v < VAL_INF {
                    return Err(CohomologyError::ValuationBreach);
                }
                if v < 0 {
                    stats.coordinate_loss = stats.coordinate_loss.max((-v) as u32);
                }
                entries[idx][col] = c.clone();
            } else if v < junk_floor {
                return Err(CohomologyError::RankDeficient(format!(
                    "form {col} has a boundary component of valuation {v}"
                )));
            }
        }
    }
    stats.infinite_ok = stats.max_infinite_loss <= stats.infinite_bound;

    Ok(FrobMatrixF {
        entries,
        delta,
        stats,
    })
}

fn reduce_one(
    cd: &CurveData,
    basis: &CohomologyBasis,
    cache: &ReductionCache,
    form: &PushedForm,
    ctx: &PadicContext,
) -> Result<(Vec<QqScalar>, u32, i64), CohomologyError> {
    let dx = cd.dx;
    // finite cascade
    let lmax = form.levels.len();
    let mut carry: Vec<QqPoly> = vec![vec![]; dx];
    for ell in (1..=lmax).rev() {
        let mut w: Vec<QqPoly> = form.levels[ell - 1]
            .iter()
            .map(|p| qq_poly_from_zq(p))
            .collect();
        for (wi, c) in w.iter_mut().zip(&carry) {
            *wi = qq_poly_add(ctx, wi, c);
        }
        if w.iter().all(|p| p.iter().all(|c| ctx.qq_is_zero(c))) {
            carry = vec![vec![]; dx];
            continue;
        }
        let (_v, u, _loss) = finite_step(cd, cache, &w, ell as u32)?;
        carry = u;
    }
    // polynomial tail
    let mut tail: Vec<QqPoly> = form.tail.iter().map(|p| qq_poly_from_zq(p)).collect();
    for (t, c) in tail.iter_mut().zip(&carry) {
        *t = qq_poly_add(ctx, t, c);
    }

    // infinite cascade: reduce while the form sits at or below the
    // E_inf window bound; stopping exactly there keeps the subtracted
    // functions free of finite poles, so the form stays in E_0.
    let deg_r = cd.deg_r() as i64;
    let stop = cd.ords.ord0_w - deg_r + 1;
    let mut w = to_infinity_frame(cd, &tail, ctx);
    let mut inf_loss = 0u32;
    let mut junk = VAL_INF;
    let mut guard = 0u64;
    loop {
        let ord = w.iter().map(|l| l.ord_inf(ctx)).min().unwrap_or(VAL_INF);
        if ord > stop {
            break;
        }
        let (nw, step_junk, loss) = infinite_step(cd, cache, &w, ctx)?;
        w = nw;
        inf_loss += loss;
        junk = junk.min(step_junk);
        guard += 1;
        if guard > 1_000_000 {
            return Err(CohomologyError::RankDeficient(
                "infinite cascade fails to terminate".into(),
            ));
        }
    }
    // back to the b^0 frame; must be polynomial within the window
    let back = from_infinity_frame(cd, &w, ctx);
    let width = (basis.d_max + 1).max(0) as usize;
    let mut ambient = vec![ctx.qq_zero(); basis.ambient_cols];
    for (i, l) in back.iter().enumerate() {
        for (idx, c) in l.coeffs.iter().enumerate() {
            if ctx.qq_is_zero(c) {
                continue;
            }
            let deg = l.shift + idx as i64;
            if deg < 0 || deg >= width as i64 {
                junk = junk.min(ctx.qq_val(c));
                continue;
            }
            ambient[i * width + deg as usize] = c.clone();
        }
    }
    let (coords, cjunk) = basis.coordinates(ctx, &ambient)?;
    Ok((coords, inf_loss, junk.min(cjunk)))
}
