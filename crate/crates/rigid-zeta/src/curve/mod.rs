//! Curve setup: validate the lifted plane model, compute the discriminant
//! apparatus (Delta, r, m, g, s), materialize the integral-basis matrices
//! and their inverses, the connection matrices, boundary data and residue
//! matrices, and audit the good-lift conditions.

pub mod audit;
pub mod bipoly;
pub mod boundary;
pub mod builtin;
pub mod residue;
pub mod rmat;

pub use audit::{audit_assumptions, AuditClause, AuditReport};
pub use bipoly::{avec_mul, avec_scale, avec_sub, avec_zero, AVec, BiPoly};
pub use builtin::builtin_hyperelliptic;
pub use residue::{residue_matrices, ResidueData};
pub use rmat::{REntry, RMat};

use crate::error::CurveError;
use crate::padic::hensel::{fq_factor_squarefree, fq_squarefree_decomposition, hensel_lift_coprime};
use crate::padic::linalg::{
    adjugate_series, berkowitz_charpoly, mat_vec_ring, ZqPolyRing,
};
use crate::padic::{LaurentPoly, PadicContext, ZqElem, ZqPoly};
use bipoly::{bipoly_eval_avec, fold_y};
use rmat::{rmat_add, rmat_derivative, rmat_mul, rmat_ord_inf, rmat_ord_ne_inf, rmat_ord_zero};

/// Valuations of the basis matrices entering the shape and precision bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrdTable {
    pub ord0_w: i64,
    pub ordinf_w: i64,
    pub ordinf_winv: i64,
    pub ordneinf_w0: i64,
    pub ordneinf_w0inv: i64,
    pub ordinf_winf: i64,
    pub ordinf_winfinv: i64,
}

/// Determinant of a basis matrix in factored unit-normal form
/// c * x^xpow * prod f_j^{fpows[j]} over the Hensel factors of r.
#[derive(Clone, Debug)]
pub struct FactoredDet {
    pub unit: ZqElem,
    pub xpow: u32,
    pub fpows: Vec<u32>,
}

/// Validated lift with all derived setup data.
#[derive(Clone, Debug)]
pub struct CurveData {
    pub ctx: PadicContext,
    pub q: BiPoly,
    pub dx: usize,
    pub dy: usize,
    pub w0: RMat,
    pub winf: RMat,
    pub w0_inv: RMat,
    pub winf_inv: RMat,
    pub w: RMat,
    pub w_inv: RMat,
    pub delta: ZqPoly,
    pub r: ZqPoly,
    pub rprime: ZqPoly,
    /// Irreducible (over Z_q) monic Hensel factors of r.
    pub rfactors: Vec<ZqPoly>,
    /// Least m with r^m = gpoly * Delta.
    pub m_pow: u32,
    pub gpoly: ZqPoly,
    /// s(x, y) with s * dQ/dy = Delta in A, in y-coordinates.
    pub s: AVec,
    pub g0: RMat,
    pub ginf: RMat,
    /// r * G0, with polynomial entries.
    pub rg0: Vec<Vec<ZqPoly>>,
    pub ords: OrdTable,
    pub det_w0: FactoredDet,
    pub det_winf: FactoredDet,
    pub boundary: boundary::BoundaryData,
    /// Ramification bounds actually used (exact values unless overridden).
    pub e0: u32,
    pub einf: u32,
    /// Exact genus, filled in once the cohomology basis is constructed.
    pub genus: Option<usize>,
}

impl CurveData {
    pub fn genus_bound(&self) -> usize {
        (self.dx - 1) * (self.dy.max(1) - 1)
    }

    pub fn deg_r(&self) -> usize {
        self.r.degree().unwrap_or(0)
    }

    /// The same curve data truncated to a lower working precision.
    pub fn truncate_to(&self, precision: u32) -> Result<CurveData, CurveError> {
        let ctx = self.ctx.truncated(precision)?;
        let tp = |p: &ZqPoly| p.truncate_to(&ctx);
        let te = |e: &REntry| REntry {
            num: LaurentPoly {
                poly: e.num.poly.truncate_to(&ctx),
                shift: e.num.shift,
            },
            rpow: e.rpow,
        };
        let tm = |m: &RMat| -> RMat {
            m.iter()
                .map(|row| row.iter().map(te).collect())
                .collect()
        };
        let tpm = |m: &Vec<Vec<ZqPoly>>| -> Vec<Vec<ZqPoly>> {
            m.iter().map(|row| row.iter().map(tp).collect()).collect()
        };
        Ok(CurveData {
            ctx: ctx.clone(),
            q: self.q.truncate_to(&ctx),
            dx: self.dx,
            dy: self.dy,
            w0: tm(&self.w0),
            winf: tm(&self.winf),
            w0_inv: tm(&self.w0_inv),
            winf_inv: tm(&self.winf_inv),
            w: tm(&self.w),
            w_inv: tm(&self.w_inv),
            delta: tp(&self.delta),
            r: tp(&self.r),
            rprime: tp(&self.rprime),
            rfactors: self.rfactors.iter().map(tp).collect(),
            m_pow: self.m_pow,
            gpoly: tp(&self.gpoly),
            s: self.s.iter().map(tp).collect(),
            g0: tm(&self.g0),
            ginf: tm(&self.ginf),
            rg0: tpm(&self.rg0),
            ords: self.ords.clone(),
            det_w0: self.det_w0.clone(),
            det_winf: self.det_winf.clone(),
            boundary: self.boundary.clone(),
            e0: self.e0,
            einf: self.einf,
            genus: self.genus,
        })
    }
}

/// Resultant of A and B with respect to y (determinant of the Sylvester
/// matrix); A, B bivariate with polynomial x-coefficients.
pub fn poly_resultant_y(a: &BiPoly, b: &BiPoly, ctx: &PadicContext) -> ZqPoly {
    let da = a.deg_y();
    let db = b.deg_y();
    if db == 0 {
        // Res(A, const) = const^{deg A}
        let c = b.ycoeffs.first().cloned().unwrap_or_else(ZqPoly::zero);
        return c.pow(da, ctx);
    }
    let n = da + db;
    let ring = ZqPolyRing { ctx };
    let mut m = vec![vec![ZqPoly::zero(); n]; n];
    // db rows of A coefficients (descending), then da rows of B.
    for i in 0..db {
        for k in 0..=da {
            m[i][i + k] = a.ycoeffs[da - k].clone();
        }
    }
    for i in 0..da {
        for k in 0..=db {
            m[db + i][i + k] = b.ycoeffs[db - k].clone();
        }
    }
    let cp = berkowitz_charpoly(&ring, &m);
    // det(M) = (-1)^n * cp(0)
    let det = cp[0].clone();
    if n % 2 == 1 {
        det.neg(ctx)
    } else {
        det
    }
}

/// Discriminant of Q with respect to y for monic-in-y Q:
/// (-1)^{d(d-1)/2} Res_y(Q, dQ/dy).
pub fn discriminant_y(q: &BiPoly, ctx: &PadicContext) -> ZqPoly {
    let d = q.deg_y();
    let res = poly_resultant_y(q, &q.d_dy(ctx), ctx);
    if (d * (d - 1) / 2) % 2 == 1 {
        res.neg(ctx)
    } else {
        res
    }
}

/// Monic a-th root of a monic polynomial, by linear Newton lifting from the
/// mod-p root.  Fails when the input is not an exact a-th power.
fn monic_nth_root(
    ctx: &PadicContext,
    g: &ZqPoly,
    root_mod_p: &ZqPoly,
    a: u32,
) -> Result<ZqPoly, CurveError> {
    if a == 1 {
        return Ok(g.clone());
    }
    let ctx1 = ctx.truncated(1)?;
    let fbar = root_mod_p.truncate_to(&ctx1);
    // a * fbar^{a-1}, the denominator of every Newton correction
    let denom = fbar
        .pow(a as usize - 1, &ctx1)
        .scale(&ctx1.from_u64(a as u64), &ctx1);
    let mut f = lift_poly(ctx, &fbar);
    for k in 1..ctx.precision() {
        let e = g.sub(&f.pow(a as usize, ctx), ctx);
        if e.is_zero() {
            break;
        }
        let e_div = e
            .div_by_p_pow(k, ctx)
            .map_err(|_| CurveError::BranchLocusCollapses)?;
        let e_bar = e_div.truncate_to(&ctx1);
        let h = e_bar
            .exact_div(&denom, &ctx1)
            .map_err(|_| CurveError::BranchLocusCollapses)?;
        f = f.add(&lift_poly(ctx, &h).mul_by_p_pow(k, ctx), ctx);
    }
    if !g.sub(&f.pow(a as usize, ctx), ctx).is_zero() {
        return Err(CurveError::BranchLocusCollapses);
    }
    Ok(f)
}

fn lift_poly(ctx: &PadicContext, p1: &ZqPoly) -> ZqPoly {
    let mut coeffs = vec![];
    for c in &p1.coeffs {
        let ints: Vec<num_bigint::BigInt> = c
            .coeffs()
            .iter()
            .map(|x| num_bigint::BigInt::from(x.clone()))
            .collect();
        coeffs.push(ctx.from_int_coeffs(&ints));
    }
    let mut p = ZqPoly { coeffs };
    p.trim(ctx);
    p
}

/// Radical structure of Delta: (r, m, gpoly, squarefree parts with
/// multiplicities, irreducible Hensel factors of r).
fn radical_structure(
    ctx: &PadicContext,
    delta: &ZqPoly,
) -> Result<(ZqPoly, u32, ZqPoly, Vec<ZqPoly>), CurveError> {
    let lc = delta.leading(ctx);
    if !ctx.is_unit(&lc) {
        return Err(CurveError::RadicalNotUnitLeading);
    }
    let lc_inv = ctx.invert(&lc)?;
    let delta0 = delta.scale(&lc_inv, ctx);
    let ctx1 = ctx.truncated(1)?;
    let delta0_bar = delta0.truncate_to(&ctx1);
    let sfd = fq_squarefree_decomposition(&ctx1, &delta0_bar);
    // Hensel-lift the pairwise-coprime grouped powers g_j^{m_j}.
    let grouped: Vec<ZqPoly> = sfd.iter().map(|(g, m)| g.pow(*m as usize, &ctx1)).collect();
    let lifted = hensel_lift_coprime(ctx, &delta0, &grouped).map_err(CurveError::Padic)?;
    let mut r = ZqPoly::one(ctx);
    let mut m_pow = 1u32;
    let mut rfactors_bar: Vec<ZqPoly> = vec![];
    for ((gbar, mult), gfull) in sfd.iter().zip(&lifted) {
        let froot = monic_nth_root(ctx, gfull, gbar, *mult)?;
        r = r.mul(&froot, ctx);
        m_pow = m_pow.max(*mult);
        rfactors_bar.extend(fq_factor_squarefree(&ctx1, gbar));
    }
    // g = r^m / Delta = lc^{-1} * (r^m / Delta0)
    let quotient = r
        .pow(m_pow as usize, ctx)
        .exact_div(&delta0, ctx)
        .map_err(|_| CurveError::NoCofactor)?;
    let gpoly = quotient.scale(&lc_inv, ctx);
    // Irreducible Hensel factors of r.
    let rfactors = if rfactors_bar.len() == 1 {
        vec![r.clone()]
    } else {
        hensel_lift_coprime(ctx, &r, &rfactors_bar).map_err(CurveError::Padic)?
    };
    Ok((r, m_pow, gpoly, rfactors))
}

/// Solve a Q + b dQ/dy = Delta through the adjugate of the Sylvester-type
/// matrix of the map (a, b) -> a Q + b dQ/dy; returns s = b.
fn solve_s(q: &BiPoly, delta: &ZqPoly, ctx: &PadicContext) -> Result<AVec, CurveError> {
    let d = q.deg_y();
    let qy = q.d_dy(ctx);
    let n = 2 * d - 1;
    let ring = ZqPolyRing { ctx };
    // columns: y^i Q for i < d-1, then y^j Q_y for j < d
    let mut m = vec![vec![ZqPoly::zero(); n]; n];
    for col in 0..d - 1 {
        for (k, c) in q.ycoeffs.iter().enumerate() {
            m[col + k][col] = c.clone();
        }
    }
    for col in 0..d {
        for (k, c) in qy.ycoeffs.iter().enumerate() {
            m[col + k][d - 1 + col] = c.clone();
        }
    }
    let cp = berkowitz_charpoly(&ring, &m);
    let mut det = cp[0].clone();
    if n % 2 == 1 {
        det = det.neg(ctx);
    }
    let sign = if det == *delta {
        1
    } else if det == delta.neg(ctx) {
        -1
    } else {
        return Err(CurveError::NoCofactor);
    };
    // adj(M) e0 via Horner: B = M^{n-1} + c_{n-1} M^{n-2} + ... + c_1 I,
    // adj = (-1)^{n-1} B.
    let mut e0 = vec![ZqPoly::zero(); n];
    e0[0] = ZqPoly::one(ctx);
    let mut v = e0.clone(); // B_{n-1} e0 = e0
    for k in (1..n).rev() {
        let mut nv = mat_vec_ring(&ring, &m, &v);
        nv[0] = nv[0].add(&cp[k], ctx);
        v = nv;
    }
    if n % 2 == 0 {
        for x in v.iter_mut() {
            *x = x.neg(ctx);
        }
    }
    if sign < 0 {
        for x in v.iter_mut() {
            *x = x.neg(ctx);
        }
    }
    // b-part: coefficients d-1 .. 2d-2
    let s: AVec = v[d - 1..].to_vec();
    // verify s * Q_y == Delta in A
    let qy_vec: AVec = {
        let mut yc = qy.ycoeffs.clone();
        yc.resize(d, ZqPoly::zero());
        yc
    };
    let prod = avec_mul(&s, &qy_vec, q, ctx);
    let mut ok = prod[0] == *delta;
    for c in prod.iter().skip(1) {
        ok &= c.is_zero();
    }
    if !ok {
        return Err(CurveError::NoCofactor);
    }
    Ok(s)
}

/// Inverse of an integral-basis matrix over its localized ring, with the
/// factored determinant.
fn rmat_inverse(
    mat: &RMat,
    r: &ZqPoly,
    rfactors: &[ZqPoly],
    allow_x_unit: bool,
    name: &'static str,
    ctx: &PadicContext,
) -> Result<(RMat, FactoredDet), CurveError> {
    let n = mat.len();
    let kmax = rmat::rmat_max_rpow(mat);
    let smin = mat
        .iter()
        .flat_map(|row| row.iter())
        .filter(|e| !e.is_zero())
        .map(|e| e.num.shift)
        .min()
        .unwrap_or(0)
        .min(0);
    // P = r^kmax x^{-smin} * mat, a polynomial matrix
    let rk = r.pow(kmax as usize, ctx);
    let mut p = vec![vec![ZqPoly::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let e = &mat[i][j];
            if e.is_zero() {
                continue;
            }
            let extra = r.pow((kmax - e.rpow) as usize, ctx);
            let num = e.num.mul(&LaurentPoly::from_poly(extra), ctx);
            let shifted = LaurentPoly {
                poly: num.poly.clone(),
                shift: num.shift - smin,
            };
            p[i][j] = shifted
                .to_poly(ctx)
                .ok_or(CurveError::MatrixNotInvertible(name))?;
        }
    }
    let ring = ZqPolyRing { ctx };
    let cp = berkowitz_charpoly(&ring, &p);
    let mut det = cp[0].clone();
    if n % 2 == 1 {
        det = det.neg(ctx);
    }
    if det.is_zero() {
        return Err(CurveError::MatrixNotInvertible(name));
    }
    // factor det = unit * x^a * prod f^e
    let mut xpow = 0u32;
    let mut rest = det.clone();
    while rest.degree().map_or(false, |d| d >= 1) && ctx.is_zero(&rest.coeff(0, ctx)) {
        rest.coeffs.remove(0);
        xpow += 1;
    }
    let mut fpows = vec![0u32; rfactors.len()];
    loop {
        let mut progressed = false;
        for (j, f) in rfactors.iter().enumerate() {
            while let Ok(q) = rest.exact_div(f, ctx) {
                rest = q;
                fpows[j] += 1;
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }
    if rest.degree() != Some(0) {
        return Err(CurveError::MatrixNotInvertible(name));
    }
    let unit = rest.coeffs[0].clone();
    if !ctx.is_unit(&unit) {
        return Err(CurveError::MatrixNotInvertible(name));
    }
    if xpow > 0 && !allow_x_unit {
        return Err(CurveError::MatrixNotInvertible(name));
    }
    let unit_inv = ctx.invert(&unit)?;
    let emax = fpows.iter().copied().max().unwrap_or(0);
    // complement factor: prod f_j^{emax - e_j}
    let mut comp = ZqPoly::one(ctx);
    for (f, &e) in rfactors.iter().zip(&fpows) {
        comp = comp.mul(&f.pow((emax - e) as usize, ctx), ctx);
    }
    // adjugate via the series at lambda = 0: adj(P) = (-1)^{n-1} B_0
    let adj_bs = adjugate_series(&ring, &p, &cp);
    let mut adj = adj_bs[0].clone();
    if n % 2 == 0 {
        for row in adj.iter_mut() {
            for x in row.iter_mut() {
                *x = x.neg(ctx);
            }
        }
    }
    // inverse entry: adj_ij * unit^{-1} * comp * r^{kmax} * x^{-smin-xpow} / r^{emax}
    let mut inv = vec![vec![REntry::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if adj[i][j].is_zero() {
                continue;
            }
            let num_poly = adj[i][j]
                .scale(&unit_inv, ctx)
                .mul(&comp, ctx)
                .mul(&rk, ctx);
            let mut e = REntry {
                num: LaurentPoly {
                    poly: num_poly,
                    shift: -smin - xpow as i64,
                },
                rpow: emax,
            };
            e.normalize(r, ctx);
            e.num.normalize(ctx);
            inv[i][j] = e;
        }
    }
    Ok((
        inv,
        FactoredDet {
            unit,
            xpow,
            fpows,
        },
    ))
}

fn check_no_x_denominators(mat: &RMat, name: &'static str) -> Result<(), CurveError> {
    for row in mat {
        for e in row {
            if !e.is_zero() && e.num.shift < 0 {
                return Err(CurveError::MatrixNotInvertible(name));
            }
        }
    }
    Ok(())
}

fn require_laurent(mat: &RMat, name: &'static str) -> Result<(), CurveError> {
    for row in mat {
        for e in row {
            if !e.is_zero() && e.rpow > 0 {
                return Err(CurveError::MatrixNotInvertible(name));
            }
        }
    }
    Ok(())
}

/// Multiplication-by-y' matrix composed with d/dy: column i holds the
/// y-coordinates of i * y^{i-1} * y', over r^m.
fn speed_matrix(cd_q: &BiPoly, s: &AVec, gpoly: &ZqPoly, m_pow: u32, ctx: &PadicContext) -> RMat {
    let d = cd_q.deg_y();
    let qx = cd_q.d_dx(ctx);
    let mut qx_vec: AVec = qx.ycoeffs.clone();
    qx_vec.resize(d, ZqPoly::zero());
    // y' = -Q_x * s * g / r^m
    let mut num = avec_mul(&qx_vec, s, cd_q, ctx);
    num = avec_scale(&num, gpoly, ctx);
    let num: AVec = num.iter().map(|c| c.neg(ctx)).collect();
    let mut cmat = vec![vec![REntry::zero(); d]; d];
    // column i: i * y^{i-1} * y'
    let mut ypow: AVec = {
        let mut v = avec_zero(d);
        v[0] = ZqPoly::one(ctx);
        v
    };
    for i in 1..d {
        // ypow = y^{i-1}
        let prod = avec_mul(&ypow, &num, cd_q, ctx);
        let scale = ctx.from_u64(i as u64);
        for (row, c) in prod.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            cmat[row][i] = REntry {
                num: LaurentPoly::from_poly(c.scale(&scale, ctx)),
                rpow: m_pow,
            };
        }
        // advance ypow to y^i
        let mut shifted = vec![ZqPoly::zero()];
        shifted.extend(ypow.iter().cloned());
        fold_y(&mut shifted, cd_q, ctx);
        shifted.resize(d, ZqPoly::zero());
        ypow = shifted;
    }
    cmat
}

/// Parse and validate the lifted curve data and compute every derived field.
pub fn build_curve(
    q: BiPoly,
    w0: RMat,
    winf: RMat,
    ctx: &PadicContext,
    e_overrides: Option<(u32, u32)>,
) -> Result<CurveData, CurveError> {
    let dx = q.deg_y();
    if dx < 1 || !q.is_monic_in_y(ctx) {
        return Err(CurveError::NotMonicInY);
    }
    if dx == 1 {
        return Err(CurveError::DegenerateCurve);
    }
    let dy = q.deg_x();
    // support must not change mod p: every nonzero coefficient is a unit
    for (i, c) in q.ycoeffs.iter().enumerate() {
        for (j, coef) in c.coeffs.iter().enumerate() {
            if !ctx.is_zero(coef) && !ctx.is_unit(coef) {
                return Err(CurveError::SupportChangedModP { xdeg: j, ydeg: i });
            }
        }
    }
    if w0.len() != dx || winf.len() != dx || w0.iter().any(|r| r.len() != dx)
        || winf.iter().any(|r| r.len() != dx)
    {
        return Err(CurveError::MatrixNotInvertible("shape"));
    }

    let delta = discriminant_y(&q, ctx);
    if delta.is_zero() {
        return Err(CurveError::BranchLocusCollapses);
    }
    let (r, m_pow, gpoly, rfactors) = radical_structure(ctx, &delta)?;
    if r.degree() == Some(0) {
        // no finite branch locus: the machinery needs deg(r) >= 1
        return Err(CurveError::DegenerateCurve);
    }
    let rprime = r.derivative(ctx);
    let s = solve_s(&q, &delta, ctx)?;

    // normalize the given matrices against the computed r
    let mut w0 = w0;
    let mut winf = winf;
    for row in w0.iter_mut().chain(winf.iter_mut()) {
        for e in row.iter_mut() {
            e.normalize(&r, ctx);
        }
    }
    check_no_x_denominators(&w0, "W0")?;

    let (w0_inv, det_w0) = rmat_inverse(&w0, &r, &rfactors, false, "W0", ctx)?;
    let (winf_inv, det_winf) = rmat_inverse(&winf, &r, &rfactors, true, "Winf", ctx)?;
    let w = rmat_mul(&w0_inv, &winf, &r, ctx);
    let w_inv = rmat_mul(&winf_inv, &w0, &r, ctx);
    require_laurent(&w, "W")?;
    require_laurent(&w_inv, "W^-1")?;

    // connection matrices
    let cmat = speed_matrix(&q, &s, &gpoly, m_pow, ctx);
    let dw0 = rmat_derivative(&w0, &r, &rprime, ctx);
    let cw0 = rmat_mul(&cmat, &w0, &r, ctx);
    let g0 = rmat_mul(&w0_inv, &rmat_add(&dw0, &cw0, &r, ctx), &r, ctx);
    let dwinf = rmat_derivative(&winf, &r, &rprime, ctx);
    let cwinf = rmat_mul(&cmat, &winf, &r, ctx);
    let ginf = rmat_mul(&winf_inv, &rmat_add(&dwinf, &cwinf, &r, ctx), &r, ctx);

    // r G0 must be polynomial (simple poles at the finite branch locus)
    let mut rg0 = vec![vec![ZqPoly::zero(); dx]; dx];
    for i in 0..dx {
        for j in 0..dx {
            let e = &g0[i][j];
            if e.is_zero() {
                continue;
            }
            if e.rpow > 1 || e.num.shift < 0 {
                return Err(CurveError::ConnectionPoleTooDeep);
            }
            let num = if e.rpow == 1 {
                e.num.clone()
            } else {
                e.num.mul(&LaurentPoly::from_poly(r.clone()), ctx)
            };
            rg0[i][j] = num.to_poly(ctx).ok_or(CurveError::ConnectionPoleTooDeep)?;
        }
    }

    let rdeg = r.degree().unwrap() as i64;
    let r_ord0 = {
        // order of vanishing of r at x = 0
        let mut k = 0usize;
        while k < r.coeffs.len() && ctx.is_zero(&r.coeffs[k]) {
            k += 1;
        }
        k as i64
    };
    let ords = OrdTable {
        ord0_w: rmat_ord_zero(&w, r_ord0, ctx),
        ordinf_w: rmat_ord_inf(&w, rdeg),
        ordinf_winv: rmat_ord_inf(&w_inv, rdeg),
        ordneinf_w0: rmat_ord_ne_inf(&w0, &rfactors, ctx),
        ordneinf_w0inv: rmat_ord_ne_inf(&w0_inv, &rfactors, ctx),
        ordinf_winf: rmat_ord_inf(&winf, rdeg),
        ordinf_winfinv: rmat_ord_inf(&winf_inv, rdeg),
    };

    let boundary =
        boundary::compute_boundary(&q, &w0, &winf, &w0_inv, &winf_inv, &r, &rfactors, ctx)?;
    let (e0, einf) = match e_overrides {
        Some((a, b)) => (a, b),
        None => (boundary.fin.nilp_index, boundary.inf.nilp_index),
    };

    Ok(CurveData {
        ctx: ctx.clone(),
        q,
        dx,
        dy,
        w0,
        winf,
        w0_inv,
        winf_inv,
        w,
        w_inv,
        delta,
        r,
        rprime,
        rfactors,
        m_pow,
        gpoly,
        s,
        g0,
        ginf,
        rg0,
        ords,
        det_w0,
        det_winf,
        boundary,
        e0,
        einf,
        genus: None,
    })
}

/// Verify the defining identities of the setup at working precision.
/// Used by tests and the property suite.
pub fn verify_setup_identities(cd: &CurveData) -> bool {
    let ctx = &cd.ctx;
    // r^m = g * Delta
    let lhs = cd.r.pow(cd.m_pow as usize, ctx);
    let rhs = cd.gpoly.mul(&cd.delta, ctx);
    if lhs != rhs {
        return false;
    }
    // s * Q_y = Delta in A
    let qy = cd.q.d_dy(ctx);
    let mut qy_vec: AVec = qy.ycoeffs.clone();
    qy_vec.resize(cd.dx, ZqPoly::zero());
    let prod = avec_mul(&cd.s, &qy_vec, &cd.q, ctx);
    if prod[0] != cd.delta || prod.iter().skip(1).any(|c| !c.is_zero()) {
        return false;
    }
    true
}

/// Q evaluated at an element of A (for tests): Q(x, beta) in A.
pub fn q_eval_in_a(q: &BiPoly, beta: &AVec, ctx: &PadicContext) -> AVec {
    bipoly_eval_avec(q, beta, q, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn ctx(p: u64, prec: u32) -> PadicContext {
        PadicContext::new(&BigUint::from(p), 1, prec, None).unwrap()
    }

    fn elliptic(ctx: &PadicContext, f_coeffs: &[i64]) -> (BiPoly, RMat, RMat) {
        let f = ZqPoly::from_i64_coeffs(ctx, f_coeffs);
        builtin::builtin_hyperelliptic(&f, ctx).unwrap()
    }

    #[test]
    fn resultant_examples() {
        let c = ctx(7, 6);
        // disc(y^2 - f) = 4 f
        let f = ZqPoly::from_i64_coeffs(&c, &[1, 1, 0, 1]);
        let q = BiPoly {
            ycoeffs: vec![f.neg(&c), ZqPoly::zero(), ZqPoly::one(&c)],
        };
        let disc = discriminant_y(&q, &c);
        assert_eq!(disc, f.scale(&c.from_u64(4), &c));

        // Res_y(y - c(x), 1) = 1
        let line = BiPoly {
            ycoeffs: vec![
                ZqPoly::from_i64_coeffs(&c, &[3, 2]).neg(&c),
                ZqPoly::one(&c),
            ],
        };
        let one = BiPoly {
            ycoeffs: vec![ZqPoly::one(&c)],
        };
        assert_eq!(poly_resultant_y(&line, &one, &c), ZqPoly::one(&c));

        // disc(y^3 - x) = -27 x^2
        let q3 = BiPoly {
            ycoeffs: vec![
                ZqPoly::x(&c).neg(&c),
                ZqPoly::zero(),
                ZqPoly::zero(),
                ZqPoly::one(&c),
            ],
        };
        let d3 = discriminant_y(&q3, &c);
        let expect = ZqPoly::monomial(&c, c.neg(&c.from_u64(27)), 2);
        assert_eq!(d3, expect);
    }

    #[test]
    fn build_elliptic_curve_fields() {
        let c = ctx(7, 8);
        let (q, w0, winf) = elliptic(&c, &[1, 1, 0, 1]);
        let cd = build_curve(q, w0, winf, &c, None).unwrap();
        // Delta = 4 f, r = f, m = 1, g = 1/4
        let f = ZqPoly::from_i64_coeffs(&c, &[1, 1, 0, 1]);
        assert_eq!(cd.delta, f.scale(&c.from_u64(4), &c));
        assert_eq!(cd.r, f);
        assert_eq!(cd.m_pow, 1);
        let four_g = cd.gpoly.scale(&c.from_u64(4), &c);
        assert_eq!(four_g, ZqPoly::one(&c));
        // s = 2y
        assert!(cd.s[0].is_zero());
        assert_eq!(cd.s[1], ZqPoly::from_i64_coeffs(&c, &[2]));
        assert!(verify_setup_identities(&cd));
        // G0 = [[0,0],[0, f'/(2f)]]: check r G0 entries
        assert!(cd.rg0[0][0].is_zero());
        assert!(cd.rg0[0][1].is_zero());
        assert!(cd.rg0[1][0].is_zero());
        // f'/2 with 2^{-1} mod 7^8
        let half = c.invert(&c.from_u64(2)).unwrap();
        assert_eq!(cd.rg0[1][1], f.derivative(&c).scale(&half, &c));
        // ord table for W = diag(1, x^{-2})
        assert_eq!(cd.ords.ord0_w, -2);
        assert_eq!(cd.ords.ordinf_w, 0);
        assert_eq!(cd.ords.ordinf_winv, -2);
        // exact ramification: hyperelliptic boundary is doubly ramified
        assert_eq!(cd.e0, 2);
        assert_eq!(cd.einf, 2);
    }

    #[test]
    fn degenerate_line_rejected() {
        let c = ctx(5, 4);
        let q = BiPoly {
            ycoeffs: vec![ZqPoly::x(&c).neg(&c), ZqPoly::one(&c)],
        };
        let w: RMat = vec![vec![REntry::one(&c)]];
        assert!(matches!(
            build_curve(q, w.clone(), w, &c, None),
            Err(CurveError::DegenerateCurve)
        ));
    }

    #[test]
    fn support_change_rejected() {
        let c = ctx(5, 4);
        // y^2 - (x^3 + 5x + 1): the x-coefficient vanishes mod 5
        let f = ZqPoly::from_i64_coeffs(&c, &[1, 5, 0, 1]);
        let q = BiPoly {
            ycoeffs: vec![f.neg(&c), ZqPoly::zero(), ZqPoly::one(&c)],
        };
        let w0 = rmat::rmat_identity(2, &c);
        let winf = rmat::rmat_identity(2, &c);
        assert!(matches!(
            build_curve(q, w0, winf, &c, None),
            Err(CurveError::SupportChangedModP { .. })
        ));
    }
}
