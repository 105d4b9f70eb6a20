//! Cohomology of the curve: construction of the basis omega_1..omega_kappa
//! of H^1_rig(U) with integral-coordinate normalization, the residue kernel
//! cutting out the 2g-dimensional H^1_rig(X), and the reduction of 1-forms
//! back to the basis.

pub mod reduce;

use crate::curve::{CurveData, ResidueData};
use crate::error::CohomologyError;
use crate::padic::linalg::{
    field_kernel, lattice_saturated_echelon, qq_mat_vec, qq_poly_from_zq, qq_poly_rem, qq_solve,
    Echelon, KfRing, QqMat, QqRing, VAL_INF,
};
use crate::padic::{LaurentPoly, PadicContext, QqPoly, QqScalar, ZqPoly};

pub use reduce::{reduce_to_matrix, FrobMatrixF, ReductionCache, ReductionStats};

/// Laurent polynomial over Q_q: sum coeffs[i] x^{shift + i}.
#[derive(Clone, Debug)]
pub struct QqLaurent {
    pub coeffs: Vec<QqScalar>,
    pub shift: i64,
}

impl QqLaurent {
    pub fn zero() -> Self {
        QqLaurent {
            coeffs: vec![],
            shift: 0,
        }
    }

    pub fn is_zero(&self, ctx: &PadicContext) -> bool {
        self.coeffs.iter().all(|c| ctx.qq_is_zero(c))
    }

    pub fn normalize(&mut self, ctx: &PadicContext) {
        while self.coeffs.last().map_or(false, |c| ctx.qq_is_zero(c)) {
            self.coeffs.pop();
        }
        let lead_zeros = self
            .coeffs
            .iter()
            .take_while(|c| ctx.qq_is_zero(c))
            .count();
        if lead_zeros > 0 {
            self.coeffs.drain(..lead_zeros);
            self.shift += lead_zeros as i64;
        }
        if self.coeffs.is_empty() {
            self.shift = 0;
        }
    }

    pub fn ord_inf(&self, ctx: &PadicContext) -> i64 {
        let mut m = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            if !ctx.qq_is_zero(c) {
                m = Some(self.shift + i as i64);
            }
        }
        match m {
            Some(v) => -v,
            None => VAL_INF,
        }
    }

    pub fn coeff_at(&self, k: i64, ctx: &PadicContext) -> QqScalar {
        let idx = k - self.shift;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            ctx.qq_zero()
        } else {
            self.coeffs[idx as usize].clone()
        }
    }

    pub fn add(&self, other: &Self, ctx: &PadicContext) -> Self {
        if self.coeffs.is_empty() {
            return other.clone();
        }
        if other.coeffs.is_empty() {
            return self.clone();
        }
        let shift = self.shift.min(other.shift);
        let top = (self.shift + self.coeffs.len() as i64).max(other.shift + other.coeffs.len() as i64);
        let mut coeffs = vec![ctx.qq_zero(); (top - shift) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.shift - shift) as usize + i] = c.clone();
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            let idx = (other.shift - shift) as usize + i;
            coeffs[idx] = ctx.qq_add(&coeffs[idx], c);
        }
        let mut out = QqLaurent { coeffs, shift };
        out.normalize(ctx);
        out
    }

    pub fn sub(&self, other: &Self, ctx: &PadicContext) -> Self {
        let neg = QqLaurent {
            coeffs: other.coeffs.iter().map(|c| ctx.qq_neg(c)).collect(),
            shift: other.shift,
        };
        self.add(&neg, ctx)
    }

    pub fn scale(&self, c: &QqScalar, ctx: &PadicContext) -> Self {
        let mut out = QqLaurent {
            coeffs: self.coeffs.iter().map(|x| ctx.qq_mul(x, c)).collect(),
            shift: self.shift,
        };
        out.normalize(ctx);
        out
    }

    pub fn mul_zq_laurent(&self, l: &LaurentPoly, ctx: &PadicContext) -> Self {
        if self.coeffs.is_empty() || l.is_zero() {
            return QqLaurent::zero();
        }
        let mut coeffs = vec![ctx.qq_zero(); self.coeffs.len() + l.poly.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if ctx.qq_is_zero(a) {
                continue;
            }
            for (j, b) in l.poly.coeffs.iter().enumerate() {
                if ctx.is_zero(b) {
                    continue;
                }
                let t = ctx.qq_mul(a, &QqScalar::from_zq(b.clone()));
                coeffs[i + j] = ctx.qq_add(&coeffs[i + j], &t);
            }
        }
        let mut out = QqLaurent {
            coeffs,
            shift: self.shift + l.shift,
        };
        out.normalize(ctx);
        out
    }

    pub fn derivative(&self, ctx: &PadicContext) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = self.shift + i as i64;
            let kk = ctx.from_bigint(&num_bigint::BigInt::from(k));
            coeffs.push(ctx.qq_mul(c, &QqScalar::from_zq(kk)));
        }
        let mut out = QqLaurent {
            coeffs,
            shift: self.shift - 1,
        };
        out.normalize(ctx);
        out
    }

    pub fn from_qq_poly(p: &QqPoly) -> Self {
        QqLaurent {
            coeffs: p.clone(),
            shift: 0,
        }
    }

    pub fn min_val(&self, ctx: &PadicContext) -> i64 {
        let mut v = VAL_INF;
        for c in &self.coeffs {
            v = v.min(ctx.qq_val(c));
        }
        v
    }
}

/// The basis of H^1_rig(U) with the first 2g forms spanning the residue
/// kernel H^1_rig(X).
#[derive(Clone, Debug)]
pub struct CohomologyBasis {
    pub genus: usize,
    pub kappa: usize,
    pub d_max: i64,
    pub ambient_cols: usize,
    /// Final basis forms as integral polynomial coefficient vectors.
    pub omega_vecs: Vec<Vec<ZqPoly>>,
    b_ech: Echelon,
    stage_rows: Vec<Vec<QqScalar>>,
    stage_pivots: Vec<usize>,
    /// Converts stage coordinates to coordinates in the arranged basis.
    u_inv_t: QqMat,
    /// Saturation losses incurred while building lattice bases.
    pub build_loss: u32,
}

fn ambient_index(dx_idx: usize, xdeg: usize, width: usize) -> usize {
    dx_idx * width + xdeg
}

/// Columns of W^{-1} (or W) as Laurent vectors for frame conversion.
fn mat_columns_laurent(m: &crate::curve::RMat) -> Vec<Vec<LaurentPoly>> {
    let n = m.len();
    (0..n)
        .map(|j| (0..n).map(|i| m[i][j].num.clone()).collect())
        .collect()
}

/// u (polynomial vector) -> W^{-1} u in the b^inf frame.
pub fn to_infinity_frame(
    cd: &CurveData,
    u: &[QqPoly],
    ctx: &PadicContext,
) -> Vec<QqLaurent> {
    let dx = cd.dx;
    let mut out = vec![QqLaurent::zero(); dx];
    for j in 0..dx {
        let uj = QqLaurent::from_qq_poly(&u[j]);
        if uj.coeffs.is_empty() {
            continue;
        }
        for i in 0..dx {
            let e = &cd.w_inv[i][j];
            if e.is_zero() {
                continue;
            }
            let t = uj.mul_zq_laurent(&e.num, ctx);
            out[i] = out[i].add(&t, ctx);
        }
    }
    out
}

/// u_inf (Laurent vector in the b^inf frame) -> W u_inf back in the b^0 frame.
pub fn from_infinity_frame(
    cd: &CurveData,
    uinf: &[QqLaurent],
    ctx: &PadicContext,
) -> Vec<QqLaurent> {
    let dx = cd.dx;
    let mut out = vec![QqLaurent::zero(); dx];
    for j in 0..dx {
        if uinf[j].coeffs.is_empty() {
            continue;
        }
        for i in 0..dx {
            let e = &cd.w[i][j];
            if e.is_zero() {
                continue;
            }
            let t = uinf[j].mul_zq_laurent(&e.num, ctx);
            out[i] = out[i].add(&t, ctx);
        }
    }
    out
}

/// Build the membership-condition matrix for polynomial vectors of degree
/// at most `vdeg`, requiring all x^j coefficients of (W^{-1} v)_i with
/// j > t_max to vanish.  Returns (conditions, ambient width vdeg+1).
fn window_conditions(
    cd: &CurveData,
    vdeg: i64,
    t_max: i64,
    ctx: &PadicContext,
) -> QqMat {
    let dx = cd.dx;
    let width = (vdeg + 1) as usize;
    let cols = dx * width;
    // generator (i, k): W^{-1} column i shifted by x^k
    let winv_cols = mat_columns_laurent(&cd.w_inv);
    // maximal degree appearing
    let mut jmax = t_max;
    for col in &winv_cols {
        for l in col {
            if !l.is_zero() {
                jmax = jmax.max(l.shift + l.poly.deg_i() + vdeg);
            }
        }
    }
    let mut rows: QqMat = vec![];
    if jmax <= t_max {
        return rows;
    }
    // one condition per (output component i, degree j in (t_max, jmax])
    for comp in 0..dx {
        for j in (t_max + 1)..=jmax {
            let mut row = vec![ctx.qq_zero(); cols];
            let mut any = false;
            for gen_i in 0..dx {
                let entry = &winv_cols[gen_i][comp];
                if entry.is_zero() {
                    continue;
                }
                for k in 0..width {
                    // coefficient of x^j in x^k * entry
                    let c = entry.coeff_at(j - k as i64, ctx);
                    if !ctx.is_zero(&c) {
                        row[ambient_index(gen_i, k, width)] = QqScalar::from_zq(c);
                        any = true;
                    }
                }
            }
            if any {
                rows.push(row);
            }
        }
    }
    rows
}

/// Kernel of the window conditions as a saturated lattice basis.
fn window_lattice(cd: &CurveData, vdeg: i64, t_max: i64, ctx: &PadicContext) -> (Echelon, usize) {
    let dx = cd.dx;
    let width = (vdeg + 1).max(0) as usize;
    let cols = dx * width;
    if width == 0 {
        return (
            Echelon {
                rows: vec![],
                pivot_cols: vec![],
                loss: 0,
            },
            0,
        );
    }
    let conds = window_conditions(cd, vdeg, t_max, ctx);
    let kernel = if conds.is_empty() {
        // whole space
        (0..cols)
            .map(|c| {
                let mut v = vec![ctx.qq_zero(); cols];
                v[c] = ctx.qq_one();
                v
            })
            .collect()
    } else {
        crate::padic::linalg::qq_kernel(ctx, &conds)
    };
    (lattice_saturated_echelon(ctx, &kernel), cols)
}

/// dim H^0(X, O): must be 1 for a geometrically connected curve.
/// Global functions are polynomial vectors with ord_inf(W^{-1} v) >= 0,
/// i.e. no positive x-degrees in the b^inf frame.
pub fn global_function_dimension(cd: &CurveData) -> usize {
    let ctx = &cd.ctx;
    let vdeg = -cd.ords.ordinf_w;
    if vdeg < 0 {
        return 0;
    }
    let (ech, _) = window_lattice(cd, vdeg, 0, ctx);
    ech.rows.len()
}

/// Exterior derivative of a function vector v (polynomial coefficients in
/// the b^0 frame): dh = (r v' + r G0 v) b^0 dx / r.
pub fn function_differential(cd: &CurveData, v: &[ZqPoly], ctx: &PadicContext) -> Vec<ZqPoly> {
    let dx = cd.dx;
    let mut out = vec![ZqPoly::zero(); dx];
    for i in 0..dx {
        out[i] = cd.r.mul(&v[i].derivative(ctx), ctx);
    }
    for i in 0..dx {
        for j in 0..dx {
            if cd.rg0[i][j].is_zero() || v[j].is_zero() {
                continue;
            }
            out[i] = out[i].add(&cd.rg0[i][j].mul(&v[j], ctx), ctx);
        }
    }
    out
}

pub fn build_basis(
    cd: &CurveData,
    rd: &ResidueData,
) -> Result<CohomologyBasis, CohomologyError> {
    let ctx = &cd.ctx;
    let dx = cd.dx;
    let deg_r = cd.deg_r() as i64;

    // geometric connectedness
    let h0 = global_function_dimension(cd);
    if h0 != 1 {
        return Err(CohomologyError::RankDeficient(format!(
            "dim H^0 = {h0}, expected 1 (curve not geometrically connected?)"
        )));
    }

    let d_max = deg_r - 2 - cd.ords.ord0_w - cd.ords.ordinf_w;
    let t_max = deg_r - 2 - cd.ords.ord0_w;
    let (e_ech, ambient_cols) = window_lattice(cd, d_max, t_max, ctx);
    let width = (d_max + 1).max(0) as usize;

    // d(B0 cap Binf): functions of degree <= -ord0(W) - ordinf(W) - 1 with
    // ordinf(W^{-1} v) > ord0(W)
    let d_b = -cd.ords.ord0_w - cd.ords.ordinf_w - 1;
    let t_b = -cd.ords.ord0_w - 1;
    let (b_fun_ech, _) = window_lattice(cd, d_b, t_b, ctx);
    let bwidth = (d_b + 1).max(0) as usize;

    let mut db_rows: QqMat = vec![];
    for row in &b_fun_ech.rows {
        // function vector v from ambient coords
        let mut v = vec![ZqPoly::zero(); dx];
        let mut vshift = 0i64;
        for x in row.iter() {
            vshift = vshift.min(x.shift);
        }
        // rows are integral after saturation (unit pivots); vshift >= 0
        let _ = vshift;
        for i in 0..dx {
            let mut coeffs = vec![];
            for k in 0..bwidth {
                let c = &row[ambient_index(i, k, bwidth)];
                let cn = ctx.qq_normalize(c);
                let coef = if cn.shift < 0 {
                    // junk below the lattice floor; treat as zero
                    ctx.zero()
                } else {
                    ctx.mul_by_p_pow(&cn.m, cn.shift.min(ctx.precision() as i64) as u32)
                };
                coeffs.push(coef);
            }
            let mut p = ZqPoly { coeffs };
            p.trim(ctx);
            v[i] = p;
        }
        let du = function_differential(cd, &v, ctx);
        // embed into ambient coordinates of the form space
        let mut arow = vec![ctx.qq_zero(); ambient_cols];
        let mut fits = true;
        for (i, poly) in du.iter().enumerate() {
            for (k, c) in poly.coeffs.iter().enumerate() {
                if ctx.is_zero(c) {
                    continue;
                }
                if k >= width {
                    fits = false;
                    break;
                }
                arow[ambient_index(i, k, width)] = QqScalar::from_zq(c.clone());
            }
        }
        if !fits {
            return Err(CohomologyError::RankDeficient(
                "differential of a bounded function leaves the form window".into(),
            ));
        }
        db_rows.push(arow);
    }
    let b_ech = lattice_saturated_echelon(ctx, &db_rows);

    // quotient: reduce the E-lattice basis by the exact-form lattice
    let mut reduced_rows: QqMat = vec![];
    for row in &e_ech.rows {
        let (_, rem) = b_ech.reduce(ctx, row);
        reduced_rows.push(rem);
    }
    // exact Hermite-style echelon (no saturation: the image lattice matters)
    let (stage_rows, stage_pivots) = hermite_rows(ctx, reduced_rows);
    let kappa = stage_rows.len();

    // residue conditions on the stage forms
    let cache = reduce::ReductionCache::new(cd, rd)?;
    let mut cond_rows: Vec<Vec<QqScalar>> = vec![];
    let stage_polys: Vec<Vec<QqPoly>> = stage_rows
        .iter()
        .map(|row| row_to_upolys(ctx, row, dx, width))
        .collect();

    // finite conditions per Hensel factor
    for f in &cd.rfactors {
        let fld = KfRing { ctx, f };
        let m0f: Vec<Vec<QqPoly>> = (0..dx)
            .map(|i| {
                (0..dx)
                    .map(|j| qq_poly_rem(ctx, &qq_poly_from_zq(&rd.m0[i][j]), f))
                    .collect()
            })
            .collect();
        // (M0 mod f)^dx and the left kernel rows
        let mut pow = m0f.clone();
        for _ in 1..dx {
            pow = crate::padic::linalg::mat_mul_ring(&fld, &pow, &m0f);
        }
        let powt: Vec<Vec<QqPoly>> = (0..dx)
            .map(|i| (0..dx).map(|j| pow[j][i].clone()).collect())
            .collect();
        let left_null = field_kernel(&fld, &powt);
        let fdeg = f.degree().unwrap();
        for z in &left_null {
            // condition: sum_i z_i * (u_i mod f) = 0 in K_f
            let mut rows = vec![vec![ctx.qq_zero(); kappa]; fdeg];
            for (w_idx, upolys) in stage_polys.iter().enumerate() {
                let mut acc: QqPoly = vec![];
                for i in 0..dx {
                    let ui = qq_poly_rem(ctx, &upolys[i], f);
                    let t = crate::padic::linalg::qq_poly_mul_mod(ctx, &z[i], &ui, f);
                    acc = crate::padic::linalg::qq_poly_add(ctx, &acc, &t);
                }
                for (ci, c) in acc.iter().enumerate() {
                    rows[ci][w_idx] = c.clone();
                }
            }
            cond_rows.extend(rows);
        }
    }

    // infinite conditions through the leading vector after peeling
    {
        let fld = QqRing { ctx };
        let mut pow = rd.minf.clone();
        for _ in 1..dx {
            pow = crate::padic::linalg::qq_mat_mul(ctx, &pow, &rd.minf);
        }
        let powt: QqMat = (0..dx)
            .map(|i| (0..dx).map(|j| pow[j][i].clone()).collect())
            .collect();
        let left_null = field_kernel(&fld, &powt);
        if !left_null.is_empty() {
            let mut vtops = Vec::with_capacity(stage_polys.len());
            for upolys in &stage_polys {
                vtops.push(infinity_leading_vector(cd, &cache, upolys, ctx)?);
            }
            for z in &left_null {
                let mut row = vec![ctx.qq_zero(); kappa];
                for (w_idx, vt) in vtops.iter().enumerate() {
                    let mut acc = ctx.qq_zero();
                    for i in 0..dx {
                        acc = ctx.qq_add(&acc, &ctx.qq_mul(&z[i], &vt[i]));
                    }
                    row[w_idx] = acc;
                }
                cond_rows.push(row);
            }
        }
    }

    // kernel of the conditions inside the omega-coordinate space
    let kernel = if cond_rows.is_empty() {
        (0..kappa)
            .map(|c| {
                let mut v = vec![ctx.qq_zero(); kappa];
                v[c] = ctx.qq_one();
                v
            })
            .collect()
    } else {
        crate::padic::linalg::qq_kernel(ctx, &cond_rows)
    };
    let k_ech = lattice_saturated_echelon(ctx, &kernel);
    let two_g = k_ech.rows.len();
    if two_g % 2 != 0 {
        return Err(CohomologyError::RankDeficient(format!(
            "residue kernel has odd dimension {two_g}"
        )));
    }
    let genus = two_g / 2;
    if genus > cd.genus_bound() {
        return Err(CohomologyError::RankDeficient(format!(
            "genus {genus} exceeds the bound {}",
            cd.genus_bound()
        )));
    }
    // kappa = 2g + #boundary points - 1
    let points = cd.boundary.fin.rank_reduced + cd.boundary.inf.rank_reduced;
    if kappa != two_g + points - 1 {
        return Err(CohomologyError::RankDeficient(format!(
            "kappa = {kappa} but 2g + points - 1 = {}",
            two_g + points - 1
        )));
    }

    // arrange: U rows = kernel rows then completion unit vectors
    let mut u_rows: QqMat = k_ech.rows.clone();
    for c in 0..kappa {
        if !k_ech.pivot_cols.contains(&c) {
            let mut v = vec![ctx.qq_zero(); kappa];
            v[c] = ctx.qq_one();
            u_rows.push(v);
        }
    }
    debug_assert_eq!(u_rows.len(), kappa);
    // (U^T)^{-1}
    let ut: QqMat = (0..kappa)
        .map(|i| (0..kappa).map(|j| u_rows[j][i].clone()).collect())
        .collect();
    let u_inv_t = invert_qq_matrix(ctx, &ut)?;

    // final basis vectors: new_i = sum_j U[i][j] stage_j, as integral polys
    let mut omega_vecs = vec![];
    for urow in &u_rows {
        let mut acc = vec![ctx.qq_zero(); ambient_cols];
        for (j, c) in urow.iter().enumerate() {
            if ctx.qq_is_zero(c) {
                continue;
            }
            for (col, s) in stage_rows[j].iter().enumerate() {
                acc[col] = ctx.qq_add(&acc[col], &ctx.qq_mul(c, s));
            }
        }
        omega_vecs.push(ambient_to_zq_polys(ctx, &acc, dx, width));
    }

    let build_loss = e_ech.loss + b_fun_ech.loss + b_ech.loss + k_ech.loss;
    Ok(CohomologyBasis {
        genus,
        kappa,
        d_max,
        ambient_cols,
        omega_vecs,
        b_ech,
        stage_rows,
        stage_pivots,
        u_inv_t,
        build_loss,
    })
}

fn row_to_upolys(ctx: &PadicContext, row: &[QqScalar], dx: usize, width: usize) -> Vec<QqPoly> {
    (0..dx)
        .map(|i| {
            let mut p: QqPoly = (0..width)
                .map(|k| row[ambient_index(i, k, width)].clone())
                .collect();
            crate::padic::linalg::qq_poly_trim(ctx, &mut p);
            p
        })
        .collect()
}

fn ambient_to_zq_polys(
    ctx: &PadicContext,
    row: &[QqScalar],
    dx: usize,
    width: usize,
) -> Vec<ZqPoly> {
    (0..dx)
        .map(|i| {
            let mut coeffs = vec![];
            for k in 0..width {
                let c = ctx.qq_normalize(&row[ambient_index(i, k, width)]);
                let coef = if ctx.is_zero(&c.m) || c.shift < 0 {
                    ctx.zero()
                } else {
                    ctx.mul_by_p_pow(&c.m, c.shift.min(ctx.precision() as i64) as u32)
                };
                coeffs.push(coef);
            }
            let mut p = ZqPoly { coeffs };
            p.trim(ctx);
            p
        })
        .collect()
}

/// Hermite-style echelon over Z_q allowing p-power pivots (no saturation:
/// the row lattice is preserved exactly).  Entries at or above the junk
/// floor count as zero: rows of pure precision noise are dropped rather
/// than promoted to pivots.
fn hermite_rows(ctx: &PadicContext, gens: QqMat) -> (QqMat, Vec<usize>) {
    let junk_floor = (ctx.precision() as i64 * 2) / 3;
    let mut work = gens;
    let mut out: QqMat = vec![];
    let mut pivots = vec![];
    loop {
        // select the row with the minimal-valuation entry
        let mut best: Option<(i64, usize, usize)> = None;
        for (ri, row) in work.iter().enumerate() {
            for (ci, x) in row.iter().enumerate() {
                let v = ctx.qq_val(x);
                if v < junk_floor && best.map_or(true, |(bv, _, _)| v < bv) {
                    best = Some((v, ri, ci));
                }
            }
        }
        let (pv, ri, ci) = match best {
            Some(t) => t,
            None => break,
        };
        let mut row = work.remove(ri);
        // normalize so the pivot is exactly p^pv
        let pivot = ctx.qq_normalize(&row[ci]);
        let unit_inv = ctx
            .invert(&pivot.m)
            .expect("normalized pivot has unit mantissa");
        let scale = QqScalar::from_zq(unit_inv);
        for x in row.iter_mut() {
            *x = ctx.qq_mul(x, &scale);
        }
        // eliminate the column elsewhere (all other entries have val >= pv)
        for other in work.iter_mut().chain(out.iter_mut()) {
            let e = other[ci].clone();
            if ctx.qq_is_zero(&e) {
                continue;
            }
            // factor = e / p^pv (integral)
            let factor = QqScalar {
                m: e.m,
                shift: e.shift - pv,
            };
            for j in 0..other.len() {
                let t = ctx.qq_mul(&factor, &row[j]);
                other[j] = ctx.qq_sub(&other[j], &t);
            }
        }
        out.push(row);
        pivots.push(ci);
    }
    (out, pivots)
}

fn invert_qq_matrix(ctx: &PadicContext, m: &QqMat) -> Result<QqMat, CohomologyError> {
    let n = m.len();
    let mut cols = vec![];
    for j in 0..n {
        let mut e = vec![ctx.qq_zero(); n];
        e[j] = ctx.qq_one();
        let (x, _loss) = qq_solve(ctx, m, &e).map_err(CohomologyError::Padic)?;
        cols.push(x);
    }
    Ok((0..n)
        .map(|i| (0..n).map(|j| cols[j][i].clone()).collect())
        .collect())
}

/// Leading vector at infinity after peeling: converts to the b^inf frame,
/// applies infinite reduction steps until ord_inf > -deg r, then reads the
/// coefficient vector of x^{deg r - 1}.
fn infinity_leading_vector(
    cd: &CurveData,
    cache: &ReductionCache,
    upolys: &[QqPoly],
    ctx: &PadicContext,
) -> Result<Vec<QqScalar>, CohomologyError> {
    let deg_r = cd.deg_r() as i64;
    let mut w = to_infinity_frame(cd, upolys, ctx);
    let mut guard = 0;
    while w.iter().map(|l| l.ord_inf(ctx)).min().unwrap_or(VAL_INF) <= -deg_r {
        let (nw, _v, _loss) = reduce::infinite_step(cd, cache, &w, ctx)?;
        w = nw;
        guard += 1;
        if guard > 100000 {
            return Err(CohomologyError::RankDeficient(
                "infinite reduction fails to terminate".into(),
            ));
        }
    }
    Ok((0..cd.dx)
        .map(|i| w[i].coeff_at(deg_r - 1, ctx))
        .collect())
}

impl CohomologyBasis {
    /// Coordinates of a form (ambient coefficient vector) in the arranged
    /// basis; also returns the worst junk valuation of the remainder.
    pub fn coordinates(
        &self,
        ctx: &PadicContext,
        ambient: &[QqScalar],
    ) -> Result<(Vec<QqScalar>, i64), CohomologyError> {
        let (_, mut rem) = self.b_ech.reduce(ctx, ambient);
        let mut stage_coords = vec![ctx.qq_zero(); self.kappa];
        for (idx, (row, &pc)) in self.stage_rows.iter().zip(&self.stage_pivots).enumerate() {
            let e = rem[pc].clone();
            if ctx.qq_is_zero(&e) {
                continue;
            }
            // pivot is p^{v}; dividing shifts down
            let pv = ctx.qq_val(&row[pc]);
            let c = QqScalar {
                m: e.m.clone(),
                shift: e.shift - pv,
            };
            stage_coords[idx] = c.clone();
            for j in 0..rem.len() {
                let t = ctx.qq_mul(&c, &row[j]);
                rem[j] = ctx.qq_sub(&rem[j], &t);
            }
        }
        let mut junk = VAL_INF;
        for x in &rem {
            junk = junk.min(ctx.qq_val(x));
        }
        let stage_coords: Vec<QqScalar> =
            stage_coords.iter().map(|c| ctx.qq_normalize(c)).collect();
        let coords: Vec<QqScalar> = qq_mat_vec(ctx, &self.u_inv_t, &stage_coords)
            .into_iter()
            .map(|c| ctx.qq_normalize(&c))
            .collect();
        Ok((coords, junk))
    }
}
