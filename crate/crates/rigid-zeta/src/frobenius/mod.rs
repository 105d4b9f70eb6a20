//! The Frobenius lift on the overconvergent rings: alpha = Frob(1/r) and
//! beta = Frob(y) by quadratically convergent recursions, the matrices Phi
//! (y-power frame) and Psi (b^0/r frame), and the push-forward of the
//! cohomology basis forms.
//!
//! Everything in this phase stays integral: denominators only appear later
//! in the reduction cascades.

use crate::cohomology::reduce::PushedForm;
use crate::curve::{avec_zero, AVec, BiPoly, CurveData, REntry};
use crate::error::FrobeniusError;
use crate::padic::{PadicContext, ZqPoly};

/// Truncated r-adic expansion of an overconvergent function:
/// sum_k pole[k] / r^{k+1} + poly, with deg(pole[k]) < deg r.
#[derive(Clone, Debug)]
pub struct DaggerSeries {
    pub pole: Vec<ZqPoly>,
    pub poly: ZqPoly,
}

impl DaggerSeries {
    pub fn zero() -> Self {
        DaggerSeries {
            pole: vec![],
            poly: ZqPoly::zero(),
        }
    }

    pub fn from_poly(p: ZqPoly) -> Self {
        DaggerSeries {
            pole: vec![],
            poly: p,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero() && self.pole.iter().all(|p| p.is_zero())
    }

    pub fn max_pole(&self) -> usize {
        let mut k = self.pole.len();
        while k > 0 && self.pole[k - 1].is_zero() {
            k -= 1;
        }
        k
    }

    pub fn content_val(&self, ctx: &PadicContext) -> u32 {
        let mut v = self.poly.content_val(ctx);
        for p in &self.pole {
            v = v.min(p.content_val(ctx));
            if v == 0 {
                break;
            }
        }
        v
    }

    pub fn add(&self, other: &Self, ctx: &PadicContext) -> Self {
        let len = self.pole.len().max(other.pole.len());
        let mut pole = Vec::with_capacity(len);
        for k in 0..len {
            let a = self.pole.get(k).cloned().unwrap_or_else(ZqPoly::zero);
            let b = other.pole.get(k).cloned().unwrap_or_else(ZqPoly::zero);
            pole.push(a.add(&b, ctx));
        }
        DaggerSeries {
            pole,
            poly: self.poly.add(&other.poly, ctx),
        }
    }

    pub fn sub(&self, other: &Self, ctx: &PadicContext) -> Self {
        self.add(&other.neg(ctx), ctx)
    }

    pub fn neg(&self, ctx: &PadicContext) -> Self {
        DaggerSeries {
            pole: self.pole.iter().map(|p| p.neg(ctx)).collect(),
            poly: self.poly.neg(ctx),
        }
    }

    pub fn scale(&self, c: &crate::padic::ZqElem, ctx: &PadicContext) -> Self {
        DaggerSeries {
            pole: self.pole.iter().map(|p| p.scale(c, ctx)).collect(),
            poly: self.poly.scale(c, ctx),
        }
    }

    pub fn truncate_to(&self, ctx: &PadicContext) -> Self {
        DaggerSeries {
            pole: self.pole.iter().map(|p| p.truncate_to(ctx)).collect(),
            poly: self.poly.truncate_to(ctx),
        }
    }
}

/// Shared state of the Frobenius phase: the pipeline context (at the working
/// precision), cached powers of r, and the shape bounds.
pub struct FrobEngine<'a> {
    pub cd: &'a CurveData,
    pub ctx: &'a PadicContext,
    r1: ZqPoly,
    r_pow_cache: std::collections::HashMap<usize, ZqPoly>,
    pub deg_r: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct ShapeBounds {
    pub max_pole: usize,
    /// None: unbounded polynomial part; Some(d): degree <= d (d < 0 empty).
    pub max_poly_deg: Option<i64>,
}

impl<'a> FrobEngine<'a> {
    pub fn new(cd: &'a CurveData, ctx: &'a PadicContext, _max_pole_hint: usize) -> Self {
        let deg_r = cd.r.degree().unwrap();
        let r1 = cd.r.truncate_to(ctx);
        let mut r_pow_cache = std::collections::HashMap::new();
        r_pow_cache.insert(0usize, ZqPoly::one(ctx));
        r_pow_cache.insert(1usize, r1.clone());
        FrobEngine {
            cd,
            ctx,
            r1,
            r_pow_cache,
            deg_r,
        }
    }

    pub fn r(&self) -> &ZqPoly {
        &self.r1
    }

    fn r_pow(&mut self, k: usize) -> ZqPoly {
        if let Some(p) = self.r_pow_cache.get(&k) {
            return p.clone();
        }
        let half = self.r_pow(k / 2);
        let mut out = half.mul(&half, self.ctx);
        if k % 2 == 1 {
            out = out.mul(&self.r1, self.ctx);
        }
        self.r_pow_cache.insert(k, out.clone());
        out
    }

    /// Flatten to value * r^{K}: a = F / r^K with F polynomial.  The r-adic
    /// digit of r^i in F is pole[K-1-i], so the digit array is the reversed
    /// pole array.
    fn flatten(&mut self, a: &DaggerSeries) -> (ZqPoly, usize) {
        let k = a.max_pole();
        let digits: Vec<ZqPoly> = a.pole[..k].iter().rev().cloned().collect();
        let f = self.assemble(&digits, &a.poly);
        (f, k)
    }

    /// digits[0] + digits[1] r + ... + poly * r^{len}, by halving.
    fn assemble(&mut self, digits: &[ZqPoly], poly: &ZqPoly) -> ZqPoly {
        let ctx = self.ctx;
        if digits.is_empty() {
            return poly.clone();
        }
        if digits.len() <= 4 {
            let mut acc = poly.clone();
            for d in digits.iter().rev() {
                acc = acc.mul(&self.r1, ctx);
                acc = acc.add(d, ctx);
            }
            return acc;
        }
        let h = digits.len() / 2;
        let low = self.assemble(&digits[..h], &ZqPoly::zero());
        let high = self.assemble(&digits[h..], poly);
        let rh = self.r_pow(h);
        high.mul(&rh, ctx).add(&low, ctx)
    }

    /// Re-expand F / r^K into the normal form, truncating to `bounds`;
    /// dropped coefficients must have valuation >= junk_floor.
    fn expand(
        &mut self,
        f: &ZqPoly,
        k: usize,
        bounds: ShapeBounds,
        junk_floor: u32,
    ) -> Result<DaggerSeries, FrobeniusError> {
        let mut digits = vec![ZqPoly::zero(); k];
        let mut poly = ZqPoly::zero();
        self.expand_rec(f, k, &mut digits, 0, &mut poly)?;
        digits.reverse();
        let mut out = DaggerSeries { pole: digits, poly };
        self.truncate_shape(&mut out, bounds, junk_floor)?;
        Ok(out)
    }

    fn expand_rec(
        &mut self,
        f: &ZqPoly,
        k: usize,
        pole: &mut [ZqPoly],
        offset: usize,
        poly_out: &mut ZqPoly,
    ) -> Result<(), FrobeniusError> {
        let ctx = self.ctx;
        if k == 0 {
            *poly_out = f.clone();
            return Ok(());
        }
        if k <= 4 {
            let mut rest = f.clone();
            for i in 0..k {
                let (q, rem) = rest.divrem(&self.r1, ctx).map_err(FrobeniusError::Padic)?;
                pole[offset + i] = rem;
                rest = q;
            }
            *poly_out = rest;
            return Ok(());
        }
        let h = k / 2;
        let rh = self.r_pow(h);
        let (q, rem) = f.divrem(&rh, ctx).map_err(FrobeniusError::Padic)?;
        let mut dummy = ZqPoly::zero();
        self.expand_rec(&rem, h, pole, offset, &mut dummy)?;
        debug_assert!(dummy.is_zero());
        self.expand_rec(&q, k - h, pole, offset + h, poly_out)?;
        Ok(())
    }

    pub(crate) fn truncate_shape(
        &mut self,
        a: &mut DaggerSeries,
        bounds: ShapeBounds,
        junk_floor: u32,
    ) -> Result<(), FrobeniusError> {
        let ctx = self.ctx;
        while a.pole.len() > bounds.max_pole {
            let top = a.pole.pop().unwrap();
            let v = top.content_val(ctx);
            if v < junk_floor {
                return Err(FrobeniusError::ShapeViolation(format!(
                    "pole level {} has valuation {} < {}",
                    a.pole.len() + 1,
                    v,
                    junk_floor
                )));
            }
        }
        if let Some(d) = bounds.max_poly_deg {
            let keep = if d < 0 { 0 } else { d as usize + 1 };
            while a.poly.coeffs.len() > keep {
                let c = a.poly.coeffs.pop().unwrap();
                let v = ctx.valuation(&c);
                if v < junk_floor {
                    return Err(FrobeniusError::ShapeViolation(format!(
                        "poly degree {} has valuation {} < {}",
                        a.poly.coeffs.len(),
                        v,
                        junk_floor
                    )));
                }
            }
            a.poly.trim(ctx);
        }
        Ok(())
    }

    pub fn mul(
        &mut self,
        a: &DaggerSeries,
        b: &DaggerSeries,
        bounds: ShapeBounds,
        junk_floor: u32,
    ) -> Result<DaggerSeries, FrobeniusError> {
        if a.is_zero() || b.is_zero() {
            return Ok(DaggerSeries::zero());
        }
        let (fa, ka) = self.flatten(a);
        let (fb, kb) = self.flatten(b);
        let prod = fa.mul(&fb, self.ctx);
        self.expand(&prod, ka + kb, bounds, junk_floor)
    }

    pub fn mul_poly(
        &mut self,
        a: &DaggerSeries,
        p: &ZqPoly,
        bounds: ShapeBounds,
        junk_floor: u32,
    ) -> Result<DaggerSeries, FrobeniusError> {
        self.mul(a, &DaggerSeries::from_poly(p.clone()), bounds, junk_floor)
    }

    pub fn pow(
        &mut self,
        a: &DaggerSeries,
        e: usize,
        bounds: ShapeBounds,
        junk_floor: u32,
    ) -> Result<DaggerSeries, FrobeniusError> {
        let mut acc = DaggerSeries::from_poly(ZqPoly::one(self.ctx));
        let mut base = a.clone();
        let mut e = e;
        loop {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base, bounds, junk_floor)?;
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = self.mul(&base, &base, bounds, junk_floor)?;
        }
        Ok(acc)
    }
}

fn p_as_usize(ctx: &PadicContext) -> usize {
    ctx.prime().to_u64_digits().first().copied().unwrap_or(2) as usize
}

/// Shape bounds from the convergence statement, per series role.
pub fn alpha_bounds(cd: &CurveData, n_digits: u32, p: usize) -> ShapeBounds {
    let _ = cd;
    ShapeBounds {
        max_pole: p * n_digits as usize,
        max_poly_deg: Some(0),
    }
}

pub fn phi_bounds(cd: &CurveData, n_digits: u32, p: usize) -> ShapeBounds {
    let max_pole = (p as i64 * (n_digits as i64 - 1) - cd.ords.ordneinf_w0
        - p as i64 * cd.ords.ordneinf_w0inv)
        .max(1) as usize;
    let max_poly = -cd.ords.ordinf_winf - p as i64 * cd.ords.ordinf_winfinv;
    ShapeBounds {
        max_pole,
        max_poly_deg: Some(max_poly.max(0)),
    }
}

pub fn psi_bounds(cd: &CurveData, n_digits: u32, p: usize) -> ShapeBounds {
    let max_pole = (p * n_digits as usize).saturating_sub(1).max(1);
    let max_poly =
        -cd.ords.ordinf_w - p as i64 * cd.ords.ordinf_winv - (p as i64 - 1) * cd.deg_r() as i64;
    ShapeBounds {
        max_pole,
        max_poly_deg: Some(max_poly.max(0)),
    }
}

/// Working envelope for the whole phase: intermediate products may exceed
/// the per-object proposition bounds, so every multiplication runs under the
/// largest of them; the per-object shapes are enforced afterwards.
pub fn env_bounds(cd: &CurveData, n_digits: u32, p: usize) -> ShapeBounds {
    let a = alpha_bounds(cd, n_digits, p).max_pole;
    let b = phi_bounds(cd, n_digits, p).max_pole;
    let c = psi_bounds(cd, n_digits, p).max_pole;
    ShapeBounds {
        max_pole: a.max(b).max(c) + p,
        max_poly_deg: None,
    }
}

/// alpha = Frob(1/r) with alpha * r^sigma(x^p) = 1, by the doubling
/// recursion; returns the series and the residual valuations per step.
pub fn lift_inverse_r(
    engine: &mut FrobEngine,
    n_digits: u32,
) -> Result<(DaggerSeries, Vec<u32>), FrobeniusError> {
    let ctx = engine.ctx;
    let p = p_as_usize(ctx);
    let bounds = env_bounds(engine.cd, n_digits, p);
    let final_bounds = alpha_bounds(engine.cd, n_digits, p);
    // R = r^sigma(x^p)
    let r_sig = engine
        .cd
        .r
        .truncate_to(ctx)
        .map_sigma(ctx)
        .subst_x_pow(p, ctx);
    // alpha_0 = 1 / r^p
    let mut pole = vec![ZqPoly::zero(); p];
    pole[p - 1] = ZqPoly::one(ctx);
    let mut alpha: DaggerSeries = DaggerSeries {
        pole,
        poly: ZqPoly::zero(),
    };
    let two = DaggerSeries::from_poly(ZqPoly::constant(ctx.from_u64(2), ctx));
    let mut residuals = vec![];
    let mut level = 1u32;
    let max_iter = 1 + (64 - (n_digits as u64).leading_zeros()) + 2;
    for _ in 0..max_iter {
        // residual = alpha * R - 1
        let ar = engine.mul_poly(&alpha, &r_sig, bounds, level.min(n_digits))?;
        let res = ar.sub(&DaggerSeries::from_poly(ZqPoly::one(ctx)), ctx);
        let v = res.content_val(ctx);
        residuals.push(v);
        if v >= n_digits {
            break;
        }
        if v < level {
            return Err(FrobeniusError::NonConvergence);
        }
        level = v;
        // alpha <- alpha (2 - alpha R)
        let ar_shifted = engine.mul_poly(&alpha, &r_sig, bounds, level)?;
        let corr = two.sub(&ar_shifted, ctx);
        alpha = engine.mul(&alpha, &corr, bounds, level)?;
        level = (2 * level).min(n_digits);
    }
    let ar = engine.mul_poly(&alpha, &r_sig, bounds, n_digits)?;
    let res = ar.sub(&DaggerSeries::from_poly(ZqPoly::one(ctx)), ctx);
    if res.content_val(ctx) < n_digits {
        return Err(FrobeniusError::NonConvergence);
    }
    // shape of the limit per the convergence statement
    engine.truncate_shape(&mut alpha, final_bounds, n_digits)?;
    Ok((alpha, residuals))
}

/// Multiply two vectors of series as elements of R-dagger (y-coordinates,
/// folding with the monic Q).
fn rdagger_mul(
    engine: &mut FrobEngine,
    a: &[DaggerSeries],
    b: &[DaggerSeries],
    q: &BiPoly,
    bounds: ShapeBounds,
    junk_floor: u32,
) -> Result<Vec<DaggerSeries>, FrobeniusError> {
    let ctx = engine.ctx;
    let d = q.deg_y();
    let mut conv: Vec<DaggerSeries> = vec![DaggerSeries::zero(); 2 * d - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            let t = engine.mul(x, y, bounds, junk_floor)?;
            conv[i + j] = conv[i + j].add(&t, ctx);
        }
    }
    for k in (d..conv.len()).rev() {
        let c = std::mem::replace(&mut conv[k], DaggerSeries::zero());
        if c.is_zero() {
            continue;
        }
        for i in 0..d {
            if q.ycoeffs[i].is_zero() {
                continue;
            }
            let t = engine.mul_poly(&c, &q.ycoeffs[i], bounds, junk_floor)?;
            conv[k - d + i] = conv[k - d + i].sub(&t, ctx);
        }
    }
    conv.truncate(d);
    Ok(conv)
}

/// Evaluate a bivariate polynomial (coefficients already transformed) at the
/// series vector beta, by Horner in y.
fn eval_bipoly_at(
    engine: &mut FrobEngine,
    f: &BiPoly,
    beta: &[DaggerSeries],
    q: &BiPoly,
    bounds: ShapeBounds,
    junk_floor: u32,
) -> Result<Vec<DaggerSeries>, FrobeniusError> {
    let d = q.deg_y();
    let ctx = engine.ctx;
    let mut acc: Vec<DaggerSeries> = vec![DaggerSeries::zero(); d];
    for c in f.ycoeffs.iter().rev() {
        acc = rdagger_mul(engine, &acc, beta, q, bounds, junk_floor)?;
        if !c.is_zero() {
            acc[0] = acc[0].add(&DaggerSeries::from_poly(c.clone()), ctx);
        }
    }
    Ok(acc)
}

/// beta = Frob(y) as y-coordinates over S-dagger, with
/// Q^sigma(x^p, beta) = 0 mod p^N and beta = y^p mod p.
pub fn lift_y(
    engine: &mut FrobEngine,
    alpha: &DaggerSeries,
    n_digits: u32,
) -> Result<(Vec<DaggerSeries>, Vec<u32>), FrobeniusError> {
    let ctx = engine.ctx;
    let p = p_as_usize(ctx);
    let cd = engine.cd;
    let bounds = env_bounds(cd, n_digits, p);
    let q = cd.q.truncate_to(ctx);
    let q_sig = q.frob_transform(p, ctx);
    let s_sig = BiPoly {
        ycoeffs: cd
            .s
            .iter()
            .map(|c| c.truncate_to(ctx).map_sigma(ctx).subst_x_pow(p, ctx))
            .collect(),
    };
    let g_sig = cd
        .gpoly
        .truncate_to(ctx)
        .map_sigma(ctx)
        .subst_x_pow(p, ctx);
    let alpha_m = engine.pow(alpha, cd.m_pow as usize, bounds, n_digits)?;

    // beta_0 = y^p reduced mod Q
    let d = cd.dx;
    let mut ypow = vec![ZqPoly::zero(); p + 1];
    ypow[p] = ZqPoly::one(ctx);
    crate::curve::bipoly::fold_y(&mut ypow, &q, ctx);
    ypow.resize(d, ZqPoly::zero());
    let mut beta: Vec<DaggerSeries> = ypow
        .into_iter()
        .map(DaggerSeries::from_poly)
        .collect();

    let mut residuals = vec![];
    let mut level = 1u32;
    let max_iter = 1 + (64 - (n_digits as u64).leading_zeros()) + 2;
    for _ in 0..max_iter {
        let e = eval_bipoly_at(engine, &q_sig, &beta, &q, bounds, level.min(n_digits))?;
        let v = e
            .iter()
            .map(|s| s.content_val(ctx))
            .min()
            .unwrap_or(n_digits);
        residuals.push(v);
        if v >= n_digits {
            break;
        }
        if v < level {
            return Err(FrobeniusError::NonConvergence);
        }
        level = v;
        // correction = e * s^sigma(x^p, beta) * g^sigma(x^p) * alpha^m
        let sval = eval_bipoly_at(engine, &s_sig, &beta, &q, bounds, level)?;
        let mut corr = rdagger_mul(engine, &e, &sval, &q, bounds, level)?;
        for c in corr.iter_mut() {
            *c = engine.mul_poly(c, &g_sig, bounds, level)?;
            *c = engine.mul(c, &alpha_m, bounds, level)?;
        }
        for (b, c) in beta.iter_mut().zip(&corr) {
            *b = b.sub(c, ctx);
        }
        level = (2 * level).min(n_digits);
    }
    let e = eval_bipoly_at(engine, &q_sig, &beta, &q, bounds, n_digits)?;
    let v = e
        .iter()
        .map(|s| s.content_val(ctx))
        .min()
        .unwrap_or(n_digits);
    if v < n_digits {
        return Err(FrobeniusError::NonConvergence);
    }
    Ok((beta, residuals))
}

/// The matrices of Frob_p: Phi on [1, y, .., y^{dx-1}] and Psi on
/// [b^0_0/r, .., b^0_{dx-1}/r], columns = images of the basis elements.
pub struct FrobMatrices {
    pub phi: Vec<Vec<DaggerSeries>>,
    pub psi: Vec<Vec<DaggerSeries>>,
}

pub fn frobenius_matrices(
    engine: &mut FrobEngine,
    alpha: &DaggerSeries,
    beta: &[DaggerSeries],
    n_digits: u32,
) -> Result<FrobMatrices, FrobeniusError> {
    let ctx = engine.ctx;
    let cd = engine.cd;
    let p = p_as_usize(ctx);
    let d = cd.dx;
    let q = cd.q.truncate_to(ctx);
    let envb = env_bounds(cd, n_digits, p);
    let phib = phi_bounds(cd, n_digits, p);
    let psib = psi_bounds(cd, n_digits, p);

    // Phi columns: coordinates of beta^j
    let mut phi = vec![vec![DaggerSeries::zero(); d]; d];
    let mut bpow: Vec<DaggerSeries> = {
        let mut v = vec![DaggerSeries::zero(); d];
        v[0] = DaggerSeries::from_poly(ZqPoly::one(ctx));
        v
    };
    for j in 0..d {
        for i in 0..d {
            phi[i][j] = bpow[i].clone();
        }
        if j + 1 < d {
            bpow = rdagger_mul(engine, &bpow, beta, &q, envb, n_digits)?;
        }
    }
    // the converged Phi satisfies the stated shape
    for row in phi.iter_mut() {
        for e in row.iter_mut() {
            engine.truncate_shape(e, phib, n_digits)?;
        }
    }

    // Psi = (r W0^{-1}) Phi (W0 / r)^{F_p}
    let left = rentry_matrix_to_series(engine, &cd.w0_inv, -1, None, n_digits, envb)?;
    let right = rentry_matrix_to_series(engine, &cd.w0, 1, Some(alpha), n_digits, envb)?;
    let tmp = series_mat_mul(engine, &left, &phi, &q, envb, n_digits)?;
    let mut psi = series_mat_mul(engine, &tmp, &right, &q, envb, n_digits)?;
    for row in psi.iter_mut() {
        for e in row.iter_mut() {
            engine.truncate_shape(e, psib, n_digits)?;
        }
    }
    Ok(FrobMatrices { phi, psi })
}

/// Convert an REntry matrix to series entries.  `extra_rpow` adds to each
/// entry's pole count (-1: multiplied by r; +1: divided by r).  When
/// `fp` is given, the entry is Frobenius-transformed: coefficients under
/// sigma, x -> x^p, and 1/r -> alpha.
fn rentry_matrix_to_series(
    engine: &mut FrobEngine,
    m: &[Vec<REntry>],
    extra_rpow: i64,
    fp: Option<&DaggerSeries>,
    n_digits: u32,
    bounds: ShapeBounds,
) -> Result<Vec<Vec<DaggerSeries>>, FrobeniusError> {
    let ctx = engine.ctx;
    let n = m.len();
    let p = p_as_usize(ctx);
    let mut out = vec![vec![DaggerSeries::zero(); n]; n];
    // cache alpha powers
    let mut alpha_pows: Vec<DaggerSeries> = vec![DaggerSeries::from_poly(ZqPoly::one(ctx))];
    for i in 0..n {
        for j in 0..n {
            let e = &m[i][j];
            if e.is_zero() {
                continue;
            }
            if e.num.shift < 0 {
                return Err(FrobeniusError::ShapeViolation(
                    "unexpected x-denominator in a finite-chart matrix".into(),
                ));
            }
            let num = e
                .num
                .to_poly(ctx)
                .expect("checked shift")
                .truncate_to(ctx);
            let k_eff = e.rpow as i64 + extra_rpow;
            match fp {
                None => {
                    if k_eff <= 0 {
                        // multiply by r^{-k_eff}
                        let extra = engine.r_pow((-k_eff) as usize);
                        out[i][j] = DaggerSeries::from_poly(num.mul(&extra, ctx));
                    } else {
                        out[i][j] = engine.expand(&num, k_eff as usize, bounds, n_digits)?;
                    }
                }
                Some(alpha) => {
                    let num_fp = num.map_sigma(ctx).subst_x_pow(p, ctx);
                    if k_eff <= 0 {
                        // r^{-k_eff} transforms to (r^sigma(x^p))^{-k_eff}
                        let r_sig = engine
                            .cd
                            .r
                            .truncate_to(ctx)
                            .map_sigma(ctx)
                            .subst_x_pow(p, ctx)
                            .pow((-k_eff) as usize, ctx);
                        out[i][j] = DaggerSeries::from_poly(num_fp.mul(&r_sig, ctx));
                    } else {
                        while alpha_pows.len() <= k_eff as usize {
                            let next = engine.mul(
                                alpha_pows.last().unwrap(),
                                alpha,
                                bounds,
                                n_digits,
                            )?;
                            alpha_pows.push(next);
                        }
                        out[i][j] = engine.mul_poly(
                            &alpha_pows[k_eff as usize],
                            &num_fp,
                            bounds,
                            n_digits,
                        )?;
                    }
                }
            }
        }
    }
    Ok(out)
}

fn series_mat_mul(
    engine: &mut FrobEngine,
    a: &[Vec<DaggerSeries>],
    b: &[Vec<DaggerSeries>],
    _q: &BiPoly,
    bounds: ShapeBounds,
    junk_floor: u32,
) -> Result<Vec<Vec<DaggerSeries>>, FrobeniusError> {
    let ctx = engine.ctx;
    let n = a.len();
    let mut out = vec![vec![DaggerSeries::zero(); n]; n];
    for i in 0..n {
        for l in 0..n {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[l][j].is_zero() {
                    continue;
                }
                let t = engine.mul(&a[i][l], &b[l][j], bounds, junk_floor)?;
                out[i][j] = out[i][j].add(&t, ctx);
            }
        }
    }
    Ok(out)
}

/// Frob(omega) for omega = (sum_k u_k b^0_k) dx/r:
/// sum_j (sum_k p x^{p-1} u_k^sigma(x^p) psi_{j,k}) b^0_j dx/r.
pub fn push_forward_forms(
    engine: &mut FrobEngine,
    psi: &[Vec<DaggerSeries>],
    basis_forms: &[Vec<ZqPoly>],
    n_digits: u32,
) -> Result<Vec<PushedForm>, FrobeniusError> {
    let ctx = engine.ctx;
    let cd = engine.cd;
    let p = p_as_usize(ctx);
    let d = cd.dx;
    let psib = psi_bounds(cd, n_digits, p);
    // allow room for the extra x^{p-1} u^sigma(x^p) factor in the tail
    let push_bounds = ShapeBounds {
        max_pole: psib.max_pole,
        max_poly_deg: None,
    };
    let _ = &push_bounds;
    let mut out = vec![];
    for u in basis_forms {
        let mut t: Vec<ZqPoly> = Vec::with_capacity(d);
        for uk in u {
            let s = uk.truncate_to(ctx).map_sigma(ctx).subst_x_pow(p, ctx);
            let s = s.shift_up(p - 1, ctx).mul_by_p_pow(1, ctx);
            t.push(s);
        }
        let mut comps: Vec<DaggerSeries> = vec![DaggerSeries::zero(); d];
        for j in 0..d {
            for k in 0..d {
                if psi[j][k].is_zero() || t[k].is_zero() {
                    continue;
                }
                let term = engine.mul_poly(&psi[j][k], &t[k], push_bounds, n_digits)?;
                comps[j] = comps[j].add(&term, ctx);
            }
        }
        // transpose into level-major storage
        let lmax = comps.iter().map(|c| c.max_pole()).max().unwrap_or(0);
        let mut levels = vec![vec![ZqPoly::zero(); d]; lmax];
        for (j, c) in comps.iter().enumerate() {
            for (k, polelvl) in c.pole.iter().enumerate() {
                if k < lmax {
                    levels[k][j] = polelvl.clone();
                }
            }
        }
        let tail: Vec<ZqPoly> = comps.into_iter().map(|c| c.poly).collect();
        out.push(PushedForm { levels, tail });
    }
    Ok(out)
}

/// beta expressed through the identity-W0 shortcut: Psi = Phi * (alpha r),
/// used as a consistency check in tests.
pub fn psi_identity_w0(
    engine: &mut FrobEngine,
    phi: &[Vec<DaggerSeries>],
    alpha: &DaggerSeries,
    n_digits: u32,
) -> Result<Vec<Vec<DaggerSeries>>, FrobeniusError> {
    let ctx = engine.ctx;
    let p = p_as_usize(ctx);
    let bounds = env_bounds(engine.cd, n_digits, p);
    let r = engine.r().clone();
    let ar = engine.mul_poly(alpha, &r, bounds, n_digits)?;
    let n = phi.len();
    let mut out = vec![vec![DaggerSeries::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if phi[i][j].is_zero() {
                continue;
            }
            out[i][j] = engine.mul(&phi[i][j], &ar, bounds, n_digits)?;
        }
    }
    Ok(out)
}

/// Vector of series scaled into AVec for tests (poly parts only).
pub fn series_vec_poly_parts(v: &[DaggerSeries]) -> AVec {
    v.iter().map(|s| s.poly.clone()).collect()
}

pub fn series_vec_zero(d: usize) -> Vec<DaggerSeries> {
    let mut out = Vec::with_capacity(d);
    for _ in 0..d {
        out.push(DaggerSeries::zero());
    }
    let _ = avec_zero(d);
    out
}
