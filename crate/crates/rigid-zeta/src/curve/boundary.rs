//! Boundary algebras of the compactified curve: R^0/(r) over the finite
//! branch locus and R^inf/(1/x) over infinity.  The quotients are reduced
//! modulo their nilradical to the etale lattice of boundary points; the
//! discriminant of that lattice certifies the good-compactification clause,
//! and the nilpotency index of the radical gives the exact ramification
//! bound e_P per chart.

use super::bipoly::{avec_mul, AVec, BiPoly};
use super::rmat::RMat;
use crate::error::CurveError;
use crate::padic::linalg::{
    berkowitz_charpoly, field_kernel, field_lattice_echelon, FieldOps, KfRing, QqRing,
};
use crate::padic::{LaurentPoly, PadicContext, QqScalar, ZqElem, ZqPoly};

#[derive(Clone, Debug)]
pub struct EtaleData {
    pub closure_ok: bool,
    /// Rank of the raw quotient algebra over Z_q.
    pub rank_ambient: usize,
    /// Rank of the reduced (etale) lattice over Z_q = number of geometric
    /// boundary points in this chart.
    pub rank_reduced: usize,
    /// Trace-form discriminant of the reduced lattice is a unit.
    pub disc_unit: bool,
    /// Nilpotency index of the radical = max ramification index e_P.
    pub nilp_index: u32,
}

#[derive(Clone, Debug)]
pub struct BoundaryData {
    pub fin: EtaleData,
    pub inf: EtaleData,
    /// c_{ijl}(x): polynomial b^0-coordinates of b^0_i b^0_j.
    pub fin_tensor: Option<Vec<Vec<AVec>>>,
    /// Constant coordinates of b^inf_i b^inf_j modulo 1/x.
    pub inf_tensor: Option<Vec<Vec<Vec<ZqElem>>>>,
}

pub fn compute_boundary(
    q: &BiPoly,
    w0: &RMat,
    winf: &RMat,
    w0_inv: &RMat,
    winf_inv: &RMat,
    r: &ZqPoly,
    rfactors: &[ZqPoly],
    ctx: &PadicContext,
) -> Result<BoundaryData, CurveError> {
    let dx = q.deg_y();
    let deg_r = r.degree().unwrap_or(0);

    let fin_tensor = finite_structure_tensor(q, w0, w0_inv, r, ctx);
    let inf_tensor = infinite_structure_tensor(q, winf, winf_inv, r, ctx);

    let fin = match &fin_tensor {
        None => EtaleData {
            closure_ok: false,
            rank_ambient: dx * deg_r,
            rank_reduced: 0,
            disc_unit: false,
            nilp_index: dx as u32,
        },
        Some(tensor) => {
            let mut rank_reduced = 0usize;
            let mut disc_unit = true;
            let mut nilp = 1u32;
            for f in rfactors {
                let fld = KfRing { ctx, f };
                let tf: Vec<Vec<Vec<_>>> = (0..dx)
                    .map(|i| {
                        (0..dx)
                            .map(|j| {
                                tensor[i][j]
                                    .iter()
                                    .map(|c| {
                                        crate::padic::linalg::qq_poly_rem(
                                            ctx,
                                            &crate::padic::linalg::qq_poly_from_zq(c),
                                            f,
                                        )
                                    })
                                    .collect()
                            })
                            .collect()
                    })
                    .collect();
                let (rk, du, ni) = etale_analysis(&fld, &tf);
                rank_reduced += rk * f.degree().unwrap();
                disc_unit &= du;
                nilp = nilp.max(ni);
            }
            EtaleData {
                closure_ok: true,
                rank_ambient: dx * deg_r,
                rank_reduced,
                disc_unit,
                nilp_index: nilp,
            }
        }
    };

    let inf = match &inf_tensor {
        None => EtaleData {
            closure_ok: false,
            rank_ambient: dx,
            rank_reduced: 0,
            disc_unit: false,
            nilp_index: dx as u32,
        },
        Some(tensor) => {
            let fld = QqRing { ctx };
            let tf: Vec<Vec<Vec<QqScalar>>> = tensor
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|v| v.iter().cloned().map(QqScalar::from_zq).collect())
                        .collect()
                })
                .collect();
            let (rk, du, ni) = etale_analysis(&fld, &tf);
            EtaleData {
                closure_ok: true,
                rank_ambient: dx,
                rank_reduced: rk,
                disc_unit: du,
                nilp_index: ni,
            }
        }
    };

    Ok(BoundaryData {
        fin,
        inf,
        fin_tensor,
        inf_tensor,
    })
}

/// b^0_i b^0_j in b^0-coordinates; None when some coordinate fails to be a
/// polynomial (the module is not a ring, or 1 is not in it).
fn finite_structure_tensor(
    q: &BiPoly,
    w0: &RMat,
    w0_inv: &RMat,
    r: &ZqPoly,
    ctx: &PadicContext,
) -> Option<Vec<Vec<AVec>>> {
    let dx = q.deg_y();
    let k0 = super::rmat::rmat_max_rpow(w0);
    // polynomial lifts B_i = r^k0 b^0_i in y-coordinates
    let mut cols: Vec<AVec> = vec![];
    for jcol in 0..dx {
        let mut v = vec![ZqPoly::zero(); dx];
        for irow in 0..dx {
            let e = &w0[irow][jcol];
            if e.is_zero() {
                continue;
            }
            let extra = r.pow((k0 - e.rpow) as usize, ctx);
            let num = e.num.mul(&LaurentPoly::from_poly(extra), ctx);
            v[irow] = num.to_poly(ctx)?;
        }
        cols.push(v);
    }
    // identity must have polynomial coordinates: column 0 of w0_inv
    for row in w0_inv {
        let e = &row[0];
        if !e.is_zero() && (e.rpow > 0 || e.num.shift < 0) {
            return None;
        }
    }
    let mut tensor = vec![vec![Vec::new(); dx]; dx];
    for i in 0..dx {
        for j in i..dx {
            let prod = avec_mul(&cols[i], &cols[j], q, ctx);
            // coords = w0_inv * prod / r^{2 k0}
            let mut coords: AVec = Vec::with_capacity(dx);
            for l in 0..dx {
                let mut acc = super::rmat::REntry::zero();
                for t in 0..dx {
                    if prod[t].is_zero() || w0_inv[l][t].is_zero() {
                        continue;
                    }
                    let term = w0_inv[l][t].mul(
                        &super::rmat::REntry::from_poly(prod[t].clone()),
                        r,
                        ctx,
                    );
                    acc = acc.add(&term, r, ctx);
                }
                // divide by r^{2 k0}
                let mut e = super::rmat::REntry {
                    num: acc.num,
                    rpow: acc.rpow + 2 * k0,
                };
                e.normalize(r, ctx);
                if e.is_zero() {
                    coords.push(ZqPoly::zero());
                    continue;
                }
                if e.rpow > 0 || e.num.shift < 0 {
                    return None;
                }
                coords.push(e.num.to_poly(ctx)?);
            }
            tensor[i][j] = coords.clone();
            tensor[j][i] = coords;
        }
    }
    Some(tensor)
}

/// Coordinates of b^inf_i b^inf_j modulo (1/x): requires coordinates in
/// Z_q[1/x]; the quotient keeps the x^0 terms.
fn infinite_structure_tensor(
    q: &BiPoly,
    winf: &RMat,
    winf_inv: &RMat,
    r: &ZqPoly,
    ctx: &PadicContext,
) -> Option<Vec<Vec<Vec<ZqElem>>>> {
    let dx = q.deg_y();
    // identity in Z_q[1/x]: column 0 of winf_inv
    for row in winf_inv {
        let e = &row[0];
        if !e.is_zero() && (e.rpow > 0 || e.num.ord_inf() < 0) {
            return None;
        }
    }
    // products b_i b_j with Laurent coordinates
    let kinf = super::rmat::rmat_max_rpow(winf);
    let mut cols: Vec<Vec<LaurentPoly>> = vec![];
    for jcol in 0..dx {
        let mut v = vec![LaurentPoly::zero(); dx];
        for irow in 0..dx {
            let e = &winf[irow][jcol];
            if e.is_zero() {
                continue;
            }
            let extra = r.pow((kinf - e.rpow) as usize, ctx);
            v[irow] = e.num.mul(&LaurentPoly::from_poly(extra), ctx);
        }
        cols.push(v);
    }
    let mut tensor = vec![vec![Vec::new(); dx]; dx];
    for i in 0..dx {
        for j in i..dx {
            // convolve Laurent y-coordinates then fold with monic Q
            let mut conv = vec![LaurentPoly::zero(); 2 * dx - 1];
            for (a, x) in cols[i].iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (b, y) in cols[j].iter().enumerate() {
                    if y.is_zero() {
                        continue;
                    }
                    conv[a + b] = conv[a + b].add(&x.mul(y, ctx), ctx);
                }
            }
            for k in (dx..conv.len()).rev() {
                let c = std::mem::replace(&mut conv[k], LaurentPoly::zero());
                if c.is_zero() {
                    continue;
                }
                for a in 0..dx {
                    if q.ycoeffs[a].is_zero() {
                        continue;
                    }
                    let t = c.mul(&LaurentPoly::from_poly(q.ycoeffs[a].clone()), ctx);
                    conv[k - dx + a] = conv[k - dx + a].sub(&t, ctx);
                }
            }
            conv.truncate(dx);
            // coords = winf_inv * conv / r^{2 kinf}
            let mut coords: Vec<ZqElem> = Vec::with_capacity(dx);
            for l in 0..dx {
                let mut acc = super::rmat::REntry::zero();
                for t in 0..dx {
                    if conv[t].is_zero() || winf_inv[l][t].is_zero() {
                        continue;
                    }
                    let term = super::rmat::REntry {
                        num: winf_inv[l][t].num.mul(&conv[t], ctx),
                        rpow: winf_inv[l][t].rpow,
                    };
                    acc = acc.add(&term, r, ctx);
                }
                let mut e = super::rmat::REntry {
                    num: acc.num,
                    rpow: acc.rpow + 2 * kinf,
                };
                e.normalize(r, ctx);
                if e.is_zero() {
                    coords.push(ctx.zero());
                    continue;
                }
                if e.rpow > 0 || e.num.ord_inf() < 0 {
                    return None;
                }
                coords.push(e.num.coeff_at(0, ctx));
            }
            tensor[i][j] = coords.clone();
            tensor[j][i] = coords;
        }
    }
    Some(tensor)
}

/// Radical of the finite-dimensional algebra over a char-0 field via the
/// trace-form kernel; returns (reduced rank over the field, disc unit,
/// nilpotency index of the radical).
fn etale_analysis<F: FieldOps>(fld: &F, tensor: &[Vec<Vec<F::El>>]) -> (usize, bool, u32) {
    let d = tensor.len();
    // trace of multiplication by basis element l: tv_l = sum_j c_{l j j}
    let tv: Vec<F::El> = (0..d)
        .map(|l| {
            let mut acc = fld.zero();
            for j in 0..d {
                acc = fld.add(&acc, &tensor[l][j][j]);
            }
            acc
        })
        .collect();
    // Gram[i][j] = sum_l c_{ijl} tv_l
    let gram: Vec<Vec<F::El>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let mut acc = fld.zero();
                    for l in 0..d {
                        if fld.is_zero(&tensor[i][j][l]) {
                            continue;
                        }
                        acc = fld.add(&acc, &fld.mul(&tensor[i][j][l], &tv[l]));
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let rad = field_kernel(fld, &gram);
    let rad_ech = field_lattice_echelon(fld, &rad);
    let rad_rank = rad_ech.rows.len();
    let rank_red = d - rad_rank;

    // nilpotency index: smallest k with rad^k = 0
    let mut nilp = 1u32;
    let mut cur = rad_ech.rows.clone();
    while !cur.is_empty() {
        nilp += 1;
        if nilp > d as u32 + 1 {
            break;
        }
        let mut prods = vec![];
        for u in &rad_ech.rows {
            for v in &cur {
                prods.push(vec_mul(fld, tensor, u, v));
            }
        }
        cur = field_lattice_echelon(fld, &prods).rows;
    }

    // reduced basis: ambient basis vectors away from the radical pivots
    let free_cols: Vec<usize> = (0..d).filter(|c| !rad_ech.pivot_cols.contains(c)).collect();
    // mult matrices on the quotient
    let red_coords = |v: &[F::El]| -> Vec<F::El> {
        let (_, rem) = rad_ech.reduce(fld, v);
        free_cols.iter().map(|&c| rem[c].clone()).collect()
    };
    let k = free_cols.len();
    let mut mult_mats: Vec<Vec<Vec<F::El>>> = Vec::with_capacity(k);
    for &c in &free_cols {
        // columns: coordinates of e_c * e_b for b in free basis
        let mut m = vec![vec![fld.zero(); k]; k];
        for (bi, &b) in free_cols.iter().enumerate() {
            let col = red_coords(&tensor[c][b]);
            for (ai, val) in col.into_iter().enumerate() {
                m[ai][bi] = val;
            }
        }
        mult_mats.push(m);
    }
    let traces: Vec<F::El> = mult_mats
        .iter()
        .map(|m| {
            let mut acc = fld.zero();
            for i in 0..k {
                acc = fld.add(&acc, &m[i][i]);
            }
            acc
        })
        .collect();
    let mut gram_red = vec![vec![fld.zero(); k]; k];
    for (ai, &a) in free_cols.iter().enumerate() {
        for (bi, &b) in free_cols.iter().enumerate() {
            let coords = red_coords(&tensor[a][b]);
            let mut acc = fld.zero();
            for (ci, cv) in coords.iter().enumerate() {
                if fld.is_zero(cv) {
                    continue;
                }
                acc = fld.add(&acc, &fld.mul(cv, &traces[ci]));
            }
            gram_red[ai][bi] = acc;
        }
    }
    let disc_unit = if k == 0 {
        false
    } else {
        let cp = berkowitz_charpoly(fld, &gram_red);
        // det = (-1)^k cp(0)
        let det = cp[0].clone();
        fld.val(&det) == 0
    };
    (rank_red, disc_unit, nilp)
}

fn vec_mul<F: FieldOps>(fld: &F, tensor: &[Vec<Vec<F::El>>], u: &[F::El], v: &[F::El]) -> Vec<F::El> {
    let d = tensor.len();
    let mut out = vec![fld.zero(); d];
    for a in 0..d {
        if fld.is_zero(&u[a]) {
            continue;
        }
        for b in 0..d {
            if fld.is_zero(&v[b]) {
                continue;
            }
            let uv = fld.mul(&u[a], &v[b]);
            for l in 0..d {
                if fld.is_zero(&tensor[a][b][l]) {
                    continue;
                }
                out[l] = fld.add(&out[l], &fld.mul(&uv, &tensor[a][b][l]));
            }
        }
    }
    out
}
