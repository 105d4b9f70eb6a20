//! Etale boundary algebras modulo p: the multiplication tables of
//! (R^0/(r)) mod p and (R^inf/(1/x)) mod p, reduced by their nilradical
//! through the q-power map, with homomorphism counting through a primitive
//! element.

use num_bigint::BigUint;
use num_traits::Zero;

use super::field::{FqContext, FqElem};
use crate::curve::AVec;
use crate::error::OracleError;
use crate::padic::{PadicContext, ZqElem, ZqPoly};

/// Finite commutative F_q-algebra given by a multiplication table on an
/// F_q-basis, reduced to its etale quotient at construction.
pub struct BoundaryAlgebra {
    /// base field F_q as F_p[t]/(f_mod)
    pub fq: FqContext,
    /// dimension of the reduced (etale) algebra over F_q
    pub dim: usize,
    /// full multiplication tensor on the reduced basis:
    /// tensor[i][j][l] = coefficient of e_l in e_i e_j
    pub tensor: Vec<Vec<Vec<FqElem>>>,
}

fn fq_from_zq(ctx: &PadicContext, c: &ZqElem, n: usize) -> FqElem {
    let mut v: Vec<u64> = ctx
        .reduce_mod_p(c)
        .iter()
        .map(|x| x.to_u64_digits().first().copied().unwrap_or(0))
        .collect();
    v.resize(n.max(1), 0);
    v
}

/// Ambient table for R^0/(r) mod p on the basis b_l x^m, from the
/// polynomial structure tensor c_{ijl}(x).
pub fn finite_boundary_algebra(
    p: u64,
    n: usize,
    _f_mod: &[u64],
    tensor: &[Vec<AVec>],
    r: &ZqPoly,
    ctx: &PadicContext,
    deg_r: usize,
) -> BoundaryAlgebra {
    let fq = FqContext::for_extension(p, n, 1).expect("base field");
    let dx = tensor.len();
    let d_total = dx * deg_r;
    // r mod p as F_q polynomial
    let rbar: Vec<FqElem> = (0..=deg_r)
        .map(|k| fq_from_zq(ctx, &r.coeff(k, ctx), n))
        .collect();
    // c_{ijl} mod p as F_q polynomials
    let cbar: Vec<Vec<Vec<Vec<FqElem>>>> = (0..dx)
        .map(|i| {
            (0..dx)
                .map(|j| {
                    (0..dx)
                        .map(|l| {
                            let poly = &tensor[i][j][l];
                            let d = poly.degree().map_or(0, |d| d + 1);
                            (0..d)
                                .map(|k| fq_from_zq(ctx, &poly.coeff(k, ctx), n))
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    // ambient multiplication: (i, a) * (j, b) = x^{a+b} c_{ijl}(x) mod rbar
    let mult = |u: &[FqElem], v: &[FqElem]| -> Vec<FqElem> {
        // elements are length d_total = dx * deg_r vectors: slot (l, m)
        let mut out = vec![fq.zero(); d_total];
        for (su, cu) in u.iter().enumerate() {
            if fq.is_zero(cu) {
                continue;
            }
            let (iu, au) = (su / deg_r, su % deg_r);
            for (sv, cv) in v.iter().enumerate() {
                if fq.is_zero(cv) {
                    continue;
                }
                let (jv, bv) = (sv / deg_r, sv % deg_r);
                let coef = fq.mul(cu, cv);
                for l in 0..dx {
                    let c_poly = &cbar[iu][jv][l];
                    if c_poly.is_empty() {
                        continue;
                    }
                    // x^{au+bv} * c_poly mod rbar
                    let mut shifted = vec![fq.zero(); au + bv];
                    shifted.extend(c_poly.iter().cloned());
                    let red = fq.poly_rem(&shifted, &rbar);
                    for (m, cm) in red.iter().enumerate() {
                        if fq.is_zero(cm) {
                            continue;
                        }
                        let t = fq.mul(&coef, cm);
                        let slot = l * deg_r + m;
                        out[slot] = fq.add(&out[slot], &t);
                    }
                }
            }
        }
        out
    };
    let (dim, tensor) = reduce_to_etale(&fq, d_total, &mult);
    BoundaryAlgebra { fq, dim, tensor }
}

/// Table for R^inf/(1/x) mod p from the constant structure tensor.
pub fn infinite_boundary_algebra(
    p: u64,
    n: usize,
    _f_mod: &[u64],
    tensor: &[Vec<Vec<ZqElem>>],
    ctx: &PadicContext,
) -> BoundaryAlgebra {
    let fq = FqContext::for_extension(p, n, 1).expect("base field");
    let dx = tensor.len();
    let cbar: Vec<Vec<Vec<FqElem>>> = (0..dx)
        .map(|i| {
            (0..dx)
                .map(|j| (0..dx).map(|l| fq_from_zq(ctx, &tensor[i][j][l], n)).collect())
                .collect()
        })
        .collect();
    let mult = |u: &[FqElem], v: &[FqElem]| -> Vec<FqElem> {
        let mut out = vec![fq.zero(); dx];
        for (i, cu) in u.iter().enumerate() {
            if fq.is_zero(cu) {
                continue;
            }
            for (j, cv) in v.iter().enumerate() {
                if fq.is_zero(cv) {
                    continue;
                }
                let coef = fq.mul(cu, cv);
                for l in 0..dx {
                    if fq.is_zero(&cbar[i][j][l]) {
                        continue;
                    }
                    let t = fq.mul(&coef, &cbar[i][j][l]);
                    out[l] = fq.add(&out[l], &t);
                }
            }
        }
        out
    };
    let (dim, tensor) = reduce_to_etale(&fq, dx, &mult);
    BoundaryAlgebra { fq, dim, tensor }
}

/// Quotient by the nilradical, computed as the stable kernel of the q-power
/// map (which is F_q-linear).
fn reduce_to_etale<F>(fq: &FqContext, dim: usize, mult: &F) -> (usize, Vec<Vec<Vec<FqElem>>>)
where
    F: Fn(&[FqElem], &[FqElem]) -> Vec<FqElem>,
{
    let q = BigUint::from(fq.p).pow(fq.deg as u32);
    // q-power map matrix: columns = basis^q
    let pow_q = |v: &[FqElem]| -> Vec<FqElem> {
        let mut acc: Option<Vec<FqElem>> = None;
        let mut base = v.to_vec();
        let mut e = q.clone();
        while !e.is_zero() {
            if (&e % 2u8) == BigUint::from(1u8) {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => mult(&a, &base),
                });
            }
            e >>= 1;
            if !e.is_zero() {
                base = mult(&base, &base);
            }
        }
        acc.unwrap_or_else(|| vec![fq.zero(); dim])
    };
    let mut phi: Vec<Vec<FqElem>> = Vec::with_capacity(dim);
    for c in 0..dim {
        let mut e = vec![fq.zero(); dim];
        e[c] = fq.one();
        phi.push(pow_q(&e));
    }
    // iterate phi until the kernel stabilizes: nilradical = ker(phi^m)
    let mut mat = phi.clone(); // columns
    let mut prev_rank = usize::MAX;
    let mut kernel: Vec<Vec<FqElem>>;
    loop {
        kernel = fq_kernel(fq, dim, &mat);
        let rank = dim - kernel.len();
        if rank == prev_rank {
            break;
        }
        prev_rank = rank;
        // mat <- phi o mat
        let mut next = Vec::with_capacity(dim);
        for c in 0..dim {
            // phi applied to column c of mat
            let col = &mat[c];
            let mut out = vec![fq.zero(); dim];
            for (idx, coef) in col.iter().enumerate() {
                if fq.is_zero(coef) {
                    continue;
                }
                for s in 0..dim {
                    let t = fq.mul(coef, &phi[idx][s]);
                    out[s] = fq.add(&out[s], &t);
                }
            }
            next.push(out);
        }
        mat = next;
    }
    // reduced basis: complement of the radical in echelon form
    let rad_ech = fq_echelon(fq, &kernel);
    let pivot_cols: Vec<usize> = rad_ech.1.clone();
    let free_cols: Vec<usize> = (0..dim).filter(|c| !pivot_cols.contains(c)).collect();
    let reduce = |v: &[FqElem]| -> Vec<FqElem> {
        let mut rem = v.to_vec();
        for (row, &pc) in rad_ech.0.iter().zip(&pivot_cols) {
            let c = rem[pc].clone();
            if fq.is_zero(&c) {
                continue;
            }
            for s in 0..dim {
                let t = fq.mul(&c, &row[s]);
                rem[s] = fq.sub(&rem[s], &t);
            }
        }
        free_cols.iter().map(|&c| rem[c].clone()).collect()
    };
    let k = free_cols.len();
    let mut tensor = vec![vec![vec![]; k]; k];
    for (ai, &a) in free_cols.iter().enumerate() {
        for (bi, &b) in free_cols.iter().enumerate() {
            let mut ea = vec![fq.zero(); dim];
            ea[a] = fq.one();
            let mut eb = vec![fq.zero(); dim];
            eb[b] = fq.one();
            let prod = mult(&ea, &eb);
            tensor[ai][bi] = reduce(&prod);
        }
    }
    (k, tensor)
}

/// Right kernel of a column-major matrix over F_q.
fn fq_kernel(fq: &FqContext, dim: usize, cols: &[Vec<FqElem>]) -> Vec<Vec<FqElem>> {
    // rows[i][j] = entry i of column j
    let rows: Vec<Vec<FqElem>> = (0..dim)
        .map(|i| (0..cols.len()).map(|j| cols[j][i].clone()).collect())
        .collect();
    let (ech, pivots) = fq_echelon(fq, &rows_to_echelon_input(rows));
    let ncols = cols.len();
    let mut basis = vec![];
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![fq.zero(); ncols];
        v[free] = fq.one();
        for (row, &pc) in ech.iter().zip(&pivots) {
            v[pc] = fq.sub(&fq.zero(), &row[free]);
        }
        basis.push(v);
    }
    basis
}

fn rows_to_echelon_input(rows: Vec<Vec<FqElem>>) -> Vec<Vec<FqElem>> {
    rows
}

/// Row echelon with unit pivots over F_q; returns (rows, pivot columns).
fn fq_echelon(fq: &FqContext, rows: &[Vec<FqElem>]) -> (Vec<Vec<FqElem>>, Vec<usize>) {
    let mut work: Vec<Vec<FqElem>> = rows.iter().filter(|r| !r.iter().all(|c| fq.is_zero(c))).cloned().collect();
    let mut out = vec![];
    let mut pivots = vec![];
    while let Some(pos) = work.iter().position(|r| !r.iter().all(|c| fq.is_zero(c))) {
        let mut row = work.remove(pos);
        let pj = row.iter().position(|c| !fq.is_zero(c)).unwrap();
        let inv = fq.inv(&row[pj]).expect("field");
        for c in row.iter_mut() {
            *c = fq.mul(c, &inv);
        }
        for other in work.iter_mut().chain(out.iter_mut()) {
            let c = other[pj].clone();
            if fq.is_zero(&c) {
                continue;
            }
            for s in 0..other.len() {
                let t = fq.mul(&c, &row[s]);
                other[s] = fq.sub(&other[s], &t);
            }
        }
        out.push(row);
        pivots.push(pj);
    }
    (out, pivots)
}

impl BoundaryAlgebra {
    fn mult(&self, u: &[FqElem], v: &[FqElem]) -> Vec<FqElem> {
        let fq = &self.fq;
        let mut out = vec![fq.zero(); self.dim];
        for (i, cu) in u.iter().enumerate() {
            if fq.is_zero(cu) {
                continue;
            }
            for (j, cv) in v.iter().enumerate() {
                if fq.is_zero(cv) {
                    continue;
                }
                let coef = fq.mul(cu, cv);
                for l in 0..self.dim {
                    if fq.is_zero(&self.tensor[i][j][l]) {
                        continue;
                    }
                    let t = fq.mul(&coef, &self.tensor[i][j][l]);
                    out[l] = fq.add(&out[l], &t);
                }
            }
        }
        out
    }

    /// Minimal polynomial of an element, by the first linear dependency of
    /// its powers.
    fn minimal_polynomial(&self, theta: &[FqElem]) -> Vec<FqElem> {
        let fq = &self.fq;
        // Krylov rows: 1, theta, theta^2, ...
        let mut rows: Vec<Vec<FqElem>> = vec![];
        let mut cur = vec![fq.zero(); self.dim];
        // identity element: solve 1 = sum? The reduced algebra is unital; its
        // identity is the reduction of the ambient identity, which callers
        // provide as tensor structure.  Reconstruct it: look for e with
        // e * e_j = e_j for all j.  The ambient identity reduces to it; here
        // we find it by solving a linear system once.
        let ident = self.identity();
        cur.clone_from(&ident);
        loop {
            rows.push(cur.clone());
            // check dependency
            let (ech, pivots) = fq_echelon(fq, &rows);
            if ech.len() < rows.len() {
                break;
            }
            let _ = pivots;
            cur = self.mult(&cur, theta);
            if rows.len() > self.dim + 1 {
                break;
            }
        }
        // dependency among rows 0..k: solve sum c_i theta^i = 0 with c_k = 1
        let k = rows.len() - 1;
        // solve the linear system over F_q: sum_{i<k} c_i row_i = -row_k
        let mut aug: Vec<Vec<FqElem>> = (0..self.dim)
            .map(|col| {
                let mut r: Vec<FqElem> = (0..k).map(|i| rows[i][col].clone()).collect();
                r.push(fq.sub(&fq.zero(), &rows[k][col]));
                r
            })
            .collect();
        let (ech, pivots) = fq_echelon(fq, &aug);
        let mut coeffs = vec![fq.zero(); k + 1];
        coeffs[k] = fq.one();
        for (row, &pc) in ech.iter().zip(&pivots) {
            if pc < k {
                coeffs[pc] = row[k].clone();
            }
        }
        aug.clear();
        coeffs
    }

    fn identity(&self) -> Vec<FqElem> {
        let fq = &self.fq;
        // solve e * e_j = e_j for all j: dim^2 linear conditions on e
        let mut rows: Vec<Vec<FqElem>> = vec![];
        for j in 0..self.dim {
            for l in 0..self.dim {
                // sum_i e_i tensor[i][j][l] = delta_{jl}
                let mut row: Vec<FqElem> =
                    (0..self.dim).map(|i| self.tensor[i][j][l].clone()).collect();
                let rhs = if j == l { fq.one() } else { fq.zero() };
                row.push(rhs);
                rows.push(row);
            }
        }
        let (ech, pivots) = fq_echelon(fq, &rows);
        let mut e = vec![fq.zero(); self.dim];
        for (row, &pc) in ech.iter().zip(&pivots) {
            if pc < self.dim {
                e[pc] = row[self.dim].clone();
            }
        }
        e
    }

    /// Number of F_q-algebra homomorphisms into F_{q^i}: the degree of
    /// gcd(chi_theta, T^{q^i} - T) for a primitive theta.
    pub fn count_points(&self, i: usize) -> Result<u64, OracleError> {
        let fq = &self.fq;
        if self.dim == 0 {
            return Ok(0);
        }
        // candidate thetas: basis elements, then pairwise sums with small
        // scalar twists
        let mut candidates: Vec<Vec<FqElem>> = vec![];
        for b in 0..self.dim {
            let mut e = vec![fq.zero(); self.dim];
            e[b] = fq.one();
            candidates.push(e);
        }
        for a in 0..self.dim {
            for b in (a + 1)..self.dim {
                for s in 1..=3u64.min(fq.p - 1) {
                    let mut e = vec![fq.zero(); self.dim];
                    e[a] = fq.one();
                    let mut sc = fq.zero();
                    sc[0] = s % fq.p;
                    e[b] = sc;
                    candidates.push(e);
                }
            }
        }
        for theta in &candidates {
            let m = self.minimal_polynomial(theta);
            if m.len() != self.dim + 1 {
                continue;
            }
            // squarefree check: gcd(m, m') constant
            let dm: Vec<FqElem> = m
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| {
                    let mut s = fq.zero();
                    s[0] = (k as u64) % fq.p;
                    fq.mul(c, &s)
                })
                .collect();
            let g = fq.poly_gcd(&m, &dm);
            if g.len() != 1 {
                continue;
            }
            // count = deg gcd(m, T^{q^i} - T)
            return Ok(count_roots_in_extension(fq, &m, i));
        }
        Err(OracleError::NoPrimitiveElement)
    }
}

/// deg gcd(f, T^{q^i} - T) over F_q.
fn count_roots_in_extension(fq: &FqContext, f: &[FqElem], i: usize) -> u64 {
    let e = BigUint::from(fq.p).pow((fq.deg * i) as u32);
    // T^{q^i} mod f
    let t_poly = vec![fq.zero(), fq.one()];
    let mut acc = vec![fq.one()];
    let mut bits: Vec<bool> = vec![];
    let mut ee = e;
    while !ee.is_zero() {
        bits.push((&ee % 2u8) == BigUint::from(1u8));
        ee >>= 1;
    }
    for (idx, bit) in bits.iter().enumerate().rev() {
        if idx != bits.len() - 1 {
            acc = fq.poly_rem(&fq.poly_mul(&acc, &acc), f);
        }
        if *bit {
            acc = fq.poly_rem(&fq.poly_mul(&acc, &t_poly), f);
        }
    }
    let mut diff = acc;
    if diff.len() < 2 {
        diff.resize(2, fq.zero());
    }
    diff[1] = fq.sub(&diff[1], &fq.one());
    let g = fq.poly_gcd(f, &diff);
    (g.len().max(1) - 1) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split_algebra(p: u64) -> BoundaryAlgebra {
        // F_q x F_q with the coordinatewise product
        let fq = FqContext::for_extension(p, 1, 1).unwrap();
        let one = fq.one();
        let zero = fq.zero();
        let tensor = vec![
            vec![vec![one.clone(), zero.clone()], vec![zero.clone(), zero.clone()]],
            vec![vec![zero.clone(), zero.clone()], vec![zero.clone(), one.clone()]],
        ];
        BoundaryAlgebra { fq, dim: 2, tensor }
    }

    #[test]
    fn split_rank_two_counts_two() {
        let a = split_algebra(5);
        for i in 1..=3 {
            assert_eq!(a.count_points(i).unwrap(), 2);
        }
    }

    #[test]
    fn quadratic_field_counts_zero_then_two() {
        // F_{q^2} as F_q[u]/(u^2 - c) with c a non-square mod 7 (c = 3)
        let fq = FqContext::for_extension(7, 1, 1).unwrap();
        let one = fq.one();
        let zero = fq.zero();
        let mut three = fq.zero();
        three[0] = 3;
        let tensor = vec![
            vec![vec![one.clone(), zero.clone()], vec![zero.clone(), one.clone()]],
            vec![vec![zero.clone(), one.clone()], vec![three, zero.clone()]],
        ];
        let a = BoundaryAlgebra { fq, dim: 2, tensor };
        assert_eq!(a.count_points(1).unwrap(), 0);
        assert_eq!(a.count_points(2).unwrap(), 2);
        assert_eq!(a.count_points(3).unwrap(), 0);
        assert_eq!(a.count_points(4).unwrap(), 2);
    }
}
