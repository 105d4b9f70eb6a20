//! Pipeline orchestration: parse, plan precision, run the four steps, verify
//! and emit the report.

use std::time::Instant;

use num_bigint::BigUint;

use crate::cohomology::{build_basis, reduce_to_matrix, ReductionCache};
use crate::curve::{audit_assumptions, build_curve, residue_matrices, CurveData};
use crate::doc::CurveDocument;
use crate::error::Error;
use crate::frobenius::{
    frobenius_matrices, lift_inverse_r, lift_y, push_forward_forms, FrobEngine,
};
use crate::oracle::{self, OracleData};
use crate::precision::{chi_precision, plan_for_curve};
use crate::report::{
    AuditBlock, AuditClauseReport, OracleBlock, PrecisionReport, ReportDocument, Timings,
    ZetaBlock,
};
use crate::zeta::{
    char_poly_reverse, counts_from_lpoly, matrix_min_val, recover_integer_lpoly, twisted_norm,
    LPolynomial,
};

/// Extra setup digits beyond the working precision, covering saturation and
/// solve losses in the derived data.
const SETUP_RESERVE: u32 = 8;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub precision_margin: u32,
    /// Unsafe expert override of the working precision.
    pub forced_n: Option<u32>,
    pub oracle_depth: usize,
    pub audit_only: bool,
    pub threads: usize,
    pub oracle_budget: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            precision_margin: 1,
            forced_n: None,
            oracle_depth: 0,
            audit_only: false,
            threads: 1,
            oracle_budget: oracle::DEFAULT_BUDGET,
        }
    }
}

pub fn run(doc: &CurveDocument, opts: &RunOptions) -> Result<ReportDocument, Error> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.max(1))
        .build()
        .map_err(|e| Error::Pipeline(e.to_string()))?;
    pool.install(|| run_inner(doc, opts))
}

fn run_inner(doc: &CurveDocument, opts: &RunOptions) -> Result<ReportDocument, Error> {
    let t_start = Instant::now();
    let p = doc.prime()?;
    let n = doc.n;
    let q_big = p.pow(n as u32);
    let mut report = ReportDocument::new_shell(p.to_string(), n, q_big.to_string());
    let mut timings = Timings::default();

    // crude setup precision from the genus bound
    let dx_doc = doc.q.len().saturating_sub(1);
    let dy_doc = doc.q.iter().map(|r| r.len().saturating_sub(1)).max().unwrap_or(0);
    if dx_doc < 1 {
        return Err(Error::Parse("Q must have positive degree in y".into()));
    }
    let g_bound = ((dx_doc.max(2) - 1) * dy_doc.max(1)).max(1);
    let chi_hat = chi_precision(g_bound, n, &p);
    let mut setup_n = chi_hat + 2 * SETUP_RESERVE;
    if let Some(fnn) = opts.forced_n {
        setup_n = setup_n.max(fnn + SETUP_RESERVE);
    }

    // first pass: build and plan
    let (cd, genus, plan) = loop {
        let t0 = Instant::now();
        let ctx = doc.context(setup_n)?;
        let q_poly = doc.bi_poly(&ctx)?;
        let w0 = doc.matrix(&doc.w0, &ctx)?;
        let winf = doc.matrix(&doc.winf, &ctx)?;
        let overrides = match (doc.e0, doc.einf) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        };
        let mut cd = build_curve(q_poly, w0, winf, &ctx, overrides)?;
        timings.setup_ms += t0.elapsed().as_millis();

        let audit = audit_assumptions(&cd);
        report.audit = AuditBlock {
            passed: audit.passed(),
            clauses: audit
                .clauses
                .iter()
                .map(|c| AuditClauseReport {
                    name: c.name.to_string(),
                    passed: c.passed,
                    detail: c.detail.clone(),
                })
                .collect(),
        };
        if !audit.passed() {
            let failing: Vec<String> = audit
                .failures()
                .iter()
                .map(|c| format!("{}: {}", c.name, c.detail))
                .collect();
            return Err(Error::AuditFailure(failing.join("; ")));
        }

        let t1 = Instant::now();
        let rd = residue_matrices(&cd)?;
        let basis = build_basis(&cd, &rd)?;
        timings.basis_ms += t1.elapsed().as_millis();
        let genus = basis.genus;
        cd.genus = Some(genus);
        let plan = plan_for_curve(&cd, genus, opts.precision_margin, opts.forced_n);
        if plan.n_used + SETUP_RESERVE > setup_n {
            setup_n = plan.n_used + SETUP_RESERVE;
            continue;
        }
        break (cd, genus, plan);
    };

    report.genus = genus;
    if opts.audit_only {
        report.warnings.push("audit-only run: chi not computed".into());
        report.timings_ms = timings;
        return Ok(report);
    }

    // genus 0: chi = 1 without running the pipeline
    if genus == 0 {
        let l = LPolynomial::trivial(q_big.clone());
        finish_report(
            &mut report,
            &cd,
            &l,
            None,
            timings,
            opts,
            genus,
            t_start,
        )?;
        return Ok(report);
    }

    // working-precision pass
    let t2 = Instant::now();
    let cd_run = cd
        .truncate_to(plan.n_used)
        .map_err(|e| Error::Pipeline(e.to_string()))?;
    let ctx_run = cd_run.ctx.clone();
    let rd_run = residue_matrices(&cd_run)?;
    let basis_run = build_basis(&cd_run, &rd_run)?;
    if basis_run.genus != genus {
        return Err(Error::Pipeline(format!(
            "genus changed under truncation: {} vs {genus}",
            basis_run.genus
        )));
    }
    timings.basis_ms += t2.elapsed().as_millis();

    let t3 = Instant::now();
    let n_digits = plan.n_used;
    let mut engine = FrobEngine::new(&cd_run, &ctx_run, 0);
    let (alpha, _resid_a) = lift_inverse_r(&mut engine, n_digits)?;
    let (beta, _resid_b) = lift_y(&mut engine, &alpha, n_digits)?;
    let fmats = frobenius_matrices(&mut engine, &alpha, &beta, n_digits)?;
    let forms: Vec<_> = basis_run.omega_vecs[..2 * genus].to_vec();
    let pushed = push_forward_forms(&mut engine, &fmats.psi, &forms, n_digits)?;
    timings.frobenius_ms = t3.elapsed().as_millis();

    let t4 = Instant::now();
    let mut cache = ReductionCache::new(&cd_run, &rd_run)?;
    let fmat = reduce_to_matrix(
        &cd_run,
        &basis_run,
        &mut cache,
        &pushed,
        plan.delta,
        plan.f_digits as i64,
    )?;
    timings.reduction_ms = t4.elapsed().as_millis();

    let t5 = Instant::now();
    let f_norm = twisted_norm(&ctx_run, &fmat.entries);
    let approx = char_poly_reverse(&ctx_run, &f_norm);
    let l = recover_integer_lpoly(&ctx_run, &approx, &plan, &q_big, genus)?;
    timings.recover_ms = t5.elapsed().as_millis();

    let entry_floor = matrix_min_val(&ctx_run, &fmat.entries);
    report.precision = Some(PrecisionReport {
        chi_digits: plan.chi_digits,
        delta1: plan.delta1,
        delta2: plan.delta2,
        delta: plan.delta,
        f_digits: plan.f_digits,
        n_minimal: plan.n_minimal,
        n_used: plan.n_used,
        margin: plan.margin,
        forced: plan.forced,
        e0: plan.e0,
        einf: plan.einf,
        setup_precision: cd.ctx.precision(),
        max_finite_step_loss: fmat.stats.max_finite_step_loss,
        finite_loss_bound: fmat.stats.finite_bound,
        infinite_loss: fmat.stats.max_infinite_loss,
        infinite_loss_bound: fmat.stats.infinite_bound,
        coordinate_loss: fmat.stats.coordinate_loss,
        losses_within_bounds: fmat.stats.finite_ok && fmat.stats.infinite_ok,
        frobenius_entry_floor: entry_floor.min(i64::MAX / 8),
    });

    finish_report(&mut report, &cd, &l, Some(&plan), timings, opts, genus, t_start)?;
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn finish_report(
    report: &mut ReportDocument,
    cd: &CurveData,
    l: &LPolynomial,
    _plan: Option<&crate::precision::PrecisionPlan>,
    mut timings: Timings,
    opts: &RunOptions,
    genus: usize,
    _t_start: Instant,
) -> Result<(), Error> {
    report.chi = l.coeffs.iter().map(|c| c.to_string()).collect();
    report.zeta = ZetaBlock {
        numerator: report.chi.clone(),
        denominator: "(1-T)(1-qT)".into(),
    };
    let imax = genus.max(opts.oracle_depth).max(1);
    let counts = counts_from_lpoly(l, imax)?;
    report.counts = counts.iter().map(|c| c.to_string()).collect();

    if opts.oracle_depth > 0 {
        let t6 = Instant::now();
        let data = OracleData::from_curve(cd)?;
        let mut oracle_counts = vec![];
        let mut matches = true;
        for i in 1..=opts.oracle_depth {
            let c = data.count_total(i, opts.oracle_budget)?;
            matches &= c == counts[i - 1];
            oracle_counts.push(c.to_string());
        }
        timings.oracle_ms = t6.elapsed().as_millis();
        report.oracle = Some(OracleBlock {
            depth: opts.oracle_depth,
            counts: oracle_counts.clone(),
            pipeline_counts: report.counts[..opts.oracle_depth].to_vec(),
            matches,
        });
        if !matches {
            report.timings_ms = timings;
            return Err(Error::Pipeline(format!(
                "oracle mismatch: enumeration gives {:?}, chi gives {:?}",
                oracle_counts,
                &report.counts[..opts.oracle_depth]
            )));
        }
    }
    report.timings_ms = timings;
    Ok(())
}

/// Convenience entry point for hyperelliptic models.
pub fn run_hyperelliptic(
    p: &BigUint,
    n: usize,
    f_coeffs: &[num_bigint::BigInt],
    opts: &RunOptions,
) -> Result<ReportDocument, Error> {
    let doc = CurveDocument::hyperelliptic(p, n, f_coeffs);
    run(&doc, opts)
}
