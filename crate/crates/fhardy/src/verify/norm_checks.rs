use faer::{Mat, MatRef, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::families::TestFamily;
use super::{sequence_verdict, GridSpec, Verdict, VerificationReport, DEFAULT_RATIO_BOUND};
use crate::operator::{build_fractional_laplacian, build_hardy_operator, build_log_grid, RadialGrid, SpectralOperator};
use crate::specfun::HardyParams;
use crate::{domain, Error, Result};

/// One CSV row of a norm-ratio sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub d: u32,
    pub alpha: f64,
    pub a: f64,
    pub delta: f64,
    pub s: f64,
    pub family: String,
    pub member_id: String,
    pub ratio_forward: f64,
    pub ratio_backward: f64,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    /// One report per `s`, in input order.
    pub reports: Vec<VerificationReport>,
    pub rows: Vec<SweepRow>,
}

/// Coefficients of `f` in the eigenbasis.
fn coefficients(op: &SpectralOperator, f: &[f64]) -> Vec<f64> {
    let g = op.grid().to_orthonormal(f);
    let v = op.eigenvectors();
    (0..g.len())
        .map(|k| {
            let col = v.col(k);
            (0..g.len()).map(|i| col[i] * g[i]).sum()
        })
        .collect()
}

/// `‖L^p f‖` from eigen-coefficients; negative powers skip the kernel.
fn power_norm(op: &SpectralOperator, coef: &[f64], p: f64) -> f64 {
    op.power_values(p).iter().zip(coef).map(|(l, c)| (l * c).powi(2)).sum::<f64>().sqrt()
}

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s <= 2.0 {
        Ok(())
    } else {
        domain(format!("s must lie in (0, 2], got {s}"))
    }
}

fn range_note(params: &HardyParams, s: f64) -> String {
    let fwd = params.forward_threshold();
    let bwd = params.backward_threshold();
    format!(
        "direction 1 needs s < {fwd} ({}); direction 2 needs s < {bwd} ({})",
        if s < fwd { "in range" } else { "out of range" },
        if s < bwd { "in range" } else { "out of range" }
    )
}

fn grid_with_step(d: u32, r_min: f64, r_max: f64, h: f64) -> Result<RadialGrid> {
    let n = ((r_max / r_min).ln() / h).round() as usize + 1;
    build_log_grid(d, r_min, r_max, n)
}

/// Ratios `‖|p|^{αs/2}f‖/‖𝓛^{s/2}f‖` and their reciprocals over a family.
pub fn norm_ratio_sweep(
    params: &HardyParams,
    s_values: &[f64],
    family: &TestFamily,
    grid: &GridSpec,
    bound: Option<f64>,
) -> Result<SweepOutcome> {
    for &s in s_values {
        check_s(s)?;
    }
    let bound = bound.unwrap_or(DEFAULT_RATIO_BOUND);
    let base = grid.build(params.d())?;
    // (kinetic, full) operator pairs, and per member: id, both coefficient
    // vectors and the index of its pair
    let mut ops: Vec<(SpectralOperator, SpectralOperator)> = Vec::new();
    let mut cases: Vec<(String, Vec<f64>, Vec<f64>, usize)> = Vec::new();
    let mut notes = Vec::new();
    match family {
        TestFamily::SingularCutoff { .. } => {
            for eps in family.cutoffs()? {
                let g = grid_with_step(params.d(), eps, grid.r_max, base.log_step())?;
                let kin = build_fractional_laplacian(&g, params.alpha())?;
                let full = build_hardy_operator(&g, params)?;
                let bump = g.sample(|r| (-(r.ln()).powi(2)).exp());
                let f = full.apply_power(-1.0, &bump)?;
                cases.push((format!("eps={eps}"), coefficients(&kin, &f), coefficients(&full, &f), ops.len()));
                ops.push((kin, full));
            }
        }
        _ => {
            let kin = build_fractional_laplacian(&base, params.alpha())?;
            let full = build_hardy_operator(&base, params)?;
            for m in family.sample(&base, params)? {
                if base.norm(&m.values) == 0.0 {
                    notes.push(format!("member {} has zero norm on the grid and was skipped", m.id));
                    continue;
                }
                cases.push((m.id, coefficients(&kin, &m.values), coefficients(&full, &m.values), 0));
            }
            ops.push((kin, full));
        }
    }

    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for &s in s_values {
        let mut forward = Vec::new();
        let mut backward = Vec::new();
        let mut rep = VerificationReport::new("norm-ratio-sweep", params, Some(s), base.info());
        rep.notes = notes.clone();
        for (id, ck, cf, k) in &cases {
            let (kin, full) = &ops[*k];
            let nk = power_norm(kin, ck, 0.5 * s);
            let nf = power_norm(full, cf, 0.5 * s);
            if nk == 0.0 || nf == 0.0 {
                rep.notes.push(format!("member {id} is annihilated at s={s} and was skipped"));
                continue;
            }
            let fw = nk / nf;
            forward.push(fw);
            backward.push(1.0 / fw);
            rows.push(SweepRow {
                d: params.d(),
                alpha: params.alpha(),
                a: params.a(),
                delta: params.delta(),
                s,
                family: family.name().to_string(),
                member_id: id.clone(),
                ratio_forward: fw,
                ratio_backward: 1.0 / fw,
            });
        }
        rep.set_range(&forward);
        let back_max = backward.iter().copied().fold(f64::NAN, f64::max);
        rep.notes.push(format!("family {}; max backward ratio {back_max}", family.name()));
        rep.notes.push(range_note(params, s));
        let fw_max = rep.empirical_upper;
        rep.verdict = if forward.is_empty() {
            Verdict::Fail
        } else if family.is_cutoff_sequence() {
            rep.sequence = forward.clone();
            match sequence_verdict(&forward) {
                Verdict::Pass if fw_max.max(back_max) > bound => Verdict::Fail,
                v => v,
            }
        } else if fw_max <= bound && back_max <= bound {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        reports.push(rep);
    }
    Ok(SweepOutcome { reports, rows })
}

pub(crate) fn largest_eigenvalue(m: MatRef<'_, f64>) -> Result<f64> {
    let ev = m.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
    Ok(ev.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

fn refinement_grids(params: &HardyParams, grid: &GridSpec, n_refinements: u32) -> Result<Vec<RadialGrid>> {
    let base = grid.build(params.d())?;
    (0..=n_refinements).map(|k| base.extended_inward(k)).collect()
}

/// Best constant in `‖|x|^{−αs/2}f‖ ≤ C‖𝓛^{s/2}f‖` on grids extended
/// inward by successive factors of ten.
pub fn generalized_hardy_constant(
    params: &HardyParams,
    s: f64,
    grid: &GridSpec,
    n_refinements: u32,
) -> Result<VerificationReport> {
    check_s(s)?;
    let grids = refinement_grids(params, grid, n_refinements)?;
    let mut seq = Vec::with_capacity(grids.len());
    for g in &grids {
        let op = build_hardy_operator(g, params)?;
        let b = op.power_matrix(-0.5 * s);
        let w: Vec<f64> = g.nodes().iter().map(|r| r.powf(-params.alpha() * s)).collect();
        let bw = Mat::from_fn(b.nrows(), b.ncols(), |i, j| b[(i, j)] * w[j]);
        let m = &bw * &b;
        seq.push(largest_eigenvalue(m.as_ref())?.max(0.0).sqrt());
    }
    let mut rep = VerificationReport::new("generalized-hardy", params, Some(s), grids[0].info());
    rep.set_range(&seq);
    rep.verdict = sequence_verdict(&seq);
    let r_mins: Vec<String> = grids.iter().map(|g| format!("{:e}", g.r_min())).collect();
    rep.notes.push(format!("r_min sequence {}", r_mins.join(", ")));
    rep.notes.push(range_note(params, s));
    rep.sequence = seq;
    Ok(rep)
}

/// Best constant in `‖(𝓛^{s/2} − |p|^{αs/2})f‖ ≤ C‖|x|^{−αs/2}f‖` across
/// inward refinements. At `s = 2` the difference is formed directly.
pub fn reverse_hardy_constant(
    params: &HardyParams,
    s: f64,
    grid: &GridSpec,
    n_refinements: u32,
) -> Result<VerificationReport> {
    check_s(s)?;
    let grids = refinement_grids(params, grid, n_refinements)?;
    let mut seq = Vec::with_capacity(grids.len());
    for g in &grids {
        let kin = build_fractional_laplacian(g, params.alpha())?;
        let full = build_hardy_operator(g, params)?;
        let diff = if s == 2.0 {
            full.matrix() - kin.matrix()
        } else {
            full.power_matrix(0.5 * s) - kin.power_matrix(0.5 * s)
        };
        let w: Vec<f64> = g.nodes().iter().map(|r| r.powf(0.5 * params.alpha() * s)).collect();
        let b = Mat::from_fn(diff.nrows(), diff.ncols(), |i, j| diff[(i, j)] * w[j]);
        let gram = b.transpose() * &b;
        seq.push(largest_eigenvalue(gram.as_ref())?.max(0.0).sqrt());
    }
    let mut rep = VerificationReport::new("reverse-hardy", params, Some(s), grids[0].info());
    rep.set_range(&seq);
    rep.verdict = sequence_verdict(&seq);
    rep.sequence = seq;
    Ok(rep)
}

/// `‖f‖_{L^{2d/(d−αs)}} / ‖𝓛^{s/2}f‖` over a family.
pub fn sobolev_check(
    params: &HardyParams,
    s: f64,
    family: &TestFamily,
    grid: &GridSpec,
    bound: Option<f64>,
) -> Result<VerificationReport> {
    let df = params.d() as f64;
    let alpha = params.alpha();
    if !(s > 0.0) || alpha * s >= df {
        return domain(format!("Sobolev exponent needs 0 < αs < d, got αs = {}", alpha * s));
    }
    let top = if params.a() >= 0.0 { params.backward_threshold() } else { params.forward_threshold() };
    if s >= top {
        return domain(format!("s = {s} is outside the Sobolev window (0, {top})"));
    }
    let q = 2.0 * df / (df - alpha * s);
    let g = grid.build(params.d())?;
    let op = build_hardy_operator(&g, params)?;
    let mut ratios = Vec::new();
    let mut rep = VerificationReport::new("sobolev", params, Some(s), g.info());
    for m in family.sample(&g, params)? {
        let lq = g.lp_norm(&m.values, q);
        let energy = power_norm(&op, &coefficients(&op, &m.values), 0.5 * s);
        if energy == 0.0 {
            rep.notes.push(format!("member {} has zero energy and was skipped", m.id));
            continue;
        }
        ratios.push(lq / energy);
    }
    rep.set_range(&ratios);
    rep.notes.push(format!("Lebesgue exponent q = {q}"));
    let bound = bound.unwrap_or(DEFAULT_RATIO_BOUND);
    rep.verdict = if !ratios.is_empty() && rep.empirical_lower > 0.0 && rep.empirical_upper / rep.empirical_lower <= bound {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    rep.sequence = ratios;
    Ok(rep)
}

/// Quadratic-form sandwich between `‖𝓛^{s/2}f‖²` and `‖|p|^{αs/2}f‖²`
/// with factor `(1 − a/a_*)^s`, for seeded random grid vectors.
/// Returns one report per `s`.
pub fn monotonicity_sandwich_check(
    params: &HardyParams,
    s_values: &[f64],
    grid: &GridSpec,
    n_vectors: usize,
    seed: u64,
    rel_slack: f64,
) -> Result<Vec<VerificationReport>> {
    for &s in s_values {
        if !(s > 0.0 && s < 1.0) {
            return domain(format!("operator monotonicity needs 0 < s < 1, got {s}"));
        }
    }
    let g = grid.build(params.d())?;
    let kin = build_fractional_laplacian(&g, params.alpha())?;
    let full = build_hardy_operator(&g, params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.len();
    let probes: Vec<Vec<f64>> =
        (0..n_vectors).map(|_| g.from_orthonormal(&(0..n).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>())).collect();
    let coefs: Vec<(Vec<f64>, Vec<f64>)> = probes.iter().map(|f| (coefficients(&kin, f), coefficients(&full, f))).collect();
    let factor = 1.0 - params.a() / params.a_star();
    let mut out = Vec::new();
    for &s in s_values {
        let c = factor.powf(s);
        let (lo, hi) = if c <= 1.0 { (c, 1.0) } else { (1.0, c) };
        let ratios: Vec<f64> = coefs
            .iter()
            .map(|(ck, cf)| power_norm(&full, cf, 0.5 * s).powi(2) / power_norm(&kin, ck, 0.5 * s).powi(2))
            .collect();
        let mut rep = VerificationReport::new("monotonicity-sandwich", params, Some(s), g.info());
        rep.set_range(&ratios);
        rep.notes.push(format!("expected band [{lo}, {hi}], relative slack {rel_slack}, seed {seed}"));
        let ok = ratios.iter().all(|r| r.is_finite() && *r >= lo * (1.0 - rel_slack) && *r <= hi * (1.0 + rel_slack));
        rep.verdict = if ok && !ratios.is_empty() { Verdict::Pass } else { Verdict::Fail };
        out.push(rep);
    }
    Ok(out)
}
