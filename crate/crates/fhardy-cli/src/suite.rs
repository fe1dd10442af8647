//! The full verification battery behind `fhardy suite`.

use serde::Serialize;

use fhardy::operator::{build_fractional_laplacian, build_hardy_operator, build_log_grid};
use fhardy::quadrature::{
    gamma_negative_half, gamma_negative_half_integral_check, integrate_semiinfinite, schur_weight_integral, sphere_area,
};
use fhardy::specfun::{a_star, psi, psi_inv};
use fhardy::verify::{
    generalized_hardy_constant, kernel_ordering_check, monotonicity_sandwich_check, norm_ratio_sweep,
    poisson_anchor_check, potential_difference_envelope_check, reverse_hardy_constant, riesz_band_check,
    KernelCheckOptions, TestFamily, Verdict,
};
use fhardy::{make_params, VerificationReport};

use crate::commands::interpolating_potential;
use crate::config::RunConfig;
use crate::output::{num, Output};
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteEntry {
    pub check: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub limit: f64,
    pub detail: String,
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    reports: Vec<VerificationReport>,
}

type Check = fn(&mut Ctx) -> Result<SuiteEntry, CliError>;

fn entry(check: &'static str, passed: bool, measured: f64, limit: f64, detail: String) -> SuiteEntry {
    SuiteEntry { check, passed, measured, limit, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

fn seq(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ")
}

fn constants(ctx: &mut Ctx) -> Result<SuiteEntry, CliError> {
    let (d, alpha) = (ctx.cfg.d, ctx.cfg.alpha);
    let crit = a_star(d, alpha)?;
    let at_top = psi(d, alpha, 0.5 * (d as f64 - alpha))?;
    let at_zero = psi(d, alpha, 0.0)?;
    let err = rel(at_top, crit).max(at_zero.abs());
    Ok(entry("constants", err <= 1e-12, err, 1e-12, format!("a_* = {crit}; psi at the top of the branch = {at_top}")))
}

fn psi_round_trip(ctx: &mut Ctx) -> Result<SuiteEntry, CliError> {
    let (d, alpha) = (ctx.cfg.d, ctx.cfg.alpha);
    let top = 0.5 * (d as f64 - alpha);
    let mut worst: f64 = 0.0;
    for i in 1..=100 {
        let sigma = -alpha + (top + alpha) * i as f64 / 100.0;
        worst = worst.max((psi_inv(d, alpha, psi(d, alpha, sigma)?)? - sigma).abs());
    }
    Ok(entry("psi-inverse", worst <= 1e-8, worst, 1e-8, "100 points on the increasing branch".into()))
}

fn integrals(ctx: &mut Ctx) -> Result<SuiteEntry, CliError> {
    let d = ctx.cfg.d;
    let df = d as f64;
    let plain = integrate_semiinfinite(|t: f64| t.powf(-0.5) * t.powi(-4).min(1.0), 1e-13)?.value;
    let mut worst = rel(plain, 16.0 / 7.0);
    for s in [0.5, 1.0, 1.5] {
        worst = worst.max(rel(gamma_negative_half_integral_check(s)?.value, gamma_negative_half(s)?));
    }
    let beta = 0.5 * df;
    let schur = schur_weight_integral(beta, 0.0, d, 1e-12)?;
    worst = worst.max(rel(schur.value, sphere_area(d) * (1.0 / beta + 1.0 / (df - beta))));
    let mut flags = 0;
    for i in 0..5 {
        for j in 0..4 {
            let b = df * (0.05 + 0.225 * i as f64);
            let dp = 0.25 * df * j as f64 / 3.0;
            let r = schur_weight_integral(b, dp, d, 1e-10)?;
            if r.finite != (dp < b && b < df - dp) {
                flags += 1;
            }
        }
    }
    Ok(entry(
        "integral-identities",
        worst <= 1e-8 && flags == 0,
        worst,
        1e-8,
        format!("16/7 and Gamma(-s/2) identities; {flags} wrong divergence flags of 20"),
    ))
}

fn riesz(ctx: &mut Ctx) -> Result<SuiteEntry, CliError> {
    let (d, alpha) = (ctx.cfg.d, ctx.cfg.alpha);
    let crit = a_star(d, alpha)?;
    let bound = ctx.cfg.bound.unwrap_or(50.0);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for (a, s) in [(crit, 0.5), (0.5 * crit, 1.0)] {
        let p = make_params(d, alpha, a)?;
        let band = riesz_band_check(&p, s, ctx.cfg.samples, ctx.cfg.seed, bound)?;
        worst = worst.max(band.report.empirical_upper / band.report.empirical_lower);
        ok &= band.report.passed();
        ctx.reports.push(band.report);
    }
    Ok(entry("riesz-band", ok, worst, bound, format!("largest C/c over {} triples per case", ctx.cfg.samples)))
}

fn mellin(ctx: &mut Ctx) -> Result<SuiteEntry, CliError> {
    let (d, alpha) = (ctx.cfg.d, ctx.cfg.alpha);
    // pure powers need a decade of margin on each side at the configured step
    let base = ctx.cfg.grid;
    let span = (base.r_max / base.r_min).ln();
    let h = span / (base.n - 1) as f64;
    let n = ((span + 2.0 * 10f64.ln()) / h).round() as usize + 1;
    let g = build_log_grid(d, base.r_min / 10.0, base.r_max * 10.0, n)?;
    let t = build_fractional_laplacian(&g, alpha)?;
    let top = 0.5 * (d as f64 - alpha);
    let mut worst: f64 = 0.0;
    for frac in [0.3, 0.5, 0.7] {
        let sigma = frac * top;
        let tf = t.apply_matrix(&g.sample(|r| r.powf(-sigma)));
        let c = -psi(d, alpha, sigma)?;
        for i in g.interior(0.5) {
            worst = worst.max(rel(tf[i], c * g.nodes()[i].powf(-sigma - alpha)));
        }
    }
    Ok(entry("operator-symbol", worst <= 0.01, worst, 0.01, format!("interior error {worst:.3e} on pure powers, n = {}", g.len())))
}

fn friedrichs(ctx: &mut Ctx) -> Result<SuiteEntry, CliError> {
    let (d, alpha) = (ctx.cfg.d, ctx.cfg.alpha);
    let g = ctx.cfg.grid.build(d)?;
    let op = build_hardy_operator(&g, &make_params(d, alpha, a_star(d, alpha)?)?)?;
    let floor = -1e-8 * op.spectral_radius();
    let min = op.raw_min_eigenvalue();
    Ok(entry("friedrichs", min >= floor, min, floor, "smallest eigenvalue at the critical coupling".into()))
}

fn anchor(ctx: &mut Ctx) -> Result<SuiteEntry, CliError> {
    let opts = KernelCheckOptions { t_values: vec![1.0], ..Default::default() };
    let rep = poisson_anchor_check(ctx.cfg.d, &ctx.cfg.grid, &opts)?;
    let worst = (rep.empirical_lower - 1.0).abs().max((rep.empirical_upper - 1.0).abs());
    let e = entry("poisson-anchor", rep.passed(), worst, 0.05, rep.notes.join("; "));
    ctx.reports.push(rep);
    Ok(e)
}

fn monotonicity(ctx: &mut Ctx) -> Result<SuiteEntry, CliError> {
    let (d, alpha) = (ctx.cfg.d, ctx.cfg.alpha);
    let crit = a_star(d, alpha)?;
    let mut ok = true;
    let mut n = 0;
    for a in [0.5 * crit, -0.5 * crit] {
        let p = make_params(d, alpha, a)?;
        for rep in monotonicity_sandwich_check(&p, &[0.25, 0.5, 0.75], &ctx.cfg.grid, ctx.cfg.samples, ctx.cfg.seed, 1e-6)? {
            ok &= rep.passed();
            n += rep.samples;
            ctx.reports.push(rep);
        }
    }
    Ok(entry("monotonicity", ok, n as f64, 0.0, format!("{n} seeded probes")))
}

fn threshold(ctx: &mut Ctx) -> Result<SuiteEntry, CliError> {
    let (d, alpha) = (ctx.cfg.d, ctx.cfg.alpha);
    let p = make_params(d, alpha, a_star(d, alpha)?)?;
    let stable = generalized_hardy_constant(&p, 0.5, &ctx.cfg.grid, 3)?;
    // the constant grows like r_min^{-α(s-1)/2}: six tenfold steps give 10x at s = 1.5
    let growing = generalized_hardy_constant(&p, 1.5, &ctx.cfg.grid, 6)?;
    let growth = growing.sequence.last().copied().unwrap_or(f64::NAN) / growing.sequence[0];
    let sweep = norm_ratio_sweep(&p, &[0.9, 1.5], &TestFamily::singular_cutoff_default(), &ctx.cfg.grid, None)?;
    let ok = stable.verdict == Verdict::Pass
        && growing.verdict == Verdict::Diverging
        && sweep.reports[0].verdict == Verdict::Pass
        && sweep.reports[1].verdict == Verdict::Diverging;
    let detail = format!(
        "s=0.5 [{}] {}; s=1.5 [{}] {}; cutoff sweep s=0.9 {}, s=1.5 {}",
        seq(&stable.sequence),
        stable.verdict,
        seq(&growing.sequence),
        growing.verdict,
        sweep.reports[0].verdict,
        sweep.reports[1].verdict
    );
    ctx.reports.push(stable);
    ctx.reports.push(growing);
    ctx.reports.extend(sweep.reports);
    Ok(entry("threshold-dichotomy", ok, growth, 10.0, detail))
}

fn reverse(ctx: &mut Ctx) -> Result<SuiteEntry, CliError> {
    let (d, alpha) = (ctx.cfg.d, ctx.cfg.alpha);
    let crit = a_star(d, alpha)?;
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for a in [crit, 0.5 * crit] {
        let p = make_params(d, alpha, a)?;
        let exact = reverse_hardy_constant(&p, 2.0, &ctx.cfg.grid, 1)?;
        for c in &exact.sequence {
            worst = worst.max(rel(*c, a.abs()));
        }
        for s in [0.5, 1.0, 1.5] {
            let rep = reverse_hardy_constant(&p, s, &ctx.cfg.grid, 3)?;
            ok &= rep.verdict == Verdict::Pass;
            ctx.reports.push(rep);
        }
        ctx.reports.push(exact);
    }
    Ok(entry("reverse-hardy", ok && worst <= 1e-6, worst, 1e-6, "s=2 error against |a|; s<2 sequences stabilize".into()))
}

fn potential(ctx: &mut Ctx) -> Result<SuiteEntry, CliError> {
    let (d, alpha) = (ctx.cfg.d, ctx.cfg.alpha);
    let crit = a_star(d, alpha)?;
    let pot = interpolating_potential(d, alpha, crit, 0.5 * crit)?;
    let opts = KernelCheckOptions { t_values: ctx.cfg.t.clone(), ..Default::default() };
    let order = kernel_ordering_check(&pot, d, alpha, &ctx.cfg.grid, &opts)?;
    let env = potential_difference_envelope_check(&pot, d, alpha, &ctx.cfg.grid, &opts)?;
    let ok = order.passed() && env.passed();
    let e = entry(
        "potential-sandwich",
        ok,
        order.empirical_lower,
        -opts.slack,
        format!("ordering {}; envelope [{}] {}", order.verdict, seq(&env.sequence), env.verdict),
    );
    ctx.reports.push(order);
    ctx.reports.push(env);
    Ok(e)
}

const CHECKS: [Check; 11] =
    [constants, psi_round_trip, integrals, riesz, mellin, friedrichs, anchor, monotonicity, threshold, reverse, potential];

pub fn run(cfg: &RunConfig, out: &mut Output) -> Result<bool, CliError> {
    let mut ctx = Ctx { cfg, reports: Vec::new() };
    let mut entries = Vec::new();
    let mut all = true;
    let mut failure = None;
    for check in CHECKS {
        match check(&mut ctx) {
            Ok(e) => {
                all &= e.passed;
                out.line(format!("{} {}: {}", if e.passed { "PASS" } else { "FAIL" }, e.check, e.detail));
                out.row(vec![e.check.to_string(), e.passed.to_string(), num(e.measured), num(e.limit), e.detail.clone()]);
                entries.push(e);
            }
            Err(err) => {
                failure = Some(err);
                break;
            }
        }
    }
    out.value("checks", &entries);
    out.reports = ctx.reports;
    match failure {
        Some(err) => Err(err),
        None => Ok(all),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn schur_reference_value() {
        let r = schur_weight_integral(1.0, 0.0, 3, 1e-12).unwrap();
        assert!((r.value - 6.0 * PI).abs() < 1e-9);
    }
}
