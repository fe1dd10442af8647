use faer::Mat;

use super::{interior_samples, sequence_verdict, GridSpec, Verdict, VerificationReport};
use crate::kernels::{hardy_unchecked, l_envelope, m_unchecked, poisson_kernel_exact, poisson_sphere_average_d3, KernelTriple};
use crate::operator::{
    build_fractional_laplacian, build_hardy_operator, build_log_grid, build_potential_operator, RadialGrid,
    SpectralOperator,
};
use crate::quadrature::angular_average;
use crate::specfun::{make_params, HardyParams};
use crate::{domain, PotentialSpec, Result};

const ANGULAR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct KernelCheckOptions {
    pub t_values: Vec<f64>,
    /// Nodes per axis sampled from the middle half of the grid.
    pub samples_per_axis: usize,
    /// Largest admissible C/c for two-sided comparisons.
    pub bound: f64,
    /// Entrywise slack relative to the largest entry.
    pub slack: f64,
}

impl Default for KernelCheckOptions {
    fn default() -> Self {
        Self { t_values: vec![0.1, 1.0, 10.0], samples_per_axis: 24, bound: 100.0, slack: 1e-10 }
    }
}

/// Keeps `t` with `10 r_min^α ≤ t ≤ r_max^α / 10`; notes the rest.
fn admissible_times(grid: &RadialGrid, alpha: f64, ts: &[f64], notes: &mut Vec<String>) -> Result<Vec<f64>> {
    let lo = 10.0 * grid.r_min().powf(alpha);
    let hi = grid.r_max().powf(alpha) / 10.0;
    let mut out = Vec::new();
    for &t in ts {
        if !(t > 0.0 && t.is_finite()) {
            return domain(format!("times must be positive, got {t}"));
        }
        if t < lo || t > hi {
            notes.push(format!("t={t} outside [{lo:e}, {hi:e}]; excluded"));
        } else {
            out.push(t);
        }
    }
    Ok(out)
}

fn heat_values(op: &SpectralOperator, t: f64) -> Mat<f64> {
    let v: Vec<f64> = op.eigenvalues().iter().map(|l| (-t * l).exp()).collect();
    op.function_matrix_from_values(&v)
}

fn extremes(m: &Mat<f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            lo = lo.min(m[(i, j)]);
            hi = hi.max(m[(i, j)]);
        }
    }
    (lo, hi)
}

fn pairs(idx: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    idx.iter().enumerate().flat_map(move |(k, &i)| idx[k..].iter().map(move |&j| (i, j)))
}

/// Discrete heat kernel of `𝓛_{a,α}` against the angular average of the
/// comparison profile, over interior node pairs.
pub fn heat_sandwich_check(params: &HardyParams, grid: &GridSpec, opts: &KernelCheckOptions) -> Result<VerificationReport> {
    let g = grid.build(params.d())?;
    let op = build_hardy_operator(&g, params)?;
    let mut rep = VerificationReport::new("heat-sandwich", params, None, g.info());
    let ts = admissible_times(&g, params.alpha(), &opts.t_values, &mut rep.notes)?;
    let idx = interior_samples(&g, opts.samples_per_axis);
    let r = g.nodes();
    let mut ratios = Vec::new();
    let mut min_entry: f64 = 0.0;
    for &t in &ts {
        let m = heat_values(&op, t);
        let (lo, hi) = extremes(&m);
        min_entry = min_entry.min(lo / hi);
        let k = op.kernel_values(m.as_ref());
        let scale = [t.powf(1.0 / params.alpha())];
        for (i, j) in pairs(&idx) {
            let profile = angular_average(
                params.d(),
                r[i],
                r[j],
                |rxy| hardy_unchecked(t, r[i], r[j], rxy, params),
                &scale,
                ANGULAR_TOL,
            )?;
            ratios.push(k[(i, j)] / profile);
        }
    }
    rep.set_range(&ratios);
    rep.notes.push(format!("times {ts:?}; most negative entry / max entry = {min_entry:e}"));
    let (c, cc) = (rep.empirical_lower, rep.empirical_upper);
    rep.verdict = if ratios.is_empty() || !(c > 0.0) || cc / c > opts.bound || min_entry < -opts.slack {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    rep.sequence = ratios;
    Ok(rep)
}

/// Discrete heat kernel of `|p|` against the angular-averaged Poisson
/// kernel; passes when every interior ratio is within 5% of one and no
/// entry falls below `−slack` times the largest.
pub fn poisson_anchor_check(d: u32, grid: &GridSpec, opts: &KernelCheckOptions) -> Result<VerificationReport> {
    let params = make_params(d, 1.0, 0.0)?;
    let g = grid.build(d)?;
    let op = build_fractional_laplacian(&g, 1.0)?;
    let mut rep = VerificationReport::new("poisson-anchor", &params, None, g.info());
    let ts = admissible_times(&g, 1.0, &opts.t_values, &mut rep.notes)?;
    let idx = interior_samples(&g, opts.samples_per_axis);
    let r = g.nodes();
    let mut ratios = Vec::new();
    let mut min_entry: f64 = 0.0;
    for &t in &ts {
        let m = heat_values(&op, t);
        let k = op.kernel_values(m.as_ref());
        let (lo, hi) = extremes(&k);
        min_entry = min_entry.min(lo / hi);
        for (i, j) in pairs(&idx) {
            let exact = if d == 3 {
                poisson_sphere_average_d3(t, r[i], r[j])?
            } else {
                angular_average(d, r[i], r[j], |u| poisson_kernel_exact(t, u, d).unwrap_or(f64::NAN), &[t], ANGULAR_TOL)?
            };
            ratios.push(k[(i, j)] / exact);
        }
    }
    rep.set_range(&ratios);
    let worst = ratios.iter().map(|q| (q - 1.0).abs()).fold(0.0f64, f64::max);
    rep.notes.push(format!("times {ts:?}; worst relative error {worst:e}; most negative entry / max = {min_entry:e}"));
    rep.verdict = if !ratios.is_empty() && worst <= 0.05 && min_entry >= -opts.slack { Verdict::Pass } else { Verdict::Fail };
    rep.sequence = ratios;
    Ok(rep)
}

/// Which sign the difference kernel must have, if any.
#[derive(Clone, Copy, PartialEq)]
enum SignClaim {
    Nonnegative,
    Nonpositive,
    Zero,
    None,
}

struct Level {
    sup: f64,
    worst_sign: f64,
    samples: usize,
}

/// `sup |K_t| / (L_t + ⟨M_t⟩)` over samples at fixed radii, where
/// `K_t = e^{−t|p|^α} − e^{−t·full}`.
fn envelope_level(
    g: &RadialGrid,
    envelope: &HardyParams,
    full: &SpectralOperator,
    radii: &[f64],
    ts: &[f64],
    claim: SignClaim,
) -> Result<Level> {
    let kin = build_fractional_laplacian(g, envelope.alpha())?;
    let idx: Vec<usize> = radii.iter().map(|&x| nearest(g, x)).collect();
    let r = g.nodes();
    let mut sup: f64 = 0.0;
    let mut worst_sign: f64 = 0.0;
    let mut samples = 0;
    for &t in ts {
        let free = heat_values(&kin, t);
        let diff = &free - heat_values(full, t);
        let (lo, hi) = extremes(&diff);
        let size = lo.abs().max(hi.abs());
        if size > 0.0 {
            let bad = match claim {
                SignClaim::Nonnegative => (-lo).max(0.0),
                SignClaim::Nonpositive => hi.max(0.0),
                SignClaim::Zero => size,
                SignClaim::None => 0.0,
            };
            // relative to the free heat kernel's largest entry
            let (_, top) = extremes(&free);
            worst_sign = worst_sign.max(bad / top);
        }
        let k = kin.kernel_values(diff.as_ref());
        let scale = [t.powf(1.0 / envelope.alpha())];
        for (i, j) in pairs(&idx) {
            let q = KernelTriple::new(r[i], r[j], (r[i] - r[j]).abs())?;
            let l = l_envelope(t, &q, envelope)?;
            let m = angular_average(
                envelope.d(),
                r[i],
                r[j],
                |rxy| m_unchecked(t, r[i], r[j], rxy, envelope),
                &scale,
                ANGULAR_TOL,
            )?;
            sup = sup.max(k[(i, j)].abs() / (l + m));
            samples += 1;
        }
    }
    Ok(Level { sup, worst_sign, samples })
}

fn nearest(g: &RadialGrid, x: f64) -> usize {
    let u = (x / g.r_min()).ln() / g.log_step();
    (u.round().max(0.0) as usize).min(g.len() - 1)
}

/// Base grid and a grid with halved log step over the same range.
fn envelope_grids(d: u32, grid: &GridSpec) -> Result<[RadialGrid; 2]> {
    Ok([grid.build(d)?, build_log_grid(d, grid.r_min, grid.r_max, 2 * grid.n - 1)?])
}

fn envelope_report(
    name: &str,
    envelope: &HardyParams,
    grid: &GridSpec,
    opts: &KernelCheckOptions,
    claim: SignClaim,
    build_full: impl Fn(&RadialGrid) -> Result<SpectralOperator>,
) -> Result<VerificationReport> {
    let grids = envelope_grids(envelope.d(), grid)?;
    let mut rep = VerificationReport::new(name, envelope, None, grids[0].info());
    let ts = admissible_times(&grids[0], envelope.alpha(), &opts.t_values, &mut rep.notes)?;
    let radii: Vec<f64> = interior_samples(&grids[0], opts.samples_per_axis).iter().map(|&i| grids[0].nodes()[i]).collect();
    let mut seq = Vec::new();
    let mut worst_sign: f64 = 0.0;
    let mut samples = 0;
    for g in &grids {
        let full = build_full(g)?;
        let lv = envelope_level(g, envelope, &full, &radii, &ts, claim)?;
        seq.push(lv.sup);
        worst_sign = worst_sign.max(lv.worst_sign);
        samples += lv.samples;
    }
    rep.set_range(&seq);
    rep.samples = samples;
    let claim_text = match claim {
        SignClaim::Nonnegative => "K_t >= 0",
        SignClaim::Nonpositive => "K_t <= 0",
        SignClaim::Zero => "K_t = 0",
        SignClaim::None => "no sign claim",
    };
    rep.notes.push(format!(
        "times {ts:?}; sign check ({claim_text}) worst violation / max free entry = {worst_sign:e}; grids n = {}, {}",
        grids[0].len(),
        grids[1].len()
    ));
    let sign_ok = worst_sign <= opts.slack;
    rep.verdict = if ts.is_empty() || !sign_ok {
        Verdict::Fail
    } else {
        sequence_verdict(&seq)
    };
    rep.sequence = seq;
    Ok(rep)
}

/// Supremum of `|e^{−t|p|^α} − e^{−t𝓛_{a,α}}| / (L_t + M_t)` on the base
/// grid and on a grid with halved step; pass when finite and stable. The
/// sign of the difference is checked against that of `a`.
pub fn difference_envelope_check(params: &HardyParams, grid: &GridSpec, opts: &KernelCheckOptions) -> Result<VerificationReport> {
    let claim = if params.a() > 0.0 {
        SignClaim::Nonnegative
    } else if params.a() < 0.0 {
        SignClaim::Nonpositive
    } else {
        SignClaim::Zero
    };
    envelope_report("difference-envelope", params, grid, opts, claim, |g| build_hardy_operator(g, params))
}

/// The same check for `|p|^α + V`, with envelopes at the lower coupling `a`.
pub fn potential_difference_envelope_check(
    pot: &PotentialSpec,
    d: u32,
    alpha: f64,
    grid: &GridSpec,
    opts: &KernelCheckOptions,
) -> Result<VerificationReport> {
    let params = make_params(d, alpha, pot.a())?;
    let claim = if pot.a() >= 0.0 && pot.a_tilde() > 0.0 {
        SignClaim::Nonnegative
    } else if pot.a_tilde() <= 0.0 && pot.a() < 0.0 {
        SignClaim::Nonpositive
    } else if pot.a() == 0.0 && pot.a_tilde() == 0.0 {
        SignClaim::Zero
    } else {
        SignClaim::None
    };
    envelope_report("potential-difference-envelope", &params, grid, opts, claim, |g| {
        build_potential_operator(g, alpha, pot)
    })
}

/// Entrywise `e^{−t𝓛_a} ≥ e^{−t(|p|^α+V)} ≥ e^{−t𝓛_ã}` and `e^{−t(|p|^α+V)} ≥ 0`
/// for a sandwiched potential. Reports the smallest normalized gap.
pub fn kernel_ordering_check(
    pot: &PotentialSpec,
    d: u32,
    alpha: f64,
    grid: &GridSpec,
    opts: &KernelCheckOptions,
) -> Result<VerificationReport> {
    let lower = make_params(d, alpha, pot.a())?;
    let upper = make_params(d, alpha, pot.a_tilde())?;
    let g = grid.build(d)?;
    let la = build_hardy_operator(&g, &lower)?;
    let lv = build_potential_operator(&g, alpha, pot)?;
    let lt = build_hardy_operator(&g, &upper)?;
    let mut rep = VerificationReport::new("kernel-ordering", &lower, None, g.info());
    let mut gaps = Vec::new();
    for &t in &opts.t_values {
        if !(t > 0.0 && t.is_finite()) {
            return domain(format!("times must be positive, got {t}"));
        }
        let ka = heat_values(&la, t);
        let kv = heat_values(&lv, t);
        let kt = heat_values(&lt, t);
        let (_, top) = extremes(&ka);
        let (g1, _) = extremes(&(&ka - &kv));
        let (g2, _) = extremes(&(&kv - &kt));
        let (g0, _) = extremes(&kv);
        gaps.push(g0 / top);
        gaps.push(g1 / top);
        gaps.push(g2 / top);
    }
    rep.set_range(&gaps);
    rep.notes.push(format!(
        "potential {} with a = {}, a_tilde = {}; entries are compared in orthonormal coordinates",
        pot.name(),
        pot.a(),
        pot.a_tilde()
    ));
    rep.verdict = if !gaps.is_empty() && rep.empirical_lower >= -opts.slack { Verdict::Pass } else { Verdict::Fail };
    rep.sequence = gaps;
    Ok(rep)
}
