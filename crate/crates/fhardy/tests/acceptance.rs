//! Acceptance battery: one PASS/FAIL line per criterion, nonzero exit if
//! any criterion fails.

use std::f64::consts::{FRAC_2_PI, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use fhardy::operator::{build_fractional_laplacian, build_hardy_operator, build_log_grid};
use fhardy::quadrature::{gamma_negative_half_integral_check, integrate_semiinfinite, schur_weight_integral};
use fhardy::specfun::{a_star, a_star_star, hardy_constant, log_gamma, psi, psi_inv};
use fhardy::verify::{
    generalized_hardy_constant, kernel_ordering_check, monotonicity_sandwich_check, norm_ratio_sweep,
    poisson_anchor_check, potential_difference_envelope_check, reverse_hardy_constant, riesz_band_check, GridSpec,
    KernelCheckOptions, TestFamily, Verdict,
};
use fhardy::{make_params, PotentialSpec};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn c1_constants() -> Outcome {
    let checks = [
        ("H(3,1)", hardy_constant(3, 1.0).unwrap(), FRAC_2_PI),
        ("H(3,2)", hardy_constant(3, 2.0).unwrap(), 0.25),
        ("a**(3,1)", a_star_star(3, 1.0).unwrap(), -0.5),
        ("psi(3,1,1)", psi(3, 1.0, 1.0).unwrap(), -FRAC_2_PI),
        ("psi(3,1,0.5)", psi(3, 1.0, 0.5).unwrap(), -0.5),
    ];
    let worst = checks.iter().map(|(_, got, want)| rel(*got, *want)).fold(0.0f64, f64::max);
    outcome(worst <= 1e-12, format!("worst relative error {worst:e}"))
}

fn c2_psi_inverse() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut gaps_ok = true;
    for &(d, alpha) in &[(2u32, 0.5), (3, 1.0), (3, 1.5), (5, 1.0)] {
        let top = 0.5 * (d as f64 - alpha);
        for i in 1..=100 {
            let sigma = -alpha + (top + alpha) * i as f64 / 100.0;
            let back = psi_inv(d, alpha, psi(d, alpha, sigma).unwrap()).unwrap();
            worst = worst.max((back - sigma).abs());
        }
        if alpha < 0.5 * d as f64 {
            gaps_ok &= a_star_star(d, alpha).unwrap() > a_star(d, alpha).unwrap();
        }
    }
    outcome(worst <= 1e-8 && gaps_ok, format!("worst round-trip error {worst:e}; a** > a* for all pairs: {gaps_ok}"))
}

fn c3_integrals() -> Outcome {
    let plain = integrate_semiinfinite(|t: f64| t.powf(-0.5) * t.powi(-4).min(1.0), 1e-13).unwrap().value;
    let e_plain = rel(plain, 16.0 / 7.0);
    let mut e_gamma: f64 = 0.0;
    for &s in &[0.5, 1.0, 1.5] {
        // Γ(−s/2) = Γ(1 − s/2)/(−s/2)
        let want = -(log_gamma(1.0 - 0.5 * s).unwrap().exp()) / (0.5 * s);
        e_gamma = e_gamma.max(rel(gamma_negative_half_integral_check(s).unwrap().value, want));
    }
    let schur = schur_weight_integral(1.0, 0.0, 3, 1e-12).unwrap();
    let e_schur = rel(schur.value, 6.0 * PI);
    let mut flags_ok = true;
    for &beta in &[0.25, 0.5, 1.0, 2.0, 2.75] {
        for &dp in &[0.0, 0.25, 0.5, 1.0] {
            let r = schur_weight_integral(beta, dp, 3, 1e-10).unwrap();
            let expect_finite = dp < beta && beta < 3.0 - dp;
            flags_ok &= r.finite == expect_finite;
        }
    }
    let ok = e_plain <= 1e-8 && e_gamma <= 1e-8 && e_schur <= 1e-8 && schur.finite && flags_ok;
    outcome(ok, format!("16/7 err {e_plain:e}; Gamma(-s/2) err {e_gamma:e}; Schur 6pi err {e_schur:e}; 20 divergence flags correct: {flags_ok}"))
}

fn c4_riesz_band() -> Outcome {
    let astar = a_star(3, 1.0).unwrap();
    let astar15 = a_star(3, 1.5).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for &(alpha, a, s) in &[(1.0, astar, 0.5), (1.0, 0.5 * astar, 1.0), (1.5, astar15, 0.6)] {
        let p = make_params(3, alpha, a).unwrap();
        let band = riesz_band_check(&p, s, 200, 7, 50.0).unwrap();
        let spread = band.report.empirical_upper / band.report.empirical_lower;
        ok &= band.report.verdict == Verdict::Pass;
        parts.push(format!(
            "(alpha={alpha}, s={s}) C/c={spread:.3} near[{:.3},{:.3}] far[{:.3},{:.3}]",
            band.near.lower, band.near.upper, band.far.lower, band.far.upper
        ));
    }
    outcome(ok, parts.join("; "))
}

fn c5_mellin_oracle() -> Outcome {
    let g = build_log_grid(3, 1e-4, 1e4, 2048).unwrap();
    let t = build_fractional_laplacian(&g, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for &sigma in &[0.3, 0.5, 0.7] {
        let f = g.sample(|r| r.powf(-sigma));
        let tf = t.apply_matrix(&f);
        let c = -psi(3, 1.0, sigma).unwrap();
        for i in g.interior(0.5) {
            let r = g.nodes()[i];
            worst = worst.max(rel(tf[i], c * r.powf(-sigma - 1.0)));
        }
    }
    outcome(worst <= 0.01, format!("worst interior relative error {worst:e}"))
}

fn c6_friedrichs() -> Outcome {
    let g = GridSpec::default().build(3).unwrap();
    let p = make_params(3, 1.0, a_star(3, 1.0).unwrap()).unwrap();
    let op = build_hardy_operator(&g, &p).unwrap();
    let min = op.raw_min_eigenvalue();
    let floor = -1e-8 * op.spectral_radius();
    outcome(min >= floor, format!("smallest eigenvalue {min:e}, floor {floor:e}"))
}

fn c7_poisson_anchor() -> Outcome {
    let opts = KernelCheckOptions { t_values: vec![1.0], ..Default::default() };
    let rep = poisson_anchor_check(3, &GridSpec::default(), &opts).unwrap();
    outcome(rep.passed(), format!("ratio range [{}, {}]; {}", rep.empirical_lower, rep.empirical_upper, rep.notes.join("; ")))
}

fn c8_monotonicity() -> Outcome {
    let astar = a_star(3, 1.0).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for &a in &[0.5 * astar, -0.5 * astar] {
        let p = make_params(3, 1.0, a).unwrap();
        for rep in monotonicity_sandwich_check(&p, &[0.25, 0.5, 0.75], &GridSpec::default(), 200, 11, 1e-6).unwrap() {
            ok &= rep.passed();
            parts.push(format!("a={a:.4} s={}: [{:.6}, {:.6}]", rep.s.unwrap(), rep.empirical_lower, rep.empirical_upper));
        }
    }
    outcome(ok, parts.join("; "))
}

fn fmt_seq(seq: &[f64]) -> String {
    seq.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(" ")
}

fn c9_threshold() -> Outcome {
    let p = make_params(3, 1.0, a_star(3, 1.0).unwrap()).unwrap();
    let grid = GridSpec::default();
    let stable = generalized_hardy_constant(&p, 0.5, &grid, 3).unwrap();
    // growth is r_min^{-1/4}, so six tenfold reductions are needed for 10x
    let growing = generalized_hardy_constant(&p, 1.5, &grid, 6).unwrap();
    let growth = growing.sequence.last().unwrap() / growing.sequence[0];
    let sweep = norm_ratio_sweep(&p, &[0.9, 1.5], &TestFamily::singular_cutoff_default(), &grid, None).unwrap();
    let (low, high) = (&sweep.reports[0], &sweep.reports[1]);
    let ok = stable.verdict == Verdict::Pass
        && growth >= 10.0
        && growing.verdict == Verdict::Diverging
        && low.verdict == Verdict::Pass
        && high.verdict == Verdict::Diverging;
    outcome(
        ok,
        format!(
            "s=0.5 constants [{}] ({}); s=1.5 constants [{}] growth {growth:.2} ({}); sweep s=0.9 [{}] {}; s=1.5 [{}] {}",
            fmt_seq(&stable.sequence),
            stable.verdict,
            fmt_seq(&growing.sequence),
            growing.verdict,
            fmt_seq(&low.sequence),
            low.verdict,
            fmt_seq(&high.sequence),
            high.verdict
        ),
    )
}

fn c10_reverse_hardy() -> Outcome {
    let astar = a_star(3, 1.0).unwrap();
    let grid = GridSpec::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for &a in &[astar, 0.5 * astar] {
        let p = make_params(3, 1.0, a).unwrap();
        let exact = reverse_hardy_constant(&p, 2.0, &grid, 1).unwrap();
        let err = exact.sequence.iter().map(|c| rel(*c, a.abs())).fold(0.0f64, f64::max);
        ok &= err <= 1e-6;
        parts.push(format!("a={a:.4} s=2 err {err:e}"));
        for &s in &[0.5, 1.0, 1.5] {
            let rep = reverse_hardy_constant(&p, s, &grid, 3).unwrap();
            ok &= rep.verdict == Verdict::Pass;
            parts.push(format!("s={s} [{}] {}", fmt_seq(&rep.sequence), rep.verdict));
        }
    }
    outcome(ok, parts.join("; "))
}

fn c11_potential_sandwich() -> Outcome {
    let astar = a_star(3, 1.0).unwrap();
    let pot = PotentialSpec::new("half-decay", 3, 1.0, astar, 0.5 * astar, move |r: f64| {
        astar / r * (1.0 + (-r).exp()) / 2.0
    })
    .unwrap();
    let grid = GridSpec::default();
    let opts = KernelCheckOptions::default();
    let order = kernel_ordering_check(&pot, 3, 1.0, &grid, &opts).unwrap();
    let env = potential_difference_envelope_check(&pot, 3, 1.0, &grid, &opts).unwrap();
    let ok = order.passed() && env.passed() && env.empirical_upper.is_finite();
    outcome(
        ok,
        format!(
            "ordering min gap {:e} ({}); envelope sup [{}] ({}); {}",
            order.empirical_lower,
            order.verdict,
            fmt_seq(&env.sequence),
            env.verdict,
            env.notes.join("; ")
        ),
    )
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "constants", Duration::from_secs(1), c1_constants),
        (2, "psi inverse", Duration::from_secs(5), c2_psi_inverse),
        (3, "integral identities", Duration::from_secs(10), c3_integrals),
        (4, "riesz equivalence band", Duration::from_secs(30), c4_riesz_band),
        (5, "discrete operator oracle", Duration::from_secs(120), c5_mellin_oracle),
        (6, "friedrichs nonnegativity", Duration::from_secs(120), c6_friedrichs),
        (7, "exact kernel anchor", Duration::from_secs(60), c7_poisson_anchor),
        (8, "monotonicity sandwich", Duration::from_secs(30), c8_monotonicity),
        (9, "threshold dichotomy", Duration::from_secs(600), c9_threshold),
        (10, "reverse hardy", Duration::from_secs(600), c10_reverse_hardy),
        (11, "potential sandwich", Duration::from_secs(300), c11_potential_sandwich),
    ];
    let mut failures = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run));
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(o) => (o.ok, o.detail),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        let in_time = elapsed <= budget;
        let pass = ok && in_time;
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {id:>2} [{name}]: {} ({:.2}s of {}s) {detail}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
