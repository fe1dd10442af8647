use std::f64::consts::FRAC_PI_2;

use fhardy::specfun::a_star;
use fhardy::verify::{
    difference_envelope_check, generalized_hardy_constant, heat_sandwich_check, monotonicity_sandwich_check,
    norm_ratio_sweep, reverse_hardy_constant, riesz_band_check, sequence_verdict, sobolev_check, GridSpec,
    KernelCheckOptions, TestFamily, Verdict,
};
use fhardy::{make_params, Error, HardyParams};

fn small() -> GridSpec {
    GridSpec { r_min: 1e-3, r_max: 1e3, n: 384 }
}

fn params(frac: f64) -> HardyParams {
    make_params(3, 1.0, frac * a_star(3, 1.0).unwrap()).unwrap()
}

#[test]
fn free_sweep_ratios_are_one() {
    let out = norm_ratio_sweep(&params(0.0), &[0.5, 1.0, 1.5], &TestFamily::gaussian_dilates_default(), &small(), None)
        .unwrap();
    assert_eq!(out.rows.len(), 27);
    for row in &out.rows {
        assert!((row.ratio_forward - 1.0).abs() < 1e-9, "{row:?}");
        assert!((row.ratio_backward - 1.0).abs() < 1e-9, "{row:?}");
    }
    assert!(out.reports.iter().all(|r| r.passed()));
}

#[test]
fn half_critical_dilates_stay_bounded() {
    let out =
        norm_ratio_sweep(&params(0.5), &[1.0], &TestFamily::gaussian_dilates_default(), &small(), Some(1e2)).unwrap();
    let worst = out.rows.iter().map(|r| r.ratio_forward.max(r.ratio_backward)).fold(0.0, f64::max);
    assert!(worst <= 1e2);
    assert!(out.reports[0].passed());
    assert_eq!(out.rows[0].family, "gaussian-dilates");
}

#[test]
fn free_hardy_constant_approaches_sharp_value() {
    let rep = generalized_hardy_constant(&params(0.0), 1.0, &small(), 2).unwrap();
    let sharp = FRAC_PI_2.sqrt();
    assert!(rep.sequence.windows(2).all(|w| w[1] >= w[0]));
    assert!(rep.sequence.iter().all(|&c| c <= sharp * (1.0 + 1e-12)));
    assert!(*rep.sequence.last().unwrap() > 0.9 * sharp);
    assert_eq!(rep.verdict, Verdict::Pass);
}

#[test]
fn reverse_hardy_exact_cases() {
    let free = reverse_hardy_constant(&params(0.0), 1.0, &small(), 1).unwrap();
    assert!(free.sequence.iter().all(|&c| c == 0.0));
    assert_eq!(free.verdict, Verdict::Pass);
    let p = params(0.5);
    let two = reverse_hardy_constant(&p, 2.0, &small(), 1).unwrap();
    for c in &two.sequence {
        assert!((c - p.a().abs()).abs() < 1e-6 * p.a().abs(), "{c}");
    }
    assert!(reverse_hardy_constant(&p, 2.5, &small(), 0).is_err());
}

#[test]
fn sobolev_ratio_is_dilation_invariant() {
    let fam = TestFamily::GaussianDilates { scales: vec![0.3, 1.0, 3.0] };
    let grid = GridSpec { r_min: 1e-4, r_max: 1e4, n: 768 };
    for frac in [0.0, 0.5] {
        let rep = sobolev_check(&params(frac), 1.0, &fam, &grid, None).unwrap();
        let spread = rep.empirical_upper / rep.empirical_lower - 1.0;
        assert!(spread < 1e-3, "{:?}", rep.sequence);
        assert!(rep.passed());
    }
    let err = sobolev_check(&params(0.0), 3.0, &fam, &grid, None).unwrap_err();
    assert!(matches!(err, Error::Domain(_)));
}

#[test]
fn difference_kernel_signs() {
    let opts = KernelCheckOptions { t_values: vec![1.0], samples_per_axis: 12, ..Default::default() };
    let free = difference_envelope_check(&params(0.0), &small(), &opts).unwrap();
    assert!(free.sequence.iter().all(|&v| v == 0.0));
    assert!(free.passed());
    for frac in [-1.0, 0.5, -0.5] {
        let rep = difference_envelope_check(&params(frac), &small(), &opts).unwrap();
        assert!(rep.passed(), "{:?}", rep.notes);
    }
}

#[test]
fn heat_sandwich_at_critical_coupling() {
    let opts = KernelCheckOptions { t_values: vec![1.0, 1e9], samples_per_axis: 12, ..Default::default() };
    let rep = heat_sandwich_check(&params(1.0), &small(), &opts).unwrap();
    assert!(rep.passed());
    assert!(rep.notes.iter().any(|n| n.contains("excluded")));
}

#[test]
fn monotonicity_holds_and_rejects_s_one() {
    for frac in [0.5, -0.5] {
        let reps = monotonicity_sandwich_check(&params(frac), &[0.5], &small(), 50, 3, 1e-6).unwrap();
        assert!(reps[0].passed());
    }
    assert!(monotonicity_sandwich_check(&params(0.5), &[1.0], &small(), 5, 3, 1e-6).is_err());
}

#[test]
fn riesz_band_is_reproducible() {
    let p = params(0.5);
    let a = riesz_band_check(&p, 1.0, 20, 42, 50.0).unwrap();
    let b = riesz_band_check(&p, 1.0, 20, 42, 50.0).unwrap();
    assert_eq!(a.report.empirical_lower.to_bits(), b.report.empirical_lower.to_bits());
    assert_eq!(a.report.empirical_upper.to_bits(), b.report.empirical_upper.to_bits());
    assert!(a.report.passed());
    assert_eq!(a.report.samples, 20);
}

#[test]
fn reports_serialize() {
    let rep = reverse_hardy_constant(&params(0.5), 2.0, &small(), 0).unwrap();
    let json = serde_json::to_value(&rep).unwrap();
    assert_eq!(json["check_name"], "reverse-hardy");
    assert_eq!(json["verdict"], "pass");
}

#[test]
fn verdict_thresholds() {
    assert_eq!(sequence_verdict(&[2.0, 3.9]), Verdict::Pass);
    assert_eq!(sequence_verdict(&[2.0, 4.0]), Verdict::Fail);
    assert_eq!(sequence_verdict(&[2.0, 20.0]), Verdict::Diverging);
}
