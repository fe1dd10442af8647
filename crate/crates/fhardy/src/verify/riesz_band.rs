use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Verdict, VerificationReport};
use crate::kernels::{riesz_profile, KernelTriple};
use crate::operator::GridInfo;
use crate::quadrature::riesz_time_integral;
use crate::specfun::HardyParams;
use crate::Result;

/// Empirical band of one case of the Riesz equivalence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandCase {
    pub lower: f64,
    pub upper: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RieszBand {
    pub report: VerificationReport,
    /// `λ = min(|x|,|y|)/|x−y| ≥ 1/4`.
    pub near: BandCase,
    /// `λ < 1/4`.
    pub far: BandCase,
}

fn band(values: &[f64]) -> BandCase {
    let lower = values.iter().copied().fold(f64::INFINITY, f64::min);
    let upper = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    BandCase { lower, upper, samples: values.len() }
}

/// Ratio of the time integral to the closed-form Riesz profile over random
/// admissible triples: `|x|, |y|` log-uniform in `[10^{−2}, 10^2]`, `|x−y|`
/// uniform on its triangle range. Passes when `C/c ≤ bound`.
pub fn riesz_band_check(params: &HardyParams, s: f64, n_samples: usize, seed: u64, bound: f64) -> Result<RieszBand> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut near = Vec::new();
    let mut far = Vec::new();
    let mut all = Vec::new();
    while all.len() < n_samples {
        let rx = 10f64.powf(rng.random_range(-2.0..2.0));
        let ry = 10f64.powf(rng.random_range(-2.0..2.0));
        let lo = (rx - ry).abs();
        let rxy = lo + rng.random_range(0.0..1.0) * (rx + ry - lo);
        if !(rxy > 0.0) {
            continue;
        }
        let q = KernelTriple::new(rx, ry, rxy)?;
        let ratio = riesz_time_integral(s, &q, params, 1e-10)? / riesz_profile(s, &q, params)?;
        if q.lambda() >= 0.25 {
            near.push(ratio);
        } else {
            far.push(ratio);
        }
        all.push(ratio);
    }
    let grid = GridInfo { n: 0, r_min: 1e-2, r_max: 1e2 };
    let mut report = VerificationReport::new("riesz-band", params, Some(s), grid);
    report.set_range(&all);
    let (near, far) = (band(&near), band(&far));
    report.notes.push(format!(
        "lambda >= 1/4: [{}, {}] over {}; lambda < 1/4: [{}, {}] over {}; seed {seed}",
        near.lower, near.upper, near.samples, far.lower, far.upper, far.samples
    ));
    let spread = report.empirical_upper / report.empirical_lower;
    report.verdict = if spread.is_finite() && report.empirical_lower > 0.0 && spread <= bound { Verdict::Pass } else { Verdict::Fail };
    Ok(RieszBand { report, near, far })
}
