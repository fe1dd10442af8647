//! Numerical checks of the norm and kernel inequalities on the radial
//! discretization, returned as structured reports.
//!
//! Every check is deterministic: random probes come from a seeded ChaCha
//! stream and all reductions run in a fixed order.

mod families;
mod kernel_checks;
mod norm_checks;
mod riesz_band;

use serde::Serialize;

use crate::operator::{build_log_grid, GridInfo, RadialGrid};
use crate::specfun::HardyParams;
use crate::Result;

pub use families::{FamilyMember, TestFamily};
pub use kernel_checks::{
    difference_envelope_check, heat_sandwich_check, kernel_ordering_check, poisson_anchor_check,
    potential_difference_envelope_check, KernelCheckOptions,
};
pub use norm_checks::{
    generalized_hardy_constant, monotonicity_sandwich_check, norm_ratio_sweep, reverse_hardy_constant, sobolev_check,
    SweepOutcome, SweepRow,
};
pub use riesz_band::{riesz_band_check, RieszBand};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Diverging,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Diverging => "diverging",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Growth factor across a refinement sequence that counts as divergence.
pub const DIVERGENCE_FACTOR: f64 = 10.0;
/// A refinement sequence is stable when its max/min stays below this.
pub const STABILITY_FACTOR: f64 = 2.0;
/// Default bound on equivalence ratios.
pub const DEFAULT_RATIO_BOUND: f64 = 1e3;

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub params: HardyParams,
    pub s: Option<f64>,
    pub grid: GridInfo,
    pub empirical_lower: f64,
    pub empirical_upper: f64,
    pub verdict: Verdict,
    pub samples: usize,
    pub notes: Vec<String>,
    /// Values along a refinement or cutoff sequence, in order.
    pub sequence: Vec<f64>,
}

impl VerificationReport {
    pub(crate) fn new(check_name: &str, params: &HardyParams, s: Option<f64>, grid: GridInfo) -> Self {
        Self {
            check_name: check_name.to_string(),
            params: *params,
            s,
            grid,
            empirical_lower: f64::NAN,
            empirical_upper: f64::NAN,
            verdict: Verdict::Fail,
            samples: 0,
            notes: Vec::new(),
            sequence: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Sets lower/upper from the finite entries of `values`.
    pub(crate) fn set_range(&mut self, values: &[f64]) {
        let (lo, hi) = finite_range(values);
        self.empirical_lower = lo;
        self.empirical_upper = hi;
        self.samples = values.len();
    }
}

/// Geometric radial grid parameters shared by the checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub n: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { r_min: 1e-3, r_max: 1e3, n: 1024 }
    }
}

impl GridSpec {
    pub fn build(&self, d: u32) -> Result<RadialGrid> {
        build_log_grid(d, self.r_min, self.r_max, self.n)
    }
}

fn finite_range(values: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        if v.is_finite() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if lo > hi {
        (f64::NAN, f64::NAN)
    } else {
        (lo, hi)
    }
}

/// Verdict of a refinement sequence: diverging when the last value is at
/// least ten times the first, pass when max/min stays below two.
pub fn sequence_verdict(seq: &[f64]) -> Verdict {
    if seq.is_empty() || seq.iter().any(|v| !v.is_finite()) {
        return Verdict::Fail;
    }
    let first = seq[0].abs();
    let last = seq[seq.len() - 1].abs();
    if last >= DIVERGENCE_FACTOR * first && last > 0.0 {
        return Verdict::Diverging;
    }
    let (lo, hi) = finite_range(seq);
    if hi == 0.0 || (lo > 0.0 && hi / lo < STABILITY_FACTOR) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Index positions of `count` nodes spread evenly over the middle half of
/// the grid.
pub(crate) fn interior_samples(grid: &RadialGrid, count: usize) -> Vec<usize> {
    let range = grid.interior(0.5);
    let len = range.end - range.start;
    let count = count.clamp(1, len);
    let mut out: Vec<usize> = (0..count)
        .map(|k| {
            let x = if count == 1 { 0.5 } else { k as f64 / (count - 1) as f64 };
            range.start + (x * (len - 1) as f64).round() as usize
        })
        .collect();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_verdicts() {
        assert_eq!(sequence_verdict(&[1.0, 1.5, 1.9]), Verdict::Pass);
        assert_eq!(sequence_verdict(&[1.0, 5.0, 10.0]), Verdict::Diverging);
        assert_eq!(sequence_verdict(&[1.0, 3.0, 5.0]), Verdict::Fail);
        assert_eq!(sequence_verdict(&[0.0, 0.0]), Verdict::Pass);
        assert_eq!(sequence_verdict(&[]), Verdict::Fail);
    }

    #[test]
    fn interior_samples_stay_inside() {
        let g = build_log_grid(3, 1e-3, 1e3, 1024).unwrap();
        let idx = interior_samples(&g, 24);
        assert_eq!(idx.len(), 24);
        assert!(idx.iter().all(|&i| (256..768).contains(&i)));
    }
}
