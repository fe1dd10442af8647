use serde::Serialize;

use crate::operator::RadialGrid;
use crate::specfun::HardyParams;
use crate::{domain, Result};

/// Radial probe functions for the norm checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum TestFamily {
    /// `exp(−(r/ℓ)²)` for each length `ℓ`.
    GaussianDilates { scales: Vec<f64> },
    /// `exp(−4 ln²(r/c))`: smooth shells centred at radius `c`.
    BumpTranslates { centers: Vec<f64> },
    /// Near-zero modes `𝓛⁻¹ g` on grids cut off at `r_min = ε`, with `g`
    /// a fixed log-bump at `r ≈ 1`. Below `r ≈ 1` each member behaves like
    /// `r^{−δ}` down to its cutoff.
    SingularCutoff { eps: Vec<f64> },
    /// `r^{−σ} χ(r/ε)(1 − χ(r))` with a smooth step `χ` from 0 at 1 to 1
    /// at 2. `σ` defaults to `δ − 0.01`.
    PowerWindow { sigma: Option<f64>, eps: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMember {
    pub id: String,
    pub values: Vec<f64>,
}

impl TestFamily {
    pub fn gaussian_dilates_default() -> Self {
        TestFamily::GaussianDilates { scales: (0..9).map(|k| 10f64.powf(-2.0 + 0.5 * k as f64)).collect() }
    }

    pub fn bump_translates_default() -> Self {
        TestFamily::BumpTranslates { centers: (0..9).map(|k| 10f64.powf(-1.0 + 0.25 * k as f64)).collect() }
    }

    pub fn singular_cutoff_default() -> Self {
        TestFamily::SingularCutoff { eps: (3..=9).map(|k| 10f64.powi(-k)).collect() }
    }

    pub fn power_window_default() -> Self {
        TestFamily::PowerWindow { sigma: None, eps: (1..=4).map(|k| 10f64.powi(-k)).collect() }
    }

    /// Parses `gaussian-dilates`, `bump-translates-radial`, `singular-cutoff`
    /// or `power-window`, optionally with an explicit σ and ε list.
    pub fn from_name(name: &str, sigma: Option<f64>, eps: Option<Vec<f64>>) -> Result<Self> {
        let fam = match name {
            "gaussian-dilates" => Self::gaussian_dilates_default(),
            "bump-translates-radial" | "bump-translates" => Self::bump_translates_default(),
            "singular-cutoff" => match eps {
                Some(eps) => TestFamily::SingularCutoff { eps },
                None => Self::singular_cutoff_default(),
            },
            "power-window" => match eps {
                Some(eps) => TestFamily::PowerWindow { sigma, eps },
                None => TestFamily::PowerWindow { sigma, eps: Self::power_window_default().eps().to_vec() },
            },
            other => return domain(format!("unknown test family '{other}'")),
        };
        Ok(fam)
    }

    pub fn name(&self) -> &'static str {
        match self {
            TestFamily::GaussianDilates { .. } => "gaussian-dilates",
            TestFamily::BumpTranslates { .. } => "bump-translates-radial",
            TestFamily::SingularCutoff { .. } => "singular-cutoff",
            TestFamily::PowerWindow { .. } => "power-window",
        }
    }

    fn eps(&self) -> &[f64] {
        match self {
            TestFamily::SingularCutoff { eps } | TestFamily::PowerWindow { eps, .. } => eps,
            _ => &[],
        }
    }

    /// Members that form a cutoff sequence are judged by their growth.
    pub fn is_cutoff_sequence(&self) -> bool {
        matches!(self, TestFamily::SingularCutoff { .. } | TestFamily::PowerWindow { .. })
    }

    /// Members sampled on a fixed grid. `SingularCutoff` members live on
    /// their own grids and are generated by the sweep.
    pub(crate) fn sample(&self, grid: &RadialGrid, params: &HardyParams) -> Result<Vec<FamilyMember>> {
        match self {
            TestFamily::GaussianDilates { scales } => {
                check_positive(scales, "dilation scales")?;
                Ok(scales
                    .iter()
                    .map(|&l| FamilyMember { id: format!("scale={l}"), values: grid.sample(|r| (-(r / l).powi(2)).exp()) })
                    .collect())
            }
            TestFamily::BumpTranslates { centers } => {
                check_positive(centers, "bump centres")?;
                Ok(centers
                    .iter()
                    .map(|&c| FamilyMember { id: format!("center={c}"), values: grid.sample(|r| log_bump(r / c)) })
                    .collect())
            }
            TestFamily::PowerWindow { sigma, eps } => {
                check_positive(eps, "cutoff scales")?;
                let sigma = sigma.unwrap_or(params.delta() - 0.01);
                let mut out = Vec::with_capacity(eps.len());
                for &e in eps {
                    if e < grid.r_min() {
                        return domain(format!("cutoff {e} lies below the grid's r_min {}", grid.r_min()));
                    }
                    let values = grid.sample(|r| r.powf(-sigma) * smooth_step(r / e) * (1.0 - smooth_step(r)));
                    out.push(FamilyMember { id: format!("eps={e}"), values });
                }
                Ok(out)
            }
            TestFamily::SingularCutoff { .. } => domain("singular-cutoff members are generated per cutoff grid"),
        }
    }

    pub(crate) fn cutoffs(&self) -> Result<Vec<f64>> {
        let eps = self.eps().to_vec();
        check_positive(&eps, "cutoff scales")?;
        Ok(eps)
    }
}

fn check_positive(v: &[f64], what: &str) -> Result<()> {
    if v.is_empty() || v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return domain(format!("{what} must be a non-empty list of positive numbers"));
    }
    Ok(())
}

pub(crate) fn log_bump(x: f64) -> f64 {
    (-4.0 * x.ln().powi(2)).exp()
}

/// C^∞ step: 0 for `x ≤ 1`, 1 for `x ≥ 2`.
pub(crate) fn smooth_step(x: f64) -> f64 {
    let t = x - 1.0;
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_step_limits() {
        assert_eq!(smooth_step(0.5), 0.0);
        assert_eq!(smooth_step(2.5), 1.0);
        assert!((smooth_step(1.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn names_round_trip() {
        for name in ["gaussian-dilates", "bump-translates-radial", "singular-cutoff", "power-window"] {
            assert_eq!(TestFamily::from_name(name, None, None).unwrap().name(), name);
        }
        assert!(TestFamily::from_name("nope", None, None).is_err());
    }
}
