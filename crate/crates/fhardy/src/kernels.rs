//! Pointwise comparison profiles for heat and Riesz kernels.
//!
//! Structural constants are normalized to one; the verify module measures
//! the actual two-sided constants.

use serde::Serialize;

use crate::specfun::{log_gamma, HardyParams};
use crate::{domain, Result};

/// The three radii `|x|`, `|y|`, `|x − y|` a kernel value depends on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelTriple {
    rx: f64,
    ry: f64,
    rxy: f64,
}

impl KernelTriple {
    /// Checks nonnegativity and the triangle inequalities, allowing a
    /// relative rounding slack of 1e−12.
    pub fn new(rx: f64, ry: f64, rxy: f64) -> Result<Self> {
        if !(rx >= 0.0 && ry >= 0.0 && rxy >= 0.0) || !(rx + ry + rxy).is_finite() {
            return domain(format!("radii must be finite and nonnegative: {rx}, {ry}, {rxy}"));
        }
        let slack = 1e-12 * (rx + ry);
        if rxy < (rx - ry).abs() - slack || rxy > rx + ry + slack {
            return domain(format!("({rx}, {ry}, {rxy}) violates the triangle inequality"));
        }
        Ok(Self { rx, ry, rxy })
    }

    pub fn rx(&self) -> f64 {
        self.rx
    }

    pub fn ry(&self) -> f64 {
        self.ry
    }

    pub fn rxy(&self) -> f64 {
        self.rxy
    }

    /// `λ = min(|x|, |y|)/|x − y|`, infinite on the diagonal.
    pub fn lambda(&self) -> f64 {
        self.rx.min(self.ry) / self.rxy
    }

    /// The same triple with every radius multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        Self { rx: c * self.rx, ry: c * self.ry, rxy: c * self.rxy }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        domain(format!("time must be finite and positive, got {t}"))
    }
}

/// `t^{−d/α} (1 ∧ t^{1+d/α}/|x−y|^{d+α})`.
pub fn stable_heat_profile(t: f64, q: &KernelTriple, d: u32, alpha: f64) -> Result<f64> {
    check_time(t)?;
    Ok(stable_unchecked(t, q.rxy, d as f64, alpha))
}

pub(crate) fn stable_unchecked(t: f64, rxy: f64, df: f64, alpha: f64) -> f64 {
    let ratio = t.powf(1.0 / alpha) / rxy;
    let tail = if rxy == 0.0 { 1.0 } else { ratio.powf(df + alpha).min(1.0) };
    t.powf(-df / alpha) * tail
}

fn weight(t_len: f64, r: f64, delta: f64) -> f64 {
    if delta == 0.0 {
        1.0
    } else {
        (t_len / r).max(1.0).powf(delta)
    }
}

/// Stable profile times `(1 ∨ t^{1/α}/|x|)^δ (1 ∨ t^{1/α}/|y|)^δ`.
pub fn hardy_heat_profile(t: f64, q: &KernelTriple, params: &HardyParams) -> Result<f64> {
    check_time(t)?;
    let delta = params.delta();
    if delta > 0.0 && (q.rx == 0.0 || q.ry == 0.0) {
        return domain("hardy_heat_profile diverges at the origin for delta > 0");
    }
    Ok(hardy_unchecked(t, q.rx, q.ry, q.rxy, params))
}

pub(crate) fn hardy_unchecked(t: f64, rx: f64, ry: f64, rxy: f64, p: &HardyParams) -> f64 {
    let len = t.powf(1.0 / p.alpha());
    weight(len, rx, p.delta()) * weight(len, ry, p.delta()) * stable_unchecked(t, rxy, p.d() as f64, p.alpha())
}

/// Normalization `Γ((d+1)/2)/π^{(d+1)/2}` of the Poisson kernel.
pub fn poisson_constant(d: u32) -> f64 {
    let h = 0.5 * (d as f64 + 1.0);
    (log_gamma(h).expect("positive argument") - h * std::f64::consts::PI.ln()).exp()
}

/// Exact kernel of `e^{−t|p|}`: `c_d t / (t² + |x−y|²)^{(d+1)/2}`.
pub fn poisson_kernel_exact(t: f64, rxy: f64, d: u32) -> Result<f64> {
    check_time(t)?;
    if d == 0 || !(rxy >= 0.0) {
        return domain(format!("poisson_kernel_exact needs d >= 1 and rxy >= 0, got d={d}, rxy={rxy}"));
    }
    Ok(poisson_constant(d) * t / (t * t + rxy * rxy).powf(0.5 * (d as f64 + 1.0)))
}

/// Average of the d = 3 Poisson kernel `P_t(|x − y|)` over `|y| = ρ` at
/// fixed `|x| = r`, in closed form.
pub fn poisson_sphere_average_d3(t: f64, r: f64, rho: f64) -> Result<f64> {
    check_time(t)?;
    if !(r > 0.0 && rho > 0.0) {
        return domain("sphere average needs positive radii");
    }
    let c = poisson_constant(3);
    let near = t * t + (r - rho) * (r - rho);
    let far = t * t + (r + rho) * (r + rho);
    // 1/near − 1/far without cancellation
    let diff = 4.0 * r * rho / (near * far);
    Ok(c * 0.5 * t / (2.0 * r * rho) * diff)
}

/// Largest admissible `s` for the Riesz profile: `min(2d/α, 2(d − 2δ)/α)`.
pub fn riesz_s_max(params: &HardyParams) -> f64 {
    let df = params.d() as f64;
    (2.0 * df / params.alpha()).min(2.0 * (df - 2.0 * params.delta()) / params.alpha())
}

pub(crate) fn check_riesz_s(s: f64, params: &HardyParams) -> Result<()> {
    let top = riesz_s_max(params);
    if s > 0.0 && s < top {
        Ok(())
    } else {
        domain(format!("s must lie in (0, {top}) for these parameters, got {s}"))
    }
}

/// `|x−y|^{αs/2−d} (1 ∧ |x|/|x−y| ∧ |y|/|x−y|)^{−δ}`.
pub fn riesz_profile(s: f64, q: &KernelTriple, params: &HardyParams) -> Result<f64> {
    check_riesz_s(s, params)?;
    if q.rxy == 0.0 {
        return domain("riesz_profile needs |x - y| > 0");
    }
    let m = (q.rx / q.rxy).min(q.ry / q.rxy).min(1.0);
    let power = q.rxy.powf(params.alpha() * s / 2.0 - params.d() as f64);
    Ok(power * if params.delta() == 0.0 { 1.0 } else { m.powf(-params.delta()) })
}

/// Envelope `L_t` of the difference kernel.
pub fn l_envelope(t: f64, q: &KernelTriple, params: &HardyParams) -> Result<f64> {
    check_time(t)?;
    let dp = params.delta_plus();
    let alpha = params.alpha();
    let df = params.d() as f64;
    let rmax = q.rx.max(q.ry);
    let rmin = q.rx.min(q.ry);
    if rmax.powf(alpha) <= t {
        if dp > 0.0 && rmin == 0.0 {
            return domain("l_envelope is singular at the origin for delta_plus > 0");
        }
        let w = if dp == 0.0 { 1.0 } else { (t.powf(2.0 / alpha) / (q.rx * q.ry)).powf(dp) };
        Ok(t.powf(-df / alpha) * w)
    } else {
        let w = if dp == 0.0 {
            1.0
        } else if rmin == 0.0 {
            return domain("l_envelope is singular at the origin for delta_plus > 0");
        } else {
            (t.powf(1.0 / alpha) / rmin).max(1.0).powf(dp)
        };
        Ok(t / rmax.powf(df + alpha) * w)
    }
}

/// Envelope `M_t` of the difference kernel, supported where `|x| ∼ |y|`
/// and `(|x| ∨ |y|)^α ≥ t`.
pub fn m_envelope(t: f64, q: &KernelTriple, params: &HardyParams) -> Result<f64> {
    check_time(t)?;
    Ok(m_unchecked(t, q.rx, q.ry, q.rxy, params))
}

pub(crate) fn m_unchecked(t: f64, rx: f64, ry: f64, rxy: f64, p: &HardyParams) -> f64 {
    let alpha = p.alpha();
    let df = p.d() as f64;
    let rmax = rx.max(ry);
    let rmin = rx.min(ry);
    if rmax.powf(alpha) < t || !(0.5 * rx <= ry && ry <= 2.0 * rx) {
        return 0.0;
    }
    t.powf(1.0 - df / alpha) / rmin.powf(alpha) * stable_tail(t, rxy, df, alpha)
}

fn stable_tail(t: f64, rxy: f64, df: f64, alpha: f64) -> f64 {
    if rxy == 0.0 {
        1.0
    } else {
        (t.powf(1.0 / alpha) / rxy).powf(df + alpha).min(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triple_validation() {
        assert!(KernelTriple::new(1.0, 1.0, 3.0).is_err());
        assert!(KernelTriple::new(2.0, 0.5, 1.0).is_err());
        assert!(KernelTriple::new(-1.0, 1.0, 1.0).is_err());
        assert!(KernelTriple::new(1.0, 2.0, 3.0).is_ok());
        assert_eq!(KernelTriple::new(1.0, 2.0, 2.0).unwrap().lambda(), 0.5);
    }

    #[test]
    fn envelope_at_the_branch_boundary() {
        let p = crate::make_params(3, 1.0, 0.0).unwrap();
        let q = KernelTriple::new(1.0, 1.0, 0.5).unwrap();
        // (|x|∨|y|)^α = t: both branches give t^{-d/α} there
        assert_eq!(l_envelope(1.0, &q, &p).unwrap(), 1.0);
    }
}
