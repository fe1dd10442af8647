//! Log-gamma, digamma, the sharp Hardy constant and the Ψ-function.

use serde::Serialize;

use crate::{domain, Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// ζ(k) − 1 for k = 2, 3, ….
const ZETA_M1: [f64; 39] = [
    0.6449340668482264,
    0.2020569031595943,
    0.08232323371113819,
    0.03692775514336993,
    0.01734306198444914,
    0.008349277381922827,
    0.00407735619794434,
    0.0020083928260822143,
    0.0009945751278180853,
    0.0004941886041194645,
    0.0002460865533080483,
    0.00012271334757848915,
    6.124813505870483e-05,
    3.058823630702049e-05,
    1.528225940865187e-05,
    7.637197637899763e-06,
    3.81729326499984e-06,
    1.908212716553939e-06,
    9.539620338727962e-07,
    4.769329867878064e-07,
    2.38450502727733e-07,
    1.1921992596531106e-07,
    5.960818905125948e-08,
    2.980350351465228e-08,
    1.4901554828365043e-08,
    7.45071178983543e-09,
    3.725334024788457e-09,
    1.862659723513049e-09,
    9.313274324196682e-10,
    4.656629065033784e-10,
    2.3283118336765053e-10,
    1.164155017270052e-10,
    5.820772087902701e-11,
    2.9103850444971e-11,
    1.4551921891041985e-11,
    7.275959835057482e-12,
    3.637979547378651e-12,
    1.818989650307066e-12,
    9.094947840263888e-13,
];

/// B_{2k} / (2k(2k − 1)), k = 1..8.
pub(crate) const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// B_{2k}, k = 1..7.
const BERNOULLI: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

/// Positive zero of ψ rounded to double, and ψ at that double.
const DIGAMMA_ROOT: f64 = 1.461_632_144_968_362_2;
const DIGAMMA_AT_ROOT: f64 = -9.241_265_521_729_427e-17;

fn check_positive(x: f64, name: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} requires a finite x > 0, got {x}"))
    }
}

/// ln Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_positive(x, "log_gamma")?;
    Ok(ln_gamma_pos(x))
}

/// ψ(x) = Γ'(x)/Γ(x) for x > 0.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive(x, "digamma")?;
    Ok(digamma_pos(x))
}

/// ln Γ(2 + z) for |z| ≤ 1/2 from the Taylor series about 2.
fn ln_gamma_2p(z: f64) -> f64 {
    let mut terms = [0.0; ZETA_M1.len()];
    let mut zk = z;
    for (k, t) in terms.iter_mut().enumerate() {
        zk *= -z;
        *t = ZETA_M1[k] * zk / (k + 2) as f64;
    }
    // zk runs through −(−z)^k, so the terms carry the negated series.
    let tail: f64 = terms.iter().rev().sum();
    z * (1.0 - EULER_GAMMA) - tail
}

fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        ln_gamma_pos(x + 1.0) - x.ln()
    } else if x < 1.5 {
        let z = x - 1.0;
        ln_gamma_2p(z) - z.ln_1p()
    } else if x < 2.5 {
        ln_gamma_2p(x - 2.0)
    } else if x < 10.0 {
        let mut y = x;
        let mut prod = 1.0;
        while y >= 2.5 {
            y -= 1.0;
            prod *= y;
        }
        ln_gamma_2p(y - 2.0) + prod.ln()
    } else {
        let inv = 1.0 / x;
        let inv2 = inv * inv;
        let mut series = 0.0;
        for c in STIRLING.iter().rev() {
            series = series * inv2 + c;
        }
        (x - 0.5) * x.ln() - x + LN_SQRT_2PI + series * inv
    }
}

// ψ(x) − ψ(x0) summed about the root x0, so every term has the sign of
// x − x0 and nothing cancels near the zero.
fn digamma_pos(x: f64) -> f64 {
    const SHIFT: usize = 12;
    let dx = x - DIGAMMA_ROOT;
    let mut sum = 0.0;
    for k in 0..SHIFT {
        let k = k as f64;
        sum += dx / ((x + k) * (DIGAMMA_ROOT + k));
    }
    let y0 = DIGAMMA_ROOT + SHIFT as f64;
    let y1 = x + SHIFT as f64;
    let ln_ratio = (dx / y0).ln_1p();
    let mut tail = ln_ratio + dx / (2.0 * y0 * y1);
    let mut y0_pow = 1.0;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let p = 2.0 * (k + 1) as f64;
        y0_pow /= y0 * y0;
        tail -= b / p * y0_pow * (-p * ln_ratio).exp_m1();
    }
    DIGAMMA_AT_ROOT + sum + tail
}

/// Sharp constant `H_{d,α} = 2^α Γ((d+α)/4)² / Γ((d−α)/4)²`.
///
/// Only `0 < α < d` is required, so `H_{d,2α}` is available for `a_**`.
pub fn hardy_constant(d: u32, alpha: f64) -> Result<f64> {
    let df = d as f64;
    if !(alpha > 0.0 && alpha < df) {
        return domain(format!("hardy_constant needs 0 < alpha < d, got alpha={alpha}, d={d}"));
    }
    let lg = ln_gamma_pos((df + alpha) / 4.0) - ln_gamma_pos((df - alpha) / 4.0);
    Ok(alpha.exp2() * (2.0 * lg).exp())
}

fn check_alpha(d: u32, alpha: f64) -> Result<()> {
    if d < 2 {
        return domain(format!("dimension must be at least 2, got {d}"));
    }
    if !(alpha > 0.0 && alpha < 2.0 && alpha < d as f64) {
        return domain(format!("alpha must lie in (0, min(2, d)), got {alpha}"));
    }
    Ok(())
}

/// Critical coupling `a_* = −H_{d,α}`.
pub fn a_star(d: u32, alpha: f64) -> Result<f64> {
    Ok(-hardy_constant(d, alpha)?)
}

/// `a_** = −H_{d,2α}^{1/2}`, defined for `α < d/2`.
pub fn a_star_star(d: u32, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && 2.0 * alpha < d as f64) {
        return domain(format!("a_star_star needs 0 < alpha < d/2, got alpha={alpha}, d={d}"));
    }
    Ok(-hardy_constant(d, 2.0 * alpha)?.sqrt())
}

/// Ψ_{α,d}(σ) on `(−α, (d−α)/2]`.
///
/// `1/Γ(σ/2)` is written as `(σ/2)/Γ(1+σ/2)` so every log-gamma argument
/// stays positive and Ψ(0) = 0 falls out exactly.
pub fn psi(d: u32, alpha: f64, sigma: f64) -> Result<f64> {
    check_alpha(d, alpha)?;
    let df = d as f64;
    let top = 0.5 * (df - alpha);
    if !(sigma > -alpha && sigma <= top) {
        return domain(format!("psi needs sigma in ({}, {top}], got {sigma}", -alpha));
    }
    Ok(psi_unchecked(df, alpha, sigma))
}

fn psi_unchecked(df: f64, alpha: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    let half = 0.5 * sigma;
    let lg = ln_gamma_pos(0.5 * (sigma + alpha)) + ln_gamma_pos(0.5 * (df - sigma))
        - ln_gamma_pos(0.5 * (df - sigma - alpha))
        - ln_gamma_pos(1.0 + half);
    -alpha.exp2() * half * lg.exp()
}

/// δ = Ψ_{α,d}^{-1}(a) for `a ≥ a_*`, by bisection.
pub fn psi_inv(d: u32, alpha: f64, a: f64) -> Result<f64> {
    check_alpha(d, alpha)?;
    if !a.is_finite() {
        return domain(format!("coupling must be finite, got {a}"));
    }
    let df = d as f64;
    let top = 0.5 * (df - alpha);
    let a_s = a_star(d, alpha)?;
    if (a - a_s).abs() <= 4.0 * f64::EPSILON * a_s.abs() {
        return Ok(top);
    }
    if a < a_s {
        return domain(format!("coupling {a} is below a_* = {a_s}"));
    }
    if a == 0.0 {
        return Ok(0.0);
    }

    let mut gap = 1e-6 * alpha;
    let mut lo = -alpha + gap;
    let mut bracketed = psi_unchecked(df, alpha, lo) >= a;
    for _ in 0..60 {
        if bracketed {
            break;
        }
        gap *= 0.5;
        lo = -alpha + gap;
        bracketed = psi_unchecked(df, alpha, lo) >= a;
    }
    if !bracketed {
        return Err(Error::Convergence(format!(
            "could not bracket psi_inv for a = {a}: psi({lo}) is still below it"
        )));
    }

    let mut hi = top;
    for _ in 0..1100 {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if psi_unchecked(df, alpha, mid) > a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r_lo = (psi_unchecked(df, alpha, lo) - a).abs();
    let r_hi = (psi_unchecked(df, alpha, hi) - a).abs();
    let (delta, resid) = if r_lo < r_hi { (lo, r_lo) } else { (hi, r_hi) };
    if resid > 1e-10 * (1.0 + a.abs()) {
        return Err(Error::Convergence(format!(
            "psi_inv residual {resid:e} too large for a = {a}"
        )));
    }
    Ok(delta)
}

/// Validated parameter bundle with the derived exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardyParams {
    d: u32,
    alpha: f64,
    a: f64,
    a_star: f64,
    a_star_star: Option<f64>,
    delta: f64,
    delta_plus: f64,
}

impl HardyParams {
    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn a_star(&self) -> f64 {
        self.a_star
    }

    pub fn a_star_star(&self) -> Option<f64> {
        self.a_star_star
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn delta_plus(&self) -> f64 {
        self.delta_plus
    }

    /// `(d − 2δ)/α`, the upper end of the range where `‖|p|^{αs/2}f‖ ≲ ‖𝓛^{s/2}f‖`.
    pub fn forward_threshold(&self) -> f64 {
        (self.d as f64 - 2.0 * self.delta) / self.alpha
    }

    /// `d/α`, the upper end for the reverse comparison.
    pub fn backward_threshold(&self) -> f64 {
        self.d as f64 / self.alpha
    }

    /// Same `(d, α)` with another coupling.
    pub fn with_coupling(&self, a: f64) -> Result<HardyParams> {
        make_params(self.d, self.alpha, a)
    }
}

/// Build [`HardyParams`], computing `a_*`, `a_**`, δ and δ_+.
pub fn make_params(d: u32, alpha: f64, a: f64) -> Result<HardyParams> {
    check_alpha(d, alpha)?;
    let a_star = a_star(d, alpha)?;
    let a_star_star = if 2.0 * alpha < d as f64 {
        Some(a_star_star(d, alpha)?)
    } else {
        None
    };
    let delta = psi_inv(d, alpha, a)?;
    Ok(HardyParams {
        d,
        alpha,
        a,
        a_star,
        a_star_star,
        delta,
        delta_plus: delta.max(0.0),
    })
}
