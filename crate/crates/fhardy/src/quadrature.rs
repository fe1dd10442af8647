//! Adaptive Gauss–Kronrod quadrature, semi-infinite integrals through
//! `t = e^u`, and the specific integrals behind the kernel and Schur bounds.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::kernels::{check_riesz_s, KernelTriple};
use crate::specfun::{log_gamma, HardyParams};
use crate::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Points where the integrand has kinks; for semi-infinite integrals
    /// these are values of `t`, not `u = ln t`.
    pub breakpoints: Vec<f64>,
    pub max_evals: usize,
}

impl QuadOptions {
    pub fn absolute(tol: f64) -> Self {
        Self { abs_tol: tol, rel_tol: 0.0, breakpoints: Vec::new(), max_evals: 2_000_000 }
    }

    pub fn relative(tol: f64) -> Self {
        Self { abs_tol: 0.0, rel_tol: tol, breakpoints: Vec::new(), max_evals: 2_000_000 }
    }

    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(points);
        self
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn eval<F: FnMut(f64) -> f64>(f: &mut F, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!("integrand returned {v} at {x:e}")))
    }
}

/// 15-point Kronrod estimate and `|K15 − G7|` on `[a, b]`.
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = eval(f, c)?;
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = eval(f, c - x)? + eval(f, c + x)?;
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    Ok((k * h, ((k - g) * h).abs()))
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Global adaptive bisection starting from the given panels. `extra_err`
/// counts against the budget (used for truncated tails).
fn adaptive<F: FnMut(f64) -> f64>(
    f: &mut F,
    panels: &[(f64, f64)],
    opts: &QuadOptions,
    extra_err: f64,
) -> Result<QuadResult> {
    let mut heap = BinaryHeap::new();
    let mut evals = 0usize;
    for &(a, b) in panels {
        if b > a {
            let (value, err) = gk15(f, a, b)?;
            evals += 15;
            heap.push(Segment { a, b, value, err });
        }
    }
    loop {
        let value: f64 = heap.iter().map(|s| s.value).sum();
        let err: f64 = heap.iter().map(|s| s.err).sum::<f64>() + extra_err;
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if err <= target {
            return Ok(finish(heap, extra_err, evals));
        }
        if evals >= opts.max_evals {
            return Err(Error::Convergence(format!(
                "quadrature error estimate {err:e} above {target:e} after {evals} evaluations"
            )));
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::Convergence(format!(
                "panel [{:e}, {:e}] cannot be split further; estimate {err:e}",
                worst.a, worst.b
            )));
        }
        let (v1, e1) = gk15(f, worst.a, mid)?;
        let (v2, e2) = gk15(f, mid, worst.b)?;
        evals += 30;
        heap.push(Segment { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, err: e2 });
    }
}

fn finish(heap: BinaryHeap<Segment>, extra_err: f64, evaluations: usize) -> QuadResult {
    // Sum in position order so the result does not depend on heap layout.
    let mut segs = heap.into_vec();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segs.iter().map(|s| s.value).sum();
    let abs_error_estimate = segs.iter().map(|s| s.err).sum::<f64>() + extra_err;
    QuadResult { value, abs_error_estimate, evaluations }
}

fn split_panels(a: f64, b: f64, points: &[f64], max_width: f64) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = points.iter().copied().filter(|&p| p > a && p < b).collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let pieces = ((w[1] - w[0]) / max_width).ceil().max(1.0) as usize;
        let step = (w[1] - w[0]) / pieces as f64;
        for i in 0..pieces {
            let lo = w[0] + i as f64 * step;
            let hi = if i + 1 == pieces { w[1] } else { lo + step };
            out.push((lo, hi));
        }
    }
    out
}

/// Adaptive integral over a finite interval.
pub fn integrate_interval<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    if !(a < b) || !(a.is_finite() && b.is_finite()) {
        return domain(format!("integration interval [{a}, {b}] is empty or unbounded"));
    }
    let panels = split_panels(a, b, &opts.breakpoints, f64::INFINITY);
    adaptive(&mut f, &panels, opts, 0.0)
}

/// `∫₀^∞ f(t) dt` to absolute tolerance `tol`.
pub fn integrate_semiinfinite<F: FnMut(f64) -> f64>(f: F, tol: f64) -> Result<QuadResult> {
    integrate_semiinfinite_with(f, &QuadOptions::absolute(tol))
}

const U_LIMIT: f64 = 700.0;

/// `∫₀^∞ f(t) dt` with `t = e^u`. The range in `u` is grown until the
/// tails, extrapolated from the local decay rate, fall below a tenth of the
/// tolerance. Tails that are exact power laws in `t` are added in closed
/// form instead, which handles slow algebraic decay.
pub fn integrate_semiinfinite_with<F: FnMut(f64) -> f64>(
    mut f: F,
    opts: &QuadOptions,
) -> Result<QuadResult> {
    let mut g = |u: f64| {
        let t = u.exp();
        f(t) * t
    };
    let mut cuts: Vec<f64> = opts.breakpoints.iter().filter(|&&t| t > 0.0).map(|t| t.ln()).collect();
    if cuts.iter().any(|u| !u.is_finite() || u.abs() > U_LIMIT) {
        return domain("breakpoints must be finite and positive");
    }
    cuts.push(0.0);
    let lo0 = cuts.iter().copied().fold(f64::INFINITY, f64::min) - 2.0;
    let hi0 = cuts.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 2.0;

    let core = split_panels(lo0, hi0, &cuts, 1.0);
    let mut rough = 0.0;
    for &(a, b) in &core {
        rough += gk15(&mut g, a, b)?.0;
    }
    let target = opts.abs_tol.max(opts.rel_tol * rough.abs());
    if !(target > 0.0) {
        return domain("quadrature tolerance must be positive");
    }
    let low = tail_extent(&mut g, lo0, -1.0, target / 10.0)?;
    let high = tail_extent(&mut g, hi0, 1.0, target / 10.0)?;
    let panels = split_panels(low.at, high.at, &cuts, 1.0);
    let mut r = adaptive(&mut g, &panels, opts, low.err + high.err)?;
    r.value += low.value + high.value;
    Ok(r)
}

struct Tail {
    at: f64,
    value: f64,
    err: f64,
}

fn tail_extent<G: FnMut(f64) -> f64>(g: &mut G, start: f64, dir: f64, target: f64) -> Result<Tail> {
    let mut u = start;
    loop {
        let g1 = eval(g, u)?;
        if g1 == 0.0 {
            return Ok(Tail { at: u, value: 0.0, err: 0.0 });
        }
        let g0 = eval(g, u - dir)?;
        let gm = eval(g, u - 2.0 * dir)?;
        let rate = (g0 / g1).ln();
        let prev = (gm / g0).ln();
        if rate > 0.0 && g0.signum() == g1.signum() && gm.signum() == g1.signum() {
            let tail = g1 / rate;
            // g = C e^{−rate·|u|} exactly: the tail is g1/rate
            if (rate - prev).abs() <= 1e-12 * rate.max(1.0) {
                return Ok(Tail { at: u, value: tail, err: 1e-13 * tail.abs() });
            }
            if rate > 0.05 && tail.abs() <= target {
                return Ok(Tail { at: u, value: 0.0, err: tail.abs() });
            }
        }
        u += 2.0 * dir;
        if u.abs() > U_LIMIT {
            return Err(Error::Convergence(
                "integrand does not decay algebraically at an endpoint".into(),
            ));
        }
    }
}

/// `∫₀^∞ (heat profile) t^{s/2} dt/t`, written after the substitution
/// `t ↦ |x−y|^α t` as
/// `|x−y|^{αs/2−d} ∫₀^∞ t^{s/2}(1 ∧ t^{−d/α−1})(1 ∨ t^{1/α}/λ_x)^δ(1 ∨ t^{1/α}/λ_y)^δ dt`
/// with `λ_x = |x|/|x−y|`. `tol` is relative.
pub fn riesz_time_integral(s: f64, q: &KernelTriple, params: &HardyParams, tol: f64) -> Result<f64> {
    check_riesz_s(s, params)?;
    if !(q.rx() > 0.0 && q.ry() > 0.0 && q.rxy() > 0.0) {
        return domain("riesz_time_integral needs |x|, |y|, |x - y| > 0");
    }
    let alpha = params.alpha();
    let df = params.d() as f64;
    let delta = params.delta();
    let inv_x = q.rxy() / q.rx();
    let inv_y = q.rxy() / q.ry();
    let integrand = |t: f64| {
        let len = t.powf(1.0 / alpha);
        let mut v = t.powf(0.5 * s) * t.powf(-df / alpha - 1.0).min(1.0);
        if delta != 0.0 {
            v *= (inv_x * len).max(1.0).powf(delta) * (inv_y * len).max(1.0).powf(delta);
        }
        v
    };
    let opts = QuadOptions::relative(tol).with_breakpoints([
        1.0,
        (q.rx() / q.rxy()).powf(alpha),
        (q.ry() / q.rxy()).powf(alpha),
    ]);
    let r = integrate_semiinfinite_with(integrand, &opts)?;
    Ok(q.rxy().powf(alpha * s / 2.0 - df) * r.value)
}

/// Surface area of the unit sphere in ℝ^d.
pub fn sphere_area(d: u32) -> f64 {
    let h = 0.5 * d as f64;
    2.0 * PI.powf(h) / log_gamma(h).expect("positive argument").exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchurResult {
    /// `+∞` when the integral diverges.
    pub value: f64,
    pub finite: bool,
    pub quad: Option<QuadResult>,
}

/// `∫_{ℝ^d} |z|^{−β} (|z|∨1)^{−d} ((|z|∨1)/(|z|∧1))^{δ_+} dz`.
///
/// Finiteness is decided from the endpoint exponents: the radial integrand
/// behaves like `r^{d−1−β−δ_+}` at 0 and `r^{−1−β+δ_+}` at infinity.
pub fn schur_weight_integral(beta: f64, delta_plus: f64, d: u32, tol: f64) -> Result<SchurResult> {
    if !(beta.is_finite() && delta_plus.is_finite() && delta_plus >= 0.0) || d == 0 {
        return domain(format!("invalid Schur parameters beta={beta}, delta_plus={delta_plus}, d={d}"));
    }
    let df = d as f64;
    let finite = delta_plus < beta && beta < df - delta_plus;
    if !finite {
        return Ok(SchurResult { value: f64::INFINITY, finite: false, quad: None });
    }
    let radial = |r: f64| {
        let outer = r.max(1.0);
        let inner = r.min(1.0);
        r.powf(df - 1.0 - beta) * outer.powf(-df) * (outer / inner).powf(delta_plus)
    };
    let opts = QuadOptions::relative(tol).with_breakpoints([1.0]);
    let q = integrate_semiinfinite_with(radial, &opts)?;
    let area = sphere_area(d);
    let quad = QuadResult {
        value: area * q.value,
        abs_error_estimate: area * q.abs_error_estimate,
        evaluations: q.evaluations,
    };
    Ok(SchurResult { value: quad.value, finite: true, quad: Some(quad) })
}

/// `Γ(−s/2) = Γ(1 − s/2)/(−s/2)` for `0 < s < 2`.
pub fn gamma_negative_half(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 2.0) {
        return domain(format!("s must lie in (0, 2), got {s}"));
    }
    Ok(-log_gamma(1.0 - 0.5 * s)?.exp() / (0.5 * s))
}

/// Quadrature value of `∫₀^∞ t^{−s/2−1}(e^{−t} − 1) dt`, which equals `Γ(−s/2)`.
pub fn gamma_negative_half_integral_check(s: f64) -> Result<QuadResult> {
    if !(s > 0.0 && s < 2.0) {
        return domain(format!("s must lie in (0, 2), got {s}"));
    }
    let opts = QuadOptions::relative(1e-12);
    // near 0 the leading −t of e^{−t} − 1 is integrated exactly
    let head = integrate_interval(|t: f64| t.powf(-0.5 * s - 1.0) * exp_m1_plus_x(-t), 0.0, 1.0, &opts)?;
    let tail = integrate_semiinfinite_with(
        |t: f64| if t < 1.0 { 0.0 } else { t.powf(-0.5 * s - 1.0) * (-t).exp_m1() },
        &opts.clone().with_breakpoints([1.0]),
    )?;
    Ok(QuadResult {
        value: head.value + tail.value - 1.0 / (1.0 - 0.5 * s),
        abs_error_estimate: head.abs_error_estimate + tail.abs_error_estimate,
        evaluations: head.evaluations + tail.evaluations,
    })
}

/// `e^x − 1 − x` without cancellation for small `|x|`.
fn exp_m1_plus_x(x: f64) -> f64 {
    if x.abs() > 0.5 {
        return x.exp_m1() - x;
    }
    let mut term = 0.5 * x * x;
    let mut acc = term;
    let mut k = 2.0;
    while term.abs() > 1e-17 * acc.abs() {
        k += 1.0;
        term *= x / k;
        acc += term;
    }
    acc
}

/// Normalized average of `f(|x − y|)` over the relative angle between `x`
/// and `y` at fixed `|x|, |y|` in ℝ^d. `scales` are distances where `f`
/// changes character; they become breakpoints in the angle.
pub fn angular_average<F: FnMut(f64) -> f64>(
    d: u32,
    rx: f64,
    ry: f64,
    mut f: F,
    scales: &[f64],
    rel_tol: f64,
) -> Result<f64> {
    if d < 2 {
        return domain("angular averages need d >= 2");
    }
    let k = d as f64 - 2.0;
    let diff2 = (rx - ry) * (rx - ry);
    let prod4 = 4.0 * rx * ry;
    let mut breaks: Vec<f64> = Vec::new();
    for &c in scales {
        let s2 = (c * c - diff2) / prod4;
        if s2 > 0.0 && s2 < 1.0 {
            breaks.push(2.0 * s2.sqrt().asin());
        }
    }
    let opts = QuadOptions { abs_tol: 0.0, rel_tol, breakpoints: breaks, max_evals: 2_000_000 };
    let integrand = |theta: f64| {
        let half = (0.5 * theta).sin();
        let rxy = (diff2 + prod4 * half * half).sqrt();
        let w = if k == 0.0 { 1.0 } else { theta.sin().powf(k) };
        f(rxy) * w
    };
    let r = integrate_interval(integrand, 0.0, PI, &opts)?;
    let norm = PI.sqrt() * (log_gamma(0.5 * (k + 1.0))? - log_gamma(0.5 * (k + 2.0))?).exp();
    Ok(r.value / norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact_on_one_panel() {
        let r = integrate_interval(|x| x.powi(20), 0.0, 1.0, &QuadOptions::absolute(1e-14)).unwrap();
        assert!((r.value - 1.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn non_finite_integrand_reported() {
        let r = integrate_interval(|x| 1.0 / (x - 0.5), 0.0, 1.0, &QuadOptions::absolute(1e-8));
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }

    #[test]
    fn non_decaying_tail_reported() {
        let r = integrate_semiinfinite(|t| 1.0 / (1.0 + t), 1e-8);
        assert!(matches!(r, Err(Error::Convergence(_))));
    }

    #[test]
    fn angular_average_of_constant() {
        for d in 2..6 {
            let v = angular_average(d, 1.0, 2.0, |_| 3.0, &[], 1e-12).unwrap();
            assert!((v - 3.0).abs() < 1e-12);
        }
    }
}
