//! Mellin symbol of `|p|^α` on radial functions and its Toeplitz sections.
//!
//! `|p|^α = r^{−α/2} A r^{−α/2}` where `A` commutes with dilations. In
//! `u = ln r`, with the `L²(ℝ^d)` normalization `r^{d/2}f`, `A` acts on
//! `e^{iξu}` by `Φ(ξ) = 2^α |Γ((d+α)/4 + iξ/2)|² / |Γ((d−α)/4 + iξ/2)|²`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::specfun::STIRLING;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln |Γ(z)|` for `Re z > 0`.
fn ln_abs_gamma(mut z: Complex64) -> f64 {
    let mut shift = 0.0;
    while z.re < 10.0 {
        shift += z.norm().ln();
        z += 1.0;
    }
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    for c in STIRLING.iter().rev() {
        series = series * inv2 + c;
    }
    let main = (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series * inv;
    main.re - shift
}

pub(crate) fn mellin_symbol(xi: f64, d: u32, alpha: f64) -> f64 {
    let df = d as f64;
    let top = Complex64::new(0.25 * (df + alpha), 0.5 * xi);
    let bottom = Complex64::new(0.25 * (df - alpha), 0.5 * xi);
    alpha.exp2() * (2.0 * (ln_abs_gamma(top) - ln_abs_gamma(bottom))).exp()
}

/// Effective wavenumber of grid frequency `θ` on step `h`: `2/h` times a
/// truncated arcsine series in `sin(θ/2)`.
fn modified_wavenumber(theta: f64, h: f64) -> f64 {
    let y = (0.5 * theta).sin().abs();
    let y2 = y * y;
    let g = y * (1.0 + y2 * (1.0 / 6.0 + y2 * (3.0 / 40.0 + y2 * 5.0 / 112.0)));
    2.0 * g / h
}

/// First row of the symmetric Toeplitz matrix `A` on `n` nodes with log
/// step `h`, from an `8n`-point cosine transform of the sampled symbol.
pub(crate) fn toeplitz_row(n: usize, h: f64, d: u32, alpha: f64) -> Vec<f64> {
    let m = 8 * n;
    let step = 2.0 * PI / m as f64;
    let symbol: Vec<f64> = (0..m)
        .map(|j| mellin_symbol(modified_wavenumber(j as f64 * step, h), d, alpha))
        .collect();
    let cosines: Vec<f64> = (0..m).map(|j| (j as f64 * step).cos()).collect();
    (0..n)
        .map(|k| {
            let mut acc = 0.0;
            let mut idx = 0usize;
            for s in &symbol {
                acc += s * cosines[idx];
                idx += k;
                if idx >= m {
                    idx -= m;
                }
            }
            acc / m as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_closed_form_d3_alpha1() {
        // Φ(ξ) = ξ coth(πξ/2) from |Γ(1+iy)|² = πy/sinh πy, |Γ(1/2+iy)|² = π/cosh πy
        for &xi in &[0.01, 0.3, 1.0, 2.5, 10.0, 80.0, 250.0] {
            let want = xi / (0.5 * PI * xi).tanh();
            let got = mellin_symbol(xi, 3, 1.0);
            assert!(((got - want) / want).abs() < 1e-13, "ξ={xi}: {got} vs {want}");
        }
    }

    #[test]
    fn symbol_closed_form_d5_alpha1() {
        // Φ(ξ) = (1 + ξ²) tanh(πξ/2)/ξ
        for &xi in &[0.02, 0.7, 3.0, 40.0] {
            let want = (1.0 + xi * xi) * (0.5 * PI * xi).tanh() / xi;
            let got = mellin_symbol(xi, 5, 1.0);
            assert!(((got - want) / want).abs() < 1e-13);
        }
    }

    #[test]
    fn symbol_at_zero_is_hardy_constant() {
        for &(d, a) in &[(3u32, 1.0), (2, 0.5), (5, 1.7)] {
            let h = crate::specfun::hardy_constant(d, a).unwrap();
            assert!((mellin_symbol(0.0, d, a) - h).abs() < 1e-13 * h);
        }
    }

    #[test]
    fn off_diagonal_row_is_negative() {
        let row = toeplitz_row(256, 0.05, 3, 1.0);
        assert!(row[0] > 0.0);
        let scale = row[0];
        assert!(row[1..].iter().all(|&c| c < 1e-12 * scale));
    }
}
