use serde::Serialize;

use crate::quadrature::sphere_area;
use crate::{Error, Result};

/// Geometric radius nodes with trapezoid weights in `ln r`, so that
/// `Σ w_i f(r_i) ≈ ∫_{ℝ^d} f(|x|) dx` for radial `f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialGrid {
    d: u32,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    log_step: f64,
}

/// Summary of a grid for reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridInfo {
    pub n: usize,
    pub r_min: f64,
    pub r_max: f64,
}

pub fn build_log_grid(d: u32, r_min: f64, r_max: f64, n: usize) -> Result<RadialGrid> {
    if d < 1 {
        return Err(Error::Grid("dimension must be positive".into()));
    }
    if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
        return Err(Error::Grid(format!("need 0 < r_min < r_max, got {r_min}, {r_max}")));
    }
    if n < 2 {
        return Err(Error::Grid(format!("need at least 2 nodes, got {n}")));
    }
    let u0 = r_min.ln();
    let log_step = (r_max.ln() - u0) / (n - 1) as f64;
    let area = sphere_area(d);
    let df = d as f64;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let r = if i == 0 {
            r_min
        } else if i + 1 == n {
            r_max
        } else {
            (u0 + i as f64 * log_step).exp()
        };
        let end = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
        nodes.push(r);
        weights.push(end * area * r.powf(df) * log_step);
    }
    Ok(RadialGrid { d, nodes, weights, log_step })
}

impl RadialGrid {
    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn log_step(&self) -> f64 {
        self.log_step
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn info(&self) -> GridInfo {
        GridInfo { n: self.len(), r_min: self.r_min(), r_max: self.r_max() }
    }

    /// Grid with the same step and outer radius reaching down to
    /// `r_min / 10^k`.
    pub fn extended_inward(&self, k: u32) -> Result<RadialGrid> {
        let r_min = self.r_min() / 10f64.powi(k as i32);
        let n = ((self.r_max() / r_min).ln() / self.log_step).round() as usize + 1;
        build_log_grid(self.d, r_min, self.r_max(), n)
    }

    /// Index range of the middle `fraction` of the nodes.
    pub fn interior(&self, fraction: f64) -> std::ops::Range<usize> {
        let n = self.len();
        let cut = ((1.0 - fraction) * 0.5 * n as f64).round() as usize;
        cut..n - cut
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes.iter().map(|&r| f(r)).collect()
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        f.iter().zip(g).zip(&self.weights).map(|((a, b), w)| a * b * w).sum()
    }

    pub fn norm(&self, f: &[f64]) -> f64 {
        self.inner(f, f).sqrt()
    }

    /// Radial `L^p` norm.
    pub fn lp_norm(&self, f: &[f64], p: f64) -> f64 {
        let s: f64 = f.iter().zip(&self.weights).map(|(v, w)| v.abs().powf(p) * w).sum();
        s.powf(1.0 / p)
    }

    pub(crate) fn to_orthonormal(&self, f: &[f64]) -> Vec<f64> {
        f.iter().zip(&self.weights).map(|(v, w)| v * w.sqrt()).collect()
    }

    pub(crate) fn from_orthonormal(&self, g: &[f64]) -> Vec<f64> {
        g.iter().zip(&self.weights).map(|(v, w)| v / w.sqrt()).collect()
    }
}
