//! Radial discretization of `|p|^α`, `𝓛_{a,α}` and `|p|^α + V` with a
//! dense spectral calculus.
//!
//! Matrices are held in orthonormal coordinates `g_i = √w_i f_i`, where the
//! weighted inner product of the grid becomes the Euclidean one. Grid
//! functions passed in and out of the public API are plain node values.

mod grid;
mod symbol;

use std::fmt;
use std::sync::Arc;

use faer::{Mat, MatRef, Side};
use serde::Serialize;

pub use grid::{build_log_grid, GridInfo, RadialGrid};

use crate::specfun::{a_star, HardyParams};
use crate::{domain, Error, Result};

const MIN_OPERATOR_NODES: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OperatorLabel {
    FractionalLaplacian { alpha: f64 },
    Hardy { alpha: f64, a: f64, delta: f64 },
    Potential { alpha: f64, name: String, a: f64, a_tilde: f64 },
}

/// A potential `V` with `a r^{−α} ≤ V(r) ≤ ã r^{−α}`.
#[derive(Clone)]
pub struct PotentialSpec {
    name: String,
    v: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    a: f64,
    a_tilde: f64,
}

impl fmt::Debug for PotentialSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialSpec")
            .field("name", &self.name)
            .field("a", &self.a)
            .field("a_tilde", &self.a_tilde)
            .finish()
    }
}

impl PotentialSpec {
    /// `a` must not lie below `a_*(d, α)` and `a ≤ ã` must hold; the
    /// pointwise bounds are checked later on every grid node.
    pub fn new(
        name: impl Into<String>,
        d: u32,
        alpha: f64,
        a: f64,
        a_tilde: f64,
        v: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let floor = a_star(d, alpha)?;
        if !(a.is_finite() && a_tilde.is_finite()) || a < floor * (1.0 + 4.0 * f64::EPSILON) - f64::MIN_POSITIVE {
            return domain(format!("need finite a >= a_* = {floor}, got a={a}, a_tilde={a_tilde}"));
        }
        if a > a_tilde {
            return domain(format!("need a <= a_tilde, got a={a}, a_tilde={a_tilde}"));
        }
        Ok(Self { name: name.into(), v: Arc::new(v), a, a_tilde })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn a_tilde(&self) -> f64 {
        self.a_tilde
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.v)(r)
    }
}

/// Eigendecomposition of a discretized nonnegative operator.
#[derive(Debug, Clone)]
pub struct SpectralOperator {
    grid: RadialGrid,
    label: OperatorLabel,
    matrix: Mat<f64>,
    eigenvalues: Vec<f64>,
    eigenvectors: Mat<f64>,
    raw_min_eigenvalue: f64,
    tol_neg: f64,
}

/// `r^{−α/2}` scaled Toeplitz matrix that realizes `|p|^α`, plus the
/// scaling vector itself.
fn kinetic_matrix(grid: &RadialGrid, alpha: f64) -> Result<(Mat<f64>, Vec<f64>)> {
    let n = grid.len();
    if n < MIN_OPERATOR_NODES {
        return Err(Error::Grid(format!("operators need at least {MIN_OPERATOR_NODES} nodes, got {n}")));
    }
    let d = grid.d();
    if !(alpha > 0.0 && alpha < 2.0 && alpha < d as f64) {
        return domain(format!("alpha must lie in (0, min(2, d)), got {alpha}"));
    }
    let row = symbol::toeplitz_row(n, grid.log_step(), d, alpha);
    let scale: Vec<f64> = grid.nodes().iter().map(|r| r.powf(-0.5 * alpha)).collect();
    let m = Mat::from_fn(n, n, |i, j| scale[i] * row[i.abs_diff(j)] * scale[j]);
    Ok((m, scale))
}

impl SpectralOperator {
    fn from_matrix(grid: RadialGrid, label: OperatorLabel, mut matrix: Mat<f64>, clamp_all: bool) -> Result<Self> {
        let n = matrix.nrows();
        let mut defect: f64 = 0.0;
        let mut size: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                defect = defect.max((matrix[(i, j)] - matrix[(j, i)]).abs());
                size = size.max(matrix[(i, j)].abs());
            }
        }
        if defect > 1e-6 * size {
            return Err(Error::Grid(format!("symmetrization defect {defect:e} relative to {size:e}")));
        }
        if defect > 0.0 {
            for j in 0..n {
                for i in 0..j {
                    let avg = 0.5 * (matrix[(i, j)] + matrix[(j, i)]);
                    matrix[(i, j)] = avg;
                    matrix[(j, i)] = avg;
                }
            }
        }
        let evd = matrix
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let s = evd.S().column_vector();
        let mut eigenvalues: Vec<f64> = (0..n).map(|i| s[i]).collect();
        let eigenvectors = evd.U().to_owned();
        let radius = eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol_neg = 1e-8 * radius;
        let raw_min_eigenvalue = eigenvalues[0];
        if !clamp_all && raw_min_eigenvalue < -tol_neg {
            return Err(Error::Friedrichs { min: raw_min_eigenvalue, tol: tol_neg });
        }
        for v in &mut eigenvalues {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(Self { grid, label, matrix, eigenvalues, eigenvectors, raw_min_eigenvalue, tol_neg })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn label(&self) -> &OperatorLabel {
        &self.label
    }

    /// Nondecreasing eigenvalues after clamping at zero.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Smallest eigenvalue before clamping.
    pub fn raw_min_eigenvalue(&self) -> f64 {
        self.raw_min_eigenvalue
    }

    pub fn tol_neg(&self) -> f64 {
        self.tol_neg
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1].max(-self.raw_min_eigenvalue)
    }

    /// The symmetric matrix in orthonormal coordinates.
    pub fn matrix(&self) -> MatRef<'_, f64> {
        self.matrix.as_ref()
    }

    /// Orthonormal eigenvectors (columns) in orthonormal coordinates.
    pub fn eigenvectors(&self) -> MatRef<'_, f64> {
        self.eigenvectors.as_ref()
    }

    /// Eigenvector `i` as node values, normalized in the weighted inner product.
    pub fn eigenvector(&self, i: usize) -> Vec<f64> {
        let col: Vec<f64> = (0..self.grid.len()).map(|k| self.eigenvectors[(k, i)]).collect();
        self.grid.from_orthonormal(&col)
    }

    /// The discretized operator applied directly to node values.
    pub fn apply_matrix(&self, f: &[f64]) -> Vec<f64> {
        let g = self.grid.to_orthonormal(f);
        let out = matvec(self.matrix.as_ref(), &g);
        self.grid.from_orthonormal(&out)
    }

    /// `φ(L) f` for node values `f`.
    pub fn apply<F: Fn(f64) -> f64>(&self, phi: F, f: &[f64]) -> Result<Vec<f64>> {
        let values = self.spectral_values(phi)?;
        let g = self.grid.to_orthonormal(f);
        Ok(self.grid.from_orthonormal(&self.apply_ortho(&values, &g)))
    }

    /// `L^p f`. Negative powers act on the span of eigenvectors with
    /// strictly positive eigenvalue and annihilate the rest.
    pub fn apply_power(&self, p: f64, f: &[f64]) -> Result<Vec<f64>> {
        let values = self.power_values(p);
        let g = self.grid.to_orthonormal(f);
        Ok(self.grid.from_orthonormal(&self.apply_ortho(&values, &g)))
    }

    /// `e^{−tL} f`.
    pub fn apply_heat(&self, t: f64, f: &[f64]) -> Result<Vec<f64>> {
        if !(t >= 0.0 && t.is_finite()) {
            return domain(format!("heat time must be finite and nonnegative, got {t}"));
        }
        self.apply(|l| (-t * l).exp(), f)
    }

    pub(crate) fn power_values(&self, p: f64) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .map(|&l| if p == 0.0 { 1.0 } else if l > 0.0 { l.powf(p) } else { 0.0 })
            .collect()
    }

    fn spectral_values<F: Fn(f64) -> f64>(&self, phi: F) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.eigenvalues.len());
        for &l in &self.eigenvalues {
            let v = phi(l);
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("spectral function is {v} at eigenvalue {l:e}")));
            }
            out.push(v);
        }
        Ok(out)
    }

    /// `V diag(values) Vᵀ g` in orthonormal coordinates.
    pub(crate) fn apply_ortho(&self, values: &[f64], g: &[f64]) -> Vec<f64> {
        let n = g.len();
        let v = self.eigenvectors.as_ref();
        let mut coef = vec![0.0; n];
        for (k, c) in coef.iter_mut().enumerate() {
            let col = v.col(k);
            let mut acc = 0.0;
            for i in 0..n {
                acc += col[i] * g[i];
            }
            *c = acc * values[k];
        }
        let mut out = vec![0.0; n];
        for (k, &c) in coef.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let col = v.col(k);
            for i in 0..n {
                out[i] += c * col[i];
            }
        }
        out
    }

    /// `V diag(values) Vᵀ` in orthonormal coordinates.
    pub(crate) fn function_matrix_from_values(&self, values: &[f64]) -> Mat<f64> {
        let v = self.eigenvectors.as_ref();
        let n = v.nrows();
        let scaled = Mat::from_fn(n, n, |i, k| v[(i, k)] * values[k]);
        &scaled * v.transpose()
    }

    /// `φ(L)` as a matrix in orthonormal coordinates.
    pub fn function_matrix<F: Fn(f64) -> f64>(&self, phi: F) -> Result<Mat<f64>> {
        let values = self.spectral_values(phi)?;
        Ok(self.function_matrix_from_values(&values))
    }

    /// `L^p` as a matrix in orthonormal coordinates, with the convention of
    /// [`SpectralOperator::apply_power`].
    pub fn power_matrix(&self, p: f64) -> Mat<f64> {
        self.function_matrix_from_values(&self.power_values(p))
    }

    /// Converts a matrix in orthonormal coordinates to kernel values
    /// `K_ij = M_ij / √(w_i w_j)`, the angular average of the kernel over
    /// the spheres `|x| = r_i`, `|y| = r_j`.
    pub fn kernel_values(&self, m: MatRef<'_, f64>) -> Mat<f64> {
        let w = self.grid.weights();
        Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] / (w[i] * w[j]).sqrt())
    }
}

pub(crate) fn matvec(m: MatRef<'_, f64>, g: &[f64]) -> Vec<f64> {
    let n = m.nrows();
    let mut out = vec![0.0; n];
    for (j, &gj) in g.iter().enumerate() {
        if gj == 0.0 {
            continue;
        }
        let col = m.col(j);
        for i in 0..n {
            out[i] += col[i] * gj;
        }
    }
    out
}

/// `|p|^α` on the grid. Eigenvalues are clamped at zero from below.
pub fn build_fractional_laplacian(grid: &RadialGrid, alpha: f64) -> Result<SpectralOperator> {
    let (m, _) = kinetic_matrix(grid, alpha)?;
    SpectralOperator::from_matrix(grid.clone(), OperatorLabel::FractionalLaplacian { alpha }, m, true)
}

/// `𝓛_{a,α} = |p|^α + a r^{−α}`.
pub fn build_hardy_operator(grid: &RadialGrid, params: &HardyParams) -> Result<SpectralOperator> {
    if grid.d() != params.d() {
        return domain(format!("grid dimension {} differs from parameter dimension {}", grid.d(), params.d()));
    }
    let (mut m, scale) = kinetic_matrix(grid, params.alpha())?;
    for (i, s) in scale.iter().enumerate() {
        m[(i, i)] += params.a() * s * s;
    }
    let label = OperatorLabel::Hardy { alpha: params.alpha(), a: params.a(), delta: params.delta() };
    SpectralOperator::from_matrix(grid.clone(), label, m, false)
}

/// `|p|^α + V` for a potential between `a r^{−α}` and `ã r^{−α}`.
pub fn build_potential_operator(grid: &RadialGrid, alpha: f64, pot: &PotentialSpec) -> Result<SpectralOperator> {
    let v = potential_values(grid, alpha, pot)?;
    let (mut m, _) = kinetic_matrix(grid, alpha)?;
    for (i, vi) in v.iter().enumerate() {
        m[(i, i)] += vi;
    }
    let label = OperatorLabel::Potential {
        alpha,
        name: pot.name.clone(),
        a: pot.a,
        a_tilde: pot.a_tilde,
    };
    SpectralOperator::from_matrix(grid.clone(), label, m, false)
}

/// Samples `V` at the nodes and checks the sandwich bounds.
pub fn potential_values(grid: &RadialGrid, alpha: f64, pot: &PotentialSpec) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(grid.len());
    for &r in grid.nodes() {
        let v = pot.eval(r);
        let base = r.powf(-alpha);
        let lo = pot.a * base;
        let hi = pot.a_tilde * base;
        let slack = 1e-12 * base * pot.a.abs().max(pot.a_tilde.abs()).max(1e-300);
        if !v.is_finite() || v < lo - slack || v > hi + slack {
            return Err(Error::Sandwich { r, v, lo, hi });
        }
        out.push(v);
    }
    Ok(out)
}

/// Kernel values of `e^{−tL}` at the node pairs.
pub fn heat_kernel_matrix(op: &SpectralOperator, t: f64) -> Result<Mat<f64>> {
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("heat time must be finite and positive, got {t}"));
    }
    let values: Vec<f64> = op.eigenvalues.iter().map(|l| (-t * l).exp()).collect();
    let m = op.function_matrix_from_values(&values);
    Ok(op.kernel_values(m.as_ref()))
}

/// Gauss–Legendre 8-point nodes and weights on [−1, 1].
const GL8: [(f64, f64); 8] = [
    (-0.9602898564975363, 0.1012285362903763),
    (-0.7966664774136267, 0.2223810344533745),
    (-0.5255324099163290, 0.3137066458778873),
    (-0.1834346424956498, 0.3626837833783620),
    (0.1834346424956498, 0.3626837833783620),
    (0.5255324099163290, 0.3137066458778873),
    (0.7966664774136267, 0.2223810344533745),
    (0.9602898564975363, 0.1012285362903763),
];

/// Nodes and weights on `[0, t]`: 32 panels graded geometrically towards
/// each endpoint down to width `10^{-9} t / 2`.
fn graded_rule(t: f64) -> Vec<(f64, f64)> {
    const PER_SIDE: usize = 32;
    let half = 0.5 * t;
    let ratio = (1e9f64).powf(1.0 / (PER_SIDE - 1) as f64);
    let mut cuts = vec![0.0];
    for k in (0..PER_SIDE).rev() {
        cuts.push(half / ratio.powi(k as i32));
    }
    let mut panels = Vec::new();
    for w in cuts.windows(2) {
        panels.push((w[0], w[1]));
    }
    let left: Vec<(f64, f64)> = panels.clone();
    for &(a, b) in left.iter().rev() {
        panels.push((t - b, t - a));
    }
    let mut rule = Vec::with_capacity(panels.len() * GL8.len());
    for (a, b) in panels {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        for &(x, w) in &GL8 {
            rule.push((c + h * x, h * w));
        }
    }
    rule
}

/// Relative Frobenius discrepancy in
/// `e^{−tT} − e^{−tL} = ∫₀^t e^{−(t−s)T} W e^{−sL} ds`, `L = T + W`, with
/// the `s` integral done by quadrature in the two eigenbases.
pub fn duhamel_discrepancy(kinetic: &SpectralOperator, full: &SpectralOperator, w_diag: &[f64], t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("time must be finite and positive, got {t}"));
    }
    let n = kinetic.grid.len();
    if full.grid.len() != n || w_diag.len() != n {
        return domain("operators and potential must share one grid");
    }
    let u = kinetic.eigenvectors.as_ref();
    let v = full.eigenvectors.as_ref();
    let mu = &kinetic.eigenvalues;
    let lam = &full.eigenvalues;

    let lhs = {
        let a: Vec<f64> = mu.iter().map(|m| (-t * m).exp()).collect();
        let b: Vec<f64> = lam.iter().map(|l| (-t * l).exp()).collect();
        kinetic.function_matrix_from_values(&a) - full.function_matrix_from_values(&b)
    };

    let rule = graded_rule(t);
    let q = rule.len();
    let ea = Mat::from_fn(n, q, |i, k| rule[k].1 * (-(t - rule[k].0) * mu[i]).exp());
    let eb = Mat::from_fn(n, q, |j, k| (-rule[k].0 * lam[j]).exp());
    let time = &ea * eb.transpose();
    let wv = Mat::from_fn(n, n, |i, j| w_diag[i] * v[(i, j)]);
    let x = u.transpose() * &wv;
    let core = Mat::from_fn(n, n, |i, j| x[(i, j)] * time[(i, j)]);
    let rhs = u * &core * v.transpose();

    let diff = (&lhs - &rhs).norm_l2();
    let scale = lhs.norm_l2();
    Ok(if scale > 0.0 { diff / scale } else { diff })
}

/// Duhamel check for `𝓛_{a,α}` against `|p|^α` on `grid`.
pub fn duhamel_check(grid: &RadialGrid, params: &HardyParams, t: f64) -> Result<f64> {
    let kinetic = build_fractional_laplacian(grid, params.alpha())?;
    let full = build_hardy_operator(grid, params)?;
    let w: Vec<f64> = grid.nodes().iter().map(|r| params.a() * r.powf(-params.alpha())).collect();
    duhamel_discrepancy(&kinetic, &full, &w, t)
}
