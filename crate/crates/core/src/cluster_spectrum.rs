//! Single-cluster spectral analysis: distance-matrix powers, the kernel
//! chain of the moment matrices `P_m`, the signed quadratic forms
//! `(-1)^m a^H D^{2m} a`, and eigenvalue/singular-value scaling checks.
//!
//! Eigenvalues of `G_N` are taken as `sigma_j(V_N)^2 / N` from the graded
//! singular-value route, which keeps relative accuracy when they fall far
//! below machine precision.

use std::f64::consts::E;

use num_complex::Complex64;

use crate::dd_bases::graded_singular_values;
use crate::error::{invalid, Error, Result};
use crate::fit::fit_loglog;
use crate::linalg::{
    from_real, frobenius_norm, orthonormal_nullspace, singular_values, ComplexMatrix, ComplexVector,
};
use crate::nodes::{ClusterConfig, NodeSet};
use crate::vandermonde::{build_centered, GramSpec};

/// Smallest admissible spacing of rescaled nodes.
pub const MIN_RESCALED_SPACING: f64 = 1e-10;
/// `N h` above which scaling ratios are reported but not asserted.
pub const SCALING_REGIME_CAP: f64 = 0.5;

/// `[(y_i - y_j)^k]`; `0^0 = 1` on the diagonal.
pub fn distance_matrix_power(y: &[f64], k: u32) -> ComplexMatrix {
    let s = y.len();
    from_real(s, s, |i, j| if k == 0 { 1.0 } else { (y[i] - y[j]).powi(k as i32) })
}

/// `P_m = [y_j^k]`, `k = 0..=m`.
pub fn pm_matrix(y: &[f64], m: usize) -> Result<ComplexMatrix> {
    if y.is_empty() || m >= y.len() {
        return Err(invalid(format!("P_m needs 0 <= m < s, got m = {m}, s = {}", y.len())));
    }
    Ok(from_real(m + 1, y.len(), |k, j| if k == 0 { 1.0 } else { y[j].powi(k as i32) }))
}

/// One level `ker P_{m-1} = ker P_m + M_m` of the chain.
#[derive(Debug, Clone)]
pub struct KernelLevel {
    /// Orthonormal basis of `ker P_{m-1}` (the whole space for `m = 0`).
    pub ker_prev: ComplexMatrix,
    /// Orthonormal basis of `ker P_m`.
    pub ker: ComplexMatrix,
    /// Unit vector spanning `M_m`.
    pub complement: ComplexVector,
}

/// Nested kernels of `P_0, ..., P_{s-1}` with their one-dimensional
/// complements.
#[derive(Debug, Clone)]
pub struct KernelChain {
    pub levels: Vec<KernelLevel>,
}

impl KernelChain {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Orthonormal basis of `Q_m = M_0 + ... + M_m`.
    pub fn q_basis(&self, m: usize) -> ComplexMatrix {
        let s = self.levels.len();
        ComplexMatrix::from_fn(s, m + 1, |i, j| self.levels[j].complement[i])
    }
}

fn check_spacing(y: &[f64]) -> Result<()> {
    for i in 0..y.len() {
        for j in 0..i {
            if (y[i] - y[j]).abs() < MIN_RESCALED_SPACING {
                return Err(Error::IllConditioned(format!(
                    "rescaled nodes {j} and {i} are closer than {MIN_RESCALED_SPACING:e}"
                )));
            }
        }
    }
    Ok(())
}

pub fn kernel_chain(y: &[f64]) -> Result<KernelChain> {
    if y.is_empty() {
        return Err(invalid("kernel chain of an empty node set"));
    }
    check_spacing(y)?;
    let s = y.len();
    let mut prev = ComplexMatrix::identity(s, s);
    let mut levels = Vec::with_capacity(s);
    for m in 0..s {
        let ker = orthonormal_nullspace(&pm_matrix(y, m)?)?;
        if ker.ncols() != s - 1 - m {
            return Err(Error::IllConditioned(format!(
                "dim ker P_{m} = {} instead of {}",
                ker.ncols(),
                s - 1 - m
            )));
        }
        // complement of ker inside prev, in prev's coordinates
        let coords = if ker.ncols() == 0 {
            ComplexVector::from_element(1, Complex64::new(1.0, 0.0))
        } else {
            let c = prev.adjoint() * &ker;
            let null = orthonormal_nullspace(&c.adjoint())?;
            if null.ncols() != 1 {
                return Err(Error::IllConditioned(format!("dim M_{m} = {}", null.ncols())));
            }
            null.column(0).into_owned()
        };
        let complement = &prev * coords;
        let lhs = &prev * prev.adjoint();
        let rhs = &ker * ker.adjoint() + &complement * complement.adjoint();
        if frobenius_norm(&(lhs - rhs)) > 1e-10 {
            return Err(Error::IllConditioned(format!("kernel splitting fails at m = {m}")));
        }
        levels.push(KernelLevel { ker_prev: prev, ker: ker.clone(), complement });
        prev = ker;
    }
    Ok(KernelChain { levels })
}

fn quadratic(d: &ComplexMatrix, a: &ComplexVector, b: &ComplexVector) -> Complex64 {
    a.dotc(&(d * b))
}

/// `(-1)^m a^H D^{2m} a` for `a` in `ker P_{m-1}`.
pub fn micchelli_form(y: &[f64], m: usize, a: &ComplexVector) -> Result<f64> {
    if a.len() != y.len() {
        return Err(invalid("vector length differs from node count"));
    }
    if m > 0 {
        let p = pm_matrix(y, m - 1)?;
        let resid = (&p * a).norm();
        if resid > 1e-10 * frobenius_norm(&p) * a.norm() {
            return Err(Error::Precondition(format!(
                "vector is not in ker P_{} (residual {resid:.3e})",
                m - 1
            )));
        }
    }
    let d = distance_matrix_power(y, 2 * m as u32);
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * quadratic(&d, a, a).re)
}

/// `a^H D^{2m} b`; vanishes for `a` in `ker P_{m-1}` and `b` in `ker P_m`.
pub fn micchelli_cross(y: &[f64], m: usize, a: &ComplexVector, b: &ComplexVector) -> Result<Complex64> {
    if a.len() != y.len() || b.len() != y.len() {
        return Err(invalid("vector length differs from node count"));
    }
    Ok(quadratic(&distance_matrix_power(y, 2 * m as u32), a, b))
}

fn as_single_block(nodes: &NodeSet) -> Result<NodeSet> {
    NodeSet::from_local(vec![nodes.single_cluster()?])
}

/// Eigenvalues of `G_N`, non-increasing, as `sigma_j(V_N)^2 / N`.
pub fn gram_eigenvalues(nodes: &NodeSet, n: usize) -> Result<Vec<f64>> {
    let sv = graded_singular_values(&as_single_block(nodes)?, n)?;
    Ok(sv.values().iter().map(|v| v * v / n as f64).collect())
}

/// `lambda_{m+1}(G_N)` against `s e eps^{2m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramEigReport {
    pub epsilon: f64,
    pub lambdas: Vec<f64>,
    pub bounds: Vec<f64>,
    pub ok: bool,
}

impl GramEigReport {
    pub fn violations(&self) -> usize {
        self.lambdas.iter().zip(&self.bounds).filter(|(l, b)| **l > **b * (1.0 + 1e-10)).count()
    }
}

pub fn gram_eig_upper_check(nodes: &NodeSet, n: usize) -> Result<GramEigReport> {
    let spec = GramSpec::new(nodes, n)?;
    let eps = spec.epsilon();
    if eps >= 1.0 {
        return Err(Error::OutOfRegime(format!("eps = N h / 2 = {eps} is not below 1")));
    }
    let lambdas = gram_eigenvalues(nodes, n)?;
    let s = nodes.len() as f64;
    let bounds: Vec<f64> = (0..lambdas.len()).map(|m| s * E * eps.powi(2 * m as i32)).collect();
    let mut report = GramEigReport { epsilon: eps, lambdas, bounds, ok: true };
    report.ok = report.violations() == 0;
    Ok(report)
}

/// Restricted minima of the Gram quadratic form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictedMinimum {
    /// Minimum over unit vectors of `Q_m`.
    pub mu: f64,
    /// Value at the unit vector of `M_m`.
    pub rho: f64,
    /// `lambda_{m+1}(G_N)`.
    pub lambda: f64,
    pub epsilon: f64,
}

impl RestrictedMinimum {
    pub fn gap(&self) -> f64 {
        (self.mu - self.rho).abs()
    }
}

pub fn restricted_minimum(nodes: &NodeSet, n: usize, m: usize) -> Result<RestrictedMinimum> {
    let spec = GramSpec::new(nodes, n)?;
    let eps = spec.epsilon();
    if eps >= 1.0 {
        return Err(Error::OutOfRegime(format!("eps = {eps} is not below 1")));
    }
    if m >= nodes.len() {
        return Err(invalid(format!("m = {m} must be below s = {}", nodes.len())));
    }
    let chain = kernel_chain(spec.y())?;
    let centered = build_centered(nodes, n)?;
    let mu = singular_values(&(&centered * chain.q_basis(m)))?.min().powi(2);
    let rho = (&centered * &chain.levels[m].complement).norm_squared();
    let lambda = gram_eigenvalues(nodes, n)?[m];
    Ok(RestrictedMinimum { mu, rho, lambda, epsilon: eps })
}

/// Normalized singular values of a single cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub sigma: Vec<f64>,
    /// `sigma_j / (sqrt(N) (N h)^{j-1})`.
    pub ratios: Vec<f64>,
    /// `sqrt(s e N') (N' h / 2)^{j-1}` with `N'` the next even bandwidth.
    pub upper: Vec<f64>,
    /// `None` when `N' h / 2 >= 1` and the upper bound is not available.
    pub upper_ok: Option<bool>,
    pub in_regime: bool,
}

pub fn single_cluster_scaling(nodes: &NodeSet, n: usize) -> Result<ScalingReport> {
    let s = nodes.len();
    if n < s {
        return Err(invalid(format!("scaling needs N >= s, got N = {n}, s = {s}")));
    }
    let block = as_single_block(nodes)?;
    let h = block.require_blocks()?[0].diameter();
    let sigma = graded_singular_values(&block, n)?.into_vec();
    let nf = n as f64;
    let nh = nf * h;
    let ratios = sigma.iter().enumerate().map(|(j, v)| v / (nf.sqrt() * nh.powi(j as i32))).collect();
    // odd N: sigma_j(V_N) <= sigma_j(V_{N+1}), which has a centered form
    let even = if n.is_multiple_of(2) { nf } else { nf + 1.0 };
    let eps = even * h / 2.0;
    let upper: Vec<f64> = (0..s).map(|j| (s as f64 * E * even).sqrt() * eps.powi(j as i32)).collect();
    let upper_ok = (eps < 1.0).then(|| sigma.iter().zip(&upper).all(|(v, u)| *v <= u * (1.0 + 1e-10)));
    Ok(ScalingReport { sigma, ratios, upper, upper_ok, in_regime: nh <= SCALING_REGIME_CAP })
}

/// `l_j = #{k : s^(k) >= j}`.
pub fn expected_census(multiplicities: &[usize]) -> Vec<usize> {
    let top = multiplicities.iter().copied().max().unwrap_or(0);
    (1..=top).map(|j| multiplicities.iter().filter(|&&s| s >= j).count()).collect()
}

/// Observed scale classes of the singular values across a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct CensusReport {
    pub expected: Vec<usize>,
    pub observed: Vec<usize>,
    /// Log-log slope of the `i`-th largest singular value against `N h`.
    pub slopes: Vec<f64>,
    /// Scale class `j` (1-based) assigned to each index.
    pub bins: Vec<usize>,
}

impl CensusReport {
    pub fn matches(&self) -> bool {
        self.expected == self.observed
    }
}

/// Classifies the singular values of a multi-cluster sweep into scale
/// classes: index `i` lands in class `j` when its slope against `N h` is
/// within 1/2 of `j - 1`.
///
/// `samples` holds `(N h, sigma values)` pairs; the clusters of `config`
/// must share one size `h`.
pub fn multiplicity_census(config: &ClusterConfig, samples: &[(f64, Vec<f64>)]) -> Result<CensusReport> {
    let first = config.clusters.first().ok_or_else(|| invalid("configuration has no clusters"))?;
    if config.clusters.iter().any(|c| c.h != first.h) {
        return Err(invalid("census requires equal cluster sizes h"));
    }
    let mult: Vec<usize> = config.clusters.iter().map(|c| c.s).collect();
    let s: usize = mult.iter().sum();
    if samples.iter().any(|(_, v)| v.len() != s) {
        return Err(invalid("every sample needs one value per node"));
    }
    let expected = expected_census(&mult);
    let x: Vec<f64> = samples.iter().map(|(nh, _)| *nh).collect();
    let mut slopes = Vec::with_capacity(s);
    let mut bins = Vec::with_capacity(s);
    for i in 0..s {
        let y: Vec<f64> = samples.iter().map(|(_, v)| v[i]).collect();
        let slope = fit_loglog(&x, &y)?.slope;
        slopes.push(slope);
        bins.push((slope.round().max(0.0) as usize) + 1);
    }
    let classes = bins.iter().copied().max().unwrap_or(0).max(expected.len());
    let mut observed = vec![0; classes];
    for b in &bins {
        observed[b - 1] += 1;
    }
    while observed.len() > expected.len() && observed.last() == Some(&0) {
        observed.pop();
    }
    Ok(CensusReport { expected, observed, slopes, bins })
}
