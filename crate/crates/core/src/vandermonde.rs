//! Vandermonde matrices on the unit circle, the centered normalization and
//! the Dirichlet-kernel Gram matrix.
//!
//! Entries are evaluated as `e^{ik a} e^{ik d}` from the local coordinates
//! `(a, d)` of each node, so intra-cluster phase differences keep full
//! relative precision at any bandwidth.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::linalg::ComplexMatrix;
use crate::nodes::{reduce_angle, NodeSet};

/// Default truncation order of [`gram_taylor`].
pub const DEFAULT_TAYLOR_ORDER: usize = 30;

/// Requires `n >= s - 1` so that `V_N` has full column rank.
pub fn check_bandwidth(nodes: &NodeSet, n: usize) -> Result<()> {
    if n + 1 < nodes.len() {
        return Err(invalid(format!(
            "bandwidth N = {n} too small for {} nodes",
            nodes.len()
        )));
    }
    Ok(())
}

fn entry(nodes: &NodeSet, k: f64, j: usize) -> Complex64 {
    let (anchor, offset) = nodes.local(j);
    if offset == 0.0 {
        Complex64::cis(k * anchor)
    } else {
        Complex64::cis(k * anchor) * Complex64::cis(k * offset)
    }
}

/// The `(N+1) x s` matrix with entries `e^{i k x_j}`, `k = 0..N`.
pub fn build_vandermonde(nodes: &NodeSet, n: usize) -> Result<ComplexMatrix> {
    check_bandwidth(nodes, n)?;
    Ok(ComplexMatrix::from_fn(n + 1, nodes.len(), |k, j| entry(nodes, k as f64, j)))
}

fn half_bandwidth(n: usize) -> Result<usize> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(invalid(format!("centered matrix needs even N >= 2, got {n}")));
    }
    Ok(n / 2)
}

/// Rows `k = -M..M` of `e^{i k x_j} / sqrt(2M)` for `N = 2M`.
pub fn build_centered(nodes: &NodeSet, n: usize) -> Result<ComplexMatrix> {
    check_bandwidth(nodes, n)?;
    let m = half_bandwidth(n)?;
    let scale = 1.0 / (n as f64).sqrt();
    Ok(ComplexMatrix::from_fn(n + 1, nodes.len(), |r, j| {
        entry(nodes, r as f64 - m as f64, j) * scale
    }))
}

/// Dirichlet kernel `sum_{k=-M}^{M} e^{ikt}`.
pub fn dirichlet_kernel(t: f64, m: usize) -> f64 {
    let t = reduce_angle(t);
    let half = 0.5 * t;
    let denom = half.sin();
    if t == 0.0 || denom == 0.0 {
        return (2 * m + 1) as f64;
    }
    ((m as f64 + 0.5) * t).sin() / denom
}

/// Single-cluster data for the Gram analysis at even `N = 2M`.
#[derive(Debug, Clone)]
pub struct GramSpec {
    nodes: NodeSet,
    m: usize,
    h: f64,
    y: Vec<f64>,
}

impl GramSpec {
    /// Rescales the nodes to `y = (x - c)/h`, with `h` the node diameter and
    /// `c` the midpoint of their hull, so that `y` lies in `[-1/2, 1/2]`.
    pub fn new(nodes: &NodeSet, n: usize) -> Result<Self> {
        check_bandwidth(nodes, n)?;
        let m = half_bandwidth(n)?;
        let (_, offsets) = match nodes.single_cluster() {
            Ok(local) => local,
            Err(_) => NodeSet::new(nodes.angles().to_vec())?.single_cluster()?,
        };
        let lo = offsets.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = offsets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let h = hi - lo;
        let y = if h > 0.0 { offsets.iter().map(|o| o / h).collect() } else { vec![0.0; offsets.len()] };
        Ok(GramSpec { nodes: nodes.clone(), m, h, y })
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn half_bandwidth(&self) -> usize {
        self.m
    }

    pub fn bandwidth(&self) -> usize {
        2 * self.m
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// `eps = M h = N h / 2`.
    pub fn epsilon(&self) -> f64 {
        self.m as f64 * self.h
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }
}

/// `G_N = [D_M(x_i - x_j) / (2M)]`, symmetrized.
pub fn gram_matrix(spec: &GramSpec) -> ComplexMatrix {
    let s = spec.nodes.len();
    let m = spec.m;
    let norm = 1.0 / (2 * m) as f64;
    let mut g = ComplexMatrix::zeros(s, s);
    for i in 0..s {
        for j in 0..=i {
            let v = dirichlet_kernel(spec.nodes.difference(i, j), m) * norm;
            g[(i, j)] = Complex64::new(v, 0.0);
            g[(j, i)] = Complex64::new(v, 0.0);
        }
    }
    g
}

/// `F(M, k) = (1 / (2 M^{2k+1})) sum_{m=-M}^{M} m^{2k}`.
pub fn f_moment(m: usize, k: usize) -> Result<f64> {
    if m == 0 {
        return Err(invalid("f_moment needs M >= 1"));
    }
    let mf = m as f64;
    // scaled terms (i/M)^{2k} avoid overflow for large M and k
    let sum: f64 = (1..=m).map(|i| (i as f64 / mf).powi(2 * k as i32)).sum();
    let zero = if k == 0 { 1.0 } else { 0.0 };
    Ok((2.0 * sum + zero) / (2.0 * mf))
}

/// Truncated Taylor expansion of the normalized kernel,
/// `sum_{k<=K} (-1)^k F(M,k) (eps (y_i - y_j))^{2k} / (2k)!`.
pub fn gram_taylor(spec: &GramSpec, order: usize) -> Result<ComplexMatrix> {
    let eps = spec.epsilon();
    if eps >= 1.0 {
        return Err(Error::OutOfRegime(format!("Taylor expansion needs eps < 1, got {eps}")));
    }
    let coeffs: Vec<f64> = (0..=order)
        .map(|k| {
            let fact: f64 = (1..=2 * k).map(|v| v as f64).product();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            f_moment(spec.m, k).map(|f| sign * f / fact)
        })
        .collect::<Result<_>>()?;
    let s = spec.y.len();
    Ok(ComplexMatrix::from_fn(s, s, |i, j| {
        let t2 = (eps * (spec.y[i] - spec.y[j])).powi(2);
        // Horner in t^2
        let v = coeffs.iter().rev().fold(0.0, |acc, c| acc * t2 + c);
        Complex64::new(v, 0.0)
    }))
}

/// Nodes `2 pi j / (N+1)` for the given indices `j`: a subset of the
/// arguments of the `(N+1)`-th roots of unity.
pub fn roots_of_unity_nodes(n: usize, indices: &[usize]) -> Result<NodeSet> {
    NodeSet::new(indices.iter().map(|&j| 2.0 * PI * j as f64 / (n + 1) as f64).collect())
}
