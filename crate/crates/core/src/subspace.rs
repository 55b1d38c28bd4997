//! Principal angles between cluster subspaces, block QR of a clustered
//! Vandermonde matrix, and the comparison of its spectrum with the pooled
//! per-cluster spectra.

use std::f64::consts::FRAC_PI_2;

use crate::dd_bases::cluster_bases;
use crate::error::{invalid, Result};
use crate::fit::SlopeFit;
use crate::linalg::{singular_values, thin_qr, ComplexMatrix, Spectrum};
use crate::nodes::{measure_stats, NodeSet};
use crate::vandermonde::build_vandermonde;

/// Minimal principal angle between two subspaces and its complement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleReport {
    pub min_angle: f64,
    /// `pi/2 - min_angle`.
    pub beta: f64,
    pub pair: Option<(usize, usize)>,
}

/// Minimal principal angle between `span(a)` and `span(b)`.
///
/// The largest singular value `c` of `Q_a^H Q_b` is clamped to `[0, 1]`;
/// `beta = asin(c)` is formed first so that nearly orthogonal subspaces
/// keep full relative accuracy in `beta`.
pub fn principal_angle_min(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<AngleReport> {
    if a.nrows() != b.nrows() {
        return Err(invalid("principal angle: row counts differ"));
    }
    let (qa, _) = thin_qr(a)?;
    let (qb, _) = thin_qr(b)?;
    let c = singular_values(&(qa.adjoint() * qb))?.max().clamp(0.0, 1.0);
    let beta = c.asin();
    Ok(AngleReport { min_angle: FRAC_PI_2 - beta, beta, pair: None })
}

/// All pairwise cluster angles and their maximum complement `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterAngles {
    pub reports: Vec<AngleReport>,
    pub alpha: f64,
}

/// Angles between the column spaces `L(c^(j), N)` of every pair of
/// clusters `j < k`.
///
/// Each space is represented by its normalized divided-difference basis,
/// which spans the same space as the cluster's Vandermonde columns but
/// stays well conditioned as the cluster shrinks.
pub fn cluster_angle_matrix(nodes: &NodeSet, n: usize) -> Result<ClusterAngles> {
    let bases = cluster_bases(nodes, n)?;
    if bases.len() < 2 {
        return Err(invalid("cluster angles need at least two clusters"));
    }
    let mut reports = Vec::new();
    for j in 0..bases.len() {
        for k in j + 1..bases.len() {
            let mut r = principal_angle_min(&bases[j], &bases[k])?;
            r.pair = Some((j, k));
            reports.push(r);
        }
    }
    let alpha = reports.iter().map(|r| r.beta).fold(0.0, f64::max);
    Ok(ClusterAngles { reports, alpha })
}

/// One angle measurement with the two model regressors `1/(N theta)` and
/// `N h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleSample {
    pub n: usize,
    pub theta: f64,
    pub h: f64,
    pub beta: f64,
}

impl AngleSample {
    pub fn inv_n_theta(&self) -> f64 {
        1.0 / (self.n as f64 * self.theta)
    }

    pub fn nh(&self) -> f64 {
        self.n as f64 * self.h
    }
}

/// Measures `beta` for a two-cluster configuration together with the
/// regressors of the model `a/(N theta) + b N h`.
pub fn angle_bound_check(nodes: &NodeSet, n: usize) -> Result<AngleSample> {
    let blocks = nodes.require_blocks()?;
    if blocks.len() != 2 {
        return Err(invalid("angle_bound_check expects exactly two clusters"));
    }
    let stats = measure_stats(nodes)?;
    let angles = cluster_angle_matrix(nodes, n)?;
    Ok(AngleSample {
        n,
        theta: stats.theta.unwrap_or(0.0),
        h: stats.h.iter().copied().fold(0.0, f64::max),
        beta: angles.alpha,
    })
}

/// Coefficients of `beta ~ a/(N theta) + b N h` fitted by least squares on
/// relative residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleModel {
    pub a: f64,
    pub b: f64,
    /// Root-mean-square relative residual.
    pub rel_rms: f64,
}

pub fn fit_angle_model(samples: &[AngleSample]) -> Result<AngleModel> {
    if samples.len() < 3 {
        return Err(invalid("angle model fit needs at least three samples"));
    }
    if samples.iter().any(|s| s.beta.is_nan() || s.beta <= 0.0) {
        return Err(invalid("angle model fit needs positive beta"));
    }
    // normal equations of min sum ((a x1 + b x2 - beta)/beta)^2
    let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for s in samples {
        let x1 = s.inv_n_theta() / s.beta;
        let x2 = s.nh() / s.beta;
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        r1 += x1;
        r2 += x2;
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() <= 1e-14 * s11 * s22 {
        return Err(invalid("angle model regressors are collinear"));
    }
    let a = (r1 * s22 - r2 * s12) / det;
    let b = (s11 * r2 - s12 * r1) / det;
    let rss: f64 = samples
        .iter()
        .map(|s| ((a * s.inv_n_theta() + b * s.nh() - s.beta) / s.beta).powi(2))
        .sum();
    Ok(AngleModel { a, b, rel_rms: (rss / samples.len() as f64).sqrt() })
}

/// Whether a log-log slope agrees with `target` within `tol`.
pub fn slope_within(fit: &SlopeFit, target: f64, tol: f64) -> bool {
    (fit.slope - target).abs() <= tol
}

/// `V_N = Q diag(R_1, ..., R_M)` with per-cluster thin QR factors.
#[derive(Debug, Clone)]
pub struct BlockQr {
    pub q: ComplexMatrix,
    pub r_blocks: Vec<ComplexMatrix>,
    /// Column order of `q`: node indices, cluster by cluster.
    pub columns: Vec<usize>,
}

impl BlockQr {
    /// `Q diag(R_j)` with columns in cluster order.
    pub fn product(&self) -> ComplexMatrix {
        let s = self.q.ncols();
        let mut r = ComplexMatrix::zeros(s, s);
        let mut at = 0;
        for b in &self.r_blocks {
            let k = b.ncols();
            r.view_mut((at, at), (k, k)).copy_from(b);
            at += k;
        }
        &self.q * r
    }

    /// `V_N` with its columns permuted into cluster order.
    pub fn permuted(v: &ComplexMatrix, columns: &[usize]) -> ComplexMatrix {
        ComplexMatrix::from_fn(v.nrows(), columns.len(), |i, j| v[(i, columns[j])])
    }
}

pub fn block_qr(nodes: &NodeSet, n: usize) -> Result<BlockQr> {
    let v = build_vandermonde(nodes, n)?;
    let blocks = match nodes.blocks() {
        Some(b) => b.iter().map(|b| b.indices().to_vec()).collect(),
        None => vec![(0..nodes.len()).collect::<Vec<_>>()],
    };
    let columns: Vec<usize> = blocks.iter().flatten().copied().collect();
    let mut q = ComplexMatrix::zeros(n + 1, nodes.len());
    let mut r_blocks = Vec::with_capacity(blocks.len());
    let mut at = 0;
    for idx in &blocks {
        let vb = BlockQr::permuted(&v, idx);
        let (qb, rb) = thin_qr(&vb)?;
        q.view_mut((0, at), (n + 1, idx.len())).copy_from(&qb);
        at += idx.len();
        r_blocks.push(rb);
    }
    Ok(BlockQr { q, r_blocks, columns })
}

/// Full spectrum of `V_N` against the pooled per-cluster spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub full: Spectrum,
    pub union: Spectrum,
    pub alpha: f64,
    /// `sigma_j / sigma~_j`.
    pub ratios: Vec<f64>,
    /// `None` when `alpha > 1/s` and the comparison does not apply.
    pub bounds_ok: Option<bool>,
}

impl SpectrumReport {
    /// `(sqrt(1 - s alpha), sqrt(1 + s alpha))`.
    pub fn factors(&self) -> (f64, f64) {
        let sa = self.full.len() as f64 * self.alpha;
        ((1.0 - sa).max(0.0).sqrt(), (1.0 + sa).sqrt())
    }
}

/// Pairs `sigma_j(V_N)` with the pooled `sigma~_j` by rank and checks
/// `sqrt(1 - s alpha) sigma~_j <= sigma_j <= sqrt(1 + s alpha) sigma~_j`
/// with the measured `alpha`.
pub fn union_spectrum_compare(nodes: &NodeSet, n: usize) -> Result<SpectrumReport> {
    let v = build_vandermonde(nodes, n)?;
    let full = singular_values(&v)?;
    let blocks = nodes.require_blocks()?;
    let mut pooled = Vec::with_capacity(nodes.len());
    for b in blocks {
        pooled.extend_from_slice(singular_values(&BlockQr::permuted(&v, b.indices()))?.values());
    }
    let union = Spectrum::new(pooled)?;
    let alpha = if blocks.len() >= 2 { cluster_angle_matrix(nodes, n)?.alpha } else { 0.0 };
    let ratios: Vec<f64> = full.values().iter().zip(union.values()).map(|(a, b)| a / b).collect();
    let s = nodes.len() as f64;
    let bounds_ok = if alpha <= 1.0 / s {
        let lo = (1.0 - s * alpha).sqrt();
        let hi = (1.0 + s * alpha).sqrt();
        let tol = 1e-10;
        Some(ratios.iter().all(|r| *r >= lo * (1.0 - tol) && *r <= hi * (1.0 + tol)))
    } else {
        None
    };
    Ok(SpectrumReport { full, union, alpha, ratios, bounds_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_real, frobenius_norm};
    use crate::nodes::{generate_multi_cluster, ClusterConfig, ClusterSpec};
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn angle_examples() {
        let e1 = from_real(3, 1, |i, _| if i == 0 { 1.0 } else { 0.0 });
        let e2 = from_real(3, 1, |i, _| if i == 1 { 1.0 } else { 0.0 });
        let r = principal_angle_min(&e1, &e2).unwrap();
        assert!((r.min_angle - FRAC_PI_2).abs() < 1e-15);
        assert!(r.beta < 1e-15);
        let r = principal_angle_min(&e1, &e1).unwrap();
        assert!(r.min_angle.abs() < 1e-7);
        let a = from_real(2, 1, |i, _| if i == 0 { 1.0 } else { 0.0 });
        let b = from_real(2, 1, |_, _| 1.0 / 2f64.sqrt());
        let r = principal_angle_min(&a, &b).unwrap();
        assert!((r.min_angle - FRAC_PI_4).abs() < 1e-12);
        assert_eq!(r.min_angle + r.beta, FRAC_PI_2);
    }

    #[test]
    fn antipodal_singletons_are_orthogonal() {
        let nodes = NodeSet::with_partition(vec![0.0, PI], vec![vec![0], vec![1]]).unwrap();
        let angles = cluster_angle_matrix(&nodes, 1).unwrap();
        assert_eq!(angles.reports.len(), 1);
        assert!(angles.alpha < 1e-15);
        let rep = union_spectrum_compare(&nodes, 1).unwrap();
        for (a, b) in rep.full.values().iter().zip(rep.union.values()) {
            assert!((a - 2f64.sqrt()).abs() < 1e-14 && (b - 2f64.sqrt()).abs() < 1e-14);
        }
        assert_eq!(rep.bounds_ok, Some(true));
    }

    fn two_clusters(h: f64, theta: f64) -> NodeSet {
        let cfg = ClusterConfig {
            clusters: vec![ClusterSpec::equispaced(0.0, h, 4), ClusterSpec::equispaced(h + theta, h, 2)],
            theta,
        };
        generate_multi_cluster(&cfg, 0).unwrap()
    }

    #[test]
    fn block_qr_reconstructs() {
        let nodes = two_clusters(0.01, 0.5);
        let n = 80;
        let bq = block_qr(&nodes, n).unwrap();
        let v = BlockQr::permuted(&build_vandermonde(&nodes, n).unwrap(), &bq.columns);
        assert!(frobenius_norm(&(bq.product() - &v)) <= 1e-10 * frobenius_norm(&v));
        let single = NodeSet::new(vec![0.1, 0.2, 0.3]).unwrap();
        assert_eq!(block_qr(&single, 10).unwrap().r_blocks.len(), 1);
    }

    #[test]
    fn union_compare_with_measured_alpha() {
        let nodes = two_clusters(0.0005, 1.0);
        let rep = union_spectrum_compare(&nodes, 100).unwrap();
        assert_eq!(rep.bounds_ok, Some(true));
        let (lo, hi) = rep.factors();
        assert!(lo <= 1.0 && hi >= 1.0);
    }

    #[test]
    fn rotation_invariance() {
        let nodes = two_clusters(0.01, 0.7);
        let shifted = NodeSet::from_local(
            nodes.require_blocks().unwrap().iter().map(|b| (b.anchor() + 0.37, b.offsets().to_vec())).collect(),
        )
        .unwrap();
        let a = cluster_angle_matrix(&nodes, 60).unwrap().alpha;
        let b = cluster_angle_matrix(&shifted, 60).unwrap().alpha;
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn angle_basis_change_invariance() {
        let nodes = two_clusters(0.02, 0.4);
        let v = build_vandermonde(&nodes, 50).unwrap();
        let a = BlockQr::permuted(&v, &[0, 1, 2, 3]);
        let b = BlockQr::permuted(&v, &[4, 5]);
        let base = principal_angle_min(&a, &b).unwrap();
        let mix = ComplexMatrix::from_fn(2, 2, |i, j| Complex64::new(1.0 + (i * 2 + j) as f64, 0.5 * j as f64));
        let r = principal_angle_min(&(b.clone() * mix), &a).unwrap();
        assert!((base.min_angle - r.min_angle).abs() < 1e-9);
    }

    #[test]
    fn angle_model_recovers_coefficients() {
        let samples: Vec<AngleSample> = [(100, 1.0, 1e-5), (1000, 0.1, 1e-6), (500, 0.5, 1e-3), (2000, 1.0, 1e-5)]
            .iter()
            .map(|&(n, theta, h)| {
                let s = AngleSample { n, theta, h, beta: 0.0 };
                AngleSample { beta: 2.0 * s.inv_n_theta() + 0.3 * s.nh(), ..s }
            })
            .collect();
        let m = fit_angle_model(&samples).unwrap();
        assert!((m.a - 2.0).abs() < 1e-9 && (m.b - 0.3).abs() < 1e-9 && m.rel_rms < 1e-9);
    }
}
