//! Divided differences, the divided-difference basis `W` of a cluster, the
//! confluent limit basis `U`, and normalized Hilbert matrices.
//!
//! Columns of `W` are evaluated row by row in scaled coordinates
//! `u = k (x - a)`: when every `|u|` is small, the divided difference of
//! `e^{iu}` is summed from its power series through complete homogeneous
//! symmetric polynomials, which stays exact as the nodes coalesce. Larger
//! arguments fall back to the Newton recursion.

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::linalg::{
    hermitian_eigs, jacobi_singular_values, singular_values, ComplexMatrix, Spectrum,
};
use crate::nodes::{reduce_angle, wrap_distance, NodeSet};
use crate::vandermonde::{build_vandermonde, check_bandwidth};

/// Minimum spacing accepted by [`divided_difference`].
pub const MIN_SPACING: f64 = 1e-12;

const SERIES_RADIUS: f64 = 2.0;
const SERIES_EXTRA_TERMS: usize = 36;

/// Triangular table of divided differences over ascending points.
#[derive(Debug, Clone, PartialEq)]
pub struct DividedDifferenceTable {
    points: Vec<f64>,
    // levels[d][i] = [t_i, ..., t_{i+d}] f
    levels: Vec<Vec<Complex64>>,
}

impl DividedDifferenceTable {
    /// Sorts the points ascending and runs the Newton recursion.
    pub fn new(points: &[f64], f: impl Fn(f64) -> Complex64) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("divided difference needs at least one point"));
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(invalid("divided difference points must be finite"));
        }
        let mut points = points.to_vec();
        points.sort_by(f64::total_cmp);
        if let Some(w) = points.windows(2).find(|w| w[1] - w[0] < MIN_SPACING) {
            return Err(invalid(format!(
                "points {} and {} are closer than {MIN_SPACING:e}",
                w[0], w[1]
            )));
        }
        let values: Vec<Complex64> = points.iter().map(|&t| f(t)).collect();
        let levels = newton_levels(&points, values);
        Ok(DividedDifferenceTable { points, levels })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// `[t_i, ..., t_j] f` for `i <= j` (indices into the sorted points).
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.levels[j - i][i]
    }

    /// Newton coefficients `[t_1] f, [t_1, t_2] f, ...`.
    pub fn newton_coefficients(&self) -> Vec<Complex64> {
        self.levels.iter().map(|l| l[0]).collect()
    }

    /// `[t_1, ..., t_n] f`.
    pub fn top(&self) -> Complex64 {
        self.levels[self.levels.len() - 1][0]
    }
}

fn newton_levels(points: &[f64], values: Vec<Complex64>) -> Vec<Vec<Complex64>> {
    let n = points.len();
    let mut levels = vec![values];
    for d in 1..n {
        let prev = &levels[d - 1];
        let next = (0..n - d)
            .map(|i| (prev[i + 1] - prev[i]) / (points[i + d] - points[i]))
            .collect();
        levels.push(next);
    }
    levels
}

/// `[t_1, ..., t_n] f` for pairwise distinct points.
pub fn divided_difference(points: &[f64], f: impl Fn(f64) -> Complex64) -> Result<Complex64> {
    Ok(DividedDifferenceTable::new(points, f)?.top())
}

/// `[u_1..u_j] e^{iu}` for `j = 1..=u.len()`, in the given point order.
fn exp_divided_differences(u: &[f64]) -> Vec<Complex64> {
    let s = u.len();
    let radius = u.iter().fold(0.0f64, |r, x| r.max(x.abs()));
    if radius > SERIES_RADIUS {
        let levels = newton_levels(u, u.iter().map(|&x| Complex64::cis(x)).collect());
        return levels.iter().map(|l| l[0]).collect();
    }
    let terms = s + SERIES_EXTRA_TERMS;
    // i^p / p!
    let mut coeff = Vec::with_capacity(terms);
    let mut c = Complex64::new(1.0, 0.0);
    for p in 0..terms {
        coeff.push(c);
        c *= Complex64::new(0.0, 1.0 / (p + 1) as f64);
    }
    // h[r] holds h_r(u_1..u_j), updated in place as j grows
    let mut h = vec![0.0; terms];
    h[0] = 1.0;
    let mut out = Vec::with_capacity(s);
    for (j, &uj) in u.iter().enumerate() {
        for r in 1..terms {
            h[r] += uj * h[r - 1];
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for p in (j..terms).rev() {
            acc += coeff[p] * h[p - j];
        }
        out.push(acc);
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

/// Divided-difference basis in coordinates relative to an anchor `a`: the
/// row-`k` phase `e^{ika}` is omitted.
fn dd_basis_relative(offsets: &[f64], n: usize) -> ComplexMatrix {
    let s = offsets.len();
    let facts: Vec<f64> = (0..s).map(factorial).collect();
    let mut w = ComplexMatrix::zeros(n + 1, s);
    let mut u = vec![0.0; s];
    for k in 0..=n {
        let kf = k as f64;
        for (ui, o) in u.iter_mut().zip(offsets) {
            *ui = kf * o;
        }
        let dd = exp_divided_differences(&u);
        let mut kp = 1.0;
        for j in 0..s {
            w[(k, j)] = dd[j] * (facts[j] * kp);
            kp *= kf;
        }
    }
    w
}

fn with_row_phase(mut m: ComplexMatrix, anchor: f64) -> ComplexMatrix {
    for k in 0..m.nrows() {
        let ph = Complex64::cis(k as f64 * anchor);
        for j in 0..m.ncols() {
            m[(k, j)] *= ph;
        }
    }
    m
}

/// Divided-difference basis `w_j = (j-1)! [x_1..x_j] v_N` of a single
/// cluster, columns in node order.
pub fn dd_basis(nodes: &NodeSet, n: usize) -> Result<ComplexMatrix> {
    check_bandwidth(nodes, n)?;
    let (anchor, offsets) = nodes.single_cluster()?;
    Ok(with_row_phase(dd_basis_relative(&offsets, n), anchor))
}

/// Columns scaled to unit norm, together with the original norms.
pub fn normalize_columns(m: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>) {
    let norms: Vec<f64> = m.column_iter().map(|c| c.norm()).collect();
    let mut out = m.clone();
    for (j, &nj) in norms.iter().enumerate() {
        if nj > 0.0 {
            out.column_mut(j).unscale_mut(nj);
        }
    }
    (out, norms)
}

/// Limit basis: entries `(ik)^{j-1} e^{ik zeta}`, `k = 0..N`, `j = 1..s`.
pub fn limit_basis(zeta: f64, n: usize, s: usize) -> Result<ComplexMatrix> {
    if s == 0 || n + 1 < s {
        return Err(invalid(format!("limit basis needs 1 <= s <= N + 1, got s = {s}, N = {n}")));
    }
    Ok(ComplexMatrix::from_fn(n + 1, s, |k, j| {
        let ik = Complex64::new(0.0, k as f64);
        // 0^0 = 1
        let pow = if j == 0 { Complex64::new(1.0, 0.0) } else { ik.powu(j as u32) };
        pow * Complex64::cis(k as f64 * zeta)
    }))
}

/// `W`, `U` and their column-normalized variants for one cluster.
#[derive(Debug, Clone)]
pub struct BasisMatrices {
    pub w: ComplexMatrix,
    pub u: ComplexMatrix,
    pub w_normalized: ComplexMatrix,
    pub u_normalized: ComplexMatrix,
}

/// Both bases of a single cluster; the limit anchor defaults to `x_1`.
pub fn basis_matrices(nodes: &NodeSet, n: usize, zeta: Option<f64>) -> Result<BasisMatrices> {
    let w = dd_basis(nodes, n)?;
    let u = limit_basis(zeta.unwrap_or(nodes.angles()[0]), n, nodes.len())?;
    let (w_normalized, _) = normalize_columns(&w);
    let (u_normalized, _) = normalize_columns(&u);
    Ok(BasisMatrices { w, u, w_normalized, u_normalized })
}

/// Per-column norm bounds of the limit basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnNormReport {
    pub norms: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub ok: bool,
}

impl ColumnNormReport {
    /// `min_j (norm_j - lower_j)/norm_j` and the analogous upper margin.
    pub fn margins(&self) -> (f64, f64) {
        let lo = self.norms.iter().zip(&self.lower).map(|(v, l)| (v - l) / v).fold(f64::INFINITY, f64::min);
        let hi = self.norms.iter().zip(&self.upper).map(|(v, u)| (u - v) / v).fold(f64::INFINITY, f64::min);
        (lo, hi)
    }
}

/// Checks `N^{j-1/2} / sqrt(2s-1) <= ||u_j|| <= N^{j-1/2}` for `j >= 2`;
/// column 1 has norm `sqrt(N+1)` and is checked against that upper bound.
pub fn column_norm_bounds_check(u: &ComplexMatrix, n: usize, s: usize) -> Result<ColumnNormReport> {
    if u.nrows() != n + 1 || u.ncols() != s || n == 0 {
        return Err(invalid("limit basis shape does not match (N, s)"));
    }
    let nf = n as f64;
    let c = 1.0 / ((2 * s - 1) as f64).sqrt();
    let norms: Vec<f64> = u.column_iter().map(|col| col.norm()).collect();
    let scale: Vec<f64> = (1..=s).map(|j| nf.powf(j as f64 - 0.5)).collect();
    let lower: Vec<f64> = scale.iter().map(|v| c * v).collect();
    let upper: Vec<f64> = scale
        .iter()
        .enumerate()
        .map(|(j, v)| if j == 0 { (nf + 1.0).sqrt() } else { *v })
        .collect();
    let tol = 1e-12;
    let ok = norms
        .iter()
        .zip(lower.iter().zip(&upper))
        .all(|(v, (l, h))| *v >= l * (1.0 - tol) && *v <= h * (1.0 + tol));
    Ok(ColumnNormReport { norms, lower, upper, ok })
}

/// Distances `||u~_j - w~_j||` against `2 sqrt(2) N h`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub deviations: Vec<f64>,
    pub bound: f64,
    pub ok: bool,
}

impl DeviationReport {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().copied().fold(0.0, f64::max)
    }
}

/// Compares the normalized divided-difference and limit bases of a single
/// cluster of diameter `h`. The limit anchor defaults to `x_1`.
pub fn basis_deviation_check(nodes: &NodeSet, n: usize, zeta: Option<f64>) -> Result<DeviationReport> {
    check_bandwidth(nodes, n)?;
    let (anchor, offsets) = nodes.single_cluster()?;
    let lo = offsets.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = offsets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let h = hi - lo;
    let zeta_rel = match zeta {
        Some(z) => reduce_angle(z - anchor),
        None => offsets[0],
    };
    let (w, _) = normalize_columns(&dd_basis_relative(&offsets, n));
    let (u, _) = normalize_columns(&limit_basis(zeta_rel, n, offsets.len())?);
    let deviations: Vec<f64> = (0..offsets.len()).map(|j| (u.column(j) - w.column(j)).norm()).collect();
    let bound = 2.0 * 2f64.sqrt() * n as f64 * h;
    let ok = deviations.iter().all(|d| *d <= bound * (1.0 + 1e-10) + 1e-14);
    Ok(DeviationReport { deviations, bound, ok })
}

/// Normalized Hilbert matrix, entries `sqrt(2j-1) sqrt(2l-1) / (j+l-1)`.
pub fn hilbert_normalized(s: usize) -> Result<ComplexMatrix> {
    if s == 0 {
        return Err(invalid("hilbert_normalized needs s >= 1"));
    }
    Ok(crate::linalg::from_real(s, s, |a, b| {
        let (j, l) = ((a + 1) as f64, (b + 1) as f64);
        (2.0 * j - 1.0).sqrt() * (2.0 * l - 1.0).sqrt() / (j + l - 1.0)
    }))
}

/// Smallest eigenvalue of the normalized Hilbert matrix of order `s`.
pub fn hilbert_lambda_min(s: usize) -> Result<f64> {
    Ok(hermitian_eigs(&hilbert_normalized(s)?)?[0])
}

/// Conditioning of the normalized limit basis.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitConditioning {
    pub sigma_min: f64,
    /// `sqrt(lambda_min / 2)`.
    pub threshold: f64,
    /// `sqrt(lambda_min)`.
    pub limit: f64,
    pub gap: f64,
    pub above_threshold: bool,
}

pub fn limit_conditioning_check(zeta: f64, n: usize, s: usize) -> Result<LimitConditioning> {
    let (u, _) = normalize_columns(&limit_basis(zeta, n, s)?);
    let sigma_min = singular_values(&u)?.min();
    let lambda = hilbert_lambda_min(s)?;
    let limit = lambda.max(0.0).sqrt();
    let threshold = (0.5 * lambda.max(0.0)).sqrt();
    Ok(LimitConditioning {
        sigma_min,
        threshold,
        limit,
        gap: (sigma_min - limit).abs(),
        above_threshold: sigma_min >= threshold,
    })
}

/// Largest inner product between normalized limit vectors at two anchors.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerProductReport {
    pub max_abs: f64,
    pub bound: f64,
    pub ok: bool,
}

/// Checks `|<z1, z2>| <= pi sqrt((2 s1 - 1)(2 s2 - 1)) / (dist(zeta1, zeta2) N)`
/// over all pairs of normalized limit vectors.
pub fn limit_inner_product_check(
    zeta1: f64,
    s1: usize,
    zeta2: f64,
    s2: usize,
    n: usize,
) -> Result<InnerProductReport> {
    let dist = wrap_distance(zeta1, zeta2)?;
    if dist == 0.0 {
        return Err(invalid("anchors coincide"));
    }
    if n == 0 {
        return Err(invalid("inner product bound needs N >= 1"));
    }
    let (a, _) = normalize_columns(&limit_basis(zeta1, n, s1)?);
    let (b, _) = normalize_columns(&limit_basis(zeta2, n, s2)?);
    let max_abs = (a.adjoint() * b).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let bound = std::f64::consts::PI * (((2 * s1 - 1) * (2 * s2 - 1)) as f64).sqrt() / (dist * n as f64);
    Ok(InnerProductReport { max_abs, bound, ok: max_abs <= bound * (1.0 + 1e-10) })
}

/// Normalized divided-difference bases of every cluster, in absolute
/// coordinates, each spanning the cluster's column space of `V_N`.
pub fn cluster_bases(nodes: &NodeSet, n: usize) -> Result<Vec<ComplexMatrix>> {
    check_bandwidth(nodes, n)?;
    nodes
        .require_blocks()?
        .iter()
        .map(|b| {
            let w = with_row_phase(dd_basis_relative(b.offsets(), n), b.anchor());
            Ok(normalize_columns(&w).0)
        })
        .collect()
}

/// Singular values of `V_N` with small relative error even when
/// clusters are far below the double-precision resolution of the full
/// matrix.
///
/// Each cluster block is factored as `V_b = W~_b diag(norms) T_b` with the
/// Newton change of basis `T_b`. The whole matrix becomes `X D Y` with `X`
/// and `Y` well conditioned and `D` diagonal; a QR of `X D` taken in
/// decreasing order of `D` followed by one-sided Jacobi on the small
/// factor recovers all singular values to relative accuracy. Without a
/// partition the plain SVD is used.
pub fn graded_singular_values(nodes: &NodeSet, n: usize) -> Result<Spectrum> {
    let Some(blocks) = nodes.blocks() else {
        return singular_values(&build_vandermonde(nodes, n)?);
    };
    check_bandwidth(nodes, n)?;
    let s = nodes.len();
    let mut x_cols: Vec<ComplexMatrix> = Vec::with_capacity(blocks.len());
    let mut d = Vec::with_capacity(s);
    let mut y = ComplexMatrix::zeros(s, s);
    let mut start = 0;
    for b in blocks {
        let offs = b.offsets();
        let sb = offs.len();
        let diam = b.diameter();
        let hb = if diam > 0.0 { diam } else { 1.0 };
        let w = with_row_phase(dd_basis_relative(offs, n), b.anchor());
        let (wn, norms) = normalize_columns(&w);
        x_cols.push(wn);
        for i in 0..sb {
            d.push(norms[i] * hb.powi(i as i32));
            // Newton transform row i, rescaled by h^{-i}
            for j in i..sb {
                let prod: f64 = (0..i).map(|l| (offs[j] - offs[l]) / hb).product();
                y[(start + i, start + j)] = Complex64::new(prod / factorial(i), 0.0);
            }
        }
        start += sb;
    }
    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]));
    let mut xd = ComplexMatrix::zeros(n + 1, s);
    let mut col = 0;
    let mut flat = Vec::with_capacity(s);
    for block in &x_cols {
        for j in 0..block.ncols() {
            flat.push(block.column(j).into_owned());
            col += 1;
        }
    }
    debug_assert_eq!(col, s);
    for (c, &orig) in order.iter().enumerate() {
        xd.set_column(c, &(flat[orig].clone() * Complex64::new(d[orig], 0.0)));
    }
    // X D is graded by construction; no rank threshold applies here
    let r = nalgebra::QR::new(xd).r();
    let y_perm = ComplexMatrix::from_fn(s, s, |i, j| y[(order[i], j)]);
    let small = r * y_perm;
    jacobi_singular_values(&small.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nodes::{generate_cluster, Layout};
    use std::f64::consts::PI;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn divided_difference_examples() {
        assert_eq!(divided_difference(&[0.3], |t| c(t * t)).unwrap(), c(0.09));
        assert!((divided_difference(&[0.0, 1.0], |t| c(t * t)).unwrap() - c(1.0)).norm() < 1e-15);
        assert!((divided_difference(&[0.0, 1.0, 2.0], |t| c(t * t)).unwrap() - c(1.0)).norm() < 1e-15);
        assert!(divided_difference(&[0.0, 0.0], c).is_err());
        assert!(divided_difference(&[0.0, 1e-13], c).is_err());
        assert!(divided_difference(&[], c).is_err());
    }

    #[test]
    fn table_cells_follow_recursion() {
        let pts = [0.4, -0.2, 1.1, 0.9];
        let t = DividedDifferenceTable::new(&pts, |x| Complex64::cis(3.0 * x)).unwrap();
        let p = t.points().to_vec();
        assert!(p.windows(2).all(|w| w[0] < w[1]));
        for d in 1..4 {
            for i in 0..4 - d {
                let rec = (t.get(i + 1, i + d) - t.get(i, i + d - 1)) / (p[i + d] - p[i]);
                assert!((t.get(i, i + d) - rec).norm() < 1e-14);
            }
        }
        assert_eq!(t.newton_coefficients().len(), 4);
    }

    #[test]
    fn series_matches_recursion() {
        let u = [-0.7, 0.1, 0.5, 1.3];
        let series = exp_divided_differences(&u);
        let rec = newton_levels(&u, u.iter().map(|&x| Complex64::cis(x)).collect());
        for j in 0..4 {
            assert!((series[j] - rec[j][0]).norm() < 1e-13, "j = {j}");
        }
        let far = exp_divided_differences(&[-3.0, 0.0, 2.5]);
        let rec = newton_levels(&[-3.0, 0.0, 2.5], [-3.0f64, 0.0, 2.5].iter().map(|&x| Complex64::cis(x)).collect());
        assert!((far[2] - rec[2][0]).norm() < 1e-15);
    }

    #[test]
    fn series_handles_coincident_limit() {
        // all points equal: [u..u] e^{iu} = i^{j-1} e^{iu} / (j-1)!
        let u0 = 0.3;
        let dd = exp_divided_differences(&[u0; 5]);
        for (j, v) in dd.iter().enumerate() {
            let expected = Complex64::new(0.0, 1.0).powu(j as u32) * Complex64::cis(u0) / factorial(j);
            assert!((v - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn dd_basis_small_columns() {
        let nodes = NodeSet::new(vec![0.2, 0.35]).unwrap();
        let n = 6;
        let w = dd_basis(&nodes, n).unwrap();
        let v = build_vandermonde(&nodes, n).unwrap();
        assert!((w.column(0) - v.column(0)).norm() < 1e-14);
        let w2 = (v.column(1) - v.column(0)) / c(0.15);
        for k in 0..=n {
            assert!((w[(k, 1)] - w2[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn limit_basis_entries_and_norms() {
        let u = limit_basis(0.0, 3, 2).unwrap();
        assert!((u[(3, 1)] - Complex64::new(0.0, 3.0)).norm() < 1e-15);
        assert!((u.column(0).norm() - 2.0).abs() < 1e-15);
        assert!((u.column(1).norm() - 14f64.sqrt()).abs() < 1e-14);
        assert!(limit_basis(0.0, 1, 3).is_err());
    }

    #[test]
    fn column_norm_example() {
        let u = limit_basis(0.4, 3, 2).unwrap();
        let r = column_norm_bounds_check(&u, 3, 2).unwrap();
        assert!((r.lower[1] - 3.0).abs() < 1e-12);
        assert!((r.upper[1] - 27f64.sqrt()).abs() < 1e-12);
        assert!((r.upper[0] - 2.0).abs() < 1e-15);
        assert!(r.ok);
        // ratio of ||u_j|| to N^{j-1/2} approaches 1/sqrt(2j-1)
        let n = 20000;
        let u = limit_basis(0.0, n, 4).unwrap();
        let r = column_norm_bounds_check(&u, n, 4).unwrap();
        for j in 1..4 {
            let ratio = r.norms[j] / (n as f64).powf(j as f64 + 0.5);
            assert!((ratio - 1.0 / ((2 * j + 1) as f64).sqrt()).abs() < 1e-3);
        }
    }

    #[test]
    fn deviation_first_column_vanishes() {
        let nodes = generate_cluster(1.0, 1e-3, 4, Layout::Equispaced, 0).unwrap();
        let r = basis_deviation_check(&nodes, 50, None).unwrap();
        assert!(r.deviations[0] < 1e-14);
        assert!(r.ok);
        let tighter = basis_deviation_check(&generate_cluster(1.0, 1e-6, 4, Layout::Equispaced, 0).unwrap(), 50, None)
            .unwrap();
        assert!(tighter.max_deviation() < r.max_deviation() * 1e-2);
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert_normalized(1).unwrap()[(0, 0)], c(1.0));
        let h2 = hilbert_normalized(2).unwrap();
        assert!((h2[(0, 1)].re - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((hilbert_lambda_min(2).unwrap() - (1.0 - 3f64.sqrt() / 2.0)).abs() < 1e-14);
        let mut prev = hilbert_lambda_min(1).unwrap();
        for s in 2..=9 {
            let l = hilbert_lambda_min(s).unwrap();
            assert!(l <= prev);
            prev = l;
        }
        assert!(hilbert_lambda_min(8).unwrap() > 1e-12);
    }

    #[test]
    fn limit_conditioning_examples() {
        let one = limit_conditioning_check(0.3, 10, 1).unwrap();
        assert!((one.sigma_min - 1.0).abs() < 1e-14);
        let a = limit_conditioning_check(0.0, 10_000, 2).unwrap();
        assert!((a.sigma_min - 0.1339746f64.sqrt()).abs() < 1e-3);
        assert!(a.above_threshold);
        let b = limit_conditioning_check(2.1, 10_000, 2).unwrap();
        assert!((a.sigma_min - b.sigma_min).abs() < 1e-12);
    }

    #[test]
    fn inner_product_examples() {
        let r = limit_inner_product_check(0.0, 1, PI, 1, 1).unwrap();
        assert!(r.max_abs < 1e-15);
        assert!((r.bound - 1.0).abs() < 1e-15);
        let r = limit_inner_product_check(0.0, 3, PI, 2, 40).unwrap();
        assert!((r.bound - 15f64.sqrt() / 40.0).abs() < 1e-15);
        assert!(r.ok);
        assert!(limit_inner_product_check(0.5, 2, 0.5, 2, 10).is_err());
    }

    #[test]
    fn graded_route_matches_plain_svd() {
        for (h, s) in [(0.02, 3), (0.05, 4), (0.001, 2)] {
            let nodes = generate_cluster(0.9, h, s, Layout::Equispaced, 0).unwrap();
            let n = 60;
            let plain = singular_values(&build_vandermonde(&nodes, n).unwrap()).unwrap();
            let graded = graded_singular_values(&nodes, n).unwrap();
            for (a, b) in plain.values().iter().zip(graded.values()) {
                assert!(((a - b) / a).abs() < 1e-7, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn graded_route_scales_as_h_shrinks() {
        // sigma_j / h^{j-1} converges as h -> 0 at fixed N
        let n = 100;
        let ratios = |h: f64| {
            let nodes = generate_cluster(0.4, h, 4, Layout::Equispaced, 0).unwrap();
            let sv = graded_singular_values(&nodes, n).unwrap();
            sv.values().iter().enumerate().map(|(j, s)| s / h.powi(j as i32)).collect::<Vec<_>>()
        };
        let a = ratios(1e-9);
        let b = ratios(1e-13);
        for j in 0..4 {
            assert!(((a[j] - b[j]) / b[j]).abs() < 1e-5, "j = {j}: {} vs {}", a[j], b[j]);
        }
    }
}
