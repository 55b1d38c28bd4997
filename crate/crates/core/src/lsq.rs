//! Componentwise conditioning of least-squares fits with clustered nodes.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::linalg::{lstsq_solve, pseudoinverse, singular_values, ComplexMatrix, ComplexVector};
use crate::nodes::{measure_stats, NodeSet};
use crate::vandermonde::build_vandermonde;

/// Largest condition number for which double-precision results are
/// considered meaningful.
pub const KAPPA_CAP: f64 = 1e12;

/// Row `l1` norms of `V_N^+` with the per-cluster predicted scales.
#[derive(Debug, Clone, PartialEq)]
pub struct RowNormReport {
    pub norms: Vec<f64>,
    /// `(1 / (N h^(j)))^{s^(j) - 1}` for the cluster `j` of each row.
    pub predicted: Vec<f64>,
    pub cluster: Vec<usize>,
}

/// Sum of moduli along each row.
pub fn row_l1_norms(a: &ComplexMatrix) -> Vec<f64> {
    a.row_iter().map(|r| r.iter().map(|z| z.norm()).sum()).collect()
}

fn cluster_shapes(nodes: &NodeSet, n: usize) -> Result<(Vec<usize>, Vec<f64>)> {
    let labels = nodes.cluster_labels();
    let mult = nodes.multiplicities();
    let h = match nodes.blocks() {
        Some(_) => measure_stats(nodes)?.h,
        None => vec![nodes.diameter()],
    };
    let scale: Vec<f64> = labels
        .iter()
        .map(|&j| {
            if mult[j] <= 1 {
                1.0
            } else {
                (1.0 / (n as f64 * h[j])).powi(mult[j] as i32 - 1)
            }
        })
        .collect();
    Ok((labels, scale))
}

pub fn pinv_row_l1(nodes: &NodeSet, n: usize) -> Result<RowNormReport> {
    if n < nodes.len() {
        return Err(invalid(format!("row norms need N >= s, got N = {n}")));
    }
    let pinv = pseudoinverse(&build_vandermonde(nodes, n)?)?;
    let (cluster, predicted) = cluster_shapes(nodes, n)?;
    Ok(RowNormReport { norms: row_l1_norms(&pinv), predicted, cluster })
}

/// Per-row check of `||B C||_{k,1} <= sqrt(p n) ||B||_{k,max} ||C||_F`.
#[derive(Debug, Clone, PartialEq)]
pub struct RowProductReport {
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl RowProductReport {
    pub fn violations(&self) -> usize {
        self.lhs.iter().zip(&self.rhs).filter(|(l, r)| **l > **r * (1.0 + 1e-10)).count()
    }

    pub fn ok(&self) -> bool {
        self.violations() == 0
    }

    /// Largest ratio `lhs / rhs`.
    pub fn tightness(&self) -> f64 {
        self.lhs.iter().zip(&self.rhs).map(|(l, r)| l / r).fold(0.0, f64::max)
    }
}

pub fn row_norm_product_bound_check(b: &ComplexMatrix, c: &ComplexMatrix) -> Result<RowProductReport> {
    if b.ncols() != c.nrows() {
        return Err(invalid("row_norm_product_bound_check: non-conformable factors"));
    }
    let (p, n) = (c.nrows() as f64, c.ncols() as f64);
    let c_fro = crate::linalg::frobenius_norm(c);
    let lhs = row_l1_norms(&(b * c));
    let rhs = b
        .row_iter()
        .map(|r| (p * n).sqrt() * r.iter().map(|z| z.norm()).fold(0.0, f64::max) * c_fro)
        .collect();
    Ok(RowProductReport { lhs, rhs })
}

/// Least-squares coefficients with the bound shape attached per component.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentwiseSolution {
    pub a: ComplexVector,
    /// `s (1 / (N h^(j)))^{s^(j) - 1}` for the cluster of each component.
    pub bound_shape: Vec<f64>,
    pub cluster: Vec<usize>,
}

pub fn componentwise_solve(nodes: &NodeSet, n: usize, b: &ComplexVector) -> Result<ComponentwiseSolution> {
    let a = lstsq_solve(&build_vandermonde(nodes, n)?, b)?;
    let (cluster, scale) = cluster_shapes(nodes, n)?;
    let s = nodes.len() as f64;
    Ok(ComponentwiseSolution { a, bound_shape: scale.iter().map(|v| s * v).collect(), cluster })
}

/// Outcome of one perturbation experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationResult {
    /// `|(a - a_0)_l|`.
    pub abs_error: Vec<f64>,
    /// `|(a - a_0)_l| / ||b - b_0||_inf`; `None` when the perturbation is 0.
    pub delta_a: Option<Vec<f64>>,
    pub row_l1: Vec<f64>,
    pub noise_inf: f64,
    pub kappa: f64,
    pub in_regime: bool,
    pub cluster: Vec<usize>,
}

impl PerturbationResult {
    /// Number of components where `|(a - a_0)_l| > ||V^+||_{l,1} ||b - b_0||_inf`.
    pub fn holder_violations(&self) -> usize {
        self.abs_error
            .iter()
            .zip(&self.row_l1)
            .filter(|(e, r)| **e > **r * self.noise_inf * (1.0 + 1e-10))
            .count()
    }
}

/// Draws `a_0` and `f` uniformly from `[0, 1]` (imaginary parts too when
/// `complex_noise`), solves with `b = V a_0 + eps f`, and reports the
/// componentwise error amplification.
///
/// The error `a - a_0` is obtained by solving against `b - b_0` directly;
/// by linearity this equals the difference of the two solutions without
/// the cancellation of subtracting them.
pub fn perturbation_experiment(
    nodes: &NodeSet,
    n: usize,
    eps: f64,
    seed: u64,
    complex_noise: bool,
) -> Result<PerturbationResult> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(invalid("noise level must be finite and nonnegative"));
    }
    let v = build_vandermonde(nodes, n)?;
    let s = nodes.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let re = rng.random::<f64>();
        let im = if complex_noise { rng.random::<f64>() } else { 0.0 };
        Complex64::new(re, im)
    };
    let a0 = ComplexVector::from_fn(s, |_, _| draw(&mut rng));
    let f = ComplexVector::from_fn(n + 1, |_, _| draw(&mut rng));
    let b0 = &v * &a0;
    let b = &b0 + &f * Complex64::new(eps, 0.0);
    let db = &b - &b0;
    let noise_inf = db.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let da = lstsq_solve(&v, &db)?;
    let abs_error: Vec<f64> = da.iter().map(|z| z.norm()).collect();
    let delta_a = (noise_inf > 0.0).then(|| abs_error.iter().map(|e| e / noise_inf).collect());
    let kappa = singular_values(&v)?.condition_number();
    let row_l1 = row_l1_norms(&pseudoinverse(&v)?);
    Ok(PerturbationResult {
        abs_error,
        delta_a,
        row_l1,
        noise_inf,
        kappa,
        in_regime: kappa <= KAPPA_CAP,
        cluster: nodes.cluster_labels(),
    })
}
