//! Dense complex linear algebra.
//!
//! Thin wrappers over `nalgebra` decompositions that enforce the contracts
//! the rest of the crate relies on: sorted spectra, explicit rank checks and
//! orthonormal nullspaces of wide matrices.

use nalgebra::{DMatrix, DVector, SymmetricEigen, QR, SVD};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Singular values below `RANK_TOL * sigma_max` count as zero.
pub const RANK_TOL: f64 = 1e-13;

/// Non-increasing list of nonnegative reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    /// Sorts `values` non-increasingly. Negative or non-finite entries are
    /// rejected.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(invalid("spectrum values must be finite and nonnegative"));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Spectrum(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.0.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.0.last().copied().unwrap_or(0.0)
    }

    /// `sigma_max / sigma_min`; infinite for a singular spectrum.
    pub fn condition_number(&self) -> f64 {
        let lo = self.min();
        if lo == 0.0 {
            f64::INFINITY
        } else {
            self.max() / lo
        }
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

fn ensure_finite(a: &ComplexMatrix) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(invalid("matrix has non-finite entries"))
    }
}

/// Builds a complex matrix from real entries.
pub fn from_real(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |i, j| Complex64::new(f(i, j), 0.0))
}

pub fn max_norm(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn frobenius_norm(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Singular values of `a`, non-increasing.
pub fn singular_values(a: &ComplexMatrix) -> Result<Spectrum> {
    if a.is_empty() {
        return Err(invalid("singular_values of an empty matrix"));
    }
    ensure_finite(a)?;
    let svd = SVD::new(a.clone(), false, false);
    Spectrum::new(svd.singular_values.iter().copied().collect())
}

/// Spectral norm, `sigma_max(a)`.
pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(a)?.max())
}

/// Singular values by one-sided (Hestenes) Jacobi rotations.
///
/// Intended for small matrices of the form `B * D` with `B` well
/// conditioned and `D` diagonal: the values come out with small relative
/// error even when `D` spans many orders of magnitude, which the
/// bidiagonalization route does not guarantee.
pub fn jacobi_singular_values(a: &ComplexMatrix) -> Result<Spectrum> {
    if a.is_empty() {
        return Err(invalid("jacobi_singular_values of an empty matrix"));
    }
    ensure_finite(a)?;
    let mut u = if a.nrows() >= a.ncols() { a.clone() } else { a.adjoint() };
    let n = u.ncols();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = u.column(p).norm_squared();
                let beta = u.column(q).norm_squared();
                let gamma = u.column(p).dotc(&u.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Rotation zeroing the (p, q) entry of the 2x2 Gram block.
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..u.nrows() {
                    let up = u[(i, p)];
                    let uq = u[(i, q)];
                    u[(i, p)] = up * c - uq * phase.conj() * s;
                    u[(i, q)] = up * phase * s + uq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    Spectrum::new((0..n).map(|j| u.column(j).norm()).collect())
}

/// Householder thin QR. `a` must be tall with full column rank.
///
/// Rank deficiency is declared when some `|R_jj|` falls below
/// `RANK_TOL * ||a||_F`.
pub fn thin_qr(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if a.is_empty() {
        return Err(invalid("thin_qr of an empty matrix"));
    }
    if a.nrows() < a.ncols() {
        return Err(invalid(format!(
            "thin_qr needs rows >= cols, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    ensure_finite(a)?;
    let scale = frobenius_norm(a);
    let qr = QR::new(a.clone());
    let q = qr.q();
    let r = qr.r();
    for j in 0..r.ncols() {
        if r[(j, j)].norm() < RANK_TOL * scale || scale == 0.0 {
            return Err(Error::RankDeficient(format!(
                "|R[{j},{j}]| = {:.3e} below threshold {:.3e}",
                r[(j, j)].norm(),
                RANK_TOL * scale
            )));
        }
    }
    Ok((q, r))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigs(h: &ComplexMatrix) -> Result<Vec<f64>> {
    if h.nrows() != h.ncols() || h.is_empty() {
        return Err(invalid("hermitian_eigs needs a nonempty square matrix"));
    }
    ensure_finite(h)?;
    let scale = frobenius_norm(h);
    let skew = frobenius_norm(&(h - h.adjoint()));
    if skew > 1e-12 * scale {
        return Err(invalid(format!(
            "matrix is not Hermitian (||H - H^H||_F = {skew:.3e})"
        )));
    }
    let sym = (h + h.adjoint()).scale(0.5);
    let mut eigs: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    eigs.sort_by(f64::total_cmp);
    Ok(eigs)
}

fn upper_triangular_solve(r: &ComplexMatrix, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
    r.solve_upper_triangular(rhs)
        .ok_or_else(|| Error::RankDeficient("singular triangular factor".into()))
}

/// Least-squares solution `argmin ||a x - b||_2` through thin QR.
pub fn lstsq_solve(a: &ComplexMatrix, b: &ComplexVector) -> Result<ComplexVector> {
    if b.len() != a.nrows() {
        return Err(invalid(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            a.nrows()
        )));
    }
    let (q, r) = thin_qr(a)?;
    let qtb = q.adjoint() * b;
    let x = upper_triangular_solve(&r, &ComplexMatrix::from_column_slice(qtb.len(), 1, qtb.as_slice()))?;
    Ok(x.column(0).into_owned())
}

/// Moore-Penrose pseudoinverse of a full-column-rank matrix, `R^{-1} Q^H`.
pub fn pseudoinverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (q, r) = thin_qr(a)?;
    upper_triangular_solve(&r, &q.adjoint())
}

/// Orthonormal basis of `ker a`, one column per null direction.
///
/// Numerical rank uses the `RANK_TOL` threshold relative to `sigma_max`.
pub fn orthonormal_nullspace(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.is_empty() {
        return Err(invalid("orthonormal_nullspace of an empty matrix"));
    }
    ensure_finite(a)?;
    let n = a.ncols();
    // Pad wide inputs with zero rows so the SVD returns a full right basis.
    let padded = if a.nrows() < n {
        let mut p = ComplexMatrix::zeros(n, n);
        p.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("right singular vectors were requested");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let null_rows: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= RANK_TOL * sigma_max || sigma_max == 0.0)
        .collect();
    let mut basis = ComplexMatrix::zeros(n, null_rows.len());
    for (c, &i) in null_rows.iter().enumerate() {
        for k in 0..n {
            basis[(k, c)] = v_t[(i, k)].conj();
        }
    }
    Ok(basis)
}

/// Result of checking `sigma_min(B) sigma_j(A) <= sigma_j(BA) <= sigma_max(B) sigma_j(A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductBounds {
    pub lower: Vec<f64>,
    pub product: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ProductBounds {
    /// Number of indices where either side fails at relative tolerance `tol`.
    pub fn violations(&self, tol: f64) -> usize {
        self.product
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .filter(|(p, (lo, hi))| **p < **lo * (1.0 - tol) || **p > **hi * (1.0 + tol))
            .count()
    }
}

/// Multiplicative perturbation bounds for the singular values of `b * a`.
///
/// `b` is `m x p` with `m >= p` (square in the classical statement); `a`
/// is `p x n` with `p >= n`.
pub fn product_singular_bounds(b: &ComplexMatrix, a: &ComplexMatrix) -> Result<ProductBounds> {
    if b.ncols() != a.nrows() {
        return Err(invalid("product_singular_bounds: non-conformable factors"));
    }
    if b.nrows() < b.ncols() || a.nrows() < a.ncols() {
        return Err(invalid("product_singular_bounds: factors must be tall or square"));
    }
    let sb = singular_values(b)?;
    let sa = singular_values(a)?;
    let sc = singular_values(&(b * a))?;
    let n = a.ncols();
    Ok(ProductBounds {
        lower: sa.values()[..n].iter().map(|s| sb.min() * s).collect(),
        product: sc.values()[..n].to_vec(),
        upper: sa.values()[..n].iter().map(|s| sb.max() * s).collect(),
    })
}
