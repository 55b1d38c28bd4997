//! Spectral properties of Vandermonde matrices whose nodes lie on the unit
//! circle and form well-separated clusters.
//!
//! The crate is organised bottom-up:
//!
//! * [`nodes`]: node sets, cluster generation and wrap-around geometry.
//! * [`linalg`]: the dense complex kernel (SVD, QR, Hermitian eigenvalues,
//!   least squares, nullspaces).
//! * [`vandermonde`]: `V_N`, the centered matrix, the Dirichlet Gram matrix
//!   and its Taylor expansion.
//! * [`dd_bases`]: divided differences, the divided-difference and limit
//!   bases, and normalized Hilbert matrices.
//! * [`subspace`]: principal angles between cluster subspaces and the
//!   block-QR union comparison of spectra.
//! * [`cluster_spectrum`]: single-cluster eigenvalue analysis (Micchelli
//!   forms, kernel chains, scaling laws).
//! * [`lsq`]: componentwise least-squares conditioning.
//! * [`power_sums`]: exact power sums and the trigonometric cancellation
//!   bound.
//! * [`fit`]: log-log regression used to read off scaling exponents.

pub mod cluster_spectrum;
pub mod dd_bases;
pub mod error;
pub mod fit;
pub mod linalg;
pub mod lsq;
pub mod nodes;
pub mod power_sums;
pub mod subspace;
pub mod vandermonde;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Spectrum};
pub use nalgebra::DVector;
pub use nodes::{ClusterConfig, ClusterSpec, ClusterStats, Layout, NodeSet};
pub use num_complex::Complex64;
