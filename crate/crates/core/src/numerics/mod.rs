//! Numerical kernels shared by the curve, amoeba and inversion code.

mod linalg;
mod poly;
mod quadrature;

pub use linalg::det_complex;
#[cfg(test)]
pub(crate) use poly::horner;
pub use poly::{cluster_roots, roots, roots_exact, roots_warm, ClusteredRoot, ComplexPoly};
pub use quadrature::{gauss_kronrod, periodic_quadrature, Quadrature, DEFAULT_SAMPLE_CAP, GAUSS_LEGENDRE_4};
