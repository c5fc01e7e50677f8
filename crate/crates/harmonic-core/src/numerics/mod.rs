//! Shared numerical kernels: stable special-function ratios, Gaussian
//! quadrature with endpoint weights, Chebyshev interpolation, compensated
//! summation and a small dense linear solver.

pub mod chebyshev;
pub mod linear;
pub mod quadrature;
pub mod special;
pub mod summation;
