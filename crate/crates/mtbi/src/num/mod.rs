//! Shared numerical kernels: dominant eigenvalues, adaptive Runge-Kutta,
//! monotone cubic interpolation, adaptive quadrature with endpoint
//! divergence classification.

pub mod eigen;
pub mod pchip;
pub mod quad;
pub mod rk45;
