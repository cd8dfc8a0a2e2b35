//! Scalar special functions: Gamma, Gegenbauer / Chebyshev, Bessel `J_ν` and
//! modified Bessel `K_ν`, plus Gauss–Jacobi nodes used by the quadratures.
//!
//! Everything here is pure and reentrant.

mod bessel;
mod gamma;
mod gauss;
mod gegenbauer;

pub use bessel::{bessel_j, bessel_k, BESSEL_K_CROSSOVER};
pub use gamma::{gamma, ln_gamma, GAMMA_MAX_ARG};
pub use gauss::{gauss_jacobi, gauss_legendre, GaussRule};
pub use gegenbauer::{
    gegenbauer, gegenbauer_integral_rep, gegenbauer_normalized, GegenbauerParams, NormalizedGegenbauer,
    DEFAULT_DEGREE_CAP,
};
