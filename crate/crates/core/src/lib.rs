//! Reproducing kernels of Sobolev spaces `H^s` and diffusion spaces on the
//! circle, the spheres `S^{d-1}` and `R^n`.
//!
//! Kernels on compact manifolds are evaluated as spectral sums over the
//! eigenspaces of the Laplace–Beltrami operator,
//!
//! ```text
//! K(m, m') = Σ_ℓ w(λ_ℓ) Π_ℓ(m, m'),
//! ```
//!
//! where `Π_ℓ` is the kernel of the orthogonal projector onto the `ℓ`-th
//! eigenspace. Every truncated sum carries a certified bound on the neglected
//! tail. Below the RKHS threshold the off-diagonal kernel is recovered by Abel
//! summation with polynomial extrapolation in `1 - t`; closed forms are provided where they
//! exist (circle with `s ∈ {1/2, 1}`, `R^n` through the modified Bessel
//! function `K_ν`).
//!
//! Module map:
//!
//! | module | contents |
//! |--------|----------|
//! | [`specfun`] | Gamma, Gegenbauer, Bessel `J_ν` / `K_ν`, Gauss–Jacobi rules |
//! | [`spectra`] | manifolds, points, eigenvalues, multiplicities, projectors, eigenfunctions |
//! | [`kernels`] | Sobolev, heat, Abel-summed and power kernels |
//! | [`rkhs`] | Gram matrices, interpolation, spectral norms |
//! | [`quadrature`] | rules on `S^1` / `S^{d-1}` and integral operators |
//! | [`curves`] | arc-length isometry of closed curves and kernel pullback |
//! | [`verify`] | the numerical verification suites driven by the CLI |
//!
//! ```
//! use manifold_rkhs::kernels::{self, KernelSpec, Weighting};
//! use manifold_rkhs::spectra::{Manifold, Point};
//!
//! let spec = KernelSpec::sobolev(1.0).with_weighting(Weighting::Fourier);
//! let a = Point::angle(0.0);
//! let b = Point::angle(std::f64::consts::PI);
//! let closed = kernels::sobolev_closed_circle(&spec, &a, &b).unwrap();
//! assert!((closed - (1.0 - std::f64::consts::PI / 12.0)).abs() < 1e-14);
//! # let _ = Manifold::Circle;
//! ```

pub mod accel;
pub mod curves;
mod error;
pub mod exec;
pub mod fit;
pub mod kernels;
pub mod quadrature;
pub mod rkhs;
pub mod specfun;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
