use super::gamma::gamma;
use super::gauss::gauss_jacobi;
use crate::error::{domain, Result};
use std::f64::consts::PI;

/// Default cap on the degree for which single-degree evaluation is offered.
pub const DEFAULT_DEGREE_CAP: usize = 512;

/// Order `ν = d/2 - 1` and degree `ℓ` of a Gegenbauer polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GegenbauerParams {
    pub nu: f64,
    pub ell: usize,
}

impl GegenbauerParams {
    pub fn new(nu: f64, ell: usize) -> Result<Self> {
        if !(nu >= 0.0) || !nu.is_finite() {
            return Err(domain("gegenbauer", format!("order must be >= 0, got {nu}")));
        }
        Ok(Self { nu, ell })
    }

    /// Parameters of the zonal polynomial of `S^{d-1}`.
    pub fn for_sphere(ambient_dim: usize, ell: usize) -> Result<Self> {
        Self::new(ambient_dim as f64 / 2.0 - 1.0, ell)
    }
}

/// `C^ν_ℓ(z)` from the three-term recurrence
/// `(ℓ+1) C_{ℓ+1} = 2(ℓ+ν) z C_ℓ - (ℓ+2ν-1) C_{ℓ-1}`, seeded with the first
/// two coefficients of `(1 - 2zt + t²)^{-ν}`. For `ν = 0` the generating
/// function is identically one, so every `C^0_ℓ` with `ℓ ≥ 1` vanishes.
pub fn gegenbauer(params: GegenbauerParams, z: f64) -> Result<f64> {
    let GegenbauerParams { nu, ell } = GegenbauerParams::new(params.nu, params.ell)?;
    if ell == 0 {
        return Ok(1.0);
    }
    if nu == 0.0 {
        return Ok(0.0);
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * nu * z;
    for k in 1..ell {
        let kf = k as f64;
        let next = (2.0 * (kf + nu) * z * cur - (kf + 2.0 * nu - 1.0) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Streaming evaluation of `B^ν_0(z), B^ν_1(z), …` where
/// `B^ν_ℓ = C^ν_ℓ / C^ν_ℓ(1)` (`T_ℓ` for `ν = 0`).
///
/// Uses the normalized recurrence
/// `(ℓ + 2ν) B_{ℓ+1} = 2(ℓ + ν) z B_ℓ - ℓ B_{ℓ-1}`, which covers `ν = 0`
/// without special cases and keeps every iterate in `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct NormalizedGegenbauer {
    nu: f64,
    z: f64,
    ell: usize,
    prev: f64,
    cur: f64,
}

impl NormalizedGegenbauer {
    pub fn new(nu: f64, z: f64) -> Result<Self> {
        GegenbauerParams::new(nu, 0)?;
        Ok(Self {
            nu,
            z,
            ell: 0,
            prev: 0.0,
            cur: 1.0,
        })
    }

    /// Degree of the value returned by the next call to `next`.
    pub fn degree(&self) -> usize {
        self.ell
    }
}

impl Iterator for NormalizedGegenbauer {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let out = self.cur;
        let l = self.ell as f64;
        let next = if self.ell == 0 {
            self.z
        } else {
            (2.0 * (l + self.nu) * self.z * self.cur - l * self.prev) / (l + 2.0 * self.nu)
        };
        self.prev = self.cur;
        self.cur = next;
        self.ell += 1;
        Some(out)
    }
}

/// `B^ν_ℓ(z) = C^ν_ℓ(z) / C^ν_ℓ(1)`; equals `T_ℓ(z)` when `ν = 0`.
pub fn gegenbauer_normalized(params: GegenbauerParams, z: f64) -> Result<f64> {
    let GegenbauerParams { nu, ell } = GegenbauerParams::new(params.nu, params.ell)?;
    if z == 1.0 {
        return Ok(1.0);
    }
    if z == -1.0 {
        return Ok(if ell % 2 == 0 { 1.0 } else { -1.0 });
    }
    Ok(NormalizedGegenbauer::new(nu, z)?
        .nth(ell)
        .expect("iterator is infinite"))
}

/// `B^ν_ℓ(cos θ)` from the integral representation
///
/// ```text
/// B^ν_ℓ(cos θ) = 2^ν Γ(ν+½) / (Γ(ν) Γ(½)) (sin θ)^{1-2ν}
///                ∫_0^θ cos((ℓ+ν)φ) (cos φ - cos θ)^{ν-1} dφ
/// ```
///
/// With `φ = θ(1-u)` the factor `u^{ν-1}` is absorbed into a Gauss–Jacobi
/// weight and the remaining integrand is smooth on `[0, 1]` for `θ < π`.
pub fn gegenbauer_integral_rep(params: GegenbauerParams, theta: f64) -> Result<f64> {
    let GegenbauerParams { nu, ell } = GegenbauerParams::new(params.nu, params.ell)?;
    if !(nu > 0.0) {
        return Err(domain("gegenbauer_integral_rep", "the representation needs ν > 0"));
    }
    if !(theta > 0.0 && theta < PI) {
        return Err(domain(
            "gegenbauer_integral_rep",
            format!("angle must lie in (0, π), got {theta}"),
        ));
    }
    let nodes = 48 + 2 * ell;
    // weight (1+x)^{ν-1} on [-1, 1]; u = (1+x)/2.
    let rule = gauss_jacobi(nodes, 0.0, nu - 1.0)?;
    let freq = ell as f64 + nu;
    let mut acc = 0.0;
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let u = 0.5 * (1.0 + x);
        let phi = theta * (1.0 - u);
        let smooth = 2.0 * (0.5 * (theta + phi)).sin() * (0.5 * theta * u).sin() / u;
        acc += w * (freq * phi).cos() * smooth.powf(nu - 1.0);
    }
    // ∫_0^θ … dφ = θ ∫_0^1 u^{ν-1} h(u) du = θ 2^{-ν} ∫_{-1}^{1} (1+x)^{ν-1} h dx
    let integral = theta * 2f64.powf(-nu) * acc;
    let prefactor = 2f64.powf(nu) * gamma(nu + 0.5)? / (gamma(nu)? * PI.sqrt());
    Ok(prefactor * theta.sin().powf(1.0 - 2.0 * nu) * integral)
}
