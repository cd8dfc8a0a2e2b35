use super::{Family, KernelSpec, Weighting};
use crate::accel::wynn_epsilon;
use crate::error::{domain, Error, Result};
use crate::specfun::{bessel_j, bessel_k, gamma, gauss_legendre};
use crate::spectra::{folded_angle, Manifold, Point};
use std::f64::consts::{PI, TAU};

/// Whether [`sobolev_closed_circle`] covers `spec`: the Fourier weighting
/// with `s ∈ {1/2, 1}` and the Bessel weighting with `s = 1`.
pub fn has_circle_closed_form(spec: &KernelSpec) -> bool {
    matches!(
        (spec.family, spec.weighting),
        (Family::Sobolev { s }, Weighting::Fourier) if s == 0.5 || s == 1.0
    ) || matches!(
        (spec.family, spec.weighting),
        (Family::Sobolev { s }, Weighting::Bessel) if s == 1.0
    )
}

/// Closed form of the Sobolev kernel on the unit circle.
///
/// With `δ` the angular separation:
///
/// * Fourier weighting, `s = 1`: `1 + δ²/(4π) - δ/2 + π/6` for `δ ∈ [0, 2π)`;
/// * Fourier weighting, `s = 1/2`: `1 - ln(2(1 - cos δ))/(2π)`, singular at `δ = 0`;
/// * Bessel weighting, `s = 1`: `cosh(π - δ) / (2 sinh π)`.
///
/// The separation is folded to `[0, π]` first, which leaves all three
/// formulas unchanged and makes the result exactly symmetric.
pub fn sobolev_closed_circle(spec: &KernelSpec, a: &Point, b: &Point) -> Result<f64> {
    a.validate(&Manifold::Circle)?;
    b.validate(&Manifold::Circle)?;
    let (Point::Circle(x), Point::Circle(y)) = (a, b) else {
        unreachable!("validated")
    };
    scaled_circle_closed_form(spec, TAU, folded_angle(*x, *y))
}

/// Closed form on a circle of length `length` at arc separation `u`
/// (any real; reduced modulo the length).
///
/// Fourier weighting: `1 + (L/2π)^{2s-1} (K_unit(2πu/L) - 1)`. Bessel
/// weighting, `s = 1`: `cosh(L/2 - u) / (2 sinh(L/2))` with `u ∈ [0, L/2]`.
pub fn scaled_circle_closed_form(spec: &KernelSpec, length: f64, u: f64) -> Result<f64> {
    if !has_circle_closed_form(spec) {
        return Err(Error::InvalidInput(format!(
            "no circle closed form for {:?} with {:?} weighting",
            spec.family, spec.weighting
        )));
    }
    if !(length > 0.0) {
        return Err(Error::InvalidInput("circle length must be positive".into()));
    }
    let Family::Sobolev { s } = spec.family else {
        unreachable!()
    };
    let r = u.abs().rem_euclid(length);
    let u = r.min(length - r);
    let x = TAU * u / length;
    match spec.weighting {
        Weighting::Fourier => {
            let unit = if s == 1.0 {
                1.0 + x * x / (4.0 * PI) - x / 2.0 + PI / 6.0
            } else {
                if x == 0.0 {
                    return Err(Error::Divergence(
                        "the s = 1/2 circle kernel is singular on the diagonal".into(),
                    ));
                }
                // 2(1 - cos x) = 4 sin²(x/2), without cancellation
                1.0 - (2.0 * (x / 2.0).sin()).ln() / PI
            };
            Ok(1.0 + (length / TAU).powf(2.0 * s - 1.0) * (unit - 1.0))
        }
        Weighting::Bessel => {
            let half = length / 2.0;
            Ok((half - u).cosh() / (2.0 * half.sinh()))
        }
        _ => unreachable!("checked by has_circle_closed_form"),
    }
}

/// Circle kernel with Fourier weighting and `s = 1/2` at a separation given
/// by its logarithm, `1 - ln(2 sin(δ/2))/π` with `δ = e^{ln_delta}`.
///
/// Reaches separations far below the smallest positive `f64`.
pub fn sobolev_half_circle_at_log_separation(ln_delta: f64) -> Result<f64> {
    if !(ln_delta <= PI.ln()) {
        return Err(domain(
            "sobolev_half_circle_at_log_separation",
            format!("ln δ = {ln_delta} is not in (-∞, ln π]"),
        ));
    }
    let delta = ln_delta.exp();
    // ln(2 sin(δ/2)) = ln δ + ln(sin(δ/2)/(δ/2))
    let correction = if delta < 1e-8 {
        -delta * delta / 24.0
    } else {
        ((0.5 * delta).sin() / (0.5 * delta)).ln()
    };
    Ok(1.0 - (ln_delta + correction) / PI)
}

/// Sobolev kernel of `H^s(R^n)`:
/// `2^{1-s-n/2} / (π^{n/2} Γ(s)) · K_{|n/2-s|}(ρ) ρ^{s-n/2}` with `ρ = ‖x - y‖`.
///
/// For `s > n/2` the diagonal value is the limit `K_μ(ρ) ρ^μ → 2^{μ-1} Γ(μ)`
/// (`μ = s - n/2`). For `0 < s ≤ n/2` the formula still defines the kernel
/// off the diagonal (e.g. `e^{-ρ}/(4πρ)` for `n = 3`, `s = 1`) and the
/// diagonal is a divergence error.
pub fn sobolev_euclidean(n: usize, s: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    if n == 0 || x.len() != n || y.len() != n {
        return Err(Error::InvalidInput(format!(
            "points must have {n} coordinates (got {} and {})",
            x.len(),
            y.len()
        )));
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(domain("sobolev_euclidean", format!("need s > 0, got {s}")));
    }
    let half = n as f64 / 2.0;
    let rho = x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
    let mu = s - half;
    let prefactor = 2f64.powf(1.0 - s - half) / (PI.powf(half) * gamma(s)?);
    if rho == 0.0 {
        if mu <= 0.0 {
            return Err(Error::Divergence(format!(
                "the R^{n} kernel with s = {s} <= n/2 is singular on the diagonal"
            )));
        }
        return Ok(prefactor * 2f64.powf(mu - 1.0) * gamma(mu)?);
    }
    Ok(prefactor * bessel_k(mu.abs(), rho)? * rho.powf(mu))
}

/// The same kernel from its Fourier representation reduced to a radial
/// Hankel transform,
///
/// ```text
/// K(ρ) = (2π)^{-n/2} ρ^{1-n/2} ∫_0^∞ r^{n/2} (1 + r²)^{-s} J_{n/2-1}(rρ) dr,
/// ```
///
/// integrated panel by panel between the asymptotic zeros of `J_{n/2-1}`
/// with Wynn's ε-algorithm applied to the partial sums. The integrand decays
/// like `r^{n/2-2s-1/2}` with oscillation, so `s > (n-1)/4` is required.
pub fn euclidean_radial_integral(n: usize, s: f64, rho: f64) -> Result<f64> {
    if n == 0 || !(rho > 0.0) || !(s > 0.0) || !(4.0 * s > n as f64 - 1.0) {
        return Err(domain(
            "euclidean_radial_integral",
            format!("need n >= 1, rho > 0, s > 0 and s > (n-1)/4 (n = {n}, s = {s}, rho = {rho})"),
        ));
    }
    const PANELS: usize = 60;
    let half = n as f64 / 2.0;
    let nu = half - 1.0;
    let rule = gauss_legendre(20);
    // u = rρ; the integrand in u
    let integrand =
        |u: f64| -> Result<f64> { Ok(u.powf(half) * (1.0 + (u / rho).powi(2)).powf(-s) * bessel_j(nu, u)?) };
    let breaks: Vec<f64> = std::iter::once(0.0)
        .chain((1..=PANELS).map(|k| (k as f64 + nu / 2.0 - 0.25) * PI))
        .collect();
    let mut partial = Vec::with_capacity(PANELS);
    let mut acc = 0.0;
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        // resolve the (1 + u²/ρ²) factor near the origin
        let pieces = (((hi - lo) / rho.min(PI)).ceil() as usize).clamp(1, 64);
        let step = (hi - lo) / pieces as f64;
        for p in 0..pieces {
            let a = lo + p as f64 * step;
            let mut err = None;
            let v = rule.integrate_on(a, a + step, |u| {
                integrand(u).unwrap_or_else(|e| {
                    err = Some(e);
                    0.0
                })
            });
            if let Some(e) = err {
                return Err(e);
            }
            acc += v;
        }
        partial.push(acc);
    }
    let tail_start = partial.len().saturating_sub(40);
    let limit = wynn_epsilon(&partial[tail_start..]);
    Ok((TAU).powf(-half) * rho.powf(-(n as f64)) * limit)
}
