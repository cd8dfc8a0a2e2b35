use crate::error::{domain, Error, Result};
use std::f64::consts::PI;

/// Largest argument for which `Γ(x)` is finite in `f64`.
pub const GAMMA_MAX_ARG: f64 = 171.624_376_956_302_7;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Lanczos approximation, used only on `[1, 2]`.
fn lanczos(x: f64) -> f64 {
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// `Γ(x)` for `x > 0`.
///
/// The Lanczos sum is evaluated on `[1, 2]` and moved to `x` by the
/// functional equation, which keeps the relative error around `1e-14` up to
/// the overflow threshold.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("gamma", format!("argument must be positive, got {x}")));
    }
    if x > GAMMA_MAX_ARG {
        return Err(Error::Overflow("gamma"));
    }
    if x < 1.0 {
        return Ok(lanczos(x + 1.0) / x);
    }
    let shifts = (x - 1.0).floor() as usize;
    let base = x - shifts as f64;
    let mut value = lanczos(base);
    for k in 0..shifts {
        value *= base + k as f64;
    }
    Ok(value)
}

/// `ln Γ(x)` for `x > 0`; Stirling series above 10.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("ln_gamma", format!("argument must be positive, got {x}")));
    }
    if x < 10.0 {
        return Ok(gamma(x)?.ln());
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series =
        inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))));
    Ok((x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn factorial_and_half_integer_values() {
        assert_relative_eq!(gamma(5.0).unwrap(), 24.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(0.5).unwrap(), 1.772_453_850_905_516, max_relative = 1e-14);
        assert_relative_eq!(gamma(1.5).unwrap(), 0.886_226_925_452_758, max_relative = 1e-14);
    }

    #[test]
    fn factorials_across_the_range() {
        let mut fact = 1.0f64;
        for n in 1..=170u32 {
            let g = gamma(n as f64).unwrap();
            assert_relative_eq!(g, fact, max_relative = 1e-13);
            fact *= n as f64;
        }
    }

    #[test]
    fn half_integers_via_duplication() {
        // Γ(n + 1/2) = (2n)! √π / (4^n n!)
        let mut value = PI.sqrt();
        for n in 0..100 {
            assert_relative_eq!(gamma(n as f64 + 0.5).unwrap(), value, max_relative = 1e-13);
            value *= n as f64 + 0.5;
        }
    }

    #[test]
    fn rejects_nonpositive_and_overflow() {
        assert!(matches!(gamma(0.0), Err(Error::Domain { .. })));
        assert!(matches!(gamma(-1.5), Err(Error::Domain { .. })));
        assert!(matches!(gamma(f64::NAN), Err(Error::Domain { .. })));
        assert_eq!(gamma(172.0), Err(Error::Overflow("gamma")));
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for &x in &[0.3, 1.0, 2.5, 9.99, 10.0, 17.25, 120.0] {
            assert_relative_eq!(ln_gamma(x).unwrap(), gamma(x).unwrap().ln(), epsilon = 1e-12);
        }
        // ln Γ(10001) = ln(10000!)
        let direct: f64 = (1..=10_000).map(|k| (k as f64).ln()).sum();
        assert_relative_eq!(ln_gamma(10_001.0).unwrap(), direct, max_relative = 1e-13);
    }
}
