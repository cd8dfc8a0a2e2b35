use super::gamma::gamma;
use super::gauss::{gauss_legendre, GaussRule};
use crate::error::{domain, Error, Result};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Argument at which `K_ν` switches from Temme's series to Steed's
/// continued fraction.
pub const BESSEL_K_CROSSOVER: f64 = 2.0;

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;

/// Taylor coefficients of `1/Γ(z)` about zero: `1/Γ(z) = Σ_{k≥1} c_k z^k`.
const RECIP_GAMMA: [f64; 26] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_8,
    -0.042_002_635_034_095_2,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_3,
    -0.009_621_971_527_877_0,
    0.007_218_943_246_663_0,
    -0.001_165_167_591_859_1,
    -0.000_215_241_674_114_9,
    0.000_128_050_282_388_2,
    -0.000_020_134_854_780_7,
    -0.000_001_250_493_482_1,
    0.000_001_133_027_232_0,
    -0.000_000_205_633_841_7,
    0.000_000_006_116_095_0,
    0.000_000_005_002_007_5,
    -0.000_000_001_181_274_6,
    0.000_000_000_104_342_7,
    0.000_000_000_007_782_3,
    -0.000_000_000_003_696_8,
    0.000_000_000_000_510_0,
    -0.000_000_000_000_020_6,
    -0.000_000_000_000_005_4,
    0.000_000_000_000_001_4,
    0.000_000_000_000_000_1,
];

/// Temme's auxiliary quantities for `|μ| ≤ 1/2`:
/// `(Γ1, Γ2, 1/Γ(1+μ), 1/Γ(1-μ))`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    // 1/Γ(1+x) = Σ_k c_k x^{k-1}; split into even and odd parts in μ.
    let mut even = 0.0; // Σ_{k odd} c_k μ^{k-1}
    let mut odd = 0.0; //  Σ_{k even} c_k μ^{k-2}
    let mu2 = mu * mu;
    let mut pe = 1.0;
    let mut po = 1.0;
    for (i, c) in RECIP_GAMMA.iter().enumerate() {
        if i % 2 == 0 {
            even += c * pe;
            pe *= mu2;
        } else {
            odd += c * po;
            po *= mu2;
        }
    }
    let gam1 = -odd;
    let gam2 = even;
    (gam1, gam2, gam2 - mu * gam1, gam2 + mu * gam1)
}

/// `(K_μ(x), K_{μ+1}(x))` for `|μ| ≤ 1/2`.
fn bessel_k_pair(mu: f64, x: f64) -> (f64, f64) {
    let mu2 = mu * mu;
    if x < BESSEL_K_CROSSOVER {
        let x2 = 0.5 * x;
        let pimu = PI * mu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        for i in 1..MAX_ITER {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu2);
            c *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            sum1 += c * (p - fi * ff);
            if del.abs() < sum.abs() * EPS {
                break;
            }
        }
        (sum, sum1 * 2.0 / x)
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..MAX_ITER {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS {
                break;
            }
        }
        h *= a1;
        let kmu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
        let k1 = kmu * (mu + x + 0.5 - h) / x;
        (kmu, k1)
    }
}

/// Modified Bessel function of the second kind `K_ν(z)`, `ν ≥ 0`, `z > 0`.
///
/// The fractional order `μ = ν - round(ν)` is evaluated by Temme's series for
/// `z < 2` and by Steed's continued fraction otherwise; integer steps in the
/// order use the (stable) upward recurrence
/// `K_{μ+1} = 2μ/z K_μ + K_{μ-1}`.
pub fn bessel_k(nu: f64, z: f64) -> Result<f64> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(domain("bessel_k", format!("order must be >= 0, got {nu}")));
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain("bessel_k", format!("argument must be positive, got {z}")));
    }
    let steps = (nu + 0.5).floor() as usize;
    let mu = nu - steps as f64;
    let (mut k_mu, mut k_next) = bessel_k_pair(mu, z);
    for i in 1..=steps {
        let k = (mu + i as f64) * (2.0 / z) * k_next + k_mu;
        k_mu = k_next;
        k_next = k;
    }
    if !k_mu.is_finite() {
        return Err(Error::Overflow("bessel_k"));
    }
    Ok(k_mu)
}

fn panel_rule() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20))
}

fn bessel_j_series(nu: f64, z: f64) -> Result<f64> {
    let half = 0.5 * z;
    let mut term = half.powf(nu) / gamma(nu + 1.0)?;
    let mut sum = term;
    let q = -half * half;
    for k in 1..500 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    Ok(sum)
}

/// Hankel's asymptotic expansion, accurate to roundoff once `z ≳ 25 + ν²`.
fn bessel_j_asymptotic(nu: f64, z: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (kf * 8.0 * z);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = z - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * z)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Schläfli's integral
/// `J_ν(z) = 1/π ∫_0^π cos(ντ - z sin τ) dτ - sin(νπ)/π ∫_0^∞ e^{-νt - z sinh t} dt`.
fn bessel_j_schlafli(nu: f64, z: f64) -> f64 {
    let rule = panel_rule();
    let panels = 8 + (z + nu.abs()) as usize;
    let h = PI / panels as f64;
    let mut first = 0.0;
    for i in 0..panels {
        let a = i as f64 * h;
        first += rule.integrate_on(a, a + h, |tau| (nu * tau - z * tau.sin()).cos());
    }
    let mut value = first / PI;
    let s = (nu * PI).sin();
    if s.abs() > 1e-300 {
        // integrand below e^{-40} beyond t_max
        let t_max = (45.0 / z).asinh().max(1.0) + 45.0 * (-nu).max(0.0) / z;
        let panels = 24;
        let h = t_max / panels as f64;
        let mut second = 0.0;
        for i in 0..panels {
            let a = i as f64 * h;
            second += rule.integrate_on(a, a + h, |t| (-nu * t - z * t.sinh()).exp());
        }
        value -= s / PI * second;
    }
    value
}

/// Bessel function of the first kind `J_ν(z)` for real `ν > -1`, `z ≥ 0`.
///
/// Power series for `z ≤ 12`, Schläfli's integral in the transition zone and
/// Hankel's expansion for large arguments.
pub fn bessel_j(nu: f64, z: f64) -> Result<f64> {
    if !(nu > -1.0) || !nu.is_finite() {
        return Err(domain("bessel_j", format!("order must exceed -1, got {nu}")));
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(domain("bessel_j", format!("argument must be >= 0, got {z}")));
    }
    if z == 0.0 {
        return match nu {
            n if n == 0.0 => Ok(1.0),
            n if n > 0.0 => Ok(0.0),
            _ => Err(Error::Overflow("bessel_j")),
        };
    }
    if z <= 12.0 {
        bessel_j_series(nu, z)
    } else if z < 25.0 + nu * nu {
        Ok(bessel_j_schlafli(nu, z))
    } else {
        Ok(bessel_j_asymptotic(nu, z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// `K_ν(z) = ∫_0^∞ e^{-z cosh t} cosh(νt) dt` by the trapezoid rule, which
    /// converges geometrically for this analytic integrand.
    fn k_trapezoid(nu: f64, z: f64) -> f64 {
        let h: f64 = 0.02;
        let mut acc = 0.5 * (-z).exp();
        let mut t = h;
        loop {
            let log_term = -z * t.cosh() + nu * t;
            let term = (log_term.exp() + (-z * t.cosh() - nu * t).exp()) * 0.5;
            acc += term;
            if log_term < -750.0 || (term < 1e-18 * acc && t > 1.0) {
                break;
            }
            t += h;
        }
        acc * h
    }

    #[test]
    fn half_integer_closed_forms() {
        assert_relative_eq!(
            bessel_k(0.5, 1.0).unwrap(),
            0.461_068_504_447_894_6,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            bessel_k(0.5, 2.0).unwrap(),
            0.119_937_771_968_061_45,
            max_relative = 1e-13
        );
        for i in 0..200 {
            let z = 0.1 + 19.9 * i as f64 / 199.0;
            let k12 = (PI / (2.0 * z)).sqrt() * (-z).exp();
            let k32 = k12 * (1.0 + 1.0 / z);
            assert!((bessel_k(0.5, z).unwrap() / k12 - 1.0).abs() < 1e-10);
            assert!((bessel_k(1.5, z).unwrap() / k32 - 1.0).abs() < 1e-10);
            let j12 = (2.0 / (PI * z)).sqrt() * z.sin();
            let j32 = (2.0 / (PI * z)).sqrt() * (z.sin() / z - z.cos());
            assert!((bessel_j(0.5, z).unwrap() - j12).abs() < 1e-10, "z={z}");
            assert!((bessel_j(1.5, z).unwrap() - j32).abs() < 1e-10, "z={z}");
            let jm12 = (2.0 / (PI * z)).sqrt() * z.cos();
            assert!((bessel_j(-0.5, z).unwrap() - jm12).abs() < 1e-10, "z={z}");
        }
    }

    #[test]
    fn bessel_k_reference_values() {
        // mpmath, 30 digits
        let cases = [
            (0.0, 1e-6, 13.931_442_073_626_419),
            (0.0, 2.0, 0.113_893_872_749_533_44),
            (0.3, 0.01, 6.890_102_638_292_769_5),
            (1.0, 1e-6, 999_999.999_992_784_3),
            (2.5, 1.5, 0.989_451_892_989_150_3),
            (7.2, 2.0, 448.000_405_616_813_5),
            (7.2, 7.0, 0.011_317_490_160_882_158),
            (10.0, 1e-6, 1.857_945_599_999_949_2e68),
            (10.0, 50.0, 9.150_988_209_987_996e-23),
            (0.0, 50.0, 3.410_167_749_789_495_5e-23),
        ];
        for (nu, z, expected) in cases {
            assert_relative_eq!(bessel_k(nu, z).unwrap(), expected, max_relative = 1e-10);
        }
    }

    #[test]
    fn bessel_k_matches_integral_oracle() {
        for &nu in &[0.0, 0.25, 0.5, 1.0, 2.3, 4.0, 6.75, 10.0] {
            for &z in &[1e-3, 0.05, 0.7, 1.9, 2.1, 5.0, 17.0, 45.0] {
                let reference = k_trapezoid(nu, z);
                let k = bessel_k(nu, z).unwrap();
                assert!((k / reference - 1.0).abs() < 1e-10, "ν={nu} z={z}: {k} vs {reference}");
            }
        }
    }

    #[test]
    fn bessel_k_continuous_at_crossover() {
        for &nu in &[0.0, 0.3, 1.0, 2.5, 7.2, 10.0] {
            let below = bessel_k(nu, BESSEL_K_CROSSOVER * (1.0 - 1e-12)).unwrap();
            let above = bessel_k(nu, BESSEL_K_CROSSOVER).unwrap();
            assert!((below / above - 1.0).abs() < 1e-9, "ν={nu}");
        }
    }

    #[test]
    fn bessel_k_log_divergence() {
        let z: f64 = 0.001;
        let k0 = bessel_k(0.0, z).unwrap();
        let log = (1.0 / z).ln();
        assert!((k0 / log - 1.0).abs() < 0.02);
    }

    #[test]
    fn bessel_j_reference_values() {
        let cases = [
            (-0.5, 0.01, 7.978_446_669_072_76),
            (0.0, 3.0, -0.260_051_954_901_933_44),
            (0.0, 8.5, 0.041_939_251_842_934_504),
            (0.0, 40.0, 0.007_366_890_584_237_289_6),
            (0.0, 100.0, 0.019_985_850_304_223_122),
            (1.5, 40.0, 0.086_488_679_736_133_76),
            (4.0, 0.01, 2.604_153_645_860_460_3e-11),
            (4.0, 8.5, -0.207_700_883_509_326_23),
            (4.0, 40.0, -0.017_856_747_643_515_081),
            (4.0, 100.0, 0.026_105_809_447_725_282),
        ];
        for (nu, z, expected) in cases {
            let j = bessel_j(nu, z).unwrap();
            assert!(
                (j - expected).abs() <= 1e-9 * expected.abs().max(1e-2),
                "ν={nu} z={z}: {j}"
            );
        }
    }

    #[test]
    fn bessel_j_integer_orders_match_bessel_integral() {
        // J_n(z) = 1/π ∫_0^π cos(nτ - z sin τ) dτ; trapezoid is spectrally
        // accurate because the integrand extends to a smooth periodic function.
        for n in 0..5 {
            for i in 0..=60 {
                let z = 100.0 * i as f64 / 60.0;
                let m = 400;
                let mut acc = 0.0;
                for k in 0..m {
                    let tau = 2.0 * PI * k as f64 / m as f64;
                    acc += (n as f64 * tau - z * tau.sin()).cos();
                }
                let reference = acc / m as f64;
                let j = bessel_j(n as f64, z).unwrap();
                assert!((j - reference).abs() < 1e-11, "n={n} z={z}: {j} vs {reference}");
            }
        }
    }

    #[test]
    fn special_points_and_domain() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert!(bessel_j(0.5, PI).unwrap().abs() < 1e-15);
        assert_relative_eq!(bessel_j(0.5, PI / 2.0).unwrap(), 2.0 / PI, max_relative = 1e-14);
        assert!(bessel_j(0.5, -1.0).is_err());
        assert!(bessel_k(0.5, 0.0).is_err());
        assert!(bessel_k(-0.5, 1.0).is_err());
    }
}
