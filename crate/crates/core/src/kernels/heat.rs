use crate::error::{Error, Result};
use crate::spectra::{Manifold, Point, Zonal};
use std::f64::consts::{PI, TAU};

/// Number of images `j` with `|j| ≤ J` needed for negligible truncation.
fn image_count(t: f64) -> i64 {
    ((160.0 * t).sqrt() / TAU).ceil() as i64 + 2
}

/// `sinh(x)/x`, accurate near 0.
fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

/// Largest heat time for which the `S^3` image sum is preferred. Beyond it
/// the `e^t` prefactor amplifies cancellation between images while the
/// spectral sum needs only a handful of levels.
pub const S3_IMAGE_MAX_TIME: f64 = 1.0;

/// Whether [`heat_image_sum`] is the preferred evaluation at time `t`.
pub fn has_heat_image_sum(manifold: &Manifold, t: f64) -> bool {
    match manifold {
        Manifold::Circle => true,
        Manifold::Sphere { dim: 4 } => t <= S3_IMAGE_MAX_TIME,
        _ => false,
    }
}

/// Heat kernel by the method of images.
///
/// Circle: `(4πt)^{-1/2} Σ_j e^{-(δ+2πj)²/(4t)}`.
/// `S^3`: `e^t (4πt)^{-3/2} Σ_j (θ+2πj)/sin θ · e^{-(θ+2πj)²/(4t)}`, with
/// the images paired so that no cancellation occurs near `θ = 0` or `θ = π`.
/// Every term is positive, so the values stay accurate where the spectral
/// sum is dominated by rounding (small `t`, distant points).
pub fn heat_image_sum(manifold: &Manifold, t: f64, a: &Point, b: &Point) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput(format!("heat time must be positive, got {t}")));
    }
    let zonal = Zonal::between(manifold, a, b)?;
    let big_j = image_count(t);
    match (manifold, zonal) {
        (Manifold::Circle, Zonal::Angle(delta)) => {
            let sum: f64 = (-big_j..=big_j)
                .map(|j| {
                    let x = delta + TAU * j as f64;
                    (-x * x / (4.0 * t)).exp()
                })
                .sum();
            Ok(sum / (4.0 * PI * t).sqrt())
        }
        (Manifold::Sphere { dim: 4 }, Zonal::Cosine(_)) => {
            let (Point::Sphere(x), Point::Sphere(y)) = (a, b) else {
                unreachable!("validated")
            };
            let theta = crate::spectra::distance(manifold, &Point::Sphere(x.clone()), &Point::Sphere(y.clone()))?;
            let prefactor = t.exp() / (4.0 * PI * t).powf(1.5);
            let bracket = if theta <= PI / 2.0 {
                // pairs (j, -j) around θ; sum = (θ/sin θ)·[…]
                let mut s = (-theta * theta / (4.0 * t)).exp();
                for j in 1..=big_j {
                    let a = TAU * j as f64;
                    let x = theta * a / (2.0 * t);
                    let damp = (-(theta * theta + a * a) / (4.0 * t) + x.abs()).exp();
                    // cosh x - (a²/2t) sinhc(x), scaled by e^{-|x|} for overflow safety
                    let e = (-2.0 * x.abs()).exp();
                    let cosh_s = 0.5 * (1.0 + e);
                    let sinhc_s = if x.abs() < 1e-4 {
                        (-x.abs()).exp() * sinhc(x)
                    } else {
                        0.5 * (1.0 - e) / x.abs()
                    };
                    s += 2.0 * damp * (cosh_s - a * a / (2.0 * t) * sinhc_s);
                }
                theta_over_sin(theta) * s
            } else {
                // pairs (j, -1-j) around the antipode, φ = π - θ
                let phi = PI - theta;
                let mut s = 0.0;
                for j in 0..=big_j {
                    let b = PI * (2 * j + 1) as f64;
                    let y = b * phi / (2.0 * t);
                    let damp = (-(b * b + phi * phi) / (4.0 * t) + y.abs()).exp();
                    let e = (-2.0 * y.abs()).exp();
                    let cosh_s = 0.5 * (1.0 + e);
                    let sinhc_s = if y.abs() < 1e-4 {
                        (-y.abs()).exp() * sinhc(y)
                    } else {
                        0.5 * (1.0 - e) / y.abs()
                    };
                    s += 2.0 * damp * (b * b / (2.0 * t) * sinhc_s - cosh_s);
                }
                theta_over_sin(phi) * s
            };
            Ok(prefactor * bracket)
        }
        _ => Err(manifold.unsupported("heat kernel image sum")),
    }
}

fn theta_over_sin(theta: f64) -> f64 {
    if theta.abs() < 1e-8 {
        1.0
    } else {
        theta / theta.sin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{heat_kernel, TruncationPolicy};
    use crate::spectra::{point_at_distance, sample_points};

    #[test]
    fn image_sums_match_spectral_sums() {
        let trunc = TruncationPolicy::TailBound {
            eps: 1e-15,
            max_levels: 1 << 20,
        };
        for manifold in [Manifold::Circle, Manifold::sphere(4).unwrap()] {
            let pts = sample_points(&manifold, 40, 2);
            let base = crate::spectra::base_point(&manifold);
            let mut pairs: Vec<(Point, Point)> = pts.chunks(2).map(|p| (p[0].clone(), p[1].clone())).collect();
            for r in [0.0, 1e-9, 1e-3, 1.0, 3.0, PI - 1e-3, PI] {
                pairs.push((base.clone(), point_at_distance(&manifold, r)));
            }
            for t in [0.05, 0.3, 1.0, 4.0, 10.0] {
                if !has_heat_image_sum(&manifold, t) {
                    continue;
                }
                for (a, b) in &pairs {
                    let image = heat_image_sum(&manifold, t, a, b).unwrap();
                    let spectral = heat_kernel(&manifold, t, trunc, a, b).unwrap().value;
                    assert!(image > 0.0);
                    assert!(
                        (image - spectral).abs() < 1e-13 * spectral.abs().max(1.0),
                        "{manifold} t={t}: {image} vs {spectral}"
                    );
                }
            }
        }
    }

    #[test]
    fn image_sums_resolve_tiny_values() {
        let c = Manifold::Circle;
        let p = heat_image_sum(&c, 0.05, &Point::angle(0.0), &Point::angle(PI)).unwrap();
        let want = 2.0 * (-PI * PI / 0.2).exp() / (0.2 * PI).sqrt();
        assert!((p / want - 1.0).abs() < 1e-12);
        let s3 = Manifold::sphere(4).unwrap();
        let base = crate::spectra::base_point(&s3);
        let q = heat_image_sum(&s3, 0.05, &base, &point_at_distance(&s3, PI)).unwrap();
        assert!(q > 0.0 && q < 1e-15);
    }
}
