use super::spectral::{geometric_tail, levels_for};
use super::{AbelPolicy, Extrapolation, KernelSpec};
use crate::accel::{aitken_iterated, richardson};
use crate::error::{Error, Result};
use crate::spectra::{Geometry, Manifold, Point, ProjectorStream, Zonal};
use serde::Serialize;

/// Result of Abel summation with extrapolation to `t = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbelEstimate {
    pub value: f64,
    /// `|e_N - e_{N-1}|` for the last two extrapolants.
    pub difference: f64,
    /// Raw `(t, K_{s,t})` pairs.
    pub sequence: Vec<(f64, f64)>,
    /// Extrapolants built from the first `3, 4, …, N` terms of the sequence.
    pub extrapolants: Vec<f64>,
    /// Highest level summed for the largest `t`.
    pub levels: usize,
}

/// Certified bound on `Σ_{ℓ>L} w_ℓ t^ℓ |Π_ℓ|`; the terms have a decreasing
/// ratio bounded by `t d_{L+2}/d_{L+1}` because `w_ℓ` does not increase for `ℓ ≥ 1`.
fn abel_tail(spec: &KernelSpec, geometry: &Geometry, t: f64, levels: usize) -> f64 {
    let next = levels + 1;
    let term = spec.weight(geometry, next) * t.powf(next as f64) * geometry.level_diagonal(next);
    let q = t * geometry.multiplicity(next + 1) / geometry.multiplicity(next);
    geometric_tail(term, q)
}

/// The `KernelSpec` policy, or one adapted to the separation of the pair.
fn policy(spec: &KernelSpec, zonal: &Zonal) -> AbelPolicy {
    spec.abel.clone().unwrap_or_else(|| {
        let theta = match *zonal {
            Zonal::Angle(d) => d,
            Zonal::Cosine(z) => z.clamp(-1.0, 1.0).acos(),
        };
        if theta > 0.0 {
            AbelPolicy::for_separation(theta)
        } else {
            AbelPolicy::default()
        }
    })
}

fn sequence_with_levels(
    manifold: &Manifold,
    spec: &KernelSpec,
    a: &Point,
    b: &Point,
) -> Result<(Vec<(f64, f64)>, usize)> {
    spec.validate()?;
    let geometry = manifold.geometry()?;
    let zonal = Zonal::between(manifold, a, b)?;
    let policy = policy(spec, &zonal);
    policy.validate()?;
    let levels: Vec<usize> = policy
        .t_sequence
        .iter()
        .map(|&t| {
            levels_for(policy.inner_eps, policy.max_levels, |l| {
                abel_tail(spec, &geometry, t, l)
            })
        })
        .collect::<Result<_>>()?;
    let top = *levels.iter().max().expect("nonempty");
    let ts = &policy.t_sequence;
    let mut sums = vec![0.0; ts.len()];
    let mut powers = vec![1.0; ts.len()];
    for term in ProjectorStream::new(geometry, zonal)?.take(top + 1) {
        let base = spec.weight(&geometry, term.ell) * term.projector;
        for j in 0..ts.len() {
            if term.ell <= levels[j] {
                sums[j] += base * powers[j];
                powers[j] *= ts[j];
            }
        }
    }
    Ok((ts.iter().copied().zip(sums).collect(), top))
}

/// Raw Abel means `K_{s,t}(m, m') = Σ_ℓ w_ℓ t^ℓ Π_ℓ(m, m')` for every `t` of
/// the policy (the `KernelSpec` one, or one adapted to the separation). Allowed on the diagonal,
/// where it exhibits the growth of a divergent kernel.
pub fn abel_sequence(manifold: &Manifold, spec: &KernelSpec, a: &Point, b: &Point) -> Result<Vec<(f64, f64)>> {
    Ok(sequence_with_levels(manifold, spec, a, b)?.0)
}

/// Abel-summed kernel: `lim_{t↑1} K_{s,t}(m, m')`, extrapolated with
/// the policy's method (Richardson by default) on its `t`-sequence.
///
/// Fails with a divergence error on the diagonal below the RKHS threshold,
/// and with a non-convergence error when the last two extrapolants differ
/// by more than the policy tolerance.
pub fn abel_kernel(manifold: &Manifold, spec: &KernelSpec, a: &Point, b: &Point) -> Result<AbelEstimate> {
    if !spec.in_rkhs_regime(manifold) && Zonal::between(manifold, a, b)?.is_diagonal() {
        return Err(Error::Divergence(format!(
            "the Abel means of {:?} grow without bound on the diagonal",
            spec.family
        )));
    }
    let policy = policy(spec, &Zonal::between(manifold, a, b)?);
    let (sequence, levels) = sequence_with_levels(manifold, spec, a, b)?;
    let xs: Vec<f64> = sequence.iter().map(|p| p.1).collect();
    let extrapolants: Vec<f64> = match policy.extrapolation {
        Extrapolation::Aitken => (3..=xs.len()).map(|n| aitken_iterated(&xs[..n])).collect(),
        Extrapolation::Richardson => {
            let hs: Vec<f64> = sequence.iter().map(|p| 1.0 - p.0).collect();
            (3..=xs.len()).map(|n| richardson(&hs[..n], &xs[..n])).collect()
        }
        Extrapolation::None => xs.clone(),
    };
    let (value, difference) = match extrapolants.as_slice() {
        [.., prev, last] => (*last, (last - prev).abs()),
        [only] => (*only, f64::INFINITY),
        [] => (*xs.last().expect("nonempty"), f64::INFINITY),
    };
    if !(difference < policy.tolerance) {
        return Err(Error::NonConvergence {
            difference,
            tolerance: policy.tolerance,
        });
    }
    Ok(AbelEstimate {
        value,
        difference,
        sequence,
        extrapolants,
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{sobolev_closed_circle, sobolev_kernel, Weighting};
    use std::f64::consts::PI;

    #[test]
    fn abel_limit_of_convergent_series_is_its_sum() {
        let spec = KernelSpec::sobolev(1.0)
            .with_weighting(Weighting::Fourier)
            .with_abel(AbelPolicy::default());
        let (a, b) = (Point::angle(0.0), Point::angle(PI / 2.0));
        let est = abel_kernel(&Manifold::Circle, &spec, &a, &b).unwrap();
        let closed = sobolev_closed_circle(&spec, &a, &b).unwrap();
        assert!((est.value - closed).abs() < 1e-8, "{} vs {closed}", est.value);
    }

    #[test]
    fn abel_reproduces_logarithmic_circle_kernel() {
        // Abel means of Σ cos(kδ)/k are -ln(1 - 2t cos δ + t²)/2 exactly
        let spec = KernelSpec::sobolev(0.5)
            .with_weighting(Weighting::Fourier)
            .with_abel(AbelPolicy::default());
        let delta = 1.3f64;
        let seq = abel_sequence(&Manifold::Circle, &spec, &Point::angle(0.0), &Point::angle(delta)).unwrap();
        for (t, k) in &seq {
            let exact = 1.0 - (1.0 - 2.0 * t * delta.cos() + t * t).ln() / (2.0 * PI);
            assert!((k - exact).abs() < 1e-11, "t = {t}");
        }
        let est = abel_kernel(&Manifold::Circle, &spec, &Point::angle(0.0), &Point::angle(delta)).unwrap();
        let exact = 1.0 - (2.0 * (1.0 - delta.cos())).ln() / (2.0 * PI);
        assert!((est.value - exact).abs() < 1e-9);
    }

    #[test]
    fn diagonal_abel_means_grow() {
        let s2 = Manifold::sphere(3).unwrap();
        let m = crate::spectra::base_point(&s2);
        let spec = KernelSpec::sobolev(1.0).with_weighting(Weighting::InversePower);
        let seq = abel_sequence(&s2, &spec, &m, &m).unwrap();
        assert!(seq.windows(2).all(|w| w[1].1 > w[0].1));
        assert!(matches!(abel_kernel(&s2, &spec, &m, &m), Err(Error::Divergence(_))));
        let spec = spec.with_abel(AbelPolicy::default());
        assert!(matches!(sobolev_kernel(&s2, &spec, &m, &m), Err(Error::Divergence(_))));
    }

    #[test]
    fn invalid_policies_are_rejected() {
        let mut policy = AbelPolicy::default();
        policy.t_sequence = vec![0.5, 0.4];
        let spec = KernelSpec::sobolev(0.5).with_abel(policy);
        let r = abel_kernel(&Manifold::Circle, &spec, &Point::angle(0.0), &Point::angle(1.0));
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn forced_abel_evaluator_adapts_to_each_pair() {
        let spec = KernelSpec::sobolev(0.5).with_weighting(Weighting::Fourier);
        let ev = crate::kernels::Evaluator::abel(Manifold::Circle, spec).unwrap();
        assert_eq!(ev.method(), crate::kernels::Method::Abel);
        for delta in [0.01f64, 0.3, 2.5] {
            let got = ev.eval(&Point::angle(0.0), &Point::angle(delta)).unwrap().value;
            let exact = 1.0 - (2.0 * (1.0 - delta.cos())).ln() / (2.0 * PI);
            assert!((got - exact).abs() < 1e-9, "delta = {delta}");
        }
        assert!(crate::kernels::Evaluator::abel(Manifold::euclidean(2).unwrap(), KernelSpec::sobolev(1.0)).is_err());
    }
}
