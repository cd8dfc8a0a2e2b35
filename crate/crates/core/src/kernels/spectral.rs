use super::{Family, KernelSpec, KernelValue, TruncationPolicy};
use crate::error::{Error, Result};
use crate::specfun::NormalizedGegenbauer;
use crate::spectra::{Geometry, Manifold, Point, Zonal};

/// Steps between exact re-evaluations of `cos ℓδ` in the rotation recurrence.
const RESYNC: usize = 128;

/// Certified bound on `Σ_{ℓ > levels} |w_ℓ Π_ℓ(m, m')|`, uniform in the points.
///
/// Power-law weights `w_ℓ ≤ κ^{-σ} ℓ^{-2σ}` are compared with
/// `∫_L^∞ x^{d-2-2σ} dx` using `d_ℓ ≤ c_L ℓ^{d-2}` for `ℓ > L`, where
/// `c_L = d_{L+1}/(L+1)^{d-2}` is exact because `d_ℓ/ℓ^{d-2}` decreases.
/// Heat weights use the ratio of consecutive terms, which decreases in `ℓ`.
pub fn tail_bound(spec: &KernelSpec, geometry: &Geometry, levels: usize) -> f64 {
    let d = geometry.spectral_dim() as f64;
    let omega = geometry.volume();
    match spec.family {
        Family::Heat { .. } => {
            let term = spec.weight(geometry, levels + 1) * geometry.level_diagonal(levels + 1);
            let q = spec.weight(geometry, levels + 2) / spec.weight(geometry, levels + 1)
                * geometry.multiplicity(levels + 2)
                / geometry.multiplicity(levels + 1);
            geometric_tail(term, q)
        }
        Family::Sobolev { .. } | Family::Power { .. } => {
            let sigma = spec.sigma().expect("power-law family");
            let excess = 2.0 * sigma - d + 1.0;
            if excess <= 0.0 || levels == 0 {
                return f64::INFINITY;
            }
            let l = levels as f64;
            let c = geometry.multiplicity(levels + 1) / (l + 1.0).powf(d - 2.0);
            let scale = geometry.eigenvalue_floor().powf(-sigma);
            scale * c / omega * l.powf(-excess) / excess
        }
    }
}

/// Smallest number of levels whose certified tail is at most `eps`.
pub fn levels_for_tail(spec: &KernelSpec, geometry: &Geometry, eps: f64, max_levels: usize) -> Result<usize> {
    levels_for(eps, max_levels, |l| tail_bound(spec, geometry, l))
}

/// `Σ_{k≥0} term·q^k`, or infinity when the ratio does not contract.
pub(crate) fn geometric_tail(term: f64, q: f64) -> f64 {
    if term == 0.0 {
        0.0
    } else if q.is_finite() && q < 1.0 {
        term / (1.0 - q)
    } else {
        f64::INFINITY
    }
}

/// Smallest `L ≤ max_levels` with `tail(L) ≤ eps`, assuming `tail` decreases.
pub(crate) fn levels_for(eps: f64, max_levels: usize, tail: impl Fn(usize) -> f64) -> Result<usize> {
    if tail(0) <= eps {
        return Ok(0);
    }
    let mut hi = 1usize;
    while tail(hi) > eps {
        if hi >= max_levels {
            return Err(Error::TruncationInsufficient { eps, max_levels });
        }
        hi = (hi * 2).min(max_levels);
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if tail(mid) <= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// A truncated spectral sum `Σ_{ℓ≤L} w_ℓ Π_ℓ` with precomputed coefficients
/// `w_ℓ d_ℓ / vol`.
#[derive(Debug, Clone)]
pub struct SpectralKernel {
    geometry: Geometry,
    coeffs: Vec<f64>,
    diagonal: f64,
    tail: f64,
}

impl SpectralKernel {
    /// Resolve the truncation policy and precompute the coefficients.
    ///
    /// Fails with a divergence error below the RKHS threshold, where no
    /// uniform tail bound exists.
    pub fn new(geometry: Geometry, spec: &KernelSpec) -> Result<Self> {
        spec.validate()?;
        if let Some(sigma) = spec.sigma() {
            if 2.0 * sigma <= geometry.intrinsic_dim() as f64 {
                return Err(Error::Divergence(format!(
                    "smoothness {sigma} does not exceed half the dimension {}; the series diverges on the diagonal",
                    geometry.intrinsic_dim()
                )));
            }
        }
        let levels = match spec.truncation {
            TruncationPolicy::FixedLevels(l) => l,
            TruncationPolicy::TailBound { eps, max_levels } => {
                levels_for(eps, max_levels, |l| tail_bound(spec, &geometry, l))?
            }
        };
        let tail = tail_bound(spec, &geometry, levels);
        Ok(Self::assemble(geometry, spec, levels, tail))
    }

    /// The kernel truncated to levels `ℓ ≤ levels`, a smooth kernel for any
    /// smoothness. The reported tail is infinite when the full series
    /// diverges.
    pub fn band_limited(geometry: Geometry, spec: &KernelSpec, levels: usize) -> Result<Self> {
        spec.validate()?;
        let convergent = spec
            .sigma()
            .is_none_or(|sigma| 2.0 * sigma > geometry.intrinsic_dim() as f64);
        let tail = if convergent {
            tail_bound(spec, &geometry, levels)
        } else {
            f64::INFINITY
        };
        Ok(Self::assemble(geometry, spec, levels, tail))
    }

    fn assemble(geometry: Geometry, spec: &KernelSpec, levels: usize, tail: f64) -> Self {
        let inv_volume = 1.0 / geometry.volume();
        let coeffs: Vec<f64> = (0..=levels)
            .map(|l| spec.weight(&geometry, l) * geometry.multiplicity(l) * inv_volume)
            .collect();
        let diagonal = coeffs.iter().rev().sum();
        Self {
            geometry,
            coeffs,
            diagonal,
            tail,
        }
    }

    /// Highest level included.
    pub fn levels(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    /// `w_ℓ d_ℓ / vol`, the diagonal contribution of each level.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, zonal: &Zonal) -> Result<KernelValue> {
        let value = match (self.geometry, *zonal) {
            _ if zonal.is_diagonal() => self.diagonal,
            (Geometry::Circle { .. }, Zonal::Angle(delta)) => cosine_sum(&self.coeffs, delta),
            (Geometry::Sphere { dim }, Zonal::Cosine(z)) => {
                let nu = dim as f64 / 2.0 - 1.0;
                let mut sum = 0.0;
                for (c, b) in self.coeffs.iter().zip(NormalizedGegenbauer::new(nu, z)?) {
                    sum += c * b;
                }
                sum
            }
            _ => {
                return Err(Error::InvalidInput(
                    "zonal argument does not match the kernel geometry".into(),
                ))
            }
        };
        Ok(KernelValue { value, tail: self.tail })
    }
}

/// `Σ_ℓ c_ℓ cos(ℓδ)` by a rotation recurrence, resynchronized periodically.
pub(crate) fn cosine_sum(coeffs: &[f64], delta: f64) -> f64 {
    let (step_sin, step_cos) = delta.sin_cos();
    let mut sum = 0.0;
    for (block, chunk) in coeffs.chunks(RESYNC).enumerate() {
        let (mut s, mut c) = ((block * RESYNC) as f64 * delta).sin_cos();
        for coeff in chunk {
            sum += coeff * c;
            let next_c = c * step_cos - s * step_sin;
            s = s * step_cos + c * step_sin;
            c = next_c;
        }
    }
    sum
}

fn require_family(spec: &KernelSpec, want: &'static str) -> Result<()> {
    let ok = matches!(
        (spec.family, want),
        (Family::Sobolev { .. }, "sobolev") | (Family::Heat { .. }, "heat") | (Family::Power { .. }, "power")
    );
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "expected a {want} kernel spec, got {:?}",
            spec.family
        )))
    }
}

/// Sobolev kernel `Σ_ℓ w_ℓ Π_ℓ(m, m')` with its certified tail.
///
/// Below the RKHS threshold the diagonal diverges; off the diagonal the value
/// is obtained by Abel summation when `spec.abel` is set.
pub fn sobolev_kernel(manifold: &Manifold, spec: &KernelSpec, a: &Point, b: &Point) -> Result<KernelValue> {
    require_family(spec, "sobolev")?;
    regime_aware(manifold, spec, a, b)
}

fn regime_aware(manifold: &Manifold, spec: &KernelSpec, a: &Point, b: &Point) -> Result<KernelValue> {
    let geometry = manifold.geometry()?;
    let zonal = Zonal::between(manifold, a, b)?;
    if !spec.in_rkhs_regime(manifold) {
        if zonal.is_diagonal() {
            return Err(Error::Divergence(format!(
                "the kernel diverges on the diagonal of {manifold} for {:?}",
                spec.family
            )));
        }
        if spec.abel.is_some() {
            let est = super::abel_kernel(manifold, spec, a, b)?;
            return Ok(KernelValue {
                value: est.value,
                tail: est.difference,
            });
        }
    }
    SpectralKernel::new(geometry, spec)?.eval(&zonal)
}

/// Heat kernel `p(m, m', t)`: spectral on compact manifolds, Gaussian on `R^n`.
pub fn heat_kernel(
    manifold: &Manifold,
    t: f64,
    truncation: TruncationPolicy,
    a: &Point,
    b: &Point,
) -> Result<KernelValue> {
    let spec = KernelSpec::heat(t).with_truncation(truncation);
    match manifold {
        Manifold::Euclidean { .. } => super::evaluate(manifold, &spec, a, b),
        _ => SpectralKernel::new(manifold.geometry()?, &spec)?.eval(&Zonal::between(manifold, a, b)?),
    }
}

/// `K_s^r(m, m') = Σ_ℓ w_ℓ^r Π_ℓ(m, m')` for the Sobolev spec `base`, with the
/// same regime rules as [`sobolev_kernel`].
pub fn kernel_power(manifold: &Manifold, base: &KernelSpec, r: f64, a: &Point, b: &Point) -> Result<KernelValue> {
    require_family(base, "sobolev")?;
    let Family::Sobolev { s } = base.family else {
        unreachable!()
    };
    let spec = KernelSpec {
        family: Family::Power { s, r },
        ..base.clone()
    };
    regime_aware(manifold, &spec, a, b)
}
