//! Kernel evaluation: truncated spectral sums with certified tails, closed
//! forms on the circle and on `R^n`, Abel summation below the RKHS threshold,
//! and spectral powers `K^r`.

mod abel;
mod closed;
mod heat;
mod spectral;

pub use abel::{abel_kernel, abel_sequence, AbelEstimate};
pub use closed::{
    euclidean_radial_integral, has_circle_closed_form, scaled_circle_closed_form, sobolev_closed_circle,
    sobolev_euclidean, sobolev_half_circle_at_log_separation,
};
pub use heat::{has_heat_image_sum, heat_image_sum};
pub use spectral::{
    heat_kernel, kernel_power, levels_for_tail, sobolev_kernel, tail_bound as spectral_tail_bound, SpectralKernel,
};

use crate::error::{Error, Result};
use crate::spectra::{Geometry, Manifold, Point, Zonal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Spectral weight `w(λ_ℓ)` of a Sobolev-type kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    /// `(1 + λ)^{-s}`, the Bessel-potential weight.
    #[default]
    Bessel,
    /// `(1 + λ^s)^{-1}`.
    InversePower,
    /// `1` on constants, `λ^{-s}` elsewhere (the operator `A_s` squared).
    Riesz,
    /// `vol(M)` on constants, `λ^{-s}` elsewhere, so the constant term of the
    /// kernel is 1. On the unit circle this is `1 + (1/π) Σ k^{-2s} cos kδ`.
    Fourier,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Family {
    Sobolev {
        s: f64,
    },
    Heat {
        t: f64,
    },
    /// `K_s^r`: the weight of `K_s` raised to the power `r`.
    Power {
        s: f64,
        r: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TruncationPolicy {
    FixedLevels(usize),
    /// Smallest level count whose certified tail is at most `eps`.
    TailBound {
        eps: f64,
        max_levels: usize,
    },
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy::TailBound {
            eps: 1e-8,
            max_levels: 1 << 22,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Extrapolation {
    None,
    /// Iterated Aitken Δ² on the sequence of means.
    Aitken,
    /// Polynomial extrapolation in `1 - t` to `t = 1`. The means are analytic
    /// in `1 - t` with a radius of about the geodesic separation, so this is
    /// stable once the `t`-sequence starts inside that radius.
    #[default]
    Richardson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbelPolicy {
    pub t_sequence: Vec<f64>,
    pub extrapolation: Extrapolation,
    /// Convergence is declared when the last two extrapolants differ by less.
    pub tolerance: f64,
    /// Certified tail of each inner series `Σ_ℓ t^ℓ …`.
    pub inner_eps: f64,
    pub max_levels: usize,
}

impl Default for AbelPolicy {
    fn default() -> Self {
        Self::geometric(3, 14)
    }
}

impl AbelPolicy {
    /// `t_j = 1 - 2^{-j}` for `j = first..=last`.
    pub fn geometric(first: i32, last: i32) -> Self {
        Self {
            t_sequence: (first..=last).map(|j| 1.0 - 2f64.powi(-j)).collect(),
            extrapolation: Extrapolation::default(),
            tolerance: 1e-6,
            inner_eps: 1e-13,
            max_levels: 1 << 28,
        }
    }

    /// Policy adapted to a separation `θ`: the sequence starts once `1 - t`
    /// is well below `θ`, where the Abel means are smooth in `1 - t`.
    /// Separations above `1/8` get the default `j = 3..=14`.
    pub fn for_separation(theta: f64) -> Self {
        let first = ((1.0 / theta).log2().ceil() as i32 + 3).max(3);
        Self::geometric(first, (first + 9).max(14))
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let increasing = self.t_sequence.windows(2).all(|w| w[0] < w[1]);
        let in_range = self.t_sequence.iter().all(|t| *t > 0.0 && *t < 1.0);
        if self.t_sequence.is_empty() || !increasing || !in_range {
            return Err(Error::InvalidInput(
                "Abel t-sequence must be nonempty, strictly increasing and inside (0, 1)".into(),
            ));
        }
        if !(self.tolerance > 0.0) || !(self.inner_eps > 0.0) {
            return Err(Error::InvalidInput("Abel tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: Family,
    pub weighting: Weighting,
    pub truncation: TruncationPolicy,
    pub abel: Option<AbelPolicy>,
}

impl KernelSpec {
    pub fn new(family: Family) -> Self {
        Self {
            family,
            weighting: Weighting::default(),
            truncation: TruncationPolicy::default(),
            abel: None,
        }
    }

    pub fn sobolev(s: f64) -> Self {
        Self::new(Family::Sobolev { s })
    }

    pub fn heat(t: f64) -> Self {
        Self::new(Family::Heat { t })
    }

    pub fn power(s: f64, r: f64) -> Self {
        Self::new(Family::Power { s, r })
    }

    pub fn with_weighting(mut self, weighting: Weighting) -> Self {
        self.weighting = weighting;
        self
    }

    pub fn with_truncation(mut self, truncation: TruncationPolicy) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn with_levels(self, levels: usize) -> Self {
        self.with_truncation(TruncationPolicy::FixedLevels(levels))
    }

    pub fn with_tail_bound(self, eps: f64) -> Self {
        let max_levels = match self.truncation {
            TruncationPolicy::TailBound { max_levels, .. } => max_levels,
            TruncationPolicy::FixedLevels(_) => 1 << 22,
        };
        self.with_truncation(TruncationPolicy::TailBound { eps, max_levels })
    }

    pub fn with_abel(mut self, policy: AbelPolicy) -> Self {
        self.abel = Some(policy);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.family {
            Family::Sobolev { s } => s > 0.0 && s.is_finite(),
            Family::Heat { t } => t > 0.0 && t.is_finite(),
            Family::Power { s, r } => s > 0.0 && s.is_finite() && r > 0.0 && r <= 1.0,
        };
        if !ok {
            return Err(Error::InvalidInput(format!(
                "invalid kernel parameters {:?} (need s > 0, t > 0, r in (0, 1])",
                self.family
            )));
        }
        match self.truncation {
            TruncationPolicy::TailBound { eps, .. } if !(eps > 0.0) => {
                return Err(Error::InvalidInput("tail bound must be positive".into()))
            }
            _ => {}
        }
        if let Some(abel) = &self.abel {
            abel.validate()?;
        }
        Ok(())
    }

    /// Smoothness index governing the decay `w_ℓ = O(ℓ^{-2σ})`; `None` for heat.
    pub fn sigma(&self) -> Option<f64> {
        match self.family {
            Family::Sobolev { s } => Some(s),
            Family::Power { s, r } => Some(s * r),
            Family::Heat { .. } => None,
        }
    }

    /// Whether the series converges on the diagonal of `manifold`.
    pub fn in_rkhs_regime(&self, manifold: &Manifold) -> bool {
        match self.sigma() {
            None => true,
            Some(sigma) => sigma > manifold.rkhs_threshold(),
        }
    }

    /// `w(λ_ℓ)` on `geometry`.
    pub fn weight(&self, geometry: &Geometry, ell: usize) -> f64 {
        let lambda = geometry.eigenvalue(ell);
        match self.family {
            Family::Heat { t } => (-t * lambda).exp(),
            Family::Sobolev { s } => base_weight(self.weighting, s, lambda, ell, geometry),
            Family::Power { s, r } => {
                let w = base_weight(self.weighting, s, lambda, ell, geometry);
                if r == 1.0 {
                    w
                } else {
                    w.powf(r)
                }
            }
        }
    }
}

fn base_weight(weighting: Weighting, s: f64, lambda: f64, ell: usize, geometry: &Geometry) -> f64 {
    match weighting {
        Weighting::Bessel => pow(1.0 + lambda, -s),
        Weighting::InversePower => 1.0 / (1.0 + pow(lambda, s)),
        Weighting::Riesz | Weighting::Fourier if ell == 0 => match weighting {
            Weighting::Fourier => geometry.volume(),
            _ => 1.0,
        },
        Weighting::Riesz | Weighting::Fourier => pow(lambda, -s),
    }
}

/// `x^e` with cheap paths for the exponents that dominate the test workload.
#[inline]
fn pow(x: f64, e: f64) -> f64 {
    if e == 1.0 {
        x
    } else if e == -1.0 {
        1.0 / x
    } else if e == 0.5 {
        x.sqrt()
    } else if e == -0.5 {
        1.0 / x.sqrt()
    } else if e == 2.0 {
        x * x
    } else if e == -2.0 {
        1.0 / (x * x)
    } else {
        x.powf(e)
    }
}

/// A kernel value with the certified bound on the neglected spectral tail
/// (zero for closed forms).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValue {
    pub value: f64,
    pub tail: f64,
}

impl KernelValue {
    pub fn exact(value: f64) -> Self {
        Self { value, tail: 0.0 }
    }
}

/// How an [`Evaluator`] computes its values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Spectral,
    Abel,
}

/// A kernel prepared for repeated evaluation on one manifold.
///
/// Closed forms are preferred when they exist; otherwise the spectral
/// coefficients are precomputed once. Below the RKHS threshold the Abel
/// route is used off the diagonal (if the `KernelSpec` carries an Abel policy).
#[derive(Debug, Clone)]
pub struct Evaluator {
    manifold: Manifold,
    spec: KernelSpec,
    route: Route,
}

#[derive(Debug, Clone)]
enum Route {
    Closed,
    Spectral(SpectralKernel),
    Abel,
}

impl Evaluator {
    pub fn new(manifold: Manifold, spec: KernelSpec) -> Result<Self> {
        spec.validate()?;
        let route = match manifold {
            Manifold::Euclidean { .. } => {
                if spec.weighting != Weighting::Bessel && !matches!(spec.family, Family::Heat { .. }) {
                    return Err(Error::InvalidInput(
                        "only the Bessel weighting has a closed form on R^n".into(),
                    ));
                }
                Route::Closed
            }
            Manifold::Circle if has_circle_closed_form(&spec) => Route::Closed,
            _ if matches!(spec.family, Family::Heat { t } if has_heat_image_sum(&manifold, t)) => Route::Closed,
            _ if !spec.in_rkhs_regime(&manifold) => {
                if spec.abel.is_none() {
                    return Err(Error::Divergence(format!(
                        "{:?} is below the RKHS threshold of {manifold}; off-diagonal values need Abel summation",
                        spec.family
                    )));
                }
                Route::Abel
            }
            _ => Route::Spectral(SpectralKernel::new(manifold.geometry()?, &spec)?),
        };
        Ok(Self { manifold, spec, route })
    }

    /// Prepare the plain spectral route even where a closed form exists.
    pub fn spectral(manifold: Manifold, spec: KernelSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            manifold,
            route: Route::Spectral(SpectralKernel::new(manifold.geometry()?, &spec)?),
            spec,
        })
    }

    /// Force the Abel route on a compact manifold. Without an explicit policy
    /// on the `KernelSpec`, each pair gets the policy adapted to its separation.
    pub fn abel(manifold: Manifold, spec: KernelSpec) -> Result<Self> {
        spec.validate()?;
        manifold.geometry()?;
        Ok(Self {
            manifold,
            spec,
            route: Route::Abel,
        })
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn method(&self) -> Method {
        match self.route {
            Route::Closed => Method::ClosedForm,
            Route::Spectral(_) => Method::Spectral,
            Route::Abel => Method::Abel,
        }
    }

    pub fn eval(&self, a: &Point, b: &Point) -> Result<KernelValue> {
        match &self.route {
            Route::Closed => match (self.manifold, self.spec.family) {
                (Manifold::Euclidean { .. }, _) => euclidean_value(&self.manifold, &self.spec, a, b),
                (_, Family::Heat { t }) => Ok(KernelValue::exact(heat_image_sum(&self.manifold, t, a, b)?)),
                (Manifold::Circle, _) => Ok(KernelValue::exact(sobolev_closed_circle(&self.spec, a, b)?)),
                (Manifold::Sphere { .. }, _) => unreachable!("no Sobolev closed form on spheres"),
            },
            Route::Spectral(kernel) => kernel.eval(&Zonal::between(&self.manifold, a, b)?),
            Route::Abel => {
                let est = abel_kernel(&self.manifold, &self.spec, a, b)?;
                Ok(KernelValue {
                    value: est.value,
                    tail: est.difference,
                })
            }
        }
    }
}

fn euclidean_value(manifold: &Manifold, spec: &KernelSpec, a: &Point, b: &Point) -> Result<KernelValue> {
    a.validate(manifold)?;
    b.validate(manifold)?;
    let (Point::Euclidean(x), Point::Euclidean(y)) = (a, b) else {
        unreachable!("validated")
    };
    let n = x.len();
    match spec.family {
        Family::Heat { t } => {
            let rho2: f64 = x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum();
            Ok(KernelValue::exact(
                (4.0 * PI * t).powf(-(n as f64) / 2.0) * (-rho2 / (4.0 * t)).exp(),
            ))
        }
        Family::Sobolev { s } => Ok(KernelValue::exact(sobolev_euclidean(n, s, x, y)?)),
        Family::Power { s, r } => Ok(KernelValue::exact(sobolev_euclidean(n, s * r, x, y)?)),
    }
}

/// Evaluate `spec` at `(a, b)`, preferring closed forms.
pub fn evaluate(manifold: &Manifold, spec: &KernelSpec, a: &Point, b: &Point) -> Result<KernelValue> {
    Evaluator::new(*manifold, spec.clone())?.eval(a, b)
}
