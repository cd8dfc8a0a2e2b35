//! Numerical verification suites.
//!
//! Each suite checks one family of identities (closed forms, heat-kernel
//! laws, positive semidefiniteness, ...) and returns a [`SuiteReport`] with
//! one [`Check`] per measured quantity. Every suite has a configuration
//! struct whose `Default` holds the standard sizes and tolerances;
//! [`run_suite`] runs a suite with those defaults.

use crate::curves::{CurveKernel, EmbeddedCurve, SpectrumConvention};
use crate::error::{Error, Result};
use crate::exec::{try_map_indexed, Execution};
use crate::fit::linear_fit;
use crate::kernels::{
    abel_kernel, abel_sequence, euclidean_radial_integral, heat_kernel, kernel_power, sobolev_closed_circle,
    sobolev_euclidean, sobolev_half_circle_at_log_separation, sobolev_kernel, AbelPolicy, Evaluator, KernelSpec,
    SpectralKernel, TruncationPolicy, Weighting,
};
use crate::quadrature::{apply_on_nodes, build_rule, l2_norm, try_integrate, QuadratureRule};
use crate::rkhs::{
    diffusion_norm_sq, gram_from_evaluator, heat_propagate, laplacian, norm_equivalence_bracket, rkhs_diag_test,
    sobolev_norm_sq, NormVariant, SpectralFunction,
};
use crate::spectra::{
    base_point, eigenfunction, eigenfunctions, point_at_distance, projector, sample_points, Geometry, Manifold, Point,
    Zonal,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

/// How a measured value is compared with its bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    AtMost,
    AtLeast,
    /// Boolean property; `measured` is 1 or 0.
    Holds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub relation: Relation,
    pub passed: bool,
}

/// Name of the wall-clock check; its measured value is not reproducible.
pub const RUNTIME_CHECK: &str = "runtime (s)";

impl Check {
    pub fn runtime(seconds: f64, max_seconds: f64) -> Self {
        Self::at_most(RUNTIME_CHECK, seconds, max_seconds)
    }

    pub fn is_runtime(&self) -> bool {
        self.name == RUNTIME_CHECK
    }

    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            bound,
            relation: Relation::AtMost,
            passed: measured <= bound,
        }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            bound,
            relation: Relation::AtLeast,
            passed: measured >= bound,
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            measured: if ok { 1.0 } else { 0.0 },
            bound: 1.0,
            relation: Relation::Holds,
            passed: ok,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        match self.relation {
            Relation::AtMost => write!(
                f,
                "{verdict} {}: {:.3e} <= {:.3e}",
                self.name, self.measured, self.bound
            ),
            Relation::AtLeast => write!(
                f,
                "{verdict} {}: {:.6e} >= {:.6e}",
                self.name, self.measured, self.bound
            ),
            Relation::Holds => write!(f, "{verdict} {}", self.name),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    ClosedForm,
    Abel,
    Counterexample,
    Addition,
    EigenId,
    Mass,
    Semigroup,
    Heat,
    Euclidean,
    Psd,
    SingularitySlope,
    Power,
    Curve,
    Norms,
}

impl Suite {
    pub const ALL: [Suite; 14] = [
        Suite::ClosedForm,
        Suite::Abel,
        Suite::Counterexample,
        Suite::Addition,
        Suite::EigenId,
        Suite::Mass,
        Suite::Semigroup,
        Suite::Heat,
        Suite::Euclidean,
        Suite::Psd,
        Suite::SingularitySlope,
        Suite::Power,
        Suite::Curve,
        Suite::Norms,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ClosedForm => "closedform",
            Suite::Abel => "abel",
            Suite::Counterexample => "counterexample",
            Suite::Addition => "addition",
            Suite::EigenId => "eigenid",
            Suite::Mass => "mass",
            Suite::Semigroup => "semigroup",
            Suite::Heat => "heat",
            Suite::Euclidean => "euclidean",
            Suite::Psd => "psd",
            Suite::SingularitySlope => "singularity-slope",
            Suite::Power => "power",
            Suite::Curve => "curve",
            Suite::Norms => "norms",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|suite| suite.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
            Error::InvalidInput(format!("unknown suite '{s}' (expected one of {})", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(f, "{verdict} suite {} ({:.2} s)", self.suite, self.seconds)?;
        for c in &self.checks {
            writeln!(f, "  {c}")?;
        }
        Ok(())
    }
}

/// Run `suite` with its default configuration.
pub fn run_suite(suite: Suite, exec: Execution) -> Result<SuiteReport> {
    match suite {
        Suite::ClosedForm => closed_form(&ClosedFormConfig::default(), exec),
        Suite::Abel => abel(&AbelConfig::default(), exec),
        Suite::Counterexample => counterexample(&CounterexampleConfig::default(), exec),
        Suite::Addition => addition(&AdditionConfig::default()),
        Suite::EigenId => eigen_identity(&EigenIdConfig::default(), exec),
        Suite::Mass => mass(&MassConfig::default(), exec),
        Suite::Semigroup => semigroup(&SemigroupConfig::default(), exec),
        Suite::Heat => heat(&HeatConfig::default(), exec),
        Suite::Euclidean => euclidean(&EuclideanConfig::default()),
        Suite::Psd => psd(&PsdConfig::default(), exec),
        Suite::SingularitySlope => singularity_slope(&SlopeConfig::default(), exec),
        Suite::Power => power(&PowerConfig::default(), exec),
        Suite::Curve => curve(&CurveConfig::default()),
        Suite::Norms => norms(&NormsConfig::default()),
    }
}

fn report(suite: Suite, start: Instant, checks: Vec<Check>) -> SuiteReport {
    SuiteReport {
        suite,
        checks,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0, |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) })
}

fn fourier(s: f64) -> KernelSpec {
    KernelSpec::sobolev(s).with_weighting(Weighting::Fourier)
}

fn random_pairs(manifold: &Manifold, n: usize, seed: u64) -> Vec<(Point, Point)> {
    let a = sample_points(manifold, n, seed);
    let b = sample_points(manifold, n, seed.wrapping_add(0x9e37_79b9));
    a.into_iter().zip(b).collect()
}

// --- circle closed forms -------------------------------------------------

#[derive(Debug, Clone)]
pub struct ClosedFormConfig {
    pub levels: usize,
    pub grid: usize,
    pub tolerance: f64,
    pub max_seconds: f64,
}

impl Default for ClosedFormConfig {
    fn default() -> Self {
        Self {
            levels: 1_000_000,
            grid: 1000,
            tolerance: 2e-6,
            max_seconds: 10.0,
        }
    }
}

/// Truncated spectral `K_1` on the circle against its closed form on a
/// uniform grid of separations in `[0, π]`.
pub fn closed_form(cfg: &ClosedFormConfig, exec: Execution) -> Result<SuiteReport> {
    let start = Instant::now();
    let spec = fourier(1.0).with_levels(cfg.levels);
    let kernel = SpectralKernel::new(Geometry::Circle { length: TAU }, &spec)?;
    let deltas: Vec<f64> = (0..cfg.grid)
        .map(|i| PI * i as f64 / (cfg.grid.max(2) - 1) as f64)
        .collect();
    let errors = try_map_indexed(exec, deltas.len(), |i| -> Result<f64> {
        let spectral = kernel.eval(&Zonal::Angle(deltas[i]))?.value;
        let closed = sobolev_closed_circle(&spec, &Point::angle(0.0), &Point::angle(deltas[i]))?;
        Ok(spectral - closed)
    })?;
    let worst = max_abs(errors);
    let seconds = start.elapsed().as_secs_f64();
    Ok(report(
        Suite::ClosedForm,
        start,
        vec![
            Check::at_most(
                format!("max |spectral - closed| over {} separations", cfg.grid),
                worst,
                cfg.tolerance,
            ),
            Check::at_most("error within the certified tail", worst, kernel.tail() + 1e-12),
            Check::runtime(seconds, cfg.max_seconds),
        ],
    ))
}

#[derive(Debug, Clone)]
pub struct AbelConfig {
    pub separations: usize,
    pub min_separation: f64,
    pub tolerance: f64,
    pub max_seconds: f64,
}

impl Default for AbelConfig {
    fn default() -> Self {
        Self {
            separations: 100,
            min_separation: 0.1,
            tolerance: 1e-6,
            max_seconds: 30.0,
        }
    }
}

/// Abel-summed `K_{1/2}` on the circle against its logarithmic closed form.
pub fn abel(cfg: &AbelConfig, exec: Execution) -> Result<SuiteReport> {
    let start = Instant::now();
    let spec = fourier(0.5);
    let n = cfg.separations.max(2);
    let errors = try_map_indexed(exec, n, |i| -> Result<f64> {
        let delta = cfg.min_separation + (PI - cfg.min_separation) * i as f64 / (n - 1) as f64;
        let (a, b) = (Point::angle(0.0), Point::angle(delta));
        Ok(abel_kernel(&Manifold::Circle, &spec, &a, &b)?.value - sobolev_closed_circle(&spec, &a, &b)?)
    })?;
    let worst = max_abs(errors);
    let seconds = start.elapsed().as_secs_f64();
    Ok(report(
        Suite::Abel,
        start,
        vec![
            Check::at_most(
                format!("max |abel - closed| over {n} separations"),
                worst,
                cfg.tolerance,
            ),
            Check::runtime(seconds, cfg.max_seconds),
        ],
    ))
}

#[derive(Debug, Clone)]
pub struct CounterexampleConfig {
    /// Size the diagonal values must exceed.
    pub threshold: f64,
    pub pairs: usize,
    pub seed: u64,
    pub abel_tolerance: f64,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        Self {
            threshold: 1e3,
            pairs: 200,
            seed: 7,
            abel_tolerance: 1e-6,
        }
    }
}

/// `K_{1/2}` on the circle is finite off the diagonal but unbounded near it,
/// so it does not extend to a kernel on `S^1 × S^1`.
pub fn counterexample(cfg: &CounterexampleConfig, exec: Execution) -> Result<SuiteReport> {
    let start = Instant::now();
    let circle = Manifold::Circle;
    let spec = fourier(0.5);
    let mut checks = Vec::new();

    // K(δ) = 1 - ln(2 sin(δ/2))/π passes the threshold once ln δ < -π(threshold - 1)
    let ln_delta = -TAU * cfg.threshold;
    let far = sobolev_half_circle_at_log_separation(ln_delta)?;
    checks.push(Check::at_least(
        format!("K at ln δ = {ln_delta:.1}"),
        far,
        cfg.threshold,
    ));

    let ladder: Vec<f64> = (1..=300)
        .map(|k| sobolev_closed_circle(&spec, &Point::angle(0.0), &Point::angle(10f64.powi(-k))))
        .collect::<Result<_>>()?;
    let increasing = ladder.windows(2).all(|w| w[1] > w[0]);
    checks.push(Check::holds("K(10^-k) strictly increasing for k = 1..300", increasing));
    // increments approach ln(10)/π once the O(δ²) correction is negligible
    let slopes_ok = ladder[3..]
        .windows(2)
        .all(|w| ((w[1] - w[0]) - 10f64.ln() / PI).abs() < 1e-9);
    checks.push(Check::holds("K(10^-(k+1)) - K(10^-k) = ln(10)/π for k >= 4", slopes_ok));

    let mut abel_err: f64 = 0.0;
    for delta in [1e-1, 1e-2] {
        let (a, b) = (Point::angle(0.0), Point::angle(delta));
        let policy = AbelPolicy::for_separation(delta);
        let abel = abel_kernel(&circle, &spec.clone().with_abel(policy), &a, &b)?.value;
        abel_err = abel_err.max((abel - sobolev_closed_circle(&spec, &a, &b)?).abs());
    }
    checks.push(Check::at_most(
        "Abel sum vs closed form near the diagonal",
        abel_err,
        cfg.abel_tolerance,
    ));

    // Abel means on the diagonal: 1 - ln(1 - t)/π
    let m = Point::angle(0.3);
    let diag = abel_sequence(&circle, &spec, &m, &m)?;
    let diag_err = max_abs(diag.iter().map(|(t, k)| k - (1.0 - (1.0 - t).ln() / PI)));
    checks.push(Check::at_most("diagonal Abel means vs 1 - ln(1-t)/π", diag_err, 1e-9));
    checks.push(Check::holds(
        "diagonal Abel means strictly increasing",
        diag.windows(2).all(|w| w[1].1 > w[0].1),
    ));

    let growth = rkhs_diag_test(&circle, &spec, &m, 4096)?;
    checks.push(Check::at_most(
        "diagonal partial sums grow like ln(L)/π",
        (growth.fitted_growth.unwrap_or(f64::NAN) - 1.0 / PI).abs(),
        1e-3,
    ));

    let evaluator = Evaluator::new(circle, spec.clone())?;
    checks.push(Check::holds(
        "diagonal evaluation is a divergence error",
        matches!(evaluator.eval(&m, &m), Err(Error::Divergence(_))),
    ));

    let pairs = random_pairs(&circle, cfg.pairs, cfg.seed);
    let sym = try_map_indexed(exec, pairs.len(), |i| -> Result<bool> {
        let (a, b) = &pairs[i];
        let ab = evaluator.eval(a, b)?.value;
        let ba = evaluator.eval(b, a)?.value;
        Ok(ab.is_finite() && ab.to_bits() == ba.to_bits())
    })?;
    checks.push(Check::holds(
        format!("off-diagonal values finite and symmetric on {} pairs", cfg.pairs),
        sym.into_iter().all(|x| x),
    ));
    Ok(report(Suite::Counterexample, start, checks))
}

// --- sphere harmonics ----------------------------------------------------

#[derive(Debug, Clone)]
pub struct AdditionConfig {
    pub max_level: usize,
    pub pairs: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub max_seconds: f64,
}

impl Default for AdditionConfig {
    fn default() -> Self {
        Self {
            max_level: 10,
            pairs: 100,
            seed: 11,
            tolerance: 1e-8,
            max_seconds: 5.0,
        }
    }
}

/// `Σ_k f_{ℓ,k}(a) f_{ℓ,k}(b)` from explicit real harmonics against the
/// zonal projector on `S^2` (and the circle).
pub fn addition(cfg: &AdditionConfig) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut checks = Vec::new();
    for manifold in [Manifold::sphere(3)?, Manifold::Circle] {
        let mut worst: f64 = 0.0;
        for (a, b) in random_pairs(&manifold, cfg.pairs, cfg.seed) {
            for ell in 0..=cfg.max_level {
                let fa = eigenfunctions(&manifold, ell, &a)?;
                let fb = eigenfunctions(&manifold, ell, &b)?;
                let brute: f64 = fa.iter().zip(&fb).map(|(x, y)| x * y).sum();
                worst = worst.max((brute - projector(&manifold, ell, &a, &b)?).abs());
            }
        }
        checks.push(Check::at_most(
            format!("{manifold}: max |Σ_k f f - Π_ℓ| for ℓ <= {}", cfg.max_level),
            worst,
            cfg.tolerance,
        ));
    }
    let seconds = start.elapsed().as_secs_f64();
    checks.push(Check::runtime(seconds, cfg.max_seconds));
    Ok(report(Suite::Addition, start, checks))
}

#[derive(Debug, Clone)]
pub struct EigenIdConfig {
    pub max_level: usize,
    pub s_values: Vec<f64>,
    pub tolerance: f64,
}

impl Default for EigenIdConfig {
    fn default() -> Self {
        Self {
            max_level: 10,
            s_values: vec![1.0, 2.0],
            tolerance: 1e-6,
        }
    }
}

/// Kernel values between all pairs of nodes.
fn node_kernel_matrix(exec: Execution, rule: &QuadratureRule, kernel: &SpectralKernel) -> Result<DMatrix<f64>> {
    let manifold = rule.manifold;
    let n = rule.len();
    let rows = try_map_indexed(exec, n, |i| -> Result<Vec<f64>> {
        (0..n)
            .map(|j| {
                Ok(kernel
                    .eval(&Zonal::between(&manifold, &rule.nodes[i], &rule.nodes[j])?)?
                    .value)
            })
            .collect()
    })?;
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// The quadrature integral operator of `K_s` acting on each eigenfunction
/// `f_{ℓ,k}` returns `(1 + λ_ℓ)^{-s} f_{ℓ,k}`.
///
/// The kernel is truncated at a fixed level above `max_level` and the rule
/// integrates every product exactly, so any error is the code's and not
/// the quadrature's.
pub fn eigen_identity(cfg: &EigenIdConfig, exec: Execution) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut checks = Vec::new();
    let setups = [
        (Manifold::Circle, 3 * cfg.max_level + 2, 8 * cfg.max_level.max(4)),
        (Manifold::sphere(3)?, cfg.max_level + 6, cfg.max_level + 6),
    ];
    for (manifold, kernel_levels, resolution) in setups {
        // exactness: kernel degree + ℓ must stay below the rule's degree
        let rule = build_rule(&manifold, resolution)?;
        let geometry = manifold.geometry()?;
        for &s in &cfg.s_values {
            let spec = KernelSpec::sobolev(s);
            let kernel = SpectralKernel::band_limited(geometry, &spec, kernel_levels)?;
            let matrix = node_kernel_matrix(exec, &rule, &kernel)?;
            let weights = DVector::from_column_slice(&rule.weights);
            let mut worst: f64 = 0.0;
            for ell in 0..=cfg.max_level {
                let mult = geometry.multiplicity(ell).round() as usize;
                let target = spec.weight(&geometry, ell);
                for k in 1..=mult {
                    let f = DVector::from_vec(
                        rule.nodes
                            .iter()
                            .map(|x| eigenfunction(&manifold, ell, k, x))
                            .collect::<Result<Vec<_>>>()?,
                    );
                    let lf = &matrix * f.component_mul(&weights);
                    let expected = &f * target;
                    let err = l2_norm(&rule, (lf - &expected).as_slice()) / l2_norm(&rule, expected.as_slice());
                    worst = worst.max(err);
                }
            }
            checks.push(Check::at_most(
                format!("{manifold} s={s}: max relative L2 error, ℓ <= {}", cfg.max_level),
                worst,
                cfg.tolerance,
            ));
        }
    }
    Ok(report(Suite::EigenId, start, checks))
}

// --- heat kernel ---------------------------------------------------------

fn heat_truncation() -> TruncationPolicy {
    TruncationPolicy::TailBound {
        eps: 1e-14,
        max_levels: 1 << 20,
    }
}

#[derive(Debug, Clone)]
pub struct MassConfig {
    pub times: Vec<f64>,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for MassConfig {
    fn default() -> Self {
        Self {
            times: vec![0.05, 0.3, 1.0, 5.0],
            tolerance: 1e-8,
            seed: 3,
        }
    }
}

/// `∫ p(m, m', t) dm' = 1`.
pub fn mass(cfg: &MassConfig, exec: Execution) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut checks = Vec::new();
    for (manifold, resolution) in [
        (Manifold::Circle, 96),
        (Manifold::sphere(3)?, 32),
        (Manifold::sphere(4)?, 24),
    ] {
        let rule = build_rule(&manifold, resolution)?;
        let m = sample_points(&manifold, 1, cfg.seed).remove(0);
        let mut worst: f64 = 0.0;
        for &t in &cfg.times {
            let total = try_integrate(exec, &rule, |x| {
                Ok(heat_kernel(&manifold, t, heat_truncation(), &m, x)?.value)
            })?;
            worst = worst.max((total - 1.0).abs());
        }
        checks.push(Check::at_most(
            format!("{manifold}: max |mass - 1|"),
            worst,
            cfg.tolerance,
        ));
    }
    Ok(report(Suite::Mass, start, checks))
}

#[derive(Debug, Clone)]
pub struct SemigroupConfig {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    pub pairs: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for SemigroupConfig {
    fn default() -> Self {
        Self {
            first: vec![0.3, 0.7],
            second: vec![0.5, 1.0],
            pairs: 8,
            seed: 5,
            tolerance: 1e-6,
        }
    }
}

/// `∫ p(m, m'', t) p(m'', m', s) dm'' = p(m, m', t + s)`.
pub fn semigroup(cfg: &SemigroupConfig, exec: Execution) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut checks = Vec::new();
    for (manifold, resolution) in [(Manifold::Circle, 64), (Manifold::sphere(3)?, 24)] {
        let rule = build_rule(&manifold, resolution)?;
        let geometry = manifold.geometry()?;
        let mut worst: f64 = 0.0;
        for &t in &cfg.first {
            for &s in &cfg.second {
                let kt = SpectralKernel::new(geometry, &KernelSpec::heat(t).with_truncation(heat_truncation()))?;
                let ks = SpectralKernel::new(geometry, &KernelSpec::heat(s).with_truncation(heat_truncation()))?;
                let kts = SpectralKernel::new(geometry, &KernelSpec::heat(t + s).with_truncation(heat_truncation()))?;
                for (a, b) in random_pairs(&manifold, cfg.pairs, cfg.seed) {
                    let composed = try_integrate(exec, &rule, |x| {
                        Ok(kt.eval(&Zonal::between(&manifold, &a, x)?)?.value
                            * ks.eval(&Zonal::between(&manifold, x, &b)?)?.value)
                    })?;
                    let direct = kts.eval(&Zonal::between(&manifold, &a, &b)?)?.value;
                    worst = worst.max((composed - direct).abs());
                }
            }
        }
        checks.push(Check::at_most(
            format!("{manifold}: max semigroup residual"),
            worst,
            cfg.tolerance,
        ));
    }
    Ok(report(Suite::Semigroup, start, checks))
}

#[derive(Debug, Clone)]
pub struct HeatConfig {
    pub pairs: usize,
    pub min_time: f64,
    pub max_time: f64,
    pub seed: u64,
    /// Allowed relative growth of the `L²` norm under the heat operator.
    pub contraction_slack: f64,
    /// Continuity is checked at `t = 2^{-j}` for `j = 1..=continuity_steps`.
    pub continuity_steps: i32,
    pub step: f64,
}

impl Default for HeatConfig {
    fn default() -> Self {
        Self {
            pairs: 1000,
            min_time: 0.05,
            max_time: 10.0,
            seed: 13,
            contraction_slack: 1e-8,
            continuity_steps: 10,
            step: 1e-3,
        }
    }
}

/// Positivity, `L²` contractivity, strong continuity at `t = 0` and the
/// heat equation `∂_t e^{-tΔ}f = -Δ e^{-tΔ}f`.
pub fn heat(cfg: &HeatConfig, exec: Execution) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut checks = Vec::new();

    for manifold in [Manifold::Circle, Manifold::sphere(4)?] {
        let pairs = random_pairs(&manifold, cfg.pairs, cfg.seed);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let times: Vec<f64> = (0..cfg.pairs)
            .map(|_| (cfg.min_time.ln() + rng.random::<f64>() * (cfg.max_time / cfg.min_time).ln()).exp())
            .collect();
        let values = try_map_indexed(exec, pairs.len(), |i| {
            Evaluator::new(manifold, KernelSpec::heat(times[i]))?.eval(&pairs[i].0, &pairs[i].1)
        })?;
        let min_value = values.iter().map(|v| v.value).fold(f64::INFINITY, f64::min);
        let tail_ratio = values.iter().map(|v| v.tail / v.value).fold(0.0, f64::max);
        checks.push(Check::holds(
            format!("{manifold}: p > 0 on {} random pairs (min {min_value:.3e})", cfg.pairs),
            min_value > 0.0,
        ));
        checks.push(Check::at_most(format!("{manifold}: max tail / value"), tail_ratio, 0.1));
    }

    // contractivity on node values of band-limited functions
    for (manifold, resolution) in [(Manifold::Circle, 64), (Manifold::sphere(3)?, 16)] {
        let rule = build_rule(&manifold, resolution)?;
        let mut worst = 0.0f64;
        for (i, t) in [0.1, 1.0].into_iter().enumerate() {
            let f = SpectralFunction::random(manifold, 4, cfg.seed + i as u64)?;
            let values: Vec<f64> = rule.nodes.iter().map(|x| f.eval(x)).collect::<Result<_>>()?;
            let kernel = SpectralKernel::new(
                manifold.geometry()?,
                &KernelSpec::heat(t).with_truncation(heat_truncation()),
            )?;
            let out = apply_on_nodes(
                exec,
                &rule,
                |a, b| Ok(kernel.eval(&Zonal::between(&manifold, a, b)?)?.value),
                &values,
            )?;
            worst = worst.max(l2_norm(&rule, &out) / l2_norm(&rule, &values));
        }
        checks.push(Check::at_most(
            format!("{manifold}: max ‖e^(-tΔ)f‖ / ‖f‖"),
            worst,
            1.0 + cfg.contraction_slack,
        ));
    }

    // continuity at t = 0: quadrature with the closed-form circle kernel
    let circle = Manifold::Circle;
    let rule = build_rule(&circle, 256)?;
    let f = SpectralFunction::random(circle, 5, cfg.seed)?;
    let values: Vec<f64> = rule.nodes.iter().map(|x| f.eval(x)).collect::<Result<_>>()?;
    let lambda_max = 25.0;
    let mut distances = Vec::new();
    for j in 1..=cfg.continuity_steps {
        let evaluator = Evaluator::new(circle, KernelSpec::heat(2f64.powi(-j)))?;
        let out = apply_on_nodes(exec, &rule, |a, b| Ok(evaluator.eval(a, b)?.value), &values)?;
        let diff: Vec<f64> = out.iter().zip(&values).map(|(o, v)| o - v).collect();
        distances.push(l2_norm(&rule, &diff));
    }
    checks.push(Check::holds(
        "circle: ‖e^(-tΔ)f - f‖ decreases as t = 2^-j ↓ 0",
        distances.windows(2).all(|w| w[1] < w[0]),
    ));
    let last_t = 2f64.powi(-cfg.continuity_steps);
    checks.push(Check::at_most(
        "circle: ‖e^(-tΔ)f - f‖ / (t λ_max ‖f‖) at the smallest t",
        distances.last().copied().unwrap_or(f64::NAN) / (last_t * lambda_max * l2_norm(&rule, &values)),
        1.0 + 1e-6,
    ));

    let sphere = Manifold::sphere(3)?;
    let g = SpectralFunction::random(sphere, 4, cfg.seed)?;
    let spectral_distances: Vec<f64> = (1..=cfg.continuity_steps)
        .map(|j| {
            let t = 2f64.powi(-j);
            g.weighted_norm_sq(|l| (1.0 - (-t * l).exp()).powi(2)).sqrt()
        })
        .collect();
    checks.push(Check::holds(
        "sphere:3: ‖e^(-tΔ)f - f‖ decreases as t = 2^-j ↓ 0",
        spectral_distances.windows(2).all(|w| w[1] < w[0]),
    ));

    // heat equation by centered differences in t
    let (t, h) = (0.5, cfg.step);
    for (manifold, max_level) in [(Manifold::Circle, 5usize), (sphere, 4)] {
        let f = SpectralFunction::random(manifold, max_level, cfg.seed + 1)?;
        let geometry = manifold.geometry()?;
        let lambda_max = geometry.eigenvalue(max_level);
        let forward = heat_propagate(&f, t + h);
        let backward = heat_propagate(&f, t - h);
        let rhs = laplacian(&heat_propagate(&f, t));
        let mut err = 0.0;
        for (idx, c) in rhs.coefficients() {
            let d = (forward.get(idx.level, idx.k) - backward.get(idx.level, idx.k)) / (2.0 * h) + c;
            err += d * d;
        }
        let rel = err.sqrt() / rhs.l2_norm_sq().sqrt();
        checks.push(Check::at_most(
            format!("{manifold}: heat-equation residual (Δt = {h})"),
            rel,
            1.05 * h * h * lambda_max * lambda_max / 6.0,
        ));
    }
    Ok(report(Suite::Heat, start, checks))
}

// --- Euclidean -----------------------------------------------------------

#[derive(Debug, Clone)]
pub struct EuclideanConfig {
    pub cases: Vec<(usize, f64)>,
    pub radii: Vec<f64>,
    pub tolerance: f64,
    pub yukawa_tolerance: f64,
}

impl Default for EuclideanConfig {
    fn default() -> Self {
        Self {
            cases: vec![(1, 1.0), (2, 1.5), (3, 1.0), (3, 2.0)],
            radii: vec![0.5, 1.0, 2.0],
            tolerance: 1e-6,
            yukawa_tolerance: 1e-10,
        }
    }
}

/// Modified-Bessel closed form against the radial Fourier integral.
pub fn euclidean(cfg: &EuclideanConfig) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut checks = Vec::new();
    for &(n, s) in &cfg.cases {
        let mut worst: f64 = 0.0;
        for &rho in &cfg.radii {
            let mut y = vec![0.0; n];
            y[0] = rho;
            let closed = sobolev_euclidean(n, s, &vec![0.0; n], &y)?;
            let integral = euclidean_radial_integral(n, s, rho)?;
            worst = worst.max((integral - closed).abs() / closed.abs());
        }
        checks.push(Check::at_most(
            format!("n={n} s={s}: relative |integral - closed|"),
            worst,
            cfg.tolerance,
        ));
    }
    let mut worst: f64 = 0.0;
    for &rho in &cfg.radii {
        let closed = sobolev_euclidean(3, 1.0, &[0.0; 3], &[rho, 0.0, 0.0])?;
        worst = worst.max((closed - (-rho).exp() / (4.0 * PI * rho)).abs());
    }
    checks.push(Check::at_most(
        "n=3 s=1: |K - e^(-ρ)/(4πρ)|",
        worst,
        cfg.yukawa_tolerance,
    ));
    Ok(report(Suite::Euclidean, start, checks))
}

// --- Gram matrices -------------------------------------------------------

#[derive(Debug, Clone)]
pub struct PsdConfig {
    pub sets: usize,
    pub min_size: usize,
    pub max_size: usize,
    pub seed: u64,
    /// Allowed negative eigenvalue relative to the trace.
    pub relative_tolerance: f64,
}

impl Default for PsdConfig {
    fn default() -> Self {
        Self {
            sets: 50,
            min_size: 2,
            max_size: 200,
            seed: 17,
            relative_tolerance: 1e-8,
        }
    }
}

/// Smallest Gram eigenvalue over seeded random point sets.
pub fn psd(cfg: &PsdConfig, exec: Execution) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut checks = Vec::new();
    for (manifold, s) in [
        (Manifold::Circle, 1.0),
        (Manifold::sphere(3)?, 2.0),
        (Manifold::sphere(5)?, 3.0),
    ] {
        let spec = KernelSpec::sobolev(s);
        let evaluator = Evaluator::new(manifold, spec.clone())?;
        let mut worst = f64::INFINITY;
        for set in 0..cfg.sets {
            let size = if cfg.sets > 1 {
                cfg.min_size + (cfg.max_size - cfg.min_size) * set / (cfg.sets - 1)
            } else {
                cfg.max_size
            };
            let points = sample_points(&manifold, size, cfg.seed + set as u64);
            let g = gram_from_evaluator(exec, &evaluator, &points)?;
            worst = worst.min(g.min_eig_bound / g.trace());
        }
        checks.push(Check::at_least(
            format!("{manifold} s={s}: min over {} sets of λ_min / trace", cfg.sets),
            worst,
            -cfg.relative_tolerance,
        ));
    }
    Ok(report(Suite::Psd, start, checks))
}

// --- singularity ---------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SlopeConfig {
    pub s_values: Vec<f64>,
    pub min_separation: f64,
    pub max_separation: f64,
    pub separations: usize,
    pub slope_tolerance: f64,
    pub abel_tolerance: f64,
    pub max_seconds: f64,
}

impl Default for SlopeConfig {
    fn default() -> Self {
        Self {
            s_values: vec![0.5, 0.75],
            min_separation: 5e-3,
            max_separation: 5e-2,
            separations: 8,
            slope_tolerance: 0.15,
            abel_tolerance: 1e-6,
            max_seconds: 300.0,
        }
    }
}

/// Abel-summed `K_s` on `S^2` near the diagonal.
fn near_diagonal_values(cfg: &SlopeConfig, s: f64, exec: Execution) -> Result<(Vec<f64>, Vec<f64>)> {
    let sphere = Manifold::sphere(3)?;
    let base = base_point(&sphere);
    let n = cfg.separations.max(2);
    let thetas: Vec<f64> = (0..n)
        .map(|i| cfg.min_separation * (cfg.max_separation / cfg.min_separation).powf(i as f64 / (n - 1) as f64))
        .collect();
    let values = try_map_indexed(exec, n, |i| -> Result<f64> {
        let spec = KernelSpec::sobolev(s)
            .with_weighting(Weighting::InversePower)
            .with_abel(AbelPolicy::for_separation(thetas[i]).with_tolerance(cfg.abel_tolerance));
        Ok(abel_kernel(&sphere, &spec, &base, &point_at_distance(&sphere, thetas[i]))?.value)
    })?;
    Ok((thetas, values))
}

/// Log–log slope of `K_s(θ)` against `θ` is `2s - 2` below the critical
/// smoothness; at `s = 1` the growth is logarithmic.
pub fn singularity_slope(cfg: &SlopeConfig, exec: Execution) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut checks = Vec::new();
    for &s in &cfg.s_values {
        let (thetas, values) = near_diagonal_values(cfg, s, exec)?;
        let x: Vec<f64> = thetas.iter().map(|t| t.ln()).collect();
        let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
        let fit = linear_fit(&x, &y)?;
        checks.push(Check::at_most(
            format!("s={s}: |slope - (2s-2)| (slope {:.4})", fit.slope),
            (fit.slope - (2.0 * s - 2.0)).abs(),
            cfg.slope_tolerance,
        ));
    }
    let (thetas, values) = near_diagonal_values(cfg, 1.0, exec)?;
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let power: Vec<f64> = thetas.iter().map(|t| t.ln()).collect();
    let logarithmic: Vec<f64> = thetas.iter().map(|t| (-t.ln()).ln()).collect();
    let power_fit = linear_fit(&power, &y)?;
    let log_fit = linear_fit(&logarithmic, &y)?;
    checks.push(Check::holds(
        format!(
            "s=1: logarithmic fit residual {:.3e} below power fit residual {:.3e}",
            log_fit.rss, power_fit.rss
        ),
        log_fit.rss < power_fit.rss,
    ));
    let seconds = start.elapsed().as_secs_f64();
    checks.push(Check::runtime(seconds, cfg.max_seconds));
    Ok(report(Suite::SingularitySlope, start, checks))
}

// --- kernel powers -------------------------------------------------------

#[derive(Debug, Clone)]
pub struct PowerConfig {
    pub pairs: usize,
    pub seed: u64,
    /// Spectral tail for the circle; also the Abel tolerance on `S^2`.
    pub tail: f64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        Self {
            pairs: 100,
            seed: 19,
            tail: 1e-6,
        }
    }
}

/// `K_2^{1/2} = K_1`: the spectral power of a kernel against the kernel of
/// the interpolated space.
pub fn power(cfg: &PowerConfig, exec: Execution) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut checks = Vec::new();

    let circle = Manifold::Circle;
    let base = KernelSpec::sobolev(2.0).with_tail_bound(cfg.tail);
    let target = KernelSpec::sobolev(1.0).with_tail_bound(cfg.tail);
    let pairs = random_pairs(&circle, cfg.pairs, cfg.seed);
    let excess = try_map_indexed(exec, pairs.len(), |i| -> Result<f64> {
        let (a, b) = &pairs[i];
        let p = kernel_power(&circle, &base, 0.5, a, b)?;
        let k = sobolev_kernel(&circle, &target, a, b)?;
        Ok((p.value - k.value).abs() - (p.tail + k.tail))
    })?;
    checks.push(Check::at_most(
        "circle: max |K_2^(1/2) - K_1| - shared tail",
        max_abs(excess.iter().map(|e| e.max(0.0))),
        1e-12,
    ));

    // s·r = 1 is the critical smoothness on S^2: both sides are Abel sums
    let sphere = Manifold::sphere(3)?;
    let pairs = random_pairs(&sphere, cfg.pairs, cfg.seed);
    let diffs = try_map_indexed(exec, pairs.len(), |i| -> Result<(f64, f64)> {
        let (a, b) = &pairs[i];
        let theta = crate::spectra::distance(&sphere, a, b)?;
        let policy = AbelPolicy::for_separation(theta).with_tolerance(cfg.tail);
        let p = kernel_power(&sphere, &KernelSpec::sobolev(2.0).with_abel(policy.clone()), 0.5, a, b)?;
        let k = sobolev_kernel(&sphere, &KernelSpec::sobolev(1.0).with_abel(policy), a, b)?;
        Ok(((p.value - k.value).abs(), p.tail + k.tail))
    })?;
    let worst = max_abs(diffs.iter().map(|d| d.0));
    checks.push(Check::at_most(
        "sphere:3: max |K_2^(1/2) - K_1| (Abel)",
        worst,
        cfg.tail,
    ));
    Ok(report(Suite::Power, start, checks))
}

// --- curves --------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct CurveConfig {
    pub semi_axes: (f64, f64),
    pub points: usize,
    pub tolerance: f64,
    pub length_tolerance: f64,
}

impl Default for CurveConfig {
    fn default() -> Self {
        Self {
            semi_axes: (2.0, 1.0),
            points: 30,
            tolerance: 1e-8,
            length_tolerance: 1e-7,
        }
    }
}

/// Adaptive Simpson quadrature, the arc-length oracle for [`curve`].
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// The pullback of the circle kernel `K_1` to an ellipse equals the kernel
/// of the circle with the same length evaluated at arc-length separations.
pub fn curve(cfg: &CurveConfig) -> Result<SuiteReport> {
    let start = Instant::now();
    let (a, b) = cfg.semi_axes;
    let ellipse = EmbeddedCurve::ellipse(a, b)?;
    let speed = |t: f64| (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt();
    let oracle_length = adaptive_simpson(&speed, 0.0, TAU, 1e-14);
    let thetas: Vec<f64> = (0..cfg.points).map(|i| TAU * i as f64 / cfg.points as f64).collect();
    let arcs: Vec<f64> = thetas
        .iter()
        .map(|&t| adaptive_simpson(&speed, 0.0, t, 1e-14))
        .collect();

    let spec = KernelSpec::sobolev(1.0);
    let pulled = CurveKernel::new(&ellipse, &spec, SpectrumConvention::ExplicitSpectrum)?.gram(&thetas)?;
    // Bessel K_1 on the circle of length L: cosh(L/2 - u) / (2 sinh(L/2))
    let l = oracle_length;
    let circle_kernel = |u: f64| (0.5 * l - u).cosh() / (2.0 * (0.5 * l).sinh());
    let n = thetas.len();
    let reference = DMatrix::from_fn(n, n, |i, j| circle_kernel((arcs[i] - arcs[j]).abs()));
    let worst = (pulled - reference).abs().max();
    Ok(report(
        Suite::Curve,
        start,
        vec![
            Check::at_most(
                format!("|ellipse length - oracle {oracle_length:.12}|"),
                (ellipse.length() - oracle_length).abs(),
                cfg.length_tolerance,
            ),
            Check::at_most(
                format!("max |pullback Gram - circle Gram| over {n} points"),
                worst,
                cfg.tolerance,
            ),
        ],
    ))
}

// --- norms ---------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct NormsConfig {
    pub functions: usize,
    pub max_level: usize,
    pub seed: u64,
}

impl Default for NormsConfig {
    fn default() -> Self {
        Self {
            functions: 50,
            max_level: 8,
            seed: 23,
        }
    }
}

/// Spectral norm inequalities on random finitely supported functions:
/// `‖f‖_{𝓗^t} ≥ ‖f‖_{L²}`, `‖f‖_{H^{s'}} ≥ c ‖f‖_{H^s}` for `s < s'`,
/// `‖f‖_{𝓗^{t'}} ≥ ‖f‖_{𝓗^t}` for `t < t'`, the embedding
/// `‖f‖²_{H^s} ≤ C_{t,s} ‖f‖²_{𝓗^t}` and the equivalence of the two
/// Sobolev norms.
pub fn norms(cfg: &NormsConfig) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut checks = Vec::new();
    let slack = 1.0 - 1e-12;
    for manifold in [Manifold::Circle, Manifold::sphere(3)?, Manifold::sphere(5)?] {
        let (lo, hi) = norm_equivalence_bracket(&manifold, 1.5, cfg.max_level)?;
        let mut ratios = vec![f64::INFINITY; 5];
        let mut bracket_ok = true;
        for i in 0..cfg.functions {
            let f = SpectralFunction::random(manifold, cfg.max_level, cfg.seed + i as u64)?;
            let l2 = f.l2_norm_sq();
            let r = [
                diffusion_norm_sq(&f, 0.5) / l2,
                sobolev_norm_sq(&f, 2.0, NormVariant::Bessel) / sobolev_norm_sq(&f, 1.0, NormVariant::Bessel),
                // (1 + λ^{s'}) ≥ (1 + λ^s)/2 for every λ ≥ 0
                2.0 * sobolev_norm_sq(&f, 2.0, NormVariant::InversePower)
                    / sobolev_norm_sq(&f, 1.0, NormVariant::InversePower),
                diffusion_norm_sq(&f, 1.0) / diffusion_norm_sq(&f, 0.5),
                // max_λ (1+λ)^s e^{-tλ} = (s/t)^s e^{t-s} when s ≥ t
                heat_embedding_constant(1.0, 2.0) * diffusion_norm_sq(&f, 1.0)
                    / sobolev_norm_sq(&f, 2.0, NormVariant::Bessel),
            ];
            for (acc, v) in ratios.iter_mut().zip(r) {
                *acc = acc.min(v);
            }
            let q = sobolev_norm_sq(&f, 1.5, NormVariant::InversePower) / sobolev_norm_sq(&f, 1.5, NormVariant::Bessel);
            bracket_ok &= q >= lo * slack && q <= hi / slack;
        }
        let names = [
            "‖f‖²_diff(t=0.5) / ‖f‖²_L2",
            "‖f‖²_H2 / ‖f‖²_H1 (Bessel)",
            "2‖f‖²_H2 / ‖f‖²_H1 (inverse power)",
            "‖f‖²_diff(t=1) / ‖f‖²_diff(t=0.5)",
            "C ‖f‖²_diff(t=1) / ‖f‖²_H2",
        ];
        for (name, r) in names.into_iter().zip(ratios) {
            checks.push(Check::at_least(format!("{manifold}: min {name}"), r, slack));
        }
        checks.push(Check::holds(
            format!("{manifold}: Sobolev norm ratios inside [{lo:.4}, {hi:.4}]"),
            bracket_ok,
        ));
    }
    Ok(report(Suite::Norms, start, checks))
}

/// `max_{λ ≥ 0} (1 + λ)^s e^{-tλ}`.
pub fn heat_embedding_constant(t: f64, s: f64) -> f64 {
    if s <= t {
        1.0
    } else {
        (s / t).powf(s) * (t - s).exp()
    }
}

/// Run several suites; convenient for the CLI and the acceptance tests.
pub fn run_suites(suites: &[Suite], exec: Execution) -> Result<Vec<SuiteReport>> {
    suites.iter().map(|s| run_suite(*s, exec)).collect()
}
