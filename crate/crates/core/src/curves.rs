//! Closed embedded curves: arc-length reparametrization, the isometry onto a
//! circle of the same length, and pullback of circle kernels.

use crate::error::{domain, Error, Result};
use crate::kernels::{has_circle_closed_form, scaled_circle_closed_form, KernelSpec, SpectralKernel};
use crate::specfun::{gauss_legendre, GaussRule};
use crate::spectra::{Geometry, Zonal};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::io::Read;
use std::sync::Arc;

const PANELS: usize = 256;
const PANEL_ORDER: usize = 20;
/// Step of the central-difference fallback for the derivative.
pub const FD_STEP: f64 = 1e-5;
const MIN_SPEED: f64 = 1e-12;
const CLOSURE_TOL: f64 = 1e-10;

type CurveFn = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// A closed immersed curve `θ ↦ x(θ) ∈ R^d`, `θ ∈ [0, 2π]`.
///
/// The position is evaluated slightly outside `[0, 2π]` by the
/// finite-difference fallback, so it should be 2π-periodic.
#[derive(Clone)]
pub struct EmbeddedCurve {
    dim: usize,
    position: CurveFn,
    derivative: Option<CurveFn>,
    rule: GaussRule,
    /// Cumulative arc length at the panel boundaries.
    cumulative: Vec<f64>,
}

impl std::fmt::Debug for EmbeddedCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EmbeddedCurve")
            .field("dim", &self.dim)
            .field("analytic_derivative", &self.derivative.is_some())
            .field("length", &self.length())
            .finish()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl EmbeddedCurve {
    pub fn new(
        dim: usize,
        position: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static,
        derivative: Option<CurveFn>,
    ) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidInput("curves live in R^d with d >= 2".into()));
        }
        let position: CurveFn = Arc::new(position);
        let start = position(0.0);
        let end = position(TAU);
        if start.len() != dim || end.len() != dim {
            return Err(Error::InvalidInput(format!("position must return {dim} coordinates")));
        }
        let gap = norm(&start.iter().zip(&end).map(|(a, b)| a - b).collect::<Vec<_>>());
        if gap > CLOSURE_TOL {
            return Err(Error::InvalidInput(format!(
                "curve is not closed: |x(0) - x(2π)| = {gap:e}"
            )));
        }
        let mut curve = Self {
            dim,
            position,
            derivative,
            rule: gauss_legendre(PANEL_ORDER),
            cumulative: Vec::new(),
        };
        let width = TAU / PANELS as f64;
        let mut cumulative = Vec::with_capacity(PANELS + 1);
        cumulative.push(0.0);
        for p in 0..PANELS {
            let a = p as f64 * width;
            let mut piece = 0.0;
            for (x, w) in curve.rule.nodes.iter().zip(&curve.rule.weights) {
                let theta = a + 0.5 * width * (x + 1.0);
                let speed = curve.speed(theta);
                if !(speed >= MIN_SPEED) {
                    return Err(domain(
                        "EmbeddedCurve",
                        format!("not an immersion: speed {speed:e} at θ = {theta}"),
                    ));
                }
                piece += w * speed;
            }
            cumulative.push(cumulative[p] + 0.5 * width * piece);
        }
        curve.cumulative = cumulative;
        Ok(curve)
    }

    /// Circle of radius `r` in `R^2`.
    pub fn circle(radius: f64) -> Result<Self> {
        Self::ellipse(radius, radius)
    }

    /// Ellipse `(a cos θ, b sin θ)`.
    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        let derivative: CurveFn = Arc::new(move |t: f64| vec![-a * t.sin(), b * t.cos()]);
        Self::new(2, move |t: f64| vec![a * t.cos(), b * t.sin()], Some(derivative))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn position(&self, theta: f64) -> Vec<f64> {
        (self.position)(theta)
    }

    /// `x'(θ)`: analytic if supplied, else fourth-order central differences
    /// with step [`FD_STEP`] (truncation error `O(h⁴)`, rounding `O(ε/h)`).
    pub fn derivative(&self, theta: f64) -> Vec<f64> {
        if let Some(d) = &self.derivative {
            return d(theta);
        }
        let h = FD_STEP;
        let f = |k: f64| (self.position)(theta + k * h);
        let (p2, p1, m1, m2) = (f(2.0), f(1.0), f(-1.0), f(-2.0));
        (0..self.dim)
            .map(|i| (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * h))
            .collect()
    }

    pub fn speed(&self, theta: f64) -> f64 {
        norm(&self.derivative(theta))
    }

    /// Total length `ℓ_M`.
    pub fn length(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// `s(θ) = ∫_0^θ ‖x'(φ)‖ dφ`.
    pub fn arc_length(&self, theta: f64) -> Result<f64> {
        if !(0.0..=TAU).contains(&theta) {
            return Err(domain("arc_length", format!("θ = {theta} outside [0, 2π]")));
        }
        let width = TAU / PANELS as f64;
        let p = ((theta / width) as usize).min(PANELS - 1);
        let a = p as f64 * width;
        if theta == a {
            return Ok(self.cumulative[p]);
        }
        Ok(self.cumulative[p] + self.rule.integrate_on(a, theta, |x| self.speed(x)))
    }

    /// `s^{-1}`: the parameter at arc length `s ∈ [0, ℓ_M]`, by Newton steps
    /// safeguarded with bisection inside the bracketing panel.
    pub fn inverse_arc_length(&self, s: f64) -> Result<f64> {
        let total = self.length();
        if !(0.0..=total).contains(&s) {
            return Err(domain("inverse_arc_length", format!("s = {s} outside [0, {total}]")));
        }
        let width = TAU / PANELS as f64;
        let p = self.cumulative.partition_point(|&c| c <= s).clamp(1, PANELS) - 1;
        let (mut lo, mut hi) = (p as f64 * width, (p + 1) as f64 * width);
        let mut theta = lo + (s - self.cumulative[p]) / (self.cumulative[p + 1] - self.cumulative[p]) * width;
        for _ in 0..100 {
            let residual = self.arc_length(theta)? - s;
            if residual.abs() <= 1e-15 * total.max(1.0) {
                return Ok(theta);
            }
            if residual > 0.0 {
                hi = theta;
            } else {
                lo = theta;
            }
            let newton = theta - residual / self.speed(theta);
            let next = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - theta).abs() <= 1e-15 * TAU {
                return Ok(next);
            }
            theta = next;
        }
        Err(Error::RootFinding(format!(
            "arc-length inverse did not converge at s = {s}"
        )))
    }
}

/// The unit-speed-up-to-scale map `φ(t) = x(s^{-1}(t · scale))`, `t ∈ [0, 2π]`,
/// with `scale = ℓ_M / 2π`.
#[derive(Debug, Clone)]
pub struct Isometry {
    pub curve: EmbeddedCurve,
    pub scale: f64,
}

pub fn isometry_to_circle(curve: &EmbeddedCurve) -> Isometry {
    Isometry {
        scale: curve.length() / TAU,
        curve: curve.clone(),
    }
}

impl Isometry {
    /// Curve parameter `θ` of the circle angle `t`.
    pub fn parameter(&self, t: f64) -> Result<f64> {
        if !(0.0..=TAU).contains(&t) {
            return Err(domain("Isometry::parameter", format!("t = {t} outside [0, 2π]")));
        }
        self.curve.inverse_arc_length((t * self.scale).min(self.curve.length()))
    }

    /// `φ(t)`.
    pub fn map(&self, t: f64) -> Result<Vec<f64>> {
        Ok(self.curve.position(self.parameter(t)?))
    }

    /// Circle angle `Ψ(x(θ)) = s(θ) / scale`.
    pub fn angle_of(&self, theta: f64) -> Result<f64> {
        Ok(self.curve.arc_length(theta)? / self.scale)
    }
}

/// How the circle spectrum is transported to a curve of length `ℓ_M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumConvention {
    /// Circle of length `ℓ_M`: eigenvalues `(2πk/ℓ_M)²`, eigenfunctions
    /// renormalized by `√(2π/ℓ_M)`.
    #[default]
    ExplicitSpectrum,
    /// Rescale the metric to length `2π` and use the unit-circle kernel.
    RescaleMetric,
}

/// A circle kernel transported to a curve.
#[derive(Debug, Clone)]
pub struct CurveKernel {
    curve: EmbeddedCurve,
    spec: KernelSpec,
    length: f64,
    spectral: Option<SpectralKernel>,
}

impl CurveKernel {
    pub fn new(curve: &EmbeddedCurve, spec: &KernelSpec, convention: SpectrumConvention) -> Result<Self> {
        spec.validate()?;
        let length = match convention {
            SpectrumConvention::ExplicitSpectrum => curve.length(),
            SpectrumConvention::RescaleMetric => TAU,
        };
        let spectral = if has_circle_closed_form(spec) {
            None
        } else {
            Some(SpectralKernel::new(Geometry::Circle { length }, spec)?)
        };
        Ok(Self {
            curve: curve.clone(),
            spec: spec.clone(),
            length,
            spectral,
        })
    }

    /// Kernel at arc-length positions `s_p`, `s_q` of the curve.
    pub fn eval_arc(&self, sp: f64, sq: f64) -> Result<f64> {
        let total = self.curve.length();
        // arc separation in the kernel's own length units
        let u = (sp - sq).abs() * self.length / total;
        match &self.spectral {
            None => scaled_circle_closed_form(&self.spec, self.length, u),
            Some(k) => {
                let r = (TAU * u / self.length).rem_euclid(TAU);
                Ok(k.eval(&Zonal::Angle(r.min(TAU - r)))?.value)
            }
        }
    }

    /// `K_M(x(θ_p), x(θ_q))`.
    pub fn eval(&self, theta_p: f64, theta_q: f64) -> Result<f64> {
        self.eval_arc(self.curve.arc_length(theta_p)?, self.curve.arc_length(theta_q)?)
    }

    /// Gram matrix over the curve parameters.
    pub fn gram(&self, thetas: &[f64]) -> Result<DMatrix<f64>> {
        let arcs: Vec<f64> = thetas
            .iter()
            .map(|t| self.curve.arc_length(*t))
            .collect::<Result<_>>()?;
        let n = arcs.len();
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.eval_arc(arcs[i], arcs[j])?;
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        Ok(g)
    }
}

/// `K_M(p, q)` for curve parameters `p`, `q`.
pub fn pullback_kernel(
    curve: &EmbeddedCurve,
    spec: &KernelSpec,
    p: f64,
    q: f64,
    convention: SpectrumConvention,
) -> Result<f64> {
    CurveKernel::new(curve, spec, convention)?.eval(p, q)
}

/// Periodic cubic spline through `(θ_i, x_i)` in every coordinate.
#[derive(Debug, Clone)]
pub struct PeriodicSpline {
    knots: Vec<f64>,
    values: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
}

impl PeriodicSpline {
    /// `knots` strictly increasing in `[0, 2π)`; `values[i]` is the point at `knots[i]`.
    pub fn new(knots: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        let n = knots.len();
        if n < 4 || values.len() != n {
            return Err(Error::InvalidInput("a periodic spline needs at least 4 samples".into()));
        }
        if knots[0] < 0.0 || knots[n - 1] >= TAU || knots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "θ samples must increase strictly within [0, 2π)".into(),
            ));
        }
        let dim = values[0].len();
        if values.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidInput("all samples need the same dimension".into()));
        }
        let h: Vec<f64> = (0..n)
            .map(|i| {
                if i + 1 < n {
                    knots[i + 1] - knots[i]
                } else {
                    knots[0] + TAU - knots[n - 1]
                }
            })
            .collect();
        let mut second = Vec::with_capacity(dim);
        for c in 0..dim {
            let y = |i: usize| values[i % n][c];
            let rhs: Vec<f64> = (0..n)
                .map(|i| {
                    let prev = (i + n - 1) % n;
                    6.0 * ((y(i + 1) - y(i)) / h[i] - (y(i) - y(prev)) / h[prev])
                })
                .collect();
            second.push(solve_cyclic(&h, &rhs));
        }
        // transpose to per-knot vectors
        let second = (0..n).map(|i| second.iter().map(|col| col[i]).collect()).collect();
        Ok(Self { knots, values, second })
    }

    fn locate(&self, theta: f64) -> (usize, f64, f64) {
        let n = self.knots.len();
        let t = theta.rem_euclid(TAU);
        // segment i covers [knots[i], knots[i+1]) with wrap-around
        let i = match self.knots.partition_point(|&k| k <= t) {
            0 => n - 1,
            j => j - 1,
        };
        let start = self.knots[i];
        let end = if i + 1 < n {
            self.knots[i + 1]
        } else {
            self.knots[0] + TAU
        };
        let mut x = t - start;
        if x < 0.0 {
            x += TAU;
        }
        (i, x, end - start)
    }

    pub fn eval(&self, theta: f64) -> Vec<f64> {
        let (i, x, h) = self.locate(theta);
        let j = (i + 1) % self.knots.len();
        let (a, b) = ((h - x) / h, x / h);
        (0..self.values[i].len())
            .map(|c| {
                let (yi, yj, mi, mj) = (
                    self.values[i][c],
                    self.values[j][c],
                    self.second[i][c],
                    self.second[j][c],
                );
                a * yi + b * yj + ((a * a * a - a) * mi + (b * b * b - b) * mj) * h * h / 6.0
            })
            .collect()
    }

    pub fn derivative(&self, theta: f64) -> Vec<f64> {
        let (i, x, h) = self.locate(theta);
        let j = (i + 1) % self.knots.len();
        let (a, b) = ((h - x) / h, x / h);
        (0..self.values[i].len())
            .map(|c| {
                let (yi, yj, mi, mj) = (
                    self.values[i][c],
                    self.values[j][c],
                    self.second[i][c],
                    self.second[j][c],
                );
                (yj - yi) / h + (-(3.0 * a * a - 1.0) * mi + (3.0 * b * b - 1.0) * mj) * h / 6.0
            })
            .collect()
    }
}

/// Solve the cyclic system `h_{i-1} M_{i-1} + 2(h_{i-1}+h_i) M_i + h_i M_{i+1} = r_i`
/// by Sherman–Morrison on a tridiagonal Thomas solve.
fn solve_cyclic(h: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let lower: Vec<f64> = (0..n).map(|i| h[(i + n - 1) % n]).collect();
    let upper: Vec<f64> = h.to_vec();
    let mut diag: Vec<f64> = (0..n).map(|i| 2.0 * (h[(i + n - 1) % n] + h[i])).collect();
    // corner entries: A[0][n-1] = lower[0] = α, A[n-1][0] = upper[n-1] = β
    let alpha = lower[0];
    let beta = upper[n - 1];
    let gamma = -diag[0];
    diag[0] -= gamma;
    diag[n - 1] -= alpha * beta / gamma;
    let thomas = |d: &[f64]| -> Vec<f64> {
        let mut c = vec![0.0; n];
        let mut x = vec![0.0; n];
        let mut denom = diag[0];
        c[0] = upper[0] / denom;
        x[0] = d[0] / denom;
        for i in 1..n {
            denom = diag[i] - lower[i] * c[i - 1];
            c[i] = if i + 1 < n { upper[i] / denom } else { 0.0 };
            x[i] = (d[i] - lower[i] * x[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        x
    };
    let x = thomas(rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = beta;
    let z = thomas(&u);
    let factor = (x[0] + alpha * x[n - 1] / gamma) / (1.0 + z[0] + alpha * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - factor * zi).collect()
}

/// Curve from samples `θ, x_1, …, x_d` per CSV row (header lines and lines
/// starting with `#` are skipped), reconstructed by a periodic cubic spline.
pub fn curve_from_csv(reader: impl Read) -> Result<EmbeddedCurve> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut knots = Vec::new();
    let mut values = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Io(e.to_string()))?;
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) if row.len() >= 3 => {
                knots.push(row[0]);
                values.push(row[1..].to_vec());
            }
            Ok(_) => {
                return Err(Error::InvalidInput(format!(
                    "row {} needs θ and >= 2 coordinates",
                    line + 1
                )))
            }
            Err(_) if knots.is_empty() => continue, // header
            Err(e) => return Err(Error::InvalidInput(format!("row {}: {e}", line + 1))),
        }
    }
    let dim = values.first().map(Vec::len).unwrap_or(0);
    let spline = Arc::new(PeriodicSpline::new(knots, values)?);
    let d = Arc::clone(&spline);
    let derivative: CurveFn = Arc::new(move |t| d.derivative(t));
    EmbeddedCurve::new(dim, move |t| spline.eval(t), Some(derivative))
}
