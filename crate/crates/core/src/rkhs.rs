//! RKHS linear algebra: spectral functions and norms, Gram matrices with PSD
//! certificates, kernel interpolation and diagonal (membership) diagnostics.

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::fit::linear_fit;
use crate::kernels::{spectral_tail_bound, Evaluator, KernelSpec, Method, Weighting};
use crate::spectra::{eigenfunctions, Geometry, Manifold, Point};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;
use std::collections::BTreeMap;

/// Index `(ℓ, k)` of the eigenfunction `f_{ℓ,k}`, `1 ≤ k ≤ d_ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ModeIndex {
    pub level: usize,
    pub k: usize,
}

impl ModeIndex {
    pub fn new(level: usize, k: usize) -> Self {
        Self { level, k }
    }
}

/// A finitely supported function `f = Σ c_{ℓ,k} f_{ℓ,k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    manifold: Manifold,
    geometry: Geometry,
    coeffs: BTreeMap<ModeIndex, f64>,
}

impl SpectralFunction {
    pub fn new(manifold: Manifold) -> Result<Self> {
        Ok(Self {
            geometry: manifold.geometry()?,
            manifold,
            coeffs: BTreeMap::new(),
        })
    }

    /// The single mode `f_{ℓ,k}`.
    pub fn mode(manifold: Manifold, level: usize, k: usize) -> Result<Self> {
        let mut f = Self::new(manifold)?;
        f.insert(level, k, 1.0)?;
        Ok(f)
    }

    /// Random coefficients in `[-1, 1]` on all modes with `ℓ ≤ max_level`.
    pub fn random(manifold: Manifold, max_level: usize, seed: u64) -> Result<Self> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut f = Self::new(manifold)?;
        for level in 0..=max_level {
            for k in 1..=f.geometry.multiplicity(level).round() as usize {
                f.insert(level, k, rng.random_range(-1.0..1.0))?;
            }
        }
        Ok(f)
    }

    pub fn with(mut self, level: usize, k: usize, value: f64) -> Result<Self> {
        self.insert(level, k, value)?;
        Ok(self)
    }

    pub fn insert(&mut self, level: usize, k: usize, value: f64) -> Result<()> {
        let mult = self.geometry.multiplicity(level).round() as usize;
        if k == 0 || k > mult {
            return Err(Error::Index(format!("k = {k} outside 1..={mult} at level {level}")));
        }
        self.coeffs.insert(ModeIndex::new(level, k), value);
        Ok(())
    }

    pub fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    pub fn get(&self, level: usize, k: usize) -> f64 {
        self.coeffs.get(&ModeIndex::new(level, k)).copied().unwrap_or(0.0)
    }

    pub fn coefficients(&self) -> &BTreeMap<ModeIndex, f64> {
        &self.coeffs
    }

    pub fn max_level(&self) -> usize {
        self.coeffs.keys().map(|m| m.level).max().unwrap_or(0)
    }

    /// Multiply each coefficient by `g(λ_ℓ, ℓ)`.
    pub fn map_levels(&self, g: impl Fn(f64, usize) -> f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(idx, c)| (*idx, c * g(self.geometry.eigenvalue(idx.level), idx.level)))
            .collect();
        Self { coeffs, ..self.clone() }
    }

    /// `Σ_ℓ φ(λ_ℓ) Σ_k c_{ℓ,k}²`.
    pub fn weighted_norm_sq(&self, phi: impl Fn(f64) -> f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(idx, c)| phi(self.geometry.eigenvalue(idx.level)) * c * c)
            .sum()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.weighted_norm_sq(|_| 1.0)
    }

    /// Point value (circle and `S^2`, where explicit eigenfunctions exist).
    pub fn eval(&self, m: &Point) -> Result<f64> {
        let mut sum = 0.0;
        let mut cache: Option<(usize, Vec<f64>)> = None;
        for (idx, c) in &self.coeffs {
            if cache.as_ref().map(|(l, _)| *l) != Some(idx.level) {
                cache = Some((idx.level, eigenfunctions(&self.manifold, idx.level, m)?));
            }
            sum += c * cache.as_ref().expect("filled").1[idx.k - 1];
        }
        Ok(sum)
    }
}

/// Which Sobolev norm to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum NormVariant {
    /// `Σ (1 + λ)^s c²`.
    #[default]
    Bessel,
    /// `Σ (1 + λ^s) c²`.
    InversePower,
}

/// Squared Sobolev norm `‖f‖²_{H^s}` of a finitely supported function.
pub fn sobolev_norm_sq(f: &SpectralFunction, s: f64, variant: NormVariant) -> f64 {
    match variant {
        NormVariant::Bessel => f.weighted_norm_sq(|l| (1.0 + l).powf(s)),
        NormVariant::InversePower => f.weighted_norm_sq(|l| 1.0 + l.powf(s)),
    }
}

/// Squared diffusion norm `Σ e^{tλ} c²`.
pub fn diffusion_norm_sq(f: &SpectralFunction, t: f64) -> f64 {
    f.weighted_norm_sq(|l| (t * l).exp())
}

/// Bracket `[c, C]` with `c ≤ ‖f‖²_{inverse-power} / ‖f‖²_{Bessel} ≤ C` for all
/// `f` supported on levels `ℓ ≤ max_level`.
pub fn norm_equivalence_bracket(manifold: &Manifold, s: f64, max_level: usize) -> Result<(f64, f64)> {
    let g = manifold.geometry()?;
    let ratios = (0..=max_level).map(|l| {
        let lambda = g.eigenvalue(l);
        (1.0 + lambda.powf(s)) / (1.0 + lambda).powf(s)
    });
    Ok(ratios.fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r))))
}

/// Spectral multiplier applied by [`apply_bessel_potential`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Potential {
    /// `(1 + λ)^{-s/2}`: `f = (I + Δ)^{-s/2} g`.
    Bessel,
    /// `λ^{s/2}` (annihilates constants).
    Riesz,
    /// `A_s`: identity on constants, `λ^{-s/2}` elsewhere.
    OperatorA,
}

pub fn apply_bessel_potential(f: &SpectralFunction, s: f64, kind: Potential) -> SpectralFunction {
    f.map_levels(|lambda, level| match kind {
        Potential::Bessel => (1.0 + lambda).powf(-s / 2.0),
        Potential::Riesz => lambda.powf(s / 2.0),
        Potential::OperatorA if level == 0 => 1.0,
        Potential::OperatorA => lambda.powf(-s / 2.0),
    })
}

/// `e^{-tΔ} f`.
pub fn heat_propagate(f: &SpectralFunction, t: f64) -> SpectralFunction {
    f.map_levels(|lambda, _| (-t * lambda).exp())
}

/// `Δ f`.
pub fn laplacian(f: &SpectralFunction) -> SpectralFunction {
    f.map_levels(|lambda, _| lambda)
}

/// Kernel section `K(m, ·)` truncated to levels `ℓ ≤ max_level`:
/// coefficients `w_ℓ f_{ℓ,k}(m)`.
pub fn kernel_section(manifold: &Manifold, spec: &KernelSpec, m: &Point, max_level: usize) -> Result<SpectralFunction> {
    let mut f = SpectralFunction::new(*manifold)?;
    for level in 0..=max_level {
        let w = spec.weight(&f.geometry, level);
        for (k, v) in eigenfunctions(manifold, level, m)?.into_iter().enumerate() {
            f.insert(level, k + 1, w * v)?;
        }
    }
    Ok(f)
}

/// Inner product of the RKHS with kernel `spec`: `Σ c_{ℓ,k} c'_{ℓ,k} / w_ℓ`.
pub fn rkhs_inner(f: &SpectralFunction, g: &SpectralFunction, spec: &KernelSpec) -> f64 {
    f.coeffs
        .iter()
        .map(|(idx, c)| c * g.get(idx.level, idx.k) / spec.weight(&f.geometry, idx.level))
        .sum()
}

/// Outcome of [`rkhs_diag_test`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagTest {
    /// `Σ_{ℓ≤L} w_ℓ Π_ℓ(m, m)`.
    pub partial: f64,
    /// Whether a certified tail below `1e-8` exists at some finite level.
    pub converged: bool,
    /// Certified tail beyond `L` (infinite for divergent series).
    pub tail: f64,
    /// For divergent series: `d - 1 - 2σ`, the exponent of the growth
    /// `L^{d-1-2σ}` (0 means logarithmic growth).
    pub growth_exponent: Option<f64>,
    /// Fitted growth: slope of the partial sums against `ln L` when the
    /// growth is logarithmic, otherwise the log–log slope.
    pub fitted_growth: Option<f64>,
}

/// Partial sums of `Σ w_ℓ Σ_k f_{ℓ,k}(m)² = Σ w_ℓ d_ℓ / vol` through level `L`,
/// the criterion for `K(m, m) < ∞`.
pub fn rkhs_diag_test(manifold: &Manifold, spec: &KernelSpec, m: &Point, levels: usize) -> Result<DiagTest> {
    spec.validate()?;
    m.validate(manifold)?;
    let g = manifold.geometry()?;
    let terms: Vec<f64> = (0..=levels).map(|l| spec.weight(&g, l) * g.level_diagonal(l)).collect();
    let mut partials = Vec::with_capacity(terms.len());
    let mut acc = 0.0;
    for t in &terms {
        acc += t;
        partials.push(acc);
    }
    let partial = acc;
    if spec.in_rkhs_regime(manifold) {
        let tail = spectral_tail_bound(spec, &g, levels);
        let converged = crate::kernels::levels_for_tail(spec, &g, 1e-8, 1 << 30).is_ok();
        return Ok(DiagTest {
            partial,
            converged,
            tail,
            growth_exponent: None,
            fitted_growth: None,
        });
    }
    let sigma = spec.sigma().expect("heat kernels always converge");
    let exponent = g.spectral_dim() as f64 - 1.0 - 2.0 * sigma;
    let lo = (levels / 8).max(1);
    let fitted = if levels >= 16 {
        let xs: Vec<f64> = (lo..=levels).map(|l| (l as f64).ln()).collect();
        let ys: Vec<f64> = if exponent.abs() < 1e-12 {
            partials[lo..=levels].to_vec()
        } else {
            partials[lo..=levels].iter().map(|p| p.ln()).collect()
        };
        Some(linear_fit(&xs, &ys)?.slope)
    } else {
        None
    };
    Ok(DiagTest {
        partial,
        converged: false,
        tail: f64::INFINITY,
        growth_exponent: Some(exponent),
        fitted_growth: fitted,
    })
}

/// Largest size for which the PSD certificate uses a full eigendecomposition.
pub const FULL_EIGEN_LIMIT: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateMethod {
    FullEigen,
    Lanczos,
}

/// Symmetric kernel matrix with its positive-semidefiniteness certificate.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub points: Vec<Point>,
    pub entries: DMatrix<f64>,
    pub spec: KernelSpec,
    pub method: Method,
    /// Smallest eigenvalue (exact up to rounding, or a Lanczos estimate).
    pub min_eig_bound: f64,
    pub certificate: CertificateMethod,
    /// Largest certified spectral tail among the entries.
    pub max_tail: f64,
}

impl GramMatrix {
    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    /// `min_eig_bound ≥ -1e-8 · trace`.
    pub fn is_psd(&self) -> bool {
        self.min_eig_bound >= -1e-8 * self.trace()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Assemble the Gram matrix `K(points_i, points_j)`.
pub fn gram(manifold: &Manifold, spec: &KernelSpec, points: &[Point]) -> Result<GramMatrix> {
    gram_with(Execution::default(), manifold, spec, points)
}

pub fn gram_with(exec: Execution, manifold: &Manifold, spec: &KernelSpec, points: &[Point]) -> Result<GramMatrix> {
    if points.is_empty() {
        return Err(Error::InvalidInput("Gram matrix needs at least one point".into()));
    }
    let evaluator = Evaluator::new(*manifold, spec.clone())?;
    gram_from_evaluator(exec, &evaluator, points)
}

/// Gram matrix from a prepared evaluator (upper triangle, mirrored).
pub fn gram_from_evaluator(exec: Execution, evaluator: &Evaluator, points: &[Point]) -> Result<GramMatrix> {
    let n = points.len();
    let rows = map_indexed(exec, n, |i| -> Result<Vec<(f64, f64)>> {
        (i..n)
            .map(|j| evaluator.eval(&points[i], &points[j]).map(|v| (v.value, v.tail)))
            .collect()
    });
    let mut entries = DMatrix::zeros(n, n);
    let mut max_tail = 0.0f64;
    for (i, row) in rows.into_iter().enumerate() {
        for (offset, (v, tail)) in row?.into_iter().enumerate() {
            let j = i + offset;
            entries[(i, j)] = v;
            entries[(j, i)] = v;
            max_tail = max_tail.max(tail);
        }
    }
    let (min_eig_bound, certificate) = smallest_eigenvalue(&entries);
    Ok(GramMatrix {
        points: points.to_vec(),
        entries,
        spec: evaluator.spec().clone(),
        method: evaluator.method(),
        min_eig_bound,
        certificate,
        max_tail,
    })
}

/// Smallest eigenvalue of a symmetric matrix: full decomposition up to
/// [`FULL_EIGEN_LIMIT`], Lanczos with full reorthogonalization beyond.
pub fn smallest_eigenvalue(a: &DMatrix<f64>) -> (f64, CertificateMethod) {
    let n = a.nrows();
    let sym = (a + a.transpose()) * 0.5;
    if n <= FULL_EIGEN_LIMIT {
        let eig = SymmetricEigen::new(sym);
        (eig.eigenvalues.min(), CertificateMethod::FullEigen)
    } else {
        (lanczos_smallest(&sym, n.min(160)), CertificateMethod::Lanczos)
    }
}

fn lanczos_smallest(a: &DMatrix<f64>, steps: usize) -> f64 {
    let n = a.nrows();
    // deterministic start vector with all components nonzero
    let mut q = DVector::from_fn(n, |i, _| 1.0 + ((i * 7919) % 101) as f64 / 101.0);
    q /= q.norm();
    let mut basis: Vec<DVector<f64>> = vec![q];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    for j in 0..steps {
        let mut w = a * &basis[j];
        let a_j = basis[j].dot(&w);
        alpha.push(a_j);
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&w);
                w.axpy(-c, b, 1.0);
            }
        }
        let b_j = w.norm();
        if j + 1 == steps || b_j < 1e-12 * a_j.abs().max(1e-300) {
            break;
        }
        beta.push(b_j);
        basis.push(w / b_j);
    }
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    SymmetricEigen::new(t).eigenvalues.min()
}

/// Coefficients of the kernel interpolant `f̂ = Σ c_i K(·, points_i)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interpolant {
    pub coefficients: Vec<f64>,
    /// Ridge actually added to the diagonal.
    pub ridge: f64,
    /// 2-norm condition number of `G + ridge·I`.
    pub condition: f64,
}

impl Interpolant {
    /// `Σ c_i K(m, points_i)`.
    pub fn eval(&self, evaluator: &Evaluator, points: &[Point], m: &Point) -> Result<f64> {
        let mut sum = 0.0;
        for (c, p) in self.coefficients.iter().zip(points) {
            sum += c * evaluator.eval(m, p)?.value;
        }
        Ok(sum)
    }
}

/// Solve `(G + ridge·I) c = values` by Cholesky.
///
/// If the factorization fails the ridge is raised to `1e-14·trace/n` and
/// then by factors of 100, at most 6 times; the ridge used and the condition
/// number are reported. Fails with a singularity error when no attempt
/// factorizes.
pub fn interpolate(gram: &GramMatrix, values: &[f64], ridge: f64) -> Result<Interpolant> {
    let n = gram.len();
    if values.len() != n {
        return Err(Error::InvalidInput(format!(
            "expected {n} values, got {}",
            values.len()
        )));
    }
    if !(ridge >= 0.0) {
        return Err(Error::InvalidInput("ridge must be nonnegative".into()));
    }
    let rhs = DVector::from_column_slice(values);
    let mut attempt = ridge;
    let floor = 1e-14 * gram.trace().abs() / n as f64;
    for round in 0..=6 {
        let shifted = &gram.entries + DMatrix::identity(n, n) * attempt;
        if let Some(chol) = shifted.clone().cholesky() {
            let c = chol.solve(&rhs);
            return Ok(Interpolant {
                coefficients: c.iter().copied().collect(),
                ridge: attempt,
                condition: condition_number(&shifted),
            });
        }
        attempt = if round == 0 {
            attempt.max(floor)
        } else {
            attempt * 100.0
        };
        if attempt == 0.0 {
            break;
        }
    }
    Err(Error::Singular {
        condition: condition_number(&gram.entries),
    })
}

/// `|λ|_max / |λ|_min` of a symmetric matrix.
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(a.clone());
    let abs: Vec<f64> = eig.eigenvalues.iter().map(|v| v.abs()).collect();
    let max = abs.iter().cloned().fold(0.0, f64::max);
    let min = abs.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Convenience: circle kernel with the Fourier weighting (closed forms).
pub fn fourier_circle_spec(s: f64) -> KernelSpec {
    KernelSpec::sobolev(s).with_weighting(Weighting::Fourier)
}
