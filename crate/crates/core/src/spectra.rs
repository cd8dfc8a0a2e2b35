//! Spectral data of the Laplace–Beltrami operator on the circle and on the
//! spheres `S^{d-1}`: eigenvalues, multiplicities, level projectors `Π_ℓ`
//! (addition formula) and explicit eigenfunctions on `S^1` and `S^2`.

use crate::error::{domain, Error, Result};
use crate::specfun::{gamma, gegenbauer_normalized, ln_gamma, GegenbauerParams, NormalizedGegenbauer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::fmt;

/// Highest degree for which explicit spherical harmonics on `S^2` are offered.
pub const EIGENFUNCTION_DEGREE_CAP: usize = 50;

/// Tolerance on `|‖x‖ - 1|` for points on a sphere.
pub const UNIT_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Manifold {
    /// The unit circle `S^1 ⊂ R^2`.
    Circle,
    /// The unit sphere `S^{dim-1} ⊂ R^dim`, `dim ≥ 3`.
    Sphere { dim: usize },
    /// `R^dim` with the Euclidean metric.
    Euclidean { dim: usize },
}

impl Manifold {
    pub fn sphere(dim: usize) -> Result<Self> {
        if dim < 3 {
            return Err(Error::InvalidInput(format!(
                "sphere needs ambient dimension >= 3 (use the circle for d = 2), got {dim}"
            )));
        }
        Ok(Manifold::Sphere { dim })
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("euclidean dimension must be >= 1".into()));
        }
        Ok(Manifold::Euclidean { dim })
    }

    /// Dimension of the ambient space the points are stored in.
    pub fn ambient_dim(&self) -> usize {
        match *self {
            Manifold::Circle => 2,
            Manifold::Sphere { dim } | Manifold::Euclidean { dim } => dim,
        }
    }

    /// Riemannian dimension `n`.
    pub fn intrinsic_dim(&self) -> usize {
        match *self {
            Manifold::Circle => 1,
            Manifold::Sphere { dim } => dim - 1,
            Manifold::Euclidean { dim } => dim,
        }
    }

    /// `H^s` is an RKHS iff `s` exceeds this value (`n/2`).
    pub fn rkhs_threshold(&self) -> f64 {
        self.intrinsic_dim() as f64 / 2.0
    }

    pub fn is_compact(&self) -> bool {
        !matches!(self, Manifold::Euclidean { .. })
    }

    /// Gegenbauer order `ν = d/2 - 1` of the zonal functions (0 on the circle).
    pub fn nu(&self) -> f64 {
        self.ambient_dim() as f64 / 2.0 - 1.0
    }

    /// Riemannian volume; `ω_d = 2π^{d/2}/Γ(d/2)` for `S^{d-1}`.
    pub fn volume(&self) -> Result<f64> {
        match *self {
            Manifold::Circle => Ok(TAU),
            Manifold::Sphere { dim } => sphere_volume(dim),
            Manifold::Euclidean { .. } => Err(self.unsupported("volume")),
        }
    }

    /// Spectral description of a compact manifold.
    pub fn geometry(&self) -> Result<Geometry> {
        match *self {
            Manifold::Circle => Ok(Geometry::Circle { length: TAU }),
            Manifold::Sphere { dim } => Ok(Geometry::Sphere { dim }),
            Manifold::Euclidean { .. } => Err(self.unsupported("spectral expansion")),
        }
    }

    pub(crate) fn unsupported(&self, operation: &'static str) -> Error {
        Error::UnsupportedManifold {
            operation,
            manifold: self.to_string(),
        }
    }
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Manifold::Circle => write!(f, "circle"),
            Manifold::Sphere { dim } => write!(f, "sphere:{dim}"),
            Manifold::Euclidean { dim } => write!(f, "euclidean:{dim}"),
        }
    }
}

/// `vol(S^{d-1}) = 2π^{d/2} / Γ(d/2)`.
pub fn sphere_volume(dim: usize) -> Result<f64> {
    let half = dim as f64 / 2.0;
    Ok(2.0 * PI.powf(half) / gamma(half)?)
}

/// Compact geometry with a known spectrum: a circle of arbitrary length or a
/// unit sphere. The circle of length `L` has eigenvalues `(2πk/L)²` with
/// multiplicity two for `k ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    Circle { length: f64 },
    Sphere { dim: usize },
}

impl Geometry {
    /// `d` in the multiplicity formula (2 for circles).
    pub fn spectral_dim(&self) -> usize {
        match *self {
            Geometry::Circle { .. } => 2,
            Geometry::Sphere { dim } => dim,
        }
    }

    pub fn volume(&self) -> f64 {
        match *self {
            Geometry::Circle { length } => length,
            Geometry::Sphere { dim } => sphere_volume(dim).expect("dim >= 3"),
        }
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.spectral_dim() - 1
    }

    pub fn eigenvalue(&self, ell: usize) -> f64 {
        let l = ell as f64;
        match *self {
            Geometry::Circle { length } => (TAU * l / length).powi(2),
            Geometry::Sphere { dim } => l * (l + dim as f64 - 2.0),
        }
    }

    /// Constant `κ` with `λ_ℓ ≥ κ ℓ²` for all `ℓ`.
    pub fn eigenvalue_floor(&self) -> f64 {
        match *self {
            Geometry::Circle { length } => (TAU / length).powi(2),
            Geometry::Sphere { .. } => 1.0,
        }
    }

    /// Multiplicity `d_ℓ` as a float (product form, no Gamma overflow).
    pub fn multiplicity(&self, ell: usize) -> f64 {
        multiplicity_product(self.spectral_dim(), ell)
    }

    /// `Π_ℓ(m, m) = d_ℓ / vol`, the sup of `|Π_ℓ|`.
    pub fn level_diagonal(&self, ell: usize) -> f64 {
        self.multiplicity(ell) / self.volume()
    }
}

/// `d_ℓ = (2ℓ+d-2)/(d-2) · C(ℓ+d-3, ℓ)` for `d ≥ 3`; 2 (or 1 at ℓ = 0) on the circle.
fn multiplicity_product(d: usize, ell: usize) -> f64 {
    if ell == 0 {
        return 1.0;
    }
    if d == 2 {
        return 2.0;
    }
    let l = ell as f64;
    let mut binom = 1.0;
    for j in 1..=(d - 3) {
        binom *= (l + j as f64) / j as f64;
    }
    (2.0 * l + d as f64 - 2.0) / (d as f64 - 2.0) * binom
}

/// `d_ℓ = (2ℓ+d-2) Γ(ℓ+d-2) / (Γ(d-1) Γ(ℓ+1))`, evaluated in log-Gamma space.
pub fn multiplicity_gamma(d: usize, ell: usize) -> Result<f64> {
    if ell == 0 {
        return Ok(1.0);
    }
    if d == 2 {
        // Γ(ℓ)/Γ(ℓ+1) · 2ℓ = 2
        return Ok(2.0);
    }
    let l = ell as f64;
    let df = d as f64;
    let log = ln_gamma(l + df - 2.0)? - ln_gamma(df - 1.0)? - ln_gamma(l + 1.0)?;
    Ok((2.0 * l + df - 2.0) * log.exp())
}

/// A point of a manifold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Point {
    /// Angle in `[0, 2π)`.
    Circle(f64),
    /// Unit vector in `R^d`.
    Sphere(Vec<f64>),
    Euclidean(Vec<f64>),
}

impl Point {
    /// Circle point at angle `theta`, reduced to `[0, 2π)`.
    pub fn angle(theta: f64) -> Self {
        let mut t = theta.rem_euclid(TAU);
        if t >= TAU {
            t = 0.0;
        }
        Point::Circle(t)
    }

    /// Sphere point; the vector must already have unit norm.
    pub fn sphere(v: Vec<f64>) -> Result<Self> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_NORM_TOL || v.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "sphere point must be a unit vector in R^d, d >= 3 (norm {norm})"
            )));
        }
        Ok(Point::Sphere(v))
    }

    /// Sphere point obtained by normalizing a nonzero vector.
    pub fn normalized(v: Vec<f64>) -> Result<Self> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidInput("cannot normalize a zero vector".into()));
        }
        Point::sphere(v.into_iter().map(|x| x / norm).collect())
    }

    pub fn euclidean(v: Vec<f64>) -> Self {
        Point::Euclidean(v)
    }

    /// Check that the point belongs to `manifold`.
    pub fn validate(&self, manifold: &Manifold) -> Result<()> {
        let ok = match (self, manifold) {
            (Point::Circle(t), Manifold::Circle) => (0.0..TAU).contains(t),
            (Point::Sphere(v), Manifold::Sphere { dim }) => {
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.len() == *dim && (norm - 1.0).abs() <= UNIT_NORM_TOL
            }
            (Point::Euclidean(v), Manifold::Euclidean { dim }) => v.len() == *dim,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "point {self:?} does not lie on {manifold}"
            )))
        }
    }

    /// Coordinates in the ambient space (`(cos θ, sin θ)` on the circle).
    pub fn coords(&self) -> Vec<f64> {
        match self {
            Point::Circle(t) => vec![t.cos(), t.sin()],
            Point::Sphere(v) | Point::Euclidean(v) => v.clone(),
        }
    }
}

/// Geodesic (for `R^n`: Euclidean) distance.
pub fn distance(manifold: &Manifold, a: &Point, b: &Point) -> Result<f64> {
    a.validate(manifold)?;
    b.validate(manifold)?;
    Ok(match (a, b) {
        (Point::Circle(x), Point::Circle(y)) => folded_angle(*x, *y),
        (Point::Sphere(x), Point::Sphere(y)) => {
            // half-angle form: accurate near 0 and π, symmetric bit for bit
            let minus = x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
            let plus = x.iter().zip(y).map(|(p, q)| (p + q).powi(2)).sum::<f64>().sqrt();
            2.0 * minus.atan2(plus)
        }
        (Point::Euclidean(x), Point::Euclidean(y)) => x.iter().zip(y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt(),
        _ => unreachable!("validated"),
    })
}

/// Angular separation folded to `[0, π]`; symmetric in its arguments bit for bit.
pub fn folded_angle(x: f64, y: f64) -> f64 {
    let diff = (x - y).abs().rem_euclid(TAU);
    diff.min(TAU - diff)
}

/// Argument of the zonal functions `Π_ℓ(m, m')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Zonal {
    /// Folded angle `δ ∈ [0, π]` on a circle (already rescaled to `2π` length).
    Angle(f64),
    /// Inner product `⟨m, m'⟩ ∈ [-1, 1]` on a sphere.
    Cosine(f64),
}

impl Zonal {
    pub fn between(manifold: &Manifold, a: &Point, b: &Point) -> Result<Self> {
        a.validate(manifold)?;
        b.validate(manifold)?;
        match (a, b) {
            (Point::Circle(x), Point::Circle(y)) => Ok(Zonal::Angle(folded_angle(*x, *y))),
            (Point::Sphere(x), Point::Sphere(y)) => {
                let dot: f64 = x.iter().zip(y).map(|(p, q)| p * q).sum();
                Ok(Zonal::Cosine(dot.clamp(-1.0, 1.0)))
            }
            _ => Err(manifold.unsupported("spectral expansion")),
        }
    }

    /// Whether the two points coincide.
    pub fn is_diagonal(&self) -> bool {
        match *self {
            Zonal::Angle(d) => d == 0.0,
            Zonal::Cosine(z) => z >= 1.0,
        }
    }
}

/// `λ_ℓ`, `d_ℓ` of one eigenspace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenLevel {
    pub ell: usize,
    pub lambda: f64,
    pub mult: u64,
}

/// Eigenvalue and multiplicity of the `ℓ`-th eigenspace.
///
/// On spheres the multiplicity is evaluated from the Gamma-function formula
/// in log space and rounded; the rounding drift must stay below `1e-6`
/// relative to the rounded value.
pub fn eigen_level(manifold: &Manifold, ell: usize) -> Result<EigenLevel> {
    let geometry = manifold.geometry()?;
    let lambda = geometry.eigenvalue(ell);
    let mult = match manifold {
        Manifold::Circle => {
            if ell == 0 {
                1
            } else {
                2
            }
        }
        Manifold::Sphere { dim } => {
            let computed = multiplicity_gamma(*dim, ell)?;
            let rounded = computed.round();
            if (computed - rounded).abs() >= 1e-6 * rounded.max(1.0) {
                return Err(Error::Domain {
                    function: "eigen_level",
                    detail: format!("multiplicity drift: {computed} is not an integer"),
                });
            }
            rounded as u64
        }
        Manifold::Euclidean { .. } => unreachable!("rejected by geometry()"),
    };
    Ok(EigenLevel { ell, lambda, mult })
}

/// Kernel of the orthogonal projector onto the `ℓ`-th eigenspace,
/// `Π_ℓ(m, m') = d_ℓ/ω_d B^ν_ℓ(⟨m, m'⟩)`; on the circle `1/2π` for `ℓ = 0`
/// and `cos(ℓ(θ-θ'))/π` otherwise.
pub fn projector(manifold: &Manifold, ell: usize, a: &Point, b: &Point) -> Result<f64> {
    let geometry = manifold.geometry()?;
    let zonal = Zonal::between(manifold, a, b)?;
    let shape = match zonal {
        Zonal::Angle(delta) => (ell as f64 * delta).cos(),
        Zonal::Cosine(z) => gegenbauer_normalized(GegenbauerParams::new(manifold.nu(), ell)?, z)?,
    };
    Ok(geometry.level_diagonal(ell) * shape)
}

/// Streams `(ℓ, λ_ℓ, Π_ℓ(m, m'))` for `ℓ = 0, 1, 2, …` in O(1) per level.
#[derive(Debug, Clone)]
pub struct ProjectorStream {
    geometry: Geometry,
    inv_volume: f64,
    ell: usize,
    shape: Shape,
}

#[derive(Debug, Clone)]
enum Shape {
    /// `cos(ℓδ)` by rotation, resynchronized every `RESYNC` steps.
    Rotation {
        delta: f64,
        cos: f64,
        sin: f64,
        step_cos: f64,
        step_sin: f64,
    },
    Gegenbauer(NormalizedGegenbauer),
}

const RESYNC: usize = 64;

impl ProjectorStream {
    pub fn new(geometry: Geometry, zonal: Zonal) -> Result<Self> {
        let shape = match (geometry, zonal) {
            (Geometry::Circle { .. }, Zonal::Angle(delta)) => Shape::Rotation {
                delta,
                cos: 1.0,
                sin: 0.0,
                step_cos: delta.cos(),
                step_sin: delta.sin(),
            },
            (Geometry::Sphere { dim }, Zonal::Cosine(z)) => {
                Shape::Gegenbauer(NormalizedGegenbauer::new(dim as f64 / 2.0 - 1.0, z)?)
            }
            _ => return Err(domain("ProjectorStream", "zonal argument does not match geometry")),
        };
        Ok(Self {
            geometry,
            inv_volume: 1.0 / geometry.volume(),
            ell: 0,
            shape,
        })
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }
}

/// One term of a [`ProjectorStream`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelTerm {
    pub ell: usize,
    pub lambda: f64,
    pub projector: f64,
}

impl Iterator for ProjectorStream {
    type Item = LevelTerm;

    fn next(&mut self) -> Option<LevelTerm> {
        let ell = self.ell;
        let shape = match &mut self.shape {
            Shape::Rotation {
                delta,
                cos,
                sin,
                step_cos,
                step_sin,
            } => {
                let out = *cos;
                let next = ell + 1;
                if next % RESYNC == 0 {
                    let angle = next as f64 * *delta;
                    *cos = angle.cos();
                    *sin = angle.sin();
                } else {
                    let c = *cos * *step_cos - *sin * *step_sin;
                    let s = *sin * *step_cos + *cos * *step_sin;
                    *cos = c;
                    *sin = s;
                }
                out
            }
            Shape::Gegenbauer(g) => g.next().expect("infinite"),
        };
        self.ell += 1;
        Some(LevelTerm {
            ell,
            lambda: self.geometry.eigenvalue(ell),
            projector: self.geometry.multiplicity(ell) * self.inv_volume * shape,
        })
    }
}

fn sphere_angles(v: &[f64]) -> (f64, f64, f64) {
    let rho = v[0].hypot(v[1]);
    (v[2], rho, v[1].atan2(v[0]))
}

/// Orthonormal associated Legendre values `P̄_ℓ^m(cos θ)` for `m = 0..=ℓ`,
/// normalized so that `P̄_ℓ^0 = Y_ℓ^0`.
fn normalized_legendre_row(ell: usize, cos_t: f64, sin_t: f64) -> Vec<f64> {
    let mut row = vec![0.0; ell + 1];
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=ell {
        if m > 0 {
            let mf = m as f64;
            pmm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin_t;
        }
        if m == ell {
            row[m] = pmm;
            break;
        }
        let mf = m as f64;
        let mut p_prev = pmm;
        let mut p_cur = (2.0 * mf + 3.0).sqrt() * cos_t * pmm;
        for l in (m + 2)..=ell {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            let p_next = a * (cos_t * p_cur - b * p_prev);
            p_prev = p_cur;
            p_cur = p_next;
        }
        row[m] = p_cur;
    }
    row
}

/// All `d_ℓ` orthonormal eigenfunctions of level `ℓ` at `m`, ordered by `k`.
///
/// Circle: `k = 1` is `cos(ℓθ)/√π` (or `1/√(2π)` at `ℓ = 0`), `k = 2` is
/// `sin(ℓθ)/√π`. `S^2`: `k = 1` is the zonal harmonic, `k = 2j` and `2j+1`
/// are the `cos(jφ)` and `sin(jφ)` real harmonics.
pub fn eigenfunctions(manifold: &Manifold, ell: usize, m: &Point) -> Result<Vec<f64>> {
    m.validate(manifold)?;
    match (manifold, m) {
        (Manifold::Circle, Point::Circle(theta)) => {
            if ell == 0 {
                Ok(vec![1.0 / TAU.sqrt()])
            } else {
                let s = 1.0 / PI.sqrt();
                let a = ell as f64 * theta;
                Ok(vec![s * a.cos(), s * a.sin()])
            }
        }
        (Manifold::Sphere { dim: 3 }, Point::Sphere(v)) => {
            if ell > EIGENFUNCTION_DEGREE_CAP {
                return Err(Error::Index(format!(
                    "explicit spherical harmonics are capped at degree {EIGENFUNCTION_DEGREE_CAP}"
                )));
            }
            let (cos_t, sin_t, phi) = sphere_angles(v);
            let row = normalized_legendre_row(ell, cos_t, sin_t);
            let mut out = Vec::with_capacity(2 * ell + 1);
            out.push(row[0]);
            for (j, p) in row.iter().enumerate().skip(1) {
                let a = j as f64 * phi;
                out.push(std::f64::consts::SQRT_2 * p * a.cos());
                out.push(std::f64::consts::SQRT_2 * p * a.sin());
            }
            Ok(out)
        }
        _ => Err(manifold.unsupported("explicit eigenfunctions")),
    }
}

/// Eigenfunction `f_{ℓ,k}(m)` with `1 ≤ k ≤ d_ℓ`.
pub fn eigenfunction(manifold: &Manifold, ell: usize, k: usize, m: &Point) -> Result<f64> {
    let all = eigenfunctions(manifold, ell, m)?;
    if k == 0 || k > all.len() {
        return Err(Error::Index(format!(
            "k = {k} outside 1..={} for level {ell}",
            all.len()
        )));
    }
    Ok(all[k - 1])
}

/// `n` seeded points: uniform on compact manifolds, uniform in `[-1, 1]^n`
/// for `R^n`.
pub fn sample_points(manifold: &Manifold, n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| match *manifold {
            Manifold::Circle => Point::angle(rng.random::<f64>() * TAU),
            Manifold::Sphere { dim } => loop {
                let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
                if let Ok(p) = Point::normalized(v) {
                    break p;
                }
            },
            Manifold::Euclidean { dim } => Point::Euclidean((0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()),
        })
        .collect()
}

/// Point at geodesic distance `r` from the base point (`θ = 0`, the north
/// pole `e_d`, or the origin) along the first coordinate direction.
pub fn point_at_distance(manifold: &Manifold, r: f64) -> Point {
    match *manifold {
        Manifold::Circle => Point::angle(r),
        Manifold::Sphere { dim } => {
            let mut v = vec![0.0; dim];
            v[0] = r.sin();
            v[dim - 1] = r.cos();
            Point::Sphere(v)
        }
        Manifold::Euclidean { dim } => {
            let mut v = vec![0.0; dim];
            v[0] = r;
            Point::Euclidean(v)
        }
    }
}

/// The base point used by [`point_at_distance`].
pub fn base_point(manifold: &Manifold) -> Point {
    point_at_distance(manifold, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn s2() -> Manifold {
        Manifold::sphere(3).unwrap()
    }

    #[test]
    fn eigen_levels() {
        let c = eigen_level(&Manifold::Circle, 3).unwrap();
        assert_eq!((c.lambda, c.mult), (9.0, 2));
        let s = eigen_level(&s2(), 2).unwrap();
        assert_eq!((s.lambda, s.mult), (6.0, 5));
        let s4 = eigen_level(&Manifold::sphere(4).unwrap(), 0).unwrap();
        assert_eq!((s4.lambda, s4.mult), (0.0, 1));
        assert!(matches!(
            eigen_level(&Manifold::euclidean(2).unwrap(), 1),
            Err(Error::UnsupportedManifold { .. })
        ));
    }

    #[test]
    fn multiplicities_count_harmonic_polynomials() {
        let mut total = 0u64;
        for ell in 0..=200 {
            total += eigen_level(&s2(), ell).unwrap().mult;
            assert_eq!(total, (ell as u64 + 1).pow(2));
        }
        // S^3: d_ℓ = (ℓ+1)²; large degrees stay integral.
        let s3 = Manifold::sphere(4).unwrap();
        for ell in [0usize, 1, 7, 100, 10_000] {
            assert_eq!(eigen_level(&s3, ell).unwrap().mult, (ell as u64 + 1).pow(2));
        }
        for d in 3..9 {
            for ell in 0..60 {
                let g = Geometry::Sphere { dim: d };
                assert_relative_eq!(
                    g.multiplicity(ell),
                    multiplicity_gamma(d, ell).unwrap(),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn sphere_volumes() {
        assert_relative_eq!(sphere_volume(3).unwrap(), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_volume(4).unwrap(), 2.0 * PI * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_volume(5).unwrap(), 8.0 * PI * PI / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn projector_examples() {
        let n = Point::sphere(vec![0.0, 0.0, 1.0]).unwrap();
        let e = Point::sphere(vec![1.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(projector(&s2(), 0, &n, &e).unwrap(), 1.0 / (4.0 * PI), epsilon = 1e-15);
        assert_relative_eq!(projector(&s2(), 1, &n, &n).unwrap(), 3.0 / (4.0 * PI), epsilon = 1e-15);
        let a = Point::angle(0.7);
        assert_relative_eq!(
            projector(&Manifold::Circle, 2, &a, &a).unwrap(),
            1.0 / PI,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            projector(&Manifold::Circle, 0, &a, &Point::angle(2.0)).unwrap(),
            1.0 / TAU,
            epsilon = 1e-15
        );
    }

    #[test]
    fn stream_matches_single_level_projectors() {
        let m = &sample_points(&s2(), 2, 3);
        let zonal = Zonal::between(&s2(), &m[0], &m[1]).unwrap();
        let stream = ProjectorStream::new(s2().geometry().unwrap(), zonal).unwrap();
        for term in stream.take(40) {
            let direct = projector(&s2(), term.ell, &m[0], &m[1]).unwrap();
            assert!((term.projector - direct).abs() < 1e-13);
        }
        let (a, b) = (Point::angle(0.3), Point::angle(5.1));
        let zonal = Zonal::between(&Manifold::Circle, &a, &b).unwrap();
        let stream = ProjectorStream::new(Geometry::Circle { length: TAU }, zonal).unwrap();
        for term in stream.take(1000) {
            let direct = projector(&Manifold::Circle, term.ell, &a, &b).unwrap();
            assert!((term.projector - direct).abs() < 1e-13, "ℓ={}", term.ell);
        }
    }

    #[test]
    fn circle_eigenfunctions() {
        assert_relative_eq!(
            eigenfunction(&Manifold::Circle, 0, 1, &Point::angle(1.1)).unwrap(),
            0.398_942_280_401_432_7,
            epsilon = 1e-15
        );
        assert!(
            eigenfunction(&Manifold::Circle, 2, 1, &Point::angle(PI / 4.0))
                .unwrap()
                .abs()
                < 1e-15
        );
        assert!(matches!(
            eigenfunction(&Manifold::Circle, 2, 3, &Point::angle(0.0)),
            Err(Error::Index(_))
        ));
    }

    #[test]
    fn sphere_eigenfunctions_reproduce_projector_diagonal() {
        let m = &sample_points(&s2(), 1, 11)[0];
        let f = eigenfunctions(&s2(), 1, m).unwrap();
        let diag: f64 = f.iter().map(|x| x * x).sum();
        assert_relative_eq!(diag, 3.0 / (4.0 * PI), epsilon = 1e-14);
        assert!(eigenfunctions(
            &Manifold::sphere(4).unwrap(),
            1,
            &base_point(&Manifold::sphere(4).unwrap())
        )
        .is_err());
        assert!(matches!(eigenfunction(&s2(), 1, 4, m), Err(Error::Index(_))));
    }

    #[test]
    fn addition_formula_on_s2() {
        let pts = sample_points(&s2(), 40, 5);
        for pair in pts.chunks(2) {
            for ell in 0..=10 {
                let fa = eigenfunctions(&s2(), ell, &pair[0]).unwrap();
                let fb = eigenfunctions(&s2(), ell, &pair[1]).unwrap();
                let sum: f64 = fa.iter().zip(&fb).map(|(x, y)| x * y).sum();
                let proj = projector(&s2(), ell, &pair[0], &pair[1]).unwrap();
                assert!((sum - proj).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn folded_angle_is_symmetric() {
        for &(x, y) in &[(0.1, 6.2), (3.0, 0.2), (1e-9, TAU - 1e-9)] {
            assert_eq!(folded_angle(x, y).to_bits(), folded_angle(y, x).to_bits());
            assert!(folded_angle(x, y) <= PI);
        }
    }

    #[test]
    fn point_validation() {
        assert!(Point::sphere(vec![1.0, 0.0, 1e-5]).is_err());
        assert!(Point::normalized(vec![0.0, 0.0, 0.0]).is_err());
        assert!(Point::angle(-0.5).validate(&Manifold::Circle).is_ok());
        assert!(Point::angle(0.0).validate(&s2()).is_err());
        let d = distance(&s2(), &base_point(&s2()), &point_at_distance(&s2(), 0.25)).unwrap();
        assert_relative_eq!(d, 0.25, epsilon = 1e-15);
    }
}
