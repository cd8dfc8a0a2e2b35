//! Product quadrature rules on `S^1` and `S^{d-1}` and the discretized
//! integral operators `f ↦ ∫ K(·, m') f(m') dm'`.

use crate::error::{Error, Result};
use crate::exec::{map_indexed, sum_indexed, Execution};
use crate::specfun::{gauss_jacobi, gauss_legendre, GaussRule};
use crate::spectra::{Manifold, Point};
use std::f64::consts::TAU;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub manifold: Manifold,
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
}

/// Quadrature rule of the given resolution.
///
/// * Circle: `N = resolution` equispaced nodes, exact for trigonometric
///   polynomials of degree `< N`.
/// * `S^2`: `r` Gauss–Legendre nodes in `cos θ` times `2r` equispaced azimuths;
///   exact for polynomials of degree `≤ 2r - 1`.
/// * `S^{d-1}`, `d > 3`: `x = (sqrt(1-u²) y, u)` with `u` on `r` Gauss–Jacobi
///   nodes for the weight `(1-u²)^{(d-3)/2}` and `y` on the rule for `S^{d-2}`;
///   same exactness degree, `2r^{d-1}` nodes.
pub fn build_rule(manifold: &Manifold, resolution: usize) -> Result<QuadratureRule> {
    if resolution < 2 {
        return Err(Error::InvalidInput("quadrature resolution must be >= 2".into()));
    }
    let (nodes, weights) = match *manifold {
        Manifold::Circle => {
            let n = resolution;
            let nodes = (0..n).map(|i| Point::angle(TAU * i as f64 / n as f64)).collect();
            (nodes, vec![TAU / n as f64; n])
        }
        Manifold::Sphere { dim } => {
            let (coords, weights) = sphere_nodes(dim, resolution)?;
            (coords.into_iter().map(Point::Sphere).collect(), weights)
        }
        Manifold::Euclidean { .. } => return Err(manifold.unsupported("quadrature")),
    };
    Ok(QuadratureRule {
        manifold: *manifold,
        nodes,
        weights,
    })
}

/// Coordinates and weights of the product rule on `S^{dim-1} ⊂ R^dim`.
fn sphere_nodes(dim: usize, r: usize) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    if dim == 2 {
        let n = 2 * r;
        let coords = (0..n)
            .map(|i| {
                let (s, c) = (TAU * i as f64 / n as f64).sin_cos();
                vec![c, s]
            })
            .collect();
        return Ok((coords, vec![TAU / n as f64; n]));
    }
    let (inner, inner_w) = sphere_nodes(dim - 1, r)?;
    let a = (dim as f64 - 3.0) / 2.0;
    let polar: GaussRule = if a == 0.0 {
        gauss_legendre(r)
    } else {
        gauss_jacobi(r, a, a)?
    };
    let mut coords = Vec::with_capacity(polar.nodes.len() * inner.len());
    let mut weights = Vec::with_capacity(coords.capacity());
    for (u, wu) in polar.nodes.iter().zip(&polar.weights) {
        let radius = (1.0 - u * u).sqrt();
        for (y, wy) in inner.iter().zip(&inner_w) {
            let mut x: Vec<f64> = y.iter().map(|c| radius * c).collect();
            x.push(*u);
            // renormalize away the rounding of sqrt(1 - u²)
            let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            x.iter_mut().for_each(|c| *c /= norm);
            coords.push(x);
            weights.push(wu * wy);
        }
    }
    Ok((coords, weights))
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        sum_indexed(Execution::Sequential, self.len(), |i| self.weights[i])
    }
}

/// `Σ_i w_i f(node_i)` with compensated, partition-independent summation.
pub fn integrate(rule: &QuadratureRule, f: impl Fn(&Point) -> f64 + Sync + Send) -> f64 {
    integrate_with(Execution::default(), rule, f)
}

pub fn integrate_with(exec: Execution, rule: &QuadratureRule, f: impl Fn(&Point) -> f64 + Sync + Send) -> f64 {
    sum_indexed(exec, rule.len(), |i| rule.weights[i] * f(&rule.nodes[i]))
}

/// Fallible variant of [`integrate`]; the first error (in node order) wins.
pub fn try_integrate(
    exec: Execution,
    rule: &QuadratureRule,
    f: impl Fn(&Point) -> Result<f64> + Sync + Send,
) -> Result<f64> {
    let values = map_indexed(exec, rule.len(), |i| f(&rule.nodes[i]));
    let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
    Ok(sum_indexed(exec, rule.len(), |i| rule.weights[i] * values[i]))
}

/// The discretized integral operator `m ↦ Σ_i w_i K(m, node_i) f(node_i)`.
///
/// `f` is sampled once at construction.
pub fn apply_integral_operator<'a, K, F>(
    rule: &'a QuadratureRule,
    kernel: K,
    f: F,
) -> Result<impl Fn(&Point) -> Result<f64> + 'a>
where
    K: Fn(&Point, &Point) -> Result<f64> + 'a,
    F: Fn(&Point) -> Result<f64>,
{
    let weighted: Vec<f64> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(x, w)| Ok(w * f(x)?))
        .collect::<Result<_>>()?;
    Ok(move |m: &Point| {
        let mut acc = crate::exec::CompensatedSum::new();
        for (x, wf) in rule.nodes.iter().zip(&weighted) {
            acc.add(kernel(m, x)? * wf);
        }
        Ok(acc.value())
    })
}

/// Values of the integral operator at every node, given `f` on the nodes.
pub fn apply_on_nodes(
    exec: Execution,
    rule: &QuadratureRule,
    kernel: impl Fn(&Point, &Point) -> Result<f64> + Sync + Send,
    values: &[f64],
) -> Result<Vec<f64>> {
    if values.len() != rule.len() {
        return Err(Error::InvalidInput(format!(
            "expected {} node values, got {}",
            rule.len(),
            values.len()
        )));
    }
    let rows = map_indexed(exec, rule.len(), |i| -> Result<f64> {
        let mut acc = crate::exec::CompensatedSum::new();
        for j in 0..rule.len() {
            acc.add(rule.weights[j] * kernel(&rule.nodes[i], &rule.nodes[j])? * values[j]);
        }
        Ok(acc.value())
    });
    rows.into_iter().collect()
}

/// Discrete `L²` norm `(Σ w_i v_i²)^{1/2}` of node values.
pub fn l2_norm(rule: &QuadratureRule, values: &[f64]) -> f64 {
    sum_indexed(Execution::Sequential, rule.len(), |i| {
        rule.weights[i] * values[i] * values[i]
    })
    .sqrt()
}
