use super::gamma::gamma;
use crate::error::{domain, Result};
use nalgebra::{DMatrix, SymmetricEigen};

/// Nodes and weights of a Gaussian rule on `[-1, 1]`, nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// `∫_a^b f` under the rule mapped affinely onto `[a, b]` (weight ignored).
    pub fn integrate_on(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// Gauss–Legendre rule with `n` points; Newton-refined roots of `P_n`.
pub fn gauss_legendre(n: usize) -> GaussRule {
    assert!(n > 0, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess for the i-th largest root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    GaussRule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let (pn, pn1) = if n == 0 { (1.0, 0.0) } else { (p1, p0) };
    let d = n as f64 * (x * pn - pn1) / (x * x - 1.0);
    (pn, d)
}

/// Gauss–Jacobi rule for the weight `(1-x)^α (1+x)^β` on `[-1, 1]`
/// (Golub–Welsch).
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<GaussRule> {
    if n == 0 {
        return Err(domain("gauss_jacobi", "need at least one node"));
    }
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(domain(
            "gauss_jacobi",
            format!("exponents must exceed -1, got ({alpha}, {beta})"),
        ));
    }
    if alpha == 0.0 && beta == 0.0 {
        return Ok(gauss_legendre(n));
    }
    let ab = alpha + beta;
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        jacobi[(k, k)] = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        if k + 1 < n {
            let m = kf + 1.0;
            let b = if k == 0 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * m * (m + alpha) * (m + beta) * (m + ab)
                    / ((2.0 * m + ab).powi(2) * (2.0 * m + ab + 1.0) * (2.0 * m + ab - 1.0))
            };
            jacobi[(k, k + 1)] = b.sqrt();
            jacobi[(k + 1, k)] = b.sqrt();
        }
    }
    let mu0 = 2f64.powf(ab + 1.0) * gamma(alpha + 1.0)? * gamma(beta + 1.0)? / gamma(ab + 2.0)?;
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let rule = gauss_legendre(12);
        assert_relative_eq!(rule.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
        for p in 0..24 {
            let exact = if p % 2 == 0 { 2.0 / (p as f64 + 1.0) } else { 0.0 };
            let q: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(p)).sum();
            assert!((q - exact).abs() < 1e-14, "degree {p}: {q} vs {exact}");
        }
    }

    #[test]
    fn jacobi_moments_match_beta_integrals() {
        // ∫ (1-x)^α (1+x)^β x^p dx checked against a fine Legendre rule on the
        // smooth case, and against the closed form for p = 0.
        for &(a, b) in &[(0.5, 0.5), (1.0, 0.0), (0.0, -0.5), (1.5, 2.0)] {
            let rule = gauss_jacobi(10, a, b).unwrap();
            let mu0 = 2f64.powf(a + b + 1.0) * gamma(a + 1.0).unwrap() * gamma(b + 1.0).unwrap()
                / gamma(a + b + 2.0).unwrap();
            assert_relative_eq!(rule.weights.iter().sum::<f64>(), mu0, max_relative = 1e-13);
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(rule.weights.iter().all(|&w| w > 0.0));
        }
        // (1-x^2)^{1/2} x^2 integrates to π/8.
        let rule = gauss_jacobi(6, 0.5, 0.5).unwrap();
        let q: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x * x).sum();
        assert_relative_eq!(q, std::f64::consts::PI / 8.0, max_relative = 1e-13);
    }

    #[test]
    fn singular_endpoint_weight() {
        // ∫_{-1}^{1} (1+x)^{-1/2} dx = 2√2 and ∫ (1+x)^{-1/2} x dx = -2√2/3
        let rule = gauss_jacobi(8, 0.0, -0.5).unwrap();
        let m0: f64 = rule.weights.iter().sum();
        let m1: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x).sum();
        assert_relative_eq!(m0, 2.0 * 2f64.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(m1, -2.0 * 2f64.sqrt() / 3.0, max_relative = 1e-12);
    }
}
