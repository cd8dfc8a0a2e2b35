//! Sequence acceleration: iterated Aitken Δ², Wynn's ε-algorithm and
//! Richardson (polynomial) extrapolation.

/// Deepest iterated Aitken Δ² estimate of the limit of `x`.
///
/// Each pass maps `x_k, x_{k+1}, x_{k+2}` to
/// `x_{k+2} - (Δx_{k+1})² / Δ²x_k`; passes repeat while at least three terms
/// remain. A vanishing second difference means the tail is already constant
/// and the last term is kept.
pub fn aitken_iterated(x: &[f64]) -> f64 {
    match x.len() {
        0 => f64::NAN,
        1 | 2 => x[x.len() - 1],
        _ => {
            let mut cur = x.to_vec();
            while cur.len() >= 3 {
                cur = aitken_pass(&cur);
            }
            cur[cur.len() - 1]
        }
    }
}

fn aitken_pass(x: &[f64]) -> Vec<f64> {
    x.windows(3)
        .map(|w| {
            let d1 = w[2] - w[1];
            let d2 = w[2] - 2.0 * w[1] + w[0];
            let scale = w[0].abs().max(w[1].abs()).max(w[2].abs()).max(f64::MIN_POSITIVE);
            if d2.abs() <= 1e-15 * scale || !d2.is_finite() {
                w[2]
            } else {
                w[2] - d1 * d1 / d2
            }
        })
        .collect()
}

/// Wynn ε-algorithm estimate of the limit of the partial sums `s`.
///
/// Returns the entry of the highest even column built from the last terms.
pub fn wynn_epsilon(s: &[f64]) -> f64 {
    let n = s.len();
    if n == 0 {
        return f64::NAN;
    }
    if n < 3 {
        return s[n - 1];
    }
    // prev = column k-1, cur = column k; column -1 is zero.
    let mut prev = vec![0.0; n + 1];
    let mut cur = s.to_vec();
    let mut best = s[n - 1];
    let mut k = 0;
    while cur.len() >= 2 {
        let next: Vec<f64> = (0..cur.len() - 1)
            .map(|i| {
                let diff = cur[i + 1] - cur[i];
                if diff == 0.0 || !diff.is_finite() {
                    f64::INFINITY
                } else {
                    prev[i + 1] + 1.0 / diff
                }
            })
            .collect();
        k += 1;
        if next.iter().any(|v| !v.is_finite()) {
            break;
        }
        prev = cur;
        cur = next;
        if k % 2 == 0 {
            best = cur[cur.len() - 1];
        }
    }
    best
}

/// Value at `h = 0` of the polynomial through `(h_i, x_i)` (Neville's
/// scheme). Suited to sequences `x(h)` analytic at `h = 0` sampled at
/// geometrically shrinking `h`.
pub fn richardson(h: &[f64], x: &[f64]) -> f64 {
    assert_eq!(h.len(), x.len(), "one abscissa per term");
    if x.is_empty() {
        return f64::NAN;
    }
    let mut p = x.to_vec();
    let n = p.len();
    for k in 1..n {
        for i in (k..n).rev() {
            // p[i] becomes the value at 0 of the interpolant through points i-k..=i
            p[i] = (h[i - k] * p[i] - h[i] * p[i - 1]) / (h[i - k] - h[i]);
        }
    }
    p[n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_is_exact_for_polynomials() {
        let h: Vec<f64> = (1..=6).map(|j| 2f64.powi(-j)).collect();
        let x: Vec<f64> = h.iter().map(|h| 3.0 - 2.0 * h + 5.0 * h * h - h.powi(4)).collect();
        assert!((richardson(&h, &x) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn richardson_extrapolates_analytic_functions() {
        // ln(1 + h)/h → 1
        let h: Vec<f64> = (3..=14).map(|j| 2f64.powi(-j)).collect();
        let x: Vec<f64> = h.iter().map(|h: &f64| h.ln_1p() / h).collect();
        assert!((richardson(&h, &x) - 1.0).abs() < 1e-13);
    }

    fn partial_sums(terms: impl Iterator<Item = f64>) -> Vec<f64> {
        terms
            .scan(0.0, |acc, t| {
                *acc += t;
                Some(*acc)
            })
            .collect()
    }

    #[test]
    fn aitken_is_exact_on_geometric_sequences() {
        let x: Vec<f64> = (0..6).map(|k| 3.0 + 0.7f64.powi(k)).collect();
        assert!((aitken_iterated(&x) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // ln 2 = 1 - 1/2 + 1/3 - ...
        let s = partial_sums((1..=14).map(|k| if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64));
        assert!((s[13] - 2f64.ln()).abs() > 1e-2);
        assert!((wynn_epsilon(&s) - 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn aitken_on_abel_type_sequence() {
        // square-root singularity at t = 1, sampled at t_j = 1 - 2^{-j}
        let f = |t: f64| 2.0 - (1.0 - t).sqrt() + 0.3 * (1.0 - t);
        let x: Vec<f64> = (3..15).map(|j| f(1.0 - 2f64.powi(-j))).collect();
        assert!((aitken_iterated(&x) - 2.0).abs() < 1e-10);
    }

    #[test]
    fn short_inputs() {
        assert!(aitken_iterated(&[]).is_nan());
        assert_eq!(aitken_iterated(&[1.0, 2.0]), 2.0);
        assert_eq!(wynn_epsilon(&[5.0]), 5.0);
        assert_eq!(aitken_iterated(&[1.0, 1.0, 1.0, 1.0]), 1.0);
    }
}
