//! Quadrature on spheres: Gauss-Jacobi line rules and the tensor product
//! rule that is exact for all spherical polynomials up to a requested
//! degree, under the normalized surface measure.

use crate::geometry::{sph_to_cart, SpherePoint};
use crate::specfun::{jacobi, jacobi_deriv, ln_gamma};
use crate::{Error, Result};

/// Hard cap on product rule size; larger requests are almost certainly a
/// mistake and would exhaust memory long before finishing.
const MAX_RULE_POINTS: usize = 20_000_000;

/// Deterministic pairwise sum: order-stable, error growth O(log n).
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Nodes and weights of the `k`-point Gauss-Jacobi rule for the weight
/// `(1-t)^alpha (1+t)^beta` on `[-1, 1]`. Nodes ascend.
///
/// Zeros are bracketed by sign changes on a fine `theta`-grid (they are
/// near-equispaced in `theta = arccos t`), pinned down by bisection and
/// polished with Newton steps.
///
/// # Panics
/// If `k == 0` or either exponent is `<= -1` (the weight must be
/// integrable).
pub fn gauss_jacobi(k: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(k >= 1, "rule size must be positive");
    assert!(alpha > -1.0 && beta > -1.0, "weight must be integrable");
    let n = k as u32;
    let p = |t: f64| jacobi(n, alpha, beta, t);

    // Sign changes of P_k on an 8k-point theta-grid bracket every zero:
    // consecutive zeros are at least ~pi/(k+1) apart in theta.
    let grid = 8 * k;
    let mut brackets = Vec::with_capacity(k);
    let mut prev_t = (std::f64::consts::PI * (grid as f64) / grid as f64).cos();
    let mut prev_v = p(prev_t);
    for i in (0..grid).rev() {
        let t = (std::f64::consts::PI * i as f64 / grid as f64).cos();
        let v = p(t);
        if prev_v == 0.0 {
            brackets.push((prev_t, prev_t));
        } else if prev_v * v < 0.0 {
            brackets.push((prev_t, t));
        }
        prev_t = t;
        prev_v = v;
    }
    assert_eq!(
        brackets.len(),
        k,
        "zero bracketing failed for k={k}, alpha={alpha}, beta={beta}"
    );

    let mut nodes = Vec::with_capacity(k);
    for (mut lo, mut hi) in brackets {
        if lo == hi {
            nodes.push(lo);
            continue;
        }
        let mut flo = p(lo);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let fm = p(mid);
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if flo * fm < 0.0 {
                hi = mid;
            } else {
                lo = mid;
                flo = fm;
            }
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..3 {
            let d = jacobi_deriv(n, alpha, beta, x);
            if d != 0.0 {
                let step = p(x) / d;
                let xn = x - step;
                if (-1.0..=1.0).contains(&xn) {
                    x = xn;
                }
            }
        }
        nodes.push(x);
    }

    // w_i = (a_k / a_{k-1}) * gamma_{k-1} / (P_{k-1}(x_i) P_k'(x_i)),
    // with a_n the leading coefficient and gamma_n the squared norm.
    let ln_lead = |m: f64| {
        ln_gamma(2.0 * m + alpha + beta + 1.0)
            - m * std::f64::consts::LN_2
            - ln_gamma(m + 1.0)
            - ln_gamma(m + alpha + beta + 1.0)
    };
    let m = (k - 1) as f64;
    let ln_norm_prev = (alpha + beta + 1.0) * std::f64::consts::LN_2
        + ln_gamma(m + alpha + 1.0)
        + ln_gamma(m + beta + 1.0)
        - (2.0 * m + alpha + beta + 1.0).ln()
        - ln_gamma(m + alpha + beta + 1.0)
        - ln_gamma(m + 1.0);
    let scale = (ln_lead(k as f64) - ln_lead(m) + ln_norm_prev).exp();

    let weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let prev = jacobi(n - 1, alpha, beta, x);
            let slope = jacobi_deriv(n, alpha, beta, x);
            scale / (prev * slope)
        })
        .collect();
    debug_assert!(weights.iter().all(|w| *w > 0.0));
    (nodes, weights)
}

/// Gauss rule for the Gegenbauer weight `(1-t^2)^{lambda-1/2}`.
pub fn gauss_gegenbauer(k: usize, lambda: f64) -> (Vec<f64>, Vec<f64>) {
    gauss_jacobi(k, lambda - 0.5, lambda - 0.5)
}

/// A positive quadrature rule on the unit sphere `S^{d-1}` whose weights
/// sum to one, exact for every spherical polynomial up to a stated
/// degree under the normalized surface measure.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    dim: usize,
    exact_degree: u32,
    points: Vec<SpherePoint>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Tensor rule in hyperspherical angles: an equispaced full-period
    /// rule in the first angle times a Gauss rule for the weight
    /// `sin^{m-1}` in each remaining angle. Exactness for all degree
    /// `<= degree` polynomials follows because every monomial separates
    /// across the angles, each separated factor is integrated exactly,
    /// and the mixed-parity factors vanish identically under both the
    /// exact measure and the symmetric rules.
    pub fn product_rule(dim: usize, degree: u32) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain(format!(
                "sphere dimension must be at least 2, got {dim}"
            )));
        }
        let m = degree as usize + 1;
        let k = (degree as usize + 2) / 2;
        let total = m
            .checked_mul(k.checked_pow((dim - 2) as u32).ok_or_else(|| {
                Error::Overflow("product rule size".into())
            })?)
            .ok_or_else(|| Error::Overflow("product rule size".into()))?;
        if total > MAX_RULE_POINTS {
            return Err(Error::Resource(format!(
                "product rule for dim {dim}, degree {degree} needs {total} points \
                 (cap {MAX_RULE_POINTS})"
            )));
        }

        let first_angle: Vec<f64> = (0..m)
            .map(|i| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / m as f64)
            .collect();

        // Per remaining angle theta_j (j = 2..dim-1): Gauss nodes in
        // t = cos theta for the weight (1-t^2)^{(j-2)/2}.
        let mut polar: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
        for j in 2..dim {
            let lambda = (j as f64 - 1.0) / 2.0;
            let (nodes, weights) = gauss_gegenbauer(k, lambda);
            let angles: Vec<f64> = nodes.iter().map(|t| t.clamp(-1.0, 1.0).acos()).collect();
            polar.push((angles, weights));
        }

        let mut points = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut thetas = vec![0.0f64; dim - 1];
        let mut index = vec![0usize; dim - 2];
        'outer: loop {
            let mut w_polar = 1.0;
            for (slot, &pick) in index.iter().enumerate() {
                thetas[slot + 1] = polar[slot].0[pick];
                w_polar *= polar[slot].1[pick];
            }
            for &phi in &first_angle {
                thetas[0] = phi;
                points.push(sph_to_cart(&thetas));
                weights.push(w_polar);
            }
            // Odometer increment over the polar indices.
            for digit in &mut index {
                *digit += 1;
                if *digit < k {
                    continue 'outer;
                }
                *digit = 0;
            }
            break;
        }

        let total_weight = pairwise_sum(&weights);
        for w in &mut weights {
            *w /= total_weight;
        }
        Ok(Self {
            dim,
            exact_degree: degree,
            points,
            weights,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn exactness_degree(&self) -> u32 {
        self.exact_degree
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Quadrature value of `f` against the normalized surface measure.
    pub fn integrate(&self, f: impl Fn(&SpherePoint) -> f64) -> f64 {
        let terms: Vec<f64> = self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(x))
            .collect();
        pairwise_sum(&terms)
    }

    /// As `integrate`, for complex-valued integrands.
    pub fn integrate_complex(
        &self,
        f: impl Fn(&SpherePoint) -> num_complex::Complex64,
    ) -> num_complex::Complex64 {
        let values: Vec<num_complex::Complex64> = self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| f(x) * *w)
            .collect();
        let re: Vec<f64> = values.iter().map(|v| v.re).collect();
        let im: Vec<f64> = values.iter().map(|v| v.im).collect();
        num_complex::Complex64::new(pairwise_sum(&re), pairwise_sum(&im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-13;

    #[test]
    fn gauss_legendre_five_matches_classical_values() {
        let (nodes, weights) = gauss_jacobi(5, 0.0, 0.0);
        let want_nodes = [
            -0.906_179_845_938_664,
            -0.538_469_310_105_683,
            0.0,
            0.538_469_310_105_683,
            0.906_179_845_938_664,
        ];
        let want_weights = [
            0.236_926_885_056_189_08,
            0.478_628_670_499_366_47,
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_47,
            0.236_926_885_056_189_08,
        ];
        for i in 0..5 {
            assert!((nodes[i] - want_nodes[i]).abs() < TOL);
            assert!((weights[i] - want_weights[i]).abs() < TOL);
        }
    }

    #[test]
    fn gauss_chebyshev_matches_closed_form() {
        // alpha = beta = -1/2: nodes cos((2i-1)pi/2k), weights pi/k.
        let k = 9;
        let (nodes, weights) = gauss_jacobi(k, -0.5, -0.5);
        for (i, (&x, &w)) in nodes.iter().zip(&weights).enumerate() {
            let j = k - i;
            let want = (std::f64::consts::PI * (2.0 * j as f64 - 1.0) / (2.0 * k as f64)).cos();
            assert!((x - want).abs() < TOL, "node {i}: {x} vs {want}");
            assert!((w - std::f64::consts::PI / k as f64).abs() < TOL);
        }
    }

    #[test]
    fn jacobi_rule_reproduces_orthogonality() {
        // Exactness to degree 2k-1 is equivalent to integrating
        // P_a P_b exactly for a + b <= 2k-1.
        for (k, alpha, beta) in [(6usize, 0.7, 0.0), (11, -0.5, 0.0), (8, 1.5, 1.5)] {
            let (nodes, weights) = gauss_jacobi(k, alpha, beta);
            let ln_norm = |n: f64| {
                (alpha + beta + 1.0) * std::f64::consts::LN_2
                    + ln_gamma(n + alpha + 1.0)
                    + ln_gamma(n + beta + 1.0)
                    - (2.0 * n + alpha + beta + 1.0).ln()
                    - ln_gamma(n + alpha + beta + 1.0)
                    - ln_gamma(n + 1.0)
            };
            for a in 0..k as u32 {
                for b in a..k as u32 {
                    if a + b > 2 * k as u32 - 1 {
                        continue;
                    }
                    let got: f64 = nodes
                        .iter()
                        .zip(&weights)
                        .map(|(&x, &w)| w * jacobi(a, alpha, beta, x) * jacobi(b, alpha, beta, x))
                        .sum();
                    let want = if a == b { ln_norm(a as f64).exp() } else { 0.0 };
                    let scale = ln_norm(a as f64).exp().max(1.0);
                    assert!(
                        (got - want).abs() < 1e-12 * scale,
                        "k={k} alpha={alpha} a={a} b={b}: {got} vs {want}"
                    );
                }
            }
        }
    }

    /// Normalized moment integral of a monomial over the sphere: zero on
    /// any odd exponent, otherwise a ratio of gamma factors.
    fn monomial_moment(dim: usize, exps: &[u32]) -> f64 {
        if exps.iter().any(|e| e % 2 == 1) {
            return 0.0;
        }
        let total: u32 = exps.iter().sum();
        let mut ln = ln_gamma(dim as f64 / 2.0) - ln_gamma(dim as f64 / 2.0 + total as f64 / 2.0);
        for &e in exps {
            ln += ln_gamma(e as f64 / 2.0 + 0.5) - ln_gamma(0.5);
        }
        ln.exp()
    }

    #[test]
    fn product_rule_integrates_monomials_exactly() {
        for dim in [2usize, 3, 4, 5] {
            let degree = 8;
            let rule = QuadratureRule::product_rule(dim, degree).unwrap();
            assert!((pairwise_sum(rule.weights()) - 1.0).abs() < 1e-14);
            // Exhaustive sweep over exponent vectors of total degree <= 8.
            let mut exps = vec![0u32; dim];
            'sweep: loop {
                let total: u32 = exps.iter().sum();
                if total <= degree {
                    let got = rule.integrate(|x| {
                        x.coords()
                            .iter()
                            .zip(&exps)
                            .map(|(c, &e)| c.powi(e as i32))
                            .product()
                    });
                    let want = monomial_moment(dim, &exps);
                    assert!(
                        (got - want).abs() < 1e-13,
                        "dim={dim} exps={exps:?}: {got} vs {want}"
                    );
                }
                // Odometer with early skip once the prefix already
                // exceeds the degree budget.
                let mut slot = 0;
                loop {
                    if slot == dim {
                        break 'sweep;
                    }
                    exps[slot] += 1;
                    if exps.iter().sum::<u32>() <= degree {
                        break;
                    }
                    exps[slot] = 0;
                    slot += 1;
                }
            }
        }
    }

    #[test]
    fn product_rule_point_counts_follow_the_tensor_layout() {
        let rule = QuadratureRule::product_rule(3, 8).unwrap();
        assert_eq!(rule.len(), 9 * 5);
        let rule = QuadratureRule::product_rule(2, 6).unwrap();
        assert_eq!(rule.len(), 7);
        let rule = QuadratureRule::product_rule(5, 4).unwrap();
        assert_eq!(rule.len(), 5 * 3 * 3 * 3);
    }

    #[test]
    fn oversized_rules_are_refused() {
        let err = QuadratureRule::product_rule(8, 512).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
        let err = QuadratureRule::product_rule(1, 4).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn pairwise_sum_matches_sequential_on_benign_data() {
        let xs: Vec<f64> = (0..10_000).map(|i| (i as f64 * 0.37).sin()).collect();
        let seq: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - seq).abs() < 1e-9);
    }

    #[test]
    fn integrate_complex_agrees_with_componentwise_real_integrals() {
        let rule = QuadratureRule::product_rule(3, 6).unwrap();
        let f_re = |x: &SpherePoint| x.coords()[0] * x.coords()[0];
        let f_im = |x: &SpherePoint| x.coords()[2];
        let z = rule.integrate_complex(|x| num_complex::Complex64::new(f_re(x), f_im(x)));
        assert!((z.re - rule.integrate(f_re)).abs() < 1e-15);
        assert!((z.im - rule.integrate(f_im)).abs() < 1e-15);
    }
}
