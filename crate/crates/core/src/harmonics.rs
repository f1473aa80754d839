//! Orthonormal spherical harmonics on `S^{d-1}` in product form, plus a
//! small container for band-limited expansions.
//!
//! The basis harmonic with index chain `k` is
//!
//! ```text
//! Y_k(x) = A_k^n prod_{j=0}^{d-3} C_{k_j - |k_{j+1}|}^{(d-j-2)/2 + |k_{j+1}|}(cos th_{d-1-j})
//!          * (sin th_{d-1-j})^{|k_{j+1}|} * exp(i k_{d-2} th_1)
//! ```
//!
//! with `k_0 = n` and the normalization `A_k^n` from [`crate::specfun`].
//! The family is orthonormal under the normalized surface measure, and
//! `conj(Y_k) = Y_{k^-}` where `k^-` negates the final chain entry.

use num_complex::Complex64;

use crate::geometry::{cart_to_sph, SpherePoint};
use crate::quadrature::{pairwise_sum, QuadratureRule};
use crate::specfun::{gegenbauer, harmonic_dim, normalization_a, HarmonicIndex};
use crate::{Error, Result};

/// All index chains of degree `n` on `S^{d-1}`, in lexicographic order;
/// the count equals `dim H_n^d`.
pub fn enumerate_indices(d: u32, n: u32) -> Vec<HarmonicIndex> {
    assert!(d >= 3);
    let mut out = Vec::new();
    let mut prefix: Vec<i64> = Vec::with_capacity((d - 2) as usize);
    fn rec(d: u32, n: u32, bound: i64, prefix: &mut Vec<i64>, out: &mut Vec<HarmonicIndex>) {
        if prefix.len() + 1 == (d - 2) as usize {
            for k in -bound..=bound {
                prefix.push(k);
                out.push(
                    HarmonicIndex::new(d, n, prefix.clone())
                        .expect("generated chains satisfy the ordering"),
                );
                prefix.pop();
            }
            return;
        }
        for k in 0..=bound {
            prefix.push(k);
            rec(d, n, k, prefix, out);
            prefix.pop();
        }
    }
    rec(d, n, n as i64, &mut prefix, &mut out);
    out
}

/// Evaluates `Y_k` at spherical coordinates already recovered from a
/// point; angles must follow the convention in [`crate::geometry`].
pub(crate) fn evaluate_at_angles(idx: &HarmonicIndex, thetas: &[f64]) -> Complex64 {
    let d = idx.d() as usize;
    debug_assert_eq!(thetas.len(), d - 1);
    let kk = idx.magnitude_chain();
    let mut val = normalization_a(idx);
    for j in 0..d - 2 {
        let deg = (kk[j] - kk[j + 1]) as u32;
        let lam = (d - j - 2) as f64 / 2.0 + kk[j + 1];
        let ang = thetas[d - 2 - j];
        val *= gegenbauer(deg, lam, ang.cos());
        if kk[j + 1] > 0.0 {
            val *= ang.sin().powi(kk[j + 1] as i32);
        }
    }
    let m = *idx.chain().last().expect("chain is non-empty") as f64;
    let phase = m * thetas[0];
    Complex64::new(val * phase.cos(), val * phase.sin())
}

/// Evaluates the basis harmonic `Y_k` at a point of `S^{d-1}`.
///
/// # Panics
/// Panics if the point dimension does not match the index.
pub fn evaluate(idx: &HarmonicIndex, x: &SpherePoint) -> Complex64 {
    assert_eq!(
        x.dim(),
        idx.d() as usize,
        "point dimension must match the harmonic index"
    );
    evaluate_at_angles(idx, &cart_to_sph(x))
}

/// The degree-`n` reproducing kernel value
/// `sum_k conj(Y_k(v)) Y_k(w) = (2n+d-2)/(d-2) C_n^{(d-2)/2}(<v,w>)`.
pub fn addition_kernel(d: u32, n: u32, t: f64) -> f64 {
    assert!(d >= 3);
    let df = d as f64;
    (2.0 * n as f64 + df - 2.0) / (df - 2.0) * gegenbauer(n, (df - 2.0) / 2.0, t)
}

/// Total degree-`n` spectral energy `sum_k |<f, Y_k>|^2` of a real
/// function, with inner products taken by the supplied rule. Exact when
/// the rule degree covers `deg f + n`.
pub fn degree_energy(f: impl Fn(&SpherePoint) -> f64, n: u32, rule: &QuadratureRule) -> f64 {
    let d = rule.dim() as u32;
    let angles: Vec<Vec<f64>> = rule.points().iter().map(cart_to_sph).collect();
    let values: Vec<f64> = rule.points().iter().map(&f).collect();
    let terms: Vec<f64> = enumerate_indices(d, n)
        .iter()
        .map(|idx| {
            let mut re = Vec::with_capacity(rule.len());
            let mut im = Vec::with_capacity(rule.len());
            for ((th, &v), &w) in angles.iter().zip(&values).zip(rule.weights()) {
                let y = evaluate_at_angles(idx, th);
                // <f, Y> integrates f * conj(Y).
                re.push(w * v * y.re);
                im.push(w * v * -y.im);
            }
            let c = Complex64::new(pairwise_sum(&re), pairwise_sum(&im));
            c.norm_sqr()
        })
        .collect();
    pairwise_sum(&terms)
}

/// A finite harmonic expansion `f = sum c_k Y_k`, stored sparsely with
/// deterministic (lexicographic) term order.
#[derive(Debug, Clone)]
pub struct HarmonicCoefficients {
    d: u32,
    terms: std::collections::BTreeMap<HarmonicIndex, Complex64>,
}

impl HarmonicCoefficients {
    pub fn new(d: u32) -> Result<Self> {
        if d < 3 {
            return Err(Error::Domain(format!(
                "harmonic expansions require d >= 3, got {d}"
            )));
        }
        Ok(Self {
            d,
            terms: std::collections::BTreeMap::new(),
        })
    }

    /// Uniform random coefficients (real and imaginary parts in
    /// `[-1, 1]`) over every index of degree `<= max_degree`.
    pub fn random(d: u32, max_degree: u32, rng: &mut impl rand::Rng) -> Result<Self> {
        let mut out = Self::new(d)?;
        for n in 0..=max_degree {
            // Guards against absurd requests before allocating.
            let dim = harmonic_dim(d, n)?;
            if dim > 2_000_000 {
                return Err(Error::Resource(format!(
                    "degree {n} alone carries {dim} coefficients"
                )));
            }
            for idx in enumerate_indices(d, n) {
                let c = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
                out.terms.insert(idx, c);
            }
        }
        Ok(out)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn set(&mut self, idx: HarmonicIndex, c: Complex64) -> Result<()> {
        if idx.d() != self.d {
            return Err(Error::Domain(format!(
                "index dimension {} does not match expansion dimension {}",
                idx.d(),
                self.d
            )));
        }
        if c == Complex64::new(0.0, 0.0) {
            self.terms.remove(&idx);
        } else {
            self.terms.insert(idx, c);
        }
        Ok(())
    }

    pub fn get(&self, idx: &HarmonicIndex) -> Complex64 {
        self.terms
            .get(idx)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&HarmonicIndex, &Complex64)> {
        self.terms.iter()
    }

    /// Largest degree carrying a coefficient (0 for the empty expansion).
    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.n()).max().unwrap_or(0)
    }

    /// `sum |c_k|^2`, which equals the squared `L^2` norm by
    /// orthonormality.
    pub fn norm_sq(&self) -> f64 {
        let sq: Vec<f64> = self.terms.values().map(|c| c.norm_sqr()).collect();
        pairwise_sum(&sq)
    }

    /// Pointwise synthesis `sum c_k Y_k(x)`.
    pub fn evaluate(&self, x: &SpherePoint) -> Complex64 {
        let thetas = cart_to_sph(x);
        let mut re = Vec::with_capacity(self.terms.len());
        let mut im = Vec::with_capacity(self.terms.len());
        for (idx, c) in &self.terms {
            let v = c * evaluate_at_angles(idx, &thetas);
            re.push(v.re);
            im.push(v.im);
        }
        Complex64::new(pairwise_sum(&re), pairwise_sum(&im))
    }

    /// Rescales every degree-`n` coefficient by `factor(n)`, dropping
    /// degrees whose factor is zero.
    pub fn apply_degree_multiplier(&mut self, factor: impl Fn(u32) -> f64) {
        let mut scaled = std::collections::BTreeMap::new();
        for (idx, c) in std::mem::take(&mut self.terms) {
            let f = factor(idx.n());
            if f != 0.0 {
                scaled.insert(idx, c * f);
            }
        }
        self.terms = scaled;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn sample_points(d: usize, count: usize) -> Vec<SpherePoint> {
        let mut out = Vec::new();
        let mut state = 0.37f64;
        for _ in 0..count {
            let mut v = Vec::with_capacity(d);
            for _ in 0..d {
                state = (state * 913.0 + 53.0).rem_euclid(2.0) - 1.0;
                v.push(state + 0.05);
            }
            out.push(SpherePoint::from_unnormalized(v).unwrap());
        }
        out
    }

    #[test]
    fn enumeration_count_matches_the_dimension_formula() {
        for d in [3u32, 4, 5, 6] {
            for n in 0..=8 {
                assert_eq!(
                    enumerate_indices(d, n).len() as u64,
                    harmonic_dim(d, n).unwrap(),
                    "d={d} n={n}"
                );
            }
        }
    }

    #[test]
    fn basis_is_orthonormal_under_an_exact_rule() {
        for (d, n_max) in [(3u32, 6u32), (4, 5), (5, 4)] {
            let rule = QuadratureRule::product_rule(d as usize, 2 * n_max).unwrap();
            let mut all: Vec<HarmonicIndex> = Vec::new();
            for n in 0..=n_max {
                all.extend(enumerate_indices(d, n));
            }
            // Sampled pairs keep the sweep fast while touching every
            // degree and both chain extremes.
            for (i, a) in all.iter().enumerate() {
                for b in all.iter().skip(i).step_by(7).take(6) {
                    let got = rule.integrate_complex(|x| evaluate(a, x) * evaluate(b, x).conj());
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!(
                        (got - want).norm() < 1e-11,
                        "d={d} <{a:?}, {b:?}> = {got}"
                    );
                }
            }
        }
    }

    #[test]
    fn conjugation_negates_the_final_chain_entry() {
        for d in [3u32, 4, 5] {
            for p in sample_points(d as usize, 6) {
                for idx in enumerate_indices(d, 3) {
                    let mut neg = idx.chain().to_vec();
                    let last = neg.len() - 1;
                    neg[last] = -neg[last];
                    let mirror = HarmonicIndex::new(d, 3, neg).unwrap();
                    let a = evaluate(&idx, &p).conj();
                    let b = evaluate(&mirror, &p);
                    assert!((a - b).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn addition_theorem_holds_at_sample_pairs() {
        for d in [3u32, 4, 5] {
            let pts = sample_points(d as usize, 4);
            for n in [0u32, 1, 3, 6] {
                for v in &pts {
                    for w in &pts {
                        let lhs: Complex64 = enumerate_indices(d, n)
                            .iter()
                            .map(|k| evaluate(k, v).conj() * evaluate(k, w))
                            .sum();
                        let rhs = addition_kernel(d, n, v.dot(w));
                        assert!(
                            (lhs - rhs).norm() < 1e-10 * rhs.abs().max(1.0),
                            "d={d} n={n}"
                        );
                        assert!(lhs.im.abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn only_the_zonal_harmonic_survives_at_the_pole() {
        for d in [3u32, 4, 5] {
            let pole = SpherePoint::pole(d as usize);
            for n in [1u32, 2, 5] {
                for idx in enumerate_indices(d, n) {
                    let v = evaluate(&idx, &pole);
                    if idx.chain().iter().all(|&k| k == 0) {
                        let want = crate::specfun::zonal_pole_value(d, n);
                        assert!((v.re - want).abs() < 1e-12 * want);
                        assert!(v.im.abs() < 1e-14 * want);
                    } else {
                        assert!(v.norm() < 1e-12, "d={d} n={n} {idx:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn synthesis_norm_matches_coefficient_energy() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let f = HarmonicCoefficients::random(3, 5, &mut rng).unwrap();
        let rule = QuadratureRule::product_rule(3, 10).unwrap();
        let quad = rule.integrate(|x| f.evaluate(x).norm_sqr());
        assert!(
            (quad - f.norm_sq()).abs() < 1e-11 * f.norm_sq(),
            "{quad} vs {}",
            f.norm_sq()
        );
    }

    #[test]
    fn degree_energy_recovers_a_planted_component() {
        let d = 4u32;
        let idx = HarmonicIndex::new(d, 2, vec![1, -1]).unwrap();
        let rule = QuadratureRule::product_rule(d as usize, 6).unwrap();
        let f = |x: &SpherePoint| (evaluate(&idx, x) * Complex64::new(0.7, 0.0)).re * 2.0;
        // f = 0.7 (Y + conj Y) picks up 0.49 on each of the two mirror
        // indices of degree 2 and nothing elsewhere.
        let e2 = degree_energy(f, 2, &rule);
        assert!((e2 - 2.0 * 0.49).abs() < 1e-11, "{e2}");
        let e3 = degree_energy(f, 3, &rule);
        assert!(e3.abs() < 1e-12);
    }

    #[test]
    fn degree_multiplier_rescales_and_prunes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut f = HarmonicCoefficients::random(3, 4, &mut rng).unwrap();
        let idx = HarmonicIndex::new(3, 2, vec![1]).unwrap();
        let before = f.get(&idx);
        f.apply_degree_multiplier(|n| if n == 4 { 0.0 } else { n as f64 });
        assert_eq!(f.get(&idx), before * 2.0);
        assert_eq!(f.max_degree(), 3);
    }
}
