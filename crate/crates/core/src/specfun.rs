//! Scalar special functions and normalization constants.
//!
//! Everything downstream assembles products of Gamma functions in the log
//! domain through [`ln_gamma`]; ratios of raw `Gamma` values are never
//! formed. Polynomial families are evaluated by forward three-term
//! recurrences, which are stable on `[-1, 1]` for the degrees used here
//! (up to a few thousand).

use crate::{Error, Result};

/// Coefficients for the Lanczos series with `g = 607/128`, truncated at 14
/// terms. Relative accuracy of the resulting `ln Gamma` is about `1e-15`
/// over the positive axis.
const LANCZOS_G: f64 = 4.742_187_5;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_1;
// Digits kept as published even where f64 rounds them early.
#[allow(clippy::excessive_precision)]
const LANCZOS_C: [f64; 14] = [
    57.156_235_665_862_923,
    -59.597_960_355_475_49,
    14.136_097_974_741_746,
    -0.491_913_816_097_620_2,
    3.399_464_998_481_188_9e-5,
    4.652_362_892_704_857_5e-5,
    -9.837_447_530_487_956e-5,
    1.580_887_032_249_125e-4,
    -2.102_644_417_241_048_8e-4,
    2.174_396_181_152_126_4e-4,
    -1.643_181_065_367_639e-4,
    8.441_822_398_385_274e-5,
    -2.619_083_840_158_141e-5,
    3.689_918_265_953_162e-6,
];

/// Natural log of the Gamma function for `x > 0`.
///
/// # Panics
/// Panics if `x <= 0` or `x` is not finite.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(
        x > 0.0 && x.is_finite(),
        "ln_gamma requires finite x > 0, got {x}"
    );
    let tmp = x + LANCZOS_G + 0.5;
    let mut ser = LANCZOS_C0;
    for (k, c) in LANCZOS_C.iter().enumerate() {
        ser += c / (x + (k + 1) as f64);
    }
    (x + 0.5) * tmp.ln() - tmp + ((2.0 * std::f64::consts::PI).sqrt() * ser / x).ln()
}

/// Log of the binomial coefficient `C(n, m)` for `m <= n`.
pub fn ln_binomial(n: u32, m: u32) -> f64 {
    assert!(m <= n, "ln_binomial requires m <= n");
    ln_gamma(n as f64 + 1.0) - ln_gamma(m as f64 + 1.0) - ln_gamma((n - m) as f64 + 1.0)
}

/// Gegenbauer polynomial `C_n^lambda(t)` for `lambda > 0`, by the forward
/// recurrence `n C_n = 2(n+lambda-1) t C_{n-1} - (n+2lambda-2) C_{n-2}`.
pub fn gegenbauer(n: u32, lambda: f64, t: f64) -> f64 {
    assert!(lambda > 0.0, "gegenbauer requires lambda > 0, got {lambda}");
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * lambda * t;
    for m in 2..=n as u64 {
        let m = m as f64;
        let next = (2.0 * (m + lambda - 1.0) * t * cur - (m + 2.0 * lambda - 2.0) * prev) / m;
        prev = cur;
        cur = next;
    }
    cur
}

/// Derivative `d/dt C_n^lambda(t) = 2 lambda C_{n-1}^{lambda+1}(t)`.
pub fn gegenbauer_deriv(n: u32, lambda: f64, t: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    2.0 * lambda * gegenbauer(n - 1, lambda + 1.0, t)
}

/// Squared weighted norm `int_{-1}^1 C_n^lambda(t)^2 (1-t^2)^{lambda-1/2} dt
/// = pi Gamma(n+2lambda) / (2^{2lambda-1} n! (n+lambda) Gamma(lambda)^2)`.
pub fn gegenbauer_norm_sq(n: u32, lambda: f64) -> f64 {
    assert!(lambda > 0.0, "gegenbauer_norm_sq requires lambda > 0");
    let n = n as f64;
    let ln = std::f64::consts::PI.ln() + ln_gamma(n + 2.0 * lambda)
        - (2.0 * lambda - 1.0) * std::f64::consts::LN_2
        - ln_gamma(n + 1.0)
        - (n + lambda).ln()
        - 2.0 * ln_gamma(lambda);
    ln.exp()
}

/// Jacobi polynomial `P_n^{(alpha,beta)}(t)` for `alpha, beta > -1`.
pub fn jacobi(n: u32, alpha: f64, beta: f64, t: f64) -> f64 {
    assert!(
        alpha > -1.0 && beta > -1.0,
        "jacobi requires alpha, beta > -1"
    );
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = (alpha + 1.0) + (alpha + beta + 2.0) * (t - 1.0) / 2.0;
    for m in 2..=n as u64 {
        let m = m as f64;
        let c = 2.0 * m + alpha + beta;
        // 2m(m+a+b)(c-2) P_m = (c-1)[c(c-2) t + a^2-b^2] P_{m-1}
        //                      - 2(m+a-1)(m+b-1) c P_{m-2}
        let a1 = 2.0 * m * (m + alpha + beta) * (c - 2.0);
        let a2 = (c - 1.0) * (c * (c - 2.0) * t + alpha * alpha - beta * beta);
        let a3 = 2.0 * (m + alpha - 1.0) * (m + beta - 1.0) * c;
        let next = (a2 * cur - a3 * prev) / a1;
        prev = cur;
        cur = next;
    }
    cur
}

/// Derivative `d/dt P_n^{(alpha,beta)}(t)
/// = (n+alpha+beta+1)/2 P_{n-1}^{(alpha+1,beta+1)}(t)`.
pub fn jacobi_deriv(n: u32, alpha: f64, beta: f64, t: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    0.5 * (n as f64 + alpha + beta + 1.0) * jacobi(n - 1, alpha + 1.0, beta + 1.0, t)
}

/// Dimension of the space of spherical harmonics of degree `n` on
/// `S^{d-1}`: `(2n+d-2) (n+d-3)! / ((d-2)! n!)`, computed exactly in
/// integer arithmetic.
pub fn harmonic_dim(d: u32, n: u32) -> Result<u64> {
    assert!(d >= 3, "harmonic_dim requires d >= 3");
    if n == 0 {
        return Ok(1);
    }
    let n = n as u128;
    let d = d as u128;
    let mut num: u128 = 2 * n + d - 2;
    for i in 1..=(d - 3) {
        num = num
            .checked_mul(n + i)
            .ok_or_else(|| Error::Overflow(format!("harmonic_dim(d={d}, n={n})")))?;
    }
    let mut den: u128 = 1;
    for i in 2..=(d - 2) {
        den *= i;
    }
    debug_assert_eq!(num % den, 0);
    u64::try_from(num / den)
        .map_err(|_| Error::Overflow(format!("harmonic_dim(d={d}, n={n}) exceeds u64")))
}

/// Index of a basis harmonic: ambient dimension `d`, degree `n`, and the
/// chain `k = (k_1, ..., k_{d-2})` with
/// `n >= k_1 >= ... >= k_{d-3} >= |k_{d-2}|`, all but the last entry
/// non-negative and the last entry a signed integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HarmonicIndex {
    d: u32,
    n: u32,
    k: Vec<i64>,
}

impl HarmonicIndex {
    pub fn new(d: u32, n: u32, k: Vec<i64>) -> Result<Self> {
        if d < 3 {
            return Err(Error::Domain(format!("harmonic index requires d >= 3, got {d}")));
        }
        if k.len() != (d - 2) as usize {
            return Err(Error::Domain(format!(
                "harmonic index for d = {d} needs a chain of length {}, got {}",
                d - 2,
                k.len()
            )));
        }
        let mut bound = n as i64;
        for (i, &ki) in k.iter().enumerate() {
            let last = i + 1 == k.len();
            let mag = if last { ki.abs() } else { ki };
            if mag < 0 || mag > bound {
                return Err(Error::Domain(format!(
                    "harmonic chain violates n >= k_1 >= ... >= |k_{}|: {:?} at degree {n}",
                    d - 2,
                    k
                )));
            }
            bound = mag;
        }
        Ok(Self { d, n, k })
    }

    /// The zonal index `k = 0`: the only basis harmonic that does not
    /// vanish at the pole `e^d`.
    pub fn zonal(d: u32, n: u32) -> Self {
        Self::new(d, n, vec![0; (d - 2) as usize]).expect("zonal chain is always valid")
    }

    /// The top index `(n, ..., n, +/-n)` carrying the equatorial wave
    /// `(x_2 +/- i x_1)^n`.
    pub fn top(d: u32, n: u32, positive: bool) -> Self {
        let mut k = vec![n as i64; (d - 2) as usize];
        if !positive {
            *k.last_mut().expect("d >= 3 gives a non-empty chain") = -(n as i64);
        }
        Self::new(d, n, k).expect("top chain is always valid")
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn chain(&self) -> &[i64] {
        &self.k
    }

    /// Magnitude chain `(n, |k_1|, ..., |k_{d-2}|)` prefixed with the
    /// degree, as consumed by the normalization formula.
    pub(crate) fn magnitude_chain(&self) -> Vec<f64> {
        let mut m = Vec::with_capacity(self.k.len() + 1);
        m.push(self.n as f64);
        m.extend(self.k.iter().map(|&ki| ki.abs() as f64));
        m
    }
}

/// Normalization constant `A_k^n > 0` making the product-form harmonic
/// with index `k` unit-norm in `L^2` of the normalized surface measure:
///
/// `(A_k^n)^2 = 2^{(d-4)(d-2)} / Gamma(d/2) * prod_{j=0}^{d-3}
///   [2^{2|k_{j+1}|-j} (k_j-|k_{j+1}|)! (2k_j+d-j-2)
///    Gamma((d-j-2)/2+|k_{j+1}|)^2] / [sqrt(pi) Gamma(k_j+|k_{j+1}|+d-j-2)]`
///
/// with `k_0 = n`. Assembled entirely in the log domain.
pub fn normalization_a(idx: &HarmonicIndex) -> f64 {
    let d = idx.d() as f64;
    let kk = idx.magnitude_chain();
    let mut ln = (d - 4.0) * (d - 2.0) * std::f64::consts::LN_2 - ln_gamma(d / 2.0);
    for j in 0..kk.len() - 1 {
        let jf = j as f64;
        let (kj, kj1) = (kk[j], kk[j + 1]);
        ln += (2.0 * kj1 - jf) * std::f64::consts::LN_2
            + ln_gamma(kj - kj1 + 1.0)
            + (2.0 * kj + d - jf - 2.0).ln()
            + 2.0 * ln_gamma((d - jf - 2.0) / 2.0 + kj1)
            - 0.5 * std::f64::consts::PI.ln()
            - ln_gamma(kj + kj1 + d - jf - 2.0);
    }
    (0.5 * ln).exp()
}

/// Independent product form of the top-index constant,
///
/// `A_{(n,...,n)}^n = 2^{(2-d)/2} / sqrt(Gamma(d/2)) * prod_{j=0}^{d-3}
///   sqrt((2n+d-j-2) Gamma(n+(d-j-2)/2) / Gamma(n+(d-j-1)/2))`,
///
/// used both as a fast path for curvelet spectra and as a cross-check of
/// [`normalization_a`].
pub fn normalization_a_top(d: u32, n: u32) -> f64 {
    assert!(d >= 3);
    let df = d as f64;
    let nf = n as f64;
    let mut ln = (2.0 - df) / 2.0 * std::f64::consts::LN_2 - 0.5 * ln_gamma(df / 2.0);
    for j in 0..(d - 2) {
        let jf = j as f64;
        ln += 0.5
            * ((2.0 * nf + df - jf - 2.0).ln() + ln_gamma(nf + (df - jf - 2.0) / 2.0)
                - ln_gamma(nf + (df - jf - 1.0) / 2.0));
    }
    ln.exp()
}

/// Value of the zonal harmonic at the pole,
/// `Y_0^{d,n}(e^d) = sqrt(Gamma(n+d-2)(2n+d-2) / (n! Gamma(d-1)))`.
pub fn zonal_pole_value(d: u32, n: u32) -> f64 {
    let df = d as f64;
    let nf = n as f64;
    (0.5 * (ln_gamma(nf + df - 2.0) + (2.0 * nf + df - 2.0).ln()
        - ln_gamma(nf + 1.0)
        - ln_gamma(df - 1.0)))
    .exp()
}

#[cfg(test)]
// Frozen oracle tables keep every digit of the reference computation.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn ln_gamma_matches_frozen_high_precision_values() {
        // Reference values computed with 40-digit arithmetic.
        let cases = [
            (0.001, 6.907178885383853682512),
            (0.1, 2.25271265173420595987),
            (0.5, 0.5723649429247000870717),
            (1.0, 0.0),
            (1.5, -0.1207822376352452223455),
            (2.0, 0.0),
            (3.75, 1.486815578593417055541),
            (10.0, 12.80182748008146961121),
            (123.456, 469.6055471299294687301),
            (1000.0, 5905.220423209181211826),
            (31622.7766, 296036.5645151096258382),
            (1e6, 12815504.56914761165998),
        ];
        for (x, want) in cases {
            let got = ln_gamma(x);
            assert!(
                (got - want).abs() <= 1e-13 * want.abs().max(1.0),
                "ln_gamma({x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn ln_gamma_satisfies_recurrence_across_the_domain() {
        // ln Gamma(x+1) = ln Gamma(x) + ln x
        let mut x = 1.07e-3;
        while x < 9e5 {
            let lhs = ln_gamma(x + 1.0);
            let rhs = ln_gamma(x) + x.ln();
            assert!(
                (lhs - rhs).abs() <= 1e-13 * lhs.abs().max(1.0),
                "recurrence defect at x = {x}"
            );
            x *= 3.7;
        }
    }

    #[test]
    #[should_panic(expected = "ln_gamma requires")]
    fn ln_gamma_rejects_non_positive_input() {
        ln_gamma(0.0);
    }

    #[test]
    fn gegenbauer_matches_closed_forms_and_frozen_values() {
        // C_2^1(t) = 4t^2 - 1
        assert!((gegenbauer(2, 1.0, 0.5) - 0.0).abs() < TOL);
        for t in [-0.9, -0.3, 0.2, 0.77] {
            assert!(rel_err(gegenbauer(2, 1.0, t), 4.0 * t * t - 1.0) < TOL);
        }
        let cases = [
            (5, 0.5, 0.3, 0.34538625),
            (8, 1.0, -0.7, 1.07513856),
            (13, 2.5, 0.9, -129.4777675679584790039),
            (30, 1.5, 0.05, 0.0191356134385217904871),
        ];
        for (n, lam, t, want) in cases {
            assert!(
                rel_err(gegenbauer(n, lam, t), want) < 1e-12,
                "C_{n}^{lam}({t})"
            );
        }
    }

    #[test]
    fn gegenbauer_value_at_one_is_gamma_ratio() {
        // C_n^lambda(1) = Gamma(n+2 lambda) / (n! Gamma(2 lambda))
        for (n, lam) in [(3u32, 0.5), (7, 1.0), (12, 1.5), (40, 2.5)] {
            let want = (ln_gamma(n as f64 + 2.0 * lam)
                - ln_gamma(n as f64 + 1.0)
                - ln_gamma(2.0 * lam))
            .exp();
            assert!(rel_err(gegenbauer(n, lam, 1.0), want) < 1e-12);
        }
    }

    #[test]
    fn gegenbauer_norm_sq_matches_independent_integration() {
        // Frozen values from 40-digit numeric integration of
        // C_n^lambda(t)^2 (1-t^2)^{lambda-1/2} over [-1, 1]; every
        // lambda = 1 entry came out as pi/2 exactly (Chebyshev-U weight).
        let cases = [
            (0, 0.5, 2.0),
            (1, 0.5, 0.6666666666666666666667),
            (4, 0.5, 0.2222222222222222222222),
            (0, 1.0, std::f64::consts::FRAC_PI_2),
            (3, 1.0, std::f64::consts::FRAC_PI_2),
            (2, 1.5, 3.428571428571428571429),
            (7, 2.5, 92.63157894736842105263),
            (12, 1.0, std::f64::consts::FRAC_PI_2),
        ];
        for (n, lam, want) in cases {
            assert!(
                rel_err(gegenbauer_norm_sq(n, lam), want) < 1e-13,
                "norm_sq({n}, {lam})"
            );
        }
    }

    #[test]
    fn jacobi_matches_legendre_and_frozen_values() {
        // P_n^{(0,0)} is the Legendre polynomial; P_2(0.3) = -0.365.
        assert!(rel_err(jacobi(2, 0.0, 0.0, 0.3), -0.365) < TOL);
        let cases = [
            (4, 0.5, 0.0, 0.2, 0.1069375),
            (9, 1.5, 1.5, -0.4, 0.716153556015625),
            (16, 2.5, 0.0, 0.77, 0.1727883813897791797585),
            (25, 1.0, 2.0, -0.9, 2.405076675219632355808),
        ];
        for (n, a, b, t, want) in cases {
            assert!(
                rel_err(jacobi(n, a, b, t), want) < 1e-12,
                "P_{n}^{{({a},{b})}}({t})"
            );
        }
    }

    #[test]
    fn jacobi_reduces_to_gegenbauer_up_to_leading_constant() {
        // C_n^lambda = [Gamma(lambda+1/2) Gamma(n+2 lambda) /
        //   (Gamma(2 lambda) Gamma(n+lambda+1/2))] P_n^{(l-1/2, l-1/2)}
        for (n, lam) in [(3u32, 0.5), (6, 1.0), (11, 1.5)] {
            let c = (ln_gamma(lam + 0.5) + ln_gamma(n as f64 + 2.0 * lam)
                - ln_gamma(2.0 * lam)
                - ln_gamma(n as f64 + lam + 0.5))
            .exp();
            for t in [-0.8, -0.1, 0.44, 0.95] {
                let lhs = gegenbauer(n, lam, t);
                let rhs = c * jacobi(n, lam - 0.5, lam - 0.5, t);
                assert!(rel_err(lhs, rhs) < 1e-12, "n={n} lam={lam} t={t}");
            }
        }
    }

    #[test]
    fn derivative_identities_match_finite_differences() {
        let h = 1e-6;
        for (n, lam, t) in [(5u32, 0.5, 0.3), (9, 1.5, -0.6)] {
            let fd = (gegenbauer(n, lam, t + h) - gegenbauer(n, lam, t - h)) / (2.0 * h);
            assert!(rel_err(gegenbauer_deriv(n, lam, t), fd) < 1e-7);
        }
        for (n, a, b, t) in [(6u32, 0.5, 0.0, 0.4), (10, 1.5, 1.5, -0.2)] {
            let fd = (jacobi(n, a, b, t + h) - jacobi(n, a, b, t - h)) / (2.0 * h);
            assert!(rel_err(jacobi_deriv(n, a, b, t), fd) < 1e-7);
        }
    }

    #[test]
    fn harmonic_dim_matches_low_dimension_closed_forms() {
        for n in 0..200u32 {
            assert_eq!(harmonic_dim(3, n).unwrap(), 2 * n as u64 + 1);
            assert_eq!(harmonic_dim(4, n).unwrap(), ((n + 1) * (n + 1)) as u64);
            let d5 = (2 * n as u64 + 3) * (n as u64 + 1) * (n as u64 + 2) / 6;
            assert_eq!(harmonic_dim(5, n).unwrap(), d5);
        }
        assert_eq!(harmonic_dim(3, 10_000).unwrap(), 20_001);
    }

    #[test]
    fn harmonic_index_enforces_the_chain_ordering() {
        assert!(HarmonicIndex::new(4, 3, vec![2, -2]).is_ok());
        assert!(HarmonicIndex::new(4, 3, vec![2, 3]).is_err());
        assert!(HarmonicIndex::new(4, 3, vec![4, 0]).is_err());
        assert!(HarmonicIndex::new(5, 2, vec![2, -1]).is_err());
        assert!(HarmonicIndex::new(3, 2, vec![-2]).is_ok());
        assert!(HarmonicIndex::new(4, 3, vec![2]).is_err());
    }

    #[test]
    fn normalization_matches_hand_computed_small_cases() {
        // A_0^0 = 1 in every dimension; d = 3 values reduce to
        // sqrt(2^{2n} (2n+1) Gamma(n+1/2)^2 / (2 sqrt(pi) Gamma(3/2) (2n)!)).
        for d in 3..=6 {
            let a = normalization_a(&HarmonicIndex::zonal(d, 0));
            assert!(rel_err(a, 1.0) < TOL, "A_0^0 at d = {d}");
        }
        let a11 = normalization_a(&HarmonicIndex::top(3, 1, true));
        assert!(rel_err(a11, (1.5f64).sqrt()) < TOL);
        let a11m = normalization_a(&HarmonicIndex::top(3, 1, false));
        assert!(rel_err(a11m, (1.5f64).sqrt()) < TOL, "sign of k_{{d-2}} is immaterial");
    }

    #[test]
    fn top_normalization_agrees_with_the_general_formula() {
        for d in [3u32, 4, 5] {
            for n in (0..=256u32).step_by(8).chain([1, 3, 17, 255]) {
                let general = normalization_a(&HarmonicIndex::top(d, n, true));
                let product = normalization_a_top(d, n);
                assert!(
                    rel_err(general, product) < 1e-12,
                    "d={d} n={n}: {general} vs {product}"
                );
            }
        }
    }

    #[test]
    fn zonal_pole_value_is_consistent_with_gegenbauer_at_one() {
        // Y_0^{d,n}(e^d) = A_0^n C_n^{(d-2)/2}(1).
        for d in [3u32, 4, 5] {
            for n in [0u32, 1, 2, 7, 20] {
                let lhs = zonal_pole_value(d, n);
                let rhs = normalization_a(&HarmonicIndex::zonal(d, n))
                    * gegenbauer(n, (d as f64 - 2.0) / 2.0, 1.0);
                assert!(rel_err(lhs, rhs) < 1e-12, "d={d} n={n}");
            }
        }
        assert!(rel_err(zonal_pole_value(3, 1), 3f64.sqrt()) < TOL);
    }
}
