//! Auto-correlation of a curvelet under rotations fixing the pole:
//! `Phi(h) = <T(h) Psi, Psi>` for `h in SO(d-1)`.
//!
//! For `d = 3` the pole-fixing rotations form the circle group and
//!
//! ```text
//! Phi(gamma) = sum_n dim H_n^d kappa_n^2 (cos^{2n}(gamma/2) + sin^{2n}(gamma/2)).
//! ```
//!
//! For `d >= 4` the curvelet is invariant on both sides under the
//! rotations fixing the distinguished two-plane, so `Phi` only depends on
//! `t = <h e^{d-1}, e^{d-1}>`:
//!
//! ```text
//! Phi(t) = 2 sum_n dim H_n^d kappa_n^2 sum_{m even <= n} |c(d,n,m)|^2
//!          * [Gamma(d-3) m! / Gamma(m+d-3)] * C_m^{(d-3)/2}(t),
//! ```
//!
//! where `|c(d,n,m)|^2` are the squared overlaps of the top-index pair
//! with the degree-`m` zonal structure along the equator; they obey
//! `2 sum_m |c|^2 = 1`, which makes `Phi` equal `||Psi||^2` at the
//! identity. Both forms are checked against brute-force quadrature.

use crate::curvelet::CurveletSpectrum;
use crate::geometry::{Rotation, SpherePoint};
use crate::quadrature::{pairwise_sum, QuadratureRule};
use crate::specfun::{gegenbauer, ln_binomial, ln_gamma, normalization_a, HarmonicIndex};
use crate::{Error, Result};

const POLE_FIX_TOL: f64 = 1e-10;

/// Squared coupling weight `|c(d,n,m)|^2` for `d >= 4`, even `m <= n`.
pub fn coupling_weight_sq(d: u32, n: u32, m: u32) -> f64 {
    assert!(d >= 4, "coupling weights concern d >= 4");
    assert!(m <= n && m % 2 == 0, "m must be even and at most n");
    let df = d as f64;
    let nf = n as f64;
    let mf = m as f64;
    let mut chain = vec![0i64; (d - 2) as usize];
    chain[0] = m as i64;
    let a_mixed = normalization_a(&HarmonicIndex::new(d, n, chain).expect("valid chain"));
    let a_top = normalization_a(&HarmonicIndex::top(d, n, true));
    let ln = a_mixed.ln() + a_top.ln()
        + 0.5 * std::f64::consts::PI.ln()
        + ln_gamma(df / 2.0)
        + ln_binomial(n, m)
        + ln_gamma(mf + df - 3.0)
        - (mf + df - 4.0) * std::f64::consts::LN_2
        - (nf + (df - 2.0) / 2.0).ln()
        - ln_gamma((df - 2.0) / 2.0)
        - ln_gamma((df - 3.0) / 2.0)
        - ln_gamma(mf + (df - 2.0) / 2.0);
    (2.0 * ln).exp()
}

/// Largest deviation of `2 sum_{m even <= n} |c(d,n,m)|^2` from 1 over
/// `1 <= n <= n_max`.
pub fn coupling_normalization_defect(d: u32, n_max: u32) -> f64 {
    let mut worst = 0.0f64;
    for n in 1..=n_max {
        let terms: Vec<f64> = (0..=n)
            .step_by(2)
            .map(|m| coupling_weight_sq(d, n, m))
            .collect();
        worst = worst.max((2.0 * pairwise_sum(&terms) - 1.0).abs());
    }
    worst
}

/// The rotation by `beta` in the `(e^{d-2}, e^{d-1})` coordinate plane;
/// it fixes the pole, and sweeping `beta` traverses every value of the
/// auto-correlation.
pub fn equatorial_rotation(d: usize, beta: f64) -> Rotation {
    assert!(d >= 3);
    let mut m = nalgebra::DMatrix::identity(d, d);
    m[(d - 3, d - 3)] = beta.cos();
    m[(d - 2, d - 2)] = beta.cos();
    m[(d - 3, d - 2)] = -beta.sin();
    m[(d - 2, d - 3)] = beta.sin();
    Rotation::from_matrix(m).expect("plane rotations are rotations")
}

fn require_pole_fixing(s: &CurveletSpectrum, h: &Rotation) -> Result<()> {
    let d = s.d() as usize;
    if h.dim() != d {
        return Err(Error::Domain(format!(
            "rotation dimension {} does not match the curvelet's {d}",
            h.dim()
        )));
    }
    let moved = h.apply(&SpherePoint::pole(d));
    if (moved.dot(&SpherePoint::pole(d)) - 1.0).abs() > POLE_FIX_TOL {
        return Err(Error::Domain(
            "auto-correlation is defined for rotations fixing the pole".into(),
        ));
    }
    Ok(())
}

/// Closed-form auto-correlation `<T(h) Psi, Psi>`.
pub fn closed_form(s: &CurveletSpectrum, h: &Rotation) -> Result<f64> {
    require_pole_fixing(s, h)?;
    if s.scale() == 0 {
        return Ok(1.0);
    }
    let d = s.d();
    if d == 3 {
        let m = h.matrix();
        let gamma = m[(1, 0)].atan2(m[(0, 0)]);
        let (c2, s2) = ((gamma / 2.0).cos().powi(2), (gamma / 2.0).sin().powi(2));
        let terms: Vec<f64> = s
            .band()
            .iter()
            .map(|t| {
                t.dim as f64
                    * t.kappa
                    * t.kappa
                    * (c2.powi(t.n as i32) + s2.powi(t.n as i32))
            })
            .collect();
        return Ok(pairwise_sum(&terms));
    }
    let t_equator = h.matrix()[(d as usize - 2, d as usize - 2)].clamp(-1.0, 1.0);
    let lambda = (d as f64 - 3.0) / 2.0;
    let front = (ln_gamma(d as f64 - 3.0)).exp();
    let terms: Vec<f64> = s
        .band()
        .iter()
        .map(|t| {
            if t.kappa == 0.0 {
                return 0.0;
            }
            let inner: Vec<f64> = (0..=t.n)
                .step_by(2)
                .map(|m| {
                    let f = front * (ln_gamma(m as f64 + 1.0) - ln_gamma(m as f64 + d as f64 - 3.0)).exp();
                    coupling_weight_sq(d, t.n, m) * f * gegenbauer(m, lambda, t_equator)
                })
                .collect();
            2.0 * t.dim as f64 * t.kappa * t.kappa * pairwise_sum(&inner)
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// Quadrature value of `<T(h) Psi, Psi>`; exact once the rule degree
/// covers `2^{j+1}`.
pub fn brute_force(s: &CurveletSpectrum, h: &Rotation, rule: &QuadratureRule) -> Result<f64> {
    require_pole_fixing(s, h)?;
    if rule.dim() != s.d() as usize {
        return Err(Error::Domain(format!(
            "rule lives on S^{} but the curvelet on S^{}",
            rule.dim() - 1,
            s.d() - 1
        )));
    }
    Ok(rule.integrate(|x| s.evaluate(x) * s.evaluate(&h.apply_transpose(x))))
}
