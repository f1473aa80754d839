//! Zonal test signals with a cap-boundary singularity, their spectral
//! coefficients, and curvelet coefficient scans that verify the edge
//! detection behaviour: coefficients peak when the atom sits on the cap
//! boundary with matching orientation, grow or decay like
//! `2^{-j(tau - (d-2)/4)}` there, and are suppressed by `|z|^{2^{j-2}}`
//! under orientation mismatch.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::curvelet::{BandTerm, CurveletSpectrum};
use crate::geometry::{rotation_to_pole, SpherePoint};
use crate::quadrature::{gauss_jacobi, pairwise_sum, QuadratureRule};
use crate::specfun::{gegenbauer, gegenbauer_norm_sq, jacobi, ln_gamma};
use crate::windows::WindowPair;
use crate::{Error, Result};

/// `(<eta, e^d> - cos r)^tau` on the spherical cap of radius `r`
/// centered at the pole, zero outside; `tau = 0` is the cap indicator.
#[derive(Debug, Clone)]
pub struct ZonalTestSignal {
    d: u32,
    r: f64,
    tau: u32,
}

impl ZonalTestSignal {
    pub fn new(d: u32, r: f64, tau: u32) -> Result<Self> {
        if d < 3 {
            return Err(Error::Domain(format!("signals live on S^{{d-1}} with d >= 3, got d = {d}")));
        }
        if !(r > 0.0 && r < std::f64::consts::PI) {
            return Err(Error::Domain(format!("cap radius must lie in (0, pi), got {r}")));
        }
        Ok(Self { d, r, tau })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn tau(&self) -> u32 {
        self.tau
    }

    fn lambda(&self) -> f64 {
        (self.d as f64 - 2.0) / 2.0
    }

    /// The zonal profile as a function of `t = <eta, e^d>`.
    pub fn profile(&self, t: f64) -> f64 {
        let c = self.r.cos();
        if t < c {
            0.0
        } else {
            (t - c).powi(self.tau as i32)
        }
    }

    pub fn evaluate(&self, eta: &SpherePoint) -> f64 {
        assert_eq!(eta.dim(), self.d as usize, "point dimension mismatch");
        self.profile(eta.coords()[self.d as usize - 1])
    }

    /// Weighted moment `int_{cos r}^1 profile(t) C_n^lambda(t) (1-t^2)^{lambda-1/2} dt`
    /// in closed form; needs `n >= tau + 1`.
    fn weighted_moment_closed(&self, n: u32) -> f64 {
        assert!(n > self.tau, "closed moment needs n >= tau + 1");
        let lam = self.lambda();
        let nf = n as f64;
        let tf = self.tau as f64;
        let ln = ln_gamma(nf + 2.0 * lam) + ln_gamma(lam + 0.5) - ln_gamma(2.0 * lam)
            - ln_gamma(nf + lam + 0.5)
            + ln_gamma(nf - tf)
            + ln_gamma(tf + 1.0)
            - (tf + 1.0) * std::f64::consts::LN_2
            - ln_gamma(nf + 1.0);
        let a = lam + tf + 0.5;
        ln.exp() * jacobi(n - self.tau - 1, a, a, self.r.cos()) * self.r.sin().powf(2.0 * lam + 2.0 * tf + 1.0)
    }

    /// The same moment by Gauss-Jacobi quadrature on `[cos r, 1]`; the
    /// node count covers the polynomial part exactly and leaves a wide
    /// margin for the `(1+t)^{lambda-1/2}` factor when `d` is even.
    fn weighted_moment_quadrature(&self, n: u32) -> f64 {
        let lam = self.lambda();
        let alpha = lam - 0.5;
        let k = ((n + self.tau) as usize) / 2 + 45;
        let (nodes, weights) = gauss_jacobi(k, alpha, 0.0);
        let c = self.r.cos();
        let half = (1.0 - c) / 2.0;
        let terms: Vec<f64> = nodes
            .iter()
            .zip(&weights)
            .map(|(&x, &w)| {
                let t = c + half * (x + 1.0);
                w * (t - c).powi(self.tau as i32) * gegenbauer(n, lam, t) * (1.0 + t).powf(alpha)
            })
            .collect();
        half.powf(alpha + 1.0) * pairwise_sum(&terms)
    }

    /// Conversion from the Gegenbauer expansion coefficient to the
    /// inner product with the unit-norm zonal harmonic of degree `n`.
    fn zonal_conversion(&self, n: u32) -> f64 {
        let df = self.d as f64;
        let nf = n as f64;
        (0.5 * (ln_gamma(nf + df - 2.0) + (df - 2.0).ln()
            - ln_gamma(nf + 1.0)
            - ln_gamma(df - 2.0)
            - (2.0 * nf + df - 2.0).ln()))
        .exp()
    }

    /// `<f, Y_0^{d,n}>`, the only nonzero spectral coefficients of the
    /// signal. Uses the closed form; for `n <= tau` (where the closed
    /// form degenerates) it integrates directly.
    pub fn coefficient(&self, n: u32) -> f64 {
        let moment = if n > self.tau {
            self.weighted_moment_closed(n)
        } else {
            self.weighted_moment_quadrature(n)
        };
        moment / gegenbauer_norm_sq(n, self.lambda()) * self.zonal_conversion(n)
    }

    /// Quadrature route to the same coefficient, used as an oracle.
    pub fn coefficient_oracle(&self, n: u32) -> f64 {
        self.weighted_moment_quadrature(n) / gegenbauer_norm_sq(n, self.lambda())
            * self.zonal_conversion(n)
    }
}

/// `<Y_0^{d,n} centered at nu, Psi^j>`: the degree-`n` zonal pairing
/// gain times `Re((nu_d + i nu_{d-1})^n)`. Zero off the spectrum band.
pub fn rotated_curvelet_zonal_coeff(s: &CurveletSpectrum, nu: &SpherePoint, n: u32) -> f64 {
    assert!(s.scale() >= 1, "zonal pairing concerns scales j >= 1");
    assert_eq!(nu.dim(), s.d() as usize, "direction dimension mismatch");
    let band = s.band();
    let lo = band[0].n;
    if n < lo || n > band[band.len() - 1].n {
        return 0.0;
    }
    let term = &band[(n - lo) as usize];
    if term.kappa == 0.0 {
        return 0.0;
    }
    let d = s.d() as usize;
    let z = Complex64::new(nu.coords()[d - 1], nu.coords()[d - 2]);
    if z.norm_sqr() == 0.0 {
        return 0.0;
    }
    term.zonal_gain * z.powu(n).re
}

/// Signal coefficients aligned with the spectrum band (one per band
/// degree, including the zero endpoints).
pub fn band_signal_coefficients(s: &CurveletSpectrum, sig: &ZonalTestSignal) -> Result<Vec<f64>> {
    if sig.d() != s.d() {
        return Err(Error::Domain(format!(
            "signal lives on S^{} but the curvelet on S^{}",
            sig.d() - 1,
            s.d() - 1
        )));
    }
    if s.scale() == 0 {
        return Err(Error::Domain("coefficient scans concern scales j >= 1".into()));
    }
    Ok(s.band().iter().map(|t| sig.coefficient(t.n)).collect())
}

fn paired_value(band: &[BandTerm], coeffs: &[f64], z: Complex64) -> f64 {
    let mut zp = z.powu(band[0].n);
    let mut terms = Vec::with_capacity(band.len());
    for (term, &c) in band.iter().zip(coeffs) {
        terms.push(c * term.zonal_gain * zp.re);
        zp *= z;
    }
    pairwise_sum(&terms)
}

/// `<f, T(g_nu^{-1}) Psi^j>` through the spectral sum: only the zonal
/// components of `f` pair with the rotated curvelet.
pub fn curvelet_coefficient(s: &CurveletSpectrum, sig: &ZonalTestSignal, nu: &SpherePoint) -> Result<f64> {
    let coeffs = band_signal_coefficients(s, sig)?;
    if nu.dim() != s.d() as usize {
        return Err(Error::Domain("direction dimension mismatch".into()));
    }
    let d = s.d() as usize;
    let z = Complex64::new(nu.coords()[d - 1], nu.coords()[d - 2]);
    Ok(paired_value(s.band(), &coeffs, z))
}

/// The same coefficient as a full integral of `f(x) Psi(g_nu x)` over
/// the cap, reduced to a latitude average times a radial Gauss-Jacobi
/// rule. Serves as the quadrature oracle for the spectral route.
pub fn curvelet_coefficient_quadrature(
    s: &CurveletSpectrum,
    sig: &ZonalTestSignal,
    nu: &SpherePoint,
) -> Result<f64> {
    if sig.d() != s.d() {
        return Err(Error::Domain("signal and curvelet dimensions differ".into()));
    }
    if s.scale() == 0 {
        return Err(Error::Domain("coefficient scans concern scales j >= 1".into()));
    }
    let d = s.d() as usize;
    if nu.dim() != d {
        return Err(Error::Domain("direction dimension mismatch".into()));
    }
    let lat_rule = QuadratureRule::product_rule(d - 1, s.max_degree())?;
    let k = (s.max_degree() as usize + sig.tau() as usize) / 2 + 48;
    let (nodes, weights) = gauss_jacobi(k, (d as f64 - 3.0) / 2.0, 0.0);
    let g = rotation_to_pole(nu);
    let m = g.matrix();
    let c = sig.r().cos();
    let half = (1.0 - c) / 2.0;
    let gamma = (d as f64 - 3.0) / 2.0;
    let terms: Vec<f64> = nodes
        .iter()
        .zip(&weights)
        .map(|(&x, &w)| {
            let t = c + half * (x + 1.0);
            let s_lat = (1.0 - t * t).sqrt();
            let lat_terms: Vec<f64> = lat_rule
                .points()
                .iter()
                .zip(lat_rule.weights())
                .map(|(eta, &wl)| {
                    let mut za = 0.0;
                    let mut zb = 0.0;
                    for (l, &e) in eta.coords().iter().enumerate() {
                        za += m[(d - 2, l)] * s_lat * e;
                        zb += m[(d - 1, l)] * s_lat * e;
                    }
                    za += m[(d - 2, d - 1)] * t;
                    zb += m[(d - 1, d - 1)] * t;
                    wl * s.evaluate_z(Complex64::new(zb, za))
                })
                .collect();
            w * (t - c).powi(sig.tau() as i32) * (1.0 + t).powf(gamma) * pairwise_sum(&lat_terms)
        })
        .collect();
    let front = (ln_gamma(d as f64 / 2.0)
        - 0.5 * std::f64::consts::PI.ln()
        - ln_gamma((d as f64 - 1.0) / 2.0))
    .exp();
    Ok(front * half.powf(gamma + 1.0) * pairwise_sum(&terms))
}

/// Scan direction at polar offset `delta` from the cap boundary and
/// orientation match `z in [0, 1]`: the leftover mass sits on `e^1`.
pub fn direction(r: f64, delta: f64, z: f64, d: u32) -> SpherePoint {
    assert!((0.0..=1.0 + 1e-12).contains(&z), "orientation parameter must lie in [0, 1]");
    let theta = r + delta;
    let mut coords = vec![0.0; d as usize];
    coords[0] = (1.0 - z * z).max(0.0).sqrt();
    coords[d as usize - 2] = z * theta.sin();
    coords[d as usize - 1] = z * theta.cos();
    SpherePoint::from_unnormalized(coords).expect("scan directions are nonzero")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    /// Polar offset of the scan direction from the cap boundary.
    pub offset: f64,
    /// Orientation match `|nu_d + i nu_{d-1}|`.
    pub z: f64,
    pub coefficient: f64,
}

/// Curvelet coefficients of a test signal over a grid of directions.
#[derive(Debug, Clone)]
pub struct DetectionScan {
    pub scale: u32,
    pub points: Vec<ScanPoint>,
}

impl DetectionScan {
    /// Scan point with the largest coefficient magnitude.
    pub fn peak(&self) -> &ScanPoint {
        self.points
            .iter()
            .reduce(|best, p| if p.coefficient.abs() > best.coefficient.abs() { p } else { best })
            .expect("scans are nonempty")
    }

    pub fn sup(&self) -> f64 {
        self.peak().coefficient.abs()
    }
}

/// Cartesian grid of (offset, orientation) scan parameters.
#[derive(Debug, Clone)]
pub struct ScanGrid {
    offsets: Vec<f64>,
    z_values: Vec<f64>,
}

fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2);
    (0..count)
        .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
        .collect()
}

impl ScanGrid {
    pub fn new(offsets: Vec<f64>, z_values: Vec<f64>) -> Self {
        assert!(!offsets.is_empty() && !z_values.is_empty(), "grids must be nonempty");
        Self { offsets, z_values }
    }

    /// Aligned orientation, offsets resolving the oscillation scale:
    /// `delta = u 2^{-j}` for `u` equispaced in `[-6 pi, 6 pi]`.
    pub fn aligned_fine(j: u32, count: usize) -> Self {
        let w = 6.0 * std::f64::consts::PI;
        let scale = (2.0f64).powi(-(j as i32));
        Self::new(linspace(-w, w, count).into_iter().map(|u| u * scale).collect(), vec![1.0])
    }

    /// Aligned orientation, offsets covering the whole polar range
    /// (boundary angle between 0.05 and pi - 0.05).
    pub fn coarse(r: f64, count: usize) -> Self {
        Self::new(
            linspace(0.05 - r, std::f64::consts::PI - 0.05 - r, count),
            vec![1.0],
        )
    }

    /// Zero offset, orientation parameter swept over `[z_lo, 1]`.
    pub fn orientation(z_lo: f64, count: usize) -> Self {
        Self::new(vec![0.0], linspace(z_lo, 1.0, count))
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn z_values(&self) -> &[f64] {
        &self.z_values
    }
}

/// Evaluate the coefficient map over a scan grid (offset-major order).
pub fn detection_scan(s: &CurveletSpectrum, sig: &ZonalTestSignal, grid: &ScanGrid) -> Result<DetectionScan> {
    let coeffs = band_signal_coefficients(s, sig)?;
    let band = s.band();
    let rows: Vec<Vec<ScanPoint>> = grid
        .offsets
        .par_iter()
        .map(|&delta| {
            grid.z_values
                .iter()
                .map(|&zmag| {
                    let z = Complex64::from_polar(zmag, sig.r() + delta);
                    ScanPoint {
                        offset: delta,
                        z: zmag,
                        coefficient: paired_value(band, &coeffs, z),
                    }
                })
                .collect()
        })
        .collect();
    Ok(DetectionScan {
        scale: s.scale(),
        points: rows.into_iter().flatten().collect(),
    })
}

const FINE_COUNT: usize = 801;
const COARSE_COUNT: usize = 301;

/// `sup_nu |<f, T(g_nu^{-1}) Psi^j>|` over aligned directions, combining
/// a fine grid around the boundary with a coarse global grid.
pub fn sup_coefficient(s: &CurveletSpectrum, sig: &ZonalTestSignal) -> Result<f64> {
    let fine = detection_scan(s, sig, &ScanGrid::aligned_fine(s.scale(), FINE_COUNT))?;
    let coarse = detection_scan(s, sig, &ScanGrid::coarse(sig.r(), COARSE_COUNT))?;
    Ok(fine.sup().max(coarse.sup()))
}

/// Orientation selectivity at zero offset: the coefficient magnitude
/// should fall monotonically as `z` leaves 1, beating the reference
/// factor `0.9^{2^{j-2}}` across `[0.9, 1]`.
#[derive(Debug, Clone)]
pub struct OrientationCheck {
    /// `(z, |coefficient|)` over the scan grid, increasing `z`.
    pub values: Vec<(f64, f64)>,
    pub monotone: bool,
    /// Magnitude ratio between exact match and `z = 0.9`.
    pub ratio: f64,
    pub required: f64,
    pub passed: bool,
}

pub fn orientation_check(s: &CurveletSpectrum, sig: &ZonalTestSignal) -> Result<OrientationCheck> {
    if s.scale() < 2 {
        return Err(Error::Domain("orientation selectivity concerns scales j >= 2".into()));
    }
    let scan = detection_scan(s, sig, &ScanGrid::orientation(0.9, 10))?;
    let values: Vec<(f64, f64)> = scan.points.iter().map(|p| (p.z, p.coefficient.abs())).collect();
    let monotone = values.windows(2).all(|w| w[1].1 > w[0].1);
    let ratio = values[values.len() - 1].1 / values[0].1;
    let required = 0.9f64.powi(-(1i32 << (s.scale() - 2)));
    Ok(OrientationCheck {
        values,
        monotone,
        ratio,
        passed: monotone && ratio >= required,
        required,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(&x, &y)| (x - xm) * (y - ym)).sum();
    let den: f64 = xs.iter().map(|&x| (x - xm) * (x - xm)).sum();
    num / den
}

/// Fit of `log2 sup |coefficient|` against the scale.
#[derive(Debug, Clone)]
pub struct SlopeFit {
    /// `(j, sup)` pairs entering the fit.
    pub sups: Vec<(u32, f64)>,
    pub fitted: f64,
    /// `(d-2)/4 - tau`.
    pub predicted: f64,
}

/// Window of the rescaled offset variable `u = 2^j delta` on which the
/// rescaled coefficient `2^{j(tau-(d-2)/4)} coefficient` keeps one sign
/// and stays above half its peak across all examined scales.
#[derive(Debug, Clone)]
pub struct CertifiedInterval {
    pub u_lo: f64,
    pub u_hi: f64,
    pub u_peak: f64,
    /// Smallest over the window of the per-point minimum over scales.
    pub floor: f64,
    pub peak: f64,
    pub scales: Vec<u32>,
}

/// Log-log fit of the rescaled coefficient envelope in the offset
/// variable at the largest scale.
#[derive(Debug, Clone)]
pub struct OffsetDecayFit {
    pub scale: u32,
    /// Fitted positive decay exponent of the envelope.
    pub fitted: f64,
    /// Smoothness order of the window, when finite.
    pub window_smoothness: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct AsymptoticReport {
    pub d: u32,
    pub tau: u32,
    pub r: f64,
    pub slope: SlopeFit,
    pub interval: Option<CertifiedInterval>,
    pub decay: OffsetDecayFit,
}

fn rescaled_values(
    s: &CurveletSpectrum,
    coeffs: &[f64],
    sig: &ZonalTestSignal,
    us: &[f64],
    alpha: f64,
) -> Vec<f64> {
    let scale = (2.0f64).powi(-(s.scale() as i32));
    let factor = (2.0f64).powf(s.scale() as f64 * alpha);
    us.iter()
        .map(|&u| {
            let z = Complex64::from_polar(1.0, sig.r() + u * scale);
            factor * paired_value(s.band(), coeffs, z)
        })
        .collect()
}

fn certify_interval(
    per_scale: &[(u32, Vec<f64>)],
    us: &[f64],
) -> Option<CertifiedInterval> {
    let floor_at = |i: usize| -> f64 {
        let sign = per_scale[0].1[i].signum();
        let mut m = f64::INFINITY;
        for (_, vals) in per_scale {
            if vals[i] == 0.0 || vals[i].signum() != sign {
                return 0.0;
            }
            m = m.min(vals[i].abs());
        }
        m
    };
    let floors: Vec<f64> = (0..us.len()).map(floor_at).collect();
    let (i_peak, &peak) = floors
        .iter()
        .enumerate()
        .reduce(|best, cand| if cand.1 > best.1 { cand } else { best })?;
    if peak <= 0.0 {
        return None;
    }
    let sign = per_scale[0].1[i_peak].signum();
    let keep = |i: usize| floors[i] >= 0.5 * peak && per_scale[0].1[i].signum() == sign;
    let mut lo = i_peak;
    while lo > 0 && keep(lo - 1) {
        lo -= 1;
    }
    let mut hi = i_peak;
    while hi + 1 < us.len() && keep(hi + 1) {
        hi += 1;
    }
    let floor = (lo..=hi).map(|i| floors[i]).fold(f64::INFINITY, f64::min);
    Some(CertifiedInterval {
        u_lo: us[lo],
        u_hi: us[hi],
        u_peak: us[i_peak],
        floor,
        peak,
        scales: per_scale.iter().map(|(j, _)| *j).collect(),
    })
}

fn envelope_decay_fit(us: &[f64], values: &[f64], u_min: f64) -> f64 {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 1..us.len() - 1 {
        let v = values[i].abs();
        if us[i] >= u_min && v > values[i - 1].abs() && v > values[i + 1].abs() && v > 0.0 {
            xs.push(us[i].ln());
            ys.push(v.ln());
        }
    }
    if xs.len() < 3 {
        return f64::NAN;
    }
    -least_squares_slope(&xs, &ys)
}

/// Measure the detection asymptotics over a range of scales: the sup
/// growth exponent, a certified near-boundary window with a uniform
/// lower bound, and the envelope decay away from the boundary.
pub fn asymptotic_report(
    window: &WindowPair,
    sig: &ZonalTestSignal,
    j_lo: u32,
    j_hi: u32,
) -> Result<AsymptoticReport> {
    if !(3..=9).contains(&j_lo) || !(3..=9).contains(&j_hi) || j_lo >= j_hi {
        return Err(Error::Domain(format!(
            "scale range [{j_lo}, {j_hi}] is insufficient; need 3 <= j_lo < j_hi <= 9"
        )));
    }
    let interior = (0.2, std::f64::consts::PI - 0.2);
    if !(sig.r() >= interior.0 && sig.r() <= interior.1) {
        return Err(Error::Domain(
            "asymptotics require the cap boundary at least 0.2 from both poles".into(),
        ));
    }
    let d = sig.d();
    let alpha = sig.tau() as f64 - (d as f64 - 2.0) / 4.0;
    let mut sups = Vec::new();
    let mut per_scale = Vec::new();
    let us = linspace(-6.0 * std::f64::consts::PI, 6.0 * std::f64::consts::PI, FINE_COUNT);
    let mut decay = f64::NAN;
    for j in j_lo..=j_hi {
        let s = CurveletSpectrum::new(d, j, window)?;
        let coeffs = band_signal_coefficients(&s, sig)?;
        sups.push((j, sup_coefficient(&s, sig)?));
        if j >= 6 || j + 2 > j_hi {
            per_scale.push((j, rescaled_values(&s, &coeffs, sig, &us, alpha)));
        }
        if j == j_hi {
            let us_tail = linspace(0.0, 64.0, 2001);
            let tail = rescaled_values(&s, &coeffs, sig, &us_tail, alpha);
            decay = envelope_decay_fit(&us_tail, &tail, 6.0);
        }
    }
    let xs: Vec<f64> = sups.iter().map(|&(j, _)| j as f64).collect();
    let ys: Vec<f64> = sups.iter().map(|&(_, v)| v.log2()).collect();
    Ok(AsymptoticReport {
        d,
        tau: sig.tau(),
        r: sig.r(),
        slope: SlopeFit {
            fitted: least_squares_slope(&xs, &ys),
            predicted: -alpha,
            sups,
        },
        interval: certify_interval(&per_scale, &us),
        decay: OffsetDecayFit {
            scale: j_hi,
            fitted: decay,
            window_smoothness: window.smoothness(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::windows::WindowKind;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const PI: f64 = std::f64::consts::PI;

    fn window() -> WindowPair {
        WindowPair::new(WindowKind::SmoothBump)
    }

    fn random_direction(rng: &mut ChaCha8Rng, d: usize) -> SpherePoint {
        loop {
            let coords: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm_sq: f64 = coords.iter().map(|c| c * c).sum();
            if norm_sq > 0.1 {
                return SpherePoint::from_unnormalized(coords).unwrap();
            }
        }
    }

    #[test]
    fn signal_evaluation_follows_the_piecewise_definition() {
        let sig = ZonalTestSignal::new(3, 0.8, 0).unwrap();
        assert_eq!(sig.evaluate(&SpherePoint::pole(3)), 1.0);
        assert_eq!(sig.evaluate(&SpherePoint::axis(3, 1)), 0.0);
        let sig1 = ZonalTestSignal::new(4, PI / 3.0, 1).unwrap();
        assert_eq!(sig1.profile((PI / 3.0).cos()), 0.0);
        let inside = 0.9;
        assert!((sig1.profile(inside) - (inside - 0.5)).abs() < 1e-15);
        assert_eq!(sig1.profile(0.2), 0.0);
        assert!(ZonalTestSignal::new(3, 0.0, 0).is_err());
        assert!(ZonalTestSignal::new(3, PI, 0).is_err());
        assert!(ZonalTestSignal::new(2, 1.0, 0).is_err());
    }

    #[test]
    fn hemisphere_indicator_coefficients_match_hand_values() {
        // d = 3, r = pi/2, tau = 0: the expansion against sqrt(3) t
        // gives <f, Y_0^{3,1}> = sqrt(3)/4, and the mean is 1/2.
        let sig = ZonalTestSignal::new(3, PI / 2.0, 0).unwrap();
        // n = 0 goes through the quadrature route, whose nodes are only
        // accurate to ~1e-13.
        assert!((sig.coefficient(0) - 0.5).abs() < 1e-12);
        assert!((sig.coefficient(1) - 3.0f64.sqrt() / 4.0).abs() < 1e-14);
        // Legendre parity: even degrees >= 2 vanish on the hemisphere.
        for n in [2u32, 4, 6, 8] {
            assert!(sig.coefficient(n).abs() < 1e-14, "n={n}");
        }
        for n in [3u32, 5, 7] {
            assert!(sig.coefficient(n).abs() > 1e-6, "n={n}");
        }
    }

    #[test]
    fn closed_form_matches_the_quadrature_oracle() {
        for d in [3u32, 4, 5] {
            for tau in [0u32, 1, 2] {
                let sig = ZonalTestSignal::new(d, PI / 3.0, tau).unwrap();
                let values: Vec<f64> = (0..=80).map(|n| sig.coefficient(n)).collect();
                let peak = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                for (n, &v) in values.iter().enumerate() {
                    let oracle = sig.coefficient_oracle(n as u32);
                    assert!(
                        (v - oracle).abs() < 1e-11 * peak,
                        "d={d} tau={tau} n={n}: {v} vs {oracle}"
                    );
                }
            }
        }
    }

    #[test]
    fn coefficient_energy_recovers_the_signal_norm() {
        // Parseval for the zonal expansion: sum of squared coefficients
        // equals the squared L2 norm, here (1/2) (1-cos r)^3 / 3.
        let sig = ZonalTestSignal::new(3, PI / 3.0, 1).unwrap();
        let total: f64 = (0..=1500).map(|n| sig.coefficient(n).powi(2)).sum();
        let exact = 0.5 * (1.0 - (PI / 3.0).cos()).powi(3) / 3.0;
        assert!((total - exact).abs() < 1e-8 * exact, "{total} vs {exact}");
    }

    #[test]
    fn coefficient_envelope_decays_at_the_predicted_rate() {
        for tau in [0u32, 1] {
            let sig = ZonalTestSignal::new(3, PI / 3.0, tau).unwrap();
            let env = |lo: u32, hi: u32| {
                (lo..=hi)
                    .map(|n| sig.coefficient(n).abs())
                    .fold(0.0f64, f64::max)
            };
            let measured = env(460, 500) / env(100, 140);
            let predicted = (480.0f64 / 120.0).powi(-(tau as i32 + 1));
            let ratio = measured / predicted;
            assert!((0.5..2.0).contains(&ratio), "tau={tau}: ratio {ratio}");
        }
    }

    #[test]
    fn zonal_pairing_gain_is_the_band_amplitude_over_root_dim() {
        let w = window();
        let s = CurveletSpectrum::new(4, 3, &w).unwrap();
        let pole = SpherePoint::pole(4);
        for term in s.band() {
            let got = rotated_curvelet_zonal_coeff(&s, &pole, term.n);
            assert!((got - term.zonal_gain).abs() < 1e-15);
        }
        // Off the band the pairing vanishes; orthogonal to the plane too.
        assert_eq!(rotated_curvelet_zonal_coeff(&s, &pole, 1), 0.0);
        assert_eq!(rotated_curvelet_zonal_coeff(&s, &pole, 9), 0.0);
        assert_eq!(rotated_curvelet_zonal_coeff(&s, &SpherePoint::axis(4, 1), 5), 0.0);
    }

    #[test]
    fn spectral_and_quadrature_coefficients_agree() {
        let w = window();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for (d, j, tau) in [(3u32, 3u32, 0u32), (4, 2, 1)] {
            let sig = ZonalTestSignal::new(d, PI / 3.0, tau).unwrap();
            let s = CurveletSpectrum::new(d, j, &w).unwrap();
            let mut dirs = vec![direction(sig.r(), 0.0, 1.0, d)];
            for _ in 0..3 {
                dirs.push(random_direction(&mut rng, d as usize));
            }
            let spectral: Vec<f64> = dirs
                .iter()
                .map(|nu| curvelet_coefficient(&s, &sig, nu).unwrap())
                .collect();
            let peak = spectral.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            for (nu, &sv) in dirs.iter().zip(&spectral) {
                let qv = curvelet_coefficient_quadrature(&s, &sig, nu).unwrap();
                assert!(
                    (sv - qv).abs() < 1e-10 * peak,
                    "d={d} j={j}: {sv} vs {qv}"
                );
            }
        }
    }

    #[test]
    fn coefficients_are_mirror_symmetric_in_the_wave_direction() {
        let w = window();
        let sig = ZonalTestSignal::new(3, PI / 3.0, 0).unwrap();
        let s = CurveletSpectrum::new(3, 4, &w).unwrap();
        for delta in [-0.2, 0.0, 0.13, 0.5] {
            let nu = direction(sig.r(), delta, 0.95, 3);
            let mut mirrored = nu.coords().to_vec();
            mirrored[1] = -mirrored[1];
            let nu_m = SpherePoint::new(mirrored).unwrap();
            let a = curvelet_coefficient(&s, &sig, &nu).unwrap();
            let b = curvelet_coefficient(&s, &sig, &nu_m).unwrap();
            assert_eq!(a, b, "delta={delta}");
        }
    }

    #[test]
    fn scan_peaks_on_the_cap_boundary() {
        let w = window();
        let sig = ZonalTestSignal::new(3, PI / 3.0, 0).unwrap();
        let s = CurveletSpectrum::new(3, 6, &w).unwrap();
        let fine = detection_scan(&s, &sig, &ScanGrid::aligned_fine(6, FINE_COUNT)).unwrap();
        let coarse = detection_scan(&s, &sig, &ScanGrid::coarse(sig.r(), COARSE_COUNT)).unwrap();
        let peak = if fine.sup() >= coarse.sup() { *fine.peak() } else { *coarse.peak() };
        assert!(
            peak.offset.abs() <= 2.0 * PI / 64.0,
            "peak sits at offset {}",
            peak.offset
        );
    }

    #[test]
    fn higher_order_edges_lose_a_factor_two_per_scale() {
        let w = window();
        let ratio_at = |j: u32| {
            let s = CurveletSpectrum::new(3, j, &w).unwrap();
            let s0 = sup_coefficient(&s, &ZonalTestSignal::new(3, PI / 3.0, 0).unwrap()).unwrap();
            let s1 = sup_coefficient(&s, &ZonalTestSignal::new(3, PI / 3.0, 1).unwrap()).unwrap();
            s1 / s0
        };
        let shrink = ratio_at(7) / ratio_at(6);
        assert!((0.35..0.7).contains(&shrink), "shrink {shrink}");
    }

    #[test]
    fn orientation_mismatch_is_suppressed_monotonically() {
        let w = window();
        let sig = ZonalTestSignal::new(3, PI / 3.0, 0).unwrap();
        let s = CurveletSpectrum::new(3, 6, &w).unwrap();
        let check = orientation_check(&s, &sig).unwrap();
        assert!(check.monotone);
        assert!(check.ratio >= check.required, "{} < {}", check.ratio, check.required);
        assert!(check.passed);
        assert!((check.required - 0.9f64.powi(-16)).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_report_recovers_the_sup_exponent() {
        let w = window();
        let sig = ZonalTestSignal::new(3, PI / 3.0, 0).unwrap();
        let report = asymptotic_report(&w, &sig, 4, 8).unwrap();
        let predicted = 0.25;
        assert!((report.slope.predicted - predicted).abs() < 1e-15);
        assert!(
            (report.slope.fitted - predicted).abs() <= 0.1 * predicted.abs(),
            "fitted {} vs {}",
            report.slope.fitted,
            predicted
        );
        let interval = report.interval.expect("a certified window exists");
        assert!(interval.floor > 0.0);
        assert!(interval.u_hi - interval.u_lo >= 0.3, "window [{}, {}]", interval.u_lo, interval.u_hi);
        assert_eq!(interval.scales, vec![6, 7, 8]);
        assert!(report.decay.fitted > 0.8, "decay fit {}", report.decay.fitted);
    }

    #[test]
    fn scans_are_deterministic_across_runs() {
        let w = window();
        let sig = ZonalTestSignal::new(4, 1.0, 1).unwrap();
        let s = CurveletSpectrum::new(4, 5, &w).unwrap();
        let grid = ScanGrid::new(linspace(-0.4, 0.6, 37), vec![0.9, 1.0]);
        let a = detection_scan(&s, &sig, &grid).unwrap();
        let b = detection_scan(&s, &sig, &grid).unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(a.points.len(), 74);
    }

    #[test]
    fn domain_violations_are_rejected() {
        let w = window();
        let sig3 = ZonalTestSignal::new(3, 1.0, 0).unwrap();
        let s4 = CurveletSpectrum::new(4, 3, &w).unwrap();
        assert!(matches!(
            curvelet_coefficient(&s4, &sig3, &SpherePoint::pole(4)),
            Err(Error::Domain(_))
        ));
        let s3_flat = CurveletSpectrum::new(3, 0, &w).unwrap();
        assert!(band_signal_coefficients(&s3_flat, &sig3).is_err());
        assert!(asymptotic_report(&w, &sig3, 4, 4).is_err());
        assert!(asymptotic_report(&w, &sig3, 2, 5).is_err());
        let tight = ZonalTestSignal::new(3, 0.1, 0).unwrap();
        assert!(asymptotic_report(&w, &tight, 4, 6).is_err());
        let s3j1 = CurveletSpectrum::new(3, 1, &w).unwrap();
        assert!(orientation_check(&s3j1, &sig3).is_err());
    }
}
