//! Polynomial curvelets on `S^{d-1}`.
//!
//! The scale-`j` curvelet is the band-limited polynomial
//!
//! ```text
//! Psi^j(x) = sum_n a_n Re(z^n),   z = x_d + i x_{d-1},
//! a_n = sqrt(2) sqrt(dim H_n^d) kappa(n / 2^{j-1}) A_n,
//! ```
//!
//! where `n` runs over the dyadic band `[ceil(2^{j-2}), 2^j]`, `A_n` is
//! the top-index normalization constant, and `kappa` is the band-pass
//! window. The scale-0 curvelet is the constant 1. In harmonic terms the
//! degree-`n` component splits evenly over the two top-index harmonics,
//! so the degree-`n` spectral energy is `dim H_n^d * kappa^2`, which is
//! what every norm identity below rests on.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::geometry::{principal_arg, SpherePoint};
use crate::quadrature::{gauss_jacobi, pairwise_sum, QuadratureRule};
use crate::specfun::{harmonic_dim, normalization_a_top};
use crate::windows::WindowPair;
use crate::{Error, Result};

/// Number of radial Gauss nodes in the disk-reduction norm integral.
const DISK_RADIAL_NODES: usize = 600;

/// One degree of the curvelet band.
#[derive(Debug, Clone)]
pub struct BandTerm {
    pub n: u32,
    /// Window value `kappa(n / 2^{j-1})`.
    pub kappa: f64,
    /// `dim H_n^d`.
    pub dim: u64,
    /// Amplitude `a_n` multiplying `Re(z^n)`.
    pub amplitude: f64,
    /// Pairing gain with a unit zonal harmonic recentered anywhere:
    /// `a_n / sqrt(dim) = sqrt(2) kappa A_n`.
    pub zonal_gain: f64,
}

/// The spectral data of one curvelet scale.
#[derive(Debug, Clone)]
pub struct CurveletSpectrum {
    d: u32,
    j: u32,
    band: Vec<BandTerm>,
}

impl CurveletSpectrum {
    /// Builds the scale-`j` spectrum on `S^{d-1}` for the given window.
    pub fn new(d: u32, j: u32, window: &WindowPair) -> Result<Self> {
        if d < 3 {
            return Err(Error::Domain(format!(
                "curvelets require ambient dimension >= 3, got {d}"
            )));
        }
        if j > 30 {
            return Err(Error::Domain(format!("scale {j} is out of range (max 30)")));
        }
        let mut band = Vec::new();
        if j >= 1 {
            let lo: u32 = if j <= 2 { 1 } else { 1 << (j - 2) };
            let hi: u32 = 1 << j;
            let half_band = 2f64.powi(j as i32 - 1);
            for n in lo..=hi {
                let kappa = window.kappa(n as f64 / half_band);
                let dim = harmonic_dim(d, n)?;
                let gain = std::f64::consts::SQRT_2 * kappa * normalization_a_top(d, n);
                band.push(BandTerm {
                    n,
                    kappa,
                    dim,
                    amplitude: (dim as f64).sqrt() * gain,
                    zonal_gain: gain,
                });
            }
        }
        Ok(Self { d, j, band })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn scale(&self) -> u32 {
        self.j
    }

    /// Every degree of the nominal band, including endpoint degrees whose
    /// window value vanishes. Empty at scale 0.
    pub fn band(&self) -> &[BandTerm] {
        &self.band
    }

    /// Largest polynomial degree, `2^j`.
    pub fn max_degree(&self) -> u32 {
        1u32 << self.j
    }

    /// The value at a point, through `z = x_d + i x_{d-1}`.
    pub fn evaluate(&self, x: &SpherePoint) -> f64 {
        assert_eq!(x.dim(), self.d as usize);
        let c = x.coords();
        self.evaluate_z(Complex64::new(c[self.d as usize - 1], c[self.d as usize - 2]))
    }

    pub(crate) fn evaluate_z(&self, z: Complex64) -> f64 {
        if self.j == 0 {
            return 1.0;
        }
        let Some(first) = self.band.first() else {
            return 0.0;
        };
        let mut zp = z.powu(first.n);
        let mut terms = Vec::with_capacity(self.band.len());
        for t in &self.band {
            terms.push(t.amplitude * zp.re);
            zp *= z;
        }
        pairwise_sum(&terms)
    }

    /// The polar profile `g(rho, alpha) = sum_n a_n rho^n cos(n alpha)`;
    /// the curvelet value at any `x` is `g(|z|, Arg z)`.
    pub fn profile(&self, rho: f64, alpha: f64) -> f64 {
        self.evaluate_z(Complex64::from_polar(rho, alpha))
    }

    /// Squared `L^2` norm from the spectrum: `sum_n dim H_n^d kappa^2`
    /// (`1` at scale 0).
    pub fn l2_norm_sq(&self) -> f64 {
        if self.j == 0 {
            return 1.0;
        }
        let terms: Vec<f64> = self
            .band
            .iter()
            .map(|t| t.dim as f64 * t.kappa * t.kappa)
            .collect();
        pairwise_sum(&terms)
    }

    /// Exact sup norm `sum_n a_n`, attained at the pole: every amplitude
    /// is non-negative and `Re(z^n) <= |z|^n <= 1` with equality at
    /// `z = 1`.
    pub fn sup_norm(&self) -> f64 {
        if self.j == 0 {
            return 1.0;
        }
        let terms: Vec<f64> = self.band.iter().map(|t| t.amplitude).collect();
        pairwise_sum(&terms)
    }

    /// `L^p` norm for `1 <= p <= infinity` under the normalized surface
    /// measure.
    ///
    /// With a rule supplied, the norm is the plain quadrature value over
    /// that rule (and the pointwise max over its nodes for
    /// `p = infinity`). Without one, `p = infinity` returns the exact sup
    /// norm, and finite `p` integrates over the distribution of
    /// `(x_{d-1}, x_d)`: the curvelet only depends on those coordinates,
    /// whose joint density on the unit disk is proportional to
    /// `(1 - rho^2)^{(d-4)/2}`, so
    ///
    /// ```text
    /// ||Psi||_p^p = (d-2)/(4 pi) int_0^1 (1-s)^{(d-4)/2}
    ///               int_{-pi}^{pi} |g(sqrt(s), alpha)|^p  d alpha ds
    /// ```
    ///
    /// evaluated by a Gauss-Jacobi rule in `s` and an equispaced rule in
    /// `alpha`.
    pub fn norm_estimate(&self, p: f64, rule: Option<&QuadratureRule>) -> Result<f64> {
        if p < 1.0 || p.is_nan() {
            return Err(Error::Domain(format!("L^p norms need p >= 1, got {p}")));
        }
        if let Some(rule) = rule {
            if rule.dim() != self.d as usize {
                return Err(Error::Domain(format!(
                    "rule lives on S^{} but the curvelet on S^{}",
                    rule.dim() - 1,
                    self.d - 1
                )));
            }
            if p.is_infinite() {
                let worst = rule
                    .points()
                    .iter()
                    .map(|x| self.evaluate(x).abs())
                    .fold(0.0f64, f64::max);
                return Ok(worst);
            }
            let v = rule.integrate(|x| self.evaluate(x).abs().powf(p));
            return Ok(v.powf(1.0 / p));
        }
        if p.is_infinite() {
            return Ok(self.sup_norm());
        }
        if self.j == 0 {
            return Ok(1.0);
        }

        let gamma = (self.d as f64 - 4.0) / 2.0;
        let (snodes, sweights) = gauss_jacobi(DISK_RADIAL_NODES, gamma, 0.0);
        let m_ang = 2048usize.max(8 * self.max_degree() as usize);
        let front = (self.d as f64 - 2.0) / (4.0 * std::f64::consts::PI)
            * 2f64.powf(-gamma - 1.0)
            * (2.0 * std::f64::consts::PI / m_ang as f64);

        let node_terms: Vec<f64> = (0..snodes.len())
            .into_par_iter()
            .map(|i| {
                let s = (snodes[i] + 1.0) / 2.0;
                let rho = s.sqrt();
                let mut inner = Vec::with_capacity(m_ang);
                for a in 0..m_ang {
                    let alpha =
                        -std::f64::consts::PI + 2.0 * std::f64::consts::PI * (a as f64 + 0.5) / m_ang as f64;
                    inner.push(self.profile(rho, alpha).abs().powf(p));
                }
                sweights[i] * pairwise_sum(&inner)
            })
            .collect();
        Ok((front * pairwise_sum(&node_terms)).powf(1.0 / p))
    }

    /// The decay certificate at one point: for `j >= 1`,
    ///
    /// ```text
    /// |Psi(x)| (1 + 2^j |Arg z|)^q / (2^{j(3d-2)/4} |z|^{2^{j-2}})
    /// ```
    ///
    /// computed without underflow by folding `|z|^{-2^{j-2}}` into the
    /// band sum (every band degree is at least `2^{j-2}`). Returns 0
    /// where the curvelet vanishes; bounded in `x` and `j` for `q` up to
    /// the window smoothness.
    pub fn localization_ratio(&self, x: &SpherePoint, q: f64) -> f64 {
        assert!(self.j >= 1, "the decay certificate concerns scales >= 1");
        assert_eq!(x.dim(), self.d as usize);
        let c = x.coords();
        let (re, im) = (c[self.d as usize - 1], c[self.d as usize - 2]);
        let r = (re * re + im * im).sqrt();
        let theta = if r == 0.0 { 0.0 } else { principal_arg(re, im) };
        let nu = 2f64.powi(self.j as i32 - 2);
        let mut terms = Vec::with_capacity(self.band.len());
        for t in &self.band {
            let scaled = if r == 0.0 && t.n as f64 > nu {
                0.0
            } else {
                r.powf(t.n as f64 - nu)
            };
            terms.push(t.amplitude * scaled * (t.n as f64 * theta).cos());
        }
        let core = pairwise_sum(&terms).abs();
        if core == 0.0 {
            return 0.0;
        }
        let angle_factor = (1.0 + 2f64.powi(self.j as i32) * theta.abs()).powf(q);
        let height = 2f64.powf(self.j as f64 * (3.0 * self.d as f64 - 2.0) / 4.0);
        core * angle_factor / height
    }
}
