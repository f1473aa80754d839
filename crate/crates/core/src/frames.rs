//! Discretized curvelet frames and the Parseval machinery.
//!
//! The scale-`j` atoms are `sqrt(mu) T(g_nu h_eta) Psi^j` where `nu` runs
//! over an `S^{d-1}` rule exact to degree `2^{j+1}`, `eta` over an
//! `S^{d-2}` rule of the same exactness, and `mu` is the product of the
//! two quadrature weights. `g_nu` takes the pole to `nu` and `h_eta`
//! rotates the equatorial plane; the specific deterministic choice of
//! either rotation does not affect any frame sum, because the curvelet is
//! invariant under the rotations fixing its distinguished two-plane and
//! the quadrature degree covers every product that appears. Scale 0
//! contributes the single constant atom.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::curvelet::CurveletSpectrum;
use crate::geometry::{rotation_in_equator, rotation_to_pole, Rotation, SpherePoint};
use crate::harmonics::HarmonicCoefficients;
use crate::quadrature::{pairwise_sum, QuadratureRule};
use crate::windows::WindowPair;
use crate::{Error, Result};

/// Default bound on the number of atoms a single scale may enumerate.
pub const DEFAULT_ATOM_CAP: usize = 1_000_000;

/// Atoms processed per parallel work unit; fixed so that reductions are
/// chunk-ordered and therefore identical at every thread count.
const ATOM_CHUNK: usize = 1024;

/// One frame atom: a weighted rotated copy of the scale-`j` curvelet.
#[derive(Debug, Clone)]
pub struct FrameAtom {
    pub scale: u32,
    /// Quadrature mass `mu`; the atom carries `sqrt(mu)`.
    pub weight: f64,
    /// The rotation `g_nu . h_eta` applied to the curvelet.
    pub rotation: Rotation,
}

impl FrameAtom {
    /// Value `sqrt(mu) Psi^j(rot^{-1} x)` of the atom at a point.
    pub fn evaluate(&self, spectrum: &CurveletSpectrum, x: &SpherePoint) -> f64 {
        debug_assert_eq!(spectrum.scale(), self.scale);
        self.weight.sqrt() * spectrum.evaluate(&self.rotation.apply_transpose(x))
    }
}

/// The rotation/weight grid of one scale.
#[derive(Debug, Clone)]
pub struct FrameGrid {
    d: u32,
    j: u32,
    /// Centers on `S^{d-1}`; absent at scale 0.
    rules: Option<(QuadratureRule, QuadratureRule)>,
}

impl FrameGrid {
    pub fn new(d: u32, j: u32, atom_cap: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::Domain(format!(
                "frames require ambient dimension >= 3, got {d}"
            )));
        }
        if j == 0 {
            return Ok(Self { d, j, rules: None });
        }
        if j > 30 {
            return Err(Error::Domain(format!("scale {j} is out of range (max 30)")));
        }
        let degree = 1u32 << (j + 1);
        let outer = QuadratureRule::product_rule(d as usize, degree)?;
        let inner = QuadratureRule::product_rule(d as usize - 1, degree)?;
        let total = outer.len().checked_mul(inner.len()).ok_or_else(|| {
            Error::Overflow("atom count".into())
        })?;
        if total > atom_cap {
            return Err(Error::Resource(format!(
                "scale {j} on S^{} needs {total} atoms (cap {atom_cap})",
                d - 1
            )));
        }
        Ok(Self {
            d,
            j,
            rules: Some((outer, inner)),
        })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn scale(&self) -> u32 {
        self.j
    }

    pub fn len(&self) -> usize {
        match &self.rules {
            None => 1,
            Some((outer, inner)) => outer.len() * inner.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The `i`-th atom, in row-major `(center, orientation)` order.
    pub fn atom(&self, i: usize) -> FrameAtom {
        match &self.rules {
            None => {
                assert_eq!(i, 0, "scale 0 has a single atom");
                FrameAtom {
                    scale: 0,
                    weight: 1.0,
                    rotation: Rotation::identity(self.d as usize),
                }
            }
            Some((outer, inner)) => {
                let r = i / inner.len();
                let s = i % inner.len();
                assert!(r < outer.len(), "atom index {i} out of range");
                let g = rotation_to_pole(&outer.points()[r]);
                let h = rotation_in_equator(&inner.points()[s], self.d as usize);
                FrameAtom {
                    scale: self.j,
                    weight: outer.weights()[r] * inner.weights()[s],
                    rotation: g.compose(&h),
                }
            }
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = FrameAtom> + '_ {
        (0..self.len()).map(|i| self.atom(i))
    }
}

/// Largest scale whose band meets degrees `<= n_max`: the scale-`j` band
/// starts strictly above `2^{j-2}`.
pub fn last_active_scale(n_max: u32) -> u32 {
    if n_max == 0 {
        return 0;
    }
    let mut j = 1u32;
    while 2f64.powi(j as i32 - 2) < n_max as f64 {
        j += 1;
    }
    j - 1
}

/// Per-atom analysis coefficients `<f, atom>` against a fixed rule,
/// returned with atom weights folded to `mu |coeff|^2`-ready pairs.
/// The inner loop touches only the two rotation columns that feed the
/// curvelet, so each atom costs `O(rule * (d + band))`.
fn scale_coefficients(
    f_vals: &[Complex64],
    rule: &QuadratureRule,
    spectrum: &CurveletSpectrum,
    grid: &FrameGrid,
    i: usize,
) -> (f64, Complex64) {
    let atom = grid.atom(i);
    let d = grid.d() as usize;
    let m = atom.rotation.matrix();
    let mut re = Vec::with_capacity(rule.len());
    let mut im = Vec::with_capacity(rule.len());
    for ((x, &w), fv) in rule.points().iter().zip(rule.weights()).zip(f_vals) {
        let c = x.coords();
        // (rot^T x) components d-1 and d are dot products with the
        // matching rotation columns.
        let mut ya = 0.0;
        let mut yb = 0.0;
        for (k, &ck) in c.iter().enumerate() {
            ya += m[(k, d - 2)] * ck;
            yb += m[(k, d - 1)] * ck;
        }
        let v = w * spectrum.evaluate_z(Complex64::new(yb, ya));
        re.push(v * fv.re);
        im.push(v * fv.im);
    }
    (
        atom.weight,
        Complex64::new(pairwise_sum(&re), pairwise_sum(&im)),
    )
}

/// Energy captured by one scale: `sum_atoms mu |<f, Psi_atom>|^2` with
/// unit-weight curvelets (`mu` folded in once).
fn scale_energy(
    f: &HarmonicCoefficients,
    spectrum: &CurveletSpectrum,
    grid: &FrameGrid,
    rule: &QuadratureRule,
) -> f64 {
    let f_vals: Vec<Complex64> = rule.points().iter().map(|x| f.evaluate(x)).collect();
    let terms: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let (mu, coeff) = scale_coefficients(&f_vals, rule, spectrum, grid, i);
            mu * coeff.norm_sqr()
        })
        .collect();
    pairwise_sum(&terms)
}

/// Energy bookkeeping of one scale inside a Parseval run.
#[derive(Debug, Clone)]
pub struct ScaleEnergy {
    pub scale: u32,
    pub atoms: usize,
    pub energy: f64,
}

/// Outcome of a full analysis-energy comparison.
#[derive(Debug, Clone)]
pub struct ParsevalReport {
    pub d: u32,
    pub signal_energy: f64,
    pub frame_energy: f64,
    /// `|frame - signal| / signal`.
    pub relative_defect: f64,
    pub scales: Vec<ScaleEnergy>,
}

/// Sums `mu |<f, atom>|^2` over every scale that can see the band-limited
/// signal `f` and compares against `||f||^2`. Exact up to rounding: each
/// scale uses a rule covering `deg f + 2^j`.
pub fn parseval_defect(
    f: &HarmonicCoefficients,
    window: &WindowPair,
    atom_cap: usize,
) -> Result<ParsevalReport> {
    let d = f.d();
    let n_f = f.max_degree();
    let signal_energy = f.norm_sq();
    let mut scales = Vec::new();

    // Scale 0: the constant atom.
    let base_rule = QuadratureRule::product_rule(d as usize, n_f)?;
    let c0 = base_rule.integrate_complex(|x| f.evaluate(x));
    scales.push(ScaleEnergy {
        scale: 0,
        atoms: 1,
        energy: c0.norm_sqr(),
    });

    for j in 1..=last_active_scale(n_f) {
        let spectrum = CurveletSpectrum::new(d, j, window)?;
        let grid = FrameGrid::new(d, j, atom_cap)?;
        let rule = QuadratureRule::product_rule(d as usize, n_f + spectrum.max_degree())?;
        scales.push(ScaleEnergy {
            scale: j,
            atoms: grid.len(),
            energy: scale_energy(f, &spectrum, &grid, &rule),
        });
    }

    let frame_energy = pairwise_sum(&scales.iter().map(|s| s.energy).collect::<Vec<_>>());
    let relative_defect = if signal_energy > 0.0 {
        (frame_energy - signal_energy).abs() / signal_energy
    } else {
        frame_energy.abs()
    };
    Ok(ParsevalReport {
        d,
        signal_energy,
        frame_energy,
        relative_defect,
        scales,
    })
}

/// The partial synthesis `sum_{j <= j_cap} sum_atoms <f, a> a(x)` at the
/// given points. For `f` of degree `<= 2^{j_cap - 1}` this reproduces `f`;
/// in general it applies the smooth spectral cutoff of the window to each
/// degree.
pub fn reconstruct_partial(
    f: &HarmonicCoefficients,
    window: &WindowPair,
    j_cap: u32,
    points: &[SpherePoint],
    atom_cap: usize,
) -> Result<Vec<Complex64>> {
    let d = f.d();
    let n_f = f.max_degree();
    let mut out = vec![Complex64::new(0.0, 0.0); points.len()];

    let base_rule = QuadratureRule::product_rule(d as usize, n_f)?;
    let c0 = base_rule.integrate_complex(|x| f.evaluate(x));
    for v in &mut out {
        *v += c0;
    }

    for j in 1..=j_cap.min(last_active_scale(n_f)) {
        let spectrum = CurveletSpectrum::new(d, j, window)?;
        if spectrum
            .band()
            .iter()
            .all(|t| t.kappa == 0.0 || t.n > n_f)
        {
            continue;
        }
        let grid = FrameGrid::new(d, j, atom_cap)?;
        let rule = QuadratureRule::product_rule(d as usize, n_f + spectrum.max_degree())?;
        let f_vals: Vec<Complex64> = rule.points().iter().map(|x| f.evaluate(x)).collect();

        let n_chunks = grid.len().div_ceil(ATOM_CHUNK);
        let chunk_sums: Vec<Vec<Complex64>> = (0..n_chunks)
            .into_par_iter()
            .map(|chunk| {
                let lo = chunk * ATOM_CHUNK;
                let hi = (lo + ATOM_CHUNK).min(grid.len());
                let mut acc = vec![Complex64::new(0.0, 0.0); points.len()];
                for i in lo..hi {
                    let (mu, coeff) = scale_coefficients(&f_vals, &rule, &spectrum, &grid, i);
                    let atom = grid.atom(i);
                    for (slot, x) in acc.iter_mut().zip(points) {
                        let y = atom.rotation.apply_transpose(x);
                        *slot += coeff * (mu * spectrum.evaluate(&y));
                    }
                }
                acc
            })
            .collect();
        for chunk in chunk_sums {
            for (slot, v) in out.iter_mut().zip(chunk) {
                *slot += v;
            }
        }
    }
    Ok(out)
}
