//! Points, rotations, and coordinates on the unit sphere `S^{d-1}`.
//!
//! Spherical coordinates follow the convention
//!
//! ```text
//! x_1 = sin th_{d-1} ... sin th_2 sin th_1
//! x_i = sin th_{d-1} ... sin th_i cos th_{i-1}      (2 <= i <= d-1)
//! x_d = cos th_{d-1}
//! ```
//!
//! with `th_1 in (-pi, pi]` and `th_m in [0, pi]` for `m >= 2`. The frame
//! grids need a deterministic rotation `g_nu` taking the pole `e^d` to a
//! prescribed point: we use the geodesic rotation in the two-plane spanned
//! by `e^d` and `nu`, with a fixed pi-rotation in the `(e^{d-1}, e^d)`
//! coordinate plane at the antipode.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

const UNIT_TOL: f64 = 1e-12;
const ANTIPODE_TOL: f64 = 1e-12;

/// A point on `S^{d-1}`, stored as its `d` Cartesian coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    coords: DVector<f64>,
}

impl SpherePoint {
    /// Wraps coordinates that are already unit-norm up to `1e-12`; the
    /// stored vector is renormalized to kill accumulated rounding.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::Domain(format!(
                "sphere points need at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        let v = DVector::from_vec(coords);
        let norm = v.norm();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::Domain(format!(
                "not a unit vector: |x| = {norm}"
            )));
        }
        Ok(Self { coords: v / norm })
    }

    /// Normalizes an arbitrary nonzero vector onto the sphere.
    pub fn from_unnormalized(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::Domain("need at least 2 coordinates".into()));
        }
        let v = DVector::from_vec(coords);
        let norm = v.norm();
        if norm < 1e-300 || !norm.is_finite() {
            return Err(Error::Domain("cannot normalize a zero vector".into()));
        }
        Ok(Self { coords: v / norm })
    }

    /// The pole `e^d`.
    pub fn pole(d: usize) -> Self {
        let mut v = DVector::zeros(d);
        v[d - 1] = 1.0;
        Self { coords: v }
    }

    /// The standard basis vector `e^i` (1-based).
    pub fn axis(d: usize, i: usize) -> Self {
        assert!((1..=d).contains(&i));
        let mut v = DVector::zeros(d);
        v[i - 1] = 1.0;
        Self { coords: v }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        self.coords.as_slice()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.coords.dot(&other.coords)
    }

    pub(crate) fn vector(&self) -> &DVector<f64> {
        &self.coords
    }

    pub(crate) fn from_vector(v: DVector<f64>) -> Self {
        Self { coords: v }
    }
}

/// A rotation of `R^d`: an orthogonal matrix with determinant +1.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    m: DMatrix<f64>,
}

impl Rotation {
    pub fn identity(d: usize) -> Self {
        Self {
            m: DMatrix::identity(d, d),
        }
    }

    /// Validates orthogonality (`|G^T G - I| <= 1e-10` entrywise) and
    /// `det G = 1` before wrapping.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Domain("rotation matrix must be square".into()));
        }
        let r = Self { m };
        let defect = r.orthogonality_defect();
        if defect > 1e-10 {
            return Err(Error::Domain(format!(
                "matrix is not orthogonal: defect {defect:.3e}"
            )));
        }
        let det = r.m.determinant();
        if (det - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!("determinant {det} != 1")));
        }
        Ok(r)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// `g x`.
    pub fn apply(&self, x: &SpherePoint) -> SpherePoint {
        SpherePoint::from_vector(&self.m * x.vector())
    }

    /// `g^T x = g^{-1} x`.
    pub fn apply_transpose(&self, x: &SpherePoint) -> SpherePoint {
        SpherePoint::from_vector(self.m.tr_mul(x.vector()))
    }

    /// `self . other` (apply `other` first).
    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation {
            m: &self.m * &other.m,
        }
    }

    pub fn transpose(&self) -> Rotation {
        Rotation {
            m: self.m.transpose(),
        }
    }

    /// Largest entry of `|G^T G - I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let d = self.dim();
        let gram = self.m.tr_mul(&self.m);
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - want).abs());
            }
        }
        worst
    }

    pub fn determinant(&self) -> f64 {
        self.m.determinant()
    }
}

/// Principal argument of `re + i im`, valued in `(-pi, pi]`; in particular
/// `Arg(-|z|) = +pi`.
///
/// # Panics
/// Panics at the origin, where the argument is undefined.
pub fn principal_arg(re: f64, im: f64) -> f64 {
    assert!(
        re != 0.0 || im != 0.0,
        "principal_arg is undefined at the origin"
    );
    let a = im.atan2(re);
    // atan2 returns -pi only for negative-zero im; fold that onto +pi.
    if a == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        a
    }
}

/// Maps spherical coordinates `(th_1, ..., th_{d-1})` to a point of
/// `S^{d-1}` in the convention above. For `d = 2` this is the circle map
/// `th_1 -> (sin th_1, cos th_1)`.
pub fn sph_to_cart(thetas: &[f64]) -> SpherePoint {
    let d = thetas.len() + 1;
    assert!(d >= 2, "need at least one angle");
    let mut x = vec![0.0f64; d];
    let mut sin_prod = 1.0;
    x[d - 1] = thetas[d - 2].cos();
    for i in (2..=d - 1).rev() {
        sin_prod *= thetas[i - 1].sin();
        x[i - 1] = sin_prod * thetas[i - 2].cos();
    }
    x[0] = sin_prod * thetas[0].sin();
    SpherePoint::from_vector(DVector::from_vec(x))
}

/// Recovers spherical coordinates from a point. At a coordinate
/// singularity (some partial radius vanishing) the undetermined angles are
/// set to zero; every quantity evaluated downstream is continuous there
/// because it carries matching `sin` powers.
pub fn cart_to_sph(x: &SpherePoint) -> Vec<f64> {
    let c = x.coords();
    let d = c.len();
    let mut thetas = vec![0.0f64; d - 1];
    // Partial radii r_m = |(x_1..x_m)|, built from the bottom for accuracy.
    let mut r = vec![0.0f64; d + 1];
    let mut acc = 0.0;
    for m in 1..=d {
        acc += c[m - 1] * c[m - 1];
        r[m] = acc.sqrt();
    }
    for m in (2..=d - 1).rev() {
        thetas[m - 1] = if r[m + 1] < 1e-300 {
            0.0
        } else {
            (c[m] / r[m + 1]).clamp(-1.0, 1.0).acos()
        };
    }
    thetas[0] = if r[2] < 1e-300 {
        0.0
    } else {
        principal_arg(c[1], c[0])
    };
    thetas
}

fn geodesic_rotation_to_last_axis(nu: &[f64]) -> DMatrix<f64> {
    let d = nu.len();
    let c = nu[d - 1]; // <nu, e^d>
    let mut w: Vec<f64> = nu.to_vec();
    w[d - 1] = 0.0;
    let s = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    if s <= ANTIPODE_TOL {
        if c >= 0.0 {
            return DMatrix::identity(d, d);
        }
        // Antipode: fixed pi-rotation in the (e^{d-1}, e^d) plane.
        let mut m = DMatrix::identity(d, d);
        m[(d - 2, d - 2)] = -1.0;
        m[(d - 1, d - 1)] = -1.0;
        return m;
    }
    let b: Vec<f64> = w.iter().map(|v| v / s).collect();
    // R = I + (c-1)(aa^T + bb^T) + s(ba^T - ab^T), a = e^d.
    let mut m = DMatrix::identity(d, d);
    for i in 0..d {
        for j in 0..d {
            let aa = if i == d - 1 && j == d - 1 { 1.0 } else { 0.0 };
            let bb = b[i] * b[j];
            let ba = if j == d - 1 { b[i] } else { 0.0 };
            let ab = if i == d - 1 { b[j] } else { 0.0 };
            m[(i, j)] += (c - 1.0) * (aa + bb) + s * (ba - ab);
        }
    }
    m
}

/// The deterministic rotation `g_nu` with `g_nu e^d = nu`: the geodesic
/// rotation in `span{e^d, nu}` fixing its orthogonal complement, with the
/// antipodal tie-break described in the module docs.
pub fn rotation_to_pole(nu: &SpherePoint) -> Rotation {
    Rotation {
        m: geodesic_rotation_to_last_axis(nu.coords()),
    }
}

/// The deterministic rotation `h_{nu'}` of `R^d` fixing `e^d` whose top
/// left `(d-1) x (d-1)` block takes `e^{d-1}` to `nu' in S^{d-2}`
/// (given by its `d-1` coordinates).
pub fn rotation_in_equator(nu_prime: &SpherePoint, d: usize) -> Rotation {
    assert_eq!(
        nu_prime.dim(),
        d - 1,
        "equatorial direction must have d-1 coordinates"
    );
    let block = geodesic_rotation_to_last_axis(nu_prime.coords());
    let mut m = DMatrix::identity(d, d);
    for i in 0..d - 1 {
        for j in 0..d - 1 {
            m[(i, j)] = block[(i, j)];
        }
    }
    Rotation { m }
}

/// The fixed base rotation `g_0` with `g_0 e^1 = e^{d-1}` and
/// `g_0 e^2 = e^d`: the cyclic coordinate shift `e^i -> e^{i-2 (mod d)}`,
/// which has determinant +1 for every `d`.
pub fn base_rotation_g0(d: usize) -> Rotation {
    assert!(d >= 3);
    let mut m: DMatrix<f64> = DMatrix::zeros(d, d);
    for i in 1..=d {
        let target = ((i + d - 3) % d) + 1; // i - 2 mod d, 1-based
        m[(target - 1, i - 1)] = 1.0;
    }
    debug_assert!((m.determinant() - 1.0).abs() < 1e-12);
    Rotation { m }
}

/// Geodesic distance `arccos <x, y>` on the sphere.
pub fn geodesic_distance(x: &SpherePoint, y: &SpherePoint) -> f64 {
    x.dot(y).clamp(-1.0, 1.0).acos()
}
