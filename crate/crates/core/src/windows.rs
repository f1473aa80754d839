//! The window pair `(phi, kappa)` driving every multiscale construction.
//!
//! `phi` is non-increasing with `phi = 1` on `[0, 1/2]` and `phi = 0` on
//! `[1, inf)`; `kappa(t) = sqrt(phi(t/2)^2 - phi(t)^2)` is supported in
//! `[1/2, 2]`. Both facts combine into the telescoping admissibility
//! identity `sum_{j>=1} kappa(n/2^{j-1})^2 = 1` for every integer
//! `n >= 1`, which holds to rounding accuracy regardless of how precisely
//! the transition profile itself is tabulated, because each `kappa^2`
//! value is formed from the same two `phi` evaluations that cancel in the
//! telescope.

/// Transition profile selection for the window pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    /// `C^infinity` decay through the normalized integral of
    /// `exp(-1/(x(1-x)))`.
    SmoothBump,
    /// Minimal-degree polynomial transition with `q` vanishing
    /// derivatives at both ends of `[1/2, 1]`; the pair is then `C^q`.
    Spline { q: u32 },
}

/// Number of Hermite intervals tabulating the smooth-bump transition.
/// With exact endpoint slopes the interpolation error is below `1e-13`.
const BUMP_TABLE_LEN: usize = 4096;

/// 15-point Gauss-Legendre nodes and weights on [-1, 1], used to
/// accumulate the transition integral one table cell at a time.
/// Digits kept as published even where f64 rounds them early.
#[allow(clippy::excessive_precision)]
const GL15_NODES: [f64; 15] = [
    -0.987_992_518_020_485_4,
    -0.937_273_392_400_705_9,
    -0.848_206_583_410_427_2,
    -0.724_417_731_360_17,
    -0.570_972_172_608_538_8,
    -0.394_151_347_077_563_4,
    -0.201_194_093_997_434_52,
    0.0,
    0.201_194_093_997_434_52,
    0.394_151_347_077_563_4,
    0.570_972_172_608_538_8,
    0.724_417_731_360_17,
    0.848_206_583_410_427_2,
    0.937_273_392_400_705_9,
    0.987_992_518_020_485_4,
];
#[allow(clippy::excessive_precision)]
const GL15_WEIGHTS: [f64; 15] = [
    0.030_753_241_996_117_268,
    0.070_366_047_488_108_12,
    0.107_159_220_467_171_93,
    0.139_570_677_926_154_3,
    0.166_269_205_816_993_93,
    0.186_161_000_015_562_21,
    0.198_431_485_327_111_58,
    0.202_578_241_925_561_27,
    0.198_431_485_327_111_58,
    0.186_161_000_015_562_21,
    0.166_269_205_816_993_93,
    0.139_570_677_926_154_3,
    0.107_159_220_467_171_93,
    0.070_366_047_488_108_12,
    0.030_753_241_996_117_268,
];

fn bump_density(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        (-1.0 / (x * (1.0 - x))).exp()
    }
}

/// Cumulative normalized bump integral tabulated for Hermite evaluation.
#[derive(Debug, Clone)]
struct BumpTable {
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl BumpTable {
    fn build() -> Self {
        let n = BUMP_TABLE_LEN;
        let h = 1.0 / n as f64;
        let half_n = n / 2;
        // Integrate the density over the lower-half cells only and fill
        // the upper half through the exact symmetry rho(x) = rho(1-x);
        // this pins s(u) + s(1-u) = 1 to rounding level, which the
        // band-pass telescoping relies on.
        let mut cumulative = vec![0.0; half_n + 1];
        let mut acc = 0.0;
        for cell in 0..half_n {
            let (a, b) = (cell as f64 * h, (cell + 1) as f64 * h);
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            let mut cell_sum = 0.0;
            for (x, w) in GL15_NODES.iter().zip(GL15_WEIGHTS) {
                cell_sum += w * bump_density(mid + half * x);
            }
            acc += half * cell_sum;
            cumulative[cell + 1] = acc;
        }
        let total = 2.0 * acc;
        let mut values = vec![0.0; n + 1];
        let mut slopes = vec![0.0; n + 1];
        for i in 0..=half_n {
            values[i] = cumulative[i] / total;
            values[n - i] = 1.0 - values[i];
            let s = bump_density(i as f64 * h) / total;
            slopes[i] = s;
            slopes[n - i] = s;
        }
        Self { values, slopes }
    }

    /// Hermite-cubic evaluation of the normalized cumulative integral at
    /// `u` in `[0, 1]`; monotone because the tabulated slopes are exact
    /// values of the non-negative integrand.
    fn eval(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        let n = BUMP_TABLE_LEN as f64;
        let scaled = u * n;
        let cell = (scaled.floor() as usize).min(BUMP_TABLE_LEN - 1);
        let t = scaled - cell as f64;
        let h = 1.0 / n;
        let (y0, y1) = (self.values[cell], self.values[cell + 1]);
        // Clamp the endpoint slopes into the monotone (Fritz-Carlson)
        // region m <= 3 (y1 - y0): in the far tails the density grows by
        // orders of magnitude within one cell and the exact slopes would
        // make the cubic overshoot below zero.
        let cap = 3.0 * (y1 - y0);
        let m0 = (self.slopes[cell] * h).min(cap);
        let m1 = (self.slopes[cell + 1] * h).min(cap);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1
    }
}

/// Closed-form spline transition: the regularized incomplete integral of
/// `s^q (1-s)^q`, the minimal-degree polynomial rising from 0 to 1 on
/// `[0, 1]` with `q` flat derivatives at both ends.
fn spline_transition(q: u32, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    // Evaluate the series on [0, 1/2] only and mirror: the symmetry of
    // s^q(1-s)^q then holds exactly in floating point.
    if u > 0.5 {
        return 1.0 - spline_transition(q, 1.0 - u);
    }
    // int_0^u s^q(1-s)^q ds = sum_m binom(q,m)(-1)^m u^{q+m+1}/(q+m+1),
    // normalized by B(q+1, q+1).
    let mut acc = 0.0;
    let mut binom = 1.0f64;
    for m in 0..=q {
        let term = binom * u.powi((q + m + 1) as i32) / (q + m + 1) as f64;
        acc += if m % 2 == 0 { term } else { -term };
        binom *= (q - m) as f64 / (m + 1) as f64;
    }
    let ln_beta = crate::specfun::ln_gamma(q as f64 + 1.0) * 2.0
        - crate::specfun::ln_gamma(2.0 * q as f64 + 2.0);
    acc / ln_beta.exp()
}

/// A concrete window pair. Construction precomputes whatever the
/// transition profile needs; evaluation is cheap and allocation-free.
#[derive(Debug, Clone)]
pub struct WindowPair {
    kind: WindowKind,
    bump: Option<BumpTable>,
}

impl WindowPair {
    pub fn new(kind: WindowKind) -> Self {
        let bump = match kind {
            WindowKind::SmoothBump => Some(BumpTable::build()),
            WindowKind::Spline { .. } => None,
        };
        Self { kind, bump }
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    /// Smoothness grade: `None` means `C^infinity`.
    pub fn smoothness(&self) -> Option<u32> {
        match self.kind {
            WindowKind::SmoothBump => None,
            WindowKind::Spline { q } => Some(q),
        }
    }

    /// The rising transition profile of the window family.
    fn transition(&self, u: f64) -> f64 {
        match (&self.kind, &self.bump) {
            (WindowKind::SmoothBump, Some(table)) => table.eval(u),
            (WindowKind::Spline { q }, _) => spline_transition(*q, u),
            _ => unreachable!("bump table exists whenever the kind demands it"),
        }
    }

    /// The low-pass window `phi`.
    pub fn phi(&self, t: f64) -> f64 {
        let t = t.abs();
        if t <= 0.5 {
            return 1.0;
        }
        if t >= 1.0 {
            return 0.0;
        }
        1.0 - self.transition(2.0 * t - 1.0)
    }

    /// The band-pass window `kappa(t) = sqrt(phi(t/2)^2 - phi(t)^2)`,
    /// supported in `[1/2, 2]`. Expressed through the rising transition
    /// directly, so the tiny tails near both support edges survive in
    /// floating point and adjacent scales telescope exactly.
    pub fn kappa(&self, t: f64) -> f64 {
        let t = t.abs();
        if t <= 0.5 || t >= 2.0 {
            return 0.0;
        }
        if t < 1.0 {
            // phi(t/2) = 1, so kappa^2 = 1 - phi(t)^2 = s (2 - s) with
            // s the transition at 2t - 1 (exact: Sterbenz).
            let s = self.transition(2.0 * t - 1.0);
            (s * (2.0 - s)).sqrt()
        } else {
            // phi(t) = 0, so kappa = phi(t/2), which the transition
            // symmetry turns into the rising profile at 2 - t.
            self.transition(2.0 - t)
        }
    }
}

/// Largest admissibility defect `max_{1<=n<=n_max}
/// |sum_{j>=1} kappa(n/2^{j-1})^2 - 1|`. The sum truncates once the
/// argument drops below the support of `kappa`.
pub fn admissibility_defect(w: &WindowPair, n_max: u32) -> f64 {
    let mut worst = 0.0f64;
    for n in 1..=n_max {
        let mut sum = 0.0;
        let mut j = 1u32;
        loop {
            let arg = n as f64 / 2f64.powi(j as i32 - 1);
            if arg < 0.5 {
                break;
            }
            let k = w.kappa(arg);
            sum += k * k;
            j += 1;
        }
        worst = worst.max((sum - 1.0).abs());
    }
    worst
}

/// Outcome of the numerical sign scan of `kappa^{(q)}` right of `1/2`.
#[derive(Debug, Clone)]
pub struct NonvanishingReport {
    pub q: u32,
    /// `kappa > 0` strictly on the scanned interior of `(1/2, 2)`.
    pub strictly_positive_inside: bool,
    pub min_interior_value: f64,
    /// Largest `t0` such that the `q`-th derivative estimate keeps one
    /// sign on `(1/2, t0)`.
    pub fixed_sign_until: f64,
    /// False when some derivative estimate sits below the finite
    /// difference noise floor, leaving its sign unresolved.
    pub conclusive: bool,
}

/// Scans `kappa` on a grid over `(1/2, 2)`: strict positivity on the
/// interior, and the sign pattern of the `q`-th central finite
/// difference (`q <= 4`). Purely numerical evidence, reported as such.
pub fn nonvanishing_check(w: &WindowPair, q: u32, grid: usize) -> NonvanishingReport {
    assert!((1..=4).contains(&q), "derivative order must be 1..=4");
    assert!(grid >= 16);
    // The bump tail exp(-1/u) underflows f64 for u < 1/745; keep the
    // scanned interior clear of that radius so "strictly positive" is a
    // statement about the function, not about denormal flush.
    let margin = 2.5e-3;
    let (lo, hi) = (0.5 + margin, 2.0 - margin);
    let mut min_val = f64::INFINITY;
    for i in 0..=grid {
        let t = lo + (hi - lo) * i as f64 / grid as f64;
        min_val = min_val.min(w.kappa(t));
    }

    // Central difference stencils for derivative order q.
    let stencil: &[(i32, f64)] = match q {
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        _ => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
    };
    let h = 2e-3f64;
    let noise_floor = 16.0 * f64::EPSILON / h.powi(q as i32);

    let mut fixed_until = lo;
    let mut sign = 0i32;
    let mut conclusive = true;
    for i in 0..=grid {
        let t = lo + (hi - lo) * i as f64 / grid as f64;
        let mut est = 0.0;
        for &(off, c) in stencil {
            est += c * w.kappa(t + off as f64 * h);
        }
        est /= h.powi(q as i32);
        if est.abs() < noise_floor {
            conclusive = false;
            continue;
        }
        let s = if est > 0.0 { 1 } else { -1 };
        if sign == 0 {
            sign = s;
        } else if s != sign {
            break;
        }
        fixed_until = t;
    }
    NonvanishingReport {
        q,
        strictly_positive_inside: min_val > 0.0,
        min_interior_value: min_val,
        fixed_sign_until: fixed_until,
        conclusive,
    }
}
