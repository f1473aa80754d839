//! Command-line front end: construction and plot-data emission plus the
//! verification suites, with machine-readable JSON verdicts on stdout.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 resource limit (rule/atom caps, I/O).
//!
//! Suites draw their randomness from `--seed` only, and every scan uses
//! order-independent reductions, so outputs are byte-identical across
//! runs at any fixed seed; `--threads 1` (or `RAYON_NUM_THREADS=1`)
//! additionally pins the worker count.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;

use curvelets::edgelab::{self, ScanGrid, ZonalTestSignal};
use curvelets::frames::{self, FrameGrid, DEFAULT_ATOM_CAP};
use curvelets::geometry::SpherePoint;
use curvelets::harmonics::{self, HarmonicCoefficients};
use curvelets::quadrature::QuadratureRule;
use curvelets::specfun::HarmonicIndex;
use curvelets::windows::{admissibility_defect, WindowKind, WindowPair};
use curvelets::{autocorr, CurveletSpectrum, Error as CoreError};

const PI: f64 = std::f64::consts::PI;

#[derive(Parser)]
#[command(
    name = "curvelets",
    version,
    about = "Polynomial curvelet frames on the unit sphere: construction, \
             verification suites, and plot data"
)]
struct Cli {
    #[command(flatten)]
    globals: Globals,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Globals {
    /// JSON config file supplying defaults; explicit flags win.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Worker thread count (default: RAYON_NUM_THREADS, else all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Seed for every randomized suite.
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,
    /// Band window kind.
    #[arg(long, global = true, value_enum, value_name = "KIND")]
    window: Option<WindowArg>,
    /// Smoothness grade of the spline window.
    #[arg(long, global = true, value_name = "Q")]
    q: Option<u32>,
    /// Cap on the number of frame atoms per scale.
    #[arg(long, global = true, value_name = "N")]
    atom_cap: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowArg {
    /// C-infinity bump transition.
    SmoothBump,
    /// Polynomial spline transition of grade q.
    Spline,
}

#[derive(Subcommand)]
enum Command {
    /// Curvelet profiles and diagnostics.
    #[command(subcommand)]
    Curvelet(CurveletCmd),
    /// Frame analysis and Parseval verification.
    #[command(subcommand)]
    Frame(FrameCmd),
    /// Auto-correlation curve: closed form against quadrature.
    Autocorr(AutocorrArgs),
    /// Cap-edge test signals: coefficient scans and slope reports.
    #[command(subcommand)]
    Edge(EdgeCmd),
    /// Spatial localization diagnostics.
    #[command(subcommand)]
    Localization(LocalizationCmd),
    /// Built-in verification sweep.
    Selftest(SelftestArgs),
}

#[derive(Subcommand)]
enum CurveletCmd {
    /// Sample the curvelet over polar coordinates; CSV columns
    /// t, varphi, value.
    Profile(ProfileArgs),
}

#[derive(Args)]
struct ProfileArgs {
    /// Ambient dimension (sphere is S^{d-1}).
    #[arg(long)]
    d: Option<u32>,
    /// Scale.
    #[arg(long)]
    j: u32,
    /// Grid resolution: t takes grid+1 values on [0, pi], varphi takes
    /// grid values on [0, 2 pi).
    #[arg(long, default_value_t = 64)]
    grid: usize,
    /// Output CSV path (stdout when omitted).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum FrameCmd {
    /// Frame coefficients of a band-limited signal; CSV columns
    /// j, r, s, re, im.
    Analyze(AnalyzeArgs),
    /// Check that frame coefficients carry the signal's energy.
    VerifyParseval(VerifyParsevalArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Ambient dimension (sphere is S^{d-1}).
    #[arg(long)]
    d: Option<u32>,
    /// Largest scale analyzed.
    #[arg(long = "J", value_name = "J")]
    j_cap: u32,
    /// Signal: random:<degree> (seeded) or harmonic:<n>:<k1,k2,...>.
    #[arg(long)]
    input: String,
    /// Output CSV path.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyParsevalArgs {
    /// Ambient dimension (sphere is S^{d-1}).
    #[arg(long)]
    d: Option<u32>,
    /// Scale cap; trial signals have degree up to 2^(J-1).
    #[arg(long = "J", value_name = "J")]
    j_cap: u32,
    /// Number of random trial signals.
    #[arg(long, default_value_t = 10)]
    trials: usize,
}

#[derive(Args)]
struct AutocorrArgs {
    /// Ambient dimension (sphere is S^{d-1}).
    #[arg(long)]
    d: Option<u32>,
    /// Scale.
    #[arg(long)]
    j: u32,
    /// Number of rotation angles sampled on [0, pi].
    #[arg(long, default_value_t = 64)]
    samples: usize,
    /// Output CSV path (stdout when omitted); columns t, closed_form,
    /// brute_force, normalized, where t is the rotation angle for d = 3
    /// and the equatorial overlap cos(beta) for d >= 4.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum EdgeCmd {
    /// Coefficient scan across polar offset and orientation mismatch;
    /// CSV columns offset, z, coefficient.
    Scan(ScanArgs),
    /// Scale-asymptotics report: sup slope, certified near-boundary
    /// window, offset decay.
    Slopes(SlopesArgs),
}

#[derive(Args)]
struct ScanArgs {
    /// Ambient dimension (sphere is S^{d-1}).
    #[arg(long)]
    d: Option<u32>,
    /// Scale.
    #[arg(long)]
    j: u32,
    /// Cap radius of the test signal.
    #[arg(long)]
    r: f64,
    /// Edge order: the jump sits in the tau-th derivative.
    #[arg(long, default_value_t = 0)]
    tau: u32,
    /// Offset sample count over [-6 pi, 6 pi] scaled by 2^-j.
    #[arg(long, default_value_t = 801)]
    grid: usize,
    /// Output CSV path.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

#[derive(Args)]
struct SlopesArgs {
    /// Ambient dimension (sphere is S^{d-1}).
    #[arg(long)]
    d: Option<u32>,
    /// Edge order.
    #[arg(long, default_value_t = 0)]
    tau: u32,
    /// Smallest scale in the fit.
    #[arg(long, default_value_t = 4)]
    jmin: u32,
    /// Largest scale in the fit.
    #[arg(long, default_value_t = 8)]
    jmax: u32,
    /// Cap radius (must keep the boundary 0.2 from both poles).
    #[arg(long, default_value_t = PI / 3.0)]
    r: f64,
    /// Output JSON report path.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum LocalizationCmd {
    /// Verify the decay-moment ratio does not grow across scales.
    Check(CheckArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Ambient dimension (sphere is S^{d-1}).
    #[arg(long)]
    d: Option<u32>,
    /// Smallest scale.
    #[arg(long, default_value_t = 4)]
    jmin: u32,
    /// Largest scale.
    #[arg(long, default_value_t = 8)]
    jmax: u32,
    /// Angular resolution of the test grid.
    #[arg(long, default_value_t = 401)]
    grid: usize,
    /// Decay-moment exponents, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 2.0, 3.0])]
    exponents: Vec<f64>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Ambient dimension (sphere is S^{d-1}).
    #[arg(long)]
    d: Option<u32>,
    /// Restrict to the fast structural suites.
    #[arg(long)]
    quick: bool,
}

enum Failure {
    Usage(String),
    Resource(String),
    Io(String),
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Domain(m) => Failure::Usage(m),
            CoreError::Overflow(m) | CoreError::Resource(m) => Failure::Resource(m),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    d: Option<u32>,
    seed: Option<u64>,
    threads: Option<usize>,
    atom_cap: Option<usize>,
    window: Option<FileWindow>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileWindow {
    kind: String,
    q: Option<u32>,
}

/// Effective run configuration after merging flags over the config file.
struct Settings {
    d_default: Option<u32>,
    seed: u64,
    atom_cap: usize,
    window: WindowPair,
    window_label: String,
}

fn resolve_settings(globals: &Globals) -> Result<Settings, Failure> {
    let file: FileConfig = match &globals.config {
        None => FileConfig::default(),
        Some(path) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("config file {}: {e}", path.display())))?
        }
    };

    if let Some(threads) = globals.threads.or(file.threads) {
        if threads == 0 {
            return Err(Failure::Usage("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Resource(format!("thread pool: {e}")))?;
    }

    let file_kind = match file.window.as_ref().map(|w| w.kind.as_str()) {
        None => None,
        Some("smooth-bump") => Some(WindowArg::SmoothBump),
        Some("spline") => Some(WindowArg::Spline),
        Some(other) => {
            return Err(Failure::Usage(format!(
                "config window.kind must be smooth-bump or spline, got {other:?}"
            )));
        }
    };
    let q = globals.q.or(file.window.as_ref().and_then(|w| w.q)).unwrap_or(3);
    if !(1..=3).contains(&q) {
        return Err(Failure::Usage(format!("window grade q must be 1..=3, got {q}")));
    }
    let (kind, label) = match globals.window.or(file_kind).unwrap_or(WindowArg::SmoothBump) {
        WindowArg::SmoothBump => (WindowKind::SmoothBump, "smooth-bump".to_string()),
        WindowArg::Spline => (WindowKind::Spline { q }, format!("spline(q={q})")),
    };

    Ok(Settings {
        d_default: file.d,
        seed: globals.seed.or(file.seed).unwrap_or(7),
        atom_cap: globals.atom_cap.or(file.atom_cap).unwrap_or(DEFAULT_ATOM_CAP),
        window: WindowPair::new(kind),
        window_label: label,
    })
}

fn resolve_d(flag: Option<u32>, settings: &Settings) -> Result<u32, Failure> {
    let d = flag.or(settings.d_default).unwrap_or(3);
    if d < 3 {
        return Err(Failure::Usage(format!("ambient dimension must be >= 3, got {d}")));
    }
    Ok(d)
}

fn pairwise(vals: &[f64]) -> f64 {
    match vals.len() {
        0 => 0.0,
        1 => vals[0],
        n => pairwise(&vals[..n / 2]) + pairwise(&vals[n / 2..]),
    }
}

fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Write CSV rows to a file, or to stdout when no path is given.
fn emit_table(out: Option<&Path>, header: &str, rows: &[String]) -> Result<(), Failure> {
    let mut buf = String::with_capacity(header.len() + 1 + rows.iter().map(|r| r.len() + 1).sum::<usize>());
    buf.push_str(header);
    buf.push('\n');
    for row in rows {
        buf.push_str(row);
        buf.push('\n');
    }
    match out {
        Some(path) => fs::write(path, buf)?,
        None => print!("{buf}"),
    }
    Ok(())
}

/// Print the machine verdict and its human rendering; returns `pass`.
fn emit_verdict(json: serde_json::Value, human: String) -> bool {
    let pass = json.get("pass").and_then(|v| v.as_bool()).unwrap_or(true);
    println!("{json}");
    println!("{human}");
    pass
}

fn main() -> ExitCode {
    // Die silently on a closed pipe (e.g. `curvelets ... | head`)
    // instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(m)) | Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool, Failure> {
    let settings = resolve_settings(&cli.globals)?;
    match cli.command {
        Command::Curvelet(CurveletCmd::Profile(args)) => run_profile(&args, &settings),
        Command::Frame(FrameCmd::Analyze(args)) => run_analyze(&args, &settings),
        Command::Frame(FrameCmd::VerifyParseval(args)) => run_verify_parseval(&args, &settings),
        Command::Autocorr(args) => run_autocorr(&args, &settings),
        Command::Edge(EdgeCmd::Scan(args)) => run_scan(&args, &settings),
        Command::Edge(EdgeCmd::Slopes(args)) => run_slopes(&args, &settings),
        Command::Localization(LocalizationCmd::Check(args)) => run_localization(&args, &settings),
        Command::Selftest(args) => run_selftest(&args, &settings),
    }
}

fn run_profile(args: &ProfileArgs, settings: &Settings) -> Result<bool, Failure> {
    let d = resolve_d(args.d, settings)? as usize;
    if args.grid < 2 {
        return Err(Failure::Usage("grid must be at least 2".into()));
    }
    let s = CurveletSpectrum::new(d as u32, args.j, &settings.window)?;
    let mut rows = Vec::with_capacity((args.grid + 1) * args.grid);
    for it in 0..=args.grid {
        let t = PI * it as f64 / args.grid as f64;
        for ip in 0..args.grid {
            let varphi = 2.0 * PI * ip as f64 / args.grid as f64;
            // Polar chart around the pole: the curvelet only sees the
            // last two coordinates, so one transverse axis suffices.
            let mut coords = vec![0.0; d];
            coords[d - 1] = t.cos();
            coords[d - 2] = t.sin() * varphi.cos();
            coords[d - 3] = t.sin() * varphi.sin();
            let x = SpherePoint::new(coords)?;
            rows.push(format!("{:e},{:e},{:e}", t, varphi, s.evaluate(&x)));
        }
    }
    emit_table(args.out.as_deref(), "t,varphi,value", &rows)?;
    if let Some(path) = &args.out {
        let summary = json!({
            "command": "curvelet profile",
            "d": d, "j": args.j, "window": settings.window_label,
            "rows": rows.len(), "out": path.display().to_string(),
        });
        println!("{summary}");
        println!("profile: wrote {} samples to {}", rows.len(), path.display());
    }
    Ok(true)
}

fn parse_signal(
    spec: &str,
    d: u32,
    seed: u64,
) -> Result<(HarmonicCoefficients, serde_json::Value), Failure> {
    if let Some(rest) = spec.strip_prefix("random:") {
        let degree: u32 = rest
            .parse()
            .map_err(|_| Failure::Usage(format!("random signal degree {rest:?} is not a number")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = HarmonicCoefficients::random(d, degree, &mut rng)?;
        return Ok((f, json!({"kind": "random", "degree": degree, "seed": seed})));
    }
    if let Some(rest) = spec.strip_prefix("harmonic:") {
        let (n_text, chain_text) = rest
            .split_once(':')
            .ok_or_else(|| Failure::Usage("harmonic spec needs harmonic:<n>:<k1,...>".into()))?;
        let n: u32 = n_text
            .parse()
            .map_err(|_| Failure::Usage(format!("harmonic degree {n_text:?} is not a number")))?;
        let chain = chain_text
            .split(',')
            .map(|k| {
                k.parse::<i64>()
                    .map_err(|_| Failure::Usage(format!("chain entry {k:?} is not an integer")))
            })
            .collect::<Result<Vec<i64>, Failure>>()?;
        let idx = HarmonicIndex::new(d, n, chain)?;
        let mut f = HarmonicCoefficients::new(d)?;
        f.set(idx, Complex64::new(1.0, 0.0))?;
        return Ok((f, json!({"kind": "harmonic", "degree": n})));
    }
    Err(Failure::Usage(format!(
        "signal spec {spec:?} must be random:<degree> or harmonic:<n>:<k1,...>"
    )))
}

fn run_analyze(args: &AnalyzeArgs, settings: &Settings) -> Result<bool, Failure> {
    let d = resolve_d(args.d, settings)?;
    let (f, signal_json) = parse_signal(&args.input, d, settings.seed)?;
    let n_f = f.max_degree();

    let mut rows = Vec::new();
    let mut energy_terms = Vec::new();
    for j in 0..=args.j_cap {
        let spectrum = CurveletSpectrum::new(d, j, &settings.window)?;
        let grid = FrameGrid::new(d, j, settings.atom_cap)?;
        let band_degree = if j == 0 { 0 } else { 1u32 << j };
        let rule = QuadratureRule::product_rule(d as usize, n_f + band_degree)?;
        let weighted_f: Vec<Complex64> = rule
            .points()
            .iter()
            .zip(rule.weights())
            .map(|(x, &wt)| wt * f.evaluate(x))
            .collect();
        let orientations = if j == 0 {
            1
        } else {
            QuadratureRule::product_rule(d as usize - 1, 1 << (j + 1))?.len()
        };
        for (i, atom) in grid.atoms().enumerate() {
            let mut re = Vec::with_capacity(weighted_f.len());
            let mut im = Vec::with_capacity(weighted_f.len());
            for (x, wf) in rule.points().iter().zip(&weighted_f) {
                let a = atom.evaluate(&spectrum, x);
                re.push(wf.re * a);
                im.push(wf.im * a);
            }
            let c = Complex64::new(pairwise(&re), pairwise(&im));
            energy_terms.push(c.norm_sqr());
            rows.push(format!(
                "{},{},{},{:e},{:e}",
                j,
                i / orientations,
                i % orientations,
                c.re,
                c.im
            ));
        }
    }
    emit_table(Some(&args.out), "j,r,s,re,im", &rows)?;

    let energy = pairwise(&energy_terms);
    let norm_sq = f.norm_sq();
    // The coefficients carry the whole signal once every scale whose
    // band reaches the signal's degrees is included.
    let complete = n_f == 0 || args.j_cap >= frames::last_active_scale(n_f);
    let summary = json!({
        "command": "frame analyze",
        "d": d, "J": args.j_cap, "window": settings.window_label,
        "signal": signal_json,
        "coefficients": rows.len(),
        "coefficient_energy": energy,
        "signal_norm_sq": norm_sq,
        "all_scales_covered": complete,
        "out": args.out.display().to_string(),
    });
    println!("{summary}");
    println!(
        "analyze: {} coefficients across scales 0..={}; energy {:.6e} vs signal norm^2 {:.6e}{}",
        rows.len(),
        args.j_cap,
        energy,
        norm_sq,
        if complete { "" } else { " (band cap excludes some scales)" },
    );
    Ok(true)
}

fn run_verify_parseval(args: &VerifyParsevalArgs, settings: &Settings) -> Result<bool, Failure> {
    let d = resolve_d(args.d, settings)?;
    if args.trials == 0 {
        return Err(Failure::Usage("trials must be positive".into()));
    }
    let degree = if args.j_cap == 0 { 0 } else { 1u32 << (args.j_cap - 1) };
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut worst = 0.0f64;
    for _ in 0..args.trials {
        let f = HarmonicCoefficients::random(d, degree, &mut rng)?;
        let report = frames::parseval_defect(&f, &settings.window, settings.atom_cap)?;
        worst = worst.max(report.relative_defect);
    }
    let tolerance = 1e-8;
    let pass = worst < tolerance;
    let verdict = json!({
        "suite": "parseval",
        "d": d, "J": args.j_cap, "window": settings.window_label,
        "trials": args.trials, "signal_degree": degree,
        "max_relative_defect": worst, "tolerance": tolerance, "pass": pass,
    });
    Ok(emit_verdict(
        verdict,
        format!(
            "parseval: {} random degree-{} signals at d = {}: max relative defect {:.3e} \
             (tolerance {:.0e}): {}",
            args.trials,
            degree,
            d,
            worst,
            tolerance,
            if pass { "pass" } else { "FAIL" },
        ),
    ))
}

fn run_autocorr(args: &AutocorrArgs, settings: &Settings) -> Result<bool, Failure> {
    let d = resolve_d(args.d, settings)?;
    if args.samples < 2 {
        return Err(Failure::Usage("samples must be at least 2".into()));
    }
    let s = CurveletSpectrum::new(d, args.j, &settings.window)?;
    let rule = QuadratureRule::product_rule(d as usize, 2 * s.max_degree().max(1))?;
    let norm_sq = s.l2_norm_sq();
    let mut rows = Vec::with_capacity(args.samples);
    let mut worst = 0.0f64;
    for k in 0..args.samples {
        let angle = PI * k as f64 / (args.samples - 1) as f64;
        let h = autocorr::equatorial_rotation(d as usize, angle);
        let closed = autocorr::closed_form(&s, &h)?;
        let brute = autocorr::brute_force(&s, &h, &rule)?;
        worst = worst.max((closed - brute).abs() / norm_sq);
        let t = if d == 3 { angle } else { angle.cos() };
        rows.push(format!("{:e},{:e},{:e},{:e}", t, closed, brute, closed / norm_sq));
    }
    emit_table(args.out.as_deref(), "t,closed_form,brute_force,normalized", &rows)?;
    let tolerance = 1e-6;
    let pass = worst < tolerance;
    let verdict = json!({
        "suite": "autocorr",
        "d": d, "j": args.j, "window": settings.window_label,
        "samples": args.samples,
        "max_relative_error": worst, "tolerance": tolerance, "pass": pass,
        "out": args.out.as_ref().map(|p| p.display().to_string()),
    });
    Ok(emit_verdict(
        verdict,
        format!(
            "autocorr: closed form vs quadrature over {} orientations at d = {}, j = {}: \
             max relative error {:.3e} (tolerance {:.0e}): {}",
            args.samples,
            d,
            args.j,
            worst,
            tolerance,
            if pass { "pass" } else { "FAIL" },
        ),
    ))
}

fn run_scan(args: &ScanArgs, settings: &Settings) -> Result<bool, Failure> {
    let d = resolve_d(args.d, settings)?;
    if args.grid < 2 {
        return Err(Failure::Usage("grid must be at least 2".into()));
    }
    let sig = ZonalTestSignal::new(d, args.r, args.tau)?;
    let s = CurveletSpectrum::new(d, args.j, &settings.window)?;
    let scale = (2.0f64).powi(-(args.j as i32));
    let offsets: Vec<f64> = linspace(-6.0 * PI, 6.0 * PI, args.grid)
        .into_iter()
        .map(|u| u * scale)
        .collect();
    let grid = ScanGrid::new(offsets, vec![1.0, 0.95, 0.9]);
    let scan = edgelab::detection_scan(&s, &sig, &grid)?;
    let rows: Vec<String> = scan
        .points
        .iter()
        .map(|p| format!("{:e},{:e},{:e}", p.offset, p.z, p.coefficient))
        .collect();
    emit_table(Some(&args.out), "offset,z,coefficient", &rows)?;
    let peak = scan.peak();
    let summary = json!({
        "command": "edge scan",
        "d": d, "j": args.j, "r": args.r, "tau": args.tau,
        "window": settings.window_label,
        "rows": rows.len(),
        "peak": {"offset": peak.offset, "z": peak.z, "coefficient": peak.coefficient},
        "out": args.out.display().to_string(),
    });
    println!("{summary}");
    println!(
        "scan: {} samples; peak coefficient {:.6e} at offset {:.6e}, z = {}",
        rows.len(),
        peak.coefficient,
        peak.offset,
        peak.z,
    );
    Ok(true)
}

fn run_slopes(args: &SlopesArgs, settings: &Settings) -> Result<bool, Failure> {
    let d = resolve_d(args.d, settings)?;
    let sig = ZonalTestSignal::new(d, args.r, args.tau)?;
    let report = edgelab::asymptotic_report(&settings.window, &sig, args.jmin, args.jmax)?;

    let window_json = report.interval.as_ref().map(|i| {
        json!({
            "u_lo": i.u_lo, "u_hi": i.u_hi, "u_peak": i.u_peak,
            "floor": i.floor, "peak": i.peak, "scales": i.scales,
        })
    });
    let report_json = json!({
        "d": report.d, "tau": report.tau, "r": report.r,
        "window": settings.window_label,
        "sup_slope": {
            "fitted": report.slope.fitted,
            "predicted": report.slope.predicted,
            "points": report.slope.sups.iter().map(|&(j, v)| json!([j, v])).collect::<Vec<_>>(),
        },
        "certified_window": window_json,
        "offset_decay": {
            "scale": report.decay.scale,
            "fitted": report.decay.fitted,
            "window_smoothness": report.decay.window_smoothness,
        },
    });
    let text = serde_json::to_string_pretty(&report_json)
        .map_err(|e| Failure::Io(e.to_string()))?;
    fs::write(&args.out, text + "\n")?;

    let slope_ok = (report.slope.fitted - report.slope.predicted).abs()
        <= 0.1 * report.slope.predicted.abs();
    let window_found = report.interval.as_ref().map(|i| i.floor > 0.0).unwrap_or(false);
    let pass = slope_ok && window_found;
    let verdict = json!({
        "suite": "edge-slopes",
        "d": d, "tau": args.tau, "r": args.r,
        "scales": [args.jmin, args.jmax],
        "fitted_slope": report.slope.fitted,
        "predicted_slope": report.slope.predicted,
        "slope_within_tolerance": slope_ok,
        "certified_window_found": window_found,
        "pass": pass,
        "out": args.out.display().to_string(),
    });
    Ok(emit_verdict(
        verdict,
        format!(
            "slopes: fitted {:.3} vs predicted {:.3} over j = {}..{}; certified window {}: {}",
            report.slope.fitted,
            report.slope.predicted,
            args.jmin,
            args.jmax,
            if window_found { "found" } else { "missing" },
            if pass { "pass" } else { "FAIL" },
        ),
    ))
}

fn run_localization(args: &CheckArgs, settings: &Settings) -> Result<bool, Failure> {
    let d = resolve_d(args.d, settings)? as usize;
    if args.jmin < 1 || args.jmin >= args.jmax {
        return Err(Failure::Usage(format!(
            "need 1 <= jmin < jmax, got [{}, {}]",
            args.jmin, args.jmax
        )));
    }
    if args.grid < 2 || args.exponents.is_empty() {
        return Err(Failure::Usage("grid must be >= 2 and exponents nonempty".into()));
    }
    let mut growth = serde_json::Map::new();
    let mut pass = true;
    let mut human = String::new();
    for &q in &args.exponents {
        let mut maxima = Vec::new();
        for j in args.jmin..=args.jmax {
            let s = CurveletSpectrum::new(d as u32, j, &settings.window)?;
            let mut worst = 0.0f64;
            for ir in 0..=20 {
                let rho = ir as f64 / 20.0;
                for it in 0..=args.grid {
                    let theta = -PI + 2.0 * PI * it as f64 / args.grid as f64;
                    // Any off-plane mass sits on one idle axis; the
                    // ratio only sees (rho, theta).
                    let mut coords = vec![0.0; d];
                    coords[0] = (1.0 - rho * rho).max(0.0).sqrt();
                    coords[d - 2] = rho * theta.sin();
                    coords[d - 1] = rho * theta.cos();
                    let x = SpherePoint::from_unnormalized(coords)?;
                    worst = worst.max(s.localization_ratio(&x, q));
                }
            }
            maxima.push(worst);
        }
        let ratio = maxima[maxima.len() - 1] / maxima[0];
        pass &= ratio < 2.0;
        growth.insert(format!("q={q}"), json!(ratio));
        human.push_str(&format!("q = {q}: growth {ratio:.3}; "));
    }
    let verdict = json!({
        "suite": "localization",
        "d": d, "window": settings.window_label,
        "scales": [args.jmin, args.jmax],
        "exponents": args.exponents,
        "max_ratio_growth": growth,
        "threshold": 2.0,
        "pass": pass,
    });
    Ok(emit_verdict(
        verdict,
        format!(
            "localization: {human}ratio of max at j = {} to j = {} must stay below 2: {}",
            args.jmax,
            args.jmin,
            if pass { "pass" } else { "FAIL" },
        ),
    ))
}

fn run_selftest(args: &SelftestArgs, settings: &Settings) -> Result<bool, Failure> {
    let d = resolve_d(args.d, settings)?;
    let mut all = true;
    let mut names = Vec::new();

    let record = |name: &'static str,
                      pass: bool,
                      detail: String,
                      extra: serde_json::Value,
                      all: &mut bool,
                      names: &mut Vec<&'static str>| {
        let mut verdict = json!({"suite": name, "d": d, "pass": pass});
        if let Some(map) = verdict.as_object_mut() {
            if let Some(em) = extra.as_object() {
                for (k, v) in em {
                    map.insert(k.clone(), v.clone());
                }
            }
        }
        println!("{verdict}");
        println!("selftest {name}: {detail}: {}", if pass { "pass" } else { "FAIL" });
        *all &= pass;
        names.push(name);
    };

    // Window admissibility: both window kinds, regardless of selection.
    {
        let mut worst = 0.0f64;
        for kind in [WindowKind::SmoothBump, WindowKind::Spline { q: 3 }] {
            worst = worst.max(admissibility_defect(&WindowPair::new(kind), 1024));
        }
        record(
            "admissibility",
            worst < 1e-12,
            format!("max band-telescoping defect {worst:.3e} for n <= 1024 (tolerance 1e-12)"),
            json!({"max_defect": worst, "tolerance": 1e-12}),
            &mut all,
            &mut names,
        );
    }

    // Quadrature exactness: sampled moments and Gram entries.
    {
        let degree = if args.quick { 16 } else { 32 };
        let rule = QuadratureRule::product_rule(d as usize, degree)?;
        let mut rng = ChaCha8Rng::seed_from_u64(settings.seed ^ 0x51);
        let mut sampled = Vec::new();
        for _ in 0..8 {
            let n = rng.gen_range(0..=degree / 2);
            let all_n = harmonics::enumerate_indices(d, n);
            sampled.push(all_n[rng.gen_range(0..all_n.len())].clone());
        }
        let mut worst = 0.0f64;
        for idx in &sampled {
            let moment = rule.integrate_complex(|x| harmonics::evaluate(idx, x));
            let want = if idx.n() == 0 { 1.0 } else { 0.0 };
            worst = worst.max((moment - want).norm());
        }
        for (a, ia) in sampled.iter().enumerate() {
            for ib in sampled.iter().skip(a) {
                let gram = rule.integrate_complex(|x| {
                    harmonics::evaluate(ia, x) * harmonics::evaluate(ib, x).conj()
                });
                let want = if ia == ib { 1.0 } else { 0.0 };
                worst = worst.max((gram - want).norm());
            }
        }
        record(
            "quadrature-exactness",
            worst < 1e-12,
            format!("max moment/Gram error {worst:.3e} at exact degree {degree} (tolerance 1e-12)"),
            json!({"degree": degree, "max_error": worst, "tolerance": 1e-12}),
            &mut all,
            &mut names,
        );
    }

    // Addition theorem at random point pairs.
    {
        let n_max = if args.quick { 8u32 } else { 16 };
        let mut rng = ChaCha8Rng::seed_from_u64(settings.seed ^ 0xA3);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let x = random_sphere_point(&mut rng, d as usize);
            let y = random_sphere_point(&mut rng, d as usize);
            let t = x.dot(&y);
            for n in 0..=n_max {
                let terms: Vec<f64> = harmonics::enumerate_indices(d, n)
                    .iter()
                    .map(|idx| {
                        (harmonics::evaluate(idx, &x) * harmonics::evaluate(idx, &y).conj()).re
                    })
                    .collect();
                worst = worst.max((pairwise(&terms) - harmonics::addition_kernel(d, n, t)).abs());
            }
        }
        record(
            "addition-theorem",
            worst < 1e-10,
            format!("max residual {worst:.3e} for n <= {n_max}, 20 point pairs (tolerance 1e-10)"),
            json!({"degree": n_max, "pairs": 20, "max_residual": worst, "tolerance": 1e-10}),
            &mut all,
            &mut names,
        );
    }

    if !args.quick {
        // Frame energy conservation at a desk-sized scale cap.
        {
            let j_cap = match d {
                3 => 3,
                4 => 2,
                _ => 1,
            };
            let degree = 1u32 << (j_cap - 1);
            let mut rng = ChaCha8Rng::seed_from_u64(settings.seed ^ 0xC7);
            let mut worst = 0.0f64;
            for _ in 0..3 {
                let f = HarmonicCoefficients::random(d, degree, &mut rng)?;
                let report = frames::parseval_defect(&f, &settings.window, settings.atom_cap)?;
                worst = worst.max(report.relative_defect);
            }
            record(
                "parseval",
                worst < 1e-8,
                format!(
                    "max relative defect {worst:.3e} for 3 degree-{degree} signals (tolerance 1e-8)"
                ),
                json!({"J": j_cap, "trials": 3, "max_relative_defect": worst, "tolerance": 1e-8}),
                &mut all,
                &mut names,
            );
        }

        // Auto-correlation closed form against quadrature.
        {
            let j = if d == 3 { 3 } else { 2 };
            let s = CurveletSpectrum::new(d, j, &settings.window)?;
            let rule = QuadratureRule::product_rule(d as usize, 2 * s.max_degree())?;
            let norm_sq = s.l2_norm_sq();
            let mut worst = 0.0f64;
            for k in 0..8 {
                let h = autocorr::equatorial_rotation(d as usize, PI * k as f64 / 7.0);
                let closed = autocorr::closed_form(&s, &h)?;
                let brute = autocorr::brute_force(&s, &h, &rule)?;
                worst = worst.max((closed - brute).abs() / norm_sq);
            }
            record(
                "autocorr",
                worst < 1e-6,
                format!("max relative error {worst:.3e} over 8 orientations at j = {j} (tolerance 1e-6)"),
                json!({"j": j, "samples": 8, "max_relative_error": worst, "tolerance": 1e-6}),
                &mut all,
                &mut names,
            );
        }

        // Edge-signal coefficients: closed form against the 1-D oracle.
        {
            let mut worst = 0.0f64;
            for tau in [0u32, 1] {
                let sig = ZonalTestSignal::new(d, PI / 3.0, tau)?;
                let closed: Vec<f64> = (0..=80).map(|n| sig.coefficient(n)).collect();
                let peak = closed.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                for (n, &c) in closed.iter().enumerate() {
                    worst = worst.max((c - sig.coefficient_oracle(n as u32)).abs() / peak);
                }
            }
            record(
                "signal-coefficients",
                worst < 1e-10,
                format!("max relative error {worst:.3e} for n <= 80, tau in 0..1 (tolerance 1e-10)"),
                json!({"degree": 80, "max_relative_error": worst, "tolerance": 1e-10}),
                &mut all,
                &mut names,
            );
        }
    }

    let summary = json!({
        "suite": "selftest",
        "d": d, "quick": args.quick, "window": settings.window_label,
        "suites": names, "pass": all,
    });
    println!("{summary}");
    println!(
        "selftest: {} suites at d = {}: {}",
        names.len(),
        d,
        if all { "all pass" } else { "FAILURES" },
    );
    Ok(all)
}

fn random_sphere_point(rng: &mut ChaCha8Rng, d: usize) -> SpherePoint {
    loop {
        let coords: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if coords.iter().map(|c| c * c).sum::<f64>() > 0.1 {
            return SpherePoint::from_unnormalized(coords).expect("nonzero vector normalizes");
        }
    }
}
