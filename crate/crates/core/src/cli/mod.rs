//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a verification report fails, 2 on usage,
//! spec or domain errors.

mod report;
mod spec;

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::acceptance;
use crate::circle::{sample, BoundarySpec, UnitGridFunction};
use crate::density::{fit_curve, FitOptions};
use crate::error::Error;
use crate::extend::{bidisk_extend, bidisk_extend_quadrature, poisson_extend, reproduce_interior, HoloSpec};
use crate::kernel::{verify_kernel_properties, DiskPoint};
use crate::trace::{
    approx_identity_curve, default_testpoints, geometric_radii, isometry_report, product_trace_residual,
    radial_trace_with, DiskGrid, TraceOptions, TraceSource,
};

pub use report::{machine, plain, Format};
pub use spec::FunctionSpec;

use report::{Cell, Report, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "poisson-trace", version, about = "Poisson extensions, boundary traces and kernel checks on the unit disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check positivity, evenness, monotonicity, unit mean and tail decay of P_r
    KernelVerify(KernelVerifyArgs),
    /// Evaluate the Poisson extension of boundary data at interior points
    Extend(ExtendArgs),
    /// Reconstruct f(z) from boundary or dilated values of a holomorphic f
    Reproduce(ReproduceArgs),
    /// Radial trace of a holomorphic or harmonic function with its isometry report
    Trace(TraceArgs),
    /// Check that traces of products are products of traces
    Homomorphism(HomomorphismArgs),
    /// L1 error of P_r * g against g as r grows
    ApproxIdentity(ApproxIdentityArgs),
    /// L1 fit of boundary data by Poisson kernels at equiangular nodes
    DensityFit(DensityFitArgs),
    /// Poisson extension of torus data to the bidisk
    Bidisk(BidiskArgs),
    /// Run the full acceptance suite
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Args)]
struct SpecArgs {
    /// Inline JSON function spec
    #[arg(long)]
    spec: Option<String>,
    /// Path to a JSON function spec
    #[arg(long)]
    spec_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    /// Write the report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    format: Format,
}

#[derive(Debug, Args)]
struct KernelVerifyArgs {
    /// Kernel radius in [0, 1)
    #[arg(long, default_value_t = 0.5)]
    r: f64,
    /// Tail cutoff for property v, in (0, pi)
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    /// Grid size (at least 16)
    #[arg(long, default_value_t = 4096, value_parser = parse_grid)]
    n: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ExtendArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Interior point in polar form "r,sigma"; repeatable
    #[arg(long, value_parser = parse_point)]
    z: Vec<DiskPoint>,
    /// Also evaluate at every grid angle on this radius
    #[arg(long)]
    grid_radius: Option<f64>,
    /// Boundary grid size for data without an exact spectrum
    #[arg(long, default_value_t = 4096, value_parser = parse_grid)]
    n: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Interior point "r,sigma"; repeatable [default: 5 radii up to 0.9 times 8 angles]
    #[arg(long, value_parser = parse_point)]
    z: Vec<DiskPoint>,
    /// Dilation radius in (|z|, 1]
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, default_value_t = 4096, value_parser = parse_grid)]
    n: usize,
    /// Largest accepted residual
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct TraceArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Radii as "a,b,c" or "geometric:<count>" for 1 - 2^-k
    #[arg(long, default_value = "geometric:14", value_parser = parse_radii)]
    radii: Radii,
    #[arg(long, default_value_t = 4096, value_parser = parse_grid)]
    n: usize,
    /// Extrapolate the last two dilates to r = 1
    #[arg(long)]
    richardson: bool,
    /// Outermost radius of the disk grid in the isometry report [default: last radius]
    #[arg(long)]
    r_max: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct HomomorphismArgs {
    /// Inline JSON spec; give exactly two [default: built-in catalogue of 20 pairs]
    #[arg(long)]
    spec: Vec<String>,
    /// Spec file; give exactly two
    #[arg(long)]
    spec_file: Vec<PathBuf>,
    #[arg(long, default_value_t = 1024, value_parser = parse_grid)]
    n: usize,
    /// Largest accepted residual
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ApproxIdentityArgs {
    /// Boundary data [default: step, 1 on [-pi/2, pi/2) and -1 elsewhere]
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value = "0.9,0.99,0.999", value_parser = parse_radii)]
    radii: Radii,
    #[arg(long, default_value_t = 65536, value_parser = parse_grid)]
    n: usize,
    /// Required bound on the last error [default: none]
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct DensityFitArgs {
    /// Target data [default: step, 1 on [-pi/2, pi/2) and -1 elsewhere]
    #[command(flatten)]
    spec: SpecArgs,
    /// Increasing node counts, comma separated
    #[arg(long, default_value = "8,16,32,64", value_parser = parse_counts)]
    counts: Counts,
    /// Radius of the equiangular nodes
    #[arg(long, default_value_t = 0.95)]
    r_node: f64,
    #[arg(long, default_value_t = 8192, value_parser = parse_grid)]
    n: usize,
    /// Fit real coefficients to the real part of the target
    #[arg(long)]
    real: bool,
    /// Iteration cap of the reweighted least squares solver
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    /// Required bound on the last residual [default: none]
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct BidiskArgs {
    /// trig2d spec
    #[command(flatten)]
    spec: SpecArgs,
    /// First coordinate "r,sigma"
    #[arg(long, value_parser = parse_point)]
    z1: DiskPoint,
    /// Second coordinate "r,sigma"
    #[arg(long, value_parser = parse_point)]
    z2: DiskPoint,
    /// Cross-check against an n x n quadrature [default: off]
    #[arg(long, value_parser = parse_grid)]
    check_n: Option<usize>,
    /// Largest accepted quadrature gap
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq)]
struct Radii(Vec<f64>);

#[derive(Debug, Clone, PartialEq)]
struct Counts(Vec<usize>);

fn parse_grid(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("{s:?} is not a grid size"))?;
    if n < 2 {
        return Err(format!("grid size must be at least 2, got {n}"));
    }
    Ok(n)
}

fn parse_point(s: &str) -> Result<DiskPoint, String> {
    let (r, sigma) = s
        .split_once(',')
        .ok_or_else(|| format!("expected \"r,sigma\", got {s:?}"))?;
    let r = f64::from_str(r.trim()).map_err(|_| format!("bad radius {r:?}"))?;
    let sigma = f64::from_str(sigma.trim()).map_err(|_| format!("bad angle {sigma:?}"))?;
    DiskPoint::new(r, sigma).map_err(|e| e.to_string())
}

fn parse_radii(s: &str) -> Result<Radii, String> {
    let radii = if let Some(count) = s.strip_prefix("geometric:") {
        let count: usize = count.trim().parse().map_err(|_| format!("bad count {count:?}"))?;
        if count == 0 {
            return Err("geometric schedule needs a positive count".into());
        }
        geometric_radii(count)
    } else {
        s.split(',')
            .map(|p| f64::from_str(p.trim()).map_err(|_| format!("bad radius {p:?}")))
            .collect::<Result<Vec<_>, _>>()?
    };
    if radii.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
        return Err("radii must lie in (0, 1)".into());
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err("radii must be strictly increasing".into());
    }
    Ok(Radii(radii))
}

fn parse_counts(s: &str) -> Result<Counts, String> {
    let counts = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| format!("bad node count {p:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    if counts.first() == Some(&0) || counts.windows(2).any(|w| w[1] <= w[0]) {
        return Err("node counts must be positive and strictly increasing".into());
    }
    Ok(Counts(counts))
}

/// Where a function spec comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecSource {
    Inline(String),
    File(PathBuf),
}

impl SpecSource {
    fn from_args(inline: Option<String>, file: Option<PathBuf>) -> Result<Option<Self>, Failure> {
        match (inline, file) {
            (Some(_), Some(_)) => Err(Failure::usage("give either --spec or --spec-file, not both")),
            (Some(s), None) => Ok(Some(SpecSource::Inline(s))),
            (None, Some(p)) => Ok(Some(SpecSource::File(p))),
            (None, None) => Ok(None),
        }
    }

    pub fn load(&self) -> Result<FunctionSpec, String> {
        let text = match self {
            SpecSource::Inline(s) => s.clone(),
            SpecSource::File(p) => std::fs::read_to_string(p)
                .map_err(|e| format!("cannot read spec file {}: {e}", p.display()))?,
        };
        FunctionSpec::parse(&text)
    }
}

/// The settings shared by every subcommand, validated once.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: &'static str,
    pub spec: Option<SpecSource>,
    pub n: Option<usize>,
    pub radii: Option<Vec<f64>>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if let Some(n) = self.n {
            if n < 2 {
                return Err(format!("grid size must be at least 2, got {n}"));
            }
        }
        if let Some(radii) = &self.radii {
            if radii.iter().any(|r| !(*r > 0.0 && *r < 1.0)) || radii.windows(2).any(|w| w[1] <= w[0]) {
                return Err("radii must be increasing inside (0, 1)".into());
            }
        }
        if let Some(tol) = self.tol {
            if tol.is_nan() || tol < 0.0 {
                return Err(format!("tolerance must be nonnegative, got {tol}"));
            }
        }
        Ok(())
    }

    fn spec(&self) -> Result<Option<FunctionSpec>, Failure> {
        self.spec.as_ref().map(|s| s.load().map_err(Failure::Usage)).transpose()
    }

    fn require_spec(&self) -> Result<FunctionSpec, Failure> {
        self.spec()?
            .ok_or_else(|| Failure::usage(format!("{} needs --spec or --spec-file", self.command)))
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    /// A check failed inside the library, e.g. the maximum modulus diagnostic.
    Verification(String),
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure::Usage(msg.into())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::MaximumModulus { .. } => Failure::Verification(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn config(command: &'static str, output: &OutputArgs) -> RunConfig {
    RunConfig {
        command,
        spec: None,
        n: None,
        radii: None,
        tol: None,
        out: output.out.clone(),
        format: output.format,
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return e.exit_code();
        }
    };
    let (cfg, result) = dispatch(cli.command);
    let report = match result {
        Ok(report) => report,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
        Err(Failure::Verification(msg)) => {
            let _ = writeln!(err, "verification failed: {msg}");
            return EXIT_FAILED;
        }
    };
    let text = report.render(cfg.format);
    let written = match &cfg.out {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => out.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    if report.passed {
        EXIT_OK
    } else {
        let _ = writeln!(
            err,
            "verification failed: {}",
            report.failure.as_deref().unwrap_or("report not passed")
        );
        if cfg.out.is_some() || cfg.format == Format::Plain {
            let _ = err.write_all(report.without_samples().render(Format::Json).as_bytes());
        }
        EXIT_FAILED
    }
}

fn dispatch(command: Command) -> (RunConfig, Result<Report, Failure>) {
    match command {
        Command::KernelVerify(a) => {
            let mut cfg = config("kernel-verify", &a.output);
            cfg.n = Some(a.n);
            execute(cfg, Ok(()), &a, kernel_verify)
        }
        Command::Extend(a) => {
            let mut cfg = config("extend", &a.output);
            cfg.n = Some(a.n);
            let spec = load_spec_source(&mut cfg, &a.spec);
            execute(cfg, spec, &a, extend)
        }
        Command::Reproduce(a) => {
            let mut cfg = config("reproduce", &a.output);
            cfg.n = Some(a.n);
            cfg.tol = Some(a.tol);
            let spec = load_spec_source(&mut cfg, &a.spec);
            execute(cfg, spec, &a, reproduce)
        }
        Command::Trace(a) => {
            let mut cfg = config("trace", &a.output);
            cfg.n = Some(a.n);
            cfg.radii = Some(a.radii.0.clone());
            let spec = load_spec_source(&mut cfg, &a.spec);
            execute(cfg, spec, &a, trace)
        }
        Command::Homomorphism(a) => {
            let mut cfg = config("homomorphism", &a.output);
            cfg.n = Some(a.n);
            cfg.tol = Some(a.tol);
            execute(cfg, Ok(()), &a, homomorphism)
        }
        Command::ApproxIdentity(a) => {
            let mut cfg = config("approx-identity", &a.output);
            cfg.n = Some(a.n);
            cfg.radii = Some(a.radii.0.clone());
            cfg.tol = a.tol;
            let spec = load_spec_source(&mut cfg, &a.spec);
            execute(cfg, spec, &a, approx_identity)
        }
        Command::DensityFit(a) => {
            let mut cfg = config("density-fit", &a.output);
            cfg.n = Some(a.n);
            cfg.tol = a.tol;
            let spec = load_spec_source(&mut cfg, &a.spec);
            execute(cfg, spec, &a, density_fit)
        }
        Command::Bidisk(a) => {
            let mut cfg = config("bidisk", &a.output);
            cfg.n = a.check_n;
            cfg.tol = Some(a.tol);
            let spec = load_spec_source(&mut cfg, &a.spec);
            execute(cfg, spec, &a, bidisk)
        }
        Command::Selftest(a) => execute(config("selftest", &a.output), Ok(()), &a, selftest),
    }
}

fn load_spec_source(cfg: &mut RunConfig, args: &SpecArgs) -> Result<(), Failure> {
    cfg.spec = SpecSource::from_args(args.spec.clone(), args.spec_file.clone())?;
    Ok(())
}

fn execute<A>(
    cfg: RunConfig,
    setup: Result<(), Failure>,
    args: &A,
    command: fn(&RunConfig, &A) -> Result<Report, Failure>,
) -> (RunConfig, Result<Report, Failure>) {
    let result = setup
        .and_then(|_| cfg.validate().map_err(Failure::Usage))
        .and_then(|_| command(&cfg, args));
    (cfg, result)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn default_step() -> BoundarySpec {
    BoundarySpec::Step {
        breaks: vec![-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2],
        values: vec![c(1.0, 0.0), c(-1.0, 0.0)],
    }
}

fn boundary_grid(cfg: &RunConfig, n: usize) -> Result<UnitGridFunction, Failure> {
    let spec = match cfg.spec()? {
        Some(s) => s.to_boundary().map_err(Failure::Usage)?,
        None => default_step(),
    };
    Ok(sample(&spec, n)?)
}

fn holo(spec: &FunctionSpec) -> Result<HoloSpec, Failure> {
    let f = spec.to_holo().map_err(Failure::Usage)?;
    f.validate()?;
    Ok(f)
}

fn point_cells(z: DiskPoint) -> Vec<Cell> {
    vec![z.r().into(), z.sigma().into()]
}

fn kernel_verify(cfg: &RunConfig, a: &KernelVerifyArgs) -> Result<Report, Failure> {
    let reports = verify_kernel_properties(a.r, a.delta, a.n)?;
    let mut report = Report::new(cfg.command);
    let mut table = Table::new(
        "properties",
        &["property", "description", "value", "max_violation", "tolerance", "passed"],
    );
    for p in &reports {
        table.push(vec![
            p.property.label().into(),
            p.property.description().into(),
            p.value.into(),
            p.max_violation.into(),
            p.tolerance.into(),
            p.passed.into(),
        ]);
        if !p.passed {
            report.fail(format!("property {} violated by {:e}", p.property.label(), p.max_violation));
        }
    }
    report.tables.push(table);
    report.attach("r", &a.r);
    report.attach("delta", &a.delta);
    report.attach("n", &a.n);
    Ok(report)
}

fn extend(cfg: &RunConfig, a: &ExtendArgs) -> Result<Report, Failure> {
    let spec = cfg.require_spec()?;
    let mut points = a.z.clone();
    if let Some(r) = a.grid_radius {
        for k in 0..a.n {
            points.push(DiskPoint::new(r, crate::circle::grid_angle(k, a.n))?);
        }
    }
    if points.is_empty() {
        return Err(Failure::usage("extend needs --z or --grid-radius"));
    }
    let values: Vec<Complex64> = match spec.to_spectral() {
        Some(spectrum) => {
            let spectrum = spectrum.map_err(Failure::Usage)?;
            points.iter().map(|&z| poisson_extend(&spectrum, z)).collect::<Result<_, _>>()?
        }
        None => {
            let grid = sample(&spec.to_boundary().map_err(Failure::Usage)?, a.n)?;
            points.iter().map(|&z| poisson_extend(&grid, z)).collect::<Result<_, _>>()?
        }
    };
    let mut report = Report::new(cfg.command);
    let mut table = Table::new("values", &["r", "sigma", "re", "im"]);
    for (z, v) in points.iter().zip(&values) {
        let mut row = point_cells(*z);
        row.extend([v.re.into(), v.im.into()]);
        table.push(row);
    }
    report.tables.push(table);
    if values.len() == 1 {
        report.scalar = Some(values[0]);
    }
    Ok(report)
}

fn reproduce(cfg: &RunConfig, a: &ReproduceArgs) -> Result<Report, Failure> {
    let f = holo(&cfg.require_spec()?)?;
    let points = if a.z.is_empty() { default_testpoints() } else { a.z.clone() };
    let mut report = Report::new(cfg.command);
    let mut table = Table::new(
        "residuals",
        &["r", "sigma", "exact_re", "exact_im", "integral_re", "integral_im", "residual"],
    );
    let mut worst = 0.0_f64;
    for z in points {
        let rep = reproduce_interior(&f, z, a.rho, a.n)?;
        let mut row = point_cells(z);
        row.extend([
            rep.exact.re.into(),
            rep.exact.im.into(),
            rep.integral.re.into(),
            rep.integral.im.into(),
            rep.residual.into(),
        ]);
        table.push(row);
        worst = worst.max(rep.residual);
    }
    report.tables.push(table);
    if worst.is_nan() || worst > a.tol {
        report.fail(format!("max residual {worst:e} exceeds {:e}", a.tol));
    }
    Ok(report)
}

fn trace(cfg: &RunConfig, a: &TraceArgs) -> Result<Report, Failure> {
    let spec = cfg.require_spec()?;
    let opts = TraceOptions { richardson: a.richardson };
    let holo_fn = match &spec {
        FunctionSpec::Trig { .. } => None,
        other => Some(holo(other)?),
    };
    let harmonic = match (&holo_fn, spec.to_spectral()) {
        (None, Some(s)) => Some(s.map_err(Failure::Usage)?),
        _ => None,
    };
    let source: TraceSource = match (&holo_fn, &harmonic) {
        (Some(f), _) => f.into(),
        (None, Some(h)) => h.into(),
        (None, None) => return Err(Failure::usage("trace needs a holomorphic or trig spec")),
    };
    let result = radial_trace_with(source, &a.radii.0, a.n, opts)?;
    let mut report = Report::new(cfg.command);
    let mut radii = Table::new("radii", &["r", "sup_norm", "cauchy_gap"]);
    for (i, r) in result.radii.iter().enumerate() {
        let gap = if i == 0 { Cell::Empty } else { result.cauchy_gaps[i - 1].into() };
        radii.push(vec![(*r).into(), result.sup_norms[i].into(), gap]);
    }
    report.tables.push(radii);
    if let Some(f) = &holo_fn {
        let r_max = a.r_max.unwrap_or(result.radii[result.radii.len() - 1]);
        let grid = DiskGrid { angles: a.n, ..DiskGrid::with_r_max(r_max) };
        let iso = isometry_report(f, &result.trace, grid)?;
        let mut table = Table::new("isometry", &["sup_disk", "sup_circle", "contraction_holds", "tolerance"]);
        table.push(vec![
            iso.sup_disk.into(),
            iso.sup_circle.into(),
            iso.contraction_holds.into(),
            iso.tolerance.into(),
        ]);
        report.tables.push(table);
        if !iso.contraction_holds {
            report.fail(format!(
                "disk sup {} exceeds circle sup {} by more than {:e}",
                iso.sup_disk, iso.sup_circle, iso.tolerance
            ));
        }
    }
    let mut samples = Table::new("trace", &["t", "re", "im"]);
    samples.machine_only = true;
    for (t, v) in result.trace.angles().zip(result.trace.samples()) {
        samples.push(vec![t.into(), v.re.into(), v.im.into()]);
    }
    report.tables.push(samples);
    report.attach("extrapolated", &result.extrapolated);
    Ok(report)
}

fn homomorphism(cfg: &RunConfig, a: &HomomorphismArgs) -> Result<Report, Failure> {
    let pairs: Vec<(HoloSpec, HoloSpec)> = match (a.spec.len(), a.spec_file.len()) {
        (0, 0) => acceptance::homomorphism_catalogue(),
        (2, 0) | (0, 2) => {
            let sources: Vec<SpecSource> = if a.spec.is_empty() {
                a.spec_file.iter().cloned().map(SpecSource::File).collect()
            } else {
                a.spec.iter().cloned().map(SpecSource::Inline).collect()
            };
            let f = holo(&sources[0].load().map_err(Failure::Usage)?)?;
            let g = holo(&sources[1].load().map_err(Failure::Usage)?)?;
            vec![(f, g)]
        }
        (s, 0) | (0, s) => return Err(Failure::usage(format!("homomorphism takes two specs, got {s}"))),
        _ => return Err(Failure::usage("give either --spec or --spec-file, not both")),
    };
    let mut report = Report::new(cfg.command);
    let mut table = Table::new("pairs", &["pair", "residual", "passed"]);
    for (i, (f, g)) in pairs.iter().enumerate() {
        let residual = product_trace_residual(f, g, a.n)?;
        let ok = residual <= a.tol;
        table.push(vec![i.into(), residual.into(), ok.into()]);
        if !ok {
            report.fail(format!("pair {i} residual {residual:e} exceeds {:e}", a.tol));
        }
    }
    report.tables.push(table);
    Ok(report)
}

fn approx_identity(cfg: &RunConfig, a: &ApproxIdentityArgs) -> Result<Report, Failure> {
    let g = boundary_grid(cfg, a.n)?;
    let curve = approx_identity_curve(&g, &a.radii.0)?;
    let mut report = Report::new(cfg.command);
    let mut table = Table::new("curve", &["r", "l1_error"]);
    for (r, e) in a.radii.0.iter().zip(&curve) {
        table.push(vec![(*r).into(), (*e).into()]);
    }
    report.tables.push(table);
    if curve.windows(2).any(|w| w[1] >= w[0]) {
        report.fail("error curve is not strictly decreasing");
    }
    if let (Some(tol), Some(last)) = (a.tol, curve.last()) {
        if last.is_nan() || *last >= tol {
            report.fail(format!("last error {last:e} not below {tol:e}"));
        }
    }
    Ok(report)
}

fn density_fit(cfg: &RunConfig, a: &DensityFitArgs) -> Result<Report, Failure> {
    let target = boundary_grid(cfg, a.n)?;
    let opts = FitOptions {
        max_iter: a.max_iter,
        real_coefficients: a.real,
        ..FitOptions::default()
    };
    let fits = fit_curve(&target, &a.counts.0, a.r_node, &opts)?;
    let mut report = Report::new(cfg.command);
    let mut table = Table::new("fits", &["nodes", "residual_l1", "iterations", "converged"]);
    for fit in &fits {
        table.push(vec![
            fit.nodes.len().into(),
            fit.residual_l1.into(),
            fit.iterations.into(),
            fit.converged.into(),
        ]);
    }
    report.tables.push(table);
    if fits.windows(2).any(|w| w[1].residual_l1 > w[0].residual_l1 + 1e-8) {
        report.fail("residuals increased between nested node sets");
    }
    if let (Some(tol), Some(last)) = (a.tol, fits.last()) {
        if last.residual_l1.is_nan() || last.residual_l1 >= tol {
            report.fail(format!("last residual {:e} not below {tol:e}", last.residual_l1));
        }
    }
    report.attach("results", &fits);
    Ok(report)
}

fn bidisk(cfg: &RunConfig, a: &BidiskArgs) -> Result<Report, Failure> {
    let spec = cfg.require_spec()?.to_bidisk().map_err(Failure::Usage)?;
    let value = bidisk_extend(&spec, a.z1, a.z2)?;
    let mut report = Report::new(cfg.command);
    let mut table = Table::new("point", &["r1", "sigma1", "r2", "sigma2", "re", "im"]);
    let mut row = point_cells(a.z1);
    row.extend(point_cells(a.z2));
    row.extend([value.re.into(), value.im.into()]);
    table.push(row);
    report.tables.push(table);
    report.scalar = Some(value);
    if let Some(n) = a.check_n {
        let quad = bidisk_extend_quadrature(&spec, a.z1, a.z2, n, n)?;
        let gap = (quad - value).norm();
        let mut check = Table::new("quadrature", &["n", "re", "im", "gap", "passed"]);
        check.push(vec![n.into(), quad.re.into(), quad.im.into(), gap.into(), (gap <= a.tol).into()]);
        report.tables.push(check);
        report.scalar = None;
        if gap.is_nan() || gap > a.tol {
            report.fail(format!("quadrature gap {gap:e} exceeds {:e}", a.tol));
        }
    }
    Ok(report)
}

fn selftest(cfg: &RunConfig, _: &SelftestArgs) -> Result<Report, Failure> {
    let outcomes = acceptance::run_all();
    let mut report = Report::new(cfg.command);
    let mut table = Table::new("criteria", &["id", "name", "passed", "seconds", "budget", "detail"]);
    for o in &outcomes {
        table.push(vec![
            (o.id as usize).into(),
            o.name.into(),
            o.passed.into(),
            o.elapsed.as_secs_f64().into(),
            o.budget.as_secs_f64().into(),
            o.detail.clone().into(),
        ]);
    }
    report.tables.push(table);
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed && o.id != acceptance::AGGREGATE_ID)
        .map(|o| format!("criterion {} ({})", o.id, o.name))
        .collect();
    let total = outcomes.len();
    let passed = outcomes.iter().filter(|o| o.passed).count();
    report.attach("summary", &format!("{passed} of {total} criteria passed"));
    if let Some(agg) = outcomes.last().filter(|o| !o.passed) {
        if failed.is_empty() {
            report.fail(agg.detail.clone());
        } else {
            report.fail(failed.join(", "));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("poisson-trace").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn parsers() {
        assert_eq!(parse_radii("0.5, 0.9").unwrap(), Radii(vec![0.5, 0.9]));
        assert_eq!(parse_radii("geometric:2").unwrap(), Radii(vec![0.5, 0.75]));
        assert!(parse_radii("0.9,0.5").is_err());
        assert!(parse_radii("0.5,1.0").is_err());
        assert!(parse_grid("1").is_err());
        assert!(parse_point("0.5").is_err());
        assert!(parse_point("1.5,0").is_err());
        assert_eq!(parse_counts("1,2,4").unwrap(), Counts(vec![1, 2, 4]));
        assert!(parse_counts("2,2").is_err());
    }

    #[test]
    fn extend_constant_prints_one() {
        let (code, out, _) = run_str(&["extend", "--spec", r#"{"type":"trig","coeffs":{"0":[1,0]}}"#, "--z", "0.7,0.0"]);
        assert_eq!(code, 0);
        assert_eq!(out, "1.0\n");
    }

    #[test]
    fn kernel_verify_table() {
        let (code, out, _) = run_str(&["kernel-verify", "--r", "0.5", "--delta", "0.5", "--n", "4096", "--format", "csv"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 6);
        let iv: Vec<&str> = lines[4].split(',').collect();
        assert_eq!(iv[0], "iv");
        assert!(iv[3].parse::<f64>().unwrap() <= 1e-12);
    }

    #[test]
    fn both_spec_sources_rejected() {
        let (code, _, err) = run_str(&[
            "extend", "--spec", r#"{"type":"trig","coeffs":{"0":[1,0]}}"#, "--spec-file", "x.json", "--z", "0.1,0",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("--spec-file"));
    }

    #[test]
    fn usage_and_domain_errors_exit_two() {
        assert_eq!(run_str(&["kernel-verify", "--r", "1.5"]).0, 2);
        assert_eq!(run_str(&["nonsense"]).0, 2);
        assert_eq!(run_str(&["extend", "--spec", "{", "--z", "0.1,0"]).0, 2);
        assert_eq!(run_str(&["trace", "--spec", r#"{"type":"blaschke","zeros":[[1.2,0]]}"#]).0, 2);
        assert_eq!(run_str(&["--help"]).0, 0);
    }

    #[test]
    fn verification_failure_exits_one() {
        let (code, _, err) = run_str(&[
            "reproduce", "--spec", r#"{"type":"taylor","coeffs":[[0,0],[1,0]]}"#, "--n", "2", "--z", "0.9,0.3",
        ]);
        assert_eq!(code, 1);
        assert!(err.contains("residual"));
    }

    #[test]
    fn run_config_validation() {
        let mut cfg = config("x", &OutputArgs { out: None, format: Format::Plain });
        cfg.radii = Some(vec![0.5, 0.4]);
        assert!(cfg.validate().is_err());
        cfg.radii = None;
        cfg.tol = Some(-1.0);
        assert!(cfg.validate().is_err());
        cfg.tol = Some(1e-9);
        cfg.n = Some(16);
        assert!(cfg.validate().is_ok());
    }
}
