//! The acceptance suite: twelve numbered checks plus an aggregate, shared by
//! the `selftest` subcommand and the `acceptance` test target.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circle::{
    convolve_poisson, norm, sample, synthesize, BoundarySpec, ConvolutionMethod, Norm,
    SpectralFunction, UnitGridFunction,
};
use crate::density::{equiangular_nodes, fit_span, residual_curve, span_samples, FitOptions};
use crate::error::Result;
use crate::extend::{
    bidisk_extend, bidisk_extend_quadrature, check_harmonic, poisson_extend, reproduce_interior,
    BidiskSpectrum, HoloSpec,
};
use crate::kernel::{eval_kernel, verify_kernel_properties, DiskPoint, KernelProperty};
use crate::sum;
use crate::trace::{
    approx_identity_curve, default_radii, default_testpoints, dilate, isometry_report,
    product_trace_residual, radial_trace, trace_spectrum, weakstar_residual, DiskGrid,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

#[derive(Debug, Clone, Copy)]
pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub budget: Duration,
    check: fn() -> Result<Checks>,
}

impl Criterion {
    /// Runs the check; exceeding the runtime budget counts as a failure.
    pub fn run(&self) -> CriterionOutcome {
        let start = Instant::now();
        let result = (self.check)();
        let elapsed = start.elapsed();
        let (mut passed, mut detail) = match result {
            Ok(checks) => (checks.failures.is_empty(), checks.summary()),
            Err(e) => (false, format!("error: {e}")),
        };
        if elapsed >= self.budget {
            passed = false;
            detail = format!(
                "runtime {:.2}s over budget {:.0}s; {detail}",
                elapsed.as_secs_f64(),
                self.budget.as_secs_f64()
            );
        }
        CriterionOutcome {
            id: self.id,
            name: self.name,
            passed,
            detail,
            elapsed,
            budget: self.budget,
        }
    }
}

/// Collects pass/fail conditions with a short note for each.
#[derive(Debug, Default)]
struct Checks {
    notes: Vec<String>,
    failures: Vec<String>,
}

impl Checks {
    fn require(&mut self, ok: bool, note: String) {
        if ok {
            self.notes.push(note);
        } else {
            self.failures.push(note);
        }
    }

    fn summary(&self) -> String {
        if self.failures.is_empty() {
            self.notes.join("; ")
        } else {
            format!("FAILED {}", self.failures.join("; "))
        }
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

/// Criteria 1 to 12 in order.
pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, name: "kernel normalization", budget: secs(1), check: kernel_normalization },
        Criterion { id: 2, name: "kernel properties", budget: secs(2), check: kernel_properties },
        Criterion { id: 3, name: "interior reconstruction", budget: secs(10), check: interior_reconstruction },
        Criterion { id: 4, name: "convolution path agreement", budget: secs(5), check: path_agreement },
        Criterion { id: 5, name: "trace reconstruction and isometry", budget: secs(5), check: trace_isometry },
        Criterion { id: 6, name: "homomorphism", budget: secs(2), check: homomorphism },
        Criterion { id: 7, name: "uniqueness via density", budget: secs(2), check: uniqueness },
        Criterion { id: 8, name: "approximate identity", budget: secs(10), check: approximate_identity },
        Criterion { id: 9, name: "harmonicity", budget: secs(2), check: harmonicity },
        Criterion { id: 10, name: "surjectivity round trip", budget: secs(2), check: round_trip },
        Criterion { id: 11, name: "density fit", budget: secs(30), check: density_fit },
        Criterion { id: 12, name: "bidisk extension", budget: secs(5), check: bidisk },
    ]
}

pub const AGGREGATE_ID: u32 = 13;
pub const AGGREGATE_BUDGET: Duration = Duration::from_secs(90);

/// Runs criteria 1 to 12 and appends the aggregate outcome.
pub fn run_all() -> Vec<CriterionOutcome> {
    let start = Instant::now();
    let mut outcomes: Vec<CriterionOutcome> = criteria().iter().map(Criterion::run).collect();
    let elapsed = start.elapsed();
    outcomes.push(aggregate(&outcomes, elapsed));
    outcomes
}

pub fn aggregate(outcomes: &[CriterionOutcome], elapsed: Duration) -> CriterionOutcome {
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id.to_string()).collect();
    let within = elapsed < AGGREGATE_BUDGET;
    let mut detail = format!("{} of {} passed", outcomes.len() - failed.len(), outcomes.len());
    if !failed.is_empty() {
        detail.push_str(&format!("; failed: {}", failed.join(", ")));
    }
    if !within {
        detail.push_str(&format!("; runtime {:.1}s over budget", elapsed.as_secs_f64()));
    }
    CriterionOutcome {
        id: AGGREGATE_ID,
        name: "selftest aggregate",
        passed: failed.is_empty() && within,
        detail,
        elapsed,
        budget: AGGREGATE_BUDGET,
    }
}

fn list(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.4e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_spectrum(rng: &mut ChaCha8Rng, max_freq: usize) -> SpectralFunction {
    let coeffs = (0..2 * max_freq + 1).map(|_| random_complex(rng)).collect();
    SpectralFunction::new(max_freq, coeffs).expect("coefficient count matches band")
}

fn random_point(rng: &mut ChaCha8Rng, r_max: f64) -> DiskPoint {
    DiskPoint::new(rng.gen_range(0.0..=r_max), rng.gen_range(-PI..PI)).expect("radius below one")
}

fn random_taylor(rng: &mut ChaCha8Rng, max_degree: usize) -> HoloSpec {
    let degree = rng.gen_range(0..=max_degree);
    HoloSpec::Taylor((0..=degree).map(|_| random_complex(rng)).collect())
}

fn random_blaschke(rng: &mut ChaCha8Rng) -> HoloSpec {
    let count = rng.gen_range(1..=3);
    HoloSpec::Blaschke((0..count).map(|_| Complex64::from_polar(rng.gen_range(0.0..0.8), rng.gen_range(-PI..PI))).collect())
}

fn step_target(n: usize) -> Result<UnitGridFunction> {
    sample(
        &BoundarySpec::Step {
            breaks: vec![-PI / 2.0, PI / 2.0],
            values: vec![c(1.0, 0.0), c(-1.0, 0.0)],
        },
        n,
    )
}

fn kernel_normalization() -> Result<Checks> {
    let mut checks = Checks::default();
    let n = 4096;
    for r in [0.0, 0.5, 0.9, 0.99] {
        let values = (0..n)
            .map(|k| eval_kernel(r, crate::circle::grid_angle(k, n)))
            .collect::<Result<Vec<_>>>()?;
        let err = (sum::sum(values) / n as f64 - 1.0).abs();
        checks.require(err <= 1e-12, format!("r={r}: |mean-1|={err:.1e}"));
    }
    Ok(checks)
}

fn kernel_properties() -> Result<Checks> {
    let mut checks = Checks::default();
    let n = 1 << 14;
    for r in [0.5, 0.9, 0.99] {
        let reports = verify_kernel_properties(r, 0.5, n)?;
        let failing: Vec<&str> = reports.iter().filter(|p| !p.passed).map(|p| p.property.label()).collect();
        let note = if failing.is_empty() {
            format!("r={r}: all properties hold")
        } else {
            format!("r={r}: properties {} fail", failing.join(", "))
        };
        checks.require(failing.is_empty(), note);
    }
    let mut values = Vec::new();
    for r in [0.9, 0.99, 0.999, 0.9999] {
        let reports = verify_kernel_properties(r, 0.5, n)?;
        let v = reports
            .iter()
            .find(|p| p.property == KernelProperty::V)
            .map(|p| p.value)
            .unwrap_or(f64::NAN);
        values.push(v);
    }
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    let last = values[values.len() - 1];
    checks.require(decreasing && last < 1e-2, format!("property v values {}", list(&values)));
    Ok(checks)
}

fn interior_reconstruction() -> Result<Checks> {
    let mut checks = Checks::default();
    let mut rng = rng(3);
    let specs: Vec<HoloSpec> = (0..20).map(|_| random_taylor(&mut rng, 32)).collect();
    let points: Vec<DiskPoint> = (0..50).map(|_| random_point(&mut rng, 0.9)).collect();
    for rho in [1.0, 0.95] {
        let mut worst = 0.0_f64;
        for f in &specs {
            for &z in &points {
                worst = worst.max(reproduce_interior(f, z, rho, 4096)?.residual);
            }
        }
        checks.require(worst <= 1e-9, format!("rho={rho}: max residual {worst:.1e}"));
    }
    Ok(checks)
}

fn path_agreement() -> Result<Checks> {
    let mut checks = Checks::default();
    let mut rng = rng(4);
    let n = 2048;
    let mut worst = 0.0_f64;
    for case in 0..12 {
        let m = if case == 0 { 64 } else { rng.gen_range(1..=64) };
        let r = if case == 0 { 0.9 } else { rng.gen_range(0.0..=0.9) };
        let spec = random_spectrum(&mut rng, m);
        let f = synthesize(&spec, n)?;
        let quad = convolve_poisson(&f, r, ConvolutionMethod::Quadrature)?.output;
        let spec_path = convolve_poisson(&f, r, ConvolutionMethod::Spectral)?.output;
        worst = worst.max(norm(&quad.sub(&spec_path)?, Norm::L1));
    }
    checks.require(worst <= 1e-9, format!("max L1 gap {worst:.1e}"));
    Ok(checks)
}

fn trace_isometry() -> Result<Checks> {
    let mut checks = Checks::default();
    let mut rng = rng(3);
    let mut worst = 0.0_f64;
    let specs: Vec<HoloSpec> = (0..20).map(|_| random_taylor(&mut rng, 32)).collect();
    let points: Vec<DiskPoint> = (0..50).map(|_| random_point(&mut rng, 0.9)).collect();
    for f in &specs {
        let boundary = trace_spectrum(f)?;
        for &z in &points {
            worst = worst.max((poisson_extend(&boundary, z)? - f.eval(z.to_complex())).norm());
        }
    }
    checks.require(worst <= 1e-10, format!("spectral reconstruction max error {worst:.1e}"));

    let b = HoloSpec::Blaschke(vec![c(0.4, 0.0)]);
    let n = 4096;
    let trace = radial_trace(&b, &default_radii(), n)?.trace;
    let grid = DiskGrid { angles: n, ..DiskGrid::with_r_max(0.9999) };
    let report = isometry_report(&b, &trace, grid)?;
    let inside = |v: f64| (0.999..=1.0 + 1e-9).contains(&v);
    checks.require(
        inside(report.sup_disk) && inside(report.sup_circle),
        format!("blaschke sup disk {:.9} circle {:.9}", report.sup_disk, report.sup_circle),
    );
    Ok(checks)
}

/// Twenty pairs mixing polynomials, Blaschke products and scaled variants.
pub fn homomorphism_catalogue() -> Vec<(HoloSpec, HoloSpec)> {
    let mut rng = rng(6);
    (0..20)
        .map(|i| {
            let mut pick = |k: usize| match k % 3 {
                0 => random_taylor(&mut rng, 8),
                1 => random_blaschke(&mut rng),
                _ => HoloSpec::Scaled(random_complex(&mut rng), Box::new(random_blaschke(&mut rng))),
            };
            (pick(i), pick(i / 3))
        })
        .collect()
}

fn homomorphism() -> Result<Checks> {
    let mut checks = Checks::default();
    let mut worst = 0.0_f64;
    for (f, g) in homomorphism_catalogue() {
        worst = worst.max(product_trace_residual(&f, &g, 1024)?);
    }
    checks.require(worst <= 1e-12, format!("max product residual {worst:.1e}"));
    Ok(checks)
}

fn uniqueness() -> Result<Checks> {
    let mut checks = Checks::default();
    let f = HoloSpec::Taylor(vec![c(0.3, 0.1), c(1.0, 0.0), c(0.0, -0.5), c(0.25, 0.25)]);
    let n = 1024;
    let exact = sample(&BoundarySpec::Restriction(f.clone()), n)?;
    let points = default_testpoints();
    let clean = weakstar_residual(&f, &exact, &points)?;
    checks.require(clean <= 1e-10, format!("unperturbed {clean:.1e}"));
    let perturbed = exact.zip_with(
        &UnitGridFunction::from_fn(n, |t| Complex64::from_polar(0.1, 5.0 * t))?,
        |a, b| a + b,
    )?;
    let bound = 0.1 * 0.5_f64.powi(5) - 1e-6;
    let residual = weakstar_residual(&f, &perturbed, &points)?;
    checks.require(residual >= bound, format!("perturbed {residual:.3e} >= {bound:.3e}"));
    Ok(checks)
}

fn approximate_identity() -> Result<Checks> {
    let mut checks = Checks::default();
    let radii = [0.5, 0.9, 0.99];
    let g = UnitGridFunction::from_fn(4096, |t| Complex64::from_polar(1.0, t))?;
    let curve = approx_identity_curve(&g, &radii)?;
    let worst = radii
        .iter()
        .zip(&curve)
        .map(|(r, e)| (e - (1.0 - r)).abs())
        .fold(0.0, f64::max);
    checks.require(worst <= 1e-12, format!("exact law max error {worst:.1e}"));

    let step = step_target(1 << 16)?;
    let curve = approx_identity_curve(&step, &[0.9, 0.99, 0.999])?;
    let decreasing = curve.windows(2).all(|w| w[1] < w[0]);
    checks.require(decreasing && curve[2] < 0.02, format!("step curve {}", list(&curve)));
    Ok(checks)
}

fn harmonicity() -> Result<Checks> {
    let mut checks = Checks::default();
    let mut rng = rng(9);
    let mut worst = 0.0_f64;
    for _ in 0..10 {
        let boundary = random_spectrum(&mut rng, 8);
        for _ in 0..5 {
            let a = random_point(&mut rng, 0.6);
            let radius = (1.0 - a.r()) * rng.gen_range(0.1..0.9);
            worst = worst.max(check_harmonic(&boundary, a, radius, 64)?);
        }
    }
    checks.require(worst <= 1e-9, format!("max mean value residual {worst:.1e}"));
    Ok(checks)
}

fn round_trip() -> Result<Checks> {
    let mut checks = Checks::default();
    let mut rng = rng(10);
    let (n, r) = (1024, 0.9999);
    let mut cases: Vec<SpectralFunction> = (-16..=16i64)
        .map(|k| SpectralFunction::from_pairs([(k, c(1.0, 0.0))]))
        .collect::<Result<_>>()?;
    let unit_cases = cases.len();
    for _ in 0..10 {
        let m = rng.gen_range(0..=16);
        cases.push(random_spectrum(&mut rng, m));
    }
    let (mut bound_ok, mut unit_worst) = (true, 0.0_f64);
    for (i, spec) in cases.iter().enumerate() {
        let exact = synthesize(spec, n)?;
        let recovered = dilate(spec, r, n)?;
        let err = norm(&recovered.sub(&exact)?, Norm::L1);
        let bound = sum::sum(
            (-(spec.max_freq() as i64)..=spec.max_freq() as i64)
                .map(|k| spec.coeff(k).norm() * (1.0 - r.powi(k.unsigned_abs() as i32))),
        ) + 1e-12;
        bound_ok &= err <= bound;
        if i < unit_cases {
            unit_worst = unit_worst.max(err);
        }
    }
    checks.require(bound_ok, "multiplier bound on every case".into());
    checks.require(unit_worst <= 2e-3, format!("unit coefficient max error {unit_worst:.3e}"));
    Ok(checks)
}

fn density_fit() -> Result<Checks> {
    let mut checks = Checks::default();
    let curve = residual_curve(&step_target(8192)?, &[8, 16, 32, 64], 0.95)?;
    let decreasing = curve.windows(2).all(|w| w[1] < w[0]);
    checks.require(decreasing, format!("step residuals {}", list(&curve)));
    checks.require(curve[3] < 0.05, format!("final step residual {:.4e} < 0.05", curve[3]));

    let mut rng = rng(11);
    let nodes = equiangular_nodes(16, 0.9)?;
    let weights: Vec<Complex64> = (0..16).map(|_| random_complex(&mut rng)).collect();
    let target = span_samples(&nodes, &weights, 1024)?;
    let fit = fit_span(&target, &nodes, &FitOptions::default())?;
    checks.require(fit.residual_l1 <= 1e-9, format!("in-span residual {:.1e}", fit.residual_l1));
    Ok(checks)
}

fn bidisk() -> Result<Checks> {
    let mut checks = Checks::default();
    let spec = BidiskSpectrum::from_pairs([((2, 3), c(1.0, 0.0))])?;
    let mut rng = rng(12);
    let mut worst = 0.0_f64;
    let mut first = None;
    for _ in 0..20 {
        let (z1, z2) = (random_point(&mut rng, 0.9), random_point(&mut rng, 0.9));
        let exact = Complex64::from_polar(
            z1.r().powi(2) * z2.r().powi(3),
            2.0 * z1.sigma() + 3.0 * z2.sigma(),
        );
        worst = worst.max((bidisk_extend(&spec, z1, z2)? - exact).norm());
        first.get_or_insert((z1, z2, exact));
    }
    checks.require(worst <= 1e-10, format!("max tensor error {worst:.1e}"));
    let (z1, z2, exact) = first.expect("twenty points drawn");
    let quad = (bidisk_extend_quadrature(&spec, z1, z2, 256, 256)? - exact).norm();
    checks.require(quad <= 1e-8, format!("quadrature gap {quad:.1e}"));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_is_deterministic_and_sized() {
        let a = homomorphism_catalogue();
        assert_eq!(a.len(), 20);
        assert_eq!(a, homomorphism_catalogue());
    }

    #[test]
    fn aggregate_names_failures() {
        let ok = |id| CriterionOutcome {
            id,
            name: "x",
            passed: id != 4,
            detail: String::new(),
            elapsed: Duration::ZERO,
            budget: secs(1),
        };
        let agg = aggregate(&[ok(1), ok(4)], Duration::from_secs(1));
        assert!(!agg.passed);
        assert!(agg.detail.contains("failed: 4"));
        assert!(aggregate(&[ok(1)], Duration::from_secs(91)).detail.contains("over budget"));
    }
}
