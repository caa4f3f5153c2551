//! Boundary traces of bounded holomorphic and harmonic functions.
//!
//! The trace is built from radial dilates `f_r(t) = f(re^{it})` as `r → 1`.
//! Alongside the estimate this module checks what a trace must satisfy: its
//! Poisson integral reproduces `f`, sup norms agree on the disk and the circle,
//! products map to products, and the Poisson family approximates the identity.

use num_complex::Complex64;
use serde::Serialize;

use crate::circle::{
    convolve_poisson, norm, radius_powers, sample, synthesize, BoundarySpec, ConvolutionMethod,
    Norm, SpectralFunction, UnitGridFunction,
};
use crate::error::{domain, Error, Result};
use crate::extend::{poisson_extend, HoloSpec};
use crate::kernel::DiskPoint;

/// Slack allowed when checking that sup norms of dilates do not decrease.
pub const MONOTONE_SUP_TOL: f64 = 1e-12;

/// Slack in the contraction `sup_𝔻 |f| ≤ sup_𝕋 |f*|`.
pub const CONTRACTION_TOL: f64 = 1e-9;

/// A function with a meaning inside the disk.
#[derive(Debug, Clone, Copy)]
pub enum TraceSource<'a> {
    Holo(&'a HoloSpec),
    /// The harmonic function `Σ c_n r^{|n|} e^{inσ}`.
    Harmonic(&'a SpectralFunction),
}

impl<'a> From<&'a HoloSpec> for TraceSource<'a> {
    fn from(f: &'a HoloSpec) -> Self {
        TraceSource::Holo(f)
    }
}

impl<'a> From<&'a SpectralFunction> for TraceSource<'a> {
    fn from(f: &'a SpectralFunction) -> Self {
        TraceSource::Harmonic(f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceResult {
    /// Estimate of the boundary function: the last dilate, or its linear
    /// extrapolation to `r = 1` when requested.
    pub trace: UnitGridFunction,
    pub radii: Vec<f64>,
    /// Grid L¹ distance between consecutive dilates.
    pub cauchy_gaps: Vec<f64>,
    /// Grid sup norm of each dilate.
    pub sup_norms: Vec<f64>,
    pub extrapolated: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TraceOptions {
    /// Extrapolate the last two dilates linearly in `1 − r` to `r = 1`.
    pub richardson: bool,
}

/// `1 − 2^{−k}` for `k = 1..=count`.
pub fn geometric_radii(count: usize) -> Vec<f64> {
    (1..=count).map(|k| 1.0 - 0.5_f64.powi(k as i32)).collect()
}

/// The default schedule, `1 − 2^{−k}` for `k = 1..=14`.
pub fn default_radii() -> Vec<f64> {
    geometric_radii(14)
}

pub(crate) fn check_radii(radii: &[f64], min_len: usize) -> Result<()> {
    if radii.len() < min_len {
        return Err(domain(format!(
            "need at least {min_len} radii, got {}",
            radii.len()
        )));
    }
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
        return Err(domain(format!("radius {r} outside (0, 1)")));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("radii must be strictly increasing"));
    }
    Ok(())
}

/// Samples of `f(re^{it_k})` on the `n`-point grid.
pub fn dilate<'a>(source: impl Into<TraceSource<'a>>, r: f64, n: usize) -> Result<UnitGridFunction> {
    if !(0.0..1.0).contains(&r) {
        return Err(domain(format!("dilation radius {r} outside [0, 1)")));
    }
    match source.into() {
        TraceSource::Holo(f) => {
            f.validate()?;
            UnitGridFunction::from_fn(n, |t| f.eval(Complex64::from_polar(r, t)))
        }
        TraceSource::Harmonic(c) => {
            let powers = radius_powers(r, c.max_freq());
            synthesize(&c.apply_multiplier(|k| powers[k]), n)
        }
    }
}

pub fn radial_trace<'a>(source: impl Into<TraceSource<'a>>, radii: &[f64], n: usize) -> Result<TraceResult> {
    radial_trace_with(source, radii, n, TraceOptions::default())
}

/// Dilates `source` at each radius and records the convergence diagnostics.
///
/// Fails with [`Error::MaximumModulus`] if a sup norm drops by more than
/// [`MONOTONE_SUP_TOL`] as the radius grows.
pub fn radial_trace_with<'a>(
    source: impl Into<TraceSource<'a>>,
    radii: &[f64],
    n: usize,
    opts: TraceOptions,
) -> Result<TraceResult> {
    check_radii(radii, 2)?;
    if n < 2 {
        return Err(domain(format!("grid size must be at least 2, got {n}")));
    }
    let source = source.into();
    let dilates = radii
        .iter()
        .map(|&r| dilate(source, r, n))
        .collect::<Result<Vec<_>>>()?;

    let sup_norms: Vec<f64> = dilates.iter().map(|d| norm(d, Norm::Sup)).collect();
    for (i, w) in sup_norms.windows(2).enumerate() {
        if w[1] < w[0] - MONOTONE_SUP_TOL {
            return Err(Error::MaximumModulus {
                radius: radii[i + 1],
                previous: w[0],
                current: w[1],
            });
        }
    }
    let cauchy_gaps = dilates
        .windows(2)
        .map(|w| w[1].sub(&w[0]).map(|d| norm(&d, Norm::L1)))
        .collect::<Result<Vec<_>>>()?;

    let last = dilates.len() - 1;
    let trace = if opts.richardson {
        let (r, s) = (radii[last - 1], radii[last]);
        let ratio = (1.0 - s) / (s - r);
        dilates[last].zip_with(&dilates[last - 1], |fs, fr| fs + (fs - fr) * ratio)?
    } else {
        dilates[last].clone()
    };
    Ok(TraceResult {
        trace,
        radii: radii.to_vec(),
        cauchy_gaps,
        sup_norms,
        extrapolated: opts.richardson,
    })
}

/// Exact boundary spectrum of a polynomial.
pub fn trace_spectrum(f: &HoloSpec) -> Result<SpectralFunction> {
    f.validate()?;
    f.taylor_spectrum()
        .ok_or_else(|| Error::UnsupportedVariant("trace_spectrum needs a taylor spec".into()))
}

/// 5 radii × 8 angles with radii up to 0.9.
pub fn default_testpoints() -> Vec<DiskPoint> {
    let mut out = Vec::with_capacity(40);
    for r in [0.1, 0.3, 0.5, 0.7, 0.9] {
        for j in 0..8 {
            let sigma = -std::f64::consts::PI + std::f64::consts::PI * j as f64 / 4.0;
            out.push(DiskPoint::new(r, sigma).expect("radius below one"));
        }
    }
    out
}

/// `max_z |F(z) − f(z)|` over the test points, `F` the Poisson integral of `candidate`.
pub fn weakstar_residual(f: &HoloSpec, candidate: &UnitGridFunction, testpoints: &[DiskPoint]) -> Result<f64> {
    f.validate()?;
    if testpoints.is_empty() {
        return Err(domain("weak-* residual needs at least one test point"));
    }
    testpoints.iter().try_fold(0.0_f64, |worst, &z| {
        let diff = poisson_extend(candidate, z)? - f.eval(z.to_complex());
        Ok(worst.max(diff.norm()))
    })
}

/// Polar sampling of the disk for sup estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiskGrid {
    pub angles: usize,
    /// Radii `1 − 2^{−j}` for `j = 1..=levels`, kept below `r_max`.
    pub levels: usize,
    /// Outermost radius sampled.
    pub r_max: f64,
}

impl Default for DiskGrid {
    fn default() -> Self {
        Self {
            angles: 1024,
            levels: 14,
            r_max: 1.0 - 0.5_f64.powi(14),
        }
    }
}

impl DiskGrid {
    pub fn with_r_max(r_max: f64) -> Self {
        Self {
            r_max,
            ..Self::default()
        }
    }

    pub fn radii(&self) -> Vec<f64> {
        let mut radii = vec![0.0];
        radii.extend(geometric_radii(self.levels).into_iter().filter(|&r| r < self.r_max));
        radii.push(self.r_max);
        radii
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsometryReport {
    /// `max |f|` over the polar grid.
    pub sup_disk: f64,
    /// Grid sup norm of the trace.
    pub sup_circle: f64,
    /// `sup_disk ≤ sup_circle + tolerance`.
    pub contraction_holds: bool,
    pub tolerance: f64,
    pub grid: DiskGrid,
}

pub fn isometry_report(f: &HoloSpec, trace: &UnitGridFunction, grid: DiskGrid) -> Result<IsometryReport> {
    f.validate()?;
    if grid.angles < 1 || !(grid.r_max > 0.0 && grid.r_max < 1.0) {
        return Err(domain(format!(
            "disk grid needs angles >= 1 and r_max in (0, 1), got {} and {}",
            grid.angles, grid.r_max
        )));
    }
    let mut sup_disk = 0.0_f64;
    for r in grid.radii() {
        for k in 0..grid.angles {
            let t = crate::circle::grid_angle(k, grid.angles);
            sup_disk = sup_disk.max(f.eval(Complex64::from_polar(r, t)).norm());
        }
    }
    let sup_circle = norm(trace, Norm::Sup);
    Ok(IsometryReport {
        sup_disk,
        sup_circle,
        contraction_holds: sup_disk <= sup_circle + CONTRACTION_TOL,
        tolerance: CONTRACTION_TOL,
        grid,
    })
}

/// `max_k |(fg)*(t_k) − f*(t_k) g*(t_k)|` with exact boundary restrictions.
///
/// The product `fg` is formed algebraically (polynomial multiplication, merged
/// Blaschke zeros) before it is restricted to the circle.
pub fn product_trace_residual(f: &HoloSpec, g: &HoloSpec, n: usize) -> Result<f64> {
    for h in [f, g] {
        h.validate()?;
        if !h.is_closed_disk_analytic() {
            return Err(Error::UnsupportedVariant(
                "product traces need functions analytic across the closed disk".into(),
            ));
        }
    }
    let fg = sample(&BoundarySpec::Restriction(f.multiply(g)), n)?;
    let fs = sample(&BoundarySpec::Restriction(f.clone()), n)?;
    let gs = sample(&BoundarySpec::Restriction(g.clone()), n)?;
    Ok(fg
        .samples()
        .iter()
        .zip(fs.samples().iter().zip(gs.samples()))
        .map(|(p, (a, b))| (p - a * b).norm())
        .fold(0.0, f64::max))
}

/// `‖P_r ∗ g − g‖₁` for each radius, always through the spectral multiplier.
pub fn approx_identity_curve(g: &UnitGridFunction, radii: &[f64]) -> Result<Vec<f64>> {
    check_radii(radii, 1)?;
    radii
        .iter()
        .map(|&r| {
            let smoothed = convolve_poisson(g, r, ConvolutionMethod::Spectral)?.output;
            Ok(norm(&smoothed.sub(g)?, Norm::L1))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::grid_angle;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn blaschke() -> HoloSpec {
        HoloSpec::Blaschke(vec![c(0.4, 0.0)])
    }

    #[test]
    fn trace_of_identity() {
        let f = HoloSpec::monomial(1);
        let res = radial_trace(&f, &[0.9, 0.99, 0.999], 256).unwrap();
        // ‖f_s − f_r‖₁ = s − r for f(z) = z
        assert!((res.cauchy_gaps[0] - 0.09).abs() < 1e-12);
        assert!((res.cauchy_gaps[1] - 0.009).abs() < 1e-12);
        assert!(res.cauchy_gaps[1] <= 0.009 + 1e-12);
        let exact = UnitGridFunction::from_fn(256, |t| Complex64::from_polar(1.0, t)).unwrap();
        assert!(norm(&res.trace.sub(&exact).unwrap(), Norm::Sup) < 1.001e-3);
    }

    #[test]
    fn trace_of_constant() {
        let f = HoloSpec::constant(c(2.5, -1.0));
        let res = radial_trace(&f, &[0.5, 0.75], 64).unwrap();
        assert!(res.cauchy_gaps.iter().all(|&g| g == 0.0));
        assert!(res.trace.samples().iter().all(|&v| v == c(2.5, -1.0)));
    }

    #[test]
    fn blaschke_sup_norms_grow_toward_one() {
        let radii = [0.9, 0.99, 0.999, 0.9999];
        let res = radial_trace(&blaschke(), &radii, 4096).unwrap();
        assert!(res.sup_norms.windows(2).all(|w| w[1] >= w[0]));
        // oracle: direct maximum on a finer angular grid
        for (r, sup) in radii.iter().zip(&res.sup_norms) {
            let fine = (0..1 << 15)
                .map(|k| blaschke().eval(Complex64::from_polar(*r, grid_angle(k, 1 << 15))).norm())
                .fold(0.0, f64::max);
            assert!((fine - sup).abs() < 1e-9);
        }
        assert!(res.sup_norms[3] > 0.9999 && res.sup_norms[3] <= 1.0);
    }

    #[test]
    fn radial_trace_validates_radii() {
        let f = HoloSpec::monomial(1);
        assert!(radial_trace(&f, &[0.5], 16).is_err());
        assert!(radial_trace(&f, &[0.5, 0.4], 16).is_err());
        assert!(radial_trace(&f, &[0.5, 1.0], 16).is_err());
        assert!(radial_trace(&f, &[0.0, 0.5], 16).is_err());
    }

    #[test]
    fn harmonic_source_dilates_by_multiplier() {
        let s = SpectralFunction::from_pairs([(-3, c(1.0, 0.0)), (2, c(0.0, 1.0))]).unwrap();
        let res = radial_trace(&s, &[0.5, 0.9], 64).unwrap();
        let z = DiskPoint::new(0.9, grid_angle(5, 64)).unwrap();
        assert!((res.trace.samples()[5] - poisson_extend(&s, z).unwrap()).norm() < 1e-14);
        assert!(matches!(radial_trace(&s, &[0.5, 0.9], 6), Err(Error::Aliasing { .. })));
    }

    #[test]
    fn richardson_is_exact_for_linear_dilates() {
        let f = HoloSpec::monomial(1);
        let res = radial_trace_with(&f, &[0.5, 0.75], 32, TraceOptions { richardson: true }).unwrap();
        let exact = UnitGridFunction::from_fn(32, |t| Complex64::from_polar(1.0, t)).unwrap();
        assert!(norm(&res.trace.sub(&exact).unwrap(), Norm::Sup) < 1e-14);
        assert!(res.extrapolated);
    }

    #[test]
    fn trace_spectrum_examples() {
        let s = trace_spectrum(&HoloSpec::monomial(2)).unwrap();
        assert_eq!(s.coeff(2), c(1.0, 0.0));
        assert!(s.is_analytic());
        assert_eq!(s.coeffs().iter().filter(|v| v.norm() != 0.0).count(), 1);

        let s = trace_spectrum(&HoloSpec::Taylor(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)])).unwrap();
        assert_eq!((s.coeff(0), s.coeff(3)), (c(1.0, 0.0), c(2.0, 0.0)));

        let f = HoloSpec::Taylor(vec![c(0.0, 0.0), c(0.0, 0.0), c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let z = DiskPoint::new(0.5, PI / 3.0).unwrap();
        let got = poisson_extend(&trace_spectrum(&f).unwrap(), z).unwrap();
        assert!((got - f.eval(z.to_complex())).norm() < 1e-12);

        assert!(matches!(trace_spectrum(&blaschke()), Err(Error::UnsupportedVariant(_))));
    }

    #[test]
    fn weakstar_examples() {
        let f = HoloSpec::monomial(3);
        let pts = default_testpoints();
        assert_eq!(pts.len(), 40);
        let truth = UnitGridFunction::from_fn(2048, |t| Complex64::from_polar(1.0, 3.0 * t)).unwrap();
        assert!(weakstar_residual(&f, &truth, &pts).unwrap() <= 1e-10);
        let shifted = truth.map(|v| v + 0.1).unwrap();
        assert!(weakstar_residual(&f, &shifted, &pts).unwrap() >= 0.099);

        let zero = HoloSpec::constant(c(0.0, 0.0));
        let candidate = UnitGridFunction::zeros(64).unwrap();
        assert_eq!(weakstar_residual(&zero, &candidate, &pts).unwrap(), 0.0);
        assert!(weakstar_residual(&zero, &candidate, &[]).is_err());
    }

    #[test]
    fn weakstar_detects_monomial_perturbations() {
        let f = HoloSpec::Taylor(vec![c(0.5, 0.0), c(0.0, -1.0), c(0.25, 0.25)]);
        let truth = sample(&BoundarySpec::Restriction(f.clone()), 1024).unwrap();
        let pts = default_testpoints();
        for deg in [-4_i64, -1, 0, 2, 5] {
            for eps in [1e-3, 0.05] {
                let perturbed = UnitGridFunction::from_fn(1024, |t| {
                    Complex64::from_polar(eps, deg as f64 * t)
                })
                .unwrap()
                .zip_with(&truth, |a, b| a + b)
                .unwrap();
                let res = weakstar_residual(&f, &perturbed, &pts).unwrap();
                assert!(res >= eps * 0.1_f64.powi(deg.unsigned_abs() as i32) - 1e-12);
                assert!(res >= eps * 0.9_f64.powi(deg.unsigned_abs() as i32) - 1e-9);
            }
        }
    }

    #[test]
    fn isometry_examples() {
        let b = blaschke();
        let tr = radial_trace(&b, &[0.9, 0.99, 0.999, 0.9999], 4096).unwrap();
        let rep = isometry_report(&b, &tr.trace, DiskGrid::with_r_max(0.9999)).unwrap();
        for v in [rep.sup_disk, rep.sup_circle] {
            assert!((1.0 - 1e-3..=1.0 + 1e-9).contains(&v), "{rep:?}");
        }
        assert!(rep.contraction_holds);

        let three = HoloSpec::constant(c(3.0, 0.0));
        let tr = UnitGridFunction::from_fn(64, |_| c(3.0, 0.0)).unwrap();
        let rep = isometry_report(&three, &tr, DiskGrid::default()).unwrap();
        assert_eq!((rep.sup_disk, rep.sup_circle), (3.0, 3.0));

        let sq = HoloSpec::monomial(2);
        let tr = UnitGridFunction::from_fn(64, |t| Complex64::from_polar(1.0, 2.0 * t)).unwrap();
        let rep = isometry_report(&sq, &tr, DiskGrid::default()).unwrap();
        assert!(rep.sup_disk < 1.0 && rep.sup_disk > 0.999);
        assert!((rep.sup_circle - 1.0).abs() < 1e-15);
    }

    #[test]
    fn isometry_gap_shrinks_toward_boundary() {
        for f in [blaschke(), HoloSpec::Taylor(vec![c(0.3, 0.0), c(-0.5, 0.2), c(0.0, 0.7)])] {
            let exact = norm(&sample(&BoundarySpec::Restriction(f.clone()), 4096).unwrap(), Norm::Sup);
            let mut last_gap = f64::INFINITY;
            for r_max in [0.99, 0.999, 0.9999] {
                let tr = radial_trace(&f, &[0.5, r_max], 4096).unwrap();
                let rep = isometry_report(&f, &tr.trace, DiskGrid { angles: 4096, ..DiskGrid::with_r_max(r_max) }).unwrap();
                assert!(rep.contraction_holds, "{rep:?}");
                let gap = exact - rep.sup_disk;
                assert!(gap >= -1e-12 && gap < last_gap, "gap {gap} at {r_max}");
                last_gap = gap;
            }
        }
    }

    #[test]
    fn product_examples() {
        let r = product_trace_residual(&HoloSpec::monomial(1), &HoloSpec::monomial(2), 256).unwrap();
        assert!(r <= 1e-13);
        let r = product_trace_residual(&blaschke(), &blaschke(), 1024).unwrap();
        assert!(r <= 1e-12);
        let f = HoloSpec::Taylor(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let g = HoloSpec::Taylor(vec![c(1.0, 0.0), c(-1.0, 0.0)]);
        assert_eq!(f.multiply(&g), HoloSpec::Taylor(vec![c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]));
        assert!(product_trace_residual(&f, &g, 512).unwrap() <= 1e-13);
    }

    #[test]
    fn approx_identity_examples() {
        let e = UnitGridFunction::from_fn(256, |t| Complex64::from_polar(1.0, t)).unwrap();
        let curve = approx_identity_curve(&e, &[0.5, 0.9, 0.99]).unwrap();
        for (got, want) in curve.iter().zip([0.5, 0.1, 0.01]) {
            assert!((got - want).abs() < 1e-12);
        }

        let one = UnitGridFunction::from_fn(256, |_| c(4.0, 0.0)).unwrap();
        assert!(approx_identity_curve(&one, &[0.5, 0.99]).unwrap().iter().all(|&v| v < 1e-14));

        let step = BoundarySpec::Step {
            breaks: vec![-PI / 2.0, PI / 2.0],
            values: vec![c(1.0, 0.0), c(-1.0, 0.0)],
        };
        let g = sample(&step, 1 << 16).unwrap();
        let curve = approx_identity_curve(&g, &[0.9, 0.99, 0.999]).unwrap();
        assert!(curve.windows(2).all(|w| w[1] < w[0]), "{curve:?}");
        assert!(curve[2] < 0.01);
        assert!(approx_identity_curve(&g, &[0.9, 0.5]).is_err());
    }
}
