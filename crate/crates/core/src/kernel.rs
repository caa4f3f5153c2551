//! Poisson and Herglotz kernels of the unit disk.
//!
//! The Poisson kernel is
//!
//! ```text
//! P_r(θ) = (1 − r²) / (1 − 2r cos θ + r²) = (1 − |re^{iθ}|²) / |1 − re^{iθ}|²,   0 ≤ r < 1.
//! ```
//!
//! Both closed forms are available. The rational form is the default; its
//! denominator is evaluated as `(1 − r)² + 4r sin²(θ/2)` so that it keeps full
//! relative accuracy when `r → 1` and `θ → 0`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::circle::{grid_angle, SpectralFunction};
use crate::error::{domain, Result};
use crate::sum;

/// An interior point `z = r·e^{iσ}` of the unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiskPoint {
    r: f64,
    sigma: f64,
}

impl DiskPoint {
    /// Builds a point from polar coordinates; `sigma` is reduced into `(−π, π]`.
    pub fn new(r: f64, sigma: f64) -> Result<Self> {
        check_radius(r)?;
        if !sigma.is_finite() {
            return Err(domain(format!("angle must be finite, got {sigma}")));
        }
        Ok(Self {
            r,
            sigma: normalize_angle(sigma),
        })
    }

    pub fn origin() -> Self {
        Self { r: 0.0, sigma: 0.0 }
    }

    /// Builds a point from its Cartesian value. The origin gets angle 0.
    pub fn from_complex(z: Complex64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(domain(format!("point must be finite, got {z}")));
        }
        let r = z.norm();
        let sigma = if r == 0.0 { 0.0 } else { z.arg() };
        Self::new(r, sigma)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.sigma)
    }
}

impl fmt::Display for DiskPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.r, self.sigma)
    }
}

/// Reduces an angle into `(−π, π]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let s = theta.rem_euclid(2.0 * PI);
    if s > PI {
        s - 2.0 * PI
    } else {
        s
    }
}

pub(crate) fn check_radius(r: f64) -> Result<()> {
    if r.is_finite() && (0.0..1.0).contains(&r) {
        Ok(())
    } else {
        Err(domain(format!("radius must lie in [0, 1), got {r}")))
    }
}

/// Poisson kernel `P_r(θ)` in its rational form.
pub fn eval_kernel(r: f64, theta: f64) -> Result<f64> {
    check_radius(r)?;
    if !theta.is_finite() {
        return Err(domain(format!("angle must be finite, got {theta}")));
    }
    let value = kernel_value(r, theta);
    debug_assert!(
        forms_agree(value, kernel_value_modulus(r, theta), 4.0),
        "closed forms of P_{r}({theta}) disagree"
    );
    Ok(value)
}

/// Poisson kernel in the squared-modulus form `(1 − |w|²)/|1 − w|²`, `w = re^{iθ}`.
///
/// Used as the cross-check for [`eval_kernel`].
pub fn eval_kernel_modulus(r: f64, theta: f64) -> Result<f64> {
    check_radius(r)?;
    if !theta.is_finite() {
        return Err(domain(format!("angle must be finite, got {theta}")));
    }
    Ok(kernel_value_modulus(r, theta))
}

/// `P_z(t) = P_r(σ − t)`.
pub fn eval_kernel_at(z: DiskPoint, t: f64) -> Result<f64> {
    eval_kernel(z.r, z.sigma - t)
}

#[inline]
pub(crate) fn kernel_value(r: f64, theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    let one_minus = 1.0 - r;
    (one_minus * (1.0 + r)) / (one_minus * one_minus + 4.0 * r * s * s)
}

#[inline]
fn kernel_value_modulus(r: f64, theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    let one_minus = 1.0 - r;
    // 1 − r·e^{iθ}, with 1 − r cos θ = (1 − r) + 2r sin²(θ/2)
    let w = Complex64::new(one_minus + 2.0 * r * s * s, -r * theta.sin());
    (one_minus * (1.0 + r)) / w.norm_sqr()
}

fn forms_agree(a: f64, b: f64, ulps: f64) -> bool {
    (a - b).abs() <= ulps * f64::EPSILON * a.abs().max(b.abs())
}

/// Fourier coefficients `r^{|n|}` of `P_r` for `|n| ≤ max_freq`.
pub fn kernel_spectrum(r: f64, max_freq: usize) -> Result<SpectralFunction> {
    check_radius(r)?;
    let mut powers = Vec::with_capacity(max_freq + 1);
    let mut p = 1.0;
    for _ in 0..=max_freq {
        powers.push(p);
        p *= r;
    }
    Ok(SpectralFunction::from_fn(max_freq, |n| {
        Complex64::new(powers[n.unsigned_abs() as usize], 0.0)
    }))
}

/// Herglotz kernel `g(t, z) = (1 + e^{−it}z) / (1 − e^{−it}z)`.
///
/// Its real part is `P_z(t)` and its imaginary part is
/// `2r sin(σ − t) / (1 − 2r cos(σ − t) + r²)`.
pub fn herglotz_eval(z: DiskPoint, t: f64) -> Result<Complex64> {
    if !t.is_finite() {
        return Err(domain(format!("angle must be finite, got {t}")));
    }
    let phi = z.sigma - t;
    let w = Complex64::from_polar(z.r, phi);
    // 1 − w with the real part formed without cancellation
    let s = (0.5 * phi).sin();
    let denom = Complex64::new((1.0 - z.r) + 2.0 * z.r * s * s, -w.im);
    Ok((1.0 + w) / denom)
}

/// The five classical kernel properties checked by [`verify_kernel_properties`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KernelProperty {
    /// Decreasing on `0 < σ < π`.
    I,
    /// Nonnegative.
    Ii,
    /// Even.
    Iii,
    /// Unit mean.
    Iv,
    /// Vanishing sup away from the origin as `r → 1`.
    V,
}

impl KernelProperty {
    pub fn label(&self) -> &'static str {
        match self {
            KernelProperty::I => "i",
            KernelProperty::Ii => "ii",
            KernelProperty::Iii => "iii",
            KernelProperty::Iv => "iv",
            KernelProperty::V => "v",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            KernelProperty::I => "decreasing on (0, pi)",
            KernelProperty::Ii => "nonnegative",
            KernelProperty::Iii => "even",
            KernelProperty::Iv => "unit mean",
            KernelProperty::V => "sup over |t| >= delta",
        }
    }
}

/// Outcome of one kernel property check on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property: KernelProperty,
    /// The quantity the property is about: the grid mean for iv, `P_r(δ)` for v,
    /// the extreme observed value otherwise.
    pub value: f64,
    pub max_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub n: usize,
    pub r: f64,
    pub delta: f64,
}

/// Tolerances for [`verify_kernel_properties_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelTolerances {
    /// Relative slack, in units of machine epsilon, for properties that hold exactly.
    pub ulps: f64,
    /// Absolute slack for the unit-mean quadrature, added to its aliasing bound.
    pub spectral: f64,
}

impl Default for KernelTolerances {
    fn default() -> Self {
        Self {
            ulps: 4.0,
            spectral: 1e-10,
        }
    }
}

/// Trapezoid aliasing bound `2r^N / (1 − r^N)` for the unit-mean identity.
pub fn mean_aliasing_bound(r: f64, n: usize) -> f64 {
    let rn = r.powi(n.min(i32::MAX as usize) as i32);
    2.0 * rn / (1.0 - rn)
}

pub fn verify_kernel_properties(r: f64, delta: f64, n: usize) -> Result<Vec<PropertyReport>> {
    verify_kernel_properties_with(r, delta, n, KernelTolerances::default())
}

/// Checks properties i–v of `P_r` on the uniform grid of size `n`.
pub fn verify_kernel_properties_with(
    r: f64,
    delta: f64,
    n: usize,
    tol: KernelTolerances,
) -> Result<Vec<PropertyReport>> {
    check_radius(r)?;
    if !(delta > 0.0 && delta < PI) {
        return Err(domain(format!("delta must lie in (0, pi), got {delta}")));
    }
    if n < 16 {
        return Err(domain(format!("grid size must be at least 16, got {n}")));
    }
    let angles: Vec<f64> = (0..n).map(|k| grid_angle(k, n)).collect();
    let values: Vec<f64> = angles.iter().map(|&t| kernel_value(r, t)).collect();
    let rel = tol.ulps * f64::EPSILON;
    let report = |property, value, max_violation: f64, tolerance| PropertyReport {
        property,
        value,
        max_violation,
        tolerance,
        passed: max_violation <= tolerance,
        n,
        r,
        delta,
    };

    // i: successive differences over grid angles in (0, π)
    let mut inc = 0.0_f64;
    let positive: Vec<usize> = (0..n).filter(|&k| angles[k] > 0.0 && angles[k] < PI).collect();
    for w in positive.windows(2) {
        let (a, b) = (values[w[0]], values[w[1]]);
        inc = inc.max((b - a) / a);
    }
    let peak = positive.first().map_or(0.0, |&k| values[k]);
    let p1 = report(KernelProperty::I, peak, inc.max(0.0), rel);

    // ii
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let p2 = report(KernelProperty::Ii, min, (-min).max(0.0), 0.0);

    // iii
    let asym = angles
        .iter()
        .zip(&values)
        .map(|(&t, &v)| (v - kernel_value(r, -t)).abs() / v)
        .fold(0.0, f64::max);
    let p3 = report(KernelProperty::Iii, asym, asym, rel);

    // iv
    let mean = sum::sum(values.iter().copied()) / n as f64;
    let p4 = report(
        KernelProperty::Iv,
        mean,
        (mean - 1.0).abs(),
        tol.spectral + mean_aliasing_bound(r, n),
    );

    // v: the grid sup over |t| ≥ δ never exceeds the closed-form P_r(δ)
    let at_delta = kernel_value(r, delta);
    let grid_sup = angles
        .iter()
        .zip(&values)
        .filter(|(t, _)| t.abs() >= delta)
        .map(|(_, &v)| v)
        .fold(0.0, f64::max);
    let p5 = report(
        KernelProperty::V,
        at_delta,
        ((grid_sup - at_delta) / at_delta).max(0.0),
        rel,
    );

    Ok(vec![p1, p2, p3, p4, p5])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(eval_kernel(0.0, 1.234).unwrap(), 1.0);
        assert!(close(eval_kernel(0.5, 0.0).unwrap(), 3.0, 1e-15));
        assert!(close(eval_kernel(0.5, PI).unwrap(), 1.0 / 3.0, 1e-15));
        assert!(close(eval_kernel_modulus(0.5, 0.0).unwrap(), 3.0, 1e-15));
        assert!(close(eval_kernel_modulus(0.5, PI).unwrap(), 1.0 / 3.0, 1e-15));
    }

    #[test]
    fn kernel_rejects_bad_radius() {
        for r in [1.0, 1.5, -0.1, f64::NAN, f64::INFINITY] {
            assert!(eval_kernel(r, 0.0).is_err(), "r = {r}");
        }
        assert!(eval_kernel(0.5, f64::NAN).is_err());
        assert!(DiskPoint::new(1.0, 0.0).is_err());
    }

    #[test]
    fn stable_denominator_near_the_boundary() {
        // naive 1 − 2r cos θ + r² loses most digits here
        let (r, t) = (0.9999_f64, 1e-4_f64);
        let d = (1.0 - r) * (1.0 - r) + r * t * t; // sin²(t/2) ≈ t²/4
        let expected = (1.0 - r * r) / d;
        let got = eval_kernel(r, t).unwrap();
        assert!((got - expected).abs() / expected < 1e-8);
    }

    #[test]
    fn kernel_at_examples() {
        let z = DiskPoint::new(0.5, 0.7).unwrap();
        assert_eq!(eval_kernel_at(z, 0.7).unwrap(), eval_kernel(0.5, 0.0).unwrap());
        assert_eq!(eval_kernel_at(DiskPoint::origin(), 2.0).unwrap(), 1.0);
        let z = DiskPoint::new(0.5, 0.0).unwrap();
        assert!(close(eval_kernel_at(z, PI).unwrap(), 1.0 / 3.0, 1e-15));
    }

    #[test]
    fn angle_normalization() {
        assert_eq!(normalize_angle(-PI), PI);
        assert_eq!(normalize_angle(PI), PI);
        assert!(close(normalize_angle(3.0 * PI / 2.0), -PI / 2.0, 1e-15));
        let z = DiskPoint::new(0.3, 7.0).unwrap();
        assert!(z.sigma() > -PI && z.sigma() <= PI);
    }

    #[test]
    fn spectrum_examples() {
        let s = kernel_spectrum(0.0, 3).unwrap();
        assert_eq!(s.coeff(0), Complex64::new(1.0, 0.0));
        for n in [-3, -2, -1, 1, 2, 3] {
            assert_eq!(s.coeff(n), Complex64::new(0.0, 0.0));
        }
        let s = kernel_spectrum(0.5, 2).unwrap();
        let got: Vec<f64> = s.coeffs().iter().map(|c| c.re).collect();
        assert_eq!(got, vec![0.25, 0.5, 1.0, 0.5, 0.25]);
        let s = kernel_spectrum(0.9, 0).unwrap();
        assert_eq!(s.coeffs(), &[Complex64::new(1.0, 0.0)]);
        assert!(kernel_spectrum(1.0, 2).is_err());
    }

    #[test]
    fn verify_examples() {
        let reports = verify_kernel_properties(0.5, 0.5, 4096).unwrap();
        assert_eq!(reports.len(), 5);
        assert!(reports.iter().all(|r| r.passed), "{reports:?}");
        assert!(reports[3].max_violation <= 1e-12);

        let reports = verify_kernel_properties(0.0, 1.0, 64).unwrap();
        assert_eq!(reports[4].value, 1.0);

        let reports = verify_kernel_properties(0.999, 0.1, 1 << 16).unwrap();
        assert_eq!(reports[4].value, eval_kernel(0.999, 0.1).unwrap());
        assert!(reports.iter().all(|r| r.passed), "{reports:?}");
    }

    #[test]
    fn verify_rejects_bad_parameters() {
        assert!(verify_kernel_properties(0.5, 0.0, 64).is_err());
        assert!(verify_kernel_properties(0.5, PI, 64).is_err());
        assert!(verify_kernel_properties(0.5, 0.5, 8).is_err());
        assert!(verify_kernel_properties(1.0, 0.5, 64).is_err());
    }

    #[test]
    fn reports_are_consistent_with_tolerance() {
        for r in [0.0, 0.3, 0.9, 0.99] {
            for rep in verify_kernel_properties(r, 0.3, 256).unwrap() {
                assert_eq!(rep.passed, rep.max_violation <= rep.tolerance);
            }
        }
    }

    #[test]
    fn unit_mean_within_aliasing_bound() {
        for r in [0.0, 0.3, 0.9, 0.99] {
            for n in [4096, 8192] {
                let mean = (0..n).map(|k| kernel_value(r, grid_angle(k, n))).sum::<f64>() / n as f64;
                assert!((mean - 1.0).abs() <= mean_aliasing_bound(r, n) + 1e-12);
            }
        }
    }

    #[test]
    fn sup_away_from_origin_decays() {
        let values: Vec<f64> = [0.9, 0.99, 0.999, 0.9999]
            .iter()
            .map(|&r| verify_kernel_properties(r, 0.5, 1 << 12).unwrap()[4].value)
            .collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
        assert!(values[3] < 1e-2);
    }

    #[test]
    fn herglotz_examples() {
        let g = herglotz_eval(DiskPoint::origin(), 1.0).unwrap();
        assert_eq!(g, Complex64::new(1.0, 0.0));
        let g = herglotz_eval(DiskPoint::new(0.5, 0.0).unwrap(), 0.0).unwrap();
        assert!(close(g.re, 3.0, 1e-15) && close(g.im, 0.0, 1e-15));
        let z = DiskPoint::new(0.5, PI / 2.0).unwrap();
        let g = herglotz_eval(z, 0.0).unwrap();
        assert!(close(g.re, eval_kernel(0.5, PI / 2.0).unwrap(), 1e-14));
        assert!(close(g.im, 2.0 * 0.5 / 1.25, 1e-14));
    }

    #[test]
    fn herglotz_real_part_on_grid() {
        let mut worst = 0.0_f64;
        for i in 0..32 {
            let r = 0.99 * i as f64 / 31.0;
            for j in 0..32 {
                let sigma = grid_angle(j, 32);
                let z = DiskPoint::new(r, sigma).unwrap();
                for k in 0..32 {
                    let t = grid_angle(k, 32) + 0.01;
                    let diff = herglotz_eval(z, t).unwrap().re - eval_kernel_at(z, t).unwrap();
                    worst = worst.max(diff.abs());
                }
            }
        }
        assert!(worst <= 1e-12, "worst = {worst:e}");
    }

    proptest! {
        #[test]
        fn closed_forms_agree(r in 0.0..0.99999f64, theta in -10.0..10.0f64) {
            let a = eval_kernel(r, theta).unwrap();
            let b = eval_kernel_modulus(r, theta).unwrap();
            prop_assert!(forms_agree(a, b, 4.0), "{} vs {}", a, b);
        }

        #[test]
        fn positive_and_even(r in 0.0..0.99999f64, theta in -10.0..10.0f64) {
            let a = eval_kernel(r, theta).unwrap();
            prop_assert!(a >= 0.0);
            prop_assert_eq!(a, eval_kernel(r, -theta).unwrap());
        }
    }
}
