//! Poisson extension of boundary data into the disk, reconstruction of
//! holomorphic functions from their (dilated) boundary values, the mean value
//! check for harmonicity, and the tensor-product extension on the bidisk.
//!
//! Only the unit disk is handled. A disk `D(a, R)` reduces to it through
//! `z ↦ (z − a)/R`.

use num_complex::Complex64;
use serde::Serialize;

use crate::circle::{grid_angle, synthesize, SpectralFunction, UnitGridFunction};
use crate::error::{domain, Error, Result};
use crate::kernel::{check_radius, kernel_value, DiskPoint};
use crate::sum;

/// Holomorphic test functions, all analytic across the closed unit disk.
#[derive(Debug, Clone, PartialEq)]
pub enum HoloSpec {
    /// `Σ_{n=0}^{d} a_n zⁿ`.
    Taylor(Vec<Complex64>),
    /// `Π_j (a_j − z)/(1 − ā_j z)` with every `|a_j| < 1`.
    Blaschke(Vec<Complex64>),
    Product(Vec<HoloSpec>),
    Scaled(Complex64, Box<HoloSpec>),
}

impl HoloSpec {
    pub fn constant(c: Complex64) -> Self {
        HoloSpec::Taylor(vec![c])
    }

    /// `zⁿ`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        HoloSpec::Taylor(coeffs)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            HoloSpec::Taylor(a) => {
                if a.is_empty() {
                    return Err(domain("taylor spec needs at least one coefficient"));
                }
                if a.iter().any(|c| !is_finite(*c)) {
                    return Err(domain("taylor coefficients must be finite"));
                }
                Ok(())
            }
            HoloSpec::Blaschke(zeros) => {
                match zeros.iter().find(|a| !is_finite(**a) || a.norm() >= 1.0) {
                    Some(a) => Err(domain(format!(
                        "blaschke zero {a} must lie strictly inside the unit disk"
                    ))),
                    None => Ok(()),
                }
            }
            HoloSpec::Product(factors) => factors.iter().try_for_each(HoloSpec::validate),
            HoloSpec::Scaled(c, inner) => {
                if !is_finite(*c) {
                    return Err(domain("scale factor must be finite"));
                }
                inner.validate()
            }
        }
    }

    /// Exact value at `z`; meaningful for `|z| ≤ 1` on a valid spec.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            HoloSpec::Taylor(a) => a.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c),
            HoloSpec::Blaschke(zeros) => zeros
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, a| acc * (a - z) / (1.0 - a.conj() * z)),
            HoloSpec::Product(factors) => factors
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, f| acc * f.eval(z)),
            HoloSpec::Scaled(c, inner) => c * inner.eval(z),
        }
    }

    /// Every variant is holomorphic on a disk of radius greater than one.
    pub fn is_closed_disk_analytic(&self) -> bool {
        match self {
            HoloSpec::Taylor(_) => true,
            HoloSpec::Blaschke(zeros) => zeros.iter().all(|a| a.norm() < 1.0),
            HoloSpec::Product(factors) => factors.iter().all(HoloSpec::is_closed_disk_analytic),
            HoloSpec::Scaled(_, inner) => inner.is_closed_disk_analytic(),
        }
    }

    /// Boundary spectrum of a polynomial: `c_n = a_n` for `0 ≤ n ≤ d`.
    pub fn taylor_spectrum(&self) -> Option<SpectralFunction> {
        match self {
            HoloSpec::Taylor(a) => {
                let d = a.len() - 1;
                Some(SpectralFunction::from_fn(d, |n| {
                    if n >= 0 {
                        a[n as usize]
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }))
            }
            _ => None,
        }
    }

    /// The product `self · other`, simplified where the algebra is closed:
    /// polynomials multiply coefficientwise, Blaschke products merge zero lists.
    pub fn multiply(&self, other: &HoloSpec) -> HoloSpec {
        match (self, other) {
            (HoloSpec::Taylor(a), HoloSpec::Taylor(b)) => {
                let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
                for (i, x) in a.iter().enumerate() {
                    for (j, y) in b.iter().enumerate() {
                        out[i + j] += x * y;
                    }
                }
                HoloSpec::Taylor(out)
            }
            (HoloSpec::Blaschke(a), HoloSpec::Blaschke(b)) => {
                HoloSpec::Blaschke(a.iter().chain(b).copied().collect())
            }
            (HoloSpec::Scaled(c, inner), g) | (g, HoloSpec::Scaled(c, inner)) => {
                HoloSpec::Scaled(*c, Box::new(inner.multiply(g)))
            }
            (f, g) => HoloSpec::Product(vec![f.clone(), g.clone()]),
        }
    }
}

fn is_finite(c: Complex64) -> bool {
    c.re.is_finite() && c.im.is_finite()
}

/// Boundary data in either representation.
#[derive(Debug, Clone, Copy)]
pub enum BoundaryData<'a> {
    Grid(&'a UnitGridFunction),
    Spectral(&'a SpectralFunction),
}

impl<'a> From<&'a UnitGridFunction> for BoundaryData<'a> {
    fn from(f: &'a UnitGridFunction) -> Self {
        BoundaryData::Grid(f)
    }
}

impl<'a> From<&'a SpectralFunction> for BoundaryData<'a> {
    fn from(f: &'a SpectralFunction) -> Self {
        BoundaryData::Spectral(f)
    }
}

/// Poisson integral `F(z) = (1/2π) ∫ f(e^{it}) P_z(t) dt`.
///
/// Grid data is integrated with the trapezoid rule; spectral data is summed
/// exactly as `Σ_n c_n r^{|n|} e^{inσ}`.
pub fn poisson_extend<'a>(boundary: impl Into<BoundaryData<'a>>, z: DiskPoint) -> Result<Complex64> {
    check_radius(z.r())?;
    Ok(match boundary.into() {
        BoundaryData::Grid(f) => extend_grid(f, z),
        BoundaryData::Spectral(c) => extend_spectral(c, z),
    })
}

fn extend_grid(f: &UnitGridFunction, z: DiskPoint) -> Complex64 {
    let n = f.n();
    let (r, sigma) = (z.r(), z.sigma());
    sum::sum_complex(
        f.samples()
            .iter()
            .enumerate()
            .map(|(k, s)| s * kernel_value(r, sigma - grid_angle(k, n))),
    ) / n as f64
}

fn extend_spectral(c: &SpectralFunction, z: DiskPoint) -> Complex64 {
    two_sided_horner(c.max_freq(), |n| c.coeff(n), z.to_complex())
}

/// `Σ_{n≥0} c_n wⁿ + Σ_{n≥1} c_{−n} w̄ⁿ`, one Horner pass per sign.
fn two_sided_horner(max_freq: usize, coeff: impl Fn(i64) -> Complex64, w: Complex64) -> Complex64 {
    let m = max_freq as i64;
    let positive = (0..=m).rev().fold(Complex64::new(0.0, 0.0), |acc, n| acc * w + coeff(n));
    let wbar = w.conj();
    let negative = (1..=m).rev().fold(Complex64::new(0.0, 0.0), |acc, n| acc * wbar + coeff(-n));
    positive + negative * wbar
}

/// Outcome of [`reproduce_interior`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Reproduction {
    pub z: DiskPoint,
    pub rho: f64,
    pub n: usize,
    /// `f(z)`.
    pub exact: Complex64,
    /// `(1/2π) ∫ f(ρe^{it}) P_{r/ρ}(σ − t) dt` by the trapezoid rule.
    pub integral: Complex64,
    pub residual: f64,
}

/// Reconstructs `f(z)` from the dilate `f_ρ(t) = f(ρe^{it})` through the
/// Poisson kernel `P_{r/ρ}`. `ρ = 1` uses the boundary values themselves.
pub fn reproduce_interior(f: &HoloSpec, z: DiskPoint, rho: f64, n: usize) -> Result<Reproduction> {
    f.validate()?;
    if !(rho > z.r() && rho <= 1.0) {
        return Err(domain(format!(
            "dilation must satisfy |z| = {} < rho <= 1, got {rho}",
            z.r()
        )));
    }
    if rho == 1.0 && !f.is_closed_disk_analytic() {
        return Err(domain("rho = 1 needs a function analytic across the closed disk"));
    }
    if n < 2 {
        return Err(domain(format!("grid size must be at least 2, got {n}")));
    }
    let ratio = z.r() / rho;
    let sigma = z.sigma();
    let integral = sum::sum_complex((0..n).map(|k| {
        let t = grid_angle(k, n);
        f.eval(Complex64::from_polar(rho, t)) * kernel_value(ratio, sigma - t)
    })) / n as f64;
    let exact = f.eval(z.to_complex());
    Ok(Reproduction {
        z,
        rho,
        n,
        exact,
        integral,
        residual: (exact - integral).norm(),
    })
}

/// Mean value residual `|F(a) − (1/M) Σ_j F(a + ρ e^{2πij/M})|` of the Poisson
/// extension `F` of `boundary`.
pub fn check_harmonic(boundary: &SpectralFunction, a: DiskPoint, radius: f64, m: usize) -> Result<f64> {
    if !(radius > 0.0 && a.r() + radius < 1.0) {
        return Err(domain(format!(
            "circle of radius {radius} about {a} is not contained in the disk"
        )));
    }
    if m < 16 {
        return Err(domain(format!("need at least 16 points on the circle, got {m}")));
    }
    let center = a.to_complex();
    let values = (0..m)
        .map(|j| {
            let w = center + Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * j as f64 / m as f64);
            DiskPoint::from_complex(w).map(|p| extend_spectral(boundary, p))
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = sum::sum_complex(values) / m as f64;
    Ok((extend_spectral(boundary, a) - mean).norm())
}

/// Coefficients `c_{m,n}`, `|m| ≤ M1`, `|n| ≤ M2`, of a function on the torus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BidiskSpectrum {
    m1: usize,
    m2: usize,
    /// Row-major: `coeffs[(m + M1)(2M2 + 1) + (n + M2)]`.
    coeffs: Vec<Complex64>,
}

impl BidiskSpectrum {
    pub fn new(m1: usize, m2: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        let expected = (2 * m1 + 1) * (2 * m2 + 1);
        if coeffs.len() != expected {
            return Err(domain(format!(
                "expected {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        if !coeffs.iter().copied().all(is_finite) {
            return Err(domain("bidisk coefficients must be finite"));
        }
        Ok(Self { m1, m2, coeffs })
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = ((i64, i64), Complex64)>) -> Result<Self> {
        let pairs: Vec<_> = pairs.into_iter().collect();
        let m1 = pairs.iter().map(|((m, _), _)| m.unsigned_abs() as usize).max().unwrap_or(0);
        let m2 = pairs.iter().map(|((_, n), _)| n.unsigned_abs() as usize).max().unwrap_or(0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (2 * m1 + 1) * (2 * m2 + 1)];
        for ((m, n), c) in pairs {
            coeffs[Self::index(m1, m2, m, n)] += c;
        }
        Self::new(m1, m2, coeffs)
    }

    fn index(m1: usize, m2: usize, m: i64, n: i64) -> usize {
        (m + m1 as i64) as usize * (2 * m2 + 1) + (n + m2 as i64) as usize
    }

    pub fn max_freqs(&self) -> (usize, usize) {
        (self.m1, self.m2)
    }

    pub fn coeff(&self, m: i64, n: i64) -> Complex64 {
        if m.unsigned_abs() as usize > self.m1 || n.unsigned_abs() as usize > self.m2 {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[Self::index(self.m1, self.m2, m, n)]
        }
    }

    /// Row `m` as a spectrum in the second variable.
    fn row(&self, m: i64) -> SpectralFunction {
        SpectralFunction::from_fn(self.m2, |n| self.coeff(m, n))
    }
}

/// `Σ c_{m,n} r1^{|m|} r2^{|n|} e^{i(mσ1 + nσ2)}`, the tensor-product Poisson extension.
pub fn bidisk_extend(spec: &BidiskSpectrum, z1: DiskPoint, z2: DiskPoint) -> Result<Complex64> {
    check_radius(z1.r())?;
    check_radius(z2.r())?;
    let w2 = z2.to_complex();
    let rows: Vec<Complex64> = (-(spec.m1 as i64)..=spec.m1 as i64)
        .map(|m| two_sided_horner(spec.m2, |n| spec.coeff(m, n), w2))
        .collect();
    Ok(two_sided_horner(spec.m1, |m| rows[(m + spec.m1 as i64) as usize], z1.to_complex()))
}

/// Iterated trapezoid quadrature of the boundary data against
/// `P_{z1}(s) P_{z2}(t)` on an `n1 × n2` grid. `O(n1·n2)` memory; an oracle for
/// [`bidisk_extend`].
pub fn bidisk_extend_quadrature(
    spec: &BidiskSpectrum,
    z1: DiskPoint,
    z2: DiskPoint,
    n1: usize,
    n2: usize,
) -> Result<Complex64> {
    check_radius(z1.r())?;
    check_radius(z2.r())?;
    if n1 <= 2 * spec.m1 || n2 <= 2 * spec.m2 {
        return Err(Error::Aliasing {
            max_freq: spec.m1.max(spec.m2),
            n: n1.min(n2),
        });
    }
    // g_m(t_k) for each row m, then f(s_j, t_k) = Σ_m g_m(t_k) e^{ims_j}
    let rows = (-(spec.m1 as i64)..=spec.m1 as i64)
        .map(|m| synthesize(&spec.row(m), n2))
        .collect::<Result<Vec<_>>>()?;
    let k1: Vec<f64> = (0..n1).map(|j| kernel_value(z1.r(), z1.sigma() - grid_angle(j, n1))).collect();
    let k2: Vec<f64> = (0..n2).map(|k| kernel_value(z2.r(), z2.sigma() - grid_angle(k, n2))).collect();
    let mut inner = Vec::with_capacity(n1);
    for (j, kj) in k1.iter().enumerate() {
        let s = grid_angle(j, n1);
        let phases: Vec<Complex64> = (-(spec.m1 as i64)..=spec.m1 as i64)
            .map(|m| Complex64::from_polar(1.0, m as f64 * s))
            .collect();
        let line = sum::sum_complex((0..n2).map(|k| {
            let value: Complex64 = rows.iter().zip(&phases).map(|(g, p)| g.samples()[k] * p).sum();
            value * k2[k]
        }));
        inner.push(line * kj);
    }
    Ok(sum::sum_complex(inner) / (n1 as f64 * n2 as f64))
}
