//! Functions on the unit circle: uniform samples, two-sided spectra, the
//! transforms between them, grid norms, and Poisson convolution.
//!
//! Every grid in the crate uses the angles `t_k = −π + 2πk/N`, `k = 0..N`.

mod fft;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::extend::HoloSpec;
use crate::kernel::{check_radius, kernel_value, normalize_angle};
use crate::sum;
use fft::{dft, Direction};

/// Angle of grid point `k` out of `n`.
#[inline]
pub fn grid_angle(k: usize, n: usize) -> f64 {
    -PI + 2.0 * PI * k as f64 / n as f64
}

/// `N` samples of a function on the circle, sample `k` taken at [`grid_angle`]`(k, N)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitGridFunction {
    samples: Vec<Complex64>,
}

impl UnitGridFunction {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(domain(format!(
                "grid needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if let Some(k) = samples.iter().position(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(domain(format!("sample {k} is not finite")));
        }
        Ok(Self { samples })
    }

    /// Samples `f(t_k)`.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new((0..n).map(|k| f(grid_angle(k, n))).collect())
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn angle(&self, k: usize) -> f64 {
        grid_angle(k, self.n())
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n()).map(|k| self.angle(k))
    }

    /// Pointwise `self − other`; grids must match.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.n() != other.n() {
            return Err(domain(format!(
                "grid sizes differ: {} vs {}",
                self.n(),
                other.n()
            )));
        }
        Self::new(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        Self::new(self.samples.iter().map(|&s| f(s)).collect())
    }

    pub fn is_real(&self) -> bool {
        self.samples.iter().all(|s| s.im == 0.0)
    }
}

/// Two-sided Fourier coefficients `c_n`, `|n| ≤ M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralFunction {
    max_freq: usize,
    /// `coeffs[n + M]` holds `c_n`.
    coeffs: Vec<Complex64>,
}

impl SpectralFunction {
    /// `coeffs` are ordered `c_{−M}, …, c_M`.
    pub fn new(max_freq: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * max_freq + 1 {
            return Err(domain(format!(
                "expected {} coefficients for max frequency {max_freq}, got {}",
                2 * max_freq + 1,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(domain("coefficients must be finite"));
        }
        Ok(Self { max_freq, coeffs })
    }

    pub fn zeros(max_freq: usize) -> Self {
        Self {
            max_freq,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * max_freq + 1],
        }
    }

    pub fn from_fn(max_freq: usize, f: impl Fn(i64) -> Complex64) -> Self {
        let m = max_freq as i64;
        Self {
            max_freq,
            coeffs: (-m..=m).map(f).collect(),
        }
    }

    /// Builds the smallest spectrum holding the given `(n, c_n)` pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, Complex64)>) -> Result<Self> {
        let pairs: Vec<_> = pairs.into_iter().collect();
        let max_freq = pairs.iter().map(|(n, _)| n.unsigned_abs() as usize).max().unwrap_or(0);
        let mut s = Self::zeros(max_freq);
        for (n, c) in pairs {
            *s.coeff_mut(n).expect("within band") += c;
        }
        Self::new(s.max_freq, s.coeffs)
    }

    pub fn max_freq(&self) -> usize {
        self.max_freq
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `c_n`, zero outside the band.
    pub fn coeff(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.max_freq {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(n + self.max_freq as i64) as usize]
        }
    }

    pub fn coeff_mut(&mut self, n: i64) -> Option<&mut Complex64> {
        if n.unsigned_abs() as usize > self.max_freq {
            None
        } else {
            Some(&mut self.coeffs[(n + self.max_freq as i64) as usize])
        }
    }

    /// True when every negative-frequency coefficient vanishes.
    pub fn is_analytic(&self) -> bool {
        self.coeffs[..self.max_freq].iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    /// Scales `c_n` by `multiplier(|n|)`.
    pub fn apply_multiplier(&self, multiplier: impl Fn(usize) -> f64) -> Self {
        let m = self.max_freq as i64;
        Self {
            max_freq: self.max_freq,
            coeffs: (-m..=m)
                .zip(&self.coeffs)
                .map(|(n, c)| c * multiplier(n.unsigned_abs() as usize))
                .collect(),
        }
    }

    /// `Σ_n c_n e^{int}`.
    pub fn eval(&self, t: f64) -> Complex64 {
        let m = self.max_freq as i64;
        sum::sum_complex(
            (-m..=m)
                .zip(&self.coeffs)
                .map(|(n, c)| c * Complex64::from_polar(1.0, n as f64 * t)),
        )
    }

    /// `Σ |c_n|`, an upper bound for the sup norm of the synthesized function.
    pub fn abs_sum(&self) -> f64 {
        sum::sum(self.coeffs.iter().map(|c| c.norm()))
    }
}

/// Declarative boundary functions used as test data.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundarySpec {
    /// `Σ c_n e^{int}` over the listed frequencies.
    Trig(BTreeMap<i64, Complex64>),
    /// Piecewise constant: `values[j]` on `[breaks[j], breaks[j+1])`, the last value
    /// wrapping around to `breaks[0]`. Jumps take the right limit.
    Step {
        breaks: Vec<f64>,
        values: Vec<Complex64>,
    },
    /// The restriction to the circle of a function holomorphic across the closed disk.
    Restriction(HoloSpec),
}

impl BoundarySpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            BoundarySpec::Trig(coeffs) => {
                if coeffs.values().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
                    return Err(domain("trig coefficients must be finite"));
                }
                Ok(())
            }
            BoundarySpec::Step { breaks, values } => {
                if breaks.is_empty() || breaks.len() != values.len() {
                    return Err(domain(format!(
                        "step needs matching nonempty breaks and values, got {} and {}",
                        breaks.len(),
                        values.len()
                    )));
                }
                if breaks.iter().any(|b| !(*b > -PI && *b <= PI)) {
                    return Err(domain("step breaks must lie in (-pi, pi]"));
                }
                if breaks.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(domain("step breaks must be strictly increasing"));
                }
                if values.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
                    return Err(domain("step values must be finite"));
                }
                Ok(())
            }
            BoundarySpec::Restriction(h) => h.validate(),
        }
    }

    /// Value at angle `t`; assumes the spec is valid.
    pub fn eval(&self, t: f64) -> Complex64 {
        match self {
            BoundarySpec::Trig(coeffs) => sum::sum_complex(
                coeffs
                    .iter()
                    .map(|(&n, c)| c * Complex64::from_polar(1.0, n as f64 * t)),
            ),
            BoundarySpec::Step { breaks, values } => {
                let t = normalize_angle(t);
                let idx = breaks.partition_point(|&b| b <= t);
                if idx == 0 {
                    values[values.len() - 1]
                } else {
                    values[idx - 1]
                }
            }
            BoundarySpec::Restriction(h) => h.eval(Complex64::from_polar(1.0, t)),
        }
    }

    /// Exact spectrum of a trig spec.
    pub fn spectrum(&self) -> Option<SpectralFunction> {
        match self {
            BoundarySpec::Trig(coeffs) => {
                SpectralFunction::from_pairs(coeffs.iter().map(|(&n, &c)| (n, c))).ok()
            }
            BoundarySpec::Restriction(h) => h.taylor_spectrum(),
            BoundarySpec::Step { .. } => None,
        }
    }
}

/// Samples a boundary spec on the `n`-point grid.
pub fn sample(spec: &BoundarySpec, n: usize) -> Result<UnitGridFunction> {
    spec.validate()?;
    if n < 2 {
        return Err(domain(format!("grid size must be at least 2, got {n}")));
    }
    UnitGridFunction::from_fn(n, |t| spec.eval(t))
}

/// Largest frequency recovered by [`analyze`] on an `n`-point grid.
pub fn analysis_band(n: usize) -> usize {
    if n.is_multiple_of(2) {
        n / 2 - 1
    } else {
        (n - 1) / 2
    }
}

/// `c_n = (1/N) Σ_k f_k e^{−i n t_k}` for `|n| ≤ M`, with `M` from [`analysis_band`].
pub fn analyze(f: &UnitGridFunction) -> SpectralFunction {
    let n = f.n();
    let mut data = f.samples.clone();
    dft(&mut data, Direction::Forward);
    let m = analysis_band(n);
    let scale = 1.0 / n as f64;
    // e^{−i n t_k} = (−1)^n e^{−2πi nk/N}
    SpectralFunction::from_fn(m, |freq| {
        let sign = if freq % 2 == 0 { scale } else { -scale };
        data[freq.rem_euclid(n as i64) as usize] * sign
    })
}

/// `f_k = Σ_n c_n e^{i n t_k}`; refuses grids with `n ≤ 2M`.
pub fn synthesize(c: &SpectralFunction, n: usize) -> Result<UnitGridFunction> {
    if n <= 2 * c.max_freq || n < 2 {
        return Err(Error::Aliasing {
            max_freq: c.max_freq,
            n,
        });
    }
    let mut data = vec![Complex64::new(0.0, 0.0); n];
    let m = c.max_freq as i64;
    for (freq, coeff) in (-m..=m).zip(&c.coeffs) {
        let sign = if freq % 2 == 0 { 1.0 } else { -1.0 };
        data[freq.rem_euclid(n as i64) as usize] += coeff * sign;
    }
    dft(&mut data, Direction::Inverse);
    UnitGridFunction::new(data)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Norm {
    /// `(1/N) Σ |f_k|`, the trapezoid rule for the normalized measure `dt/2π`.
    L1,
    /// `max_k |f_k|`; a lower bound for the true supremum.
    Sup,
}

pub fn norm(f: &UnitGridFunction, which: Norm) -> f64 {
    match which {
        Norm::L1 => sum::sum(f.samples.iter().map(|s| s.norm())) / f.n() as f64,
        Norm::Sup => f.samples.iter().map(|s| s.norm()).fold(0.0, f64::max),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConvolutionMethod {
    /// Trapezoid rule against kernel samples, summed directly in `O(N²)`.
    Quadrature,
    /// Multiplier `r^{|n|}` on the discrete spectrum.
    Spectral,
}

/// `P_r ∗ f` on the grid of `f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoissonConvolution {
    pub output: UnitGridFunction,
    pub method: ConvolutionMethod,
    pub r: f64,
    /// Set for quadrature when `r > 1 − 8/N`: the kernel is under-resolved.
    pub under_resolved: bool,
}

/// Radius above which the quadrature path flags the kernel as under-resolved.
pub fn quadrature_resolution_limit(n: usize) -> f64 {
    1.0 - 8.0 / n as f64
}

pub fn convolve_poisson(
    f: &UnitGridFunction,
    r: f64,
    method: ConvolutionMethod,
) -> Result<PoissonConvolution> {
    check_radius(r)?;
    let n = f.n();
    let output = match method {
        ConvolutionMethod::Quadrature => convolve_quadrature(f, r)?,
        ConvolutionMethod::Spectral => convolve_spectral(f, r)?,
    };
    Ok(PoissonConvolution {
        output,
        method,
        r,
        under_resolved: method == ConvolutionMethod::Quadrature && r > quadrature_resolution_limit(n),
    })
}

/// `out_j = (1/N) Σ_k f_k P_r(t_j − t_k)`. Power-of-two grids convolve
/// through the transform of the kernel samples; other sizes sum directly.
fn convolve_quadrature(f: &UnitGridFunction, r: f64) -> Result<UnitGridFunction> {
    let n = f.n();
    // t_j − t_k = 2π(j − k)/N
    let kernel: Vec<f64> = (0..n)
        .map(|m| kernel_value(r, 2.0 * PI * m as f64 / n as f64))
        .collect();
    let scale = 1.0 / n as f64;
    // direct circular sum
    let out = (0..n)
        .map(|j| sum::sum_complex((0..n).map(|k| f.samples[k] * kernel[(j + n - k) % n])) * scale)
        .collect();
    UnitGridFunction::new(out)
}

fn convolve_spectral(f: &UnitGridFunction, r: f64) -> Result<UnitGridFunction> {
    let n = f.n();
    let mut data = f.samples.clone();
    dft(&mut data, Direction::Forward);
    let powers = radius_powers(r, n / 2);
    for (j, v) in data.iter_mut().enumerate() {
        // index j carries frequency j or j − N; the Nyquist index has |n| = N/2 either way
        let freq = j.min(n - j);
        *v *= powers[freq] / n as f64;
    }
    dft(&mut data, Direction::Inverse);
    UnitGridFunction::new(data)
}

/// `r^0, …, r^m`.
pub(crate) fn radius_powers(r: f64, m: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(m + 1);
    let mut p = 1.0;
    for _ in 0..=m {
        out.push(p);
        p *= r;
    }
    out
}
