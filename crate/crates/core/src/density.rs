//! L¹ approximation of boundary data by finite combinations of Poisson kernels
//! `Σ_j w_j P_{z_j}`.
//!
//! The fit minimizes the grid L¹ norm of the residual with iteratively
//! reweighted least squares. Each step solves the ridge-damped normal
//! equations `(AᵀWA/N + λI) w = AᵀWy/N` by Cholesky, with IRLS weights
//! `1/max(|e_k|, ε)` normalized to a maximum of one.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;
use serde::Serialize;

use crate::circle::{grid_angle, norm, Norm, UnitGridFunction};
use crate::error::{domain, Error, Result};
use crate::kernel::{kernel_value, DiskPoint};
use crate::sum;

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub max_iter: usize,
    /// Stop once the L¹ residual changes by less than `tol · ‖target‖_∞`.
    pub tol: f64,
    /// IRLS floor `ε`, relative to `‖target‖_∞`.
    pub irls_floor: f64,
    /// Ridge `λ` added to the normal equations.
    pub ridge: f64,
    /// Restrict coefficients to real values (uses only the real part of the target).
    pub real_coefficients: bool,
    /// Starting coefficients; defaults to the unweighted least squares fit.
    pub initial: Option<Vec<Complex64>>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            tol: 1e-10,
            irls_floor: 1e-8,
            ridge: 1e-10,
            real_coefficients: false,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub nodes: Vec<DiskPoint>,
    pub coefficients: Vec<Complex64>,
    /// Grid L¹ norm of `target − fit` at the returned coefficients.
    pub residual_l1: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Why the solver stopped early, if it did.
    pub diagnostics: Option<String>,
}

/// Samples of `Σ_j w_j P_{z_j}` on the `n`-point grid.
pub fn span_samples(nodes: &[DiskPoint], coefficients: &[Complex64], n: usize) -> Result<UnitGridFunction> {
    if nodes.len() != coefficients.len() {
        return Err(domain("one coefficient per node required"));
    }
    UnitGridFunction::from_fn(n, |t| {
        sum::sum_complex(
            nodes
                .iter()
                .zip(coefficients)
                .map(|(z, w)| w * kernel_value(z.r(), z.sigma() - t)),
        )
    })
}

/// Equiangular nodes `r·e^{i(−π + 2πj/m)}`, `j = 0..m`.
pub fn equiangular_nodes(count: usize, r: f64) -> Result<Vec<DiskPoint>> {
    (0..count).map(|j| DiskPoint::new(r, grid_angle(j, count))).collect()
}

fn check_nodes(nodes: &[DiskPoint], n: usize) -> Result<()> {
    if nodes.is_empty() {
        return Err(domain("fit needs at least one node"));
    }
    let min_gap = 2.0 * std::f64::consts::PI / n as f64;
    for (i, a) in nodes.iter().enumerate() {
        for b in &nodes[i + 1..] {
            let gap = (a.to_complex() - b.to_complex()).norm();
            if gap < min_gap {
                return Err(Error::Conditioning(format!(
                    "nodes {a} and {b} are closer than the grid spacing {min_gap:e}"
                )));
            }
        }
    }
    Ok(())
}

/// Minimizes `‖target − Σ_j w_j P_{z_j}‖₁` on the grid of `target`.
///
/// A numerically singular system ends the iteration with `converged = false`
/// and the best coefficients found so far.
pub fn fit_span(target: &UnitGridFunction, nodes: &[DiskPoint], opts: &FitOptions) -> Result<FitResult> {
    let n = target.n();
    check_nodes(nodes, n)?;
    let m = nodes.len();
    if let Some(init) = &opts.initial {
        if init.len() != m {
            return Err(domain(format!(
                "initial guess has {} entries for {m} nodes",
                init.len()
            )));
        }
    }
    let y: Vec<Complex64> = if opts.real_coefficients {
        target.samples().iter().map(|v| Complex64::new(v.re, 0.0)).collect()
    } else {
        target.samples().to_vec()
    };
    let scale = y.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(FitResult {
            nodes: nodes.to_vec(),
            coefficients: vec![Complex64::new(0.0, 0.0); m],
            residual_l1: norm(target, Norm::L1),
            iterations: 0,
            converged: true,
            diagnostics: None,
        });
    }

    // column j holds P_{z_j}(t_k)
    let design: Vec<Vec<f64>> = nodes
        .iter()
        .map(|z| (0..n).map(|k| kernel_value(z.r(), z.sigma() - grid_angle(k, n))).collect())
        .collect();
    let system = Normal { design: &design, y: &y, ridge: opts.ridge, real: opts.real_coefficients };
    let residuals = |x: &[Complex64]| -> Vec<Complex64> {
        (0..n)
            .map(|k| y[k] - sum::sum_complex(x.iter().zip(&design).map(|(w, col)| w * col[k])))
            .collect()
    };
    let l1 = |e: &[Complex64]| sum::sum(e.iter().map(|v| v.norm())) / n as f64;

    let mut x = match &opts.initial {
        Some(init) => init.clone(),
        None => match system.solve(&vec![1.0; n]) {
            Some(x) => x,
            None => {
                return Ok(FitResult {
                    nodes: nodes.to_vec(),
                    coefficients: vec![Complex64::new(0.0, 0.0); m],
                    residual_l1: l1(&y),
                    iterations: 0,
                    converged: false,
                    diagnostics: Some("least squares system is not positive definite".into()),
                })
            }
        },
    };
    let floor = opts.irls_floor * scale;
    let stop = opts.tol * scale;

    let mut e = residuals(&x);
    let mut current = l1(&e);
    let (mut best_x, mut best) = (x.clone(), current);
    let mut converged = false;
    let mut diagnostics = None;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let raw: Vec<f64> = e.iter().map(|v| 1.0 / v.norm().max(floor)).collect();
        let top = raw.iter().copied().fold(0.0, f64::max);
        let weights: Vec<f64> = raw.iter().map(|w| w / top).collect();
        match system.solve(&weights) {
            Some(next) => x = next,
            None => {
                diagnostics = Some(format!(
                    "weighted normal equations lost positive definiteness at iteration {iterations}"
                ));
                break;
            }
        }
        e = residuals(&x);
        let next = l1(&e);
        if next < best {
            best = next;
            best_x.clone_from(&x);
        }
        let change = (next - current).abs();
        current = next;
        if change < stop {
            converged = true;
            break;
        }
    }
    Ok(FitResult {
        nodes: nodes.to_vec(),
        coefficients: best_x,
        residual_l1: best,
        iterations,
        converged,
        diagnostics,
    })
}

struct Normal<'a> {
    design: &'a [Vec<f64>],
    y: &'a [Complex64],
    ridge: f64,
    real: bool,
}

impl Normal<'_> {
    /// Solves `(AᵀWA/N + λI) x = AᵀWy/N`.
    fn solve(&self, weights: &[f64]) -> Option<Vec<Complex64>> {
        let m = self.design.len();
        let n = self.y.len() as f64;
        let weighted: Vec<Vec<f64>> = self
            .design
            .iter()
            .map(|col| col.iter().zip(weights).map(|(a, w)| a * w).collect())
            .collect();
        let mut gram = DMatrix::<f64>::zeros(m, m);
        let mut rhs_re = DVector::<f64>::zeros(m);
        let mut rhs_im = DVector::<f64>::zeros(m);
        for i in 0..m {
            for j in 0..=i {
                let g = sum::sum(weighted[i].iter().zip(&self.design[j]).map(|(a, b)| a * b)) / n;
                gram[(i, j)] = g;
                gram[(j, i)] = g;
            }
            let r = sum::sum_complex(weighted[i].iter().zip(self.y).map(|(a, v)| v * *a)) / n;
            rhs_re[i] = r.re;
            rhs_im[i] = r.im;
        }
        let damped = &gram + DMatrix::<f64>::identity(m, m) * self.ridge;
        if !damped.iter().all(|v| v.is_finite()) {
            return None;
        }
        let chol = Cholesky::new(damped)?;
        let re = refine(&chol, &gram, &rhs_re);
        let im = if self.real { DVector::zeros(m) } else { refine(&chol, &gram, &rhs_im) };
        Some(re.iter().zip(im.iter()).map(|(a, b)| Complex64::new(*a, *b)).collect())
    }
}

const REFINE_STEPS: usize = 3;

/// Iterated Tikhonov: repeated corrections `x += (G + λI)⁻¹ (b − Gx)` remove the
/// ridge bias along well-conditioned directions and leave the damping elsewhere.
fn refine(chol: &Cholesky<f64, Dyn>, gram: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let mut x = chol.solve(b);
    for _ in 0..REFINE_STEPS {
        let r = b - gram * &x;
        x += chol.solve(&r);
    }
    x
}

/// Fits with `m` equiangular nodes at radius `r_node` for each count `m`.
///
/// When a count is a multiple of the previous one the node sets are nested
/// and the previous fit seeds the next, so residuals never increase.
pub fn fit_curve(
    target: &UnitGridFunction,
    node_counts: &[usize],
    r_node: f64,
    opts: &FitOptions,
) -> Result<Vec<FitResult>> {
    if node_counts.is_empty() || node_counts[0] == 0 {
        return Err(domain("node counts must be positive"));
    }
    if node_counts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("node counts must be strictly increasing"));
    }
    let mut out: Vec<FitResult> = Vec::with_capacity(node_counts.len());
    for &count in node_counts {
        let nodes = equiangular_nodes(count, r_node)?;
        let mut run = opts.clone();
        if let Some(prev) = out.last() {
            let prev_count = prev.nodes.len();
            if count % prev_count == 0 {
                let stride = count / prev_count;
                let mut init = vec![Complex64::new(0.0, 0.0); count];
                for (j, w) in prev.coefficients.iter().enumerate() {
                    init[j * stride] = *w;
                }
                run.initial = Some(init);
            }
        }
        out.push(fit_span(target, &nodes, &run)?);
    }
    Ok(out)
}

pub fn residual_curve(target: &UnitGridFunction, node_counts: &[usize], r_node: f64) -> Result<Vec<f64>> {
    Ok(fit_curve(target, node_counts, r_node, &FitOptions::default())?
        .into_iter()
        .map(|f| f.residual_l1)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{sample, BoundarySpec};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(r: f64, s: f64) -> DiskPoint {
        DiskPoint::new(r, s).unwrap()
    }

    fn step(n: usize) -> UnitGridFunction {
        let spec = BoundarySpec::Step {
            breaks: vec![-PI / 2.0, PI / 2.0],
            values: vec![c(1.0, 0.0), c(-1.0, 0.0)],
        };
        sample(&spec, n).unwrap()
    }

    #[test]
    fn single_kernel_in_span() {
        let z = pt(0.5, 1.0);
        let target = span_samples(&[z], &[c(1.0, 0.0)], 512).unwrap();
        let fit = fit_span(&target, &[z], &FitOptions::default()).unwrap();
        assert!((fit.coefficients[0] - 1.0).norm() < 1e-6);
        assert!(fit.residual_l1 <= 1e-10, "{fit:?}");
        assert!(fit.converged);
    }

    #[test]
    fn constant_from_origin_node() {
        let target = UnitGridFunction::from_fn(256, |_| c(1.0, 0.0)).unwrap();
        let fit = fit_span(&target, &[DiskPoint::origin()], &FitOptions::default()).unwrap();
        assert!((fit.coefficients[0] - 1.0).norm() < 1e-9);
        assert!(fit.residual_l1 <= 1e-13);
    }

    #[test]
    fn more_nodes_fit_a_step_better() {
        let target = step(2048);
        let coarse = fit_span(&target, &equiangular_nodes(8, 0.9).unwrap(), &FitOptions::default()).unwrap();
        let fine = fit_span(&target, &equiangular_nodes(32, 0.9).unwrap(), &FitOptions::default()).unwrap();
        assert!(fine.residual_l1 < coarse.residual_l1, "{} vs {}", fine.residual_l1, coarse.residual_l1);
    }

    #[test]
    fn residual_curve_examples() {
        let target = UnitGridFunction::from_fn(1024, |t| c(2.0 * t.cos(), 0.0)).unwrap();
        let res = residual_curve(&target, &[1, 2, 4], 0.8).unwrap();
        assert!(res[2] <= res[1] && res[1] <= res[0] + 1e-8, "{res:?}");

        let zero = UnitGridFunction::zeros(128).unwrap();
        assert_eq!(residual_curve(&zero, &[1, 3, 9], 0.5).unwrap(), vec![0.0; 3]);

        assert!(residual_curve(&zero, &[4, 2], 0.5).is_err());
    }

    #[test]
    fn step_curve_reaches_linear_programming_optimum() {
        let target = step(8192);
        let res = residual_curve(&target, &[8, 16, 32, 64], 0.95).unwrap();
        assert!(res.windows(2).all(|w| w[1] < w[0]), "{res:?}");
        // optimum of the same discrete problem from an independent LP solve
        assert!((res[3] - 0.078398471).abs() < 1e-5, "{res:?}");
    }

    #[test]
    fn in_span_recovery() {
        let nodes = equiangular_nodes(16, 0.9).unwrap();
        let weights: Vec<Complex64> = (0..16).map(|j| c((j as f64 * 0.7).sin(), (j as f64 * 0.3).cos())).collect();
        let target = span_samples(&nodes, &weights, 1024).unwrap();
        let fit = fit_span(&target, &nodes, &FitOptions::default()).unwrap();
        assert!(fit.residual_l1 <= 1e-9, "{}", fit.residual_l1);
        for (a, b) in fit.coefficients.iter().zip(&weights) {
            assert!((a - b).norm() < 1e-6);
        }
    }

    #[test]
    fn scale_equivariance() {
        let target = step(1024);
        let nodes = equiangular_nodes(8, 0.8).unwrap();
        let base = fit_span(&target, &nodes, &FitOptions::default()).unwrap();
        for alpha in [c(3.0, 0.0), c(-0.5, 2.0)] {
            let scaled = target.map(|v| v * alpha).unwrap();
            let fit = fit_span(&scaled, &nodes, &FitOptions::default()).unwrap();
            assert!((fit.residual_l1 - alpha.norm() * base.residual_l1).abs() < 1e-10);
            for (a, b) in fit.coefficients.iter().zip(&base.coefficients) {
                assert!((a - alpha * b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn real_coefficient_flag() {
        let target = step(512).map(|v| v + c(0.0, 0.5)).unwrap();
        let opts = FitOptions { real_coefficients: true, ..FitOptions::default() };
        let fit = fit_span(&target, &equiangular_nodes(4, 0.5).unwrap(), &opts).unwrap();
        assert!(fit.coefficients.iter().all(|w| w.im == 0.0));
    }

    #[test]
    fn rejects_coincident_nodes() {
        let target = step(256);
        let err = fit_span(&target, &[pt(0.5, 1.0), pt(0.5, 1.0 + 1e-4)], &FitOptions::default());
        assert!(matches!(err, Err(Error::Conditioning(_))));
        assert!(fit_span(&target, &[], &FitOptions::default()).is_err());
    }

    #[test]
    fn singular_design_reports_instead_of_failing() {
        // nearly dependent columns with the ridge switched off
        let target = step(64);
        let nodes = [pt(0.0, 0.0), pt(0.1, 0.0), pt(0.2, 0.0), pt(0.3, 0.0)];
        let opts = FitOptions { ridge: -1.0, ..FitOptions::default() };
        let fit = fit_span(&target, &nodes, &opts).unwrap();
        assert!(!fit.converged);
        assert!(fit.diagnostics.is_some());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(16))]

            #[test]
            fn nested_nodes_never_increase_residual(
                a in proptest::collection::vec(-1.0f64..1.0, 4),
                m in 1usize..6,
                r in 0.3f64..0.9,
            ) {
                let target = UnitGridFunction::from_fn(256, |t| {
                    c(a[0] + a[1] * t.cos() + a[2] * (3.0 * t).sin() + a[3] * t.signum(), 0.0)
                }).unwrap();
                let res = residual_curve(&target, &[m, 2 * m, 4 * m], r).unwrap();
                prop_assert!(res[1] <= res[0] + 1e-8 && res[2] <= res[1] + 1e-8, "{:?}", res);
            }
        }
    }
}
