//! Conformal classes over a fixed complex.
//!
//! A class is determined by base lengths `L_e`; the metrics in it are
//! `ℓ_e(f) = exp(½(f_u + f_w)) L_e` for vertex functions `f`. This module
//! evaluates and numerically differentiates the normalized functionals in
//! `f`, searches for their critical points by projected gradient descent,
//! and decides whether a class contains a cyclic length metric at all.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::complex::Complex;
use crate::curvature::{
    check_csc, functionals, report, CscCheck, CurvatureError, CurvatureReport, Metric,
};

/// Default central-difference step for the conformal gradients.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Infinity-norm residual below which the log-linear admissibility system
/// counts as consistent.
pub const ADMISSIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ConformalError {
    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("base length {0} is not positive and finite")]
    BadBaseLength(f64),
    #[error("induced metric leaves the realizable set: {0}")]
    Boundary(#[from] CurvatureError),
    #[error("finite-difference stencil at vertex {vertex} leaves the realizable set: {source}")]
    StencilNotRealizable {
        vertex: usize,
        source: CurvatureError,
    },
}

/// Base lengths of a conformal class together with a vertex function
/// selecting one metric in it.
#[derive(Clone, Debug)]
pub struct ConformalData {
    base: Vec<f64>,
    f: Vec<f64>,
}

impl ConformalData {
    pub fn new(c: &Complex, base: Vec<f64>, f: Vec<f64>) -> Result<Self, ConformalError> {
        if base.len() != c.edges().len() {
            return Err(ConformalError::DimensionMismatch {
                expected: c.edges().len(),
                got: base.len(),
            });
        }
        if f.len() != c.n() {
            return Err(ConformalError::DimensionMismatch {
                expected: c.n(),
                got: f.len(),
            });
        }
        for &l in &base {
            if l <= 0.0 || !l.is_finite() {
                return Err(ConformalError::BadBaseLength(l));
            }
        }
        Ok(ConformalData { base, f })
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn with_f(&self, f: Vec<f64>) -> Self {
        ConformalData {
            base: self.base.clone(),
            f,
        }
    }
}

fn induced_lengths(c: &Complex, base: &[f64], f: &[f64]) -> Vec<f64> {
    c.edges()
        .iter()
        .zip(base)
        .map(|(&[i, j], &l)| (0.5 * (f[i] + f[j])).exp() * l)
        .collect()
}

/// The metric selected by `cd.f()`, validated for realizability. An error
/// here means `f` stepped across the boundary of the open realizable set.
pub fn conformal_lengths(c: &Complex, cd: &ConformalData) -> Result<Metric, ConformalError> {
    Ok(Metric::new(c, induced_lengths(c, &cd.base, &cd.f))?)
}

/// Which normalized functional to evaluate or optimize.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Lehr,
    Vehr,
}

impl Target {
    fn eval(self, c: &Complex, g: &Metric) -> Result<f64, CurvatureError> {
        let f = functionals(c, g)?;
        Ok(match self {
            Target::Lehr => f.lehr,
            Target::Vehr => f.vehr,
        })
    }
}

fn eval_at(c: &Complex, base: &[f64], f: &[f64], target: Target) -> Result<f64, CurvatureError> {
    let metric = Metric::new(c, induced_lengths(c, base, f))?;
    target.eval(c, &metric)
}

/// Remove the mean: both functionals are constant along `f -> f + c`, so
/// the search space is the zero-mean hyperplane.
pub fn project_gauge(f: &mut [f64]) {
    let mean = f.iter().sum::<f64>() / f.len() as f64;
    for x in f.iter_mut() {
        *x -= mean;
    }
}

/// Central-difference gradient of the target functional in `f`,
/// Richardson-extrapolated from stencils of width `h` and `2h`.
pub fn grad_fd(
    c: &Complex,
    cd: &ConformalData,
    target: Target,
    h: f64,
) -> Result<Vec<f64>, ConformalError> {
    let n = c.n();
    let mut grad = vec![0.0; n];
    let mut f = cd.f.clone();
    for v in 0..n {
        let center = f[v];
        let probe = |delta: f64, f: &mut Vec<f64>| -> Result<f64, ConformalError> {
            f[v] = center + delta;
            let value = eval_at(c, &cd.base, f, target)
                .map_err(|source| ConformalError::StencilNotRealizable { vertex: v, source });
            f[v] = center;
            value
        };
        let d_h = (probe(h, &mut f)? - probe(-h, &mut f)?) / (2.0 * h);
        let d_2h = (probe(2.0 * h, &mut f)? - probe(-2.0 * h, &mut f)?) / (4.0 * h);
        grad[v] = (4.0 * d_h - d_2h) / 3.0;
    }
    Ok(grad)
}

/// Gradient of the length-normalized functional.
pub fn grad_lehr_fd(c: &Complex, cd: &ConformalData, h: f64) -> Result<Vec<f64>, ConformalError> {
    grad_fd(c, cd, Target::Lehr, h)
}

/// Gradient of the volume-normalized functional.
pub fn grad_vehr_fd(c: &Complex, cd: &ConformalData, h: f64) -> Result<Vec<f64>, ConformalError> {
    grad_fd(c, cd, Target::Vehr, h)
}

#[derive(Clone, Copy, Debug)]
pub struct OptimizeOptions {
    /// Convergence threshold on the projected gradient norm.
    pub tol: f64,
    /// Cap on accepted descent steps.
    pub max_iters: usize,
    /// Finite-difference step for the gradient.
    pub fd_step: f64,
    /// Initial trial step of each backtracking search.
    pub init_step: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    /// Backtracking shrink factor.
    pub shrink: f64,
    /// Trial steps below this abort the line search.
    pub min_step: f64,
    /// Tolerance for the constant-scalar-curvature certificate at the
    /// solution.
    pub csc_tol: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            tol: 1e-8,
            max_iters: 1000,
            fd_step: DEFAULT_FD_STEP,
            init_step: 1.0,
            armijo: 1e-4,
            shrink: 0.5,
            min_step: 1e-14,
            csc_tol: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// Projected gradient norm fell below tolerance.
    Converged,
    /// Accepted-step budget exhausted.
    MaxIterations,
    /// Line search or gradient stencil could not stay inside the realizable
    /// set; the result holds the last feasible point.
    Boundary,
    /// Line search found feasible steps but no sufficient decrease.
    Stalled,
}

/// One optimizer iterate as recorded in the trace.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub value: f64,
    pub grad_norm: f64,
    pub step: f64,
    pub min_cm: f64,
}

/// Result of a critical-point search.
#[derive(Clone, Debug)]
pub struct CriticalPointRun {
    pub target: Target,
    pub f: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    /// Number of accepted descent steps.
    pub iterations: usize,
    pub outcome: Outcome,
    pub converged: bool,
    pub trace: Vec<TracePoint>,
    pub report: CurvatureReport,
    pub csc: CscCheck,
}

impl CriticalPointRun {
    /// Trace as CSV: iteration, functional value, projected gradient norm,
    /// accepted step size, and the minimum Cayley-Menger determinant over
    /// all tetrahedra at that iterate.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,value,grad_norm,step,min_cm\n");
        for p in &self.trace {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                p.iteration,
                crate::fmt::g17(p.value),
                crate::fmt::g17(p.grad_norm),
                crate::fmt::g17(p.step),
                crate::fmt::g17(p.min_cm),
            ));
        }
        out
    }
}

fn min_cayley_menger(c: &Complex, g: &Metric) -> f64 {
    (0..c.tetrahedra().len())
        .map(|ti| g.tetra_lengths(c, ti).cayley_menger())
        .fold(f64::INFINITY, f64::min)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Projected gradient descent on the chosen functional over the zero-mean
/// hyperplane, with Armijo backtracking. A trial step that leaves the
/// realizable set is rejected exactly like one with insufficient decrease.
pub fn find_critical_point(
    c: &Complex,
    base: &[f64],
    f0: &[f64],
    target: Target,
    opts: &OptimizeOptions,
) -> Result<CriticalPointRun, ConformalError> {
    let cd = ConformalData::new(c, base.to_vec(), f0.to_vec())?;
    let mut f = cd.f().to_vec();
    project_gauge(&mut f);

    let mut metric = conformal_lengths(c, &cd.with_f(f.clone()))?;
    let mut value = target.eval(c, &metric)?;
    let mut trace = Vec::new();
    let mut iterations = 0usize;
    let mut last_step = 0.0;
    let mut grad_norm;
    let outcome;

    loop {
        let grad = match grad_fd(c, &cd.with_f(f.clone()), target, opts.fd_step) {
            Ok(mut g) => {
                project_gauge(&mut g);
                g
            }
            Err(ConformalError::StencilNotRealizable { .. }) => {
                grad_norm = f64::NAN;
                trace.push(TracePoint {
                    iteration: iterations,
                    value,
                    grad_norm,
                    step: last_step,
                    min_cm: min_cayley_menger(c, &metric),
                });
                outcome = Outcome::Boundary;
                break;
            }
            Err(other) => return Err(other),
        };
        grad_norm = norm(&grad);
        trace.push(TracePoint {
            iteration: iterations,
            value,
            grad_norm,
            step: last_step,
            min_cm: min_cayley_menger(c, &metric),
        });

        if grad_norm < opts.tol {
            outcome = Outcome::Converged;
            break;
        }
        if iterations >= opts.max_iters {
            outcome = Outcome::MaxIterations;
            break;
        }

        let mut alpha = opts.init_step;
        let mut accepted = None;
        let mut saw_feasible = false;
        while alpha >= opts.min_step {
            let candidate: Vec<f64> = f
                .iter()
                .zip(&grad)
                .map(|(x, g)| x - alpha * g)
                .collect();
            if let Ok(m2) = Metric::new(c, induced_lengths(c, base, &candidate)) {
                saw_feasible = true;
                if let Ok(v2) = target.eval(c, &m2) {
                    if v2 <= value - opts.armijo * alpha * grad_norm * grad_norm {
                        accepted = Some((candidate, m2, v2, alpha));
                        break;
                    }
                }
            }
            alpha *= opts.shrink;
        }
        match accepted {
            Some((candidate, m2, v2, step)) => {
                f = candidate;
                metric = m2;
                value = v2;
                last_step = step;
                iterations += 1;
            }
            None => {
                outcome = if saw_feasible {
                    Outcome::Stalled
                } else {
                    Outcome::Boundary
                };
                break;
            }
        }
    }

    let final_report = report(c, &metric)?;
    let csc = check_csc(&final_report, opts.csc_tol);
    Ok(CriticalPointRun {
        target,
        f,
        value,
        grad_norm,
        iterations,
        outcome,
        converged: outcome == Outcome::Converged,
        trace,
        report: final_report,
        csc,
    })
}

/// Verdict on whether a conformal class contains a cyclic length metric,
/// with a witness when it does.
#[derive(Clone, Debug, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    /// Infinity-norm residual of the least-squares solution of the
    /// log-linear system.
    pub residual: f64,
    pub f: Option<Vec<f64>>,
    pub levels: Option<Vec<f64>>,
}

/// Decide admissibility by solving `½(f_i + f_j) + log L_ij = μ_{D_ij}`
/// over all edges in least squares, in the unknowns `(f, μ)`.
///
/// The system has a one-dimensional null space (`f += c`, `μ += c`), so the
/// minimum-norm solution is shifted afterwards to the gauge `Σ f_v = 0`.
pub fn cyclic_admissibility(c: &Complex, base: &[f64]) -> Result<Admissibility, ConformalError> {
    let n = c.n();
    let ne = c.edges().len();
    if base.len() != ne {
        return Err(ConformalError::DimensionMismatch {
            expected: ne,
            got: base.len(),
        });
    }
    for &l in base {
        if l <= 0.0 || !l.is_finite() {
            return Err(ConformalError::BadBaseLength(l));
        }
    }

    let levels_count = c.m() + 1;
    let cols = n + levels_count;
    let mut a = DMatrix::zeros(ne, cols);
    let mut b = DVector::zeros(ne);
    for (r, &[i, j]) in c.edges().iter().enumerate() {
        a[(r, i)] = 0.5;
        a[(r, j)] = 0.5;
        a[(r, n + c.distance(i, j) - 1)] = -1.0;
        b[r] = -base[r].ln();
    }

    let svd = a.clone().svd(true, true);
    let eps = svd.singular_values.max() * 1e-12;
    let x = svd.solve(&b, eps).expect("SVD was computed with both factors");
    let residual = (a * &x - b).amax();

    let mean_f = x.rows(0, n).sum() / n as f64;
    let f: Vec<f64> = (0..n).map(|v| x[v] - mean_f).collect();
    let levels: Vec<f64> = (0..levels_count).map(|k| (x[n + k] - mean_f).exp()).collect();

    let admissible = residual < ADMISSIBILITY_TOL;
    Ok(Admissibility {
        admissible,
        residual,
        f: admissible.then_some(f),
        levels: admissible.then_some(levels),
    })
}
