//! Gradient descent on Sp(2N,R) with a multistart harness.
//!
//! The iteration is `S <- S exp(-eta J G)` where `G` is the gradient
//! factor of [`landscape::gradient`] and `eta` comes from Armijo
//! backtracking on `J` (directional slope `-2 ||G||_F^2`). Retraction
//! through the group exponential keeps every iterate symplectic by
//! construction; the residual is still certified at every step and the
//! iterate is re-projected through its structured SVD if drift ever
//! exceeds the trajectory budget.

use rayon::prelude::*;
use thiserror::Error;

use crate::landscape::{
    self, enumerate_critical, LandscapeError, Objective,
};
use crate::sympcore::{
    self, check_symplectic, exp_algebra, random_symplectic, SympError, SymplecticMatrix,
};

/// Terminal values at or below this count as a successful run.
pub const SUCCESS_VALUE: f64 = 1e-6;

/// Terminal values are matched to enumerated critical values within this.
pub const MATCH_TOL: f64 = 1e-4;

/// Symplecticity budget for every iterate of a trajectory.
pub const TRAJECTORY_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Landscape(#[from] LandscapeError),
    #[error(transparent)]
    Symp(#[from] SympError),
}

/// Descent parameters.
#[derive(Debug, Clone, Copy)]
pub struct FlowConfig {
    /// Initial step size.
    pub step: f64,
    pub max_iters: usize,
    /// Stop when `||G||_F` drops to this.
    pub grad_tol: f64,
    /// Backtracking factor in (0, 1).
    pub backtrack: f64,
    /// Armijo constant in (0, 1).
    pub armijo: f64,
    pub seed: u64,
    /// Number of multistart runs.
    pub starts: usize,
    /// Spread of the random starts `exp(J Y)`.
    pub spread: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            step: 0.1,
            max_iters: 50_000,
            grad_tol: 1e-8,
            backtrack: 0.5,
            armijo: 1e-4,
            seed: 0,
            starts: 20,
            spread: 1.0,
        }
    }
}

impl FlowConfig {
    fn validate(&self) -> Result<(), FlowError> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.step) || !positive(self.grad_tol) || self.max_iters == 0 {
            return Err(FlowError::InvalidConfig(
                "step, grad_tol and max_iters must be positive".into(),
            ));
        }
        if !positive(self.backtrack) || self.backtrack >= 1.0 {
            return Err(FlowError::InvalidConfig(
                "backtracking factor must lie in (0, 1)".into(),
            ));
        }
        if !positive(self.armijo) || self.armijo >= 1.0 {
            return Err(FlowError::InvalidConfig(
                "Armijo constant must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// One recorded iterate.
#[derive(Debug, Clone, Copy)]
pub struct IterRecord {
    pub iter: usize,
    pub value: f64,
    pub grad_norm: f64,
}

/// A full descent run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub iterates: Vec<IterRecord>,
    pub terminal: SymplecticMatrix,
    pub terminal_value: f64,
    pub terminal_grad_norm: f64,
    /// Whether the gradient tolerance was reached before `max_iters`.
    pub converged: bool,
    /// Nearest enumerated critical value when converged within
    /// [`MATCH_TOL`], `None` otherwise.
    pub converged_to: Option<f64>,
    /// Largest symplecticity residual seen along the run.
    pub max_symplectic_residual: f64,
}

fn reproject(m: &nalgebra::DMatrix<f64>) -> Result<nalgebra::DMatrix<f64>, FlowError> {
    let loose = SymplecticMatrix::with_tolerance(m.clone(), 1e-3)?;
    Ok(sympcore::symplectic_svd(&loose)?.reconstruct())
}

/// Gradient descent from `s0` toward the target of `obj`.
pub fn descend(
    obj: &Objective,
    s0: &SymplecticMatrix,
    cfg: &FlowConfig,
) -> Result<Trajectory, FlowError> {
    cfg.validate()?;
    if s0.dim() != obj.w().dim() {
        return Err(FlowError::Landscape(LandscapeError::DimensionMismatch {
            left: s0.dim(),
            right: obj.w().dim(),
        }));
    }
    let critical_values: Vec<f64> = enumerate_critical(obj.spectrum())
        .iter()
        .map(|idx| {
            landscape::critical_value(idx, obj.spectrum())
                .map(|cv| cv.constructive)
                .unwrap_or(f64::NAN)
        })
        .collect();

    let w = obj.w();
    let mut s = s0.clone();
    let mut eta = cfg.step;
    let mut iterates = Vec::new();
    let mut converged = false;
    let mut max_residual = check_symplectic(s.matrix())?;

    let mut value = landscape::objective_value(&s, w)?;
    for it in 0..cfg.max_iters {
        let g = landscape::gradient(&s, w)?;
        let grad_norm = g.norm();
        iterates.push(IterRecord {
            iter: it,
            value,
            grad_norm,
        });
        if grad_norm <= cfg.grad_tol {
            converged = true;
            break;
        }

        let slope = -2.0 * grad_norm * grad_norm;
        eta /= cfg.backtrack; // probe a slightly larger step first
        let mut accepted = false;
        while eta > 1e-18 {
            let step = exp_algebra(&g, -eta);
            let candidate = s.matrix() * step.matrix();
            let candidate_value = (&candidate - w.matrix()).norm_squared();
            if !candidate_value.is_finite() {
                eta *= 0.5;
                continue;
            }
            if candidate_value <= value + cfg.armijo * eta * slope {
                let mut mat = candidate;
                let mut residual = check_symplectic(&mat)?;
                if residual > TRAJECTORY_RESIDUAL {
                    mat = reproject(&mat)?;
                    residual = check_symplectic(&mat)?;
                }
                max_residual = max_residual.max(residual);
                s = SymplecticMatrix::with_tolerance(mat, 1e-6)?;
                value = landscape::objective_value(&s, w)?;
                accepted = true;
                break;
            }
            eta *= cfg.backtrack;
        }
        if !accepted {
            break;
        }
    }

    let g = landscape::gradient(&s, w)?;
    let terminal_grad_norm = g.norm();
    let terminal_value = landscape::objective_value(&s, w)?;
    if iterates.is_empty() || iterates.last().unwrap().iter + 1 < cfg.max_iters && !converged {
        // Record the final state when the loop ended by stall/budget.
        iterates.push(IterRecord {
            iter: iterates.len(),
            value: terminal_value,
            grad_norm: terminal_grad_norm,
        });
        converged = terminal_grad_norm <= cfg.grad_tol;
    }

    let converged_to = if converged {
        critical_values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .min_by(|a, b| {
                (a - terminal_value)
                    .abs()
                    .partial_cmp(&(b - terminal_value).abs())
                    .unwrap()
            })
            .filter(|v| (v - terminal_value).abs() <= MATCH_TOL)
    } else {
        None
    };

    Ok(Trajectory {
        iterates,
        terminal: s,
        terminal_value,
        terminal_grad_norm,
        converged,
        converged_to,
        max_symplectic_residual: max_residual,
    })
}

/// Summary of one multistart run.
#[derive(Debug, Clone)]
pub struct StartReport {
    pub start: usize,
    pub trajectory: Trajectory,
}

/// Aggregate multistart outcome.
#[derive(Debug, Clone)]
pub struct MultistartSummary {
    pub starts: usize,
    /// Runs with terminal value at or below [`SUCCESS_VALUE`].
    pub successes: usize,
    /// Terminal values bucketed by nearest enumerated critical value
    /// (within [`MATCH_TOL`]), ascending.
    pub histogram: Vec<(f64, usize)>,
    /// Runs whose terminal value matches no enumerated critical value.
    pub unmatched: usize,
    pub max_iterations_used: usize,
    pub runs: Vec<StartReport>,
}

/// Run `cfg.starts` descents from deterministic random starts
/// (start `i` uses seed `cfg.seed + i * 0x9E3779B97F4A7C15`), in
/// parallel; results are merged in start order.
pub fn multistart(obj: &Objective, cfg: &FlowConfig) -> Result<MultistartSummary, FlowError> {
    cfg.validate()?;
    if cfg.starts == 0 {
        return Err(FlowError::InvalidConfig("starts must be positive".into()));
    }
    let n = obj.n();
    let runs: Result<Vec<StartReport>, FlowError> = (0..cfg.starts)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.seed.wrapping_add((i as u64).wrapping_mul(0x9E3779B97F4A7C15));
            let s0 = random_symplectic(n, seed, cfg.spread);
            let trajectory = descend(obj, &s0, cfg)?;
            Ok(StartReport {
                start: i,
                trajectory,
            })
        })
        .collect();
    let runs = runs?;

    let successes = runs
        .iter()
        .filter(|r| r.trajectory.terminal_value <= SUCCESS_VALUE)
        .count();
    let max_iterations_used = runs
        .iter()
        .map(|r| r.trajectory.iterates.last().map_or(0, |it| it.iter))
        .max()
        .unwrap_or(0);

    let mut values: Vec<f64> = enumerate_critical(obj.spectrum())
        .iter()
        .filter_map(|idx| {
            landscape::critical_value(idx, obj.spectrum())
                .ok()
                .map(|cv| cv.constructive)
        })
        .collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values.dedup_by(|a, b| (*a - *b).abs() <= MATCH_TOL);
    let mut histogram: Vec<(f64, usize)> = values.iter().map(|&v| (v, 0)).collect();
    let mut unmatched = 0usize;
    for r in &runs {
        let t = r.trajectory.terminal_value;
        match histogram
            .iter_mut()
            .find(|(v, _)| (v - t).abs() <= MATCH_TOL)
        {
            Some(bucket) => bucket.1 += 1,
            None => unmatched += 1,
        }
    }
    histogram.retain(|&(_, c)| c > 0);

    Ok(MultistartSummary {
        starts: cfg.starts,
        successes,
        histogram,
        unmatched,
        max_iterations_used,
        runs,
    })
}
