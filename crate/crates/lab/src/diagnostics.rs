//! Time series recorded along a run.

use anyhow::Result;
use korteweg_core::ek_solver::enforce_w_relation;
use korteweg_core::{ConservedState, FluidModel};

/// Per-cell `|(hw)_j − (hw)*_j| / ‖hw‖`, with `(hw)*` the centered value of
/// `√h √κ ∂x h` and `‖·‖` the discrete L² norm.
#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyError {
    pub per_cell: Vec<f64>,
    pub max: f64,
    /// `‖hw‖ = 0`; the errors are then reported as zeros.
    pub degenerate: bool,
}

pub fn consistency_error(model: &FluidModel, state: &ConservedState) -> Result<ConsistencyError> {
    let reference = enforce_w_relation(model, state)?;
    let norm = (state.srw.iter().map(|x| x * x).sum::<f64>() * state.dx()).sqrt();
    if !(norm > 0.0) {
        return Ok(ConsistencyError { per_cell: vec![0.0; state.n_cells()], max: 0.0, degenerate: true });
    }
    let per_cell: Vec<f64> = state.srw.iter().zip(&reference.srw).map(|(a, b)| (a - b).abs() / norm).collect();
    let max = per_cell.iter().fold(0.0_f64, |m, x| m.max(*x));
    Ok(ConsistencyError { per_cell, max, degenerate: false })
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiagnosticsSeries {
    pub times: Vec<f64>,
    pub total_entropy: Vec<f64>,
    /// `ΣU(t) / ΣU(0)`
    pub relative_entropy: Vec<f64>,
    pub mass: Vec<f64>,
    pub momentum: Vec<f64>,
    pub consistency_error_max: Vec<f64>,
}

impl DiagnosticsSeries {
    /// Appends a sample with the total entropy of `state`.
    pub fn record(&mut self, model: &FluidModel, state: &ConservedState) -> Result<()> {
        let u = state.total_entropy(model)?;
        self.record_with_entropy(model, state, u)
    }

    /// Appends a sample with an externally computed entropy; times must increase strictly.
    pub fn record_with_entropy(&mut self, model: &FluidModel, state: &ConservedState, u: f64) -> Result<()> {
        if let Some(last) = self.times.last() {
            anyhow::ensure!(state.time > *last, "diagnostic times must increase");
        }
        self.times.push(state.time);
        self.total_entropy.push(u);
        self.relative_entropy.push(u / self.total_entropy[0]);
        self.mass.push(state.mass());
        self.momentum.push(state.momentum());
        self.consistency_error_max.push(consistency_error(model, state)?.max);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest relative increase `(U_{k+1} − U_k)/|U_k|` between samples.
    pub fn max_entropy_increase(&self) -> f64 {
        self.total_entropy
            .windows(2)
            .map(|w| (w[1] - w[0]) / w[0].abs())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Normalizes a recorded `(time, ΣU)` series by its first value.
pub fn relative_entropy_series(run: &[(f64, f64)]) -> Vec<(f64, f64)> {
    match run.first() {
        Some(&(_, u0)) => run.iter().map(|&(t, u)| (t, u / u0)).collect(),
        None => Vec::new(),
    }
}

/// Shape of a downstream wave train.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveTrain {
    /// `‖h(t) − h(t − P)‖₂ / ‖h(t) − mean‖₂` over the window, `P` the forcing period.
    pub period_distance: f64,
    /// Shortest autocorrelation lag with a peak within 10% of the highest one.
    pub wavelength: f64,
    pub maxima_per_wavelength: f64,
    /// `max − min` over the window.
    pub amplitude: f64,
    /// Largest `|∂x h|` over the window.
    pub max_slope: f64,
}

/// Strict local maxima of a non-periodic profile, ignoring steps below `tol`.
pub fn count_maxima(h: &[f64], tol: f64) -> usize {
    let slopes: Vec<i8> = h
        .windows(2)
        .filter_map(|w| {
            let d = w[1] - w[0];
            if d > tol {
                Some(1)
            } else if d < -tol {
                Some(-1)
            } else {
                None
            }
        })
        .collect();
    slopes.windows(2).filter(|s| s[0] == 1 && s[1] == -1).count()
}

/// `now` and `earlier` are the same window of the height field one forcing period apart.
pub fn wave_train(now: &[f64], earlier: &[f64], dx: f64) -> WaveTrain {
    let n = now.len();
    let mean = now.iter().sum::<f64>() / n as f64;
    let dev: Vec<f64> = now.iter().map(|h| h - mean).collect();
    let norm = dev.iter().map(|x| x * x).sum::<f64>().sqrt();
    let dist = now.iter().zip(earlier).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let ac: Vec<f64> = (0..n / 2)
        .map(|lag| dev[..n - lag].iter().zip(&dev[lag..]).map(|(a, b)| a * b).sum::<f64>() / (n - lag) as f64)
        .collect();
    let peaks: Vec<usize> = (1..ac.len().saturating_sub(1)).filter(|&k| ac[k] > ac[k - 1] && ac[k] >= ac[k + 1]).collect();
    let top = peaks.iter().map(|&k| ac[k]).fold(f64::NEG_INFINITY, f64::max);
    // multiples of the period peak as high as the period itself
    let first = peaks.iter().find(|&&k| ac[k] >= 0.9 * top);
    let wavelength = first.map_or(f64::NAN, |&k| k as f64 * dx);
    let amplitude = now.iter().fold(f64::NEG_INFINITY, |m, x| m.max(*x)) - now.iter().fold(f64::INFINITY, |m, x| m.min(*x));
    let maxima = count_maxima(now, 1e-9 * amplitude);
    let max_slope = now.windows(2).map(|w| (w[1] - w[0]).abs() / dx).fold(0.0, f64::max);
    WaveTrain {
        period_distance: dist / norm,
        wavelength,
        maxima_per_wavelength: maxima as f64 * wavelength / (n as f64 * dx),
        amplitude,
        max_slope,
    }
}
