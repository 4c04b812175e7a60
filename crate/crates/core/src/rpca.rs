//! Low-rank plus sparse decomposition `min |L|_* + eta |S|_1  s.t.  L + S = D`
//! by the inexact augmented Lagrangian method.
//!
//! The sparse step shrinks each entry's modulus and keeps its phase, so the
//! same code handles real down-ramped and complex baseband matrices.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eta::conventional_eta;
use crate::linalg::{frobenius_norm, max_abs, singular_value_threshold, singular_values, spectral_norm, Field};

/// Entries of `S` below this fraction of `max |D|` are not counted as nonzero.
pub const SPARSE_FLOOR: f64 = 1e-9;

/// Sparsity weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Eta {
    /// `1 / sqrt(max(rows, cols))`, re-evaluated for every block.
    Conventional,
    Value(f64),
}

impl Eta {
    pub fn resolve(self, rows: usize, cols: usize) -> f64 {
        match self {
            Eta::Conventional => conventional_eta(rows, cols),
            Eta::Value(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RpcaConfig {
    pub eta: Eta,
    /// Initial penalty; `None` means `1.2 / |D|_2`.
    pub mu0: Option<f64>,
    pub rho: f64,
    pub tolerance: f64,
    /// Bound on `|L_k - L_{k-1}|_F / |D|_F` at termination. The residual
    /// alone can vanish at a non-optimal split (e.g. a single spike).
    pub step_tolerance: f64,
    pub max_iterations: usize,
    /// `mu_k` never exceeds `mu_cap * mu0`.
    pub mu_cap: f64,
}

impl Default for RpcaConfig {
    fn default() -> Self {
        Self {
            eta: Eta::Conventional,
            mu0: None,
            rho: 1.4,
            tolerance: 1e-7,
            step_tolerance: 1e-5,
            max_iterations: 1000,
            mu_cap: 1e7,
        }
    }
}

impl RpcaConfig {
    pub fn with_eta(mut self, eta: Eta) -> Self {
        self.eta = eta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Eta::Value(v) = self.eta {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("eta must be positive, got {v}")));
            }
        }
        if !(self.rho.is_finite() && self.rho > 1.0) {
            return Err(Error::Config(format!("rho must exceed 1, got {}", self.rho)));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        if !(self.step_tolerance.is_finite() && self.step_tolerance > 0.0) {
            return Err(Error::Config("step_tolerance must be positive".into()));
        }
        if let Some(mu0) = self.mu0 {
            if !(mu0.is_finite() && mu0 > 0.0) {
                return Err(Error::Config("mu0 must be positive".into()));
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if !(self.mu_cap.is_finite() && self.mu_cap >= 1.0) {
            return Err(Error::Config("mu_cap must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Decomposition<T: Field> {
    pub low_rank: DMatrix<T>,
    pub sparse: DMatrix<T>,
    pub eta: f64,
    pub iterations: usize,
    /// `|D - L - S|_F / |D|_F`.
    pub residual: f64,
    pub residual_history: Vec<f64>,
    pub rank: usize,
    pub sparse_nonzeros: usize,
    pub converged: bool,
}

/// Serializable summary of a decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub eta: f64,
    pub iterations: usize,
    pub residual: f64,
    pub residual_history: Vec<f64>,
    pub rank: usize,
    pub sparse_nonzeros: usize,
    pub converged: bool,
}

impl<T: Field> Decomposition<T> {
    pub fn diagnostics(&self) -> Diagnostics {
        Diagnostics {
            eta: self.eta,
            iterations: self.iterations,
            residual: self.residual,
            residual_history: self.residual_history.clone(),
            rank: self.rank,
            sparse_nonzeros: self.sparse_nonzeros,
            converged: self.converged,
        }
    }

    fn into_checked(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::MaxIterationsExceeded {
                iterations: self.iterations,
                residual: self.residual,
            })
        }
    }
}

/// `exp(i arg a) max(|a| - eta, 0)`; `|a| = eta` maps to zero.
pub fn soft_threshold<T: Field>(a: T, eta: f64) -> T {
    let m = a.modulus();
    if m <= eta {
        T::zero()
    } else {
        a.scale((m - eta) / m)
    }
}

fn count_nonzero<T: Field>(s: &DMatrix<T>, floor: f64) -> usize {
    s.iter().filter(|x| x.modulus() > floor).count()
}

/// Runs the iteration to convergence or to the iteration cap and returns the
/// last iterate either way; check `converged`.
pub fn decompose_best_effort<T: Field>(d: &DMatrix<T>, config: &RpcaConfig) -> Result<Decomposition<T>> {
    config.validate()?;
    let (rows, cols) = d.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    if !d.iter().all(|x| x.modulus().is_finite()) {
        return Err(Error::InvalidInput("matrix has non-finite entries".into()));
    }
    let d_fro = frobenius_norm(d);
    if d_fro == 0.0 {
        return Err(Error::InvalidInput("cannot decompose the zero matrix".into()));
    }
    let eta = config.eta.resolve(rows, cols);
    let norm2 = spectral_norm(d);
    let d_max = max_abs(d);
    let j = norm2.max(d_max / eta);

    let mut y = d.unscale(j);
    let mut mu = config.mu0.unwrap_or(1.2 / norm2);
    let mu_max = config.mu_cap * mu;
    let mut s = DMatrix::<T>::zeros(rows, cols);
    let mut l = DMatrix::<T>::zeros(rows, cols);
    let mut rank = 0;
    let mut history = Vec::new();
    let mut converged = false;

    for _ in 0..config.max_iterations {
        let inv_mu = 1.0 / mu;
        let target = d - &s + y.scale(inv_mu);
        let (next_l, kept) = singular_value_threshold(&target, inv_mu)?;
        let step = frobenius_norm(&(&next_l - &l)) / d_fro;
        l = next_l;
        rank = kept;

        let shrink = eta * inv_mu;
        s = d - &l + y.scale(inv_mu);
        s.apply(|x| *x = soft_threshold(*x, shrink));

        let z = d - &l - &s;
        let residual = frobenius_norm(&z) / d_fro;
        history.push(residual);
        y += z.scale(mu);
        mu = (mu * config.rho).min(mu_max);
        if residual <= config.tolerance && step <= config.step_tolerance {
            converged = true;
            break;
        }
    }

    Ok(Decomposition {
        sparse_nonzeros: count_nonzero(&s, SPARSE_FLOOR * d_max),
        low_rank: l,
        sparse: s,
        eta,
        iterations: history.len(),
        residual: *history.last().expect("at least one iteration"),
        residual_history: history,
        rank,
        converged,
    })
}

/// Fails with `MaxIterationsExceeded` when the tolerance is not reached;
/// [`decompose_best_effort`] returns the last iterate instead.
pub fn decompose<T: Field>(d: &DMatrix<T>, config: &RpcaConfig) -> Result<Decomposition<T>> {
    decompose_best_effort(d, config)?.into_checked()
}

/// Row ranges of `windows` consecutive slow-time blocks; the last block takes
/// the remainder.
pub fn window_ranges(rows: usize, windows: usize) -> Result<Vec<std::ops::Range<usize>>> {
    if windows == 0 || windows > rows {
        return Err(Error::Config(format!(
            "window count {windows} must be between 1 and the row count {rows}"
        )));
    }
    let size = rows / windows;
    Ok((0..windows)
        .map(|w| {
            let start = w * size;
            let end = if w + 1 == windows { rows } else { start + size };
            start..end
        })
        .collect())
}

/// Decomposes consecutive slow-time blocks independently and stacks them.
/// Blocks that are identically zero decompose to zero.
pub fn decompose_windowed<T: Field>(
    d: &DMatrix<T>,
    windows: usize,
    config: &RpcaConfig,
) -> Result<Decomposition<T>> {
    config.validate()?;
    let (rows, cols) = d.shape();
    let ranges = window_ranges(rows, windows)?;
    if windows == 1 {
        return decompose(d, config);
    }
    let parts: Vec<Result<Decomposition<T>>> = ranges
        .par_iter()
        .enumerate()
        .map(|(w, range)| {
            let block = d.rows(range.start, range.len()).into_owned();
            let eta = config.eta.resolve(block.nrows(), cols);
            if frobenius_norm(&block) == 0.0 {
                return Ok(Decomposition {
                    low_rank: block.clone(),
                    sparse: block,
                    eta,
                    iterations: 0,
                    residual: 0.0,
                    residual_history: Vec::new(),
                    rank: 0,
                    sparse_nonzeros: 0,
                    converged: true,
                });
            }
            decompose(&block, config).map_err(|e| Error::Window {
                window: w,
                source: Box::new(e),
            })
        })
        .collect();

    let mut low_rank = DMatrix::<T>::zeros(rows, cols);
    let mut sparse = DMatrix::<T>::zeros(rows, cols);
    let mut iterations = 0;
    let mut eta = 0.0;
    for (range, part) in ranges.iter().zip(parts) {
        let part = part?;
        low_rank.rows_mut(range.start, range.len()).copy_from(&part.low_rank);
        sparse.rows_mut(range.start, range.len()).copy_from(&part.sparse);
        iterations = iterations.max(part.iterations);
        eta = part.eta;
    }

    let d_fro = frobenius_norm(d);
    let residual = if d_fro == 0.0 {
        0.0
    } else {
        frobenius_norm(&(d - &low_rank - &sparse)) / d_fro
    };
    let d_max = max_abs(d);
    let sv = singular_values(&low_rank)?;
    let rank_floor = sv.first().copied().unwrap_or(0.0) * 1e-10;
    Ok(Decomposition {
        rank: sv.iter().filter(|&&x| x > rank_floor).count(),
        sparse_nonzeros: count_nonzero(&sparse, SPARSE_FLOOR * d_max),
        low_rank,
        sparse,
        eta,
        iterations,
        residual,
        residual_history: vec![residual],
        converged: true,
    })
}
