//! Shift a real down-ramped matrix to complex baseband and back.
//!
//! Each row is multiplied by `exp(i omega0 t)`, which moves the negative
//! frequency copy of the carrier to DC and the positive one to `2 omega0`.
//! A brick-wall low-pass with gain 2 keeps the DC copy only.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{check_shape, DataMatrix, Pulse, Scenario};

/// How a baseband matrix was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Modulated and low-pass filtered from a real matrix.
    Filtered,
    /// Sampled from the analytic baseband model.
    DirectModel,
}

#[derive(Debug, Clone)]
pub struct BasebandMatrix {
    pub values: DMatrix<Complex64>,
    pub scenario: Scenario,
    pub provenance: Provenance,
}

impl BasebandMatrix {
    pub fn new(values: DMatrix<Complex64>, scenario: Scenario, provenance: Provenance) -> Result<Self> {
        check_shape(&values, &scenario)?;
        Ok(Self { values, scenario, provenance })
    }
}

/// Ideal low-pass in angular frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowpassFilter {
    /// Half-width of the passband [rad/s].
    pub cutoff: f64,
    /// Zero-pad rows to the next power of two before transforming.
    pub pad_to_pow2: bool,
}

impl LowpassFilter {
    /// Passband of `2 pi B`, far enough out that a Gaussian pulse is kept to
    /// below `1e-8` relative error.
    pub fn for_pulse(pulse: &Pulse) -> Self {
        Self {
            cutoff: 2.0 * PI * pulse.bandwidth(),
            pad_to_pow2: false,
        }
    }

    pub fn with_padding(mut self, pad: bool) -> Self {
        self.pad_to_pow2 = pad;
        self
    }

    /// Rejects a cutoff that would let the `2 omega0` image through.
    pub fn validate(&self, pulse: &Pulse, fast_time_step: f64) -> Result<()> {
        if !(self.cutoff.is_finite() && self.cutoff > 0.0) {
            return Err(Error::InvalidFilter(format!("cutoff {} must be positive", self.cutoff)));
        }
        let w0 = pulse.carrier();
        let phase_step = w0 * fast_time_step;
        if phase_step >= PI {
            return Err(Error::CarrierAliased { phase_step });
        }
        let nyquist = PI / fast_time_step;
        // Distance from DC of the image after wrapping into the sampled band.
        let image = (2.0 * w0 + nyquist).rem_euclid(2.0 * nyquist) - nyquist;
        let limit = image.abs() - PI * pulse.bandwidth();
        if self.cutoff >= limit {
            return Err(Error::InvalidFilter(format!(
                "cutoff {:.4e} rad/s reaches the 2*omega0 image (limit {:.4e} rad/s)",
                self.cutoff, limit
            )));
        }
        if self.cutoff >= nyquist {
            return Err(Error::InvalidFilter(format!(
                "cutoff {:.4e} rad/s is above the Nyquist frequency {:.4e} rad/s",
                self.cutoff, nyquist
            )));
        }
        Ok(())
    }

    fn transform_len(&self, cols: usize) -> usize {
        if self.pad_to_pow2 {
            cols.next_power_of_two()
        } else {
            cols
        }
    }

    /// Applies the passband mask with unit gain to one sampled row.
    pub fn project(&self, row: &mut [Complex64], fast_time_step: f64) {
        self.filter_row(row, fast_time_step, 1.0, &mut FftPlanner::new());
    }

    fn filter_row(
        &self,
        row: &mut [Complex64],
        fast_time_step: f64,
        gain: f64,
        planner: &mut FftPlanner<f64>,
    ) {
        let n = self.transform_len(row.len());
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        buf[..row.len()].copy_from_slice(row);
        planner.plan_fft_forward(n).process(&mut buf);
        let df = 2.0 * PI / (n as f64 * fast_time_step);
        let scale = gain / n as f64;
        for (k, z) in buf.iter_mut().enumerate() {
            let signed = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            if (signed * df).abs() > self.cutoff {
                *z = Complex64::new(0.0, 0.0);
            } else {
                *z *= scale;
            }
        }
        planner.plan_fft_inverse(n).process(&mut buf);
        row.copy_from_slice(&buf[..row.len()]);
    }
}

/// Modulates each row by `exp(i carrier t_l)` and low-pass filters with gain 2.
/// `values` is row-indexed by slow time, column-indexed by `fast_times`.
pub fn modulate_and_filter(
    values: &DMatrix<f64>,
    fast_times: &[f64],
    fast_time_step: f64,
    carrier: f64,
    filter: &LowpassFilter,
) -> DMatrix<Complex64> {
    let (rows, cols) = values.shape();
    let shift: Vec<Complex64> = fast_times.iter().map(|&t| Complex64::from_polar(1.0, carrier * t)).collect();
    let out: Vec<Vec<Complex64>> = (0..rows)
        .into_par_iter()
        .map_init(FftPlanner::new, |planner, j| {
            let mut row: Vec<Complex64> = (0..cols).map(|l| shift[l] * values[(j, l)]).collect();
            filter.filter_row(&mut row, fast_time_step, 2.0, planner);
            row
        })
        .collect();
    DMatrix::from_fn(rows, cols, |j, l| out[j][l])
}

/// `Re{exp(-i carrier t_l) D_B}` row by row.
pub fn demodulate(values: &DMatrix<Complex64>, fast_times: &[f64], carrier: f64) -> DMatrix<f64> {
    let rot: Vec<Complex64> = fast_times.iter().map(|&t| Complex64::from_polar(1.0, -carrier * t)).collect();
    DMatrix::from_fn(values.nrows(), values.ncols(), |j, l| (rot[l] * values[(j, l)]).re)
}

pub fn to_baseband(data: &DataMatrix, filter: &LowpassFilter) -> Result<BasebandMatrix> {
    let sc = &data.scenario;
    check_shape(&data.values, sc)?;
    let step = sc.grid().fast_time_step;
    filter.validate(&sc.pulse, step)?;
    let values = modulate_and_filter(&data.values, &sc.grid().fast_times(), step, sc.pulse.carrier(), filter);
    Ok(BasebandMatrix {
        values,
        scenario: sc.clone(),
        provenance: Provenance::Filtered,
    })
}

pub fn from_baseband(baseband: &BasebandMatrix) -> Result<DataMatrix> {
    let sc = &baseband.scenario;
    check_shape(&baseband.values, sc)?;
    let values = demodulate(&baseband.values, &sc.grid().fast_times(), sc.pulse.carrier());
    Ok(DataMatrix {
        values,
        scenario: sc.clone(),
    })
}
