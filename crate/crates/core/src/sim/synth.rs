use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::geometry::delay_table;
use super::scenario::{Pulse, Scenario, GATE_CHECK_WIDTH};
use crate::baseband::{BasebandMatrix, Provenance};
use crate::error::{Error, Result};
use crate::linalg::Field;

/// Envelope samples farther than this many `1/B` from the echo centre are
/// below `exp(-72)` and skipped.
const ENVELOPE_REACH: f64 = 12.0;

/// Scalar types a SAR data matrix can be synthesized in.
pub trait SarSample: Field {
    /// Entry for a unit reflector with delay `delay`, sampled at fast time `t`.
    fn echo(pulse: &Pulse, t: f64, delay: f64) -> Self;

    /// Sample taken at delay `delay`, phase-aligned for coherent summation.
    fn coherent(sample: Self, carrier: f64, delay: f64) -> Complex64;
}

impl SarSample for f64 {
    fn echo(pulse: &Pulse, t: f64, delay: f64) -> Self {
        pulse.waveform(t - delay)
    }

    fn coherent(sample: Self, _carrier: f64, _delay: f64) -> Complex64 {
        Complex64::new(sample, 0.0)
    }
}

impl SarSample for Complex64 {
    fn echo(pulse: &Pulse, t: f64, delay: f64) -> Self {
        Complex64::from_polar(pulse.envelope(t - delay), pulse.carrier() * delay)
    }

    fn coherent(sample: Self, carrier: f64, delay: f64) -> Complex64 {
        sample * Complex64::from_polar(1.0, -carrier * delay)
    }
}

/// Fails with `GateTooNarrow` if any echo centre +- 4/B leaves the gate.
pub fn check_gate(scenario: &Scenario, delays: &[Vec<f64>]) -> Result<()> {
    let grid = scenario.grid();
    let half = GATE_CHECK_WIDTH / scenario.pulse.bandwidth();
    for (target, row) in delays.iter().enumerate() {
        for (slow_index, &delay) in row.iter().enumerate() {
            if !(grid.contains(delay - half) && grid.contains(delay + half)) {
                return Err(Error::GateTooNarrow {
                    target,
                    slow_index,
                    delay,
                    gate_start: grid.gate_start,
                    gate_end: grid.gate_end,
                });
            }
        }
    }
    Ok(())
}

/// Samples `sum_i sigma_i echo(t_l, dtau_i(s_j))` on the scenario grid.
pub fn synthesize<T: SarSample>(scenario: &Scenario) -> Result<DMatrix<T>> {
    let delays = delay_table(scenario);
    check_gate(scenario, &delays)?;
    let grid = *scenario.grid();
    let (rows, cols) = scenario.shape();
    let reach = ENVELOPE_REACH / scenario.pulse.bandwidth();

    let row_data: Vec<Vec<T>> = (0..rows)
        .into_par_iter()
        .map(|j| {
            let mut row = vec![T::zero(); cols];
            for (target, target_delays) in scenario.targets.iter().zip(&delays) {
                let delay = target_delays[j];
                let first = ((delay - reach - grid.gate_start) / grid.fast_time_step)
                    .floor()
                    .max(0.0) as usize;
                let last = (((delay + reach - grid.gate_start) / grid.fast_time_step).ceil()
                    as usize)
                    .min(cols - 1);
                for (l, value) in row.iter_mut().enumerate().take(last + 1).skip(first) {
                    let echo = T::echo(&scenario.pulse, grid.fast_time(l), delay);
                    *value += echo.scale(target.reflectivity);
                }
            }
            row
        })
        .collect();

    Ok(DMatrix::from_fn(rows, cols, |i, l| row_data[i][l]))
}

/// Real down-ramped data matrix for a scenario.
#[derive(Debug, Clone)]
pub struct DataMatrix {
    pub values: DMatrix<f64>,
    pub scenario: Scenario,
}

impl DataMatrix {
    pub fn new(values: DMatrix<f64>, scenario: Scenario) -> Result<Self> {
        check_shape(&values, &scenario)?;
        Ok(Self { values, scenario })
    }
}

pub(crate) fn check_shape<T: Field>(values: &DMatrix<T>, scenario: &Scenario) -> Result<()> {
    let (expected_rows, expected_cols) = scenario.shape();
    if values.shape() != (expected_rows, expected_cols) {
        return Err(Error::MismatchedScenario {
            rows: values.nrows(),
            cols: values.ncols(),
            expected_rows,
            expected_cols,
        });
    }
    Ok(())
}

pub fn synthesize_downramped(scenario: &Scenario) -> Result<DataMatrix> {
    Ok(DataMatrix {
        values: synthesize::<f64>(scenario)?,
        scenario: scenario.clone(),
    })
}

/// Analytic baseband model `sigma exp(i omega0 dtau) exp(-B^2 (t - dtau)^2 / 2)`.
pub fn synthesize_baseband_direct(scenario: &Scenario) -> Result<BasebandMatrix> {
    Ok(BasebandMatrix {
        values: synthesize::<Complex64>(scenario)?,
        scenario: scenario.clone(),
        provenance: Provenance::DirectModel,
    })
}
