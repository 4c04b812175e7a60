//! Closed-form bounds on the sparsity weight.
//!
//! `eta_min` is the nuclear-to-l1 ratio of a single stationary trace and
//! `eta_max` the same ratio for a trace that drifts across `N(v)` fast-time
//! columns. Any `eta` between them makes a stationary target cheaper as part
//! of `L` and a moving one cheaper as part of `S`.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{Scenario, SPEED_OF_LIGHT};

/// Which matrix a bound or norm refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    Baseband,
    Original,
}

impl MatrixKind {
    /// Factor applied to l1-derived quantities of the baseband matrix.
    pub fn l1_scale(self) -> f64 {
        match self {
            MatrixKind::Baseband => 1.0,
            MatrixKind::Original => 2.0 / PI,
        }
    }
}

/// Acquisition quantities entering the bounds. Times in seconds, `B` in the
/// `exp(-B^2 t^2 / 2)` sense.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApertureParams {
    /// `S(a)`, with `2 S(a) = n ds`.
    pub half_aperture: f64,
    pub delta_s: f64,
    pub delta_t: f64,
    pub bandwidth: f64,
    pub carrier: f64,
    /// Slowest target velocity that must still be separated [m/s].
    pub velocity: Vector3<f64>,
    pub antenna_at_zero: Vector3<f64>,
    pub antenna_velocity: Vector3<f64>,
    pub reference: Vector3<f64>,
    /// Use the second-order delay expansion when the first-order term is tiny.
    pub quadratic_refinement: bool,
}

impl ApertureParams {
    pub fn from_scenario(scenario: &Scenario, velocity: Vector3<f64>) -> Self {
        Self {
            half_aperture: scenario.platform.half_aperture(),
            delta_s: scenario.platform.delta_s_seconds,
            delta_t: scenario.grid().fast_time_step,
            bandwidth: scenario.pulse.bandwidth(),
            carrier: scenario.pulse.carrier(),
            velocity,
            antenna_at_zero: scenario.platform.position_at_zero_m,
            antenna_velocity: scenario.platform.velocity_m_per_s,
            reference: scenario.reference,
            quadratic_refinement: false,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("half aperture", self.half_aperture),
            ("delta_s", self.delta_s),
            ("delta_t", self.delta_t),
            ("bandwidth", self.bandwidth),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// `B dt`.
    pub fn bandwidth_step(&self) -> f64 {
        self.bandwidth * self.delta_t
    }
}

/// Fast-time column support of a trace moving with `params.velocity`,
/// `(4 S / (c dt)) |u . v|` with `u` the unit vector from the reference point
/// to the antenna at `s = 0`, floored at one column.
pub fn analytic_column_support(params: &ApertureParams) -> Result<f64> {
    params.validate()?;
    let los = params.antenna_at_zero - params.reference;
    let range = los.norm();
    if range == 0.0 || !range.is_finite() {
        return Err(Error::DegenerateGeometry(
            "antenna at s = 0 coincides with the reference point".into(),
        ));
    }
    let u = los / range;
    let s = params.half_aperture;
    let linear = -u.dot(&params.velocity);
    let mut spread = 2.0 * s * linear.abs();

    if params.quadratic_refinement {
        // |R + w s| ~ R + (u.w) s + (|w|^2 - (u.w)^2) s^2 / (2R)
        let transverse = |w: Vector3<f64>| w.norm_squared() - u.dot(&w).powi(2);
        let wa = params.antenna_velocity - params.velocity;
        let quad = (transverse(wa) - transverse(params.antenna_velocity)) / (2.0 * range);
        if linear.abs() * s < 0.1 * quad.abs() * s * s {
            let f = |t: f64| linear * t + quad * t * t;
            let mut values = vec![f(-s), f(s)];
            let vertex = -linear / (2.0 * quad);
            if vertex.abs() < s {
                values.push(f(vertex));
            }
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            spread = hi - lo;
        }
    }
    Ok((2.0 * spread / (SPEED_OF_LIGHT * params.delta_t)).max(1.0))
}

/// `sum_k exp(-pi^2 k^2 / x^2)` over the trace spectrum; the theta-function
/// estimate `x / (2 sqrt(pi)) + 1/2` for `x >= sqrt(pi)`, explicit otherwise.
pub fn spectrum_normalization(n: f64, x: f64) -> f64 {
    if x >= PI.sqrt() {
        x / (2.0 * PI.sqrt()) + 0.5
    } else {
        explicit_sum(n, x, 1.0)
    }
}

/// `sum_k exp(-pi^2 k^2 / (2 x^2))`, the nuclear-norm sum of unit-normalised
/// singular values, estimated as `(sqrt(2) x / sqrt(pi) + 1) / 2` for
/// `x >= sqrt(pi)`.
pub fn spectrum_amplitude_sum(n: f64, x: f64) -> f64 {
    if x >= PI.sqrt() {
        (2f64.sqrt() * x / PI.sqrt() + 1.0) / 2.0
    } else {
        explicit_sum(n, x, 0.5)
    }
}

fn explicit_sum(n: f64, x: f64, power: f64) -> f64 {
    let terms = (n.ceil() as usize).max(1);
    (0..terms)
        .map(|k| (-power * PI * PI * (k * k) as f64 / (x * x)).exp())
        .sum()
}

/// Admissible range of the sparsity weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaBounds {
    pub eta_min: f64,
    pub eta_max: f64,
    pub eta_star: f64,
    /// `sqrt(eta_max / eta_min)`; below one the range is empty.
    pub dynamic_range: f64,
    #[serde(rename = "N")]
    pub column_support: f64,
    pub regime: MatrixKind,
    pub admissible: bool,
}

impl EtaBounds {
    pub fn from_limits(eta_min: f64, eta_max: f64, column_support: f64, regime: MatrixKind) -> Self {
        Self {
            eta_min,
            eta_max,
            eta_star: (eta_min * eta_max).sqrt(),
            dynamic_range: (eta_max / eta_min).sqrt(),
            column_support,
            regime,
            admissible: eta_max >= eta_min,
        }
    }

    /// `eta_min / eta + eta / eta_max`, minimised by `eta_star`.
    pub fn objective(&self, eta: f64) -> f64 {
        self.eta_min / eta + eta / self.eta_max
    }
}

/// Lower bound `sqrt(ds B dt / (4 S sqrt(pi)))` for the baseband matrix.
pub fn eta_min_baseband(params: &ApertureParams) -> f64 {
    (params.delta_s * params.bandwidth_step() / (4.0 * params.half_aperture * PI.sqrt())).sqrt()
}

pub fn eta_bounds_baseband(params: &ApertureParams) -> Result<EtaBounds> {
    let n = analytic_column_support(params)?;
    let x = n * params.bandwidth_step();
    let eta_min = eta_min_baseband(params);
    let eta_max = eta_min * spectrum_amplitude_sum(n, x) / spectrum_normalization(n, x).sqrt();
    Ok(EtaBounds::from_limits(eta_min, eta_max, n, MatrixKind::Baseband))
}

/// Nuclear norms are shared with the baseband matrix while l1 norms shrink by
/// `2/pi`, so both limits grow by `pi/2`.
pub fn eta_bounds_original(params: &ApertureParams) -> Result<EtaBounds> {
    let b = eta_bounds_baseband(params)?;
    let k = 1.0 / MatrixKind::Original.l1_scale();
    Ok(EtaBounds::from_limits(b.eta_min * k, b.eta_max * k, b.column_support, MatrixKind::Original))
}

pub fn eta_bounds(params: &ApertureParams, kind: MatrixKind) -> Result<EtaBounds> {
    match kind {
        MatrixKind::Baseband => eta_bounds_baseband(params),
        MatrixKind::Original => eta_bounds_original(params),
    }
}

/// `1 / sqrt(max(rows, cols))`.
pub fn conventional_eta(rows: usize, cols: usize) -> f64 {
    1.0 / (rows.max(cols).max(1) as f64).sqrt()
}
