//! Physical configuration of a SAR acquisition: pulse, platform track,
//! reference point, targets and the sampling grid.
//!
//! The JSON form uses SI units spelled out in field names. Frequencies are
//! stored as plain frequencies in Hz and converted to angular frequencies by
//! the accessors.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Pulse support (in units of `1/B`) that must stay inside the gate.
pub const GATE_CHECK_WIDTH: f64 = 4.0;

/// Margin (in units of `1/B`) added on each side of the delay range when the
/// gate is chosen automatically; `exp(-8.2^2 / 2) < 1e-14`.
pub const AUTO_GATE_MARGIN: f64 = 8.2;

/// How the bandwidth parameter in Hz maps to `B` in `exp(-B^2 t^2 / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthConvention {
    /// `B = 2 pi * value` rad/s.
    #[default]
    Angular,
    /// `B = value`, read directly as 1/s.
    Plain,
}

/// Gaussian baseband pulse `cos(omega0 t) exp(-B^2 t^2 / 2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pulse {
    carrier_frequency_hz: f64,
    bandwidth_parameter_hz: f64,
    #[serde(default)]
    bandwidth_convention: BandwidthConvention,
}

impl Pulse {
    pub fn new(
        carrier_frequency_hz: f64,
        bandwidth_parameter_hz: f64,
        bandwidth_convention: BandwidthConvention,
    ) -> Result<Self> {
        let pulse = Self {
            carrier_frequency_hz,
            bandwidth_parameter_hz,
            bandwidth_convention,
        };
        pulse.validate()?;
        Ok(pulse)
    }

    fn validate(&self) -> Result<()> {
        if !(self.carrier_frequency_hz.is_finite() && self.carrier_frequency_hz > 0.0) {
            return Err(Error::Config("pulse carrier frequency must be positive".into()));
        }
        if !(self.bandwidth_parameter_hz.is_finite() && self.bandwidth_parameter_hz > 0.0) {
            return Err(Error::Config("pulse bandwidth parameter must be positive".into()));
        }
        Ok(())
    }

    pub fn carrier_frequency_hz(&self) -> f64 {
        self.carrier_frequency_hz
    }

    pub fn bandwidth_parameter_hz(&self) -> f64 {
        self.bandwidth_parameter_hz
    }

    pub fn bandwidth_convention(&self) -> BandwidthConvention {
        self.bandwidth_convention
    }

    /// Carrier angular frequency omega0 [rad/s].
    pub fn carrier(&self) -> f64 {
        2.0 * PI * self.carrier_frequency_hz
    }

    /// `B` as it appears in `exp(-B^2 t^2 / 2)`.
    pub fn bandwidth(&self) -> f64 {
        match self.bandwidth_convention {
            BandwidthConvention::Angular => 2.0 * PI * self.bandwidth_parameter_hz,
            BandwidthConvention::Plain => self.bandwidth_parameter_hz,
        }
    }

    pub fn carrier_ratio(&self) -> f64 {
        self.carrier() / self.bandwidth()
    }

    /// Narrowband regime: `omega0 / B >= 10`.
    pub fn is_narrowband(&self) -> bool {
        self.carrier_ratio() >= 10.0
    }

    pub fn envelope(&self, t: f64) -> f64 {
        let b = self.bandwidth();
        (-0.5 * b * b * t * t).exp()
    }

    /// Down-ramped pulse `cos(omega0 t) exp(-B^2 t^2 / 2)`.
    pub fn waveform(&self, t: f64) -> f64 {
        (self.carrier() * t).cos() * self.envelope(t)
    }
}

/// Linear platform track `r(s) = r(0) + V_p s`, sampled at `n + 1` slow times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Platform {
    pub position_at_zero_m: Vector3<f64>,
    pub velocity_m_per_s: Vector3<f64>,
    pub delta_s_seconds: f64,
    pub pulse_count: usize,
}

impl Platform {
    fn validate(&self) -> Result<()> {
        if !(self.delta_s_seconds.is_finite() && self.delta_s_seconds > 0.0) {
            return Err(Error::Config("platform delta_s_seconds must be positive".into()));
        }
        if self.pulse_count == 0 || self.pulse_count.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "pulse_count must be odd (n + 1 with n even), got {}",
                self.pulse_count
            )));
        }
        if !(finite3(&self.position_at_zero_m) && finite3(&self.velocity_m_per_s)) {
            return Err(Error::Config("platform vectors must be finite".into()));
        }
        Ok(())
    }

    pub fn position(&self, s: f64) -> Vector3<f64> {
        self.position_at_zero_m + self.velocity_m_per_s * s
    }

    /// `n`, the number of slow-time steps across the aperture.
    pub fn steps(&self) -> usize {
        self.pulse_count - 1
    }

    /// Slow time of matrix row `row`, `s_j = j ds` with `j = row - n/2`.
    pub fn slow_time(&self, row: usize) -> f64 {
        (row as f64 - (self.steps() / 2) as f64) * self.delta_s_seconds
    }

    pub fn slow_times(&self) -> Vec<f64> {
        (0..self.pulse_count).map(|row| self.slow_time(row)).collect()
    }

    /// Aperture half-size `S(a)` in seconds, `2 S(a) = n ds`.
    pub fn half_aperture(&self) -> f64 {
        0.5 * self.steps() as f64 * self.delta_s_seconds
    }
}

/// Point scatterer moving with constant velocity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Target {
    pub position_at_zero_m: Vector3<f64>,
    pub velocity_m_per_s: Vector3<f64>,
    pub reflectivity: f64,
}

impl Target {
    pub fn stationary(position: Vector3<f64>, reflectivity: f64) -> Self {
        Self {
            position_at_zero_m: position,
            velocity_m_per_s: Vector3::zeros(),
            reflectivity,
        }
    }

    pub fn moving(position: Vector3<f64>, velocity: Vector3<f64>, reflectivity: f64) -> Self {
        Self {
            position_at_zero_m: position,
            velocity_m_per_s: velocity,
            reflectivity,
        }
    }

    pub fn position(&self, s: f64) -> Vector3<f64> {
        self.position_at_zero_m + self.velocity_m_per_s * s
    }

    pub fn is_stationary(&self) -> bool {
        self.velocity_m_per_s.norm() == 0.0
    }

    fn validate(&self, index: usize) -> Result<()> {
        if !(self.reflectivity.is_finite() && self.reflectivity >= 0.0) {
            return Err(Error::Config(format!(
                "target {index}: reflectivity must be finite and nonnegative"
            )));
        }
        if !(finite3(&self.position_at_zero_m) && finite3(&self.velocity_m_per_s)) {
            return Err(Error::Config(format!("target {index}: vectors must be finite")));
        }
        Ok(())
    }
}

/// Sampling request as written in a scenario file. Missing values are
/// derived from the pulse and the target delays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    pub delta_t_seconds: Option<f64>,
    pub gate_seconds: Option<[f64; 2]>,
}

/// Resolved fast-time axis `t_l = t_min + l dt`, `l = 0..=m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingGrid {
    pub fast_time_step: f64,
    pub gate_start: f64,
    pub gate_end: f64,
}

impl SamplingGrid {
    pub fn new(fast_time_step: f64, gate_start: f64, gate_end: f64) -> Result<Self> {
        if !(fast_time_step.is_finite() && fast_time_step > 0.0) {
            return Err(Error::Config("fast-time step must be positive".into()));
        }
        if !(gate_start.is_finite() && gate_end.is_finite() && gate_end > gate_start) {
            return Err(Error::Config("fast-time gate must satisfy t_min < t_max".into()));
        }
        Ok(Self {
            fast_time_step,
            gate_start,
            gate_end,
        })
    }

    /// `m + 1 = floor((t_max - t_min) / dt) + 1`.
    pub fn columns(&self) -> usize {
        // Tolerate representation error when the span is an exact multiple of dt.
        let span = (self.gate_end - self.gate_start) / self.fast_time_step;
        (span * (1.0 + 1e-12)).floor() as usize + 1
    }

    pub fn fast_time(&self, column: usize) -> f64 {
        self.gate_start + column as f64 * self.fast_time_step
    }

    pub fn fast_times(&self) -> Vec<f64> {
        (0..self.columns()).map(|l| self.fast_time(l)).collect()
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.gate_start && t <= self.gate_end
    }
}

/// Default fast-time step: `B dt <= 0.2` and `omega0 dt <= 0.5`.
pub fn default_fast_time_step(pulse: &Pulse) -> f64 {
    (0.2 / pulse.bandwidth()).min(0.5 / pulse.carrier())
}

/// Serialized scenario; field order is the on-disk order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub pulse: Pulse,
    pub platform: Platform,
    pub reference_point_m: Vector3<f64>,
    pub targets: Vec<Target>,
    #[serde(default)]
    pub sampling: SamplingSpec,
}

/// Validated scenario with a resolved sampling grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioFile", into = "ScenarioFile")]
pub struct Scenario {
    pub pulse: Pulse,
    pub platform: Platform,
    pub reference: Vector3<f64>,
    pub targets: Vec<Target>,
    sampling: SamplingSpec,
    grid: SamplingGrid,
}

impl Scenario {
    /// Builds a scenario, resolving any sampling value left as `None`.
    pub fn new(
        pulse: Pulse,
        platform: Platform,
        reference: Vector3<f64>,
        targets: Vec<Target>,
        sampling: SamplingSpec,
    ) -> Result<Self> {
        pulse.validate()?;
        platform.validate()?;
        if !finite3(&reference) {
            return Err(Error::Config("reference point must be finite".into()));
        }
        for (i, t) in targets.iter().enumerate() {
            t.validate(i)?;
        }
        let dt = sampling
            .delta_t_seconds
            .unwrap_or_else(|| default_fast_time_step(&pulse));
        let (start, end) = match sampling.gate_seconds {
            Some([a, b]) => (a, b),
            None => auto_gate(&pulse, &platform, &reference, &targets),
        };
        let grid = SamplingGrid::new(dt, start, end)?;
        Ok(Self {
            pulse,
            platform,
            reference,
            targets,
            sampling,
            grid,
        })
    }

    /// Same scenario with automatic fast-time step and gate.
    pub fn auto(
        pulse: Pulse,
        platform: Platform,
        reference: Vector3<f64>,
        targets: Vec<Target>,
    ) -> Result<Self> {
        Self::new(pulse, platform, reference, targets, SamplingSpec::default())
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn sampling(&self) -> &SamplingSpec {
        &self.sampling
    }

    pub fn rows(&self) -> usize {
        self.platform.pulse_count
    }

    pub fn columns(&self) -> usize {
        self.grid.columns()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows(), self.columns())
    }

    /// Copy with a different target list; an automatic gate is recomputed.
    pub fn with_targets(&self, targets: Vec<Target>) -> Result<Self> {
        Self::new(
            self.pulse.clone(),
            self.platform.clone(),
            self.reference,
            targets,
            self.sampling.clone(),
        )
    }

    /// Copy with a different sampling request.
    pub fn with_sampling(&self, sampling: SamplingSpec) -> Result<Self> {
        Self::new(
            self.pulse.clone(),
            self.platform.clone(),
            self.reference,
            self.targets.clone(),
            sampling,
        )
    }

    /// Copy whose gate is pinned to the currently resolved one.
    pub fn with_fixed_grid(&self) -> Self {
        let mut out = self.clone();
        out.sampling = SamplingSpec {
            delta_t_seconds: Some(self.grid.fast_time_step),
            gate_seconds: Some([self.grid.gate_start, self.grid.gate_end]),
        };
        out
    }

    /// Moving-only and stationary-only copies on this scenario's grid.
    pub fn split_by_motion(&self) -> (Self, Self) {
        let fixed = self.with_fixed_grid();
        let (moving, stationary): (Vec<_>, Vec<_>) =
            self.targets.iter().cloned().partition(|t| !t.is_stationary());
        let mut m = fixed.clone();
        m.targets = moving;
        let mut s = fixed;
        s.targets = stationary;
        (m, s)
    }

    pub fn to_file(&self) -> ScenarioFile {
        self.clone().into()
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| Error::Json {
            path: origin.to_path_buf(),
            source,
        })
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_file())
            .expect("scenario serialization is infallible");
        text.push('\n');
        text
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::file(path))?;
        Self::from_json(&text, path)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

impl TryFrom<ScenarioFile> for Scenario {
    type Error = Error;

    fn try_from(file: ScenarioFile) -> Result<Self> {
        Scenario::new(
            file.pulse,
            file.platform,
            file.reference_point_m,
            file.targets,
            file.sampling,
        )
    }
}

impl From<Scenario> for ScenarioFile {
    fn from(s: Scenario) -> Self {
        ScenarioFile {
            pulse: s.pulse,
            platform: s.platform,
            reference_point_m: s.reference,
            targets: s.targets,
            sampling: s.sampling,
        }
    }
}

fn finite3(v: &Vector3<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn auto_gate(
    pulse: &Pulse,
    platform: &Platform,
    reference: &Vector3<f64>,
    targets: &[Target],
) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for target in targets {
        for s in platform.slow_times() {
            let d = super::geometry::delay_difference(
                &platform.position(s),
                &target.position(s),
                reference,
            );
            lo = lo.min(d);
            hi = hi.max(d);
        }
    }
    if !lo.is_finite() {
        lo = 0.0;
        hi = 0.0;
    }
    let margin = AUTO_GATE_MARGIN / pulse.bandwidth();
    (lo - margin, hi + margin)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pulse() -> Pulse {
        Pulse::new(9.6e9, 311e6, BandwidthConvention::Angular).unwrap()
    }

    fn platform() -> Platform {
        Platform {
            position_at_zero_m: Vector3::new(7100.0, 0.0, 7300.0),
            velocity_m_per_s: Vector3::new(0.0, 300.0, 0.0),
            delta_s_seconds: 0.015,
            pulse_count: 237,
        }
    }

    #[test]
    fn bandwidth_conventions() {
        let p = pulse();
        assert!((p.bandwidth() - 2.0 * PI * 311e6).abs() < 1e-3);
        let plain = Pulse::new(9.6e9, 311e6, BandwidthConvention::Plain).unwrap();
        assert_eq!(plain.bandwidth(), 311e6);
        assert!(p.is_narrowband());
        assert!(Pulse::new(1.0, 0.2, BandwidthConvention::Angular)
            .map(|p| !p.is_narrowband())
            .unwrap());
    }

    #[test]
    fn slow_times_are_centered() {
        let p = platform();
        let s = p.slow_times();
        assert_eq!(s.len(), 237);
        assert_eq!(s[118], 0.0);
        assert!((s[0] + 118.0 * 0.015).abs() < 1e-12);
        assert!((p.half_aperture() - 0.5 * 236.0 * 0.015).abs() < 1e-12);
    }

    #[test]
    fn even_pulse_count_is_rejected() {
        let mut p = platform();
        p.pulse_count = 236;
        let err = Scenario::auto(pulse(), p, Vector3::zeros(), vec![]).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn column_count_formula() {
        let g = SamplingGrid::new(0.25, -1.0, 1.0).unwrap();
        assert_eq!(g.columns(), 9);
        let g = SamplingGrid::new(0.3, 0.0, 1.0).unwrap();
        assert_eq!(g.columns(), 4);
    }

    #[test]
    fn default_step_respects_both_limits() {
        let p = pulse();
        let dt = default_fast_time_step(&p);
        assert!(p.bandwidth() * dt <= 0.2 + 1e-15);
        assert!(p.carrier() * dt <= 0.5 + 1e-15);
    }

    #[test]
    fn json_keeps_explicit_sampling() {
        let s = Scenario::new(
            pulse(),
            platform(),
            Vector3::zeros(),
            vec![Target::stationary(Vector3::new(1.0, 2.0, 0.0), 1.0)],
            SamplingSpec {
                delta_t_seconds: Some(1e-10),
                gate_seconds: Some([-1e-8, 1e-8]),
            },
        )
        .unwrap();
        let back = Scenario::from_json(&s.to_json(), Path::new("mem")).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.columns(), 201);
    }

    #[test]
    fn unknown_fields_are_rejected_with_position() {
        let text = r#"{"pulse": {"carrier_frequency_hz": 1.0, "bandwidth_parameter_hz": 0.1, "oops": 1}}"#;
        let err = Scenario::from_json(text, Path::new("bad.json")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bad.json") && msg.contains("line 1"), "{msg}");
    }
}
