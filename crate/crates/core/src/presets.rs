//! Named parameter sets.
//!
//! `gotcha` is the X-band surveillance configuration (9.6 GHz carrier,
//! 311 MHz bandwidth parameter, 300 m/s platform, 237 pulses). `scaled`
//! keeps the same geometry with a lower carrier and bandwidth
//! (`omega0 / B = 20`) and fewer pulses so full matrices fit on a desk.

use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{BandwidthConvention, Platform, Pulse, Scenario, Target};

/// Stationary scatterers of the reference scene [m].
pub const SCENE_STATIONARY: [[f64; 3]; 5] = [
    [4.67, -4.35, 0.0],
    [2.06, 9.61, 0.0],
    [-3.02, 10.64, 0.0],
    [1.27, -11.1, 0.0],
    [-4.4, -7.81, 0.0],
];

/// Stationary positions for scenes with one to ten targets; the first five
/// are the reference scene's.
pub const COUNT_SWEEP_STATIONARY: [[f64; 3]; 10] = [
    [4.67, -4.35, 0.0],
    [2.06, 9.61, 0.0],
    [-3.02, 10.64, 0.0],
    [1.27, -11.1, 0.0],
    [-4.4, -7.81, 0.0],
    [8.3, 2.1, 0.0],
    [-7.2, 4.9, 0.0],
    [0.5, 3.3, 0.0],
    [-11.6, -12.4, 0.0],
    [10.8, -9.0, 0.0],
];

/// Position of the moving scatterer of the reference scene at `s = 0` [m].
pub const SCENE_MOVING_START: [f64; 3] = [-9.43, -3.07, 0.0];

/// Alternative moving-target start used for spectrum studies [m].
pub const SPECTRUM_MOVING_START: [f64; 3] = [5.8, 7.29, 0.0];

pub const SCENE_MOVING_SPEED: f64 = 15.0;

/// Moving-target reflectivity relative to the stationary ones.
pub const SCENE_MOVING_REFLECTIVITY: f64 = 0.05;

pub const SCALED_BANDWIDTH_HZ: f64 = 19.5e6;
pub const SCALED_CARRIER_RATIO: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Gotcha,
    Scaled,
}

impl Regime {
    pub fn pulse(self) -> Pulse {
        match self {
            Regime::Gotcha => Pulse::new(9.6e9, 311e6, BandwidthConvention::Angular),
            Regime::Scaled => Pulse::new(
                SCALED_CARRIER_RATIO * SCALED_BANDWIDTH_HZ,
                SCALED_BANDWIDTH_HZ,
                BandwidthConvention::Angular,
            ),
        }
        .expect("preset pulse is valid")
    }

    pub fn platform(self) -> Platform {
        let (delta_s_seconds, pulse_count) = match self {
            Regime::Gotcha => (0.015, 237),
            Regime::Scaled => (0.03, 121),
        };
        Platform {
            position_at_zero_m: Vector3::new(7100.0, 0.0, 7300.0),
            velocity_m_per_s: Vector3::new(0.0, 300.0, 0.0),
            delta_s_seconds,
            pulse_count,
        }
    }

    /// Empty scene on this regime; the gate follows whatever targets are added.
    pub fn empty(self) -> Result<Scenario> {
        Scenario::auto(self.pulse(), self.platform(), Vector3::zeros(), Vec::new())
    }

    /// Five stationary targets and one moving target at 15 m/s along x.
    pub fn scene(self) -> Result<Scenario> {
        Scenario::auto(self.pulse(), self.platform(), Vector3::zeros(), scene_targets())
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Gotcha => "gotcha",
            Regime::Scaled => "scaled",
        })
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gotcha" => Ok(Regime::Gotcha),
            "scaled" => Ok(Regime::Scaled),
            other => Err(Error::Config(format!("unknown regime '{other}'"))),
        }
    }
}

pub fn scene_targets() -> Vec<Target> {
    let mut targets: Vec<Target> = SCENE_STATIONARY
        .iter()
        .map(|p| Target::stationary(Vector3::from(*p), 1.0))
        .collect();
    targets.push(Target::moving(
        Vector3::from(SCENE_MOVING_START),
        Vector3::new(SCENE_MOVING_SPEED, 0.0, 0.0),
        SCENE_MOVING_REFLECTIVITY,
    ));
    targets
}

pub fn gotcha_scene() -> Result<Scenario> {
    Regime::Gotcha.scene()
}

pub fn scaled_scene() -> Result<Scenario> {
    Regime::Scaled.scene()
}
