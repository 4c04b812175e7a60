use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use num_complex::Complex64;
use sar_rpca::linalg::{frobenius_norm, max_abs};
use sar_rpca::presets::Regime;
use sar_rpca::sim::{delay_difference, synthesize, travel_time, SamplingSpec, Scenario, Target, SPEED_OF_LIGHT};
use sar_rpca::Error;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

#[test]
fn preset_fixtures_round_trip_byte_identically() {
    for (name, regime) in [("gotcha.json", Regime::Gotcha), ("scaled.json", Regime::Scaled)] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let sc = Scenario::from_json(&text, &fixture(name)).unwrap();
        assert_eq!(sc.to_json(), text, "{name}");
        assert_eq!(sc, regime.scene().unwrap(), "{name}");
    }
}

#[test]
fn scenario_errors_name_file_and_line() {
    let text = "{\n  \"pulse\": {\n    \"carrier_frequency_hz\": \"fast\"\n  }\n}\n";
    let err = Scenario::from_json(text, Path::new("scene.json")).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    let msg = err.to_string();
    assert!(msg.contains("scene.json") && msg.contains("line 3"), "{msg}");
}

#[test]
fn empty_scene_is_all_zero() {
    let sc = Regime::Scaled.empty().unwrap();
    let d = synthesize::<f64>(&sc).unwrap();
    assert!(d.ncols() > 0);
    assert_eq!(max_abs(&d), 0.0);
}

#[test]
fn gate_too_narrow_is_a_physics_error() {
    let base = Regime::Scaled.scene().unwrap();
    let half = 20.0 / base.pulse.bandwidth();
    let sc = base
        .with_sampling(SamplingSpec { delta_t_seconds: None, gate_seconds: Some([-half, half]) })
        .unwrap();
    let err = synthesize::<f64>(&sc).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    match err {
        Error::GateTooNarrow { target, delay, gate_start, gate_end, .. } => {
            // The first target whose echo leaves the gate, found by brute force.
            let expected = sc
                .targets
                .iter()
                .position(|t| {
                    sc.platform.slow_times().iter().any(|&s| {
                        let d = delay_difference(&sc.platform.position(s), &t.position(s), &sc.reference);
                        d - 4.0 / sc.pulse.bandwidth() < -half || d + 4.0 / sc.pulse.bandwidth() > half
                    })
                })
                .unwrap();
            assert_eq!(target, expected);
            assert!(delay.abs() > 16.0 / sc.pulse.bandwidth());
            assert_eq!((gate_start, gate_end), (-half, half));
        }
        other => panic!("expected GateTooNarrow, got {other:?}"),
    }
}

#[test]
fn stable_delay_matches_extended_precision_reference() {
    let sc = Regime::Gotcha.empty().unwrap();
    let antenna = sc.platform.position(0.7);
    let p = Vector3::new(3.3, -1.2, 0.0);
    // Two-way difference of ranges via (a^2 - b^2) / (a + b), written out independently.
    let a2 = (antenna - p).norm_squared();
    let b2 = antenna.norm_squared();
    let num = 2.0 * (p.norm_squared() - 2.0 * antenna.dot(&p)) / ((a2.sqrt() + b2.sqrt()) * SPEED_OF_LIGHT);
    let got = delay_difference(&antenna, &p, &Vector3::zeros());
    assert!((got - num).abs() <= 1e-12 * num.abs(), "{got} vs {num}");
    assert!((travel_time(&sc, 0.7, &p) - 2.0 * a2.sqrt() / SPEED_OF_LIGHT).abs() < 1e-15);
}

#[test]
fn reflectivity_scales_linearly() {
    let tpl = Regime::Scaled.empty().unwrap();
    let make = |r: f64| tpl.with_targets(vec![Target::moving(Vector3::new(2.0, 3.0, 0.0), Vector3::new(4.0, -2.0, 0.0), r)]).unwrap();
    let one = synthesize::<Complex64>(&make(1.0)).unwrap();
    let three = synthesize::<Complex64>(&make(3.0)).unwrap();
    assert!(frobenius_norm(&(&three - &one * Complex64::new(3.0, 0.0))) <= 1e-12 * frobenius_norm(&three));
}

#[test]
fn baseband_rows_have_the_carrier_phase_of_the_delay() {
    let tpl = Regime::Scaled.empty().unwrap();
    let t = Target::stationary(Vector3::new(4.67, -4.35, 0.0), 1.0);
    let sc = tpl.with_targets(vec![t.clone()]).unwrap();
    let b = synthesize::<Complex64>(&sc).unwrap();
    let g = sc.grid();
    for (j, s) in sc.platform.slow_times().into_iter().enumerate().step_by(20) {
        let d = delay_difference(&sc.platform.position(s), &t.position(s), &sc.reference);
        let l = ((d - g.gate_start) / g.fast_time_step).round() as usize;
        let z = b[(j, l)];
        let expected = Complex64::from_polar(1.0, sc.pulse.carrier() * d);
        assert!((z / z.norm() - expected).norm() < 1e-9);
        let off = g.fast_time(l) - d;
        let env = (-0.5 * (sc.pulse.bandwidth() * off).powi(2)).exp();
        assert!((z.norm() - env).abs() < 1e-12);
    }
}
