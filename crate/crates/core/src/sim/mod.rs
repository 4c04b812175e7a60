//! Down-ramped SAR data for scenes of stationary and moving point targets.

pub mod geometry;
pub mod scenario;
mod synth;

pub use geometry::{column_support, delay_difference, delay_table, delta_tau, travel_time};
pub use scenario::{
    default_fast_time_step, BandwidthConvention, Platform, Pulse, SamplingGrid, SamplingSpec,
    Scenario, ScenarioFile, Target, SPEED_OF_LIGHT,
};
pub use synth::{
    check_gate, synthesize, synthesize_baseband_direct, synthesize_downramped, DataMatrix,
    SarSample,
};
pub(crate) use synth::check_shape;

#[cfg(test)]
mod tests {
    use nalgebra::Vector3;
    use num_complex::Complex64;

    use super::*;
    use crate::error::Error;
    use crate::linalg::max_abs;
    use crate::presets;

    fn one_target_scene(target: Target) -> Scenario {
        presets::scaled_scene().unwrap().with_targets(vec![target]).unwrap()
    }

    #[test]
    fn empty_scene_gives_zero_matrix() {
        let sc = presets::scaled_scene().unwrap().with_targets(vec![]).unwrap();
        let d = synthesize_downramped(&sc).unwrap();
        assert!(d.values.iter().all(|&x| x == 0.0));
        let b = synthesize_baseband_direct(&sc).unwrap();
        assert!(b.values.iter().all(|x| *x == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn single_row_is_sampled_modulated_gaussian() {
        let target = Target::stationary(Vector3::new(2.0, 1.0, 0.0), 0.7);
        let sc = one_target_scene(target.clone());
        let d = synthesize_downramped(&sc).unwrap();
        let row = 17;
        let s = sc.platform.slow_time(row);
        let delay = delta_tau(&sc, &target, s);
        let (w0, b) = (sc.pulse.carrier(), sc.pulse.bandwidth());
        for l in (0..sc.columns()).step_by(7) {
            let u = sc.grid().fast_time(l) - delay;
            let expected = 0.7 * (w0 * u).cos() * (-0.5 * b * b * u * u).exp();
            assert!((d.values[(row, l)] - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn superposition_of_two_targets() {
        let base = presets::scaled_scene().unwrap();
        let a = Target::stationary(Vector3::new(3.0, -2.0, 0.0), 1.0);
        let b = Target::moving(Vector3::new(-4.0, 1.0, 0.0), Vector3::new(6.0, 0.0, 0.0), 0.4);
        let both = base.with_targets(vec![a.clone(), b.clone()]).unwrap();
        let fixed = both.with_fixed_grid();
        let mut only_a = fixed.clone();
        only_a.targets = vec![a];
        let mut only_b = fixed.clone();
        only_b.targets = vec![b];
        let sum = synthesize::<f64>(&only_a).unwrap() + synthesize::<f64>(&only_b).unwrap();
        let joint = synthesize::<f64>(&fixed).unwrap();
        assert!(max_abs(&(joint - sum)) < 1e-14);
    }

    #[test]
    fn baseband_model_has_gaussian_modulus_and_constant_row_phase() {
        let target = Target::moving(
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(5.0, 0.0, 0.0),
            1.0,
        );
        let sc = one_target_scene(target.clone());
        let b = synthesize_baseband_direct(&sc).unwrap();
        let row = 40;
        let delay = delta_tau(&sc, &target, sc.platform.slow_time(row));
        let phase = sc.pulse.carrier() * delay;
        let bw = sc.pulse.bandwidth();
        for l in 0..sc.columns() {
            let z = b.values[(row, l)];
            let u = sc.grid().fast_time(l) - delay;
            let env = (-0.5 * bw * bw * u * u).exp();
            assert!((z.norm() - env).abs() < 1e-14);
            if env > 1e-6 {
                let dphi = (z.arg() - phase).rem_euclid(2.0 * std::f64::consts::PI);
                assert!(!(1e-9..=std::f64::consts::TAU - 1e-9).contains(&dphi));
            }
        }
    }

    #[test]
    fn narrow_gate_reports_offending_target() {
        let base = presets::scaled_scene().unwrap();
        let mut sampling = base.sampling().clone();
        // Gate that only covers the origin.
        let half = 3.0 / base.pulse.bandwidth();
        sampling.gate_seconds = Some([-half, half]);
        let targets = vec![
            Target::stationary(Vector3::zeros(), 1.0),
            Target::stationary(Vector3::new(9.0, 0.0, 0.0), 1.0),
        ];
        let sc = base.with_targets(targets).unwrap().with_sampling(sampling).unwrap();
        match synthesize_downramped(&sc) {
            Err(Error::GateTooNarrow { target, .. }) => assert_eq!(target, 0),
            other => panic!("expected GateTooNarrow, got {other:?}"),
        }
    }

    #[test]
    fn entries_bounded_by_total_reflectivity() {
        let sc = presets::scaled_scene().unwrap();
        let d = synthesize_downramped(&sc).unwrap();
        let total: f64 = sc.targets.iter().map(|t| t.reflectivity).sum();
        assert!(d.values.iter().all(|x| x.is_finite()));
        assert!(max_abs(&d.values) <= total);
    }
}
