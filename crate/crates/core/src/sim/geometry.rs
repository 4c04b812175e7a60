//! Travel times under the start-stop approximation.

use nalgebra::Vector3;

use super::scenario::{Scenario, Target, SPEED_OF_LIGHT};

/// Round-trip travel time `2 |r(s) - rho| / c` from the platform at slow time `s`.
pub fn travel_time(scenario: &Scenario, s: f64, point: &Vector3<f64>) -> f64 {
    2.0 * (scenario.platform.position(s) - point).norm() / SPEED_OF_LIGHT
}

/// `(2/c)(|r - rho| - |r - rho_o|)`, evaluated without cancellation.
pub fn delay_difference(
    antenna: &Vector3<f64>,
    point: &Vector3<f64>,
    reference: &Vector3<f64>,
) -> f64 {
    let to_point = antenna - point;
    let to_reference = antenna - reference;
    let a = to_point.norm();
    let b = to_reference.norm();
    let sum = a + b;
    if sum == 0.0 {
        return 0.0;
    }
    // |a|^2 - |b|^2 = (rho_o - rho) . (2r - rho - rho_o)
    let diff_sq = (reference - point).dot(&(to_point + to_reference));
    2.0 * diff_sq / sum / SPEED_OF_LIGHT
}

/// Delay of `target` relative to the reference point at slow time `s`.
pub fn delta_tau(scenario: &Scenario, target: &Target, s: f64) -> f64 {
    delay_difference(
        &scenario.platform.position(s),
        &target.position(s),
        &scenario.reference,
    )
}

/// `delta_tau` for every target (outer) and matrix row (inner).
pub fn delay_table(scenario: &Scenario) -> Vec<Vec<f64>> {
    let slow = scenario.platform.slow_times();
    scenario
        .targets
        .iter()
        .map(|t| slow.iter().map(|&s| delta_tau(scenario, t, s)).collect())
        .collect()
}

/// Fast-time column support of a target's trace,
/// `max(1, ceil((max_j dtau - min_j dtau) / dt))`.
pub fn column_support(scenario: &Scenario, target: &Target) -> usize {
    let (lo, hi) = scenario
        .platform
        .slow_times()
        .iter()
        .map(|&s| delta_tau(scenario, target, s))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| {
            (lo.min(d), hi.max(d))
        });
    let span = (hi - lo) / scenario.grid().fast_time_step;
    (span.ceil() as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn coincident_point_has_zero_travel_time() {
        let sc = presets::gotcha_scene().unwrap();
        let r = sc.platform.position(0.3);
        assert_eq!(travel_time(&sc, 0.3, &r), 0.0);
    }

    #[test]
    fn reference_travel_time_at_zero() {
        let sc = presets::gotcha_scene().unwrap();
        let expected = 2.0 * (7100.0f64 * 7100.0 + 7300.0 * 7300.0).sqrt() / SPEED_OF_LIGHT;
        let got = travel_time(&sc, 0.0, &Vector3::zeros());
        assert!((got - expected).abs() <= 1e-15 * expected);
    }

    #[test]
    fn stable_difference_matches_direct_arithmetic() {
        let sc = presets::gotcha_scene().unwrap();
        for target in &sc.targets {
            for s in [-1.7, -0.4, 0.0, 0.9, 1.77] {
                let r = sc.platform.position(s);
                let direct = 2.0 * ((r - target.position(s)).norm() - (r - sc.reference).norm())
                    / SPEED_OF_LIGHT;
                let got = delta_tau(&sc, target, s);
                // Direct subtraction of ~1e4 m norms loses ~1e-12 m.
                assert!((got - direct).abs() < 1e-19, "{got} vs {direct}");
            }
        }
    }

    #[test]
    fn target_at_reference_has_zero_delay() {
        let sc = presets::gotcha_scene().unwrap();
        let t = Target::stationary(sc.reference, 1.0);
        for s in sc.platform.slow_times() {
            assert_eq!(delta_tau(&sc, &t, s), 0.0);
        }
    }

    #[test]
    fn sign_follows_relative_range() {
        let sc = presets::gotcha_scene().unwrap();
        let near = Target::stationary(Vector3::new(5.0, 0.0, 0.0), 1.0);
        let far = Target::stationary(Vector3::new(-5.0, 0.0, 0.0), 1.0);
        assert!(delta_tau(&sc, &near, 0.0) < 0.0);
        assert!(delta_tau(&sc, &far, 0.0) > 0.0);
    }

    #[test]
    fn translation_invariance() {
        let sc = presets::gotcha_scene().unwrap();
        let shift = Vector3::new(12.0, -3.0, 4.5);
        let r = sc.platform.position(0.2);
        let p = Vector3::new(1.0, 2.0, 0.0);
        let a = delay_difference(&r, &p, &sc.reference);
        let b = delay_difference(&(r + shift), &(p + shift), &(sc.reference + shift));
        assert!((a - b).abs() < 1e-20);
    }
}
