//! Nuclear norm of a single moving trace against radial speed.

use nalgebra::Vector3;
use sar_rpca::analysis::{line_of_sight, nuclear_velocity_exponent};
use sar_rpca::eta::MatrixKind;
use sar_rpca::pipeline::log_spaced;
use sar_rpca::presets::Regime;
use sar_rpca::sim::SamplingSpec;

fn main() -> sar_rpca::Result<()> {
    let base = Regime::Scaled.empty()?;
    let sc = base.with_sampling(SamplingSpec { delta_t_seconds: Some(0.2 / base.pulse.bandwidth()), gate_seconds: None })?;
    let speeds = log_spaced(5.0, 50.0, 6);
    for kind in [MatrixKind::Baseband, MatrixKind::Original] {
        let s = nuclear_velocity_exponent(&sc, Vector3::zeros(), -line_of_sight(&sc), &speeds, kind)?;
        println!("{kind:?}: beta = {:.3}, Frobenius slope = {:.4}", s.beta, s.frobenius_slope);
        for (v, n) in s.speeds.iter().zip(&s.nuclear_norms) {
            println!("  {v:7.2} m/s  |D|_* = {n:.4}");
        }
    }
    Ok(())
}
