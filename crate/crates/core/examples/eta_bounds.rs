//! Analytic sparsity-weight bounds against target speed, in both regimes.

use nalgebra::Vector3;
use sar_rpca::analysis::line_of_sight;
use sar_rpca::eta::{conventional_eta, eta_bounds, ApertureParams, MatrixKind};
use sar_rpca::presets::Regime;

fn main() -> sar_rpca::Result<()> {
    for regime in [Regime::Scaled, Regime::Gotcha] {
        let sc = regime.empty()?;
        let radial = -line_of_sight(&sc);
        println!("{regime}: conventional eta for the reference scene {:.5}", {
            let full = regime.scene()?;
            conventional_eta(full.rows(), full.columns())
        });
        println!("  {:>8} {:>6} {:>10} {:>10} {:>10} {:>8}", "v [m/s]", "N", "eta_min", "eta_max", "eta*", "DR");
        for v in [1.0, 5.0, 15.0, 50.0] {
            for (name, dir) in [("radial", radial), ("along-x", Vector3::x())] {
                let b = eta_bounds(&ApertureParams::from_scenario(&sc, dir * v), MatrixKind::Baseband)?;
                println!(
                    "  {v:8.1} {:6.1} {:10.5} {:10.5} {:10.5} {:8.3}  {name}",
                    b.column_support, b.eta_min, b.eta_max, b.eta_star, b.dynamic_range
                );
            }
        }
    }
    Ok(())
}
