//! Down-ramped and baseband data of the reference scene.

use num_complex::Complex64;
use sar_rpca::linalg::{frobenius_norm, l1_norm, max_abs, nuclear_norm};
use sar_rpca::presets::Regime;
use sar_rpca::sim::synthesize;

fn main() -> sar_rpca::Result<()> {
    let sc = Regime::Scaled.scene()?;
    let g = sc.grid();
    println!("{} pulses x {} fast-time samples", sc.rows(), sc.columns());
    println!("dt = {:.3e} s, gate [{:.4e}, {:.4e}] s", g.fast_time_step, g.gate_start, g.gate_end);

    let d = synthesize::<f64>(&sc)?;
    let b = synthesize::<Complex64>(&sc)?;
    println!("        {:>12} {:>12} {:>12} {:>12}", "max", "l1", "frobenius", "nuclear");
    println!("D       {:12.4} {:12.2} {:12.4} {:12.4}", max_abs(&d), l1_norm(&d), frobenius_norm(&d), nuclear_norm(&d)?);
    println!("D_B     {:12.4} {:12.2} {:12.4} {:12.4}", max_abs(&b), l1_norm(&b), frobenius_norm(&b), nuclear_norm(&b)?);
    Ok(())
}
