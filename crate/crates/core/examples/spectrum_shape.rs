//! Singular values of a moving trace: Gaussian decay and the two-copy
//! relation between the real and baseband matrices.

use nalgebra::Vector3;
use num_complex::Complex64;
use sar_rpca::analysis::{gaussian_decay_fit, line_of_sight, single_target, spectrum, two_copy_deviation};
use sar_rpca::eta::{ApertureParams, MatrixKind};
use sar_rpca::presets::Regime;
use sar_rpca::sim::synthesize;

fn main() -> sar_rpca::Result<()> {
    let tpl = Regime::Scaled.empty()?;
    let v = -line_of_sight(&tpl) * 5.0;
    let sc = single_target(&tpl, Vector3::new(-9.43, -3.07, 0.0), v)?;
    let d = spectrum(&synthesize::<f64>(&sc)?)?;
    let b = spectrum(&synthesize::<Complex64>(&sc)?)?
        .with_model(&ApertureParams::from_scenario(&sc, v), MatrixKind::Baseband, 1.0)?;
    let fit = gaussian_decay_fit(&b.singular_values)?;
    println!("effective support {}, log sigma^2 vs k^2: slope {:.4e}, R^2 {:.4}", b.effective_support, fit.slope, fit.r_squared);
    println!("two-copy deviation {:.3}", two_copy_deviation(&d.singular_values, &b.singular_values));
    println!("nuclear norms: D {:.4}  D_B {:.4}", d.nuclear_norm, b.nuclear_norm);
    let model = b.model.unwrap_or_default();
    for k in 0..b.effective_support.min(12) {
        println!("  k={k:2}  baseband {:.4e}  model {:.4e}  real {:.4e}", b.singular_values[k], model.get(k).copied().unwrap_or(0.0), d.singular_values[k]);
    }
    Ok(())
}
