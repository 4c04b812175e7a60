//! Real data to baseband and back, compared with the direct baseband model.

use sar_rpca::baseband::{from_baseband, to_baseband, LowpassFilter};
use sar_rpca::linalg::max_abs;
use sar_rpca::presets::Regime;
use sar_rpca::sim::{synthesize_baseband_direct, synthesize_downramped};

fn main() -> sar_rpca::Result<()> {
    let sc = Regime::Scaled.scene()?;
    let d = synthesize_downramped(&sc)?;
    let filter = LowpassFilter::for_pulse(&sc.pulse);
    let b = to_baseband(&d, &filter)?;
    let back = from_baseband(&b)?;
    let direct = synthesize_baseband_direct(&sc)?;

    let scale = max_abs(&d.values);
    println!("cutoff {:.3e} rad/s, omega0 dt = {:.3}", filter.cutoff, sc.pulse.carrier() * sc.grid().fast_time_step);
    println!("round trip   max error / max|D| = {:.2e}", max_abs(&(&back.values - &d.values)) / scale);
    println!("vs model     max error / max|D| = {:.2e}", max_abs(&(&b.values - &direct.values)) / scale);
    Ok(())
}
