//! Prints a preset scenario as JSON.
//!
//! cargo run --example scenario_json -- scaled > scene.json

use sar_rpca::presets::Regime;

fn main() -> sar_rpca::Result<()> {
    let regime: Regime = std::env::args().nth(1).as_deref().unwrap_or("scaled").parse()?;
    print!("{}", regime.scene()?.to_json());
    Ok(())
}
