//! Kirchhoff migration of the reference scene, with and without tracking the
//! mover, written as PGM images.

use nalgebra::Vector3;
use num_complex::Complex64;
use sar_rpca::imaging::{migrate, peak_report, ImageSource, Interpolation};
use sar_rpca::io::write_pgm;
use sar_rpca::pipeline::{default_grid, slowest_mover};
use sar_rpca::presets::Regime;
use sar_rpca::sim::synthesize;

fn main() -> sar_rpca::Result<()> {
    let out = std::env::temp_dir().join("sar-rpca-km");
    std::fs::create_dir_all(&out)?;
    let sc = Regime::Scaled.scene()?;
    let grid = default_grid(&sc)?;
    let b = synthesize::<Complex64>(&sc)?;
    let mover = slowest_mover(&sc).unwrap_or_else(Vector3::zeros);
    for (name, v) in [("static", Vector3::zeros()), ("tracked", mover)] {
        let img = migrate(&b, &sc, &grid, v, ImageSource::D, Interpolation::Linear)?;
        let path = out.join(format!("{name}.pgm"));
        write_pgm(&path, &img.magnitude())?;
        println!("{name}: {} -> {} peaks", path.display(), peak_report(&img).len());
        for p in peak_report(&img).iter().take(6) {
            println!("   ({:6.2}, {:6.2}) m  |I| {:8.3}  peak/background {:7.2}", p.position_m.x, p.position_m.y, p.magnitude, p.peak_to_background);
        }
    }
    Ok(())
}
