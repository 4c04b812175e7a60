//! Writes a baseband matrix to the binary matrix format and reads it back.

use num_complex::Complex64;
use sar_rpca::baseband::Provenance;
use sar_rpca::io::{MatrixData, MatrixFile, MatrixMetadata, MatrixRole};
use sar_rpca::presets::Regime;
use sar_rpca::sim::synthesize;

fn main() -> sar_rpca::Result<()> {
    let sc = Regime::Scaled.scene()?;
    let b = synthesize::<Complex64>(&sc)?;
    let meta = MatrixMetadata::new(&sc, Some("scaled".into()), MatrixRole::Baseband(Provenance::DirectModel));
    let file = MatrixFile::new(MatrixData::Complex(b), meta)?;
    let path = std::env::temp_dir().join("scene_baseband.sarm");
    file.write(&path)?;
    let back = MatrixFile::read(&path)?;
    println!("{}: {} bytes, shape {:?}", path.display(), std::fs::metadata(&path)?.len(), back.data.shape());
    println!("scenario hash {}", back.metadata.scenario_hash);
    println!("identical after reload: {}", back == file);
    Ok(())
}
