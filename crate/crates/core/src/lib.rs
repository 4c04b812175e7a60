pub mod analysis;
pub mod baseband;
pub mod cli;
pub mod error;
pub mod eta;
pub mod imaging;
pub mod io;
pub mod linalg;
pub mod pipeline;
pub mod presets;
pub mod rpca;
pub mod sim;

pub use error::{Error, Result};
