//! On-disk formats: binary matrix files, 16-bit PGM images and CSV tables.
//!
//! Matrix file layout (all integers little-endian):
//!
//! ```text
//! "SARM" | version u16 | kind u16 | rows u64 | cols u64
//! payload: rows*cols f64 (kind 0) or interleaved re,im f64 pairs (kind 1), row-major
//! metadata length u64 | metadata JSON (UTF-8)
//! ```

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baseband::Provenance;
use crate::error::{Error, Result};
use crate::sim::Scenario;

pub const MAGIC: &[u8; 4] = b"SARM";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 2 + 8 + 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Real,
    Complex,
}

impl ElementKind {
    fn code(self) -> u16 {
        match self {
            ElementKind::Real => 0,
            ElementKind::Complex => 1,
        }
    }

    fn from_code(code: u16) -> Result<Self> {
        match code {
            0 => Ok(ElementKind::Real),
            1 => Ok(ElementKind::Complex),
            other => Err(Error::Format(format!("unknown element kind {other}"))),
        }
    }

    pub fn size(self) -> usize {
        match self {
            ElementKind::Real => 8,
            ElementKind::Complex => 16,
        }
    }
}

/// Which stage produced a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixRole {
    /// Simulated down-ramped data.
    Data,
    /// Complex baseband data.
    Baseband(Provenance),
    LowRank,
    Sparse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixMetadata {
    /// SHA-256 of the scenario's canonical JSON.
    pub scenario_hash: String,
    pub regime: Option<String>,
    pub provenance: MatrixRole,
    pub scenario: Scenario,
}

impl MatrixMetadata {
    pub fn new(scenario: &Scenario, regime: Option<String>, provenance: MatrixRole) -> Self {
        Self {
            scenario_hash: scenario_hash(scenario),
            regime,
            provenance,
            scenario: scenario.clone(),
        }
    }
}

pub fn scenario_hash(scenario: &Scenario) -> String {
    Sha256::digest(scenario.to_json().as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixData {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

impl MatrixData {
    pub fn kind(&self) -> ElementKind {
        match self {
            MatrixData::Real(_) => ElementKind::Real,
            MatrixData::Complex(_) => ElementKind::Complex,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            MatrixData::Real(m) => m.shape(),
            MatrixData::Complex(m) => m.shape(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub data: MatrixData,
    pub metadata: MatrixMetadata,
}

impl MatrixFile {
    /// Checks the matrix against the scenario stored in the metadata.
    pub fn new(data: MatrixData, metadata: MatrixMetadata) -> Result<Self> {
        let (rows, cols) = data.shape();
        let (expected_rows, expected_cols) = metadata.scenario.shape();
        if (rows, cols) != (expected_rows, expected_cols) {
            return Err(Error::MismatchedScenario { rows, cols, expected_rows, expected_cols });
        }
        Ok(Self { data, metadata })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let (rows, cols) = self.data.shape();
        let kind = self.data.kind();
        let meta = serde_json::to_vec(&self.metadata).expect("metadata serialization is infallible");
        let mut out = Vec::with_capacity(HEADER_LEN + rows * cols * kind.size() + 8 + meta.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&kind.code().to_le_bytes());
        out.extend_from_slice(&(rows as u64).to_le_bytes());
        out.extend_from_slice(&(cols as u64).to_le_bytes());
        for i in 0..rows {
            for j in 0..cols {
                match &self.data {
                    MatrixData::Real(m) => out.extend_from_slice(&m[(i, j)].to_le_bytes()),
                    MatrixData::Complex(m) => {
                        out.extend_from_slice(&m[(i, j)].re.to_le_bytes());
                        out.extend_from_slice(&m[(i, j)].im.to_le_bytes());
                    }
                }
            }
        }
        out.extend_from_slice(&(meta.len() as u64).to_le_bytes());
        out.extend_from_slice(&meta);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Format("truncated header".into()));
        }
        if &bytes[..4] != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let u16_at = |o: usize| u16::from_le_bytes([bytes[o], bytes[o + 1]]);
        let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let version = u16_at(4);
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let kind = ElementKind::from_code(u16_at(6))?;
        let (rows, cols) = (u64_at(8), u64_at(16));
        let payload = rows
            .checked_mul(cols)
            .and_then(|n| n.checked_mul(kind.size() as u64))
            .filter(|&n| n <= (bytes.len() - HEADER_LEN) as u64)
            .ok_or_else(|| Error::Format(format!("payload of {rows}x{cols} exceeds file length")))?
            as usize;
        let (rows, cols) = (rows as usize, cols as usize);
        let meta_at = HEADER_LEN + payload;
        if bytes.len() < meta_at + 8 {
            return Err(Error::Format("missing metadata length".into()));
        }
        let meta_len = u64_at(meta_at) as usize;
        if bytes.len() - meta_at - 8 != meta_len {
            return Err(Error::Format(format!(
                "metadata length {meta_len} does not match remaining {} bytes",
                bytes.len() - meta_at - 8
            )));
        }
        let metadata: MatrixMetadata = serde_json::from_slice(&bytes[meta_at + 8..])
            .map_err(|e| Error::Format(format!("metadata: {e}")))?;

        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let body = HEADER_LEN;
        let data = match kind {
            ElementKind::Real => MatrixData::Real(DMatrix::from_fn(rows, cols, |i, j| f64_at(body + 8 * (i * cols + j)))),
            ElementKind::Complex => MatrixData::Complex(DMatrix::from_fn(rows, cols, |i, j| {
                let o = body + 16 * (i * cols + j);
                Complex64::new(f64_at(o), f64_at(o + 8))
            })),
        };
        Self::new(data, metadata)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path).map_err(Error::file(path))?);
        w.write_all(&self.to_bytes()).and_then(|_| w.flush()).map_err(Error::file(path))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        File::open(path).and_then(|mut f| f.read_to_end(&mut bytes)).map_err(Error::file(path))?;
        Self::from_bytes(&bytes)
    }

    pub fn real(&self) -> Result<&DMatrix<f64>> {
        match &self.data {
            MatrixData::Real(m) => Ok(m),
            MatrixData::Complex(_) => Err(Error::InvalidInput("expected a real matrix".into())),
        }
    }

    pub fn complex(&self) -> Result<&DMatrix<Complex64>> {
        match &self.data {
            MatrixData::Complex(m) => Ok(m),
            MatrixData::Real(_) => Err(Error::InvalidInput("expected a complex matrix".into())),
        }
    }
}

/// Binary PGM (P5) with 16-bit samples, `values` scaled so the maximum maps
/// to 65535. Row 0 of `values` is written first.
pub fn pgm_bytes(values: &DMatrix<f64>) -> Vec<u8> {
    let (h, w) = values.shape();
    let top = values.iter().cloned().fold(0.0, f64::max);
    let mut out = format!("P5\n{w} {h}\n65535\n").into_bytes();
    for i in 0..h {
        for j in 0..w {
            let v = if top > 0.0 { (values[(i, j)] / top).clamp(0.0, 1.0) } else { 0.0 };
            out.extend_from_slice(&((v * 65535.0).round() as u16).to_be_bytes());
        }
    }
    out
}

pub fn write_pgm(path: &Path, values: &DMatrix<f64>) -> Result<()> {
    std::fs::write(path, pgm_bytes(values)).map_err(Error::file(path))
}

/// Parses a 16-bit P5 image back into `[0, 1]` values.
pub fn read_pgm(path: &Path) -> Result<DMatrix<f64>> {
    let bytes = std::fs::read(path).map_err(Error::file(path))?;
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format("truncated PGM header".into()));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1;
    let parse = |s: &str| s.parse::<usize>().map_err(|_| Error::Format(format!("bad PGM field {s:?}")));
    if fields[0] != "P5" || parse(&fields[3])? != 65535 {
        return Err(Error::Format("expected a 16-bit P5 image".into()));
    }
    let (w, h) = (parse(&fields[1])?, parse(&fields[2])?);
    if bytes.len() < pos + 2 * w * h {
        return Err(Error::Format("truncated PGM payload".into()));
    }
    Ok(DMatrix::from_fn(h, w, |i, j| {
        let o = pos + 2 * (i * w + j);
        u16::from_be_bytes([bytes[o], bytes[o + 1]]) as f64 / 65535.0
    }))
}

/// Writes a matrix as CSV with no header row.
pub fn write_matrix_csv(path: &Path, values: &DMatrix<f64>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for row in values.row_iter() {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes serializable records with a header row.
pub fn write_records<S: Serialize>(path: &Path, records: &[S]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report serialization is infallible");
    text.push('\n');
    std::fs::write(path, text).map_err(Error::file(path))
}
