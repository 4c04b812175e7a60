//! Subcommands of the command-line tool, callable as library functions.
//!
//! Every command reads its inputs from and writes its outputs to
//! `RunConfig::out`, so they can be chained:
//! `simulate → baseband → decompose → image`, or run in one go with
//! [`cmd_pipeline`].

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    eta_velocity_sweep, line_of_sight, nuclear_velocity_exponent, separation_metrics, spectrum,
    stationary_count_sweep, EtaSweepPoint, SeparationMetrics,
};
use crate::baseband::{to_baseband, LowpassFilter, Provenance};
use crate::error::{Error, Result};
use crate::eta::{conventional_eta, eta_bounds, ApertureParams, EtaBounds, MatrixKind};
use crate::imaging::{migrate, peak_report, ImageSource, ImagingGrid, Interpolation, KmImage, Peak};
use crate::io::{write_json, write_matrix_csv, write_pgm, write_records, MatrixData, MatrixFile, MatrixMetadata, MatrixRole};
use crate::linalg::Field;
use crate::presets::{Regime, COUNT_SWEEP_STATIONARY, SCENE_STATIONARY};
use crate::rpca::{decompose_windowed, Decomposition, Diagnostics, Eta, RpcaConfig};
use crate::sim::{synthesize, DataMatrix, SamplingSpec, SarSample, Scenario};

pub const DATA_FILE: &str = "D.sarm";
pub const BASEBAND_FILE: &str = "D_B.sarm";
pub const LOW_RANK_FILE: &str = "L.sarm";
pub const SPARSE_FILE: &str = "S.sarm";

/// How the sparsity weight is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EtaModeRepr", into = "EtaModeRepr")]
pub enum EtaMode {
    Conventional,
    /// Analytic optimum for the slowest moving target of the scenario.
    Optimal,
    Value(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EtaModeRepr {
    Value(f64),
    Name(String),
}

impl TryFrom<EtaModeRepr> for EtaMode {
    type Error = Error;

    fn try_from(r: EtaModeRepr) -> Result<Self> {
        match r {
            EtaModeRepr::Value(v) => EtaMode::Value(v).checked(),
            EtaModeRepr::Name(s) => s.parse(),
        }
    }
}

impl From<EtaMode> for EtaModeRepr {
    fn from(m: EtaMode) -> Self {
        match m {
            EtaMode::Value(v) => EtaModeRepr::Value(v),
            other => EtaModeRepr::Name(other.to_string()),
        }
    }
}

impl EtaMode {
    fn checked(self) -> Result<Self> {
        match self {
            EtaMode::Value(v) if !(v.is_finite() && v > 0.0) => {
                Err(Error::Config(format!("eta must be a positive number, got {v}")))
            }
            m => Ok(m),
        }
    }
}

impl FromStr for EtaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conventional" => Ok(EtaMode::Conventional),
            "optimal" => Ok(EtaMode::Optimal),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("eta must be 'conventional', 'optimal' or a number, got '{other}'")))
                .and_then(|v| EtaMode::Value(v).checked()),
        }
    }
}

impl fmt::Display for EtaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EtaMode::Conventional => f.write_str("conventional"),
            EtaMode::Optimal => f.write_str("optimal"),
            EtaMode::Value(v) => write!(f, "{v}"),
        }
    }
}

/// Sweep ranges for `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSettings {
    /// Radial speeds [m/s]; at least four spanning a decade.
    pub speeds_m_per_s: Vec<f64>,
    pub stationary_counts: Vec<usize>,
    /// Fast-time step of the sweeps in units of `1/B`.
    pub bandwidth_step: f64,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        Self {
            speeds_m_per_s: log_spaced(5.0, 50.0, 6),
            stationary_counts: (1..=COUNT_SWEEP_STATIONARY.len()).collect(),
            bandwidth_step: 0.2,
        }
    }
}

pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n.max(2) - 1) as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Scenario JSON; the regime's reference scene when absent.
    pub scenario: Option<PathBuf>,
    pub regime: Regime,
    pub eta: EtaMode,
    pub windows: usize,
    pub tolerance: f64,
    pub step_tolerance: f64,
    pub max_iterations: usize,
    /// Matrix to decompose in `decompose` and `pipeline`.
    pub matrix: MatrixKind,
    /// Input matrix file for `baseband`, `decompose` and `image`.
    pub input: Option<PathBuf>,
    /// Velocity the `image` command tracks; zero is plain SAR imaging.
    pub hypothesis_velocity_m_per_s: Option<Vector3<f64>>,
    pub grid: Option<ImagingGrid>,
    pub interpolation: Interpolation,
    pub analysis: AnalysisSettings,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let rpca = RpcaConfig::default();
        Self {
            scenario: None,
            regime: Regime::Scaled,
            eta: EtaMode::Optimal,
            windows: 1,
            tolerance: rpca.tolerance,
            step_tolerance: rpca.step_tolerance,
            max_iterations: rpca.max_iterations,
            matrix: MatrixKind::Baseband,
            input: None,
            hypothesis_velocity_m_per_s: None,
            grid: None,
            interpolation: Interpolation::Linear,
            analysis: AnalysisSettings::default(),
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// Reads a JSON config; relative paths inside it are taken relative to
    /// the file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::file(path))?;
        let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.scenario, &mut cfg.input].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn scene(&self) -> Result<Scenario> {
        match &self.scenario {
            Some(p) => Scenario::load(p),
            None => self.regime.scene(),
        }
    }

    fn regime_tag(&self) -> Option<String> {
        self.scenario.is_none().then(|| self.regime.to_string())
    }

    pub fn rpca(&self) -> RpcaConfig {
        RpcaConfig {
            tolerance: self.tolerance,
            step_tolerance: self.step_tolerance,
            max_iterations: self.max_iterations,
            ..RpcaConfig::default()
        }
    }

    fn out_path(&self, name: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out).map_err(Error::file(&self.out))?;
        Ok(self.out.join(name))
    }

    fn input_or(&self, default: &str) -> PathBuf {
        self.input.clone().unwrap_or_else(|| self.out.join(default))
    }
}

/// Velocity of the slowest moving target, or `None` for a static scene.
pub fn slowest_mover(scenario: &Scenario) -> Option<Vector3<f64>> {
    scenario
        .targets
        .iter()
        .filter(|t| !t.is_stationary())
        .map(|t| t.velocity_m_per_s)
        .min_by(|a, b| a.norm().total_cmp(&b.norm()))
}

/// Square grid around the reference point, 30 m across, no coarser than the
/// range-resolution limit.
pub fn default_grid(scenario: &Scenario) -> Result<ImagingGrid> {
    let spacing = ImagingGrid::recommended_spacing(&scenario.pulse).min(0.5);
    ImagingGrid::square(scenario.reference, 30.0, spacing)
}

fn source_of(role: MatrixRole) -> ImageSource {
    match role {
        MatrixRole::Data | MatrixRole::Baseband(_) => ImageSource::D,
        MatrixRole::LowRank => ImageSource::L,
        MatrixRole::Sparse => ImageSource::S,
    }
}

fn tag(source: ImageSource) -> &'static str {
    match source {
        ImageSource::D => "D",
        ImageSource::L => "L",
        ImageSource::S => "S",
    }
}

/// `simulate`: writes the down-ramped data matrix and the scenario it came from.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<MatrixFile> {
    let sc = cfg.scene()?;
    let d = synthesize::<f64>(&sc)?;
    let file = MatrixFile::new(
        MatrixData::Real(d),
        MatrixMetadata::new(&sc, cfg.regime_tag(), MatrixRole::Data),
    )?;
    file.write(&cfg.out_path(DATA_FILE)?)?;
    sc.save(&cfg.out_path("scenario.json")?)?;
    Ok(file)
}

/// `baseband`: modulates and filters the data matrix.
pub fn cmd_baseband(cfg: &RunConfig) -> Result<MatrixFile> {
    let input = MatrixFile::read(&cfg.input_or(DATA_FILE))?;
    let sc = input.metadata.scenario.clone();
    let data = DataMatrix::new(input.real()?.clone(), sc.clone())?;
    let b = to_baseband(&data, &LowpassFilter::for_pulse(&sc.pulse))?;
    let file = MatrixFile::new(
        MatrixData::Complex(b.values),
        MatrixMetadata::new(&sc, input.metadata.regime.clone(), MatrixRole::Baseband(Provenance::Filtered)),
    )?;
    file.write(&cfg.out_path(BASEBAND_FILE)?)?;
    Ok(file)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaReport {
    /// Velocity the analytic bounds are evaluated for.
    pub velocity_m_per_s: Vector3<f64>,
    pub conventional: f64,
    pub baseband: EtaBounds,
    pub original: EtaBounds,
}

impl EtaReport {
    pub fn bounds(&self, kind: MatrixKind) -> &EtaBounds {
        match kind {
            MatrixKind::Baseband => &self.baseband,
            MatrixKind::Original => &self.original,
        }
    }
}

pub fn eta_report(scenario: &Scenario) -> Result<EtaReport> {
    let v = slowest_mover(scenario).ok_or_else(|| {
        Error::InvalidInput("analytic eta needs at least one moving target in the scenario".into())
    })?;
    let params = ApertureParams::from_scenario(scenario, v);
    Ok(EtaReport {
        velocity_m_per_s: v,
        conventional: conventional_eta(scenario.rows(), scenario.columns()),
        baseband: eta_bounds(&params, MatrixKind::Baseband)?,
        original: eta_bounds(&params, MatrixKind::Original)?,
    })
}

/// `eta`: analytic bounds for the configured scenario.
pub fn cmd_eta(cfg: &RunConfig) -> Result<EtaReport> {
    let report = eta_report(&cfg.scene()?)?;
    write_json(&cfg.out_path("eta.json")?, &report)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposeReport {
    pub matrix: MatrixKind,
    pub eta_mode: EtaMode,
    pub windows: usize,
    pub diagnostics: Diagnostics,
    /// Against the scenario's own moving/stationary split.
    pub separation: SeparationMetrics,
}

fn resolve_eta(mode: EtaMode, scenario: &Scenario, kind: MatrixKind) -> Result<Eta> {
    Ok(match mode {
        EtaMode::Conventional => Eta::Conventional,
        EtaMode::Value(v) => Eta::Value(v),
        EtaMode::Optimal => Eta::Value(eta_report(scenario)?.bounds(kind).eta_star),
    })
}

fn run_decomposition<T: SarSample>(
    d: &DMatrix<T>,
    sc: &Scenario,
    cfg: &RunConfig,
    kind: MatrixKind,
    wrap: fn(DMatrix<T>) -> MatrixData,
    regime: Option<String>,
) -> Result<DecomposeReport> {
    let rpca = cfg.rpca().with_eta(resolve_eta(cfg.eta, sc, kind)?);
    let r: Decomposition<T> = decompose_windowed(d, cfg.windows, &rpca)?;
    let separation = separation_metrics(&r.sparse, r.residual, sc)?;
    for (name, m, role) in [
        (LOW_RANK_FILE, &r.low_rank, MatrixRole::LowRank),
        (SPARSE_FILE, &r.sparse, MatrixRole::Sparse),
    ] {
        MatrixFile::new(wrap(m.clone()), MatrixMetadata::new(sc, regime.clone(), role))?.write(&cfg.out_path(name)?)?;
    }
    let report = DecomposeReport {
        matrix: kind,
        eta_mode: cfg.eta,
        windows: cfg.windows,
        diagnostics: r.diagnostics(),
        separation,
    };
    write_json(&cfg.out_path("rpca.json")?, &report)?;
    Ok(report)
}

/// `decompose`: splits the data (or baseband) matrix into `L` and `S`.
pub fn cmd_decompose(cfg: &RunConfig) -> Result<DecomposeReport> {
    let default = match cfg.matrix {
        MatrixKind::Baseband => BASEBAND_FILE,
        MatrixKind::Original => DATA_FILE,
    };
    let input = MatrixFile::read(&cfg.input_or(default))?;
    let sc = input.metadata.scenario.clone();
    let regime = input.metadata.regime.clone();
    match &input.data {
        MatrixData::Real(d) => run_decomposition(d, &sc, cfg, MatrixKind::Original, MatrixData::Real, regime),
        MatrixData::Complex(d) => run_decomposition(d, &sc, cfg, MatrixKind::Baseband, MatrixData::Complex, regime),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageReport {
    pub source: ImageSource,
    pub complex: bool,
    pub hypothesis_velocity_m_per_s: Vector3<f64>,
    pub grid: ImagingGrid,
    /// `20 log10(max |I| / median |I|)`.
    pub dynamic_range_db: f64,
    pub out_of_gate_pixels: usize,
    pub peaks: Vec<Peak>,
}

/// Migrates a matrix file and writes `image_<tag>.pgm`, a JSON sidecar and
/// the raw magnitudes as CSV.
pub fn image_file(cfg: &RunConfig, input: &MatrixFile, velocity: Vector3<f64>) -> Result<(KmImage, ImageReport)> {
    let sc = &input.metadata.scenario;
    let grid = match &cfg.grid {
        Some(g) => g.clone(),
        None => default_grid(sc)?,
    };
    let source = source_of(input.metadata.provenance);
    let img = match &input.data {
        MatrixData::Real(m) => migrate(m, sc, &grid, velocity, source, cfg.interpolation)?,
        MatrixData::Complex(m) => migrate(m, sc, &grid, velocity, source, cfg.interpolation)?,
    };
    let mag = img.magnitude();
    let report = ImageReport {
        source,
        complex: img.complex,
        hypothesis_velocity_m_per_s: velocity,
        grid,
        dynamic_range_db: 20.0 * (img.max_magnitude() / img.background()).log10(),
        out_of_gate_pixels: img.out_of_gate_count(),
        peaks: peak_report(&img),
    };
    let stem = format!("image_{}", tag(source));
    write_pgm(&cfg.out_path(&format!("{stem}.pgm"))?, &mag)?;
    write_matrix_csv(&cfg.out_path(&format!("{stem}.csv"))?, &mag)?;
    write_json(&cfg.out_path(&format!("{stem}.json"))?, &report)?;
    Ok((img, report))
}

/// `image`: Kirchhoff migration of one matrix file.
pub fn cmd_image(cfg: &RunConfig) -> Result<ImageReport> {
    let input = MatrixFile::read(&cfg.input_or(SPARSE_FILE))?;
    let v = cfg.hypothesis_velocity_m_per_s.unwrap_or_else(Vector3::zeros);
    Ok(image_file(cfg, &input, v)?.1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityRow {
    pub speed_m_per_s: f64,
    pub nuclear_baseband: f64,
    pub nuclear_original: f64,
    pub frobenius_baseband: f64,
    pub frobenius_original: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaRow {
    pub speed_m_per_s: f64,
    pub empirical_eta_min_baseband: f64,
    pub empirical_eta_max_baseband: f64,
    pub empirical_eta_star_baseband: f64,
    pub empirical_dynamic_range_baseband: f64,
    pub empirical_eta_min_original: f64,
    pub empirical_eta_max_original: f64,
    pub empirical_eta_star_original: f64,
    pub empirical_dynamic_range_original: f64,
    pub analytic_eta_star_baseband: f64,
    pub analytic_eta_star_original: f64,
    pub analytic_dynamic_range_baseband: f64,
    pub analytic_dynamic_range_original: f64,
}

impl From<&EtaSweepPoint> for EtaRow {
    fn from(p: &EtaSweepPoint) -> Self {
        Self {
            speed_m_per_s: p.speed,
            empirical_eta_min_baseband: p.empirical_baseband.eta_min,
            empirical_eta_max_baseband: p.empirical_baseband.eta_max,
            empirical_eta_star_baseband: p.empirical_baseband.eta_star,
            empirical_dynamic_range_baseband: p.empirical_baseband.dynamic_range,
            empirical_eta_min_original: p.empirical_original.eta_min,
            empirical_eta_max_original: p.empirical_original.eta_max,
            empirical_eta_star_original: p.empirical_original.eta_star,
            empirical_dynamic_range_original: p.empirical_original.dynamic_range,
            analytic_eta_star_baseband: p.analytic_baseband.eta_star,
            analytic_eta_star_original: p.analytic_original.eta_star,
            analytic_dynamic_range_baseband: p.analytic_baseband.dynamic_range,
            analytic_dynamic_range_original: p.analytic_original.dynamic_range,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub stationary_targets: usize,
    pub eta_min_baseband: f64,
    /// Geometric mean with the mover's empirical `eta_max`.
    pub eta_star_baseband: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub beta_baseband: f64,
    pub beta_original: f64,
    pub frobenius_slope_baseband: f64,
    pub velocity: Vec<VelocityRow>,
    pub eta: Vec<EtaRow>,
    pub stationary_count: Vec<CountRow>,
    /// `max / min - 1` of `eta_star_baseband` over the count sweep.
    pub stationary_count_spread: f64,
}

/// Template of the sweeps: the configured scenario resampled at the
/// requested `B dt`, targets removed.
pub fn sweep_template(cfg: &RunConfig) -> Result<Scenario> {
    let sc = cfg.scene()?;
    let dt = cfg.analysis.bandwidth_step / sc.pulse.bandwidth();
    sc.with_targets(Vec::new())?.with_sampling(SamplingSpec { delta_t_seconds: Some(dt), gate_seconds: None })
}

/// `analyze`: norm and eta sweeps over radial speed and stationary-target count.
pub fn cmd_analyze(cfg: &RunConfig) -> Result<AnalysisReport> {
    let template = sweep_template(cfg)?;
    let speeds = &cfg.analysis.speeds_m_per_s;
    let radial = -line_of_sight(&template);
    let start = template.reference;
    let bb = nuclear_velocity_exponent(&template, start, radial, speeds, MatrixKind::Baseband)?;
    let orig = nuclear_velocity_exponent(&template, start, radial, speeds, MatrixKind::Original)?;
    let velocity: Vec<VelocityRow> = (0..speeds.len())
        .map(|i| VelocityRow {
            speed_m_per_s: speeds[i],
            nuclear_baseband: bb.nuclear_norms[i],
            nuclear_original: orig.nuclear_norms[i],
            frobenius_baseband: bb.frobenius_norms[i],
            frobenius_original: orig.frobenius_norms[i],
        })
        .collect();

    let representative = Vector3::from(SCENE_STATIONARY[0]);
    let eta: Vec<EtaRow> = eta_velocity_sweep(&template, representative, radial, speeds)?
        .iter()
        .map(EtaRow::from)
        .collect();

    let positions: Vec<Vector3<f64>> = COUNT_SWEEP_STATIONARY.iter().map(|p| Vector3::from(*p)).collect();
    let counts = &cfg.analysis.stationary_counts;
    let mins = stationary_count_sweep::<Complex64>(&template, &positions, counts)?;
    let mover_max = eta.first().map(|r| r.empirical_eta_max_baseband).unwrap_or(f64::NAN);
    let stationary_count: Vec<CountRow> = counts
        .iter()
        .zip(&mins)
        .map(|(&k, &m)| CountRow {
            stationary_targets: k,
            eta_min_baseband: m,
            eta_star_baseband: (m * mover_max).sqrt(),
        })
        .collect();
    let stars = stationary_count.iter().map(|r| r.eta_star_baseband);
    let (lo, hi) = stars.fold((f64::INFINITY, 0.0f64), |(lo, hi), x| (lo.min(x), hi.max(x)));

    write_records(&cfg.out_path("velocity_sweep.csv")?, &velocity)?;
    write_records(&cfg.out_path("eta_sweep.csv")?, &eta)?;
    write_records(&cfg.out_path("stationary_count.csv")?, &stationary_count)?;
    let report = AnalysisReport {
        beta_baseband: bb.beta,
        beta_original: orig.beta,
        frobenius_slope_baseband: bb.frobenius_slope,
        velocity,
        eta,
        stationary_count,
        stationary_count_spread: hi / lo - 1.0,
    };
    write_json(&cfg.out_path("analysis.json")?, &report)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub k: usize,
    pub data: f64,
    pub baseband: f64,
    pub low_rank: f64,
    pub sparse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSummary {
    pub scenario_hash: String,
    pub shape: (usize, usize),
    pub eta: Option<EtaReport>,
    pub decomposition: DecomposeReport,
    pub images: Vec<ImageReport>,
    pub files: Vec<String>,
}

fn singular_values_of(file: &MatrixFile) -> Result<Vec<f64>> {
    Ok(match &file.data {
        MatrixData::Real(m) => spectrum(m)?.singular_values,
        MatrixData::Complex(m) => spectrum(m)?.singular_values,
    })
}

fn at(v: &[f64], k: usize) -> f64 {
    v.get(k).copied().unwrap_or(0.0)
}

/// `pipeline`: simulate, shift to baseband, decompose, image `D`, `L` and
/// `S`, and write spectra and a summary. Files of finished stages stay on
/// disk when a later stage fails.
pub fn cmd_pipeline(cfg: &RunConfig) -> Result<PipelineSummary> {
    let mut stage = cfg.clone();
    stage.input = None;
    let d = cmd_simulate(&stage)?;
    let b = cmd_baseband(&stage)?;
    let sc = d.metadata.scenario.clone();
    let eta = eta_report(&sc).ok();
    if let Some(e) = &eta {
        write_json(&stage.out_path("eta.json")?, e)?;
    }
    let decomposition = cmd_decompose(&stage)?;

    let decomposed = match cfg.matrix {
        MatrixKind::Baseband => &b,
        MatrixKind::Original => &d,
    };
    let l = MatrixFile::read(&stage.out.join(LOW_RANK_FILE))?;
    let s = MatrixFile::read(&stage.out.join(SPARSE_FILE))?;
    let mover = slowest_mover(&sc).unwrap_or_else(Vector3::zeros);
    let images = vec![
        image_file(&stage, decomposed, Vector3::zeros())?.1,
        image_file(&stage, &l, Vector3::zeros())?.1,
        image_file(&stage, &s, mover)?.1,
    ];

    let sv: Vec<Vec<f64>> = [&d, &b, &l, &s].iter().map(|f| singular_values_of(f)).collect::<Result<_>>()?;
    let rows: Vec<SpectrumRow> = (0..sv[0].len())
        .map(|k| SpectrumRow {
            k: k + 1,
            data: at(&sv[0], k),
            baseband: at(&sv[1], k),
            low_rank: at(&sv[2], k),
            sparse: at(&sv[3], k),
        })
        .collect();
    write_records(&stage.out_path("spectra.csv")?, &rows)?;
    write_json(&stage.out_path("separation.json")?, &decomposition.separation)?;

    let mut files: Vec<String> = std::fs::read_dir(&stage.out)?
        .filter_map(|e| e.ok().map(|e| e.file_name().to_string_lossy().into_owned()))
        .collect();
    files.push("summary.json".into());
    files.sort();
    files.dedup();
    let summary = PipelineSummary {
        scenario_hash: d.metadata.scenario_hash.clone(),
        shape: sc.shape(),
        eta,
        decomposition,
        images,
        files,
    };
    write_json(&stage.out_path("summary.json")?, &summary)?;
    Ok(summary)
}

/// Decomposes an in-memory matrix with the settings of `cfg`, without
/// touching the file system.
pub fn decompose_in_memory<T: Field>(d: &DMatrix<T>, scenario: &Scenario, cfg: &RunConfig, kind: MatrixKind) -> Result<Decomposition<T>> {
    let rpca = cfg.rpca().with_eta(resolve_eta(cfg.eta, scenario, kind)?);
    decompose_windowed(d, cfg.windows, &rpca)
}
