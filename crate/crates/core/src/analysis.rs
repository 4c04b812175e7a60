//! Norms, spectra and separation quality of SAR matrices, measured by brute
//! force and compared with their closed forms.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eta::{
    analytic_column_support, eta_bounds, spectrum_normalization, ApertureParams, EtaBounds,
    MatrixKind,
};
use crate::linalg::{frobenius_norm, max_abs, nuclear_norm, singular_values, Field};
pub use crate::linalg::l1_norm;
use crate::sim::{synthesize, SarSample, Scenario, Target};

/// Singular values below this fraction of the largest are outside the
/// effective support.
pub const SUPPORT_THRESHOLD: f64 = 1e-3;

/// Entries below this fraction of a class matrix's maximum are outside that
/// class's mask.
pub const MASK_THRESHOLD: f64 = 1e-3;

/// A closed-form value together with the validity flag of its derivation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    /// `omega0 / B < 10`: the original-matrix approximations lose accuracy.
    pub narrowband_violated: bool,
}

fn trace_count(params: &ApertureParams) -> f64 {
    2.0 * params.half_aperture / params.delta_s
}

/// l1 norm of a unit-reflectivity single-target matrix:
/// `(2S / (ds B dt)) sqrt(2 pi)` for baseband and `(2S / (ds B dt)) 2 sqrt(2/pi)`
/// for the original matrix.
pub fn analytic_l1(params: &ApertureParams, kind: MatrixKind) -> Estimate {
    let base = trace_count(params) / params.bandwidth_step() * (2.0 * PI).sqrt();
    let ratio = params.carrier / params.bandwidth;
    Estimate {
        value: base * kind.l1_scale(),
        narrowband_violated: kind == MatrixKind::Original && ratio < 10.0,
    }
}

/// Squared Frobenius norm of a unit-reflectivity single-target matrix,
/// `2S sqrt(pi) / (ds B dt)` for baseband and half of it for the original.
pub fn analytic_frobenius_sq(params: &ApertureParams, kind: MatrixKind) -> f64 {
    let base = trace_count(params) * PI.sqrt() / params.bandwidth_step();
    match kind {
        MatrixKind::Baseband => base,
        MatrixKind::Original => 0.5 * base,
    }
}

/// Closed-form singular values of a unit-reflectivity trace spanning `N`
/// columns. Original-matrix values come in pairs at half the baseband value.
pub fn model_spectrum(params: &ApertureParams, kind: MatrixKind, len: usize) -> Result<Vec<f64>> {
    let n = analytic_column_support(params)?;
    let x = n * params.bandwidth_step();
    let lead = (analytic_frobenius_sq(params, MatrixKind::Baseband) / spectrum_normalization(n, x)).sqrt();
    let sigma = |k: usize| lead * (-PI * PI * (k * k) as f64 / (2.0 * x * x)).exp();
    Ok((0..len)
        .map(|k| match kind {
            MatrixKind::Baseband => sigma(k),
            MatrixKind::Original => 0.5 * sigma(k / 2),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Nonincreasing.
    pub singular_values: Vec<f64>,
    pub nuclear_norm: f64,
    pub frobenius_norm: f64,
    /// Count of singular values above `1e-3` of the largest.
    pub effective_support: usize,
    pub model: Option<Vec<f64>>,
}

pub fn spectrum<T: Field>(m: &DMatrix<T>) -> Result<SpectrumReport> {
    let sv = singular_values(m)?;
    Ok(SpectrumReport {
        nuclear_norm: sv.iter().sum(),
        frobenius_norm: frobenius_norm(m),
        effective_support: effective_support(&sv),
        singular_values: sv,
        model: None,
    })
}

impl SpectrumReport {
    /// Attaches the closed-form spectrum scaled by `reflectivity`.
    pub fn with_model(mut self, params: &ApertureParams, kind: MatrixKind, reflectivity: f64) -> Result<Self> {
        let model = model_spectrum(params, kind, self.singular_values.len())?;
        self.model = Some(model.into_iter().map(|s| s * reflectivity).collect());
        Ok(self)
    }
}

pub fn effective_support(sv: &[f64]) -> usize {
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > SUPPORT_THRESHOLD * top).count()
}

/// Least-squares line `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidInput("a line fit needs at least two paired points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - my - slope * (a - mx)).powi(2))
        .sum();
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared: if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy },
    })
}

/// Fit of `log sigma_k^2 = a - b k^2` over the effective support.
pub fn gaussian_decay_fit(sv: &[f64]) -> Result<LinearFit> {
    let n = effective_support(sv);
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "effective support of {n} singular values is too short for a decay fit"
        )));
    }
    let x: Vec<f64> = (0..n).map(|k| (k * k) as f64).collect();
    let y: Vec<f64> = sv[..n].iter().map(|s| (s * s).ln()).collect();
    linear_fit(&x, &y)
}

/// Largest relative deviation of `mu_k^2` from `sigma_{k/2}^2 / 4` over the
/// top half of the original spectrum's effective support.
pub fn two_copy_deviation(original: &[f64], baseband: &[f64]) -> f64 {
    let half = effective_support(original) / 2;
    (0..half.max(1))
        .filter(|k| k / 2 < baseband.len() && *k < original.len())
        .map(|k| {
            let expected = 0.25 * baseband[k / 2].powi(2);
            (original[k].powi(2) - expected).abs() / expected
        })
        .fold(0.0, f64::max)
}

/// Nuclear and Frobenius norms of a single trace over a speed sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocitySweep {
    pub speeds: Vec<f64>,
    pub nuclear_norms: Vec<f64>,
    pub frobenius_norms: Vec<f64>,
    pub l1_norms: Vec<f64>,
    /// Log-log slope of nuclear norm against speed.
    pub beta: f64,
    pub frobenius_slope: f64,
}

fn check_sweep(speeds: &[f64]) -> Result<()> {
    if speeds.len() < 4 {
        return Err(Error::InsufficientSweep(format!("{} speeds given, need at least 4", speeds.len())));
    }
    if speeds.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
        return Err(Error::InsufficientSweep("speeds must be positive".into()));
    }
    let lo = speeds.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = speeds.iter().cloned().fold(0.0, f64::max);
    if hi < 10.0 * lo * (1.0 - 1e-12) {
        return Err(Error::InsufficientSweep(format!("speeds span {lo}..{hi}, less than a decade")));
    }
    Ok(())
}

/// Unit vector from the reference point toward the antenna at `s = 0`.
pub fn line_of_sight(scenario: &Scenario) -> Vector3<f64> {
    (scenario.platform.position_at_zero_m - scenario.reference).normalize()
}

/// Single trace with the given start and velocity on the template's pulse,
/// platform and sampling step; the gate is chosen automatically.
pub fn single_target(template: &Scenario, start: Vector3<f64>, velocity: Vector3<f64>) -> Result<Scenario> {
    let sampling = crate::sim::SamplingSpec {
        delta_t_seconds: Some(template.grid().fast_time_step),
        gate_seconds: None,
    };
    template
        .with_targets(vec![Target::moving(start, velocity, 1.0)])?
        .with_sampling(sampling)
}

fn norms_of<T: SarSample>(sc: &Scenario) -> Result<(f64, f64, f64)> {
    let m = synthesize::<T>(sc)?;
    Ok((nuclear_norm(&m)?, frobenius_norm(&m), l1_norm(&m)))
}

/// Sweeps the speed of one target moving along `direction` from `start`.
pub fn nuclear_velocity_exponent(
    template: &Scenario,
    start: Vector3<f64>,
    direction: Vector3<f64>,
    speeds: &[f64],
    kind: MatrixKind,
) -> Result<VelocitySweep> {
    check_sweep(speeds)?;
    let dir = direction.normalize();
    let rows: Vec<(f64, f64, f64)> = speeds
        .par_iter()
        .map(|&v| {
            let sc = single_target(template, start, dir * v)?;
            match kind {
                MatrixKind::Baseband => norms_of::<Complex64>(&sc),
                MatrixKind::Original => norms_of::<f64>(&sc),
            }
        })
        .collect::<Result<_>>()?;
    let log_v: Vec<f64> = speeds.iter().map(|v| v.ln()).collect();
    let nuclear: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let frob: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let beta = linear_fit(&log_v, &nuclear.iter().map(|x| x.ln()).collect::<Vec<_>>())?.slope;
    let frobenius_slope = linear_fit(&log_v, &frob.iter().map(|x| x.ln()).collect::<Vec<_>>())?.slope;
    Ok(VelocitySweep {
        speeds: speeds.to_vec(),
        nuclear_norms: nuclear,
        frobenius_norms: frob,
        l1_norms: rows.iter().map(|r| r.2).collect(),
        beta,
        frobenius_slope,
    })
}

/// `|A|_* / |A|_1`.
pub fn nuclear_l1_ratio<T: Field>(m: &DMatrix<T>) -> Result<f64> {
    let l1 = l1_norm(m);
    if l1 == 0.0 {
        return Err(Error::InvalidInput("ratio of a zero matrix".into()));
    }
    Ok(nuclear_norm(m)? / l1)
}

fn occupied_columns<T: Field>(m: &DMatrix<T>) -> usize {
    let top = max_abs(m);
    m.column_iter()
        .filter(|c| c.iter().any(|x| x.modulus() > MASK_THRESHOLD * top))
        .count()
}

/// Bounds measured on one stationary and one moving representative. The
/// reported column support is the extra fast-time extent of the moving trace.
pub fn empirical_eta_bounds<T: Field>(
    stationary: &DMatrix<T>,
    moving: &DMatrix<T>,
    kind: MatrixKind,
) -> Result<EtaBounds> {
    let eta_min = nuclear_l1_ratio(stationary)?;
    let eta_max = nuclear_l1_ratio(moving)?;
    let extra = occupied_columns(moving) as f64 - occupied_columns(stationary) as f64 + 1.0;
    Ok(EtaBounds::from_limits(eta_min, eta_max, extra.max(1.0), kind))
}

/// Analytic and empirical bounds at one speed of an eta sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaSweepPoint {
    pub speed: f64,
    pub empirical_baseband: EtaBounds,
    pub empirical_original: EtaBounds,
    pub analytic_baseband: EtaBounds,
    pub analytic_original: EtaBounds,
}

/// Empirical and analytic bounds for a stationary representative at
/// `stationary_at` and a moving one starting there with each speed along
/// `direction`.
pub fn eta_velocity_sweep(
    template: &Scenario,
    stationary_at: Vector3<f64>,
    direction: Vector3<f64>,
    speeds: &[f64],
) -> Result<Vec<EtaSweepPoint>> {
    let dir = direction.normalize();
    let stat = single_target(template, stationary_at, Vector3::zeros())?;
    let stat_b = synthesize::<Complex64>(&stat)?;
    let stat_o = synthesize::<f64>(&stat)?;
    speeds
        .par_iter()
        .map(|&v| {
            let mov = single_target(template, stationary_at, dir * v)?;
            let params = ApertureParams::from_scenario(template, dir * v);
            Ok(EtaSweepPoint {
                speed: v,
                empirical_baseband: empirical_eta_bounds(&stat_b, &synthesize::<Complex64>(&mov)?, MatrixKind::Baseband)?,
                empirical_original: empirical_eta_bounds(&stat_o, &synthesize::<f64>(&mov)?, MatrixKind::Original)?,
                analytic_baseband: eta_bounds(&params, MatrixKind::Baseband)?,
                analytic_original: eta_bounds(&params, MatrixKind::Original)?,
            })
        })
        .collect()
}

/// `eta_min` measured on scenes with the first `count` stationary targets,
/// for each count.
pub fn stationary_count_sweep<T: SarSample>(template: &Scenario, positions: &[Vector3<f64>], counts: &[usize]) -> Result<Vec<f64>> {
    counts
        .par_iter()
        .map(|&k| {
            if k == 0 || k > positions.len() {
                return Err(Error::InvalidInput(format!("stationary count {k} out of range")));
            }
            let targets = positions[..k].iter().map(|p| Target::stationary(*p, 1.0)).collect();
            let sc = template.with_targets(targets)?.with_sampling(crate::sim::SamplingSpec {
                delta_t_seconds: Some(template.grid().fast_time_step),
                gate_seconds: None,
            })?;
            nuclear_l1_ratio(&synthesize::<T>(&sc)?)
        })
        .collect()
}

/// How much of the moving-target signal ends up in `S`, and how much of `S`
/// belongs to stationary targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationMetrics {
    /// `|P_mov S|_F^2 / |P_mov D_mov|_F^2`.
    pub capture: f64,
    /// `Re <P_mov S, P_mov D_mov> / |P_mov D_mov|_F^2`, insensitive to
    /// content of `S` unrelated to the moving trace.
    pub alignment: f64,
    /// `|P_stat S|_F / |S|_F`, zero when `S = 0`.
    pub leakage: f64,
    pub residual: f64,
}

/// Masks are exclusive: an entry significant for both classes belongs to neither.
fn class_masks<T: Field>(moving: &DMatrix<T>, stationary: &DMatrix<T>) -> (Vec<bool>, Vec<bool>) {
    let mm = MASK_THRESHOLD * max_abs(moving);
    let ms = MASK_THRESHOLD * max_abs(stationary);
    let sig_m: Vec<bool> = moving.iter().map(|x| mm > 0.0 && x.modulus() > mm).collect();
    let sig_s: Vec<bool> = stationary.iter().map(|x| ms > 0.0 && x.modulus() > ms).collect();
    let mov = sig_m.iter().zip(&sig_s).map(|(a, b)| *a && !b).collect();
    let stat = sig_s.iter().zip(&sig_m).map(|(a, b)| *a && !b).collect();
    (mov, stat)
}

/// Scores a sparse part against per-class reference matrices on the same grid.
pub fn separation_from_references<T: Field>(
    sparse: &DMatrix<T>,
    moving: &DMatrix<T>,
    stationary: &DMatrix<T>,
    residual: f64,
) -> Result<SeparationMetrics> {
    if sparse.shape() != moving.shape() || sparse.shape() != stationary.shape() {
        return Err(Error::InvalidInput("reference matrices do not match the sparse part".into()));
    }
    let (mov_mask, stat_mask) = class_masks(moving, stationary);
    let mut s_mov = 0.0;
    let mut ref_mov = 0.0;
    let mut cross = 0.0;
    let mut s_stat = 0.0;
    for (((s, d), &in_mov), &in_stat) in sparse.iter().zip(moving.iter()).zip(&mov_mask).zip(&stat_mask) {
        if in_mov {
            s_mov += s.modulus_squared();
            ref_mov += d.modulus_squared();
            cross += (s.to_complex() * d.to_complex().conj()).re;
        }
        if in_stat {
            s_stat += s.modulus_squared();
        }
    }
    let s_total = frobenius_norm(sparse);
    Ok(SeparationMetrics {
        capture: if ref_mov > 0.0 { s_mov / ref_mov } else { 0.0 },
        alignment: if ref_mov > 0.0 { cross / ref_mov } else { 0.0 },
        leakage: if s_total > 0.0 { s_stat.sqrt() / s_total } else { 0.0 },
        residual,
    })
}

/// Synthesizes the per-class reference matrices for `scenario` and scores `sparse`.
pub fn separation_metrics<T: SarSample>(
    sparse: &DMatrix<T>,
    residual: f64,
    scenario: &Scenario,
) -> Result<SeparationMetrics> {
    let (moving, stationary) = scenario.split_by_motion();
    let d_mov = synthesize::<T>(&moving)?;
    let d_stat = synthesize::<T>(&stationary)?;
    separation_from_references(sparse, &d_mov, &d_stat, residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::Regime;

    #[test]
    fn l1_examples() {
        assert_eq!(l1_norm(&DMatrix::<f64>::zeros(3, 3)), 0.0);
        assert_eq!(l1_norm(&DMatrix::from_element(3, 3, 1.0)), 9.0);
        let m = DMatrix::from_fn(2, 2, |i, j| Complex64::from_polar(1.0, (i + 2 * j) as f64));
        assert!((l1_norm(&m) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn analytic_l1_ratio_is_half_pi() {
        let p = ApertureParams::from_scenario(&Regime::Scaled.scene().unwrap(), Vector3::zeros());
        let b = analytic_l1(&p, MatrixKind::Baseband);
        let o = analytic_l1(&p, MatrixKind::Original);
        assert!((b.value / o.value - PI / 2.0).abs() < 1e-14);
        assert!(!o.narrowband_violated);
        let mut wide = p.clone();
        wide.carrier = 5.0 * wide.bandwidth;
        assert!(analytic_l1(&wide, MatrixKind::Original).narrowband_violated);
    }

    #[test]
    fn line_fit_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|a| 2.0 - 0.5 * a).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-14 && (f.intercept - 2.0).abs() < 1e-14);
        assert!((f.r_squared - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_one_spectrum() {
        let m = DMatrix::from_fn(6, 9, |i, j| (i as f64 + 1.0) * (j as f64 - 4.0));
        let r = spectrum(&m).unwrap();
        assert_eq!(r.effective_support, 1);
        assert!((r.nuclear_norm - r.frobenius_norm).abs() < 1e-12 * r.frobenius_norm);
    }

    #[test]
    fn sweep_validation() {
        assert!(matches!(check_sweep(&[1.0, 2.0, 3.0]), Err(Error::InsufficientSweep(_))));
        assert!(matches!(check_sweep(&[1.0, 2.0, 3.0, 9.0]), Err(Error::InsufficientSweep(_))));
        assert!(check_sweep(&[1.0, 2.0, 5.0, 10.0]).is_ok());
    }

    #[test]
    fn separation_trivial_cases() {
        let moving = DMatrix::from_fn(4, 6, |i, j| if j == i { 1.0 } else { 0.0 });
        let stationary = DMatrix::from_fn(4, 6, |_, j| if j == 5 { 1.0 } else { 0.0 });
        let exact = separation_from_references(&moving, &moving, &stationary, 0.0).unwrap();
        assert_eq!(exact.capture, 1.0);
        assert_eq!(exact.alignment, 1.0);
        assert_eq!(exact.leakage, 0.0);
        let zero = DMatrix::zeros(4, 6);
        let none = separation_from_references(&zero, &moving, &stationary, 0.0).unwrap();
        assert_eq!((none.capture, none.leakage), (0.0, 0.0));
        let all = separation_from_references(&stationary, &moving, &stationary, 0.0).unwrap();
        assert_eq!(all.leakage, 1.0);
    }
}
