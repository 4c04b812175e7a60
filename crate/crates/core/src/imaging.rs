//! Kirchhoff migration: coherent sum of the data along each pixel's delay
//! curve, optionally following a hypothesised target velocity.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{check_shape, delay_difference, Pulse, SarSample, Scenario, SPEED_OF_LIGHT};

/// Pixel grid on the `z = center.z` plane; pixel `(0, 0)` is the corner with
/// the smallest `x` and `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImagingGrid {
    pub center: Vector3<f64>,
    pub extent_x_m: f64,
    pub extent_y_m: f64,
    pub pixels_x: usize,
    pub pixels_y: usize,
}

impl ImagingGrid {
    pub fn new(center: Vector3<f64>, extent_x_m: f64, extent_y_m: f64, pixels_x: usize, pixels_y: usize) -> Result<Self> {
        if !(extent_x_m > 0.0 && extent_y_m > 0.0 && extent_x_m.is_finite() && extent_y_m.is_finite()) {
            return Err(Error::Config("imaging extents must be positive".into()));
        }
        if pixels_x < 2 || pixels_y < 2 {
            return Err(Error::Config("imaging grid needs at least 2x2 pixels".into()));
        }
        Ok(Self { center, extent_x_m, extent_y_m, pixels_x, pixels_y })
    }

    /// Square grid with the given pixel spacing.
    pub fn square(center: Vector3<f64>, extent_m: f64, spacing_m: f64) -> Result<Self> {
        let n = (extent_m / spacing_m).round() as usize + 1;
        Self::new(center, extent_m, extent_m, n, n)
    }

    pub fn spacing(&self) -> (f64, f64) {
        (
            self.extent_x_m / (self.pixels_x - 1) as f64,
            self.extent_y_m / (self.pixels_y - 1) as f64,
        )
    }

    pub fn position(&self, ix: usize, iy: usize) -> Vector3<f64> {
        let (dx, dy) = self.spacing();
        self.center
            + Vector3::new(
                -0.5 * self.extent_x_m + ix as f64 * dx,
                -0.5 * self.extent_y_m + iy as f64 * dy,
                0.0,
            )
    }

    /// Pixel nearest to `p` (clamped to the grid).
    pub fn nearest(&self, p: &Vector3<f64>) -> (usize, usize) {
        let (dx, dy) = self.spacing();
        let fx = ((p.x - self.center.x + 0.5 * self.extent_x_m) / dx).round();
        let fy = ((p.y - self.center.y + 0.5 * self.extent_y_m) / dy).round();
        (
            fx.clamp(0.0, (self.pixels_x - 1) as f64) as usize,
            fy.clamp(0.0, (self.pixels_y - 1) as f64) as usize,
        )
    }

    /// Range-resolution sampling limit `c / (4 B)` in metres.
    pub fn recommended_spacing(pulse: &Pulse) -> f64 {
        SPEED_OF_LIGHT / (4.0 * pulse.bandwidth())
    }
}

/// Which matrix an image was formed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ImageSource {
    D,
    L,
    S,
}

/// Fast-time interpolation between samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    #[default]
    Linear,
    /// Lanczos-windowed sinc with the given half-width in samples.
    Sinc { half_width: usize },
}

#[derive(Debug, Clone)]
pub struct KmImage {
    /// Indexed `(iy, ix)`. Real-data images have zero imaginary part.
    pub values: DMatrix<Complex64>,
    pub grid: ImagingGrid,
    pub source: ImageSource,
    pub complex: bool,
    /// Pixels whose delay curve left the fast-time gate; their value is zero.
    pub out_of_gate: DMatrix<bool>,
}

impl KmImage {
    pub fn magnitude(&self) -> DMatrix<f64> {
        self.values.map(|z| z.norm())
    }

    pub fn max_magnitude(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Median of `|I|` over the pixels inside the gate.
    pub fn background(&self) -> f64 {
        let mut m: Vec<f64> = self
            .values
            .iter()
            .zip(self.out_of_gate.iter())
            .filter(|(_, &out)| !out)
            .map(|(z, _)| z.norm())
            .collect();
        m.sort_by(f64::total_cmp);
        let n = m.len();
        if n == 0 {
            0.0
        } else if n % 2 == 1 {
            m[n / 2]
        } else {
            0.5 * (m[n / 2 - 1] + m[n / 2])
        }
    }

    /// `|I(ix, iy)| / median |I|`.
    pub fn peak_to_background(&self, ix: usize, iy: usize) -> f64 {
        self.values[(iy, ix)].norm() / self.background()
    }

    pub fn out_of_gate_count(&self) -> usize {
        self.out_of_gate.iter().filter(|&&b| b).count()
    }
}

fn sample_row<T: SarSample>(data: &DMatrix<T>, row: usize, u: f64, interp: Interpolation) -> T {
    let cols = data.ncols();
    match interp {
        Interpolation::Linear => {
            let i0 = (u.floor() as usize).min(cols - 1);
            if i0 + 1 >= cols {
                return data[(row, i0)];
            }
            let f = u - i0 as f64;
            T::from_complex(data[(row, i0)].to_complex() * (1.0 - f) + data[(row, i0 + 1)].to_complex() * f)
        }
        Interpolation::Sinc { half_width } => {
            let a = half_width.max(1) as f64;
            let lo = (u - a).ceil().max(0.0) as usize;
            let hi = ((u + a).floor() as usize).min(cols - 1);
            let mut acc = Complex64::new(0.0, 0.0);
            for k in lo..=hi {
                let x = u - k as f64;
                let w = if x == 0.0 {
                    1.0
                } else {
                    let px = PI * x;
                    a * px.sin() * (px / a).sin() / (px * px)
                };
                acc += data[(row, k)].to_complex() * w;
            }
            T::from_complex(acc)
        }
    }
}

/// Migrates `data` (rows = slow time, columns = the scenario's fast-time grid)
/// onto `grid`, tracking pixels that move with `velocity`.
///
/// Complex data are phase-aligned with `exp(-i omega0 dtau)` before summing.
pub fn migrate<T: SarSample>(
    data: &DMatrix<T>,
    scenario: &Scenario,
    grid: &ImagingGrid,
    velocity: Vector3<f64>,
    source: ImageSource,
    interp: Interpolation,
) -> Result<KmImage> {
    check_shape(data, scenario)?;
    let g = scenario.grid();
    let slow = scenario.platform.slow_times();
    let antennas: Vec<Vector3<f64>> = slow.iter().map(|&s| scenario.platform.position(s)).collect();
    let carrier = scenario.pulse.carrier();
    let last = (data.ncols() - 1) as f64;
    let (nx, ny) = (grid.pixels_x, grid.pixels_y);

    let pixels: Vec<(Complex64, bool)> = (0..nx * ny)
        .into_par_iter()
        .map(|p| {
            let (iy, ix) = (p / nx, p % nx);
            let rho = grid.position(ix, iy);
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, (&s, antenna)) in slow.iter().zip(&antennas).enumerate() {
                let delay = delay_difference(antenna, &(rho + velocity * s), &scenario.reference);
                let u = (delay - g.gate_start) / g.fast_time_step;
                if !(0.0..=last).contains(&u) {
                    return (Complex64::new(0.0, 0.0), true);
                }
                acc += T::coherent(sample_row(data, j, u, interp), carrier, delay);
            }
            (acc, false)
        })
        .collect();

    Ok(KmImage {
        values: DMatrix::from_fn(ny, nx, |iy, ix| pixels[iy * nx + ix].0),
        out_of_gate: DMatrix::from_fn(ny, nx, |iy, ix| pixels[iy * nx + ix].1),
        grid: grid.clone(),
        source,
        complex: T::IS_COMPLEX,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub ix: usize,
    pub iy: usize,
    pub position_m: Vector3<f64>,
    pub magnitude: f64,
    pub peak_to_background: f64,
}

/// Strict local maxima of `|I|` (8-neighbourhood) above half the global
/// maximum, strongest first.
pub fn peak_report(image: &KmImage) -> Vec<Peak> {
    let mag = image.magnitude();
    let top = mag.max();
    if top <= 0.0 {
        return Vec::new();
    }
    let background = image.background();
    let (ny, nx) = mag.shape();
    let mut peaks = Vec::new();
    for iy in 0..ny {
        for ix in 0..nx {
            let m = mag[(iy, ix)];
            if m <= 0.5 * top {
                continue;
            }
            let mut strict = true;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let (y, x) = (iy as i64 + dy, ix as i64 + dx);
                    if y >= 0 && x >= 0 && (y as usize) < ny && (x as usize) < nx && mag[(y as usize, x as usize)] >= m {
                        strict = false;
                    }
                }
            }
            if strict {
                peaks.push(Peak {
                    ix,
                    iy,
                    position_m: image.grid.position(ix, iy),
                    magnitude: m,
                    peak_to_background: m / background,
                });
            }
        }
    }
    peaks.sort_by(|a, b| b.magnitude.total_cmp(&a.magnitude));
    peaks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::Regime;
    use crate::sim::{synthesize, Target};

    fn grid() -> ImagingGrid {
        ImagingGrid::square(Vector3::zeros(), 24.0, 0.5).unwrap()
    }

    #[test]
    fn grid_geometry() {
        let g = grid();
        assert_eq!(g.pixels_x, 49);
        assert_eq!(g.position(24, 24), Vector3::zeros());
        assert_eq!(g.nearest(&Vector3::new(-12.0, 12.0, 0.0)), (0, 48));
    }

    #[test]
    fn zero_matrix_gives_zero_image() {
        let sc = Regime::Scaled.scene().unwrap();
        let d = DMatrix::<f64>::zeros(sc.rows(), sc.columns());
        let img = migrate(&d, &sc, &grid(), Vector3::zeros(), ImageSource::D, Interpolation::Linear).unwrap();
        assert_eq!(img.max_magnitude(), 0.0);
        assert!(peak_report(&img).is_empty());
    }

    #[test]
    fn uniform_image_has_no_peaks() {
        let g = ImagingGrid::new(Vector3::zeros(), 1.0, 1.0, 4, 4).unwrap();
        let img = KmImage {
            values: DMatrix::from_element(4, 4, Complex64::new(1.0, 0.0)),
            grid: g,
            source: ImageSource::D,
            complex: false,
            out_of_gate: DMatrix::from_element(4, 4, false),
        };
        assert!(peak_report(&img).is_empty());
    }

    #[test]
    fn single_target_focuses_at_its_position() {
        let base = Regime::Scaled.scene().unwrap();
        let truth = Vector3::new(3.0, -2.5, 0.0);
        let sc = base.with_targets(vec![Target::stationary(truth, 1.0)]).unwrap();
        let g = grid();
        let d = synthesize::<f64>(&sc).unwrap();
        let b = synthesize::<Complex64>(&sc).unwrap();
        for img in [
            migrate(&d, &sc, &g, Vector3::zeros(), ImageSource::D, Interpolation::Linear).unwrap(),
            migrate(&b, &sc, &g, Vector3::zeros(), ImageSource::D, Interpolation::Linear).unwrap(),
            migrate(&b, &sc, &g, Vector3::zeros(), ImageSource::D, Interpolation::Sinc { half_width: 6 }).unwrap(),
        ] {
            let peaks = peak_report(&img);
            assert_eq!(peaks.len(), 1, "{peaks:?}");
            let (ix, iy) = g.nearest(&truth);
            assert!(peaks[0].ix.abs_diff(ix) <= 1 && peaks[0].iy.abs_diff(iy) <= 1);
        }
    }

    #[test]
    fn pixels_outside_gate_are_flagged() {
        let base = Regime::Scaled.scene().unwrap();
        let sc = base.with_targets(vec![Target::stationary(Vector3::zeros(), 1.0)]).unwrap();
        let far = ImagingGrid::square(Vector3::new(200.0, 0.0, 0.0), 4.0, 1.0).unwrap();
        let d = synthesize::<f64>(&sc).unwrap();
        let img = migrate(&d, &sc, &far, Vector3::zeros(), ImageSource::D, Interpolation::Linear).unwrap();
        assert_eq!(img.out_of_gate_count(), 25);
        assert_eq!(img.max_magnitude(), 0.0);
    }
}
