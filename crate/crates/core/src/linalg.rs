//! Dense matrix helpers shared by the solver and the norm analysis.
//!
//! Matrices are stored as column-major [`nalgebra::DMatrix`]; singular value
//! decompositions are delegated to `faer`, which reads the same storage
//! without copying.

use faer::MatRef;
use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Scalar field of a SAR matrix: `f64` for down-ramped data, [`Complex64`]
/// for baseband data.
pub trait Field:
    ComplexField<RealField = f64> + faer::traits::ComplexField<Real = f64> + Copy + Send + Sync + 'static
{
    /// True when values carry an imaginary part.
    const IS_COMPLEX: bool;

    fn to_complex(self) -> Complex64;

    /// Narrowing conversion; the imaginary part is discarded for `f64`.
    fn from_complex(z: Complex64) -> Self;
}

impl Field for f64 {
    const IS_COMPLEX: bool = false;

    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }

    fn from_complex(z: Complex64) -> Self {
        z.re
    }
}

impl Field for Complex64 {
    const IS_COMPLEX: bool = true;

    fn to_complex(self) -> Complex64 {
        self
    }

    fn from_complex(z: Complex64) -> Self {
        z
    }
}

/// Thin SVD `M = U diag(sigma) V^*` with singular values in nonincreasing order.
#[derive(Debug, Clone)]
pub struct ThinSvd<T: Field> {
    pub u: DMatrix<T>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<T>,
}

fn view<T: Field>(m: &DMatrix<T>) -> MatRef<'_, T> {
    MatRef::from_column_major_slice(m.as_slice(), m.nrows(), m.ncols())
}

fn to_nalgebra<T: Field>(m: MatRef<'_, T>) -> DMatrix<T> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn check_finite<T: Field>(m: &DMatrix<T>) -> Result<()> {
    if m.iter().all(|x| x.modulus().is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput("matrix has non-finite entries".into()))
    }
}

pub fn thin_svd<T: Field>(m: &DMatrix<T>) -> Result<ThinSvd<T>> {
    check_finite(m)?;
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return Ok(ThinSvd {
            u: DMatrix::zeros(m.nrows(), 0),
            singular_values: Vec::new(),
            v: DMatrix::zeros(m.ncols(), 0),
        });
    }
    let svd = view(m).thin_svd().map_err(|_| Error::SvdFailure)?;
    let s = svd.S().column_vector();
    Ok(ThinSvd {
        u: to_nalgebra(svd.U()),
        singular_values: (0..k).map(|i| s[i].real()).collect(),
        v: to_nalgebra(svd.V()),
    })
}

/// Singular values only, nonincreasing.
pub fn singular_values<T: Field>(m: &DMatrix<T>) -> Result<Vec<f64>> {
    check_finite(m)?;
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let s = view(m).singular_values().map_err(|_| Error::SvdFailure)?;
    Ok(s)
}

/// Singular value thresholding `U max(Sigma - tau, 0) V^*`.
///
/// Returns the thresholded matrix and the number of singular values that
/// survived the shrinkage.
pub fn singular_value_threshold<T: Field>(m: &DMatrix<T>, tau: f64) -> Result<(DMatrix<T>, usize)> {
    check_finite(m)?;
    if m.is_empty() {
        return Ok((m.clone(), 0));
    }
    let svd = view(m).thin_svd().map_err(|_| Error::SvdFailure)?;
    let s = svd.S().column_vector();
    let kept = (0..s.nrows()).take_while(|&i| s[i].real() > tau).count();
    if kept == 0 {
        return Ok((DMatrix::zeros(m.nrows(), m.ncols()), 0));
    }
    let u = svd.U();
    let scaled = faer::Mat::<T>::from_fn(m.nrows(), kept, |i, j| {
        u[(i, j)].scale(s[j].real() - tau)
    });
    let v = svd.V().subcols(0, kept);
    let out = &scaled * v.adjoint();
    Ok((to_nalgebra(out.as_ref()), kept))
}

/// Largest singular value by power iteration on `M^* M`.
///
/// Stops when the relative change of the estimate drops below `tol` or after
/// `max_iter` iterations.
pub fn spectral_norm_with<T: Field>(m: &DMatrix<T>, tol: f64, max_iter: usize) -> f64 {
    let n = m.ncols();
    if n == 0 || m.nrows() == 0 {
        return 0.0;
    }
    // Deterministic start vector with no special alignment to structured data.
    let mut x = nalgebra::DVector::<T>::from_fn(n, |i, _| {
        T::from_real(1.0 + 0.5 * ((i as f64) * 0.618_033_988_75).fract())
    });
    let mut estimate = 0.0_f64;
    for _ in 0..max_iter {
        let norm = x.norm();
        if norm == 0.0 {
            return 0.0;
        }
        x.unscale_mut(norm);
        let y = m * &x;
        let next = y.norm();
        x = m.adjoint() * y;
        if (next - estimate).abs() <= tol * next {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Spectral norm with tolerance `1e-8` and a 500-iteration cap.
pub fn spectral_norm<T: Field>(m: &DMatrix<T>) -> f64 {
    spectral_norm_with(m, 1e-8, 500)
}

/// Elementwise absolute sum `sum |M_ij|`.
pub fn l1_norm<T: Field>(m: &DMatrix<T>) -> f64 {
    m.iter().map(|x| x.modulus()).sum()
}

/// Largest entry magnitude (the elementwise infinity norm).
pub fn max_abs<T: Field>(m: &DMatrix<T>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.modulus()))
}

pub fn frobenius_norm<T: Field>(m: &DMatrix<T>) -> f64 {
    m.norm()
}

pub fn nuclear_norm<T: Field>(m: &DMatrix<T>) -> Result<f64> {
    Ok(singular_values(m)?.iter().sum())
}

pub fn to_complex<T: Field>(m: &DMatrix<T>) -> DMatrix<Complex64> {
    m.map(Field::to_complex)
}
