use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use sar_rpca::linalg::frobenius_norm;
use sar_rpca::rpca::{decompose, decompose_windowed, Eta, RpcaConfig};
use sar_rpca::Error;

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

fn problem(n: usize, seed: u64) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = (0.05 * n as f64).ceil() as usize;
    let l0 = gaussian(&mut rng, n, r) * gaussian(&mut rng, r, n);
    let s0 = DMatrix::from_fn(n, n, |_, _| {
        if rng.random::<f64>() < 0.05 {
            rng.random_range(-500.0..500.0)
        } else {
            0.0
        }
    });
    (l0, s0)
}

fn rel_err<T: sar_rpca::linalg::Field>(a: &DMatrix<T>, b: &DMatrix<T>) -> f64 {
    frobenius_norm(&(a - b)) / frobenius_norm(b)
}

#[test]
fn exact_recovery_of_random_low_rank_plus_sparse() {
    for seed in [1u64, 2, 3] {
        let (l0, s0) = problem(200, seed);
        let out = decompose(&(&l0 + &s0), &RpcaConfig::default()).unwrap();
        let (el, es) = (rel_err(&out.low_rank, &l0), rel_err(&out.sparse, &s0));
        assert!(el <= 1e-5 && es <= 1e-5, "seed {seed}: {el:e} {es:e}");
        assert!(out.residual <= 1e-7);
        assert!(out.iterations <= 60, "seed {seed}: {} iterations", out.iterations);
        assert_eq!(out.rank, 10);
    }
}

#[test]
fn complex_recovery() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 120;
    let c = |rng: &mut ChaCha8Rng, r, k| {
        let re = gaussian(rng, r, k);
        let im = gaussian(rng, r, k);
        re.zip_map(&im, Complex64::new)
    };
    let l0 = c(&mut rng, n, 4) * c(&mut rng, 4, n);
    let s0 = DMatrix::from_fn(n, n, |_, _| {
        if rng.random::<f64>() < 0.04 {
            Complex64::from_polar(rng.random_range(50.0..200.0), rng.random_range(0.0..std::f64::consts::TAU))
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let out = decompose(&(&l0 + &s0), &RpcaConfig::default()).unwrap();
    assert!(rel_err(&out.low_rank, &l0) <= 1e-5);
    assert!(rel_err(&out.sparse, &s0) <= 1e-5);
}

#[test]
fn windows_are_independent_problems() {
    let (l0, s0) = problem(100, 5);
    let d = &l0 + &s0;
    let cfg = RpcaConfig::default();
    let stacked = decompose_windowed(&d, 4, &cfg).unwrap();
    // Window 2 spans rows 50..75 and must equal a standalone decomposition.
    let alone = decompose(&d.rows(50, 25).into_owned(), &cfg).unwrap();
    assert!(frobenius_norm(&(stacked.low_rank.rows(50, 25) - &alone.low_rank)) <= 1e-12 * frobenius_norm(&alone.low_rank));
    assert!(frobenius_norm(&(&stacked.low_rank + &stacked.sparse - &d)) <= 1e-6 * frobenius_norm(&d));
}

#[test]
fn zero_window_decomposes_to_zero() {
    let (l0, s0) = problem(60, 6);
    let mut d = &l0 + &s0;
    d.rows_mut(0, 20).fill(0.0);
    let out = decompose_windowed(&d, 3, &RpcaConfig::default()).unwrap();
    assert_eq!(frobenius_norm(&out.low_rank.rows(0, 20).into_owned()), 0.0);
    assert_eq!(frobenius_norm(&out.sparse.rows(0, 20).into_owned()), 0.0);
}

#[test]
fn window_failures_name_the_window() {
    let (l0, s0) = problem(60, 7);
    let cfg = RpcaConfig { max_iterations: 2, ..RpcaConfig::default() }.with_eta(Eta::Value(0.05));
    match decompose_windowed(&(&l0 + &s0), 3, &cfg) {
        Err(e @ Error::Window { .. }) => {
            assert_eq!(e.exit_code(), 3);
            assert!(e.to_string().contains("window"));
        }
        other => panic!("expected a window error, got {other:?}"),
    }
}
