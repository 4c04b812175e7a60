//! Recovers a random rank-10 matrix corrupted by 5% gross errors.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sar_rpca::linalg::frobenius_norm;
use sar_rpca::rpca::{decompose, RpcaConfig};

fn main() -> sar_rpca::Result<()> {
    let n = 200;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = DMatrix::from_fn(n, 10, |_, _| rng.sample::<f64, _>(StandardNormal));
    let b = DMatrix::from_fn(10, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let l0 = a * b;
    let s0 = DMatrix::from_fn(n, n, |_, _| if rng.random::<f64>() < 0.05 { rng.random_range(-500.0..500.0) } else { 0.0 });

    let out = decompose(&(&l0 + &s0), &RpcaConfig::default())?;
    println!("eta {:.4}, {} iterations, rank {}, {} sparse entries", out.eta, out.iterations, out.rank, out.sparse_nonzeros);
    println!("|L - L0| / |L0| = {:.2e}", frobenius_norm(&(&out.low_rank - &l0)) / frobenius_norm(&l0));
    println!("|S - S0| / |S0| = {:.2e}", frobenius_norm(&(&out.sparse - &s0)) / frobenius_norm(&s0));
    for (k, r) in out.residual_history.iter().enumerate().step_by(5) {
        println!("  iter {k:3}  residual {r:.3e}");
    }
    Ok(())
}
