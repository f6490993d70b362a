//! Seeded random corpora. All generators take a caller-owned ChaCha8 stream, so a
//! fixed seed reproduces the same tensors on every platform.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

pub use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng as CorpusRng;

use crate::decompose::CpDecomposition;
use crate::error::Result;
use crate::tensor::{BiquadraticTensor, VectorPair};

pub fn rng(seed: u64) -> CorpusRng {
    CorpusRng::seed_from_u64(seed)
}

/// `r` pairs with components uniform on [0, 1].
pub fn random_cpb<R: Rng + ?Sized>(m: usize, n: usize, r: usize, rng: &mut R) -> Result<CpDecomposition> {
    let pairs = (0..r)
        .map(|_| {
            VectorPair::new(
                (0..m).map(|_| rng.random::<f64>()).collect(),
                (0..n).map(|_| rng.random::<f64>()).collect(),
            )
        })
        .collect();
    CpDecomposition::new(m, n, pairs)
}

/// `r` pairs with standard normal components (weakly CP, generally not CP).
pub fn random_weak_cp<R: Rng + ?Sized>(m: usize, n: usize, r: usize, rng: &mut R) -> Result<CpDecomposition> {
    let pairs = (0..r)
        .map(|_| VectorPair::new(normal_vec(m, rng), normal_vec(n, rng)))
        .collect();
    CpDecomposition::new(m, n, pairs)
}

/// Symmetrized tensor with entries uniform on `[lo, hi)`.
pub fn random_symmetric<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> Result<BiquadraticTensor> {
    let raw: Vec<f64> = (0..m * n * m * n).map(|_| rng.random_range(lo..hi)).collect();
    BiquadraticTensor::symmetrize(&raw, m, n)
}

pub fn normal_vec<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| StandardNormal.sample(rng)).collect()
}

/// Uniform point on the unit sphere.
pub fn unit_vec<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v = normal_vec(dim, rng);
        let norm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|t| t / norm).collect();
        }
    }
}

/// Uniform point on the unit simplex.
pub fn simplex_vec<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    let v: Vec<f64> = (0..dim).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = v.iter().sum();
    v.into_iter().map(|t| t / total).collect()
}
