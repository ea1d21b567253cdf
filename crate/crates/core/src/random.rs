//! Seeded random generators for test instances and sweeps.
//!
//! Everything takes an explicit generator, so a seed fully determines the
//! output. [`rng`] returns a ChaCha8 stream.

use nalgebra::DVector;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::operators::{re, symmetrize, CMat, DensityOperator, HermitianOperator};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    Complex64::new(a, b) * core::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    let mut m = CMat::zeros(rows, cols);
    for z in m.iter_mut() {
        *z = complex_normal(rng);
    }
    m
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the phase fix).
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMat {
    let qr = ginibre(rng, dim, dim).qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DVector::from_iterator(
        dim,
        (0..dim).map(|k| {
            let d = r[(k, k)];
            if d.norm() > 0.0 { d / d.norm() } else { re(1.0) }
        }),
    );
    q * CMat::from_diagonal(&phases)
}

/// Haar isometry `C^cols → C^rows` (first columns of a Haar unitary).
pub fn haar_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    assert!(cols <= rows, "an isometry needs cols <= rows");
    haar_unitary(rng, rows).columns(0, cols).into_owned()
}

/// GUE-style Hermitian operator `(G + G*)/2`.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianOperator {
    HermitianOperator::new(symmetrize(&ginibre(rng, dim, dim))).expect("symmetrized matrix is Hermitian")
}

/// Hermitian operator with zero trace.
pub fn traceless_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianOperator {
    let h = hermitian(rng, dim).into_matrix();
    let shift = h.trace() / re(dim as f64);
    HermitianOperator::new(h - CMat::identity(dim, dim) * shift).expect("Hermitian shift")
}

/// Wishart state `GG*/tr(GG*)` mixed with `mix · I/dim`.
///
/// Any `mix > 0` bounds the smallest eigenvalue below by `mix/dim`.
pub fn density<R: Rng + ?Sized>(rng: &mut R, dim: usize, mix: f64) -> DensityOperator {
    let g = ginibre(rng, dim, dim);
    let w = &g * g.adjoint();
    let w = &w / w.trace();
    let m = w * re(1.0 - mix) + CMat::identity(dim, dim) * re(mix / dim as f64);
    DensityOperator::new(symmetrize(&m)).expect("Wishart matrix is a state")
}

/// Rank-`rank` Wishart state.
pub fn low_rank_density<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> DensityOperator {
    let g = ginibre(rng, dim, rank);
    let w = &g * g.adjoint();
    let w = &w / w.trace();
    DensityOperator::new(symmetrize(&w)).expect("Wishart matrix is a state")
}

/// Probability vector with entries bounded below by `floor / len`.
pub fn probability_vector<R: Rng + ?Sized>(rng: &mut R, len: usize, floor: f64) -> alloc::vec::Vec<f64> {
    let raw: alloc::vec::Vec<f64> = (0..len).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| (1.0 - floor) * x / total + floor / len as f64).collect()
}
