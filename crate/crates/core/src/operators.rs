//! Validated dense operators and the spectral primitives everything else
//! builds on.
//!
//! [`HermitianOperator`] and [`DensityOperator`] are immutable once built.
//! A density operator caches its eigensystem at construction. Eigenvalues in
//! `[-1e-12, 0)` are clipped to zero, and more negative ones are rejected.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Dense complex matrix.
pub type CMat = DMatrix<Complex64>;

/// Entrywise tolerance (relative to the largest entry, floor 1) when
/// accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Trace tolerance for density operators.
pub const TRACE_TOL: f64 = 1e-12;
/// Negative eigenvalues down to `-CLIP_TOL` are clipped to zero.
pub const CLIP_TOL: f64 = 1e-12;
/// Eigenvalues at or below this value are outside the support.
pub const RANK_TOL: f64 = 1e-10;
/// Default dimension cap.
pub const MAX_DIM: usize = 64;

#[inline]
pub(crate) fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `max_ij |m_ij - conj(m_ji)|`.
pub fn hermitian_deviation(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// `(m + m*) / 2`.
pub fn symmetrize(m: &CMat) -> CMat {
    (m + m.adjoint()) * re(0.5)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

/// Hilbert–Schmidt inner product `tr(a* b)`.
pub fn hs_inner(a: &CMat, b: &CMat) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn frobenius_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn ensure_square(m: &CMat) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

fn singular_values(m: &CMat) -> Result<DVector<f64>> {
    m.clone()
        .try_svd(false, false, f64::EPSILON, 0)
        .map(|svd| svd.singular_values)
        .ok_or(Error::NoConvergence)
}

/// Largest singular value.
pub fn operator_norm(m: &CMat) -> Result<f64> {
    if m.is_empty() {
        return Ok(0.0);
    }
    Ok(singular_values(m)?.iter().fold(0.0, |a: f64, &s| a.max(s)))
}

/// Schatten-1 norm: the sum of singular values.
///
/// Hermitian input (up to `1e-14` relative) goes through the eigenvalue
/// path, which keeps small residuals accurate. Everything else uses an SVD.
pub fn trace_norm(m: &CMat) -> Result<f64> {
    let n = ensure_square(m)?;
    if n == 0 {
        return Ok(0.0);
    }
    let scale = max_abs(m);
    if scale == 0.0 {
        return Ok(0.0);
    }
    if hermitian_deviation(m) <= 1e-14 * scale {
        let e = hermitian_eigen(&symmetrize(m))?;
        return Ok(e.values.iter().map(|l| l.abs()).sum());
    }
    Ok(singular_values(m)?.iter().sum())
}

/// Ascending eigenvalues and the matching orthonormal eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigensystem {
    values: Vec<f64>,
    vectors: CMat,
}

impl Eigensystem {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Unitary whose columns are the eigenvectors.
    pub fn vectors(&self) -> &CMat {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `U diag(λ) U*`.
    pub fn reconstruct(&self) -> CMat {
        self.apply(re)
    }

    /// `U diag(f(λ)) U*`.
    pub fn apply<F: Fn(f64) -> Complex64>(&self, f: F) -> CMat {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let fj = f(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// `U* A U`: coordinates of `a` in the eigenbasis.
    pub fn to_eigenbasis(&self, a: &CMat) -> CMat {
        self.vectors.adjoint() * a * &self.vectors
    }

    /// `U B U*`: inverse of [`Eigensystem::to_eigenbasis`].
    pub fn from_eigenbasis(&self, b: &CMat) -> CMat {
        &self.vectors * b * self.vectors.adjoint()
    }
}

/// Eigendecomposition of a matrix assumed Hermitian (no validation).
pub(crate) fn hermitian_eigen(m: &CMat) -> Result<Eigensystem> {
    let n = ensure_square(m)?;
    if n == 0 {
        return Ok(Eigensystem { values: Vec::new(), vectors: CMat::zeros(0, 0) });
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 100_000).ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(Eigensystem { values, vectors })
}

/// Spectral decomposition with ascending eigenvalues.
pub fn spectral_decompose(h: &HermitianOperator) -> Result<Eigensystem> {
    hermitian_eigen(&h.m)
}

/// Functional calculus `U diag(f(λ)) U*`.
///
/// The caller is responsible for `f` being finite on the spectrum; for
/// inverse-type functions use [`DensityOperator::support_function`].
pub fn matrix_function<F: Fn(f64) -> Complex64>(e: &Eigensystem, f: F) -> CMat {
    e.apply(f)
}

/// Hermitian operator, symmetrized exactly on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    m: CMat,
}

impl HermitianOperator {
    pub fn new(m: CMat) -> Result<Self> {
        let n = ensure_square(&m)?;
        if n > MAX_DIM {
            return Err(Error::DimensionTooLarge(n, MAX_DIM));
        }
        let dev = hermitian_deviation(&m);
        if dev > HERMITIAN_TOL * max_abs(&m).max(1.0) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { m: symmetrize(&m) })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { m: CMat::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { m: CMat::identity(dim, dim) }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| re(x)));
        Self { m: CMat::from_diagonal(&d) }
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn into_matrix(self) -> CMat {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    pub fn eigensystem(&self) -> Result<Eigensystem> {
        spectral_decompose(self)
    }

    /// `e^{-iHt}`.
    pub fn evolution(&self, t: f64) -> Result<CMat> {
        let e = self.eigensystem()?;
        Ok(e.apply(|l| Complex64::new(0.0, -l * t).exp()))
    }

    /// Conjugation `e^{-iHt} X e^{iHt}`.
    pub fn evolve(&self, x: &CMat, t: f64) -> Result<CMat> {
        let u = self.evolution(t)?;
        Ok(&u * x * u.adjoint())
    }
}

/// Positive semidefinite, unit-trace operator with a cached eigensystem.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    m: CMat,
    eig: Eigensystem,
    full_rank: bool,
    rank_tol: f64,
}

impl DensityOperator {
    pub fn new(m: CMat) -> Result<Self> {
        Self::with_tolerances(m, TRACE_TOL, RANK_TOL)
    }

    pub fn with_tolerances(m: CMat, trace_tol: f64, rank_tol: f64) -> Result<Self> {
        let h = HermitianOperator::new(m)?;
        let tr = h.m.trace();
        if (tr.re - 1.0).abs() > trace_tol || tr.im.abs() > trace_tol {
            return Err(Error::InvalidTrace(tr.re));
        }
        let mut eig = spectral_decompose(&h)?;
        let min = eig.values.first().copied().unwrap_or(0.0);
        if min < -CLIP_TOL {
            return Err(Error::NotPositive(min));
        }
        let clipped = eig.values.iter().any(|&l| l < 0.0);
        for l in eig.values.iter_mut() {
            if *l < 0.0 {
                *l = 0.0;
            }
        }
        let m = if clipped { symmetrize(&eig.reconstruct()) } else { h.m };
        let full_rank = eig.values.first().is_some_and(|&l| l > rank_tol);
        Ok(Self { m, eig, full_rank, rank_tol })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::diagonal(&alloc::vec![1.0 / dim as f64; dim]).expect("uniform distribution is a state")
    }

    /// Diagonal state from a probability vector.
    pub fn diagonal(p: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::from_real_diagonal(p).into_matrix())
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let v = DVector::from_column_slice(psi);
        let m = &v * v.adjoint();
        Self::new(m)
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn eigensystem(&self) -> &Eigensystem {
        &self.eig
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.values
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn is_full_rank(&self) -> bool {
        self.full_rank
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig.values.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eig.values.last().copied().unwrap_or(0.0)
    }

    pub fn rank_tolerance(&self) -> f64 {
        self.rank_tol
    }

    pub fn rank(&self) -> usize {
        self.eig.values.iter().filter(|&&l| l > self.rank_tol).count()
    }

    pub fn require_full_rank(&self) -> Result<()> {
        if self.full_rank {
            Ok(())
        } else {
            Err(Error::NotFullRank(self.min_eigenvalue()))
        }
    }

    pub fn in_support(&self, lambda: f64) -> bool {
        lambda > self.rank_tol
    }

    /// Projector onto the support.
    pub fn support_projector(&self) -> CMat {
        self.support_function(|_| re(1.0))
    }

    /// `Σ_{λ > rank_tol} f(λ) |φ⟩⟨φ|`; zero on the kernel.
    pub fn support_function<F: Fn(f64) -> Complex64>(&self, f: F) -> CMat {
        let tol = self.rank_tol;
        self.eig.apply(|l| if l > tol { f(l) } else { Complex64::new(0.0, 0.0) })
    }

    /// `ρ^z` on the support, for complex exponents such as `-1/2 + it`.
    pub fn support_power(&self, z: Complex64) -> CMat {
        self.support_function(|l| (z * l.ln()).exp())
    }

    /// `√ρ` on the whole space.
    pub fn sqrt(&self) -> CMat {
        self.eig.apply(|l| re(l.max(0.0).sqrt()))
    }

    /// Orthonormal basis of the kernel (eigenvectors with λ ≤ rank_tol).
    pub fn kernel_vectors(&self) -> Vec<DVector<Complex64>> {
        (0..self.dim())
            .filter(|&k| !self.in_support(self.eig.values[k]))
            .map(|k| self.eig.vectors.column(k).into_owned())
            .collect()
    }
}

/// `F(ρ, σ) = ‖√ρ √σ‖₁`.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    let prod = rho.sqrt() * sigma.sqrt();
    Ok(singular_values(&prod)?.iter().sum::<f64>().min(1.0))
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Trace out subsystem `which` of a square operator on `⊗_k C^{dims[k]}`.
pub fn partial_trace(m: &CMat, dims: &[usize], which: usize) -> Result<CMat> {
    let n = ensure_square(m)?;
    let total: usize = dims.iter().product();
    if total != n {
        return Err(Error::DimensionMismatch { expected: total, found: n });
    }
    if which >= dims.len() {
        return Err(Error::InvalidParameter(alloc::format!(
            "subsystem {which} out of range for {} factors",
            dims.len()
        )));
    }
    let left: usize = dims[..which].iter().product();
    let mid = dims[which];
    let right: usize = dims[which + 1..].iter().product();
    let out_dim = left * right;
    let idx = |l: usize, k: usize, r: usize| (l * mid + k) * right + r;
    Ok(CMat::from_fn(out_dim, out_dim, |row, col| {
        let (l1, r1) = (row / right, row % right);
        let (l2, r2) = (col / right, col % right);
        (0..mid).map(|k| m[(idx(l1, k, r1), idx(l2, k, r2))]).sum()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use alloc::vec;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    /// Closed-form eigenvalues of a 2x2 Hermitian matrix.
    fn eig2(m: &CMat) -> (f64, f64) {
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = m[(0, 1)].norm();
        let mean = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        (mean - rad, mean + rad)
    }

    #[test]
    fn identity_spectrum() {
        let e = spectral_decompose(&HermitianOperator::identity(2)).unwrap();
        assert_eq!(e.values(), &[1.0, 1.0]);
    }

    #[test]
    fn diagonal_spectrum_and_basis() {
        let e = spectral_decompose(&HermitianOperator::from_real_diagonal(&[0.75, 0.25])).unwrap();
        assert!(close(e.values()[0], 0.25, 1e-15) && close(e.values()[1], 0.75, 1e-15));
        // eigenvector of 1/4 is e_1 up to phase
        assert!(close(e.vectors()[(1, 0)].norm(), 1.0, 1e-14));
        assert!(close(e.vectors()[(0, 1)].norm(), 1.0, 1e-14));
    }

    #[test]
    fn perturbed_pauli_x_matches_closed_form() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[re(0.1), Complex64::new(0.5, 0.2), Complex64::new(0.5, -0.2), re(-0.3)],
        );
        let e = spectral_decompose(&HermitianOperator::new(m.clone()).unwrap()).unwrap();
        let (lo, hi) = eig2(&m);
        assert!(close(e.values()[0], lo, 1e-14));
        assert!(close(e.values()[1], hi, 1e-14));
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = random::rng(11);
        for k in 0..100 {
            let d = 2 + k % 7;
            let h = random::hermitian(&mut rng, d);
            let e = spectral_decompose(&h).unwrap();
            let err = frobenius_norm(&(e.reconstruct() - h.matrix())) / frobenius_norm(h.matrix());
            assert!(err < 1e-10, "reconstruction error {err}");
            let gram = e.vectors().adjoint() * e.vectors();
            assert!(frobenius_norm(&(gram - CMat::identity(d, d))) < 1e-12);
            assert!(e.values().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn functional_calculus() {
        let mut rng = random::rng(3);
        let rho = random::density(&mut rng, 4, 0.1);
        let e = rho.eigensystem();
        assert!(frobenius_norm(&(matrix_function(e, re) - rho.matrix())) < 1e-13);
        let s = matrix_function(e, |x| re(x.sqrt()));
        assert!(frobenius_norm(&(&s * &s - rho.matrix())) < 1e-10);

        let diag = DensityOperator::diagonal(&[0.25, 0.75]).unwrap();
        let u = matrix_function(diag.eigensystem(), |x| Complex64::new(0.0, x.ln()).exp());
        for k in 0..2 {
            assert!(close(u[(k, k)].norm(), 1.0, 1e-15));
        }
    }

    #[test]
    fn trace_norm_examples() {
        assert_eq!(trace_norm(&CMat::zeros(3, 3)).unwrap(), 0.0);
        let mut rng = random::rng(5);
        let rho = random::density(&mut rng, 3, 0.0);
        assert!(close(trace_norm(rho.matrix()).unwrap(), 1.0, 1e-13));
        let m = HermitianOperator::from_real_diagonal(&[0.75, -0.25]).into_matrix();
        assert!(close(trace_norm(&m).unwrap(), 1.0, 1e-15));
    }

    #[test]
    fn trace_norm_dominates_trace() {
        let mut rng = random::rng(9);
        for _ in 0..50 {
            let g = random::ginibre(&mut rng, 4, 4);
            assert!(trace_norm(&g).unwrap() + 1e-12 >= g.trace().norm());
            let p = &g * g.adjoint();
            assert!(close(trace_norm(&p).unwrap(), p.trace().re, 1e-10));
        }
    }

    #[test]
    fn fidelity_examples() {
        let mut rng = random::rng(1);
        let rho = random::density(&mut rng, 3, 0.05);
        assert!(close(fidelity(&rho, &rho).unwrap(), 1.0, 1e-10));

        let z0 = DensityOperator::pure(&[re(1.0), re(0.0)]).unwrap();
        let z1 = DensityOperator::pure(&[re(0.0), re(1.0)]).unwrap();
        assert!(fidelity(&z0, &z1).unwrap() < 1e-15);

        let p = DensityOperator::diagonal(&[0.75, 0.25]).unwrap();
        let q = DensityOperator::maximally_mixed(2);
        let bhattacharyya = (0.75f64 * 0.5).sqrt() + (0.25f64 * 0.5).sqrt();
        assert!(close(fidelity(&p, &q).unwrap(), bhattacharyya, 1e-14));
    }

    #[test]
    fn fidelity_symmetric_and_detects_equality() {
        let mut rng = random::rng(21);
        for _ in 0..30 {
            let a = random::density(&mut rng, 3, 0.0);
            let b = random::density(&mut rng, 3, 0.0);
            let fab = fidelity(&a, &b).unwrap();
            assert!(close(fab, fidelity(&b, &a).unwrap(), 1e-12));
            assert!(fab < 1.0 - 1e-8);
        }
    }

    #[test]
    fn tensor_and_partial_trace() {
        let half = DensityOperator::maximally_mixed(2);
        let quarter = tensor(half.matrix(), half.matrix());
        assert!(frobenius_norm(&(quarter - CMat::identity(4, 4) * re(0.25))) < 1e-16);

        let mut rng = random::rng(4);
        let rho = random::density(&mut rng, 2, 0.0);
        let sigma = random::density(&mut rng, 3, 0.0);
        let joint = tensor(rho.matrix(), sigma.matrix());
        let back = partial_trace(&joint, &[2, 3], 1).unwrap();
        assert!(frobenius_norm(&(back - rho.matrix())) < 1e-14);
        let other = partial_trace(&joint, &[2, 3], 0).unwrap();
        assert!(frobenius_norm(&(other - sigma.matrix())) < 1e-14);

        let s = 0.5f64.sqrt();
        let bell = DensityOperator::pure(&[re(s), re(0.0), re(0.0), re(s)]).unwrap();
        let reduced = partial_trace(bell.matrix(), &[2, 2], 1).unwrap();
        assert!(frobenius_norm(&(reduced - CMat::identity(2, 2) * re(0.5))) < 1e-15);
    }

    #[test]
    fn density_validation() {
        let bad_trace = HermitianOperator::from_real_diagonal(&[0.5, 0.4]).into_matrix();
        assert!(matches!(DensityOperator::new(bad_trace), Err(Error::InvalidTrace(_))));
        let negative = HermitianOperator::from_real_diagonal(&[1.1, -0.1]).into_matrix();
        assert!(matches!(DensityOperator::new(negative), Err(Error::NotPositive(_))));
        let tiny_negative = HermitianOperator::from_real_diagonal(&[1.0 + 1e-13, -1e-13]).into_matrix();
        let rho = DensityOperator::new(tiny_negative).unwrap();
        assert_eq!(rho.min_eigenvalue(), 0.0);
        assert!(!rho.is_full_rank());
        let mut m = CMat::identity(2, 2) * re(0.5);
        m[(0, 1)] = Complex64::new(0.0, 0.1);
        assert!(matches!(DensityOperator::new(m), Err(Error::NotHermitian(_))));
        assert!(matches!(
            HermitianOperator::new(CMat::zeros(2, 3)),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn support_functions() {
        let rho = DensityOperator::diagonal(&[0.0, 0.25, 0.75]).unwrap();
        assert_eq!(rho.rank(), 2);
        let inv = rho.support_function(|l| re(1.0 / l));
        assert!(close(inv[(0, 0)].re, 0.0, 0.0));
        assert!(close(inv[(1, 1)].re, 4.0, 1e-14));
        let p = rho.support_projector();
        assert!(close(p.trace().re, 2.0, 1e-14));
        assert_eq!(rho.kernel_vectors().len(), 1);
        let _ = vec![0u8];
    }
}
