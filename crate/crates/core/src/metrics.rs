//! Monotone metrics through their Morozova–Chentsov kernels.
//!
//! A metric is fixed by an operator monotone `f` with `f(1) = 1`, or
//! equivalently by `g = 1/f` and the kernel `c(x, y) = g(x/y)/y`. In the
//! eigenbasis `{φ_i}` of `ρ`,
//!
//! ```text
//! γ_ρ(A, B) = Σ_ij c(λ_i, λ_j) conj(Ã_ij) B̃_ij,    Ã = U* A U
//! ```
//!
//! and `𝕁_ρ` multiplies entries by `c(λ_i, λ_j)`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::operators::{frobenius_norm, hermitian_eigen, CMat, DensityOperator, HermitianOperator};
use crate::quadrature::HalfLineRule;

/// Relative gap below which `c(x, y)` switches to its diagonal limit.
pub const DIAGONAL_LIMIT_TOL: f64 = 1e-8;

/// Entries of a tangent vector (relative to its Frobenius norm) below this
/// size are treated as zero when they meet an infinite kernel value.
pub const SUPPORT_TOL: f64 = 1e-10;

/// Built-in monotone metrics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MonotoneMetric {
    /// Symmetric logarithmic derivative (Bures), the minimal metric.
    Sld,
    /// Right logarithmic derivative, the maximal metric.
    Rld,
    /// Bogoliubov–Kubo–Mori, the Hessian of relative entropy.
    Bkm,
    /// `g(x) = (x^{-α} + x^{α-1})/2`, `α ∈ (0, 1)`.
    Alpha(f64),
    /// `c(x, y) = 1/√(xy)`; the same metric as `Alpha(0.5)`.
    SymmetricInverse,
    /// Wigner–Yanase–Dyson, `α ∈ (0, 1)`.
    Wyd(f64),
}

fn check_exponent(alpha: f64) -> Result<f64> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(alpha)
    } else {
        Err(Error::InvalidParameter(format!("exponent {alpha} outside (0, 1)")))
    }
}

/// `(x^p - y^p)/(x - y)` for `x, y ≥ 0`, stable near the diagonal.
fn power_divided_difference(p: f64, x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if hi == 0.0 {
        return f64::INFINITY;
    }
    let u = (lo - hi) / hi;
    if u.abs() <= DIAGONAL_LIMIT_TOL {
        let m = 0.5 * (x + y);
        return p * m.powf(p - 1.0);
    }
    if lo < 0.5 * hi {
        return (hi.powf(p) - lo.powf(p)) / (hi - lo);
    }
    hi.powf(p - 1.0) * (p * u.ln_1p()).exp_m1() / u
}

/// `(ln x - ln y)/(x - y)`.
fn log_divided_difference(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if hi == 0.0 {
        return f64::INFINITY;
    }
    let u = (lo - hi) / hi;
    if u.abs() <= DIAGONAL_LIMIT_TOL {
        return 2.0 / (x + y);
    }
    if lo < 0.5 * hi {
        return (hi.ln() - lo.ln()) / (hi - lo);
    }
    u.ln_1p() / (hi * u)
}

impl MonotoneMetric {
    pub fn alpha(alpha: f64) -> Result<Self> {
        check_exponent(alpha).map(Self::Alpha)
    }

    pub fn wyd(alpha: f64) -> Result<Self> {
        check_exponent(alpha).map(Self::Wyd)
    }

    /// One representative of each family.
    pub fn builtins() -> Vec<Self> {
        alloc::vec![
            Self::Sld,
            Self::Rld,
            Self::Bkm,
            Self::Alpha(0.25),
            Self::Alpha(0.75),
            Self::SymmetricInverse,
            Self::Wyd(0.3),
            Self::Wyd(0.5),
        ]
    }

    /// Regular built-ins (those with an absolutely continuous `ν`).
    pub fn regular_builtins() -> Vec<Self> {
        Self::builtins().into_iter().filter(|m| m.is_regular()).collect()
    }

    pub fn parameter(&self) -> Option<f64> {
        match *self {
            Self::Alpha(a) | Self::Wyd(a) => Some(a),
            _ => None,
        }
    }

    /// Whether `ν_g` dominates Lebesgue measure on `(0, ∞)`.
    pub fn is_regular(&self) -> bool {
        !matches!(self, Self::Sld | Self::Rld)
    }

    /// `g(x) = c(x, 1)`.
    pub fn g(&self, x: f64) -> f64 {
        self.c(x, 1.0)
    }

    /// Morozova–Chentsov kernel `c(x, y)` for `x, y ≥ 0`; `+∞` where the
    /// kernel blows up at zero.
    pub fn c(&self, x: f64, y: f64) -> f64 {
        if x == 0.0 && y == 0.0 {
            return f64::INFINITY;
        }
        match *self {
            Self::Sld => 2.0 / (x + y),
            Self::Rld => 0.5 * (1.0 / x + 1.0 / y),
            Self::Bkm => log_divided_difference(x, y),
            Self::Alpha(a) => {
                if x == 0.0 || y == 0.0 {
                    return f64::INFINITY;
                }
                0.5 * (x.powf(-a) * y.powf(a - 1.0) + x.powf(a - 1.0) * y.powf(-a))
            }
            Self::SymmetricInverse => 1.0 / (x * y).sqrt(),
            Self::Wyd(a) => {
                power_divided_difference(a, x, y) * power_divided_difference(1.0 - a, x, y) / (a * (1.0 - a))
            }
        }
    }

    /// Density `ν_g(s)` of the representation `g(x) = ∫ ν_g(s)/(s + x) ds`,
    /// when it exists.
    pub fn nu(&self, s: f64) -> Option<f64> {
        match *self {
            Self::Sld | Self::Rld => None,
            Self::Bkm => Some(1.0 / (1.0 + s)),
            Self::Alpha(a) => Some((PI * a).sin() / (2.0 * PI) * (s.powf(-a) + s.powf(a - 1.0))),
            Self::SymmetricInverse => Some((s.powf(-0.5) + s.powf(-0.5)) / (2.0 * PI)),
            Self::Wyd(a) => Some(
                (PI * a).sin() * (s.powf(a) + s.powf(1.0 - a)) / (PI * a * (1.0 - a) * (1.0 + s) * (1.0 + s)),
            ),
        }
    }

    pub fn has_density(&self) -> bool {
        self.nu(1.0).is_some()
    }

    /// Kernel matrix `[c(λ_i, λ_j)]` over the spectrum of `ρ`, with
    /// eigenvalues outside the support set to zero.
    pub fn kernel_matrix(&self, rho: &DensityOperator) -> DMatrix<f64> {
        let lam: Vec<f64> = rho.eigenvalues().iter().map(|&l| if rho.in_support(l) { l } else { 0.0 }).collect();
        let n = lam.len();
        DMatrix::from_fn(n, n, |i, j| self.c(lam[i], lam[j]))
    }
}

impl fmt::Display for MonotoneMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Sld => f.write_str("sld"),
            Self::Rld => f.write_str("rld"),
            Self::Bkm => f.write_str("bkm"),
            Self::Alpha(a) => write!(f, "alpha:{a}"),
            Self::SymmetricInverse => f.write_str("sym-inv"),
            Self::Wyd(a) => write!(f, "wyd:{a}"),
        }
    }
}

impl FromStr for MonotoneMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let unknown = || Error::UnknownMetric(s.to_string());
        let (head, param) = match s.split_once(':') {
            Some((h, p)) => (h, Some(p.trim().parse::<f64>().map_err(|_| unknown())?)),
            None => (s, None),
        };
        match (head.to_ascii_lowercase().as_str(), param) {
            ("sld", None) => Ok(Self::Sld),
            ("rld", None) => Ok(Self::Rld),
            ("bkm", None) => Ok(Self::Bkm),
            ("sym-inv", None) => Ok(Self::SymmetricInverse),
            ("alpha", Some(a)) => Self::alpha(a),
            ("wyd", Some(a)) => Self::wyd(a),
            _ => Err(unknown()),
        }
    }
}

impl MonotoneMetric {
    /// Name in the `sld | rld | bkm | alpha:<α> | sym-inv | wyd:<α>` grammar.
    pub fn name(&self) -> String {
        self.to_string()
    }
}

fn check_dims(rho: &DensityOperator, a: &CMat) -> Result<()> {
    let d = rho.dim();
    if a.nrows() != d || a.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: a.nrows() });
    }
    Ok(())
}

/// `γ_ρ(A, B) = Σ c(λ_i, λ_j) conj(Ã_ij) B̃_ij`.
///
/// Fails with [`Error::SupportViolation`] when an infinite kernel entry
/// meets a nonzero coefficient (the value is `+∞`).
pub fn metric_eval(m: &MonotoneMetric, rho: &DensityOperator, a: &CMat, b: &CMat) -> Result<Complex64> {
    check_dims(rho, a)?;
    check_dims(rho, b)?;
    let e = rho.eigensystem();
    let (at, bt) = (e.to_eigenbasis(a), e.to_eigenbasis(b));
    let kernel = m.kernel_matrix(rho);
    let (sa, sb) = (frobenius_norm(a) * SUPPORT_TOL, frobenius_norm(b) * SUPPORT_TOL);
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..rho.dim() {
        for i in 0..rho.dim() {
            let c = kernel[(i, j)];
            let (x, y) = (at[(i, j)], bt[(i, j)]);
            if !c.is_finite() {
                if x.norm() > sa && y.norm() > sb {
                    return Err(Error::SupportViolation);
                }
                continue;
            }
            sum += x.conj() * y * c;
        }
    }
    Ok(sum)
}

/// `γ_ρ(A, A)`, returning `+∞` on a support violation.
pub fn metric_quadratic(m: &MonotoneMetric, rho: &DensityOperator, a: &CMat) -> Result<f64> {
    match metric_eval(m, rho, a, a) {
        Ok(v) => Ok(v.re.max(0.0)),
        Err(Error::SupportViolation) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// `𝕁_ρ^g(A)`: entrywise multiplication by `c(λ_i, λ_j)` in the eigenbasis.
pub fn j_apply(m: &MonotoneMetric, rho: &DensityOperator, a: &CMat) -> Result<CMat> {
    check_dims(rho, a)?;
    rho.require_full_rank()?;
    let e = rho.eigensystem();
    let kernel = m.kernel_matrix(rho);
    let mut at = e.to_eigenbasis(a);
    at.zip_apply(&kernel, |z, c| *z *= c);
    Ok(e.from_eigenbasis(&at))
}

/// `(𝕁_ρ^g)^{-1}(A)`: entrywise division by `c(λ_i, λ_j)`.
pub fn j_inverse_apply(m: &MonotoneMetric, rho: &DensityOperator, a: &CMat) -> Result<CMat> {
    check_dims(rho, a)?;
    rho.require_full_rank()?;
    let e = rho.eigensystem();
    let kernel = m.kernel_matrix(rho);
    let mut at = e.to_eigenbasis(a);
    at.zip_apply(&kernel, |z, c| *z /= c);
    Ok(e.from_eigenbasis(&at))
}

/// `∫ ⟨Aρ^{-1/2}, (s + Δ_ρ)^{-1}(Aρ^{-1/2})⟩ ν_g(s) ds` by the half-line rule.
pub fn metric_eval_integral(m: &MonotoneMetric, rho: &DensityOperator, a: &CMat, rule: &HalfLineRule) -> Result<f64> {
    check_dims(rho, a)?;
    if !m.has_density() {
        return Err(Error::MissingDensity(m.name()));
    }
    rho.require_full_rank()?;
    let e = rho.eigensystem();
    let lam = e.values();
    // X = A ρ^{-1/2} in the eigenbasis; Δ_ρ acts on X_ij by λ_i/λ_j.
    let at = e.to_eigenbasis(a);
    let n = rho.dim();
    let mut weights = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            weights.push((at[(i, j)].norm_sqr() / lam[j], lam[i] / lam[j]));
        }
    }
    Ok(rule.integrate(|s| {
        let nu = m.nu(s).unwrap_or(0.0);
        nu * weights.iter().map(|&(x2, ratio)| x2 / (s + ratio)).sum::<f64>()
    }))
}

/// `tr(X^p)` for positive definite Hermitian `x`.
fn positive_power(x: &CMat, p: f64) -> Result<CMat> {
    let e = hermitian_eigen(x)?;
    let min = e.values().first().copied().unwrap_or(0.0);
    if min <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "finite-difference step leaves the positive cone (min eigenvalue {min:e})"
        )));
    }
    Ok(e.apply(|l| Complex64::new(l.powf(p), 0.0)))
}

/// Central mixed difference of `tr((ρ+sA)^α (ρ+tB)^{1-α})` at the origin,
/// divided by `α(1-α)` so that it is normalized like the other metrics.
pub fn wyd_hessian_reference(
    rho: &DensityOperator,
    a: &HermitianOperator,
    b: &HermitianOperator,
    alpha: f64,
    h: f64,
) -> Result<f64> {
    check_exponent(alpha)?;
    check_dims(rho, a.matrix())?;
    check_dims(rho, b.matrix())?;
    let r = rho.matrix();
    let f = |s: f64, t: f64| -> Result<f64> {
        let left = positive_power(&(r + a.matrix() * Complex64::new(s, 0.0)), alpha)?;
        let right = positive_power(&(r + b.matrix() * Complex64::new(t, 0.0)), 1.0 - alpha)?;
        Ok((left * right).trace().re)
    };
    let mixed = (f(h, h)? - f(h, -h)? - f(-h, h)? + f(-h, -h)?) / (4.0 * h * h);
    Ok(mixed / (alpha * (1.0 - alpha)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{matrix_function, re};
    use crate::quadrature::composite_gauss_legendre;
    use crate::random;
    use proptest::prelude::*;

    fn offdiag(x: f64) -> CMat {
        CMat::from_row_slice(2, 2, &[re(0.0), re(x), re(x), re(0.0)])
    }

    fn diag(d: &[f64]) -> CMat {
        HermitianOperator::from_real_diagonal(d).into_matrix()
    }

    fn quad(m: &MonotoneMetric, rho: &DensityOperator, a: &CMat) -> f64 {
        metric_quadratic(m, rho, a).unwrap()
    }

    fn all() -> Vec<MonotoneMetric> {
        let mut v = MonotoneMetric::builtins();
        v.extend([MonotoneMetric::Alpha(0.5), MonotoneMetric::Wyd(0.75), MonotoneMetric::Alpha(0.1)]);
        v
    }

    #[test]
    fn names_round_trip() {
        for m in all() {
            assert_eq!(m.name().parse::<MonotoneMetric>().unwrap(), m);
        }
        assert_eq!("alpha:0.25".parse::<MonotoneMetric>().unwrap(), MonotoneMetric::Alpha(0.25));
        assert_eq!("wyd:0.3".parse::<MonotoneMetric>().unwrap(), MonotoneMetric::Wyd(0.3));
        assert_eq!("sym-inv".parse::<MonotoneMetric>().unwrap(), MonotoneMetric::SymmetricInverse);
        for bad in ["bures", "alpha", "alpha:x", "sld:1"] {
            assert!(matches!(bad.parse::<MonotoneMetric>(), Err(Error::UnknownMetric(_))), "{bad}");
        }
        assert!(matches!("wyd:1.5".parse::<MonotoneMetric>(), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn maximally_mixed_qubit() {
        let rho = DensityOperator::maximally_mixed(2);
        let a = diag(&[0.5, -0.5]);
        for m in all() {
            assert!((quad(&m, &rho, &a) - 1.0).abs() < 1e-14, "{m}");
        }
    }

    #[test]
    fn commuting_case_is_classical_fisher() {
        let rho = DensityOperator::diagonal(&[0.75, 0.25]).unwrap();
        let a = diag(&[0.25, -0.25]);
        for m in all() {
            assert!((quad(&m, &rho, &a) - 1.0 / 3.0).abs() < 1e-14, "{m}");
        }
    }

    #[test]
    fn off_diagonal_hand_values() {
        let rho = DensityOperator::diagonal(&[0.75, 0.25]).unwrap();
        let a = offdiag(0.5);
        assert!((quad(&MonotoneMetric::Sld, &rho, &a) - 1.0).abs() < 1e-14);
        assert!((quad(&MonotoneMetric::Rld, &rho, &a) - 4.0 / 3.0).abs() < 1e-14);
        assert!((quad(&MonotoneMetric::Bkm, &rho, &a) - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn rld_support_violation_is_infinite() {
        let rho = DensityOperator::diagonal(&[1.0, 0.0]).unwrap();
        assert_eq!(quad(&MonotoneMetric::Rld, &rho, &offdiag(0.5)), f64::INFINITY);
        assert_eq!(quad(&MonotoneMetric::Bkm, &rho, &diag(&[0.0, 1.0])), f64::INFINITY);
        // inside the support the value stays finite
        assert!((quad(&MonotoneMetric::Rld, &rho, &diag(&[0.5, 0.0])) - 0.25).abs() < 1e-15);
        // SLD only sees the pair (1, 0) through 2/(1+0)
        assert!((quad(&MonotoneMetric::Sld, &rho, &offdiag(0.5)) - 1.0).abs() < 1e-15);
        assert!(matches!(
            metric_eval(&MonotoneMetric::Rld, &rho, &offdiag(0.5), &offdiag(0.5)),
            Err(Error::SupportViolation)
        ));
    }

    #[test]
    fn j_closed_forms() {
        let mut rng = random::rng(5);
        let rho = random::density(&mut rng, 3, 0.1);
        let a = random::hermitian(&mut rng, 3).into_matrix();
        let inv_sqrt = rho.support_power(re(-0.5));
        let j = j_apply(&MonotoneMetric::SymmetricInverse, &rho, &a).unwrap();
        assert!(frobenius_norm(&(j - &inv_sqrt * &a * &inv_sqrt)) < 1e-10);

        let jinv = j_inverse_apply(&MonotoneMetric::Sld, &rho, &a).unwrap();
        let sym = (rho.matrix() * &a + &a * rho.matrix()) * re(0.5);
        assert!(frobenius_norm(&(jinv - sym)) < 1e-13);
    }

    #[test]
    fn bkm_inverse_is_an_integral_of_powers() {
        let mut rng = random::rng(6);
        let rho = random::density(&mut rng, 4, 0.05);
        let a = random::hermitian(&mut rng, 4).into_matrix();
        let e = rho.eigensystem();
        let mut integral = CMat::zeros(4, 4);
        for (t, w) in composite_gauss_legendre(0.0, 1.0, 8, 16) {
            let left = matrix_function(e, |l| re(l.powf(t)));
            let right = matrix_function(e, |l| re(l.powf(1.0 - t)));
            integral += left * &a * right * re(w);
        }
        let jinv = j_inverse_apply(&MonotoneMetric::Bkm, &rho, &a).unwrap();
        assert!(frobenius_norm(&(jinv - integral)) < 1e-12);
    }

    #[test]
    fn j_round_trip_and_pairing() {
        let mut rng = random::rng(7);
        for m in all() {
            let rho = random::density(&mut rng, 4, 0.05);
            let a = random::ginibre(&mut rng, 4, 4);
            let b = random::ginibre(&mut rng, 4, 4);
            let back = j_inverse_apply(&m, &rho, &j_apply(&m, &rho, &a).unwrap()).unwrap();
            assert!(frobenius_norm(&(back - &a)) < 1e-10 * frobenius_norm(&a));
            let pair = crate::operators::hs_inner(&a, &j_apply(&m, &rho, &b).unwrap());
            let direct = metric_eval(&m, &rho, &a, &b).unwrap();
            assert!((pair - direct).norm() < 1e-10 * direct.norm().max(1.0));
            let swapped = metric_eval(&m, &rho, &b, &a).unwrap();
            assert!((direct - swapped.conj()).norm() < 1e-12 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn j_requires_full_rank() {
        let rho = DensityOperator::diagonal(&[1.0, 0.0]).unwrap();
        assert!(matches!(j_apply(&MonotoneMetric::Bkm, &rho, &offdiag(1.0)), Err(Error::NotFullRank(_))));
    }

    #[test]
    fn integral_representation_matches_kernel() {
        let rule = HalfLineRule::default();
        let rho = DensityOperator::diagonal(&[0.75, 0.25]).unwrap();
        let a = offdiag(0.5);
        let bkm = metric_eval_integral(&MonotoneMetric::Bkm, &rho, &a, &rule).unwrap();
        assert!((bkm - 3f64.ln()).abs() < 1e-6 * 3f64.ln());
        let half = metric_eval_integral(&MonotoneMetric::Alpha(0.5), &rho, &a, &rule).unwrap();
        let inv_sqrt = rho.support_power(re(-0.5));
        let closed = (&a * &inv_sqrt * &a * &inv_sqrt).trace().re;
        assert!((half - closed).abs() < 1e-6 * closed);
        assert_eq!(metric_eval_integral(&MonotoneMetric::Wyd(0.3), &rho, &CMat::zeros(2, 2), &rule).unwrap(), 0.0);
        assert!(matches!(
            metric_eval_integral(&MonotoneMetric::Sld, &rho, &a, &rule),
            Err(Error::MissingDensity(_))
        ));
    }

    #[test]
    fn nu_reproduces_g() {
        let rule = HalfLineRule::default();
        for m in all().into_iter().filter(|m| m.has_density()) {
            for &x in &[1e-3, 0.1, 1.0, 4.0, 1e3] {
                let q = rule.integrate(|s| m.nu(s).unwrap() / (s + x));
                assert!((q - m.g(x)).abs() < 1e-9 * m.g(x), "{m} x={x}: {q} vs {}", m.g(x));
            }
        }
    }

    #[test]
    fn wyd_hessian_examples() {
        let rho = DensityOperator::diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let a = HermitianOperator::from_real_diagonal(&[0.1, -0.04, -0.06]);
        let fisher = 0.01 / 0.5 + 0.0016 / 0.3 + 0.0036 / 0.2;
        let h = wyd_hessian_reference(&rho, &a, &a, 0.3, 1e-4).unwrap();
        assert!((h - fisher).abs() < 1e-6);

        let rho = DensityOperator::diagonal(&[0.75, 0.25]).unwrap();
        let off = HermitianOperator::new(offdiag(0.5)).unwrap();
        let h = wyd_hessian_reference(&rho, &off, &off, 0.5, 1e-4).unwrap();
        let k = quad(&MonotoneMetric::Wyd(0.5), &rho, off.matrix());
        assert!((h - k).abs() < 1e-5, "{h} vs {k}");

        let zero = HermitianOperator::zeros(2);
        assert!(wyd_hessian_reference(&rho, &zero, &off, 0.5, 1e-4).unwrap().abs() < 1e-9);
    }

    #[test]
    fn wyd_hessian_picks_squared_denominator() {
        let mut rng = random::rng(8);
        for &alpha in &[0.2, 0.3, 0.6] {
            let rho = random::density(&mut rng, 3, 0.2);
            let a = random::traceless_hermitian(&mut rng, 3);
            let a = HermitianOperator::new(a.matrix() * re(0.05)).unwrap();
            let h = wyd_hessian_reference(&rho, &a, &a, alpha, 1e-4).unwrap();
            let k = quad(&MonotoneMetric::Wyd(alpha), &rho, a.matrix());
            assert!((h - k).abs() < 1e-5 * k.max(1.0), "α={alpha}: {h} vs {k}");
        }
    }

    proptest! {
        #[test]
        fn kernel_structure(lx in -3.0f64..3.0, ly in -3.0f64..3.0) {
            let (x, y) = (10f64.powf(lx), 10f64.powf(ly));
            for m in all() {
                let c = m.c(x, y);
                prop_assert!((c - m.c(y, x)).abs() <= 1e-12 * c);
                prop_assert!((c - m.g(x / y) / y).abs() <= 1e-12 * c, "{} {} {}", m, x, y);
                prop_assert!((m.c(x, x) - 1.0 / x).abs() <= 1e-12 / x);
                prop_assert!((m.g(1.0 / x) - x * m.g(x)).abs() <= 1e-10 * m.g(1.0 / x));
                prop_assert!(MonotoneMetric::Sld.c(x, y) <= c * (1.0 + 1e-12));
                prop_assert!(c <= MonotoneMetric::Rld.c(x, y) * (1.0 + 1e-12));
            }
        }

        #[test]
        fn near_diagonal_is_continuous(lx in -3.0f64..3.0, eps in -1e-6f64..1e-6) {
            let x = 10f64.powf(lx);
            let y = x * (1.0 + eps);
            for m in all() {
                prop_assert!((m.c(x, y) - 1.0 / (x * y).sqrt()).abs() <= 1e-5 / x);
            }
        }

        #[test]
        fn ordering_on_random_states(seed in 0u64..1000) {
            let mut rng = random::rng(seed);
            let rho = random::density(&mut rng, 3, 0.05);
            let a = random::traceless_hermitian(&mut rng, 3).into_matrix();
            let sld = quad(&MonotoneMetric::Sld, &rho, &a);
            let rld = quad(&MonotoneMetric::Rld, &rho, &a);
            let tn = crate::operators::trace_norm(&a).unwrap();
            prop_assert!(tn * tn <= sld * (1.0 + 1e-10));
            for m in all() {
                let v = quad(&m, &rho, &a);
                prop_assert!(sld <= v * (1.0 + 1e-10) && v <= rld * (1.0 + 1e-10));
            }
        }
    }
}
