//! Divergences between states.
//!
//! Support violations (some weight of `ρ` outside `supp σ`, above `1e-10`)
//! give `+∞`.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::metrics::{metric_quadratic, MonotoneMetric};
use crate::operators::{hermitian_eigen, re, symmetrize, DensityOperator};

/// Weight of `ρ` outside `supp σ` above which the support condition fails.
pub const SUPPORT_TOL: f64 = 1e-10;

fn check_dims(rho: &DensityOperator, sigma: &DensityOperator) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: sigma.dim(), found: rho.dim() });
    }
    Ok(())
}

/// `tr(ρ (I - Π_σ))`.
pub fn weight_outside_support(rho: &DensityOperator, sigma: &DensityOperator) -> f64 {
    let pi = sigma.support_projector();
    (1.0 - (rho.matrix() * pi).trace().re).max(0.0)
}

/// `χ²_g(ρ, σ) = γ_σ^g(ρ - σ)`.
pub fn chi2(m: &MonotoneMetric, rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    check_dims(rho, sigma)?;
    if weight_outside_support(rho, sigma) > SUPPORT_TOL {
        return Ok(f64::INFINITY);
    }
    metric_quadratic(m, sigma, &(rho.matrix() - sigma.matrix()))
}

/// `D(ρ‖σ) = tr ρ(log ρ - log σ)`.
pub fn relative_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    check_dims(rho, sigma)?;
    if weight_outside_support(rho, sigma) > SUPPORT_TOL {
        return Ok(f64::INFINITY);
    }
    let neg_entropy: f64 = rho.eigenvalues().iter().filter(|&&l| l > 0.0).map(|&l| l * l.ln()).sum();
    let log_sigma = sigma.support_function(|l| re(l.ln()));
    let cross = (rho.matrix() * log_sigma).trace().re;
    Ok((neg_entropy - cross).max(0.0))
}

/// `D_max(ρ‖σ) = log inf{C : ρ ≤ Cσ}`.
pub fn dmax(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    check_dims(rho, sigma)?;
    if weight_outside_support(rho, sigma) > SUPPORT_TOL {
        return Ok(f64::INFINITY);
    }
    let s = sigma.support_power(Complex64::new(-0.5, 0.0));
    let e = hermitian_eigen(&symmetrize(&(&s * rho.matrix() * &s)))?;
    Ok(e.values().last().copied().unwrap_or(1.0).ln())
}

/// `D₂(ρ‖σ) = log tr(ρ σ^{-1/2} ρ σ^{-1/2}) = log(1 + χ²_{1/2}(ρ, σ))`.
pub fn sandwiched_d2(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    Ok(chi2(&MonotoneMetric::SymmetricInverse, rho, sigma)?.ln_1p())
}

/// `-∂²/∂θ₁∂θ₂ D(ρ_{θ₁}‖ρ_{θ₂})` at `θ₁ = θ₂ = θ` by a central mixed difference.
pub fn relative_entropy_mixed_hessian<F>(state: F, theta: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<DensityOperator>,
{
    let (plus, minus) = (state(theta + h)?, state(theta - h)?);
    let d = |a: &DensityOperator, b: &DensityOperator| relative_entropy(a, b);
    let mixed = d(&plus, &plus)? - d(&plus, &minus)? - d(&minus, &plus)? + d(&minus, &minus)?;
    Ok(-mixed / (4.0 * h * h))
}
