//! Differentiable families of states and their Fisher information.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::metrics::{metric_eval, metric_quadratic, MonotoneMetric};
use crate::operators::{
    commutator, frobenius_norm, hermitian_deviation, operator_norm, re, symmetrize, CMat, DensityOperator,
    HermitianOperator,
};
use crate::quadrature::adaptive_simpson;
use crate::random;

pub type StateFn = Arc<dyn Fn(f64) -> Result<DensityOperator> + Send + Sync>;
pub type MatrixFn = Arc<dyn Fn(f64) -> Result<CMat> + Send + Sync>;
pub type MultiStateFn = Arc<dyn Fn(&[f64]) -> Result<DensityOperator> + Send + Sync>;
pub type PartialsFn = Arc<dyn Fn(&[f64]) -> Result<Vec<CMat>> + Send + Sync>;

/// Default central-difference step.
pub const FD_STEP: f64 = 1e-5;
/// Step used when validating an exact derivative against finite differences.
pub const VALIDATION_STEP: f64 = 1e-4;

#[derive(Clone)]
pub enum Derivative {
    Exact(MatrixFn),
    FiniteDifference { step: f64 },
}

/// `θ ↦ ρ_θ` on an interval, with its derivative.
#[derive(Clone)]
pub struct StateFamily {
    label: String,
    interval: (f64, f64),
    state: StateFn,
    derivative: Derivative,
}

impl core::fmt::Debug for StateFamily {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("StateFamily")
            .field("label", &self.label)
            .field("interval", &self.interval)
            .field("exact", &self.is_exact())
            .finish()
    }
}

/// Worst-case residuals of [`StateFamily::validate`] over the grid.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FamilyValidation {
    pub min_eigenvalue: f64,
    pub max_derivative_trace: f64,
    pub max_derivative_hermitian_deviation: f64,
    /// `‖(ρ(θ+h) - ρ(θ-h))/2h - ρ̇(θ)‖₂`, zero for finite-difference families.
    pub max_finite_difference_mismatch: f64,
}

impl StateFamily {
    pub fn new(label: impl Into<String>, interval: (f64, f64), state: StateFn, derivative: Derivative) -> Self {
        Self { label: label.into(), interval, state, derivative }
    }

    pub fn exact<S, D>(label: impl Into<String>, interval: (f64, f64), state: S, derivative: D) -> Self
    where
        S: Fn(f64) -> Result<DensityOperator> + Send + Sync + 'static,
        D: Fn(f64) -> Result<CMat> + Send + Sync + 'static,
    {
        Self::new(label, interval, Arc::new(state), Derivative::Exact(Arc::new(derivative)))
    }

    pub fn finite_difference<S>(label: impl Into<String>, interval: (f64, f64), state: S, step: f64) -> Self
    where
        S: Fn(f64) -> Result<DensityOperator> + Send + Sync + 'static,
    {
        Self::new(label, interval, Arc::new(state), Derivative::FiniteDifference { step })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.derivative, Derivative::Exact(_))
    }

    pub fn state(&self, theta: f64) -> Result<DensityOperator> {
        (self.state)(theta)
    }

    fn central_difference(&self, theta: f64, h: f64) -> Result<CMat> {
        let plus = self.state(theta + h)?;
        let minus = self.state(theta - h)?;
        Ok((plus.matrix() - minus.matrix()) / re(2.0 * h))
    }

    /// The derivative as supplied (exact) or by central difference.
    pub fn raw_derivative(&self, theta: f64) -> Result<CMat> {
        match &self.derivative {
            Derivative::Exact(d) => d(theta),
            Derivative::FiniteDifference { step } => self.central_difference(theta, *step),
        }
    }

    /// `ρ̇_θ`, symmetrized.
    pub fn derivative(&self, theta: f64) -> Result<HermitianOperator> {
        HermitianOperator::new(symmetrize(&self.raw_derivative(theta)?))
    }

    /// `n ≥ 2` equally spaced points including both endpoints.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        uniform_grid(self.interval, n)
    }

    /// Checks states, tracelessness and Hermiticity of the derivative
    /// (`1e-8` exact, `1e-6` finite difference) and, for exact derivatives,
    /// agreement with a central difference within `10 h²`.
    pub fn validate(&self, points: usize) -> Result<FamilyValidation> {
        let mut v = FamilyValidation { min_eigenvalue: f64::INFINITY, ..Default::default() };
        let h = VALIDATION_STEP;
        let tol = if self.is_exact() { 1e-8 } else { 1e-6 };
        for theta in self.grid(points) {
            let rho = self.state(theta)?;
            v.min_eigenvalue = v.min_eigenvalue.min(rho.min_eigenvalue());
            let d = self.raw_derivative(theta)?;
            v.max_derivative_trace = v.max_derivative_trace.max(d.trace().norm());
            v.max_derivative_hermitian_deviation = v.max_derivative_hermitian_deviation.max(hermitian_deviation(&d));
            if self.is_exact() {
                let fd = self.central_difference(theta, h)?;
                v.max_finite_difference_mismatch = v.max_finite_difference_mismatch.max(frobenius_norm(&(fd - &d)));
            }
        }
        if v.max_derivative_trace > tol {
            return Err(Error::InvalidTrace(v.max_derivative_trace));
        }
        if v.max_derivative_hermitian_deviation > tol {
            return Err(Error::NotHermitian(v.max_derivative_hermitian_deviation));
        }
        if v.max_finite_difference_mismatch > 10.0 * h * h {
            return Err(Error::InvalidParameter(format!(
                "declared derivative disagrees with finite differences by {:e}",
                v.max_finite_difference_mismatch
            )));
        }
        Ok(v)
    }

    /// `θ ↦ Φ(ρ_θ)` with derivative `Φ(ρ̇_θ)`.
    pub fn pushforward(&self, channel: &QuantumChannel) -> StateFamily {
        let (state, ch) = (self.state.clone(), channel.clone());
        let push_state: StateFn = Arc::new(move |t| ch.apply_state(&state(t)?));
        let derivative = match &self.derivative {
            Derivative::Exact(d) => {
                let (d, ch) = (d.clone(), channel.clone());
                Derivative::Exact(Arc::new(move |t| ch.apply(&d(t)?)))
            }
            Derivative::FiniteDifference { step } => Derivative::FiniteDifference { step: *step },
        };
        StateFamily::new(format!("{}∘Φ", self.label), self.interval, push_state, derivative)
    }
}

pub fn uniform_grid(interval: (f64, f64), n: usize) -> Vec<f64> {
    let (a, b) = interval;
    if n < 2 {
        return alloc::vec![0.5 * (a + b)];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// `I^g(θ) = γ^g_{ρ_θ}(ρ̇_θ)`.
pub fn qfi(m: &MonotoneMetric, fam: &StateFamily, theta: f64) -> Result<f64> {
    let rho = fam.state(theta)?;
    metric_quadratic(m, &rho, fam.derivative(theta)?.matrix())
}

/// Multi-parameter family `θ ∈ Θ ⊂ ℝⁿ ↦ ρ_θ` with its partial derivatives.
#[derive(Clone)]
pub struct MultiFamily {
    pub label: String,
    pub region: Vec<(f64, f64)>,
    state: MultiStateFn,
    partials: PartialsFn,
}

impl MultiFamily {
    pub fn new<S, D>(label: impl Into<String>, region: Vec<(f64, f64)>, state: S, partials: D) -> Self
    where
        S: Fn(&[f64]) -> Result<DensityOperator> + Send + Sync + 'static,
        D: Fn(&[f64]) -> Result<Vec<CMat>> + Send + Sync + 'static,
    {
        Self { label: label.into(), region, state: Arc::new(state), partials: Arc::new(partials) }
    }

    pub fn parameters(&self) -> usize {
        self.region.len()
    }

    pub fn state(&self, theta: &[f64]) -> Result<DensityOperator> {
        (self.state)(theta)
    }

    pub fn partials(&self, theta: &[f64]) -> Result<Vec<CMat>> {
        (self.partials)(theta)
    }

    /// The one-parameter family through `theta` along coordinate `i`.
    pub fn slice(&self, theta: &[f64], i: usize) -> StateFamily {
        let base: Vec<f64> = theta.to_vec();
        let (s, p) = (self.state.clone(), self.partials.clone());
        let b2 = base.clone();
        let at = move |x: f64, base: &[f64]| {
            let mut v = base.to_vec();
            v[i] = x;
            v
        };
        StateFamily::exact(
            format!("{}[{i}]", self.label),
            self.region[i],
            move |x| s(&at(x, &base)),
            move |x| {
                let mut v = b2.clone();
                v[i] = x;
                Ok(p(&v)?.swap_remove(i))
            },
        )
    }

    pub fn pushforward(&self, channel: &QuantumChannel) -> MultiFamily {
        let (s, p) = (self.state.clone(), self.partials.clone());
        let (c1, c2) = (channel.clone(), channel.clone());
        MultiFamily::new(
            format!("{}∘Φ", self.label),
            self.region.clone(),
            move |t| c1.apply_state(&s(t)?),
            move |t| p(t)?.iter().map(|d| c2.apply(d)).collect(),
        )
    }
}

/// `[γ^g_{ρ_θ}(∂_i ρ_θ, ∂_j ρ_θ)]_{ij}`.
pub fn qfi_matrix(m: &MonotoneMetric, fam: &MultiFamily, theta: &[f64]) -> Result<DMatrix<f64>> {
    let rho = fam.state(theta)?;
    let partials: Vec<CMat> = fam.partials(theta)?.iter().map(symmetrize).collect();
    let n = partials.len();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = metric_eval(m, &rho, &partials[i], &partials[j])?.re;
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}

/// Solution `L` of `A = (Lρ + ρL)/2`.
pub fn sld_operator(rho: &DensityOperator, a: &HermitianOperator) -> Result<HermitianOperator> {
    rho.require_full_rank()?;
    let e = rho.eigensystem();
    let lam = e.values();
    let mut at = e.to_eigenbasis(a.matrix());
    for j in 0..rho.dim() {
        for i in 0..rho.dim() {
            at[(i, j)] *= 2.0 / (lam[i] + lam[j]);
        }
    }
    HermitianOperator::new(symmetrize(&e.from_eigenbasis(&at)))
}

/// Both expressions of the purity of coherence:
/// `tr(ρ⁻¹Lρ²L) - tr(ρL²)` and `-tr(ρ⁻¹[ρ,L]²)`.
pub fn purity_of_coherence_forms(rho: &DensityOperator, l: &HermitianOperator) -> Result<(f64, f64)> {
    rho.require_full_rank()?;
    let inv = rho.support_function(|x| re(1.0 / x));
    let (r, l) = (rho.matrix(), l.matrix());
    let trace_form = (&inv * l * r * r * l).trace().re - (r * l * l).trace().re;
    let c = commutator(r, l);
    let commutator_form = -(&inv * &c * &c).trace().re;
    Ok((trace_form, commutator_form))
}

/// `P_L(ρ) = -tr(ρ⁻¹[ρ,L]²)`.
pub fn purity_of_coherence(rho: &DensityOperator, l: &HermitianOperator) -> Result<f64> {
    Ok(purity_of_coherence_forms(rho, l)?.1)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapCheck {
    pub gap: f64,
    pub quarter_purity: f64,
    pub residual: f64,
}

/// `I_RLD - I_SLD` against `P_{L_θ}(ρ_θ)/4`.
pub fn rld_sld_gap_check(fam: &StateFamily, theta: f64) -> Result<GapCheck> {
    let rho = fam.state(theta)?;
    rho.require_full_rank()?;
    let d = fam.derivative(theta)?;
    let gap = metric_quadratic(&MonotoneMetric::Rld, &rho, d.matrix())? - metric_quadratic(&MonotoneMetric::Sld, &rho, d.matrix())?;
    let l = sld_operator(&rho, &d)?;
    let quarter_purity = 0.25 * purity_of_coherence(&rho, &l)?;
    Ok(GapCheck { gap, quarter_purity, residual: (gap - quarter_purity).abs() })
}

/// `t ↦ e^{-iHt} ρ e^{iHt}` on `(-10, 10)` with derivative `-i[H, ρ(t)]`.
pub fn make_unitary_orbit(rho: &DensityOperator, h: &HermitianOperator) -> Result<StateFamily> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: h.dim() });
    }
    let eig = h.eigensystem()?;
    let (r1, r2, e2) = (rho.matrix().clone(), rho.matrix().clone(), eig.clone());
    let hm = h.matrix().clone();
    let evolve = move |t: f64, r: &CMat, e: &crate::operators::Eigensystem| {
        let u = e.apply(|l| Complex64::new(0.0, -l * t).exp());
        &u * r * u.adjoint()
    };
    Ok(StateFamily::exact(
        "unitary-orbit",
        (-10.0, 10.0),
        move |t| DensityOperator::new(symmetrize(&evolve(t, &r1, &eig))),
        move |t| Ok(commutator(&hm, &evolve(t, &r2, &e2)) * Complex64::new(0.0, -1.0)),
    ))
}

/// `t ↦ tσ + (1-t)ρ` on `[0, 1]`; its Fisher information at `t = 1` is `χ²(ρ, σ)`.
pub fn make_linear_interpolation(rho: &DensityOperator, sigma: &DensityOperator) -> Result<StateFamily> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    let (r, s) = (rho.matrix().clone(), sigma.matrix().clone());
    let diff = &s - &r;
    Ok(StateFamily::exact(
        "linear-interpolation",
        (0.0, 1.0),
        move |t| DensityOperator::with_tolerances(symmetrize(&(&s * re(t) + &r * re(1.0 - t))), 1e-10, crate::operators::RANK_TOL),
        move |_| Ok(diff.clone()),
    ))
}

/// Full-rank family `ρ_θ = M(θ)/tr M(θ)` with `M = B B* + δI` and `B` a
/// quadratic matrix polynomial in `θ`. Exact derivative, interval `(-1, 1)`.
pub fn random_family<R: Rng + ?Sized>(rng: &mut R, dim: usize, delta: f64) -> StateFamily {
    let g: Vec<CMat> = (0..3).map(|k| random::ginibre(rng, dim, dim) * re(1.0 / (1.0 + k as f64))).collect();
    let g2 = g.clone();
    let parts = move |t: f64, g: &[CMat]| {
        let b = &g[0] + &g[1] * re(t) + &g[2] * re(t * t);
        let db = &g[1] + &g[2] * re(2.0 * t);
        let m = &b * b.adjoint() + CMat::identity(dim, dim) * re(delta);
        let dm = &db * b.adjoint() + &b * db.adjoint();
        (m, dm)
    };
    StateFamily::exact(
        "random-polynomial",
        (-1.0, 1.0),
        move |t| {
            let (m, _) = parts(t, &g);
            let tr = m.trace();
            DensityOperator::new(symmetrize(&(m / tr)))
        },
        move |t| {
            let (m, dm) = parts(t, &g2);
            let (tr, dtr) = (m.trace(), dm.trace());
            Ok((dm * tr - m * dtr) / (tr * tr))
        },
    )
}

/// Two-parameter analogue of [`random_family`]: `B = G₀ + θ₁G₁ + θ₂G₂`.
pub fn random_multi_family<R: Rng + ?Sized>(rng: &mut R, dim: usize, params: usize, delta: f64) -> MultiFamily {
    let g: Vec<CMat> = (0..=params).map(|_| random::ginibre(rng, dim, dim)).collect();
    let g2 = g.clone();
    let build = move |t: &[f64], g: &[CMat]| {
        let mut b = g[0].clone();
        for (k, &x) in t.iter().enumerate() {
            b += &g[k + 1] * re(x);
        }
        let m = &b * b.adjoint() + CMat::identity(dim, dim) * re(delta);
        (b, m)
    };
    MultiFamily::new(
        "random-multi",
        alloc::vec![(-1.0, 1.0); params],
        move |t| {
            let (_, m) = build(t, &g);
            let tr = m.trace();
            DensityOperator::new(symmetrize(&(m / tr)))
        },
        move |t| {
            let (b, m) = build(t, &g2);
            let tr = m.trace();
            Ok((0..t.len())
                .map(|k| {
                    let dm = &g2[k + 1] * b.adjoint() + &b * g2[k + 1].adjoint();
                    let dtr = dm.trace();
                    (dm * tr - &m * dtr) / (tr * tr)
                })
                .collect())
        },
    )
}

/// Scalar function with derivative.
#[derive(Clone)]
pub struct ScalarFunction {
    pub label: String,
    value: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    derivative: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl ScalarFunction {
    pub fn new<F, D>(label: impl Into<String>, value: F, derivative: D) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self { label: label.into(), value: Arc::new(value), derivative: Arc::new(derivative) }
    }

    /// `θ ↦ intercept + slope·θ`.
    pub fn affine(intercept: f64, slope: f64) -> Self {
        Self::new(format!("affine:{intercept},{slope}"), move |t| intercept + slope * t, move |_| slope)
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        (self.derivative)(t)
    }
}

/// How the off-diagonal scale `ε` of the counter-example is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EpsilonChoice {
    Fixed(f64),
    /// A fraction of the supremum allowed by positivity.
    Auto(f64),
}

/// Piecewise cubic Hermite interpolant.
#[derive(Clone, Debug)]
struct Hermite {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl Hermite {
    fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let h = self.xs[1] - self.xs[0];
        let k = (((x - self.xs[0]) / h).floor().max(0.0) as usize).min(n - 2);
        let (x0, x1) = (self.xs[k], self.xs[k + 1]);
        let s = (x - x0) / (x1 - x0);
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.ys[k] + h10 * h * self.ds[k] + h01 * self.ys[k + 1] + h11 * h * self.ds[k + 1]
    }
}

/// The qubit family `ρ_θ = [[p, εr], [εr, 1-p]]` whose SLD is diagonal.
#[derive(Clone)]
pub struct Counterexample {
    pub family: StateFamily,
    pub p: ScalarFunction,
    pub epsilon: f64,
    /// `sup ε` allowed: `min_θ √(p(1-p))/r`.
    pub epsilon_bound: f64,
    r: Arc<Hermite>,
}

/// `ln r` has derivative `ṗ(1-2p)/(2p(1-p))` and `r(a) = 1`.
fn log_r_rate(p: &ScalarFunction, s: f64) -> f64 {
    let (v, d) = (p.value(s), p.derivative(s));
    d * (1.0 - 2.0 * v) / (2.0 * v * (1.0 - v))
}

pub const COUNTEREXAMPLE_GRID: usize = 1001;

pub fn make_counterexample_family(p: ScalarFunction, interval: (f64, f64), epsilon: EpsilonChoice) -> Result<Counterexample> {
    let (a, b) = interval;
    if !(a < b) {
        return Err(Error::InvalidParameter(format!("empty interval [{a}, {b}]")));
    }
    let xs = uniform_grid(interval, COUNTEREXAMPLE_GRID);
    for &x in &xs {
        let v = p.value(x);
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::InvalidParameter(format!("p({x}) = {v} is outside (0, 1)")));
        }
        if !(p.derivative(x).abs() > 1e-12) {
            return Err(Error::InvalidParameter(format!("p' vanishes at {x}")));
        }
    }
    let mut ys = Vec::with_capacity(xs.len());
    let mut log_r = 0.0;
    ys.push(1.0);
    let rate = |s: f64| log_r_rate(&p, s);
    for w in xs.windows(2) {
        log_r += adaptive_simpson(&rate, w[0], w[1], 1e-12 / COUNTEREXAMPLE_GRID as f64);
        ys.push(log_r.exp());
    }
    let ds: Vec<f64> = xs.iter().zip(&ys).map(|(&x, &r)| r * rate(x)).collect();
    let bound_sq = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &r)| {
            let v = p.value(x);
            v * (1.0 - v) / (r * r)
        })
        .fold(f64::INFINITY, f64::min);
    let epsilon_bound = bound_sq.sqrt();
    let eps = match epsilon {
        EpsilonChoice::Fixed(e) => {
            if e * e >= bound_sq {
                return Err(Error::InvalidParameter(format!(
                    "epsilon {e} violates the positivity bound {epsilon_bound}"
                )));
            }
            e
        }
        EpsilonChoice::Auto(frac) => {
            if !(0.0..1.0).contains(&frac) {
                return Err(Error::InvalidParameter(format!("epsilon fraction {frac} outside [0, 1)")));
            }
            frac * epsilon_bound
        }
    };
    let r = Arc::new(Hermite { xs, ys, ds });
    let (p1, p2, r1, r2) = (p.clone(), p.clone(), r.clone(), r.clone());
    let family = StateFamily::exact(
        "counterexample",
        interval,
        move |t| {
            let (v, off) = (p1.value(t), eps * r1.eval(t));
            DensityOperator::new(CMat::from_row_slice(2, 2, &[re(v), re(off), re(off), re(1.0 - v)]))
        },
        move |t| {
            let d = p2.derivative(t);
            let off = eps * r2.eval(t) * log_r_rate(&p2, t);
            Ok(CMat::from_row_slice(2, 2, &[re(d), re(off), re(off), re(-d)]))
        },
    );
    Ok(Counterexample { family, p, epsilon: eps, epsilon_bound, r })
}

impl Counterexample {
    /// Default instance: `p = (1+θ)/4` on `[0, 1]`, `ε` at 0.9 of its bound.
    pub fn default_instance() -> Result<Self> {
        make_counterexample_family(ScalarFunction::affine(0.25, 0.25), (0.0, 1.0), EpsilonChoice::Auto(0.9))
    }

    pub fn r(&self, theta: f64) -> f64 {
        self.r.eval(theta)
    }

    /// `diag(ṗ/p, -ṗ/(1-p))`.
    pub fn diagonal_sld(&self, theta: f64) -> HermitianOperator {
        let (v, d) = (self.p.value(theta), self.p.derivative(theta));
        HermitianOperator::from_real_diagonal(&[d / v, -d / (1.0 - v)])
    }
}

/// Per-θ results of [`counterexample_verify`].
#[derive(Clone, Debug, Default)]
pub struct CounterexampleReport {
    pub grid: Vec<f64>,
    pub anchor: f64,
    pub sld_gap: Vec<f64>,
    pub rld_gap: Vec<f64>,
    pub bkm_gap: Vec<f64>,
    pub commutator_norm: Vec<f64>,
    /// `‖ρ_θ - R^t_{ρ_o,𝓛}(𝓛(ρ_θ))‖₁` for each `t` in `ts`.
    pub ts: Vec<f64>,
    pub recovery_residual: Vec<Vec<f64>>,
    /// `‖(Lρ+ρL)/2 - ρ̇‖` for the diagonal `L`.
    pub max_sld_equation_residual: f64,
}

impl CounterexampleReport {
    pub fn max_abs_sld_gap(&self) -> f64 {
        self.sld_gap.iter().fold(0.0, |a, g| a.max(g.abs()))
    }

    /// Minimum RLD gap over interior points where `‖[ρ_θ, L_θ]‖ > 1e-6`.
    pub fn min_interior_rld_gap(&self) -> f64 {
        let n = self.grid.len();
        (1..n.saturating_sub(1))
            .filter(|&k| self.commutator_norm[k] > 1e-6)
            .map(|k| self.rld_gap[k])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_bkm_gap(&self) -> f64 {
        self.bkm_gap.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// For each `t`, the largest residual over the grid.
    pub fn worst_residual_per_t(&self) -> Vec<f64> {
        self.recovery_residual.iter().map(|r| r.iter().copied().fold(0.0, f64::max)).collect()
    }

    /// `min_t max_θ` of the recovery residual: the best any tested rotated
    /// Petz map does on the whole family.
    pub fn min_recovery_residual(&self) -> f64 {
        self.worst_residual_per_t().into_iter().fold(f64::INFINITY, f64::min)
    }
}

/// Runs the three counter-example checks under the standard-basis pinching.
pub fn counterexample_verify(ce: &Counterexample, grid: usize) -> Result<CounterexampleReport> {
    let fam = &ce.family;
    let pinch = QuantumChannel::pinching(&HermitianOperator::from_real_diagonal(&[0.0, 1.0]))?;
    let pushed = fam.pushforward(&pinch);
    let (a, b) = fam.interval();
    let anchor = 0.5 * (a + b);
    let ts = alloc::vec![0.0, 1.0, -1.0];
    let reference = fam.state(anchor)?;
    let maps: Vec<QuantumChannel> =
        ts.iter().map(|&t| crate::channels::rotated_petz_map(&reference, &pinch, t)).collect::<Result<_>>()?;
    let mut rep = CounterexampleReport { anchor, ts: ts.clone(), recovery_residual: alloc::vec![Vec::new(); ts.len()], ..Default::default() };
    for theta in fam.grid(grid) {
        let rho = fam.state(theta)?;
        let d = fam.derivative(theta)?;
        let out = pushed.state(theta)?;
        let dout = pushed.derivative(theta)?;
        let q = |m: MonotoneMetric, r: &DensityOperator, x: &HermitianOperator| metric_quadratic(&m, r, x.matrix());
        rep.sld_gap.push(q(MonotoneMetric::Sld, &rho, &d)? - q(MonotoneMetric::Sld, &out, &dout)?);
        rep.rld_gap.push(q(MonotoneMetric::Rld, &rho, &d)? - q(MonotoneMetric::Rld, &out, &dout)?);
        rep.bkm_gap.push(q(MonotoneMetric::Bkm, &rho, &d)? - q(MonotoneMetric::Bkm, &out, &dout)?);
        let l = ce.diagonal_sld(theta);
        rep.commutator_norm.push(operator_norm(&commutator(rho.matrix(), l.matrix()))?);
        let sym = (l.matrix() * rho.matrix() + rho.matrix() * l.matrix()) * re(0.5);
        rep.max_sld_equation_residual = rep.max_sld_equation_residual.max(frobenius_norm(&(sym - d.matrix())));
        for (k, map) in maps.iter().enumerate() {
            let back = map.apply(out.matrix())?;
            rep.recovery_residual[k].push(crate::operators::trace_norm(&(rho.matrix() - back))?);
        }
        rep.grid.push(theta);
    }
    Ok(rep)
}
