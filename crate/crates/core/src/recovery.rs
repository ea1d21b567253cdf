//! Recoverability bounds and sufficiency tests.
//!
//! Every check returns a [`BoundReport`] or a report struct carrying the
//! quantities it compared, so that callers can tabulate them.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::{E, PI};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::channels::{petz_map, rotated_petz_map, QuantumChannel};
use crate::divergences::{chi2, dmax, relative_entropy};
use crate::error::{Error, Result};
use crate::families::{qfi, StateFamily};
use crate::metrics::{j_apply, j_inverse_apply, metric_eval, metric_quadratic, MonotoneMetric};
use crate::operators::{frobenius_norm, re, symmetrize, trace_norm, CMat, DensityOperator};
use crate::quadrature::{trapezoid, BetaQuadrature};
use crate::random;

/// Default slack on every inequality.
pub const BOUND_TOL: f64 = 1e-9;
/// Gaps below `-NEGATIVE_GAP_TOL` (relative to the larger side) are errors.
pub const NEGATIVE_GAP_TOL: f64 = 1e-8;
/// Residual tolerance when no divergence bound is available.
pub const FALLBACK_RESIDUAL_TOL: f64 = 1e-6;
/// Relative size below which a QFI gap is treated as roundoff in integrands.
pub const GAP_NOISE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// `lhs ≥ rhs - tolerance`.
    LhsAtLeastRhs,
    /// `lhs ≤ rhs + tolerance`.
    LhsAtMostRhs,
}

impl Orientation {
    pub fn symbol(&self) -> &'static str {
        match self {
            Orientation::LhsAtLeastRhs => ">=",
            Orientation::LhsAtMostRhs => "<=",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub components: BTreeMap<String, f64>,
    pub satisfied: bool,
    pub tolerance: f64,
    pub orientation: Orientation,
}

impl BoundReport {
    pub fn new(check: impl Into<String>, lhs: f64, rhs: f64, orientation: Orientation, tolerance: f64) -> Self {
        let mut r = Self {
            check: check.into(),
            lhs,
            rhs,
            components: BTreeMap::new(),
            satisfied: false,
            tolerance,
            orientation,
        };
        r.satisfied = r.margin() >= -tolerance;
        r
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.components.insert(name.to_string(), value);
        self
    }

    /// Signed slack; nonnegative when the inequality holds exactly.
    pub fn margin(&self) -> f64 {
        match self.orientation {
            Orientation::LhsAtLeastRhs => self.lhs - self.rhs,
            Orientation::LhsAtMostRhs => self.rhs - self.lhs,
        }
    }

    pub fn component(&self, name: &str) -> Option<f64> {
        self.components.get(name).copied()
    }
}

fn require_gap(before: f64, after: f64) -> Result<f64> {
    let gap = before - after;
    if gap < -NEGATIVE_GAP_TOL * before.abs().max(1.0) {
        return Err(Error::NegativeGap(gap));
    }
    Ok(gap)
}

/// `γ_ρ(A) - γ_{Φ(ρ)}(Φ(A))`, failing with [`Error::NegativeGap`] below `-1e-8`.
pub fn metric_gap(m: &MonotoneMetric, rho: &DensityOperator, a: &CMat, channel: &QuantumChannel) -> Result<f64> {
    let out = channel.apply_state(rho)?;
    require_gap(metric_quadratic(m, rho, a)?, metric_quadratic(m, &out, &channel.apply(a)?)?)
}

/// `χ²(ρ, σ) - χ²(Φ(ρ), Φ(σ))`.
pub fn chi2_gap(m: &MonotoneMetric, rho: &DensityOperator, sigma: &DensityOperator, channel: &QuantumChannel) -> Result<f64> {
    let before = chi2(m, rho, sigma)?;
    if !before.is_finite() {
        return Err(Error::SupportViolation);
    }
    require_gap(before, chi2(m, &channel.apply_state(rho)?, &channel.apply_state(sigma)?)?)
}

#[derive(Clone, Debug)]
pub struct RecoveryDefect {
    /// `D = A - (𝕁_ρ)^{-1} Φ* 𝕁_{Φ(ρ)} Φ(A)`.
    pub defect: CMat,
    pub gap: f64,
    /// `γ_ρ(D)`.
    pub middle: f64,
    /// `‖D‖₁²`.
    pub lower: f64,
}

pub fn recovery_defect(m: &MonotoneMetric, rho: &DensityOperator, a: &CMat, channel: &QuantumChannel) -> Result<RecoveryDefect> {
    if !m.is_regular() {
        return Err(Error::InvalidParameter(format!("{m} is not a regular metric")));
    }
    rho.require_full_rank()?;
    let out = channel.apply_state(rho)?;
    out.require_full_rank()?;
    let fa = channel.apply(a)?;
    let back = j_inverse_apply(m, rho, &channel.adjoint_apply(&j_apply(m, &out, &fa)?)?)?;
    let defect = a - back;
    let gap = require_gap(metric_quadratic(m, rho, a)?, metric_quadratic(m, &out, &fa)?)?;
    let middle = metric_eval(m, rho, &defect, &defect)?.re;
    let lower = trace_norm(&defect)?.powi(2);
    Ok(RecoveryDefect { defect, gap, middle, lower })
}

/// `χ²_{1/2}(ρ,σ) - χ²_{1/2}(Φρ,Φσ) ≥ ‖ρ - R_{σ,Φ}Φ(ρ)‖₁²`.
pub fn chi_half_recovery_check(rho: &DensityOperator, sigma: &DensityOperator, channel: &QuantumChannel) -> Result<BoundReport> {
    let gap = chi2_gap(&MonotoneMetric::SymmetricInverse, rho, sigma, channel)?;
    let recovered = petz_map(sigma, channel)?.apply(&channel.apply(rho.matrix())?)?;
    let residual = trace_norm(&(rho.matrix() - recovered))?;
    Ok(BoundReport::new("chi_half_recovery", gap, residual * residual, Orientation::LhsAtLeastRhs, BOUND_TOL)
        .with("residual", residual))
}

/// Residual tolerance implied by a `χ²_{1/2}` gap.
pub fn derived_tolerance(chi_half_gap: Option<f64>) -> f64 {
    match chi_half_gap {
        Some(g) if g.is_finite() => g.max(0.0).sqrt() + BOUND_TOL,
        _ => FALLBACK_RESIDUAL_TOL,
    }
}

/// Weight function `w` of the three-term bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Weight {
    /// `w(s) = 1 + s`.
    OnePlusS,
    /// `w(s) = s^p`, `p > 0`.
    Power(f64),
}

impl Weight {
    pub fn default_for(m: &MonotoneMetric) -> Self {
        match m {
            MonotoneMetric::Bkm => Weight::OnePlusS,
            MonotoneMetric::Alpha(a) if *a < 0.5 => Weight::Power(*a),
            _ => Weight::Power(1.0),
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Weight::OnePlusS => 1.0 + s,
            Weight::Power(p) => s.powf(*p),
        }
    }

    /// `W_{a,b} = ∫_a^b w(s)/s ds`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match self {
            Weight::OnePlusS => (b / a).ln() + b - a,
            Weight::Power(p) => (b.powf(*p) - a.powf(*p)) / p,
        }
    }
}

/// Constant `C` with `1/w ≤ C ν` on `[a, b]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Constant {
    /// `max_{[a,b]} 1/(w ν)` on a logarithmic grid.
    Tight,
    Fixed(f64),
}

/// `max 1/(w(s) ν(s))` over a 4001-point logarithmic grid of `[a, b]`.
pub fn tight_constant(m: &MonotoneMetric, w: Weight, a: f64, b: f64) -> Result<f64> {
    if !m.has_density() {
        return Err(Error::MissingDensity(m.name()));
    }
    let n = 4000;
    let (la, lb) = (a.ln(), b.ln());
    let mut c: f64 = 0.0;
    for k in 0..=n {
        let s = if k == n { b } else { (la + (lb - la) * k as f64 / n as f64).exp() };
        let nu = m.nu(s).unwrap_or(0.0);
        c = c.max(1.0 / (w.eval(s) * nu));
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct HTerms {
    h1: f64,
    h2: f64,
    h3: f64,
    residual: f64,
}

fn h_terms(m: &MonotoneMetric, rho: &DensityOperator, a: &CMat, channel: &QuantumChannel, t: f64) -> Result<HTerms> {
    rho.require_full_rank()?;
    let out = channel.apply_state(rho)?;
    out.require_full_rank()?;
    let fa = channel.apply(a)?;
    let inv = rho.support_function(|l| re(1.0 / l));
    let inv2 = rho.support_function(|l| re(1.0 / (l * l)));
    let out_inv2 = out.support_function(|l| re(1.0 / (l * l)));
    let h1 = (a.adjoint() * &inv * a).trace().re.max(0.0).sqrt();
    let h2a = (&inv2 * a.adjoint() * rho.matrix() * a).trace().re.max(0.0).sqrt();
    let h2b = (&out_inv2 * fa.adjoint() * out.matrix() * &fa).trace().re.max(0.0).sqrt();
    let gap = require_gap(metric_quadratic(m, rho, a)?, metric_quadratic(m, &out, &fa)?)?;
    let recovered = rotated_petz_map(rho, channel, t)?.apply(&fa)?;
    Ok(HTerms { h1, h2: 0.5 * (h2a + h2b), h3: gap.max(0.0).sqrt(), residual: trace_norm(&(a - recovered))? })
}

/// `‖A - R^t_{ρ,Φ}(Φ(A))‖₁ ≤ (cosh πt/π)(4√a h₁ + 4h₂/√b + √(C W_{a,b}) h₃)`.
#[allow(clippy::too_many_arguments)]
pub fn lemma_bound_check(
    m: &MonotoneMetric,
    rho: &DensityOperator,
    a_op: &CMat,
    channel: &QuantumChannel,
    t: f64,
    a: f64,
    b: f64,
    weight: Weight,
    constant: Constant,
) -> Result<BoundReport> {
    if !(a > 0.0 && a <= b && b.is_finite()) {
        return Err(Error::InvalidParameter(format!("need 0 < a <= b < inf, got ({a}, {b})")));
    }
    let required = tight_constant(m, weight, a, b)?;
    let c = match constant {
        Constant::Tight => required,
        Constant::Fixed(c) => c,
    };
    let w = weight.integral(a, b);
    let h = h_terms(m, rho, a_op, channel, t)?;
    let rhs = (PI * t).cosh() / PI * (4.0 * a.sqrt() * h.h1 + 4.0 / b.sqrt() * h.h2 + (c * w).sqrt() * h.h3);
    Ok(BoundReport::new("lemma_bound", h.residual, rhs, Orientation::LhsAtMostRhs, BOUND_TOL)
        .with("h1", h.h1)
        .with("h2", h.h2)
        .with("h3", h.h3)
        .with("W_ab", w)
        .with("C_ab", c)
        .with("C_required", required)
        .with("a", a)
        .with("b", b)
        .with("t", t))
}

fn corollary_base(h: &HTerms, t: f64) -> f64 {
    PI / (PI * t).cosh() * h.residual
}

/// BKM gap `≥ ((π/cosh πt)‖A - R^t(Φ(A))‖₁ / K(ρ,A,ε))^{4/(1-2ε)}`.
pub fn bkm_bound_check(rho: &DensityOperator, a: &CMat, channel: &QuantumChannel, t: f64, eps: f64) -> Result<BoundReport> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidParameter(format!("epsilon {eps} outside (0, 1/2)")));
    }
    let h = h_terms(&MonotoneMetric::Bkm, rho, a, channel, t)?;
    Ok(bkm_report(&h, t, eps))
}

fn bkm_report(h: &HTerms, t: f64, eps: f64) -> BoundReport {
    let k = 4.0 * h.h1 + 4.0 * h.h2 + 1.0 + (eps * E).powf(-0.5);
    let rhs = (corollary_base(h, t) / k).powf(4.0 / (1.0 - 2.0 * eps));
    BoundReport::new("bkm_bound", h.h3 * h.h3, rhs, Orientation::LhsAtLeastRhs, BOUND_TOL)
        .with("K", k)
        .with("epsilon", eps)
        .with("t", t)
        .with("residual", h.residual)
        .with("h1", h.h1)
        .with("h2", h.h2)
}

/// ε grid `0.05, 0.10, …, 0.45` for the supremum in the BKM bound.
pub fn epsilon_grid() -> Vec<f64> {
    (1..=9).map(|k| 0.05 * k as f64).collect()
}

/// [`bkm_bound_check`] at the maximizing ε of [`epsilon_grid`].
pub fn bkm_bound_check_sup(rho: &DensityOperator, a: &CMat, channel: &QuantumChannel, t: f64) -> Result<BoundReport> {
    let h = h_terms(&MonotoneMetric::Bkm, rho, a, channel, t)?;
    let best = epsilon_grid()
        .into_iter()
        .map(|e| bkm_report(&h, t, e))
        .fold(None::<BoundReport>, |acc, r| match acc {
            Some(b) if b.rhs >= r.rhs => Some(b),
            _ => Some(r),
        })
        .expect("nonempty grid");
    let mut best = best;
    best.check = "bkm_bound_sup".into();
    Ok(best)
}

/// α-metric gap `≥ ((π/cosh πt)‖A - R^t(Φ(A))‖₁ / K)^{2/α}`, `α ∈ (0, 1/2)`.
pub fn alpha_bound_check(rho: &DensityOperator, a: &CMat, channel: &QuantumChannel, t: f64, alpha: f64) -> Result<BoundReport> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::InvalidParameter(format!("alpha {alpha} outside (0, 1/2)")));
    }
    let h = h_terms(&MonotoneMetric::Alpha(alpha), rho, a, channel, t)?;
    let k = 4.0 * h.h1 + 4.0 * h.h2 + (PI / (alpha * (PI * alpha).sin())).sqrt();
    let rhs = (corollary_base(&h, t) / k).powf(2.0 / alpha);
    Ok(BoundReport::new("alpha_bound", h.h3 * h.h3, rhs, Orientation::LhsAtLeastRhs, BOUND_TOL)
        .with("K", k)
        .with("alpha", alpha)
        .with("t", t)
        .with("residual", h.residual))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sufficient,
    NotSufficient,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Sufficient => "SUFFICIENT",
            Verdict::NotSufficient => "NOT_SUFFICIENT",
        }
    }
}

/// `‖target - R^t_{reference,Φ}(Φ(target))‖₁` for one `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub label: String,
    pub t: f64,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct PairSufficiency {
    pub verdict: Verdict,
    pub metric: MonotoneMetric,
    pub gap: f64,
    pub tolerance: f64,
    pub derived_tolerance: f64,
    pub residuals: Vec<Residual>,
    /// Whether every residual is within the derived tolerance.
    pub recovered: bool,
    pub chi_half: BoundReport,
    /// `‖ρ - R_{σ,Φ}Φ(ρ)‖₁`, within `√(χ²_{1/2} gap)` by `chi_half`.
    pub certified_error: f64,
}

/// Rotation parameters tried by the sufficiency tests.
pub const PAIR_TS: [f64; 5] = [0.0, 1.0, -1.0, 2.0, -2.0];

pub fn pair_sufficiency_test(
    m: &MonotoneMetric,
    rho: &DensityOperator,
    sigma: &DensityOperator,
    channel: &QuantumChannel,
    tol: f64,
) -> Result<PairSufficiency> {
    if !m.is_regular() {
        return Err(Error::InvalidParameter(format!("{m} is not a regular metric")));
    }
    let gap = chi2_gap(m, rho, sigma, channel)?;
    let chi_half = chi_half_recovery_check(rho, sigma, channel)?;
    let derived = derived_tolerance(Some(chi_half.lhs));
    let verdict = if gap < tol { Verdict::Sufficient } else { Verdict::NotSufficient };
    let (frho, fsigma) = (channel.apply(rho.matrix())?, channel.apply(sigma.matrix())?);
    let mut residuals = Vec::new();
    for &t in &PAIR_TS {
        let r = rotated_petz_map(sigma, channel, t)?.apply(&frho)?;
        residuals.push(Residual { label: "rho".into(), t, residual: trace_norm(&(rho.matrix() - r))? });
        if rho.is_full_rank() {
            let r = rotated_petz_map(rho, channel, t)?.apply(&fsigma)?;
            residuals.push(Residual { label: "sigma".into(), t, residual: trace_norm(&(sigma.matrix() - r))? });
        }
    }
    let recovered = residuals.iter().all(|r| r.residual < derived);
    let certified_error = chi_half.component("residual").unwrap_or(f64::NAN);
    Ok(PairSufficiency { verdict, metric: *m, gap, tolerance: tol, derived_tolerance: derived, residuals, recovered, chi_half, certified_error })
}

#[derive(Clone, Debug)]
pub struct FamilySufficiency {
    pub verdict: Verdict,
    pub metric: MonotoneMetric,
    pub grid: Vec<f64>,
    pub gaps: Vec<f64>,
    pub anchor: f64,
    pub ts: Vec<f64>,
    /// `residuals[k][i]`: `t = ts[k]`, `θ = grid[i]`.
    pub residuals: Vec<Vec<f64>>,
    pub derived_tolerance: f64,
    pub recovered: bool,
}

impl FamilySufficiency {
    pub fn max_gap(&self) -> f64 {
        self.gaps.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().flatten().copied().fold(0.0, f64::max)
    }
}

/// QFI gaps on a grid and recovery of every grid state from the Petz maps
/// `R^t_{ρ_o,Φ}`, `t ∈ {0, 1}`, anchored at the interval midpoint.
pub fn family_sufficiency_test(
    m: &MonotoneMetric,
    fam: &StateFamily,
    channel: &QuantumChannel,
    grid: usize,
    tol: f64,
) -> Result<FamilySufficiency> {
    if !m.is_regular() {
        return Err(Error::InvalidParameter(format!("{m} is not a regular metric")));
    }
    let pushed = fam.pushforward(channel);
    let thetas = fam.grid(grid);
    let (lo, hi) = fam.interval();
    let anchor = 0.5 * (lo + hi);
    let reference = fam.state(anchor)?;
    reference.require_full_rank()?;
    let ts = alloc::vec![0.0, 1.0];
    let maps: Vec<QuantumChannel> = ts.iter().map(|&t| rotated_petz_map(&reference, channel, t)).collect::<Result<_>>()?;
    let mut gaps = Vec::with_capacity(thetas.len());
    let mut residuals = alloc::vec![Vec::with_capacity(thetas.len()); ts.len()];
    let mut worst_chi_half: f64 = 0.0;
    for &theta in &thetas {
        let rho = fam.state(theta)?;
        rho.require_full_rank()?;
        gaps.push(require_gap(qfi(m, fam, theta)?, qfi(m, &pushed, theta)?)?);
        let out = channel.apply(rho.matrix())?;
        for (k, map) in maps.iter().enumerate() {
            residuals[k].push(trace_norm(&(rho.matrix() - map.apply(&out)?))?);
        }
        worst_chi_half = worst_chi_half.max(chi2_gap(&MonotoneMetric::SymmetricInverse, &rho, &reference, channel)?);
    }
    let derived = derived_tolerance(Some(worst_chi_half));
    let max_gap = gaps.iter().copied().fold(0.0, f64::max);
    let verdict = if max_gap < tol { Verdict::Sufficient } else { Verdict::NotSufficient };
    let recovered = residuals.iter().flatten().all(|&r| r < derived);
    Ok(FamilySufficiency { verdict, metric: *m, grid: thetas, gaps, anchor, ts, residuals, derived_tolerance: derived, recovered })
}

#[derive(Clone, Debug)]
pub struct LogDerivative {
    pub direct: CMat,
    pub quadrature: CMat,
    pub residual: f64,
}

/// `d/dθ log ρ_θ` two ways: first divided differences of `log` in the
/// eigenbasis, and `∫ ρ^{-(1+it)/2} ρ̇ ρ^{-(1-it)/2} dβ(t)`.
pub fn log_derivative(fam: &StateFamily, theta: f64, quad: &BetaQuadrature) -> Result<LogDerivative> {
    let rho = fam.state(theta)?;
    rho.require_full_rank()?;
    let dot = fam.derivative(theta)?;
    let e = rho.eigensystem();
    let lam = e.values();
    let n = rho.dim();
    let at = e.to_eigenbasis(dot.matrix());
    let nodes = quad.validated_nodes()?;
    let mut direct = at.clone();
    let mut quadrature = at.clone();
    for j in 0..n {
        for i in 0..n {
            let (x, y) = (lam[i], lam[j]);
            let dd = if ((x - y) / x.max(y)).abs() < 1e-8 {
                2.0 / (x + y)
            } else {
                (x.ln() - y.ln()) / (x - y)
            };
            direct[(i, j)] *= dd;
            let phase = 0.5 * (x.ln() - y.ln());
            let k: Complex64 = nodes.iter().map(|&(t, w)| Complex64::new(0.0, -phase * t).exp() * w).sum();
            quadrature[(i, j)] *= k / (x * y).sqrt();
        }
    }
    let direct = e.from_eigenbasis(&direct);
    let quadrature = e.from_eigenbasis(&quadrature);
    let residual = frobenius_norm(&(&direct - &quadrature));
    Ok(LogDerivative { direct, quadrature, residual })
}

/// Both forms of the entropy-gap bound on one family.
#[derive(Clone, Debug)]
pub struct EntropyGapReport {
    /// Weight `e^{½ D_max(ρ_b‖ρ_θ)}` inside the integral.
    pub weighted: BoundReport,
    /// `λ^{-1/2}` in front, present when a floor was supplied and holds.
    pub floor: Option<BoundReport>,
    /// Relative change of the weighted integral between `n` and `(n+1)/2` points.
    pub richardson_change: f64,
}

/// `D(ρ_b‖ρ_a) - D(Φρ_b‖Φρ_a) ≤ ∫_a^b e^{½D_max(ρ_b‖ρ_θ)} √(I_BKM gap) dθ`
/// by the trapezoid rule on an odd `grid`, with the halved grid as error estimate.
pub fn entropy_gap_integral_check(
    fam: &StateFamily,
    channel: &QuantumChannel,
    grid: usize,
    lambda: Option<f64>,
) -> Result<EntropyGapReport> {
    if grid < 3 || grid.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("grid must be odd and at least 3, got {grid}")));
    }
    let pushed = fam.pushforward(channel);
    let thetas = fam.grid(grid);
    let (lo, hi) = fam.interval();
    let (rho_a, rho_b) = (fam.state(lo)?, fam.state(hi)?);
    let lhs = relative_entropy(&rho_b, &rho_a)? - relative_entropy(&channel.apply_state(&rho_b)?, &channel.apply_state(&rho_a)?)?;
    let mut root_gap = Vec::with_capacity(grid);
    let mut weighted = Vec::with_capacity(grid);
    let mut min_eig = f64::INFINITY;
    for &theta in &thetas {
        let rho = fam.state(theta)?;
        rho.require_full_rank()?;
        min_eig = min_eig.min(rho.min_eigenvalue());
        let before = qfi(&MonotoneMetric::Bkm, fam, theta)?;
        let g = require_gap(before, qfi(&MonotoneMetric::Bkm, &pushed, theta)?)?;
        let r = if g > GAP_NOISE_TOL * before.max(1.0) { g.sqrt() } else { 0.0 };
        root_gap.push(r);
        weighted.push((0.5 * dmax(&rho_b, &rho)?).exp() * r);
    }
    let half = |v: &[f64]| -> (Vec<f64>, Vec<f64>) {
        (thetas.iter().step_by(2).copied().collect(), v.iter().step_by(2).copied().collect())
    };
    let full = trapezoid(&thetas, &weighted);
    let (hx, hy) = half(&weighted);
    let coarse = trapezoid(&hx, &hy);
    let quad_err = (full - coarse).abs() / 3.0;
    let richardson_change = if full > 0.0 { (full - coarse).abs() / full } else { 0.0 };
    let report = BoundReport::new("entropy_gap_integral", lhs, full, Orientation::LhsAtMostRhs, BOUND_TOL + quad_err)
        .with("rhs_half_grid", coarse)
        .with("richardson_change", richardson_change)
        .with("min_eigenvalue", min_eig)
        .with("grid", grid as f64);
    let floor = match lambda {
        Some(l) if l > 0.0 && min_eig >= l => {
            let full = trapezoid(&thetas, &root_gap) / l.sqrt();
            let (hx, hy) = half(&root_gap);
            let coarse = trapezoid(&hx, &hy) / l.sqrt();
            let err = (full - coarse).abs() / 3.0;
            Some(
                BoundReport::new("entropy_gap_integral_floor", lhs, full, Orientation::LhsAtMostRhs, BOUND_TOL + err)
                    .with("lambda", l)
                    .with("rhs_half_grid", coarse),
            )
        }
        _ => None,
    };
    Ok(EntropyGapReport { weighted: report, floor, richardson_change })
}

/// `X ↦ U(X ⊗ τ)U*` with a Haar unitary `U` and a random full-rank ancilla
/// state `τ`; undone by `Y ↦ tr_anc(U*YU)`.
pub fn random_reversible_channel<R: Rng + ?Sized>(rng: &mut R, dim: usize, ancilla: usize) -> Result<QuantumChannel> {
    let tau = random::density(rng, ancilla, 0.2);
    let attach = QuantumChannel::append_ancilla(dim, &tau)?;
    let u = QuantumChannel::unitary(random::haar_unitary(rng, dim * ancilla))?;
    QuantumChannel::compose(&u, &attach)
}

/// `(ρ, A = σ - ρ)` style test input: a random full-rank state and a
/// traceless Hermitian direction.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> (DensityOperator, CMat) {
    let rho = random::density(rng, dim, 0.1);
    let a = symmetrize(&random::traceless_hermitian(rng, dim).into_matrix());
    (rho, a)
}
