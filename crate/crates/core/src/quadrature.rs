//! Quadrature rules.
//!
//! - [`gauss_legendre`] and [`composite_gauss_legendre`] for smooth integrands on intervals.
//! - [`BetaQuadrature`] for the probability measure `dβ(t) = π / (2(cosh πt + 1)) dt`.
//! - [`HalfLineRule`]: a double-exponential rule on `(0, ∞)` that tolerates
//!   integrable power singularities at both ends.
//! - [`adaptive_simpson`], [`trapezoid`] and [`periodic_average_nodes`].

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;


use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(node, weight)` pairs of `panels` equal Gauss–Legendre panels on `[a, b]`.
pub fn composite_gauss_legendre(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for k in 0..order {
            out.push((mid + 0.5 * h * x[k], 0.5 * h * w[k]));
        }
    }
    out
}

/// Density of the β measure.
pub fn beta_density(t: f64) -> f64 {
    PI / (2.0 * ((PI * t).cosh() + 1.0))
}

/// β mass of `[-T, T]`, which is `tanh(πT/2)`.
pub fn beta_mass(t_max: f64) -> f64 {
    (0.5 * PI * t_max).tanh()
}

/// Composite Gauss–Legendre discretization of `dβ` truncated to `|t| ≤ t_max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaQuadrature {
    pub t_max: f64,
    pub panels: usize,
    pub order: usize,
}

impl Default for BetaQuadrature {
    fn default() -> Self {
        Self { t_max: 12.0, panels: 16, order: 16 }
    }
}

impl BetaQuadrature {
    pub fn new(t_max: f64, panels: usize, order: usize) -> Self {
        Self { t_max, panels, order }
    }

    /// `(t, weight)` pairs; weights include the density.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        composite_gauss_legendre(-self.t_max, self.t_max, self.panels, self.order)
            .into_iter()
            .map(|(t, w)| (t, w * beta_density(t)))
            .collect()
    }

    pub fn weight_sum(&self) -> f64 {
        self.nodes().iter().map(|&(_, w)| w).sum()
    }

    /// Nodes after checking the weights sum to one within `1e-8`.
    pub fn validated_nodes(&self) -> Result<Vec<(f64, f64)>> {
        if self.panels == 0 || self.order == 0 || !(self.t_max > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!("degenerate quadrature {self:?}")));
        }
        let nodes = self.nodes();
        let sum: f64 = nodes.iter().map(|&(_, w)| w).sum();
        if (sum - 1.0).abs() > 1e-8 {
            return Err(Error::QuadratureNormalization(sum));
        }
        Ok(nodes)
    }
}

/// Tanh-sinh rule on `(0, ∞)`: `s = exp(π sinh τ)` on a uniform τ grid.
///
/// Equivalent to tanh-sinh in `u = s/(1+s) ∈ (0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfLineRule {
    pub step: f64,
    pub tau_max: f64,
}

impl Default for HalfLineRule {
    fn default() -> Self {
        Self { step: 0.05, tau_max: 5.0 }
    }
}

impl HalfLineRule {
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let n = (self.tau_max / self.step).round() as i64;
        (-n..=n)
            .map(|k| {
                let tau = k as f64 * self.step;
                let s = (PI * tau.sinh()).exp();
                (s, self.step * PI * tau.cosh() * s)
            })
            .filter(|&(s, w)| s > 0.0 && s.is_finite() && w.is_finite())
            .collect()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes().into_iter().map(|(s, w)| w * f(s)).sum()
    }
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Trapezoid rule on a (possibly nonuniform) grid.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2).zip(ys.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

/// Uniform nodes on `[0, period)` with weights `1/nodes`; exact averages
/// of trigonometric polynomials of degree below `nodes`.
pub fn periodic_average_nodes(period: f64, nodes: usize) -> Vec<(f64, f64)> {
    (0..nodes).map(|k| (period * k as f64 / nodes as f64, 1.0 / nodes as f64)).collect()
}

/// Gauss–Legendre nodes on `[0, length]` with weights normalized to average.
pub fn interval_average_nodes(length: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    composite_gauss_legendre(0.0, length, panels, order)
        .into_iter()
        .map(|(t, w)| (t, w / length))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gauss_legendre_exact_on_polynomials() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn beta_weights_normalized() {
        let q = BetaQuadrature::default();
        assert!((q.weight_sum() - 1.0).abs() < 1e-12);
        assert!(q.validated_nodes().is_ok());
        assert!((beta_mass(12.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coarse_beta_rule_is_rejected() {
        let q = BetaQuadrature::new(12.0, 1, 2);
        assert!(matches!(q.validated_nodes(), Err(Error::QuadratureNormalization(_))));
    }

    #[test]
    fn beta_mass_closed_form() {
        for &t in &[0.5, 1.0, 3.0] {
            let q = BetaQuadrature::new(t, 8, 16);
            assert!((q.weight_sum() - beta_mass(t)).abs() < 1e-14);
        }
    }

    #[test]
    fn half_line_reproduces_power_integrals() {
        // ∫_0^∞ s^{-a}/(s+x) ds = π x^{-a} / sin(πa)
        let rule = HalfLineRule::default();
        for &a in &[0.1, 0.25, 0.5, 0.75, 0.9] {
            for &x in &[1e-3, 0.3, 1.0, 7.0, 1e3] {
                let q = rule.integrate(|s| s.powf(-a) / (s + x));
                let exact = PI * x.powf(-a) / (PI * a).sin();
                assert!((q - exact).abs() < 1e-9 * exact, "a={a} x={x}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn simpson_and_trapezoid() {
        let v = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-13);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-12);
        let xs: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
        assert!((trapezoid(&xs, &ys) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn periodic_rule_exact_for_trig() {
        let nodes = periodic_average_nodes(2.0 * PI, 8);
        let avg: f64 = nodes.iter().map(|&(t, w)| w * (3.0 * t).cos().powi(2)).sum();
        assert!((avg - 0.5).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn beta_rule_integrates_smooth_functions(k in 0.0f64..2.0) {
            // ∫ cos(kt) dβ(t) = k / sinh(k)  (characteristic function of the β law)
            let q = BetaQuadrature::default();
            let v: f64 = q.nodes().iter().map(|&(t, w)| w * (k * t).cos()).sum();
            let exact = if k == 0.0 { 1.0 } else { k / k.sinh() };
            prop_assert!((v - exact).abs() < 1e-10);
        }
    }
}
