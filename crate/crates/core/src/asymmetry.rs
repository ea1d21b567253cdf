//! Asymmetry under time translations `t ↦ e^{-iHt}`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::channels::{averaged_petz, check_covariance, petz_map, superoperator_distance, twirl, AveragingRule, QuantumChannel};
use crate::error::{Error, Result};
use crate::metrics::{metric_quadratic, MonotoneMetric};
use crate::operators::{commutator, operator_norm, re, tensor, trace_norm, CMat, DensityOperator, HermitianOperator};
use crate::random;
use crate::recovery::{chi_half_recovery_check, BoundReport, Verdict};

/// Covariance tolerance for channels entering the monotonicity sweep.
pub const COVARIANCE_TOL: f64 = 1e-8;
/// Recovery and covariance tolerance of the averaged Petz map.
pub const RECOVERY_TOL: f64 = 1e-6;
/// Averaging lengths, in units of `1/‖H‖`, for incommensurate spectra.
pub const INCOMMENSURATE_LENGTHS: [f64; 3] = [10.0, 100.0, 1000.0];

/// Input and output Hamiltonians and, when both spectra sit on a common
/// lattice, the shared period.
#[derive(Clone, Debug)]
pub struct SymmetrySpec {
    pub h_in: HermitianOperator,
    pub h_out: HermitianOperator,
    pub period: Option<f64>,
}

fn lattice_spacing(values: &[f64]) -> Option<f64> {
    let base = values[0];
    let diffs: Vec<f64> = values.iter().map(|v| v - base).filter(|d| d.abs() > 1e-9).collect();
    if diffs.is_empty() {
        return Some(0.0);
    }
    let min = diffs.iter().fold(f64::INFINITY, |m, d| m.min(d.abs()));
    (1..=12u32).map(|q| min / q as f64).find(|&step| {
        diffs.iter().all(|d| {
            let r = d / step;
            (r - r.round()).abs() < 1e-9 * r.abs().max(1.0)
        })
    })
}

fn is_period(h: &HermitianOperator, period: f64) -> Result<bool> {
    let u = h.evolution(period)?;
    let phase = u[(0, 0)];
    Ok((phase.norm() - 1.0).abs() < 1e-10 && operator_norm(&(u - CMat::identity(h.dim(), h.dim()) * phase))? < 1e-10)
}

impl SymmetrySpec {
    /// Detects a common period from the joint spectrum.
    pub fn new(h_in: HermitianOperator, h_out: HermitianOperator) -> Result<Self> {
        let mut joint: Vec<f64> = h_in.eigensystem()?.values().to_vec();
        let out = h_out.eigensystem()?;
        // differences within each spectrum only matter, so align both minima
        let shift = out.values()[0] - joint[0];
        joint.extend(out.values().iter().map(|v| v - shift));
        let period = match lattice_spacing(&joint) {
            Some(step) if step > 0.0 => Some(2.0 * PI / step),
            Some(_) => Some(2.0 * PI),
            None => None,
        };
        let spec = Self { h_in, h_out, period };
        if let Some(p) = spec.period {
            if !is_period(&spec.h_in, p)? || !is_period(&spec.h_out, p)? {
                return Ok(Self { period: None, ..spec });
            }
        }
        Ok(spec)
    }

    pub fn with_period(h_in: HermitianOperator, h_out: HermitianOperator, period: f64) -> Result<Self> {
        if !(period > 0.0) || !is_period(&h_in, period)? || !is_period(&h_out, period)? {
            return Err(Error::InvalidParameter(format!("{period} is not a common period")));
        }
        Ok(Self { h_in, h_out, period: Some(period) })
    }

    pub fn symmetric(h: HermitianOperator) -> Result<Self> {
        Self::new(h.clone(), h)
    }

    pub fn covariance_residual(&self, channel: &QuantumChannel) -> Result<f64> {
        check_covariance(channel, &self.h_in, &self.h_out)
    }

    /// `max(‖H_in‖, ‖H_out‖)`, at least 1.
    pub fn energy_scale(&self) -> Result<f64> {
        Ok(operator_norm(self.h_in.matrix())?.max(operator_norm(self.h_out.matrix())?).max(1.0))
    }

    /// The averaging rule exact on one period: more nodes than the largest
    /// frequency of the twirled superoperator.
    fn periodic_rule(&self, period: f64) -> Result<AveragingRule> {
        let spread = |h: &HermitianOperator| -> Result<f64> {
            let e = h.eigensystem()?;
            Ok(e.values()[e.dim() - 1] - e.values()[0])
        };
        let max_freq = (spread(&self.h_in)? + spread(&self.h_out)?) * period / (2.0 * PI);
        Ok(AveragingRule::Periodic { nodes: (2.0 * max_freq.ceil() + 1.0).max(64.0) as usize })
    }
}

/// `I_H(ρ) = γ_ρ(i[H, ρ])`.
pub fn coherence_qfi(m: &MonotoneMetric, rho: &DensityOperator, h: &HermitianOperator) -> Result<f64> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: h.dim() });
    }
    let gen = commutator(h.matrix(), rho.matrix()) * Complex64::new(0.0, 1.0);
    metric_quadratic(m, rho, &gen)
}

/// `tr(ρH²) - tr(ρ^{1-α}Hρ^αH)` and `-½ tr([ρ^α, H][ρ^{1-α}, H])`.
pub fn wyd_skew_forms(rho: &DensityOperator, h: &HermitianOperator, alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha {alpha} outside (0, 1)")));
    }
    let (ra, rb) = (rho.support_power(re(alpha)), rho.support_power(re(1.0 - alpha)));
    let hm = h.matrix();
    let trace_form = (rho.matrix() * hm * hm).trace().re - (&rb * hm * &ra * hm).trace().re;
    let commutator_form = -0.5 * (commutator(&ra, hm) * commutator(&rb, hm)).trace().re;
    Ok((trace_form, commutator_form))
}

/// Wigner–Yanase–Dyson skew information `W_H^{(α)}(ρ)`.
pub fn wyd_skew(rho: &DensityOperator, h: &HermitianOperator, alpha: f64) -> Result<f64> {
    Ok(wyd_skew_forms(rho, h, alpha)?.1)
}

/// `coherence_qfi(WYD(α)) / wyd_skew`, which is `2/(α(1-α))`.
pub fn wyd_coherence_ratio(alpha: f64) -> f64 {
    2.0 / (alpha * (1.0 - alpha))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityEntry {
    pub seed: u64,
    pub input: f64,
    pub output: f64,
}

#[derive(Clone, Debug)]
pub struct MonotonicityReport {
    pub metric: MonotoneMetric,
    pub covariance_residual: f64,
    pub entries: Vec<MonotonicityEntry>,
}

impl MonotonicityReport {
    pub fn violations(&self) -> usize {
        self.entries.iter().filter(|e| e.output > e.input + 1e-9).count()
    }
}

/// `I_{H_out}(Φ(ρ)) ≤ I_{H_in}(ρ)` on one seeded full-rank state per seed.
pub fn coherence_monotonicity_sweep(
    m: &MonotoneMetric,
    channel: &QuantumChannel,
    spec: &SymmetrySpec,
    seeds: &[u64],
) -> Result<MonotonicityReport> {
    let residual = spec.covariance_residual(channel)?;
    if residual > COVARIANCE_TOL {
        return Err(Error::NotCovariant(residual));
    }
    let mut entries = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let rho = random::density(&mut random::rng(seed), channel.dim_in(), 0.05);
        let out = channel.apply_state(&rho)?;
        entries.push(MonotonicityEntry {
            seed,
            input: coherence_qfi(m, &rho, &spec.h_in)?,
            output: coherence_qfi(m, &out, &spec.h_out)?,
        });
    }
    Ok(MonotonicityReport { metric: *m, covariance_residual: residual, entries })
}

#[derive(Clone, Debug)]
pub struct CovariantRecovery {
    pub verdict: Verdict,
    pub metric: MonotoneMetric,
    pub input_coherence: f64,
    pub output_coherence: f64,
    pub gap: f64,
    /// Averaging length used for the recovery map.
    pub length: Option<f64>,
    /// `max_t ‖ρ_t - R_avg(Φ(ρ_t))‖₁` over the orbit grid.
    pub recovery_residual: Option<f64>,
    /// Covariance residual of the averaged Petz map.
    pub map_covariance_residual: Option<f64>,
    /// Distances between averaged maps at successive lengths (incommensurate case).
    pub cauchy: Vec<f64>,
    /// `χ²_{1/2}` check on the orbit pair `(ρ_t, ρ)` at the worst `t`.
    pub certificate: Option<BoundReport>,
}

impl CovariantRecovery {
    /// Reversible with a covariant recovery, or certified not reversible.
    pub fn consistent(&self) -> bool {
        match self.verdict {
            Verdict::Sufficient => {
                self.recovery_residual.is_some_and(|r| r < RECOVERY_TOL)
                    && self.map_covariance_residual.is_some_and(|r| r < RECOVERY_TOL)
            }
            Verdict::NotSufficient => {
                self.gap > 0.0
                    && self
                        .certificate
                        .as_ref()
                        .is_some_and(|c| c.satisfied && c.component("residual").is_some_and(|r| r > 0.0))
            }
        }
    }
}

const ORBIT_POINTS: usize = 16;

/// Equal coherence implies recovery by a covariant map: the Petz map of `ρ`
/// averaged over one period, or over growing lengths when no period exists.
/// Unequal coherence is reported with a certified recovery error on the orbit.
pub fn covariant_recovery_harness(
    m: &MonotoneMetric,
    rho: &DensityOperator,
    channel: &QuantumChannel,
    spec: &SymmetrySpec,
    tol: f64,
) -> Result<CovariantRecovery> {
    if !m.is_regular() {
        return Err(Error::InvalidParameter(format!("{m} is not a regular metric")));
    }
    rho.require_full_rank()?;
    let residual = spec.covariance_residual(channel)?;
    if residual > COVARIANCE_TOL {
        return Err(Error::NotCovariant(residual));
    }
    let input = coherence_qfi(m, rho, &spec.h_in)?;
    let output = coherence_qfi(m, &channel.apply_state(rho)?, &spec.h_out)?;
    let gap = input - output;
    let scale = spec.energy_scale()?;
    let orbit_length = spec.period.unwrap_or(2.0 * PI / scale);
    let orbit: Vec<f64> = (0..ORBIT_POINTS).map(|k| orbit_length * k as f64 / ORBIT_POINTS as f64).collect();
    let orbit_state = |t: f64| DensityOperator::new(spec.h_in.evolve(rho.matrix(), t)?);
    let mut report = CovariantRecovery {
        verdict: Verdict::NotSufficient,
        metric: *m,
        input_coherence: input,
        output_coherence: output,
        gap,
        length: None,
        recovery_residual: None,
        map_covariance_residual: None,
        cauchy: Vec::new(),
        certificate: None,
    };
    if gap.abs() < tol {
        report.verdict = Verdict::Sufficient;
        let map = match spec.period {
            Some(p) => {
                report.length = Some(p);
                averaged_petz(rho, channel, &spec.h_in, &spec.h_out, p, spec.periodic_rule(p)?)?.map
            }
            None => {
                let mut maps = Vec::new();
                for l in INCOMMENSURATE_LENGTHS {
                    let length = l / scale;
                    let panels = (length * 2.0 * scale / PI).ceil() as usize + 4;
                    let rule = AveragingRule::GaussLegendre { panels, order: 16 };
                    maps.push(averaged_petz(rho, channel, &spec.h_in, &spec.h_out, length, rule)?.map);
                    report.length = Some(length);
                }
                report.cauchy = maps.windows(2).map(|w| superoperator_distance(&w[0], &w[1])).collect();
                maps.pop().expect("nonempty")
            }
        };
        let mut worst: f64 = 0.0;
        for &t in &orbit {
            let state = orbit_state(t)?;
            let back = map.apply(&channel.apply(state.matrix())?)?;
            worst = worst.max(trace_norm(&(state.matrix() - back))?);
        }
        report.recovery_residual = Some(worst);
        report.map_covariance_residual = Some(check_covariance(&map, &spec.h_out, &spec.h_in)?);
    } else {
        let petz = petz_map(rho, channel)?;
        let mut best: Option<(f64, f64)> = None;
        for &t in &orbit[1..] {
            let state = orbit_state(t)?;
            let back = petz.apply(&channel.apply(state.matrix())?)?;
            let r = trace_norm(&(state.matrix() - back))?;
            if best.is_none_or(|(_, b)| r > b) {
                best = Some((t, r));
            }
        }
        if let Some((t, _)) = best {
            report.certificate = Some(chi_half_recovery_check(&orbit_state(t)?, rho, channel)?.with("t", t));
        }
    }
    Ok(report)
}

/// `e^{-iHs}` as a channel.
pub fn time_evolution_channel(h: &HermitianOperator, s: f64) -> Result<QuantumChannel> {
    QuantumChannel::unitary(h.evolution(s)?)
}

/// Haar-random unitary acting independently on each eigenspace of `h`
/// (eigenvalues closer than `1e-9` are merged); it commutes with `h`.
pub fn block_diagonal_unitary<R: Rng + ?Sized>(rng: &mut R, h: &HermitianOperator) -> Result<CMat> {
    let e = h.eigensystem()?;
    let n = h.dim();
    let mut blocks = CMat::zeros(n, n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (e.values()[end] - e.values()[start]).abs() < 1e-9 {
            end += 1;
        }
        let u = random::haar_unitary(rng, end - start);
        blocks.view_mut((start, start), (end - start, end - start)).copy_from(&u);
        start = end;
    }
    Ok(e.from_eigenbasis(&blocks))
}

/// `X ↦ U(X ⊗ τ)U*` with `τ` commuting with `h_anc` and `U` commuting with
/// `H_tot = h ⊗ I + I ⊗ h_anc`. Covariant from `h` to `H_tot` and reversible.
pub fn covariant_isometry_channel<R: Rng + ?Sized>(
    rng: &mut R,
    h: &HermitianOperator,
    h_anc: &HermitianOperator,
) -> Result<(QuantumChannel, SymmetrySpec)> {
    let e = h_anc.eigensystem()?;
    let p = random::probability_vector(rng, h_anc.dim(), 0.1);
    let tau = DensityOperator::new(e.from_eigenbasis(&CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        p.len(),
        p.iter().map(|&x| re(x)),
    ))))?;
    let (da, db) = (h.dim(), h_anc.dim());
    let total = HermitianOperator::new(
        tensor(h.matrix(), &CMat::identity(db, db)) + tensor(&CMat::identity(da, da), h_anc.matrix()),
    )?;
    let attach = QuantumChannel::append_ancilla(da, &tau)?;
    let u = QuantumChannel::unitary(block_diagonal_unitary(rng, &total)?)?;
    let channel = QuantumChannel::compose(&u, &attach)?;
    let spec = SymmetrySpec::new(h.clone(), total)?;
    Ok((channel, spec))
}

/// A random channel twirled over the common period of `spec`.
pub fn random_covariant_channel<R: Rng + ?Sized>(rng: &mut R, spec: &SymmetrySpec, kraus: usize) -> Result<QuantumChannel> {
    let period = spec.period.ok_or_else(|| Error::InvalidParameter("spectra have no common period".into()))?;
    let raw = QuantumChannel::random_with(rng, spec.h_in.dim(), spec.h_out.dim(), kraus)?;
    twirl(&raw, &spec.h_in, &spec.h_out, period, spec.periodic_rule(period)?)
}
