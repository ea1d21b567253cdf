//! Experiment runners, one per command.

use std::collections::BTreeMap;

use qfig_core::asymmetry::{
    coherence_monotonicity_sweep, covariant_isometry_channel, covariant_recovery_harness, random_covariant_channel,
    time_evolution_channel, SymmetrySpec,
};
use qfig_core::channels::{contraction_operator, universal_recovery_apply, universal_recovery_apply_nodes};
use qfig_core::divergences::{chi2, relative_entropy};
use qfig_core::families::{counterexample_verify, qfi, qfi_matrix, random_family, random_multi_family, StateFamily};
use qfig_core::metrics::{metric_eval_integral, metric_quadratic};
use qfig_core::operators::{symmetrize, trace_norm};
use qfig_core::quadrature::{BetaQuadrature, HalfLineRule};
use qfig_core::random::{self, SeededRng};
use qfig_core::recovery::{
    alpha_bound_check, bkm_bound_check_sup, chi_half_recovery_check, entropy_gap_integral_check,
    family_sufficiency_test, lemma_bound_check, log_derivative, pair_sufficiency_test, random_instance,
    random_reversible_channel, Constant, Orientation, Verdict, Weight, BOUND_TOL,
};
use qfig_core::{BoundReport, DensityOperator, HermitianOperator, MonotoneMetric, QuantumChannel};
use rayon::prelude::*;

use crate::config::{Command, RunConfig};
use crate::error::{Error, Result};
use crate::report::{Report, Row, Table};

/// Relative slack for data-processing comparisons.
pub const DPI_TOL: f64 = 1e-9;
/// Lemma window `[a, b]` on the representing measure.
pub const LEMMA_WINDOW: (f64, f64) = (1e-3, 1e3);
pub const LOG_DERIVATIVE_TOL: f64 = 1e-6;
pub const RICHARDSON_TOL: f64 = 0.01;
pub const REFERENCE_RECOVERY_TOL: f64 = 1e-8;
pub const INTEGRAL_TOL: f64 = 1e-6;
pub const WYD_INTEGRAL_TOL: f64 = 1e-4;

type CoreResult<T> = qfig_core::Result<T>;

pub fn run(cfg: &RunConfig) -> Result<Report> {
    let (rows, tables) = match cfg.command {
        Command::Counterexample => counterexample(cfg)?,
        Command::DpiSweep => (dpi_sweep(cfg), BTreeMap::new()),
        Command::PairSufficiency => (pair_sufficiency(cfg)?, BTreeMap::new()),
        Command::FamilySufficiency => (family_sufficiency(cfg)?, BTreeMap::new()),
        Command::Bounds => (bounds(cfg), BTreeMap::new()),
        Command::Asymmetry => (asymmetry(cfg)?, BTreeMap::new()),
        Command::QuadratureAudit => (quadrature_audit(cfg), BTreeMap::new()),
    };
    Ok(Report::new(cfg, rows, tables))
}

/// Independent generator for instance `i` of a run seeded with `seed`.
pub fn instance_rng(seed: u64, i: usize) -> SeededRng {
    random::rng(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64))
}

/// Runs `f` on every instance in parallel and concatenates the rows in
/// instance order. An instance that fails becomes one failed row.
fn sweep<F>(cfg: &RunConfig, trials: usize, f: F) -> Vec<Row>
where
    F: Fn(usize, &mut SeededRng) -> CoreResult<Vec<Row>> + Sync,
{
    let per_instance: Vec<Vec<Row>> = (0..trials)
        .into_par_iter()
        .map(|i| f(i, &mut instance_rng(cfg.seed, i)).unwrap_or_else(|e| vec![Row::failed(i, cfg.command.name(), e)]))
        .collect();
    per_instance.into_iter().flatten().collect()
}

/// Evaluates one check, turning an error into a failed row.
fn attempt(i: usize, check: &str, f: impl FnOnce() -> CoreResult<Row>) -> Row {
    f().unwrap_or_else(|e| Row::failed(i, check, e))
}

fn bound(i: usize, check: &str, lhs: f64, rhs: f64, orientation: Orientation, tol: f64) -> Row {
    Row::from_bound(i, &BoundReport::new(check, lhs, rhs, orientation, tol))
}

fn dpi_row(i: usize, check: String, before: f64, after: f64) -> Row {
    let mut r = BoundReport::new(check, before, after, Orientation::LhsAtLeastRhs, DPI_TOL * before.abs().max(1.0));
    if before == f64::INFINITY {
        r.satisfied = true;
    }
    Row::from_bound(i, &r)
}

/// `(d_in, d_out, kraus)` with `kraus · d_out ≥ d_in`, cycling through `dims`.
fn channel_shape(cfg: &RunConfig, i: usize) -> (usize, usize, usize) {
    let n = cfg.dims.len();
    let (din, dout) = (cfg.dims[i % n], cfg.dims[(i / n) % n]);
    let k = 1 + (i / (n * n)) % 3;
    (din, dout, k.max(din.div_ceil(dout)))
}

fn random_channel(rng: &mut SeededRng, din: usize, dout: usize, k: usize) -> CoreResult<QuantumChannel> {
    QuantumChannel::random_with(rng, din, dout, k)
}

fn pinching_qubit() -> CoreResult<QuantumChannel> {
    QuantumChannel::pinching(&HermitianOperator::from_real_diagonal(&[0.0, 1.0]))
}

fn counterexample(cfg: &RunConfig) -> Result<(Vec<Row>, BTreeMap<String, Table>)> {
    let ce = cfg.family.clone().unwrap_or_default().counterexample()?;
    let rep = counterexample_verify(&ce, cfg.grid)?;
    let tol = cfg.tol;
    let mut rows = vec![
        bound(0, "counterexample_sld_preserved", rep.max_abs_sld_gap(), tol, Orientation::LhsAtMostRhs, 0.0)
            .with("epsilon", ce.epsilon)
            .with("epsilon_bound", ce.epsilon_bound),
        bound(0, "counterexample_rld_gap", rep.min_interior_rld_gap(), tol, Orientation::LhsAtLeastRhs, 0.0),
        bound(0, "counterexample_bkm_gap", rep.min_bkm_gap(), tol, Orientation::LhsAtLeastRhs, 0.0),
    ];
    for (&t, worst) in rep.ts.iter().zip(rep.worst_residual_per_t()) {
        rows.push(
            bound(0, "counterexample_recovery_residual", worst, tol, Orientation::LhsAtLeastRhs, 0.0)
                .with("t", t)
                .with("anchor", rep.anchor),
        );
    }
    rows.push(bound(0, "counterexample_sld_equation", rep.max_sld_equation_residual, 0.0, Orientation::LhsAtMostRhs, 1e-8));
    let mut columns: Vec<String> = ["theta", "sld_gap", "rld_gap", "bkm_gap", "commutator_norm"].map(String::from).into();
    columns.extend(rep.ts.iter().map(|t| format!("residual_t{t}")));
    let table_rows = (0..rep.grid.len())
        .map(|j| {
            let mut r = vec![rep.grid[j], rep.sld_gap[j], rep.rld_gap[j], rep.bkm_gap[j], rep.commutator_norm[j]];
            r.extend(rep.recovery_residual.iter().map(|per_t| per_t[j]));
            r
        })
        .collect();
    let tables = BTreeMap::from([("grid".to_string(), Table { columns, rows: table_rows })]);
    Ok((rows, tables))
}

fn dpi_sweep(cfg: &RunConfig) -> Vec<Row> {
    sweep(cfg, cfg.trials, |i, rng| {
        let (din, dout, k) = channel_shape(cfg, i);
        let c = random_channel(rng, din, dout, k)?;
        let rho = random::density(rng, din, 0.05);
        let sigma = random::density(rng, din, 0.05);
        let a = symmetrize(&random::traceless_hermitian(rng, din).into_matrix());
        let fam = random_family(rng, din, 0.1);
        let multi = random_multi_family(rng, din, 2, 0.1);
        let (frho, fsigma, fa) = (c.apply_state(&rho)?, c.apply_state(&sigma)?, c.apply(&a)?);
        let (pushed, mpushed) = (fam.pushforward(&c), multi.pushforward(&c));
        let shape = |r: Row| r.with("dim_in", din as f64).with("dim_out", dout as f64).with("kraus", k as f64);
        let mut rows = vec![shape(dpi_row(
            i,
            "dpi_relative_entropy".into(),
            relative_entropy(&rho, &sigma)?,
            relative_entropy(&frho, &fsigma)?,
        ))];
        let (theta, point) = (0.3, [0.1, -0.2]);
        for m in &cfg.metrics {
            let checks = [
                ("dpi_metric", metric_quadratic(m, &rho, &a)?, metric_quadratic(m, &frho, &fa)?),
                ("dpi_chi2", chi2(m, &rho, &sigma)?, chi2(m, &frho, &fsigma)?),
                ("dpi_qfi", qfi(m, &fam, theta)?, qfi(m, &pushed, theta)?),
            ];
            for (name, before, after) in checks {
                rows.push(shape(dpi_row(i, format!("{name}:{m}"), before, after)));
            }
            let diff = qfi_matrix(m, &multi, &point)? - qfi_matrix(m, &mpushed, &point)?;
            let min = diff.clone().symmetric_eigenvalues().min();
            let tol = DPI_TOL * diff.norm().max(1.0);
            rows.push(shape(bound(i, &format!("dpi_qfi_matrix:{m}"), min, 0.0, Orientation::LhsAtLeastRhs, tol)));
        }
        Ok(rows)
    })
}

/// Generated instances alternate between reversible channels (expected
/// sufficient) and generic degrading channels (expected not sufficient).
fn expected_verdict(i: usize) -> Verdict {
    if i.is_multiple_of(2) {
        Verdict::Sufficient
    } else {
        Verdict::NotSufficient
    }
}

fn generated_channel(rng: &mut SeededRng, dim: usize, verdict: Verdict) -> CoreResult<QuantumChannel> {
    match verdict {
        Verdict::Sufficient => random_reversible_channel(rng, dim, 2),
        Verdict::NotSufficient => random_channel(rng, dim, dim, 2),
    }
}

fn pair_rows(
    cfg: &RunConfig,
    i: usize,
    rho: &DensityOperator,
    sigma: &DensityOperator,
    c: &QuantumChannel,
    expected: Option<Verdict>,
) -> CoreResult<Vec<Row>> {
    let mut rows = vec![attempt(i, "chi_half_recovery", || Ok(Row::from_bound(i, &chi_half_recovery_check(rho, sigma, c)?)))];
    for m in &cfg.metrics {
        let check = format!("pair_sufficiency:{m}");
        rows.push(attempt(i, &check, || {
            let p = pair_sufficiency_test(m, rho, sigma, c, cfg.tol)?;
            let worst = p.residuals.iter().map(|r| r.residual).fold(0.0, f64::max);
            let consistent = match p.verdict {
                Verdict::Sufficient => p.recovered,
                Verdict::NotSufficient => p.chi_half.satisfied,
            };
            Ok(bound(i, &check, worst, p.derived_tolerance, Orientation::LhsAtMostRhs, 0.0)
                .require(consistent && expected.is_none_or(|e| e == p.verdict))
                .with_verdict(p.verdict.as_str())
                .with("gap", p.gap)
                .with("certified_error", p.certified_error))
        }));
    }
    Ok(rows)
}

fn pair_sufficiency(cfg: &RunConfig) -> Result<Vec<Row>> {
    match (&cfg.rho, &cfg.sigma, &cfg.channel) {
        (Some(rho), Some(sigma), Some(c)) => Ok(pair_rows(cfg, 0, rho, sigma, c, None)?),
        (None, None, None) => Ok(sweep(cfg, cfg.trials, |i, rng| {
            let d = cfg.dims[i % cfg.dims.len()];
            let expected = expected_verdict(i);
            let c = generated_channel(rng, d, expected)?;
            let rho = random::density(rng, d, 0.05);
            let sigma = random::density(rng, d, 0.05);
            pair_rows(cfg, i, &rho, &sigma, &c, Some(expected))
        })),
        _ => Err(Error::config("pair-sufficiency needs all of rho, sigma and channel, or none")),
    }
}

fn odd(n: usize) -> usize {
    n | 1
}

fn family_rows(
    cfg: &RunConfig,
    i: usize,
    fam: &StateFamily,
    c: &QuantumChannel,
    expected: Option<Verdict>,
) -> CoreResult<Vec<Row>> {
    let mut rows = Vec::new();
    for m in &cfg.metrics {
        let check = format!("family_sufficiency:{m}");
        rows.push(attempt(i, &check, || {
            let f = family_sufficiency_test(m, fam, c, cfg.grid, cfg.tol)?;
            let consistent = f.verdict == Verdict::NotSufficient || f.recovered;
            Ok(bound(i, &check, f.max_residual(), f.derived_tolerance, Orientation::LhsAtMostRhs, 0.0)
                .require(consistent && expected.is_none_or(|e| e == f.verdict))
                .with_verdict(f.verdict.as_str())
                .with("max_gap", f.max_gap())
                .with("anchor", f.anchor))
        }));
    }
    let (lo, hi) = fam.interval();
    let anchor = 0.5 * (lo + hi);
    rows.push(attempt(i, "log_derivative", || {
        let l = log_derivative(fam, anchor, &BetaQuadrature::default())?;
        Ok(bound(i, "log_derivative", l.residual, LOG_DERIVATIVE_TOL, Orientation::LhsAtMostRhs, 0.0).with("theta", anchor))
    }));
    let grid = odd(cfg.grid);
    match (|| {
        let lambda = fam.grid(grid).into_iter().try_fold(f64::INFINITY, |m, t| Ok(m.min(fam.state(t)?.min_eigenvalue())))?;
        entropy_gap_integral_check(fam, c, grid, Some(lambda))
    })() {
        Ok(rep) => {
            rows.push(Row::from_bound(i, &rep.weighted));
            rows.extend(rep.floor.iter().map(|f| Row::from_bound(i, f)));
            rows.push(bound(i, "entropy_gap_richardson", rep.richardson_change, RICHARDSON_TOL, Orientation::LhsAtMostRhs, 0.0));
        }
        Err(e) => rows.push(Row::failed(i, "entropy_gap_integral", e)),
    }
    Ok(rows)
}

fn family_sufficiency(cfg: &RunConfig) -> Result<Vec<Row>> {
    use crate::config::FamilySpec;
    match (&cfg.family, &cfg.channel) {
        (Some(spec @ FamilySpec::Random { .. }), channel) => Ok(sweep(cfg, cfg.trials, |i, rng| {
            let fam = spec.build(rng).map_err(core_error)?;
            let d = fam.state(fam.interval().0)?.dim();
            let (c, expected) = match channel {
                Some(c) => (c.clone(), None),
                None => (generated_channel(rng, d, expected_verdict(i))?, Some(expected_verdict(i))),
            };
            family_rows(cfg, i, &fam, &c, expected)
        })),
        (Some(spec), channel) => {
            let fam = spec.build(&mut instance_rng(cfg.seed, 0))?;
            let c = match (spec, channel) {
                (_, Some(c)) => c.clone(),
                (FamilySpec::Counterexample { .. }, None) => pinching_qubit()?,
                _ => return Err(Error::config("a unitary-orbit family needs a channel")),
            };
            Ok(family_rows(cfg, 0, &fam, &c, None)?)
        }
        (None, channel) => Ok(sweep(cfg, cfg.trials, |i, rng| {
            let d = cfg.dims[i % cfg.dims.len()];
            let fam = random_family(rng, d, 0.1);
            let (c, expected) = match channel {
                Some(c) => (c.clone(), None),
                None => (generated_channel(rng, d, expected_verdict(i))?, Some(expected_verdict(i))),
            };
            family_rows(cfg, i, &fam, &c, expected)
        })),
    }
}

fn core_error(e: Error) -> qfig_core::Error {
    match e {
        Error::Core(e) => e,
        other => qfig_core::Error::InvalidParameter(other.to_string()),
    }
}

fn bounds(cfg: &RunConfig) -> Vec<Row> {
    let (a, b) = LEMMA_WINDOW;
    sweep(cfg, cfg.trials, |i, rng| {
        let (din, dout, k) = channel_shape(cfg, i);
        let (rho, op) = random_instance(rng, din);
        let c = random_channel(rng, din, dout, k + 1)?;
        let sigma = random::density(rng, din, 0.05);
        let mut rows = vec![attempt(i, "chi_half_recovery", || Ok(Row::from_bound(i, &chi_half_recovery_check(&rho, &sigma, &c)?)))];
        for &t in &cfg.ts {
            rows.push(attempt(i, "contraction", || {
                let v = contraction_operator(&rho, &c, t)?;
                Ok(bound(i, "contraction_isometry", v.contraction_violation()?, 0.0, Orientation::LhsAtMostRhs, BOUND_TOL).with("t", t))
            }));
            rows.push(attempt(i, "contraction", || {
                let v = contraction_operator(&rho, &c, t)?;
                Ok(bound(i, "contraction_modular", v.modular_violation()?, 0.0, Orientation::LhsAtMostRhs, BOUND_TOL).with("t", t))
            }));
            for m in &cfg.metrics {
                let check = format!("lemma_bound:{m}");
                rows.push(attempt(i, &check, || {
                    let r = lemma_bound_check(m, &rho, &op, &c, t, a, b, Weight::default_for(m), Constant::Tight)?;
                    Ok(Row::from_bound(i, &r).renamed(check.clone()))
                }));
            }
            rows.push(attempt(i, "bkm_bound", || Ok(Row::from_bound(i, &bkm_bound_check_sup(&rho, &op, &c, t)?))));
            for &alpha in &cfg.alphas {
                rows.push(attempt(i, "alpha_bound", || Ok(Row::from_bound(i, &alpha_bound_check(&rho, &op, &c, t, alpha)?))));
            }
        }
        Ok(rows)
    })
}

/// Channel kinds cycled through by generated asymmetry instances.
fn asymmetry_instance(
    rng: &mut SeededRng,
    i: usize,
    spec: &SymmetrySpec,
) -> CoreResult<(QuantumChannel, SymmetrySpec, Verdict)> {
    let h = &spec.h_in;
    Ok(match i % 4 {
        0 => (time_evolution_channel(h, 0.37 * (i + 1) as f64)?, spec.clone(), Verdict::Sufficient),
        1 => {
            let (c, s) = covariant_isometry_channel(rng, h, &HermitianOperator::from_real_diagonal(&[0.0, 1.0]))?;
            (c, s, Verdict::Sufficient)
        }
        2 => (random_covariant_channel(rng, spec, 2)?, spec.clone(), Verdict::NotSufficient),
        _ => (QuantumChannel::pinching(h)?, spec.clone(), Verdict::NotSufficient),
    })
}

fn asymmetry_rows(
    cfg: &RunConfig,
    i: usize,
    rho: &DensityOperator,
    c: &QuantumChannel,
    spec: &SymmetrySpec,
    expected: Option<Verdict>,
) -> CoreResult<Vec<Row>> {
    let mut rows = Vec::new();
    let seeds: Vec<u64> = (0..4).map(|k| cfg.seed.wrapping_add((i * 4 + k) as u64)).collect();
    for m in &cfg.metrics {
        let check = format!("covariant_recovery:{m}");
        rows.push(attempt(i, &check, || {
            let r = covariant_recovery_harness(m, rho, c, spec, cfg.tol)?;
            let scale = DPI_TOL * r.input_coherence.abs().max(1.0);
            let mut row = bound(i, &check, r.input_coherence, r.output_coherence, Orientation::LhsAtLeastRhs, scale)
                .require(r.consistent() && expected.is_none_or(|e| e == r.verdict))
                .with_verdict(r.verdict.as_str())
                .with("gap", r.gap);
            for (name, v) in [("length", r.length), ("recovery_residual", r.recovery_residual), ("map_covariance_residual", r.map_covariance_residual)] {
                if let Some(v) = v {
                    row = row.with(name, v);
                }
            }
            if let Some(cert) = r.certificate.as_ref().and_then(|c| c.component("residual")) {
                row = row.with("certified_error", cert);
            }
            for (k, d) in r.cauchy.iter().enumerate() {
                row = row.with(&format!("cauchy_{k}"), *d);
            }
            Ok(row)
        }));
        let check = format!("coherence_monotonicity:{m}");
        match coherence_monotonicity_sweep(m, c, spec, &seeds) {
            Ok(rep) => rows.extend(rep.entries.iter().map(|e| {
                dpi_row(i, check.clone(), e.input, e.output).with("seed", e.seed as f64)
            })),
            Err(e) => rows.push(Row::failed(i, &check, e)),
        }
    }
    Ok(rows)
}

fn asymmetry(cfg: &RunConfig) -> Result<Vec<Row>> {
    let h = cfg.hamiltonian.clone().unwrap_or_else(|| HermitianOperator::from_real_diagonal(&[0.0, 1.0, 2.0]));
    match (&cfg.rho, &cfg.channel) {
        (Some(rho), Some(c)) => {
            let h_out = cfg.hamiltonian_out.clone().unwrap_or_else(|| h.clone());
            let spec = SymmetrySpec::new(h, h_out)?;
            Ok(asymmetry_rows(cfg, 0, rho, c, &spec, None)?)
        }
        (None, None) => {
            if cfg.hamiltonian_out.is_some() {
                return Err(Error::config("H_out is only used with a configured channel"));
            }
            let spec = SymmetrySpec::symmetric(h)?;
            Ok(sweep(cfg, cfg.trials, |i, rng| {
                let rho = random::density(rng, spec.h_in.dim(), 0.05);
                let (c, s, expected) = asymmetry_instance(rng, i, &spec)?;
                asymmetry_rows(cfg, i, &rho, &c, &s, Some(expected))
            }))
        }
        _ => Err(Error::config("asymmetry needs both rho and channel, or neither")),
    }
}

/// Quadrature levels `(panels, order)` of the refinement check, and the reference.
pub const REFINEMENT_LEVELS: [(usize, usize); 5] = [(1, 2), (2, 4), (4, 8), (8, 12), (16, 16)];
const REFINEMENT_REFERENCE: (usize, usize) = (32, 16);
const REFINEMENT_FLOOR: f64 = 1e-13;

fn quadrature_audit(cfg: &RunConfig) -> Vec<Row> {
    let q = BetaQuadrature::default();
    let rule = HalfLineRule::default();
    let mut rows = vec![bound(0, "beta_weight_sum", (q.weight_sum() - 1.0).abs(), 0.0, Orientation::LhsAtMostRhs, REFERENCE_RECOVERY_TOL)];
    rows.extend(sweep(cfg, cfg.trials, |i, rng| {
        let (din, dout, k) = channel_shape(cfg, i);
        let sigma = random::density(rng, din, 0.05);
        let c = random_channel(rng, din, dout, k + 1)?;
        let image = c.apply(sigma.matrix())?;
        let back = universal_recovery_apply(&sigma, &c, &image, &q)?;
        let mut rows = vec![bound(
            i,
            "universal_reference_recovery",
            trace_norm(&(back - sigma.matrix()))?,
            0.0,
            Orientation::LhsAtMostRhs,
            REFERENCE_RECOVERY_TOL,
        )];
        let x = c.apply(random::density(rng, din, 0.0).matrix())?;
        let (rp, ro) = REFINEMENT_REFERENCE;
        let reference = universal_recovery_apply_nodes(&sigma, &c, &x, &BetaQuadrature::new(12.0, rp, ro).nodes())?;
        let errors = REFINEMENT_LEVELS
            .iter()
            .map(|&(p, n)| {
                let y = universal_recovery_apply_nodes(&sigma, &c, &x, &BetaQuadrature::new(12.0, p, n).nodes())?;
                trace_norm(&(y - &reference))
            })
            .collect::<CoreResult<Vec<f64>>>()?;
        let increase = errors.windows(2).map(|w| w[1] - w[0].max(REFINEMENT_FLOOR)).fold(f64::NEG_INFINITY, f64::max);
        let mut row = bound(i, "universal_refinement", increase, 0.0, Orientation::LhsAtMostRhs, 0.0);
        for (k, e) in errors.iter().enumerate() {
            row = row.with(&format!("error_{k}"), *e);
        }
        rows.push(row);
        let (rho, a) = random_instance(rng, din);
        for m in &cfg.metrics {
            let check = format!("integral_vs_spectral:{m}");
            rows.push(attempt(i, &check, || {
                let s = metric_quadratic(m, &rho, &a)?;
                let rel = (metric_eval_integral(m, &rho, &a, &rule)? - s).abs() / s;
                let tol = if matches!(m, MonotoneMetric::Wyd(_)) { WYD_INTEGRAL_TOL } else { INTEGRAL_TOL };
                Ok(bound(i, &check, rel, tol, Orientation::LhsAtMostRhs, 0.0))
            }));
        }
        let fam = random_family(rng, din, 0.1);
        rows.push(attempt(i, "log_derivative", || {
            let l = log_derivative(&fam, 0.0, &q)?;
            Ok(bound(i, "log_derivative", l.residual, LOG_DERIVATIVE_TOL, Orientation::LhsAtMostRhs, 0.0))
        }));
        Ok(rows)
    }));
    rows
}
