//! Run configuration: a JSON file merged with command-line flags.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use qfig_core::families::{make_counterexample_family, make_unitary_orbit, random_family, Counterexample, EpsilonChoice, ScalarFunction, StateFamily};
use qfig_core::random::SeededRng;
use qfig_core::{DensityOperator, HermitianOperator, MonotoneMetric, QuantumChannel};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{read_json, ChannelJson, OperatorJson};

/// Largest Hilbert-space dimension accepted for random sweeps.
pub const MAX_DIM: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Counterexample,
    DpiSweep,
    PairSufficiency,
    FamilySufficiency,
    Bounds,
    Asymmetry,
    QuadratureAudit,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Counterexample => "counterexample",
            Command::DpiSweep => "dpi-sweep",
            Command::PairSufficiency => "pair-sufficiency",
            Command::FamilySufficiency => "family-sufficiency",
            Command::Bounds => "bounds",
            Command::Asymmetry => "asymmetry",
            Command::QuadratureAudit => "quadrature-audit",
        }
    }

    fn default_trials(&self) -> usize {
        match self {
            Command::Counterexample => 1,
            Command::DpiSweep => 200,
            Command::Bounds => 100,
            Command::Asymmetry => 10,
            Command::PairSufficiency | Command::FamilySufficiency | Command::QuadratureAudit => 20,
        }
    }

    fn default_grid(&self) -> usize {
        match self {
            Command::Counterexample | Command::FamilySufficiency => 101,
            _ => 21,
        }
    }

    /// Commands whose checks are only defined for regular metrics.
    pub fn needs_regular(&self) -> bool {
        !matches!(self, Command::Counterexample | Command::DpiSweep)
    }
}

/// Family specification, tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    Counterexample {
        #[serde(default = "default_p")]
        p: String,
        #[serde(default = "default_interval")]
        interval: (f64, f64),
        #[serde(default = "default_epsilon")]
        epsilon: String,
    },
    UnitaryOrbit {
        rho: OperatorJson,
        #[serde(rename = "H")]
        h: OperatorJson,
    },
    Random {
        dim: usize,
        #[serde(default = "default_delta")]
        delta: f64,
    },
}

fn default_p() -> String {
    "affine:0.25,0.25".into()
}

fn default_interval() -> (f64, f64) {
    (0.0, 1.0)
}

fn default_epsilon() -> String {
    "auto:0.9".into()
}

fn default_delta() -> f64 {
    0.1
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec::Counterexample { p: default_p(), interval: default_interval(), epsilon: default_epsilon() }
    }
}

fn number(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::config(format!("invalid number `{s}` in {what}")))
}

/// `affine:<intercept>,<slope>`.
pub fn parse_scalar_function(s: &str) -> Result<ScalarFunction> {
    let bad = || Error::config(format!("unknown function `{s}`, expected affine:<intercept>,<slope>"));
    let (head, args) = s.split_once(':').ok_or_else(bad)?;
    if head.trim() != "affine" {
        return Err(bad());
    }
    let (a, b) = args.split_once(',').ok_or_else(bad)?;
    Ok(ScalarFunction::affine(number(a, s)?, number(b, s)?))
}

/// `auto:<fraction>`, `fixed:<value>` or a bare number.
pub fn parse_epsilon(s: &str) -> Result<EpsilonChoice> {
    match s.split_once(':') {
        Some(("auto", f)) => Ok(EpsilonChoice::Auto(number(f, s)?)),
        Some(("fixed", v)) => Ok(EpsilonChoice::Fixed(number(v, s)?)),
        None => Ok(EpsilonChoice::Fixed(number(s, "epsilon")?)),
        _ => Err(Error::config(format!("unknown epsilon `{s}`, expected auto:<f> or fixed:<v>"))),
    }
}

/// Metric names in the `sld | rld | bkm | sym-inv | alpha:<α> | wyd:<α>` grammar.
pub fn parse_metrics<S: AsRef<str>>(names: &[S]) -> Result<Vec<MonotoneMetric>> {
    if names.is_empty() {
        return Err(Error::config("metric list is empty"));
    }
    names.iter().map(|n| Ok(n.as_ref().parse::<MonotoneMetric>()?)).collect()
}

impl FamilySpec {
    pub fn counterexample(&self) -> Result<Counterexample> {
        match self {
            FamilySpec::Counterexample { p, interval, epsilon } => {
                Ok(make_counterexample_family(parse_scalar_function(p)?, *interval, parse_epsilon(epsilon)?)?)
            }
            _ => Err(Error::config("the counterexample command needs a family of kind `counterexample`")),
        }
    }

    pub fn build(&self, rng: &mut SeededRng) -> Result<StateFamily> {
        match self {
            FamilySpec::Counterexample { .. } => Ok(self.counterexample()?.family),
            FamilySpec::UnitaryOrbit { rho, h } => Ok(make_unitary_orbit(&rho.to_density()?, &h.to_hermitian()?)?),
            FamilySpec::Random { dim, delta } => {
                check_dim(*dim)?;
                Ok(random_family(rng, *dim, *delta))
            }
        }
    }
}

/// Fields accepted in a `--config` file. Every field is optional and
/// command-line flags take precedence.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<Command>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub dims: Option<Vec<usize>>,
    pub metrics: Option<Vec<String>>,
    pub tol: Option<f64>,
    pub grid: Option<usize>,
    pub out: Option<PathBuf>,
    pub family: Option<FamilySpec>,
    pub rho: Option<OperatorJson>,
    pub sigma: Option<OperatorJson>,
    pub channel: Option<ChannelJson>,
    #[serde(rename = "H")]
    pub hamiltonian: Option<OperatorJson>,
    #[serde(rename = "H_out")]
    pub hamiltonian_out: Option<OperatorJson>,
    pub ts: Option<Vec<f64>>,
    pub alphas: Option<Vec<f64>>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        read_json(path).map_err(|e| match e {
            Error::Json(e) => Error::config(format!("{}: {e}", path.display())),
            Error::Io { path, source } => Error::config(format!("{}: {source}", path.display())),
            other => other,
        })
    }
}

/// Command-line overrides.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub dims: Option<Vec<usize>>,
    pub metrics: Option<Vec<String>>,
    pub tol: Option<f64>,
    pub grid: Option<usize>,
    pub out: Option<PathBuf>,
}

/// A validated run. Every field is resolved, so runners never see defaults.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub trials: usize,
    pub dims: Vec<usize>,
    pub metrics: Vec<MonotoneMetric>,
    pub tol: f64,
    pub grid: usize,
    pub out: Option<PathBuf>,
    pub family: Option<FamilySpec>,
    pub rho: Option<DensityOperator>,
    pub sigma: Option<DensityOperator>,
    pub channel: Option<QuantumChannel>,
    pub hamiltonian: Option<HermitianOperator>,
    pub hamiltonian_out: Option<HermitianOperator>,
    pub ts: Vec<f64>,
    pub alphas: Vec<f64>,
}

fn check_dim(d: usize) -> Result<()> {
    if !(2..=MAX_DIM).contains(&d) {
        return Err(Error::config(format!("dimension {d} outside 2..={MAX_DIM}")));
    }
    Ok(())
}

impl RunConfig {
    pub fn resolve(command: Command, file: ConfigFile, flags: Overrides) -> Result<Self> {
        if let Some(c) = file.command {
            if c != command {
                return Err(Error::config(format!("config is for `{}`, not `{}`", c.name(), command.name())));
            }
        }
        let trials = flags.trials.or(file.trials).unwrap_or(command.default_trials());
        if trials == 0 {
            return Err(Error::config("trial count must be positive"));
        }
        let dims = flags.dims.or(file.dims).unwrap_or_else(|| vec![2, 3, 4]);
        if dims.is_empty() {
            return Err(Error::config("dimension list is empty"));
        }
        dims.iter().try_for_each(|&d| check_dim(d))?;
        let metrics = match flags.metrics.or(file.metrics) {
            Some(names) => parse_metrics(&names)?,
            None if command.needs_regular() => MonotoneMetric::regular_builtins(),
            None => MonotoneMetric::builtins(),
        };
        if command.needs_regular() {
            if let Some(m) = metrics.iter().find(|m| !m.is_regular()) {
                return Err(Error::config(format!("`{}` needs regular metrics; `{m}` is not", command.name())));
            }
        }
        let tol = flags.tol.or(file.tol).unwrap_or(1e-8);
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::config(format!("tolerance must be positive, got {tol}")));
        }
        let grid = flags.grid.or(file.grid).unwrap_or(command.default_grid());
        if grid < 3 {
            return Err(Error::config(format!("grid must have at least 3 points, got {grid}")));
        }
        let ts = file.ts.unwrap_or_else(|| vec![0.0, 1.0]);
        let alphas = file.alphas.unwrap_or_else(|| vec![0.1, 0.25, 0.4]);
        if let Some(a) = alphas.iter().find(|a| !(**a > 0.0 && **a < 0.5)) {
            return Err(Error::config(format!("alpha {a} outside (0, 1/2)")));
        }
        let density = |o: Option<OperatorJson>| o.map(|o| o.to_density()).transpose();
        let hermitian = |o: Option<OperatorJson>| o.map(|o| o.to_hermitian()).transpose();
        let bad = |e: Error| match e {
            Error::Core(e) => Error::config(e.to_string()),
            e => e,
        };
        Ok(RunConfig {
            command,
            seed: flags.seed.or(file.seed).unwrap_or(0),
            trials,
            dims,
            metrics,
            tol,
            grid,
            out: flags.out.or(file.out),
            family: file.family,
            rho: density(file.rho).map_err(bad)?,
            sigma: density(file.sigma).map_err(bad)?,
            channel: file.channel.map(|c| c.to_channel()).transpose().map_err(bad)?,
            hamiltonian: hermitian(file.hamiltonian).map_err(bad)?,
            hamiltonian_out: hermitian(file.hamiltonian_out).map_err(bad)?,
            ts,
            alphas,
        })
    }

    pub fn metric_names(&self) -> Vec<String> {
        self.metrics.iter().map(|m| m.name()).collect()
    }
}
