//! Run configuration: command-line flags layered over an optional
//! `key=value` file, then defaults.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use qthermo::bath::{BathParams, SeriesControl};
use qthermo::state::ProbeLayout;
use qthermo::strategies::{self, Family};

use crate::output::Cell;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    Single,
    Bell,
    Ghz,
    W,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyKind {
    Parallel,
    Ancilla,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVar {
    /// QFI against time
    T,
    /// QFI against the number of channel uses (parallel GHZ or W)
    #[value(name = "N")]
    N,
}

macro_rules! value_name {
    ($ty:ty) => {
        impl $ty {
            fn name(self) -> String {
                self.to_possible_value().expect("no skipped variants").get_name().to_string()
            }
        }
    };
}
value_name!(StateKind);
value_name!(StrategyKind);
value_name!(Format);
value_name!(SweepVar);

/// Flags shared by every subcommand. Anything left unset falls back to the
/// config file, then to the built-in default.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Read key=value settings from this file (flags take precedence)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// System-bath coupling λ
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Squeezing strength r
    #[arg(long, global = true)]
    pub r: Option<f64>,
    /// Squeezing phase offset δθ
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub dtheta: Option<f64>,
    /// Ohmic cutoff Ω_c
    #[arg(long = "omega-c", global = true)]
    pub omega_c: Option<f64>,
    /// Bath temperature T
    #[arg(long, global = true)]
    pub temp: Option<f64>,

    /// First time of the grid
    #[arg(long = "t-start", global = true)]
    pub t_start: Option<f64>,
    /// Last time of the grid
    #[arg(long = "t-end", global = true)]
    pub t_end: Option<f64>,
    /// Number of grid points
    #[arg(long = "t-steps", global = true)]
    pub t_steps: Option<usize>,
    /// Space the time grid logarithmically
    #[arg(long = "t-log", global = true, num_args = 0..=1, default_missing_value = "true")]
    pub t_log: Option<bool>,
    /// Single evaluation time (overrides the grid)
    #[arg(long, global = true)]
    pub t: Option<f64>,
    /// Read times in units of 1/Ω_c
    #[arg(long = "t-scaled", global = true, num_args = 0..=1, default_missing_value = "true")]
    pub t_scaled: Option<bool>,

    /// Thermal series truncation index
    #[arg(long = "n-max", global = true)]
    pub n_max: Option<u32>,
    /// Early-stop tolerance for the thermal series (0 disables)
    #[arg(long = "rel-tol", global = true)]
    pub rel_tol: Option<f64>,
    /// Fail with exit code 3 when the series has not met --rel-tol
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub strict: Option<bool>,

    /// Probe state family
    #[arg(long, value_enum, global = true)]
    pub state: Option<StateKind>,
    /// Polar angle of the single-qubit probe
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta0: Option<f64>,
    /// Azimuthal angle of the single-qubit probe
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub phi0: Option<f64>,
    /// Total number of qubits
    #[arg(long = "N", global = true)]
    pub n_total: Option<usize>,
    /// Number of noisy qubits (ancilla strategy)
    #[arg(long = "n", global = true)]
    pub n_noisy: Option<usize>,
    /// Parallel (all qubits noisy) or ancilla (last n noisy)
    #[arg(long, value_enum, global = true)]
    pub strategy: Option<StrategyKind>,

    #[arg(long, value_enum, global = true)]
    pub sweep: Option<SweepVar>,
    /// Smallest N of an N sweep
    #[arg(long = "N-start", global = true)]
    pub n_start: Option<usize>,
    /// Largest N of an N sweep
    #[arg(long = "N-end", global = true)]
    pub n_end: Option<usize>,

    /// Decay factor Γ supplied directly (opt-n)
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Comma-separated squeezing strengths (opt-n)
    #[arg(long = "r-values", global = true, value_delimiter = ',')]
    pub r_values: Option<Vec<f64>>,

    /// Number of random states (search)
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    /// Master RNG seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output format
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Add a qfi / max-over-sweep column
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub normalize: Option<bool>,
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub bath: BathParams,
    pub series: SeriesControl,
    pub t_start: f64,
    pub t_end: f64,
    pub t_steps: usize,
    pub t_log: bool,
    pub t: Option<f64>,
    pub t_scaled: bool,
    pub state: StateKind,
    pub theta0: f64,
    pub phi0: f64,
    pub n_total: usize,
    pub n_noisy: usize,
    pub strategy: StrategyKind,
    pub sweep: SweepVar,
    pub n_start: usize,
    pub n_end: usize,
    pub gamma: Option<f64>,
    pub r_values: Option<Vec<f64>>,
    pub samples: u64,
    pub seed: u64,
    pub format: Format,
    pub normalize: bool,
    pub out: Option<PathBuf>,
}

fn parse_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::input(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
        let key = k.trim().trim_start_matches("--").to_string();
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(CliError::input(format!("{}:{}: duplicate key {key}", path.display(), i + 1)));
        }
    }
    Ok(map)
}

struct FileValues(BTreeMap<String, String>);

impl FileValues {
    fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, CliError> {
        match self.0.remove(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::input(format!("config key {key}: cannot parse {v:?}"))),
        }
    }

    fn take_enum<T: ValueEnum>(&mut self, key: &str) -> Result<Option<T>, CliError> {
        match self.0.remove(key) {
            None => Ok(None),
            Some(v) => T::from_str(&v, false)
                .map(Some)
                .map_err(|_| CliError::input(format!("config key {key}: unknown value {v:?}"))),
        }
    }

    fn take_list(&mut self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        match self.0.remove(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|s| s.trim().parse().map_err(|_| CliError::input(format!("config key {key}: cannot parse {s:?}"))))
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
        }
    }
}

impl CommonArgs {
    /// Fills unset flags from the config file, if one was given.
    fn merge_file(mut self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let mut f = FileValues(parse_file(&path)?);
        macro_rules! fill {
            ($field:ident, $key:literal) => {
                if self.$field.is_none() {
                    self.$field = f.take($key)?;
                } else {
                    f.0.remove($key);
                }
            };
            (enum $field:ident, $key:literal) => {
                if self.$field.is_none() {
                    self.$field = f.take_enum($key)?;
                } else {
                    f.0.remove($key);
                }
            };
        }
        fill!(lambda, "lambda");
        fill!(r, "r");
        fill!(dtheta, "dtheta");
        fill!(omega_c, "omega-c");
        fill!(temp, "temp");
        fill!(t_start, "t-start");
        fill!(t_end, "t-end");
        fill!(t_steps, "t-steps");
        fill!(t_log, "t-log");
        fill!(t, "t");
        fill!(t_scaled, "t-scaled");
        fill!(n_max, "n-max");
        fill!(rel_tol, "rel-tol");
        fill!(strict, "strict");
        fill!(enum state, "state");
        fill!(theta0, "theta0");
        fill!(phi0, "phi0");
        fill!(n_total, "N");
        fill!(n_noisy, "n");
        fill!(enum strategy, "strategy");
        fill!(enum sweep, "sweep");
        fill!(n_start, "N-start");
        fill!(n_end, "N-end");
        fill!(gamma, "gamma");
        fill!(samples, "samples");
        fill!(seed, "seed");
        fill!(enum format, "format");
        fill!(normalize, "normalize");
        if self.r_values.is_none() {
            self.r_values = f.take_list("r-values")?;
        } else {
            f.0.remove("r-values");
        }
        if self.out.is_none() {
            self.out = f.take::<PathBuf>("out")?;
        } else {
            f.0.remove("out");
        }
        if let Some(key) = f.0.keys().next() {
            return Err(CliError::input(format!("unknown config key {key:?} in {}", path.display())));
        }
        Ok(self)
    }

    pub fn resolve(self) -> Result<RunConfig, CliError> {
        let a = self.merge_file()?;
        let bath = BathParams::new(
            a.lambda.unwrap_or(0.4),
            a.r.unwrap_or(0.5),
            a.dtheta.unwrap_or(0.9),
            a.omega_c.unwrap_or(1.0),
            a.temp.unwrap_or(100.0),
        )?;
        let series = SeriesControl {
            n_max: a.n_max.unwrap_or(1000),
            rel_tol: a.rel_tol.unwrap_or(0.0),
            report_tail: a.strict.unwrap_or(false),
        };
        series.validate()?;
        let state = a.state.unwrap_or(StateKind::Single);
        let default_total = match state {
            StateKind::Single => 1,
            StateKind::Bell => 2,
            _ => 3,
        };
        let n_total = a.n_total.unwrap_or(default_total);
        let strategy = a.strategy.unwrap_or(if a.n_noisy.is_some_and(|n| n < n_total) {
            StrategyKind::Ancilla
        } else {
            StrategyKind::Parallel
        });
        let n_noisy = match strategy {
            StrategyKind::Parallel => {
                if a.n_noisy.is_some_and(|n| n != n_total) {
                    return Err(CliError::input("--n must equal --N for the parallel strategy".into()));
                }
                n_total
            }
            StrategyKind::Ancilla => a.n_noisy.unwrap_or(1),
        };
        Ok(RunConfig {
            bath,
            series,
            t_start: a.t_start.unwrap_or(1e-4),
            t_end: a.t_end.unwrap_or(0.1),
            t_steps: a.t_steps.unwrap_or(50),
            t_log: a.t_log.unwrap_or(false),
            t: a.t,
            t_scaled: a.t_scaled.unwrap_or(false),
            state,
            theta0: a.theta0.unwrap_or(FRAC_PI_2),
            phi0: a.phi0.unwrap_or(0.0),
            n_total,
            n_noisy,
            strategy,
            sweep: a.sweep.unwrap_or(SweepVar::T),
            n_start: a.n_start.unwrap_or(3),
            n_end: a.n_end.unwrap_or(12),
            gamma: a.gamma,
            r_values: a.r_values,
            samples: a.samples.unwrap_or(1000),
            seed: a.seed.unwrap_or(42),
            format: a.format.unwrap_or(Format::Csv),
            normalize: a.normalize.unwrap_or(false),
            out: a.out,
        })
    }
}

impl RunConfig {
    fn time_unit(&self) -> f64 {
        if self.t_scaled {
            1.0 / self.bath.omega_c
        } else {
            1.0
        }
    }

    /// Time grid in raw units. Every value must be > 0.
    pub fn time_grid(&self) -> Result<Vec<f64>, CliError> {
        let unit = self.time_unit();
        let grid = match self.t {
            Some(t) => vec![t * unit],
            None if self.t_log => strategies::log_grid(self.t_start * unit, self.t_end * unit, self.t_steps)?,
            None => strategies::linear_grid(self.t_start * unit, self.t_end * unit, self.t_steps)?,
        };
        if let Some(bad) = grid.iter().find(|&&t| !(t > 0.0)) {
            return Err(CliError::input(format!(
                "times must be > 0 (got t = {bad}); closed forms need Γ > 0"
            )));
        }
        Ok(grid)
    }

    /// The single evaluation time required by point commands.
    pub fn single_time(&self) -> Result<f64, CliError> {
        let t = self.t.ok_or_else(|| CliError::input("this command needs --t".into()))? * self.time_unit();
        if !(t > 0.0) {
            return Err(CliError::input(format!("t must be > 0, got {t}")));
        }
        Ok(t)
    }

    pub fn layout(&self) -> Result<ProbeLayout, CliError> {
        Ok(ProbeLayout::ancilla(self.n_total, self.n_noisy)?)
    }

    pub fn family(&self) -> Family {
        match self.state {
            StateKind::Single => Family::Single {
                theta0: self.theta0,
                phi0: self.phi0,
            },
            StateKind::Bell => Family::Bell,
            StateKind::Ghz => Family::Ghz,
            StateKind::W => Family::W,
            StateKind::Random => Family::Random { seed: self.seed },
        }
    }

    /// Resolved settings echoed into every output header. The output path is
    /// left out so that the same run written to two places is identical.
    pub fn echo(&self) -> Vec<(&'static str, Cell)> {
        let mut v = vec![
            ("lambda", Cell::Num(self.bath.lambda)),
            ("r", Cell::Num(self.bath.r)),
            ("dtheta", Cell::Num(self.bath.delta_theta)),
            ("omega-c", Cell::Num(self.bath.omega_c)),
            ("temp", Cell::Num(self.bath.temp)),
        ];
        match self.t {
            Some(t) => v.push(("t", Cell::Num(t))),
            None => {
                v.push(("t-start", Cell::Num(self.t_start)));
                v.push(("t-end", Cell::Num(self.t_end)));
                v.push(("t-steps", Cell::Int(self.t_steps as i64)));
                v.push(("t-log", Cell::Bool(self.t_log)));
            }
        }
        v.extend([
            ("t-scaled", Cell::Bool(self.t_scaled)),
            ("n-max", Cell::Int(self.series.n_max as i64)),
            ("rel-tol", Cell::Num(self.series.rel_tol)),
            ("strict", Cell::Bool(self.series.report_tail)),
            ("state", Cell::Text(self.state.name())),
            ("theta0", Cell::Num(self.theta0)),
            ("phi0", Cell::Num(self.phi0)),
            ("N", Cell::Int(self.n_total as i64)),
            ("n", Cell::Int(self.n_noisy as i64)),
            ("strategy", Cell::Text(self.strategy.name())),
            ("sweep", Cell::Text(self.sweep.name())),
            ("N-start", Cell::Int(self.n_start as i64)),
            ("N-end", Cell::Int(self.n_end as i64)),
        ]);
        if let Some(g) = self.gamma {
            v.push(("gamma", Cell::Num(g)));
        }
        if let Some(rs) = &self.r_values {
            v.push(("r-values", Cell::Text(rs.iter().map(|&r| crate::output::fmt_f64(r)).collect::<Vec<_>>().join(","))));
        }
        v.extend([
            ("samples", Cell::Int(self.samples as i64)),
            ("seed", Cell::Int(self.seed as i64)),
            ("format", Cell::Text(self.format.name())),
            ("normalize", Cell::Bool(self.normalize)),
        ]);
        v
    }
}
