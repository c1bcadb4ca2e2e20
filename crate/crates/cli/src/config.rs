//! Run configuration: built-in defaults, `key = value` config files and
//! command-line flags, in increasing order of precedence.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;

use qbd_core::physics::constants;
use qbd_core::sweep::{DEFAULT_PHI_MAX, DEFAULT_PHI_MIN, DEFAULT_STEPS};
use qbd_core::trajectory::RNG_ALGORITHM;
use qbd_core::{ArrivalModel, PhaseSweepSpec, PhysicalParams, TrajectoryConfig, DEFAULT_N_MAX};

use crate::CliError;

/// Environment variable naming a default config file.
pub const CONFIG_ENV: &str = "QBD_SIM_CONFIG";

/// Config keys, identical to the long flags without the leading dashes.
pub const KEYS: &[&str] = &[
    "frequency-hz",
    "q-factor",
    "temperature-k",
    "atom-rate",
    "phi",
    "n-max",
    "phi-min",
    "phi-max",
    "steps",
    "duration-s",
    "seed",
    "arrival",
    "initial-n",
    "record-stride",
    "output",
    "format",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Stationary photon-number distribution at one phase.
    Steady,
    /// Stationary ⟨n⟩ and Fano factor over a grid of phases.
    Sweep,
    /// Monte-Carlo detection record with the observer filter.
    Trajectory,
    /// Outcome probabilities of a single atom for n = 0..n_max.
    Passage,
}

impl Command {
    pub fn parse(s: &str) -> Option<Self> {
        <Self as ValueEnum>::from_str(s, false).ok()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Steady => "steady",
            Command::Sweep => "sweep",
            Command::Trajectory => "trajectory",
            Command::Passage => "passage",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    CsvSvg,
}

impl OutputFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::CsvSvg => "csv+svg",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "csv+svg" => Ok(OutputFormat::CsvSvg),
            _ => Err("expected csv or csv+svg".into()),
        }
    }
}

/// Fully resolved configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub frequency_hz: f64,
    pub q_factor: f64,
    pub temperature_k: f64,
    pub atom_rate: f64,
    pub phi: f64,
    pub n_max: usize,
    pub phi_min: f64,
    pub phi_max: f64,
    pub steps: usize,
    pub duration_s: f64,
    pub seed: u64,
    pub arrival: ArrivalModel,
    pub initial_n: usize,
    pub record_stride: usize,
    /// `None` writes to standard output.
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        Self {
            command,
            frequency_hz: constants::CAVITY_FREQUENCY_HZ,
            q_factor: constants::CAVITY_Q_FACTOR,
            temperature_k: constants::BATH_TEMPERATURE_K,
            atom_rate: constants::ATOM_RATE,
            phi: std::f64::consts::FRAC_PI_2,
            n_max: DEFAULT_N_MAX,
            phi_min: DEFAULT_PHI_MIN,
            phi_max: DEFAULT_PHI_MAX,
            steps: DEFAULT_STEPS,
            duration_s: 10.0,
            seed: 0,
            arrival: ArrivalModel::Poisson,
            initial_n: 0,
            record_stride: 1,
            output: None,
            format: OutputFormat::Csv,
        }
    }

    /// Sets one key from its text form. Errors name the offending token.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        match key {
            "frequency-hz" => self.frequency_hz = parse_number(key, value)?,
            "q-factor" => self.q_factor = parse_number(key, value)?,
            "temperature-k" => self.temperature_k = parse_number(key, value)?,
            "atom-rate" => self.atom_rate = parse_number(key, value)?,
            "phi" => self.phi = parse_number(key, value)?,
            "n-max" => self.n_max = parse_number(key, value)?,
            "phi-min" => self.phi_min = parse_number(key, value)?,
            "phi-max" => self.phi_max = parse_number(key, value)?,
            "steps" => self.steps = parse_number(key, value)?,
            "duration-s" => self.duration_s = parse_number(key, value)?,
            "seed" => self.seed = parse_number(key, value)?,
            "initial-n" => self.initial_n = parse_number(key, value)?,
            "record-stride" => self.record_stride = parse_number(key, value)?,
            "arrival" => {
                self.arrival = value
                    .parse()
                    .map_err(|_| usage(key, value, "expected poisson or regular"))?
            }
            "output" => {
                self.output = match value {
                    "" | "-" => None,
                    path => Some(PathBuf::from(path)),
                }
            }
            "format" => self.format = value.parse().map_err(|e: String| usage(key, value, &e))?,
            _ => return Err(CliError::Usage(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_config_text(&mut self, text: &str) -> Result<(), CliError> {
        for (index, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "config line {}: expected `key = value`, got `{}`",
                    index + 1,
                    raw.trim()
                )));
            };
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn params(&self) -> PhysicalParams {
        PhysicalParams {
            frequency: self.frequency_hz,
            q_factor: self.q_factor,
            temperature: self.temperature_k,
            atom_rate: self.atom_rate,
            phase: self.phi,
        }
    }

    pub fn sweep_spec(&self) -> PhaseSweepSpec {
        PhaseSweepSpec {
            params: self.params(),
            phi_min: self.phi_min,
            phi_max: self.phi_max,
            steps: self.steps,
            n_max: self.n_max,
        }
    }

    pub fn trajectory_config(&self) -> TrajectoryConfig {
        TrajectoryConfig {
            params: self.params(),
            n_max: self.n_max,
            duration: self.duration_s,
            seed: self.seed,
            arrival_model: self.arrival,
            initial_n: self.initial_n,
            record_stride: self.record_stride,
        }
    }

    /// Checks every value against the physical and numerical invariants.
    pub fn validate(&self) -> Result<(), CliError> {
        let positive = [
            ("frequency-hz", self.frequency_hz),
            ("q-factor", self.q_factor),
            ("duration-s", self.duration_s),
        ];
        for (key, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(usage(key, &value.to_string(), "must be > 0"));
            }
        }
        let non_negative = [
            ("temperature-k", self.temperature_k),
            ("atom-rate", self.atom_rate),
            ("phi", self.phi),
            ("phi-min", self.phi_min),
        ];
        for (key, value) in non_negative {
            if !(value.is_finite() && value >= 0.0) {
                return Err(usage(key, &value.to_string(), "must be >= 0"));
            }
        }
        if !(self.phi_max.is_finite() && self.phi_max > self.phi_min) {
            return Err(usage("phi-max", &self.phi_max.to_string(), "must exceed phi-min"));
        }
        if self.n_max < 2 {
            return Err(usage("n-max", &self.n_max.to_string(), "must be >= 2"));
        }
        if self.steps < 2 {
            return Err(usage("steps", &self.steps.to_string(), "must be >= 2"));
        }
        if self.initial_n >= self.n_max {
            return Err(usage("initial-n", &self.initial_n.to_string(), "must be below n-max"));
        }
        if self.record_stride == 0 {
            return Err(usage("record-stride", "0", "must be >= 1"));
        }
        if self.format == OutputFormat::CsvSvg && self.output.is_none() {
            return Err(CliError::Usage(
                "--format csv+svg needs --output <file> to place the plot".into(),
            ));
        }
        self.params()
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))
    }

    /// Comment header echoing the resolved configuration. Feeding these
    /// lines back through [`RunConfig::from_header`] gives the same config.
    pub fn header_lines(&self) -> Vec<String> {
        let output = self
            .output
            .as_deref()
            .map_or_else(|| "-".to_string(), |p| p.display().to_string());
        vec![
            format!(
                "qbd-sim {} rng {RNG_ALGORITHM}",
                env!("CARGO_PKG_VERSION")
            ),
            format!("command = {}", self.command.as_str()),
            format!("frequency-hz = {}", self.frequency_hz),
            format!("q-factor = {}", self.q_factor),
            format!("temperature-k = {}", self.temperature_k),
            format!("atom-rate = {}", self.atom_rate),
            format!("phi = {}", self.phi),
            format!("n-max = {}", self.n_max),
            format!("phi-min = {}", self.phi_min),
            format!("phi-max = {}", self.phi_max),
            format!("steps = {}", self.steps),
            format!("duration-s = {}", self.duration_s),
            format!("seed = {}", self.seed),
            format!("arrival = {}", self.arrival.as_str()),
            format!("initial-n = {}", self.initial_n),
            format!("record-stride = {}", self.record_stride),
            format!("output = {output}"),
            format!("format = {}", self.format.as_str()),
        ]
    }

    /// Rebuilds a config from the leading `#` comment block of an output
    /// file.
    pub fn from_header(text: &str) -> Result<Self, CliError> {
        let mut command = None;
        let mut body = String::new();
        for line in text.lines() {
            let Some(comment) = line.strip_prefix('#') else {
                break;
            };
            let Some((key, value)) = comment.split_once('=') else {
                continue;
            };
            if key.trim() == "command" {
                command = Some(
                    Command::parse(value.trim())
                        .ok_or_else(|| usage("command", value.trim(), "unknown command"))?,
                );
            } else {
                body.push_str(comment);
                body.push('\n');
            }
        }
        let command =
            command.ok_or_else(|| CliError::Usage("header has no `command` line".into()))?;
        let mut config = Self::defaults(command);
        config.apply_config_text(&body)?;
        Ok(config)
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.header_lines() {
            writeln!(f, "# {line}")?;
        }
        Ok(())
    }
}

/// Path of the SVG written next to a CSV output.
pub fn svg_path(output: &Path) -> PathBuf {
    output.with_extension("svg")
}

fn parse_number<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| usage(key, value, "not a valid number"))
}

fn usage(key: &str, value: &str, reason: &str) -> CliError {
    CliError::Usage(format!("invalid value `{value}` for --{key}: {reason}"))
}
