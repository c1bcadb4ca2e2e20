//! Command-line front end of the cavity photon-number detector simulator.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 physics or
//! numerical failure.

pub mod config;
pub mod svg;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Parser;
use thiserror::Error;

use qbd_core::master_eq::build_generator;
use qbd_core::report;
use qbd_core::{run_sweep, simulate, steady_state_analytic, PhotonDistribution, SweepRow};
use qbd_core::trajectory::Sample;

pub use config::{Command, OutputFormat, RunConfig, CONFIG_ENV};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Physics(#[from] qbd_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Usage(_) => 2,
            CliError::Physics(_) => 3,
        }
    }

    fn io(path: &str, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_string(),
            source,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qbd-sim",
    version,
    about = "Photon-number statistics of a cavity probed by a stream of atoms"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Cavity frequency in Hz.
    #[arg(long, allow_hyphen_values = true)]
    pub frequency_hz: Option<String>,
    /// Cavity quality factor.
    #[arg(long, allow_hyphen_values = true)]
    pub q_factor: Option<String>,
    /// Bath temperature in K.
    #[arg(long, allow_hyphen_values = true)]
    pub temperature_k: Option<String>,
    /// Mean atom arrival rate in 1/s.
    #[arg(long, allow_hyphen_values = true)]
    pub atom_rate: Option<String>,
    /// Rabi phase φ per atom.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,
    /// Photon-number truncation.
    #[arg(long, allow_hyphen_values = true)]
    pub n_max: Option<String>,
    /// Lower end of the sweep grid.
    #[arg(long, allow_hyphen_values = true)]
    pub phi_min: Option<String>,
    /// Upper end of the sweep grid.
    #[arg(long, allow_hyphen_values = true)]
    pub phi_max: Option<String>,
    /// Number of sweep grid points.
    #[arg(long, allow_hyphen_values = true)]
    pub steps: Option<String>,
    /// Trajectory length in s.
    #[arg(long, allow_hyphen_values = true)]
    pub duration_s: Option<String>,
    /// Trajectory seed.
    #[arg(long, allow_hyphen_values = true)]
    pub seed: Option<String>,
    /// Atom arrival process: poisson or regular.
    #[arg(long)]
    pub arrival: Option<String>,
    /// True photon number at t = 0.
    #[arg(long, allow_hyphen_values = true)]
    pub initial_n: Option<String>,
    /// Record a trajectory sample after every k-th atom.
    #[arg(long, allow_hyphen_values = true)]
    pub record_stride: Option<String>,
    /// Output file; standard output when absent or `-`.
    #[arg(long)]
    pub output: Option<String>,
    /// csv, or csv+svg to also write a plot next to the output file.
    #[arg(long)]
    pub format: Option<String>,
    /// Config file of `key = value` lines. Defaults to $QBD_SIM_CONFIG.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Cli {
    fn flag_values(&self) -> [(&'static str, Option<&str>); 16] {
        [
            ("frequency-hz", self.frequency_hz.as_deref()),
            ("q-factor", self.q_factor.as_deref()),
            ("temperature-k", self.temperature_k.as_deref()),
            ("atom-rate", self.atom_rate.as_deref()),
            ("phi", self.phi.as_deref()),
            ("n-max", self.n_max.as_deref()),
            ("phi-min", self.phi_min.as_deref()),
            ("phi-max", self.phi_max.as_deref()),
            ("steps", self.steps.as_deref()),
            ("duration-s", self.duration_s.as_deref()),
            ("seed", self.seed.as_deref()),
            ("arrival", self.arrival.as_deref()),
            ("initial-n", self.initial_n.as_deref()),
            ("record-stride", self.record_stride.as_deref()),
            ("output", self.output.as_deref()),
            ("format", self.format.as_deref()),
        ]
    }

    /// Merges defaults, the config file text and the flags, then validates.
    pub fn resolve(&self, config_text: Option<&str>) -> Result<RunConfig, CliError> {
        let mut config = RunConfig::defaults(self.command);
        if let Some(text) = config_text {
            config.apply_config_text(text)?;
        }
        for (key, value) in self.flag_values() {
            if let Some(value) = value {
                config.set(key, value)?;
            }
        }
        config.validate()?;
        Ok(config)
    }

    /// Config file named by `--config`, else by `$QBD_SIM_CONFIG`.
    pub fn config_path(&self) -> Option<PathBuf> {
        self.config
            .clone()
            .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from))
    }
}

/// Parses arguments (program name first) and loads the config file.
pub fn parse_config<I, T>(args: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    let text = match cli.config_path() {
        Some(path) => Some(
            std::fs::read_to_string(&path)
                .map_err(|e| CliError::io(&path.display().to_string(), e))?,
        ),
        None => None,
    };
    cli.resolve(text.as_deref())
}

enum Output {
    Steady(PhotonDistribution),
    Sweep(Vec<SweepRow>),
    Trajectory(Vec<Sample>),
    Passage,
}

/// Runs the configured command and writes its CSV (and SVG) output.
pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let output = compute(config)?;
    let header = config.header_lines();
    match &config.output {
        Some(path) => {
            let name = path.display().to_string();
            let file = File::create(path).map_err(|e| CliError::io(&name, e))?;
            let mut w = BufWriter::new(file);
            write_csv(&mut w, &header, config, &output)
                .and_then(|()| w.flush())
                .map_err(|e| CliError::io(&name, e))?;
            if config.format == OutputFormat::CsvSvg {
                write_svg(&config::svg_path(path), config, &output)?;
            }
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            write_csv(&mut w, &header, config, &output)
                .and_then(|()| w.flush())
                .map_err(|e| CliError::io("<stdout>", e))?;
        }
    }
    Ok(())
}

fn compute(config: &RunConfig) -> Result<Output, CliError> {
    Ok(match config.command {
        Command::Steady => {
            let params = config.params();
            let generator = build_generator(&params, params.derived_rates()?, config.n_max)?;
            Output::Steady(steady_state_analytic(&generator)?)
        }
        Command::Sweep => Output::Sweep(run_sweep(&config.sweep_spec())?),
        Command::Trajectory => Output::Trajectory(simulate(&config.trajectory_config())?.samples),
        Command::Passage => Output::Passage,
    })
}

fn write_csv<W: Write>(
    w: &mut W,
    header: &[String],
    config: &RunConfig,
    output: &Output,
) -> io::Result<()> {
    match output {
        Output::Steady(p) => report::write_steady_csv(w, header, p),
        Output::Sweep(rows) => report::write_sweep_csv(w, header, rows),
        Output::Trajectory(samples) => report::write_trajectory_csv(w, header, samples),
        Output::Passage => report::write_passage_csv(w, header, config.phi, config.n_max),
    }
}

fn write_svg(path: &Path, config: &RunConfig, output: &Output) -> Result<(), CliError> {
    use svg::{Panel, Series};

    let points = |xy: Vec<(f64, f64)>| xy.into_iter().map(Some).collect::<Vec<_>>();
    let (title, x_label, panels) = match output {
        Output::Steady(p) => (
            format!("Stationary photon-number distribution, phi = {}", config.phi),
            "n",
            vec![Panel::new(
                "p(n)",
                vec![Series::new(
                    "p(n)",
                    points(p.probs().iter().enumerate().map(|(n, &v)| (n as f64, v)).collect()),
                )],
            )],
        ),
        Output::Sweep(rows) => (
            "Stationary photon statistics versus Rabi phase".to_string(),
            "phi",
            vec![
                Panel::new(
                    "<n>",
                    vec![Series::new("<n>", points(rows.iter().map(|r| (r.phi, r.mean_n)).collect()))],
                ),
                Panel::new(
                    "Fano factor",
                    vec![Series::new(
                        "Q_f",
                        rows.iter().map(|r| r.fano.map(|f| (r.phi, f))),
                    )],
                ),
            ],
        ),
        Output::Trajectory(samples) => {
            let state = samples.iter().map(|s| {
                s.last_outcome
                    .map(|o| (s.time, o as usize as f64))
            });
            (
                format!("Detection record, seed {}", config.seed),
                "time (s)",
                vec![
                    Panel::new("atom state (f=0, g=1, e=2)", vec![Series::new("outcome", state)]),
                    Panel::new(
                        "filter <n>",
                        vec![
                            Series::new(
                                "filter",
                                points(samples.iter().map(|s| (s.time, s.filter_mean)).collect()),
                            ),
                            Series::new(
                                "true n",
                                points(samples.iter().map(|s| (s.time, s.true_n as f64)).collect()),
                            ),
                        ],
                    ),
                    Panel::new(
                        "filter std",
                        vec![Series::new(
                            "std",
                            points(samples.iter().map(|s| (s.time, s.filter_std)).collect()),
                        )],
                    ),
                ],
            )
        }
        Output::Passage => {
            let weights: Vec<_> = (0..=config.n_max)
                .map(|n| (n as f64, qbd_core::passage_weights(n, config.phi)))
                .collect();
            let column = |pick: fn(&qbd_core::OutcomeWeights) -> f64| {
                weights.iter().map(|(n, w)| Some((*n, pick(w)))).collect::<Vec<_>>()
            };
            (
                format!("Single-atom outcome probabilities, phi = {}", config.phi),
                "n",
                vec![Panel::new(
                    "probability",
                    vec![
                        Series::new("w_f", column(|w| w.w_f)),
                        Series::new("w_g", column(|w| w.w_g)),
                        Series::new("w_e", column(|w| w.w_e)),
                    ],
                )],
            )
        }
    };
    let name = path.display().to_string();
    std::fs::write(path, svg::render(&title, x_label, &panels)).map_err(|e| CliError::io(&name, e))
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = cli
        .config_path()
        .map(|path| {
            std::fs::read_to_string(&path).map_err(|e| CliError::io(&path.display().to_string(), e))
        })
        .transpose()
        .and_then(|text| cli.resolve(text.as_deref()))
        .and_then(|config| run(&config));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("qbd-sim: error: {e}");
            e.exit_code()
        }
    }
}
