//! Command-line front end for the `lisfield` experiment runners.
//!
//! Every subcommand runs one experiment and writes its records as CSV, to
//! `--out` or to standard output. Flags may also come from a `key = value`
//! config file; command-line flags win over the file, which wins over the
//! built-in defaults.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use lisfield_core::experiments::{
    self, linear_grid, log_grid, Field, HeatmapSpec, Record, Scenario,
};
use lisfield_core::{ChannelModel, LinkBudget, PolarizationMode, UePolar};

pub const THREADS_ENV: &str = "LISFIELD_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid scenario: {0}")]
    Scenario(lisfield_core::Error),
    #[error(transparent)]
    Core(#[from] lisfield_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("thread pool: {0}")]
    Threads(#[from] rayon::ThreadPoolBuildError),
    #[error("no records to write")]
    Empty,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Scenario(_) => 1,
            _ => 2,
        }
    }

    fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_owned(),
            source,
        }
    }
}

/// An angle given as `2`, `2deg`, `-0.5rad`. Bare numbers are degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle {
    radians: f64,
}

impl Angle {
    pub fn radians(self) -> f64 {
        self.radians
    }

    pub fn degrees(self) -> f64 {
        self.radians.to_degrees()
    }
}

impl FromStr for Angle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (number, to_radians): (&str, fn(f64) -> f64) = if let Some(n) = s.strip_suffix("deg") {
            (n, f64::to_radians)
        } else if let Some(n) = s.strip_suffix("rad") {
            (n, |r| r)
        } else {
            (s, f64::to_radians)
        };
        let value: f64 = number
            .trim()
            .parse()
            .map_err(|_| format!("`{s}` is not an angle"))?;
        let radians = to_radians(value);
        if !radians.is_finite() || radians.abs() > std::f64::consts::FRAC_PI_2 * (1.0 + 1e-12) {
            return Err(format!("`{s}` is outside [-90deg, 90deg]"));
        }
        Ok(Angle { radians })
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}deg", self.degrees())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Polarization {
    Mismatch,
    Ignored,
}

impl From<Polarization> for PolarizationMode {
    fn from(p: Polarization) -> Self {
        match p {
            Polarization::Mismatch => PolarizationMode::Mismatch,
            Polarization::Ignored => PolarizationMode::Ignored,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Exact,
    FarField,
}

impl From<Model> for ChannelModel {
    fn from(m: Model) -> Self {
        match m {
            Model::Exact => ChannelModel::ExactNearField,
            Model::FarField => ChannelModel::FarField,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "lisfield",
    version,
    about = "Near- and far-field LIS uplink experiments"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// Output CSV path [default: standard output]
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Config file of `key = value` lines; command-line flags take precedence
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Worker threads [default: $LISFIELD_THREADS, else all cores]
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Channel gain ‖h₁‖² of user 1 against surface side L
    #[command(args_override_self = true)]
    GainSweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Whether per-element gains include the polarization mismatch loss
        #[arg(long, value_enum, default_value = "mismatch")]
        polarization: Polarization,
        #[command(flatten)]
        lengths: LengthArgs,
    },
    /// Normalized interference gain |h₁ᴴh₂|²/‖h₁‖² against surface side L
    #[command(args_override_self = true)]
    InterferenceSweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Whether per-element gains include the polarization mismatch loss
        #[arg(long, value_enum, default_value = "mismatch")]
        polarization: Polarization,
        #[command(flatten)]
        lengths: LengthArgs,
    },
    /// Spectral efficiency of user 1 against surface side L, both channel models
    #[command(args_override_self = true)]
    SeSweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Whether per-element gains include the polarization mismatch loss
        #[arg(long, value_enum, default_value = "mismatch")]
        polarization: Polarization,
        #[command(flatten)]
        lengths: LengthArgs,
    },
    /// Spectral efficiency against the users' common depth z, keeping their x
    #[command(args_override_self = true)]
    SeDistance {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Whether per-element gains include the polarization mismatch loss
        #[arg(long, value_enum, default_value = "mismatch")]
        polarization: Polarization,
        /// Surface side in meters
        #[arg(long, default_value_t = 6.0, value_name = "M")]
        length: f64,
        /// First depth in meters
        #[arg(long, default_value_t = 1.0, value_name = "M")]
        z_min: f64,
        /// Last depth in meters
        #[arg(long, default_value_t = 100.0, value_name = "M")]
        z_max: f64,
        /// Number of evenly spaced depths
        #[arg(long, default_value_t = 100, value_name = "COUNT")]
        z_points: usize,
    },
    /// SE of user 1 with the interferer on a grid around it in the XZ-plane
    #[command(args_override_self = true)]
    Heatmap {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Whether per-element gains include the polarization mismatch loss
        #[arg(long, value_enum, default_value = "mismatch")]
        polarization: Polarization,
        /// Channel model for both users
        #[arg(long, value_enum, default_value = "exact")]
        model: Model,
        /// Surface side in meters
        #[arg(long, default_value_t = 6.0, value_name = "M")]
        length: f64,
        /// Half width of the interferer grid in wavelengths
        #[arg(long, default_value_t = 3.0, value_name = "WAVELENGTHS")]
        half_width: f64,
        /// Interferer grid spacing in wavelengths
        #[arg(long, default_value_t = 0.05, value_name = "WAVELENGTHS")]
        step: f64,
    },
    /// SE and interference with and without polarization mismatch loss
    #[command(args_override_self = true)]
    Polarization {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        lengths: LengthArgs,
    },
    /// Mean MMSE SE when the interferer position is known only to within a disk
    #[command(args_override_self = true)]
    PositionError {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Whether per-element gains include the polarization mismatch loss
        #[arg(long, value_enum, default_value = "mismatch")]
        polarization: Polarization,
        /// Channel model for both users
        #[arg(long, value_enum, default_value = "exact")]
        model: Model,
        /// Surface side in meters
        #[arg(long, default_value_t = 6.0, value_name = "M")]
        length: f64,
        /// Error radii in wavelengths, comma separated [default: 0 to 1 in steps of 0.05]
        #[arg(long, value_delimiter = ',', value_name = "WAVELENGTHS")]
        radii: Vec<f64>,
        /// Monte-Carlo samples per radius
        #[arg(long, default_value_t = 1000, value_name = "COUNT")]
        samples: u32,
        /// Random seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::GainSweep { .. } => "gain-sweep",
            Command::InterferenceSweep { .. } => "interference-sweep",
            Command::SeSweep { .. } => "se-sweep",
            Command::SeDistance { .. } => "se-distance",
            Command::Heatmap { .. } => "heatmap",
            Command::Polarization { .. } => "polarization",
            Command::PositionError { .. } => "position-error",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    /// Wavelength in meters
    #[arg(long, default_value_t = 0.1, value_name = "M")]
    pub lambda: f64,
    /// Element side in meters [default: lambda/4]
    #[arg(long, value_name = "M")]
    pub element_side: Option<f64>,
    /// Distance of user 1 from the surface center in meters
    #[arg(long, default_value_t = 2.5, value_name = "M")]
    pub d1: f64,
    /// Distance of user 2 from the surface center in meters
    #[arg(long, default_value_t = 2.5, value_name = "M")]
    pub d2: f64,
    /// Angle of user 1 from broadside (deg or rad suffix, bare numbers are degrees)
    #[arg(
        long,
        default_value = "2deg",
        allow_hyphen_values = true,
        value_name = "ANGLE"
    )]
    pub theta1: Angle,
    /// Angle of user 2 from broadside (deg or rad suffix, bare numbers are degrees)
    #[arg(
        long,
        default_value = "-2deg",
        allow_hyphen_values = true,
        value_name = "ANGLE"
    )]
    pub theta2: Angle,
    /// Transmit power of user 1 in dBm
    #[arg(
        long,
        default_value_t = 30.0,
        allow_hyphen_values = true,
        value_name = "DBM"
    )]
    pub p1: f64,
    /// Transmit power of user 2 in dBm
    #[arg(
        long,
        default_value_t = 30.0,
        allow_hyphen_values = true,
        value_name = "DBM"
    )]
    pub p2: f64,
    /// Noise power in dBm
    #[arg(
        long,
        default_value_t = 0.0,
        allow_hyphen_values = true,
        value_name = "DBM"
    )]
    pub noise: f64,
}

impl ScenarioArgs {
    fn scenario(&self, pol: Polarization, model: Model) -> Result<Scenario, CliError> {
        let ue1 = UePolar::new(self.d1, self.theta1.radians()).map_err(CliError::Scenario)?;
        let ue2 = UePolar::new(self.d2, self.theta2.radians()).map_err(CliError::Scenario)?;
        let element_side = self.element_side.unwrap_or(self.lambda / 4.0);
        for (what, v) in [("--lambda", self.lambda), ("--element-side", element_side)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Usage(format!("{what} must be positive, got {v}")));
            }
        }
        Ok(Scenario {
            wavelength: self.lambda,
            element_side,
            ue1,
            ue2,
            budget: LinkBudget::new(self.p1, self.p2, self.noise),
            pol: pol.into(),
            model: model.into(),
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct LengthArgs {
    /// Smallest surface side in meters
    #[arg(long, default_value_t = 0.1, value_name = "M")]
    pub l_min: f64,
    /// Largest surface side in meters
    #[arg(long, default_value_t = 200.0, value_name = "M")]
    pub l_max: f64,
    /// Number of logarithmically spaced sides
    #[arg(long, default_value_t = 60, value_name = "COUNT")]
    pub l_points: usize,
    /// Explicit surface sides in meters, comma separated; replaces the log grid
    #[arg(long, value_delimiter = ',', value_name = "M")]
    pub lengths: Vec<f64>,
}

impl LengthArgs {
    fn grid(&self) -> Result<Vec<f64>, CliError> {
        if !self.lengths.is_empty() {
            return Ok(self.lengths.clone());
        }
        log_grid(self.l_min, self.l_max, self.l_points).map_err(CliError::Scenario)
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match parse(&argv) {
        Ok(cli) => cli,
        Err(Parsed::Clap(e)) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
        Err(Parsed::Cli(e)) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

enum Parsed {
    Clap(clap::Error),
    Cli(CliError),
}

fn parse(argv: &[OsString]) -> Result<Cli, Parsed> {
    let first = Cli::try_parse_from(argv).map_err(Parsed::Clap)?;
    let Some(path) = first.config.clone() else {
        return Ok(first);
    };
    let text = fs::read_to_string(&path).map_err(|e| Parsed::Cli(CliError::io(&path, e)))?;
    let sub = first.command.name();
    let injected = config_args(&text, sub)
        .map_err(|e| Parsed::Cli(CliError::Usage(format!("{}: {e}", path.display()))))?;
    let at = argv
        .iter()
        .position(|a| a.to_str() == Some(sub))
        .map_or(argv.len(), |i| i + 1);
    let mut merged = argv[..at].to_vec();
    merged.extend(injected.into_iter().map(OsString::from));
    merged.extend_from_slice(&argv[at..]);
    Cli::try_parse_from(merged).map_err(Parsed::Clap)
}

/// Turns config lines into `--key value` pairs for subcommand `sub`. Keys
/// belonging only to other subcommands are skipped; keys no subcommand
/// knows are an error.
pub fn config_args(text: &str, sub: &str) -> Result<Vec<String>, String> {
    let command = Cli::command();
    let longs = |c: &clap::Command| -> Vec<String> {
        c.get_arguments()
            .filter_map(|a| a.get_long().map(str::to_owned))
            .collect()
    };
    let global = longs(&command);
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", n + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" {
            return Err(format!(
                "line {}: config files cannot include others",
                n + 1
            ));
        }
        let known_here = global.contains(&key)
            || command
                .find_subcommand(sub)
                .is_some_and(|c| longs(c).contains(&key));
        if known_here {
            out.push(format!("--{key}={value}"));
        } else if !command.get_subcommands().any(|c| longs(c).contains(&key)) {
            return Err(format!("line {}: unknown key `{key}`", n + 1));
        }
    }
    Ok(out)
}

fn threads(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV}={v} is not a thread count"))),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads(cli.threads)? {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build()?;
    let out = cli.out;
    pool.install(|| execute(cli.command, out.as_deref()))
}

fn execute(command: Command, out: Option<&Path>) -> Result<(), CliError> {
    log::info!("running {}", command.name());
    match command {
        Command::GainSweep {
            scenario,
            polarization,
            lengths,
        } => {
            let s = scenario.scenario(polarization, Model::Exact)?;
            write_csv(&experiments::run_gain_vs_length(&s, &lengths.grid()?)?, out)
        }
        Command::InterferenceSweep {
            scenario,
            polarization,
            lengths,
        } => {
            let s = scenario.scenario(polarization, Model::Exact)?;
            write_csv(
                &experiments::run_interference_vs_length(&s, &lengths.grid()?)?,
                out,
            )
        }
        Command::SeSweep {
            scenario,
            polarization,
            lengths,
        } => {
            let s = scenario.scenario(polarization, Model::Exact)?;
            write_csv(&experiments::run_se_vs_length(&s, &lengths.grid()?)?, out)
        }
        Command::SeDistance {
            scenario,
            polarization,
            length,
            z_min,
            z_max,
            z_points,
        } => {
            let s = scenario.scenario(polarization, Model::Exact)?;
            let depths = linear_grid(z_min, z_max, z_points).map_err(CliError::Scenario)?;
            write_csv(&experiments::run_se_vs_distance(&s, &depths, length)?, out)
        }
        Command::Heatmap {
            scenario,
            polarization,
            model,
            length,
            half_width,
            step,
        } => {
            let s = scenario.scenario(polarization, model)?;
            let spec = HeatmapSpec {
                half_width_wavelengths: half_width,
                step_wavelengths: step,
            };
            write_csv(&experiments::run_heatmap(&s, &spec, length)?, out)
        }
        Command::Polarization { scenario, lengths } => {
            let s = scenario.scenario(Polarization::Mismatch, Model::Exact)?;
            write_csv(
                &experiments::run_polarization_compare(&s, &lengths.grid()?)?,
                out,
            )
        }
        Command::PositionError {
            scenario,
            polarization,
            model,
            length,
            radii,
            samples,
            seed,
        } => {
            let s = scenario.scenario(polarization, model)?;
            let radii = if radii.is_empty() {
                experiments::default_radius_grid()
            } else {
                radii
            };
            write_csv(
                &experiments::run_position_error(&s, &radii, samples, seed, length)?,
                out,
            )
        }
    }
}

fn cell(field: Field) -> String {
    match field {
        Field::Float(v) => format!("{v:?}"),
        Field::Int(v) => v.to_string(),
        Field::Text(t) => t.to_owned(),
        Field::Missing => String::new(),
    }
}

fn write_records<R: Record, W: Write>(records: &[R], sink: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    w.write_record(R::HEADER)?;
    for r in records {
        w.write_record(r.fields().into_iter().map(cell))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `records` as CSV to `path`, atomically replacing any existing
/// file, or to standard output when `path` is `None`.
pub fn write_csv<R: Record>(records: &[R], path: Option<&Path>) -> Result<(), CliError> {
    if records.is_empty() {
        return Err(CliError::Empty);
    }
    let Some(path) = path else {
        return Ok(write_records(records, io::stdout().lock())?);
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    write_records(records, io::BufWriter::new(tmp.as_file_mut()))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    log::info!("wrote {} rows to {}", records.len(), path.display());
    Ok(())
}
