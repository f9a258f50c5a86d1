//! Command-line front end: time-series simulation, stability scans and
//! thermal/critical-value tables.
//!
//! Exit status: 0 success, 1 I/O failure, 2 invalid configuration or
//! arguments, 3 integration failure, 4 growth overflow.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use iontrap::config::{parse_nbar_list, Config, ConfigError};
use iontrap::heisenberg::critical_q;
use iontrap::model::{temperature_for_occupation, thermal_config, UnitSystem};
use iontrap::simulation::{simulate, Run, RunSummary};
use iontrap::stability::{scan, MonodromyResult};
use iontrap::{Error, FrequencyProtocol};

pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INTEGRATION: i32 = 3;
pub const EXIT_OVERFLOW: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "iontrap", version, about = "Motional-state dynamics of a trapped ion with a time-dependent trap frequency")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a protocol and write the per-sample time series as CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the run summary as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Classify a grid of Mathieu parameters and write it as CSV.
    Scan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Critical non-adiabaticity for a list of mean occupations.
    Critical {
        /// Comma-separated occupations, e.g. "0,0.35,1".
        #[arg(long, allow_hyphen_values = true)]
        nbar: String,
        /// Trap frequency w0 / 2pi in Hz.
        #[arg(long, default_value_t = 4.0e6)]
        w0: f64,
    },
    /// Thermal occupation, inverse temperature and initial energy.
    Thermal {
        /// Trap frequency w0 / 2pi in Hz.
        #[arg(long)]
        w0: f64,
        /// Temperature in kelvin.
        #[arg(long, allow_hyphen_values = true)]
        temp: f64,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io { .. } | Self::Config(ConfigError::Io { .. }) => EXIT_IO,
            Self::Config(ConfigError::Model(e)) | Self::Model(e) => model_exit_code(e),
            Self::Config(_) => EXIT_CONFIG,
        }
    }
}

fn model_exit_code(e: &Error) -> i32 {
    match e {
        Error::GrowthOverflow { .. } => EXIT_OVERFLOW,
        Error::InvalidTemperature(_)
        | Error::InvalidInput(_)
        | Error::InvalidProtocol(_)
        | Error::DegenerateProtocol(_) => EXIT_CONFIG,
        _ => EXIT_INTEGRATION,
    }
}

fn io_err(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let shown = path.display().to_string();
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(format!("cannot create temporary file for {shown}")))?;
    tmp.write_all(contents).map_err(io_err(format!("cannot write {shown}")))?;
    tmp.persist(path).map_err(|e| CliError::Io {
        context: format!("cannot write {shown}"),
        source: e.error,
    })?;
    Ok(())
}

/// Fixed-width scientific formatting so that identical runs give
/// byte-identical files.
fn num(x: f64) -> String {
    format!("{x:.15e}")
}

fn protocol_description(p: &FrequencyProtocol) -> String {
    match p {
        FrequencyProtocol::Constant { omega } => format!("constant omega={}", num(*omega)),
        FrequencyProtocol::Mathieu { a_bar, q_bar, scale } => {
            format!("mathieu a_bar={} q_bar={} scale={}", num(*a_bar), num(*q_bar), num(*scale))
        }
        FrequencyProtocol::LinearRamp {
            omega_start,
            omega_end,
            duration,
        } => format!(
            "linear_ramp omega_start={} omega_end={} duration={}",
            num(*omega_start),
            num(*omega_end),
            num(*duration)
        ),
        FrequencyProtocol::SuddenJump {
            omega_before,
            omega_after,
            jump_at,
        } => format!(
            "sudden_jump omega_before={} omega_after={} jump_at={}",
            num(*omega_before),
            num(*omega_after),
            num(*jump_at)
        ),
        FrequencyProtocol::Tabulated(t) => format!(
            "tabulated samples={} start={} end={} interpolation={:?}",
            t.taus().len(),
            num(t.start()),
            num(t.end()),
            t.interpolation()
        ),
    }
}

pub const SIMULATE_COLUMNS: [&str; 22] = [
    "tau",
    "time_s",
    "omega_over_omega0",
    "u",
    "du",
    "v",
    "dv",
    "q_star",
    "q1_star",
    "q2_star",
    "classicality",
    "n_h",
    "m_h_abs",
    "r",
    "theta",
    "gamma",
    "r_a",
    "nonclassical",
    "wronskian_residual",
    "hyperbolic_residual",
    "fg_residual",
    "cross_picture_residual",
];

fn summary_lines(s: &RunSummary) -> Vec<(&'static str, String)> {
    vec![
        ("samples", s.samples.to_string()),
        ("nbar", num(s.nbar)),
        ("critical_q", num(s.critical_q)),
        ("max_q", num(s.max_q)),
        ("max_q_minus_one", num(s.max_q_minus_one)),
        ("final_q", num(s.final_q)),
        ("min_classicality", num(s.min_classicality)),
        ("final_classicality", num(s.final_classicality)),
        (
            "first_nonclassical_tau",
            s.first_nonclassical_tau.map_or_else(|| "none".to_string(), num),
        ),
        ("classicality_sign_changes", s.classicality_sign_changes.to_string()),
        ("q_envelope_growth", num(s.q_envelope_growth)),
        ("max_abs_r_minus_r_a", num(s.max_abs_r_minus_r_a)),
        ("max_wronskian_residual", num(s.max_wronskian_residual)),
        ("max_hyperbolic_residual", num(s.max_hyperbolic_residual)),
        ("max_fg_residual", num(s.max_fg_residual)),
        ("max_cross_picture_residual", num(s.max_cross_picture_residual)),
    ]
}

/// Renders a run as CSV: a `#` metadata block, one header line, one row per sample.
pub fn render_run_csv(config: &Config, run: &Run) -> String {
    let summary = run.summary();
    let phi = run.protocol.time_scale();
    let mut out = String::new();
    let _ = writeln!(out, "# iontrap {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# protocol: {}", protocol_description(&run.protocol));
    let _ = writeln!(out, "# trap_frequency_hz: {}", num(config.thermal_si.omega0 / (2.0 * std::f64::consts::PI)));
    let _ = writeln!(out, "# temperature_k: {}", num(config.thermal_si.temperature));
    let _ = writeln!(out, "# tau_end: {}", num(run.settings.tau_end));
    let _ = writeln!(out, "# tolerance: {}", num(run.settings.tolerance));
    for (k, v) in summary_lines(&summary) {
        let _ = writeln!(out, "# {k}: {v}");
    }
    out.push_str(&SIMULATE_COLUMNS.join(","));
    out.push('\n');
    for s in &run.samples {
        let time_s = config.conversion.time_to_si(s.tau / phi);
        let fields = [
            num(s.tau),
            num(time_s),
            num(s.omega / run.thermal.omega0),
            num(s.state.u),
            num(s.state.du),
            num(s.state.v),
            num(s.state.dv),
            num(s.triple.q),
            num(s.triple.q1),
            num(s.triple.q2),
            num(s.classicality),
            num(s.covariance.n_h),
            num(s.covariance.m_h_abs()),
            num(s.evolution.r),
            num(s.evolution.theta),
            num(s.evolution.gamma),
            num(s.r_a),
            u8::from(s.is_nonclassical()).to_string(),
            num(s.wronskian_residual()),
            num(s.hyperbolic_residual()),
            num(s.fg_residual()),
            num(s.cross_picture_residual()),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn render_scan_csv(results: &[MonodromyResult]) -> String {
    let mut out = String::from("a_bar,q_bar,trace,classification\n");
    for m in results {
        let _ = writeln!(out, "{},{},{},{}", num(m.a_bar), num(m.q_bar), num(m.trace), m.classification);
    }
    out
}

#[derive(Serialize)]
struct JsonReport<'a> {
    version: &'static str,
    protocol: String,
    trap_frequency_hz: f64,
    temperature_k: f64,
    settings: iontrap::simulation::SimulationSettings,
    summary: &'a RunSummary,
}

fn cmd_simulate(config: &Path, out: &Path, json: Option<&Path>) -> Result<String, CliError> {
    let cfg = Config::load(config)?;
    let protocol = cfg.require_protocol()?;
    let run = simulate(protocol, &cfg.thermal, &cfg.simulation)?;
    write_atomic(out, render_run_csv(&cfg, &run).as_bytes())?;
    let summary = run.summary();
    if let Some(path) = json {
        let report = JsonReport {
            version: env!("CARGO_PKG_VERSION"),
            protocol: protocol_description(protocol),
            trap_frequency_hz: cfg.thermal_si.omega0 / (2.0 * std::f64::consts::PI),
            temperature_k: cfg.thermal_si.temperature,
            settings: run.settings,
            summary: &summary,
        };
        let mut text = serde_json::to_string_pretty(&report).expect("summary serialises");
        text.push('\n');
        write_atomic(path, text.as_bytes())?;
    }
    let mut stdout = String::new();
    for (k, v) in summary_lines(&summary) {
        let _ = writeln!(stdout, "{k} = {v}");
    }
    Ok(stdout)
}

fn cmd_scan(config: &Path, out: &Path) -> Result<String, CliError> {
    let cfg = Config::load(config)?;
    let s = cfg.scan;
    let results = scan(s.a_range, s.q_range, s.resolution, s.tolerance)?;
    write_atomic(out, render_scan_csv(&results).as_bytes())?;
    let unstable = results.iter().filter(|m| !m.classification.is_bounded()).count();
    Ok(format!("points = {}\nunstable = {}\n", results.len(), unstable))
}

fn cmd_critical(nbar: &str, w0_hz: f64) -> Result<String, CliError> {
    let list = parse_nbar_list(nbar)?;
    let omega0 = angular_input(w0_hz)?;
    let units = UnitSystem::si(1.0);
    let mut out = String::from("nbar,critical_q,temperature_k\n");
    for n in list {
        let t = temperature_for_occupation(&units, omega0, n)?;
        let _ = writeln!(out, "{},{},{}", num(n), num(critical_q(n)), num(t));
    }
    Ok(out)
}

fn angular_input(hz: f64) -> Result<f64, CliError> {
    if hz.is_finite() && hz > 0.0 {
        Ok(2.0 * std::f64::consts::PI * hz)
    } else {
        Err(Error::InvalidInput(format!("trap frequency must be positive, got {hz} Hz")).into())
    }
}

fn cmd_thermal(w0_hz: f64, temperature: f64) -> Result<String, CliError> {
    let omega0 = angular_input(w0_hz)?;
    let th = thermal_config(&UnitSystem::si(1.0), omega0, temperature)?;
    Ok(format!(
        "nbar = {}\nbeta_per_joule = {}\nenergy0_joule = {}\nenergy0_over_hbar_w0 = {}\n",
        num(th.nbar),
        num(th.beta),
        num(th.energy0),
        num(th.to_dimensionless().energy0)
    ))
}

/// Runs one command and returns what it prints on standard output.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Simulate { config, out, json } => cmd_simulate(config, out, json.as_deref()),
        Command::Scan { config, out } => cmd_scan(config, out),
        Command::Critical { nbar, w0 } => cmd_critical(nbar, *w0),
        Command::Thermal { w0, temp } => cmd_thermal(*w0, *temp),
    }
}
