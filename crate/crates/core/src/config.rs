//! TOML run configuration.
//!
//! Physical inputs are given in SI units (frequencies as ordinary
//! frequencies in Hz, times in seconds, temperatures in kelvin, masses in
//! atomic mass units) and converted once to dimensionless form, where
//! frequencies are measured in units of the initial trap frequency `w0`.
//!
//! ```toml
//! [protocol]
//! kind = "mathieu"          # constant | mathieu | linear_ramp | sudden_jump | tabulated
//! a_bar = 6.0
//! q_bar = 0.5
//!
//! [thermal]
//! trap_frequency_hz = 4.0e6 # w0 / 2pi
//! temperature_k = 1.42e-4   # or: mean_occupation = 0.35
//!
//! [simulation]
//! tau_end = 37.699111843    # or: duration_s = ...
//! samples = 4000
//! tolerance = 1e-11
//! ```

use std::f64::consts::PI;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::error::Error;
use crate::integrator::DEFAULT_TOLERANCE;
use crate::model::{
    mathieu_scale, thermal_config, units::ATOMIC_MASS, Conversion, FrequencyProtocol,
    Interpolation, TabulatedProtocol, ThermalConfig, UnitSystem,
};
use crate::simulation::{SimulationSettings, DEFAULT_SAMPLES, DEFAULT_TAU_END};

pub const DEFAULT_TRAP_FREQUENCY_HZ: f64 = 4.0e6;
pub const DEFAULT_TEMPERATURE_K: f64 = 1.42e-4;
/// Mass of a calcium-40 ion; only affects the variances.
pub const DEFAULT_MASS_AMU: f64 = 40.0;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] Error),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ProtocolSection {
    Constant {
        /// Defaults to the trap frequency.
        frequency_hz: Option<f64>,
    },
    Mathieu {
        a_bar: f64,
        q_bar: f64,
    },
    LinearRamp {
        initial_frequency_hz: Option<f64>,
        final_frequency_hz: f64,
        ramp_duration_s: f64,
    },
    SuddenJump {
        initial_frequency_hz: Option<f64>,
        final_frequency_hz: f64,
        #[serde(default)]
        jump_time_s: f64,
    },
    Tabulated {
        time_s: Vec<f64>,
        frequency_hz: Vec<f64>,
        #[serde(default)]
        interpolation: Interpolation,
    },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThermalSection {
    trap_frequency_hz: Option<f64>,
    temperature_k: Option<f64>,
    mean_occupation: Option<f64>,
    mass_amu: Option<f64>,
    mean_position_m: Option<f64>,
    mean_momentum_kg_m_s: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulationSection {
    tau_end: Option<f64>,
    duration_s: Option<f64>,
    samples: Option<usize>,
    tolerance: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanSection {
    a_min: Option<f64>,
    a_max: Option<f64>,
    a_steps: Option<usize>,
    q_min: Option<f64>,
    q_max: Option<f64>,
    q_steps: Option<usize>,
    tolerance: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    protocol: Option<ProtocolSection>,
    #[serde(default)]
    thermal: ThermalSection,
    #[serde(default)]
    simulation: SimulationSection,
    #[serde(default)]
    scan: ScanSection,
}

/// Stability scan grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSettings {
    pub a_range: (f64, f64),
    pub q_range: (f64, f64),
    pub resolution: (usize, usize),
    pub tolerance: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            a_range: (0.0, 14.0),
            q_range: (0.0, 3.0),
            resolution: (141, 61),
            tolerance: 1e-12,
        }
    }
}

/// A fully validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Protocol in SI units: frequencies in rad/s, times in seconds.
    pub protocol_si: Option<FrequencyProtocol>,
    pub thermal_si: ThermalConfig,
    pub conversion: Conversion,
    /// Protocol in dimensionless units, ready for integration.
    pub protocol: Option<FrequencyProtocol>,
    pub thermal: ThermalConfig,
    pub simulation: SimulationSettings,
    pub scan: ScanSettings,
}

fn positive(name: &str, x: f64) -> Result<f64, ConfigError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(ConfigError::Invalid(format!("{name} must be finite and positive, got {x}")))
    }
}

fn angular(name: &str, hz: f64) -> Result<f64, ConfigError> {
    Ok(2.0 * PI * positive(name, hz)?)
}

fn build_protocol(section: &ProtocolSection, omega0: f64) -> Result<FrequencyProtocol, ConfigError> {
    let start = |hz: Option<f64>| match hz {
        Some(hz) => angular("initial_frequency_hz", hz),
        None => Ok(omega0),
    };
    let p = match section {
        ProtocolSection::Constant { frequency_hz } => FrequencyProtocol::constant(start(*frequency_hz)?)?,
        ProtocolSection::Mathieu { a_bar, q_bar } => {
            FrequencyProtocol::mathieu_from_initial(omega0, *a_bar, *q_bar)?
        }
        ProtocolSection::LinearRamp {
            initial_frequency_hz,
            final_frequency_hz,
            ramp_duration_s,
        } => FrequencyProtocol::linear_ramp(
            start(*initial_frequency_hz)?,
            angular("final_frequency_hz", *final_frequency_hz)?,
            positive("ramp_duration_s", *ramp_duration_s)?,
        )?,
        ProtocolSection::SuddenJump {
            initial_frequency_hz,
            final_frequency_hz,
            jump_time_s,
        } => {
            if !(jump_time_s.is_finite() && *jump_time_s >= 0.0) {
                return Err(ConfigError::Invalid(format!(
                    "jump_time_s must be non-negative, got {jump_time_s}"
                )));
            }
            FrequencyProtocol::sudden_jump(
                start(*initial_frequency_hz)?,
                angular("final_frequency_hz", *final_frequency_hz)?,
                *jump_time_s,
            )?
        }
        ProtocolSection::Tabulated {
            time_s,
            frequency_hz,
            interpolation,
        } => {
            let omega_sq = frequency_hz
                .iter()
                .map(|f| angular("frequency_hz entry", *f).map(|w| w * w))
                .collect::<Result<Vec<_>, _>>()?;
            FrequencyProtocol::Tabulated(TabulatedProtocol::new(time_s.clone(), omega_sq, *interpolation)?)
        }
    };
    Ok(p)
}

fn build_thermal(section: &ThermalSection) -> Result<(ThermalConfig, Conversion), ConfigError> {
    for (name, value) in [
        ("mean_position_m", section.mean_position_m),
        ("mean_momentum_kg_m_s", section.mean_momentum_kg_m_s),
    ] {
        if let Some(x) = value {
            if x != 0.0 {
                return Err(ConfigError::Invalid(format!(
                    "{name} = {x}: displaced initial states are not supported"
                )));
            }
        }
    }
    let omega0 = angular(
        "trap_frequency_hz",
        section.trap_frequency_hz.unwrap_or(DEFAULT_TRAP_FREQUENCY_HZ),
    )?;
    let mass = positive("mass_amu", section.mass_amu.unwrap_or(DEFAULT_MASS_AMU))? * ATOMIC_MASS;
    let units = UnitSystem::si(mass);
    let thermal = match (section.temperature_k, section.mean_occupation) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::Invalid(
                "give either temperature_k or mean_occupation, not both".into(),
            ))
        }
        (_, Some(nbar)) => ThermalConfig::from_occupation(&units, omega0, nbar)?,
        (t, None) => thermal_config(&units, omega0, t.unwrap_or(DEFAULT_TEMPERATURE_K))?,
    };
    Ok((thermal, Conversion::new(units, omega0)))
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let (thermal_si, conversion) = build_thermal(&raw.thermal)?;
        let omega0 = thermal_si.omega0;
        let protocol_si = raw
            .protocol
            .as_ref()
            .map(|p| build_protocol(p, omega0))
            .transpose()?;
        let protocol = protocol_si.as_ref().map(|p| p.rescaled(omega0)).transpose()?;

        let sim = &raw.simulation;
        let tau_end = match (sim.tau_end, sim.duration_s) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::Invalid(
                    "give either tau_end or duration_s, not both".into(),
                ))
            }
            (Some(tau), None) => positive("tau_end", tau)?,
            (None, Some(t)) => {
                let t = positive("duration_s", t)?;
                // tau is scale * t for Mathieu and w0 * t otherwise
                match &raw.protocol {
                    Some(ProtocolSection::Mathieu { a_bar, q_bar }) => {
                        mathieu_scale(omega0, *a_bar, *q_bar)? * t
                    }
                    _ => conversion.time_to_dimensionless(t),
                }
            }
            (None, None) => DEFAULT_TAU_END,
        };
        let samples = sim.samples.unwrap_or(DEFAULT_SAMPLES);
        if samples < 2 {
            return Err(ConfigError::Invalid(format!("samples must be at least 2, got {samples}")));
        }
        let simulation = SimulationSettings {
            tau_end,
            samples,
            tolerance: sim.tolerance.unwrap_or(DEFAULT_TOLERANCE),
        };
        crate::integrator::IntegratorOptions::with_tolerance(simulation.tolerance).validate()?;

        let d = ScanSettings::default();
        let s = &raw.scan;
        let scan = ScanSettings {
            a_range: (s.a_min.unwrap_or(d.a_range.0), s.a_max.unwrap_or(d.a_range.1)),
            q_range: (s.q_min.unwrap_or(d.q_range.0), s.q_max.unwrap_or(d.q_range.1)),
            resolution: (s.a_steps.unwrap_or(d.resolution.0), s.q_steps.unwrap_or(d.resolution.1)),
            tolerance: s.tolerance.unwrap_or(d.tolerance),
        };

        Ok(Self {
            protocol_si,
            thermal_si,
            conversion,
            protocol,
            thermal: thermal_si.to_dimensionless(),
            simulation,
            scan,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// The dimensionless protocol, or an error when the file has no
    /// `[protocol]` section.
    pub fn require_protocol(&self) -> Result<&FrequencyProtocol, ConfigError> {
        self.protocol
            .as_ref()
            .ok_or_else(|| ConfigError::Invalid("missing [protocol] section".into()))
    }
}

/// Parses a comma-separated list of mean occupations such as `"0, 0.35, 2"`.
pub fn parse_nbar_list(text: &str) -> Result<Vec<f64>, Error> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(Error::InvalidInput("empty occupation list".into()));
    }
    trimmed
        .split(',')
        .map(|item| {
            let item = item.trim();
            let x: f64 = item
                .parse()
                .map_err(|_| Error::InvalidInput(format!("not a number: {item:?}")))?;
            if !(x.is_finite() && x >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "mean occupation must be finite and non-negative, got {item}"
                )));
            }
            Ok(x)
        })
        .collect()
}
