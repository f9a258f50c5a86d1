//! Thermal initial state of the motional mode.

use crate::error::{Error, Result};
use crate::model::units::UnitSystem;

/// Thermal state at frequency `omega0` and temperature `temperature`.
///
/// `beta` is infinite and `nbar` exactly zero at `T = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalConfig {
    pub omega0: f64,
    pub temperature: f64,
    /// Mean thermal occupation `1 / (exp(beta hbar w0) - 1)`.
    pub nbar: f64,
    pub beta: f64,
    /// Initial energy `(hbar w0 / 2) coth(beta hbar w0 / 2)`.
    pub energy0: f64,
    pub units: UnitSystem,
}

/// Builds the thermal state for trap frequency `omega0` and temperature `temperature`.
pub fn thermal_config(units: &UnitSystem, omega0: f64, temperature: f64) -> Result<ThermalConfig> {
    if !(omega0.is_finite() && omega0 > 0.0) {
        return Err(Error::InvalidInput(format!(
            "trap frequency must be positive, got {omega0}"
        )));
    }
    if !(temperature >= 0.0) || temperature.is_infinite() {
        return Err(Error::InvalidTemperature(temperature));
    }
    let quantum = units.hbar * omega0;
    if temperature == 0.0 {
        return Ok(ThermalConfig {
            omega0,
            temperature,
            nbar: 0.0,
            beta: f64::INFINITY,
            energy0: 0.5 * quantum,
            units: *units,
        });
    }
    let beta = 1.0 / (units.boltzmann * temperature);
    let x = beta * quantum;
    let nbar = 1.0 / x.exp_m1();
    let energy0 = 0.5 * quantum / (0.5 * x).tanh();
    Ok(ThermalConfig {
        omega0,
        temperature,
        nbar,
        beta,
        energy0,
        units: *units,
    })
}

impl ThermalConfig {
    /// Thermal state with a prescribed mean occupation; the temperature is
    /// obtained by inverting the Bose factor.
    pub fn from_occupation(units: &UnitSystem, omega0: f64, nbar: f64) -> Result<Self> {
        if !(nbar.is_finite() && nbar >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "mean occupation must be non-negative, got {nbar}"
            )));
        }
        let temperature = temperature_for_occupation(units, omega0, nbar)?;
        let mut cfg = thermal_config(units, omega0, temperature)?;
        // keep the requested occupation exactly rather than the round-tripped one
        cfg.nbar = nbar;
        cfg.energy0 = units.hbar * omega0 * (nbar + 0.5);
        Ok(cfg)
    }

    /// The same state expressed in dimensionless units (`omega0 = 1`).
    pub fn to_dimensionless(&self) -> Self {
        let quantum = self.units.hbar * self.omega0;
        Self {
            omega0: 1.0,
            temperature: self.units.boltzmann * self.temperature / quantum,
            nbar: self.nbar,
            beta: self.beta * quantum,
            energy0: self.energy0 / quantum,
            units: UnitSystem::dimensionless(),
        }
    }
}

/// Temperature at which a mode of frequency `omega0` has mean occupation `nbar`.
pub fn temperature_for_occupation(units: &UnitSystem, omega0: f64, nbar: f64) -> Result<f64> {
    if !(nbar.is_finite() && nbar >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "mean occupation must be non-negative, got {nbar}"
        )));
    }
    if nbar == 0.0 {
        return Ok(0.0);
    }
    let x = (1.0 / nbar).ln_1p();
    Ok(units.hbar * omega0 / (units.boltzmann * x))
}
