//! Physical constants and conversion between SI and dimensionless units.
//!
//! Dimensionless units set `hbar = m = k_B = 1` and measure frequencies in
//! units of a reference frequency `w0` (the initial trap frequency), so time
//! becomes `w0 t`, energy `E / (hbar w0)` and temperature `k_B T / (hbar w0)`.

use serde::{Deserialize, Serialize};

/// Reduced Planck constant, J s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Atomic mass constant, kg.
pub const ATOMIC_MASS: f64 = 1.660_539_066_60e-27;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitMode {
    Si,
    Dimensionless,
}

/// Values of `hbar`, `k_B` and the particle mass in a given unit system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub mode: UnitMode,
    pub hbar: f64,
    pub boltzmann: f64,
    pub mass: f64,
}

impl UnitSystem {
    pub fn si(mass_kg: f64) -> Self {
        Self {
            mode: UnitMode::Si,
            hbar: HBAR,
            boltzmann: BOLTZMANN,
            mass: mass_kg,
        }
    }

    pub fn dimensionless() -> Self {
        Self {
            mode: UnitMode::Dimensionless,
            hbar: 1.0,
            boltzmann: 1.0,
            mass: 1.0,
        }
    }
}

/// Converts SI quantities to and from dimensionless ones for a reference
/// frequency `omega_ref` (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conversion {
    pub si: UnitSystem,
    pub omega_ref: f64,
}

impl Conversion {
    pub fn new(si: UnitSystem, omega_ref: f64) -> Self {
        Self { si, omega_ref }
    }

    fn energy_unit(&self) -> f64 {
        self.si.hbar * self.omega_ref
    }

    pub fn frequency_to_dimensionless(&self, omega: f64) -> f64 {
        omega / self.omega_ref
    }

    pub fn frequency_to_si(&self, omega: f64) -> f64 {
        omega * self.omega_ref
    }

    pub fn time_to_dimensionless(&self, t: f64) -> f64 {
        t * self.omega_ref
    }

    pub fn time_to_si(&self, tau: f64) -> f64 {
        tau / self.omega_ref
    }

    pub fn energy_to_dimensionless(&self, e: f64) -> f64 {
        e / self.energy_unit()
    }

    pub fn energy_to_si(&self, e: f64) -> f64 {
        e * self.energy_unit()
    }

    pub fn temperature_to_dimensionless(&self, t: f64) -> f64 {
        self.si.boltzmann * t / self.energy_unit()
    }

    pub fn temperature_to_si(&self, t: f64) -> f64 {
        t * self.energy_unit() / self.si.boltzmann
    }

    /// Position unit `sqrt(hbar / (m w0))`.
    pub fn length_unit(&self) -> f64 {
        (self.si.hbar / (self.si.mass * self.omega_ref)).sqrt()
    }

    /// Momentum unit `sqrt(hbar m w0)`.
    pub fn momentum_unit(&self) -> f64 {
        (self.si.hbar * self.si.mass * self.omega_ref).sqrt()
    }
}
