//! Frequency protocols, units and the thermal initial state.

mod protocol;
mod thermal;
pub mod units;

pub use protocol::{mathieu_scale, FrequencyProtocol, Interpolation, TabulatedProtocol};
pub use thermal::{temperature_for_occupation, thermal_config, ThermalConfig};
pub use units::{Conversion, UnitMode, UnitSystem};
