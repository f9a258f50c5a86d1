//! Frequency protocols `w^2(tau)`.
//!
//! A protocol carries its frequencies in whatever unit system the caller
//! chose. Its time variable is `tau = phi * t`, where `phi` is the protocol's
//! time scale: the Mathieu protocol carries its own `phi`, every other
//! protocol uses `phi = 1` so that `tau` is plain time in the reciprocal of
//! the frequency unit (in dimensionless units, `tau = w0 t`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interpolation rule for tabulated protocols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Piecewise cubic Hermite with shape-preserving slopes.
    #[default]
    MonotoneCubic,
    Linear,
}

/// Sampled `w^2(tau)` with interpolation between the samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedProtocol {
    taus: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    interpolation: Interpolation,
}

impl TabulatedProtocol {
    /// Builds a tabulated protocol from `(tau, w^2)` samples.
    ///
    /// Requires at least two samples, strictly increasing finite `tau`, and
    /// finite positive `w^2`.
    pub fn new(taus: Vec<f64>, omega_squared: Vec<f64>, interpolation: Interpolation) -> Result<Self> {
        if taus.len() != omega_squared.len() {
            return Err(Error::InvalidProtocol(format!(
                "tabulated protocol has {} times but {} values",
                taus.len(),
                omega_squared.len()
            )));
        }
        if taus.len() < 2 {
            return Err(Error::InvalidProtocol(
                "tabulated protocol needs at least two samples".into(),
            ));
        }
        if taus.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidProtocol("non-finite sample time".into()));
        }
        if taus.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidProtocol(
                "tabulated sample times must be strictly increasing".into(),
            ));
        }
        for (&tau, &value) in taus.iter().zip(&omega_squared) {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::NonPositiveFrequency { tau, value });
            }
        }
        let slopes = match interpolation {
            Interpolation::MonotoneCubic => pchip_slopes(&taus, &omega_squared),
            Interpolation::Linear => Vec::new(),
        };
        Ok(Self {
            taus,
            values: omega_squared,
            slopes,
            interpolation,
        })
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn start(&self) -> f64 {
        self.taus[0]
    }

    pub fn end(&self) -> f64 {
        self.taus[self.taus.len() - 1]
    }

    fn eval(&self, tau: f64) -> Result<f64> {
        let (start, end) = (self.start(), self.end());
        if !(tau >= start && tau <= end) {
            return Err(Error::OutOfDomain { tau, start, end });
        }
        // interval k with taus[k] <= tau <= taus[k + 1]
        let k = match self.taus.partition_point(|&t| t <= tau) {
            0 => 0,
            p => (p - 1).min(self.taus.len() - 2),
        };
        let (t0, t1) = (self.taus[k], self.taus[k + 1]);
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let h = t1 - t0;
        let s = (tau - t0) / h;
        Ok(match self.interpolation {
            Interpolation::Linear => y0 + s * (y1 - y0),
            Interpolation::MonotoneCubic => {
                let (d0, d1) = (self.slopes[k], self.slopes[k + 1]);
                let s2 = s * s;
                let s3 = s2 * s;
                let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
                let h10 = s3 - 2.0 * s2 + s;
                let h01 = -2.0 * s3 + 3.0 * s2;
                let h11 = s3 - s2;
                h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
            }
        })
    }
}

/// Fritsch–Butland slopes (the PCHIP rule): weighted harmonic mean of the
/// adjacent secants, zero at local extrema, shape-preserving end conditions.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    if n == 2 {
        return vec![delta[0], delta[0]];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    d[0] = pchip_end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = pchip_end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn pchip_end_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() {
        0.0
    } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}

/// A rule producing the squared trap frequency `w^2(tau)`.
#[derive(Debug, Clone, PartialEq)]
pub enum FrequencyProtocol {
    /// `w(tau) = omega`.
    Constant { omega: f64 },
    /// `w^2(tau) = scale^2 (a_bar - 2 q_bar cos 2tau)` with `tau = scale * t`.
    Mathieu { a_bar: f64, q_bar: f64, scale: f64 },
    /// `w` moves linearly from `omega_start` to `omega_end` over
    /// `0 <= tau <= duration`, then holds.
    LinearRamp {
        omega_start: f64,
        omega_end: f64,
        duration: f64,
    },
    /// `w = omega_before` for `tau < jump_at`, `omega_after` afterwards.
    SuddenJump {
        omega_before: f64,
        omega_after: f64,
        jump_at: f64,
    },
    Tabulated(TabulatedProtocol),
}

fn check_frequency(name: &str, omega: f64) -> Result<()> {
    if omega.is_finite() && omega > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidProtocol(format!(
            "{name} must be finite and positive, got {omega}"
        )))
    }
}

impl FrequencyProtocol {
    pub fn constant(omega: f64) -> Result<Self> {
        check_frequency("frequency", omega)?;
        Ok(Self::Constant { omega })
    }

    /// Mathieu protocol. Requires `a_bar - 2 q_bar > 0` and, so that `w^2`
    /// stays positive over the whole period, `a_bar > 2 |q_bar|`.
    pub fn mathieu(a_bar: f64, q_bar: f64, scale: f64) -> Result<Self> {
        if !(a_bar.is_finite() && q_bar.is_finite()) {
            return Err(Error::InvalidProtocol("non-finite Mathieu parameters".into()));
        }
        check_frequency("Mathieu time scale", scale)?;
        let floor = a_bar - 2.0 * q_bar;
        if floor <= 0.0 {
            return Err(Error::DegenerateProtocol(floor));
        }
        if a_bar - 2.0 * q_bar.abs() <= 0.0 {
            return Err(Error::InvalidProtocol(format!(
                "w^2 = a - 2q cos(2 tau) reaches {} for a = {a_bar}, q = {q_bar}",
                a_bar - 2.0 * q_bar.abs()
            )));
        }
        Ok(Self::Mathieu { a_bar, q_bar, scale })
    }

    /// Mathieu protocol whose time scale is chosen so that `w(0) = omega0`.
    pub fn mathieu_from_initial(omega0: f64, a_bar: f64, q_bar: f64) -> Result<Self> {
        let scale = mathieu_scale(omega0, a_bar, q_bar)?;
        Self::mathieu(a_bar, q_bar, scale)
    }

    pub fn linear_ramp(omega_start: f64, omega_end: f64, duration: f64) -> Result<Self> {
        check_frequency("ramp start frequency", omega_start)?;
        check_frequency("ramp end frequency", omega_end)?;
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidProtocol(format!(
                "ramp duration must be positive, got {duration}"
            )));
        }
        Ok(Self::LinearRamp {
            omega_start,
            omega_end,
            duration,
        })
    }

    pub fn sudden_jump(omega_before: f64, omega_after: f64, jump_at: f64) -> Result<Self> {
        check_frequency("frequency before the jump", omega_before)?;
        check_frequency("frequency after the jump", omega_after)?;
        if !(jump_at.is_finite() && jump_at >= 0.0) {
            return Err(Error::InvalidProtocol(format!(
                "jump time must be non-negative, got {jump_at}"
            )));
        }
        Ok(Self::SuddenJump {
            omega_before,
            omega_after,
            jump_at,
        })
    }

    /// Squared frequency at `tau`, in the protocol's frequency units.
    pub fn omega_squared(&self, tau: f64) -> Result<f64> {
        let value = match self {
            Self::Constant { omega } => omega * omega,
            Self::Mathieu { a_bar, q_bar, scale } => {
                scale * scale * (a_bar - 2.0 * q_bar * (2.0 * tau).cos())
            }
            Self::LinearRamp {
                omega_start,
                omega_end,
                duration,
            } => {
                let s = (tau / duration).clamp(0.0, 1.0);
                let w = omega_start + (omega_end - omega_start) * s;
                w * w
            }
            Self::SuddenJump {
                omega_before,
                omega_after,
                jump_at,
            } => {
                let w = if tau < *jump_at { omega_before } else { omega_after };
                w * w
            }
            Self::Tabulated(table) => table.eval(tau)?,
        };
        if value.is_finite() && value > 0.0 {
            Ok(value)
        } else {
            Err(Error::NonPositiveFrequency { tau, value })
        }
    }

    /// Left limit of `w^2` at `tau`. Differs from [`Self::omega_squared`] only
    /// at the discontinuity of a sudden jump.
    pub fn omega_squared_left(&self, tau: f64) -> Result<f64> {
        match self {
            Self::SuddenJump {
                omega_before,
                jump_at,
                ..
            } if tau == *jump_at => Ok(omega_before * omega_before),
            _ => self.omega_squared(tau),
        }
    }

    /// `w(tau)`.
    pub fn omega(&self, tau: f64) -> Result<f64> {
        self.omega_squared(tau).map(f64::sqrt)
    }

    /// The factor `phi` in `tau = phi * t`.
    pub fn time_scale(&self) -> f64 {
        match self {
            Self::Mathieu { scale, .. } => *scale,
            _ => 1.0,
        }
    }

    /// Squared frequency measured per unit `tau`: the coefficient of the
    /// equation of motion `x'' + (w / phi)^2 x = 0` in the `tau` variable.
    pub fn rate_squared(&self, tau: f64) -> Result<f64> {
        let phi = self.time_scale();
        Ok(self.omega_squared(tau)? / (phi * phi))
    }

    pub fn rate_squared_left(&self, tau: f64) -> Result<f64> {
        let phi = self.time_scale();
        Ok(self.omega_squared_left(tau)? / (phi * phi))
    }

    /// Points in `(start, end)` where `w^2` or its derivative is
    /// discontinuous; integration must not step across them.
    pub fn breakpoints(&self, start: f64, end: f64) -> Vec<f64> {
        let inside = |t: f64| t > start && t < end;
        match self {
            Self::LinearRamp { duration, .. } if inside(*duration) => vec![*duration],
            Self::SuddenJump { jump_at, .. } if inside(*jump_at) => vec![*jump_at],
            _ => Vec::new(),
        }
    }

    /// Re-expresses the protocol with frequencies divided by `omega_ref`.
    /// Times of non-Mathieu protocols are multiplied by `omega_ref`; the
    /// Mathieu `tau` is already dimensionless and is left unchanged.
    pub fn rescaled(&self, omega_ref: f64) -> Result<Self> {
        check_frequency("reference frequency", omega_ref)?;
        Ok(match self {
            Self::Constant { omega } => Self::Constant {
                omega: omega / omega_ref,
            },
            Self::Mathieu { a_bar, q_bar, scale } => Self::Mathieu {
                a_bar: *a_bar,
                q_bar: *q_bar,
                scale: scale / omega_ref,
            },
            Self::LinearRamp {
                omega_start,
                omega_end,
                duration,
            } => Self::LinearRamp {
                omega_start: omega_start / omega_ref,
                omega_end: omega_end / omega_ref,
                duration: duration * omega_ref,
            },
            Self::SuddenJump {
                omega_before,
                omega_after,
                jump_at,
            } => Self::SuddenJump {
                omega_before: omega_before / omega_ref,
                omega_after: omega_after / omega_ref,
                jump_at: jump_at * omega_ref,
            },
            Self::Tabulated(table) => {
                let r2 = omega_ref * omega_ref;
                Self::Tabulated(TabulatedProtocol::new(
                    table.taus.iter().map(|t| t * omega_ref).collect(),
                    table.values.iter().map(|v| v / r2).collect(),
                    table.interpolation,
                )?)
            }
        })
    }

    /// Short name used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Constant { .. } => "constant",
            Self::Mathieu { .. } => "mathieu",
            Self::LinearRamp { .. } => "linear_ramp",
            Self::SuddenJump { .. } => "sudden_jump",
            Self::Tabulated(_) => "tabulated",
        }
    }
}

/// Time scale `phi = w0 / sqrt(a_bar - 2 q_bar)` that makes the Mathieu
/// protocol start at `w(0) = w0`.
pub fn mathieu_scale(omega0: f64, a_bar: f64, q_bar: f64) -> Result<f64> {
    check_frequency("initial frequency", omega0)?;
    let floor = a_bar - 2.0 * q_bar;
    if !(floor > 0.0) {
        return Err(Error::DegenerateProtocol(floor));
    }
    Ok(omega0 / floor.sqrt())
}
