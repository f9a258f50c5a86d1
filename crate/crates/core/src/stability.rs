//! Floquet stability of the Mathieu equation `u'' + (a - 2q cos 2tau) u = 0`.
//!
//! The coefficient has period `pi`. Integrating both fundamental solutions
//! over one period gives the monodromy matrix `[[u, v], [u', v']](pi)`,
//! whose determinant is the Wronskian (one) and whose trace decides
//! stability: bounded solutions for `|tr| < 2`, exponential growth for
//! `|tr| > 2`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrator::{solve, FundamentalState, IntegratorOptions, MathieuCoefficient};

/// Half-width of the band around `|tr| = 2` labelled marginal.
pub const MARGINAL_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Stable,
    Marginal,
    Unstable,
}

impl Classification {
    pub fn from_trace(trace: f64) -> Self {
        let excess = trace.abs() - 2.0;
        if excess.abs() <= MARGINAL_BAND {
            Self::Marginal
        } else if excess < 0.0 {
            Self::Stable
        } else {
            Self::Unstable
        }
    }

    /// Marginal points are bounded and count as stable for region maps.
    pub fn is_bounded(self) -> bool {
        !matches!(self, Self::Unstable)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Stable => "stable",
            Self::Marginal => "marginal",
            Self::Unstable => "unstable",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyResult {
    pub a_bar: f64,
    pub q_bar: f64,
    /// Fundamental solutions after one period.
    pub period_state: FundamentalState,
    pub trace: f64,
    pub classification: Classification,
    /// `ln |lambda_max|` per period; zero for bounded points.
    pub floquet_exponent: f64,
}

impl MonodromyResult {
    pub fn determinant(&self) -> f64 {
        self.period_state.wronskian()
    }
}

/// Monodromy analysis of the point `(a_bar, q_bar)`.
pub fn monodromy(a_bar: f64, q_bar: f64, tolerance: f64) -> Result<MonodromyResult> {
    if !(a_bar.is_finite() && q_bar.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "non-finite Mathieu point ({a_bar}, {q_bar})"
        )));
    }
    let coef = MathieuCoefficient { a_bar, q_bar };
    let options = IntegratorOptions {
        growth_limit: f64::MAX,
        ..IntegratorOptions::with_tolerance(tolerance)
    };
    let (states, _) = solve(&coef, FundamentalState::INITIAL, &[PI], &options)?;
    let period_state = states[0];
    let trace = period_state.u + period_state.dv;
    let classification = Classification::from_trace(trace);
    let half = 0.5 * trace.abs();
    let floquet_exponent = if half > 1.0 { half.acosh() } else { 0.0 };
    Ok(MonodromyResult {
        a_bar,
        q_bar,
        period_state,
        trace,
        classification,
        floquet_exponent,
    })
}

fn axis(range: (f64, f64), n: usize) -> Vec<f64> {
    let (lo, hi) = range;
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + i as f64 * (hi - lo) / last
            }
        })
        .collect()
}

/// Monodromy analysis over a rectangular grid.
///
/// Results are row-major: one row per `q_bar` value (ascending), `a_bar`
/// varying fastest. Points are evaluated in parallel; the order of the
/// output depends only on the grid.
pub fn scan(
    a_range: (f64, f64),
    q_range: (f64, f64),
    resolution: (usize, usize),
    tolerance: f64,
) -> Result<Vec<MonodromyResult>> {
    let (na, nq) = resolution;
    if na < 2 || nq < 2 {
        return Err(Error::InvalidInput(format!(
            "scan resolution must be at least 2 per axis, got {na} x {nq}"
        )));
    }
    for (lo, hi) in [a_range, q_range] {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::InvalidInput(format!("invalid scan range [{lo}, {hi}]")));
        }
    }
    let a_axis = axis(a_range, na);
    let q_axis = axis(q_range, nq);
    (0..na * nq)
        .into_par_iter()
        .map(|idx| monodromy(a_axis[idx % na], q_axis[idx / na], tolerance))
        .collect()
}
