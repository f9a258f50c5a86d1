//! End-to-end runs: integrate a protocol and evaluate every observable on
//! the output grid.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::Result;
use crate::evolution_op::{bar_q_triple, EvolutionParams};
use crate::heisenberg::{
    bogoliubov_r, classicality_of_triple, covariance, critical_q, q_triple, variances, CovarianceState,
    QTriple,
};
use crate::integrator::{integrate, FundamentalState, StepStats, DEFAULT_TOLERANCE};
use crate::model::{FrequencyProtocol, ThermalConfig};

pub const DEFAULT_TAU_END: f64 = 12.0 * PI;
pub const DEFAULT_SAMPLES: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationSettings {
    pub tau_end: f64,
    pub samples: usize,
    pub tolerance: f64,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        Self {
            tau_end: DEFAULT_TAU_END,
            samples: DEFAULT_SAMPLES,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

/// Every observable at one output time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub tau: f64,
    /// Trap frequency `w(tau)` in the protocol's frequency units.
    pub omega: f64,
    pub state: FundamentalState,
    pub triple: QTriple,
    pub classicality: f64,
    pub covariance: CovarianceState,
    pub evolution: EvolutionParams,
    pub r_a: f64,
    /// The triple rebuilt from `(r, theta, r_a)`.
    pub bar_triple: QTriple,
    /// `(<x^2>, <p^2>)` in the thermal state's unit system.
    pub variances: (f64, f64),
}

impl Sample {
    pub fn is_nonclassical(&self) -> bool {
        self.classicality < 0.0
    }

    pub fn wronskian_residual(&self) -> f64 {
        self.state.wronskian() - 1.0
    }

    pub fn hyperbolic_residual(&self) -> f64 {
        self.triple.hyperbolic_residual()
    }

    pub fn fg_residual(&self) -> f64 {
        self.evolution.identity_residual()
    }

    pub fn cross_picture_residual(&self) -> f64 {
        self.triple.max_abs_diff(&self.bar_triple)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub protocol: FrequencyProtocol,
    pub thermal: ThermalConfig,
    pub settings: SimulationSettings,
    pub samples: Vec<Sample>,
    pub stats: StepStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub samples: usize,
    pub nbar: f64,
    pub critical_q: f64,
    pub max_q: f64,
    pub max_q_minus_one: f64,
    pub final_q: f64,
    pub min_classicality: f64,
    pub final_classicality: f64,
    pub first_nonclassical_tau: Option<f64>,
    pub classicality_sign_changes: usize,
    /// Largest `Q*` over the second half of the run divided by the largest
    /// over the first half.
    pub q_envelope_growth: f64,
    pub max_abs_r_minus_r_a: f64,
    pub max_wronskian_residual: f64,
    pub max_hyperbolic_residual: f64,
    pub max_fg_residual: f64,
    pub max_cross_picture_residual: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

fn max_abs(values: impl Iterator<Item = f64>) -> f64 {
    values.map(f64::abs).fold(0.0, f64::max)
}

impl Run {
    pub fn summary(&self) -> RunSummary {
        let s = &self.samples;
        let half = s.len() / 2;
        let max_q_of = |xs: &[Sample]| xs.iter().map(|x| x.triple.q).fold(f64::MIN, f64::max);
        let max_q = max_q_of(s);
        let sign_changes = s
            .windows(2)
            .filter(|w| (w[0].classicality < 0.0) != (w[1].classicality < 0.0))
            .count();
        RunSummary {
            samples: s.len(),
            nbar: self.thermal.nbar,
            critical_q: critical_q(self.thermal.nbar),
            max_q,
            max_q_minus_one: max_q - 1.0,
            final_q: s.last().map_or(f64::NAN, |x| x.triple.q),
            min_classicality: s.iter().map(|x| x.classicality).fold(f64::MAX, f64::min),
            final_classicality: s.last().map_or(f64::NAN, |x| x.classicality),
            first_nonclassical_tau: s.iter().find(|x| x.is_nonclassical()).map(|x| x.tau),
            classicality_sign_changes: sign_changes,
            q_envelope_growth: if half > 0 {
                max_q_of(&s[half..]) / max_q_of(&s[..half])
            } else {
                1.0
            },
            max_abs_r_minus_r_a: max_abs(s.iter().map(|x| x.evolution.r - x.r_a)),
            max_wronskian_residual: max_abs(s.iter().map(Sample::wronskian_residual)),
            max_hyperbolic_residual: max_abs(s.iter().map(Sample::hyperbolic_residual)),
            max_fg_residual: max_abs(s.iter().map(Sample::fg_residual)),
            max_cross_picture_residual: max_abs(s.iter().map(Sample::cross_picture_residual)),
            accepted_steps: self.stats.accepted,
            rejected_steps: self.stats.rejected,
        }
    }
}

/// Evaluates all observables for one integrated state.
///
/// `thermal.omega0` is the initial frequency in the protocol's units.
pub fn evaluate(
    protocol: &FrequencyProtocol,
    thermal: &ThermalConfig,
    state: &FundamentalState,
) -> Result<Sample> {
    let phi = protocol.time_scale();
    let omega = protocol.omega(state.tau)?;
    // observables are evaluated with rates per unit tau, matching the state
    let rate0 = thermal.omega0 / phi;
    let rate = omega / phi;
    let triple = q_triple(state, rate0, rate)?;
    let c = classicality_of_triple(thermal.nbar, &triple)?;
    let cov = covariance(&triple, thermal, omega);
    let evolution = EvolutionParams::from_state(state, rate0)?;
    let r_a = bogoliubov_r(rate0, rate)?;
    let bar_triple = bar_q_triple(evolution.r, evolution.theta, r_a);
    let physical = FundamentalState::new(
        state.tau / phi,
        state.u,
        state.du * phi,
        state.v / phi,
        state.dv,
    );
    let var = variances(&physical, thermal, thermal.units.mass);
    Ok(Sample {
        tau: state.tau,
        omega,
        state: *state,
        triple,
        classicality: c,
        covariance: cov,
        evolution,
        r_a,
        bar_triple,
        variances: var,
    })
}

/// Integrates `protocol` over `[0, settings.tau_end]` and evaluates every
/// observable on a uniform grid of `settings.samples` points.
pub fn simulate(
    protocol: &FrequencyProtocol,
    thermal: &ThermalConfig,
    settings: &SimulationSettings,
) -> Result<Run> {
    let grid = crate::integrator::uniform_grid(settings.tau_end, settings.samples);
    let traj = integrate(protocol, settings.tau_end, &grid, settings.tolerance)?;
    let samples = traj
        .states
        .iter()
        .map(|s| evaluate(protocol, thermal, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(Run {
        protocol: protocol.clone(),
        thermal: *thermal,
        settings: *settings,
        samples,
        stats: traj.stats,
    })
}
