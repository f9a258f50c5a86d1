//! Heisenberg-picture observables of the evolved thermal state.
//!
//! All functions take frequencies in the same unit system as the
//! derivatives stored in the [`FundamentalState`] (per unit `tau`); the
//! dimensionless results do not depend on that choice.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrator::FundamentalState;
use crate::model::ThermalConfig;

/// Roundoff band below one in which `Q*` is treated as exactly one.
pub const Q_CLAMP_BAND: f64 = 1e-10;

/// Non-adiabaticity parameters `(Q*, Q1*, Q2*)`, tied by
/// `Q*^2 - Q1*^2 - Q2*^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QTriple {
    pub q: f64,
    pub q1: f64,
    pub q2: f64,
}

impl QTriple {
    pub const ADIABATIC: Self = Self {
        q: 1.0,
        q1: 0.0,
        q2: 0.0,
    };

    /// `Q*^2 - Q1*^2 - Q2*^2 - 1`.
    pub fn hyperbolic_residual(&self) -> f64 {
        self.q * self.q - self.q1 * self.q1 - self.q2 * self.q2 - 1.0
    }

    /// Largest componentwise difference from `other`.
    pub fn max_abs_diff(&self, other: &QTriple) -> f64 {
        (self.q - other.q)
            .abs()
            .max((self.q1 - other.q1).abs())
            .max((self.q2 - other.q2).abs())
    }
}

fn check_positive(tau: f64, omega: f64) -> Result<()> {
    if omega.is_finite() && omega > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveFrequency { tau, value: omega })
    }
}

/// Non-adiabaticity triple from the fundamental solutions, the initial
/// frequency `omega0` and the current frequency `omega`.
pub fn q_triple(state: &FundamentalState, omega0: f64, omega: f64) -> Result<QTriple> {
    check_positive(state.tau, omega0)?;
    check_positive(state.tau, omega)?;
    let FundamentalState { u, du, v, dv, .. } = *state;
    let w02 = omega0 * omega0;
    let w2 = omega * omega;
    let denom = 2.0 * omega0 * omega;
    // kinetic-like and potential-like pieces
    let kinetic = w02 * dv * dv + du * du;
    let potential = w2 * (w02 * v * v + u * u);
    Ok(QTriple {
        q: (kinetic + potential) / denom,
        q1: (kinetic - potential) / denom,
        q2: (u * du + w02 * v * dv) / omega0,
    })
}

/// Mean Hamiltonian, Lagrangian and position–momentum correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanValues {
    pub hamiltonian: f64,
    pub lagrangian: f64,
    pub correlation: f64,
}

pub fn mean_values(triple: &QTriple, thermal: &ThermalConfig, omega: f64) -> MeanValues {
    let scale = omega / thermal.omega0 * thermal.energy0;
    MeanValues {
        hamiltonian: scale * triple.q,
        lagrangian: scale * triple.q1,
        correlation: scale * triple.q2,
    }
}

/// Covariance matrix `[[n_H + 1/2, m_H], [m_H*, n_H + 1/2]]` of the
/// instantaneous mode together with the mean values it is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceState {
    pub n_h: f64,
    /// Off-diagonal element `-(nbar + 1/2)(Q1* - i Q2*)`.
    pub m_h: Complex64,
    pub omega: f64,
    pub means: MeanValues,
}

impl CovarianceState {
    pub fn m_h_abs(&self) -> f64 {
        self.m_h.norm()
    }

    /// Smallest eigenvalue of the covariance matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        self.n_h + 0.5 - self.m_h.norm()
    }

    /// `n_H - |m_H|`, which equals the classicality function.
    pub fn classicality_margin(&self) -> f64 {
        self.n_h - self.m_h.norm()
    }
}

pub fn covariance(triple: &QTriple, thermal: &ThermalConfig, omega: f64) -> CovarianceState {
    let half = thermal.nbar + 0.5;
    CovarianceState {
        n_h: half * triple.q - 0.5,
        m_h: Complex64::new(-half * triple.q1, half * triple.q2),
        omega,
        means: mean_values(triple, thermal, omega),
    }
}

/// Position and momentum variances `(<x^2>, <p^2>)` for a particle of mass
/// `mass`, in the unit system of `thermal`.
pub fn variances(state: &FundamentalState, thermal: &ThermalConfig, mass: f64) -> (f64, f64) {
    let e0 = thermal.energy0;
    let w02 = thermal.omega0 * thermal.omega0;
    let FundamentalState { u, du, v, dv, .. } = *state;
    let dx2 = e0 / mass * (u * u / w02 + v * v);
    let dp2 = mass * e0 * (du * du / w02 + dv * dv);
    (dx2, dp2)
}

/// Variances rebuilt from the covariance matrix through the quadratures of
/// the instantaneous mode: `<x^2> = hbar/(m w) (n + 1/2 + Re m)` and
/// `<p^2> = hbar m w (n + 1/2 - Re m)`.
pub fn variances_from_covariance(cov: &CovarianceState, hbar: f64, mass: f64) -> (f64, f64) {
    let diag = cov.n_h + 0.5;
    let re = cov.m_h.re;
    (
        hbar / (mass * cov.omega) * (diag + re),
        hbar * mass * cov.omega * (diag - re),
    )
}

fn clamp_q(q: f64) -> Result<f64> {
    if q.is_nan() {
        return Err(Error::Domain("Q* is NaN".into()));
    }
    if q >= 1.0 {
        Ok(q)
    } else if q >= 1.0 - Q_CLAMP_BAND {
        Ok(1.0)
    } else {
        Err(Error::Domain(format!("Q* = {q} is below one")))
    }
}

/// Classicality function `(nbar + 1/2)(Q* - sqrt(Q*^2 - 1)) - 1/2`.
/// Positive for classical states, negative for non-classical ones.
pub fn classicality(nbar: f64, q: f64) -> Result<f64> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::Domain(format!("nbar = {nbar} must be non-negative")));
    }
    let q = clamp_q(q)?;
    if q.is_infinite() {
        return Ok(-0.5);
    }
    // Q - sqrt(Q^2 - 1) written without cancellation
    let root = ((q - 1.0) * (q + 1.0)).sqrt();
    Ok((nbar + 0.5) / (q + root) - 0.5)
}

/// How far below one an integrated `Q*` may sit (Wronskian drift) before
/// [`classicality_of_triple`] rejects it.
pub const TRIPLE_Q_BAND: f64 = 1e-6;

/// Classicality function evaluated from the whole triple.
///
/// Uses `sqrt(Q*^2 - 1) = hypot(Q1*, Q2*)`, which holds whenever the
/// Wronskian is one and stays accurate near `Q* = 1`, where the square
/// root of `Q*^2 - 1` would amplify roundoff in `Q*`.
pub fn classicality_of_triple(nbar: f64, triple: &QTriple) -> Result<f64> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::Domain(format!("nbar = {nbar} must be non-negative")));
    }
    let q = triple.q;
    if q.is_nan() || q < 1.0 - TRIPLE_Q_BAND {
        return Err(Error::Domain(format!("Q* = {q} is below one")));
    }
    if q.is_infinite() {
        return Ok(-0.5);
    }
    Ok((nbar + 0.5) / (q + triple.q1.hypot(triple.q2)) - 0.5)
}

/// Critical `Q*` at which the classicality function vanishes.
pub fn critical_q(nbar: f64) -> f64 {
    let s = nbar + 0.5;
    (s * s + 0.25) / s
}

/// Squeeze parameter of the Bogoliubov map between the initial and the
/// instantaneous mode: `exp(r_a) = sqrt(w / w0)`.
pub fn bogoliubov_r(omega0: f64, omega: f64) -> Result<f64> {
    check_positive(0.0, omega0)?;
    check_positive(0.0, omega)?;
    Ok(0.5 * (omega / omega0).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{thermal_config, UnitSystem};
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn dimless(nbar: f64) -> ThermalConfig {
        ThermalConfig::from_occupation(&UnitSystem::dimensionless(), 1.0, nbar).unwrap()
    }

    #[test]
    fn initial_instant_is_adiabatic() {
        let t = q_triple(&FundamentalState::INITIAL, 1.0, 1.0).unwrap();
        assert_eq!(t, QTriple::ADIABATIC);
    }

    #[test]
    fn sudden_evaluation() {
        let t = q_triple(&FundamentalState::INITIAL, 1.0, 2.0).unwrap();
        assert_eq!(t.q, 1.25);
        assert_eq!(t.q1, -0.75);
        assert_eq!(t.q2, 0.0);
        assert_eq!(t.hyperbolic_residual(), 0.0);
    }

    #[test]
    fn constant_closed_form_is_adiabatic() {
        let w0: f64 = 1.7;
        for k in 0..50 {
            let tau = 0.37 * k as f64;
            let (c, s) = ((w0 * tau).cos(), (w0 * tau).sin());
            let st = FundamentalState::new(tau, c, -w0 * s, s / w0, c);
            let t = q_triple(&st, w0, w0).unwrap();
            assert!((t.q - 1.0).abs() < 1e-14);
            assert!(t.q1.abs() < 1e-14 && t.q2.abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_non_positive_frequency() {
        assert!(q_triple(&FundamentalState::INITIAL, 0.0, 1.0).is_err());
        assert!(q_triple(&FundamentalState::INITIAL, 1.0, -1.0).is_err());
        assert!(bogoliubov_r(1.0, 0.0).is_err());
    }

    #[test]
    fn mean_value_examples() {
        let th = dimless(0.0);
        let m = mean_values(&QTriple::ADIABATIC, &th, 1.0);
        assert_eq!(m.hamiltonian, th.energy0);
        assert_eq!((m.lagrangian, m.correlation), (0.0, 0.0));

        let t = q_triple(&FundamentalState::INITIAL, 1.0, 2.0).unwrap();
        let m = mean_values(&t, &th, 2.0);
        assert!((m.hamiltonian - 1.25).abs() < 1e-15);

        let doubled = QTriple { q: 2.0 * t.q, ..t };
        assert_eq!(mean_values(&doubled, &th, 2.0).hamiltonian, 2.0 * m.hamiltonian);
    }

    #[test]
    fn covariance_examples() {
        let th = dimless(0.35);
        let c = covariance(&QTriple::ADIABATIC, &th, 1.0);
        assert!((c.n_h - 0.35).abs() < 1e-15);
        assert_eq!(c.m_h_abs(), 0.0);

        let q = 2.0;
        let t = QTriple {
            q,
            q1: 3f64.sqrt(),
            q2: 0.0,
        };
        let c = covariance(&t, &th, 1.0);
        assert!((c.n_h - 1.2).abs() < 1e-12);
        assert!((c.m_h_abs() - 0.85 * 3f64.sqrt()).abs() < 1e-12);
        assert!((c.m_h_abs() - 1.4722).abs() < 1e-4);
    }

    #[test]
    fn vacuum_variances() {
        let th = dimless(0.0);
        let (dx2, dp2) = variances(&FundamentalState::INITIAL, &th, 1.0);
        assert_eq!((dx2, dp2), (0.5, 0.5));
    }

    #[test]
    fn constant_protocol_variance_is_stationary() {
        let th = dimless(0.35);
        let (x0, p0) = variances(&FundamentalState::INITIAL, &th, 1.0);
        for k in 0..40 {
            let tau = 0.21 * k as f64;
            let st = FundamentalState::new(tau, tau.cos(), -tau.sin(), tau.sin(), tau.cos());
            let (x, p) = variances(&st, &th, 1.0);
            assert!((x - x0).abs() < 1e-14 && (p - p0).abs() < 1e-14);
        }
    }

    #[test]
    fn classicality_of_triple_matches_scalar_form() {
        assert_eq!(classicality_of_triple(0.35, &QTriple::ADIABATIC).unwrap(), 0.35);
        for (q1, q2) in [(0.3, 0.0), (0.0, -0.7), (1.5, 2.5), (-40.0, 3.0)] {
            let t = QTriple { q: (1.0f64 + q1 * q1 + q2 * q2).sqrt(), q1, q2 };
            let a = classicality_of_triple(0.8, &t).unwrap();
            let b = classicality(0.8, t.q).unwrap();
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
        // Wronskian drift just below one is tolerated, gross violations are not
        let drift = QTriple { q: 1.0 - 1e-10, q1: 1e-12, q2: 0.0 };
        assert!((classicality_of_triple(0.35, &drift).unwrap() - 0.35).abs() < 1e-9);
        let bad = QTriple { q: 0.9, q1: 0.0, q2: 0.0 };
        assert!(classicality_of_triple(0.35, &bad).is_err());
    }

    #[test]
    fn classicality_examples() {
        for nbar in [0.0, 0.35, 3.0] {
            assert!((classicality(nbar, 1.0).unwrap() - nbar).abs() < 1e-15);
        }
        assert!(classicality(0.35, critical_q(0.35)).unwrap().abs() < 1e-12);
        assert!((classicality(0.35, 1e9).unwrap() + 0.5).abs() < 1e-9);
        assert_eq!(classicality(0.35, f64::INFINITY).unwrap(), -0.5);
        // roundoff below one is clamped, real violations are not
        assert!((classicality(0.35, 1.0 - 1e-12).unwrap() - 0.35).abs() < 1e-15);
        assert!(classicality(0.35, 0.99).is_err());
        assert!(classicality(-0.1, 1.5).is_err());
    }

    #[test]
    fn critical_examples() {
        assert_eq!(critical_q(0.0), 1.0);
        assert!((critical_q(0.35) - 0.9725 / 0.85).abs() < 1e-15);
        assert!((critical_q(0.35) - 1.14412).abs() < 1e-5);
        let mut prev = critical_q(0.5);
        for k in 1..=200 {
            let n = 0.5 + 0.1 * k as f64;
            let q = critical_q(n);
            assert!(q > prev);
            prev = q;
        }
        assert!((critical_q(1e6) / 1e6 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn bogoliubov_examples() {
        assert_eq!(bogoliubov_r(1.0, 1.0).unwrap(), 0.0);
        assert!((bogoliubov_r(1.0, 4.0).unwrap() - LN_2).abs() < 1e-15);
        assert_eq!(bogoliubov_r(3.0, 5.0).unwrap(), -bogoliubov_r(5.0, 3.0).unwrap());
    }

    #[test]
    fn si_units_give_same_occupation_from_hamiltonian() {
        let units = UnitSystem::si(40.0 * crate::model::units::ATOMIC_MASS);
        let w0 = 2.0 * std::f64::consts::PI * 4.0e6;
        let th = thermal_config(&units, w0, 1.42e-4).unwrap();
        let st = FundamentalState::new(0.0, 0.8, -0.3 * w0, 0.4 / w0, (1.0 + 0.3 * 0.4) / 0.8);
        let w = 1.3 * w0;
        let t = q_triple(&st, w0, w).unwrap();
        let c = covariance(&t, &th, w);
        let lhs = c.n_h + 0.5;
        let rhs = c.means.hamiltonian / (units.hbar * w);
        assert!(((lhs - rhs) / rhs).abs() < 1e-10);
        let (dx2, dp2) = variances(&st, &th, units.mass);
        let (rx2, rp2) = variances_from_covariance(&c, units.hbar, units.mass);
        assert!(((dx2 - rx2) / dx2).abs() < 1e-8);
        assert!(((dp2 - rp2) / dp2).abs() < 1e-8);
    }

    fn state_strategy() -> impl Strategy<Value = FundamentalState> {
        (0.2f64..3.0, -3.0f64..3.0, -3.0f64..3.0).prop_map(|(u, du, v)| {
            // choose dv so that the Wronskian is exactly one
            FundamentalState::new(0.0, u, du, v, (1.0 + du * v) / u)
        })
    }

    proptest! {
        #[test]
        fn hyperbolic_identity(st in state_strategy(), w0 in 0.2f64..5.0, w in 0.2f64..5.0) {
            let t = q_triple(&st, w0, w).unwrap();
            prop_assert!(t.hyperbolic_residual().abs() <= 1e-8 * t.q.max(1.0).powi(2));
            prop_assert!(t.q >= 1.0 - 1e-12);
        }

        #[test]
        fn classification_consistency(nbar in 0.0f64..10.0, q in 1.0f64..100.0) {
            let c = classicality(nbar, q).unwrap();
            prop_assert!(c > -0.5 && c <= nbar + 1e-15);
            let qc = critical_q(nbar);
            // away from the threshold itself the sign test must agree
            if (q - qc).abs() > 1e-12 * qc {
                prop_assert_eq!(c < 0.0, q > qc);
            }
        }

        #[test]
        fn covariance_invariants(st in state_strategy(), nbar in 0.0f64..10.0, w in 0.2f64..5.0) {
            let th = dimless(nbar);
            let t = q_triple(&st, 1.0, w).unwrap();
            let c = covariance(&t, &th, w);
            let half = nbar + 0.5;
            let purity = (c.n_h + 0.5).powi(2) - c.m_h.norm_sqr();
            prop_assert!(((purity - half * half) / (half * half)).abs() <= 1e-8 * t.q * t.q);
            prop_assert!(c.min_eigenvalue() >= -1e-9 * t.q);
            let expected = half * (t.q * t.q - 1.0).max(0.0).sqrt();
            prop_assert!((c.m_h_abs() - expected).abs() <= 1e-8 * t.q);
            let (dx2, dp2) = variances(&st, &th, 1.0);
            let (rx2, rp2) = variances_from_covariance(&c, 1.0, 1.0);
            prop_assert!(((dx2 - rx2) / dx2).abs() < 1e-8);
            prop_assert!(((dp2 - rp2) / dp2).abs() < 1e-8);
            prop_assert!(dx2 * dp2 >= 0.25 * (1.0 - 1e-12));
            let classicality_value = classicality(nbar, t.q).unwrap();
            prop_assert!((c.classicality_margin() - classicality_value).abs() < 1e-8 * t.q);
        }
    }
}
