//! Squeeze x rotation form of the evolution operator.
//!
//! The evolved annihilation operator is `a_t = f a + g a^dagger` with
//! `|f|^2 - |g|^2 = 1`. Writing the evolution operator as `S(xi) R(gamma)`,
//! `xi = r e^{i theta}`, gives `r = arccosh |f| = ln(|f| + |g|)`, `gamma = -arg f` and
//! `theta = arg f + arg g + pi` (reduced to `(-pi, pi]`).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::heisenberg::QTriple;
use crate::integrator::FundamentalState;

/// Residual of `|f|^2 - |g|^2 = 1` above which the state is rejected.
pub const IDENTITY_LIMIT: f64 = 1e-6;

/// Lower band of `|f|` below one that is attributed to roundoff.
pub const ABS_F_CLAMP_BAND: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionParams {
    pub f: Complex64,
    pub g: Complex64,
    /// Squeeze magnitude, `>= 0`.
    pub r: f64,
    /// Squeeze phase in `(-pi, pi]`.
    pub theta: f64,
    /// Rotation angle in `(-pi, pi]`.
    pub gamma: f64,
}

impl EvolutionParams {
    pub fn from_state(state: &FundamentalState, omega0: f64) -> Result<Self> {
        let (f, g) = fg_from_state(state, omega0)?;
        let (r, theta, gamma) = squeeze_params(f, g)?;
        Ok(Self {
            f,
            g,
            r,
            theta,
            gamma,
        })
    }

    /// `|f|^2 - |g|^2 - 1`.
    pub fn identity_residual(&self) -> f64 {
        self.f.norm_sqr() - self.g.norm_sqr() - 1.0
    }

    /// `xi = r e^{i theta}`.
    pub fn xi(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.theta)
    }
}

/// Bogoliubov amplitudes `(f, g)` from the fundamental solutions.
pub fn fg_from_state(state: &FundamentalState, omega0: f64) -> Result<(Complex64, Complex64)> {
    if !(omega0.is_finite() && omega0 > 0.0) {
        return Err(Error::NonPositiveFrequency {
            tau: state.tau,
            value: omega0,
        });
    }
    let FundamentalState { u, du, v, dv, .. } = *state;
    let f = Complex64::new(0.5 * (u + dv), -0.5 * (omega0 * v - du / omega0));
    let g = Complex64::new(0.5 * (u - dv), 0.5 * (omega0 * v + du / omega0));
    let residual = f.norm_sqr() - g.norm_sqr() - 1.0;
    if !(residual.abs() <= IDENTITY_LIMIT) {
        return Err(Error::IdentityViolation { residual });
    }
    Ok((f, g))
}

/// Reduces an angle to `(-pi, pi]`.
pub fn principal_angle(x: f64) -> f64 {
    let mut y = x % (2.0 * PI);
    if y <= -PI {
        y += 2.0 * PI;
    } else if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// `(r, theta, gamma)` from the amplitudes. `theta` is zero when `g = 0`.
pub fn squeeze_params(f: Complex64, g: Complex64) -> Result<(f64, f64, f64)> {
    let mut abs_f = f.norm();
    if abs_f.is_nan() {
        return Err(Error::Domain("|f| is NaN".into()));
    }
    if abs_f < 1.0 {
        if abs_f < 1.0 - ABS_F_CLAMP_BAND {
            return Err(Error::Domain(format!("|f| = {abs_f} is below one")));
        }
        abs_f = 1.0;
    }
    // arccosh|f| = ln(|f| + sqrt(|f|^2 - 1)) = ln(|f| + |g|) on the identity
    // manifold; the second form keeps full precision when |g| is small
    let r = (abs_f - 1.0 + g.norm()).ln_1p().max(0.0);
    let arg_f = f.arg();
    let theta = if g.norm() == 0.0 {
        0.0
    } else {
        principal_angle(arg_f + g.arg() + PI)
    };
    let gamma = principal_angle(-arg_f);
    Ok((r, theta, gamma))
}

/// Non-adiabaticity triple expressed through the squeeze parameters of the
/// evolution operator and the Bogoliubov parameter `r_a`.
///
/// The sign of the third component follows from `<a^2> = -(nbar + 1/2)
/// e^{i theta} sinh 2r` for `S(xi)` acting on a thermal state, so that the
/// triple coincides componentwise with [`crate::heisenberg::q_triple`].
pub fn bar_q_triple(r: f64, theta: f64, r_a: f64) -> QTriple {
    let (c2r, s2r) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let (c2a, s2a) = ((2.0 * r_a).cosh(), (2.0 * r_a).sinh());
    let (ct, st) = (theta.cos(), theta.sin());
    QTriple {
        q: c2r * c2a - s2r * s2a * ct,
        q1: s2r * c2a * ct - c2r * s2a,
        q2: -s2r * st,
    }
}

/// Parameters of the squeezed thermal state `S rho_th S^dagger`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedThermalParams {
    /// Generalised inverse temperature `beta cosh 2r`.
    pub beta_s: f64,
    /// `tanh 2r`, always in `[0, 1)`.
    pub mu: f64,
    pub theta: f64,
}

pub fn squeezed_thermal(beta: f64, r: f64, theta: f64) -> Result<SqueezedThermalParams> {
    if !(beta > 0.0) {
        return Err(Error::InvalidInput(format!("beta = {beta} must be positive")));
    }
    if !(r >= 0.0) {
        return Err(Error::InvalidInput(format!("r = {r} must be non-negative")));
    }
    Ok(SqueezedThermalParams {
        beta_s: beta * (2.0 * r).cosh(),
        mu: (2.0 * r).tanh(),
        theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::{bogoliubov_r, q_triple};
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn initial_state() {
        let (f, g) = fg_from_state(&FundamentalState::INITIAL, 1.0).unwrap();
        assert_eq!(f, Complex64::new(1.0, 0.0));
        assert_eq!(g, Complex64::new(0.0, 0.0));
        assert_eq!(squeeze_params(f, g).unwrap(), (0.0, 0.0, 0.0));
        let p = EvolutionParams::from_state(&FundamentalState::INITIAL, 1.0).unwrap();
        assert_eq!((p.r, p.gamma), (0.0, 0.0));
    }

    #[test]
    fn constant_protocol_is_pure_rotation() {
        let w0: f64 = 1.4;
        for k in 0..30 {
            let tau = 0.29 * k as f64;
            let (c, s) = ((w0 * tau).cos(), (w0 * tau).sin());
            let st = FundamentalState::new(tau, c, -w0 * s, s / w0, c);
            let (f, g) = fg_from_state(&st, w0).unwrap();
            assert!(close(f, Complex64::from_polar(1.0, -w0 * tau), 1e-14));
            assert!(g.norm() < 1e-14);
            let (r, _, gamma) = squeeze_params(f, g).unwrap();
            assert!(r < 1e-6);
            assert!((principal_angle(gamma - w0 * tau)).abs() < 1e-12);
        }
        let (r, theta, gamma) = squeeze_params(Complex64::from_polar(1.0, -0.7), Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!((r, theta), (0.0, 0.0));
        assert!((gamma - 0.7).abs() < 1e-15);
    }

    #[test]
    fn sudden_jump_cross_check() {
        let st = FundamentalState::INITIAL;
        let (f, g) = fg_from_state(&st, 1.0).unwrap();
        let (r, theta, _) = squeeze_params(f, g).unwrap();
        let ra = bogoliubov_r(1.0, 2.0).unwrap();
        let bar = bar_q_triple(r, theta, ra);
        assert!((bar.q - 1.25).abs() < 1e-15);
        let heis = q_triple(&st, 1.0, 2.0).unwrap();
        assert!(bar.max_abs_diff(&heis) < 1e-15);
    }

    #[test]
    fn bar_triple_examples() {
        let t = bar_q_triple(0.3, 0.0, 0.3);
        assert!((t.q - 1.0).abs() < 1e-15 && t.q1.abs() < 1e-15 && t.q2.abs() < 1e-15);
        assert_eq!(bar_q_triple(0.0, 0.0, 0.0), QTriple::ADIABATIC);
    }

    #[test]
    fn identity_violation_detected() {
        let bad = FundamentalState::new(0.0, 1.0, 0.0, 0.0, 1.01);
        assert!(matches!(
            fg_from_state(&bad, 1.0),
            Err(Error::IdentityViolation { .. })
        ));
        assert!(squeeze_params(Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0)).is_err());
        // roundoff just below one is clamped
        let (r, _, _) =
            squeeze_params(Complex64::new(1.0 - 1e-12, 0.0), Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn squeezed_thermal_examples() {
        let p = squeezed_thermal(2.0, 0.0, 0.4).unwrap();
        assert_eq!((p.beta_s, p.mu, p.theta), (2.0, 0.0, 0.4));
        let r = 0.5 * 2f64.acosh();
        let p = squeezed_thermal(1.5, r, 0.0).unwrap();
        assert!((p.beta_s - 3.0).abs() < 1e-14);
        assert!((p.mu - 3f64.sqrt() / 2.0).abs() < 1e-14);
        assert!(squeezed_thermal(1.0, 40.0, 0.0).unwrap().mu <= 1.0);
        assert!(squeezed_thermal(0.0, 0.1, 0.0).is_err());
    }

    #[test]
    fn principal_angle_range() {
        assert_eq!(principal_angle(PI), PI);
        assert_eq!(principal_angle(-PI), PI);
        assert!((principal_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((principal_angle(0.5 + 4.0 * PI) - 0.5).abs() < 1e-12);
    }

    fn state_strategy() -> impl Strategy<Value = FundamentalState> {
        (0.2f64..3.0, -3.0f64..3.0, -3.0f64..3.0)
            .prop_map(|(u, du, v)| FundamentalState::new(0.0, u, du, v, (1.0 + du * v) / u))
    }

    proptest! {
        #[test]
        fn bar_triple_identity(r in 0.0f64..3.0, theta in -PI..PI, ra in -2.0f64..2.0) {
            let t = bar_q_triple(r, theta, ra);
            prop_assert!(t.hyperbolic_residual().abs() <= 1e-10 * t.q * t.q);
        }

        #[test]
        fn branch_shift_invariance(r in 0.0f64..3.0, theta in -PI..PI, ra in -2.0f64..2.0, n in -3i32..3) {
            let a = bar_q_triple(r, theta, ra);
            let b = bar_q_triple(r, theta + 2.0 * PI * n as f64, ra);
            prop_assert!(a.max_abs_diff(&b) <= 1e-12 * a.q);
        }

        #[test]
        fn cross_picture(st in state_strategy(), w0 in 0.3f64..3.0, w in 0.3f64..3.0) {
            let p = EvolutionParams::from_state(&st, w0).unwrap();
            prop_assert!(p.identity_residual().abs() < 1e-9);
            prop_assert!(p.theta > -PI && p.theta <= PI);
            let ra = bogoliubov_r(w0, w).unwrap();
            let bar = bar_q_triple(p.r, p.theta, ra);
            let heis = q_triple(&st, w0, w).unwrap();
            prop_assert!(bar.max_abs_diff(&heis) <= 1e-9 * heis.q, "{:?} vs {:?}", bar, heis);
        }
    }
}
