//! Fundamental solutions of `x'' + W(tau) x = 0`.
//!
//! Both solutions share the coefficient `W = (w / phi)^2`, so they are
//! integrated together as the four-component system `(u, u', v, v')` with
//! `u(0) = 1, u'(0) = 0, v(0) = 0, v'(0) = 1`. The Wronskian
//! `u v' - u' v` is then identically one and serves as the accuracy monitor.
//!
//! The adaptive driver is Dormand–Prince 5(4) with its fourth-order
//! continuous extension for output between accepted steps. Steps never
//! cross a coefficient breakpoint (ramp end, sudden jump); the integration
//! is split there instead.

use crate::error::{Error, Result};
use crate::model::FrequencyProtocol;

/// The squared rate `W(tau)` of a linear second-order equation.
pub trait Coefficient {
    fn rate_squared(&self, tau: f64) -> Result<f64>;

    /// Left limit at `tau`; only differs at jump discontinuities.
    fn rate_squared_left(&self, tau: f64) -> Result<f64> {
        self.rate_squared(tau)
    }

    /// Discontinuities of `W` or `W'` strictly inside `(start, end)`.
    fn breakpoints(&self, _start: f64, _end: f64) -> Vec<f64> {
        Vec::new()
    }
}

impl Coefficient for FrequencyProtocol {
    fn rate_squared(&self, tau: f64) -> Result<f64> {
        FrequencyProtocol::rate_squared(self, tau)
    }

    fn rate_squared_left(&self, tau: f64) -> Result<f64> {
        FrequencyProtocol::rate_squared_left(self, tau)
    }

    fn breakpoints(&self, start: f64, end: f64) -> Vec<f64> {
        FrequencyProtocol::breakpoints(self, start, end)
    }
}

/// `W(tau) = a - 2q cos(2 tau)` with no positivity requirement, as needed
/// for stability analysis across the whole `(a, q)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MathieuCoefficient {
    pub a_bar: f64,
    pub q_bar: f64,
}

impl Coefficient for MathieuCoefficient {
    fn rate_squared(&self, tau: f64) -> Result<f64> {
        Ok(self.a_bar - 2.0 * self.q_bar * (2.0 * tau).cos())
    }
}

/// `W(end - s)`: the time-reversed coefficient.
#[derive(Debug, Clone, Copy)]
pub struct Reversed<'a, C: ?Sized> {
    pub inner: &'a C,
    pub end: f64,
}

impl<C: Coefficient + ?Sized> Coefficient for Reversed<'_, C> {
    fn rate_squared(&self, s: f64) -> Result<f64> {
        // moving forward in s walks backward in tau
        self.inner.rate_squared_left(self.end - s)
    }

    fn rate_squared_left(&self, s: f64) -> Result<f64> {
        self.inner.rate_squared(self.end - s)
    }

    fn breakpoints(&self, start: f64, end: f64) -> Vec<f64> {
        let mut points: Vec<f64> = self
            .inner
            .breakpoints(self.end - end, self.end - start)
            .into_iter()
            .map(|t| self.end - t)
            .collect();
        points.sort_by(f64::total_cmp);
        points
    }
}

/// `(u, u', v, v')` at time `tau`; derivatives are per unit `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalState {
    pub tau: f64,
    pub u: f64,
    pub du: f64,
    pub v: f64,
    pub dv: f64,
}

impl FundamentalState {
    /// The canonical initial conditions at `tau = 0`.
    pub const INITIAL: Self = Self {
        tau: 0.0,
        u: 1.0,
        du: 0.0,
        v: 0.0,
        dv: 1.0,
    };

    pub fn new(tau: f64, u: f64, du: f64, v: f64, dv: f64) -> Self {
        Self { tau, u, du, v, dv }
    }

    pub fn wronskian(&self) -> f64 {
        wronskian(self)
    }

    pub fn is_finite(&self) -> bool {
        [self.tau, self.u, self.du, self.v, self.dv]
            .iter()
            .all(|x| x.is_finite())
    }

    fn from_vec(tau: f64, y: [f64; 4]) -> Self {
        Self::new(tau, y[0], y[1], y[2], y[3])
    }

    fn to_vec(self) -> [f64; 4] {
        [self.u, self.du, self.v, self.dv]
    }
}

/// `u v' - u' v`.
pub fn wronskian(state: &FundamentalState) -> f64 {
    state.u * state.dv - state.du * state.v
}

/// State immediately after an instantaneous frequency jump `w0 -> w1`
/// starting from the initial instant: the sudden limit leaves the solutions
/// untouched, only the frequency used to evaluate observables changes.
pub fn sudden_jump_state(omega0: f64, omega1: f64) -> Result<FundamentalState> {
    for w in [omega0, omega1] {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::NonPositiveFrequency {
                tau: 0.0,
                value: w,
            });
        }
    }
    Ok(FundamentalState::INITIAL)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    /// Relative and absolute local error tolerance.
    pub tolerance: f64,
    pub max_steps: usize,
    /// Abort with [`Error::GrowthOverflow`] once `|u|` or `|v|` exceeds this.
    pub growth_limit: f64,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-11;
pub const DEFAULT_GROWTH_LIMIT: f64 = 1e12;
pub const DEFAULT_OUTPUT_POINTS: usize = 2000;

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            max_steps: 50_000_000,
            growth_limit: DEFAULT_GROWTH_LIMIT,
        }
    }
}

impl IntegratorOptions {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self {
            tolerance,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1e-13..=1e-4).contains(&self.tolerance) {
            return Err(Error::InvalidInput(format!(
                "tolerance {} outside [1e-13, 1e-4]",
                self.tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Solution sampled on an output grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<FundamentalState>,
    pub protocol: FrequencyProtocol,
    pub tolerance: f64,
    pub stats: StepStats,
    /// `max |wronskian - 1|` over the samples.
    pub max_wronskian_drift: f64,
}

/// `n` uniformly spaced points on `[0, tau_end]`, both ends included.
pub fn uniform_grid(tau_end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![tau_end],
        _ => {
            let last = (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { tau_end } else { i as f64 * tau_end / last })
                .collect()
        }
    }
}

/// Integrates the fundamental solutions of `protocol` from the canonical
/// initial state up to `tau_end`, sampled at `output_grid`.
pub fn integrate(
    protocol: &FrequencyProtocol,
    tau_end: f64,
    output_grid: &[f64],
    tolerance: f64,
) -> Result<Trajectory> {
    integrate_with(protocol, tau_end, output_grid, &IntegratorOptions::with_tolerance(tolerance))
}

pub fn integrate_with(
    protocol: &FrequencyProtocol,
    tau_end: f64,
    output_grid: &[f64],
    options: &IntegratorOptions,
) -> Result<Trajectory> {
    if !(tau_end.is_finite() && tau_end > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tau_end must be positive, got {tau_end}"
        )));
    }
    if output_grid.iter().any(|&t| !(0.0..=tau_end).contains(&t)) {
        return Err(Error::InvalidInput(format!(
            "output grid must lie inside [0, {tau_end}]"
        )));
    }
    let (states, stats) = solve(protocol, FundamentalState::INITIAL, output_grid, options)?;
    let max_wronskian_drift = states
        .iter()
        .map(|s| (s.wronskian() - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(Trajectory {
        states,
        protocol: protocol.clone(),
        tolerance: options.tolerance,
        stats,
        max_wronskian_drift,
    })
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

type Vec4 = [f64; 4];

#[inline]
fn rhs(w2: f64, y: &Vec4) -> Vec4 {
    [y[1], -w2 * y[0], y[3], -w2 * y[2]]
}

#[inline]
fn combine(y: &Vec4, h: f64, terms: &[(f64, &Vec4)]) -> Vec4 {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

/// Coefficients of the continuous extension over one accepted step.
struct Dense {
    t: f64,
    h: f64,
    r: [Vec4; 5],
}

impl Dense {
    fn eval(&self, tau: f64) -> Vec4 {
        let s = (tau - self.t) / self.h;
        let s1 = 1.0 - s;
        let mut out = [0.0; 4];
        for (i, o) in out.iter_mut().enumerate() {
            let r = &self.r;
            *o = r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])));
        }
        out
    }
}

/// Adaptive integration from `initial` through the sorted `grid`.
///
/// Grid points must be non-decreasing and not precede `initial.tau`; a grid
/// point equal to `initial.tau` reproduces `initial` exactly.
pub fn solve<C: Coefficient + ?Sized>(
    coef: &C,
    initial: FundamentalState,
    grid: &[f64],
    options: &IntegratorOptions,
) -> Result<(Vec<FundamentalState>, StepStats)> {
    options.validate()?;
    if !initial.is_finite() {
        return Err(Error::InvalidInput("non-finite initial state".into()));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) || grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidInput("output grid must be sorted and finite".into()));
    }
    if grid.first().is_some_and(|&t| t < initial.tau) {
        return Err(Error::InvalidInput("output grid starts before the initial time".into()));
    }

    let mut out = Vec::with_capacity(grid.len());
    let mut stats = StepStats::default();
    let Some(&end) = grid.last() else {
        return Ok((out, stats));
    };

    let mut next = 0;
    while next < grid.len() && grid[next] == initial.tau {
        out.push(FundamentalState { tau: grid[next], ..initial });
        next += 1;
    }

    let mut boundaries = coef.breakpoints(initial.tau, end);
    boundaries.push(end);

    let tol = options.tolerance;
    let mut t = initial.tau;
    let mut y = initial.to_vec();
    let mut h = 0.0;

    for &seg_end in &boundaries {
        if seg_end <= t {
            continue;
        }
        let w2 = coef.rate_squared(t)?;
        stats.evaluations += 1;
        let mut k1 = rhs(w2, &y);
        if h == 0.0 {
            h = 0.5 * tol.powf(0.2) / w2.abs().sqrt().max(1.0);
        }
        let mut last_rejected = false;

        while t < seg_end {
            if stats.accepted + stats.rejected >= options.max_steps {
                return Err(Error::StepFailure {
                    tau: t,
                    reason: format!("exceeded {} steps", options.max_steps),
                });
            }
            let mut finishing = false;
            if t + h >= seg_end || (seg_end - t - h) < 1e-12 * h {
                h = seg_end - t;
                finishing = true;
            }
            if h <= 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepFailure {
                    tau: t,
                    reason: format!("step size underflow (h = {h:e})"),
                });
            }
            let t_new = if finishing { seg_end } else { t + h };

            let y2 = combine(&y, h, &[(A21, &k1)]);
            let k2 = rhs(coef.rate_squared(t + C2 * h)?, &y2);
            let y3 = combine(&y, h, &[(A31, &k1), (A32, &k2)]);
            let k3 = rhs(coef.rate_squared(t + C3 * h)?, &y3);
            let y4 = combine(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            let k4 = rhs(coef.rate_squared(t + C4 * h)?, &y4);
            let y5 = combine(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            let k5 = rhs(coef.rate_squared(t + C5 * h)?, &y5);
            let w2_end = if finishing {
                coef.rate_squared_left(t_new)?
            } else {
                coef.rate_squared(t_new)?
            };
            let y6 = combine(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            );
            let k6 = rhs(w2_end, &y6);
            let y_new = combine(
                &y,
                h,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let k7 = rhs(w2_end, &y_new);
            stats.evaluations += 5;

            let mut err_sq = 0.0;
            for i in 0..4 {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let scale = tol + tol * y[i].abs().max(y_new[i].abs());
                err_sq += (e / scale).powi(2);
            }
            let err = (err_sq / 4.0).sqrt();

            if !err.is_finite() {
                stats.rejected += 1;
                h *= 0.2;
                last_rejected = true;
                continue;
            }

            if err <= 1.0 {
                stats.accepted += 1;
                if next < grid.len() && grid[next] <= t_new {
                    let mut dense: Option<Dense> = None;
                    while next < grid.len() && grid[next] <= t_new {
                        let g = grid[next];
                        let value = if g == t_new {
                            y_new
                        } else {
                            let d = dense.get_or_insert_with(|| {
                                let mut r = [[0.0; 4]; 5];
                                for i in 0..4 {
                                    let dy = y_new[i] - y[i];
                                    let bspl = h * k1[i] - dy;
                                    r[0][i] = y[i];
                                    r[1][i] = dy;
                                    r[2][i] = bspl;
                                    r[3][i] = dy - h * k7[i] - bspl;
                                    r[4][i] = h
                                        * (D1 * k1[i]
                                            + D3 * k3[i]
                                            + D4 * k4[i]
                                            + D5 * k5[i]
                                            + D6 * k6[i]
                                            + D7 * k7[i]);
                                }
                                Dense { t, h, r }
                            });
                            d.eval(g)
                        };
                        out.push(FundamentalState::from_vec(g, value));
                        next += 1;
                    }
                }
                t = t_new;
                y = y_new;
                k1 = k7;
                if y[0].abs() > options.growth_limit || y[2].abs() > options.growth_limit {
                    return Err(Error::GrowthOverflow {
                        tau: t,
                        limit: options.growth_limit,
                    });
                }
                let mut factor = (0.9 * err.powf(-0.2)).clamp(0.2, 10.0);
                if last_rejected {
                    factor = factor.min(1.0);
                }
                if !finishing {
                    h *= factor;
                }
                last_rejected = false;
            } else {
                stats.rejected += 1;
                h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                last_rejected = true;
            }
        }
    }

    Ok((out, stats))
}

/// Classical fourth-order Runge–Kutta with `steps` equal steps from
/// `initial` to `tau_end`.
pub fn rk4_fixed<C: Coefficient + ?Sized>(
    coef: &C,
    initial: FundamentalState,
    tau_end: f64,
    steps: usize,
) -> Result<FundamentalState> {
    if steps == 0 {
        return Err(Error::InvalidInput("rk4 needs at least one step".into()));
    }
    let h = (tau_end - initial.tau) / steps as f64;
    let mut y = initial.to_vec();
    let mut t = initial.tau;
    for i in 0..steps {
        let t_next = if i + 1 == steps {
            tau_end
        } else {
            initial.tau + (i + 1) as f64 * h
        };
        let w_a = coef.rate_squared(t)?;
        let w_m = coef.rate_squared(t + 0.5 * h)?;
        let w_b = coef.rate_squared_left(t_next)?;
        let k1 = rhs(w_a, &y);
        let k2 = rhs(w_m, &combine(&y, 0.5 * h, &[(1.0, &k1)]));
        let k3 = rhs(w_m, &combine(&y, 0.5 * h, &[(1.0, &k2)]));
        let k4 = rhs(w_b, &combine(&y, h, &[(1.0, &k3)]));
        y = combine(
            &y,
            h,
            &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)],
        );
        t = t_next;
    }
    Ok(FundamentalState::from_vec(t, y))
}
