//! Whole-pipeline properties of the integrated dynamics.

use std::f64::consts::PI;

use iontrap::config::Config;
use iontrap::integrator::{integrate, solve, uniform_grid, FundamentalState, IntegratorOptions, Reversed};
use iontrap::model::units::ATOMIC_MASS as ATOMIC_MASS_KG;
use iontrap::model::{thermal_config, UnitSystem};
use iontrap::simulation::{simulate, SimulationSettings};
use iontrap::{FrequencyProtocol, ThermalConfig};

fn dimless(nbar: f64) -> ThermalConfig {
    ThermalConfig::from_occupation(&UnitSystem::dimensionless(), 1.0, nbar).unwrap()
}

fn protocols() -> Vec<(FrequencyProtocol, f64)> {
    vec![
        (FrequencyProtocol::constant(1.0).unwrap(), 30.0),
        (FrequencyProtocol::constant(2.3).unwrap(), 30.0),
        (FrequencyProtocol::linear_ramp(1.0, 2.0, 20.0 * PI).unwrap(), 24.0 * PI),
        (FrequencyProtocol::linear_ramp(1.0, 0.5, 8.0).unwrap(), 20.0),
        (FrequencyProtocol::sudden_jump(1.0, 2.0, 2.0).unwrap(), 20.0),
        (FrequencyProtocol::sudden_jump(1.0, 0.3, 0.0).unwrap(), 20.0),
        (FrequencyProtocol::mathieu_from_initial(1.0, 6.0, 0.5).unwrap(), 12.0 * PI),
        (FrequencyProtocol::mathieu_from_initial(1.0, 3.7, 0.8).unwrap(), 12.0 * PI),
        (FrequencyProtocol::mathieu_from_initial(1.0, 4.2, 1.2).unwrap(), 12.0 * PI),
    ]
}

#[test]
fn wronskian_is_conserved_at_default_tolerance() {
    for (p, end) in protocols() {
        let grid = uniform_grid(end, 2000);
        let traj = integrate(&p, end, &grid, 1e-11).unwrap();
        assert!(traj.max_wronskian_drift <= 1e-9, "{p:?}: {}", traj.max_wronskian_drift);
    }
}

#[test]
fn time_reversal_returns_to_initial_state() {
    let options = IntegratorOptions::with_tolerance(1e-12);
    for (p, end) in protocols() {
        let (fwd, _) = solve(&p, FundamentalState::INITIAL, &[end], &options).unwrap();
        let s = fwd[0];
        // with s = end - tau, derivatives change sign
        let start = FundamentalState::new(0.0, s.u, -s.du, s.v, -s.dv);
        let rev = Reversed { inner: &p, end };
        let (back, _) = solve(&rev, start, &[end], &options).unwrap();
        let b = back[0];
        let err = [(b.u - 1.0), b.du, b.v, (b.dv + 1.0)]
            .iter()
            .map(|x| x.abs())
            .fold(0.0, f64::max);
        let scale = s.u.abs().max(s.v.abs()).max(1.0);
        assert!(err <= 1e-7 * scale, "{p:?}: {err}");
    }
}

#[test]
fn si_and_dimensionless_pipelines_agree() {
    let text = r#"
        [protocol]
        kind = "linear_ramp"
        final_frequency_hz = 7.0e6
        ramp_duration_s = 1.0e-6
        [thermal]
        trap_frequency_hz = 4.0e6
        temperature_k = 1.42e-4
        [simulation]
        duration_s = 1.5e-6
        samples = 2000
        tolerance = 1e-12
    "#;
    let cfg = Config::from_toml_str(text).unwrap();
    let dimensionless = simulate(cfg.protocol.as_ref().unwrap(), &cfg.thermal, &cfg.simulation).unwrap();

    // the same run in seconds and rad/s
    let omega0 = cfg.thermal_si.omega0;
    let si_settings = SimulationSettings {
        tau_end: cfg.conversion.time_to_si(cfg.simulation.tau_end),
        ..cfg.simulation
    };
    let si = simulate(cfg.protocol_si.as_ref().unwrap(), &cfg.thermal_si, &si_settings).unwrap();
    for (a, b) in dimensionless.samples.iter().zip(&si.samples) {
        assert!(((a.triple.q - b.triple.q) / a.triple.q).abs() <= 1e-9);
        assert!((a.classicality - b.classicality).abs() <= 1e-9);
        assert!((b.omega / omega0 - a.omega).abs() <= 1e-12);
    }

    // variances carry units: <x^2> scales with the length unit squared
    let lu = cfg.conversion.length_unit();
    let (x_si, _) = si.samples[0].variances;
    let (x_dl, _) = dimensionless.samples[0].variances;
    let mass_ratio = cfg.thermal_si.units.mass / ATOMIC_MASS_KG;
    assert!((mass_ratio - 40.0).abs() < 1e-9);
    assert!(((x_si / (lu * lu) - x_dl) / x_dl).abs() < 1e-9);
}

#[test]
fn mathieu_pipeline_is_unit_independent() {
    let cfg = Config::from_toml_str(
        "[protocol]\nkind = \"mathieu\"\na_bar = 3.7\nq_bar = 0.8\n[simulation]\nsamples = 2000\ntolerance = 1e-12\n",
    )
    .unwrap();
    let a = simulate(cfg.protocol.as_ref().unwrap(), &cfg.thermal, &cfg.simulation).unwrap();
    let b = simulate(cfg.protocol_si.as_ref().unwrap(), &cfg.thermal_si, &cfg.simulation).unwrap();
    for (x, y) in a.samples.iter().zip(&b.samples) {
        assert!(((x.triple.q - y.triple.q) / x.triple.q).abs() <= 1e-9);
    }
}

#[test]
fn squeeze_magnitude_is_continuous() {
    for (p, end) in protocols() {
        let run = simulate(
            &p,
            &dimless(0.35),
            &SimulationSettings {
                tau_end: end,
                samples: 4000,
                tolerance: 1e-11,
            },
        )
        .unwrap();
        let dt = end / 3999.0;
        for w in run.samples.windows(2) {
            let jump = (w[1].evolution.r - w[0].evolution.r).abs();
            // r depends only on the state, which is continuous even across jumps
            assert!(jump <= 5.0 * dt * (1.0 + w[1].triple.q), "{p:?} at {}: {jump}", w[1].tau);
        }
    }
}

#[test]
fn slower_ramps_are_more_adiabatic() {
    let finals: Vec<f64> = [1.0, 3.0, 10.0, 30.0]
        .iter()
        .map(|periods| {
            let duration = 2.0 * PI * periods;
            let p = FrequencyProtocol::linear_ramp(1.0, 2.0, duration).unwrap();
            let run = simulate(
                &p,
                &dimless(0.35),
                &SimulationSettings {
                    tau_end: duration + 1.0,
                    samples: 2000,
                    tolerance: 1e-11,
                },
            )
            .unwrap();
            run.samples.last().unwrap().triple.q - 1.0
        })
        .collect();
    for w in finals.windows(2) {
        assert!(w[1] < w[0], "{finals:?}");
    }
}

#[test]
fn classicality_zero_coincides_with_covariance_crossing() {
    let p = FrequencyProtocol::mathieu_from_initial(1.0, 3.7, 0.8).unwrap();
    let run = simulate(&p, &dimless(0.35), &SimulationSettings::default()).unwrap();
    let mut crossings = 0;
    for s in &run.samples {
        let margin = s.covariance.n_h - s.covariance.m_h_abs();
        assert!((margin - s.classicality).abs() <= 1e-9 * s.triple.q);
        assert!(s.covariance.min_eigenvalue() > 0.0);
    }
    for w in run.samples.windows(2) {
        let c = (w[0].classicality < 0.0) != (w[1].classicality < 0.0);
        let m0 = w[0].covariance.n_h < w[0].covariance.m_h_abs();
        let m1 = w[1].covariance.n_h < w[1].covariance.m_h_abs();
        assert_eq!(c, m0 != m1, "tau = {}", w[1].tau);
        crossings += usize::from(c);
    }
    assert!(crossings >= 2);
}

#[test]
fn thermal_state_from_physical_inputs() {
    let th = thermal_config(&UnitSystem::si(40.0 * ATOMIC_MASS_KG), 2.0 * PI * 4.0e6, 1.42e-4).unwrap();
    let run = simulate(
        &FrequencyProtocol::constant(1.0).unwrap(),
        &th.to_dimensionless(),
        &SimulationSettings::default(),
    )
    .unwrap();
    for s in &run.samples {
        assert!((s.classicality - th.nbar).abs() < 1e-9);
        assert!((s.covariance.n_h - th.nbar).abs() < 1e-9);
    }
}
