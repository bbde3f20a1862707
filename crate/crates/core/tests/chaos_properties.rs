use nel_core::chaos::*;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

/// Uniform pendulum `ü = sin u`, `u(0) = u0`, `u̇(0) = 0`, by classical RK4 with a fine step.
fn pendulum(u0: f64, t: f64) -> f64 {
    let n = (t / 1e-4).round() as usize;
    let h = t / n as f64;
    let f = |u: f64, v: f64| (v, u.sin());
    let (mut u, mut v) = (u0, 0.0f64);
    for _ in 0..n {
        let k1 = f(u, v);
        let k2 = f(u + 0.5 * h * k1.0, v + 0.5 * h * k1.1);
        let k3 = f(u + 0.5 * h * k2.0, v + 0.5 * h * k2.1);
        let k4 = f(u + h * k3.0, v + h * k3.1);
        u += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        v += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    u
}

fn final_state(model: &Model, s0: &ModelState, t_end: f64, dt: f64) -> ModelState {
    simulate(model, s0, t_end, dt, |_| Ok(())).unwrap().state
}

fn sg(params: SgParams) -> (Model, SineGordon) {
    let sys = SineGordon::new(params).unwrap();
    (Model::SineGordon(sys.clone()), sys)
}

fn gl(params: GlParams) -> (Model, GinzburgLandau) {
    let sys = GinzburgLandau::new(params).unwrap();
    (Model::GinzburgLandau(sys.clone()), sys)
}

fn uniform_sg_error(dt: f64) -> f64 {
    let (m, sys) = sg(SgParams::default());
    let s0 = ModelState::SineGordon(sys.uniform_state(0.0, 2.0, 0.0).unwrap());
    let ModelState::SineGordon(s) = final_state(&m, &s0, 10.0, dt) else { unreachable!() };
    (s.u[0] - pendulum(2.0, 10.0)).abs()
}

#[test]
fn uniform_mode_matches_the_pendulum() {
    assert!(uniform_sg_error(0.01) < 1e-8);
}

#[test]
fn halving_the_step_gains_four_orders() {
    let ratio = uniform_sg_error(0.02) / uniform_sg_error(0.01);
    assert!((12.8..=19.2).contains(&ratio), "ratio {ratio}");
}

#[test]
fn sine_gordon_energy_is_conserved() {
    let (m, sys) = sg(SgParams::default());
    let s0 = sys.state_from_fn(0.0, |x| PI + 0.5 * x.cos() + 0.3 * (2.0 * x).cos(), |x| 0.2 * x.cos()).unwrap();
    let e0 = sys.energy(&s0);
    let mut drift: f64 = 0.0;
    simulate(&m, &ModelState::SineGordon(s0), 100.0, 0.01, |s| {
        if let ModelState::SineGordon(s) = s {
            drift = drift.max(((sys.energy(s) - e0) / e0).abs());
        }
        Ok(())
    })
    .unwrap();
    assert!(drift < 1e-6, "relative drift {drift:e}");
}

#[test]
fn nls_mass_is_conserved() {
    let (m, sys) = gl(GlParams::dernls(0.0, 6.0, 0.0));
    let s0 = sys.state_from_fn(0.0, |x| Complex64::new(0.5 + 0.1 * x.cos(), 0.05 * (2.0 * x).cos())).unwrap();
    let m0 = sys.mass(&s0);
    let mut drift: f64 = 0.0;
    simulate(&m, &ModelState::GinzburgLandau(s0), 10.0, 0.01, |s| {
        if let ModelState::GinzburgLandau(s) = s {
            drift = drift.max((sys.mass(s) - m0).abs());
        }
        Ok(())
    })
    .unwrap();
    assert!(drift < 1e-8, "mass drift {drift:e}");
}

fn limit_cycle_error(eps: f64, mu: f64, gamma: f64) -> f64 {
    let (m, sys) = gl(GlParams::dernls(eps, mu, gamma));
    let s0 = ModelState::GinzburgLandau(sys.limit_cycle_state(0.0).unwrap());
    let mut err: f64 = 0.0;
    simulate(&m, &s0, 50.0, 0.01, |s| {
        if let ModelState::GinzburgLandau(g) = s {
            let off: f64 = g.q[1..].iter().map(|z| z.norm()).sum();
            err = err.max((g.q[0] - limit_cycle(gamma, g.t)).norm() + off);
        }
        Ok(())
    })
    .unwrap();
    err
}

#[test]
fn limit_cycle_is_an_exact_orbit() {
    for eps in [0.0, 0.01, 0.05] {
        let err = limit_cycle_error(eps, 6.0, 0.3);
        assert!(err < 1e-6, "eps {eps}: {err:e}");
    }
}

fn parity_defect(basis: &ParityBasis, coeffs: &[Complex64]) -> f64 {
    let vals = basis.synthesize(coeffs);
    let n = vals.len();
    let sign = if basis.parity() == Parity::Even { 1.0 } else { -1.0 };
    (1..n).map(|i| (vals[i] - sign * vals[n - i]).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn limit_cycle_holds_for_any_eps_and_mu(eps in 0.0f64..0.1, mu in -10.0f64..10.0, gamma in 0.0f64..TAU) {
        let err = limit_cycle_error(eps, mu, gamma);
        prop_assert!(err < 1e-6, "{err:e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pnls_uniform_modulus_is_preserved(omega in 0.51f64..0.99, phase in 0.0f64..TAU) {
        let (m, sys) = gl(GlParams::pnls(0.0, omega, 1.0, 0.5));
        let s0 = ModelState::GinzburgLandau(sys.uniform_state(0.0, Complex64::from_polar(omega, phase)).unwrap());
        let ModelState::GinzburgLandau(s) = final_state(&m, &s0, 5.0, 0.01) else { unreachable!() };
        let vals = sys.basis().synthesize(&s.q);
        prop_assert!(vals.iter().all(|q| (q.norm() - omega).abs() < 1e-12));
    }

    #[test]
    fn steps_preserve_parity(seed in proptest::collection::vec(-1.0f64..1.0, 8), odd in any::<bool>()) {
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let (m, sys) = sg(SgParams { parity, modes: 8, eps: 0.05, ..SgParams::default() });
        let s0 = sys.state(0.0, seed.clone(), seed.iter().rev().copied().collect()).unwrap();
        let ModelState::SineGordon(s) = m.step(&ModelState::SineGordon(s0), 0.05).unwrap() else { unreachable!() };
        let u: Vec<Complex64> = s.u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        prop_assert!(parity_defect(sys.basis(), &u) < 1e-13);

        let (m, sys) = gl(GlParams { modes: 8, ..GlParams::pnls(0.1, 0.75, 1.0, 0.5) });
        let q: Vec<Complex64> = seed.iter().map(|&x| Complex64::new(x, 0.5 * x)).collect();
        let s0 = ModelState::GinzburgLandau(sys.state(0.0, q).unwrap());
        let ModelState::GinzburgLandau(s) = m.step(&s0, 0.01).unwrap() else { unreachable!() };
        prop_assert!(parity_defect(sys.basis(), &s.q) < 1e-13);
    }
}

fn eps_ratio(build: impl Fn(f64) -> (Model, ModelState)) -> f64 {
    let run = |eps: f64| {
        let (m, s0) = build(eps);
        m.vector(&final_state(&m, &s0, 1.0, 0.01)).unwrap()
    };
    let base = run(0.0);
    let dist = |eps: f64| run(eps).iter().zip(&base).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    dist(1e-3) / dist(1e-4)
}

#[test]
fn perturbations_vanish_linearly_in_eps() {
    let sg_ratio = eps_ratio(|eps| {
        let (m, sys) = sg(SgParams { eps, modes: 32, ..SgParams::default() });
        let s = sys.state_from_fn(0.0, |x| 1.0 + 0.5 * x.cos(), |_| 0.0).unwrap();
        (m, ModelState::SineGordon(s))
    });
    let gl_ratio = eps_ratio(|eps| {
        let (m, sys) = gl(GlParams::dernls(eps, 6.0, 0.0));
        let s = sys.state_from_fn(0.0, |x| Complex64::new(0.5 + 0.1 * x.cos(), 0.0)).unwrap();
        (m, ModelState::GinzburgLandau(s))
    });
    for r in [sg_ratio, gl_ratio] {
        assert!((9.0..=11.0).contains(&r), "ratio {r}");
    }
}

#[test]
fn identical_configs_give_identical_records() {
    let spec = ForcingSpec::Quasiperiodic(Quasiperiodic {
        alpha: 0.2,
        betas: [0.5, 0.3, 0.2, 0.1],
        omegas: [1.0, 2f64.sqrt(), 3f64.sqrt(), 5f64.sqrt()],
        phases: [0.0; 4],
        mu: 1.5,
        abc: AbcParams::new(1.0, 1.0, 1.0).unwrap(),
        theta0: [0.1, 0.2, 0.3],
    });
    let run = || {
        let (m, sys) = sg(SgParams { eps: 0.05, modes: 16, forcing: spec.clone(), ..SgParams::default() });
        let s0 = ModelState::SineGordon(sys.state_from_fn(0.0, |x| 1.0 + 0.2 * x.cos(), |_| 0.0).unwrap());
        let mut out = Vec::new();
        simulate(&m, &s0, 2.0, 0.05, |s| {
            write_record_jsonl(&mut out, &m.record(s))?;
            Ok(())
        })
        .unwrap();
        let est = lyapunov_max(&m, &s0, &LyapunovOptions { t_end: 5.0, seed: 42, ..LyapunovOptions::default() }).unwrap();
        write_lyapunov_csv(&mut out, &est).unwrap();
        out
    };
    assert_eq!(run(), run());
}

#[test]
fn zero_state_is_a_fixed_point_of_the_period_map() {
    let (m, sys) = sg(SgParams { eps: 0.1, modes: 16, ..SgParams::default() });
    let s0 = ModelState::SineGordon(sys.uniform_state(0.0, 0.0, 0.0).unwrap());
    let out = poincare_samples(&m, &s0, 4, 0.05, 100.0).unwrap();
    assert_eq!(out.samples.len(), 4);
    for (i, s) in out.samples.iter().enumerate() {
        assert!((s.time() - (i + 1) as f64 * TAU).abs() < 1e-12);
        assert!(m.vector(s).unwrap().iter().all(|&x| x == 0.0));
    }
}

#[test]
fn limit_cycle_returns_once_per_rotation() {
    let (m, sys) = gl(GlParams::dernls(0.01, 6.0, 0.4));
    let s0 = ModelState::GinzburgLandau(sys.limit_cycle_state(0.0).unwrap());
    let out = poincare_samples(&m, &s0, 5, 0.005, 100.0).unwrap();
    let period = TAU / (9.0 / 8.0);
    assert_eq!(out.samples.len(), 5);
    for (i, s) in out.samples.iter().enumerate() {
        assert!((s.time() - (i + 1) as f64 * period).abs() < 1e-6, "{}", s.time());
    }
}

#[test]
fn pendulum_librations_stay_on_an_invariant_curve() {
    let (m, sys) = sg(SgParams { modes: 16, ..SgParams::default() });
    let u0 = PI + 0.5;
    let s0 = ModelState::SineGordon(sys.uniform_state(0.0, u0, 0.0).unwrap());
    let out = poincare_samples(&m, &s0, 50, 0.01, 1e4).unwrap();
    // Distance to the level set `½v² + cos u = cos u0`, first order in the level difference.
    let distance = |s: &ModelState| {
        let ModelState::SineGordon(s) = s else { unreachable!() };
        let (u, v) = (s.u[0], s.v[0]);
        (0.5 * v * v + u.cos() - u0.cos()).abs() / (v * v + u.sin().powi(2)).sqrt()
    };
    let worst = out.samples.iter().map(distance).fold(0.0, f64::max);
    assert!(worst < 1e-4, "{worst:e}");
}

#[test]
fn quasiperiodic_forcing_has_no_period_map() {
    let spec = ForcingSpec::Quasiperiodic(Quasiperiodic {
        alpha: 0.0,
        betas: [1.0; 4],
        omegas: [1.0, 2f64.sqrt(), 3f64.sqrt(), 5f64.sqrt()],
        phases: [0.0; 4],
        mu: 2.0,
        abc: AbcParams::new(1.0, 1.0, 1.0).unwrap(),
        theta0: [0.0; 3],
    });
    let (m, sys) = sg(SgParams { eps: 0.1, modes: 8, forcing: spec, ..SgParams::default() });
    let s0 = ModelState::SineGordon(sys.uniform_state(0.0, 0.1, 0.0).unwrap());
    assert!(poincare_samples(&m, &s0, 2, 0.05, 100.0).is_err());
}

#[test]
fn stable_fixed_point_has_a_negative_exponent() {
    let (m, sys) = gl(GlParams::pnls(0.1, 0.75, 1.0, 0.5));
    let settled = final_state(&m, &ModelState::GinzburgLandau(sys.uniform_state(0.0, Complex64::default()).unwrap()), 200.0, 0.01);
    let est = lyapunov_max(&m, &settled, &LyapunovOptions { t_end: 200.0, ..LyapunovOptions::default() }).unwrap();
    assert!(est.lambda < 0.0, "{}", est.lambda);
}

#[test]
fn pendulum_libration_has_a_vanishing_exponent() {
    let (m, sys) = sg(SgParams { modes: 16, ..SgParams::default() });
    let s0 = ModelState::SineGordon(sys.uniform_state(0.0, PI + 0.1, 0.0).unwrap());
    let est = lyapunov_max(&m, &s0, &LyapunovOptions { t_end: 500.0, dt: 0.02, ..LyapunovOptions::default() }).unwrap();
    assert!(est.lambda.abs() < 0.01, "{}", est.lambda);
}

#[test]
fn shadow_and_tangent_exponents_agree() {
    let p = AbcParams::new(1.0, 1.0, 1.0).unwrap();
    let s0 = AbcState::new(0.0, [0.1, 0.2, 0.3]);
    let tangent = abc_lyapunov(&p, &s0, 1000.0, 0.5).unwrap().lambda;
    let shadow = lyapunov_max(&Model::Abc(p), &ModelState::Abc(s0), &LyapunovOptions::default()).unwrap().lambda;
    assert!(tangent > 0.01);
    assert!((tangent - shadow).abs() < 0.05 * tangent, "tangent {tangent}, shadow {shadow}");
}

#[test]
fn scan_cells_come_back_in_grid_order() {
    let base = SgParams { modes: 8, ..SgParams::default() };
    let mut u0 = vec![0.0; 8];
    u0[0] = 0.5;
    u0[1] = 0.1;
    let opts = LyapunovOptions { t_end: 5.0, dt: 0.05, ..LyapunovOptions::default() };
    let cells = sg_lyapunov_scan(&base, &[0.0, 0.1], &[0.5, 2.0], &u0, &[0.0; 8], &opts).unwrap();
    let keys: Vec<(f64, f64)> = cells.iter().map(|c| (c.eps, c.a)).collect();
    assert_eq!(keys, vec![(0.0, 0.5), (0.0, 2.0), (0.1, 0.5), (0.1, 2.0)]);
    assert!(cells.iter().all(|c| c.lambda.is_finite() && !c.escaped));
}
