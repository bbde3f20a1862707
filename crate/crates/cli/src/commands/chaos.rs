use super::{count, positive, to_json, Prepared};
use crate::config::{Default as D, Key, Kind, RunConfig};
use crate::failure::Failure;
use crate::record::Payload;
use nel_core::chaos::{
    abc_lyapunov, lyapunov_max, poincare_samples, sg_lyapunov_scan, simulate, write_lyapunov_csv, write_poincare_csv,
    write_scan_csv, AbcParams, AbcState, ForcingSpec, GinzburgLandau, GlParams, GlVariant, LyapunovEstimate,
    LyapunovOptions, Model, ModelState, Parity, Quasiperiodic, SgParams, SineGordon,
};
use num_complex::Complex64;
use serde_json::{json, Value as Json};

const MODEL_KEYS: [Key; 42] = [
    Key::new("model", Kind::Choice(&["sg", "dernls", "pnls", "abc"]), D::Value("sg"), "model system"),
    Key::new("eps", Kind::Real, D::Value("0"), "perturbation size, non-negative"),
    Key::new("modes", Kind::Int, D::Optional, "retained modes [default: 128 for sg, 64 otherwise]"),
    Key::new("dt", Kind::Real, D::Value("0.01"), "time step"),
    // sine-Gordon
    Key::new("c", Kind::Real, D::Value("0.9"), "sg: wave speed, in (1/2, 1)"),
    Key::new("a", Kind::Real, D::Value("1"), "sg: damping coefficient, positive"),
    Key::new("parity", Kind::Choice(&["even", "odd"]), D::Value("even"), "sg: symmetry of u in x"),
    Key::new("forcing", Kind::Choice(&["cos-t", "quasiperiodic"]), D::Value("cos-t"), "sg: coefficient of the cubic term"),
    Key::new("dt_sub", Kind::Real, D::Value("0.01"), "sg: substep of the forcing angles"),
    Key::new("qp_alpha", Kind::Real, D::Value("1"), "quasiperiodic forcing: constant part"),
    Key::new("qp_beta1", Kind::Real, D::Value("0.1"), "quasiperiodic forcing: amplitude 1"),
    Key::new("qp_beta2", Kind::Real, D::Value("0.1"), "quasiperiodic forcing: amplitude 2"),
    Key::new("qp_beta3", Kind::Real, D::Value("0.1"), "quasiperiodic forcing: amplitude 3"),
    Key::new("qp_beta4", Kind::Real, D::Value("0.1"), "quasiperiodic forcing: amplitude 4"),
    Key::new("qp_omega1", Kind::Real, D::Value("1"), "quasiperiodic forcing: frequency 1"),
    Key::new("qp_omega2", Kind::Real, D::Value("1.4142135623730951"), "quasiperiodic forcing: frequency 2"),
    Key::new("qp_omega3", Kind::Real, D::Value("1.7320508075688772"), "quasiperiodic forcing: frequency 3"),
    Key::new("qp_omega4", Kind::Real, D::Value("2.23606797749979"), "quasiperiodic forcing: frequency 4"),
    Key::new("qp_phase1", Kind::Real, D::Value("0"), "quasiperiodic forcing: phase 1"),
    Key::new("qp_phase2", Kind::Real, D::Value("0"), "quasiperiodic forcing: phase 2"),
    Key::new("qp_phase3", Kind::Real, D::Value("0"), "quasiperiodic forcing: phase 3"),
    Key::new("qp_phase4", Kind::Real, D::Value("0"), "quasiperiodic forcing: phase 4"),
    Key::new("qp_mu", Kind::Real, D::Value("1.5"), "quasiperiodic forcing: exponent of eps on the ABC angles, > 1"),
    Key::new("u_mean", Kind::Real, D::Value("3"), "sg: mean of u(x, 0); must be 0 for odd parity"),
    Key::new("u_amp", Kind::Real, D::Value("0.1"), "sg: amplitude of the cos x (even) or sin x (odd) part of u(x, 0)"),
    Key::new("v_mean", Kind::Real, D::Value("0"), "sg: uniform initial velocity; must be 0 for odd parity"),
    // ABC flow, also driving the quasiperiodic forcing
    Key::new("abc_a", Kind::Real, D::Value("1"), "ABC coefficient A"),
    Key::new("abc_b", Kind::Real, D::Value("1"), "ABC coefficient B"),
    Key::new("abc_c", Kind::Real, D::Value("1"), "ABC coefficient C"),
    Key::new("theta1", Kind::Real, D::Value("0.1"), "initial ABC angle 1"),
    Key::new("theta2", Kind::Real, D::Value("0.2"), "initial ABC angle 2"),
    Key::new("theta3", Kind::Real, D::Value("0.3"), "initial ABC angle 3"),
    // Ginzburg-Landau
    Key::new("mu", Kind::Real, D::Value("6"), "dernls: multiplier coefficient"),
    Key::new("cutoff", Kind::Int, D::Optional, "dernls: highest wavenumber in the multiplier [default: modes/2]"),
    Key::new("gamma", Kind::Real, D::Value("0"), "dernls: limit-cycle phase"),
    Key::new("omega", Kind::Real, D::Value("0.75"), "pnls: plane-wave amplitude, in (1/2, 1)"),
    Key::new("alpha", Kind::Real, D::Value("1"), "pnls: damping, positive"),
    Key::new("beta", Kind::Real, D::Value("0.5"), "pnls: forcing, positive"),
    Key::new(
        "q0",
        Kind::Choice(&["limit-cycle", "uniform", "perturbed"]),
        D::Value("perturbed"),
        "Ginzburg-Landau initial state",
    ),
    Key::new("q_amp", Kind::Real, D::Value("0.75"), "modulus of the uniform part of q(x, 0)"),
    Key::new("q_phase", Kind::Real, D::Value("0"), "phase of the uniform part of q(x, 0)"),
    Key::new("q_pert", Kind::Real, D::Value("0.01"), "relative cos x perturbation of q(x, 0)"),
];

fn model_keys() -> Vec<Key> {
    MODEL_KEYS.to_vec()
}

pub fn simulate_keys() -> Vec<Key> {
    let mut keys = model_keys();
    keys.push(Key::new("t_end", Kind::Real, D::Value("10"), "integration time"));
    keys.push(Key::new("record_every", Kind::Int, D::Value("100"), "steps between trajectory records"));
    keys
}

pub fn poincare_keys() -> Vec<Key> {
    let mut keys = model_keys();
    keys.push(Key::new("n_iterates", Kind::Int, D::Value("100"), "number of map iterates"));
    keys.push(Key::new("max_time", Kind::Real, D::Value("1e4"), "give up after this much integration time"));
    keys
}

pub fn lyapunov_keys() -> Vec<Key> {
    let mut keys = model_keys();
    keys.extend([
        Key::new("t_end", Kind::Real, D::Value("1000"), "integration time"),
        Key::new("renorm_dt", Kind::Real, D::Value("0.5"), "time between renormalisations"),
        Key::new("displacement", Kind::Real, D::Value("1e-8"), "shadow separation"),
        Key::new("method", Kind::Choice(&["shadow", "tangent"]), D::Value("shadow"), "shadow trajectory, or tangent flow (abc only)"),
        Key::new("scan_eps", Kind::Reals, D::Optional, "sg scan: comma-separated eps values"),
        Key::new("scan_a", Kind::Reals, D::Optional, "sg scan: comma-separated a values"),
    ]);
    keys
}

fn forcing(config: &RunConfig) -> ForcingSpec {
    if config.text("forcing") == "cos-t" {
        return ForcingSpec::CosT;
    }
    let four = |prefix: &str| [1, 2, 3, 4].map(|i| config.real(&format!("{prefix}{i}")));
    ForcingSpec::Quasiperiodic(Quasiperiodic {
        alpha: config.real("qp_alpha"),
        betas: four("qp_beta"),
        omegas: four("qp_omega"),
        phases: four("qp_phase"),
        mu: config.real("qp_mu"),
        abc: AbcParams { a: config.real("abc_a"), b: config.real("abc_b"), c: config.real("abc_c") },
        theta0: [config.real("theta1"), config.real("theta2"), config.real("theta3")],
    })
}

fn modes(config: &RunConfig, default: usize) -> Result<usize, Failure> {
    match config.opt_int("modes") {
        None => Ok(default),
        Some(_) => count(config, "modes"),
    }
}

/// Model and initial state described by the configuration, at `t = 0`.
pub fn build_model(config: &RunConfig) -> Result<(Model, ModelState), Failure> {
    match config.text("model") {
        "sg" => {
            let parity = if config.text("parity") == "odd" { Parity::Odd } else { Parity::Even };
            let params = SgParams {
                c: config.real("c"),
                a: config.real("a"),
                eps: config.real("eps"),
                parity,
                modes: modes(config, 128)?,
                forcing: forcing(config),
                dt_sub: config.real("dt_sub"),
            };
            let sys = SineGordon::new(params)?;
            let (mean, amp, v0) = (config.real("u_mean"), config.real("u_amp"), config.real("v_mean"));
            let state = match parity {
                Parity::Even => sys.state_from_fn(0.0, |x| mean + amp * x.cos(), |_| v0)?,
                Parity::Odd => {
                    if mean != 0.0 || v0 != 0.0 {
                        return Err(Failure::validation("odd parity needs u_mean = 0 and v_mean = 0"));
                    }
                    sys.state_from_fn(0.0, |x| amp * x.sin(), |_| 0.0)?
                }
            };
            Ok((Model::SineGordon(sys), ModelState::SineGordon(state)))
        }
        "abc" => {
            let p = AbcParams::new(config.real("abc_a"), config.real("abc_b"), config.real("abc_c"))?;
            let theta = [config.real("theta1"), config.real("theta2"), config.real("theta3")];
            Ok((Model::Abc(p), ModelState::Abc(AbcState::new(0.0, theta))))
        }
        name => {
            let modes = modes(config, 64)?;
            let eps = config.real("eps");
            let variant = if name == "dernls" {
                let cutoff = match config.opt_int("cutoff") {
                    None => modes / 2,
                    Some(_) => count(config, "cutoff")?,
                };
                GlVariant::DerNls { eps, mu: config.real("mu"), cutoff, gamma: config.real("gamma") }
            } else {
                GlVariant::Pnls { eps, omega: config.real("omega"), alpha: config.real("alpha"), beta: config.real("beta") }
            };
            let sys = GinzburgLandau::new(GlParams { variant, modes })?;
            let base = Complex64::from_polar(config.real("q_amp"), config.real("q_phase"));
            let pert = config.real("q_pert");
            let state = match config.text("q0") {
                "limit-cycle" => sys.limit_cycle_state(0.0)?,
                "uniform" => sys.uniform_state(0.0, base)?,
                _ => sys.state_from_fn(0.0, |x| base * (1.0 + pert * x.cos()))?,
            };
            Ok((Model::GinzburgLandau(sys), ModelState::GinzburgLandau(state)))
        }
    }
}

fn limit_cycle_error(sys: &GinzburgLandau, q: &[Complex64], t: f64) -> f64 {
    let GlVariant::DerNls { gamma, .. } = sys.params().variant else { return f64::NAN };
    let qc = nel_core::chaos::limit_cycle(gamma, t);
    sys.basis().synthesize(q).iter().map(|z| (z - qc).norm()).fold(0.0, f64::max)
}

pub fn prepare_simulate(config: &RunConfig) -> Result<Prepared, Failure> {
    let (model, state0) = build_model(config)?;
    let (t_end, dt) = (positive(config, "t_end")?, positive(config, "dt")?);
    let every = count(config, "record_every")?;
    if every == 0 {
        return Err(Failure::validation("`record_every` must be at least 1"));
    }
    let track_cycle = config.text("model") == "dernls" && config.text("q0") == "limit-cycle";
    Ok(Prepared {
        payload: Payload::lines("trajectory-record/1"),
        job: Box::new(move |payload| {
            let conserved = |s: &ModelState| match (&model, s) {
                (Model::SineGordon(m), ModelState::SineGordon(s)) => Some(m.energy(s)),
                (Model::GinzburgLandau(m), ModelState::GinzburgLandau(s)) => Some(m.mass(s)),
                _ => None,
            };
            let initial = conserved(&state0);
            let (mut index, mut drift, mut cycle_error) = (0usize, 0.0f64, 0.0f64);
            let mut sink = Ok(());
            let end = simulate(&model, &state0, t_end, dt, |s| {
                if index % every == 0 {
                    if let Err(e) = payload.push_json(&model.record(s)) {
                        sink = Err(e);
                    }
                }
                index += 1;
                if let (Some(c0), Some(c)) = (initial, conserved(s)) {
                    drift = drift.max((c - c0).abs() / c0.abs().max(f64::MIN_POSITIVE));
                }
                if let (true, Model::GinzburgLandau(m), ModelState::GinzburgLandau(g)) = (track_cycle, &model, s) {
                    cycle_error = cycle_error.max(limit_cycle_error(m, &g.q, g.t));
                }
                Ok(())
            })?;
            sink?;
            if (end.steps) % every != 0 {
                payload.push_json(&model.record(&end.state))?;
            }
            let mut summary = json!({
                "model": model.name(),
                "steps": end.steps,
                "t_final": end.state.time(),
                "escaped": end.escaped,
            });
            match &model {
                Model::SineGordon(_) => summary["max_relative_energy_drift"] = json!(drift),
                Model::GinzburgLandau(_) => summary["max_relative_mass_drift"] = json!(drift),
                Model::Abc(_) => {}
            }
            if track_cycle {
                summary["max_limit_cycle_error"] = json!(cycle_error);
            }
            Ok(summary)
        }),
    })
}

pub fn prepare_poincare(config: &RunConfig) -> Result<Prepared, Failure> {
    let (model, state0) = build_model(config)?;
    let (dt, max_time) = (positive(config, "dt")?, positive(config, "max_time")?);
    let n = count(config, "n_iterates")?;
    if let Model::SineGordon(sg) = &model {
        if sg.params().eps > 0.0 && !sg.params().forcing.is_periodic() {
            return Err(Failure::validation("the period map needs cos-t forcing when eps > 0"));
        }
    }
    let width = model.vector(&state0)?.len();
    let columns: Vec<String> = std::iter::once("t".to_string()).chain((0..width).map(|i| format!("x{i}"))).collect();
    Ok(Prepared {
        payload: Payload::table("poincare-csv/1", &columns.join(",")),
        job: Box::new(move |payload| {
            let samples = poincare_samples(&model, &state0, n, dt, max_time)?;
            let mut text = Vec::new();
            write_poincare_csv(&mut text, &model, &samples)?;
            let text = String::from_utf8_lossy(&text);
            payload.push_rows(text.split_once('\n').map_or("", |(_, rows)| rows));
            Ok(json!({
                "model": model.name(),
                "iterates": samples.samples.len(),
                "escaped": samples.escaped,
                "exhausted": samples.exhausted,
            }))
        }),
    })
}

fn estimate_summary(est: &LyapunovEstimate, method: &str) -> Json {
    json!({
        "method": method,
        "lambda": est.lambda,
        "escaped": est.escaped,
        "last_decade_spread": est.last_decade_spread,
        "converged": est.converged(),
    })
}

pub fn prepare_lyapunov(config: &RunConfig) -> Result<Prepared, Failure> {
    let (model, state0) = build_model(config)?;
    let opts = LyapunovOptions {
        t_end: positive(config, "t_end")?,
        renorm_dt: positive(config, "renorm_dt")?,
        dt: positive(config, "dt")?,
        displacement: positive(config, "displacement")?,
        seed: config.seed,
    };
    if opts.renorm_dt > opts.t_end {
        return Err(Failure::validation("`renorm_dt` must not exceed `t_end`"));
    }
    let method = config.text("method").to_string();
    let scan = match (config.opt_reals("scan_eps"), config.opt_reals("scan_a")) {
        (None, None) => None,
        (Some(e), Some(a)) => Some((e.to_vec(), a.to_vec())),
        _ => return Err(Failure::validation("a scan needs both `scan_eps` and `scan_a`")),
    };
    if let Some((eps, a)) = &scan {
        let Model::SineGordon(sg) = &model else {
            return Err(Failure::validation("the (eps, a) scan is defined for model = sg"));
        };
        for &e in eps {
            for &av in a {
                SgParams { eps: e, a: av, ..sg.params().clone() }.validate()?;
            }
        }
        if method != "shadow" {
            return Err(Failure::validation("the scan uses the shadow method"));
        }
    }
    if method == "tangent" {
        if !matches!(model, Model::Abc(_)) {
            return Err(Failure::validation("the tangent method is available for model = abc only"));
        }
        if opts.t_end < 1000.0 {
            return Err(Failure::validation(format!("the tangent method needs t_end >= 1000, got {}", opts.t_end)));
        }
    }
    if let Some((eps, a)) = scan {
        let Model::SineGordon(sg) = model else { unreachable!() };
        let ModelState::SineGordon(s0) = state0 else { unreachable!() };
        return Ok(Prepared {
            payload: Payload::table("scan-csv/1", "eps,a,lambda,escaped"),
            job: Box::new(move |payload| {
                let cells = sg_lyapunov_scan(sg.params(), &eps, &a, &s0.u, &s0.v, &opts)?;
                let mut text = Vec::new();
                write_scan_csv(&mut text, &cells)?;
                let text = String::from_utf8_lossy(&text);
                payload.push_rows(text.split_once('\n').map_or("", |(_, rows)| rows));
                Ok(json!({
                    "cells": cells.len(),
                    "escaped": cells.iter().filter(|c| c.escaped).count(),
                    "options": to_json(&opts)?,
                }))
            }),
        });
    }
    Ok(Prepared {
        payload: Payload::table("lyapunov-csv/1", "t,lambda_running"),
        job: Box::new(move |payload| {
            let est = match (&model, &state0) {
                (Model::Abc(p), ModelState::Abc(s)) if method == "tangent" => {
                    abc_lyapunov(p, s, opts.t_end, opts.renorm_dt)?
                }
                _ => lyapunov_max(&model, &state0, &opts)?,
            };
            let mut text = Vec::new();
            write_lyapunov_csv(&mut text, &est)?;
            let text = String::from_utf8_lossy(&text);
            payload.push_rows(text.split_once('\n').map_or("", |(_, rows)| rows));
            let mut summary = estimate_summary(&est, &method);
            summary["model"] = json!(model.name());
            Ok(summary)
        }),
    })
}
