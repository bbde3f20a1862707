//! Poincaré sampling and largest-Lyapunov-exponent estimation for any `Model`.

use super::model::{fix_time, steps_for, Model, ModelState, ESCAPE_NORM};
use super::sine_gordon::{SgParams, SineGordon};
use crate::error::{domain, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

/// Time resolution of section crossings.
pub const CROSSING_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PoincareSamples {
    pub samples: Vec<ModelState>,
    /// The trajectory left the ball of radius `ESCAPE_NORM`; `samples` is truncated.
    pub escaped: bool,
    /// `max_time` was reached before `n_iterates` samples were collected.
    pub exhausted: bool,
}

enum Section {
    /// Strobe at multiples of the forcing period.
    Period(f64),
    /// Upward zero of `s(state)` subject to a side condition.
    Surface(Box<dyn Fn(&ModelState) -> (f64, bool)>),
}

fn section_for(model: &Model) -> Result<Section> {
    match model {
        Model::SineGordon(sg) => {
            let p = sg.params();
            if p.eps > 0.0 && !p.forcing.is_periodic() {
                return Err(domain!("period map needs time-periodic forcing; quasiperiodic forcing has no period"));
            }
            Ok(Section::Period(TAU))
        }
        Model::GinzburgLandau(_) => {
            let gamma = model.section_phase().unwrap_or(0.0);
            let rot = num_complex::Complex64::from_polar(1.0, gamma);
            Ok(Section::Surface(Box::new(move |s| match s {
                ModelState::GinzburgLandau(g) => {
                    let z = g.q[0] * rot;
                    (-z.im, z.re > 0.0)
                }
                _ => (f64::NAN, false),
            })))
        }
        Model::Abc(_) => Ok(Section::Surface(Box::new(|s| match s {
            ModelState::Abc(a) => (a.theta[2].sin(), a.theta[2].cos() > 0.0),
            _ => (f64::NAN, false),
        }))),
    }
}

/// Iterates of the period map (sine-Gordon, period `2π`) or the return map to a section: the
/// mode-0 phase `arg q̃₀ = −γ` for the Ginzburg-Landau models and `ϑ₃ = 0 mod 2π` for ABC.
/// Crossings are located by bisection on the step size to `CROSSING_TOLERANCE`.
pub fn poincare_samples(
    model: &Model,
    state0: &ModelState,
    n_iterates: usize,
    dt: f64,
    max_time: f64,
) -> Result<PoincareSamples> {
    if !(dt > 0.0 && dt.is_finite() && max_time > 0.0) {
        return Err(domain!("need positive dt and max_time, got dt = {dt}, max_time = {max_time}"));
    }
    let section = section_for(model)?;
    let t0 = state0.time();
    let mut samples = Vec::with_capacity(n_iterates);
    let mut state = state0.clone();
    match section {
        Section::Period(period) => {
            let steps = steps_for(period, dt);
            let h = period / steps as f64;
            for m in 1..=n_iterates {
                if m as f64 * period > max_time {
                    return Ok(PoincareSamples { samples, escaped: false, exhausted: true });
                }
                for i in 0..steps {
                    state = model.step(&state, h)?;
                    fix_time(&mut state, t0 + (m - 1) as f64 * period + (i + 1) as f64 * h);
                    if model.norm(&state)? > ESCAPE_NORM {
                        return Ok(PoincareSamples { samples, escaped: true, exhausted: false });
                    }
                }
                samples.push(state.clone());
            }
        }
        Section::Surface(s) => {
            let mut n = 0usize;
            let mut prev = s(&state).0;
            while samples.len() < n_iterates {
                if (n + 1) as f64 * dt > max_time {
                    return Ok(PoincareSamples { samples, escaped: false, exhausted: true });
                }
                let next = model.step(&state, dt)?;
                let (value, side) = s(&next);
                if prev < 0.0 && value >= 0.0 && side {
                    samples.push(bisect(model, &state, dt, &s)?);
                }
                n += 1;
                state = next;
                fix_time(&mut state, t0 + n as f64 * dt);
                prev = value;
                if model.norm(&state)? > ESCAPE_NORM {
                    return Ok(PoincareSamples { samples, escaped: true, exhausted: false });
                }
            }
        }
    }
    Ok(PoincareSamples { samples, escaped: false, exhausted: false })
}

fn bisect(model: &Model, from: &ModelState, h: f64, s: &dyn Fn(&ModelState) -> (f64, bool)) -> Result<ModelState> {
    let (mut lo, mut hi) = (0.0, h);
    let mut at_hi = model.step(from, h)?;
    while hi - lo > CROSSING_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        let trial = model.step(from, mid)?;
        if s(&trial).0 >= 0.0 {
            hi = mid;
            at_hi = trial;
        } else {
            lo = mid;
        }
    }
    Ok(at_hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovOptions {
    pub t_end: f64,
    pub renorm_dt: f64,
    pub dt: f64,
    /// Initial and renormalised separation of the shadow trajectory.
    pub displacement: f64,
    /// Seed of the random initial direction.
    pub seed: u64,
}

impl Default for LyapunovOptions {
    fn default() -> Self {
        Self { t_end: 1000.0, renorm_dt: 0.5, dt: 1e-2, displacement: 1e-8, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovEstimate {
    pub lambda: f64,
    /// `(t, running estimate)` after every renormalisation.
    pub series: Vec<(f64, f64)>,
    pub escaped: bool,
    /// `(max - min) / |λ|` of the running estimate over the last tenth of the run.
    pub last_decade_spread: f64,
}

impl LyapunovEstimate {
    /// Whether the running estimate has settled to within 20% over the last tenth of the run.
    pub fn converged(&self) -> bool {
        self.last_decade_spread < 0.2
    }
}

pub(crate) fn running_spread(series: &[(f64, f64)]) -> f64 {
    let Some(&(_, last)) = series.last() else { return f64::INFINITY };
    let tail = &series[series.len() - series.len().div_ceil(10)..];
    let (lo, hi) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, v)| (lo.min(v), hi.max(v)));
    if hi == lo {
        0.0
    } else {
        (hi - lo) / last.abs()
    }
}

/// Largest Lyapunov exponent from a shadow trajectory started `displacement` away in a random
/// direction and pulled back to that distance every `renorm_dt`.
pub fn lyapunov_max(model: &Model, state0: &ModelState, opts: &LyapunovOptions) -> Result<LyapunovEstimate> {
    let LyapunovOptions { t_end, renorm_dt, dt, displacement, seed } = *opts;
    if !(renorm_dt > 0.0 && t_end > renorm_dt && dt > 0.0 && t_end.is_finite()) {
        return Err(domain!("need 0 < renorm_dt < T and dt > 0, got T = {t_end}, renorm_dt = {renorm_dt}, dt = {dt}"));
    }
    if !(displacement > 0.0 && displacement.is_finite()) {
        return Err(domain!("displacement must be positive, got {displacement}"));
    }
    let x0 = model.vector(state0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dir: Vec<f64> = (0..x0.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
    let scale = displacement / dir.iter().map(|d| d * d).sum::<f64>().sqrt();
    let shifted: Vec<f64> = x0.iter().zip(&dir).map(|(x, d)| x + scale * d).collect();

    let mut base = state0.clone();
    let mut shadow = model.with_vector(state0, &shifted)?;
    let mut d0 = norm(&model.difference(&base, &shadow)?);
    let substeps = steps_for(renorm_dt, dt);
    let h = renorm_dt / substeps as f64;
    let intervals = (t_end / renorm_dt).round() as usize;
    let t_start = state0.time();
    let mut sum = 0.0;
    let mut series = Vec::with_capacity(intervals);
    let mut escaped = false;
    'outer: for i in 1..=intervals {
        for j in 0..substeps {
            let t = t_start + (i - 1) as f64 * renorm_dt + (j + 1) as f64 * h;
            base = model.step(&base, h)?;
            shadow = model.step(&shadow, h)?;
            fix_time(&mut base, t);
            fix_time(&mut shadow, t);
            if model.norm(&base)? > ESCAPE_NORM || model.norm(&shadow)? > ESCAPE_NORM {
                escaped = true;
                break 'outer;
            }
        }
        let diff = model.difference(&base, &shadow)?;
        let d = norm(&diff);
        sum += (d / d0).ln();
        let xb = model.vector(&base)?;
        let pulled: Vec<f64> = xb.iter().zip(&diff).map(|(x, dx)| x + dx * displacement / d).collect();
        shadow = model.with_vector(&shadow, &pulled)?;
        d0 = norm(&model.difference(&base, &shadow)?);
        let elapsed = i as f64 * renorm_dt;
        series.push((t_start + elapsed, sum / elapsed));
    }
    let lambda = series.last().map_or(f64::NAN, |p| p.1);
    Ok(LyapunovEstimate { lambda, last_decade_spread: running_spread(&series), series, escaped })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanCell {
    pub eps: f64,
    pub a: f64,
    pub lambda: f64,
    pub escaped: bool,
}

/// `λ_L` over the grid `eps × a` for sine-Gordon with all other parameters from `base`, starting
/// every run from the coefficient vectors `(u0, v0)`. Cells come back in row-major order.
pub fn sg_lyapunov_scan(
    base: &SgParams,
    eps: &[f64],
    a: &[f64],
    u0: &[f64],
    v0: &[f64],
    opts: &LyapunovOptions,
) -> Result<Vec<ScanCell>> {
    let cells: Vec<(f64, f64)> = eps.iter().flat_map(|&e| a.iter().map(move |&a| (e, a))).collect();
    cells
        .into_par_iter()
        .map(|(e, a)| {
            let sys = SineGordon::new(SgParams { eps: e, a, ..base.clone() })?;
            let s0 = ModelState::SineGordon(sys.state(0.0, u0.to_vec(), v0.to_vec())?);
            let est = lyapunov_max(&Model::SineGordon(sys), &s0, opts)?;
            Ok(ScanCell { eps: e, a, lambda: est.lambda, escaped: est.escaped })
        })
        .collect()
}
