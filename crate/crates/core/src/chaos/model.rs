//! Common interface over the model systems used by the simulation driver and the diagnostics.

use super::abc::{abc_step, angle_difference, AbcParams, AbcState};
use super::ginzburg_landau::{gl_step, GinzburgLandau, GlState, GlVariant};
use super::output::TrajectoryRecord;
use super::sine_gordon::{sg_step, SgState, SineGordon};
use crate::error::{domain, structure, Result};
use num_complex::Complex64;
use serde_json::json;

/// State norm beyond which a trajectory counts as escaped.
pub const ESCAPE_NORM: f64 = 1e6;

#[derive(Debug, Clone)]
pub enum Model {
    SineGordon(SineGordon),
    GinzburgLandau(GinzburgLandau),
    Abc(AbcParams),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelState {
    SineGordon(SgState),
    GinzburgLandau(GlState),
    Abc(AbcState),
}

impl ModelState {
    pub fn time(&self) -> f64 {
        match self {
            Self::SineGordon(s) => s.t,
            Self::GinzburgLandau(s) => s.t,
            Self::Abc(s) => s.t,
        }
    }
}

fn mismatch(model: &Model) -> crate::Error {
    structure!("state does not belong to the {} model", model.name())
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Self::SineGordon(_) => "sg",
            Self::GinzburgLandau(g) => g.name(),
            Self::Abc(_) => "abc",
        }
    }

    pub fn params_json(&self) -> serde_json::Value {
        match self {
            Self::SineGordon(s) => s.params_json(),
            Self::GinzburgLandau(g) => g.params_json(),
            Self::Abc(p) => json!(p),
        }
    }

    pub fn step(&self, state: &ModelState, dt: f64) -> Result<ModelState> {
        match (self, state) {
            (Self::SineGordon(m), ModelState::SineGordon(s)) => sg_step(m, s, dt).map(ModelState::SineGordon),
            (Self::GinzburgLandau(m), ModelState::GinzburgLandau(s)) => gl_step(m, s, dt).map(ModelState::GinzburgLandau),
            (Self::Abc(p), ModelState::Abc(s)) => {
                if !(dt > 0.0 && dt.is_finite()) {
                    return Err(domain!("time step must be positive, got {dt}"));
                }
                Ok(ModelState::Abc(abc_step(p, s, dt)))
            }
            _ => Err(mismatch(self)),
        }
    }

    /// Real coordinates of the truncated state space.
    pub fn vector(&self, state: &ModelState) -> Result<Vec<f64>> {
        match (self, state) {
            (Self::SineGordon(_), ModelState::SineGordon(s)) => Ok(s.u.iter().chain(&s.v).copied().collect()),
            (Self::GinzburgLandau(_), ModelState::GinzburgLandau(s)) => {
                Ok(s.q.iter().map(|z| z.re).chain(s.q.iter().map(|z| z.im)).collect())
            }
            (Self::Abc(_), ModelState::Abc(s)) => Ok(s.theta.to_vec()),
            _ => Err(mismatch(self)),
        }
    }

    /// `state` with its coordinates replaced; time and forcing substate are kept.
    pub fn with_vector(&self, state: &ModelState, v: &[f64]) -> Result<ModelState> {
        let expected = self.vector(state)?.len();
        if v.len() != expected {
            return Err(structure!("expected {expected} coordinates, got {}", v.len()));
        }
        Ok(match state {
            ModelState::SineGordon(s) => {
                let k = s.u.len();
                ModelState::SineGordon(SgState { u: v[..k].to_vec(), v: v[k..].to_vec(), ..s.clone() })
            }
            ModelState::GinzburgLandau(s) => {
                let k = s.q.len();
                let q = (0..k).map(|j| Complex64::new(v[j], v[k + j])).collect();
                ModelState::GinzburgLandau(GlState { t: s.t, q })
            }
            ModelState::Abc(s) => ModelState::Abc(AbcState::new(s.t, [v[0], v[1], v[2]])),
        })
    }

    /// Coordinates of `b - a`, with angles compared on the circle.
    pub fn difference(&self, a: &ModelState, b: &ModelState) -> Result<Vec<f64>> {
        let (va, vb) = (self.vector(a)?, self.vector(b)?);
        Ok(match self {
            Self::Abc(_) => va.iter().zip(&vb).map(|(&x, &y)| angle_difference(x, y)).collect(),
            _ => va.iter().zip(&vb).map(|(x, y)| y - x).collect(),
        })
    }

    pub fn norm(&self, state: &ModelState) -> Result<f64> {
        Ok(self.vector(state)?.iter().map(|x| x * x).sum::<f64>().sqrt())
    }

    /// Output record; sine-Gordon puts `u` in the real and `uₜ` in the imaginary slot, ABC puts
    /// the angles in the real slot.
    pub fn record(&self, state: &ModelState) -> TrajectoryRecord {
        let (re, im) = match state {
            ModelState::SineGordon(s) => (s.u.clone(), s.v.clone()),
            ModelState::GinzburgLandau(s) => (s.q.iter().map(|z| z.re).collect(), s.q.iter().map(|z| z.im).collect()),
            ModelState::Abc(s) => (s.theta.to_vec(), Vec::new()),
        };
        TrajectoryRecord {
            model: self.name().to_string(),
            params: self.params_json(),
            t: state.time(),
            coeffs_re: re,
            coeffs_im: im,
        }
    }

    /// Phase-section parameter `γ` of the Ginzburg-Landau models (0 for the second form).
    pub(crate) fn section_phase(&self) -> Option<f64> {
        match self {
            Self::GinzburgLandau(g) => Some(match g.params().variant {
                GlVariant::DerNls { gamma, .. } => gamma,
                GlVariant::Pnls { .. } => 0.0,
            }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationEnd {
    pub state: ModelState,
    pub steps: usize,
    pub escaped: bool,
}

/// Number of equal steps covering `span` with step at most `dt`.
pub(crate) fn steps_for(span: f64, dt: f64) -> usize {
    ((span / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// Integrates from `state0` over `t_end` with equal steps no longer than `dt`, passing the initial
/// and every subsequent state to `observe`. Stops early when the state norm exceeds
/// `ESCAPE_NORM`.
pub fn simulate(
    model: &Model,
    state0: &ModelState,
    t_end: f64,
    dt: f64,
    mut observe: impl FnMut(&ModelState) -> Result<()>,
) -> Result<SimulationEnd> {
    if !(t_end > 0.0 && t_end.is_finite() && dt > 0.0 && dt.is_finite()) {
        return Err(domain!("need positive finite T and dt, got T = {t_end}, dt = {dt}"));
    }
    let steps = steps_for(t_end, dt);
    let h = t_end / steps as f64;
    let t0 = state0.time();
    let mut state = state0.clone();
    observe(&state)?;
    for i in 0..steps {
        state = model.step(&state, h)?;
        fix_time(&mut state, t0 + (i + 1) as f64 * h);
        observe(&state)?;
        if model.norm(&state)? > ESCAPE_NORM {
            return Ok(SimulationEnd { state, steps: i + 1, escaped: true });
        }
    }
    Ok(SimulationEnd { state, steps, escaped: false })
}

/// Replaces accumulated time by `t0 + n h` to avoid drift from repeated addition.
pub(crate) fn fix_time(state: &mut ModelState, t: f64) {
    match state {
        ModelState::SineGordon(s) => s.t = t,
        ModelState::GinzburgLandau(s) => s.t = t,
        ModelState::Abc(s) => s.t = t,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::ginzburg_landau::GlParams;

    #[test]
    fn vector_round_trip() {
        let g = Model::GinzburgLandau(GinzburgLandau::new(GlParams::pnls(0.1, 0.75, 1.0, 0.5)).unwrap());
        let Model::GinzburgLandau(sys) = &g else { unreachable!() };
        let s = ModelState::GinzburgLandau(sys.state_from_fn(0.0, |x| Complex64::new(x.cos(), 0.3)).unwrap());
        let v = g.vector(&s).unwrap();
        assert_eq!(g.with_vector(&s, &v).unwrap(), s);
        assert!(g.with_vector(&s, &v[1..]).is_err());
    }

    #[test]
    fn angle_differences_wrap() {
        let m = Model::Abc(AbcParams::new(1.0, 1.0, 1.0).unwrap());
        let a = ModelState::Abc(AbcState::new(0.0, [6.28, 0.0, 1.0]));
        let b = ModelState::Abc(AbcState::new(0.0, [0.01, 0.0, 1.0]));
        let d = m.difference(&a, &b).unwrap();
        assert!((d[0] - (0.01 + std::f64::consts::TAU - 6.28)).abs() < 1e-12);
    }

    #[test]
    fn simulate_visits_every_step_and_rejects_foreign_states() {
        let m = Model::Abc(AbcParams::new(1.0, 0.5, 0.2).unwrap());
        let s0 = ModelState::Abc(AbcState::new(0.0, [0.1, 0.2, 0.3]));
        let mut seen = 0;
        let end = simulate(&m, &s0, 1.0, 0.1, |_| {
            seen += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!((seen, end.steps, end.state.time()), (11, 10, 1.0));
        let g = Model::GinzburgLandau(GinzburgLandau::new(GlParams::dernls(0.0, 6.0, 0.0)).unwrap());
        assert!(g.step(&s0, 0.1).is_err());
    }
}
