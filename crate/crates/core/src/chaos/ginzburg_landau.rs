//! Ginzburg-Landau equations near the focusing NLS under the even constraint:
//!
//! - derivative form `iqₜ = qₓₓ + 2|q|²q + iε[(9/16 − |q|²)q + μ|∂̂q|²q̄]`, where `∂̂` keeps
//!   wavenumbers `1..=K` of the x-derivative;
//! - `iqₜ = qₓₓ + 2(|q|² − ω²)q + iε(qₓₓ − αq + β)`.
//!
//! Both are written as `qₜ = L q + N(q)` with diagonal `L` and stepped by ETDRK4.

use super::basis::{Parity, ParityBasis};
use super::etdrk4::StepperCache;
use super::sine_gordon::MAX_NONLINEAR_STEP;
use crate::error::{computation, domain, structure, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum GlVariant {
    DerNls { eps: f64, mu: f64, cutoff: usize, gamma: f64 },
    Pnls { eps: f64, omega: f64, alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlParams {
    #[serde(flatten)]
    pub variant: GlVariant,
    pub modes: usize,
}

pub const DEFAULT_GL_MODES: usize = 64;
pub const DEFAULT_CUTOFF: usize = 32;

impl GlParams {
    pub fn dernls(eps: f64, mu: f64, gamma: f64) -> Self {
        Self { variant: GlVariant::DerNls { eps, mu, cutoff: DEFAULT_CUTOFF, gamma }, modes: DEFAULT_GL_MODES }
    }

    pub fn pnls(eps: f64, omega: f64, alpha: f64, beta: f64) -> Self {
        Self { variant: GlVariant::Pnls { eps, omega, alpha, beta }, modes: DEFAULT_GL_MODES }
    }

    pub fn eps(&self) -> f64 {
        match self.variant {
            GlVariant::DerNls { eps, .. } | GlVariant::Pnls { eps, .. } => eps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes == 0 {
            return Err(domain!("need at least one mode"));
        }
        let eps = self.eps();
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(domain!("perturbation eps must be non-negative, got {eps}"));
        }
        match self.variant {
            GlVariant::DerNls { mu, cutoff, gamma, .. } => {
                if !(mu.is_finite() && gamma.is_finite()) {
                    return Err(domain!("mu and gamma must be finite"));
                }
                if cutoff == 0 || cutoff >= self.modes {
                    return Err(domain!("multiplier cutoff K must lie in 1..{}, got {cutoff}", self.modes));
                }
            }
            GlVariant::Pnls { omega, alpha, beta, .. } => {
                if !(omega > 0.5 && omega < 1.0) {
                    return Err(domain!("omega must lie in (1/2, 1), got {omega}"));
                }
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return Err(domain!("alpha must be positive, got {alpha}"));
                }
                if !(beta > 0.0 && beta.is_finite()) {
                    return Err(domain!("beta must be positive, got {beta}"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlState {
    pub t: f64,
    /// Cosine coefficients of `q`.
    pub q: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct GinzburgLandau {
    params: GlParams,
    basis: ParityBasis,
    steppers: StepperCache,
}

/// Limit cycle `(3/4) exp(−i(9t/8 + γ))` of the derivative form.
pub fn limit_cycle(gamma: f64, t: f64) -> Complex64 {
    Complex64::from_polar(0.75, -(9.0 * t / 8.0 + gamma))
}

impl GinzburgLandau {
    pub fn new(params: GlParams) -> Result<Self> {
        params.validate()?;
        let basis = ParityBasis::new(Parity::Even, params.modes)?;
        let symbols = (0..params.modes)
            .map(|k| {
                let k2 = (k * k) as f64;
                match params.variant {
                    GlVariant::DerNls { eps, .. } => Complex64::new(9.0 * eps / 16.0, k2),
                    GlVariant::Pnls { eps, omega, alpha, .. } => {
                        Complex64::new(-eps * (k2 + alpha), k2 + 2.0 * omega * omega)
                    }
                }
            })
            .collect();
        Ok(Self { params, basis, steppers: StepperCache::new(symbols) })
    }

    pub fn params(&self) -> &GlParams {
        &self.params
    }

    pub fn basis(&self) -> &ParityBasis {
        &self.basis
    }

    pub fn name(&self) -> &'static str {
        match self.params.variant {
            GlVariant::DerNls { .. } => "dernls",
            GlVariant::Pnls { .. } => "pnls",
        }
    }

    pub fn params_json(&self) -> serde_json::Value {
        json!(self.params)
    }

    pub fn state(&self, t: f64, q: Vec<Complex64>) -> Result<GlState> {
        if q.len() != self.params.modes {
            return Err(structure!("expected {} coefficients, got {}", self.params.modes, q.len()));
        }
        if !q.iter().all(|z| z.is_finite()) {
            return Err(domain!("initial coefficients must be finite"));
        }
        Ok(GlState { t, q })
    }

    pub fn state_from_fn(&self, t: f64, q: impl Fn(f64) -> Complex64) -> Result<GlState> {
        let vals = self.basis.grid().into_iter().map(q).collect();
        self.state(t, self.basis.project(vals))
    }

    pub fn uniform_state(&self, t: f64, q0: Complex64) -> Result<GlState> {
        let mut q = vec![Complex64::default(); self.params.modes];
        q[0] = q0;
        self.state(t, q)
    }

    /// State on the limit cycle at time `t` (derivative form only).
    pub fn limit_cycle_state(&self, t: f64) -> Result<GlState> {
        match self.params.variant {
            GlVariant::DerNls { gamma, .. } => self.uniform_state(t, limit_cycle(gamma, t)),
            GlVariant::Pnls { .. } => Err(domain!("the limit cycle belongs to the derivative form")),
        }
    }

    /// `∫₀^{2π} |q|² dx`.
    pub fn mass(&self, state: &GlState) -> f64 {
        self.basis.l2_squared(&state.q)
    }

    fn nonlinear(&self, q: &[Complex64]) -> Vec<Complex64> {
        let vals = self.basis.synthesize(q);
        let minus_2i = Complex64::new(0.0, -2.0);
        let mut n = match self.params.variant {
            GlVariant::DerNls { eps, mu, cutoff, .. } => {
                let d = self.basis.synthesize_derivative(q, cutoff);
                let grid = vals
                    .iter()
                    .zip(&d)
                    .map(|(&q, d)| {
                        let m = q.norm_sqr();
                        minus_2i * m * q + eps * (-m * q + mu * d.norm_sqr() * q.conj())
                    })
                    .collect();
                self.basis.project(grid)
            }
            GlVariant::Pnls { .. } => self.basis.project(vals.iter().map(|&q| minus_2i * q.norm_sqr() * q).collect()),
        };
        if let GlVariant::Pnls { eps, beta, .. } = self.params.variant {
            n[0] += eps * beta;
        }
        n
    }

    fn lipschitz(&self, q: &[Complex64]) -> f64 {
        let vals = self.basis.synthesize(q);
        let m2 = vals.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
        match self.params.variant {
            GlVariant::DerNls { eps, mu, cutoff, .. } => {
                let d = self.basis.synthesize_derivative(q, cutoff).iter().map(|z| z.norm()).fold(0.0, f64::max);
                6.0 * m2 + eps * (3.0 * m2 + mu.abs() * (d * d + 2.0 * d * m2.sqrt() * cutoff as f64))
            }
            GlVariant::Pnls { .. } => 6.0 * m2,
        }
    }
}

/// Advances `q` by `dt`: dispersion and linear gain/damping exactly, cubic and multiplier terms
/// on the grid, projected back onto cosines.
pub fn gl_step(system: &GinzburgLandau, state: &GlState, dt: f64) -> Result<GlState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(domain!("time step must be positive, got {dt}"));
    }
    let rate = system.lipschitz(&state.q);
    if dt * rate > MAX_NONLINEAR_STEP {
        return Err(domain!(
            "dt = {dt} exceeds the stability bound {:.4e} for the nonlinear terms at t = {}",
            MAX_NONLINEAR_STEP / rate,
            state.t
        ));
    }
    let stepper = system.steppers.get(dt);
    let q = stepper.step(&state.q, state.t, |q, _| Ok(system.nonlinear(q)))?;
    if !q.iter().all(|z| z.is_finite()) {
        return Err(computation!("Ginzburg-Landau state became non-finite; last valid time t = {}", state.t));
    }
    Ok(GlState { t: state.t + dt, q })
}
