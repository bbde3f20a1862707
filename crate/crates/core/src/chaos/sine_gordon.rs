//! Perturbed sine-Gordon equation `uₜₜ = c²uₓₓ + sin u + ε(−a u + f sin³u)` on `[0, 2π]` with an
//! even or odd constraint.
//!
//! Mode `k ≥ 1` is advanced as `w = uₜ + i c k u`, which turns the wave operator into the
//! diagonal symbol `i c k`; the mean mode uses `w = uₜ + i u` with symbol 0.

use super::basis::{Parity, ParityBasis};
use super::etdrk4::StepperCache;
use super::forcing::{force_eval, Forcing, ForcingSpec};
use crate::error::{computation, domain, structure, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Largest accepted `dt` times the Lipschitz bound of the nonlinear terms.
pub const MAX_NONLINEAR_STEP: f64 = 2.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgParams {
    pub c: f64,
    pub a: f64,
    pub eps: f64,
    pub parity: Parity,
    pub modes: usize,
    pub forcing: ForcingSpec,
    /// Substep for the ABC angles of quasiperiodic forcing.
    pub dt_sub: f64,
}

impl Default for SgParams {
    fn default() -> Self {
        Self { c: 0.9, a: 1.0, eps: 0.0, parity: Parity::Even, modes: 128, forcing: ForcingSpec::CosT, dt_sub: 1e-2 }
    }
}

impl SgParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.5 && self.c < 1.0) {
            return Err(domain!("wave speed c must lie in (1/2, 1), got {}", self.c));
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(domain!("coefficient a must be positive, got {}", self.a));
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(domain!("perturbation eps must be non-negative, got {}", self.eps));
        }
        if self.modes == 0 {
            return Err(domain!("need at least one mode"));
        }
        if !(self.dt_sub > 0.0 && self.dt_sub.is_finite()) {
            return Err(domain!("forcing substep must be positive, got {}", self.dt_sub));
        }
        self.forcing.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgState {
    pub t: f64,
    /// Coefficients of `u` in the parity basis.
    pub u: Vec<f64>,
    /// Coefficients of `uₜ`.
    pub v: Vec<f64>,
    pub forcing: Forcing,
}

#[derive(Debug, Clone)]
pub struct SineGordon {
    params: SgParams,
    basis: ParityBasis,
    steppers: StepperCache,
}

impl SineGordon {
    pub fn new(params: SgParams) -> Result<Self> {
        params.validate()?;
        let basis = ParityBasis::new(params.parity, params.modes)?;
        let symbols = (0..params.modes)
            .map(|j| Complex64::new(0.0, params.c * basis.wavenumber(j) as f64))
            .collect();
        Ok(Self { params, basis, steppers: StepperCache::new(symbols) })
    }

    pub fn params(&self) -> &SgParams {
        &self.params
    }

    pub fn basis(&self) -> &ParityBasis {
        &self.basis
    }

    pub fn params_json(&self) -> serde_json::Value {
        json!(self.params)
    }

    pub fn state(&self, t: f64, u: Vec<f64>, v: Vec<f64>) -> Result<SgState> {
        let k = self.params.modes;
        if u.len() != k || v.len() != k {
            return Err(structure!("expected {k} coefficients, got {} and {}", u.len(), v.len()));
        }
        if !u.iter().chain(&v).all(|x| x.is_finite()) {
            return Err(domain!("initial coefficients must be finite"));
        }
        let forcing = Forcing::new(self.params.forcing.clone(), self.params.eps, t)?;
        Ok(SgState { t, u, v, forcing })
    }

    /// State from grid functions, projected onto the parity basis.
    pub fn state_from_fn(&self, t: f64, u: impl Fn(f64) -> f64, v: impl Fn(f64) -> f64) -> Result<SgState> {
        let x = self.basis.grid();
        let uc = self.basis.project_real(&x.iter().map(|&x| u(x)).collect::<Vec<_>>());
        let vc = self.basis.project_real(&x.iter().map(|&x| v(x)).collect::<Vec<_>>());
        self.state(t, uc, vc)
    }

    /// Spatially uniform state; only available under the even constraint.
    pub fn uniform_state(&self, t: f64, u0: f64, v0: f64) -> Result<SgState> {
        if self.params.parity != Parity::Even {
            return Err(domain!("a uniform state needs the even constraint"));
        }
        let mut u = vec![0.0; self.params.modes];
        let mut v = vec![0.0; self.params.modes];
        u[0] = u0;
        v[0] = v0;
        self.state(t, u, v)
    }

    /// `∫₀^{2π} [½uₜ² + ½c²uₓ² + cos u] dx`, conserved when `ε = 0`.
    pub fn energy(&self, state: &SgState) -> f64 {
        let re = |x: &[f64]| x.iter().map(|&a| Complex64::new(a, 0.0)).collect::<Vec<_>>();
        let kinetic = 0.5 * self.basis.l2_squared(&re(&state.v));
        let c2 = self.params.c * self.params.c;
        let elastic = 0.5 * c2 * self.basis.gradient_l2_squared(&re(&state.u));
        let cos_u: Vec<f64> = self.basis.synthesize_real(&state.u).iter().map(|u| u.cos()).collect();
        kinetic + elastic + self.basis.quadrature(&cos_u)
    }

    fn frequency(&self, j: usize) -> f64 {
        match self.basis.wavenumber(j) {
            0 => 1.0,
            k => self.params.c * k as f64,
        }
    }

    fn pack(&self, u: &[f64], v: &[f64]) -> Vec<Complex64> {
        (0..u.len()).map(|j| Complex64::new(v[j], self.frequency(j) * u[j])).collect()
    }

    fn unpack(&self, w: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let u = (0..w.len()).map(|j| w[j].im / self.frequency(j)).collect();
        let v = w.iter().map(|z| z.re).collect();
        (u, v)
    }

    fn lipschitz(&self) -> f64 {
        let p = &self.params;
        1.0 + p.eps * (p.a + 3.0 * p.forcing.bound())
    }
}

/// Advances `(u, uₜ)` by `dt` with ETDRK4; the wave operator is integrated exactly and
/// `sin u`, `f sin³u` are evaluated on the grid and projected back onto the parity basis.
pub fn sg_step(system: &SineGordon, state: &SgState, dt: f64) -> Result<SgState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(domain!("time step must be positive, got {dt}"));
    }
    if dt * system.lipschitz() > MAX_NONLINEAR_STEP {
        return Err(domain!(
            "dt = {dt} exceeds the stability bound {:.4} for the nonlinear terms",
            MAX_NONLINEAR_STEP / system.lipschitz()
        ));
    }
    let p = &system.params;
    let basis = &system.basis;
    let stepper = system.steppers.get(dt);
    let mut forcing = state.forcing.clone();
    let w0 = system.pack(&state.u, &state.v);
    let w1 = stepper.step(&w0, state.t, |w, t| {
        let (u, v) = system.unpack(w);
        let f = if p.eps == 0.0 { 0.0 } else { force_eval(&mut forcing, t, p.dt_sub) };
        let grid: Vec<f64> = basis
            .synthesize_real(&u)
            .into_iter()
            .map(|u| {
                let s = u.sin();
                s + p.eps * (-p.a * u + f * s * s * s)
            })
            .collect();
        let mut n: Vec<Complex64> = basis.project_real(&grid).into_iter().map(|x| Complex64::new(x, 0.0)).collect();
        if basis.wavenumber(0) == 0 {
            n[0].im += v[0];
        }
        Ok(n)
    })?;
    let (u, v) = system.unpack(&w1);
    if !u.iter().chain(&v).all(|x| x.is_finite()) {
        return Err(computation!("sine-Gordon state became non-finite; last valid time t = {}", state.t));
    }
    Ok(SgState { t: state.t + dt, u, v, forcing })
}
