//! Time-dependent coefficient `f` multiplying the cubic term of the sine-Gordon model.

use super::abc::AbcParams;
use crate::error::{domain, Result};
use serde::{Deserialize, Serialize};

/// Quasiperiodic forcing `α + Σₙ βₙ cos θₙ` whose first three phases are perturbed by an ABC orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quasiperiodic {
    pub alpha: f64,
    pub betas: [f64; 4],
    pub omegas: [f64; 4],
    pub phases: [f64; 4],
    /// Exponent of `ε` in front of the ABC angles; must exceed 1.
    pub mu: f64,
    pub abc: AbcParams,
    /// Initial ABC angles.
    pub theta0: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ForcingSpec {
    /// `f = cos t`.
    CosT,
    Quasiperiodic(Quasiperiodic),
}

impl ForcingSpec {
    pub fn validate(&self) -> Result<()> {
        if let Self::Quasiperiodic(q) = self {
            let finite = std::iter::once(q.alpha)
                .chain(q.betas)
                .chain(q.omegas)
                .chain(q.phases)
                .chain(q.theta0)
                .all(f64::is_finite);
            if !finite {
                return Err(domain!("quasiperiodic forcing parameters must be finite"));
            }
            if !(q.mu > 1.0 && q.mu.is_finite()) {
                return Err(domain!("forcing exponent mu must exceed 1, got {}", q.mu));
            }
            AbcParams::new(q.abc.a, q.abc.b, q.abc.c)?;
        }
        Ok(())
    }

    /// Upper bound on `|f|`.
    pub fn bound(&self) -> f64 {
        match self {
            Self::CosT => 1.0,
            Self::Quasiperiodic(q) => q.alpha.abs() + q.betas.iter().map(|b| b.abs()).sum::<f64>(),
        }
    }

    /// Whether `f` is `2π`-periodic in time.
    pub fn is_periodic(&self) -> bool {
        matches!(self, Self::CosT)
    }
}

/// Forcing together with the ABC angles it carries; the angles are not reduced mod `2π` because
/// they enter the phases scaled by `ε^μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Forcing {
    spec: ForcingSpec,
    eps_mu: f64,
    t: f64,
    theta: [f64; 3],
}

impl Forcing {
    pub fn new(spec: ForcingSpec, eps: f64, t0: f64) -> Result<Self> {
        spec.validate()?;
        let (eps_mu, theta) = match &spec {
            ForcingSpec::CosT => (0.0, [0.0; 3]),
            ForcingSpec::Quasiperiodic(q) => (eps.powf(q.mu), q.theta0),
        };
        Ok(Self { spec, eps_mu, t: t0, theta })
    }

    pub fn spec(&self) -> &ForcingSpec {
        &self.spec
    }

    /// Time and ABC angles the substate currently sits at.
    pub fn substate(&self) -> (f64, [f64; 3]) {
        (self.t, self.theta)
    }
}

/// `f(t)`; for quasiperiodic forcing the ABC angles are first carried from their current time to
/// `t` with RK4 steps no longer than `dt_sub`.
pub fn force_eval(forcing: &mut Forcing, t: f64, dt_sub: f64) -> f64 {
    match &forcing.spec {
        ForcingSpec::CosT => t.cos(),
        ForcingSpec::Quasiperiodic(q) => {
            let span = t - forcing.t;
            if span != 0.0 {
                let n = (span.abs() / dt_sub).ceil().max(1.0) as usize;
                let h = span / n as f64;
                for _ in 0..n {
                    forcing.theta = q.abc.rk4(&forcing.theta, h);
                }
                forcing.t = t;
            }
            let mut f = q.alpha;
            for n in 0..4 {
                let drift = if n < 3 { forcing.eps_mu * forcing.theta[n] } else { 0.0 };
                f += q.betas[n] * (q.omegas[n] * t + q.phases[n] + drift).cos();
            }
            f
        }
    }
}
