//! Lax pair of the 3D Euler equation in vorticity form: `Lφ = (Ω·∇)φ`, `Aφ = (u·∇)φ`.

use super::report::ResidualReport;
use super::stepping::{rk4_step, step_count, Axpy, MAX_COURANT};
use crate::error::{computation, domain, Result};
use crate::fields::{advect_scalar, biot_savart_3d, euler_vorticity_rhs, SpectralField3D, TorusGrid3D, VectorField3D};
use num_complex::Complex64;
use serde_json::json;
use std::fmt;
use std::sync::Arc;

/// Divergence-free velocity field as a function of time.
pub type VelocityFn = Arc<dyn Fn(f64) -> VectorField3D + Send + Sync>;

/// How the velocity transporting `Ω` and `φ` is obtained.
#[derive(Clone)]
pub enum VelocityClosure {
    /// `u = biot_savart_3d(Ω)`, i.e. `Ω = ∇ × u` is imposed.
    BiotSavart,
    /// `u(t)` given independently of `Ω`.
    Prescribed(VelocityFn),
}

impl fmt::Debug for VelocityClosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BiotSavart => write!(f, "BiotSavart"),
            Self::Prescribed(_) => write!(f, "Prescribed(..)"),
        }
    }
}

/// ABC field `(A sin z + C cos y, B sin x + A cos z, C sin y + B cos x)`.
pub fn abc_velocity(grid: TorusGrid3D, a: f64, b: f64, c: f64) -> VectorField3D {
    VectorField3D::from_fn(grid, |[x, y, z]| {
        [a * z.sin() + c * y.cos(), b * x.sin() + a * z.cos(), c * y.sin() + b * x.cos()]
    })
}

impl VelocityClosure {
    pub fn enforces_curl(&self) -> bool {
        matches!(self, Self::BiotSavart)
    }

    /// `(1 + depth·sin t)` times a fixed ABC field.
    pub fn modulated_abc(grid: TorusGrid3D, abc: [f64; 3], depth: f64) -> Self {
        let base = abc_velocity(grid, abc[0], abc[1], abc[2]);
        Self::Prescribed(Arc::new(move |t| base.scale(1.0 + depth * t.sin())))
    }

    fn velocity(&self, omega: &VectorField3D, t: f64) -> Result<VectorField3D> {
        match self {
            Self::BiotSavart => biot_savart_3d(omega),
            Self::Prescribed(u) => {
                let v = u(t);
                v.grid().same_as(omega.grid())?;
                Ok(v)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct LaxState3D {
    pub omega: VectorField3D,
    pub u: VectorField3D,
    pub phi: SpectralField3D,
    pub lambda: Complex64,
    /// Whether `u` was obtained from `Ω = ∇ × u`.
    pub curl_constraint: bool,
}

impl LaxState3D {
    pub fn new(omega: VectorField3D, phi: SpectralField3D, lambda: Complex64, closure: &VelocityClosure) -> Result<Self> {
        omega.grid().same_as(phi.grid())?;
        let u = closure.velocity(&omega, 0.0)?;
        Ok(Self { omega, u, phi, lambda, curl_constraint: closure.enforces_curl() })
    }
}

/// `(Lφ, Aφ)`.
pub fn lax_operators_3d(state: &LaxState3D) -> Result<(SpectralField3D, SpectralField3D)> {
    Ok((advect_scalar(&state.omega, &state.phi)?, advect_scalar(&state.u, &state.phi)?))
}

#[derive(Clone)]
struct Transport3D {
    omega: VectorField3D,
    phi: SpectralField3D,
    q: SpectralField3D,
}

impl Axpy for Transport3D {
    fn axpy(&self, a: f64, o: &Self) -> Self {
        Self {
            omega: &self.omega + &o.omega.scale(a),
            phi: &self.phi + &o.phi.scale(a),
            q: &self.q + &o.q.scale(a),
        }
    }
}

/// Co-evolves `∂ₜΩ = (Ω·∇)u - (u·∇)Ω`, `∂ₜφ = -(u·∇)φ` and `q₀ = (Ω₀·∇)φ₀` under the same
/// transport, and reports `‖(Ω(T)·∇)φ(T) - q(T)‖`.
pub fn transported_eigenfield_check_3d(
    omega0: &VectorField3D,
    phi0: &SpectralField3D,
    t_end: f64,
    dt: f64,
    closure: &VelocityClosure,
) -> Result<ResidualReport> {
    if !(dt > 0.0 && t_end > 0.0 && dt.is_finite() && t_end.is_finite()) {
        return Err(domain!("need positive finite T and dt, got T={t_end}, dt={dt}"));
    }
    let mean = omega0.mean().iter().map(|c| c.norm()).fold(0.0, f64::max);
    if mean > 1e-12 {
        return Err(domain!("initial vorticity must be mean-zero, mean is {mean:.3e}"));
    }
    if closure.enforces_curl() && omega0.max_divergence_symbol() > 1e-10 {
        return Err(domain!(
            "curl closure needs a divergence-free vorticity, |k·Ω̂| reaches {:.3e}",
            omega0.max_divergence_symbol()
        ));
    }
    let state0 = LaxState3D::new(omega0.clone(), phi0.clone(), Complex64::default(), closure)?;
    let (q0, _) = lax_operators_3d(&state0)?;
    let grid = *omega0.grid();
    let kmax = [0, 1, 2].map(|c| (grid.shape()[c] / 2) as f64);

    let rhs = |t: f64, st: &Transport3D| -> Result<Transport3D> {
        let u = closure.velocity(&st.omega, t)?;
        Ok(Transport3D {
            omega: euler_vorticity_rhs(&st.omega, &u)?,
            phi: advect_scalar(&u, &st.phi)?.scale(-1.0),
            q: advect_scalar(&u, &st.q)?.scale(-1.0),
        })
    };
    let steps = step_count(t_end, dt);
    let h = t_end / steps as f64;
    let mut st = Transport3D { omega: omega0.clone(), phi: phi0.clone(), q: q0 };
    for i in 0..steps {
        let t = i as f64 * h;
        let u = closure.velocity(&st.omega, t)?;
        let courant: f64 = h * (0..3).map(|c| u.components[c].max_abs() * kmax[c]).sum::<f64>();
        if courant > MAX_COURANT {
            return Err(computation!("CFL violated at t={t:.4}: Courant number {courant:.3}"));
        }
        st = rk4_step(&st, t, h, rhs)?;
        if !st.omega.max_abs().is_finite() || !st.phi.max_abs().is_finite() || !st.q.max_abs().is_finite() {
            return Err(computation!("non-finite state at t={:.4}", t + h));
        }
    }
    let l_phi = advect_scalar(&st.omega, &st.phi)?;
    let diff = (&l_phi - &st.q).to_physical();
    Ok(ResidualReport::from_values(
        "lax3d_transport",
        json!({"t_end": t_end, "curl_constraint": closure.enforces_curl()}),
        diff.iter().map(|z| z.norm()),
        0.0,
        grid.shape().to_vec(),
        Some(h),
    ))
}
