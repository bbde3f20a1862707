//! Lax pair of the 2D Euler equation: `Lφ = {Ω, φ}`, `Aφ = {Ψ, φ}`.

use super::report::ResidualReport;
use super::stepping::{rk4_step, step_count, Axpy, MAX_COURANT};
use crate::error::{computation, domain, Result};
use crate::fields::transform::{analysis, synthesis};
use crate::fields::{invert_laplacian, poisson_bracket, SpectralField2D, TorusGrid2D};
use num_complex::Complex64;
use serde_json::json;

#[derive(Debug, Clone)]
pub struct LaxState2D {
    pub omega: SpectralField2D,
    /// Always `invert_laplacian(omega)`.
    pub psi: SpectralField2D,
    pub phi: SpectralField2D,
    pub lambda: Complex64,
}

impl LaxState2D {
    pub fn new(omega: SpectralField2D, phi: SpectralField2D, lambda: Complex64) -> Result<Self> {
        omega.grid().same_as(phi.grid())?;
        if !omega.is_real() {
            return Err(domain!("vorticity must be real (Hermitian defect {:.3e})", omega.hermitian_defect()));
        }
        let psi = invert_laplacian(&omega)?;
        Ok(Self { omega, psi, phi, lambda })
    }

    /// `‖Lφ - λφ‖∞` for a user-supplied eigenpair.
    pub fn eigen_residual(&self) -> f64 {
        let (l_phi, _) = lax_operators_2d(self);
        (&l_phi - &self.phi.scale_complex(self.lambda)).max_abs()
    }
}

/// `(Lφ, Aφ)`.
pub fn lax_operators_2d(state: &LaxState2D) -> (SpectralField2D, SpectralField2D) {
    let l = poisson_bracket(&state.omega, &state.phi).expect("state fields share a grid");
    let a = poisson_bracket(&state.psi, &state.phi).expect("state fields share a grid");
    (l, a)
}

/// Sign of the bracket in the vorticity equation used by the transported-eigenfield check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VorticitySign {
    /// `∂ₜΩ = -{Ψ, Ω}`.
    Physical,
    /// `∂ₜΩ = +{Ψ, Ω}`: breaks compatibility on purpose.
    Reversed,
}

#[derive(Clone)]
struct Transport2D {
    omega: SpectralField2D,
    phi: SpectralField2D,
    q: SpectralField2D,
}

impl Axpy for Transport2D {
    fn axpy(&self, a: f64, o: &Self) -> Self {
        Self {
            omega: &self.omega + &o.omega.scale(a),
            phi: &self.phi + &o.phi.scale(a),
            q: &self.q + &o.q.scale(a),
        }
    }
}

/// Precomputed symbols for evaluating `-{Ψ, g}` on a fixed grid.
struct TransportKernel {
    grid: TorusGrid2D,
    kx: Vec<f64>,
    ky: Vec<f64>,
    keep: Vec<bool>,
}

/// `Ψ_x` and `Ψ_y` in physical space.
struct StreamGradient {
    psi_x: Vec<f64>,
    psi_y: Vec<f64>,
}

impl TransportKernel {
    fn new(grid: TorusGrid2D) -> Self {
        let n = grid.len();
        let (mut kx, mut ky, mut keep) = (vec![0.0; n], vec![0.0; n], vec![false; n]);
        for idx in 0..n {
            (kx[idx], ky[idx]) = grid.wavevector(idx);
            let (m, k) = grid.mode(idx);
            keep[idx] = grid.keeps(m, k) && idx != 0;
        }
        Self { grid, kx, ky, keep }
    }

    /// Physical `a_x + i a_y` of a real field `a`.
    fn packed_gradient(&self, a: &[Complex64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = a
            .iter()
            .enumerate()
            .map(|(i, &c)| c * Complex64::new(-self.ky[i], self.kx[i]))
            .collect();
        synthesis(&mut buf, &self.grid.shape());
        buf
    }

    fn stream_gradient(&self, omega: &SpectralField2D) -> StreamGradient {
        let psi: Vec<Complex64> = omega
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let k2 = self.kx[i] * self.kx[i] + self.ky[i] * self.ky[i];
                if k2 == 0.0 {
                    Complex64::default()
                } else {
                    -c / k2
                }
            })
            .collect();
        let g = self.packed_gradient(&psi);
        StreamGradient { psi_x: g.iter().map(|z| z.re).collect(), psi_y: g.iter().map(|z| z.im).collect() }
    }

    fn finish(&self, mut acc: Vec<Complex64>, scale: f64) -> Vec<Complex64> {
        analysis(&mut acc, &self.grid.shape());
        for (c, &k) in acc.iter_mut().zip(&self.keep) {
            *c = if k { *c * scale } else { Complex64::default() };
        }
        acc
    }

    /// `scale · {Ψ, a}` for a real field `a`, Hermitian-symmetrised.
    fn bracket_real(&self, sg: &StreamGradient, a: &SpectralField2D, scale: f64) -> SpectralField2D {
        let g = self.packed_gradient(a.coeffs());
        let acc = (0..g.len())
            .map(|i| Complex64::new(sg.psi_x[i] * g[i].im - sg.psi_y[i] * g[i].re, 0.0))
            .collect();
        let mut out = SpectralField2D::from_coeffs(self.grid, self.finish(acc, scale)).expect("grid-sized buffer");
        out.symmetrize();
        out
    }

    /// `scale · {Ψ, a}` for a complex field `a`.
    fn bracket_complex(&self, sg: &StreamGradient, a: &SpectralField2D, scale: f64) -> SpectralField2D {
        let shape = self.grid.shape();
        let mut ax: Vec<Complex64> =
            a.coeffs().iter().enumerate().map(|(i, &c)| c * Complex64::new(0.0, self.kx[i])).collect();
        let mut ay: Vec<Complex64> =
            a.coeffs().iter().enumerate().map(|(i, &c)| c * Complex64::new(0.0, self.ky[i])).collect();
        synthesis(&mut ax, &shape);
        synthesis(&mut ay, &shape);
        let acc = (0..ax.len()).map(|i| ay[i] * sg.psi_x[i] - ax[i] * sg.psi_y[i]).collect();
        SpectralField2D::from_coeffs(self.grid, self.finish(acc, scale)).expect("grid-sized buffer")
    }

    fn courant(&self, sg: &StreamGradient, dt: f64) -> f64 {
        let g = self.grid;
        let kx = g.alpha() * (g.nx() / 2) as f64;
        let ky = (g.ny() / 2) as f64;
        let peak = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        dt * (peak(&sg.psi_y) * kx + peak(&sg.psi_x) * ky)
    }
}

/// Co-evolves `Ω` by the Euler equation and `φ`, `q₀ = {Ω₀, φ₀}` by `∂ₜ = -{Ψ, ·}` with RK4 and
/// returns the report for `‖{Ω(T), φ(T)} - q(T)‖`.
pub fn transported_eigenfield_check_2d(
    omega0: &SpectralField2D,
    phi0: &SpectralField2D,
    t_end: f64,
    dt: f64,
) -> Result<ResidualReport> {
    transported_eigenfield_run_2d(omega0, phi0, t_end, dt, VorticitySign::Physical)
}

pub fn transported_eigenfield_run_2d(
    omega0: &SpectralField2D,
    phi0: &SpectralField2D,
    t_end: f64,
    dt: f64,
    sign: VorticitySign,
) -> Result<ResidualReport> {
    if !(dt > 0.0 && t_end > 0.0 && dt.is_finite() && t_end.is_finite()) {
        return Err(domain!("need positive finite T and dt, got T={t_end}, dt={dt}"));
    }
    let state0 = LaxState2D::new(omega0.clone(), phi0.clone(), Complex64::default())?;
    let (q0, _) = lax_operators_2d(&state0);
    let s = match sign {
        VorticitySign::Physical => -1.0,
        VorticitySign::Reversed => 1.0,
    };
    let kernel = TransportKernel::new(*omega0.grid());
    let rhs = |_: f64, st: &Transport2D| -> Result<Transport2D> {
        let sg = kernel.stream_gradient(&st.omega);
        Ok(Transport2D {
            omega: kernel.bracket_real(&sg, &st.omega, s),
            phi: kernel.bracket_complex(&sg, &st.phi, -1.0),
            q: kernel.bracket_complex(&sg, &st.q, -1.0),
        })
    };
    let steps = step_count(t_end, dt);
    let h = t_end / steps as f64;
    let mut st = Transport2D { omega: omega0.clone(), phi: phi0.clone(), q: q0 };
    for i in 0..steps {
        let courant = kernel.courant(&kernel.stream_gradient(&st.omega), h);
        if courant > MAX_COURANT {
            return Err(computation!("CFL violated at t={:.4}: Courant number {courant:.3}", i as f64 * h));
        }
        st = rk4_step(&st, i as f64 * h, h, rhs)?;
        if !st.omega.max_abs().is_finite() || !st.phi.max_abs().is_finite() || !st.q.max_abs().is_finite() {
            return Err(computation!("non-finite state at t={:.4}", (i + 1) as f64 * h));
        }
    }
    let final_state = LaxState2D::new(st.omega, st.phi, Complex64::default())?;
    let (l_phi, _) = lax_operators_2d(&final_state);
    let diff = (&l_phi - &st.q).to_physical();
    let g = omega0.grid();
    let check = match sign {
        VorticitySign::Physical => "lax2d_transport",
        VorticitySign::Reversed => "lax2d_transport_control",
    };
    Ok(ResidualReport::from_values(
        check,
        json!({"t_end": t_end, "alpha": g.alpha(), "dealias_fraction": g.dealias_fraction()}),
        diff.iter().map(|z| z.norm()),
        0.0,
        vec![g.nx(), g.ny()],
        Some(h),
    ))
}
