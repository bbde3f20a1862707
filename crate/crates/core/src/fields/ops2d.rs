//! Differential calculus on 2D spectral fields: Poisson bracket, Laplacian inversion,
//! stream-function velocities and the vorticity-form Navier-Stokes right-hand side.

use super::field2d::{SpectralField2D, TorusGrid2D};
use super::transform::analysis;
use crate::error::{domain, Result};
use num_complex::Complex64;

/// Tolerance on `|mean|` accepted by [`invert_laplacian`].
pub const MEAN_TOLERANCE: f64 = 1e-12;

/// `sum_i s_i a_i b_i` evaluated pseudo-spectrally and truncated to the dealiasing band.
pub(crate) fn product_sum(
    grid: TorusGrid2D,
    terms: &[(&SpectralField2D, &SpectralField2D, f64)],
    real: bool,
) -> SpectralField2D {
    let mut acc = vec![Complex64::default(); grid.len()];
    for &(a, b, s) in terms {
        let pa = a.to_physical();
        let pb = b.to_physical();
        for ((out, x), y) in acc.iter_mut().zip(&pa).zip(&pb) {
            if real {
                *out += s * x.re * y.re;
            } else {
                *out += s * x * y;
            }
        }
    }
    analysis(&mut acc, &grid.shape());
    let mut out = SpectralField2D::from_coeffs(grid, acc).expect("grid-sized buffer").dealias();
    if real {
        out.symmetrize();
    }
    out
}

fn bracket_impl(f: &SpectralField2D, g: &SpectralField2D, real: bool) -> SpectralField2D {
    let (fx, fy, gx, gy) = (f.dx(), f.dy(), g.dx(), g.dy());
    product_sum(*f.grid(), &[(&fx, &gy, 1.0), (&fy, &gx, -1.0)], real).project_mean()
}

/// `{f, g} = f_x g_y - f_y g_x` for real fields, dealiased and mean-free.
pub fn bracket(f: &SpectralField2D, g: &SpectralField2D) -> Result<SpectralField2D> {
    f.grid().same_as(g.grid())?;
    for (name, h) in [("f", f), ("g", g)] {
        if !h.is_real() {
            return Err(domain!(
                "bracket argument {name} is not real-valued (Hermitian defect {:.3e})",
                h.hermitian_defect()
            ));
        }
    }
    Ok(bracket_impl(f, g, true))
}

/// Bracket extended bilinearly to complex-valued fields (Lax eigenfunctions).
pub fn poisson_bracket(f: &SpectralField2D, g: &SpectralField2D) -> Result<SpectralField2D> {
    f.grid().same_as(g.grid())?;
    let real = f.is_real() && g.is_real();
    Ok(bracket_impl(f, g, real))
}

/// Solves `Δψ = f` on the mean-zero subspace.
pub fn invert_laplacian(f: &SpectralField2D) -> Result<SpectralField2D> {
    let mean = f.mean().norm();
    if mean > MEAN_TOLERANCE {
        return Err(domain!("Laplacian inversion needs a mean-zero field, mean is {mean:.3e}"));
    }
    let out = f.map_symbol(|kx, ky| {
        let k2 = kx * kx + ky * ky;
        if k2 == 0.0 {
            Complex64::default()
        } else {
            Complex64::new(-1.0 / k2, 0.0)
        }
    });
    Ok(out.project_mean())
}

pub fn laplacian(f: &SpectralField2D) -> SpectralField2D {
    f.laplacian()
}

/// Velocity `(u, v) = (-ψ_y, ψ_x)` of a stream function.
pub fn velocity_from_stream(psi: &SpectralField2D) -> (SpectralField2D, SpectralField2D) {
    (-&psi.dy(), psi.dx())
}

/// `∂ₜΩ = -{Ψ, Ω} + ν(ΔΩ + f)` with `Ψ = Δ⁻¹Ω`.
pub fn ns_rhs_2d(omega: &SpectralField2D, nu: f64, force: &SpectralField2D) -> Result<SpectralField2D> {
    if !(nu >= 0.0) {
        return Err(domain!("viscosity must be non-negative, got {nu}"));
    }
    omega.grid().same_as(force.grid())?;
    let psi = invert_laplacian(omega)?;
    let advection = bracket(&psi, omega)?;
    let mut out = -&advection;
    if nu > 0.0 {
        let viscous = &omega.laplacian() + force;
        out = &out + &viscous.scale(nu);
    }
    Ok(out.project_mean())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn g1() -> TorusGrid2D {
        TorusGrid2D::new(1.0, 32, 32).unwrap()
    }

    #[test]
    fn self_bracket_vanishes() {
        let g = g1();
        let f = SpectralField2D::from_fn(g, |x, y| (x + 2.0 * y).sin() + 0.3 * (3.0 * x).cos());
        assert!(bracket(&f, &f).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn bracket_of_sines() {
        let g = g1();
        let f = SpectralField2D::from_fn(g, |x, _| x.sin());
        let h = SpectralField2D::from_fn(g, |_, y| y.sin());
        let b = bracket(&f, &h).unwrap().to_physical_real();
        for (i, v) in b.iter().enumerate() {
            let (x, y) = g.point(i);
            assert!((v - x.cos() * y.cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn bracket_with_y_only_field_vanishes() {
        let g = g1();
        let f = SpectralField2D::from_fn(g, |_, y| y.cos());
        let p = SpectralField2D::from_fn(g, |_, y| (2.0 * y).sin() + 0.5 * y.cos());
        assert!(bracket(&f, &p).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn bracket_rejects_complex_and_mismatched_inputs() {
        let g = g1();
        let f = SpectralField2D::from_fn(g, |x, _| x.sin());
        let c = SpectralField2D::from_modes(g, &[((1, 1), Complex64::new(1.0, 0.0))]).unwrap();
        assert!(matches!(bracket(&f, &c), Err(crate::Error::Domain(_))));
        let other = SpectralField2D::zeros(TorusGrid2D::new(0.7, 32, 32).unwrap());
        assert!(matches!(bracket(&f, &other), Err(crate::Error::Structure(_))));
        assert!(poisson_bracket(&f, &c).is_ok());
    }

    #[test]
    fn laplacian_inversion_examples() {
        let g = g1();
        let f = SpectralField2D::from_fn(g, |_, y| y.cos());
        let psi = invert_laplacian(&f).unwrap();
        assert!((&psi + &f).max_abs() < 1e-14);

        let g7 = TorusGrid2D::new(0.7, 16, 16).unwrap();
        let m = SpectralField2D::from_modes(g7, &[((1, 2), Complex64::new(1.0, 0.0))]).unwrap();
        let inv = invert_laplacian(&m).unwrap();
        assert!((inv.coeff(1, 2).re + 1.0 / (0.49 + 4.0)).abs() < 1e-15);

        let with_mean = SpectralField2D::from_fn(g, |_, y| 1.0 + y.cos());
        assert!(matches!(invert_laplacian(&with_mean), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn velocity_examples() {
        let g = TorusGrid2D::new(0.7, 16, 16).unwrap();
        let psi = SpectralField2D::from_fn(g, |_, y| -y.cos());
        let (u, v) = velocity_from_stream(&psi);
        let up = u.to_physical_real();
        for (i, val) in up.iter().enumerate() {
            let (_, y) = g.point(i);
            assert!((val + y.sin()).abs() < 1e-14);
        }
        assert!(v.max_abs() < 1e-15);

        let psi = SpectralField2D::from_fn(g, |x, _| (0.7 * x).sin());
        let (u, v) = velocity_from_stream(&psi);
        assert!(u.max_abs() < 1e-15);
        let vp = v.to_physical_real();
        for (i, val) in vp.iter().enumerate() {
            let (x, _) = g.point(i);
            assert!((val - 0.7 * (0.7 * x).cos()).abs() < 1e-14);
        }
        let (u0, v0) = velocity_from_stream(&SpectralField2D::zeros(g));
        assert_eq!((u0.max_abs(), v0.max_abs()), (0.0, 0.0));
    }

    #[test]
    fn shear_is_a_forced_fixed_point() {
        let g = TorusGrid2D::new(0.7, 16, 16).unwrap();
        let omega = SpectralField2D::from_fn(g, |_, y| 0.5 * y.cos());
        for nu in [0.0, 0.1, 3.0] {
            let rhs = ns_rhs_2d(&omega, nu, &omega).unwrap();
            assert!(rhs.max_abs() < 1e-14);
        }
        let unit = SpectralField2D::from_fn(g, |_, y| y.cos());
        assert!(ns_rhs_2d(&unit, 0.0, &SpectralField2D::zeros(g)).unwrap().max_abs() < 1e-14);
        assert!(ns_rhs_2d(&unit, -1.0, &unit).is_err());
    }

    #[test]
    fn euler_rhs_of_random_field_is_mean_free() {
        let g = TorusGrid2D::new(0.8, 32, 32).unwrap();
        let omega = SpectralField2D::from_fn(g, |x, y| {
            (0.8 * x + y).sin() + 0.4 * (1.6 * x - 2.0 * y).cos() + 0.2 * (3.0 * y + PI / 5.0).sin()
        });
        let rhs = ns_rhs_2d(&omega, 0.0, &SpectralField2D::zeros(g)).unwrap();
        assert!(rhs.mean().norm() < 1e-15);
        assert!(rhs.max_abs() > 1e-3);
    }
}
