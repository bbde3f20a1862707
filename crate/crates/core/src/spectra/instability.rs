//! The unstable eigenvalue of the `(1, 0)` block, its critical viscosity, and the analytic
//! estimates both are checked against.
//!
//! The estimates are stated for amplitude `Γ = 1/2`; the block scales as `A(Γ, ν) = 2Γ A(1/2, ν/2Γ)`,
//! so growth rates scale by `2Γ` at fixed `ν/2Γ` and the critical viscosity scales by `2Γ`.

use super::operator::{assemble_suboperator, ModeClass};
use super::spectrum::compute_spectrum;
use crate::error::{computation, domain, Result};
use serde::Serialize;

/// Real parts above this count as unstable.
pub const GROWTH_THRESHOLD: f64 = 1e-8;
/// Largest imaginary part tolerated on the unstable eigenvalue.
pub const IMAG_TOLERANCE: f64 = 1e-8;
/// Required agreement between truncations `N` and `2N`.
pub const REFINEMENT_TOLERANCE: f64 = 1e-8;

const INSTABILITY_WINDOW: (f64, f64) = (0.5, 0.95);
const ESTIMATE_WINDOW: (f64, f64) = (0.5, 0.8469);

fn unstable_class() -> ModeClass {
    ModeClass::new(1, 0).expect("nonzero class")
}

fn check_window(alpha: f64, gamma: f64) -> Result<()> {
    let (lo, hi) = INSTABILITY_WINDOW;
    if !(alpha > lo && alpha < hi) {
        return Err(domain!("alpha must lie in ({lo}, {hi}) for the unstable block, got {alpha}"));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(domain!("shear amplitude gamma must be positive, got {gamma}"));
    }
    Ok(())
}

/// Whether the two-sided estimates on `λ(ν)` and `λ₀` are stated for this `α`.
pub fn estimates_apply(alpha: f64) -> bool {
    alpha > ESTIMATE_WINDOW.0 && alpha < ESTIMATE_WINDOW.1
}

fn growth_radicands(alpha: f64) -> (f64, f64) {
    let a2 = alpha * alpha;
    let upper = a2 * (1.0 - a2) / (8.0 * (a2 + 1.0));
    let lower = upper - a2 * a2 * (a2 + 3.0) / (16.0 * (a2 + 1.0) * (a2 + 4.0));
    (lower, upper)
}

/// Two-sided estimate `(lower, upper)` of the inviscid unstable eigenvalue.
pub fn inviscid_growth_bounds(alpha: f64, gamma: f64) -> (f64, f64) {
    let (lo, hi) = growth_radicands(alpha);
    (2.0 * gamma * lo.sqrt(), 2.0 * gamma * hi.sqrt())
}

/// Two-sided estimate `(lower, upper)` of the viscous unstable eigenvalue.
pub fn growth_bounds(alpha: f64, gamma: f64, nu: f64) -> (f64, f64) {
    let a2 = alpha * alpha;
    let (lo, hi) = inviscid_growth_bounds(alpha, gamma);
    (lo - nu * (a2 + 1.0), hi - nu * a2)
}

/// Two-sided estimate `(lower, upper)` of the critical viscosity.
pub fn critical_viscosity_bounds(alpha: f64, gamma: f64) -> (f64, f64) {
    let a2 = alpha * alpha;
    let radicand = 32.0 - 3.0 * a2.powi(3) - 17.0 * a2 * a2 - 16.0 * a2;
    let lower = radicand.sqrt() / (4.0 * (a2 + 1.0) * (a2 + 4.0));
    let upper = ((1.0 - a2) / 2.0).sqrt() / (2.0 * (a2 + 1.0));
    (2.0 * gamma * lower, 2.0 * gamma * upper)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnstableEigenvalue {
    pub value: f64,
    pub imag: f64,
    pub trunc: usize,
    /// Same eigenvalue at truncation `2N`.
    pub refined: f64,
    pub refinement_delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GrowthRate {
    Unstable(UnstableEigenvalue),
    /// No eigenvalue with positive real part; carries the largest real part found.
    Stable { max_real: f64 },
}

impl GrowthRate {
    pub fn unstable(&self) -> Option<&UnstableEigenvalue> {
        match self {
            Self::Unstable(u) => Some(u),
            Self::Stable { .. } => None,
        }
    }
}

/// Unique positive-real-part eigenvalue of one truncation, or the largest real part if none.
fn leading_growth(alpha: f64, gamma: f64, nu: f64, trunc: usize) -> Result<std::result::Result<(f64, f64), f64>> {
    let op = assemble_suboperator(unstable_class(), alpha, gamma, nu, trunc)?;
    let spec = compute_spectrum(&op, false)?;
    let positive: Vec<_> = spec.eigenvalues.iter().filter(|z| z.re > GROWTH_THRESHOLD).collect();
    match positive.as_slice() {
        [] => Ok(Err(spec.max_real())),
        [z] => {
            if z.im.abs() >= IMAG_TOLERANCE {
                return Err(computation!(
                    "unstable eigenvalue {z} at nu={nu}, trunc={trunc} is not real (tolerance {IMAG_TOLERANCE:e})"
                ));
            }
            Ok(Ok((z.re, z.im)))
        }
        many => Err(computation!(
            "expected one unstable eigenvalue at nu={nu}, trunc={trunc}, found {}: {many:?}",
            many.len()
        )),
    }
}

pub fn unstable_eigenvalue(alpha: f64, gamma: f64, nu: f64, trunc: usize) -> Result<GrowthRate> {
    check_window(alpha, gamma)?;
    if trunc < 3 {
        return Err(domain!("truncation must be at least 3, got {trunc}"));
    }
    let coarse = leading_growth(alpha, gamma, nu, trunc)?;
    let fine = leading_growth(alpha, gamma, nu, 2 * trunc)?;
    match (coarse, fine) {
        (Ok((value, imag)), Ok((refined, _))) => {
            let refinement_delta = (value - refined).abs();
            if refinement_delta > REFINEMENT_TOLERANCE {
                return Err(computation!(
                    "unstable eigenvalue not converged: {value} at N={trunc} vs {refined} at N={}",
                    2 * trunc
                ));
            }
            Ok(GrowthRate::Unstable(UnstableEigenvalue { value, imag, trunc, refined, refinement_delta }))
        }
        (Err(max_real), Err(_)) => Ok(GrowthRate::Stable { max_real }),
        _ => Err(computation!(
            "truncations N={trunc} and N={} disagree on stability at nu={nu}",
            2 * trunc
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalViscosity {
    pub nu_star: f64,
    pub trunc: usize,
    pub tol: f64,
    /// Largest real part of the spectrum at `nu_star`.
    pub max_real_at_root: f64,
    pub refined: f64,
    pub refinement_delta: f64,
    pub bounds: (f64, f64),
    pub within_bounds: bool,
    pub evaluations: usize,
}

struct Bisection<F> {
    f: F,
    evaluations: usize,
}

impl<F: FnMut(f64) -> Result<f64>> Bisection<F> {
    fn eval(&mut self, x: f64) -> Result<f64> {
        self.evaluations += 1;
        (self.f)(x)
    }

    /// Shrinks `[lo, hi]` with `f(lo) > 0 ≥ f(hi)` to width `tol`.
    fn run(&mut self, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

pub fn critical_viscosity(alpha: f64, gamma: f64, trunc: usize, tol: f64) -> Result<CriticalViscosity> {
    check_window(alpha, gamma)?;
    if !(tol >= 1e-8) {
        return Err(domain!("bisection tolerance must be at least 1e-8, got {tol}"));
    }
    let max_real = |n: usize| {
        move |nu: f64| -> Result<f64> {
            let op = assemble_suboperator(unstable_class(), alpha, gamma, nu, n)?;
            Ok(compute_spectrum(&op, false)?.max_real())
        }
    };
    let bounds = critical_viscosity_bounds(alpha, gamma);
    let (lo, hi) = (0.5 * bounds.0, 1.5 * bounds.1);

    let mut coarse = Bisection { f: max_real(trunc), evaluations: 0 };
    let (f_lo, f_hi) = (coarse.eval(lo)?, coarse.eval(hi)?);
    if !(f_lo > 0.0 && f_hi <= 0.0) {
        return Err(computation!(
            "no sign change of the largest real part on [{lo}, {hi}] (values {f_lo:e}, {f_hi:e}) \
             for alpha={alpha}, gamma={gamma}, trunc={trunc}"
        ));
    }
    let nu_star = coarse.run(lo, hi, tol)?;
    let max_real_at_root = coarse.eval(nu_star)?;

    let mut fine = Bisection { f: max_real(2 * trunc), evaluations: 0 };
    let mut step = tol;
    let (mut a, mut b) = (nu_star - step, nu_star + step);
    while !(fine.eval(a)? > 0.0 && fine.eval(b)? <= 0.0) {
        step *= 2.0;
        if step > hi - lo {
            return Err(computation!("critical viscosity at N={} not found near {nu_star}", 2 * trunc));
        }
        (a, b) = (nu_star - step, nu_star + step);
    }
    let refined = fine.run(a.max(lo), b.min(hi), tol)?;

    Ok(CriticalViscosity {
        nu_star,
        trunc,
        tol,
        max_real_at_root,
        refined,
        refinement_delta: (refined - nu_star).abs(),
        bounds,
        within_bounds: bounds.0 < nu_star && nu_star < bounds.1,
        evaluations: coarse.evaluations + fine.evaluations,
    })
}
