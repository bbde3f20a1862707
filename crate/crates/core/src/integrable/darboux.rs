//! Darboux transformation of the 2D Euler Lax pair and residual checks of the linear system
//! `{Ω, p} = 0`, `∂ₜp + {Ψ, p} = 0`.

use super::report::ResidualReport;
use crate::error::{domain, precondition, structure, Result};
use crate::fields::{invert_laplacian, poisson_bracket, SpectralField2D, TorusGrid2D};
use num_complex::Complex64;
use serde_json::json;

/// Largest accepted `‖{Ω, ΔF}‖∞` and `‖{ΔF, F}‖∞`.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-8;

/// Default mask threshold relative to `‖Ωₓ‖∞`.
pub const DEFAULT_ETA_FACTOR: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct DarbouxInput {
    pub omega: SpectralField2D,
    pub psi: SpectralField2D,
    /// Solution of the linear system that gets transformed.
    pub p: SpectralField2D,
    /// Fixed solution defining the gauge.
    pub f: SpectralField2D,
    /// Potential shift `F`.
    pub potential: SpectralField2D,
    /// Mask threshold on `|Ωₓ|`; `None` means `DEFAULT_ETA_FACTOR · ‖Ωₓ‖∞`.
    pub eta: Option<f64>,
}

impl DarbouxInput {
    /// Builds the input with `Ψ = Δ⁻¹Ω`.
    pub fn new(
        omega: SpectralField2D,
        p: SpectralField2D,
        f: SpectralField2D,
        potential: SpectralField2D,
        eta: Option<f64>,
    ) -> Result<Self> {
        for other in [&p, &f, &potential] {
            omega.grid().same_as(other.grid())?;
        }
        let psi = invert_laplacian(&omega)?;
        Ok(Self { omega, psi, p, f, potential, eta })
    }
}

/// Field known pointwise on the grid together with its first derivatives; masked points hold 0.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeField {
    pub grid: TorusGrid2D,
    pub values: Vec<Complex64>,
    pub dx: Vec<Complex64>,
    pub dy: Vec<Complex64>,
    pub mask: Vec<bool>,
}

impl GaugeField {
    pub fn masked_fraction(&self) -> f64 {
        self.mask.iter().filter(|&&m| m).count() as f64 / self.mask.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct DarbouxOutput {
    pub omega_t: SpectralField2D,
    pub psi_t: SpectralField2D,
    pub p_t: GaugeField,
    /// Mask threshold actually used.
    pub eta: f64,
}

fn physical(f: &SpectralField2D) -> Vec<Complex64> {
    f.to_physical()
}

fn eta_for(omega: &SpectralField2D, eta: Option<f64>) -> Result<f64> {
    match eta {
        Some(e) if e > 0.0 && e.is_finite() => Ok(e),
        Some(e) => Err(domain!("mask threshold must be positive and finite, got {e}")),
        None => Ok(DEFAULT_ETA_FACTOR * omega.dx().max_abs()),
    }
}

/// `(1/Ωₓ)[pₓ - (fₓ/f)p]` with first derivatives by the quotient rule.
pub fn gauge_transform(omega: &SpectralField2D, p: &SpectralField2D, f: &SpectralField2D, eta: f64) -> Result<GaugeField> {
    omega.grid().same_as(p.grid())?;
    omega.grid().same_as(f.grid())?;
    let grid = *omega.grid();
    let (wx, wxx, wxy) = (physical(&omega.dx()), physical(&omega.dx().dx()), physical(&omega.dx().dy()));
    let (pv, px, py, pxx, pxy) =
        (physical(p), physical(&p.dx()), physical(&p.dy()), physical(&p.dx().dx()), physical(&p.dx().dy()));
    let (fv, fx, fy, fxx, fxy) =
        (physical(f), physical(&f.dx()), physical(&f.dy()), physical(&f.dx().dx()), physical(&f.dx().dy()));

    let f_scale = fv.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(i) = fv.iter().position(|z| z.norm() <= 1e-12 * f_scale.max(f64::MIN_POSITIVE)) {
        let (x, y) = grid.point(i);
        return Err(domain!("gauge solution f vanishes at grid point ({x:.4}, {y:.4})"));
    }

    let n = grid.len();
    let zero = Complex64::default();
    let (mut values, mut dx, mut dy, mut mask) = (vec![zero; n], vec![zero; n], vec![zero; n], vec![false; n]);
    for i in 0..n {
        if wx[i].re.abs() < eta {
            mask[i] = true;
            continue;
        }
        let num = px[i] * fv[i] - fx[i] * pv[i];
        let num_x = pxx[i] * fv[i] - fxx[i] * pv[i];
        let num_y = (pxy[i] * fv[i] - fxy[i] * pv[i]) + (px[i] * fy[i] - fx[i] * py[i]);
        let den = fv[i] * wx[i];
        let den_x = fx[i] * wx[i] + fv[i] * wxx[i];
        let den_y = fy[i] * wx[i] + fv[i] * wxy[i];
        values[i] = num / den;
        dx[i] = (num_x * den - num * den_x) / (den * den);
        dy[i] = (num_y * den - num * den_y) / (den * den);
    }
    Ok(GaugeField { grid, values, dx, dy, mask })
}

/// Applies `p̃ = G_f p`, `Ψ̃ = Ψ + F`, `Ω̃ = Ω + ΔF`.
pub fn darboux_apply(input: &DarbouxInput) -> Result<DarbouxOutput> {
    for other in [&input.psi, &input.p, &input.f, &input.potential] {
        input.omega.grid().same_as(other.grid())?;
    }
    let lap_f = input.potential.laplacian();
    let c1 = poisson_bracket(&input.omega, &lap_f)?.max_abs();
    let c2 = poisson_bracket(&lap_f, &input.potential)?.max_abs();
    if c1 > CONSTRAINT_TOLERANCE || c2 > CONSTRAINT_TOLERANCE {
        return Err(precondition!(
            "potential shift violates the constraint: ‖{{Ω, ΔF}}‖∞ = {c1:.3e}, ‖{{ΔF, F}}‖∞ = {c2:.3e} (tolerance {CONSTRAINT_TOLERANCE:e})"
        ));
    }
    let eta = eta_for(&input.omega, input.eta)?;
    let p_t = gauge_transform(&input.omega, &input.p, &input.f, eta)?;
    Ok(DarbouxOutput { omega_t: &input.omega + &lap_f, psi_t: &input.psi + &input.potential, p_t, eta })
}

/// `{a, g}` for a spectral `a` and a pointwise gauge field, at unmasked points.
fn bracket_with_gauge(a: &SpectralField2D, g: &GaugeField) -> Vec<Option<Complex64>> {
    let (ax, ay) = (physical(&a.dx()), physical(&a.dy()));
    (0..g.values.len())
        .map(|i| (!g.mask[i]).then(|| ax[i] * g.dy[i] - ay[i] * g.dx[i]))
        .collect()
}

/// One time slice of an externally computed solution `(Ω, f, p)`.
#[derive(Debug, Clone)]
pub struct DarbouxSnapshot {
    pub t: f64,
    pub omega: SpectralField2D,
    pub psi: SpectralField2D,
    pub p: SpectralField2D,
    pub f: SpectralField2D,
}

impl DarbouxSnapshot {
    pub fn new(t: f64, omega: SpectralField2D, p: SpectralField2D, f: SpectralField2D) -> Result<Self> {
        omega.grid().same_as(p.grid())?;
        omega.grid().same_as(f.grid())?;
        let psi = invert_laplacian(&omega)?;
        Ok(Self { t, omega, psi, p, f })
    }
}

#[derive(Debug, Clone)]
pub struct DarbouxReport {
    /// `‖{Ω̃, p̃}‖` off the mask.
    pub spatial: ResidualReport,
    /// `‖∂ₜp̃ + {Ψ̃, p̃}‖` at interior snapshots, by central differences in time.
    pub temporal: Option<ResidualReport>,
}

fn norms(check: &str, values: Vec<f64>, masked: f64, grid: &TorusGrid2D, dt: Option<f64>, eta: f64) -> ResidualReport {
    ResidualReport::from_values(
        check,
        json!({"eta": eta, "alpha": grid.alpha()}),
        values,
        masked,
        vec![grid.nx(), grid.ny()],
        dt,
    )
}

/// Residuals of the transformed linear system. With a snapshot series, `Ψ̃(t)` is the snapshot
/// stream function shifted by the same potential `Ψ̃ - Ψ` as in `transformed`.
pub fn darboux_verify(
    original: &DarbouxInput,
    transformed: &DarbouxOutput,
    time_series: Option<&[DarbouxSnapshot]>,
) -> Result<DarbouxReport> {
    let grid = *original.omega.grid();
    grid.same_as(&transformed.p_t.grid)?;
    let eta = transformed.eta;
    let spatial_values: Vec<f64> =
        bracket_with_gauge(&transformed.omega_t, &transformed.p_t).into_iter().flatten().map(|z| z.norm()).collect();
    let spatial = norms("darboux_spatial", spatial_values, transformed.p_t.masked_fraction(), &grid, None, eta);

    let temporal = match time_series {
        None => None,
        Some(series) => {
            if series.len() < 3 {
                return Err(structure!("time residual needs at least 3 snapshots, got {}", series.len()));
            }
            let shift = &transformed.psi_t - &original.psi;
            let gauges = series
                .iter()
                .map(|s| {
                    grid.same_as(s.omega.grid())?;
                    gauge_transform(&s.omega, &s.p, &s.f, eta)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut values = Vec::new();
            let mut masked = 0usize;
            let mut widest: f64 = 0.0;
            for j in 1..series.len() - 1 {
                let span = series[j + 1].t - series[j - 1].t;
                if !(span > 0.0) {
                    return Err(structure!("snapshot times must increase, got span {span} around t={}", series[j].t));
                }
                widest = widest.max(0.5 * span);
                let psi_t = &series[j].psi + &shift;
                let adv = bracket_with_gauge(&psi_t, &gauges[j]);
                for i in 0..grid.len() {
                    let hidden = gauges[j - 1].mask[i] || gauges[j + 1].mask[i];
                    match adv[i] {
                        Some(b) if !hidden => {
                            let dt_p = (gauges[j + 1].values[i] - gauges[j - 1].values[i]) / span;
                            values.push((dt_p + b).norm());
                        }
                        _ => masked += 1,
                    }
                }
            }
            let total = (series.len() - 2) * grid.len();
            Some(norms("darboux_temporal", values, masked as f64 / total as f64, &grid, Some(widest), eta))
        }
    };
    Ok(DarbouxReport { spatial, temporal })
}

/// Agreement of the two gauge forms `pₓ/Ωₓ - (fₓ/Ωₓ)(p/f)` and `pᵧ/Ωᵧ - (fᵧ/Ωᵧ)(p/f)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeIdentityReport {
    pub max_difference: f64,
    /// Fraction of grid points where both `|Ωₓ|` and `|Ωᵧ|` exceed the threshold.
    pub compared_fraction: f64,
}

/// Compares the two gauge forms where `|Ωₓ|, |Ωᵧ| > threshold`.
pub fn gauge_identity_defect(
    omega: &SpectralField2D,
    p: &SpectralField2D,
    f: &SpectralField2D,
    threshold: f64,
) -> Result<GaugeIdentityReport> {
    omega.grid().same_as(p.grid())?;
    omega.grid().same_as(f.grid())?;
    let (wx, wy) = (physical(&omega.dx()), physical(&omega.dy()));
    let (pv, px, py) = (physical(p), physical(&p.dx()), physical(&p.dy()));
    let (fv, fx, fy) = (physical(f), physical(&f.dx()), physical(&f.dy()));
    let (mut worst, mut compared) = (0.0f64, 0usize);
    for i in 0..pv.len() {
        if wx[i].norm() <= threshold || wy[i].norm() <= threshold || fv[i].norm() == 0.0 {
            continue;
        }
        let ratio = pv[i] / fv[i];
        let via_x = px[i] / wx[i] - fx[i] / wx[i] * ratio;
        let via_y = py[i] / wy[i] - fy[i] / wy[i] * ratio;
        worst = worst.max((via_x - via_y).norm());
        compared += 1;
    }
    Ok(GaugeIdentityReport { max_difference: worst, compared_fraction: compared as f64 / pv.len() as f64 })
}

/// Residuals of `{Ω, g} = 0` and `∂ₜg + {Ψ, g} = 0` for `g ∈ {p, f}` along a snapshot series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemResiduals {
    pub spatial: f64,
    pub temporal: f64,
}

pub fn lax_system_residuals(series: &[DarbouxSnapshot]) -> Result<SystemResiduals> {
    if series.len() < 3 {
        return Err(structure!("need at least 3 snapshots, got {}", series.len()));
    }
    let mut spatial: f64 = 0.0;
    for s in series {
        spatial = spatial.max(poisson_bracket(&s.omega, &s.p)?.max_abs());
        spatial = spatial.max(poisson_bracket(&s.omega, &s.f)?.max_abs());
    }
    let mut temporal: f64 = 0.0;
    for j in 1..series.len() - 1 {
        let span = series[j + 1].t - series[j - 1].t;
        if span == 0.0 {
            return Err(structure!("repeated snapshot time {}", series[j].t));
        }
        for pick in [|s: &DarbouxSnapshot| s.p.clone(), |s: &DarbouxSnapshot| s.f.clone()] {
            let diff = (&pick(&series[j + 1]) - &pick(&series[j - 1])).scale(1.0 / span);
            let adv = poisson_bracket(&series[j].psi, &pick(&series[j]))?;
            temporal = temporal.max((&diff + &adv).max_abs());
        }
    }
    Ok(SystemResiduals { spatial, temporal })
}

/// `g(x, y) ↦ g(y, x)` on a square grid with `α = 1`.
pub fn swap_axes(g: &SpectralField2D) -> Result<SpectralField2D> {
    let grid = *g.grid();
    if grid.nx() != grid.ny() || grid.alpha() != 1.0 {
        return Err(domain!("axis swap needs a square grid with alpha = 1, got {grid:?}"));
    }
    let mut coeffs = vec![Complex64::default(); grid.len()];
    for (idx, c) in g.coeffs().iter().enumerate() {
        let (m, n) = grid.mode(idx);
        coeffs[grid.index(n, m).expect("square grid")] = *c;
    }
    SpectralField2D::from_coeffs(grid, coeffs)
}

/// Image of a snapshot series under `(t, x, y) ↦ (-t, y, x)`, in increasing time order.
pub fn mirror_series(series: &[DarbouxSnapshot]) -> Result<Vec<DarbouxSnapshot>> {
    series
        .iter()
        .rev()
        .map(|s| {
            Ok(DarbouxSnapshot {
                t: -s.t,
                omega: swap_axes(&s.omega)?,
                psi: swap_axes(&s.psi)?,
                p: swap_axes(&s.p)?,
                f: swap_axes(&s.f)?,
            })
        })
        .collect()
}
