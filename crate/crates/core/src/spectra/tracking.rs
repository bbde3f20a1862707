//! Following eigenvalues down a viscosity schedule and sorting their ν → 0 limits into
//! persistence, condensation, singularity and addition.

use super::operator::{assemble_suboperator, ModeClass, Provenance};
use super::spectrum::{compute_spectrum, EulerSpectrum, Spectrum};
use crate::error::{domain, structure, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Two candidate matches closer than this (in distance) make an assignment ambiguous.
pub const AMBIGUITY_TOLERANCE: f64 = 1e-12;
/// Relative separation below which two eigenvalues are treated as the same eigenvalue.
pub const COINCIDENCE_TOLERANCE: f64 = 1e-10;
/// Relative spread of `λ/ν` over the last three points below which a tail counts as diffusive.
pub const DIFFUSIVE_SPREAD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LimitLabel {
    Persistence,
    Condensation,
    Singularity,
    Unresolved,
}

impl std::fmt::Display for LimitLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigTrajectory {
    /// Strictly decreasing.
    pub nus: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Extrapolated value at `ν = 0`.
    pub limit: Complex64,
    /// Set when some matching step had two equidistant distinct candidates.
    pub ambiguous: bool,
    /// Filled in by [`classify_limits`]; `Unresolved` from the start if `ambiguous`.
    pub label: Option<LimitLabel>,
}

#[derive(Debug, Clone)]
pub struct ZeroViscosityTrack {
    pub cls: ModeClass,
    pub alpha: f64,
    pub gamma: f64,
    pub trunc: usize,
    pub nus: Vec<f64>,
    pub trajectories: Vec<EigTrajectory>,
}

/// `count` viscosities spaced geometrically from `start` down to `end`.
pub fn geometric_schedule(start: f64, end: f64, count: usize) -> Vec<f64> {
    let ratio = (end / start).powf(1.0 / (count - 1) as f64);
    (0..count).map(|i| if i + 1 == count { end } else { start * ratio.powi(i as i32) }).collect()
}

/// Minimum-cost perfect matching on a square cost matrix; `result[row] = column`.
pub fn optimal_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut col0 = 0;
        let mut slack = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let r = owner[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0;
            for col in 1..=n {
                if used[col] {
                    continue;
                }
                let reduced = cost[r - 1][col - 1] - u[r] - v[col];
                if reduced < slack[col] {
                    slack[col] = reduced;
                    way[col] = col0;
                }
                if slack[col] < delta {
                    delta = slack[col];
                    col1 = col;
                }
            }
            for col in 0..=n {
                if used[col] {
                    u[owner[col]] += delta;
                    v[col] -= delta;
                } else {
                    slack[col] -= delta;
                }
            }
            col0 = col1;
            if owner[col0] == 0 {
                break;
            }
        }
        while col0 != 0 {
            let prev = way[col0];
            owner[col0] = owner[prev];
            col0 = prev;
        }
    }
    let mut result = vec![0; n];
    for col in 1..=n {
        result[owner[col] - 1] = col - 1;
    }
    result
}

/// Quadratic in `√ν` through the last three samples, evaluated at `ν = 0`.
///
/// Exact for `a + bν` and for the `a + b√ν + cν` tails seen next to the continuous spectrum.
pub fn extrapolate_to_zero(nus: &[f64], values: &[Complex64]) -> Complex64 {
    let k = nus.len();
    let x: Vec<f64> = nus[k - 3..].iter().map(|nu| nu.sqrt()).collect();
    let y = &values[k - 3..];
    (0..3)
        .map(|i| {
            let weight: f64 = (0..3).filter(|&j| j != i).map(|j| -x[j] / (x[i] - x[j])).product();
            y[i] * weight
        })
        .sum()
}

/// Swapping a match for a coincident eigenvalue, or for the conjugate of the chosen one, only
/// relabels members of a conjugation-symmetric family.
fn same_up_to_conjugation(w: Complex64, chosen: Complex64) -> bool {
    let tol = COINCIDENCE_TOLERANCE * chosen.norm().max(1.0);
    (w - chosen).norm() <= tol || (w - chosen.conj()).norm() <= tol
}

fn validate_schedule(nus: &[f64]) -> Result<()> {
    if nus.len() < 3 {
        return Err(domain!("viscosity schedule needs at least 3 values, got {}", nus.len()));
    }
    if nus.iter().any(|nu| !(nu.is_finite() && *nu > 0.0)) {
        return Err(domain!("viscosity schedule must be positive and finite"));
    }
    if nus.windows(2).any(|w| w[1] >= w[0]) {
        return Err(domain!("viscosity schedule must be strictly decreasing"));
    }
    Ok(())
}

pub fn track_zero_viscosity(
    cls: ModeClass,
    alpha: f64,
    gamma: f64,
    nu_schedule: &[f64],
    trunc: usize,
) -> Result<ZeroViscosityTrack> {
    validate_schedule(nu_schedule)?;
    let spectra: Vec<Spectrum> = nu_schedule
        .par_iter()
        .map(|&nu| compute_spectrum(&assemble_suboperator(cls, alpha, gamma, nu, trunc)?, false))
        .collect::<Result<_>>()?;

    let first = &spectra[0].eigenvalues;
    let mut paths: Vec<Vec<Complex64>> = first.iter().map(|&z| vec![z]).collect();
    let mut ambiguous = vec![false; first.len()];
    for next in spectra.iter().skip(1).map(|s| &s.eigenvalues) {
        let cost: Vec<Vec<f64>> = paths
            .iter()
            .map(|p| {
                let tip = *p.last().expect("non-empty path");
                next.iter().map(|w| (w - tip).norm_sqr()).collect()
            })
            .collect();
        let matched = optimal_assignment(&cost);
        for (i, path) in paths.iter_mut().enumerate() {
            let tip = *path.last().expect("non-empty path");
            let chosen = next[matched[i]];
            let dist = (chosen - tip).norm();
            ambiguous[i] |= next.iter().any(|&w| {
                !same_up_to_conjugation(w, chosen) && ((w - tip).norm() - dist).abs() < AMBIGUITY_TOLERANCE
            });
            path.push(chosen);
        }
    }

    let trajectories = paths
        .into_iter()
        .zip(ambiguous)
        .map(|(values, ambiguous)| EigTrajectory {
            limit: extrapolate_to_zero(nu_schedule, &values),
            nus: nu_schedule.to_vec(),
            values,
            ambiguous,
            label: ambiguous.then_some(LimitLabel::Unresolved),
        })
        .collect();
    Ok(ZeroViscosityTrack { cls, alpha, gamma, trunc, nus: nu_schedule.to_vec(), trajectories })
}

/// Piece of the inviscid spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SpectralComponent {
    Point { re: f64, im: f64 },
    /// The segment `[-i extent, i extent]`.
    Segment { extent: f64 },
}

impl SpectralComponent {
    fn distance(&self, z: Complex64) -> f64 {
        match *self {
            Self::Point { re, im } => (z - Complex64::new(re, im)).norm(),
            Self::Segment { extent } => Complex64::new(z.re, (z.im.abs() - extent).max(0.0)).norm(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub labels: Vec<LimitLabel>,
    /// Persistence if any trajectory persists, else Condensation if any condenses, else
    /// Singularity if any is singular, else Unresolved.
    pub class_label: LimitLabel,
    /// Inviscid components that no viscous limit approaches.
    pub addition_set: Vec<SpectralComponent>,
}

fn is_diffusive(t: &EigTrajectory) -> bool {
    let k = t.nus.len();
    let ratios: Vec<Complex64> = (k - 3..k).map(|i| t.values[i] / t.nus[i]).collect();
    let scale = ratios[2].norm();
    scale > 0.0 && ratios.iter().all(|r| (r - ratios[2]).norm() <= DIFFUSIVE_SPREAD * scale)
}

fn components(reference: &EulerSpectrum, tol: f64) -> (Vec<SpectralComponent>, Option<SpectralComponent>) {
    let points: Vec<_> =
        reference.point_eigenvalues.iter().map(|z| SpectralComponent::Point { re: z.re, im: z.im }).collect();
    let cluster = (reference.cluster_size > 0).then(|| {
        if reference.cluster_extent > tol {
            SpectralComponent::Segment { extent: reference.cluster_extent }
        } else {
            SpectralComponent::Point { re: 0.0, im: 0.0 }
        }
    });
    (points, cluster)
}

pub fn classify_limits(track: &ZeroViscosityTrack, euler_ref: &EulerSpectrum, tol: f64) -> Result<Classification> {
    let p: Provenance = euler_ref.spectrum.provenance;
    if p.cls != track.cls || p.alpha != track.alpha || p.gamma != track.gamma || p.trunc != track.trunc {
        return Err(structure!(
            "inviscid reference {:?} does not match the tracked block (class {}, alpha {}, gamma {}, trunc {})",
            p,
            track.cls,
            track.alpha,
            track.gamma,
            track.trunc
        ));
    }
    let (points, cluster) = components(euler_ref, tol);
    let labels: Vec<LimitLabel> = track
        .trajectories
        .iter()
        .map(|t| {
            if t.ambiguous {
                LimitLabel::Unresolved
            } else if points.iter().any(|c| c.distance(t.limit) <= tol) {
                LimitLabel::Persistence
            } else if is_diffusive(t) {
                LimitLabel::Singularity
            } else if matches!(cluster, Some(c @ SpectralComponent::Segment { .. }) if c.distance(t.limit) <= tol) {
                LimitLabel::Condensation
            } else {
                LimitLabel::Singularity
            }
        })
        .collect();

    let class_label = [LimitLabel::Persistence, LimitLabel::Condensation, LimitLabel::Singularity]
        .into_iter()
        .find(|l| labels.contains(l))
        .unwrap_or(LimitLabel::Unresolved);

    let addition_set = points
        .into_iter()
        .chain(cluster)
        .filter(|c| track.trajectories.iter().all(|t| c.distance(t.limit) > tol))
        .collect();
    Ok(Classification { labels, class_label, addition_set })
}

impl ZeroViscosityTrack {
    /// Writes the labels of `classification` into the trajectories.
    pub fn apply(&mut self, classification: &Classification) {
        for (t, l) in self.trajectories.iter_mut().zip(&classification.labels) {
            t.label = Some(*l);
        }
    }
}
