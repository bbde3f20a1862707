//! Dense eigen-decomposition of sub-operator blocks and inviscid spectral summaries.

use super::operator::{assemble_suboperator, ModeClass, Provenance, SubOperator};
use crate::error::{computation, Result};
use num_complex::Complex64;
use std::cmp::Ordering;

/// Eigenvalues with `|Re| ≤ AXIS_TOLERANCE` are counted as lying on the imaginary axis.
pub const AXIS_TOLERANCE: f64 = 1e-6;

/// A point eigenvalue must sit this many cluster spacings away from every other eigenvalue.
pub const ISOLATION_FACTOR: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub provenance: Provenance,
    /// Sorted by descending real part, ties by descending imaginary part.
    pub eigenvalues: Vec<Complex64>,
    /// Unit-norm eigenvectors in the order of `eigenvalues`, indexed like `shifts`.
    pub eigenvectors: Option<Vec<Vec<Complex64>>>,
    pub shifts: Vec<i64>,
}

fn descending(a: &Complex64, b: &Complex64) -> Ordering {
    b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im))
}

pub fn compute_spectrum(op: &SubOperator, want_vectors: bool) -> Result<Spectrum> {
    let p = op.provenance();
    let failure = |e: &dyn std::fmt::Debug| {
        computation!(
            "eigensolver did not converge for class {} (alpha={}, gamma={}, nu={}, trunc={}): {e:?}",
            p.cls,
            p.alpha,
            p.gamma,
            p.nu,
            p.trunc
        )
    };
    let (eigenvalues, eigenvectors) = if want_vectors {
        let evd = op.matrix().eigen().map_err(|e| failure(&e))?;
        let (u, s) = (evd.U(), evd.S().column_vector());
        let mut pairs: Vec<(Complex64, Vec<Complex64>)> = (0..op.dim())
            .map(|j| {
                let mut v: Vec<Complex64> = (0..op.dim()).map(|i| u[(i, j)]).collect();
                let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm > 0.0 {
                    v.iter_mut().for_each(|z| *z /= norm);
                }
                (s[j], v)
            })
            .collect();
        pairs.sort_by(|a, b| descending(&a.0, &b.0));
        let (vals, vecs) = pairs.into_iter().unzip();
        (vals, Some(vecs))
    } else {
        let mut vals = op.matrix().eigenvalues().map_err(|e| failure(&e))?;
        vals.sort_by(descending);
        (vals, None)
    };
    if eigenvalues.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(failure(&"non-finite eigenvalue"));
    }
    Ok(Spectrum { provenance: p, eigenvalues, eigenvectors, shifts: op.shifts().to_vec() })
}

impl Spectrum {
    pub fn max_real(&self) -> f64 {
        self.eigenvalues.first().map_or(f64::NEG_INFINITY, |z| z.re)
    }

    /// Largest distance from `conj(λ)` to the spectrum, over all eigenvalues `λ`.
    pub fn conjugate_defect(&self) -> f64 {
        self.reflection_defect(|z| z.conj())
    }

    /// Largest distance from `-λ` to the spectrum, over all eigenvalues `λ`.
    pub fn negation_defect(&self) -> f64 {
        self.reflection_defect(|z| -z)
    }

    fn reflection_defect(&self, map: impl Fn(Complex64) -> Complex64) -> f64 {
        self.eigenvalues
            .iter()
            .map(|&z| {
                let target = map(z);
                self.eigenvalues.iter().map(|w| (w - target).norm()).fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    /// Residual `‖A v - λ v‖∞` of the stored eigenpairs, if vectors were computed.
    pub fn eigenpair_residual(&self, op: &SubOperator) -> Option<f64> {
        let vecs = self.eigenvectors.as_ref()?;
        let a = op.matrix();
        let mut worst: f64 = 0.0;
        for (lambda, v) in self.eigenvalues.iter().zip(vecs) {
            for i in 0..v.len() {
                let av: Complex64 = (0..v.len()).map(|j| v[j] * a[(i, j)]).sum();
                worst = worst.max((av - lambda * v[i]).norm());
            }
        }
        Some(worst)
    }
}

/// Inviscid spectrum split into isolated point eigenvalues and the imaginary-axis cluster.
#[derive(Debug, Clone)]
pub struct EulerSpectrum {
    pub spectrum: Spectrum,
    pub point_eigenvalues: Vec<Complex64>,
    /// Eigenvalues off the axis that fail the isolation test.
    pub unresolved_off_axis: Vec<Complex64>,
    /// `c` such that the cluster spans `[-ic, ic]`.
    pub cluster_extent: f64,
    /// Largest spacing between neighbouring cluster eigenvalues.
    pub max_gap: f64,
    /// Number of eigenvalues on the axis.
    pub cluster_size: usize,
}

impl EulerSpectrum {
    pub fn from_spectrum(spectrum: Spectrum) -> Self {
        let mut axis: Vec<f64> = Vec::new();
        let mut off = Vec::new();
        for z in &spectrum.eigenvalues {
            if z.re.abs() <= AXIS_TOLERANCE {
                axis.push(z.im);
            } else {
                off.push(*z);
            }
        }
        axis.sort_by(f64::total_cmp);
        let cluster_extent = axis.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let max_gap = axis.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        let (mut point_eigenvalues, mut unresolved_off_axis) = (Vec::new(), Vec::new());
        for z in off {
            let spacing = local_spacing(&axis, z.im).max(f64::EPSILON);
            let nearest = spectrum
                .eigenvalues
                .iter()
                .filter(|w| **w != z)
                .map(|w| (w - z).norm())
                .fold(f64::INFINITY, f64::min);
            if nearest > ISOLATION_FACTOR * spacing {
                point_eigenvalues.push(z);
            } else {
                unresolved_off_axis.push(z);
            }
        }
        Self {
            spectrum,
            point_eigenvalues,
            unresolved_off_axis,
            cluster_extent,
            max_gap,
            cluster_size: axis.len(),
        }
    }
}

/// Gap between the sorted axis values that straddle `im`, or the nearest end gap.
fn local_spacing(axis: &[f64], im: f64) -> f64 {
    if axis.len() < 2 {
        return 0.0;
    }
    let i = axis.partition_point(|&v| v < im).clamp(1, axis.len() - 1);
    axis[i] - axis[i - 1]
}

pub fn euler_spectrum(cls: ModeClass, alpha: f64, gamma: f64, trunc: usize) -> Result<EulerSpectrum> {
    let op = assemble_suboperator(cls, alpha, gamma, 0.0, trunc)?;
    Ok(EulerSpectrum::from_spectrum(compute_spectrum(&op, false)?))
}
