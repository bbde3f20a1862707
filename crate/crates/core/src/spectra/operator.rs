//! Per-class blocks of the linearised 2D Navier-Stokes operator at the shear `Ω* = Γ cos y`.

use crate::error::{domain, Result};
use crate::fields::{ns_rhs_2d, SpectralField2D, TorusGrid2D};
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Wavenumber class `(k1, k2)`: the mode family `{(α k1, k2 + n)}` for integer `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeClass {
    k1: i64,
    k2: i64,
}

impl ModeClass {
    pub fn new(k1: i64, k2: i64) -> Result<Self> {
        if k1 == 0 && k2 == 0 {
            return Err(domain!("mode class (0, 0) carries no dynamics"));
        }
        Ok(Self { k1, k2 })
    }

    pub fn k1(&self) -> i64 {
        self.k1
    }

    pub fn k2(&self) -> i64 {
        self.k2
    }

    /// Class whose modes are the complex conjugates of this one.
    pub fn conjugate(&self) -> Self {
        Self { k1: -self.k1, k2: -self.k2 }
    }

    /// Classes with `1 ≤ k1 ≤ k1_max` and `0 ≤ k2 < k1`.
    pub fn enumerate(k1_max: i64) -> Vec<Self> {
        (1..=k1_max).flat_map(|k1| (0..k1).map(move |k2| Self { k1, k2 })).collect()
    }
}

impl std::fmt::Display for ModeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.k1, self.k2)
    }
}

/// Parameters shared by everything computed for one block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub cls: ModeClass,
    pub alpha: f64,
    pub gamma: f64,
    pub nu: f64,
    pub trunc: usize,
}

/// Truncated block on the shifts `n ∈ [-N, N]`, with the `(0, 0)` wavevector removed.
///
/// Row `n` holds `-ν|k_n|²` on the diagonal and `±Γ(α k1 / 2)(1 - |k_{n∓1}|⁻²)` beside it.
#[derive(Debug, Clone)]
pub struct SubOperator {
    provenance: Provenance,
    shifts: Vec<i64>,
    matrix: Mat<f64>,
}

pub(crate) fn check_common(alpha: f64, gamma: f64, nu: f64, trunc: usize) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain!("alpha must lie in (0, 1), got {alpha}"));
    }
    if !gamma.is_finite() {
        return Err(domain!("shear amplitude gamma must be finite, got {gamma}"));
    }
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(domain!("viscosity nu must be a non-negative number, got {nu}"));
    }
    if trunc == 0 {
        return Err(domain!("truncation must be at least 1"));
    }
    Ok(())
}

pub fn assemble_suboperator(cls: ModeClass, alpha: f64, gamma: f64, nu: f64, trunc: usize) -> Result<SubOperator> {
    check_common(alpha, gamma, nu, trunc)?;
    let n = trunc as i64;
    let shifts: Vec<i64> = (-n..=n).filter(|&s| !(cls.k1 == 0 && cls.k2 + s == 0)).collect();
    let kx = alpha * cls.k1 as f64;
    let ksq = |s: i64| kx * kx + ((cls.k2 + s) as f64).powi(2);
    let coupling = gamma * kx / 2.0;
    let matrix = Mat::from_fn(shifts.len(), shifts.len(), |r, c| {
        let (row, col) = (shifts[r], shifts[c]);
        if row == col {
            -nu * ksq(row)
        } else if col == row - 1 {
            coupling * (1.0 - 1.0 / ksq(col))
        } else if col == row + 1 {
            -coupling * (1.0 - 1.0 / ksq(col))
        } else {
            0.0
        }
    });
    Ok(SubOperator { provenance: Provenance { cls, alpha, gamma, nu, trunc }, shifts, matrix })
}

impl SubOperator {
    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn cls(&self) -> ModeClass {
        self.provenance.cls
    }

    /// Shift `n` labelling each row, in row order.
    pub fn shifts(&self) -> &[i64] {
        &self.shifts
    }

    pub fn dim(&self) -> usize {
        self.shifts.len()
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.matrix
    }

    /// Entry coupling shift `col` into the equation of shift `row`; zero outside the block.
    pub fn entry(&self, row: i64, col: i64) -> f64 {
        match (self.row_of(row), self.row_of(col)) {
            (Some(r), Some(c)) => self.matrix[(r, c)],
            _ => 0.0,
        }
    }

    pub fn row_of(&self, shift: i64) -> Option<usize> {
        self.shifts.binary_search(&shift).ok()
    }
}

/// Compares the assembled block with a central-difference linearisation of the full nonlinear
/// right-hand side about the shear, returning the largest entrywise discrepancy.
pub fn jacobian_oracle_check(
    alpha: f64,
    gamma: f64,
    nu: f64,
    cls: ModeClass,
    trunc: usize,
    delta: f64,
) -> Result<f64> {
    if !(1e-7..=1e-3).contains(&delta) {
        return Err(domain!("finite-difference step must lie in [1e-7, 1e-3], got {delta}"));
    }
    let op = assemble_suboperator(cls, alpha, gamma, nu, trunc)?;
    let n = trunc as i64;
    let reach_y = cls.k2.abs() + n + 2;
    let reach_x = cls.k1.abs() + 1;
    let even_at_least = |r: i64| {
        let size = (3 * r as usize + 1).max(4);
        size + size % 2
    };
    let grid = TorusGrid2D::new(alpha, even_at_least(reach_x), even_at_least(reach_y))?;

    let base = SpectralField2D::from_fn(grid, |_, y| gamma * y.cos());
    let force = base.clone();
    let rhs = |omega: &SpectralField2D| ns_rhs_2d(omega, nu, &force);
    let response = |dir: &SpectralField2D| -> Result<SpectralField2D> {
        let plus = rhs(&(&base + &dir.scale(delta)))?;
        let minus = rhs(&(&base - &dir.scale(delta)))?;
        Ok((&plus - &minus).scale(0.5 / delta))
    };

    let mut worst: f64 = 0.0;
    for &col in op.shifts() {
        let (m, k) = (cls.k1, cls.k2 + col);
        let unit = Complex64::new(1.0, 0.0);
        let cos_dir = SpectralField2D::real_mode(grid, m, k, unit)?;
        let sin_dir = SpectralField2D::real_mode(grid, m, k, Complex64::i())?;
        let (a, b) = (response(&cos_dir)?, response(&sin_dir)?);
        for &row in op.shifts() {
            let (mr, kr) = (cls.k1, cls.k2 + row);
            let column = 0.5 * (a.coeff(mr, kr) - Complex64::i() * b.coeff(mr, kr));
            let expected = op.entry(row, col);
            worst = worst.max((column - expected).norm());
        }
    }
    Ok(worst)
}
