//! Periodic scalar fields on the `[0, 2π/α] × [0, 2π]` torus, stored as Fourier coefficients.

use super::transform::{analysis, slot, synthesis, wavenumber};
use crate::error::{domain, structure, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

/// Hermitian defect (relative) below which a field counts as real-valued.
pub const REAL_TOLERANCE: f64 = 1e-10;

/// Grid of `nx × ny` Fourier modes; mode `(m, n)` has wavevector `(α m, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid2D {
    alpha: f64,
    nx: usize,
    ny: usize,
    dealias_fraction: f64,
}

impl TorusGrid2D {
    /// Grid with the 2/3 dealiasing rule.
    pub fn new(alpha: f64, nx: usize, ny: usize) -> Result<Self> {
        Self::with_dealias(alpha, nx, ny, 2.0 / 3.0)
    }

    pub fn with_dealias(alpha: f64, nx: usize, ny: usize, dealias_fraction: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(domain!("aspect parameter alpha must be positive, got {alpha}"));
        }
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if n < 4 || n % 2 != 0 {
                return Err(domain!("{name} must be even and at least 4, got {n}"));
            }
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(domain!("dealias fraction must lie in (0, 1], got {dealias_fraction}"));
        }
        Ok(Self { alpha, nx, ny, dealias_fraction })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> [usize; 2] {
        [self.nx, self.ny]
    }

    /// Integer mode indices `(m, n)` of a flat coefficient slot.
    pub fn mode(&self, idx: usize) -> (i64, i64) {
        (wavenumber(idx / self.ny, self.nx), wavenumber(idx % self.ny, self.ny))
    }

    /// Physical wavevector `(α m, n)` of a flat coefficient slot.
    pub fn wavevector(&self, idx: usize) -> (f64, f64) {
        let (m, n) = self.mode(idx);
        (self.alpha * m as f64, n as f64)
    }

    pub fn index(&self, m: i64, n: i64) -> Option<usize> {
        Some(slot(m, self.nx)? * self.ny + slot(n, self.ny)?)
    }

    /// Slot of the conjugate partner `(-m, -n)`, wrapping Nyquist slots onto themselves.
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let (ix, iy) = (idx / self.ny, idx % self.ny);
        ((self.nx - ix) % self.nx) * self.ny + (self.ny - iy) % self.ny
    }

    /// Whether mode `(m, n)` survives dealiasing.
    pub fn keeps(&self, m: i64, n: i64) -> bool {
        let f = self.dealias_fraction;
        (m.unsigned_abs() as f64) < f * self.nx as f64 / 2.0
            && (n.unsigned_abs() as f64) < f * self.ny as f64 / 2.0
    }

    /// Physical coordinates of grid point `idx`.
    pub fn point(&self, idx: usize) -> (f64, f64) {
        let (ix, iy) = (idx / self.ny, idx % self.ny);
        (
            2.0 * PI * ix as f64 / (self.alpha * self.nx as f64),
            2.0 * PI * iy as f64 / self.ny as f64,
        )
    }

    pub fn same_as(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(structure!("grid mismatch: {self:?} vs {other:?}"))
        }
    }
}

/// Scalar field held as complex Fourier coefficients, row-major with the `y` index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField2D {
    grid: TorusGrid2D,
    coeffs: Vec<Complex64>,
    mean_zero: bool,
}

impl SpectralField2D {
    pub fn zeros(grid: TorusGrid2D) -> Self {
        Self { grid, coeffs: vec![Complex64::default(); grid.len()], mean_zero: true }
    }

    pub fn from_coeffs(grid: TorusGrid2D, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(structure!(
                "expected {} coefficients for a {}x{} grid, got {}",
                grid.len(),
                grid.nx,
                grid.ny,
                coeffs.len()
            ));
        }
        let mean_zero = coeffs[0] == Complex64::default();
        Ok(Self { grid, coeffs, mean_zero })
    }

    pub fn from_physical(grid: TorusGrid2D, values: &[f64]) -> Result<Self> {
        let data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut field = Self::from_physical_complex(grid, &data)?;
        field.symmetrize();
        Ok(field)
    }

    pub fn from_physical_complex(grid: TorusGrid2D, values: &[Complex64]) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(structure!("expected {} samples, got {}", grid.len(), values.len()));
        }
        let mut data = values.to_vec();
        analysis(&mut data, &grid.shape());
        Self::from_coeffs(grid, data)
    }

    /// Samples a real function `f(x, y)` on the grid.
    pub fn from_fn(grid: TorusGrid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let values: Vec<f64> = (0..grid.len())
            .map(|i| {
                let (x, y) = grid.point(i);
                f(x, y)
            })
            .collect();
        Self::from_physical(grid, &values).expect("sample count matches grid")
    }

    pub fn from_fn_complex(grid: TorusGrid2D, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let values: Vec<Complex64> = (0..grid.len())
            .map(|i| {
                let (x, y) = grid.point(i);
                f(x, y)
            })
            .collect();
        Self::from_physical_complex(grid, &values).expect("sample count matches grid")
    }

    /// Sum of single Fourier modes `c e^{i(α m x + n y)}`.
    pub fn from_modes(grid: TorusGrid2D, modes: &[((i64, i64), Complex64)]) -> Result<Self> {
        let mut coeffs = vec![Complex64::default(); grid.len()];
        for &((m, n), c) in modes {
            let idx = grid
                .index(m, n)
                .ok_or_else(|| domain!("mode ({m}, {n}) is not representable on {grid:?}"))?;
            coeffs[idx] += c;
        }
        Self::from_coeffs(grid, coeffs)
    }

    /// Real field `c e^{i(α m x + n y)} + c.c.`.
    pub fn real_mode(grid: TorusGrid2D, m: i64, n: i64, c: Complex64) -> Result<Self> {
        if m == 0 && n == 0 {
            return Self::from_modes(grid, &[((0, 0), Complex64::new(2.0 * c.re, 0.0))]);
        }
        Self::from_modes(grid, &[((m, n), c), ((-m, -n), c.conj())])
    }

    pub fn grid(&self) -> &TorusGrid2D {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn is_mean_zero(&self) -> bool {
        self.mean_zero
    }

    pub fn coeff(&self, m: i64, n: i64) -> Complex64 {
        self.grid.index(m, n).map(|i| self.coeffs[i]).unwrap_or_default()
    }

    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn to_physical(&self) -> Vec<Complex64> {
        let mut data = self.coeffs.clone();
        synthesis(&mut data, &self.grid.shape());
        data
    }

    pub fn to_physical_real(&self) -> Vec<f64> {
        self.to_physical().into_iter().map(|c| c.re).collect()
    }

    /// Largest violation of `c(-m,-n) = conj(c(m,n))`, relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let mut defect: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (idx, c) in self.coeffs.iter().enumerate() {
            scale = scale.max(c.norm());
            let p = self.coeffs[self.grid.conjugate_index(idx)];
            defect = defect.max((c - p.conj()).norm());
        }
        if scale == 0.0 {
            0.0
        } else {
            defect / scale
        }
    }

    pub fn is_real(&self) -> bool {
        self.hermitian_defect() <= REAL_TOLERANCE
    }

    /// Projects onto real-valued fields by averaging each coefficient with its conjugate partner.
    pub fn symmetrize(&mut self) {
        let orig = self.coeffs.clone();
        for (idx, c) in self.coeffs.iter_mut().enumerate() {
            let j = self.grid.conjugate_index(idx);
            *c = 0.5 * (orig[idx] + orig[j].conj());
        }
    }

    pub fn project_mean(mut self) -> Self {
        self.coeffs[0] = Complex64::default();
        self.mean_zero = true;
        self
    }

    /// Zeroes every mode outside the dealiasing band.
    pub fn dealias(mut self) -> Self {
        let grid = self.grid;
        for (idx, c) in self.coeffs.iter_mut().enumerate() {
            let (m, n) = grid.mode(idx);
            if !grid.keeps(m, n) {
                *c = Complex64::default();
            }
        }
        self
    }

    /// Applies a Fourier multiplier `symbol(kx, ky)`.
    pub fn map_symbol(&self, symbol: impl Fn(f64, f64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, &c)| {
                let (kx, ky) = self.grid.wavevector(idx);
                c * symbol(kx, ky)
            })
            .collect();
        let mut out = Self::from_coeffs(self.grid, coeffs).expect("same grid");
        out.mean_zero |= self.mean_zero;
        out
    }

    pub fn dx(&self) -> Self {
        self.map_symbol(|kx, _| Complex64::new(0.0, kx))
    }

    pub fn dy(&self) -> Self {
        self.map_symbol(|_, ky| Complex64::new(0.0, ky))
    }

    pub fn laplacian(&self) -> Self {
        self.map_symbol(|kx, ky| Complex64::new(-(kx * kx + ky * ky), 0.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }

    /// Maximum modulus over the physical grid.
    pub fn max_abs(&self) -> f64 {
        self.to_physical().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Root-mean-square over the physical grid (equals the coefficient l2 norm by Parseval).
    pub fn rms(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.grid, other.grid, "arithmetic on fields from different grids");
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| op(a, b)).collect();
        let mut out = Self::from_coeffs(self.grid, coeffs).expect("same grid");
        out.mean_zero |= self.mean_zero && other.mean_zero;
        out
    }
}

impl Add for &SpectralField2D {
    type Output = SpectralField2D;
    fn add(self, rhs: Self) -> SpectralField2D {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &SpectralField2D {
    type Output = SpectralField2D;
    fn sub(self, rhs: Self) -> SpectralField2D {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &SpectralField2D {
    type Output = SpectralField2D;
    fn mul(self, rhs: f64) -> SpectralField2D {
        self.scale(rhs)
    }
}

impl Neg for &SpectralField2D {
    type Output = SpectralField2D;
    fn neg(self) -> SpectralField2D {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> TorusGrid2D {
        TorusGrid2D::new(0.7, 16, 16).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(TorusGrid2D::new(0.0, 16, 16).is_err());
        assert!(TorusGrid2D::new(1.0, 15, 16).is_err());
        assert!(TorusGrid2D::new(1.0, 2, 16).is_err());
        assert!(TorusGrid2D::with_dealias(1.0, 16, 16, 0.0).is_err());
    }

    #[test]
    fn sampled_cosine_has_two_half_coefficients() {
        let g = grid();
        let f = SpectralField2D::from_fn(g, |x, y| (g.alpha() * x).cos() * 2.0 + (3.0 * y).sin());
        assert!((f.coeff(1, 0).re - 1.0).abs() < 1e-14);
        assert!((f.coeff(-1, 0).re - 1.0).abs() < 1e-14);
        assert!((f.coeff(0, 3).im + 0.5).abs() < 1e-14);
        assert!(f.is_real());
        assert!(f.mean().norm() < 1e-15);
    }

    #[test]
    fn physical_round_trip() {
        let g = grid();
        let values: Vec<f64> = (0..g.len()).map(|i| ((i * 7919) % 113) as f64 / 113.0).collect();
        let f = SpectralField2D::from_physical(g, &values).unwrap();
        let back = f.to_physical_real();
        let err = back.iter().zip(&values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12, "round trip error {err}");
    }

    #[test]
    fn complex_mode_is_not_real() {
        let g = grid();
        let f = SpectralField2D::from_modes(g, &[((1, 2), Complex64::new(1.0, 0.0))]).unwrap();
        assert!(!f.is_real());
        let r = SpectralField2D::real_mode(g, 1, 2, Complex64::new(0.3, 0.4)).unwrap();
        assert!(r.is_real());
    }

    #[test]
    fn derivatives_of_single_mode() {
        let g = grid();
        let f = SpectralField2D::from_fn(g, |x, y| (g.alpha() * x + 2.0 * y).sin());
        let fx = f.dx().to_physical_real();
        let fyy = f.dy().dy().to_physical_real();
        for i in 0..g.len() {
            let (x, y) = g.point(i);
            let arg = g.alpha() * x + 2.0 * y;
            assert!((fx[i] - g.alpha() * arg.cos()).abs() < 1e-13);
            assert!((fyy[i] + 4.0 * arg.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn dealias_keeps_two_thirds_band() {
        let g = TorusGrid2D::new(1.0, 12, 12).unwrap();
        assert!(g.keeps(3, -3));
        assert!(!g.keeps(4, 0));
        assert!(!g.keeps(0, -4));
        let f = SpectralField2D::real_mode(g, 5, 0, Complex64::new(1.0, 0.0)).unwrap().dealias();
        assert_eq!(f.rms(), 0.0);
    }
}
