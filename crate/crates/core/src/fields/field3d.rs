//! Scalar and vector fields on the `[0, 2π]³` torus and the vorticity-form 3D operators.

use super::transform::{analysis, slot, synthesis, wavenumber};
use crate::error::{domain, structure, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, Sub};

const MEAN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid3D {
    nx: usize,
    ny: usize,
    nz: usize,
    dealias_fraction: f64,
}

impl TorusGrid3D {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Result<Self> {
        Self::with_dealias(nx, ny, nz, 2.0 / 3.0)
    }

    pub fn cube(n: usize) -> Result<Self> {
        Self::new(n, n, n)
    }

    pub fn with_dealias(nx: usize, ny: usize, nz: usize, dealias_fraction: f64) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny), ("nz", nz)] {
            if n < 4 || n % 2 != 0 {
                return Err(domain!("{name} must be even and at least 4, got {n}"));
            }
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(domain!("dealias fraction must lie in (0, 1], got {dealias_fraction}"));
        }
        Ok(Self { nx, ny, nz, dealias_fraction })
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    pub fn mode(&self, idx: usize) -> [i64; 3] {
        let iz = idx % self.nz;
        let iy = (idx / self.nz) % self.ny;
        let ix = idx / (self.ny * self.nz);
        [wavenumber(ix, self.nx), wavenumber(iy, self.ny), wavenumber(iz, self.nz)]
    }

    pub fn index(&self, k: [i64; 3]) -> Option<usize> {
        Some((slot(k[0], self.nx)? * self.ny + slot(k[1], self.ny)?) * self.nz + slot(k[2], self.nz)?)
    }

    pub fn conjugate_index(&self, idx: usize) -> usize {
        let iz = idx % self.nz;
        let iy = (idx / self.nz) % self.ny;
        let ix = idx / (self.ny * self.nz);
        (((self.nx - ix) % self.nx) * self.ny + (self.ny - iy) % self.ny) * self.nz + (self.nz - iz) % self.nz
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let iz = idx % self.nz;
        let iy = (idx / self.nz) % self.ny;
        let ix = idx / (self.ny * self.nz);
        [
            2.0 * PI * ix as f64 / self.nx as f64,
            2.0 * PI * iy as f64 / self.ny as f64,
            2.0 * PI * iz as f64 / self.nz as f64,
        ]
    }

    pub fn keeps(&self, k: [i64; 3]) -> bool {
        let f = self.dealias_fraction;
        k.iter()
            .zip(self.shape())
            .all(|(&kk, n)| (kk.unsigned_abs() as f64) < f * n as f64 / 2.0)
    }

    pub fn same_as(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(structure!("grid mismatch: {self:?} vs {other:?}"))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField3D {
    grid: TorusGrid3D,
    coeffs: Vec<Complex64>,
}

impl SpectralField3D {
    pub fn zeros(grid: TorusGrid3D) -> Self {
        Self { grid, coeffs: vec![Complex64::default(); grid.len()] }
    }

    pub fn from_coeffs(grid: TorusGrid3D, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(structure!("expected {} coefficients, got {}", grid.len(), coeffs.len()));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn from_physical_complex(grid: TorusGrid3D, values: &[Complex64]) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(structure!("expected {} samples, got {}", grid.len(), values.len()));
        }
        let mut data = values.to_vec();
        analysis(&mut data, &grid.shape());
        Self::from_coeffs(grid, data)
    }

    pub fn from_fn(grid: TorusGrid3D, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values: Vec<Complex64> =
            (0..grid.len()).map(|i| Complex64::new(f(grid.point(i)), 0.0)).collect();
        let mut out = Self::from_physical_complex(grid, &values).expect("grid-sized buffer");
        out.symmetrize();
        out
    }

    pub fn from_fn_complex(grid: TorusGrid3D, f: impl Fn([f64; 3]) -> Complex64) -> Self {
        let values: Vec<Complex64> = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self::from_physical_complex(grid, &values).expect("grid-sized buffer")
    }

    pub fn grid(&self) -> &TorusGrid3D {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn coeff(&self, k: [i64; 3]) -> Complex64 {
        self.grid.index(k).map(|i| self.coeffs[i]).unwrap_or_default()
    }

    pub fn to_physical(&self) -> Vec<Complex64> {
        let mut data = self.coeffs.clone();
        synthesis(&mut data, &self.grid.shape());
        data
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut defect: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (idx, c) in self.coeffs.iter().enumerate() {
            scale = scale.max(c.norm());
            let j = self.grid.conjugate_index(idx);
            defect = defect.max((c - self.coeffs[j].conj()).norm());
        }
        if scale == 0.0 {
            0.0
        } else {
            defect / scale
        }
    }

    pub fn is_real(&self) -> bool {
        self.hermitian_defect() <= super::field2d::REAL_TOLERANCE
    }

    pub fn symmetrize(&mut self) {
        let orig = self.coeffs.clone();
        for (idx, c) in self.coeffs.iter_mut().enumerate() {
            let j = self.grid.conjugate_index(idx);
            *c = 0.5 * (orig[idx] + orig[j].conj());
        }
    }

    pub fn project_mean(mut self) -> Self {
        self.coeffs[0] = Complex64::default();
        self
    }

    pub fn dealias(mut self) -> Self {
        let grid = self.grid;
        for (idx, c) in self.coeffs.iter_mut().enumerate() {
            if !grid.keeps(grid.mode(idx)) {
                *c = Complex64::default();
            }
        }
        self
    }

    pub fn map_symbol(&self, symbol: impl Fn([f64; 3]) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, &c)| {
                let k = self.grid.mode(idx);
                c * symbol([k[0] as f64, k[1] as f64, k[2] as f64])
            })
            .collect();
        Self { grid: self.grid, coeffs }
    }

    pub fn derivative(&self, axis: usize) -> Self {
        self.map_symbol(|k| Complex64::new(0.0, k[axis]))
    }

    pub fn laplacian(&self) -> Self {
        self.map_symbol(|k| Complex64::new(-(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]), 0.0))
    }

    pub fn invert_laplacian(&self) -> Result<Self> {
        check_mean(self, "Laplacian inversion")?;
        Ok(self.map_symbol(|k| {
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 == 0.0 {
                Complex64::default()
            } else {
                Complex64::new(-1.0 / k2, 0.0)
            }
        }))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.to_physical().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn rms(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Add for &SpectralField3D {
    type Output = SpectralField3D;
    fn add(self, rhs: Self) -> SpectralField3D {
        assert_eq!(self.grid, rhs.grid, "arithmetic on fields from different grids");
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        SpectralField3D { grid: self.grid, coeffs }
    }
}

impl Sub for &SpectralField3D {
    type Output = SpectralField3D;
    fn sub(self, rhs: Self) -> SpectralField3D {
        assert_eq!(self.grid, rhs.grid, "arithmetic on fields from different grids");
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        SpectralField3D { grid: self.grid, coeffs }
    }
}

fn check_mean(f: &SpectralField3D, what: &str) -> Result<()> {
    let mean = f.mean().norm();
    if mean > MEAN_TOLERANCE {
        Err(domain!("{what} needs mean-zero input, mean is {mean:.3e}"))
    } else {
        Ok(())
    }
}

/// Three-component field (velocity `u` or vorticity `Ω`).
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField3D {
    pub components: [SpectralField3D; 3],
}

impl VectorField3D {
    pub fn zeros(grid: TorusGrid3D) -> Self {
        let z = SpectralField3D::zeros(grid);
        Self { components: [z.clone(), z.clone(), z] }
    }

    pub fn new(components: [SpectralField3D; 3]) -> Result<Self> {
        components[0].grid.same_as(&components[1].grid)?;
        components[0].grid.same_as(&components[2].grid)?;
        Ok(Self { components })
    }

    pub fn from_fn(grid: TorusGrid3D, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let comp = |c: usize| SpectralField3D::from_fn(grid, |p| f(p)[c]);
        Self { components: [comp(0), comp(1), comp(2)] }
    }

    pub fn grid(&self) -> &TorusGrid3D {
        self.components[0].grid()
    }

    pub fn mean(&self) -> [Complex64; 3] {
        [self.components[0].mean(), self.components[1].mean(), self.components[2].mean()]
    }

    pub fn map(&self, f: impl Fn(&SpectralField3D) -> SpectralField3D) -> Self {
        Self { components: [f(&self.components[0]), f(&self.components[1]), f(&self.components[2])] }
    }

    pub fn zip(&self, other: &Self, f: impl Fn(&SpectralField3D, &SpectralField3D) -> SpectralField3D) -> Self {
        Self {
            components: [
                f(&self.components[0], &other.components[0]),
                f(&self.components[1], &other.components[1]),
                f(&self.components[2], &other.components[2]),
            ],
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|c| c.scale(s))
    }

    pub fn project_mean(&self) -> Self {
        self.map(|c| c.clone().project_mean())
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(|c| c.max_abs()).fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.components.iter().all(|c| c.is_real())
    }

    /// `∇·u` in spectral space.
    pub fn divergence(&self) -> SpectralField3D {
        let dx = self.components[0].derivative(0);
        let dy = self.components[1].derivative(1);
        let dz = self.components[2].derivative(2);
        &(&dx + &dy) + &dz
    }

    /// Largest `|k·û(k)|` over all modes.
    pub fn max_divergence_symbol(&self) -> f64 {
        let grid = *self.grid();
        (0..grid.len())
            .map(|idx| {
                let k = grid.mode(idx);
                let s: Complex64 = (0..3).map(|c| self.components[c].coeffs()[idx] * k[c] as f64).sum();
                s.norm()
            })
            .fold(0.0, f64::max)
    }

    /// Leray projection onto divergence-free fields.
    pub fn solenoidal_part(&self) -> Self {
        let grid = *self.grid();
        let mut out = self.clone();
        for idx in 0..grid.len() {
            let k = grid.mode(idx).map(|v| v as f64);
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 == 0.0 {
                continue;
            }
            let dot: Complex64 = (0..3).map(|c| self.components[c].coeffs()[idx] * k[c]).sum();
            for c in 0..3 {
                out.components[c].coeffs_mut()[idx] -= dot * k[c] / k2;
            }
        }
        out
    }
}

impl Add for &VectorField3D {
    type Output = VectorField3D;
    fn add(self, rhs: Self) -> VectorField3D {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &VectorField3D {
    type Output = VectorField3D;
    fn sub(self, rhs: Self) -> VectorField3D {
        self.zip(rhs, |a, b| a - b)
    }
}

/// `∇ × u`.
pub fn curl_3d(u: &VectorField3D) -> Result<VectorField3D> {
    for c in &u.components {
        check_mean(c, "curl")?;
    }
    let [u1, u2, u3] = &u.components;
    Ok(VectorField3D {
        components: [
            &u3.derivative(1) - &u2.derivative(2),
            &u1.derivative(2) - &u3.derivative(0),
            &u2.derivative(0) - &u1.derivative(1),
        ],
    })
}

/// Divergence-free velocity with `∇ × u = Ω` (for solenoidal Ω): `u = -Δ⁻¹(∇ × Ω)`.
pub fn biot_savart_3d(omega: &VectorField3D) -> Result<VectorField3D> {
    let w = curl_3d(omega)?;
    let mut out = VectorField3D::zeros(*omega.grid());
    for c in 0..3 {
        out.components[c] = w.components[c].invert_laplacian()?.scale(-1.0);
    }
    Ok(out)
}

fn gradient_physical(f: &SpectralField3D) -> [Vec<Complex64>; 3] {
    [f.derivative(0).to_physical(), f.derivative(1).to_physical(), f.derivative(2).to_physical()]
}

fn advect_with(a_phys: &[Vec<Complex64>; 3], f: &SpectralField3D, real: bool) -> SpectralField3D {
    let grid = *f.grid();
    let grad = gradient_physical(f);
    let mut acc = vec![Complex64::default(); grid.len()];
    for c in 0..3 {
        for ((out, a), g) in acc.iter_mut().zip(&a_phys[c]).zip(&grad[c]) {
            if real {
                *out += a.re * g.re;
            } else {
                *out += a * g;
            }
        }
    }
    analysis(&mut acc, &grid.shape());
    let mut out = SpectralField3D::from_coeffs(grid, acc).expect("grid-sized buffer").dealias();
    if real {
        out.symmetrize();
    }
    out
}

/// Field that [`advect_3d`] differentiates: a scalar or each component of a vector.
pub enum Advected<'a> {
    Scalar(&'a SpectralField3D),
    Vector(&'a VectorField3D),
}

/// Result of [`advect_3d`].
#[derive(Debug, Clone, PartialEq)]
pub enum AdvectedField {
    Scalar(SpectralField3D),
    Vector(VectorField3D),
}

/// `(a·∇)f`, dealiased.
pub fn advect_3d(a: &VectorField3D, f: Advected<'_>) -> Result<AdvectedField> {
    let a_phys = [a.components[0].to_physical(), a.components[1].to_physical(), a.components[2].to_physical()];
    match f {
        Advected::Scalar(s) => {
            a.grid().same_as(s.grid())?;
            let real = a.is_real() && s.is_real();
            Ok(AdvectedField::Scalar(advect_with(&a_phys, s, real)))
        }
        Advected::Vector(v) => {
            a.grid().same_as(v.grid())?;
            let real = a.is_real() && v.is_real();
            Ok(AdvectedField::Vector(v.map(|c| advect_with(&a_phys, c, real))))
        }
    }
}

/// `(a·∇)φ` for a scalar (possibly complex) field.
pub fn advect_scalar(a: &VectorField3D, phi: &SpectralField3D) -> Result<SpectralField3D> {
    match advect_3d(a, Advected::Scalar(phi))? {
        AdvectedField::Scalar(s) => Ok(s),
        AdvectedField::Vector(_) => unreachable!(),
    }
}

pub fn advect_vector(a: &VectorField3D, v: &VectorField3D) -> Result<VectorField3D> {
    match advect_3d(a, Advected::Vector(v))? {
        AdvectedField::Vector(s) => Ok(s),
        AdvectedField::Scalar(_) => unreachable!(),
    }
}

/// Vortex stretching form `-(u·∇)Ω + (Ω·∇)u` for a given velocity.
pub fn euler_vorticity_rhs(omega: &VectorField3D, u: &VectorField3D) -> Result<VectorField3D> {
    let transport = advect_vector(u, omega)?;
    let stretching = advect_vector(omega, u)?;
    Ok(&stretching - &transport)
}

/// `∂ₜΩ = -(u·∇)Ω + (Ω·∇)u + ν(ΔΩ + f)` with `u` from Biot-Savart.
pub fn ns_rhs_3d(omega: &VectorField3D, nu: f64, force: &VectorField3D) -> Result<VectorField3D> {
    if !(nu >= 0.0) {
        return Err(domain!("viscosity must be non-negative, got {nu}"));
    }
    omega.grid().same_as(force.grid())?;
    let u = biot_savart_3d(omega)?;
    let mut out = euler_vorticity_rhs(omega, &u)?;
    if nu > 0.0 {
        let viscous = &omega.map(|c| c.laplacian()) + force;
        out = &out + &viscous.scale(nu);
    }
    Ok(out.project_mean())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> TorusGrid3D {
        TorusGrid3D::cube(16).unwrap()
    }

    fn check_pointwise(f: &SpectralField3D, expect: impl Fn([f64; 3]) -> f64, tol: f64) {
        let p = f.to_physical();
        for (i, v) in p.iter().enumerate() {
            let e = expect(f.grid().point(i));
            assert!((v.re - e).abs() < tol && v.im.abs() < tol, "got {v}, expected {e}");
        }
    }

    #[test]
    fn curl_of_shear() {
        let u = VectorField3D::from_fn(grid(), |p| [p[2].sin(), 0.0, 0.0]);
        let w = curl_3d(&u).unwrap();
        check_pointwise(&w.components[0], |_| 0.0, 1e-14);
        check_pointwise(&w.components[1], |p| p[2].cos(), 1e-14);
        check_pointwise(&w.components[2], |_| 0.0, 1e-14);
    }

    #[test]
    fn biot_savart_inverts_curl_on_solenoidal_fields() {
        let u = VectorField3D::from_fn(grid(), |p| {
            [p[2].sin() + (p[1] + p[2]).cos(), (2.0 * p[0]).cos() + p[2].cos(), p[1].sin()]
        });
        assert!(u.max_divergence_symbol() < 1e-14);
        let back = biot_savart_3d(&curl_3d(&u).unwrap()).unwrap();
        assert!((&back - &u).max_abs() < 1e-13);
        assert!(back.max_divergence_symbol() < 1e-12);
    }

    #[test]
    fn biot_savart_output_is_solenoidal_for_arbitrary_input() {
        let w = VectorField3D::from_fn(grid(), |p| {
            [(p[0] + 2.0 * p[1]).sin(), (p[2] - p[0]).cos(), (3.0 * p[1]).sin() * p[0].cos()]
        });
        let u = biot_savart_3d(&w).unwrap();
        assert!(u.max_divergence_symbol() < 1e-12);
        let again = curl_3d(&u).unwrap();
        assert!((&again - &w.solenoidal_part()).max_abs() < 1e-12);
    }

    #[test]
    fn advecting_a_constant_gives_zero() {
        let u = VectorField3D::from_fn(grid(), |p| [p[2].sin(), p[0].cos(), 0.0]);
        let c = SpectralField3D::from_fn(grid(), |_| 3.5);
        assert!(advect_scalar(&u, &c).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn mean_carrying_input_is_rejected() {
        let u = VectorField3D::from_fn(grid(), |p| [1.0 + p[2].sin(), 0.0, 0.0]);
        assert!(matches!(curl_3d(&u), Err(crate::Error::Domain(_))));
        assert!(matches!(biot_savart_3d(&u), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn ns_rhs_3d_examples() {
        let g = grid();
        let shear = VectorField3D::from_fn(g, |p| [0.0, p[2].cos(), 0.0]);
        let zero = VectorField3D::zeros(g);
        assert!(ns_rhs_3d(&shear, 0.0, &zero).unwrap().max_abs() < 1e-14);

        let force = VectorField3D::from_fn(g, |p| [p[1].sin(), 0.0, (p[0] + p[1]).cos()]);
        let out = ns_rhs_3d(&zero, 0.3, &force).unwrap();
        assert!((&out - &force.scale(0.3)).max_abs() < 1e-14);

        let w = VectorField3D::from_fn(g, |p| [(p[1] + p[2]).sin(), p[0].cos() * p[2].sin(), p[1].cos()]);
        let out = ns_rhs_3d(&w, 0.1, &force).unwrap();
        assert!(out.mean().iter().all(|m| m.norm() < 1e-15));
        assert!(ns_rhs_3d(&w, -0.1, &force).is_err());
    }
}
