//! Versioned JSON snapshots of spectral fields.

use super::field2d::{SpectralField2D, TorusGrid2D};
use super::field3d::{SpectralField3D, TorusGrid3D, VectorField3D};
use crate::error::{structure, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SNAPSHOT_VERSION: u32 = 1;
pub const LAYOUT: &str = "row-major, last index fastest";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SnapshotKind {
    Field2d,
    Field3d,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub alpha: f64,
    pub nx: usize,
    pub ny: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nz: Option<usize>,
}

/// On-disk form; vector fields store their components back to back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSnapshot {
    pub version: u32,
    pub kind: SnapshotKind,
    pub grid: GridRecord,
    pub layout: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub components: Option<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

fn split(coeffs: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    (coeffs.iter().map(|c| c.re).collect(), coeffs.iter().map(|c| c.im).collect())
}

impl FieldSnapshot {
    pub fn from_field2d(f: &SpectralField2D) -> Self {
        let g = f.grid();
        let (re, im) = split(f.coeffs());
        Self {
            version: SNAPSHOT_VERSION,
            kind: SnapshotKind::Field2d,
            grid: GridRecord { alpha: g.alpha(), nx: g.nx(), ny: g.ny(), nz: None },
            layout: LAYOUT.to_string(),
            components: None,
            re,
            im,
        }
    }

    pub fn from_field3d(f: &SpectralField3D) -> Self {
        Self::from_components3d(&[f])
    }

    pub fn from_vector3d(v: &VectorField3D) -> Self {
        let c = &v.components;
        Self::from_components3d(&[&c[0], &c[1], &c[2]])
    }

    fn from_components3d(parts: &[&SpectralField3D]) -> Self {
        let [nx, ny, nz] = parts[0].grid().shape();
        let coeffs: Vec<Complex64> = parts.iter().flat_map(|p| p.coeffs().iter().copied()).collect();
        let (re, im) = split(&coeffs);
        Self {
            version: SNAPSHOT_VERSION,
            kind: SnapshotKind::Field3d,
            grid: GridRecord { alpha: 1.0, nx, ny, nz: Some(nz) },
            layout: LAYOUT.to_string(),
            components: (parts.len() > 1).then_some(parts.len()),
            re,
            im,
        }
    }

    fn coeffs(&self) -> Result<Vec<Complex64>> {
        if self.version != SNAPSHOT_VERSION {
            return Err(structure!("unsupported snapshot version {}", self.version));
        }
        if self.re.len() != self.im.len() {
            return Err(structure!("re/im arrays differ in length: {} vs {}", self.re.len(), self.im.len()));
        }
        Ok(self.re.iter().zip(&self.im).map(|(&r, &i)| Complex64::new(r, i)).collect())
    }

    pub fn to_field2d(&self) -> Result<SpectralField2D> {
        if self.kind != SnapshotKind::Field2d {
            return Err(structure!("snapshot holds a {:?}, not a 2D field", self.kind));
        }
        let grid = TorusGrid2D::new(self.grid.alpha, self.grid.nx, self.grid.ny)?;
        SpectralField2D::from_coeffs(grid, self.coeffs()?)
    }

    fn grid3d(&self) -> Result<TorusGrid3D> {
        if self.kind != SnapshotKind::Field3d {
            return Err(structure!("snapshot holds a {:?}, not a 3D field", self.kind));
        }
        let nz = self.grid.nz.ok_or_else(|| structure!("3D snapshot without nz"))?;
        TorusGrid3D::new(self.grid.nx, self.grid.ny, nz)
    }

    pub fn to_field3d(&self) -> Result<SpectralField3D> {
        if self.components.unwrap_or(1) != 1 {
            return Err(structure!("snapshot holds a vector field"));
        }
        SpectralField3D::from_coeffs(self.grid3d()?, self.coeffs()?)
    }

    pub fn to_vector3d(&self) -> Result<VectorField3D> {
        if self.components != Some(3) {
            return Err(structure!("snapshot does not hold a 3-component field"));
        }
        let grid = self.grid3d()?;
        let coeffs = self.coeffs()?;
        let n = grid.len();
        if coeffs.len() != 3 * n {
            return Err(structure!("expected {} coefficients, got {}", 3 * n, coeffs.len()));
        }
        let part = |c: usize| SpectralField3D::from_coeffs(grid, coeffs[c * n..(c + 1) * n].to_vec());
        VectorField3D::new([part(0)?, part(1)?, part(2)?])
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_fields_match_the_documented_schema() {
        let g = TorusGrid2D::new(0.7, 4, 4).unwrap();
        let json = FieldSnapshot::from_field2d(&SpectralField2D::zeros(g)).to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["version"], 1);
        assert_eq!(v["kind"], "field2d");
        assert_eq!(v["grid"]["alpha"], 0.7);
        assert_eq!(v["layout"], LAYOUT);
        assert!(v["grid"].get("nz").is_none());
        assert_eq!(v["re"].as_array().unwrap().len(), 16);
    }

    #[test]
    fn vector_snapshot_round_trip() {
        let g = TorusGrid3D::cube(4).unwrap();
        let v = VectorField3D::from_fn(g, |p| [p[0].sin(), p[1].cos(), (p[0] + p[2]).sin()]);
        let snap = FieldSnapshot::from_json(&FieldSnapshot::from_vector3d(&v).to_json().unwrap()).unwrap();
        assert_eq!(snap.to_vector3d().unwrap(), v);
        assert!(snap.to_field2d().is_err());
        assert!(snap.to_field3d().is_err());
    }

    proptest! {
        #[test]
        fn field2d_json_round_trip_is_exact(values in prop::collection::vec(-1e3f64..1e3, 32)) {
            let g = TorusGrid2D::new(1.3, 4, 8).unwrap();
            let f = SpectralField2D::from_physical(g, &values).unwrap();
            let back = FieldSnapshot::from_json(&FieldSnapshot::from_field2d(&f).to_json().unwrap())
                .unwrap()
                .to_field2d()
                .unwrap();
            prop_assert_eq!(back.coeffs(), f.coeffs());
        }
    }
}
