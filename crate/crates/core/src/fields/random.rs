//! Seeded random trigonometric polynomials for tests, checks and CLI runs.

use super::field2d::{SpectralField2D, TorusGrid2D};
use super::field3d::{SpectralField3D, TorusGrid3D, VectorField3D};
use num_complex::Complex64;
use rand::Rng;

fn draw(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn normalize_2d(f: SpectralField2D, amplitude: f64) -> SpectralField2D {
    let peak = f.max_abs();
    if peak > 0.0 {
        f.scale(amplitude / peak)
    } else {
        f
    }
}

fn normalize_3d(f: SpectralField3D, amplitude: f64) -> SpectralField3D {
    let peak = f.max_abs();
    if peak > 0.0 {
        f.scale(amplitude / peak)
    } else {
        f
    }
}

/// Real mean-free field `Σ c_{mn} e^{i(αmx+ny)}` over `|m|, |n| ≤ max_mode` with random
/// coefficients, rescaled so that `‖f‖∞ = amplitude`.
pub fn random_real_2d(grid: TorusGrid2D, max_mode: i64, amplitude: f64, rng: &mut impl Rng) -> SpectralField2D {
    let mut modes = Vec::new();
    for m in 0..=max_mode {
        for n in -max_mode..=max_mode {
            if m == 0 && n <= 0 {
                continue;
            }
            let c = draw(rng);
            modes.push(((m, n), c));
            modes.push(((-m, -n), c.conj()));
        }
    }
    normalize_2d(SpectralField2D::from_modes(grid, &modes).expect("modes fit the grid"), amplitude)
}

/// Complex mean-free field with independent coefficients over `|m|, |n| ≤ max_mode`, rescaled so
/// that `‖f‖∞ = amplitude`.
pub fn random_complex_2d(grid: TorusGrid2D, max_mode: i64, amplitude: f64, rng: &mut impl Rng) -> SpectralField2D {
    let mut modes = Vec::new();
    for m in -max_mode..=max_mode {
        for n in -max_mode..=max_mode {
            if m != 0 || n != 0 {
                modes.push(((m, n), draw(rng)));
            }
        }
    }
    normalize_2d(SpectralField2D::from_modes(grid, &modes).expect("modes fit the grid"), amplitude)
}

fn random_3d(grid: TorusGrid3D, max_mode: i64, amplitude: f64, real: bool, rng: &mut impl Rng) -> SpectralField3D {
    let mut f = SpectralField3D::zeros(grid);
    for a in -max_mode..=max_mode {
        for b in -max_mode..=max_mode {
            for c in -max_mode..=max_mode {
                if a == 0 && b == 0 && c == 0 {
                    continue;
                }
                let idx = grid.index([a, b, c]).expect("modes fit the grid");
                f.coeffs_mut()[idx] = draw(rng);
            }
        }
    }
    if real {
        f.symmetrize();
    }
    normalize_3d(f, amplitude)
}

pub fn random_real_3d(grid: TorusGrid3D, max_mode: i64, amplitude: f64, rng: &mut impl Rng) -> SpectralField3D {
    random_3d(grid, max_mode, amplitude, true, rng)
}

pub fn random_complex_3d(grid: TorusGrid3D, max_mode: i64, amplitude: f64, rng: &mut impl Rng) -> SpectralField3D {
    random_3d(grid, max_mode, amplitude, false, rng)
}

/// Real, mean-free, divergence-free vector field with largest component value `amplitude`.
pub fn random_solenoidal_3d(grid: TorusGrid3D, max_mode: i64, amplitude: f64, rng: &mut impl Rng) -> VectorField3D {
    let comps = [
        random_real_3d(grid, max_mode, 1.0, rng),
        random_real_3d(grid, max_mode, 1.0, rng),
        random_real_3d(grid, max_mode, 1.0, rng),
    ];
    let v = VectorField3D::new(comps).expect("shared grid").solenoidal_part();
    let peak = v.max_abs();
    v.scale(amplitude / peak)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_fields_have_the_requested_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = TorusGrid2D::new(0.8, 32, 32).unwrap();
        let f = random_real_2d(g, 4, 0.1, &mut rng);
        assert!(f.is_real());
        assert_eq!(f.mean(), Complex64::default());
        assert_eq!(f.coeff(5, 0), Complex64::default());
        assert!((f.max_abs() - 0.1).abs() < 1e-15);
        let c = random_complex_2d(g, 3, 1.0, &mut rng);
        assert!(!c.is_real());

        let g3 = TorusGrid3D::cube(8).unwrap();
        let v = random_solenoidal_3d(g3, 2, 0.1, &mut rng);
        assert!(v.is_real());
        assert!(v.max_divergence_symbol() < 1e-14);
    }

    #[test]
    fn same_seed_same_field() {
        let g = TorusGrid2D::new(1.0, 16, 16).unwrap();
        let a = random_real_2d(g, 3, 1.0, &mut ChaCha8Rng::seed_from_u64(11));
        let b = random_real_2d(g, 3, 1.0, &mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(a, b);
    }
}
