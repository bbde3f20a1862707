use nel_core::fields::{
    biot_savart_3d, bracket, invert_laplacian, SpectralField2D, SpectralField3D, TorusGrid2D, TorusGrid3D,
    VectorField3D,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DEGREE: i64 = 8;

fn trig_poly(grid: TorusGrid2D, rng: &mut ChaCha8Rng) -> SpectralField2D {
    let mut modes = Vec::new();
    for m in 0..=DEGREE {
        for n in -DEGREE..=DEGREE {
            if m == 0 && n <= 0 {
                continue;
            }
            let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) / 20.0;
            modes.push(((m, n), c));
            modes.push(((-m, -n), c.conj()));
        }
    }
    SpectralField2D::from_modes(grid, &modes).unwrap()
}

fn jacobi_grid() -> TorusGrid2D {
    TorusGrid2D::with_dealias(0.7, 128, 128, 0.5).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn bracket_is_antisymmetric(seed in any::<u64>()) {
        let grid = TorusGrid2D::new(0.7, 64, 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = trig_poly(grid, &mut rng);
        let g = trig_poly(grid, &mut rng);
        let sum = &bracket(&f, &g).unwrap() + &bracket(&g, &f).unwrap();
        prop_assert!(sum.max_abs() < 1e-10);
    }

    #[test]
    fn bracket_satisfies_jacobi(seed in any::<u64>()) {
        let grid = jacobi_grid();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, g, h) = (trig_poly(grid, &mut rng), trig_poly(grid, &mut rng), trig_poly(grid, &mut rng));
        let cyc = |a: &SpectralField2D, b: &SpectralField2D, c: &SpectralField2D| {
            bracket(a, &bracket(b, c).unwrap()).unwrap()
        };
        let total = &(&cyc(&f, &g, &h) + &cyc(&g, &h, &f)) + &cyc(&h, &f, &g);
        let phys = total.to_physical();
        let worst = phys.iter().map(|v| v.norm()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-9, "Jacobi defect {worst:e}");
    }

    #[test]
    fn physical_round_trip(values in prop::collection::vec(-10.0f64..10.0, 16 * 12)) {
        let grid = TorusGrid2D::new(1.3, 16, 12).unwrap();
        let field = SpectralField2D::from_physical(grid, &values).unwrap();
        let back = field.to_physical_real();
        for (a, b) in values.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn laplacian_inverts_on_mean_free_fields(seed in any::<u64>()) {
        let grid = TorusGrid2D::new(0.7, 32, 32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = trig_poly(grid, &mut rng);
        let left = invert_laplacian(&f.laplacian()).unwrap();
        let right = invert_laplacian(&f).unwrap().laplacian();
        prop_assert!((&left - &f).max_abs() < 1e-12);
        prop_assert!((&right - &f).max_abs() < 1e-12);
    }

    #[test]
    fn biot_savart_is_divergence_free(seed in any::<u64>()) {
        let grid = TorusGrid3D::cube(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut comps = Vec::new();
        for _ in 0..3 {
            let values: Vec<Complex64> = (0..grid.len())
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0))
                .collect();
            let mut c = SpectralField3D::from_physical_complex(grid, &values).unwrap();
            c.symmetrize();
            comps.push(c.project_mean());
        }
        let omega = VectorField3D::new([comps[0].clone(), comps[1].clone(), comps[2].clone()]).unwrap();
        let u = biot_savart_3d(&omega).unwrap();
        prop_assert!(u.max_divergence_symbol() < 1e-12);
    }
}
