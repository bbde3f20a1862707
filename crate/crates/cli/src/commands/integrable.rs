use super::{count, positive, Prepared};
use crate::config::{Default as D, Key, Kind, RunConfig};
use crate::failure::Failure;
use crate::record::Payload;
use nel_core::fields::random::{random_complex_2d, random_complex_3d, random_real_2d, random_solenoidal_3d};
use nel_core::fields::{SpectralField2D, TorusGrid2D, TorusGrid3D};
use nel_core::integrable::{
    darboux_apply, darboux_verify, transported_eigenfield_check_3d, transported_eigenfield_run_2d, DarbouxInput,
    DarbouxSnapshot, ResidualReport, VelocityClosure, VorticitySign,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub fn laxcheck_keys() -> Vec<Key> {
    vec![
        Key::new("dim", Kind::Int, D::Value("2"), "2 or 3"),
        Key::new("n", Kind::Int, D::Optional, "grid points per axis [default: 64 in 2D, 32 in 3D]"),
        Key::new("alpha", Kind::Real, D::Value("0.8"), "aspect ratio of the 2D torus"),
        Key::new("t_end", Kind::Real, D::Optional, "final time [default: 1 in 2D, 0.5 in 3D]"),
        Key::new("dt", Kind::Real, D::Optional, "RK4 step [default: 1e-3 in 2D, 2.5e-2 in 3D]"),
        Key::new("omega_degree", Kind::Int, D::Optional, "largest wavenumber of the random vorticity [default: 3 in 2D, 2 in 3D]"),
        Key::new("omega_amplitude", Kind::Real, D::Value("0.2"), "sup norm of the random vorticity"),
        Key::new("phi_degree", Kind::Int, D::Optional, "largest wavenumber of the random eigenfield [default: 3 in 2D, 2 in 3D]"),
        Key::new("phi_amplitude", Kind::Real, D::Optional, "sup norm of the random eigenfield [default: 10 in 2D, 1 in 3D]"),
        Key::new("closure", Kind::Choice(&["curl", "abc"]), D::Value("curl"), "3D velocity: Biot-Savart or a prescribed modulated ABC flow"),
        Key::new("abc_amplitudes", Kind::Reals, D::Value("0.2,0.1,0.1"), "A,B,C of the prescribed 3D flow"),
        Key::new("abc_depth", Kind::Real, D::Value("0.5"), "time modulation depth of the prescribed flow"),
        Key::new("control", Kind::Bool, D::Value("false"), "2D: also run with the vorticity bracket sign reversed"),
        Key::new("refine", Kind::Bool, D::Value("false"), "also run with doubled grid and halved step"),
    ]
}

pub fn darboux_keys() -> Vec<Key> {
    vec![
        Key::new(
            "example",
            Kind::Choice(&["x-only", "gauge-solution", "zero-potential"]),
            D::Value("x-only"),
            "built-in input: x-dependent solution, p = f, or zero potential shift",
        ),
        Key::new("nx", Kind::Int, D::Value("128"), "grid points in x"),
        Key::new("ny", Kind::Int, D::Value("16"), "grid points in y"),
        Key::new("dt", Kind::Real, D::Value("1e-2"), "snapshot spacing of the time residual"),
        Key::new("eta", Kind::Real, D::Optional, "mask threshold on |d_x Omega| [default: 1e-3 of its sup]"),
    ]
}

struct LaxRun {
    dim: usize,
    n: usize,
    alpha: f64,
    t_end: f64,
    dt: f64,
    omega_degree: i64,
    omega_amplitude: f64,
    phi_degree: i64,
    phi_amplitude: f64,
    closure: Option<([f64; 3], f64)>,
    seed: u64,
}

impl LaxRun {
    fn run(&self, n: usize, dt: f64, sign: VorticitySign) -> Result<ResidualReport, Failure> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        if self.dim == 2 {
            let g = TorusGrid2D::new(self.alpha, n, n)?;
            let w = random_real_2d(g, self.omega_degree, self.omega_amplitude, &mut rng);
            let phi = random_complex_2d(g, self.phi_degree, self.phi_amplitude, &mut rng);
            Ok(transported_eigenfield_run_2d(&w, &phi, self.t_end, dt, sign)?)
        } else {
            let g = TorusGrid3D::cube(n)?;
            let w = random_solenoidal_3d(g, self.omega_degree, self.omega_amplitude, &mut rng);
            let phi = random_complex_3d(g, self.phi_degree, self.phi_amplitude, &mut rng);
            let closure = match self.closure {
                None => VelocityClosure::BiotSavart,
                Some((abc, depth)) => VelocityClosure::modulated_abc(g, abc, depth),
            };
            Ok(transported_eigenfield_check_3d(&w, &phi, self.t_end, dt, &closure)?)
        }
    }
}

pub fn prepare_laxcheck(config: &RunConfig) -> Result<Prepared, Failure> {
    let dim = count(config, "dim")?;
    let two = match dim {
        2 => true,
        3 => false,
        _ => return Err(Failure::validation(format!("`dim` must be 2 or 3, got {dim}"))),
    };
    let pick = |key: &str, d2: f64, d3: f64| config.opt_real(key).unwrap_or(if two { d2 } else { d3 });
    let pick_int = |key: &str, d2: i64, d3: i64| config.opt_int(key).unwrap_or(if two { d2 } else { d3 });
    let n = usize::try_from(pick_int("n", 64, 32)).map_err(|_| Failure::validation("`n` must be positive"))?;
    if n < 4 {
        return Err(Failure::validation(format!("`n` must be at least 4, got {n}")));
    }
    let alpha = positive(config, "alpha")?;
    let (t_end, dt) = (pick("t_end", 1.0, 0.5), pick("dt", 1e-3, 2.5e-2));
    if !(t_end > 0.0 && dt > 0.0) {
        return Err(Failure::validation(format!("need positive t_end and dt, got {t_end} and {dt}")));
    }
    let (omega_degree, phi_degree) = (pick_int("omega_degree", 3, 2), pick_int("phi_degree", 3, 2));
    for (key, d) in [("omega_degree", omega_degree), ("phi_degree", phi_degree)] {
        if d < 1 || d as usize > n / 3 {
            return Err(Failure::validation(format!("`{key}` must lie in 1..={}, got {d}", n / 3)));
        }
    }
    let omega_amplitude = positive(config, "omega_amplitude")?;
    let phi_amplitude = pick("phi_amplitude", 10.0, 1.0);
    if phi_amplitude <= 0.0 {
        return Err(Failure::validation(format!("`phi_amplitude` must be positive, got {phi_amplitude}")));
    }
    let closure = match (two, config.text("closure")) {
        (false, "abc") => {
            let abc = config.opt_reals("abc_amplitudes").unwrap_or_default();
            let [a, b, c] = abc else {
                return Err(Failure::validation(format!("`abc_amplitudes` needs three values, got {}", abc.len())));
            };
            Some(([*a, *b, *c], config.real("abc_depth")))
        }
        (true, "abc") => return Err(Failure::validation("`closure = abc` applies to dim = 3 only")),
        _ => None,
    };
    let control = config.flag("control");
    if control && !two {
        return Err(Failure::validation("`control` applies to dim = 2 only"));
    }
    let refine = config.flag("refine");
    let run = LaxRun {
        dim,
        n,
        alpha,
        t_end,
        dt,
        omega_degree,
        omega_amplitude,
        phi_degree,
        phi_amplitude,
        closure,
        seed: config.seed,
    };
    Ok(Prepared {
        payload: Payload::lines("residual-report/1"),
        job: Box::new(move |payload| {
            let main = run.run(run.n, run.dt, VorticitySign::Physical)?;
            payload.push_json(&main)?;
            let mut summary = json!({"residual_inf": main.residual_inf, "curl_constraint": run.closure.is_none()});
            if control {
                let c = run.run(run.n, run.dt, VorticitySign::Reversed)?;
                payload.push_json(&c)?;
                summary["control_residual_inf"] = json!(c.residual_inf);
            }
            if refine {
                let r = run.run(2 * run.n, run.dt / 2.0, VorticitySign::Physical)?;
                payload.push_json(&r)?;
                summary["refined_residual_inf"] = json!(r.residual_inf);
                summary["refinement_ratio"] = json!(main.residual_inf / r.residual_inf);
            }
            Ok(summary)
        }),
    })
}

pub fn prepare_darboux(config: &RunConfig) -> Result<Prepared, Failure> {
    let (nx, ny) = (count(config, "nx")?, count(config, "ny")?);
    let g = TorusGrid2D::new(1.0, nx, ny)?;
    let dt = positive(config, "dt")?;
    let example = config.text("example").to_string();
    let mut input = DarbouxInput::new(
        SpectralField2D::from_fn(g, |x, _| x.cos()),
        SpectralField2D::from_fn(g, |x, _| x.sin()),
        SpectralField2D::from_fn(g, |x, _| 2.0 + x.sin()),
        SpectralField2D::from_fn(g, |x, _| -(2.0 * x).cos() / 4.0),
        config.opt_real("eta"),
    )?;
    match example.as_str() {
        "gauge-solution" => input.p = input.f.clone(),
        "zero-potential" => input.potential = SpectralField2D::zeros(g),
        _ => {}
    }
    Ok(Prepared {
        payload: Payload::lines("darboux-report/1"),
        job: Box::new(move |payload| {
            let out = darboux_apply(&input)?;
            let series: Vec<DarbouxSnapshot> = [-dt, 0.0, dt]
                .iter()
                .map(|&t| DarbouxSnapshot::new(t, input.omega.clone(), input.p.clone(), input.f.clone()))
                .collect::<Result<_, _>>()?;
            let report = darboux_verify(&input, &out, Some(&series))?;
            payload.push_json(&report.spatial)?;
            let temporal = report.temporal.ok_or_else(|| Failure::computation("time residual missing"))?;
            payload.push_json(&temporal)?;
            Ok(json!({
                "example": example,
                "eta": out.eta,
                "spatial_residual_inf": report.spatial.residual_inf,
                "temporal_residual_inf": temporal.residual_inf,
                "masked_fraction": report.spatial.masked_fraction.max(temporal.masked_fraction),
                "gauge_max_abs": out.p_t.max_abs(),
                "potentials_unchanged": out.omega_t == input.omega && out.psi_t == input.psi,
            }))
        }),
    })
}
