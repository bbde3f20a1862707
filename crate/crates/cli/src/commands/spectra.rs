use super::{count, positive, to_json, Prepared};
use crate::config::{Default as D, Key, Kind, RunConfig};
use crate::failure::Failure;
use crate::record::Payload;
use nel_core::spectra::{
    assemble_suboperator, classify_limits, compute_spectrum, critical_viscosity, euler_spectrum, geometric_schedule,
    track_zero_viscosity, trajectory_records, write_spectrum_rows, ModeClass, SPECTRUM_CSV_HEADER,
};
use serde_json::json;

const ALPHA: Key = Key::new("alpha", Kind::Real, D::Required, "aspect ratio of the torus, in (0, 1)");
const GAMMA: Key = Key::new("gamma", Kind::Real, D::Value("0.5"), "shear amplitude");
const K1: Key = Key::new("k1", Kind::Int, D::Required, "first index of the mode class");
const K2: Key = Key::new("k2", Kind::Int, D::Required, "second index of the mode class");

pub fn spectrum_keys() -> Vec<Key> {
    vec![
        ALPHA,
        GAMMA,
        Key::new("nu", Kind::Real, D::Required, "viscosity, non-negative"),
        K1,
        K2,
        Key::new("trunc", Kind::Int, D::Value("64"), "truncation N; shifts -N..=N"),
    ]
}

pub fn nustar_keys() -> Vec<Key> {
    vec![
        ALPHA,
        GAMMA,
        Key::new("trunc", Kind::Int, D::Value("128"), "truncation N"),
        Key::new("tol", Kind::Real, D::Value("1e-6"), "bisection tolerance on the viscosity"),
    ]
}

pub fn zvtrack_keys() -> Vec<Key> {
    vec![
        ALPHA,
        GAMMA,
        K1,
        K2,
        Key::new("nu_start", Kind::Real, D::Value("0.1"), "largest viscosity of the geometric schedule"),
        Key::new("nu_end", Kind::Real, D::Value("1e-4"), "smallest viscosity of the schedule"),
        Key::new("count", Kind::Int, D::Value("13"), "number of viscosities, at least 3"),
        Key::new("trunc", Kind::Int, D::Value("128"), "truncation N"),
        Key::new("tol", Kind::Real, D::Value("1e-2"), "distance below which a limit joins an inviscid component"),
    ]
}

fn class(config: &RunConfig) -> Result<ModeClass, Failure> {
    Ok(ModeClass::new(config.int("k1"), config.int("k2"))?)
}

pub fn prepare_spectrum(config: &RunConfig) -> Result<Prepared, Failure> {
    let cls = class(config)?;
    let (alpha, gamma, nu, trunc) = (config.real("alpha"), config.real("gamma"), config.real("nu"), count(config, "trunc")?);
    let op = assemble_suboperator(cls, alpha, gamma, nu, trunc)?;
    Ok(Prepared {
        payload: Payload::table("spectrum-csv/1", SPECTRUM_CSV_HEADER),
        job: Box::new(move |payload| {
            let spectrum = compute_spectrum(&op, false)?;
            let mut rows = Vec::new();
            write_spectrum_rows(&mut rows, &spectrum)?;
            payload.push_rows(&String::from_utf8_lossy(&rows));
            let refined = compute_spectrum(&assemble_suboperator(cls, alpha, gamma, nu, 2 * trunc)?, false)?;
            Ok(json!({
                "class": [cls.k1(), cls.k2()],
                "eigenvalues": spectrum.eigenvalues.len(),
                "max_real": spectrum.max_real(),
                "max_real_2n": refined.max_real(),
                "max_real_delta": (spectrum.max_real() - refined.max_real()).abs(),
                "conjugate_defect": spectrum.conjugate_defect(),
            }))
        }),
    })
}

pub fn prepare_nustar(config: &RunConfig) -> Result<Prepared, Failure> {
    let (alpha, gamma, trunc, tol) = (config.real("alpha"), config.real("gamma"), count(config, "trunc")?, positive(config, "tol")?);
    assemble_suboperator(ModeClass::new(1, 0)?, alpha, gamma, 0.0, trunc)?;
    Ok(Prepared {
        payload: Payload::empty("critical-viscosity/1"),
        job: Box::new(move |_| Ok(to_json(&critical_viscosity(alpha, gamma, trunc, tol)?)?)),
    })
}

pub fn prepare_zvtrack(config: &RunConfig) -> Result<Prepared, Failure> {
    let cls = class(config)?;
    let (alpha, gamma, trunc, tol) = (config.real("alpha"), config.real("gamma"), count(config, "trunc")?, positive(config, "tol")?);
    let (start, end, n) = (config.real("nu_start"), config.real("nu_end"), count(config, "count")?);
    if !(start > end && end > 0.0) {
        return Err(Failure::validation(format!("need nu_start > nu_end > 0, got {start} and {end}")));
    }
    if n < 3 {
        return Err(Failure::validation(format!("extrapolation needs count >= 3, got {n}")));
    }
    assemble_suboperator(cls, alpha, gamma, end, trunc)?;
    let nus = geometric_schedule(start, end, n);
    Ok(Prepared {
        payload: Payload::lines("trajectories-jsonl/1"),
        job: Box::new(move |payload| {
            let mut track = track_zero_viscosity(cls, alpha, gamma, &nus, trunc)?;
            let euler = euler_spectrum(cls, alpha, gamma, trunc)?;
            let euler_2n = euler_spectrum(cls, alpha, gamma, 2 * trunc)?;
            let classification = classify_limits(&track, &euler, tol)?;
            track.apply(&classification);
            for record in trajectory_records(&track) {
                payload.push_json(&record)?;
            }
            let points = |e: &nel_core::spectra::EulerSpectrum| {
                e.point_eigenvalues.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()
            };
            let point_delta = (euler.point_eigenvalues.len() == euler_2n.point_eigenvalues.len()).then(|| {
                euler
                    .point_eigenvalues
                    .iter()
                    .map(|z| euler_2n.point_eigenvalues.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min))
                    .fold(0.0, f64::max)
            });
            Ok(json!({
                "class": [cls.k1(), cls.k2()],
                "classification": classification.class_label.to_string(),
                "labels": classification.labels.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
                "addition_set": to_json(&classification.addition_set)?,
                "inviscid_points": points(&euler),
                "inviscid_points_2n": points(&euler_2n),
                "inviscid_points_delta": point_delta,
                "cluster_extent": euler.cluster_extent,
                "cluster_extent_2n": euler_2n.cluster_extent,
                "trajectories": track.trajectories.len(),
            }))
        }),
    })
}
