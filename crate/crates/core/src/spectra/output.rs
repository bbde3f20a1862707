//! Spectrum CSV and trajectory JSON-lines writers.

use super::spectrum::Spectrum;
use super::tracking::ZeroViscosityTrack;
use crate::error::Result;
use serde_json::json;
use std::io::Write;

pub const SPECTRUM_CSV_HEADER: &str = "class_k1,class_k2,alpha,gamma,nu,trunc,re,im";

/// Header line plus one row per eigenvalue.
pub fn write_spectrum_csv(out: &mut impl Write, spectrum: &Spectrum) -> Result<()> {
    writeln!(out, "{SPECTRUM_CSV_HEADER}")?;
    write_spectrum_rows(out, spectrum)
}

pub fn write_spectrum_rows(out: &mut impl Write, spectrum: &Spectrum) -> Result<()> {
    let p = spectrum.provenance;
    for z in &spectrum.eigenvalues {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            p.cls.k1(),
            p.cls.k2(),
            p.alpha,
            p.gamma,
            p.nu,
            p.trunc,
            z.re,
            z.im
        )?;
    }
    Ok(())
}

pub fn trajectory_records(track: &ZeroViscosityTrack) -> Vec<serde_json::Value> {
    track
        .trajectories
        .iter()
        .map(|t| {
            json!({
                "class": [track.cls.k1(), track.cls.k2()],
                "nus": t.nus,
                "re": t.values.iter().map(|z| z.re).collect::<Vec<_>>(),
                "im": t.values.iter().map(|z| z.im).collect::<Vec<_>>(),
                "label": t.label.map(|l| l.to_string()),
                "limit_re": t.limit.re,
                "limit_im": t.limit.im,
            })
        })
        .collect()
}

/// One JSON object per trajectory, one per line.
pub fn write_trajectories_jsonl(out: &mut impl Write, track: &ZeroViscosityTrack) -> Result<()> {
    for record in trajectory_records(track) {
        serde_json::to_writer(&mut *out, &record)?;
        writeln!(out)?;
    }
    Ok(())
}
