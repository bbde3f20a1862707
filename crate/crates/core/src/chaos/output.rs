//! JSON-lines trajectories and CSV tables for the chaos diagnostics.

use super::diagnostics::{LyapunovEstimate, PoincareSamples, ScanCell};
use super::model::Model;
use crate::error::Result;
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub model: String,
    pub params: serde_json::Value,
    pub t: f64,
    pub coeffs_re: Vec<f64>,
    pub coeffs_im: Vec<f64>,
}

pub fn write_record_jsonl(out: &mut impl Write, record: &TrajectoryRecord) -> Result<()> {
    serde_json::to_writer(&mut *out, record)?;
    writeln!(out)?;
    Ok(())
}

pub fn write_lyapunov_csv(out: &mut impl Write, est: &LyapunovEstimate) -> Result<()> {
    writeln!(out, "t,lambda_running")?;
    for (t, l) in &est.series {
        writeln!(out, "{t},{l}")?;
    }
    Ok(())
}

/// One row per iterate: `t` followed by the real state coordinates `x0, x1, ...`.
pub fn write_poincare_csv(out: &mut impl Write, model: &Model, samples: &PoincareSamples) -> Result<()> {
    let width = match samples.samples.first() {
        Some(s) => model.vector(s)?.len(),
        None => 0,
    };
    let header: Vec<String> = std::iter::once("t".to_string()).chain((0..width).map(|i| format!("x{i}"))).collect();
    writeln!(out, "{}", header.join(","))?;
    for s in &samples.samples {
        let row: Vec<String> =
            std::iter::once(s.time()).chain(model.vector(s)?).map(|v| v.to_string()).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_scan_csv(out: &mut impl Write, cells: &[ScanCell]) -> Result<()> {
    writeln!(out, "eps,a,lambda,escaped")?;
    for c in cells {
        writeln!(out, "{},{},{},{}", c.eps, c.a, c.lambda, c.escaped)?;
    }
    Ok(())
}
