//! ABC flow on the 3-torus and its tangent-space Lyapunov exponent.

use super::diagnostics::{running_spread, LyapunovEstimate};
use crate::error::{domain, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbcParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl AbcParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if ![a, b, c].iter().all(|v| v.is_finite()) {
            return Err(domain!("ABC coefficients must be finite, got ({a}, {b}, {c})"));
        }
        Ok(Self { a, b, c })
    }

    pub fn rhs(&self, th: &[f64; 3]) -> [f64; 3] {
        let Self { a, b, c } = *self;
        [
            a * th[2].sin() + c * th[1].cos(),
            b * th[0].sin() + a * th[2].cos(),
            c * th[1].sin() + b * th[0].cos(),
        ]
    }

    /// `J δ` with `J` the Jacobian of the vector field at `th`.
    fn tangent(&self, th: &[f64; 3], d: &[f64; 3]) -> [f64; 3] {
        let Self { a, b, c } = *self;
        [
            -c * th[1].sin() * d[1] + a * th[2].cos() * d[2],
            b * th[0].cos() * d[0] - a * th[2].sin() * d[2],
            -b * th[0].sin() * d[0] + c * th[1].cos() * d[1],
        ]
    }

    /// One RK4 step without angle reduction.
    pub(crate) fn rk4(&self, th: &[f64; 3], h: f64) -> [f64; 3] {
        let add = |x: &[f64; 3], k: &[f64; 3], s: f64| [x[0] + s * k[0], x[1] + s * k[1], x[2] + s * k[2]];
        let k1 = self.rhs(th);
        let k2 = self.rhs(&add(th, &k1, 0.5 * h));
        let k3 = self.rhs(&add(th, &k2, 0.5 * h));
        let k4 = self.rhs(&add(th, &k3, h));
        [0, 1, 2].map(|i| th[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
    }

    fn rk4_tangent(&self, th: &[f64; 3], d: &[f64; 3], h: f64) -> ([f64; 3], [f64; 3]) {
        let add = |x: &[f64; 3], k: &[f64; 3], s: f64| [x[0] + s * k[0], x[1] + s * k[1], x[2] + s * k[2]];
        let (x1, y1) = (th, d);
        let (k1, l1) = (self.rhs(x1), self.tangent(x1, y1));
        let (x2, y2) = (add(th, &k1, 0.5 * h), add(d, &l1, 0.5 * h));
        let (k2, l2) = (self.rhs(&x2), self.tangent(&x2, &y2));
        let (x3, y3) = (add(th, &k2, 0.5 * h), add(d, &l2, 0.5 * h));
        let (k3, l3) = (self.rhs(&x3), self.tangent(&x3, &y3));
        let (x4, y4) = (add(th, &k3, h), add(d, &l3, h));
        let (k4, l4) = (self.rhs(&x4), self.tangent(&x4, &y4));
        (
            [0, 1, 2].map(|i| th[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])),
            [0, 1, 2].map(|i| d[i] + h / 6.0 * (l1[i] + 2.0 * l2[i] + 2.0 * l3[i] + l4[i])),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbcState {
    pub t: f64,
    /// Angles in `[0, 2π)`.
    pub theta: [f64; 3],
}

impl AbcState {
    pub fn new(t: f64, theta: [f64; 3]) -> Self {
        Self { t, theta: theta.map(wrap) }
    }
}

pub(crate) fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r == TAU {
        0.0
    } else {
        r
    }
}

/// Signed difference `b - a` on the circle, in `[-π, π)`.
pub(crate) fn angle_difference(a: f64, b: f64) -> f64 {
    (b - a + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI
}

pub fn abc_step(params: &AbcParams, state: &AbcState, dt: f64) -> AbcState {
    AbcState::new(state.t + dt, params.rk4(&state.theta, dt))
}

/// Integration step used by `abc_lyapunov`.
pub const ABC_DT: f64 = 1e-2;

/// Largest Lyapunov exponent from the linearised flow: a tangent vector is carried along with
/// the orbit and renormalised every `renorm_dt`.
pub fn abc_lyapunov(params: &AbcParams, state0: &AbcState, t_end: f64, renorm_dt: f64) -> Result<LyapunovEstimate> {
    if !(t_end >= 1000.0 && t_end.is_finite()) {
        return Err(domain!("Lyapunov estimates need T >= 1000, got {t_end}"));
    }
    if !(renorm_dt > 0.0 && renorm_dt < t_end) {
        return Err(domain!("renormalisation interval must lie in (0, T), got {renorm_dt}"));
    }
    let substeps = (renorm_dt / ABC_DT).ceil() as usize;
    let h = renorm_dt / substeps as f64;
    let intervals = (t_end / renorm_dt).round() as usize;
    let mut th = state0.theta;
    let mut d = [1.0, 1.0, 1.0].map(|x: f64| x / 3f64.sqrt());
    let mut sum = 0.0;
    let mut series = Vec::with_capacity(intervals);
    for i in 1..=intervals {
        let before = norm(&d);
        for _ in 0..substeps {
            (th, d) = params.rk4_tangent(&th, &d, h);
        }
        let after = norm(&d);
        sum += (after / before).ln();
        d = d.map(|x| x / after);
        let t = i as f64 * renorm_dt;
        series.push((state0.t + t, sum / t));
    }
    let lambda = series.last().map_or(0.0, |p| p.1);
    Ok(LyapunovEstimate { lambda, last_decade_spread: running_spread(&series), series, escaped: false })
}

fn norm(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_flow_has_zero_exponent_exactly() {
        let p = AbcParams::new(0.0, 0.0, 0.0).unwrap();
        let s = AbcState::new(0.0, [0.1, 0.2, 0.3]);
        assert_eq!(abc_step(&p, &s, 0.1).theta, s.theta);
        assert_eq!(abc_lyapunov(&p, &s, 1000.0, 0.5).unwrap().lambda, 0.0);
    }

    #[test]
    fn angles_are_reduced() {
        let p = AbcParams::new(1.0, 1.0, 1.0).unwrap();
        let mut s = AbcState::new(0.0, [6.2, 0.0, 3.0]);
        for _ in 0..500 {
            s = abc_step(&p, &s, 0.05);
            assert!(s.theta.iter().all(|x| (0.0..TAU).contains(x)));
        }
        assert!((angle_difference(6.2, 0.1) - (0.1 + TAU - 6.2)).abs() < 1e-15);
    }

    #[test]
    fn tangent_matches_finite_differences() {
        let p = AbcParams::new(1.0, 0.7, 0.4).unwrap();
        let th = [0.3, 1.1, 2.5];
        let d = [0.2, -0.4, 0.9];
        let eps = 1e-6;
        let fwd = p.rhs(&[0, 1, 2].map(|i| th[i] + eps * d[i]));
        let bwd = p.rhs(&[0, 1, 2].map(|i| th[i] - eps * d[i]));
        let jd = p.tangent(&th, &d);
        for i in 0..3 {
            assert!(((fwd[i] - bwd[i]) / (2.0 * eps) - jd[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn short_runs_are_rejected() {
        let p = AbcParams::new(1.0, 1.0, 1.0).unwrap();
        assert!(abc_lyapunov(&p, &AbcState::new(0.0, [0.0; 3]), 100.0, 0.5).is_err());
    }
}
