use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Outcome of a residual-based verification, serialised one record per check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub check: String,
    pub params: Value,
    pub residual_inf: f64,
    pub residual_l2: f64,
    pub masked_fraction: f64,
    pub grid: Vec<usize>,
    pub dt: Option<f64>,
}

impl ResidualReport {
    pub(crate) fn from_values(
        check: &str,
        params: Value,
        values: impl IntoIterator<Item = f64>,
        masked_fraction: f64,
        grid: Vec<usize>,
        dt: Option<f64>,
    ) -> Self {
        let (mut inf, mut sq, mut count) = (0.0f64, 0.0, 0usize);
        for v in values {
            inf = inf.max(v);
            sq += v * v;
            count += 1;
        }
        let residual_l2 = if count == 0 { 0.0 } else { (sq / count as f64).sqrt() };
        Self { check: check.to_string(), params, residual_inf: inf, residual_l2, masked_fraction, grid, dt }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report is serialisable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn norms_and_json_round_trip() {
        let r = ResidualReport::from_values("demo", json!({"a": 1}), [3.0, 4.0], 0.25, vec![4, 4], Some(0.1));
        assert_eq!(r.residual_inf, 4.0);
        assert!((r.residual_l2 - (12.5f64).sqrt()).abs() < 1e-15);
        let back: ResidualReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
