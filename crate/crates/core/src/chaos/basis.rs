//! Cosine and sine series on `[0, 2π]` with pseudo-spectral evaluation.
//!
//! Coefficients are stored per parity: an even field is `Σ_{k=0}^{K-1} c_k cos kx`, an odd one
//! `Σ_{k=1}^{K} c_k sin kx`. Projection back from grid values keeps only those coefficients, so a
//! parity-pure state stays parity-pure by construction.

use crate::error::{domain, Result};
use crate::fields::transform::{analysis, slot, synthesis};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn name(self) -> &'static str {
        match self {
            Self::Even => "even",
            Self::Odd => "odd",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParityBasis {
    parity: Parity,
    modes: usize,
    points: usize,
}

impl ParityBasis {
    /// Grid size is the smallest power of two holding three times the highest wavenumber, which
    /// keeps cubic products of retained modes alias-free.
    pub fn new(parity: Parity, modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(domain!("need at least one mode"));
        }
        let kmax = match parity {
            Parity::Even => modes - 1,
            Parity::Odd => modes,
        };
        let points = (3 * kmax + 1).next_power_of_two().max(8);
        Ok(Self { parity, modes, points })
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Wavenumber carried by coefficient `j`.
    pub fn wavenumber(&self, j: usize) -> usize {
        match self.parity {
            Parity::Even => j,
            Parity::Odd => j + 1,
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.points).map(|i| TAU * i as f64 / self.points as f64).collect()
    }

    fn spread(&self, parity: Parity, coeffs: impl Iterator<Item = (usize, Complex64)>) -> Vec<Complex64> {
        let m = self.points;
        let mut buf = vec![Complex64::default(); m];
        for (k, c) in coeffs {
            if k == 0 {
                if parity == Parity::Even {
                    buf[0] += c;
                }
                continue;
            }
            let (pos, neg) = (slot(k as i64, m).expect("k < m/2"), slot(-(k as i64), m).expect("k < m/2"));
            match parity {
                Parity::Even => {
                    buf[pos] += 0.5 * c;
                    buf[neg] += 0.5 * c;
                }
                Parity::Odd => {
                    buf[pos] += Complex64::new(0.0, -0.5) * c;
                    buf[neg] += Complex64::new(0.0, 0.5) * c;
                }
            }
        }
        synthesis(&mut buf, &[m]);
        buf
    }

    /// Grid values of the series.
    pub fn synthesize(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(coeffs.len(), self.modes, "coefficient count");
        self.spread(self.parity, coeffs.iter().enumerate().map(|(j, &c)| (self.wavenumber(j), c)))
    }

    pub fn synthesize_real(&self, coeffs: &[f64]) -> Vec<f64> {
        let c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.synthesize(&c).into_iter().map(|z| z.re).collect()
    }

    /// Grid values of the x-derivative restricted to wavenumbers `1..=cutoff`.
    pub fn synthesize_derivative(&self, coeffs: &[Complex64], cutoff: usize) -> Vec<Complex64> {
        assert_eq!(coeffs.len(), self.modes, "coefficient count");
        let terms = coeffs.iter().enumerate().filter_map(|(j, &c)| {
            let k = self.wavenumber(j);
            (k >= 1 && k <= cutoff).then(|| match self.parity {
                Parity::Even => (k, -(k as f64) * c),
                Parity::Odd => (k, k as f64 * c),
            })
        });
        let parity = match self.parity {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        };
        self.spread(parity, terms)
    }

    /// Coefficients of the parity projection of grid values.
    pub fn project(&self, mut values: Vec<Complex64>) -> Vec<Complex64> {
        assert_eq!(values.len(), self.points, "grid size");
        let m = self.points;
        analysis(&mut values, &[m]);
        (0..self.modes)
            .map(|j| {
                let k = self.wavenumber(j);
                if k == 0 {
                    return values[0];
                }
                let (pos, neg) = (values[k], values[m - k]);
                match self.parity {
                    Parity::Even => pos + neg,
                    Parity::Odd => Complex64::new(0.0, 1.0) * (pos - neg),
                }
            })
            .collect()
    }

    pub fn project_real(&self, values: &[f64]) -> Vec<f64> {
        self.project(values.iter().map(|&x| Complex64::new(x, 0.0)).collect()).into_iter().map(|z| z.re).collect()
    }

    /// `∫₀^{2π} |f|² dx` by Parseval.
    pub fn l2_squared(&self, coeffs: &[Complex64]) -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| if self.wavenumber(j) == 0 { TAU } else { PI } * c.norm_sqr())
            .sum()
    }

    /// `∫₀^{2π} |fₓ|² dx` by Parseval.
    pub fn gradient_l2_squared(&self, coeffs: &[Complex64]) -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let k = self.wavenumber(j) as f64;
                PI * k * k * c.norm_sqr()
            })
            .sum()
    }

    /// Trapezoidal `∫₀^{2π} g dx` of grid values; spectrally accurate for smooth periodic `g`.
    pub fn quadrature(&self, values: &[f64]) -> f64 {
        TAU * values.iter().sum::<f64>() / values.len() as f64
    }
}
