//! Exponential time differencing RK4 for `w' = L w + N(w, t)` with diagonal `L`.

use crate::error::Result;
use num_complex::Complex64;
use std::sync::{Arc, Mutex};

/// Points on the unit circle used to evaluate the phi-functions without cancellation.
const CONTOUR_POINTS: usize = 32;

#[derive(Debug, Clone)]
pub struct Etdrk4 {
    h: f64,
    e: Vec<Complex64>,
    e2: Vec<Complex64>,
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
}

impl Etdrk4 {
    pub fn new(symbols: &[Complex64], h: f64) -> Self {
        let n = symbols.len();
        let mut out = Self {
            h,
            e: Vec::with_capacity(n),
            e2: Vec::with_capacity(n),
            q: Vec::with_capacity(n),
            f1: Vec::with_capacity(n),
            f2: Vec::with_capacity(n),
            f3: Vec::with_capacity(n),
        };
        let roots: Vec<Complex64> = (0..CONTOUR_POINTS)
            .map(|j| Complex64::from_polar(1.0, std::f64::consts::TAU * (j as f64 + 0.5) / CONTOUR_POINTS as f64))
            .collect();
        for &l in symbols {
            let z = l * h;
            let (mut q, mut f1, mut f2, mut f3) = (Complex64::default(), Complex64::default(), Complex64::default(), Complex64::default());
            for root in &roots {
                let r = z + root;
                let er = r.exp();
                let r3 = r * r * r;
                q += ((r * 0.5).exp() - 1.0) / r;
                f1 += (-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r3;
                f2 += (2.0 + r + er * (r - 2.0)) / r3;
                f3 += (-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r3;
            }
            let scale = h / CONTOUR_POINTS as f64;
            out.e.push(z.exp());
            out.e2.push((z * 0.5).exp());
            out.q.push(q * scale);
            out.f1.push(f1 * scale);
            out.f2.push(f2 * scale);
            out.f3.push(f3 * scale);
        }
        out
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    /// One step from `(w, t)`; `nonlinear` is called at `t`, `t + h/2` (twice) and `t + h`, in that order.
    pub fn step(
        &self,
        w: &[Complex64],
        t: f64,
        mut nonlinear: impl FnMut(&[Complex64], f64) -> Result<Vec<Complex64>>,
    ) -> Result<Vec<Complex64>> {
        let n = w.len();
        let h = self.h;
        let nw = nonlinear(w, t)?;
        let a: Vec<Complex64> = (0..n).map(|i| self.e2[i] * w[i] + self.q[i] * nw[i]).collect();
        let na = nonlinear(&a, t + 0.5 * h)?;
        let b: Vec<Complex64> = (0..n).map(|i| self.e2[i] * w[i] + self.q[i] * na[i]).collect();
        let nb = nonlinear(&b, t + 0.5 * h)?;
        let c: Vec<Complex64> = (0..n).map(|i| self.e2[i] * a[i] + self.q[i] * (2.0 * nb[i] - nw[i])).collect();
        let nc = nonlinear(&c, t + h)?;
        Ok((0..n)
            .map(|i| self.e[i] * w[i] + self.f1[i] * nw[i] + 2.0 * self.f2[i] * (na[i] + nb[i]) + self.f3[i] * nc[i])
            .collect())
    }
}

/// Coefficient sets for one symbol vector, keyed by step size. The first step size requested is
/// kept; a few others (e.g. from section bisection) rotate through the remaining slots.
#[derive(Debug)]
pub struct StepperCache {
    symbols: Vec<Complex64>,
    slots: Mutex<Vec<Arc<Etdrk4>>>,
}

const CACHE_SLOTS: usize = 4;

impl StepperCache {
    pub fn new(symbols: Vec<Complex64>) -> Self {
        Self { symbols, slots: Mutex::new(Vec::new()) }
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    pub fn get(&self, h: f64) -> Arc<Etdrk4> {
        let mut slots = self.slots.lock().expect("stepper cache poisoned");
        if let Some(s) = slots.iter().find(|s| s.h.to_bits() == h.to_bits()) {
            return Arc::clone(s);
        }
        let fresh = Arc::new(Etdrk4::new(&self.symbols, h));
        if slots.len() == CACHE_SLOTS {
            slots.remove(1);
        }
        slots.push(Arc::clone(&fresh));
        fresh
    }
}

impl Clone for StepperCache {
    fn clone(&self) -> Self {
        let slots = self.slots.lock().expect("stepper cache poisoned").clone();
        Self { symbols: self.symbols.clone(), slots: Mutex::new(slots) }
    }
}
