use crate::error::Result;

/// State that supports `self + a·other`.
pub(crate) trait Axpy: Clone {
    fn axpy(&self, a: f64, other: &Self) -> Self;
}

/// Classical fourth-order Runge-Kutta step of `ds/dt = rhs(t, s)`.
pub(crate) fn rk4_step<S: Axpy>(s: &S, t: f64, dt: f64, rhs: impl Fn(f64, &S) -> Result<S>) -> Result<S> {
    let k1 = rhs(t, s)?;
    let k2 = rhs(t + 0.5 * dt, &s.axpy(0.5 * dt, &k1))?;
    let k3 = rhs(t + 0.5 * dt, &s.axpy(0.5 * dt, &k2))?;
    let k4 = rhs(t + dt, &s.axpy(dt, &k3))?;
    Ok(s.axpy(dt / 6.0, &k1).axpy(dt / 3.0, &k2).axpy(dt / 3.0, &k3).axpy(dt / 6.0, &k4))
}

/// Number of steps of size close to `dt` that exactly cover `[0, t_end]`.
pub(crate) fn step_count(t_end: f64, dt: f64) -> usize {
    ((t_end / dt).round() as usize).max(1)
}

/// Largest RK4 Courant number tolerated on a purely advective spectrum.
pub(crate) const MAX_COURANT: f64 = 2.5;

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Clone)]
    struct Scalar(f64);
    impl Axpy for Scalar {
        fn axpy(&self, a: f64, o: &Self) -> Self {
            Scalar(self.0 + a * o.0)
        }
    }

    #[test]
    fn exponential_decay_is_fourth_order() {
        let run = |n: usize| {
            let dt = 1.0 / n as f64;
            let mut s = Scalar(1.0);
            for i in 0..n {
                s = rk4_step(&s, i as f64 * dt, dt, |_, x| Ok(Scalar(-x.0))).unwrap();
            }
            (s.0 - (-1.0f64).exp()).abs()
        };
        let ratio = run(10) / run(20);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }
}
