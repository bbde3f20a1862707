//! Numerical laboratory for the linearised 2D Navier-Stokes operator at a simple shear, the
//! Lax-pair structure of the 2D/3D Euler equations and chaos diagnostics of near-integrable
//! model PDEs (perturbed sine-Gordon, Ginzburg-Landau, ABC flow).

mod error;
pub mod chaos;
pub mod fields;
pub mod integrable;
pub mod spectra;

pub use error::{Error, Result};
