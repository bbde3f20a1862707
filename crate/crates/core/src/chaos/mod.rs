//! Pseudo-spectral and ODE integrators for the perturbed sine-Gordon, Ginzburg-Landau and ABC
//! systems, with Poincaré-map and Lyapunov-exponent diagnostics.

pub mod abc;
pub mod basis;
pub mod diagnostics;
pub mod etdrk4;
pub mod forcing;
pub mod ginzburg_landau;
pub mod model;
pub mod output;
pub mod sine_gordon;

pub use abc::{abc_lyapunov, abc_step, AbcParams, AbcState};
pub use basis::{Parity, ParityBasis};
pub use diagnostics::{
    lyapunov_max, poincare_samples, sg_lyapunov_scan, LyapunovEstimate, LyapunovOptions, PoincareSamples, ScanCell,
};
pub use forcing::{force_eval, Forcing, ForcingSpec, Quasiperiodic};
pub use ginzburg_landau::{gl_step, limit_cycle, GinzburgLandau, GlParams, GlState, GlVariant};
pub use model::{simulate, Model, ModelState, SimulationEnd, ESCAPE_NORM};
pub use output::{write_lyapunov_csv, write_poincare_csv, write_record_jsonl, write_scan_csv, TrajectoryRecord};
pub use sine_gordon::{sg_step, SgParams, SgState, SineGordon};
