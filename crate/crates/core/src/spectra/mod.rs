//! Spectral analysis of the linearised 2D Navier-Stokes operator at the shear `Ω* = Γ cos y`.
//!
//! The linearisation couples only modes sharing `(k1, k2 mod 1)`, so it splits into tridiagonal
//! blocks, one per [`ModeClass`].

mod instability;
mod operator;
mod output;
mod spectrum;
mod tracking;

pub use instability::{
    critical_viscosity, critical_viscosity_bounds, estimates_apply, growth_bounds, inviscid_growth_bounds,
    unstable_eigenvalue, CriticalViscosity, GrowthRate, UnstableEigenvalue, GROWTH_THRESHOLD, IMAG_TOLERANCE,
    REFINEMENT_TOLERANCE,
};
pub use operator::{assemble_suboperator, jacobian_oracle_check, ModeClass, Provenance, SubOperator};
pub use output::{trajectory_records, write_spectrum_csv, write_spectrum_rows, write_trajectories_jsonl, SPECTRUM_CSV_HEADER};
pub use spectrum::{compute_spectrum, euler_spectrum, EulerSpectrum, Spectrum, AXIS_TOLERANCE, ISOLATION_FACTOR};
pub use tracking::{
    classify_limits, extrapolate_to_zero, geometric_schedule, optimal_assignment, track_zero_viscosity,
    Classification, EigTrajectory, LimitLabel, SpectralComponent, ZeroViscosityTrack, AMBIGUITY_TOLERANCE,
    COINCIDENCE_TOLERANCE, DIFFUSIVE_SPREAD,
};
