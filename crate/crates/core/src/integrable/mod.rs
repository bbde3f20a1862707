//! Residual checks of the Euler Lax pairs in 2D and 3D and the 2D Darboux transformation.

mod darboux;
mod lax2d;
mod lax3d;
mod report;
mod stepping;

pub use darboux::{
    darboux_apply, darboux_verify, gauge_identity_defect, gauge_transform, lax_system_residuals, mirror_series,
    swap_axes, DarbouxInput, DarbouxOutput, DarbouxReport, DarbouxSnapshot, GaugeField, GaugeIdentityReport,
    SystemResiduals, CONSTRAINT_TOLERANCE, DEFAULT_ETA_FACTOR,
};
pub use lax2d::{
    lax_operators_2d, transported_eigenfield_check_2d, transported_eigenfield_run_2d, LaxState2D, VorticitySign,
};
pub use lax3d::{
    abc_velocity, lax_operators_3d, transported_eigenfield_check_3d, LaxState3D, VelocityClosure, VelocityFn,
};
pub use report::ResidualReport;
