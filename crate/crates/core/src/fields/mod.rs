//! Spectral representation of periodic fields and the differential operators built on it.

mod field2d;
mod field3d;
mod ops2d;
pub mod random;
pub mod snapshot;
pub mod transform;

pub use field2d::{SpectralField2D, TorusGrid2D, REAL_TOLERANCE};
pub use field3d::{
    advect_3d, advect_scalar, advect_vector, biot_savart_3d, curl_3d, euler_vorticity_rhs, ns_rhs_3d,
    Advected, AdvectedField, SpectralField3D, TorusGrid3D, VectorField3D,
};
pub use ops2d::{
    bracket, invert_laplacian, laplacian, ns_rhs_2d, poisson_bracket, velocity_from_stream, MEAN_TOLERANCE,
};
pub use snapshot::FieldSnapshot;
