//! Multiview visualization of scalar fields on 3D and 4D lattices.
//!
//! Numeric kernels (fields, reductions, marching cubes, ray casting, mesh
//! rasterization) are generic over [`scalar::Real`]; the aliases below pin
//! them to `f64` or `f32`. Sessions, the command language and the scene
//! compositor work in `f64`.

pub mod field;
pub mod geometry;
pub mod io;
pub mod math;
pub mod render;
pub mod scalar;
pub mod scene;
pub mod session;
pub mod viewlang;

pub use field::{FieldError, Histogram, Reducer, ScalarField};
pub use scalar::Real;
pub use session::{Event, Mode, Session, SessionError};

pub type Field = ScalarField<f64>;
pub type Field32 = ScalarField<f32>;
pub type Mesh = geometry::TriangleMesh<f64>;
pub type Mesh32 = geometry::TriangleMesh<f32>;
pub type Vec3 = math::Vec3<f64>;
pub type Camera = render::Camera<f64>;
pub type TransferFunction = render::TransferFunction<f64>;
pub type Aabb = geometry::Aabb<f64>;
