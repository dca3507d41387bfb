//! Numerical toolkit for spaces carrying a symmetric bilinear form: q-positive
//! sets, Fitzpatrick-type functions, intrinsic conjugates, VZ and MAS
//! classification, Gossez extensions and the (NI) inequality, each with a
//! verification check that reports its worst violation.

pub mod builtins;
pub mod convex;
pub mod error;
pub mod fitzpatrick;
pub mod gossez;
pub mod grid;
pub mod infconv;
pub mod io;
pub mod legendre;
pub mod linalg;
pub mod lp;
pub mod qpos;
pub mod quad;
pub mod report;
pub mod space;
pub mod vz;

/// Matrices in the public API are `nalgebra` types.
pub use nalgebra;
pub use builtins::{builtin_set, builtin_space, SetSpec};
pub use convex::ConvexFunction;
pub use error::{Error, Result};
pub use fitzpatrick::FitzpatrickTriple;
pub use gossez::{make_dual, SsdDual};
pub use grid::{Axis, GridSpec};
pub use qpos::{QPositiveSet, Violation};
pub use quad::Quad;
pub use report::{CheckReport, CheckRow, Status};
pub use space::SsdSpace;
pub use vz::VzReport;
