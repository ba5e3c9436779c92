//! Virtual element discretizations of anisotropic diffusion problems on polygonal meshes.
//!
//! Two methods are provided on the same degrees of freedom:
//!
//! * the standard virtual element method, whose local bilinear form is a polynomial
//!   consistency term plus a "dofi-dofi" stabilization, and
//! * the enlarged enhancement method, which enriches the enhancement conditions up to
//!   degree `k + ell_E` so that a higher-degree L2 projection of the gradient is
//!   computable, and drops the stabilization altogether.
//!
//! The crate is split along the pipeline: [`mesh`] builds and checks polygonal
//! tessellations of the unit square, [`polybasis`] holds scaled monomials and quadrature,
//! [`vemlocal`] builds element projectors and local matrices, [`assembly`] builds and
//! solves the global system, and [`experiments`] runs manufactured-solution studies.

pub mod assembly;
pub mod error;
pub mod experiments;
pub mod mesh;
pub mod polybasis;
pub mod vemlocal;

pub use error::{Result, VemError};
pub use mesh::{PolyMesh, Vertex2};
pub use vemlocal::{DiffusionTensor, MethodKind};

