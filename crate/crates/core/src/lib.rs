//! Static potentials on manifolds with boundary.
//!
//! The crate is `no_std` (with `alloc`). It provides conformally flat model
//! geometries, umbilic boundary families, the static operator and its
//! boundary condition, kernel classification of domains, and the
//! mean-curvature analysis of centred spheres in Schwarzschild space.

#![no_std]

extern crate alloc;

pub mod catalog;
pub mod classify;
pub mod error;
pub mod fd;
pub mod geom;
pub mod schwarzschild;
pub mod staticop;
pub mod surfaces;

pub use catalog::{potential_basis, PotentialBasis};
pub use classify::{Component, DomainSpec, KernelOptions, KernelReport, Side, Verdict};
pub use error::{Error, Result};
pub use geom::{Geometry, GeometryKind, ScalarField};
pub use surfaces::{Family, Hypersurface, Orientation, SurfaceGeometryData};
