//! C3 quintic simplex-spline bases on the Powell-Sabin 12-split.

pub mod basis;
pub mod bspline;
pub mod classify;
pub mod error;
pub mod export;
pub mod geometry;
pub mod hermite;
pub mod join;
pub mod linalg;
pub mod marsden;
pub mod mesh;
pub mod multiplicity;
pub mod piecewise;
pub mod polynomial;
pub mod simplex;
pub mod suite;

pub use basis::{BasisInstance, SplineFunction, NUM_BASIS};
pub use error::{Error, Result};
pub use geometry::{Barycentric, MacroTriangle, Permutation, Point, SplitSites, Vector};
pub use mesh::{FitMode, FitResult, Triangulation};
pub use multiplicity::MultiplicityVector;
