//! Finite linkages, periodic frameworks and auxetic deformation paths.
//!
//! A finite linkage with `d` marked vertex pairs determines a periodic framework whose
//! periods are the marked difference vectors. A one-parameter deformation of that
//! framework is auxetic when the velocity of the Gram matrix of the periods is positive
//! semidefinite. This crate builds such frameworks, counts their degrees of freedom,
//! searches for strictly auxetic directions and traces deformation paths.

pub mod auxetics;
pub mod cli;
pub mod constructors;
pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod path;
pub mod quotient;
pub mod rigidity;

pub use error::{Error, Result};
pub use geometry::{
    EdgeOrbit, FiniteLinkage, InfinitesimalDeformation, PeriodicFramework, SymmetricMatrix,
};
pub use rigidity::{DeformationSpace, Structure};
