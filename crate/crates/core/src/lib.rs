//! Desk-scale laboratory for viscous shock stability in the 1D barotropic
//! Navier-Stokes system (Lagrangian mass coordinates).
//!
//! The crate builds viscous shock profiles, evolves perturbed states in the
//! shock frame while co-integrating the dynamic shift, and evaluates the
//! full weighted relative-entropy ledger so that every numerically
//! checkable identity and inequality of the underlying stability argument
//! can be verified at desk scale.

pub mod checks;
pub mod dynamics;
pub mod error;
pub mod functionals;
pub mod hugoniot;
pub mod interp;
pub mod model;
pub mod output;
pub mod profile;
pub mod quad;
pub mod scenario;

pub use error::{Error, Result};
pub use hugoniot::{Constants, EndStates};
pub use model::ModelParams;
pub use profile::ShockProfile;
