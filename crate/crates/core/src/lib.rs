//! Compactons of degenerate KdV and NLS equations.
//!
//! * [`profiles`]: classification and construction of traveling waves.
//! * [`functionals`]: conserved quantities, identities and minimization.
//! * [`spectral`]: the linearized operator of the quartic compactons.
//! * [`evolution`]: stiff time integration of the nonlinear models.

pub mod error;
pub mod evolution;
pub mod functionals;
pub mod io;
pub mod profiles;
pub mod quadrature;
pub mod roots;
pub mod spectral;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
