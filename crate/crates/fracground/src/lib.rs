//! Ground states of `(-Delta)^s u + lambda u = f(u)` on a periodic box, with
//! a-posteriori certification of their structural properties.

pub mod continuation;
pub mod error;
pub mod fractional;
pub mod grid;
pub mod ground_state;
pub mod kernel;
pub mod linearized;
pub mod krylov;
pub mod linalg;
pub mod nonlinearity;
pub mod polarization;
pub mod quad;
pub mod report;
pub mod sector;
pub mod special;
pub mod spectral;
pub mod sweep;
pub mod whole_space;

pub use error::{Error, Result};
pub use grid::{Field, Grid, make_grid};
pub use nonlinearity::NonlinearitySpec;
