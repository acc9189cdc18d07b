pub mod acceptance;
pub mod error;
pub mod ode;
pub mod optimal_sets;
pub mod radial;
pub mod reduction;
pub mod roots;
pub mod sl;
pub mod thresholds;
pub mod verifier;
pub mod weights;

pub use error::{Error, Result};
