//! Steady states, local and global dynamics of an overlapping-generations
//! monetary economy under an interest-rate rule and two fiscal regimes.

pub mod calib;
pub mod config;
pub mod error;
pub mod flow;
pub mod localdyn;
pub mod model;
pub mod output;
pub mod policy;
pub mod prefs;
pub mod presets;
pub mod steady;

pub use error::{Error, Result};
pub use model::{Model, StateVector};
pub use policy::{Activist, DebtTargeting, FiscalRegime, TaylorRule};
pub use prefs::ModelParams;
pub use steady::SteadyState;
