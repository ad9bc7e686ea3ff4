//! Monte Carlo and limit objects for the walk on the integer Heisenberg group.

pub mod gamma;
pub mod levy;
pub mod walk;

pub use gamma::{gamma, gamma_real};
pub use levy::{levy_density, printed_density, CdfTable, LevyDensity};
pub use walk::{
    conjectured_constant, return_probability, sample_walk, sample_walk_seeded, zn_limit_test,
    LevyStats, ReturnStats, WalkSample,
};
