//! Table reproduction, pricing and calibration plumbing behind the `bk`
//! binary. Everything here is also driven by the acceptance test suite.

pub mod grids;
pub mod output;
pub mod tables;
