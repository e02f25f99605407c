//! Independent reference implementations used by the integration and
//! acceptance suites. Nothing here calls into the code paths it checks.
#![allow(dead_code)]

pub mod oracles;
pub mod random;
