//! File formats and input parsing shared by the `infsemi` binary and its
//! integration tests.

pub mod format;
pub mod seq;
