//! Support library for the `neutron-ghz` binary: run-configuration parsing
//! and the Mermin report format. Kept as a library so integration tests can
//! parse the artifacts the binary writes.

pub mod config;
pub mod report;
