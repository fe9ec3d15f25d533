//! File formats, parameter sweeps, oracle verification and benchmarks on
//! top of `skyfog-core`. The `skyfog` binary is a thin layer over this.

pub mod bench;
pub mod config;
pub mod instances;
pub mod oracle;
pub mod report;
pub mod sweep;
pub mod verify;
