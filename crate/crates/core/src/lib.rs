//! Solvers and a slot-level simulator for joint task offloading and
//! computing-resource allocation in a three-layer aerial/terrestrial edge
//! network: client UAVs generate tasks, a hovering edge UAV sells MEC
//! cycles, and ground vehicles lend idle cycles as fog nodes.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches
//! files, the console or threads lives in the `skyfog` companion crate.

#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
pub mod cost;
pub mod engine;
pub mod game;
pub mod geometry;
pub mod mec;
pub mod mobility;
pub mod rng;
pub mod scenario;
pub mod vfc;

pub use engine::{run_horizon, run_horizon_many, run_slot, run_slot_many, Policy, RunResult, SlotOutcome, World};
pub use scenario::{Mode, OffloadProfile, Scenario, ScenarioConfig, SlotMetrics, Task};
