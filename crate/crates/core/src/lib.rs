//! Elastic optical network simulator with jamming-aware admission control.
//!
//! - [`qot`]: GN-model SNR with the NLI split into secure and jamming parts.
//! - [`network`]: topology, slot grids, routing and First-Fit assignment.
//! - [`engine`]: Poisson traffic, SNR-gated admission, blocking and utilization metrics.
//! - [`config`], [`sweep`], [`emit`]: scenario files, jamming-power sweeps and CSV/JSON output.

pub mod config;
pub mod emit;
pub mod engine;
pub mod network;
pub mod qot;
pub mod sweep;
