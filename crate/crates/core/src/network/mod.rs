//! Network and spectrum state: span-annotated directed links, slot grids,
//! shortest-path routing and First-Fit spectrum assignment with guard bands.

mod grid;
mod routing;
mod spectrum;
mod topology;

use thiserror::Error;

pub use grid::{Cell, CircuitId, SlotGrid, SlotInterval};
pub use routing::{shortest_path, Route};
pub use spectrum::{allocate, first_fit, release, slots_required, GBPS_PER_SLOT, SUPPORTED_BITRATES};
pub use topology::{Link, LinkId, LinkSpec, NodeId, Topology};

/// Slots per link direction in the reference experiments.
pub const DEFAULT_SLOTS: u32 = 320;

/// Guard band between adjacent lightpaths, slots.
pub const DEFAULT_GUARD_SLOTS: u32 = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("topology has no links")]
    NoLinks,
    #[error("link {0}-{0} is a self loop")]
    SelfLoop(String),
    #[error("link {from}-{to} has invalid length {length_km} km")]
    BadLength {
        from: String,
        to: String,
        length_km: f64,
    },
    #[error("link {0}-{1} declared more than once")]
    DuplicateLink(String, String),
    #[error("node index {0} is not in the topology")]
    UnknownNode(usize),
    #[error("source and destination are both {0}")]
    SameEndpoints(NodeId),
    #[error("no path from {0} to {1}")]
    NoRoute(NodeId, NodeId),
    #[error("unsupported bit rate {0} Gb/s")]
    UnsupportedBitrate(u32),
    #[error("circuit {0} is not allocated here")]
    UnknownCircuit(CircuitId),
    #[error("spectrum state corrupted: {0}")]
    Corrupt(String),
}
