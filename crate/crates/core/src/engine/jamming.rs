use serde::{Deserialize, Serialize};

use crate::network::{LinkId, Route, SlotInterval};

/// A static attacker raising the power of every circuit that uses slots in
/// `[first_slot, last_slot]` on one directed link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jammer {
    pub link: LinkId,
    pub first_slot: u32,
    pub last_slot: u32,
    pub epsilon_db: f64,
}

/// Jamming power applied to a circuit, in dB, or `None` when it is clean.
///
/// A circuit is jammed when one of its route links carries a jammer whose
/// range intersects the circuit's own slots (guard slots do not count). With
/// several matching jammers the strongest one applies. A zero-power jammer
/// leaves the circuit clean.
pub fn classify_jammed(route: &Route, interval: SlotInterval, jammers: &[Jammer]) -> Option<f64> {
    jammers
        .iter()
        .filter(|j| route.links.contains(&j.link))
        .filter(|j| interval.intersects_inclusive(j.first_slot, j.last_slot))
        .map(|j| j.epsilon_db)
        .fold(None, |best: Option<f64>, e| Some(best.map_or(e, |b| b.max(e))))
        .filter(|&e| e > 0.0)
}
