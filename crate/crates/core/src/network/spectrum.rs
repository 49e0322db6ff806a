use super::grid::{CircuitId, SlotInterval};
use super::routing::Route;
use super::topology::{LinkId, Topology};
use super::NetworkError;

/// Bit rates a request may ask for, Gb/s.
pub const SUPPORTED_BITRATES: [u32; 3] = [50, 100, 200];

/// Capacity of one 12.5 GHz slot at 16QAM, Gb/s.
pub const GBPS_PER_SLOT: u32 = 50;

pub fn slots_required(bitrate_gbps: u32) -> Result<u32, NetworkError> {
    if !SUPPORTED_BITRATES.contains(&bitrate_gbps) {
        return Err(NetworkError::UnsupportedBitrate(bitrate_gbps));
    }
    Ok(bitrate_gbps.div_ceil(GBPS_PER_SLOT))
}

/// Lowest-indexed interval of `width` slots that is free on every link of the
/// route, with `guard` slots of separation from other circuits.
pub fn first_fit(route: &Route, width: u32, guard: u32, t: &Topology) -> Option<SlotInterval> {
    if width == 0 || route.links.is_empty() {
        return None;
    }
    let slots = route.links.iter().map(|&l| t.link(l).grid.len()).min()? as u32;
    (0..=slots.checked_sub(width)?)
        .map(|start| SlotInterval::new(start, width))
        .find(|&iv| route.links.iter().all(|&l| t.link(l).grid.fits(iv, guard)))
}

/// Claims `interval` on every link of the route. `on_occupied` receives each
/// (link, slot) that switched from free to occupied.
pub fn allocate(
    route: &Route,
    interval: SlotInterval,
    guard: u32,
    id: CircuitId,
    t: &mut Topology,
    mut on_occupied: impl FnMut(LinkId, usize),
) -> Result<(), NetworkError> {
    if let Some(&bad) = route
        .links
        .iter()
        .find(|&&l| !t.link(l).grid.fits(interval, guard))
    {
        return Err(NetworkError::Corrupt(format!(
            "{id} does not fit at [{}, {}) on link {}",
            interval.start,
            interval.end(),
            t.link_label(bad)
        )));
    }
    for &l in &route.links {
        t.link_mut(l)
            .grid
            .allocate(interval, guard, id, |s| on_occupied(l, s))?;
    }
    Ok(())
}

pub fn release(
    route: &Route,
    interval: SlotInterval,
    guard: u32,
    id: CircuitId,
    t: &mut Topology,
    mut on_freed: impl FnMut(LinkId, usize),
) -> Result<(), NetworkError> {
    for &l in &route.links {
        t.link_mut(l)
            .grid
            .release(interval, guard, id, |s| on_freed(l, s))?;
    }
    Ok(())
}
