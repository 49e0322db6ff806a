//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use eonsim::network::{Cell, NodeId, Route, Topology};
use eonsim::qot::{DerivedCoefficients, PhysicalParams};

/// A channel as plain numbers: start slot, width in slots, jamming in dB.
pub type RawChannel = (u32, u32, f64);

/// Per-span NLI PSD of `channels[victim]` straight from the GN closed form,
/// with each jammed interferer entering at its raised power.
pub fn direct_nli(
    channels: &[RawChannel],
    victim: usize,
    p: &PhysicalParams,
    c: &DerivedCoefficients,
) -> f64 {
    let df = p.slot_width_hz;
    let center = |&(s, w, _): &RawChannel| (f64::from(s) + f64::from(w) / 2.0) * df;
    let (_, wm, _) = channels[victim];
    let bw_m = f64::from(wm) * df;
    let g_m = p.tx_power_w / bw_m;
    let mut bracket = g_m * g_m * (c.rho * bw_m * bw_m).asinh();
    for (k, ch) in channels.iter().enumerate() {
        if k == victim {
            continue;
        }
        let bw = f64::from(ch.1) * df;
        let power = p.tx_power_w * 10f64.powf(ch.2 / 10.0);
        let g = power / bw;
        let f = (center(ch) - center(&channels[victim])).abs();
        bracket += g * g * ((f + bw / 2.0) / (f - bw / 2.0)).ln();
    }
    c.phi * g_m * bracket
}

/// Lowest start whose cells are free on every route link and whose guard
/// neighbourhood holds no circuit cell, found by scanning every start.
pub fn brute_first_fit(route: &Route, width: u32, guard: u32, t: &Topology) -> Option<u32> {
    let slots = t.link(route.links[0]).grid.len() as i64;
    (0..=slots - i64::from(width)).map(|s| s as u32).find(|&s| {
        route.links.iter().all(|&l| {
            let cells = t.link(l).grid.cells();
            let own = (s..s + width).all(|i| cells[i as usize] == Cell::Free);
            let lo = i64::from(s) - i64::from(guard);
            let hi = i64::from(s + width + guard);
            let clear = (lo.max(0)..hi.min(slots)).all(|i| !cells[i as usize].is_circuit());
            own && clear
        })
    })
}

/// Cheapest simple path by exhaustive enumeration, ties broken on the node
/// sequence.
pub fn exhaustive_shortest(t: &Topology, src: NodeId, dst: NodeId) -> Option<(f64, Vec<NodeId>)> {
    fn walk(
        t: &Topology,
        at: NodeId,
        dst: NodeId,
        path: &mut Vec<NodeId>,
        cost: f64,
        best: &mut Option<(f64, Vec<NodeId>)>,
    ) {
        if at == dst {
            let better = match best {
                None => true,
                Some((c, p)) => cost < *c || (cost == *c && path < p),
            };
            if better {
                *best = Some((cost, path.clone()));
            }
            return;
        }
        for link in t.links().iter().filter(|l| l.source == at) {
            if path.contains(&link.target) {
                continue;
            }
            path.push(link.target);
            walk(t, link.target, dst, path, cost + link.length_km, best);
            path.pop();
        }
    }
    let mut best = None;
    walk(t, src, dst, &mut vec![src], 0.0, &mut best);
    best
}
