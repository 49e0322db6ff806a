use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::topology::{LinkId, NodeId, Topology};
use super::NetworkError;

/// A simple path through the topology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    pub source: NodeId,
    pub destination: NodeId,
    pub links: Vec<LinkId>,
}

impl Route {
    pub fn nodes(&self, t: &Topology) -> Vec<NodeId> {
        let mut nodes = vec![self.source];
        nodes.extend(self.links.iter().map(|&l| t.link(l).target));
        nodes
    }

    pub fn length_km(&self, t: &Topology) -> f64 {
        self.links.iter().map(|&l| t.link(l).length_km).sum()
    }
}

struct Label {
    cost: f64,
    nodes: Vec<NodeId>,
    links: Vec<LinkId>,
}

// Min-heap order: lower cost first, then the lexicographically smaller node sequence.
impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.nodes.cmp(&self.nodes))
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Label {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Label {}

/// Dijkstra over link lengths. Among equal-length paths the one with the
/// lexicographically smallest node-id sequence wins.
pub fn shortest_path(t: &Topology, src: NodeId, dst: NodeId) -> Result<Route, NetworkError> {
    let n = t.node_count();
    if src.index() >= n || dst.index() >= n {
        return Err(NetworkError::UnknownNode(src.index().max(dst.index())));
    }
    if src == dst {
        return Err(NetworkError::SameEndpoints(src));
    }
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    heap.push(Label {
        cost: 0.0,
        nodes: vec![src],
        links: Vec::new(),
    });
    while let Some(label) = heap.pop() {
        let at = *label.nodes.last().expect("labels are never empty");
        if done[at.index()] {
            continue;
        }
        done[at.index()] = true;
        if at == dst {
            return Ok(Route {
                source: src,
                destination: dst,
                links: label.links,
            });
        }
        for &l in t.outgoing(at) {
            let link = t.link(l);
            if done[link.target.index()] {
                continue;
            }
            let mut nodes = label.nodes.clone();
            nodes.push(link.target);
            let mut links = label.links.clone();
            links.push(l);
            heap.push(Label {
                cost: label.cost + link.length_km,
                nodes,
                links,
            });
        }
    }
    Err(NetworkError::NoRoute(src, dst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::topology::LinkSpec;

    fn topo(links: &[(&str, &str, f64)]) -> Topology {
        let specs: Vec<LinkSpec> = links
            .iter()
            .map(|&(a, b, l)| LinkSpec {
                source: a.into(),
                target: b.into(),
                length_km: l,
            })
            .collect();
        Topology::build(&specs, &[], 100.0, 8).unwrap()
    }

    fn names(t: &Topology, r: &Route) -> String {
        r.nodes(t).iter().map(|&n| t.node_name(n)).collect()
    }

    #[test]
    fn single_link() {
        let t = topo(&[("A", "B", 100.0)]);
        let (a, b) = (t.node_by_name("A").unwrap(), t.node_by_name("B").unwrap());
        let r = shortest_path(&t, a, b).unwrap();
        assert_eq!(r.links, vec![t.find_link(a, b).unwrap()]);
        let r = shortest_path(&t, b, a).unwrap();
        assert_eq!(r.links, vec![t.find_link(b, a).unwrap()]);
    }

    #[test]
    fn triangle_prefers_two_short_hops() {
        let t = topo(&[("A", "B", 100.0), ("B", "C", 100.0), ("A", "C", 250.0)]);
        let r = shortest_path(&t, t.node_by_name("A").unwrap(), t.node_by_name("C").unwrap()).unwrap();
        assert_eq!(names(&t, &r), "ABC");
        assert_eq!(r.length_km(&t), 200.0);
    }

    #[test]
    fn ties_go_to_smallest_node_sequence() {
        // A-B-D and A-C-D both 200 km
        let t = topo(&[
            ("A", "C", 100.0),
            ("C", "D", 100.0),
            ("A", "B", 100.0),
            ("B", "D", 100.0),
        ]);
        let (a, d) = (t.node_by_name("A").unwrap(), t.node_by_name("D").unwrap());
        for _ in 0..3 {
            assert_eq!(names(&t, &shortest_path(&t, a, d).unwrap()), "ABD");
        }
        assert_eq!(names(&t, &shortest_path(&t, d, a).unwrap()), "DBA");
    }

    #[test]
    fn unreachable_and_degenerate_requests() {
        let t = topo(&[("A", "B", 1.0), ("C", "D", 1.0)]);
        let (a, c) = (t.node_by_name("A").unwrap(), t.node_by_name("C").unwrap());
        assert!(matches!(shortest_path(&t, a, c), Err(NetworkError::NoRoute(..))));
        assert!(matches!(
            shortest_path(&t, a, a),
            Err(NetworkError::SameEndpoints(_))
        ));
        assert!(matches!(
            shortest_path(&t, a, NodeId(17)),
            Err(NetworkError::UnknownNode(_))
        ));
    }
}
