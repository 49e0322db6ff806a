use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::grid::SlotGrid;
use super::NetworkError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinkId(pub u32);

impl LinkId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One bidirectional fiber link as written in a topology description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    pub source: String,
    pub target: String,
    pub length_km: f64,
}

/// A directed link with its own spectrum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub id: LinkId,
    pub source: NodeId,
    pub target: NodeId,
    pub length_km: f64,
    pub span_count: u32,
    pub grid: SlotGrid,
}

/// Directed graph of nodes and span-annotated links.
///
/// Node ids follow the lexicographic order of node names, so routing
/// tie-breaks on id sequences are tie-breaks on name sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    names: Vec<String>,
    links: Vec<Link>,
    outgoing: Vec<Vec<LinkId>>,
}

impl Topology {
    /// Builds a topology where every spec record yields one link per direction.
    ///
    /// `extra_nodes` may list isolated nodes that carry no link.
    pub fn build(
        specs: &[LinkSpec],
        extra_nodes: &[String],
        span_length_km: f64,
        slots: u32,
    ) -> Result<Self, NetworkError> {
        if specs.is_empty() {
            return Err(NetworkError::NoLinks);
        }
        let mut names: BTreeSet<String> = extra_nodes.iter().cloned().collect();
        for s in specs {
            names.insert(s.source.clone());
            names.insert(s.target.clone());
        }
        let names: Vec<String> = names.into_iter().collect();
        let lookup = |n: &str| NodeId(names.binary_search_by(|x| x.as_str().cmp(n)).unwrap() as u32);

        let mut links = Vec::with_capacity(2 * specs.len());
        let mut seen = BTreeSet::new();
        for s in specs {
            if s.source == s.target {
                return Err(NetworkError::SelfLoop(s.source.clone()));
            }
            if s.length_km <= 0.0 || !s.length_km.is_finite() {
                return Err(NetworkError::BadLength {
                    from: s.source.clone(),
                    to: s.target.clone(),
                    length_km: s.length_km,
                });
            }
            let (a, b) = (lookup(&s.source), lookup(&s.target));
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(NetworkError::DuplicateLink(s.source.clone(), s.target.clone()));
            }
            let span_count = ((s.length_km / span_length_km).ceil() as u32).max(1);
            for (source, target) in [(a, b), (b, a)] {
                links.push(Link {
                    id: LinkId(links.len() as u32),
                    source,
                    target,
                    length_km: s.length_km,
                    span_count,
                    grid: SlotGrid::new(slots),
                });
            }
        }
        let mut outgoing = vec![Vec::new(); names.len()];
        for l in &links {
            outgoing[l.source.index()].push(l.id);
        }
        for out in &mut outgoing {
            out.sort_by_key(|&id| links[id.index()].target);
        }
        Ok(Self {
            names,
            links,
            outgoing,
        })
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.names.len() as u32).map(NodeId)
    }

    pub fn node_name(&self, n: NodeId) -> &str {
        &self.names[n.index()]
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.names
            .binary_search_by(|x| x.as_str().cmp(name))
            .ok()
            .map(|i| NodeId(i as u32))
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id.index()]
    }

    pub fn link_mut(&mut self, id: LinkId) -> &mut Link {
        &mut self.links[id.index()]
    }

    pub fn outgoing(&self, n: NodeId) -> &[LinkId] {
        &self.outgoing[n.index()]
    }

    pub fn find_link(&self, source: NodeId, target: NodeId) -> Option<LinkId> {
        self.outgoing(source)
            .iter()
            .copied()
            .find(|&l| self.link(l).target == target)
    }

    pub fn link_label(&self, id: LinkId) -> String {
        let l = self.link(id);
        format!("{}-{}", self.node_name(l.source), self.node_name(l.target))
    }

    /// Ordered (source, destination) pairs with source ≠ destination.
    pub fn ordered_pairs(&self) -> Vec<(NodeId, NodeId)> {
        let mut pairs = Vec::new();
        for s in self.nodes() {
            for d in self.nodes() {
                if s != d {
                    pairs.push((s, d));
                }
            }
        }
        pairs
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(a: &str, b: &str, len: f64) -> LinkSpec {
        LinkSpec {
            source: a.into(),
            target: b.into(),
            length_km: len,
        }
    }

    #[test]
    fn links_exist_in_both_directions() {
        let t = Topology::build(&[spec("B", "A", 250.0)], &[], 100.0, 320).unwrap();
        assert_eq!(t.node_count(), 2);
        let a = t.node_by_name("A").unwrap();
        let b = t.node_by_name("B").unwrap();
        assert_eq!(a, NodeId(0));
        let ab = t.link(t.find_link(a, b).unwrap());
        let ba = t.link(t.find_link(b, a).unwrap());
        assert_eq!(ab.length_km, ba.length_km);
        assert_eq!(ab.span_count, 3);
        assert_eq!(ab.grid.len(), 320);
    }

    #[test]
    fn span_count_rounds_up_with_floor_of_one() {
        let t = Topology::build(
            &[spec("A", "B", 100.0), spec("B", "C", 100.5), spec("C", "D", 3.0)],
            &[],
            100.0,
            8,
        )
        .unwrap();
        let spans: Vec<u32> = t.links().iter().step_by(2).map(|l| l.span_count).collect();
        assert_eq!(spans, vec![1, 2, 1]);
    }

    #[test]
    fn rejects_malformed_links() {
        assert!(matches!(
            Topology::build(&[spec("A", "A", 1.0)], &[], 100.0, 8),
            Err(NetworkError::SelfLoop(_))
        ));
        assert!(matches!(
            Topology::build(&[spec("A", "B", 0.0)], &[], 100.0, 8),
            Err(NetworkError::BadLength { .. })
        ));
        assert!(matches!(
            Topology::build(&[spec("A", "B", 1.0), spec("B", "A", 2.0)], &[], 100.0, 8),
            Err(NetworkError::DuplicateLink(..))
        ));
        assert!(matches!(
            Topology::build(&[], &[], 100.0, 8),
            Err(NetworkError::NoLinks)
        ));
    }
}
