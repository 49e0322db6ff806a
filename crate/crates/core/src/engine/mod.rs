//! Discrete-event simulation of an elastic optical network under jamming.
//!
//! Requests arrive as a Poisson process. Each one is routed on its shortest
//! path, given the first spectrum interval that fits, and admitted only if
//! its own SNR and the SNR of every established circuit it shares a link
//! with stay at or above the threshold.

mod events;
mod jamming;
mod metrics;
mod traffic;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{
    self, first_fit, shortest_path, slots_required, Cell, CircuitId, LinkId, LinkSpec, NetworkError, NodeId,
    Route, SlotInterval, Topology,
};
use crate::qot::{
    self, db_to_linear, derive_coefficients, DerivedCoefficients, LinkSpectralState, PhysicalParams,
    QotError, Snr, SpectralChannel, XpmTable,
};

use events::{EventKind, EventQueue};
pub use jamming::{classify_jammed, Jammer};
use metrics::UtilizationCounter;
pub use metrics::{aggregate, AggregateMetrics, BlockCounts, Metrics};
pub use traffic::{generate_traffic, Request, TrafficGenerator};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Qot(#[from] QotError),
}

/// Jammer attached to a directed link named by its endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JammerSpec {
    pub source: String,
    pub target: String,
    pub first_slot: u32,
    pub last_slot: u32,
    pub epsilon_db: f64,
}

/// Everything one run needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub links: Vec<LinkSpec>,
    /// Nodes without links, if any.
    pub extra_nodes: Vec<String>,
    pub physical: PhysicalParams,
    pub load_erlang: f64,
    pub mean_holding_s: f64,
    pub request_count: u64,
    pub bitrates_gbps: Vec<u32>,
    pub guard_slots: u32,
    pub slots_per_link: u32,
    pub snr_threshold_db: f64,
    /// When false every request that finds spectrum is admitted.
    pub snr_gating: bool,
    pub jammers: Vec<JammerSpec>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            links: Vec::new(),
            extra_nodes: Vec::new(),
            physical: PhysicalParams::default(),
            load_erlang: 120.0,
            mean_holding_s: 600.0,
            request_count: 100_000,
            bitrates_gbps: network::SUPPORTED_BITRATES.to_vec(),
            guard_slots: network::DEFAULT_GUARD_SLOTS,
            slots_per_link: network::DEFAULT_SLOTS,
            snr_threshold_db: 15.0,
            snr_gating: true,
            jammers: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockReason {
    NoRoute,
    NoSpectrum,
    CandidateSnr,
    NeighborSnr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admission {
    Established(CircuitId),
    Blocked(BlockReason),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub id: CircuitId,
    pub route: Route,
    pub interval: SlotInterval,
    pub bitrate_gbps: u32,
    /// Zero when the circuit is not jammed.
    pub epsilon_db: f64,
    pub channel: SpectralChannel,
    pub admission_snr: Option<Snr>,
    pub departure_time: f64,
}

impl Circuit {
    pub fn is_jammed(&self) -> bool {
        self.epsilon_db > 0.0
    }
}

/// Mutable network state: grids, per-link spectral content and live circuits.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub topology: Topology,
    pub spectra: Vec<LinkSpectralState>,
    pub circuits: BTreeMap<CircuitId, Circuit>,
}

/// One simulation run in progress.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: SimConfig,
    coeff: DerivedCoefficients,
    weights: XpmTable,
    threshold_linear: f64,
    jammers: Vec<Jammer>,
    routes: Vec<Option<Route>>,
    state: NetworkState,
    util: UtilizationCounter,
    blocked_by: BlockCounts,
    established: u64,
    departed: u64,
    jammed_established: u64,
    next_circuit: u64,
}

impl Simulation {
    pub fn new(config: SimConfig) -> Result<Self, EngineError> {
        validate(&config)?;
        let coeff = derive_coefficients(&config.physical)?;
        let topology = Topology::build(
            &config.links,
            &config.extra_nodes,
            config.physical.span_length_km,
            config.slots_per_link,
        )?;
        let mut jammers = Vec::with_capacity(config.jammers.len());
        for j in &config.jammers {
            let link = match (topology.node_by_name(&j.source), topology.node_by_name(&j.target)) {
                (Some(a), Some(b)) => topology.find_link(a, b),
                _ => None,
            }
            .ok_or_else(|| {
                EngineError::Config(format!(
                    "jammer link {}-{} is not in the topology",
                    j.source, j.target
                ))
            })?;
            jammers.push(Jammer {
                link,
                first_slot: j.first_slot,
                last_slot: j.last_slot,
                epsilon_db: j.epsilon_db,
            });
        }
        let n = topology.node_count();
        let mut routes = vec![None; n * n];
        for (s, d) in topology.ordered_pairs() {
            routes[s.index() * n + d.index()] = match shortest_path(&topology, s, d) {
                Ok(r) => Some(r),
                Err(NetworkError::NoRoute(..)) => None,
                Err(e) => return Err(e.into()),
            };
        }
        let spectra = topology
            .links()
            .iter()
            .map(|l| LinkSpectralState::new(l.span_count))
            .collect::<Result<Vec<_>, _>>()?;
        let max_width = config
            .bitrates_gbps
            .iter()
            .map(|&b| slots_required(b))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .max()
            .unwrap_or(1);
        let weights = if config.snr_gating {
            XpmTable::new(config.slots_per_link, max_width)
        } else {
            XpmTable::new(0, 0)
        };
        let util = UtilizationCounter::new(topology.links().len(), config.slots_per_link as usize);
        Ok(Self {
            threshold_linear: db_to_linear(config.snr_threshold_db),
            coeff,
            weights,
            jammers,
            routes,
            state: NetworkState {
                topology,
                spectra,
                circuits: BTreeMap::new(),
            },
            util,
            blocked_by: BlockCounts::default(),
            established: 0,
            departed: 0,
            jammed_established: 0,
            next_circuit: 0,
            config,
        })
    }

    pub fn state(&self) -> &NetworkState {
        &self.state
    }

    pub fn topology(&self) -> &Topology {
        &self.state.topology
    }

    pub fn coefficients(&self) -> &DerivedCoefficients {
        &self.coeff
    }

    pub fn route(&self, source: NodeId, destination: NodeId) -> Option<&Route> {
        let n = self.state.topology.node_count();
        self.routes
            .get(source.index() * n + destination.index())
            .and_then(Option::as_ref)
    }

    /// SNR of an established circuit in the current state.
    pub fn circuit_snr(&self, id: CircuitId) -> Result<Snr, EngineError> {
        let c = self
            .state
            .circuits
            .get(&id)
            .ok_or(NetworkError::UnknownCircuit(id))?;
        self.snr_of(c.channel, &c.route)
    }

    fn snr_of(&self, channel: SpectralChannel, route: &Route) -> Result<Snr, EngineError> {
        Ok(qot::route_snr_with(
            &channel,
            route.links.iter().map(|l| &self.state.spectra[l.index()]),
            &self.coeff,
            &self.config.physical,
            &self.weights,
        )?)
    }

    /// Established circuits sharing at least one link with `route`, in id order.
    pub fn circuits_sharing(&self, route: &Route) -> BTreeSet<CircuitId> {
        let mut ids = BTreeSet::new();
        for &l in &route.links {
            let grid = &self.state.topology.link(l).grid;
            for ch in self.state.spectra[l.index()].channels() {
                if let Cell::Circuit(id) = grid.cell(ch.start_slot as usize) {
                    ids.insert(id);
                }
            }
        }
        ids
    }

    /// Tries to establish `request`, leaving the state untouched when blocked.
    pub fn admit(&mut self, request: &Request) -> Result<Admission, EngineError> {
        let Some(route) = self.route(request.source, request.destination).cloned() else {
            return Ok(self.block(BlockReason::NoRoute));
        };
        let width = slots_required(request.bitrate_gbps)?;
        let guard = self.config.guard_slots;
        let Some(interval) = first_fit(&route, width, guard, &self.state.topology) else {
            return Ok(self.block(BlockReason::NoSpectrum));
        };
        let epsilon_db = classify_jammed(&route, interval, &self.jammers).unwrap_or(0.0);
        let channel = SpectralChannel::new(interval.start, width, epsilon_db, &self.config.physical)?;

        let neighbours = if self.config.snr_gating {
            self.circuits_sharing(&route)
        } else {
            BTreeSet::new()
        };
        for &l in &route.links {
            self.state.spectra[l.index()].insert(channel)?;
        }
        let admission_snr = if self.config.snr_gating {
            let verdict = self.evaluate(channel, &route, &neighbours);
            if !matches!(verdict, Ok(Verdict::Admit(_))) {
                for &l in &route.links {
                    self.state.spectra[l.index()]
                        .remove(channel.start_slot)
                        .expect("tentative channel present");
                }
            }
            match verdict? {
                Verdict::Admit(snr) => Some(snr),
                Verdict::Reject(reason) => return Ok(self.block(reason)),
            }
        } else {
            None
        };

        let id = CircuitId(self.next_circuit);
        self.next_circuit += 1;
        let util = &mut self.util;
        network::allocate(&route, interval, guard, id, &mut self.state.topology, |l, s| {
            util.occupy(l.index(), s)
        })?;
        self.established += 1;
        if epsilon_db > 0.0 {
            self.jammed_established += 1;
        }
        self.state.circuits.insert(
            id,
            Circuit {
                id,
                route,
                interval,
                bitrate_gbps: request.bitrate_gbps,
                epsilon_db,
                channel,
                admission_snr,
                departure_time: request.arrival_time + request.holding_time,
            },
        );
        Ok(Admission::Established(id))
    }

    fn evaluate(
        &self,
        channel: SpectralChannel,
        route: &Route,
        neighbours: &BTreeSet<CircuitId>,
    ) -> Result<Verdict, EngineError> {
        let snr = self.snr_of(channel, route)?;
        if snr.linear < self.threshold_linear {
            return Ok(Verdict::Reject(BlockReason::CandidateSnr));
        }
        for id in neighbours {
            let c = &self.state.circuits[id];
            if self.snr_of(c.channel, &c.route)?.linear < self.threshold_linear {
                return Ok(Verdict::Reject(BlockReason::NeighborSnr));
            }
        }
        Ok(Verdict::Admit(snr))
    }

    fn block(&mut self, reason: BlockReason) -> Admission {
        match reason {
            BlockReason::NoRoute => self.blocked_by.no_route += 1,
            BlockReason::NoSpectrum => self.blocked_by.no_spectrum += 1,
            BlockReason::CandidateSnr => self.blocked_by.candidate_snr += 1,
            BlockReason::NeighborSnr => self.blocked_by.neighbor_snr += 1,
        }
        Admission::Blocked(reason)
    }

    /// Tears down an established circuit.
    pub fn release(&mut self, id: CircuitId) -> Result<(), EngineError> {
        let c = self
            .state
            .circuits
            .remove(&id)
            .ok_or(NetworkError::UnknownCircuit(id))?;
        for &l in &c.route.links {
            self.state.spectra[l.index()]
                .remove(c.channel.start_slot)
                .ok_or(NetworkError::UnknownCircuit(id))?;
        }
        let util = &mut self.util;
        network::release(
            &c.route,
            c.interval,
            self.config.guard_slots,
            id,
            &mut self.state.topology,
            |l, s| util.vacate(l.index(), s),
        )?;
        self.departed += 1;
        Ok(())
    }

    /// Counts an arrival epoch for the utilization estimator.
    pub fn observe_arrival(&mut self) {
        self.util.snapshot(self.state.circuits.len() as u64);
    }

    /// Checks every grid and that spectral state mirrors the live circuits.
    pub fn validate_state(&self) -> Result<(), EngineError> {
        let guard = self.config.guard_slots;
        for link in self.state.topology.links() {
            link.grid.validate(guard)?;
            let spectrum = &self.state.spectra[link.id.index()];
            let mut on_grid = 0;
            for c in self
                .state
                .circuits
                .values()
                .filter(|c| c.route.links.contains(&link.id))
            {
                if !spectrum.contains(&c.channel) {
                    return Err(
                        NetworkError::Corrupt(format!("{} missing from spectral state", c.id)).into(),
                    );
                }
                on_grid += 1;
            }
            if on_grid != spectrum.channels().len() {
                return Err(NetworkError::Corrupt(format!(
                    "link {} carries {} channels for {} circuits",
                    self.state.topology.link_label(link.id),
                    spectrum.channels().len(),
                    on_grid
                ))
                .into());
            }
        }
        Ok(())
    }

    pub fn finish(self, generated: u64) -> Metrics {
        let blocked = self.blocked_by.total();
        let topology = &self.state.topology;
        let (slot_utilization, network_utilization, mean_active_circuits) = self
            .util
            .finish(|l, s| !topology.link(LinkId(l as u32)).grid.cell(s).is_free());
        Metrics {
            generated,
            blocked,
            established: self.established,
            departed: self.departed,
            active_at_end: self.state.circuits.len() as u64,
            jammed_established: self.jammed_established,
            blocked_by: self.blocked_by,
            blocking_probability: blocked as f64 / generated.max(1) as f64,
            slot_utilization,
            network_utilization,
            mean_active_circuits,
        }
    }
}

enum Verdict {
    Admit(Snr),
    Reject(BlockReason),
}

fn validate(c: &SimConfig) -> Result<(), EngineError> {
    let bad = |msg: String| Err(EngineError::Config(msg));
    c.physical.validate()?;
    if c.request_count == 0 {
        return bad("request_count must be at least 1".into());
    }
    if c.load_erlang <= 0.0 || !c.load_erlang.is_finite() {
        return bad(format!("load_erlang must be positive, got {}", c.load_erlang));
    }
    if c.mean_holding_s <= 0.0 || !c.mean_holding_s.is_finite() {
        return bad(format!(
            "mean_holding_s must be positive, got {}",
            c.mean_holding_s
        ));
    }
    if c.bitrates_gbps.is_empty() {
        return bad("bitrates_gbps is empty".into());
    }
    for &b in &c.bitrates_gbps {
        slots_required(b)?;
    }
    if c.slots_per_link == 0 {
        return bad("slots_per_link must be positive".into());
    }
    if !c.snr_threshold_db.is_finite() {
        return bad(format!(
            "snr_threshold_db must be finite, got {}",
            c.snr_threshold_db
        ));
    }
    for j in &c.jammers {
        if j.first_slot > j.last_slot || j.last_slot >= c.slots_per_link {
            return bad(format!(
                "jammer {}-{} range {}..={} is outside [0, {})",
                j.source, j.target, j.first_slot, j.last_slot, c.slots_per_link
            ));
        }
        if j.epsilon_db < 0.0 || !j.epsilon_db.is_finite() {
            return bad(format!(
                "jammer {}-{} epsilon_db must be >= 0, got {}",
                j.source, j.target, j.epsilon_db
            ));
        }
    }
    Ok(())
}

/// Runs one replication: `config.request_count` arrivals, then every
/// remaining departure.
pub fn run(config: &SimConfig, seed: u64) -> Result<Metrics, EngineError> {
    let mut sim = Simulation::new(config.clone())?;
    let pairs = sim.topology().ordered_pairs();
    let mut traffic = generate_traffic(
        config.load_erlang,
        config.mean_holding_s,
        pairs,
        config.bitrates_gbps.clone(),
        config.request_count,
        seed,
    )?;
    let mut queue = EventQueue::default();
    let mut generated = 0u64;
    if let Some(first) = traffic.next() {
        queue.push(first.arrival_time, EventKind::Arrival(first));
    }
    while let Some(event) = queue.pop() {
        match event {
            EventKind::Departure(id) => sim.release(id)?,
            EventKind::Arrival(request) => {
                generated += 1;
                sim.observe_arrival();
                if let Admission::Established(id) = sim.admit(&request)? {
                    queue.push(
                        request.arrival_time + request.holding_time,
                        EventKind::Departure(id),
                    );
                }
                if let Some(next) = traffic.next() {
                    queue.push(next.arrival_time, EventKind::Arrival(next));
                }
            }
        }
    }
    Ok(sim.finish(generated))
}

/// Runs one replication per seed and aggregates them.
pub fn replicate(config: &SimConfig, seeds: &[u64]) -> Result<(Vec<Metrics>, AggregateMetrics), EngineError> {
    if seeds.is_empty() {
        return Err(EngineError::Config("at least one seed is required".into()));
    }
    let runs = seeds
        .iter()
        .map(|&s| run(config, s))
        .collect::<Result<Vec<_>, _>>()?;
    let agg = aggregate(&runs).expect("non-empty");
    Ok((runs, agg))
}
