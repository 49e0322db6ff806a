use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::network::NodeId;

use super::EngineError;

#[derive(Debug, Clone, PartialEq)]
pub struct Request {
    pub id: u64,
    pub source: NodeId,
    pub destination: NodeId,
    pub bitrate_gbps: u32,
    pub arrival_time: f64,
    pub holding_time: f64,
}

/// Poisson arrivals with exponential holding times, uniform over the given
/// node pairs and bit rates. The stream is a pure function of the seed.
#[derive(Debug, Clone)]
pub struct TrafficGenerator {
    rng: ChaCha8Rng,
    interarrival: Exp<f64>,
    holding: Exp<f64>,
    pairs: Vec<(NodeId, NodeId)>,
    bitrates: Vec<u32>,
    rate: f64,
    clock: f64,
    next_id: u64,
}

impl TrafficGenerator {
    pub fn new(
        load_erlang: f64,
        mean_holding_s: f64,
        pairs: Vec<(NodeId, NodeId)>,
        bitrates: Vec<u32>,
        seed: u64,
    ) -> Result<Self, EngineError> {
        if load_erlang <= 0.0 || !load_erlang.is_finite() {
            return Err(EngineError::Config(format!(
                "load_erlang must be positive, got {load_erlang}"
            )));
        }
        if mean_holding_s <= 0.0 || !mean_holding_s.is_finite() {
            return Err(EngineError::Config(format!(
                "mean_holding_s must be positive, got {mean_holding_s}"
            )));
        }
        if pairs.is_empty() {
            return Err(EngineError::Config("no node pairs to draw requests from".into()));
        }
        if bitrates.is_empty() {
            return Err(EngineError::Config("bitrate list is empty".into()));
        }
        let rate = load_erlang / mean_holding_s;
        Ok(Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            interarrival: Exp::new(rate).expect("positive rate"),
            holding: Exp::new(1.0 / mean_holding_s).expect("positive rate"),
            pairs,
            bitrates,
            rate,
            clock: 0.0,
            next_id: 0,
        })
    }

    /// Arrivals per second, `load / mean holding time`.
    pub fn arrival_rate(&self) -> f64 {
        self.rate
    }
}

impl Iterator for TrafficGenerator {
    type Item = Request;

    fn next(&mut self) -> Option<Request> {
        self.clock += self.interarrival.sample(&mut self.rng);
        let mut holding_time = self.holding.sample(&mut self.rng);
        while holding_time <= 0.0 {
            holding_time = self.holding.sample(&mut self.rng);
        }
        let (source, destination) = self.pairs[self.rng.gen_range(0..self.pairs.len())];
        let bitrate_gbps = self.bitrates[self.rng.gen_range(0..self.bitrates.len())];
        let id = self.next_id;
        self.next_id += 1;
        Some(Request {
            id,
            source,
            destination,
            bitrate_gbps,
            arrival_time: self.clock,
            holding_time,
        })
    }
}

/// The first `count` requests of the stream for `seed`.
pub fn generate_traffic(
    load_erlang: f64,
    mean_holding_s: f64,
    pairs: Vec<(NodeId, NodeId)>,
    bitrates: Vec<u32>,
    count: u64,
    seed: u64,
) -> Result<impl Iterator<Item = Request>, EngineError> {
    if count == 0 {
        return Err(EngineError::Config("request_count must be at least 1".into()));
    }
    Ok(TrafficGenerator::new(load_erlang, mean_holding_s, pairs, bitrates, seed)?.take(count as usize))
}
