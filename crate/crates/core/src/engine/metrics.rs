use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BlockCounts {
    pub no_route: u64,
    pub no_spectrum: u64,
    pub candidate_snr: u64,
    pub neighbor_snr: u64,
}

impl BlockCounts {
    pub fn total(&self) -> u64 {
        self.no_route + self.no_spectrum + self.candidate_snr + self.neighbor_snr
    }
}

/// Outcome of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub generated: u64,
    pub blocked: u64,
    pub established: u64,
    pub departed: u64,
    /// Circuits still up when the run ended.
    pub active_at_end: u64,
    pub jammed_established: u64,
    pub blocked_by: BlockCounts,
    pub blocking_probability: f64,
    /// Per directed link, the fraction of arrivals that found each slot
    /// occupied by a circuit or a guard band.
    pub slot_utilization: Vec<Vec<f64>>,
    /// Mean of `slot_utilization` over links.
    pub network_utilization: Vec<f64>,
    /// Mean number of established circuits seen by an arriving request.
    pub mean_active_circuits: f64,
}

/// Occupancy counters for the utilization estimator.
///
/// Each arrival checks every slot; rather than scanning, each slot records
/// the arrival count at which it became occupied and is credited with the
/// number of arrivals it stayed occupied for.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct UtilizationCounter {
    arrivals: u64,
    occupied_since: Vec<Vec<u64>>,
    counts: Vec<Vec<u64>>,
    active_sum: u64,
}

impl UtilizationCounter {
    pub fn new(links: usize, slots: usize) -> Self {
        Self {
            arrivals: 0,
            occupied_since: vec![vec![0; slots]; links],
            counts: vec![vec![0; slots]; links],
            active_sum: 0,
        }
    }

    /// Records an arrival epoch, seeing `active` established circuits.
    pub fn snapshot(&mut self, active: u64) {
        self.arrivals += 1;
        self.active_sum += active;
    }

    pub fn occupy(&mut self, link: usize, slot: usize) {
        self.occupied_since[link][slot] = self.arrivals;
    }

    pub fn vacate(&mut self, link: usize, slot: usize) {
        self.counts[link][slot] += self.arrivals - self.occupied_since[link][slot];
    }

    /// Closes the counters; `still_occupied(link, slot)` reports the slots
    /// occupied when the run stopped.
    pub fn finish(mut self, still_occupied: impl Fn(usize, usize) -> bool) -> (Vec<Vec<f64>>, Vec<f64>, f64) {
        let arrivals = self.arrivals;
        for (l, counts) in self.counts.iter_mut().enumerate() {
            for (s, c) in counts.iter_mut().enumerate() {
                if still_occupied(l, s) {
                    *c += arrivals - self.occupied_since[l][s];
                }
            }
        }
        let denom = arrivals.max(1) as f64;
        let per_link: Vec<Vec<f64>> = self
            .counts
            .iter()
            .map(|c| c.iter().map(|&n| n as f64 / denom).collect())
            .collect();
        let slots = per_link.first().map_or(0, Vec::len);
        let network = (0..slots)
            .map(|s| per_link.iter().map(|l| l[s]).sum::<f64>() / per_link.len() as f64)
            .collect();
        (per_link, network, self.active_sum as f64 / denom)
    }
}

/// Element-wise mean and sample standard deviation across replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateMetrics {
    pub runs: usize,
    pub generated_mean: f64,
    pub blocked_mean: f64,
    pub blocking_mean: f64,
    pub blocking_std: f64,
    pub mean_active_circuits_mean: f64,
    pub slot_utilization_mean: Vec<Vec<f64>>,
    pub slot_utilization_std: Vec<Vec<f64>>,
    pub network_utilization_mean: Vec<f64>,
    pub network_utilization_std: Vec<f64>,
}

pub(crate) fn mean_std(values: impl ExactSizeIterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Aggregates per-seed metrics. Returns `None` for an empty slice.
pub fn aggregate(runs: &[Metrics]) -> Option<AggregateMetrics> {
    let first = runs.first()?;
    let field = |f: fn(&Metrics) -> f64| mean_std(runs.iter().map(f));
    let (blocking_mean, blocking_std) = field(|m| m.blocking_probability);
    let network: Vec<(f64, f64)> = (0..first.network_utilization.len())
        .map(|s| mean_std(runs.iter().map(|m| m.network_utilization[s])))
        .collect();
    let per_link: Vec<Vec<(f64, f64)>> = (0..first.slot_utilization.len())
        .map(|l| {
            (0..first.slot_utilization[l].len())
                .map(|s| mean_std(runs.iter().map(|m| m.slot_utilization[l][s])))
                .collect()
        })
        .collect();
    Some(AggregateMetrics {
        runs: runs.len(),
        generated_mean: field(|m| m.generated as f64).0,
        blocked_mean: field(|m| m.blocked as f64).0,
        blocking_mean,
        blocking_std,
        mean_active_circuits_mean: field(|m| m.mean_active_circuits).0,
        network_utilization_mean: network.iter().map(|p| p.0).collect(),
        network_utilization_std: network.iter().map(|p| p.1).collect(),
        slot_utilization_mean: per_link.iter().map(|l| l.iter().map(|p| p.0).collect()).collect(),
        slot_utilization_std: per_link.iter().map(|l| l.iter().map(|p| p.1).collect()).collect(),
    })
}
