//! Jamming-power sweeps with seed replication.
//!
//! Every (ε, seed) pair is an independent engine run. With the `parallel`
//! feature the runs are spread over the rayon pool; without it they run
//! one after another. Results are always ordered by (ε, seed).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ScenarioConfig;
use crate::engine::{self, aggregate, AggregateMetrics, EngineError, Metrics};

#[derive(Debug, Error)]
#[error("run at epsilon = {epsilon_db} dB, seed {seed} failed: {source}")]
pub struct SweepError {
    pub epsilon_db: f64,
    pub seed: u64,
    #[source]
    pub source: EngineError,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub epsilon_db: f64,
    pub seed: u64,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub epsilon_db: f64,
    pub runs: Vec<RunRecord>,
    pub aggregate: AggregateMetrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub config: ScenarioConfig,
    pub link_labels: Vec<String>,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn run_count(&self) -> usize {
        self.points.iter().map(|p| p.runs.len()).sum()
    }

    pub fn point(&self, epsilon_db: f64) -> Option<&SweepPoint> {
        self.points
            .iter()
            .find(|p| (p.epsilon_db - epsilon_db).abs() < 1e-9)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses the current rayon pool. Falls back to sequential execution when
    /// the crate is built without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

pub fn run_sweep(config: &ScenarioConfig) -> Result<SweepResult, SweepError> {
    run_sweep_with(config, Execution::default())
}

pub fn run_sweep_with(config: &ScenarioConfig, execution: Execution) -> Result<SweepResult, SweepError> {
    let epsilons = config.epsilon_points();
    let jobs: Vec<(f64, u64)> = epsilons
        .iter()
        .flat_map(|&e| config.seeds.iter().map(move |&s| (e, s)))
        .collect();
    let job = |&(epsilon_db, seed): &(f64, u64)| {
        engine::run(&config.sim_config(Some(epsilon_db)), seed)
            .map(|metrics| RunRecord {
                epsilon_db,
                seed,
                metrics,
            })
            .map_err(|source| SweepError {
                epsilon_db,
                seed,
                source,
            })
    };
    let outcomes = execute(&jobs, job, execution);
    let mut records = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        records.push(o?);
    }

    let link_labels = engine::Simulation::new(config.sim_config(None))
        .map(|s| {
            s.topology()
                .links()
                .iter()
                .map(|l| s.topology().link_label(l.id))
                .collect()
        })
        .map_err(|source| SweepError {
            epsilon_db: f64::NAN,
            seed: 0,
            source,
        })?;

    let mut points = Vec::with_capacity(epsilons.len());
    let mut iter = records.into_iter();
    for &epsilon_db in &epsilons {
        let runs: Vec<RunRecord> = iter.by_ref().take(config.seeds.len()).collect();
        let metrics: Vec<Metrics> = runs.iter().map(|r| r.metrics.clone()).collect();
        points.push(SweepPoint {
            epsilon_db,
            aggregate: aggregate(&metrics).expect("seeds are non-empty"),
            runs,
        });
    }
    Ok(SweepResult {
        config: config.clone(),
        link_labels,
        points,
    })
}

#[cfg(feature = "parallel")]
fn execute<J, T, F>(jobs: &[J], f: F, execution: Execution) -> Vec<T>
where
    J: Sync,
    T: Send,
    F: Fn(&J) -> T + Sync + Send,
{
    use rayon::prelude::*;
    match execution {
        Execution::Parallel => jobs.par_iter().map(f).collect(),
        Execution::Sequential => jobs.iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn execute<J, T, F>(jobs: &[J], f: F, _execution: Execution) -> Vec<T>
where
    F: Fn(&J) -> T,
{
    jobs.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn small() -> ScenarioConfig {
        parse_config(
            r#"
load_erlang = 60
request_count = 1500
seeds = [1, 2]

[epsilon_sweep]
start = 0
stop = 2
step = 1

[[link]]
source = "A"
target = "B"
length_km = 100

[[jammer]]
source = "A"
target = "B"
first_slot = 40
last_slot = 49
"#,
        )
        .unwrap()
    }

    #[test]
    fn one_record_per_epsilon_and_seed() {
        let r = run_sweep(&small()).unwrap();
        assert_eq!(r.points.len(), 3);
        assert_eq!(r.run_count(), 6);
        for p in &r.points {
            assert_eq!(p.runs.iter().map(|x| x.seed).collect::<Vec<_>>(), vec![1, 2]);
            assert!(p.runs.iter().all(|x| x.epsilon_db == p.epsilon_db));
            assert_eq!(p.aggregate.runs, 2);
        }
        assert_eq!(r.link_labels, vec!["A-B", "B-A"]);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let cfg = small();
        let a = run_sweep_with(&cfg, Execution::Sequential).unwrap();
        let b = run_sweep_with(&cfg, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_sweep_has_one_point() {
        let mut cfg = small();
        cfg.epsilon_sweep.stop = 0.0;
        assert_eq!(run_sweep(&cfg).unwrap().points.len(), 1);
    }
}
