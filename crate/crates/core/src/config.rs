//! Scenario files.
//!
//! A scenario is a TOML document with flat keys plus repeated `[[link]]` and
//! `[[jammer]]` tables, and optional `[epsilon_sweep]` and `[physical]`
//! tables. Unknown keys are rejected. See the repository README for the full
//! grammar and defaults.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{JammerSpec, SimConfig};
use crate::network::{self, LinkSpec};
use crate::qot::PhysicalParams;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("syntax error: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("invalid value for `{key}` ({value}): {reason}")]
    Invalid {
        key: String,
        value: String,
        reason: String,
    },
}

fn invalid(key: impl Into<String>, value: impl ToString, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonSweep {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for EpsilonSweep {
    fn default() -> Self {
        Self {
            start: 0.0,
            stop: 5.0,
            step: 0.5,
        }
    }
}

impl EpsilonSweep {
    /// Sweep values `start + i·step` up to and including `stop`.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JammerConfig {
    pub source: String,
    pub target: String,
    pub first_slot: u32,
    pub last_slot: u32,
    #[serde(default)]
    pub epsilon_db: f64,
    /// Attack both directions of the link.
    #[serde(default = "yes")]
    pub bidirectional: bool,
}

/// Topology file contents: optional isolated nodes plus `[[link]]` records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyFile {
    #[serde(default)]
    pub nodes: Vec<String>,
    #[serde(rename = "link")]
    pub links: Vec<LinkSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    /// Path of a topology file, relative to the scenario file. Mutually
    /// exclusive with inline links; resolved by [`load_config`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nodes: Vec<String>,
    pub load_erlang: f64,
    #[serde(default = "default_request_count")]
    pub request_count: u64,
    #[serde(default = "default_holding")]
    pub mean_holding_s: f64,
    #[serde(default = "default_bitrates")]
    pub bitrates_gbps: Vec<u32>,
    #[serde(default = "default_guard")]
    pub guard_slots: u32,
    #[serde(default = "default_slots")]
    pub slots_per_link: u32,
    #[serde(default = "default_threshold")]
    pub snr_threshold_db: f64,
    #[serde(default = "yes")]
    pub snr_gating: bool,
    #[serde(default = "default_modulation")]
    pub modulation: String,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub epsilon_sweep: EpsilonSweep,
    #[serde(default)]
    pub physical: PhysicalParams,
    #[serde(default, rename = "link", skip_serializing_if = "Vec::is_empty")]
    pub links: Vec<LinkSpec>,
    #[serde(default, rename = "jammer")]
    pub jammers: Vec<JammerConfig>,
}

fn yes() -> bool {
    true
}
fn default_request_count() -> u64 {
    100_000
}
fn default_holding() -> f64 {
    600.0
}
fn default_bitrates() -> Vec<u32> {
    network::SUPPORTED_BITRATES.to_vec()
}
fn default_guard() -> u32 {
    network::DEFAULT_GUARD_SLOTS
}
fn default_slots() -> u32 {
    network::DEFAULT_SLOTS
}
fn default_threshold() -> f64 {
    15.0
}
fn default_modulation() -> String {
    "16QAM".into()
}
fn default_seeds() -> Vec<u64> {
    vec![1]
}

/// Parses and validates scenario text. A `topology_file` reference is kept
/// as is; use [`load_config`] to resolve it.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let cfg: ScenarioConfig = toml::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Reads a scenario file and inlines its topology file, if any.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = read(path)?;
    let mut cfg = parse_config(&text)?;
    if let Some(rel) = cfg.topology_file.take() {
        let topo_path = path.parent().unwrap_or(Path::new(".")).join(&rel);
        let topo: TopologyFile = toml::from_str(&read(&topo_path)?)?;
        cfg.links = topo.links;
        cfg.nodes = topo.nodes;
        cfg.validate()?;
    }
    Ok(cfg)
}

fn read(path: &Path) -> Result<String, ConfigError> {
    fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(key, v, "must be a positive number"))
            }
        };
        positive("load_erlang", self.load_erlang)?;
        positive("mean_holding_s", self.mean_holding_s)?;
        if self.request_count == 0 {
            return Err(invalid("request_count", 0, "must be at least 1"));
        }
        if self.bitrates_gbps.is_empty() {
            return Err(invalid("bitrates_gbps", "[]", "must list at least one bit rate"));
        }
        for &b in &self.bitrates_gbps {
            network::slots_required(b).map_err(|e| invalid("bitrates_gbps", b, e.to_string()))?;
        }
        if self.slots_per_link == 0 {
            return Err(invalid("slots_per_link", 0, "must be positive"));
        }
        if !self.snr_threshold_db.is_finite() {
            return Err(invalid(
                "snr_threshold_db",
                self.snr_threshold_db,
                "must be finite",
            ));
        }
        if self.seeds.is_empty() {
            return Err(invalid("seeds", "[]", "must list at least one seed"));
        }
        let sweep = &self.epsilon_sweep;
        positive("epsilon_sweep.step", sweep.step)?;
        if sweep.start < 0.0 || !sweep.start.is_finite() {
            return Err(invalid("epsilon_sweep.start", sweep.start, "must be >= 0"));
        }
        if sweep.stop < sweep.start || !sweep.stop.is_finite() {
            return Err(invalid(
                "epsilon_sweep.stop",
                sweep.stop,
                "must be >= epsilon_sweep.start",
            ));
        }
        self.physical
            .validate()
            .map_err(|e| invalid("physical", "table", e.to_string()))?;
        match (&self.topology_file, self.links.is_empty()) {
            (Some(f), false) => {
                return Err(invalid(
                    "topology_file",
                    f.display(),
                    "cannot be combined with inline [[link]] records",
                ))
            }
            (None, true) => {
                return Err(invalid(
                    "link",
                    "[]",
                    "no topology: add [[link]] records or topology_file",
                ))
            }
            _ => {}
        }
        for (i, l) in self.links.iter().enumerate() {
            if l.length_km <= 0.0 || !l.length_km.is_finite() {
                return Err(invalid(
                    format!("link[{i}].length_km"),
                    l.length_km,
                    "must be positive",
                ));
            }
            if l.source == l.target {
                return Err(invalid(format!("link[{i}].target"), &l.target, "equals source"));
            }
        }
        for (i, j) in self.jammers.iter().enumerate() {
            if j.first_slot > j.last_slot {
                return Err(invalid(
                    format!("jammer[{i}].last_slot"),
                    j.last_slot,
                    format!("is below first_slot {}", j.first_slot),
                ));
            }
            if j.last_slot >= self.slots_per_link {
                return Err(invalid(
                    format!("jammer[{i}].last_slot"),
                    j.last_slot,
                    format!("outside the {}-slot grid", self.slots_per_link),
                ));
            }
            if j.epsilon_db < 0.0 || !j.epsilon_db.is_finite() {
                return Err(invalid(
                    format!("jammer[{i}].epsilon_db"),
                    j.epsilon_db,
                    "must be >= 0",
                ));
            }
            if self.topology_file.is_none() {
                let known = |n: &str| {
                    self.nodes.iter().any(|x| x == n)
                        || self.links.iter().any(|l| l.source == n || l.target == n)
                };
                let linked = self.links.iter().any(|l| {
                    (l.source == j.source && l.target == j.target)
                        || (l.source == j.target && l.target == j.source)
                });
                if !known(&j.source) || !known(&j.target) || !linked {
                    return Err(invalid(
                        format!("jammer[{i}]"),
                        format!("{}-{}", j.source, j.target),
                        "no such link in the topology",
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn epsilon_points(&self) -> Vec<f64> {
        self.epsilon_sweep.points()
    }

    /// Engine configuration with every jammer's power set to `epsilon_db`
    /// (or left as configured when `None`).
    pub fn sim_config(&self, epsilon_db: Option<f64>) -> SimConfig {
        let mut jammers = Vec::new();
        for j in &self.jammers {
            let eps = epsilon_db.unwrap_or(j.epsilon_db);
            let mut push = |source: &str, target: &str| {
                jammers.push(JammerSpec {
                    source: source.into(),
                    target: target.into(),
                    first_slot: j.first_slot,
                    last_slot: j.last_slot,
                    epsilon_db: eps,
                })
            };
            push(&j.source, &j.target);
            if j.bidirectional {
                push(&j.target, &j.source);
            }
        }
        SimConfig {
            links: self.links.clone(),
            extra_nodes: self.nodes.clone(),
            physical: self.physical,
            load_erlang: self.load_erlang,
            mean_holding_s: self.mean_holding_s,
            request_count: self.request_count,
            bitrates_gbps: self.bitrates_gbps.clone(),
            guard_slots: self.guard_slots,
            slots_per_link: self.slots_per_link,
            snr_threshold_db: self.snr_threshold_db,
            snr_gating: self.snr_gating,
            jammers,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes to TOML")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
load_erlang = 120

[[link]]
source = "A"
target = "B"
length_km = 100
"#;

    #[test]
    fn minimal_scenario_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.request_count, 100_000);
        assert_eq!(c.mean_holding_s, 600.0);
        assert_eq!(c.bitrates_gbps, vec![50, 100, 200]);
        assert_eq!(c.guard_slots, 2);
        assert_eq!(c.slots_per_link, 320);
        assert_eq!(c.snr_threshold_db, 15.0);
        assert_eq!(c.modulation, "16QAM");
        assert!(c.snr_gating);
        assert_eq!(c.seeds, vec![1]);
        assert_eq!(c.physical, PhysicalParams::default());
        assert_eq!(c.epsilon_points().len(), 11);
        assert!(c.jammers.is_empty());
    }

    #[test]
    fn negative_step_names_the_key() {
        let text = format!("{MINIMAL}\n[epsilon_sweep]\nstart = 0\nstop = 5\nstep = -0.5\n");
        let err = parse_config(&text).unwrap_err();
        match err {
            ConfigError::Invalid { key, value, .. } => {
                assert_eq!(key, "epsilon_sweep.step");
                assert_eq!(value, "-0.5");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config(&format!("load_erlnag = 3\n{MINIMAL}")).unwrap_err();
        assert!(err.to_string().contains("load_erlnag"), "{err}");
        let err = parse_config(&format!("{MINIMAL}\n[physical]\nbeta = 3\n")).unwrap_err();
        assert!(err.to_string().contains("beta"), "{err}");
    }

    #[test]
    fn three_jammer_scenario() {
        let mut text = MINIMAL.to_string();
        for (a, b) in [(50, 59), (140, 149), (230, 239)] {
            text += &format!(
                "\n[[jammer]]\nsource = \"A\"\ntarget = \"B\"\nfirst_slot = {a}\nlast_slot = {b}\nepsilon_db = 2.0\n"
            );
        }
        let c = parse_config(&text).unwrap();
        let ranges: Vec<(u32, u32)> = c.jammers.iter().map(|j| (j.first_slot, j.last_slot)).collect();
        assert_eq!(ranges, vec![(50, 59), (140, 149), (230, 239)]);
        let sim = c.sim_config(Some(3.0));
        assert_eq!(sim.jammers.len(), 6);
        assert!(sim.jammers.iter().all(|j| j.epsilon_db == 3.0));
        assert_eq!(c.sim_config(None).jammers[0].epsilon_db, 2.0);
    }

    #[test]
    fn jammer_must_sit_on_a_link() {
        let text =
            format!("{MINIMAL}\n[[jammer]]\nsource = \"A\"\ntarget = \"C\"\nfirst_slot = 1\nlast_slot = 2\n");
        assert!(matches!(parse_config(&text), Err(ConfigError::Invalid { .. })));
        let text = format!(
            "{MINIMAL}\n[[jammer]]\nsource = \"A\"\ntarget = \"B\"\nfirst_slot = 310\nlast_slot = 320\n"
        );
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("jammer[0].last_slot"), "{err}");
    }

    #[test]
    fn sweep_points() {
        let s = EpsilonSweep {
            start: 0.0,
            stop: 0.0,
            step: 0.5,
        };
        assert_eq!(s.points(), vec![0.0]);
        let s = EpsilonSweep {
            start: 1.0,
            stop: 2.0,
            step: 0.1,
        };
        assert_eq!(s.points().len(), 11);
        assert_eq!(*s.points().last().unwrap(), 2.0);
    }

    #[test]
    fn toml_roundtrip() {
        let mut c = parse_config(MINIMAL).unwrap();
        c.seeds = vec![3, 1, 4];
        c.jammers.push(JammerConfig {
            source: "B".into(),
            target: "A".into(),
            first_slot: 140,
            last_slot: 149,
            epsilon_db: 1.75,
            bidirectional: false,
        });
        assert_eq!(parse_config(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn topology_file_is_inlined() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join("topo.toml"),
            "[[link]]\nsource = \"X\"\ntarget = \"Y\"\nlength_km = 300\n",
        )
        .unwrap();
        let scenario = dir.path().join("s.toml");
        fs::write(&scenario, "load_erlang = 10\ntopology_file = \"topo.toml\"\n").unwrap();
        let c = load_config(&scenario).unwrap();
        assert_eq!(c.topology_file, None);
        assert_eq!(c.links.len(), 1);
        assert_eq!(c.links[0].length_km, 300.0);
        assert!(matches!(
            load_config(&dir.path().join("missing.toml")),
            Err(ConfigError::Io { .. })
        ));
    }
}
