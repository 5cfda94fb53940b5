use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use hopforge_core::ingest::{GeometryConfig, RandomScriptParams};
use hopforge_core::profile::DEFAULT_TIOU_THRESHOLDS;
use hopforge_core::synth::{SynthesisOptions, SynthesisPlan};
use hopforge_core::validate::DEFAULT_MAX_DEPTH;
use hopforge_core::DetectionConfig;
use serde::Deserialize;

use crate::exit::{Failure, OrExit, INPUT};

/// Every tunable of the pipeline, read from one flat TOML file. Keys that
/// are absent take their defaults, except `master_seed`, which has none.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub master_seed: Option<u64>,

    pub tau_touch: f64,
    pub tau_near: f64,
    pub gap_tolerance: u32,
    pub min_duration: u32,

    pub quota_depth_1: usize,
    pub quota_depth_2: usize,
    pub quota_depth_3: usize,
    pub quota_depth_4: usize,
    pub enforce_minimality: bool,
    pub max_attempts: usize,

    pub max_depth: usize,
    pub tiou_thresholds: Vec<f64>,

    pub video_id: String,
    pub n_instruments: usize,
    pub n_anatomy: usize,
    pub n_events: usize,
    pub frame_count: u32,
    pub min_event_len: u32,
    pub max_event_len: u32,
    pub min_pair_gap: u32,
    pub box_min: f64,
    pub box_max: f64,

    /// Tubelet file ingested by `run` instead of a generated scene.
    pub tubelets: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        let det = DetectionConfig::default();
        let scene = RandomScriptParams::new(3, 3, 8, 500);
        let geom = GeometryConfig::default();
        let synth = SynthesisOptions::default();
        Self {
            master_seed: None,
            tau_touch: det.tau_touch,
            tau_near: det.tau_near,
            gap_tolerance: det.gap_tolerance,
            min_duration: det.min_duration,
            quota_depth_1: 50,
            quota_depth_2: 50,
            quota_depth_3: 50,
            quota_depth_4: 0,
            enforce_minimality: synth.enforce_minimality,
            max_attempts: synth.max_attempts,
            max_depth: DEFAULT_MAX_DEPTH,
            tiou_thresholds: DEFAULT_TIOU_THRESHOLDS.to_vec(),
            video_id: scene.video_id,
            n_instruments: scene.n_instruments,
            n_anatomy: scene.n_anatomy,
            n_events: scene.n_events,
            frame_count: scene.frame_count,
            min_event_len: scene.min_event_len,
            max_event_len: scene.max_event_len,
            min_pair_gap: scene.min_pair_gap,
            box_min: geom.box_min,
            box_max: geom.box_max,
            tubelets: None,
        }
    }
}

impl Config {
    /// Reads and checks a config file; no file means all defaults.
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let config: Config = match path {
            None => Config::default(),
            Some(p) => {
                let text = fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))
                    .or_exit(INPUT)?;
                toml::from_str(&text)
                    .with_context(|| format!("parsing config {}", p.display()))
                    .or_exit(INPUT)?
            }
        };
        config.check()?;
        Ok(config)
    }

    fn check(&self) -> Result<(), Failure> {
        let unit = |key: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Failure::input(format!(
                    "config key {key} = {v} is not in (0, 1)"
                )))
            }
        };
        unit("tau_touch", self.tau_touch)?;
        unit("tau_near", self.tau_near)?;
        if self.tiou_thresholds.is_empty() {
            return Err(Failure::input("config key tiou_thresholds is empty"));
        }
        for &t in &self.tiou_thresholds {
            unit("tiou_thresholds", t)?;
        }
        if let Some(p) = &self.tubelets {
            if !p.is_file() {
                return Err(Failure::input(format!(
                    "config key tubelets: {} is not a readable file",
                    p.display()
                )));
            }
        }
        Ok(())
    }

    /// The effective master seed: the command-line override, else the file.
    pub fn master_seed(&self, overridden: Option<u64>) -> Result<u64, Failure> {
        overridden.or(self.master_seed).ok_or_else(|| {
            Failure::input("missing required config key master_seed (or pass --seed)")
        })
    }

    pub fn detection(&self) -> DetectionConfig {
        DetectionConfig {
            tau_touch: self.tau_touch,
            tau_near: self.tau_near,
            gap_tolerance: self.gap_tolerance,
            min_duration: self.min_duration,
        }
    }

    pub fn plan(&self) -> SynthesisPlan {
        SynthesisPlan::new([
            (1, self.quota_depth_1),
            (2, self.quota_depth_2),
            (3, self.quota_depth_3),
            (4, self.quota_depth_4),
        ])
    }

    pub fn synthesis(&self, master_seed: u64) -> SynthesisOptions {
        SynthesisOptions {
            master_seed,
            enforce_minimality: self.enforce_minimality,
            max_attempts: self.max_attempts,
        }
    }

    pub fn scene(&self) -> RandomScriptParams {
        RandomScriptParams {
            video_id: self.video_id.clone(),
            n_instruments: self.n_instruments,
            n_anatomy: self.n_anatomy,
            n_events: self.n_events,
            frame_count: self.frame_count,
            min_event_len: self.min_event_len,
            max_event_len: self.max_event_len,
            min_pair_gap: self.min_pair_gap,
        }
    }

    pub fn geometry(&self) -> GeometryConfig {
        GeometryConfig {
            box_min: self.box_min,
            box_max: self.box_max,
            tau_touch: self.tau_touch,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let c: Config = toml::from_str("master_seed = 9\nquota_depth_4 = 3\n").unwrap();
        assert_eq!(c.master_seed, Some(9));
        assert_eq!(c.quota_depth_4, 3);
        assert_eq!(c.tau_touch, 0.1);
        assert_eq!(c.plan().total(), 153);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let err = toml::from_str::<Config>("master_seed = 1\nquota_depth_9 = 3\n").unwrap_err();
        assert!(err.to_string().contains("quota_depth_9"));
    }

    #[test]
    fn seed_override_and_absence() {
        let c = Config::default();
        assert_eq!(c.master_seed(Some(4)).unwrap(), 4);
        let err = c.master_seed(None).unwrap_err();
        assert_eq!(err.code, INPUT);
        assert!(err.error.to_string().contains("master_seed"));
    }

    #[test]
    fn thresholds_must_be_open_unit() {
        let c = Config {
            tau_near: 1.0,
            ..Config::default()
        };
        assert!(c
            .check()
            .unwrap_err()
            .error
            .to_string()
            .contains("tau_near"));
        let c = Config {
            tiou_thresholds: vec![0.5, 0.0],
            ..Config::default()
        };
        assert!(c.check().is_err());
    }
}
