//! Experiment configuration: one JSON document per run.

use std::path::PathBuf;

use clap::ValueEnum;
use hyperentropy::bowen::{MetricKind, Method};
use hyperentropy::chaos::Thresholds;
use hyperentropy::dynamics::{presets, Family, MapSpec};
use hyperentropy::entropy::GrowthParams;
use hyperentropy::geometry::{Factor, SpaceSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Entropy,
    Compare,
    Witness41,
    Product,
    Power,
    Conjugacy,
    Chaos,
    Oracle,
}

impl Experiment {
    fn uses_growth_tables(self) -> bool {
        matches!(
            self,
            Experiment::Entropy
                | Experiment::Compare
                | Experiment::Product
                | Experiment::Power
                | Experiment::Conjugacy
        )
    }
}

/// A preset name or an explicit family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilyRef {
    Preset(String),
    Spec(FamilySpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub name: String,
    pub space: Vec<Factor>,
    pub maps: Vec<MapSpec>,
}

impl FamilyRef {
    pub fn resolve(&self) -> Result<Family, CliError> {
        match self {
            FamilyRef::Preset(name) => presets::preset(name).ok_or_else(|| {
                let known: Vec<&str> = presets::PRESETS.iter().map(|(n, _)| *n).collect();
                CliError::Config(format!("unknown preset {name:?} (known: {})", known.join(", ")))
            }),
            FamilyRef::Spec(spec) => {
                let space = SpaceSpec::new(spec.space.clone())?;
                Ok(Family::new(spec.name.clone(), space, spec.maps.clone())?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConjugacySpec {
    pub forward: MapSpec,
    pub inverse: MapSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub family: FamilyRef,
    /// Optional check: must equal the family's space when given.
    pub space: Option<Vec<Factor>>,
    /// Right-hand factor of the `product` experiment.
    pub second_family: Option<FamilyRef>,
    pub n_min: usize,
    pub n_max: usize,
    pub epsilons: Vec<f64>,
    pub grid_resolution: f64,
    pub kind: MetricKind,
    pub method: Method,
    /// Orbit-set coalescing radius used by `witness41`.
    pub coalesce_delta: f64,
    pub tolerance: f64,
    pub power: usize,
    pub conjugacy: ConjugacySpec,
    /// Target interval whose preimages carry the `witness41` points.
    pub target: [f64; 2],
    pub thresholds: Thresholds,
    pub pairs: usize,
    pub series_length: usize,
    pub t_grid: Vec<f64>,
    pub tau_grid: Vec<f64>,
    pub oracle_instances: usize,
    pub oracle_candidates: usize,
    pub output: PathBuf,
    /// Worker threads; 0 uses one per core.
    pub workers: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: Experiment::Entropy,
            family: FamilyRef::Preset("example41".into()),
            space: None,
            second_family: None,
            n_min: 1,
            n_max: 8,
            epsilons: vec![0.1, 0.05],
            grid_resolution: 0.0125,
            kind: MetricKind::HausdorffBowen,
            method: Method::Greedy,
            coalesce_delta: 0.0,
            tolerance: 0.05,
            power: 2,
            conjugacy: ConjugacySpec {
                forward: MapSpec::flip(),
                inverse: MapSpec::flip(),
            },
            target: [1.0 / 3.0, 2.0 / 3.0],
            thresholds: Thresholds::default(),
            pairs: 50,
            series_length: 1000,
            t_grid: (1..=20).map(|k| k as f64 * 0.025).collect(),
            tau_grid: vec![0.01, 0.02, 0.05],
            oracle_instances: 20,
            oracle_candidates: 10,
            output: PathBuf::from("out"),
            workers: 0,
            seed: 0,
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn growth_params(&self, kind: MetricKind) -> GrowthParams {
        GrowthParams {
            n_min: self.n_min,
            n_max: self.n_max,
            epsilons: self.epsilons.clone(),
            kind,
            method: self.method,
            grid_resolution: self.grid_resolution,
        }
    }

    /// Checks everything that can be checked before any computation starts.
    pub fn validate(&self) -> Result<(), CliError> {
        let family = self.family.resolve()?;
        if let Some(space) = &self.space {
            if space.as_slice() != family.space().factors() {
                return Err(invalid(format!(
                    "space {space:?} does not match the space of family {}",
                    family.name()
                )));
            }
        }
        if self.n_min > self.n_max {
            return Err(invalid("n_min exceeds n_max"));
        }
        if self.epsilons.is_empty() || self.epsilons.iter().any(|e| !(*e > 0.0)) {
            return Err(invalid("epsilons must be a nonempty list of positive numbers"));
        }
        if !(self.grid_resolution > 0.0 && self.grid_resolution <= 1.0) {
            return Err(invalid("grid_resolution must lie in (0, 1]"));
        }
        if !(self.coalesce_delta >= 0.0) || !(self.tolerance >= 0.0) {
            return Err(invalid("coalesce_delta and tolerance must be nonnegative"));
        }
        self.thresholds.validate()?;
        if self.experiment.uses_growth_tables() {
            let smallest = self.epsilons.iter().cloned().fold(f64::INFINITY, f64::min);
            if self.grid_resolution > smallest / 4.0 + 1e-15 {
                return Err(invalid(format!(
                    "grid_resolution {} exceeds min(epsilons)/4 = {}",
                    self.grid_resolution,
                    smallest / 4.0
                )));
            }
            if self.n_max - self.n_min + 1 < 4 {
                return Err(invalid("entropy fits need at least 4 n-values"));
            }
        }
        match self.experiment {
            Experiment::Product => {
                self.second_family
                    .as_ref()
                    .ok_or_else(|| invalid("product needs second_family"))?
                    .resolve()?;
            }
            Experiment::Power if self.power == 0 => return Err(invalid("power must be at least 1")),
            Experiment::Witness41 => {
                let [a, b] = self.target;
                if !(0.0 <= a && a < b && b <= 1.0) {
                    return Err(invalid("target must satisfy 0 <= a < b <= 1"));
                }
                if self.n_max == 0 {
                    return Err(invalid("witness41 needs n_max >= 1"));
                }
            }
            Experiment::Chaos => {
                if self.series_length < hyperentropy::chaos::MIN_SERIES_LEN {
                    return Err(invalid(format!(
                        "series_length must be at least {}",
                        hyperentropy::chaos::MIN_SERIES_LEN
                    )));
                }
                if self.pairs == 0 || self.t_grid.is_empty() {
                    return Err(invalid("chaos needs pairs >= 1 and a nonempty t_grid"));
                }
                let increasing = self.t_grid.windows(2).all(|w| w[0] < w[1]);
                if !increasing || self.t_grid[0] <= 0.0 {
                    return Err(invalid("t_grid must be positive and strictly increasing"));
                }
            }
            Experiment::Oracle => {
                let c = self.oracle_candidates;
                if !(2..=hyperentropy::bowen::EXACT_CANDIDATE_LIMIT).contains(&c) {
                    return Err(invalid(format!(
                        "oracle_candidates must be between 2 and {}",
                        hyperentropy::bowen::EXACT_CANDIDATE_LIMIT
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = ExperimentConfig::default();
        let text = serde_json::to_string(&c).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(c, back);
        c.validate().unwrap();
    }

    #[test]
    fn partial_config_fills_defaults() {
        let c: ExperimentConfig =
            serde_json::from_str(r#"{"experiment": "witness41", "n_max": 3}"#).unwrap();
        assert_eq!(c.experiment, Experiment::Witness41);
        assert_eq!(c.epsilons, vec![0.1, 0.05]);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"n_maks": 3}"#).is_err());
    }

    #[test]
    fn explicit_family() {
        let c: ExperimentConfig = serde_json::from_str(
            r#"{"family": {"name": "half", "space": ["interval"],
                "maps": [{"type": "pwl", "x": [0, 1], "y": [0, 0.5]}]}}"#,
        )
        .unwrap();
        let f = c.family.resolve().unwrap();
        assert_eq!(f.name(), "half");
        assert_eq!(f.len(), 1);
    }

    #[test]
    fn every_preset_validates() {
        for (name, _) in presets::PRESETS {
            let mut c = ExperimentConfig {
                family: FamilyRef::Preset(name.to_string()),
                ..Default::default()
            };
            c.validate().unwrap();
            c.experiment = Experiment::Chaos;
            c.validate().unwrap();
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let base = ExperimentConfig::default();
        let bad = [
            ExperimentConfig { grid_resolution: 0.05, ..base.clone() },
            ExperimentConfig { n_min: 5, n_max: 6, ..base.clone() },
            ExperimentConfig { family: FamilyRef::Preset("nope".into()), ..base.clone() },
            ExperimentConfig { space: Some(vec![Factor::Circle]), ..base.clone() },
            ExperimentConfig { experiment: Experiment::Product, ..base.clone() },
            ExperimentConfig { experiment: Experiment::Chaos, series_length: 10, ..base.clone() },
            ExperimentConfig { experiment: Experiment::Oracle, oracle_candidates: 40, ..base.clone() },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(CliError::Config(_)) | Err(CliError::Library(_))));
        }
    }
}
