//! TOML settings and scenario files.
//!
//! A settings file holds any of the shared command-line options:
//!
//! ```toml
//! model = "margin"
//! alpha = 0.5
//! k = 0.2
//! seed = 7
//! ```
//!
//! A scenario file describes a simulation. Its optional `[engine]` table uses
//! the same keys as a settings file.
//!
//! ```toml
//! model = "win_loss"            # generator of the outcomes
//! horizon = 500
//! pairing = "uniform_random_pairs"   # or "round_robin", "full_field_ranking"
//! # m = 3                       # players per game for full_field_ranking
//!
//! [engine]
//! k = 0.1
//!
//! [[players]]
//! id = "A"
//! skill = { constant = 0.5 }
//!
//! [[players]]
//! id = "B"
//! skill = { step_change = { before = 0.0, after = 1.0, change_time = 250 } }
//!
//! [[players]]
//! id = "C"
//! skill = { piecewise_linear = [[1, 0.0], [500, -1.0]] }
//! ```

use serde::Deserialize;

use crate::engine::{EngineConfig, EngineModel};
use crate::error::{Error, Result};
use crate::models::OutcomeModel;
use crate::sim::{Pairing, SkillPath, SkillScenario};
use crate::types::{ModelParams, PlayerId};

/// Shared options; later layers override earlier ones key by key.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub model: Option<String>,
    pub alpha: Option<f64>,
    pub delta: Option<f64>,
    pub k: Option<f64>,
    pub r_init: Option<f64>,
    pub seed: Option<u64>,
    pub cases: Option<usize>,
    pub replications: Option<usize>,
}

impl Settings {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::validation(format!("settings file: {e}")))
    }

    /// `self` with every key set in `over` replaced.
    pub fn overridden_by(&self, over: &Settings) -> Settings {
        Settings {
            model: over.model.clone().or_else(|| self.model.clone()),
            alpha: over.alpha.or(self.alpha),
            delta: over.delta.or(self.delta),
            k: over.k.or(self.k),
            r_init: over.r_init.or(self.r_init),
            seed: over.seed.or(self.seed),
            cases: over.cases.or(self.cases),
            replications: over.replications.or(self.replications),
        }
    }

    /// Model parameters, falling back to the defaults for unset keys.
    pub fn params(&self) -> Result<ModelParams> {
        let d = ModelParams::default();
        ModelParams::new(
            self.alpha.unwrap_or(d.alpha()),
            self.delta.unwrap_or(d.delta()),
            self.k.unwrap_or(d.k_factor()),
            self.r_init.unwrap_or(d.r_init()),
        )
    }

    pub fn engine_model(&self) -> Result<Option<EngineModel>> {
        self.model.as_deref().map(str::parse).transpose()
    }
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum SkillSpec {
    Constant(f64),
    StepChange { before: f64, after: f64, change_time: u64 },
    PiecewiseLinear(Vec<(f64, f64)>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlayerSpec {
    id: String,
    skill: SkillSpec,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum PairingSpec {
    UniformRandomPairs,
    RoundRobin,
    FullFieldRanking,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioSpec {
    model: String,
    horizon: u64,
    pairing: PairingSpec,
    m: Option<usize>,
    #[serde(default)]
    engine: Settings,
    players: Vec<PlayerSpec>,
}

/// A scenario plus the engine settings stored alongside it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub scenario: SkillScenario,
    pub engine: Settings,
}

impl ScenarioFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: ScenarioSpec = toml::from_str(text).map_err(|e| Error::validation(format!("scenario file: {e}")))?;
        let field = |name: &str, e: Error| Error::validation(format!("scenario file: field `{name}`: {e}"));
        let model: OutcomeModel = spec.model.parse().map_err(|e| field("model", e))?;
        let pairing = match (spec.pairing, spec.m) {
            (PairingSpec::UniformRandomPairs, None) => Pairing::UniformRandomPairs,
            (PairingSpec::RoundRobin, None) => Pairing::RoundRobin,
            (PairingSpec::FullFieldRanking, Some(m)) => Pairing::FullFieldRanking { m },
            (PairingSpec::FullFieldRanking, None) => {
                return Err(field("m", Error::validation("required for full_field_ranking")))
            }
            (_, Some(_)) => return Err(field("m", Error::validation("only valid for full_field_ranking"))),
        };
        let players = spec
            .players
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                let id = PlayerId::new(p.id).map_err(|e| field(&format!("players[{i}].id"), e))?;
                let path = match p.skill {
                    SkillSpec::Constant(level) => SkillPath::Constant(level),
                    SkillSpec::StepChange {
                        before,
                        after,
                        change_time,
                    } => SkillPath::StepChange {
                        before,
                        after,
                        change_time,
                    },
                    SkillSpec::PiecewiseLinear(knots) => SkillPath::PiecewiseLinear(knots),
                };
                Ok((id, path))
            })
            .collect::<Result<Vec<_>>>()?;
        let scenario =
            SkillScenario::new(players, pairing, spec.horizon, model).map_err(|e| field("players", e))?;
        spec.engine.engine_model().map_err(|e| field("engine.model", e))?;
        spec.engine.params().map_err(|e| field("engine", e))?;
        Ok(ScenarioFile {
            scenario,
            engine: spec.engine,
        })
    }

    /// Engine configuration over the scenario's players; the engine model
    /// defaults to the generator's model.
    pub fn engine_config(&self, settings: &Settings) -> Result<EngineConfig> {
        let model = settings
            .engine_model()?
            .unwrap_or_else(|| self.scenario.model().into());
        Ok(EngineConfig::new(model, settings.params()?, self.scenario.players().iter().cloned()))
    }
}
