//! Sequential replay of a game log.
//!
//! Each game moves its participants by `K * score`; everyone else keeps the
//! exact same rating. The classical Elo reference is available as its own
//! model so both systems can be replayed over the same log.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::models::{elo_classic, OutcomeModel};
use crate::types::{GameOutcome, GameRecord, HistoryStep, ModelParams, PlayerId, RatingHistory, RatingVector};

/// Update rule used by the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EngineModel {
    WinLoss,
    Margin,
    WinDrawLoss,
    Ranking,
    /// Classical Elo with fixed constants; consumes win/loss outcomes and
    /// ignores [`ModelParams`].
    EloClassic,
}

impl EngineModel {
    /// The likelihood model behind a score-driven update, `None` for classical Elo.
    pub fn outcome_model(self) -> Option<OutcomeModel> {
        match self {
            EngineModel::WinLoss => Some(OutcomeModel::WinLoss),
            EngineModel::Margin => Some(OutcomeModel::Margin),
            EngineModel::WinDrawLoss => Some(OutcomeModel::WinDrawLoss),
            EngineModel::Ranking => Some(OutcomeModel::Ranking),
            EngineModel::EloClassic => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self.outcome_model() {
            Some(m) => m.name(),
            None => "elo_classic",
        }
    }

    pub fn accepts(self, outcome: &GameOutcome) -> bool {
        match self.outcome_model() {
            Some(m) => m.accepts(outcome),
            None => matches!(outcome, GameOutcome::WinLoss(_)),
        }
    }
}

impl From<OutcomeModel> for EngineModel {
    fn from(m: OutcomeModel) -> Self {
        match m {
            OutcomeModel::WinLoss => EngineModel::WinLoss,
            OutcomeModel::Margin => EngineModel::Margin,
            OutcomeModel::WinDrawLoss => EngineModel::WinDrawLoss,
            OutcomeModel::Ranking => EngineModel::Ranking,
        }
    }
}

impl fmt::Display for EngineModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EngineModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "elo" | "elo_classic" | "classic" => Ok(EngineModel::EloClassic),
            other => other.parse::<OutcomeModel>().map(EngineModel::from),
        }
    }
}

/// Model, parameters and the fixed player pool of a replay.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    model: EngineModel,
    params: ModelParams,
    pool: BTreeSet<PlayerId>,
}

impl EngineConfig {
    pub fn new(model: EngineModel, params: ModelParams, pool: impl IntoIterator<Item = PlayerId>) -> Self {
        EngineConfig {
            model,
            params,
            pool: pool.into_iter().collect(),
        }
    }

    pub fn model(&self) -> EngineModel {
        self.model
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn pool(&self) -> &BTreeSet<PlayerId> {
        &self.pool
    }

    /// Starting rating: `r_init`, or 1200 for classical Elo.
    pub fn initial_rating(&self) -> f64 {
        match self.model {
            EngineModel::EloClassic => elo_classic::INITIAL_RATING,
            _ => self.params.r_init(),
        }
    }
}

/// Every player in the pool at the initial rating.
pub fn init_ratings(config: &EngineConfig) -> Result<RatingVector> {
    if config.pool.is_empty() {
        return Err(Error::validation("player pool is empty"));
    }
    RatingVector::uniform(&config.pool, config.initial_rating())
}

/// New ratings of the participants of `outcome`.
fn participant_updates(
    ratings: &RatingVector,
    outcome: &GameOutcome,
    config: &EngineConfig,
) -> Result<Vec<(PlayerId, f64)>> {
    if !config.model.accepts(outcome) {
        return Err(Error::ModelMismatch {
            model: config.model.name(),
            outcome: outcome.kind_name(),
        });
    }
    for id in outcome.participants() {
        if !config.pool.contains(id) {
            return Err(Error::UnknownPlayer(id.to_string()));
        }
    }
    let changes = match (config.model.outcome_model(), outcome) {
        (Some(model), _) => {
            let k = config.params.k_factor();
            let score = model.score(ratings, outcome, &config.params)?;
            score
                .iter()
                .map(|(id, s)| Ok((id.clone(), ratings.require(id.as_str())? + k * s)))
                .collect::<Result<Vec<_>>>()?
        }
        (None, GameOutcome::WinLoss(o)) => {
            let (w, l) = elo_classic::update_pair(
                ratings.require(o.winner().as_str())?,
                ratings.require(o.loser().as_str())?,
            );
            vec![(o.winner().clone(), w), (o.loser().clone(), l)]
        }
        (None, _) => unreachable!("compatibility checked above"),
    };
    if let Some((id, r)) = changes.iter().find(|(_, r)| !r.is_finite()) {
        return Err(Error::validation(format!(
            "rating of `{id}` would become non-finite ({r})"
        )));
    }
    Ok(changes)
}

/// Applies one game. Non-participants are returned bit-identical.
pub fn step(ratings: &RatingVector, record: &GameRecord, config: &EngineConfig) -> Result<RatingVector> {
    let changes = participant_updates(ratings, &record.outcome, config)?;
    let mut out = ratings.clone();
    for (id, r) in changes {
        out.set(id.as_str(), r)?;
    }
    Ok(out)
}

/// Replays a whole log from the initial ratings.
///
/// Time indices must be strictly increasing; simultaneous games have to be
/// serialized by the caller.
pub fn replay(log: &[GameRecord], config: &EngineConfig) -> Result<RatingHistory> {
    let mut engine = Engine::new(config.clone())?;
    for record in log {
        engine.apply(record)?;
    }
    Ok(engine.into_history())
}

/// Incremental replay state: ratings so far plus the history that produced them.
#[derive(Debug, Clone)]
pub struct Engine {
    config: EngineConfig,
    ratings: RatingVector,
    history: RatingHistory,
    last_time: Option<u64>,
}

impl Engine {
    pub fn new(config: EngineConfig) -> Result<Self> {
        let ratings = init_ratings(&config)?;
        Ok(Engine {
            history: RatingHistory::new(ratings.clone()),
            ratings,
            config,
            last_time: None,
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn ratings(&self) -> &RatingVector {
        &self.ratings
    }

    pub fn history(&self) -> &RatingHistory {
        &self.history
    }

    pub fn into_history(self) -> RatingHistory {
        self.history
    }

    /// Applies the next game of the log. On error the state is unchanged.
    pub fn apply(&mut self, record: &GameRecord) -> Result<()> {
        if let Some(prev) = self.last_time {
            if record.time_index <= prev {
                return Err(Error::LogOrder {
                    position: self.history.len(),
                    previous: prev,
                    found: record.time_index,
                });
            }
        }
        let changes = participant_updates(&self.ratings, &record.outcome, &self.config)?;
        for (id, r) in &changes {
            self.ratings.set(id.as_str(), *r)?;
        }
        self.history.push(HistoryStep {
            time_index: record.time_index,
            changes,
        });
        self.last_time = Some(record.time_index);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Margin, Ranking, WinLoss};

    fn pid(s: &str) -> PlayerId {
        PlayerId::new(s).unwrap()
    }

    fn pool(ids: &[&str]) -> Vec<PlayerId> {
        ids.iter().map(|s| pid(s)).collect()
    }

    fn wl(t: u64, w: &str, l: &str) -> GameRecord {
        GameRecord::new(t, WinLoss::new(pid(w), pid(l)).unwrap())
    }

    #[test]
    fn init_uses_r_init_or_classic_constant() {
        let params = ModelParams::default();
        let cfg = EngineConfig::new(EngineModel::WinLoss, params, pool(&["A", "B", "C"]));
        let r = init_ratings(&cfg).unwrap();
        assert!(r.iter().all(|(_, v)| v == 0.0));
        assert_eq!(r.len(), 3);

        let cfg = EngineConfig::new(EngineModel::EloClassic, params, pool(&["A", "B"]));
        let r = init_ratings(&cfg).unwrap();
        assert!(r.iter().all(|(_, v)| v == 1200.0));

        let cfg = EngineConfig::new(EngineModel::WinLoss, params, pool(&[]));
        assert!(matches!(init_ratings(&cfg), Err(Error::Validation(_))));
    }

    #[test]
    fn single_step_moves_by_k_times_score() {
        let cfg = EngineConfig::new(EngineModel::WinLoss, ModelParams::default(), pool(&["A", "B", "C"]));
        let r0 = init_ratings(&cfg).unwrap().with_rating("C", 0.123_456_789).unwrap();
        let r1 = step(&r0, &wl(0, "A", "B"), &cfg).unwrap();
        assert!((r1.get("A").unwrap() - 0.05).abs() < 1e-15);
        assert!((r1.get("B").unwrap() + 0.05).abs() < 1e-15);
        assert_eq!(r1.get("C").unwrap().to_bits(), 0.123_456_789f64.to_bits());
        assert!((r1.sum() - r0.sum()).abs() < 1e-12);
    }

    #[test]
    fn incompatible_outcome_is_rejected() {
        let cfg = EngineConfig::new(EngineModel::Margin, ModelParams::default(), pool(&["A", "B"]));
        let r0 = init_ratings(&cfg).unwrap();
        let rec = GameRecord::new(1, Ranking::new(pool(&["A", "B"])).unwrap());
        assert!(matches!(step(&r0, &rec, &cfg), Err(Error::ModelMismatch { .. })));

        let cfg = EngineConfig::new(EngineModel::EloClassic, ModelParams::default(), pool(&["A", "B"]));
        let rec = GameRecord::new(1, Margin::new(pid("A"), 1, pid("B"), 0).unwrap());
        assert!(matches!(step(&r0, &rec, &cfg), Err(Error::ModelMismatch { .. })));
    }

    #[test]
    fn players_outside_the_pool_are_rejected() {
        let cfg = EngineConfig::new(EngineModel::WinLoss, ModelParams::default(), pool(&["A", "B"]));
        let err = replay(&[wl(1, "A", "Z")], &cfg).unwrap_err();
        assert_eq!(err, Error::UnknownPlayer("Z".into()));
    }

    #[test]
    fn empty_log_keeps_initial_ratings() {
        let cfg = EngineConfig::new(EngineModel::WinLoss, ModelParams::default(), pool(&["A", "B"]));
        let h = replay(&[], &cfg).unwrap();
        assert!(h.is_empty());
        assert_eq!(h.final_ratings(), init_ratings(&cfg).unwrap());
    }

    #[test]
    fn replay_equals_folded_steps() {
        let cfg = EngineConfig::new(EngineModel::WinLoss, ModelParams::default(), pool(&["A", "B", "C"]));
        let log = vec![wl(1, "A", "B"), wl(2, "B", "C"), wl(5, "A", "C")];
        let h = replay(&log, &cfg).unwrap();
        let mut r = init_ratings(&cfg).unwrap();
        for (k, rec) in log.iter().enumerate() {
            r = step(&r, rec, &cfg).unwrap();
            assert_eq!(h.ratings_after(k + 1).unwrap(), r);
        }
        assert_eq!(h.final_ratings(), r);
    }

    #[test]
    fn out_of_order_and_duplicate_times_are_rejected() {
        let cfg = EngineConfig::new(EngineModel::WinLoss, ModelParams::default(), pool(&["A", "B"]));
        let err = replay(&[wl(3, "A", "B"), wl(2, "B", "A")], &cfg).unwrap_err();
        assert_eq!(
            err,
            Error::LogOrder {
                position: 1,
                previous: 3,
                found: 2
            }
        );
        assert!(replay(&[wl(3, "A", "B"), wl(3, "B", "A")], &cfg).is_err());
    }

    #[test]
    fn failed_apply_leaves_engine_untouched() {
        let cfg = EngineConfig::new(EngineModel::WinLoss, ModelParams::default(), pool(&["A", "B"]));
        let mut e = Engine::new(cfg).unwrap();
        e.apply(&wl(1, "A", "B")).unwrap();
        let before = e.ratings().clone();
        assert!(e.apply(&wl(2, "A", "nobody")).is_err());
        assert_eq!(e.ratings(), &before);
        assert_eq!(e.history().len(), 1);
        e.apply(&wl(2, "B", "A")).unwrap();
    }

    #[test]
    fn model_names_parse() {
        assert_eq!("elo".parse::<EngineModel>().unwrap(), EngineModel::EloClassic);
        assert_eq!("win-draw-loss".parse::<EngineModel>().unwrap(), EngineModel::WinDrawLoss);
        assert!("glicko".parse::<EngineModel>().is_err());
    }
}
