//! Domain types shared by the models, the engine, the oracle and the simulator.
//!
//! Every type validates its invariants on construction, so a value that exists
//! is a value that is well formed.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// Opaque, non-empty, whitespace-free player identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlayerId(String);

impl PlayerId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::validation("player id must not be empty"));
        }
        if id.chars().any(char::is_whitespace) {
            return Err(Error::validation(format!(
                "player id `{id}` must not contain whitespace"
            )));
        }
        Ok(PlayerId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for PlayerId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for PlayerId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl TryFrom<&str> for PlayerId {
    type Error = Error;

    fn try_from(value: &str) -> Result<Self> {
        PlayerId::new(value)
    }
}

/// Current rating of every player in a pool.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RatingVector {
    ratings: BTreeMap<PlayerId, f64>,
}

impl RatingVector {
    /// Builds a rating vector, rejecting duplicate players and non-finite ratings.
    pub fn new(entries: impl IntoIterator<Item = (PlayerId, f64)>) -> Result<Self> {
        let mut ratings = BTreeMap::new();
        for (id, rating) in entries {
            check_finite(&id, rating)?;
            if ratings.insert(id.clone(), rating).is_some() {
                return Err(Error::validation(format!("duplicate player `{id}`")));
            }
        }
        Ok(RatingVector { ratings })
    }

    /// Every player in `pool` at the same rating.
    pub fn uniform<'a>(pool: impl IntoIterator<Item = &'a PlayerId>, rating: f64) -> Result<Self> {
        RatingVector::new(pool.into_iter().map(|id| (id.clone(), rating)))
    }

    /// Convenience constructor from string ids, mostly for tests and examples.
    pub fn from_pairs<S: AsRef<str>>(pairs: &[(S, f64)]) -> Result<Self> {
        let entries = pairs
            .iter()
            .map(|(id, r)| Ok((PlayerId::new(id.as_ref())?, *r)))
            .collect::<Result<Vec<_>>>()?;
        RatingVector::new(entries)
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.ratings.get(id).copied()
    }

    /// Rating of `id`, or [`Error::UnknownPlayer`].
    pub fn require(&self, id: &str) -> Result<f64> {
        self.get(id)
            .ok_or_else(|| Error::UnknownPlayer(id.to_string()))
    }

    pub fn contains(&self, id: &str) -> bool {
        self.ratings.contains_key(id)
    }

    /// Returns a copy with `id` set to `rating`. The player must already exist.
    pub fn with_rating(&self, id: &str, rating: f64) -> Result<Self> {
        let mut out = self.clone();
        out.set(id, rating)?;
        Ok(out)
    }

    pub(crate) fn set(&mut self, id: &str, rating: f64) -> Result<()> {
        match self.ratings.get_mut(id) {
            Some(slot) => {
                if !rating.is_finite() {
                    return Err(Error::validation(format!(
                        "rating of `{id}` became non-finite ({rating})"
                    )));
                }
                *slot = rating;
                Ok(())
            }
            None => Err(Error::UnknownPlayer(id.to_string())),
        }
    }

    /// Adds `c` to every rating.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        RatingVector::new(self.iter().map(|(id, r)| (id.clone(), r + c)))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PlayerId, f64)> + '_ {
        self.ratings.iter().map(|(id, r)| (id, *r))
    }

    pub fn players(&self) -> impl Iterator<Item = &PlayerId> + '_ {
        self.ratings.keys()
    }

    pub fn len(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.ratings.values().sum()
    }

    /// Arithmetic mean of all ratings; NaN for an empty vector.
    pub fn mean(&self) -> f64 {
        self.sum() / self.len() as f64
    }
}

fn check_finite(id: &PlayerId, rating: f64) -> Result<()> {
    if rating.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(format!(
            "rating of `{id}` must be finite, got {rating}"
        )))
    }
}

/// Parameters of the outcome models and of the update rule.
///
/// `alpha` scales rating differences, `delta` is the draw threshold of the
/// win/draw/loss model, `k_factor` is the step size of the update and `r_init`
/// the rating every player starts from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    alpha: f64,
    delta: f64,
    k_factor: f64,
    r_init: f64,
}

impl ModelParams {
    pub const DEFAULT_ALPHA: f64 = 1.0;
    pub const DEFAULT_DELTA: f64 = 1.0;
    pub const DEFAULT_K: f64 = 0.1;
    pub const DEFAULT_R_INIT: f64 = 0.0;

    pub fn new(alpha: f64, delta: f64, k_factor: f64, r_init: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::validation(format!("alpha must be > 0, got {alpha}")));
        }
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::validation(format!("delta must be >= 0, got {delta}")));
        }
        if !(k_factor.is_finite() && k_factor > 0.0) {
            return Err(Error::validation(format!(
                "k_factor must be > 0, got {k_factor}"
            )));
        }
        if !r_init.is_finite() {
            return Err(Error::validation(format!("r_init must be finite, got {r_init}")));
        }
        Ok(ModelParams {
            alpha,
            delta,
            k_factor,
            r_init,
        })
    }

    /// Parameters under which the logistic score-driven update reproduces
    /// classical Elo: base-10 logistic with divisor 400, K = 16, start at 1200.
    pub fn elo_equivalent() -> Self {
        let alpha = std::f64::consts::LN_10 / 400.0;
        ModelParams {
            alpha,
            delta: Self::DEFAULT_DELTA,
            k_factor: 16.0 / alpha,
            r_init: 1200.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn k_factor(&self) -> f64 {
        self.k_factor
    }

    pub fn r_init(&self) -> f64 {
        self.r_init
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        ModelParams::new(alpha, self.delta, self.k_factor, self.r_init)
    }

    pub fn with_delta(self, delta: f64) -> Result<Self> {
        ModelParams::new(self.alpha, delta, self.k_factor, self.r_init)
    }

    pub fn with_k_factor(self, k_factor: f64) -> Result<Self> {
        ModelParams::new(self.alpha, self.delta, k_factor, self.r_init)
    }

    pub fn with_r_init(self, r_init: f64) -> Result<Self> {
        ModelParams::new(self.alpha, self.delta, self.k_factor, r_init)
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            alpha: Self::DEFAULT_ALPHA,
            delta: Self::DEFAULT_DELTA,
            k_factor: Self::DEFAULT_K,
            r_init: Self::DEFAULT_R_INIT,
        }
    }
}

fn distinct_pair(a: &PlayerId, b: &PlayerId) -> Result<()> {
    if a == b {
        Err(Error::validation(format!(
            "a game needs two distinct players, got `{a}` twice"
        )))
    } else {
        Ok(())
    }
}

/// A two-player game with a winner and a loser.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinLoss {
    winner: PlayerId,
    loser: PlayerId,
}

impl WinLoss {
    pub fn new(winner: PlayerId, loser: PlayerId) -> Result<Self> {
        distinct_pair(&winner, &loser)?;
        Ok(WinLoss { winner, loser })
    }

    pub fn winner(&self) -> &PlayerId {
        &self.winner
    }

    pub fn loser(&self) -> &PlayerId {
        &self.loser
    }
}

/// A two-player game reported as the points each side scored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Margin {
    player_a: PlayerId,
    player_b: PlayerId,
    points_a: u64,
    points_b: u64,
}

impl Margin {
    pub fn new(player_a: PlayerId, points_a: u64, player_b: PlayerId, points_b: u64) -> Result<Self> {
        distinct_pair(&player_a, &player_b)?;
        if points_a > i64::MAX as u64 || points_b > i64::MAX as u64 {
            return Err(Error::validation("points out of range"));
        }
        Ok(Margin {
            player_a,
            player_b,
            points_a,
            points_b,
        })
    }

    pub fn player_a(&self) -> &PlayerId {
        &self.player_a
    }

    pub fn player_b(&self) -> &PlayerId {
        &self.player_b
    }

    pub fn points_a(&self) -> u64 {
        self.points_a
    }

    pub fn points_b(&self) -> u64 {
        self.points_b
    }

    /// Point difference `points_a - points_b`; the only part the margin model uses.
    pub fn difference(&self) -> i64 {
        self.points_a as i64 - self.points_b as i64
    }
}

/// Result of a win/draw/loss game from player A's point of view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WdlResult {
    AWins,
    Draw,
    BWins,
}

impl WdlResult {
    pub const ALL: [WdlResult; 3] = [WdlResult::AWins, WdlResult::Draw, WdlResult::BWins];
}

/// A two-player game that may end in a draw.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinDrawLoss {
    player_a: PlayerId,
    player_b: PlayerId,
    result: WdlResult,
}

impl WinDrawLoss {
    pub fn new(player_a: PlayerId, player_b: PlayerId, result: WdlResult) -> Result<Self> {
        distinct_pair(&player_a, &player_b)?;
        Ok(WinDrawLoss {
            player_a,
            player_b,
            result,
        })
    }

    pub fn player_a(&self) -> &PlayerId {
        &self.player_a
    }

    pub fn player_b(&self) -> &PlayerId {
        &self.player_b
    }

    pub fn result(&self) -> WdlResult {
        self.result
    }
}

/// A complete ranking of the participants of one game, best first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    ranked: Vec<PlayerId>,
}

impl Ranking {
    pub fn new(ranked: Vec<PlayerId>) -> Result<Self> {
        if ranked.len() < 2 {
            return Err(Error::validation(format!(
                "a ranking needs at least 2 players, got {}",
                ranked.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for id in &ranked {
            if !seen.insert(id) {
                return Err(Error::validation(format!(
                    "player `{id}` appears twice in a ranking"
                )));
            }
        }
        Ok(Ranking { ranked })
    }

    /// Builds a ranking from a rank-per-player map (rank 1 is best). The ranks
    /// must be exactly `1..=m`.
    pub fn from_ranks(ranks: &BTreeMap<PlayerId, usize>) -> Result<Self> {
        let m = ranks.len();
        let mut slots: Vec<Option<PlayerId>> = vec![None; m];
        for (id, &rank) in ranks {
            if rank == 0 || rank > m {
                return Err(Error::validation(format!(
                    "rank {rank} of `{id}` outside 1..={m}"
                )));
            }
            if slots[rank - 1].replace(id.clone()).is_some() {
                return Err(Error::validation(format!("rank {rank} assigned twice")));
            }
        }
        Ranking::new(slots.into_iter().map(|s| s.expect("all ranks filled")).collect())
    }

    /// Players, best first.
    pub fn ranked(&self) -> &[PlayerId] {
        &self.ranked
    }

    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }

    /// 1-based rank of `id`, if it took part.
    pub fn rank_of(&self, id: &str) -> Option<usize> {
        self.ranked.iter().position(|p| p.as_str() == id).map(|i| i + 1)
    }

    /// The player in place `p` (1-based).
    pub fn player_at(&self, p: usize) -> Option<&PlayerId> {
        p.checked_sub(1).and_then(|i| self.ranked.get(i))
    }

    pub fn ranks(&self) -> BTreeMap<PlayerId, usize> {
        self.ranked
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i + 1))
            .collect()
    }
}

/// The observed result of one game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GameOutcome {
    WinLoss(WinLoss),
    Margin(Margin),
    WinDrawLoss(WinDrawLoss),
    Ranking(Ranking),
}

impl GameOutcome {
    pub fn participants(&self) -> Vec<&PlayerId> {
        match self {
            GameOutcome::WinLoss(o) => vec![&o.winner, &o.loser],
            GameOutcome::Margin(o) => vec![&o.player_a, &o.player_b],
            GameOutcome::WinDrawLoss(o) => vec![&o.player_a, &o.player_b],
            GameOutcome::Ranking(o) => o.ranked.iter().collect(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            GameOutcome::WinLoss(_) => "win/loss",
            GameOutcome::Margin(_) => "margin",
            GameOutcome::WinDrawLoss(_) => "win/draw/loss",
            GameOutcome::Ranking(_) => "ranking",
        }
    }
}

impl From<WinLoss> for GameOutcome {
    fn from(o: WinLoss) -> Self {
        GameOutcome::WinLoss(o)
    }
}

impl From<Margin> for GameOutcome {
    fn from(o: Margin) -> Self {
        GameOutcome::Margin(o)
    }
}

impl From<WinDrawLoss> for GameOutcome {
    fn from(o: WinDrawLoss) -> Self {
        GameOutcome::WinDrawLoss(o)
    }
}

impl From<Ranking> for GameOutcome {
    fn from(o: Ranking) -> Self {
        GameOutcome::Ranking(o)
    }
}

/// One entry of a game log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameRecord {
    pub time_index: u64,
    pub outcome: GameOutcome,
}

impl GameRecord {
    pub fn new(time_index: u64, outcome: impl Into<GameOutcome>) -> Self {
        GameRecord {
            time_index,
            outcome: outcome.into(),
        }
    }
}

/// Ratings changed by one game.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryStep {
    pub time_index: u64,
    /// New ratings of the participants only.
    pub changes: Vec<(PlayerId, f64)>,
}

/// Ratings over the course of a replayed log.
///
/// Stored sparsely: the initial vector plus, for each game, the new ratings of
/// its participants. Full vectors are materialized on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingHistory {
    initial: RatingVector,
    steps: Vec<HistoryStep>,
}

impl RatingHistory {
    pub fn new(initial: RatingVector) -> Self {
        RatingHistory {
            initial,
            steps: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, step: HistoryStep) {
        self.steps.push(step);
    }

    pub fn initial(&self) -> &RatingVector {
        &self.initial
    }

    pub fn steps(&self) -> &[HistoryStep] {
        &self.steps
    }

    /// Number of games in the history.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Full rating vectors: the initial one followed by one per game.
    pub fn snapshots(&self) -> Snapshots<'_> {
        Snapshots {
            current: None,
            history: self,
            next: 0,
        }
    }

    /// Ratings after the first `games` games (0 gives the initial vector).
    pub fn ratings_after(&self, games: usize) -> Option<RatingVector> {
        if games > self.steps.len() {
            return None;
        }
        let mut ratings = self.initial.clone();
        for step in &self.steps[..games] {
            apply_changes(&mut ratings, &step.changes);
        }
        Some(ratings)
    }

    pub fn final_ratings(&self) -> RatingVector {
        self.ratings_after(self.steps.len())
            .expect("full length is always in range")
    }

    /// `(time_index, rating)` after every game for one player, carrying the
    /// rating forward through games the player sat out.
    pub fn player_series(&self, id: &str) -> Option<Vec<(u64, f64)>> {
        let mut current = self.initial.get(id)?;
        Some(
            self.steps
                .iter()
                .map(|step| {
                    if let Some((_, r)) = step.changes.iter().find(|(p, _)| p.as_str() == id) {
                        current = *r;
                    }
                    (step.time_index, current)
                })
                .collect(),
        )
    }

    /// Number of games each player took part in.
    pub fn games_played(&self) -> BTreeMap<PlayerId, usize> {
        let mut counts: BTreeMap<PlayerId, usize> =
            self.initial.players().map(|id| (id.clone(), 0)).collect();
        for step in &self.steps {
            for (id, _) in &step.changes {
                *counts.entry(id.clone()).or_default() += 1;
            }
        }
        counts
    }
}

fn apply_changes(ratings: &mut RatingVector, changes: &[(PlayerId, f64)]) {
    for (id, r) in changes {
        ratings
            .set(id.as_str(), *r)
            .expect("history only records players of the initial vector");
    }
}

/// Iterator over the full rating vectors of a [`RatingHistory`].
pub struct Snapshots<'a> {
    current: Option<RatingVector>,
    history: &'a RatingHistory,
    next: usize,
}

impl<'a> Iterator for Snapshots<'a> {
    type Item = RatingVector;

    fn next(&mut self) -> Option<RatingVector> {
        match &mut self.current {
            None => {
                self.current = Some(self.history.initial.clone());
            }
            Some(ratings) => {
                let step = self.history.steps.get(self.next)?;
                apply_changes(ratings, &step.changes);
                self.next += 1;
            }
        }
        self.current.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pid(s: &str) -> PlayerId {
        PlayerId::new(s).unwrap()
    }

    #[test]
    fn player_id_rejects_empty_and_whitespace() {
        assert!(PlayerId::new("").is_err());
        assert!(PlayerId::new("a b").is_err());
        assert!(PlayerId::new("tab\there").is_err());
        assert_eq!(PlayerId::new("carlsen").unwrap().as_str(), "carlsen");
    }

    #[test]
    fn rating_vector_rejects_nan_and_duplicates() {
        assert!(RatingVector::from_pairs(&[("a", f64::NAN)]).is_err());
        assert!(RatingVector::from_pairs(&[("a", f64::INFINITY)]).is_err());
        assert!(RatingVector::from_pairs(&[("a", 1.0), ("a", 2.0)]).is_err());
        let v = RatingVector::from_pairs(&[("a", 1.0), ("b", 3.0)]).unwrap();
        assert_eq!(v.mean(), 2.0);
        assert!(matches!(v.require("c"), Err(Error::UnknownPlayer(_))));
    }

    #[test]
    fn params_validate() {
        assert!(ModelParams::new(0.0, 1.0, 0.1, 0.0).is_err());
        assert!(ModelParams::new(1.0, -0.1, 0.1, 0.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 0.0, 0.1, f64::NAN).is_err());
        assert!(ModelParams::new(1.0, 0.0, 0.1, 0.0).is_ok());
        let d = ModelParams::default();
        assert_eq!((d.alpha(), d.delta(), d.k_factor(), d.r_init()), (1.0, 1.0, 0.1, 0.0));
    }

    #[test]
    fn outcomes_require_distinct_players() {
        assert!(WinLoss::new(pid("a"), pid("a")).is_err());
        assert!(Margin::new(pid("a"), 1, pid("a"), 0).is_err());
        assert!(WinDrawLoss::new(pid("a"), pid("a"), WdlResult::Draw).is_err());
        assert!(Ranking::new(vec![pid("a")]).is_err());
        assert!(Ranking::new(vec![pid("a"), pid("b"), pid("a")]).is_err());
    }

    #[test]
    fn ranking_rank_conversions() {
        let r = Ranking::new(vec![pid("x"), pid("y"), pid("z")]).unwrap();
        assert_eq!(r.rank_of("z"), Some(3));
        assert_eq!(r.player_at(1).unwrap().as_str(), "x");
        assert_eq!(r.player_at(0), None);
        assert_eq!(Ranking::from_ranks(&r.ranks()).unwrap(), r);

        let mut bad = r.ranks();
        bad.insert(pid("y"), 1);
        assert!(Ranking::from_ranks(&bad).is_err());
    }

    #[test]
    fn history_materializes_carried_forward_ratings() {
        let init = RatingVector::from_pairs(&[("a", 0.0), ("b", 0.0), ("c", 0.0)]).unwrap();
        let mut h = RatingHistory::new(init.clone());
        h.push(HistoryStep {
            time_index: 3,
            changes: vec![(pid("a"), 1.0), (pid("b"), -1.0)],
        });
        h.push(HistoryStep {
            time_index: 7,
            changes: vec![(pid("b"), -0.5), (pid("c"), -0.5)],
        });
        let snaps: Vec<_> = h.snapshots().collect();
        assert_eq!(snaps.len(), 3);
        assert_eq!(snaps[0], init);
        assert_eq!(snaps[2].get("a"), Some(1.0));
        assert_eq!(snaps[2].get("b"), Some(-0.5));
        assert_eq!(h.final_ratings(), snaps[2]);
        assert_eq!(h.player_series("a").unwrap(), vec![(3, 1.0), (7, 1.0)]);
        assert_eq!(h.games_played()[&pid("b")], 2);
        assert_eq!(h.games_played()[&pid("a")], 1);
    }
}
