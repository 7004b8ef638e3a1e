//! Monte Carlo simulation of rating dynamics when games are generated from
//! unobserved true skills rather than from the ratings themselves.
//!
//! Every replication owns a ChaCha8 stream derived from `(seed, replication)`,
//! so results are bit-identical for a given seed regardless of how rayon
//! schedules the replications.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use itertools::Itertools;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::engine::{Engine, EngineConfig, EngineModel};
use crate::error::{Error, Result};
use crate::models::{elo_classic, sigmoid, wdl, OutcomeModel, ScoreVector};
use crate::oracle::{self, Truncation};
use crate::types::{
    GameOutcome, GameRecord, Margin, ModelParams, PlayerId, Ranking, RatingHistory, RatingVector, WdlResult,
    WinDrawLoss, WinLoss,
};

/// Name of the generator recorded with every result.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha), seed_from_u64(seed), stream = replication index";

/// Subset size above which the exact pairing expectation is not enumerated.
const MAX_ENUMERATED_SUBSETS: usize = 20_000;

/// Deterministic generator for replication `replication` of a run seeded with `seed`.
pub fn replication_rng(seed: u64, replication: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    rng
}

/// True skill of one player as a function of the game index `t` (1-based).
#[derive(Debug, Clone, PartialEq)]
pub enum SkillPath {
    Constant(f64),
    /// `before` for games `t < change_time`, `after` from `change_time` on.
    StepChange { before: f64, after: f64, change_time: u64 },
    /// Linear interpolation between `(time, level)` knots, flat outside them.
    PiecewiseLinear(Vec<(f64, f64)>),
}

impl SkillPath {
    fn validate(&self) -> Result<()> {
        match self {
            SkillPath::Constant(level) => finite("skill level", *level),
            SkillPath::StepChange { before, after, .. } => {
                finite("skill level", *before)?;
                finite("skill level", *after)
            }
            SkillPath::PiecewiseLinear(knots) => {
                if knots.is_empty() {
                    return Err(Error::validation("piecewise-linear skill needs at least one knot"));
                }
                for (t, level) in knots {
                    finite("knot time", *t)?;
                    finite("skill level", *level)?;
                }
                if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::validation("knot times must be strictly increasing"));
                }
                Ok(())
            }
        }
    }

    pub fn at(&self, t: u64) -> f64 {
        match self {
            SkillPath::Constant(level) => *level,
            SkillPath::StepChange {
                before,
                after,
                change_time,
            } => {
                if t < *change_time {
                    *before
                } else {
                    *after
                }
            }
            SkillPath::PiecewiseLinear(knots) => {
                let t = t as f64;
                let (first, last) = (knots[0], knots[knots.len() - 1]);
                if t <= first.0 {
                    return first.1;
                }
                if t >= last.0 {
                    return last.1;
                }
                let (a, b) = knots
                    .iter()
                    .tuple_windows()
                    .find(|(a, b)| a.0 <= t && t <= b.0)
                    .expect("t lies strictly inside the knot range");
                a.1 + (b.1 - a.1) * (t - a.0) / (b.0 - a.0)
            }
        }
    }
}

fn finite(what: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(format!("{what} must be finite, got {v}")))
    }
}

/// How the participants of each game are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// Two distinct players drawn uniformly, in random order.
    UniformRandomPairs,
    /// Cycles through all pairs `(i, j)`, `i < j`, in pool order.
    RoundRobin,
    /// `m` distinct players drawn uniformly, listed in pool order.
    FullFieldRanking { m: usize },
}

/// True-skill trajectories plus the pairing policy and the generating model.
#[derive(Debug, Clone, PartialEq)]
pub struct SkillScenario {
    players: Vec<PlayerId>,
    skills: Vec<SkillPath>,
    pairing: Pairing,
    horizon: u64,
    model: OutcomeModel,
}

impl SkillScenario {
    pub fn new(
        players: Vec<(PlayerId, SkillPath)>,
        pairing: Pairing,
        horizon: u64,
        model: OutcomeModel,
    ) -> Result<Self> {
        if horizon < 1 {
            return Err(Error::validation("horizon must be at least 1 game"));
        }
        if players.len() < 2 {
            return Err(Error::validation("a scenario needs at least 2 players"));
        }
        let distinct: BTreeSet<_> = players.iter().map(|(id, _)| id).collect();
        if distinct.len() != players.len() {
            return Err(Error::validation("scenario players must be distinct"));
        }
        for (_, path) in &players {
            path.validate()?;
        }
        match pairing {
            Pairing::FullFieldRanking { m } => {
                if m < 2 || m > players.len() {
                    return Err(Error::validation(format!(
                        "full-field ranking size m = {m} must lie in 2..={}",
                        players.len()
                    )));
                }
                if m != 2 && model != OutcomeModel::Ranking {
                    return Err(Error::validation(format!(
                        "the {model} model is pairwise; full-field games must have m = 2"
                    )));
                }
            }
            Pairing::UniformRandomPairs | Pairing::RoundRobin => {}
        }
        let (players, skills) = players.into_iter().unzip();
        Ok(SkillScenario {
            players,
            skills,
            pairing,
            horizon,
            model,
        })
    }

    pub fn players(&self) -> &[PlayerId] {
        &self.players
    }

    pub fn skill_paths(&self) -> impl Iterator<Item = (&PlayerId, &SkillPath)> + '_ {
        self.players.iter().zip(&self.skills)
    }

    pub fn pairing(&self) -> Pairing {
        self.pairing
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn model(&self) -> OutcomeModel {
        self.model
    }

    /// True skills of everyone at game `t`.
    pub fn skills_at(&self, t: u64) -> RatingVector {
        RatingVector::new(
            self.players
                .iter()
                .cloned()
                .zip(self.skills.iter().map(|s| s.at(t))),
        )
        .expect("validated skill paths are finite")
    }

    fn draw_participants<R: Rng>(&self, t: u64, rng: &mut R) -> Vec<PlayerId> {
        let n = self.players.len();
        match self.pairing {
            Pairing::UniformRandomPairs => index::sample(rng, n, 2)
                .into_iter()
                .map(|i| self.players[i].clone())
                .collect(),
            Pairing::RoundRobin => {
                let pairs = n * (n - 1) / 2;
                let (i, j) = (0..n)
                    .tuple_combinations()
                    .nth(((t - 1) % pairs as u64) as usize)
                    .expect("index below the pair count");
                vec![self.players[i].clone(), self.players[j].clone()]
            }
            Pairing::FullFieldRanking { m } => {
                let mut picked = index::sample(rng, n, m).into_vec();
                picked.sort_unstable();
                picked.into_iter().map(|i| self.players[i].clone()).collect()
            }
        }
    }

    /// Participant sets of the first game with their probabilities.
    fn first_game_participants(&self) -> Result<Vec<(Vec<PlayerId>, f64)>> {
        let n = self.players.len();
        let subsets = |m: usize| -> Result<Vec<(Vec<PlayerId>, f64)>> {
            let count = binomial(n, m);
            if count > MAX_ENUMERATED_SUBSETS as f64 {
                return Err(Error::SizeLimit(format!(
                    "{count} participant subsets are too many to enumerate"
                )));
            }
            Ok(self
                .players
                .iter()
                .cloned()
                .combinations(m)
                .map(|s| (s, 1.0 / count))
                .collect())
        };
        match self.pairing {
            Pairing::UniformRandomPairs => subsets(2),
            Pairing::RoundRobin => Ok(vec![(vec![self.players[0].clone(), self.players[1].clone()], 1.0)]),
            Pairing::FullFieldRanking { m } => subsets(m),
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Draws one outcome from `model` at the true `skills`.
pub fn sample_outcome<R: Rng + ?Sized>(
    model: OutcomeModel,
    participants: &[PlayerId],
    skills: &RatingVector,
    params: &ModelParams,
    rng: &mut R,
) -> Result<GameOutcome> {
    let level = |id: &PlayerId| skills.require(id.as_str());
    let pair = || match participants {
        [a, b] => Ok((a.clone(), b.clone())),
        _ => Err(Error::validation(format!(
            "the {model} model needs exactly 2 participants, got {}",
            participants.len()
        ))),
    };
    let alpha = params.alpha();
    match model {
        OutcomeModel::WinLoss => {
            let (a, b) = pair()?;
            let p_a = sigmoid(alpha * (level(&a)? - level(&b)?));
            let outcome = if rng.random::<f64>() < p_a {
                WinLoss::new(a, b)
            } else {
                WinLoss::new(b, a)
            };
            Ok(outcome?.into())
        }
        OutcomeModel::Margin => {
            let (a, b) = pair()?;
            let x = alpha * (level(&a)? - level(&b)?);
            let points_a = poisson(x.exp(), rng)?;
            let points_b = poisson((-x).exp(), rng)?;
            Ok(Margin::new(a, points_a, b, points_b)?.into())
        }
        OutcomeModel::WinDrawLoss => {
            let (a, b) = pair()?;
            let x = alpha * (level(&a)? - level(&b)?);
            let [p_a, p_draw, _] = wdl::probabilities(x, params.delta());
            let u = rng.random::<f64>();
            let result = if u < p_a {
                WdlResult::AWins
            } else if u < p_a + p_draw {
                WdlResult::Draw
            } else {
                WdlResult::BWins
            };
            Ok(WinDrawLoss::new(a, b, result)?.into())
        }
        OutcomeModel::Ranking => {
            if participants.len() < 2 {
                return Err(Error::validation("a ranking needs at least 2 participants"));
            }
            let levels = participants.iter().map(level).collect::<Result<Vec<_>>>()?;
            let top = levels.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut pool: Vec<(PlayerId, f64)> = participants
                .iter()
                .cloned()
                .zip(levels.iter().map(|s| (alpha * (s - top)).exp()))
                .collect();
            let mut order = Vec::with_capacity(pool.len());
            while pool.len() > 1 {
                let total: f64 = pool.iter().map(|(_, w)| w).sum();
                let mut u = rng.random::<f64>() * total;
                let mut pick = pool.len() - 1;
                for (i, (_, w)) in pool.iter().enumerate() {
                    if u < *w {
                        pick = i;
                        break;
                    }
                    u -= w;
                }
                order.push(pool.remove(pick).0);
            }
            order.push(pool.pop().expect("one player left").0);
            Ok(Ranking::new(order)?.into())
        }
    }
}

/// [`sample_outcome`] with a fresh generator seeded from `seed`.
pub fn sample_outcome_seeded(
    model: OutcomeModel,
    participants: &[PlayerId],
    skills: &RatingVector,
    params: &ModelParams,
    seed: u64,
) -> Result<GameOutcome> {
    sample_outcome(model, participants, skills, params, &mut replication_rng(seed, 0))
}

fn poisson<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> Result<u64> {
    let dist = Poisson::new(rate)
        .map_err(|e| Error::validation(format!("cannot sample points at rate {rate}: {e}")))?;
    Ok(dist.sample(rng) as u64)
}

/// One simulated season: the generated log and the ratings it produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    pub log: Vec<GameRecord>,
    pub history: RatingHistory,
}

/// Cross-replication mean and 95 % band of one player at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandPoint {
    pub mean: f64,
    pub low: f64,
    pub high: f64,
}

/// Per-player band series at times `1..=horizon` (rating after each game).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Aggregate {
    pub series: BTreeMap<PlayerId, Vec<BandPoint>>,
}

/// Mean and standard error of a per-replication quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl Estimate {
    fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Estimate {
            mean,
            std_error: (var / n as f64).sqrt(),
            samples: n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub seed: u64,
    pub rng_algorithm: &'static str,
    pub horizon: u64,
    pub initial_rating: f64,
    pub replications: Vec<Replication>,
    /// True skill of each player at games `1..=horizon`.
    pub skills: BTreeMap<PlayerId, Vec<f64>>,
    pub aggregate: Aggregate,
}

impl SimResult {
    /// Rating change of `player` caused by the first game of each replication.
    pub fn first_step_drift(&self, player: &str) -> Option<Estimate> {
        let drifts = self
            .replications
            .iter()
            .map(|rep| {
                let before = rep.history.initial().get(player)?;
                let after = rep
                    .history
                    .player_series(player)?
                    .first()
                    .map_or(before, |(_, r)| *r);
                Some(after - before)
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Estimate::from_samples(&drifts))
    }

    /// Average of `rating - skill` over every replication and every game after
    /// `burn_in`. Exposed as a statistic only.
    pub fn long_run_gap(&self, player: &str, burn_in: u64) -> Option<f64> {
        let skills = self.skills.get(player)?;
        let mut total = 0.0;
        let mut count = 0usize;
        for rep in &self.replications {
            for (k, (_, rating)) in rep.history.player_series(player)?.into_iter().enumerate() {
                if (k as u64) < burn_in {
                    continue;
                }
                total += rating - skills[k];
                count += 1;
            }
        }
        (count > 0).then(|| total / count as f64)
    }

    /// Largest deviation of any replication's per-time mean rating from the
    /// initial rating.
    pub fn max_conservation_error(&self) -> f64 {
        self.replications
            .iter()
            .flat_map(|rep| rep.history.snapshots())
            .map(|r| (r.mean() - self.initial_rating).abs())
            .fold(0.0, f64::max)
    }
}

/// Parameters of the true outcome generator: the engine's own, or the
/// Elo-scale logistic link when the engine is classical Elo.
pub fn generator_params(config: &EngineConfig) -> ModelParams {
    match config.model() {
        EngineModel::EloClassic => ModelParams::elo_equivalent(),
        _ => *config.params(),
    }
}

/// Runs `replications` independent seasons of `scenario` through the engine.
///
/// Outcomes are drawn at the true skills with [`generator_params`]; the
/// engine's pool must be exactly the scenario's players.
pub fn run_simulation(
    scenario: &SkillScenario,
    config: &EngineConfig,
    replications: usize,
    seed: u64,
) -> Result<SimResult> {
    if replications < 1 {
        return Err(Error::validation("replications must be at least 1"));
    }
    let scenario_pool: BTreeSet<PlayerId> = scenario.players.iter().cloned().collect();
    if &scenario_pool != config.pool() {
        return Err(Error::validation("engine pool must equal the scenario's players"));
    }
    let compatible = match config.model() {
        EngineModel::EloClassic => scenario.model == OutcomeModel::WinLoss,
        m => m.outcome_model() == Some(scenario.model),
    };
    if !compatible {
        return Err(Error::ModelMismatch {
            model: config.model().name(),
            outcome: scenario.model.name(),
        });
    }

    let skill_table: Vec<RatingVector> = (1..=scenario.horizon).map(|t| scenario.skills_at(t)).collect();
    let gen_params = generator_params(config);

    let runs = (0..replications)
        .into_par_iter()
        .map(|r| {
            let mut rng = replication_rng(seed, r as u64);
            let mut engine = Engine::new(config.clone())?;
            let mut log = Vec::with_capacity(scenario.horizon as usize);
            for (t, skills) in (1..=scenario.horizon).zip(&skill_table) {
                let participants = scenario.draw_participants(t, &mut rng);
                let outcome = sample_outcome(scenario.model, &participants, skills, &gen_params, &mut rng)?;
                let record = GameRecord::new(t, outcome);
                engine.apply(&record)?;
                log.push(record);
            }
            Ok(Replication {
                log,
                history: engine.into_history(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let skills = scenario
        .skill_paths()
        .map(|(id, path)| (id.clone(), (1..=scenario.horizon).map(|t| path.at(t)).collect()))
        .collect();

    Ok(SimResult {
        seed,
        rng_algorithm: RNG_ALGORITHM,
        horizon: scenario.horizon,
        initial_rating: config.initial_rating(),
        aggregate: aggregate(&runs, &scenario.players),
        replications: runs,
        skills,
    })
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Mean and 2.5 / 97.5 percentiles across replications, widened to contain
/// the mean when the distribution is very skewed.
pub fn band(values: &[f64]) -> BandPoint {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    BandPoint {
        mean,
        low: quantile(&sorted, 0.025).min(mean),
        high: quantile(&sorted, 0.975).max(mean),
    }
}

fn aggregate(runs: &[Replication], players: &[PlayerId]) -> Aggregate {
    let mut series: BTreeMap<PlayerId, Vec<BandPoint>> =
        players.iter().map(|id| (id.clone(), Vec::new())).collect();
    // Walk all replications in lockstep so only one snapshot per run is alive.
    let mut walkers: Vec<_> = runs.iter().map(|r| r.history.snapshots().skip(1)).collect();
    let mut column = vec![0.0; runs.len()];
    loop {
        let snaps: Option<Vec<RatingVector>> = walkers.iter_mut().map(Iterator::next).collect();
        let Some(snaps) = snaps else { break };
        for id in players {
            for (slot, snap) in column.iter_mut().zip(&snaps) {
                *slot = snap.get(id.as_str()).expect("pool player");
            }
            series.get_mut(id).expect("pool player").push(band(&column));
        }
    }
    Aggregate { series }
}

/// Exact expected rating change of every player in the first game, given the
/// pairing distribution and the generator at the true skills of game 1.
pub fn expected_first_step_drift(scenario: &SkillScenario, config: &EngineConfig) -> Result<ScoreVector> {
    let truth = scenario.skills_at(1);
    let ratings = crate::engine::init_ratings(config)?;
    let params = config.params();
    let gen_params = generator_params(config);
    let mut total = ScoreVector::default();
    for (who, weight) in scenario.first_game_participants()? {
        let space = oracle::enumerate_outcomes(scenario.model, &who, &truth, &gen_params, Truncation::default())?;
        let drift = match config.model().outcome_model() {
            Some(model) => space
                .expectation(|y| model.score(&ratings, y, params))?
                .scaled(params.k_factor()),
            None => space.expectation(|y| elo_step(&ratings, y))?,
        };
        total.add_scaled(&drift, weight);
    }
    Ok(total)
}

fn elo_step(ratings: &RatingVector, outcome: &GameOutcome) -> Result<ScoreVector> {
    match outcome {
        GameOutcome::WinLoss(o) => {
            let (w0, l0) = (ratings.require(o.winner().as_str())?, ratings.require(o.loser().as_str())?);
            let (w1, l1) = elo_classic::update_pair(w0, l0);
            Ok(ScoreVector::new([(o.winner().clone(), w1 - w0), (o.loser().clone(), l1 - l0)]))
        }
        other => Err(Error::ModelMismatch {
            model: "elo_classic",
            outcome: other.kind_name(),
        }),
    }
}

/// One row of the long-format plot table. Aggregate rows have no replication
/// and carry the band; per-replication rows have empty band fields.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotRow {
    pub replication: Option<usize>,
    pub time: u64,
    pub player: PlayerId,
    pub rating: f64,
    pub band_low: Option<f64>,
    pub band_high: Option<f64>,
}

pub const PLOT_HEADER: [&str; 6] = ["replication", "time", "player", "rating", "band_low", "band_high"];
const AGGREGATE_LABEL: &str = "aggregate";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlotTable {
    pub rows: Vec<PlotRow>,
}

/// Long-format table behind rating-path plots: aggregate rows first, then
/// every replication. Times are game indices `1..=horizon`.
pub fn plot_data(result: &SimResult) -> PlotTable {
    let mut rows = Vec::new();
    for (id, points) in &result.aggregate.series {
        for (k, p) in points.iter().enumerate() {
            rows.push(PlotRow {
                replication: None,
                time: k as u64 + 1,
                player: id.clone(),
                rating: p.mean,
                band_low: Some(p.low),
                band_high: Some(p.high),
            });
        }
    }
    for (r, rep) in result.replications.iter().enumerate() {
        rows.extend(history_rows(&rep.history, Some(r)));
    }
    PlotTable { rows }
}

/// Rows for one history: the rating of every pool player after each game,
/// keyed by the game's time index.
pub fn history_rows(history: &RatingHistory, replication: Option<usize>) -> Vec<PlotRow> {
    let mut rows = Vec::new();
    for (snap, step) in history.snapshots().skip(1).zip(history.steps()) {
        for (id, rating) in snap.iter() {
            rows.push(PlotRow {
                replication,
                time: step.time_index,
                player: id.clone(),
                rating,
                band_low: None,
                band_high: None,
            });
        }
    }
    rows
}

fn opt_field(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl PlotTable {
    /// Writes the table as CSV with full-precision (round-trip exact) numbers.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(PLOT_HEADER).map_err(io)?;
        for row in &self.rows {
            w.write_record([
                row.replication
                    .map_or_else(|| AGGREGATE_LABEL.to_string(), |r| r.to_string()),
                row.time.to_string(),
                row.player.to_string(),
                row.rating.to_string(),
                opt_field(row.band_low),
                opt_field(row.band_high),
            ])
            .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let headers = reader
            .headers()
            .map_err(|e| Error::parse(1, "header", e.to_string()))?
            .clone();
        if headers.iter().ne(PLOT_HEADER) {
            return Err(Error::parse(1, "header", format!("expected {}", PLOT_HEADER.join(","))));
        }
        let mut rows = Vec::new();
        for (k, rec) in reader.records().enumerate() {
            let line = k + 2;
            let rec = rec.map_err(|e| Error::parse(line, "record", e.to_string()))?;
            let field = |i: usize| rec.get(i).unwrap_or("");
            let number = |i: usize| -> Result<f64> {
                field(i)
                    .parse::<f64>()
                    .map_err(|e| Error::parse(line, PLOT_HEADER[i], e.to_string()))
            };
            let optional = |i: usize| -> Result<Option<f64>> {
                if field(i).is_empty() {
                    Ok(None)
                } else {
                    number(i).map(Some)
                }
            };
            rows.push(PlotRow {
                replication: match field(0) {
                    AGGREGATE_LABEL => None,
                    s => Some(s.parse().map_err(|_| Error::parse(line, "replication", format!("`{s}`")))?),
                },
                time: field(1)
                    .parse()
                    .map_err(|_| Error::parse(line, "time", format!("`{}`", field(1))))?,
                player: PlayerId::new(field(2)).map_err(|e| Error::parse(line, "player", e.to_string()))?,
                rating: number(3)?,
                band_low: optional(4)?,
                band_high: optional(5)?,
            });
        }
        Ok(PlotTable { rows })
    }

    /// Rebuilds the aggregate band series from the aggregate rows.
    pub fn aggregate(&self) -> Result<Aggregate> {
        let mut series: BTreeMap<PlayerId, Vec<(u64, BandPoint)>> = BTreeMap::new();
        for row in self.rows.iter().filter(|r| r.replication.is_none()) {
            let (Some(low), Some(high)) = (row.band_low, row.band_high) else {
                return Err(Error::validation(format!(
                    "aggregate row for `{}` at time {} lacks band fields",
                    row.player, row.time
                )));
            };
            series.entry(row.player.clone()).or_default().push((
                row.time,
                BandPoint {
                    mean: row.rating,
                    low,
                    high,
                },
            ));
        }
        Ok(Aggregate {
            series: series
                .into_iter()
                .map(|(id, mut pts)| {
                    pts.sort_by_key(|(t, _)| *t);
                    (id, pts.into_iter().map(|(_, p)| p).collect())
                })
                .collect(),
        })
    }
}
