//! Randomized property suite behind `scorerate verify`.
//!
//! Each family draws its cases from its own ChaCha8 stream, so residuals are
//! reproducible from the seed alone.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{replay, EngineConfig, EngineModel};
use crate::error::{Error, Result};
use crate::models::{elo_classic, OutcomeModel, ScoreVector};
use crate::oracle::{self, Truncation, DEFAULT_FD_STEP};
use crate::sim::{replication_rng, sample_outcome};
use crate::types::{GameOutcome, GameRecord, ModelParams, PlayerId, RatingVector, WdlResult, WinLoss};

pub const ZERO_SUM_TOL: f64 = 1e-12;
pub const ZERO_EXPECTATION_TOL: f64 = 1e-8;
pub const FD_REL_TOL: f64 = 1e-6;
pub const TRANSLATION_TOL: f64 = 1e-9;
pub const ELO_TOL: f64 = 1e-9;

/// Deliberate defects used to check that the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Negates both players' scores after a draw.
    DrawSignFlip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Cases per model for the cheap families; enumeration uses a fifth of
    /// this and the Elo family a tenth (at least one each).
    pub cases: usize,
    pub seed: u64,
    pub params: ModelParams,
    /// Models exercised by every family except the Elo one.
    pub models: Vec<OutcomeModel>,
    pub mutation: Option<Mutation>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            cases: 1000,
            seed: 0,
            params: ModelParams::default(),
            models: OutcomeModel::ALL.to_vec(),
            mutation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub name: &'static str,
    pub passed: bool,
    pub worst: f64,
    pub tolerance: f64,
    pub checks: usize,
}

impl PropertyReport {
    fn new(name: &'static str, worst: f64, tolerance: f64, checks: usize) -> Self {
        PropertyReport {
            name,
            // NaN residuals fail.
            passed: worst <= tolerance,
            worst,
            tolerance,
            checks,
        }
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<22} {}  worst={:.3e}  tol={:.0e}  checks={}",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.worst,
            self.tolerance,
            self.checks
        )
    }
}

/// Score of one game, with an optional injected defect.
pub fn score_with(
    model: OutcomeModel,
    ratings: &RatingVector,
    outcome: &GameOutcome,
    params: &ModelParams,
    mutation: Option<Mutation>,
) -> Result<ScoreVector> {
    let s = model.score(ratings, outcome, params)?;
    Ok(match (mutation, outcome) {
        (Some(Mutation::DrawSignFlip), GameOutcome::WinDrawLoss(g)) if g.result() == WdlResult::Draw => s.scaled(-1.0),
        _ => s,
    })
}

fn players(m: usize) -> Vec<PlayerId> {
    (0..m)
        .map(|i| PlayerId::new(format!("p{i}")).expect("valid id"))
        .collect()
}

/// Participants, random ratings on roughly `[-3, 3] / alpha`, and an outcome
/// drawn at independent random skills.
pub fn random_case(
    model: OutcomeModel,
    max_rank: usize,
    params: &ModelParams,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<PlayerId>, RatingVector, GameOutcome)> {
    let m = match model {
        OutcomeModel::Ranking => rng.random_range(2..=max_rank.max(2)),
        _ => 2,
    };
    let who = players(m);
    let spread = 3.0 / params.alpha();
    let draw = |rng: &mut ChaCha8Rng| {
        RatingVector::new(who.iter().cloned().map(|id| (id, rng.random_range(-spread..=spread))))
    };
    let ratings = draw(rng)?;
    let skills = draw(rng)?;
    let outcome = sample_outcome(model, &who, &skills, params, rng)?;
    Ok((who, ratings, outcome))
}

fn family_rng(opts: &VerifyOptions, family: u64) -> ChaCha8Rng {
    replication_rng(opts.seed, family)
}

/// Scores of every game sum to zero.
pub fn zero_sum(opts: &VerifyOptions) -> Result<PropertyReport> {
    let mut rng = family_rng(opts, 1);
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    for &model in &opts.models {
        for _ in 0..opts.cases {
            let (_, ratings, outcome) = random_case(model, 8, &opts.params, &mut rng)?;
            let s = score_with(model, &ratings, &outcome, &opts.params, opts.mutation)?;
            worst = worst.max(s.sum().abs());
            checks += 1;
        }
    }
    Ok(PropertyReport::new("zero_sum", worst, ZERO_SUM_TOL, checks))
}

/// Exact expectation of the score at the true ratings vanishes.
pub fn zero_expected_score(opts: &VerifyOptions) -> Result<PropertyReport> {
    let mut rng = family_rng(opts, 2);
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    let cases = (opts.cases / 5).max(1);
    for &model in &opts.models {
        for _ in 0..cases {
            let (who, ratings, _) = random_case(model, 6, &opts.params, &mut rng)?;
            let space = oracle::enumerate_outcomes(model, &who, &ratings, &opts.params, Truncation::default())?;
            let e = space.expectation(|y| score_with(model, &ratings, y, &opts.params, opts.mutation))?;
            worst = worst.max(e.max_abs());
            checks += 1;
        }
    }
    Ok(PropertyReport::new("zero_expected_score", worst, ZERO_EXPECTATION_TOL, checks))
}

/// Relative gap between a closed-form and a finite-difference score.
pub fn fd_residual(closed: &ScoreVector, fd: &ScoreVector) -> f64 {
    closed
        .iter()
        .map(|(id, c)| (c - fd.get(id.as_str())).abs() / c.abs().max(1.0))
        .fold(0.0, f64::max)
}

/// Closed-form scores agree with central finite differences.
pub fn fd_agreement(opts: &VerifyOptions) -> Result<PropertyReport> {
    let mut rng = family_rng(opts, 3);
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    for &model in &opts.models {
        for _ in 0..opts.cases {
            let (_, ratings, outcome) = random_case(model, 8, &opts.params, &mut rng)?;
            let closed = score_with(model, &ratings, &outcome, &opts.params, opts.mutation)?;
            let fd = oracle::finite_diff_score(model, &ratings, &outcome, &opts.params, DEFAULT_FD_STEP)?;
            worst = worst.max(fd_residual(&closed, &fd));
            checks += 1;
        }
    }
    Ok(PropertyReport::new("fd_agreement", worst, FD_REL_TOL, checks))
}

/// Every outcome category of every model, seen from one focal participant.
pub fn outcome_categories(model: OutcomeModel) -> Vec<(PlayerId, GameOutcome)> {
    let who = players(4);
    let (a, b) = (who[0].clone(), who[1].clone());
    let pair = |o: Result<GameOutcome>| o.expect("valid fixture");
    match model {
        OutcomeModel::WinLoss => vec![
            (a.clone(), pair(WinLoss::new(a.clone(), b.clone()).map(Into::into))),
            (a.clone(), pair(WinLoss::new(b.clone(), a.clone()).map(Into::into))),
        ],
        OutcomeModel::Margin => [(0, 0), (3, 1), (1, 3), (7, 0), (0, 7)]
            .into_iter()
            .map(|(x, y)| (a.clone(), pair(crate::types::Margin::new(a.clone(), x, b.clone(), y).map(Into::into))))
            .collect(),
        OutcomeModel::WinDrawLoss => WdlResult::ALL
            .into_iter()
            .map(|r| (a.clone(), pair(crate::types::WinDrawLoss::new(a.clone(), b.clone(), r).map(Into::into))))
            .collect(),
        OutcomeModel::Ranking => (0..who.len())
            .map(|place| {
                let mut order: Vec<PlayerId> = who[1..].to_vec();
                order.insert(place, a.clone());
                (a.clone(), pair(crate::types::Ranking::new(order).map(Into::into)))
            })
            .collect(),
    }
}

/// Largest increase of the focal player's score between consecutive points of
/// a grid over its own rating; negative means strictly decreasing.
pub fn monotonicity_residual(
    model: OutcomeModel,
    focal: &PlayerId,
    outcome: &GameOutcome,
    others: &RatingVector,
    grid: &[f64],
    params: &ModelParams,
    mutation: Option<Mutation>,
) -> Result<f64> {
    let mut prev: Option<f64> = None;
    let mut worst = f64::NEG_INFINITY;
    for &r in grid {
        let ratings = others.with_rating(focal.as_str(), r)?;
        let s = score_with(model, &ratings, outcome, params, mutation)?.get(focal.as_str());
        if let Some(p) = prev {
            worst = worst.max(s - p);
        }
        prev = Some(s);
    }
    Ok(worst)
}

/// The grid of 101 points on `[-5, 5]`.
pub fn rating_grid() -> Vec<f64> {
    (0..=100).map(|k| -5.0 + 0.1 * k as f64).collect()
}

/// Each score strictly decreases in the player's own rating.
pub fn monotonicity(opts: &VerifyOptions) -> Result<PropertyReport> {
    let mut rng = family_rng(opts, 4);
    let grid = rating_grid();
    let mut worst = f64::NEG_INFINITY;
    let mut checks = 0;
    let cases = (opts.cases / 50).max(1);
    for &model in &opts.models {
        for (focal, outcome) in outcome_categories(model) {
            for _ in 0..cases {
                let others = RatingVector::new(
                    outcome
                        .participants()
                        .into_iter()
                        .map(|id| (id.clone(), rng.random_range(-1.0..=1.0))),
                )?;
                let w = monotonicity_residual(model, &focal, &outcome, &others, &grid, &opts.params, opts.mutation)?;
                worst = worst.max(w);
                checks += 1;
            }
        }
    }
    // Report the largest step as a residual against a zero threshold.
    let mut report = PropertyReport::new("monotonicity", worst, 0.0, checks);
    report.passed = worst < 0.0;
    Ok(report)
}

/// Shifting all ratings by a constant leaves every score unchanged.
pub fn translation_invariance(opts: &VerifyOptions) -> Result<PropertyReport> {
    let mut rng = family_rng(opts, 5);
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    for &model in &opts.models {
        for _ in 0..opts.cases {
            let (_, ratings, outcome) = random_case(model, 8, &opts.params, &mut rng)?;
            let c = rng.random_range(-100.0..=100.0);
            let base = score_with(model, &ratings, &outcome, &opts.params, opts.mutation)?;
            let moved = score_with(model, &ratings.shifted(c)?, &outcome, &opts.params, opts.mutation)?;
            worst = worst.max(fd_residual(&base, &moved));
            checks += 1;
        }
    }
    Ok(PropertyReport::new("translation_invariance", worst, TRANSLATION_TOL, checks))
}

/// Random win/loss log over `n_players` players.
pub fn random_win_loss_log(n_players: usize, games: usize, rng: &mut ChaCha8Rng) -> Result<(Vec<PlayerId>, Vec<GameRecord>)> {
    if n_players < 2 {
        return Err(Error::validation("need at least 2 players"));
    }
    let pool = players(n_players);
    let log = (0..games)
        .map(|t| {
            let i = rng.random_range(0..n_players);
            let j = (i + rng.random_range(1..n_players)) % n_players;
            WinLoss::new(pool[i].clone(), pool[j].clone()).map(|g| GameRecord::new(t as u64 + 1, g))
        })
        .collect::<Result<_>>()?;
    Ok((pool, log))
}

/// Largest gap between score-driven and classical Elo replays of one log.
pub fn elo_deviation(pool: &[PlayerId], log: &[GameRecord]) -> Result<f64> {
    let sd = EngineConfig::new(EngineModel::WinLoss, ModelParams::elo_equivalent(), pool.iter().cloned());
    let classic = EngineConfig::new(EngineModel::EloClassic, ModelParams::default(), pool.iter().cloned());
    let (a, b) = (replay(log, &sd)?, replay(log, &classic)?);
    let mut worst: f64 = 0.0;
    for (x, y) in a.snapshots().zip(b.snapshots()) {
        for (id, r) in x.iter() {
            worst = worst.max((r - y.require(id.as_str())?).abs());
        }
    }
    Ok(worst)
}

/// Score-driven win/loss on the Elo scale reproduces classical Elo.
pub fn elo_equivalence(opts: &VerifyOptions) -> Result<PropertyReport> {
    let mut rng = family_rng(opts, 6);
    let logs = (opts.cases / 10).max(1);
    let mut worst: f64 = 0.0;
    for _ in 0..logs {
        let (pool, log) = random_win_loss_log(10, 200, &mut rng)?;
        worst = worst.max(elo_deviation(&pool, &log)?);
    }
    debug_assert_eq!(elo_classic::INITIAL_RATING, ModelParams::elo_equivalent().r_init());
    Ok(PropertyReport::new("elo_equivalence", worst, ELO_TOL, logs))
}

/// Runs all six families in a fixed order.
pub fn run_suite(opts: &VerifyOptions) -> Result<Vec<PropertyReport>> {
    Ok(vec![
        zero_sum(opts)?,
        zero_expected_score(opts)?,
        fd_agreement(opts)?,
        monotonicity(opts)?,
        translation_invariance(opts)?,
        elo_equivalence(opts)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyOptions {
        VerifyOptions {
            cases: 100,
            seed: 17,
            ..VerifyOptions::default()
        }
    }

    #[test]
    fn default_suite_passes() {
        for r in run_suite(&small()).unwrap() {
            assert!(r.passed, "{r}");
        }
    }

    #[test]
    fn sign_flip_is_caught() {
        let opts = VerifyOptions {
            mutation: Some(Mutation::DrawSignFlip),
            ..small()
        };
        let reports = run_suite(&opts).unwrap();
        let failed: Vec<_> = reports.iter().filter(|r| !r.passed).map(|r| r.name).collect();
        assert!(failed.contains(&"zero_expected_score"), "{failed:?}");
        assert!(failed.contains(&"fd_agreement"), "{failed:?}");
        assert!(!failed.contains(&"elo_equivalence"));
    }

    #[test]
    fn residuals_are_reproducible() {
        assert_eq!(run_suite(&small()).unwrap(), run_suite(&small()).unwrap());
    }

    #[test]
    fn categories_cover_every_outcome() {
        assert_eq!(outcome_categories(OutcomeModel::WinLoss).len(), 2);
        assert_eq!(outcome_categories(OutcomeModel::WinDrawLoss).len(), 3);
        assert_eq!(outcome_categories(OutcomeModel::Ranking).len(), 4);
    }
}
