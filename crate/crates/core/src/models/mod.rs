//! Outcome models: log-likelihood of an observed game and its score, i.e. the
//! gradient of the log-likelihood with respect to the participants' ratings.
//!
//! Every model depends on the ratings only through their differences, so the
//! scores of a game always sum to zero and translating all ratings by a
//! constant changes nothing.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::types::{GameOutcome, ModelParams, PlayerId, RatingVector};

pub mod elo_classic;
pub mod margin;
pub mod ranking;
pub mod wdl;
pub mod win_loss;

/// Gradient of the log-likelihood of one game with respect to the ratings.
///
/// Only participants are stored; every other player has score zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScoreVector {
    entries: BTreeMap<PlayerId, f64>,
}

impl ScoreVector {
    pub fn new(entries: impl IntoIterator<Item = (PlayerId, f64)>) -> Self {
        ScoreVector {
            entries: entries.into_iter().collect(),
        }
    }

    /// Score of `id`; zero for a player who did not take part.
    pub fn get(&self, id: &str) -> f64 {
        self.entries.get(id).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PlayerId, f64)> + '_ {
        self.entries.iter().map(|(id, s)| (id, *s))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.entries.values().fold(0.0, |m, s| m.max(s.abs()))
    }

    /// Largest absolute entry-wise difference over the union of both supports.
    pub fn max_abs_diff(&self, other: &ScoreVector) -> f64 {
        self.entries
            .keys()
            .chain(other.entries.keys())
            .map(|id| (self.get(id.as_str()) - other.get(id.as_str())).abs())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: f64) -> ScoreVector {
        ScoreVector::new(self.iter().map(|(id, s)| (id.clone(), s * c)))
    }

    pub(crate) fn add_scaled(&mut self, other: &ScoreVector, c: f64) {
        for (id, s) in other.iter() {
            *self.entries.entry(id.clone()).or_insert(0.0) += c * s;
        }
    }
}

/// The four likelihood-based outcome models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OutcomeModel {
    /// Logistic win/loss.
    WinLoss,
    /// Skellam-distributed point difference.
    Margin,
    /// Ordered logit over win/draw/loss.
    WinDrawLoss,
    /// Plackett-Luce over complete rankings.
    Ranking,
}

impl OutcomeModel {
    pub const ALL: [OutcomeModel; 4] = [
        OutcomeModel::WinLoss,
        OutcomeModel::Margin,
        OutcomeModel::WinDrawLoss,
        OutcomeModel::Ranking,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OutcomeModel::WinLoss => "win_loss",
            OutcomeModel::Margin => "margin",
            OutcomeModel::WinDrawLoss => "win_draw_loss",
            OutcomeModel::Ranking => "ranking",
        }
    }

    /// Whether `outcome` has the shape this model consumes.
    pub fn accepts(self, outcome: &GameOutcome) -> bool {
        matches!(
            (self, outcome),
            (OutcomeModel::WinLoss, GameOutcome::WinLoss(_))
                | (OutcomeModel::Margin, GameOutcome::Margin(_))
                | (OutcomeModel::WinDrawLoss, GameOutcome::WinDrawLoss(_))
                | (OutcomeModel::Ranking, GameOutcome::Ranking(_))
        )
    }

    pub fn log_likelihood(
        self,
        ratings: &RatingVector,
        outcome: &GameOutcome,
        params: &ModelParams,
    ) -> Result<f64> {
        match (self, outcome) {
            (OutcomeModel::WinLoss, GameOutcome::WinLoss(o)) => {
                win_loss::log_likelihood(ratings, o, params)
            }
            (OutcomeModel::Margin, GameOutcome::Margin(o)) => {
                margin::log_likelihood(ratings, o, params)
            }
            (OutcomeModel::WinDrawLoss, GameOutcome::WinDrawLoss(o)) => {
                wdl::log_likelihood(ratings, o, params)
            }
            (OutcomeModel::Ranking, GameOutcome::Ranking(o)) => {
                ranking::log_likelihood(ratings, o, params)
            }
            _ => Err(self.mismatch(outcome)),
        }
    }

    pub fn score(
        self,
        ratings: &RatingVector,
        outcome: &GameOutcome,
        params: &ModelParams,
    ) -> Result<ScoreVector> {
        match (self, outcome) {
            (OutcomeModel::WinLoss, GameOutcome::WinLoss(o)) => win_loss::score(ratings, o, params),
            (OutcomeModel::Margin, GameOutcome::Margin(o)) => margin::score(ratings, o, params),
            (OutcomeModel::WinDrawLoss, GameOutcome::WinDrawLoss(o)) => {
                wdl::score(ratings, o, params)
            }
            (OutcomeModel::Ranking, GameOutcome::Ranking(o)) => ranking::score(ratings, o, params),
            _ => Err(self.mismatch(outcome)),
        }
    }

    pub(crate) fn mismatch(self, outcome: &GameOutcome) -> Error {
        Error::ModelMismatch {
            model: self.name(),
            outcome: outcome.kind_name(),
        }
    }
}

impl fmt::Display for OutcomeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OutcomeModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "win_loss" | "winloss" => Ok(OutcomeModel::WinLoss),
            "margin" | "skellam" => Ok(OutcomeModel::Margin),
            "win_draw_loss" | "windrawloss" | "wdl" => Ok(OutcomeModel::WinDrawLoss),
            "ranking" | "plackett_luce" => Ok(OutcomeModel::Ranking),
            other => Err(Error::validation(format!("unknown outcome model `{other}`"))),
        }
    }
}

/// Logistic function, evaluated without overflow for either sign of `x`.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow.
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// `ln sigmoid(x)`.
pub fn log_sigmoid(x: f64) -> f64 {
    -softplus(-x)
}

/// `ln(e^a + e^b)`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + (-(a - b).abs()).exp().ln_1p()
}

pub(crate) fn pair_score(a: &PlayerId, b: &PlayerId, score_a: f64) -> ScoreVector {
    ScoreVector::new([(a.clone(), score_a), (b.clone(), -score_a)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_is_stable_at_extremes() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert_eq!(sigmoid(800.0), 1.0);
        assert_eq!(sigmoid(-800.0), 0.0);
        assert!((sigmoid(2.0) + sigmoid(-2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn softplus_matches_naive_in_safe_range() {
        for &x in &[-30.0, -1.0, 0.0, 0.5, 3.0, 30.0] {
            let naive = (1.0f64 + f64::exp(x)).ln();
            assert!((softplus(x) - naive).abs() < 1e-14, "x = {x}");
        }
        assert_eq!(softplus(1000.0), 1000.0);
        assert!(log_sigmoid(-1000.0).is_finite());
    }

    #[test]
    fn log_add_exp_handles_infinities() {
        assert_eq!(log_add_exp(f64::NEG_INFINITY, 2.0), 2.0);
        assert!((log_add_exp(0.0, 0.0) - 2f64.ln()).abs() < 1e-15);
        assert!((log_add_exp(1000.0, 1000.0) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn model_names_round_trip() {
        for m in OutcomeModel::ALL {
            assert_eq!(m.name().parse::<OutcomeModel>().unwrap(), m);
        }
        assert!("chess".parse::<OutcomeModel>().is_err());
    }
}
