//! Logistic win/loss model.
//!
//! The winner's probability is `sigmoid(alpha * (r_winner - r_loser))`. The
//! score of the winner is `alpha * sigmoid(-alpha * diff)`, bounded in
//! `(0, alpha)`; the loser gets the negation.

use super::{log_sigmoid, pair_score, sigmoid, ScoreVector};
use crate::error::Result;
use crate::types::{ModelParams, RatingVector, WinLoss};

/// `ln P(winner beats loser)` from the rating difference `r_winner - r_loser`.
pub fn winner_log_prob(diff: f64, alpha: f64) -> f64 {
    log_sigmoid(alpha * diff)
}

/// Score of the winner given `r_winner - r_loser`.
pub fn winner_score(diff: f64, alpha: f64) -> f64 {
    alpha * sigmoid(-alpha * diff)
}

pub fn log_likelihood(ratings: &RatingVector, outcome: &WinLoss, params: &ModelParams) -> Result<f64> {
    let diff = ratings.require(outcome.winner().as_str())? - ratings.require(outcome.loser().as_str())?;
    Ok(winner_log_prob(diff, params.alpha()))
}

pub fn score(ratings: &RatingVector, outcome: &WinLoss, params: &ModelParams) -> Result<ScoreVector> {
    let diff = ratings.require(outcome.winner().as_str())? - ratings.require(outcome.loser().as_str())?;
    Ok(pair_score(
        outcome.winner(),
        outcome.loser(),
        winner_score(diff, params.alpha()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::types::PlayerId;

    fn game(w: &str, l: &str) -> WinLoss {
        WinLoss::new(PlayerId::new(w).unwrap(), PlayerId::new(l).unwrap()).unwrap()
    }

    fn params(alpha: f64) -> ModelParams {
        ModelParams::default().with_alpha(alpha).unwrap()
    }

    #[test]
    fn equal_ratings_give_half() {
        let r = RatingVector::from_pairs(&[("A", 0.0), ("B", 0.0), ("C", 3.0)]).unwrap();
        let ll = log_likelihood(&r, &game("A", "B"), &params(1.0)).unwrap();
        assert!((ll - 0.5f64.ln()).abs() < 1e-15);
        let s = score(&r, &game("A", "B"), &params(1.0)).unwrap();
        assert_eq!(s.get("A"), 0.5);
        assert_eq!(s.get("B"), -0.5);
        assert_eq!(s.get("C"), 0.0);
    }

    #[test]
    fn saturates_for_large_gap() {
        let r = RatingVector::from_pairs(&[("A", 50.0), ("B", 0.0)]).unwrap();
        let ll = log_likelihood(&r, &game("A", "B"), &params(1.0)).unwrap();
        let tiny = (-50f64).exp();
        assert!(ll < 0.0);
        assert!((ll + tiny).abs() < 1e-30);
        let s = score(&r, &game("A", "B"), &params(1.0)).unwrap();
        assert!((s.get("A") - tiny).abs() < 1e-30);
    }

    #[test]
    fn unit_gap_matches_high_precision_value() {
        // ln(1 / (1 + e^-1)) evaluated to 30 digits offline.
        let r = RatingVector::from_pairs(&[("A", 1.0), ("B", 0.0)]).unwrap();
        let ll = log_likelihood(&r, &game("A", "B"), &params(1.0)).unwrap();
        assert!((ll - (-0.313_261_687_518_222_834)).abs() < 1e-15);
    }

    #[test]
    fn score_is_bounded_by_alpha() {
        let r = RatingVector::from_pairs(&[("A", -40.0), ("B", 0.0)]).unwrap();
        let s = score(&r, &game("A", "B"), &params(2.5)).unwrap();
        assert!(s.get("A") > 0.0 && s.get("A") <= 2.5);
        assert_eq!(s.sum(), 0.0);
    }

    #[test]
    fn unknown_player_is_rejected() {
        let r = RatingVector::from_pairs(&[("A", 0.0)]).unwrap();
        assert!(matches!(
            score(&r, &game("A", "Z"), &params(1.0)),
            Err(Error::UnknownPlayer(id)) if id == "Z"
        ));
    }
}
