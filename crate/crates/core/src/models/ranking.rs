//! Plackett-Luce model over complete rankings.
//!
//! Places are filled best first; each place goes to one of the remaining
//! players with probability proportional to `exp(alpha * r)`. Both the
//! log-likelihood and the score are evaluated in log space from the suffix
//! log-sum-exps `S_p = ln sum_{q >= p} exp(alpha * r_q)`.

use super::{log_add_exp, ScoreVector};
use crate::error::Result;
use crate::types::{ModelParams, Ranking, RatingVector};

/// Suffix log-sum-exps of `z`, i.e. `out[p] = ln sum_{q >= p} exp(z[q])`.
fn suffix_log_sum_exp(z: &[f64]) -> Vec<f64> {
    let mut out = vec![f64::NEG_INFINITY; z.len()];
    let mut acc = f64::NEG_INFINITY;
    for (p, &zp) in z.iter().enumerate().rev() {
        acc = log_add_exp(zp, acc);
        out[p] = acc;
    }
    out
}

/// Log-probability of the order of `ratings` (best first).
pub fn log_prob_ordered(ratings: &[f64], alpha: f64) -> f64 {
    let z: Vec<f64> = ratings.iter().map(|r| alpha * r).collect();
    let suffix = suffix_log_sum_exp(&z);
    z.iter().zip(&suffix).map(|(zp, sp)| zp - sp).sum()
}

/// Scores for `ratings` listed best first, in the same order.
///
/// The player in place `k` gets `alpha * (1 - sum_{p <= k} exp(z_k - S_p))`;
/// the inner sum is carried as a running log-sum-exp of `-S_p`.
pub fn scores_ordered(ratings: &[f64], alpha: f64) -> Vec<f64> {
    let z: Vec<f64> = ratings.iter().map(|r| alpha * r).collect();
    let suffix = suffix_log_sum_exp(&z);
    let mut prefix = f64::NEG_INFINITY;
    z.iter()
        .zip(&suffix)
        .map(|(zk, sk)| {
            prefix = log_add_exp(prefix, -sk);
            alpha * (1.0 - (zk + prefix).exp())
        })
        .collect()
}

fn ordered_ratings(ratings: &RatingVector, outcome: &Ranking) -> Result<Vec<f64>> {
    outcome
        .ranked()
        .iter()
        .map(|id| ratings.require(id.as_str()))
        .collect()
}

pub fn log_likelihood(ratings: &RatingVector, outcome: &Ranking, params: &ModelParams) -> Result<f64> {
    let r = ordered_ratings(ratings, outcome)?;
    Ok(log_prob_ordered(&r, params.alpha()))
}

pub fn score(ratings: &RatingVector, outcome: &Ranking, params: &ModelParams) -> Result<ScoreVector> {
    let r = ordered_ratings(ratings, outcome)?;
    let s = scores_ordered(&r, params.alpha());
    Ok(ScoreVector::new(outcome.ranked().iter().cloned().zip(s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::types::PlayerId;

    fn ranking(ids: &[&str]) -> Ranking {
        Ranking::new(ids.iter().map(|s| PlayerId::new(*s).unwrap()).collect()).unwrap()
    }

    #[test]
    fn two_players_reduce_to_logistic() {
        let r = RatingVector::from_pairs(&[("A", 0.0), ("B", 0.0)]).unwrap();
        let p = ModelParams::default();
        let ll = log_likelihood(&r, &ranking(&["A", "B"]), &p).unwrap();
        assert!((ll - 0.5f64.ln()).abs() < 1e-15);
        let s = score(&r, &ranking(&["A", "B"]), &p).unwrap();
        assert!((s.get("A") - 0.5).abs() < 1e-15);
        assert!((s.get("B") + 0.5).abs() < 1e-15);

        for &d in &[-3.0, 0.4, 2.0] {
            assert!((log_prob_ordered(&[d, 0.0], 1.7) - super::super::win_loss::winner_log_prob(d, 1.7)).abs() < 1e-14);
        }
    }

    #[test]
    fn three_equal_players() {
        let r = RatingVector::from_pairs(&[("A", 0.0), ("B", 0.0), ("C", 0.0)]).unwrap();
        let p = ModelParams::default();
        let ll = log_likelihood(&r, &ranking(&["A", "B", "C"]), &p).unwrap();
        assert!((ll - (1.0f64 / 6.0).ln()).abs() < 1e-15);
        let s = score(&r, &ranking(&["A", "B", "C"]), &p).unwrap();
        assert!((s.get("A") - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.get("B") - 1.0 / 6.0).abs() < 1e-15);
        assert!((s.get("C") + 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn mixed_ratings_match_reference() {
        // Best first (0.5, -1, 2) at alpha 1.3, 30-digit reference.
        assert!((log_prob_ordered(&[0.5, -1.0, 2.0], 1.3) - (-6.020_626_374_490_262)).abs() < 1e-13);
    }

    #[test]
    fn large_ratings_do_not_overflow() {
        let ll = log_prob_ordered(&[900.0, 850.0, 700.0], 1.0);
        assert!(ll.is_finite() && ll <= 0.0);
        let s = scores_ordered(&[900.0, 850.0, 700.0], 1.0);
        assert!(s.iter().all(|v| v.is_finite()));
        assert!(s.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn non_participants_have_zero_score() {
        let r = RatingVector::from_pairs(&[("A", 0.3), ("B", 0.1), ("C", -2.0), ("D", 5.0)]).unwrap();
        let s = score(&r, &ranking(&["C", "A", "B"]), &ModelParams::default()).unwrap();
        assert_eq!(s.get("D"), 0.0);
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn unknown_player_is_rejected() {
        let r = RatingVector::from_pairs(&[("A", 0.0), ("B", 0.0)]).unwrap();
        assert!(matches!(
            log_likelihood(&r, &ranking(&["A", "B", "Q"]), &ModelParams::default()),
            Err(Error::UnknownPlayer(_))
        ));
    }
}
