//! Ordered-logit win/draw/loss model with draw threshold `delta`.
//!
//! With `x = alpha * (r_a - r_b)`:
//!
//! | outcome | probability                          | score of A                                |
//! |---------|--------------------------------------|-------------------------------------------|
//! | A wins  | `sigmoid(x - delta)`                 | `alpha * sigmoid(delta - x)`              |
//! | draw    | `sigmoid(delta - x) - sigmoid(-delta - x)` | `-alpha sinh(x) / (cosh(delta) + cosh(x))` |
//! | B wins  | `sigmoid(-delta - x)`                | `-alpha * sigmoid(delta + x)`             |
//!
//! A draw has probability zero when `delta == 0`; observing one is reported as
//! [`Error::DegenerateLikelihood`].

use super::{log_sigmoid, pair_score, sigmoid, ScoreVector};
use crate::error::{Error, Result};
use crate::types::{ModelParams, RatingVector, WdlResult, WinDrawLoss};

/// Probabilities of (A wins, draw, B wins).
pub fn probabilities(x: f64, delta: f64) -> [f64; 3] {
    [
        sigmoid(x - delta),
        sigmoid(delta - x) - sigmoid(-delta - x),
        sigmoid(-delta - x),
    ]
}

fn degenerate_draw() -> Error {
    Error::DegenerateLikelihood("draw observed with draw threshold delta = 0".into())
}

pub fn log_prob(result: WdlResult, x: f64, delta: f64) -> Result<f64> {
    match result {
        WdlResult::AWins => Ok(log_sigmoid(x - delta)),
        WdlResult::BWins => Ok(log_sigmoid(-delta - x)),
        WdlResult::Draw => {
            if delta <= 0.0 {
                return Err(degenerate_draw());
            }
            // ln(sigmoid(hi) - sigmoid(lo)) = ln sigmoid(hi) + ln(1 - e^(ln sigmoid(lo) - ln sigmoid(hi)))
            let hi = log_sigmoid(delta - x);
            let lo = log_sigmoid(-delta - x);
            Ok(hi + (-(lo - hi).exp_m1()).ln())
        }
    }
}

pub fn score_a(result: WdlResult, x: f64, delta: f64, alpha: f64) -> Result<f64> {
    match result {
        WdlResult::AWins => Ok(alpha * sigmoid(delta - x)),
        WdlResult::BWins => Ok(-alpha * sigmoid(delta + x)),
        WdlResult::Draw => {
            if delta <= 0.0 {
                return Err(degenerate_draw());
            }
            let (cosh_x, cosh_d) = (x.cosh(), delta.cosh());
            if cosh_x.is_finite() && cosh_d.is_finite() {
                Ok(-alpha * x.sinh() / (cosh_d + cosh_x))
            } else {
                // Same expression divided through by cosh(x).
                Ok(-alpha * x.tanh() / (1.0 + (delta.abs() - x.abs()).exp()))
            }
        }
    }
}

fn scaled_diff(ratings: &RatingVector, outcome: &WinDrawLoss, params: &ModelParams) -> Result<f64> {
    let ra = ratings.require(outcome.player_a().as_str())?;
    let rb = ratings.require(outcome.player_b().as_str())?;
    Ok(params.alpha() * (ra - rb))
}

pub fn log_likelihood(
    ratings: &RatingVector,
    outcome: &WinDrawLoss,
    params: &ModelParams,
) -> Result<f64> {
    let x = scaled_diff(ratings, outcome, params)?;
    log_prob(outcome.result(), x, params.delta())
}

pub fn score(ratings: &RatingVector, outcome: &WinDrawLoss, params: &ModelParams) -> Result<ScoreVector> {
    let x = scaled_diff(ratings, outcome, params)?;
    let s = score_a(outcome.result(), x, params.delta(), params.alpha())?;
    Ok(pair_score(outcome.player_a(), outcome.player_b(), s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::win_loss;
    use crate::types::PlayerId;

    fn game(result: WdlResult) -> WinDrawLoss {
        WinDrawLoss::new(PlayerId::new("A").unwrap(), PlayerId::new("B").unwrap(), result).unwrap()
    }

    fn params(alpha: f64, delta: f64) -> ModelParams {
        ModelParams::new(alpha, delta, 0.1, 0.0).unwrap()
    }

    #[test]
    fn equal_ratings_category_probabilities() {
        let [pa, pd, pb] = probabilities(0.0, 1.0);
        assert!((pd - 0.462_117_157_260_009_76).abs() < 1e-15);
        assert!((pa - 0.268_941_421_369_995_12).abs() < 1e-15);
        assert_eq!(pa, pb);
    }

    #[test]
    fn categories_sum_to_one() {
        for &x in &[-30.0, -3.0, -0.2, 0.0, 0.9, 5.0, 40.0] {
            for &delta in &[0.0, 0.3, 1.0, 4.0] {
                let p = probabilities(x, delta);
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(p.iter().all(|&v| v >= 0.0));
            }
        }
    }

    #[test]
    fn zero_threshold_reduces_to_win_loss() {
        for &x in &[-2.0, 0.0, 0.4, 3.0] {
            let [pa, pd, pb] = probabilities(x, 0.0);
            assert_eq!(pd, 0.0);
            assert!((pa.ln() - win_loss::winner_log_prob(x, 1.0)).abs() < 1e-14);
            assert!((pb.ln() - win_loss::winner_log_prob(-x, 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn log_probs_match_reference() {
        // x = 0.3, delta = 0.8, evaluated with 30-digit arithmetic.
        let want = [-0.974_076_984_180_106_7, -0.986_929_322_536_735_2, -1.387_335_325_115_430_8];
        for (result, want) in WdlResult::ALL.into_iter().zip(want) {
            assert!((log_prob(result, 0.3, 0.8).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn draw_log_prob_agrees_with_cosh_form() {
        // sigmoid(d - x) - sigmoid(-d - x) == sinh(d) / (cosh(d) + cosh(x))
        for &x in &[-35.0, -2.0, 0.0, 0.7, 12.0, 35.0] {
            for &delta in &[0.05, 1.0, 3.0] {
                let direct = log_prob(WdlResult::Draw, x, delta).unwrap();
                let cosh_form = (f64::sinh(delta) / (f64::cosh(delta) + f64::cosh(x))).ln();
                assert!((direct - cosh_form).abs() < 1e-10, "x={x} delta={delta}");
            }
        }
    }

    #[test]
    fn draw_scores() {
        let r = RatingVector::from_pairs(&[("A", 0.0), ("B", 0.0)]).unwrap();
        let s = score(&r, &game(WdlResult::Draw), &params(2.0, 0.5)).unwrap();
        assert_eq!(s.get("A"), 0.0);

        let r = RatingVector::from_pairs(&[("A", 1.0), ("B", 0.0)]).unwrap();
        let s = score(&r, &game(WdlResult::Draw), &params(1.0, 1.0)).unwrap();
        assert!((s.get("A") - (-0.380_797_077_977_882_44)).abs() < 1e-15);
        assert_eq!(s.get("B"), -s.get("A"));
    }

    #[test]
    fn draw_score_survives_overflowing_cosh() {
        let s = score_a(WdlResult::Draw, 900.0, 1.0, 1.0).unwrap();
        assert!((s + 1.0).abs() < 1e-12);
        let s = score_a(WdlResult::Draw, -900.0, 1.0, 1.0).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn draw_with_zero_threshold_is_degenerate() {
        let r = RatingVector::from_pairs(&[("A", 0.0), ("B", 0.0)]).unwrap();
        let p = params(1.0, 0.0);
        assert!(matches!(
            log_likelihood(&r, &game(WdlResult::Draw), &p),
            Err(Error::DegenerateLikelihood(_))
        ));
        assert!(matches!(
            score(&r, &game(WdlResult::Draw), &p),
            Err(Error::DegenerateLikelihood(_))
        ));
        assert!(score(&r, &game(WdlResult::AWins), &p).is_ok());
    }
}
