//! Margin-of-victory model: the point difference `d = points_a - points_b` is
//! Skellam distributed with rates `exp(x)` and `exp(-x)`, where
//! `x = alpha * (r_a - r_b)`.
//!
//! The log-pmf is `x * d - 2 cosh(x) + ln I_d(2)` and the score of player A is
//! `alpha * (d - 2 sinh(x))`, which is unbounded: a narrow win against a much
//! weaker opponent loses rating.

use super::{pair_score, ScoreVector};
use crate::error::Result;
use crate::types::{Margin, ModelParams, RatingVector};

const SERIES_REL_TOL: f64 = 1e-18;

/// `ln I_k(2)` for the modified Bessel function of the first kind at the fixed
/// argument 2.
///
/// With argument 2 the series is `sum_m 1 / (m! (m + |k|)!)`. The leading
/// `1 / |k|!` is factored out and handled in log space so that large orders do
/// not underflow.
pub fn ln_bessel_i_at_two(k: i64) -> f64 {
    let k = k.unsigned_abs();
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut m = 1u64;
    loop {
        term /= (m * (m + k)) as f64;
        sum += term;
        if term < SERIES_REL_TOL * sum {
            break;
        }
        m += 1;
    }
    sum.ln() - ln_factorial(k)
}

fn ln_factorial(n: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// Log-pmf of the point difference `d` given `x = alpha * (r_a - r_b)`.
pub fn log_pmf(d: i64, x: f64) -> f64 {
    x * d as f64 - 2.0 * x.cosh() + ln_bessel_i_at_two(d)
}

/// Score of player A given `x = alpha * (r_a - r_b)`.
pub fn score_a(d: i64, x: f64, alpha: f64) -> f64 {
    alpha * (d as f64 - 2.0 * x.sinh())
}

/// Mean `2 sinh(x)` and variance `2 cosh(x)` of the point difference.
pub fn moments(x: f64) -> (f64, f64) {
    (2.0 * x.sinh(), 2.0 * x.cosh())
}

fn scaled_diff(ratings: &RatingVector, outcome: &Margin, params: &ModelParams) -> Result<f64> {
    let ra = ratings.require(outcome.player_a().as_str())?;
    let rb = ratings.require(outcome.player_b().as_str())?;
    Ok(params.alpha() * (ra - rb))
}

pub fn log_likelihood(ratings: &RatingVector, outcome: &Margin, params: &ModelParams) -> Result<f64> {
    let x = scaled_diff(ratings, outcome, params)?;
    Ok(log_pmf(outcome.difference(), x))
}

pub fn score(ratings: &RatingVector, outcome: &Margin, params: &ModelParams) -> Result<ScoreVector> {
    let x = scaled_diff(ratings, outcome, params)?;
    Ok(pair_score(
        outcome.player_a(),
        outcome.player_b(),
        score_a(outcome.difference(), x, params.alpha()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::PlayerId;

    fn game(pa: u64, pb: u64) -> Margin {
        Margin::new(PlayerId::new("A").unwrap(), pa, PlayerId::new("B").unwrap(), pb).unwrap()
    }

    /// Direct summation of `sum_m 1/(m!)^2`, independent of the log-scaled series.
    fn bessel_i0_two_direct() -> f64 {
        let mut sum = 0.0;
        let mut fact = 1.0;
        for m in 0..40 {
            if m > 0 {
                fact *= m as f64;
            }
            sum += 1.0 / (fact * fact);
        }
        sum
    }

    #[test]
    fn bessel_order_zero_matches_direct_sum() {
        let direct = bessel_i0_two_direct();
        assert!((direct - 2.279_585_302_336_067).abs() < 1e-15);
        assert!((ln_bessel_i_at_two(0) - direct.ln()).abs() < 1e-15);
    }

    #[test]
    fn bessel_large_orders_do_not_underflow() {
        // Reference values computed to 30 digits offline.
        assert!((ln_bessel_i_at_two(5) - (-4.622_755_981_313_549_9)).abs() < 1e-13);
        assert!((ln_bessel_i_at_two(-40) - (-110.296_256_547_456_91)).abs() < 1e-11);
        assert!((ln_bessel_i_at_two(300) - (-1414.902_527_704_205_4)).abs() < 1e-9);
    }

    #[test]
    fn equal_ratings_draw_log_likelihood() {
        let r = RatingVector::from_pairs(&[("A", 0.0), ("B", 0.0)]).unwrap();
        let ll = log_likelihood(&r, &game(2, 2), &ModelParams::default()).unwrap();
        assert!((ll - (-1.176_006_458_517_043_7)).abs() < 1e-14);
    }

    #[test]
    fn pmf_is_symmetric_at_equal_ratings() {
        for d in 0..30 {
            assert!((log_pmf(d, 0.0) - log_pmf(-d, 0.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn pmf_mass_is_one_on_truncated_support() {
        for &x in &[-2.0, -0.7, 0.0, 1.3, 2.0] {
            let mass: f64 = (-60..=60).map(|d| log_pmf(d, x).exp()).sum();
            assert!((mass - 1.0).abs() < 1e-12, "x = {x}: {mass}");
        }
    }

    #[test]
    fn off_centre_log_likelihood() {
        // x = 0.7, d = -3, reference from an arbitrary-precision evaluation.
        assert!((log_pmf(-3, 0.7) - (-6.158_022_719_016_59)).abs() < 1e-13);
    }

    #[test]
    fn equal_ratings_score_is_point_difference() {
        let r = RatingVector::from_pairs(&[("A", 0.0), ("B", 0.0)]).unwrap();
        let s = score(&r, &game(3, 1), &ModelParams::default()).unwrap();
        assert_eq!(s.get("A"), 2.0);
        assert_eq!(s.get("B"), -2.0);
    }

    #[test]
    fn narrow_win_against_weaker_opponent_loses_rating() {
        let r = RatingVector::from_pairs(&[("A", 1.0), ("B", -1.0)]).unwrap();
        let s = score(&r, &game(1, 0), &ModelParams::default()).unwrap();
        assert!((s.get("A") - (-6.253_720_815_694_037_5)).abs() < 1e-13);
        assert!(s.get("A") < 0.0);
    }
}
