//! Classical Elo with its conventional constants: K = 16, base 10, divisor 400,
//! everyone starting at 1200.

use crate::error::Result;
use crate::types::{RatingVector, WinLoss};

pub const K: f64 = 16.0;
pub const BASE: f64 = 10.0;
pub const DIVISOR: f64 = 400.0;
pub const INITIAL_RATING: f64 = 1200.0;

/// Expected outcome of the player rated `r_a` against `r_b`.
pub fn expected(r_a: f64, r_b: f64) -> f64 {
    1.0 / (1.0 + BASE.powf(-(r_a - r_b) / DIVISOR))
}

/// New (winner, loser) ratings.
pub fn update_pair(r_winner: f64, r_loser: f64) -> (f64, f64) {
    (
        r_winner + K * (1.0 - expected(r_winner, r_loser)),
        r_loser + K * (0.0 - expected(r_loser, r_winner)),
    )
}

/// Applies one game; players other than the two participants are unchanged.
pub fn update(ratings: &RatingVector, outcome: &WinLoss) -> Result<RatingVector> {
    let w = ratings.require(outcome.winner().as_str())?;
    let l = ratings.require(outcome.loser().as_str())?;
    let (w, l) = update_pair(w, l);
    let mut out = ratings.clone();
    out.set(outcome.winner().as_str(), w)?;
    out.set(outcome.loser().as_str(), l)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::PlayerId;

    fn game(w: &str, l: &str) -> WinLoss {
        WinLoss::new(PlayerId::new(w).unwrap(), PlayerId::new(l).unwrap()).unwrap()
    }

    #[test]
    fn equal_players() {
        let r = RatingVector::from_pairs(&[("A", 1200.0), ("B", 1200.0), ("C", 1500.0)]).unwrap();
        let out = update(&r, &game("A", "B")).unwrap();
        assert_eq!(out.get("A"), Some(1208.0));
        assert_eq!(out.get("B"), Some(1192.0));
        assert_eq!(out.get("C"), Some(1500.0));
    }

    #[test]
    fn favourite_wins() {
        let r = RatingVector::from_pairs(&[("A", 1400.0), ("B", 1000.0)]).unwrap();
        let out = update(&r, &game("A", "B")).unwrap();
        assert!((out.get("A").unwrap() - (1400.0 + 16.0 / 11.0)).abs() < 1e-12);
        assert!((out.get("B").unwrap() - (1000.0 - 16.0 / 11.0)).abs() < 1e-12);
    }

    #[test]
    fn underdog_wins() {
        let r = RatingVector::from_pairs(&[("A", 1400.0), ("B", 1000.0)]).unwrap();
        let out = update(&r, &game("B", "A")).unwrap();
        assert!((out.get("B").unwrap() - (1000.0 + 160.0 / 11.0)).abs() < 1e-12);
        assert!((out.get("A").unwrap() - (1400.0 - 160.0 / 11.0)).abs() < 1e-12);
    }
}
