//! Brute-force reference computations used to check the closed forms in
//! [`crate::models`]: central finite differences of the log-likelihood and
//! exact expectations over the enumerated outcome space.
//!
//! Nothing here calls a model's score to build its own answer; the only
//! shared dependency is the log-likelihood.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::models::{margin, OutcomeModel, ScoreVector};
use crate::types::{
    GameOutcome, Margin, ModelParams, PlayerId, Ranking, RatingVector, WdlResult, WinDrawLoss, WinLoss,
};

pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Largest ranking enumerated exhaustively (8! = 40 320 orders).
pub const MAX_RANKING_PLAYERS: usize = 8;
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;
const MAX_MARGIN_TRUNCATION: u32 = 1_000_000;

/// Central-difference approximation of the score of every participant.
pub fn finite_diff_score(
    model: OutcomeModel,
    ratings: &RatingVector,
    outcome: &GameOutcome,
    params: &ModelParams,
    step: f64,
) -> Result<ScoreVector> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::validation(format!("finite-difference step must be > 0, got {step}")));
    }
    let eval = |r: &RatingVector| -> Result<f64> {
        let ll = model.log_likelihood(r, outcome, params)?;
        if ll.is_finite() {
            Ok(ll)
        } else {
            Err(Error::DegenerateLikelihood(format!(
                "log-likelihood is {ll} at a perturbed point"
            )))
        }
    };
    let mut entries = Vec::new();
    for id in outcome.participants() {
        let r = ratings.require(id.as_str())?;
        let up = eval(&ratings.with_rating(id.as_str(), r + step)?)?;
        let down = eval(&ratings.with_rating(id.as_str(), r - step)?)?;
        entries.push((id.clone(), (up - down) / (2.0 * step)));
    }
    Ok(ScoreVector::new(entries))
}

/// How much of the unbounded margin support to enumerate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// Point differences in `[-D, D]`.
    Fixed(u32),
    /// Grow `D` until the bound on the omitted mass drops below `tail_tol`.
    Adaptive { tail_tol: f64 },
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Adaptive {
            tail_tol: DEFAULT_TAIL_TOLERANCE,
        }
    }
}

/// Every outcome of one game with its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeSpace {
    entries: Vec<(GameOutcome, f64)>,
    tail_bound: f64,
}

impl OutcomeSpace {
    pub fn entries(&self) -> &[(GameOutcome, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    /// Upper bound on the probability of outcomes left out by truncation;
    /// zero for finite supports, infinite if no bound could be established.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// `sum_y p(y) * f(y)` for a vector-valued `f`.
    pub fn expectation<F>(&self, mut f: F) -> Result<ScoreVector>
    where
        F: FnMut(&GameOutcome) -> Result<ScoreVector>,
    {
        let mut acc = ScoreVector::default();
        for (outcome, p) in &self.entries {
            if *p == 0.0 {
                continue;
            }
            acc.add_scaled(&f(outcome)?, *p);
        }
        Ok(acc)
    }
}

fn two_players(participants: &[PlayerId]) -> Result<(&PlayerId, &PlayerId)> {
    match participants {
        [a, b] => Ok((a, b)),
        _ => Err(Error::validation(format!(
            "pairwise model needs exactly 2 participants, got {}",
            participants.len()
        ))),
    }
}

/// Enumerates the support of `model` for a game between `participants`,
/// with probabilities evaluated at `ratings`.
///
/// For the margin model the order of the participants fixes who is player A.
pub fn enumerate_outcomes(
    model: OutcomeModel,
    participants: &[PlayerId],
    ratings: &RatingVector,
    params: &ModelParams,
    truncation: Truncation,
) -> Result<OutcomeSpace> {
    for id in participants {
        ratings.require(id.as_str())?;
    }
    let mut entries: Vec<(GameOutcome, f64)> = Vec::new();
    let mut tail_bound = 0.0;
    match model {
        OutcomeModel::WinLoss => {
            let (a, b) = two_players(participants)?;
            entries.push((WinLoss::new(a.clone(), b.clone())?.into(), 0.0));
            entries.push((WinLoss::new(b.clone(), a.clone())?.into(), 0.0));
        }
        OutcomeModel::WinDrawLoss => {
            let (a, b) = two_players(participants)?;
            for result in WdlResult::ALL {
                if result == WdlResult::Draw && params.delta() == 0.0 {
                    continue;
                }
                entries.push((WinDrawLoss::new(a.clone(), b.clone(), result)?.into(), 0.0));
            }
        }
        OutcomeModel::Ranking => {
            let m = participants.len();
            if m > MAX_RANKING_PLAYERS {
                return Err(Error::SizeLimit(format!(
                    "ranking enumeration is capped at {MAX_RANKING_PLAYERS} players, got {m}"
                )));
            }
            for order in participants.iter().cloned().permutations(m) {
                entries.push((Ranking::new(order)?.into(), 0.0));
            }
        }
        OutcomeModel::Margin => {
            let (a, b) = two_players(participants)?;
            let x = params.alpha() * (ratings.require(a.as_str())? - ratings.require(b.as_str())?);
            let (span, bound) = margin_span(x, truncation)?;
            tail_bound = bound;
            for d in -span..=span {
                let (pa, pb) = if d >= 0 { (d as u64, 0) } else { (0, (-d) as u64) };
                entries.push((Margin::new(a.clone(), pa, b.clone(), pb)?.into(), 0.0));
            }
        }
    }
    for (outcome, p) in &mut entries {
        *p = model.log_likelihood(ratings, outcome, params)?.exp();
    }
    Ok(OutcomeSpace { entries, tail_bound })
}

/// Bound on the Skellam mass beyond `|d| > span`, given `x = alpha (r_a - r_b)`.
///
/// Uses `I_{k+1}(2) / I_k(2) <= 1 / (k + 1)`, so the pmf ratio from `d` to
/// `d + 1` is at most `e^x / (d + 1)` and the tail is dominated by a geometric
/// series.
fn margin_tail_bound(x: f64, span: i64) -> f64 {
    let side = |sign: f64| {
        let rho = (sign * x).exp() / (span + 1) as f64;
        if rho >= 1.0 {
            f64::INFINITY
        } else {
            margin::log_pmf((sign as i64) * span, x).exp() * rho / (1.0 - rho)
        }
    };
    side(1.0) + side(-1.0)
}

fn margin_span(x: f64, truncation: Truncation) -> Result<(i64, f64)> {
    match truncation {
        Truncation::Fixed(d) => Ok((d as i64, margin_tail_bound(x, d as i64))),
        Truncation::Adaptive { tail_tol } => {
            let mean = 2.0 * x.sinh().abs();
            let mut span = (mean + 10.0 * (2.0 * x.cosh()).sqrt()).ceil().max(10.0) as i64;
            loop {
                let bound = margin_tail_bound(x, span);
                if bound < tail_tol {
                    return Ok((span, bound));
                }
                if span >= MAX_MARGIN_TRUNCATION as i64 {
                    return Err(Error::SizeLimit(format!(
                        "margin support exceeds {MAX_MARGIN_TRUNCATION} before reaching tail bound {tail_tol}"
                    )));
                }
                span = (span * 2).min(MAX_MARGIN_TRUNCATION as i64);
            }
        }
    }
}

/// `E[score(ratings_eval; Y)]` with `Y` drawn from `model` at `ratings_truth`.
pub fn expected_score(
    model: OutcomeModel,
    participants: &[PlayerId],
    ratings_eval: &RatingVector,
    ratings_truth: &RatingVector,
    params: &ModelParams,
    truncation: Truncation,
) -> Result<ScoreVector> {
    let space = enumerate_outcomes(model, participants, ratings_truth, params, truncation)?;
    space.expectation(|y| model.score(ratings_eval, y, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::sigmoid;

    fn ids(names: &[&str]) -> Vec<PlayerId> {
        names.iter().map(|s| PlayerId::new(*s).unwrap()).collect()
    }

    fn wl(w: &str, l: &str) -> GameOutcome {
        WinLoss::new(PlayerId::new(w).unwrap(), PlayerId::new(l).unwrap())
            .unwrap()
            .into()
    }

    #[test]
    fn fd_matches_closed_form_at_equal_ratings() {
        let r = RatingVector::from_pairs(&[("A", 0.0), ("B", 0.0)]).unwrap();
        let fd = finite_diff_score(OutcomeModel::WinLoss, &r, &wl("A", "B"), &ModelParams::default(), 1e-5)
            .unwrap();
        assert!((fd.get("A") - 0.5).abs() < 1e-8);
        assert!((fd.get("B") + 0.5).abs() < 1e-8);
    }

    #[test]
    fn fd_error_is_second_order() {
        let r = RatingVector::from_pairs(&[("A", 0.7), ("B", -0.3)]).unwrap();
        let p = ModelParams::default();
        let exact = OutcomeModel::WinLoss.score(&r, &wl("A", "B"), &p).unwrap();
        let err = |h: f64| {
            finite_diff_score(OutcomeModel::WinLoss, &r, &wl("A", "B"), &p, h)
                .unwrap()
                .max_abs_diff(&exact)
        };
        let ratio = err(1e-2) / err(5e-3);
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn fd_rejects_bad_step_and_degenerate_points() {
        let r = RatingVector::from_pairs(&[("A", 0.0), ("B", 0.0)]).unwrap();
        let p = ModelParams::default();
        assert!(finite_diff_score(OutcomeModel::WinLoss, &r, &wl("A", "B"), &p, 0.0).is_err());
        let draw: GameOutcome = WinDrawLoss::new(PlayerId::new("A").unwrap(), PlayerId::new("B").unwrap(), WdlResult::Draw)
            .unwrap()
            .into();
        let p0 = p.with_delta(0.0).unwrap();
        assert!(matches!(
            finite_diff_score(OutcomeModel::WinDrawLoss, &r, &draw, &p0, 1e-5),
            Err(Error::DegenerateLikelihood(_))
        ));
    }

    #[test]
    fn win_loss_space_at_equal_ratings() {
        let r = RatingVector::from_pairs(&[("A", 0.0), ("B", 0.0)]).unwrap();
        let s = enumerate_outcomes(OutcomeModel::WinLoss, &ids(&["A", "B"]), &r, &ModelParams::default(), Truncation::default())
            .unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.entries()[0], (wl("A", "B"), 0.5));
        assert_eq!(s.entries()[1], (wl("B", "A"), 0.5));
        assert_eq!(s.tail_bound(), 0.0);
    }

    #[test]
    fn ranking_space_three_equal_players() {
        let r = RatingVector::from_pairs(&[("A", 1.0), ("B", 1.0), ("C", 1.0)]).unwrap();
        let s = enumerate_outcomes(OutcomeModel::Ranking, &ids(&["A", "B", "C"]), &r, &ModelParams::default(), Truncation::default())
            .unwrap();
        assert_eq!(s.len(), 6);
        for (_, p) in s.entries() {
            assert!((p - 1.0 / 6.0).abs() < 1e-15);
        }
    }

    #[test]
    fn ranking_space_is_capped() {
        let names: Vec<String> = (0..9).map(|i| format!("p{i}")).collect();
        let players: Vec<PlayerId> = names.iter().map(|n| PlayerId::new(n.as_str()).unwrap()).collect();
        let r = RatingVector::uniform(&players, 0.0).unwrap();
        assert!(matches!(
            enumerate_outcomes(OutcomeModel::Ranking, &players, &r, &ModelParams::default(), Truncation::default()),
            Err(Error::SizeLimit(_))
        ));
    }

    #[test]
    fn margin_mass_within_fixed_truncation() {
        let p = ModelParams::default();
        for &gap in &[-2.0, -0.5, 0.0, 1.0, 2.0] {
            let r = RatingVector::from_pairs(&[("A", gap), ("B", 0.0)]).unwrap();
            let s = enumerate_outcomes(OutcomeModel::Margin, &ids(&["A", "B"]), &r, &p, Truncation::Fixed(60)).unwrap();
            assert_eq!(s.len(), 121);
            assert!((s.total_mass() - 1.0).abs() < 1e-12, "gap {gap}");
            assert!(s.tail_bound() < 1e-12);
        }
    }

    #[test]
    fn margin_adaptive_truncation_meets_tolerance() {
        let p = ModelParams::default();
        let r = RatingVector::from_pairs(&[("A", 3.5), ("B", 0.0)]).unwrap();
        let s = enumerate_outcomes(OutcomeModel::Margin, &ids(&["A", "B"]), &r, &p, Truncation::default()).unwrap();
        assert!(s.tail_bound() < 1e-12);
        assert!((s.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_truncation_too_small_reports_large_bound() {
        let r = RatingVector::from_pairs(&[("A", 2.0), ("B", 0.0)]).unwrap();
        let s = enumerate_outcomes(OutcomeModel::Margin, &ids(&["A", "B"]), &r, &ModelParams::default(), Truncation::Fixed(3))
            .unwrap();
        assert!(s.tail_bound() >= 1.0 - s.total_mass());
    }

    #[test]
    fn expected_score_is_zero_at_truth() {
        let r = RatingVector::from_pairs(&[("A", 0.4), ("B", -1.1), ("C", 0.2)]).unwrap();
        let p = ModelParams::default().with_alpha(1.3).unwrap();
        for model in OutcomeModel::ALL {
            let who = if model == OutcomeModel::Ranking { ids(&["A", "B", "C"]) } else { ids(&["A", "B"]) };
            let e = expected_score(model, &who, &r, &r, &p, Truncation::default()).unwrap();
            assert!(e.max_abs() < 1e-8, "{model}: {e:?}");
        }
    }

    #[test]
    fn overrated_player_drifts_down() {
        let truth = RatingVector::from_pairs(&[("A", 0.0), ("B", 0.0)]).unwrap();
        let eval = truth.with_rating("A", 1.0).unwrap();
        let e = expected_score(OutcomeModel::WinLoss, &ids(&["A", "B"]), &eval, &truth, &ModelParams::default(), Truncation::default())
            .unwrap();
        // Two outcomes, each with probability 1/2: sigmoid(-1) on a win, -sigmoid(1) on a loss.
        let by_hand = 0.5 * (1.0 - sigmoid(1.0)) - 0.5 * sigmoid(1.0);
        assert!((e.get("A") - by_hand).abs() < 1e-15);
        assert!((e.get("A") - (-0.231_058_578_630_004_88)).abs() < 1e-15);
    }
}
