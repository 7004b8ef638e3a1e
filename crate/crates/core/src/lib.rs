//! Score-driven rating engine.
//!
//! Ratings are updated by the K-scaled score (gradient of the outcome
//! log-likelihood) of each game. Four outcome models are provided: logistic
//! win/loss, Skellam margin of victory, ordered-logit win/draw/loss and
//! Plackett-Luce rankings. Classical Elo is included as a reference, and the
//! [`oracle`] and [`sim`] modules provide brute-force and Monte Carlo checks.

pub mod cli;
pub mod config;
pub mod engine;
pub mod error;
pub mod logfile;
pub mod models;
pub mod oracle;
pub mod sim;
pub mod types;
pub mod verify;

pub use engine::{init_ratings, replay, step, Engine, EngineConfig, EngineModel};
pub use error::{Error, Result};
pub use models::{OutcomeModel, ScoreVector};
pub use types::{
    GameOutcome, GameRecord, Margin, ModelParams, PlayerId, Ranking, RatingHistory, RatingVector, WdlResult,
    WinDrawLoss, WinLoss,
};
