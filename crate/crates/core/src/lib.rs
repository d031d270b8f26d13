//! Core of the Bublz! bubble arithmetic game.
//!
//! A level hands the player a click triplet `(L, D, R)`: a single left-click
//! creates `L` bubbles, a double left-click creates `D`, a single right-click
//! pops `R`. Starting from one bubble the player must reach exactly `T`
//! bubbles while the board stays within `[1, 150]`.
//!
//! Modules, bottom-up:
//!
//! - [`model`]: triplets, bounds, scoring and move arithmetic.
//! - [`solver`]: minimum-move search over the bounded board, plus the
//!   unconstrained integer-program formulation `min x + y + z` subject to
//!   `start + Lx + Dy - Rz = T`.
//! - [`design`]: triplet validity, bounded playability and target draws.
//! - [`campaign`]: campaign generation and the campaign JSON file format.
//! - [`engine`]: the per-session state machine.
//! - [`trace`]: the JSON Lines trace log of completed sessions.
//! - [`analytics`]: per-move regret against the ideal player.
//! - [`policy`]: scripted players used for simulation.

pub mod analytics;
pub mod campaign;
pub mod design;
pub mod engine;
pub mod model;
#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
pub mod policy;
pub mod solver;
pub mod trace;

pub use analytics::{aggregate, regret_profile, RegretProfile, Summary};
pub use campaign::{generate_campaign, Campaign, CampaignError};
pub use design::{check_bounded_playability, check_gcd_validity, TargetPicker, ValidityReport};
pub use engine::{
    EngineError, FeedbackReport, GuardKind, GuardViolation, Session, SessionId, Status,
    TransitionChoice,
};
pub use model::{
    apply_delta, is_legal, score, BoardBounds, ClickTriplet, GameState, LevelSpec, ModelError,
    MoveKind, ScoringRule, TargetRange,
};
pub use solver::{
    optimal_table, solve_paper_ilp, solve_sequence, IlpSolution, OptimalTable, SolveResult,
};
pub use trace::{TraceMove, TraceRecord};
