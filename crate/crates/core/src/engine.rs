//! Per-session game state machine.
//!
//! A session starts at the level's start count, accepts moves until the
//! count equals the target, then accepts nothing. Rejected moves leave the
//! session untouched.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::campaign::Campaign;
use crate::design::TargetPicker;
use crate::model::{apply_delta, is_legal, score, GameState, LevelSpec, ModelError, MoveKind};
use crate::solver::{solve_sequence, OptimalTable};
use crate::trace::{TraceMove, TraceRecord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("target {target} is outside the level's range [{lo}, {hi}]")]
    TargetOutOfRange { target: i64, lo: i64, hi: i64 },
    #[error("target {target} cannot be reached on level {level}")]
    UnreachableTarget { level: u32, target: i64 },
    #[error("the session is not complete")]
    NotComplete,
    #[error("level {0} is the last level")]
    NoNextLevel(u32),
    #[error(transparent)]
    Scoring(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SessionId(pub String);

impl fmt::Display for SessionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SessionId {
    fn from(s: &str) -> Self {
        Self(s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    InProgress,
    Complete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuardKind {
    BelowMin,
    AboveMax,
    SessionComplete,
}

impl GuardKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GuardKind::BelowMin => "below_min",
            GuardKind::AboveMax => "above_max",
            GuardKind::SessionComplete => "session_complete",
        }
    }
}

/// A rejected move, with the message shown on the invalid-move screen.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("{message}")]
pub struct GuardViolation {
    pub kind: GuardKind,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub kind: MoveKind,
    pub count: i64,
    /// Milliseconds since the session started.
    pub t_ms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackReport {
    pub moves_made: u32,
    pub optimal_moves: u32,
    pub score: i64,
    pub target: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionChoice {
    #[serde(rename = "retry")]
    RetrySameTarget,
    #[serde(rename = "repeat")]
    RepeatLevelNewTarget,
    #[serde(rename = "next")]
    NextLevel,
}

#[derive(Debug, Clone)]
pub struct Session {
    id: SessionId,
    level: LevelSpec,
    state: GameState,
    history: Vec<HistoryEntry>,
    optimal_for_target: u32,
    started: Instant,
}

impl PartialEq for Session {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.level == other.level
            && self.state == other.state
            && self.history == other.history
            && self.optimal_for_target == other.optimal_for_target
    }
}

impl Session {
    /// Starts a session on `level` aiming for `target`, solving for the
    /// optimum on the spot.
    pub fn new(id: SessionId, level: &LevelSpec, target: i64) -> Result<Self, EngineError> {
        check_target(level, target)?;
        let optimal = solve_sequence(
            &level.triplet(),
            &level.bounds(),
            level.start_count(),
            target,
        )
        .ok_or(EngineError::UnreachableTarget {
            level: level.index(),
            target,
        })?
        .n_min;
        Ok(Self::build(id, level, target, optimal))
    }

    /// Like [`Session::new`] but takes the optimum from a precomputed table.
    pub fn with_table(
        id: SessionId,
        level: &LevelSpec,
        target: i64,
        table: &OptimalTable,
    ) -> Result<Self, EngineError> {
        check_target(level, target)?;
        let optimal = table.n_min(target).ok_or(EngineError::UnreachableTarget {
            level: level.index(),
            target,
        })?;
        Ok(Self::build(id, level, target, optimal))
    }

    /// Starts a session with a target drawn from the level's range.
    pub fn with_picker(
        id: SessionId,
        level: &LevelSpec,
        picker: &mut TargetPicker,
    ) -> Result<Self, EngineError> {
        let target = picker.pick_in(&level.targets());
        Self::new(id, level, target)
    }

    fn build(id: SessionId, level: &LevelSpec, target: i64, optimal: u32) -> Self {
        let count = level.start_count();
        Self {
            id,
            level: level.clone(),
            state: GameState {
                count,
                target,
                moves_made: 0,
                complete: count == target,
            },
            history: Vec::new(),
            optimal_for_target: optimal,
            started: Instant::now(),
        }
    }

    pub fn id(&self) -> &SessionId {
        &self.id
    }

    pub fn level(&self) -> &LevelSpec {
        &self.level
    }

    pub fn state(&self) -> GameState {
        self.state
    }

    pub fn count(&self) -> i64 {
        self.state.count
    }

    pub fn target(&self) -> i64 {
        self.state.target
    }

    pub fn moves_made(&self) -> u32 {
        self.state.moves_made
    }

    pub fn history(&self) -> &[HistoryEntry] {
        &self.history
    }

    pub fn optimal_for_target(&self) -> u32 {
        self.optimal_for_target
    }

    pub fn status(&self) -> Status {
        if self.state.complete {
            Status::Complete
        } else {
            Status::InProgress
        }
    }

    pub fn is_complete(&self) -> bool {
        self.state.complete
    }

    /// Moves playable right now, in canonical order; empty once complete.
    pub fn legal_moves(&self) -> Vec<MoveKind> {
        if self.is_complete() {
            return Vec::new();
        }
        let (triplet, bounds) = (self.level.triplet(), self.level.bounds());
        MoveKind::ALL
            .into_iter()
            .filter(|&k| is_legal(self.state.count, k, &triplet, &bounds))
            .collect()
    }

    /// Checks a move without applying it.
    pub fn check_move(&self, kind: MoveKind) -> Result<(), GuardViolation> {
        if self.is_complete() {
            return Err(GuardViolation {
                kind: GuardKind::SessionComplete,
                message: "The level is already complete; no further moves are allowed.".into(),
            });
        }
        let (triplet, bounds) = (self.level.triplet(), self.level.bounds());
        if is_legal(self.state.count, kind, &triplet, &bounds) {
            return Ok(());
        }
        let (min, max) = (bounds.min_count(), bounds.max_count());
        Err(match kind {
            MoveKind::SingleRight => GuardViolation {
                kind: GuardKind::BelowMin,
                message: format!(
                    "Invalid move: popping {} bubbles from {} would leave the number of bubbles outside the range {min}-{max}.",
                    triplet.r(),
                    self.state.count
                ),
            },
            _ => GuardViolation {
                kind: GuardKind::AboveMax,
                message: format!(
                    "Invalid move: adding {} bubbles to {} would take the number of bubbles outside the range {min}-{max}.",
                    triplet.delta(kind),
                    self.state.count
                ),
            },
        })
    }

    /// Applies a move timestamped with the wall clock.
    pub fn apply_move(&mut self, kind: MoveKind) -> Result<(), GuardViolation> {
        let t_ms = self.started.elapsed().as_millis() as u64;
        self.apply_move_at(kind, t_ms)
    }

    /// Applies a move with an explicit timestamp (milliseconds since start).
    pub fn apply_move_at(&mut self, kind: MoveKind, t_ms: u64) -> Result<(), GuardViolation> {
        self.check_move(kind)?;
        let count = apply_delta(self.state.count, kind, &self.level.triplet());
        self.state.count = count;
        self.state.moves_made += 1;
        self.state.complete = count == self.state.target;
        self.history.push(HistoryEntry { kind, count, t_ms });
        Ok(())
    }

    pub fn feedback(&self) -> Result<FeedbackReport, EngineError> {
        if !self.is_complete() {
            return Err(EngineError::NotComplete);
        }
        Ok(FeedbackReport {
            moves_made: self.state.moves_made,
            optimal_moves: self.optimal_for_target,
            score: score(
                self.state.moves_made,
                self.optimal_for_target,
                &self.level.scoring(),
            )?,
            target: self.state.target,
        })
    }

    /// Retry, repeat or advance after completing. The new session gets `id`.
    pub fn transition(
        &self,
        choice: TransitionChoice,
        campaign: &Campaign,
        picker: &mut TargetPicker,
        id: SessionId,
    ) -> Result<Session, EngineError> {
        if !self.is_complete() {
            return Err(EngineError::NotComplete);
        }
        match choice {
            TransitionChoice::RetrySameTarget => Session::new(id, &self.level, self.state.target),
            TransitionChoice::RepeatLevelNewTarget => Session::with_picker(id, &self.level, picker),
            TransitionChoice::NextLevel => {
                let next = campaign
                    .level(self.level.index() + 1)
                    .ok_or(EngineError::NoNextLevel(self.level.index()))?;
                Session::with_picker(id, next, picker)
            }
        }
    }

    /// Whether the history replays legally from the start count to the
    /// current state.
    pub fn replays(&self) -> bool {
        let (triplet, bounds) = (self.level.triplet(), self.level.bounds());
        let mut count = self.level.start_count();
        for (i, entry) in self.history.iter().enumerate() {
            if count == self.state.target || !is_legal(count, entry.kind, &triplet, &bounds) {
                return false;
            }
            count = apply_delta(count, entry.kind, &triplet);
            if count != entry.count {
                return false;
            }
            if i + 1 < self.history.len() && count == self.state.target {
                return false;
            }
        }
        count == self.state.count && self.history.len() as u32 == self.state.moves_made
    }

    /// Log record for a completed session.
    pub fn to_trace(&self) -> Option<TraceRecord> {
        let feedback = self.feedback().ok()?;
        Some(TraceRecord {
            session: self.id.0.clone(),
            level: self.level.index(),
            triplet: self.level.triplet(),
            target: self.state.target,
            moves: self
                .history
                .iter()
                .map(|h| TraceMove {
                    kind: h.kind,
                    count: h.count,
                    t_ms: h.t_ms,
                })
                .collect(),
            optimal: feedback.optimal_moves,
            score: feedback.score,
        })
    }
}

fn check_target(level: &LevelSpec, target: i64) -> Result<(), EngineError> {
    let range = level.targets();
    if range.contains(target) {
        Ok(())
    } else {
        Err(EngineError::TargetOutOfRange {
            target,
            lo: range.lo(),
            hi: range.hi(),
        })
    }
}
