//! Scripted players for simulation.
//!
//! Every policy picks only from the session's legal moves. `Ideal` replays a
//! solver witness and always finishes in the optimum. `Random` and
//! `GreedyClose` can wander indefinitely, so runs are capped.

use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::engine::{Session, SessionId};
use crate::model::{apply_delta, LevelSpec, MoveKind};
use crate::solver::solve_sequence;

pub const DEFAULT_STEP_CAP: u32 = 10_000;

/// Simulated time between consecutive moves, in milliseconds.
pub const SIMULATED_MOVE_MS: u64 = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    Ideal,
    Random,
    GreedyClose,
}

impl PolicyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Ideal => "ideal",
            PolicyKind::Random => "random",
            PolicyKind::GreedyClose => "greedy",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ideal" => Ok(PolicyKind::Ideal),
            "random" => Ok(PolicyKind::Random),
            "greedy" | "greedy_close" => Ok(PolicyKind::GreedyClose),
            other => Err(format!(
                "unknown policy {other:?} (expected ideal, random or greedy)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolicyError {
    #[error("policy stalled after {steps} moves at count {count} (target {target})")]
    Stalled { steps: u32, count: i64, target: i64 },
    #[error("no legal move at count {count}")]
    DeadEnd { count: i64 },
}

/// A policy plus its random state.
#[derive(Debug, Clone)]
pub struct Player {
    kind: PolicyKind,
    rng: ChaCha8Rng,
}

impl Player {
    pub fn new(kind: PolicyKind, seed: u64) -> Self {
        Self {
            kind,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    /// The move this policy would play next, or `None` when nothing is legal.
    pub fn choose(&mut self, session: &Session) -> Option<MoveKind> {
        let legal = session.legal_moves();
        if legal.is_empty() {
            return None;
        }
        let level = session.level();
        match self.kind {
            PolicyKind::Ideal => solve_sequence(
                &level.triplet(),
                &level.bounds(),
                session.count(),
                session.target(),
            )
            .and_then(|r| r.witness.first().copied()),
            PolicyKind::Random => legal.choose(&mut self.rng).copied(),
            PolicyKind::GreedyClose => legal.into_iter().min_by_key(|&k| {
                (apply_delta(session.count(), k, &level.triplet()) - session.target()).abs()
            }),
        }
    }

    /// Plays `session` to completion with simulated timestamps.
    pub fn play(&mut self, session: &mut Session, step_cap: u32) -> Result<(), PolicyError> {
        while !session.is_complete() {
            if session.moves_made() >= step_cap {
                return Err(PolicyError::Stalled {
                    steps: session.moves_made(),
                    count: session.count(),
                    target: session.target(),
                });
            }
            let kind = self.choose(session).ok_or(PolicyError::DeadEnd {
                count: session.count(),
            })?;
            let t_ms = u64::from(session.moves_made() + 1) * SIMULATED_MOVE_MS;
            session
                .apply_move_at(kind, t_ms)
                .expect("policies only choose legal moves");
        }
        Ok(())
    }
}

/// Seed for run `run` of a cohort, derived from the master seed.
pub fn run_seed(master: u64, run: u64) -> u64 {
    use rand::RngCore;
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(run);
    rng.next_u64()
}

/// Outcome of one simulated run; the session is returned even when stalled.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub run: u64,
    pub session: Session,
    pub result: Result<(), PolicyError>,
}

/// Runs `runs` independent sessions on `level` toward `target`.
pub fn simulate(
    kind: PolicyKind,
    level: &LevelSpec,
    target: i64,
    runs: u64,
    master_seed: u64,
    step_cap: u32,
) -> Result<Vec<RunOutcome>, crate::engine::EngineError> {
    (0..runs)
        .map(|run| {
            let id = SessionId(format!("sim-{}-{master_seed}-{run}", kind.as_str()));
            let mut session = Session::new(id, level, target)?;
            let mut player = Player::new(kind, run_seed(master_seed, run));
            let result = player.play(&mut session, step_cap);
            Ok(RunOutcome {
                run,
                session,
                result,
            })
        })
        .collect()
}
