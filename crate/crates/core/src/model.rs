//! Domain types and move arithmetic.
//!
//! Bubbles are tracked as a count only; which bubble gets clicked never
//! matters to the rules.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("triplet components must be positive, got ({0}, {1}, {2})")]
    NonPositiveTriplet(i64, i64, i64),
    #[error("double-click magnitude must exceed single-click magnitude (L={l}, D={d})")]
    DoubleNotGreater { l: u32, d: u32 },
    #[error("invalid board bounds [{0}, {1}]")]
    InvalidBounds(i64, i64),
    #[error("invalid target range [{lo}, {hi}] for board [{min}, {max}]")]
    InvalidTargets {
        lo: i64,
        hi: i64,
        min: i64,
        max: i64,
    },
    #[error("invalid scoring rule: {0}")]
    InvalidScoring(&'static str),
    #[error("start count {0} is outside the board bounds")]
    StartOutOfBounds(i64),
    #[error("level index must be 1-based")]
    ZeroIndex,
    #[error("{made} moves made but the optimum is {optimal}")]
    BeatOptimum { made: u32, optimal: u32 },
    #[error("cannot parse triplet {0:?}, expected L,D,R")]
    TripletSyntax(String),
    #[error("unknown move kind {0:?}")]
    UnknownMove(String),
}

/// The three click kinds. Expansion order in every search follows the
/// declaration order here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    SingleLeft,
    DoubleLeft,
    SingleRight,
}

impl MoveKind {
    pub const ALL: [MoveKind; 3] = [
        MoveKind::SingleLeft,
        MoveKind::DoubleLeft,
        MoveKind::SingleRight,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MoveKind::SingleLeft => "single_left",
            MoveKind::DoubleLeft => "double_left",
            MoveKind::SingleRight => "single_right",
        }
    }

    pub fn is_addition(self) -> bool {
        !matches!(self, MoveKind::SingleRight)
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MoveKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single_left" => Ok(MoveKind::SingleLeft),
            "double_left" => Ok(MoveKind::DoubleLeft),
            "single_right" => Ok(MoveKind::SingleRight),
            other => Err(ModelError::UnknownMove(other.to_string())),
        }
    }
}

/// Per-level click magnitudes `(L, D, R)`.
///
/// Only positivity is enforced here; `D > L` is a level constraint so that
/// the validator can still reason about arbitrary triplets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i64; 3]", into = "[u32; 3]")]
pub struct ClickTriplet {
    l: u32,
    d: u32,
    r: u32,
}

impl ClickTriplet {
    pub fn new(l: u32, d: u32, r: u32) -> Result<Self, ModelError> {
        if l == 0 || d == 0 || r == 0 {
            return Err(ModelError::NonPositiveTriplet(l.into(), d.into(), r.into()));
        }
        Ok(Self { l, d, r })
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// Signed change in bubble count caused by `kind`.
    pub fn delta(&self, kind: MoveKind) -> i64 {
        match kind {
            MoveKind::SingleLeft => i64::from(self.l),
            MoveKind::DoubleLeft => i64::from(self.d),
            MoveKind::SingleRight => -i64::from(self.r),
        }
    }

    pub fn max_component(&self) -> u32 {
        self.l.max(self.d).max(self.r)
    }
}

impl TryFrom<[i64; 3]> for ClickTriplet {
    type Error = ModelError;

    fn try_from([l, d, r]: [i64; 3]) -> Result<Self, Self::Error> {
        let conv = |v: i64| u32::try_from(v).ok().filter(|v| *v > 0);
        match (conv(l), conv(d), conv(r)) {
            (Some(l), Some(d), Some(r)) => Ok(Self { l, d, r }),
            _ => Err(ModelError::NonPositiveTriplet(l, d, r)),
        }
    }
}

impl From<ClickTriplet> for [u32; 3] {
    fn from(t: ClickTriplet) -> Self {
        [t.l, t.d, t.r]
    }
}

impl fmt::Display for ClickTriplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.l, self.d, self.r)
    }
}

/// Parses the comma-joined `L,D,R` form.
impl FromStr for ClickTriplet {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<_> = s.split(',').map(|p| p.trim().parse::<i64>()).collect();
        match parts.as_slice() {
            [Ok(l), Ok(d), Ok(r)] => Self::try_from([*l, *d, *r]),
            _ => Err(ModelError::TripletSyntax(s.to_string())),
        }
    }
}

/// Inclusive range of bubble counts allowed on the board.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i64; 2]", into = "[i64; 2]")]
pub struct BoardBounds {
    min_count: i64,
    max_count: i64,
}

impl BoardBounds {
    pub fn new(min_count: i64, max_count: i64) -> Result<Self, ModelError> {
        if min_count < 1 || max_count <= min_count {
            return Err(ModelError::InvalidBounds(min_count, max_count));
        }
        Ok(Self {
            min_count,
            max_count,
        })
    }

    pub fn min_count(&self) -> i64 {
        self.min_count
    }

    pub fn max_count(&self) -> i64 {
        self.max_count
    }

    pub fn contains(&self, count: i64) -> bool {
        (self.min_count..=self.max_count).contains(&count)
    }

    /// Number of distinct counts on the board.
    pub fn len(&self) -> usize {
        (self.max_count - self.min_count + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl Default for BoardBounds {
    fn default() -> Self {
        Self {
            min_count: 1,
            max_count: 150,
        }
    }
}

impl TryFrom<[i64; 2]> for BoardBounds {
    type Error = ModelError;

    fn try_from([lo, hi]: [i64; 2]) -> Result<Self, Self::Error> {
        Self::new(lo, hi)
    }
}

impl From<BoardBounds> for [i64; 2] {
    fn from(b: BoardBounds) -> Self {
        [b.min_count, b.max_count]
    }
}

/// Inclusive range targets are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i64; 2]", into = "[i64; 2]")]
pub struct TargetRange {
    lo: i64,
    hi: i64,
}

impl TargetRange {
    /// Builds a range without checking it against a board; see
    /// [`TargetRange::check_within`].
    pub fn new(lo: i64, hi: i64) -> Result<Self, ModelError> {
        if lo > hi || lo < 1 {
            return Err(ModelError::InvalidTargets {
                lo,
                hi,
                min: 1,
                max: i64::MAX,
            });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn contains(&self, t: i64) -> bool {
        (self.lo..=self.hi).contains(&t)
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Targets must lie strictly above the board minimum and at most its maximum.
    pub fn check_within(&self, bounds: &BoardBounds) -> Result<(), ModelError> {
        if bounds.min_count < self.lo && self.hi <= bounds.max_count {
            Ok(())
        } else {
            Err(ModelError::InvalidTargets {
                lo: self.lo,
                hi: self.hi,
                min: bounds.min_count,
                max: bounds.max_count,
            })
        }
    }
}

impl Default for TargetRange {
    fn default() -> Self {
        Self { lo: 2, hi: 70 }
    }
}

impl TryFrom<[i64; 2]> for TargetRange {
    type Error = ModelError;

    fn try_from([lo, hi]: [i64; 2]) -> Result<Self, Self::Error> {
        Self::new(lo, hi)
    }
}

impl From<TargetRange> for [i64; 2] {
    fn from(t: TargetRange) -> Self {
        [t.lo, t.hi]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScoringRule {
    #[serde(rename = "base")]
    pub base_score: i64,
    #[serde(rename = "penalty")]
    pub penalty_per_extra_move: i64,
    pub floor: i64,
}

impl ScoringRule {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.base_score <= 0 {
            return Err(ModelError::InvalidScoring("base score must be positive"));
        }
        if self.penalty_per_extra_move <= 0 {
            return Err(ModelError::InvalidScoring("penalty must be positive"));
        }
        if self.floor < 0 {
            return Err(ModelError::InvalidScoring("floor must be non-negative"));
        }
        Ok(())
    }
}

impl Default for ScoringRule {
    fn default() -> Self {
        Self {
            base_score: 1000,
            penalty_per_extra_move: 10,
            floor: 0,
        }
    }
}

/// One level of a campaign.
///
/// Construction checks the structural invariants. Playability (every target
/// reachable, no dead ends) is a search problem and lives in
/// [`crate::design::check_bounded_playability`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSpec {
    index: u32,
    triplet: ClickTriplet,
    bounds: BoardBounds,
    targets: TargetRange,
    scoring: ScoringRule,
    start_count: i64,
}

impl LevelSpec {
    pub fn new(
        index: u32,
        triplet: ClickTriplet,
        bounds: BoardBounds,
        targets: TargetRange,
        scoring: ScoringRule,
        start_count: i64,
    ) -> Result<Self, ModelError> {
        if index == 0 {
            return Err(ModelError::ZeroIndex);
        }
        if triplet.d <= triplet.l {
            return Err(ModelError::DoubleNotGreater {
                l: triplet.l,
                d: triplet.d,
            });
        }
        targets.check_within(&bounds)?;
        scoring.validate()?;
        if !bounds.contains(start_count) {
            return Err(ModelError::StartOutOfBounds(start_count));
        }
        Ok(Self {
            index,
            triplet,
            bounds,
            targets,
            scoring,
            start_count,
        })
    }

    /// A level with default bounds, targets and scoring, starting from one bubble.
    pub fn with_defaults(index: u32, triplet: ClickTriplet) -> Result<Self, ModelError> {
        Self::new(
            index,
            triplet,
            BoardBounds::default(),
            TargetRange::default(),
            ScoringRule::default(),
            1,
        )
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn triplet(&self) -> ClickTriplet {
        self.triplet
    }

    pub fn bounds(&self) -> BoardBounds {
        self.bounds
    }

    pub fn targets(&self) -> TargetRange {
        self.targets
    }

    pub fn scoring(&self) -> ScoringRule {
        self.scoring
    }

    pub fn start_count(&self) -> i64 {
        self.start_count
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameState {
    pub count: i64,
    pub target: i64,
    pub moves_made: u32,
    pub complete: bool,
}

/// Raw arithmetic effect of a move; legality is a separate question.
pub fn apply_delta(count: i64, kind: MoveKind, triplet: &ClickTriplet) -> i64 {
    count + triplet.delta(kind)
}

/// Whether `kind` may be played at `count`.
///
/// A right-click needs `count > R`; an addition must not push the count past
/// the board maximum (landing exactly on it is fine).
pub fn is_legal(count: i64, kind: MoveKind, triplet: &ClickTriplet, bounds: &BoardBounds) -> bool {
    match kind {
        MoveKind::SingleRight => {
            count > i64::from(triplet.r) && count - i64::from(triplet.r) >= bounds.min_count
        }
        MoveKind::SingleLeft | MoveKind::DoubleLeft => {
            apply_delta(count, kind, triplet) <= bounds.max_count
        }
    }
}

/// `max(floor, base - penalty * (moves_made - optimal_moves))`.
///
/// Making fewer moves than the optimum is impossible for a correct solver, so
/// it is reported as an error rather than rewarded.
pub fn score(moves_made: u32, optimal_moves: u32, rule: &ScoringRule) -> Result<i64, ModelError> {
    if moves_made < optimal_moves {
        return Err(ModelError::BeatOptimum {
            made: moves_made,
            optimal: optimal_moves,
        });
    }
    let extra = i64::from(moves_made - optimal_moves);
    let raw = rule
        .base_score
        .saturating_sub(rule.penalty_per_extra_move.saturating_mul(extra));
    Ok(raw.max(rule.floor))
}
