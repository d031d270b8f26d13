//! Minimum-move solvers.
//!
//! Two routes answer "how few moves reach `T`":
//!
//! - [`solve_sequence`] is breadth-first search over the board's counts with
//!   the real guards applied. This is what gameplay is scored against.
//! - [`solve_paper_ilp`] minimises `x + y + z` subject to
//!   `start + Lx + Dy - Rz = T` over non-negative integers, ignoring the board
//!   and move order. Being a relaxation, its optimum never exceeds the
//!   sequence optimum.
//!
//! Moves are always expanded as single-left, double-left, single-right, so
//! the BFS witness is the lexicographically first shortest sequence.

use std::collections::{BTreeMap, VecDeque};

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{apply_delta, is_legal, BoardBounds, ClickTriplet, LevelSpec, MoveKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("target {target} is unreachable on level {level}")]
    Unreachable { level: u32, target: i64 },
}

/// Move counts by kind: `x` single-left, `y` double-left, `z` single-right.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Decomposition {
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl Decomposition {
    pub fn of(moves: &[MoveKind]) -> Self {
        moves.iter().fold(Self::default(), |mut acc, kind| {
            match kind {
                MoveKind::SingleLeft => acc.x += 1,
                MoveKind::DoubleLeft => acc.y += 1,
                MoveKind::SingleRight => acc.z += 1,
            }
            acc
        })
    }

    pub fn total(&self) -> u32 {
        self.x + self.y + self.z
    }

    /// Net change in count, `Lx + Dy - Rz`.
    pub fn net(&self, triplet: &ClickTriplet) -> i64 {
        i64::from(triplet.l()) * i64::from(self.x) + i64::from(triplet.d()) * i64::from(self.y)
            - i64::from(triplet.r()) * i64::from(self.z)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub n_min: u32,
    pub witness: Vec<MoveKind>,
    pub decomposition: Decomposition,
}

impl SolveResult {
    fn from_witness(witness: Vec<MoveKind>) -> Self {
        Self {
            n_min: witness.len() as u32,
            decomposition: Decomposition::of(&witness),
            witness,
        }
    }
}

/// Breadth-first tree over the board rooted at one start count.
///
/// One tree answers every target from that start, and every answer is the
/// same one [`solve_sequence`] returns.
#[derive(Debug, Clone)]
pub struct ReachTree {
    bounds: BoardBounds,
    start: i64,
    // indexed by count - min_count; (parent count, move taken, depth)
    parent: Vec<Option<(i64, MoveKind, u32)>>,
}

impl ReachTree {
    pub fn build(triplet: &ClickTriplet, bounds: &BoardBounds, start: i64) -> Self {
        let mut parent = vec![None; bounds.len()];
        let idx = |c: i64| (c - bounds.min_count()) as usize;
        let mut tree = Self {
            bounds: *bounds,
            start,
            parent: Vec::new(),
        };
        if !bounds.contains(start) {
            tree.parent = parent;
            return tree;
        }
        let mut seen = vec![false; bounds.len()];
        seen[idx(start)] = true;
        let mut queue = VecDeque::from([(start, 0u32)]);
        while let Some((count, depth)) = queue.pop_front() {
            for kind in MoveKind::ALL {
                if !is_legal(count, kind, triplet, bounds) {
                    continue;
                }
                let next = apply_delta(count, kind, triplet);
                if !seen[idx(next)] {
                    seen[idx(next)] = true;
                    parent[idx(next)] = Some((count, kind, depth + 1));
                    queue.push_back((next, depth + 1));
                }
            }
        }
        tree.parent = parent;
        tree
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn is_reachable(&self, count: i64) -> bool {
        self.depth(count).is_some()
    }

    /// Minimum moves from the root to `count`.
    pub fn depth(&self, count: i64) -> Option<u32> {
        if !self.bounds.contains(count) || !self.bounds.contains(self.start) {
            return None;
        }
        if count == self.start {
            return Some(0);
        }
        self.parent[(count - self.bounds.min_count()) as usize].map(|(_, _, d)| d)
    }

    pub fn path_to(&self, target: i64) -> Option<SolveResult> {
        self.depth(target)?;
        let mut moves = Vec::new();
        let mut at = target;
        while at != self.start {
            let (prev, kind, _) = self.parent[(at - self.bounds.min_count()) as usize]?;
            moves.push(kind);
            at = prev;
        }
        moves.reverse();
        Some(SolveResult::from_witness(moves))
    }

    /// All counts reachable from the root, ascending.
    pub fn reachable(&self) -> impl Iterator<Item = i64> + '_ {
        (self.bounds.min_count()..=self.bounds.max_count()).filter(|c| self.is_reachable(*c))
    }
}

/// Shortest legal move sequence from `start` to `target` on the bounded
/// board, or `None` when no sequence exists (including when either count is
/// off the board).
pub fn solve_sequence(
    triplet: &ClickTriplet,
    bounds: &BoardBounds,
    start: i64,
    target: i64,
) -> Option<SolveResult> {
    if !bounds.contains(target) {
        return None;
    }
    ReachTree::build(triplet, bounds, start).path_to(target)
}

/// Minimum remaining moves from every count to one fixed target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMap {
    bounds: BoardBounds,
    target: i64,
    dist: Vec<Option<u32>>,
}

impl DistanceMap {
    pub fn target(&self) -> i64 {
        self.target
    }

    pub fn get(&self, count: i64) -> Option<u32> {
        if !self.bounds.contains(count) {
            return None;
        }
        self.dist[(count - self.bounds.min_count()) as usize]
    }
}

/// Backward BFS from `target` over reversed legal moves.
pub fn distances_to(triplet: &ClickTriplet, bounds: &BoardBounds, target: i64) -> DistanceMap {
    let mut dist = vec![None; bounds.len()];
    let idx = |c: i64| (c - bounds.min_count()) as usize;
    if bounds.contains(target) {
        let mut preds: Vec<Vec<i64>> = vec![Vec::new(); bounds.len()];
        for count in bounds.min_count()..=bounds.max_count() {
            for kind in MoveKind::ALL {
                if is_legal(count, kind, triplet, bounds) {
                    preds[idx(apply_delta(count, kind, triplet))].push(count);
                }
            }
        }
        dist[idx(target)] = Some(0);
        let mut queue = VecDeque::from([target]);
        while let Some(count) = queue.pop_front() {
            let d = dist[idx(count)].unwrap_or(0);
            for &prev in &preds[idx(count)] {
                if dist[idx(prev)].is_none() {
                    dist[idx(prev)] = Some(d + 1);
                    queue.push_back(prev);
                }
            }
        }
    }
    DistanceMap {
        bounds: *bounds,
        target,
        dist,
    }
}

/// Optimum of the unconstrained integer program, with a move ordering that
/// performs every addition before any removal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IlpSolution {
    pub n: u32,
    pub decomposition: Decomposition,
    pub witness: Vec<MoveKind>,
    /// Whether `witness` replays legally on the board it was checked against.
    pub order_feasible: bool,
}

/// Default enumeration cap: four times the board maximum.
pub fn default_search_cap(bounds: &BoardBounds) -> u32 {
    (4 * bounds.max_count()).clamp(0, i64::from(u32::MAX)) as u32
}

/// Minimises `N = x + y + z` subject to `start + Lx + Dy - Rz = target`.
///
/// `N` is enumerated upward from 0 to `search_cap`; within one `N`, `x` then
/// `y` ascend and `z = N - x - y`. The board plays no part in the optimum;
/// `bounds` is only used to label the additions-first witness as feasible or
/// not. Returns `None` when no solution has `N <= search_cap`.
pub fn solve_paper_ilp(
    triplet: &ClickTriplet,
    bounds: &BoardBounds,
    start: i64,
    target: i64,
    search_cap: u32,
) -> Option<IlpSolution> {
    let (l, d, r) = (
        i64::from(triplet.l()),
        i64::from(triplet.d()),
        i64::from(triplet.r()),
    );
    let g = l.gcd(&d).gcd(&r);
    if (target - start) % g != 0 {
        return None;
    }
    for n in 0..=search_cap {
        for x in 0..=n {
            for y in 0..=(n - x) {
                let z = n - x - y;
                if start + l * i64::from(x) + d * i64::from(y) - r * i64::from(z) == target {
                    let decomposition = Decomposition { x, y, z };
                    let witness = additions_first(decomposition);
                    let order_feasible = replays_to(triplet, bounds, start, target, &witness);
                    return Some(IlpSolution {
                        n,
                        decomposition,
                        witness,
                        order_feasible,
                    });
                }
            }
        }
    }
    None
}

fn additions_first(dec: Decomposition) -> Vec<MoveKind> {
    std::iter::repeat_n(MoveKind::SingleLeft, dec.x as usize)
        .chain(std::iter::repeat_n(MoveKind::DoubleLeft, dec.y as usize))
        .chain(std::iter::repeat_n(MoveKind::SingleRight, dec.z as usize))
        .collect()
}

/// Replays `moves` from `start` under the guards, requiring every step to be
/// legal and the final count to equal `target`.
pub fn replays_to(
    triplet: &ClickTriplet,
    bounds: &BoardBounds,
    start: i64,
    target: i64,
    moves: &[MoveKind],
) -> bool {
    if !bounds.contains(start) {
        return false;
    }
    let mut count = start;
    for &kind in moves {
        if !is_legal(count, kind, triplet, bounds) {
            return false;
        }
        count = apply_delta(count, kind, triplet);
    }
    count == target
}

/// Solver answers for every target of a level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalTable {
    level: LevelSpec,
    entries: BTreeMap<i64, SolveResult>,
}

impl OptimalTable {
    pub fn level(&self) -> &LevelSpec {
        &self.level
    }

    pub fn get(&self, target: i64) -> Option<&SolveResult> {
        self.entries.get(&target)
    }

    pub fn n_min(&self, target: i64) -> Option<u32> {
        self.get(target).map(|r| r.n_min)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &SolveResult)> {
        self.entries.iter().map(|(t, r)| (*t, r))
    }
}

/// Solves every target of `level` from its start count using a single
/// forward BFS tree.
pub fn optimal_table(level: &LevelSpec) -> Result<OptimalTable, SolverError> {
    let tree = ReachTree::build(&level.triplet(), &level.bounds(), level.start_count());
    let entries = level
        .targets()
        .iter()
        .map(|t| {
            tree.path_to(t)
                .map(|r| (t, r))
                .ok_or(SolverError::Unreachable {
                    level: level.index(),
                    target: t,
                })
        })
        .collect::<Result<_, _>>()?;
    Ok(OptimalTable {
        level: level.clone(),
        entries,
    })
}
