//! Triplet validity and level playability.
//!
//! Over non-negative `x, y, z` the set `{Lx + Dy - Rz}` is exactly the set of
//! multiples of `gcd(L, D, R)`. The negative generator `-R` lets any large
//! positive combination be walked back down, so the gaps that a numerical
//! semigroup generated by `L` and `D` alone would leave disappear. Hence every
//! positive number is expressible iff the gcd is 1.
//!
//! The board bound breaks that argument: a triplet can have gcd 1 and still
//! leave targets unreachable without leaving `[1, 150]`. The bounded check is
//! the one levels must pass.

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{is_legal, BoardBounds, ClickTriplet, MoveKind, TargetRange};
use crate::solver::ReachTree;

pub fn check_gcd_validity(triplet: &ClickTriplet) -> bool {
    triplet.l().gcd(&triplet.d()).gcd(&triplet.r()) == 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub triplet: ClickTriplet,
    pub gcd_ok: bool,
    pub bounded_ok: bool,
    pub unreachable_targets: Vec<i64>,
    /// Target with the largest minimum move count, smallest such target on ties.
    pub hardest_target: Option<(i64, u32)>,
    /// Reachable counts where no move is legal.
    pub dead_ends: Vec<i64>,
}

impl ValidityReport {
    /// Both criteria hold and no reachable count strands the player.
    pub fn is_playable(&self) -> bool {
        self.gcd_ok && self.bounded_ok && self.dead_ends.is_empty()
    }
}

pub fn check_bounded_playability(
    triplet: &ClickTriplet,
    bounds: &BoardBounds,
    start: i64,
    targets: &TargetRange,
) -> ValidityReport {
    let tree = ReachTree::build(triplet, bounds, start);
    let mut unreachable_targets = Vec::new();
    let mut hardest_target: Option<(i64, u32)> = None;
    for t in targets.iter() {
        match tree.depth(t) {
            Some(n) if hardest_target.is_none_or(|(_, best)| n > best) => {
                hardest_target = Some((t, n))
            }
            Some(_) => {}
            None => unreachable_targets.push(t),
        }
    }
    let dead_ends = tree
        .reachable()
        .filter(|&c| {
            MoveKind::ALL
                .iter()
                .all(|&k| !is_legal(c, k, triplet, bounds))
        })
        .collect();
    ValidityReport {
        triplet: *triplet,
        gcd_ok: check_gcd_validity(triplet),
        bounded_ok: unreachable_targets.is_empty(),
        unreachable_targets,
        hardest_target,
        dead_ends,
    }
}

/// Seeded uniform draws of targets.
///
/// Draws are uniform over the inclusive range.
#[derive(Debug, Clone)]
pub struct TargetPicker {
    seed: u64,
    range: TargetRange,
    rng: ChaCha8Rng,
}

impl TargetPicker {
    pub fn new(seed: u64, range: TargetRange) -> Self {
        Self {
            seed,
            range,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn range(&self) -> TargetRange {
        self.range
    }

    pub fn pick(&mut self) -> i64 {
        self.rng.random_range(self.range.lo()..=self.range.hi())
    }

    /// Draw from a different range while keeping this picker's stream.
    pub fn pick_in(&mut self, range: &TargetRange) -> i64 {
        self.rng.random_range(range.lo()..=range.hi())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(l: u32, d: u32, r: u32) -> ClickTriplet {
        ClickTriplet::new(l, d, r).unwrap()
    }

    fn report(triplet: ClickTriplet) -> ValidityReport {
        check_bounded_playability(
            &triplet,
            &BoardBounds::default(),
            1,
            &TargetRange::default(),
        )
    }

    #[test]
    fn gcd_examples() {
        assert!(check_gcd_validity(&t(3, 4, 1)));
        assert!(!check_gcd_validity(&t(2, 4, 2)));
        assert!(check_gcd_validity(&t(5, 7, 4)));
    }

    #[test]
    fn example_triplets_are_playable() {
        let r = report(t(3, 4, 1));
        assert!(r.bounded_ok && r.gcd_ok && r.is_playable());
        assert_eq!(r.hardest_target, Some((70, 18)));
        assert!(report(t(5, 7, 4)).is_playable());
    }

    #[test]
    fn parity_blocks_even_targets() {
        let r = report(t(2, 4, 2));
        assert!(!r.bounded_ok);
        assert_eq!(
            r.unreachable_targets,
            (2..=70).step_by(2).collect::<Vec<_>>()
        );
    }

    #[test]
    fn oversized_triplet_strands_player() {
        let r = report(t(149, 150, 148));
        assert!(r.gcd_ok);
        assert!(!r.bounded_ok);
        // reachable set is {1, 2, 150}; only 2 lies in the target range
        assert_eq!(r.unreachable_targets, (3..=70).collect::<Vec<_>>());
        assert_eq!(r.dead_ends, vec![2]);
    }

    #[test]
    fn singleton_range_pick() {
        let mut p = TargetPicker::new(99, TargetRange::new(5, 5).unwrap());
        for _ in 0..10 {
            assert_eq!(p.pick(), 5);
        }
    }

    #[test]
    fn picks_in_range_and_replayable() {
        let mut a = TargetPicker::new(7, TargetRange::default());
        let mut b = TargetPicker::new(7, TargetRange::default());
        for _ in 0..1000 {
            let v = a.pick();
            assert!((2..=70).contains(&v));
            assert_eq!(v, b.pick());
        }
    }

    #[test]
    fn draws_are_uniform_within_five_sigma() {
        let mut p = TargetPicker::new(2024, TargetRange::default());
        let draws = 100_000;
        let mut freq = [0u32; 71];
        for _ in 0..draws {
            freq[p.pick() as usize] += 1;
        }
        let prob = 1.0 / 69.0;
        let expect = draws as f64 * prob;
        let sigma = (draws as f64 * prob * (1.0 - prob)).sqrt();
        for (v, &n) in freq.iter().enumerate().skip(2) {
            let dev = (f64::from(n) - expect).abs();
            assert!(dev <= 5.0 * sigma, "value {v}: {n} draws vs {expect:.1}");
        }
        assert_eq!(freq[0] + freq[1], 0);
    }
}
