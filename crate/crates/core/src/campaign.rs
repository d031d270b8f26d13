//! Campaigns: ordered levels, their generator and their JSON file format.
//!
//! The file is a single JSON document:
//!
//! ```json
//! {"seed": 1, "levels": [{"index": 1, "triplet": [3,4,1], "bounds": [1,150],
//!   "targets": [2,70], "scoring": {"base": 1000, "penalty": 10, "floor": 0}}]}
//! ```
//!
//! Every field is mandatory and unknown fields are rejected. Levels start
//! from the board minimum (one bubble with default bounds).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::design::{check_bounded_playability, ValidityReport};
use crate::model::{BoardBounds, ClickTriplet, LevelSpec, ModelError, ScoringRule, TargetRange};

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("campaign JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("campaign has no levels")]
    Empty,
    #[error("level at position {position} has index {found}, expected {expected}")]
    IndexMismatch {
        position: usize,
        expected: u32,
        found: u32,
    },
    #[error("no valid triplet for level {level} after {attempts} attempts")]
    GenerationExhausted { level: u32, attempts: u32 },
    #[error("level {index} {triplet} is not playable: unreachable {unreachable:?}, dead ends {dead_ends:?}")]
    Unplayable {
        index: u32,
        triplet: ClickTriplet,
        unreachable: Vec<i64>,
        dead_ends: Vec<i64>,
    },
    #[error("campaign magnitudes do not increase")]
    NoProgression,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Campaign {
    pub seed: u64,
    pub levels: Vec<LevelSpec>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CampaignFile {
    seed: u64,
    levels: Vec<LevelRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LevelRecord {
    index: u32,
    triplet: ClickTriplet,
    bounds: BoardBounds,
    targets: TargetRange,
    scoring: ScoringRule,
}

impl Campaign {
    pub fn new(seed: u64, levels: Vec<LevelSpec>) -> Result<Self, CampaignError> {
        if levels.is_empty() {
            return Err(CampaignError::Empty);
        }
        for (position, level) in levels.iter().enumerate() {
            let expected = position as u32 + 1;
            if level.index() != expected {
                return Err(CampaignError::IndexMismatch {
                    position,
                    expected,
                    found: level.index(),
                });
            }
        }
        Ok(Self { seed, levels })
    }

    pub fn level(&self, index: u32) -> Option<&LevelSpec> {
        index
            .checked_sub(1)
            .and_then(|i| self.levels.get(i as usize))
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn from_json(text: &str) -> Result<Self, CampaignError> {
        let file: CampaignFile = serde_json::from_str(text)?;
        let levels = file
            .levels
            .into_iter()
            .map(|r| {
                LevelSpec::new(
                    r.index,
                    r.triplet,
                    r.bounds,
                    r.targets,
                    r.scoring,
                    r.bounds.min_count(),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(file.seed, levels)
    }

    /// Pretty-printed document with a trailing newline.
    pub fn to_json(&self) -> String {
        let file = CampaignFile {
            seed: self.seed,
            levels: self
                .levels
                .iter()
                .map(|l| LevelRecord {
                    index: l.index(),
                    triplet: l.triplet(),
                    bounds: l.bounds(),
                    targets: l.targets(),
                    scoring: l.scoring(),
                })
                .collect(),
        };
        let mut out = serde_json::to_string_pretty(&file).expect("campaign serializes");
        out.push('\n');
        out
    }

    pub fn reports(&self) -> Vec<ValidityReport> {
        self.levels.iter().map(level_report).collect()
    }

    /// Fails on the first level that is not playable.
    pub fn check_playable(&self) -> Result<(), CampaignError> {
        for level in &self.levels {
            let report = level_report(level);
            if !report.is_playable() {
                return Err(CampaignError::Unplayable {
                    index: level.index(),
                    triplet: level.triplet(),
                    unreachable: report.unreachable_targets,
                    dead_ends: report.dead_ends,
                });
            }
        }
        Ok(())
    }

    /// Max component never decreases and rises at least once (a single level
    /// trivially qualifies).
    pub fn is_progressive(&self) -> bool {
        let mags: Vec<u32> = self
            .levels
            .iter()
            .map(|l| l.triplet().max_component())
            .collect();
        mags.windows(2).all(|w| w[0] <= w[1])
            && (mags.len() < 2 || mags.windows(2).any(|w| w[0] < w[1]))
    }
}

pub fn level_report(level: &LevelSpec) -> ValidityReport {
    check_bounded_playability(
        &level.triplet(),
        &level.bounds(),
        level.start_count(),
        &level.targets(),
    )
}

/// Magnitude bands for generated levels: level `i` (1-based) draws its
/// largest component from `[base + step*(i-1), base + width + step*(i-1)]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandConfig {
    pub base: u32,
    pub width: u32,
    pub step: u32,
    pub max_attempts: u32,
}

impl Default for BandConfig {
    fn default() -> Self {
        Self {
            base: 3,
            width: 1,
            step: 2,
            max_attempts: 256,
        }
    }
}

impl BandConfig {
    pub fn band(&self, level: u32) -> (u32, u32) {
        let lo = self.base + self.step * (level - 1);
        (lo, lo + self.width)
    }
}

pub fn generate_campaign(
    seed: u64,
    n_levels: u32,
    bounds: BoardBounds,
    targets: TargetRange,
) -> Result<Campaign, CampaignError> {
    generate_campaign_with(seed, n_levels, bounds, targets, &BandConfig::default())
}

/// Draws `R < L < D` with `D` in the level's band, rejecting candidates that
/// fail the gcd check, bounded playability or dead-end freedom. `D` never
/// drops below the previous level's, so magnitudes are non-decreasing.
pub fn generate_campaign_with(
    seed: u64,
    n_levels: u32,
    bounds: BoardBounds,
    targets: TargetRange,
    bands: &BandConfig,
) -> Result<Campaign, CampaignError> {
    if n_levels == 0 {
        return Err(CampaignError::Empty);
    }
    targets.check_within(&bounds)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut levels = Vec::with_capacity(n_levels as usize);
    let mut prev_d = 0;
    for index in 1..=n_levels {
        let (band_lo, band_hi) = bands.band(index);
        let lo = band_lo.max(prev_d).max(3);
        if lo > band_hi {
            return Err(CampaignError::GenerationExhausted {
                level: index,
                attempts: 0,
            });
        }
        let mut chosen = None;
        for _ in 0..bands.max_attempts {
            let d = rng.random_range(lo..=band_hi);
            let l = rng.random_range(2..d);
            let r = rng.random_range(1..l);
            let triplet = ClickTriplet::new(l, d, r)?;
            let level = LevelSpec::new(
                index,
                triplet,
                bounds,
                targets,
                ScoringRule::default(),
                bounds.min_count(),
            )?;
            if level_report(&level).is_playable() {
                chosen = Some(level);
                break;
            }
        }
        let level = chosen.ok_or(CampaignError::GenerationExhausted {
            level: index,
            attempts: bands.max_attempts,
        })?;
        prev_d = level.triplet().d();
        levels.push(level);
    }
    let campaign = Campaign::new(seed, levels)?;
    if !campaign.is_progressive() {
        return Err(CampaignError::NoProgression);
    }
    Ok(campaign)
}
