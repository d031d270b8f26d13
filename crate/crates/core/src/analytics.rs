//! Distance-to-ideal metrics for play traces.
//!
//! With `d(s)` the fewest moves from count `s` to the target, a move
//! `s -> s'` carries regret `1 + d(s') - d(s)`. An optimal move has regret 0,
//! regret is never negative, and the regrets of a trace telescope to
//! `moves_made - optimal_moves`. Wall-clock latency is summarised separately
//! and plays no part in regret.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{apply_delta, is_legal, BoardBounds};
use crate::solver::distances_to;
use crate::trace::TraceRecord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyticsError {
    #[error("invalid trace {session}: {reason}")]
    InvalidTrace { session: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretProfile {
    pub per_move_regret: Vec<u32>,
    pub total_regret: u32,
    pub moves_made: u32,
    pub optimal_moves: u32,
    /// `optimal_moves / moves_made`; 1 for a session that needed no moves.
    pub efficiency: f64,
}

/// Replays `trace` from the board minimum on `bounds` and scores every move
/// against the solver's distance-to-target.
pub fn regret_profile(
    trace: &TraceRecord,
    bounds: &BoardBounds,
) -> Result<RegretProfile, AnalyticsError> {
    let invalid = |reason: String| AnalyticsError::InvalidTrace {
        session: trace.session.clone(),
        reason,
    };
    let triplet = trace.triplet;
    let dist = distances_to(&triplet, bounds, trace.target);
    let mut count = bounds.min_count();
    let optimal = dist
        .get(count)
        .ok_or_else(|| invalid(format!("target {} is unreachable", trace.target)))?;
    if optimal != trace.optimal {
        return Err(invalid(format!(
            "recorded optimum {} but solver gives {optimal}",
            trace.optimal
        )));
    }

    let mut per_move_regret = Vec::with_capacity(trace.moves.len());
    for (i, mv) in trace.moves.iter().enumerate() {
        if count == trace.target {
            return Err(invalid(format!(
                "move {} played after reaching the target",
                i + 1
            )));
        }
        if !is_legal(count, mv.kind, &triplet, bounds) {
            return Err(invalid(format!(
                "move {} ({}) is illegal at count {count}",
                i + 1,
                mv.kind
            )));
        }
        let next = apply_delta(count, mv.kind, &triplet);
        if next != mv.count {
            return Err(invalid(format!(
                "move {} records count {} but replay gives {next}",
                i + 1,
                mv.count
            )));
        }
        // both ends lie on a path that reaches the target
        let before = dist.get(count).expect("on a path to the target");
        let after = dist.get(next).expect("on a path to the target");
        per_move_regret.push(1 + after - before);
        count = next;
    }
    if count != trace.target {
        return Err(invalid(format!(
            "trace ends at {count}, not the target {}",
            trace.target
        )));
    }

    let moves_made = trace.moves.len() as u32;
    Ok(RegretProfile {
        total_regret: per_move_regret.iter().sum(),
        per_move_regret,
        moves_made,
        optimal_moves: optimal,
        efficiency: if moves_made == 0 {
            1.0
        } else {
            f64::from(optimal) / f64::from(moves_made)
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyStats {
    pub moves: usize,
    pub mean_ms: f64,
    pub median_ms: f64,
    pub max_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub traces: usize,
    pub mean_efficiency: f64,
    pub median_efficiency: f64,
    pub mean_total_regret: f64,
    pub mean_moves: f64,
    pub mean_score: f64,
    pub latency: Option<LatencyStats>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub overall: Option<GroupSummary>,
    pub levels: BTreeMap<u32, GroupSummary>,
}

/// Per-level and overall statistics over valid traces.
///
/// `bounds_for` maps a level index to its board; values are sorted before
/// summing so the result does not depend on trace order.
pub fn aggregate(
    traces: &[TraceRecord],
    bounds_for: impl Fn(u32) -> BoardBounds,
) -> Result<Summary, AnalyticsError> {
    let mut rows: Vec<(u32, &TraceRecord, RegretProfile)> = Vec::with_capacity(traces.len());
    for trace in traces {
        let profile = regret_profile(trace, &bounds_for(trace.level))?;
        rows.push((trace.level, trace, profile));
    }
    if rows.is_empty() {
        return Ok(Summary::default());
    }
    let mut levels: BTreeMap<u32, Vec<(&TraceRecord, &RegretProfile)>> = BTreeMap::new();
    for (level, trace, profile) in &rows {
        levels.entry(*level).or_default().push((trace, profile));
    }
    let all: Vec<_> = rows.iter().map(|(_, t, p)| (*t, p)).collect();
    Ok(Summary {
        overall: Some(summarise(&all)),
        levels: levels
            .into_iter()
            .map(|(k, v)| (k, summarise(&v)))
            .collect(),
    })
}

fn summarise(group: &[(&TraceRecord, &RegretProfile)]) -> GroupSummary {
    let eff: Vec<f64> = group.iter().map(|(_, p)| p.efficiency).collect();
    let regret: Vec<f64> = group
        .iter()
        .map(|(_, p)| f64::from(p.total_regret))
        .collect();
    let moves: Vec<f64> = group.iter().map(|(_, p)| f64::from(p.moves_made)).collect();
    let scores: Vec<f64> = group.iter().map(|(t, _)| t.score as f64).collect();
    let gaps: Vec<u64> = group
        .iter()
        .flat_map(|(t, _)| {
            t.moves.iter().scan(0u64, |prev, m| {
                let gap = m.t_ms.saturating_sub(*prev);
                *prev = m.t_ms;
                Some(gap)
            })
        })
        .collect();
    let latency = (!gaps.is_empty()).then(|| {
        let as_f: Vec<f64> = gaps.iter().map(|&g| g as f64).collect();
        LatencyStats {
            moves: gaps.len(),
            mean_ms: mean(&as_f),
            median_ms: median(&as_f),
            max_ms: gaps.iter().copied().max().unwrap_or(0),
        }
    });
    GroupSummary {
        traces: group.len(),
        mean_efficiency: mean(&eff),
        median_efficiency: median(&eff),
        mean_total_regret: mean(&regret),
        mean_moves: mean(&moves),
        mean_score: mean(&scores),
        latency,
    }
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    sorted(values).iter().sum::<f64>() / values.len() as f64
}

fn median(values: &[f64]) -> f64 {
    let v = sorted(values);
    match v.len() {
        0 => 0.0,
        n if n % 2 == 1 => v[n / 2],
        n => (v[n / 2 - 1] + v[n / 2]) / 2.0,
    }
}

impl Summary {
    pub fn is_empty(&self) -> bool {
        self.overall.is_none()
    }

    /// Aligned plain-text table, one row per level plus a total row.
    pub fn to_table(&self) -> String {
        let header = [
            "level",
            "traces",
            "mean_eff",
            "median_eff",
            "mean_regret",
            "mean_moves",
            "mean_score",
            "mean_ms",
        ];
        let mut rows: Vec<[String; 8]> = Vec::new();
        let row = |name: String, g: &GroupSummary| {
            [
                name,
                g.traces.to_string(),
                format!("{:.4}", g.mean_efficiency),
                format!("{:.4}", g.median_efficiency),
                format!("{:.2}", g.mean_total_regret),
                format!("{:.2}", g.mean_moves),
                format!("{:.1}", g.mean_score),
                g.latency
                    .as_ref()
                    .map_or("-".to_string(), |l| format!("{:.0}", l.mean_ms)),
            ]
        };
        for (level, g) in &self.levels {
            rows.push(row(level.to_string(), g));
        }
        if let Some(all) = &self.overall {
            rows.push(row("all".to_string(), all));
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|i| {
                rows.iter()
                    .map(|r| r[i].len())
                    .chain([header[i].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        let line = |cells: Vec<&str>, out: &mut String| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
        };
        line(header.to_vec(), &mut out);
        for r in &rows {
            line(r.iter().map(String::as_str).collect(), &mut out);
        }
        out
    }
}
