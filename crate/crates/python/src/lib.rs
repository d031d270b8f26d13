//! Python module `bublz`.
//!
//! Triplets are passed as `(L, D, R)` tuples and moves as the strings
//! `"single_left"`, `"double_left"` and `"single_right"`. The board is the
//! default `[1, 150]` with targets in `[2, 70]`.

use std::collections::BTreeMap;

use bublz_core::solver::default_search_cap;
use bublz_core::trace::TraceRecord;
use bublz_core::{self as core, BoardBounds, ClickTriplet, LevelSpec, MoveKind, TargetRange};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(
    bublz,
    GuardViolation,
    PyException,
    "A move rejected by the game rules."
);

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_triplet((l, d, r): (u32, u32, u32)) -> PyResult<ClickTriplet> {
    ClickTriplet::new(l, d, r).map_err(value_err)
}

fn names(moves: &[MoveKind]) -> Vec<String> {
    moves.iter().map(|k| k.as_str().to_string()).collect()
}

#[pyclass(frozen, get_all, skip_from_py_object, module = "bublz")]
#[derive(Clone)]
pub struct Solution {
    n_min: u32,
    x: u32,
    y: u32,
    z: u32,
    witness: Vec<String>,
}

#[pymethods]
impl Solution {
    fn __repr__(&self) -> String {
        format!(
            "Solution(n_min={}, x={}, y={}, z={})",
            self.n_min, self.x, self.y, self.z
        )
    }
}

#[pyclass(frozen, get_all, skip_from_py_object, module = "bublz")]
#[derive(Clone)]
pub struct IlpSolution {
    n: u32,
    x: u32,
    y: u32,
    z: u32,
    witness: Vec<String>,
    order_feasible: bool,
}

#[pymethods]
impl IlpSolution {
    fn __repr__(&self) -> String {
        format!(
            "IlpSolution(n={}, x={}, y={}, z={}, order_feasible={})",
            self.n,
            self.x,
            self.y,
            self.z,
            if self.order_feasible { "True" } else { "False" }
        )
    }
}

#[pyclass(frozen, get_all, skip_from_py_object, module = "bublz")]
#[derive(Clone)]
pub struct ValidityReport {
    gcd_ok: bool,
    bounded_ok: bool,
    unreachable_targets: Vec<i64>,
    hardest_target: Option<(i64, u32)>,
    dead_ends: Vec<i64>,
}

#[pymethods]
impl ValidityReport {
    fn is_playable(&self) -> bool {
        self.gcd_ok && self.bounded_ok && self.dead_ends.is_empty()
    }
}

#[pyclass(frozen, get_all, skip_from_py_object, module = "bublz")]
#[derive(Clone)]
pub struct RegretProfile {
    per_move_regret: Vec<u32>,
    total_regret: u32,
    moves_made: u32,
    optimal_moves: u32,
    efficiency: f64,
}

/// Fewest moves from `start` to `target`, or `None` when unreachable.
#[pyfunction]
#[pyo3(signature = (triplet, target, start = 1))]
fn solve_sequence(triplet: (u32, u32, u32), target: i64, start: i64) -> PyResult<Option<Solution>> {
    let t = to_triplet(triplet)?;
    Ok(
        core::solve_sequence(&t, &BoardBounds::default(), start, target).map(|s| Solution {
            n_min: s.n_min,
            x: s.decomposition.x,
            y: s.decomposition.y,
            z: s.decomposition.z,
            witness: names(&s.witness),
        }),
    )
}

/// Minimum of x + y + z with start + Lx + Dy - Rz = target, ignoring the board.
#[pyfunction]
#[pyo3(signature = (triplet, target, start = 1, search_cap = None))]
fn solve_paper_ilp(
    triplet: (u32, u32, u32),
    target: i64,
    start: i64,
    search_cap: Option<u32>,
) -> PyResult<Option<IlpSolution>> {
    let t = to_triplet(triplet)?;
    let bounds = BoardBounds::default();
    let cap = search_cap.unwrap_or_else(|| default_search_cap(&bounds));
    Ok(
        core::solve_paper_ilp(&t, &bounds, start, target, cap).map(|s| IlpSolution {
            n: s.n,
            x: s.decomposition.x,
            y: s.decomposition.y,
            z: s.decomposition.z,
            witness: names(&s.witness),
            order_feasible: s.order_feasible,
        }),
    )
}

#[pyfunction]
fn check_gcd_validity(triplet: (u32, u32, u32)) -> PyResult<bool> {
    Ok(core::check_gcd_validity(&to_triplet(triplet)?))
}

#[pyfunction]
fn check_bounded_playability(triplet: (u32, u32, u32)) -> PyResult<ValidityReport> {
    let t = to_triplet(triplet)?;
    let bounds = BoardBounds::default();
    let r =
        core::check_bounded_playability(&t, &bounds, bounds.min_count(), &TargetRange::default());
    Ok(ValidityReport {
        gcd_ok: r.gcd_ok,
        bounded_ok: r.bounded_ok,
        unreachable_targets: r.unreachable_targets,
        hardest_target: r.hardest_target,
        dead_ends: r.dead_ends,
    })
}

/// `{target: n_min}` for every reachable target in [2, 70].
#[pyfunction]
fn optimal_table(triplet: (u32, u32, u32)) -> PyResult<BTreeMap<i64, u32>> {
    let t = to_triplet(triplet)?;
    let bounds = BoardBounds::default();
    Ok(TargetRange::default()
        .iter()
        .filter_map(|target| {
            core::solve_sequence(&t, &bounds, bounds.min_count(), target).map(|s| (target, s.n_min))
        })
        .collect())
}

/// Seeded campaign as the JSON campaign file text.
#[pyfunction]
#[pyo3(signature = (seed, levels = 6))]
fn generate_campaign(seed: u64, levels: u32) -> PyResult<String> {
    core::generate_campaign(seed, levels, BoardBounds::default(), TargetRange::default())
        .map(|c| c.to_json())
        .map_err(value_err)
}

/// Regret profile of one trace-log line, replayed on the default board.
#[pyfunction]
fn regret_profile(trace_line: &str) -> PyResult<RegretProfile> {
    let trace = TraceRecord::from_line(trace_line).map_err(value_err)?;
    let p = core::regret_profile(&trace, &BoardBounds::default()).map_err(value_err)?;
    Ok(RegretProfile {
        per_move_regret: p.per_move_regret,
        total_regret: p.total_regret,
        moves_made: p.moves_made,
        optimal_moves: p.optimal_moves,
        efficiency: p.efficiency,
    })
}

/// One play-through toward a fixed target.
#[pyclass(module = "bublz")]
pub struct Session {
    inner: core::Session,
}

#[pymethods]
impl Session {
    #[new]
    #[pyo3(signature = (triplet, target, session_id = "py".to_string(), level = 1))]
    fn new(
        triplet: (u32, u32, u32),
        target: i64,
        session_id: String,
        level: u32,
    ) -> PyResult<Self> {
        let spec = LevelSpec::with_defaults(level, to_triplet(triplet)?).map_err(value_err)?;
        let inner =
            core::Session::new(core::SessionId(session_id), &spec, target).map_err(value_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn count(&self) -> i64 {
        self.inner.count()
    }

    #[getter]
    fn target(&self) -> i64 {
        self.inner.target()
    }

    #[getter]
    fn moves_made(&self) -> u32 {
        self.inner.moves_made()
    }

    #[getter]
    fn optimal_moves(&self) -> u32 {
        self.inner.optimal_for_target()
    }

    #[getter]
    fn complete(&self) -> bool {
        self.inner.is_complete()
    }

    fn legal_moves(&self) -> Vec<String> {
        names(&self.inner.legal_moves())
    }

    /// Applies a move; raises `GuardViolation` and leaves the session
    /// untouched when the move is illegal.
    fn apply_move(&mut self, kind: &str) -> PyResult<i64> {
        let kind: MoveKind = kind.parse().map_err(value_err)?;
        self.inner
            .apply_move(kind)
            .map_err(|v| GuardViolation::new_err((v.kind.as_str(), v.message)))?;
        Ok(self.inner.count())
    }

    /// `(moves_made, optimal_moves, score)` once complete.
    fn feedback(&self) -> PyResult<(u32, u32, i64)> {
        let fb = self.inner.feedback().map_err(value_err)?;
        Ok((fb.moves_made, fb.optimal_moves, fb.score))
    }

    /// Trace-log line for a completed session, else `None`.
    fn trace_line(&self) -> Option<String> {
        self.inner.to_trace().map(|t| t.to_line())
    }

    fn __repr__(&self) -> String {
        format!(
            "Session(count={}, target={}, moves_made={}, complete={})",
            self.inner.count(),
            self.inner.target(),
            self.inner.moves_made(),
            if self.inner.is_complete() {
                "True"
            } else {
                "False"
            }
        )
    }
}

#[pymodule]
fn bublz(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GuardViolation", m.py().get_type::<GuardViolation>())?;
    m.add_class::<Solution>()?;
    m.add_class::<IlpSolution>()?;
    m.add_class::<ValidityReport>()?;
    m.add_class::<RegretProfile>()?;
    m.add_class::<Session>()?;
    m.add_function(wrap_pyfunction!(solve_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(solve_paper_ilp, m)?)?;
    m.add_function(wrap_pyfunction!(check_gcd_validity, m)?)?;
    m.add_function(wrap_pyfunction!(check_bounded_playability, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_table, m)?)?;
    m.add_function(wrap_pyfunction!(generate_campaign, m)?)?;
    m.add_function(wrap_pyfunction!(regret_profile, m)?)?;
    Ok(())
}
