//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs under `cargo test` (`harness = false`).

use std::collections::{BTreeMap, HashMap};
use std::process::{Command, Output, Stdio};
use std::sync::Arc;
use std::time::Instant;

use bublz_core::campaign::generate_campaign;
use bublz_core::engine::GuardKind;
use bublz_core::oracle::{layered_first_hits, layered_min_moves, wide_reach};
use bublz_core::policy::{run_seed, Player, PolicyKind, DEFAULT_STEP_CAP};
use bublz_core::solver::default_search_cap;
use bublz_core::{
    check_gcd_validity, regret_profile, solve_paper_ilp, solve_sequence, BoardBounds, Campaign,
    ClickTriplet, LevelSpec, MoveKind, Session, TargetPicker, TargetRange,
};
use bublz_server::{serve_on, AppState, SessionView};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn triplet(l: u32, d: u32, r: u32) -> ClickTriplet {
    ClickTriplet::new(l, d, r).unwrap()
}

fn example_triplets() -> [ClickTriplet; 2] {
    [triplet(3, 4, 1), triplet(5, 7, 4)]
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn solver_oracle_equivalence() -> Outcome {
    let bounds = BoardBounds::default();
    let mut checked = 0;
    let mut deepest = 0;
    for t in example_triplets() {
        for target in 2..=70 {
            let solved = solve_sequence(&t, &bounds, 1, target).map(|s| s.n_min);
            let oracle = layered_min_moves(&t, &bounds, 1, target, 25);
            ensure(solved.is_some() && solved == oracle, || {
                format!("{t} T={target}: solver {solved:?}, oracle {oracle:?}")
            })?;
            deepest = deepest.max(solved.unwrap_or(0));
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} instances agree at depth 25, deepest optimum {deepest}"
    ))
}

fn relaxation_properties() -> Outcome {
    let bounds = BoardBounds::default();
    let cap = default_search_cap(&bounds);
    for t in example_triplets() {
        for target in 2..=70 {
            let seq = solve_sequence(&t, &bounds, 1, target)
                .ok_or(format!("{t} T={target} unreachable"))?;
            let ilp = solve_paper_ilp(&t, &bounds, 1, target, cap)
                .ok_or(format!("{t} T={target} ilp infeasible"))?;
            ensure(ilp.n == seq.n_min, || {
                format!("{t} T={target}: N={} n_min={}", ilp.n, seq.n_min)
            })?;
        }
    }
    let mut campaign_instances = 0;
    let mut strict = 0;
    for seed in 1..=50 {
        let c = generate_campaign(seed, 6, bounds, TargetRange::default())
            .map_err(|e| e.to_string())?;
        for level in &c.levels {
            for target in level.targets().iter() {
                let t = level.triplet();
                let seq = solve_sequence(&t, &bounds, 1, target)
                    .ok_or(format!("{t} T={target} unreachable"))?;
                let ilp = solve_paper_ilp(&t, &bounds, 1, target, cap)
                    .ok_or(format!("{t} T={target} ilp infeasible"))?;
                ensure(ilp.n <= seq.n_min, || {
                    format!("{t} T={target}: N={} > n_min={}", ilp.n, seq.n_min)
                })?;
                if ilp.n < seq.n_min {
                    strict += 1;
                    ensure(!ilp.order_feasible, || {
                        format!("{t} T={target}: strict gap without flag")
                    })?;
                }
                campaign_instances += 1;
            }
        }
    }
    Ok(format!(
        "N = n_min on all 138 example instances; {campaign_instances} campaign instances (seeds 1-50), {strict} strict gaps, all flagged"
    ))
}

fn validity_equivalence() -> Outcome {
    let mut valid = 0;
    for l in 1..=10 {
        for d in 1..=10 {
            for r in 1..=10 {
                let t = triplet(l, d, r);
                let reach = wide_reach(&t, 1, 1500);
                let all = (2..=70).all(|target| reach.contains(&target));
                ensure(check_gcd_validity(&t) == all, || {
                    format!("{t}: gcd says {}, reachability says {all}", !all)
                })?;
                valid += usize::from(all);
            }
        }
    }
    Ok(format!("1000 triplets agree ({valid} valid), ceiling 1500"))
}

fn safety_fuzz() -> Outcome {
    let mut levels: Vec<LevelSpec> = example_triplets()
        .into_iter()
        .map(|t| LevelSpec::with_defaults(1, t).unwrap())
        .collect();
    levels.extend(
        generate_campaign(1, 6, BoardBounds::default(), TargetRange::default())
            .unwrap()
            .levels,
    );
    let mut rng = ChaCha8Rng::seed_from_u64(0x5afe);
    let (sessions, attempts_per) = (1_000, 300);
    let (mut attempts, mut rejected) = (0u64, 0u64);
    for i in 0..sessions {
        let level = &levels[i % levels.len()];
        let target = rng.random_range(2..=70);
        let mut s = Session::new(format!("fuzz-{i}").as_str().into(), level, target)
            .map_err(|e| e.to_string())?;
        for _ in 0..attempts_per {
            let kind = MoveKind::ALL[rng.random_range(0..3)];
            let before = s.clone();
            attempts += 1;
            match s.apply_move(kind) {
                Ok(()) => ensure(s.moves_made() == before.moves_made() + 1, || {
                    "accepted move not counted".into()
                })?,
                Err(v) => {
                    rejected += 1;
                    ensure(s == before, || {
                        format!("session {i}: rejected {kind} mutated state")
                    })?;
                    if before.is_complete() {
                        ensure(v.kind == GuardKind::SessionComplete, || {
                            "complete session gave wrong guard".into()
                        })?;
                    }
                }
            }
            ensure((1..=150).contains(&s.count()), || {
                format!("session {i}: count {}", s.count())
            })?;
            ensure(s.is_complete() == (s.count() == target), || {
                format!("session {i}: completion flag wrong")
            })?;
        }
        ensure(s.replays(), || {
            format!("session {i}: history does not replay")
        })?;
    }
    let accepted = attempts - rejected;
    ensure(accepted >= 100_000, || {
        format!("only {accepted} accepted moves")
    })?;
    Ok(format!("{attempts} attempts over {sessions} sessions ({accepted} accepted, {rejected} rejected), 0 violations"))
}

/// Walks of exactly `len` moves from `start` that first touch `target` on the
/// last move. Returns the lexicographically first one.
fn exact_walk(t: &ClickTriplet, target: i64, len: usize) -> Option<Vec<MoveKind>> {
    let legal = |c: i64, k: MoveKind| -> Option<i64> {
        let n = c + t.delta(k);
        let ok = match k {
            MoveKind::SingleRight => c > i64::from(t.r()),
            _ => n <= 150,
        };
        ok.then_some(n)
    };
    // can[j][c]: from count c, `j` moves can end on target without touching it earlier
    let mut can = vec![[false; 151]; len + 1];
    can[0][target as usize] = true;
    for j in 1..=len {
        for c in 1..=150i64 {
            if c == target {
                continue;
            }
            can[j][c as usize] = MoveKind::ALL
                .into_iter()
                .any(|k| legal(c, k).is_some_and(|n| can[j - 1][n as usize]));
        }
    }
    if !can[len][1] {
        return None;
    }
    let mut c = 1;
    let mut walk = Vec::with_capacity(len);
    for j in (1..=len).rev() {
        let (k, n) = MoveKind::ALL.into_iter().find_map(|k| {
            legal(c, k)
                .filter(|&n| can[j - 1][n as usize])
                .map(|n| (k, n))
        })?;
        walk.push(k);
        c = n;
    }
    Some(walk)
}

fn scoring() -> Outcome {
    let level = LevelSpec::with_defaults(1, triplet(3, 4, 1)).unwrap();
    for target in 2..=70 {
        let mut s = Session::new("ideal".into(), &level, target).map_err(|e| e.to_string())?;
        Player::new(PolicyKind::Ideal, 0)
            .play(&mut s, DEFAULT_STEP_CAP)
            .map_err(|e| e.to_string())?;
        let fb = s.feedback().map_err(|e| e.to_string())?;
        ensure(fb.score == 1000, || {
            format!("ideal T={target} scored {}", fb.score)
        })?;
    }
    let mut forced = 0;
    let mut impossible = 0;
    let max_k = 110;
    for target in 2..=70 {
        let n_min = solve_sequence(&level.triplet(), &level.bounds(), 1, target)
            .unwrap()
            .n_min as usize;
        for k in 0..=max_k {
            let Some(walk) = exact_walk(&level.triplet(), target, n_min + k) else {
                impossible += 1;
                continue;
            };
            let mut s = Session::new("forced".into(), &level, target).map_err(|e| e.to_string())?;
            for kind in walk {
                s.apply_move(kind)
                    .map_err(|v| format!("forced walk illegal: {}", v.message))?;
            }
            let fb = s.feedback().map_err(|e| e.to_string())?;
            let expected = (1000 - 10 * k as i64).max(0);
            ensure(fb.score == expected, || {
                format!("T={target} k={k}: score {} expected {expected}", fb.score)
            })?;
            forced += 1;
        }
    }
    Ok(format!(
        "ideal scores 1000 on all 69 targets; {forced} forced runs with k in 0..={max_k} score max(0, 1000-10k) ({impossible} (T,k) pairs admit no walk)"
    ))
}

fn regret_identity() -> Outcome {
    let bounds = BoardBounds::default();
    let levels: Vec<LevelSpec> = example_triplets()
        .into_iter()
        .map(|t| LevelSpec::with_defaults(1, t).unwrap())
        .collect();
    // oracle distances: first-hit layers from every count, computed lazily
    let mut hits: HashMap<(usize, i64), BTreeMap<i64, u32>> = HashMap::new();
    let mut picker = TargetPicker::new(42, TargetRange::default());
    let (mut completed, mut stalled, mut run) = (0, 0, 0u64);
    let mut moves_total = 0u64;
    while completed < 1_000 {
        let which = (run % 2) as usize;
        let level = &levels[which];
        let target = picker.pick();
        let mut s = Session::new(format!("r-{run}").as_str().into(), level, target)
            .map_err(|e| e.to_string())?;
        let result =
            Player::new(PolicyKind::Random, run_seed(7, run)).play(&mut s, DEFAULT_STEP_CAP);
        run += 1;
        if result.is_err() {
            stalled += 1;
            continue;
        }
        let trace = s.to_trace().ok_or("completed session without trace")?;
        let profile = regret_profile(&trace, &bounds).map_err(|e| e.to_string())?;
        let sum: i64 = profile.per_move_regret.iter().map(|&r| i64::from(r)).sum();
        let identity = i64::from(trace.moves.len() as u32) - i64::from(trace.optimal);
        ensure(sum == identity, || {
            format!("{}: sum {sum} != {identity}", trace.session)
        })?;

        let mut before = 1i64;
        for (i, m) in trace.moves.iter().enumerate() {
            let d = |c: i64, hits: &mut HashMap<(usize, i64), BTreeMap<i64, u32>>| {
                let map = hits
                    .entry((which, c))
                    .or_insert_with(|| layered_first_hits(&level.triplet(), &bounds, c, 150));
                i64::from(map[&target])
            };
            let regret = 1 + d(m.count, &mut hits) - d(before, &mut hits);
            ensure(regret >= 0, || {
                format!("{}: move {i} regret {regret}", trace.session)
            })?;
            ensure(regret == i64::from(profile.per_move_regret[i]), || {
                format!(
                    "{}: move {i} regret {} vs oracle {regret}",
                    trace.session, profile.per_move_regret[i]
                )
            })?;
            before = m.count;
        }
        moves_total += trace.moves.len() as u64;
        completed += 1;
    }
    Ok(format!(
        "{completed} completed traces ({moves_total} moves) match oracle regrets; {stalled} stalled runs skipped at cap {DEFAULT_STEP_CAP}"
    ))
}

fn bublz(args: &[&str], stdin: Option<&[u8]>) -> Output {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_bublz"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn bublz");
    let mut pipe = child.stdin.take().unwrap();
    if let Some(bytes) = stdin {
        pipe.write_all(bytes).unwrap();
    }
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn campaign_generation() -> Outcome {
    let args = ["campaign", "--seed", "1", "--levels", "6"];
    let first = bublz(&args, None);
    ensure(first.status.success(), || {
        String::from_utf8_lossy(&first.stderr).into_owned()
    })?;
    for _ in 0..3 {
        ensure(bublz(&args, None).stdout == first.stdout, || {
            "output differs between runs".into()
        })?;
    }
    let text = String::from_utf8(first.stdout.clone()).map_err(|e| e.to_string())?;
    let c = Campaign::from_json(&text).map_err(|e| e.to_string())?;
    ensure(c.levels.len() == 6, || format!("{} levels", c.levels.len()))?;
    let mut prev = 0;
    for level in &c.levels {
        let t = level.triplet();
        ensure(t.d() > t.l(), || format!("{t}: D <= L"))?;
        ensure(t.max_component() >= prev, || {
            format!("{t}: magnitude drops")
        })?;
        prev = t.max_component();
        let reach = layered_first_hits(&t, &level.bounds(), level.start_count(), 150);
        ensure(
            level.targets().iter().all(|x| reach.contains_key(&x)),
            || format!("{t}: oracle finds unreachable target"),
        )?;
    }
    let v = bublz(&["validate", "--campaign", "-"], Some(&first.stdout));
    ensure(v.status.success(), || {
        format!(
            "validate exit {:?}: {}",
            v.status.code(),
            String::from_utf8_lossy(&v.stdout)
        )
    })?;
    let triplets: Vec<String> = c.levels.iter().map(|l| l.triplet().to_string()).collect();
    Ok(format!(
        "6 levels {}, validate exit 0, byte-identical over 4 runs",
        triplets.join(" ")
    ))
}

async fn api_conformance_async() -> Outcome {
    let campaign = Campaign::new(
        1,
        example_triplets()
            .into_iter()
            .enumerate()
            .map(|(i, t)| LevelSpec::with_defaults(i as u32 + 1, t).unwrap())
            .collect(),
    )
    .map_err(|e| e.to_string())?;
    let state = Arc::new(AppState::new(campaign.clone(), 11, None).map_err(|e| e.to_string())?);
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0")
        .await
        .map_err(|e| e.to_string())?;
    let base = format!(
        "http://{}",
        listener.local_addr().map_err(|e| e.to_string())?
    );
    let server = tokio::spawn(serve_on(listener, state, None));
    let client = reqwest::Client::new();

    let post = |path: String, body: Value| {
        let req = client.post(format!("{base}{path}")).json(&body);
        async move {
            let resp = req.send().await.map_err(|e| e.to_string())?;
            let status = resp.status().as_u16();
            let v: Value = resp.json().await.map_err(|e| e.to_string())?;
            Ok::<_, String>((status, v))
        }
    };
    let get = |path: String| {
        let req = client.get(format!("{base}{path}"));
        async move {
            let resp = req.send().await.map_err(|e| e.to_string())?;
            let status = resp.status().as_u16();
            let v: Value = resp.json().await.map_err(|e| e.to_string())?;
            Ok::<_, String>((status, v))
        }
    };
    let as_view = |v: Value| serde_json::from_value::<SessionView>(v).map_err(|e| e.to_string());

    let mut rng = ChaCha8Rng::seed_from_u64(0xa91);
    let (mut states, mut guards) = (0, 0);
    for (level_index, target) in [(1u32, 2i64), (1, 42), (1, 70), (2, 2), (2, 33), (2, 69)] {
        let level = campaign.level(level_index).unwrap();
        let (status, v) = post(
            "/api/sessions".into(),
            json!({"level": level_index, "target": target}),
        )
        .await?;
        ensure(status == 201, || format!("create {status}: {v}"))?;
        let view = as_view(v)?;
        let mut direct =
            Session::new(view.id.as_str().into(), level, target).map_err(|e| e.to_string())?;
        ensure(view == SessionView::from(&direct), || {
            "created state differs".into()
        })?;

        // first a guard probe at count 1, then random moves, falling back to the ideal move
        let mut script = vec![MoveKind::SingleRight];
        let mut player = Player::new(PolicyKind::Ideal, 0);
        let mut shadow = direct.clone();
        for _ in 0..12 {
            let k = MoveKind::ALL[rng.random_range(0..3)];
            script.push(k);
            let _ = shadow.apply_move(k);
        }
        while !shadow.is_complete() {
            let k = player.choose(&shadow).ok_or("ideal player stuck")?;
            script.push(k);
            shadow.apply_move(k).map_err(|g| g.message)?;
        }
        script.push(MoveKind::SingleLeft);

        let path = format!("/api/sessions/{}", view.id);
        for kind in script {
            let (status, v) = post(format!("{path}/moves"), json!({"move": kind})).await?;
            match direct.apply_move(kind) {
                Ok(()) => {
                    ensure(status == 200, || format!("{kind}: status {status}"))?;
                    ensure(as_view(v)? == SessionView::from(&direct), || {
                        format!("{kind}: state differs")
                    })?;
                    states += 1;
                }
                Err(g) => {
                    ensure(
                        status == 409
                            && v["error"] == "guard_violation"
                            && v["kind"] == g.kind.as_str(),
                        || format!("{kind}: expected 409 {}, got {status} {v}", g.kind.as_str()),
                    )?;
                    let (_, now) = get(path.clone()).await?;
                    ensure(as_view(now)? == SessionView::from(&direct), || {
                        "guard mutated state".into()
                    })?;
                    guards += 1;
                }
            }
        }
        let (status, fb) = get(format!("{path}/feedback")).await?;
        let expected = serde_json::to_value(direct.feedback().map_err(|e| e.to_string())?).unwrap();
        ensure(status == 200 && fb == expected, || {
            format!("feedback {status} {fb} vs {expected}")
        })?;

        let (status, next) = post(format!("{path}/transition"), json!({"choice": "next"})).await?;
        if level_index == 1 {
            ensure(status == 201, || format!("transition {status}: {next}"))?;
            let next = as_view(next)?;
            ensure(
                next.level == 2 && next.count == 1 && next.moves_made == 0,
                || "bad next-level state".into(),
            )?;
        } else {
            ensure(status == 409 && next["error"] == "no_next_level", || {
                format!("last level transition {status}")
            })?;
        }
        let (status, retry) =
            post(format!("{path}/transition"), json!({"choice": "retry"})).await?;
        ensure(
            status == 201 && retry["target"] == target && retry["count"] == 1,
            || "retry state".into(),
        )?;
    }
    server.abort();
    Ok(format!("6 scripted sessions over a socket: {states} states and {guards} guard rejections match the engine; no static assets served"))
}

fn api_conformance() -> Outcome {
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| e.to_string())?;
    rt.block_on(api_conformance_async())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("solver-oracle equivalence", solver_oracle_equivalence),
        ("relaxation properties", relaxation_properties),
        ("validity-criterion equivalence", validity_equivalence),
        ("safety suite", safety_fuzz),
        ("scoring", scoring),
        ("regret identity", regret_identity),
        ("campaign generation", campaign_generation),
        ("api conformance", api_conformance),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} [{secs:.2}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} [{secs:.2}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
