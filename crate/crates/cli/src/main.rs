//! `bublz`: solve, validate, generate, simulate, analyze and serve.
//!
//! Exit codes: 0 success, 1 validation or analysis findings, 2 unreachable
//! target, 3 policy stall, 64 usage error.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bublz_core::campaign::level_report;
use bublz_core::policy::{simulate, PolicyKind, DEFAULT_STEP_CAP};
use bublz_core::solver::{default_search_cap, ReachTree};
use bublz_core::trace::{read_traces, TraceRecord};
use bublz_core::{
    aggregate, check_bounded_playability, generate_campaign, regret_profile, solve_paper_ilp,
    solve_sequence, BoardBounds, Campaign, ClickTriplet, LevelSpec, MoveKind, RegretProfile,
    TargetRange, ValidityReport,
};
use bublz_server::ServerConfig;
use clap::error::ErrorKind;
use clap::{ArgGroup, Args, Parser, Subcommand};
use serde_json::json;

const EXIT_FINDINGS: u8 = 1;
const EXIT_UNREACHABLE: u8 = 2;
const EXIT_STALL: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "bublz", version, about = "Bubble-arithmetic puzzle toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fewest moves from one bubble to a target
    Solve(SolveArgs),
    /// Optimal move counts for every target of a triplet
    Table(TableArgs),
    /// Check a triplet or a campaign file
    Validate(ValidateArgs),
    /// Generate a seeded campaign as JSON on stdout
    Campaign(CampaignArgs),
    /// Play sessions with a scripted policy and emit trace lines
    Simulate(SimulateArgs),
    /// Summarise a JSON Lines trace log
    Analyze(AnalyzeArgs),
    /// Run the HTTP session service
    Serve(ServeArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Click magnitudes as L,D,R
    #[arg(long)]
    triplet: ClickTriplet,
    #[arg(long, allow_negative_numbers = true)]
    target: i64,
    /// Print the witness sequence
    #[arg(long)]
    trace: bool,
    /// Also solve the integer program and report whether the optima agree
    #[arg(long)]
    compare: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    triplet: ClickTriplet,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["triplet", "campaign"])))]
struct ValidateArgs {
    #[arg(long)]
    triplet: Option<ClickTriplet>,
    /// Campaign file to check, `-` for stdin
    #[arg(long)]
    campaign: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CampaignArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..))]
    levels: u32,
}

#[derive(Args)]
struct SimulateArgs {
    /// ideal, random or greedy
    #[arg(long)]
    policy: PolicyKind,
    #[arg(long)]
    triplet: ClickTriplet,
    /// Single target; every target in [2,70] when omitted
    #[arg(long)]
    target: Option<i64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    runs: u64,
    #[arg(long, default_value_t = DEFAULT_STEP_CAP)]
    step_cap: u32,
    /// Write trace lines here instead of stdout; the summary then goes to stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Trace log, `-` for stdin
    path: PathBuf,
    /// Print every trace's regret profile
    #[arg(long)]
    per_move: bool,
    #[arg(long)]
    json: bool,
    /// Campaign file supplying each level's board
    #[arg(long)]
    campaign: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: IpAddr,
    #[arg(long)]
    campaign: PathBuf,
    #[arg(long)]
    trace_log: Option<PathBuf>,
    /// Seed for server-drawn targets; entropy when omitted
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    static_dir: Option<PathBuf>,
}

type CmdResult = Result<u8, String>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Table(a) => cmd_table(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Campaign(a) => cmd_campaign(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Serve(a) => cmd_serve(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_FINDINGS)
        }
    }
}

fn kinds(moves: &[MoveKind]) -> String {
    moves
        .iter()
        .map(|k| k.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_solve(a: SolveArgs) -> CmdResult {
    let bounds = BoardBounds::default();
    let start = bounds.min_count();
    let solved = solve_sequence(&a.triplet, &bounds, start, a.target);
    let ilp = a
        .compare
        .then(|| {
            solve_paper_ilp(
                &a.triplet,
                &bounds,
                start,
                a.target,
                default_search_cap(&bounds),
            )
        })
        .flatten();
    let agree = solved.as_ref().map(|s| s.n_min) == ilp.as_ref().map(|i| i.n);

    if a.json {
        let mut out = json!({
            "triplet": a.triplet,
            "target": a.target,
            "start": start,
            "solution": solved,
        });
        if a.compare {
            out["ilp"] = serde_json::to_value(&ilp).map_err(|e| e.to_string())?;
            out["match"] = json!(agree);
        }
        println!("{out}");
    } else {
        match &solved {
            Some(s) => {
                let d = s.decomposition;
                println!("n_min={} x={} y={} z={}", s.n_min, d.x, d.y, d.z);
                if a.trace {
                    println!("witness: {}", kinds(&s.witness));
                    let mut count = start;
                    let mut counts = vec![count];
                    for &k in &s.witness {
                        count += a.triplet.delta(k);
                        counts.push(count);
                    }
                    let counts: Vec<String> = counts.iter().map(i64::to_string).collect();
                    println!("counts: {}", counts.join(" -> "));
                }
            }
            None => println!("unreachable: {} from {start} with {}", a.target, a.triplet),
        }
        if a.compare {
            match &ilp {
                Some(i) => {
                    let d = i.decomposition;
                    println!(
                        "ilp: N={} x={} y={} z={} order_feasible={}",
                        i.n, d.x, d.y, d.z, i.order_feasible
                    );
                }
                None => println!("ilp: infeasible"),
            }
            println!("{}", if agree { "match" } else { "mismatch" });
        }
    }
    Ok(if solved.is_some() {
        0
    } else {
        EXIT_UNREACHABLE
    })
}

fn cmd_table(a: TableArgs) -> CmdResult {
    let bounds = BoardBounds::default();
    let reach = ReachTree::build(&a.triplet, &bounds, bounds.min_count());
    let rows: Vec<(i64, Option<u32>)> = TargetRange::default()
        .iter()
        .map(|t| (t, reach.depth(t)))
        .collect();
    if a.json {
        let rows: Vec<_> = rows
            .iter()
            .map(|(t, n)| json!({"target": t, "n_min": n}))
            .collect();
        println!("{}", serde_json::Value::Array(rows));
    } else {
        let width = rows
            .iter()
            .map(|(t, _)| t.to_string().len())
            .max()
            .unwrap_or(1);
        println!("{:>width$} n_min", "T");
        for (t, n) in rows {
            let n = n.map_or("-".to_string(), |n| n.to_string());
            println!("{t:>width$} {n}");
        }
    }
    Ok(0)
}

fn ok_word(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "fail"
    }
}

fn join(values: &[i64]) -> String {
    values
        .iter()
        .map(i64::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn print_report(prefix: &str, r: &ValidityReport) {
    println!(
        "{prefix}gcd: {}, bounded: {}",
        ok_word(r.gcd_ok),
        ok_word(r.bounded_ok)
    );
    if let Some((t, n)) = r.hardest_target {
        println!("{prefix}hardest: T={t} n_min={n}");
    }
    if !r.unreachable_targets.is_empty() {
        println!("{prefix}unreachable: {}", join(&r.unreachable_targets));
    }
    if !r.dead_ends.is_empty() {
        println!("{prefix}dead ends: {}", join(&r.dead_ends));
    }
}

fn read_input(path: &Path) -> Result<String, String> {
    if path == Path::new("-") {
        io::read_to_string(io::stdin()).map_err(|e| format!("stdin: {e}"))
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn load_campaign(path: &Path) -> Result<Campaign, String> {
    Campaign::from_json(&read_input(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_validate(a: ValidateArgs) -> CmdResult {
    if let Some(triplet) = a.triplet {
        let bounds = BoardBounds::default();
        let r = check_bounded_playability(
            &triplet,
            &bounds,
            bounds.min_count(),
            &TargetRange::default(),
        );
        if a.json {
            println!("{}", serde_json::to_string(&r).map_err(|e| e.to_string())?);
        } else {
            print_report("", &r);
        }
        return Ok(if r.is_playable() { 0 } else { EXIT_FINDINGS });
    }
    let path = a
        .campaign
        .expect("clap enforces one of triplet or campaign");
    let campaign = load_campaign(&path)?;
    let reports: Vec<ValidityReport> = campaign.levels.iter().map(level_report).collect();
    let progressive = campaign.is_progressive();
    let playable = reports.iter().all(ValidityReport::is_playable);
    if a.json {
        println!("{}", json!({"levels": reports, "progressive": progressive}));
    } else {
        for (level, r) in campaign.levels.iter().zip(&reports) {
            println!("level {} {}", level.index(), level.triplet());
            print_report("  ", r);
        }
        println!("progression: {}", ok_word(progressive));
    }
    Ok(if playable && progressive {
        0
    } else {
        EXIT_FINDINGS
    })
}

fn cmd_campaign(a: CampaignArgs) -> CmdResult {
    let campaign = generate_campaign(
        a.seed,
        a.levels,
        BoardBounds::default(),
        TargetRange::default(),
    )
    .map_err(|e| e.to_string())?;
    print!("{}", campaign.to_json());
    Ok(0)
}

struct SimSummary {
    runs: usize,
    completed: usize,
    stalled: usize,
    mean_moves: f64,
    mean_score: f64,
    mean_efficiency: f64,
}

fn cmd_simulate(a: SimulateArgs) -> CmdResult {
    let level = LevelSpec::with_defaults(1, a.triplet).map_err(|e| e.to_string())?;
    let targets: Vec<i64> = match a.target {
        Some(t) => vec![t],
        None => level.targets().iter().collect(),
    };
    let mut sink: Box<dyn Write> = match &a.out {
        Some(p) => Box::new(File::create(p).map_err(|e| format!("{}: {e}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut completed = Vec::new();
    let mut stalled = 0usize;
    let mut runs = 0usize;
    for target in targets {
        let outcomes = simulate(a.policy, &level, target, a.runs, a.seed, a.step_cap)
            .map_err(|e| e.to_string())?;
        for o in outcomes {
            runs += 1;
            match (&o.result, o.session.to_trace()) {
                (Ok(()), Some(trace)) => {
                    writeln!(sink, "{}", trace.to_line()).map_err(|e| e.to_string())?;
                    completed.push(trace);
                }
                (Err(e), _) => {
                    stalled += 1;
                    eprintln!("run {} target {target}: {e}", o.run);
                }
                (Ok(()), None) => unreachable!("completed sessions always produce a trace"),
            }
        }
    }
    sink.flush().map_err(|e| e.to_string())?;
    drop(sink);

    let summary = aggregate(&completed, |_| level.bounds()).map_err(|e| e.to_string())?;
    let overall = summary.overall.as_ref();
    let s = SimSummary {
        runs,
        completed: completed.len(),
        stalled,
        mean_moves: overall.map_or(0.0, |g| g.mean_moves),
        mean_score: overall.map_or(0.0, |g| g.mean_score),
        mean_efficiency: overall.map_or(0.0, |g| g.mean_efficiency),
    };
    let line = format!(
        "policy={} runs={} completed={} stalled={} mean_moves={:.3} mean_score={:.3} mean_efficiency={:.4}",
        a.policy, s.runs, s.completed, s.stalled, s.mean_moves, s.mean_score, s.mean_efficiency
    );
    if a.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(if stalled > 0 { EXIT_STALL } else { 0 })
}

fn cmd_analyze(a: AnalyzeArgs) -> CmdResult {
    let campaign = a.campaign.as_deref().map(load_campaign).transpose()?;
    let bounds_for = |level: u32| {
        campaign
            .as_ref()
            .and_then(|c| c.level(level))
            .map_or_else(BoardBounds::default, LevelSpec::bounds)
    };
    let reader: Box<dyn BufRead> = if a.path == Path::new("-") {
        Box::new(io::stdin().lock())
    } else {
        let f = File::open(&a.path).map_err(|e| format!("{}: {e}", a.path.display()))?;
        Box::new(BufReader::new(f))
    };
    let lines = read_traces(reader).map_err(|e| e.to_string())?;

    let mut valid: Vec<TraceRecord> = Vec::new();
    let mut profiles: Vec<(String, RegretProfile)> = Vec::new();
    let mut skipped = 0usize;
    for (line, parsed) in lines {
        let checked = parsed.map_err(|e| e.to_string()).and_then(|rec| {
            regret_profile(&rec, &bounds_for(rec.level))
                .map(|p| (rec, p))
                .map_err(|e| e.to_string())
        });
        match checked {
            Ok((rec, p)) => {
                profiles.push((rec.session.clone(), p));
                valid.push(rec);
            }
            Err(e) => {
                skipped += 1;
                eprintln!("line {line}: {e}");
            }
        }
    }
    let summary = aggregate(&valid, bounds_for).map_err(|e| e.to_string())?;

    if a.json {
        let mut out = json!({"summary": summary, "skipped": skipped});
        if a.per_move {
            out["profiles"] = profiles
                .iter()
                .map(|(session, p)| json!({"session": session, "profile": p}))
                .collect();
        }
        println!("{out}");
    } else {
        if a.per_move {
            for (session, p) in &profiles {
                let regret: Vec<String> = p.per_move_regret.iter().map(u32::to_string).collect();
                println!(
                    "{session}: moves={} optimal={} regret=[{}] total={} efficiency={:.4}",
                    p.moves_made,
                    p.optimal_moves,
                    regret.join(","),
                    p.total_regret,
                    p.efficiency
                );
            }
        }
        if summary.is_empty() {
            println!("no traces");
        } else {
            print!("{}", summary.to_table());
        }
    }
    if skipped > 0 {
        eprintln!("skipped {skipped} invalid line(s)");
        return Ok(EXIT_FINDINGS);
    }
    Ok(0)
}

fn cmd_serve(a: ServeArgs) -> CmdResult {
    let config = ServerConfig {
        addr: SocketAddr::new(a.host, a.port),
        campaign_path: a.campaign,
        trace_log: a.trace_log,
        seed: a.seed,
        static_dir: a.static_dir,
    };
    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    runtime
        .block_on(bublz_server::run(config))
        .map_err(|e| e.to_string())?;
    Ok(0)
}
