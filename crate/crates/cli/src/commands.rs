use std::fmt::Display;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use gaptile::construct::{ConstructError, DEFAULT_MAX_POINTS};
use gaptile::format::write_json;
use gaptile::grid::{diagonal_stripe_tiling, min_height_rect, stair_tiling, GridError};
use gaptile::oracle::OracleError;
use gaptile::{
    auto_split, check_sufficient_conditions, construct as build, min_interval, read_tiling,
    solve_interval, thresholds, verify_boundary_prefix, verify_interval_tiling, write_tiling,
    ConditionStatus, ConstructOptions, GapSet, HeightTable, SearchConfig, SearchStatus, SplitSpec,
    TilingFile, VerificationReport, Verifier,
};

/// A failed command: process exit code plus message.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub const EXIT_IO: u8 = 1;
pub const EXIT_HYPOTHESIS: u8 = 2;
pub const EXIT_NOT_FOUND: u8 = 3;
pub const EXIT_VERIFY: u8 = 4;

impl Failure {
    pub fn new(code: u8, message: impl Display) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }

    pub fn io(e: impl Display) -> Self {
        Self::new(EXIT_IO, e)
    }
}

pub type CmdResult = Result<(), Failure>;

pub fn parse_gaps(raw: &str, split: Option<SplitSpec>) -> Result<GapSet, Failure> {
    match split {
        Some(sp) => GapSet::parse_entries(raw)
            .and_then(|e| GapSet::indexed(&e, sp))
            .map_err(Failure::io),
        None => raw.parse().map_err(Failure::io),
    }
}

pub fn write_tiling_file(path: &Path, t: impl Into<TilingFile>) -> CmdResult {
    write_tiling(path, &t.into()).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("tiling");
    path.with_file_name(format!("{stem}.{suffix}.json"))
}

fn table() -> Result<HeightTable, Failure> {
    HeightTable::from_env().map_err(Failure::io)
}

fn search_config(max_nodes: u64, threads: usize) -> SearchConfig {
    SearchConfig {
        max_nodes,
        parallel_width: threads,
        ..SearchConfig::default()
    }
}

#[derive(Args)]
pub struct ConstructArgs {
    /// Gap set as `d:k,d:k,...` (bare `d` means multiplicity 1).
    #[arg(long)]
    gaps: String,
    /// Split `s,p`: the first `s` distances are added as interval stages,
    /// the remaining `p` through homogeneous sequences. Chosen
    /// automatically when omitted.
    #[arg(long)]
    split: Option<SplitSpec>,
    #[arg(long, default_value = "tiling.json")]
    out: PathBuf,
    /// Trace file [default: <out>.trace.json].
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Threshold report file [default: <out>.thresholds.json].
    #[arg(long)]
    thresholds: Option<PathBuf>,
    /// Only report the distance each stage requires; build nothing.
    #[arg(long)]
    thresholds_only: bool,
    /// Multiplicity assumed for the next distance in `--thresholds-only`.
    #[arg(long, default_value_t = 1)]
    next_k: usize,
    /// Refuse runs whose intervals exceed this many points.
    #[arg(long, default_value_t = DEFAULT_MAX_POINTS)]
    max_points: u64,
}

fn construct_failure(gaps: &GapSet, stage: &str, e: ConstructError) -> Failure {
    match e {
        ConstructError::GrowthViolation { d, required } => {
            let i = gaps
                .entries()
                .iter()
                .position(|&(x, _)| x == d)
                .map_or(0, |i| i + 1);
            Failure::new(
                EXIT_HYPOTHESIS,
                format!("{stage}: stage {i} requires d{i} ≥ {required} (got {d})"),
            )
        }
        ConstructError::Verification(r) => Failure::new(EXIT_VERIFY, format!("{stage}: {r}")),
        ConstructError::Grid(GridError::Cache(m)) => Failure::io(format!("{stage}: {m}")),
        ConstructError::Overflow | ConstructError::Grid(_) => Failure::io(format!("{stage}: {e}")),
        e => Failure::new(EXIT_HYPOTHESIS, format!("{stage}: {e}")),
    }
}

pub fn construct(a: ConstructArgs) -> CmdResult {
    let gaps = parse_gaps(&a.gaps, a.split)?;
    let table = table()?;
    if a.thresholds_only {
        let rep = thresholds(&table, &gaps, a.split, a.next_k)
            .map_err(|e| construct_failure(&gaps, &e.stage, e.error))?;
        for e in &rep.entries {
            let i = e.distance_index;
            match e.achieved {
                Some(d) => {
                    let mark = if d >= e.required { "ok" } else { "FAIL" };
                    println!(
                        "d{i} ({}): required ≥ {}, have {d}  {mark}",
                        e.stage, e.required
                    );
                }
                None => {
                    let note = e
                        .note
                        .as_deref()
                        .map(|n| format!("  ({n})"))
                        .unwrap_or_default();
                    println!(
                        "next d{i} for k{i}={} ({}): required ≥ {}{note}",
                        a.next_k, e.stage, e.required
                    );
                }
            }
        }
        if let Some(p) = &a.thresholds {
            write_json(p, &rep).map_err(Failure::io)?;
        }
        return Ok(());
    }

    let split = match a.split {
        Some(s) => s,
        None => *auto_split(&gaps)
            .map_err(|e| construct_failure(&gaps, "split", e))?
            .first()
            .expect("auto_split never returns an empty list"),
    };
    let opts = ConstructOptions {
        max_points: a.max_points,
    };
    let c = build(&table, &gaps, split, &opts)
        .map_err(|e| construct_failure(&gaps, &e.stage, e.error))?;
    let report = verify_interval_tiling(&c.tiling, &gaps);
    if !report.ok {
        return Err(Failure::new(EXIT_VERIFY, report));
    }
    let n = c.tiling.length;
    let trace_path = a.trace.unwrap_or_else(|| sibling(&a.out, "trace"));
    let thr_path = a
        .thresholds
        .unwrap_or_else(|| sibling(&a.out, "thresholds"));
    write_tiling_file(&a.out, c.tiling)?;
    write_json(&trace_path, &c.trace).map_err(Failure::io)?;
    write_json(&thr_path, &c.thresholds).map_err(Failure::io)?;
    println!(
        "tiled [0, {}] (N = {n}) by {gaps} using s={}, p={}",
        n - 1,
        split.s,
        split.p
    );
    for rec in &c.trace {
        println!("  {:<12} L = {:<10} h = {}", rec.stage, rec.l_out, rec.h);
    }
    println!("verification: {report}");
    println!(
        "wrote {}, {}, {}",
        a.out.display(),
        trace_path.display(),
        thr_path.display()
    );
    Ok(())
}

#[derive(Args)]
pub struct SolveArgs {
    #[arg(long)]
    gaps: String,
    /// Interval length N.
    #[arg(long)]
    len: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = SearchConfig::default().max_nodes)]
    max_nodes: u64,
    /// Worker threads for the search (0: sequential, deterministic).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn print_tiles(t: &gaptile::IntervalTiling) {
    for tile in &t.tiles {
        let pts: Vec<String> = tile.points().iter().map(i64::to_string).collect();
        println!("{}", pts.join(" "));
    }
}

pub fn solve(a: SolveArgs) -> CmdResult {
    let gaps = parse_gaps(&a.gaps, None)?;
    let out = solve_interval(&gaps, a.len, &search_config(a.max_nodes, a.threads));
    match out.status {
        SearchStatus::Found => {
            let w = out
                .witnesses
                .into_iter()
                .next()
                .expect("found has a witness");
            println!("tiled [0, {}] with {} tiles", a.len - 1, w.tiles.len());
            print_tiles(&w);
            if let Some(p) = &a.out {
                write_tiling_file(p, w)?;
            }
            Ok(())
        }
        SearchStatus::ExhaustedNoSolution => Err(Failure::new(
            EXIT_NOT_FOUND,
            format!("no tiling of [0, {}] by {gaps}", a.len.saturating_sub(1)),
        )),
        SearchStatus::BudgetExceeded => Err(Failure::new(
            EXIT_NOT_FOUND,
            format!("undecided: node budget of {} exhausted", a.max_nodes),
        )),
    }
}

#[derive(Args)]
pub struct MinlenArgs {
    #[arg(long)]
    gaps: String,
    /// Largest interval length to try.
    #[arg(long)]
    max: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = SearchConfig::default().max_nodes)]
    max_nodes: u64,
}

pub fn minlen(a: MinlenArgs) -> CmdResult {
    let gaps = parse_gaps(&a.gaps, None)?;
    match min_interval(&gaps, a.max, &search_config(a.max_nodes, 0)) {
        Ok((n, w)) => {
            println!("{n}");
            if let Some(p) = &a.out {
                write_tiling_file(p, w)?;
            }
            Ok(())
        }
        Err(OracleError::NotFoundWithinBound { n_max, incomplete }) => Err(Failure::new(
            EXIT_NOT_FOUND,
            format!(
                "no tiling by {gaps} up to N = {n_max}{}",
                if incomplete {
                    " (some lengths undecided within the node budget)"
                } else {
                    ""
                }
            ),
        )),
        Err(e) => Err(Failure::io(e)),
    }
}

#[derive(Args)]
pub struct VerifyArgs {
    file: PathBuf,
    /// Also check that tiles ending in the last `d1` points start with
    /// `count` gaps of `d1`.
    #[arg(long, value_name = "D1,COUNT")]
    boundary: Option<String>,
    /// Check as a tiling by homogeneous sequences.
    #[arg(long)]
    homogeneous: bool,
    /// Violations to list.
    #[arg(long, default_value_t = 32)]
    cap: usize,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

fn parse_pair(s: &str) -> Result<(u64, usize), Failure> {
    let bad = || Failure::io(format!("expected D1,COUNT, got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

pub fn verify(a: VerifyArgs) -> CmdResult {
    let file =
        read_tiling(&a.file).map_err(|e| Failure::io(format!("{}: {e}", a.file.display())))?;
    let v = Verifier::with_cap(a.cap);
    let mut checks: Vec<(&str, VerificationReport)> = Vec::new();
    match file {
        TilingFile::Rectangle { .. } => {
            let r = file.into_rectangle().expect("rectangle");
            checks.push(("rectangle", v.rectangle_tiling(&r)));
        }
        TilingFile::Interval { .. } => {
            let t = file.into_interval().expect("interval");
            let homogeneous = a.homogeneous || t.is_homogeneous();
            if homogeneous {
                let gaps = t
                    .annotations
                    .homogeneous_for
                    .clone()
                    .unwrap_or_else(|| t.gap_set.clone());
                checks.push(("homogeneous", v.homogeneous(&t.tiles, t.length, &gaps)));
            } else {
                checks.push(("interval", v.interval_tiling(&t, &t.gap_set)));
            }
            let boundary = match &a.boundary {
                Some(s) => Some(parse_pair(s)?),
                None => t
                    .annotations
                    .boundary_prefix_count
                    .map(|c| (t.gap_set.min_distance(), c)),
            };
            if let Some((d1, count)) = boundary {
                let r = if a.cap == 32 {
                    verify_boundary_prefix(&t, d1, count)
                } else {
                    v.boundary_prefix(&t, d1, count)
                };
                checks.push(("boundary prefix", r));
            }
        }
    }
    let ok = checks.iter().all(|(_, r)| r.ok);
    if a.json {
        let map: serde_json::Map<String, serde_json::Value> = checks
            .iter()
            .map(|(n, r)| {
                (
                    n.to_string(),
                    serde_json::to_value(r).expect("reports serialize"),
                )
            })
            .collect();
        println!("{}", serde_json::Value::Object(map));
    } else {
        for (name, r) in &checks {
            println!("{name}: {r}");
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_VERIFY,
            format!("{} failed verification", a.file.display()),
        ))
    }
}

#[derive(Args)]
pub struct FvalueArgs {
    /// Horizontal unit steps per path.
    #[arg(long)]
    k: Option<usize>,
    /// Vertical unit steps per path.
    #[arg(long)]
    l: Option<usize>,
    /// Rectangle width; every admissible width when omitted.
    #[arg(long)]
    m: Option<usize>,
    /// Tabulate every (k, l, m) with k + l up to this bound.
    #[arg(long)]
    up_to: Option<usize>,
    /// Write the witness (single k, l, m only).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn fvalue(a: FvalueArgs) -> CmdResult {
    let table = table()?;
    let mut keys = Vec::new();
    match (a.up_to, a.k, a.l) {
        (Some(s), _, _) => {
            for total in 2..=s {
                for k in 1..total {
                    let l = total - k;
                    keys.extend((k + 1..=k + l + 1).map(|m| (k, l, m)));
                }
            }
        }
        (None, Some(k), Some(l)) => match a.m {
            Some(m) => keys.push((k, l, m)),
            None => keys.extend((k + 1..=k + l + 1).map(|m| (k, l, m))),
        },
        _ => return Err(Failure::io("give --k and --l, or --up-to")),
    }
    if a.out.is_some() && keys.len() != 1 {
        return Err(Failure::io("--out needs a single (k, l, m)"));
    }
    for (k, l, m) in keys {
        let e = table.get(k, l, m).map_err(|e| match e {
            GridError::RangeError { .. } => Failure::new(EXIT_HYPOTHESIS, e),
            GridError::SearchExhausted { .. } | GridError::SearchBudget { .. } => {
                Failure::new(EXIT_NOT_FOUND, e)
            }
            e => Failure::io(e),
        })?;
        println!("f({k},{l},{m}) = {}", e.f);
        if let Some(p) = &a.out {
            write_tiling_file(p, e.witness.clone())?;
        }
    }
    Ok(())
}

#[derive(Args)]
pub struct PatternArgs {
    #[command(subcommand)]
    kind: PatternKind,
    #[arg(long, global = true, default_value = "pattern.json")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum PatternKind {
    /// `[0, k+l] × [0, l]` by `l + 1` staircase paths.
    Stair {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
    },
    /// `[0, m] × [0, m+kv]` cut into diagonal stripes (needs n < m < 2n).
    Stripe {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        kv: usize,
        #[arg(long)]
        m: usize,
    },
    /// Least-height rectangle for `k` right and `l` up steps at width `m`.
    Minrect {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        m: usize,
    },
}

pub fn pattern(a: PatternArgs) -> CmdResult {
    let r = match a.kind {
        PatternKind::Stair { k, l } => {
            if k == 0 || l == 0 {
                return Err(Failure::new(EXIT_HYPOTHESIS, "k and l must be positive"));
            }
            stair_tiling(k, l)
        }
        PatternKind::Stripe { n, kv, m } => {
            diagonal_stripe_tiling(n, kv, m).map_err(|e| Failure::new(EXIT_HYPOTHESIS, e))?
        }
        PatternKind::Minrect { k, l, m } => {
            min_height_rect(k, l, m)
                .map_err(|e| Failure::new(EXIT_HYPOTHESIS, e))?
                .1
        }
    };
    let rep = gaptile::verify_rectangle_tiling(&r);
    if !rep.ok {
        return Err(Failure::new(EXIT_VERIFY, rep));
    }
    println!(
        "{} × {} rectangle, {} paths -> {}",
        r.width,
        r.height,
        r.paths.len(),
        a.out.display()
    );
    write_tiling_file(&a.out, r)
}

#[derive(Args)]
pub struct ConditionsArgs {
    #[arg(long)]
    gaps: String,
    #[arg(long)]
    split: Option<SplitSpec>,
    #[arg(long)]
    json: bool,
}

pub fn conditions(a: ConditionsArgs) -> CmdResult {
    let gaps = parse_gaps(&a.gaps, a.split)?;
    let results = check_sufficient_conditions(&table()?, &gaps);
    if a.json {
        println!("{}", serde_json::to_string(&results).map_err(Failure::io)?);
        return Ok(());
    }
    for r in &results {
        let status = match r.status {
            ConditionStatus::Satisfied => "satisfied",
            ConditionStatus::NotSatisfied => "not satisfied",
            ConditionStatus::NotApplicable => "not applicable",
        };
        match &r.witness {
            Some(w) => println!("{:<26} {status:<15} {w}", r.name),
            None => println!("{:<26} {status}", r.name),
        }
    }
    Ok(())
}
