use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use tracing::info;

use vdecomp::bench::{gnuplot_script, run_bench, run_verify_suite, verify_prisms, write_csv, BenchPlan, PrismDump, Suite};
use vdecomp::cutting::{build_cutting, verify_cutting};
use vdecomp::enclosure::{build_index, EnclosureIndex};
use vdecomp::envelope::{build_min_diagram_vd, random_linear, random_paraboloids, FunctionsDoc};
use vdecomp::exact::{Point3, Scalar};
use vdecomp::ric::{build_vd, BuildOptions, Mode};
use vdecomp::scene::{gen_scene, BBox, GenParams, Scene, SceneKind};
use vdecomp::vd::PrismRecord;

#[derive(Parser)]
#[command(name = "vdtool", version, about = "Vertical decompositions, cuttings, point enclosure and envelopes")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit logs as JSON lines on stderr.
    #[arg(long, global = true)]
    json_logs: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random scene.
    Gen(GenArgs),
    /// Build the vertical decomposition of a scene.
    Build(BuildArgs),
    /// Build a (1/r)-cutting.
    Cutting(CuttingArgs),
    /// Point-enclosure index.
    #[command(subcommand)]
    Enclose(EncloseCmd),
    /// Minimization diagram of trivariate functions.
    Envelope(EnvelopeArgs),
    /// Run the exact verification suites.
    Verify(VerifyArgs),
    /// Growth-curve benchmark.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value = "boxes")]
    kind: SceneKind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 64)]
    extent: i64,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    scene: PathBuf,
    #[arg(long, default_value = "complement")]
    mode: Mode,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-round CSV trace.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct CuttingArgs {
    #[arg(long)]
    scene: PathBuf,
    #[arg(long)]
    r: usize,
    #[arg(long, default_value = "complement")]
    mode: Mode,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Check the cutting against the oracles; failures exit with status 1.
    #[arg(long)]
    verify: bool,
}

#[derive(Subcommand)]
enum EncloseCmd {
    Build {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        index: PathBuf,
    },
    Query {
        #[arg(long)]
        index: PathBuf,
        /// Rational coordinates "x,y,z".
        #[arg(long, conflicts_with = "points", required_unless_present = "points")]
        point: Option<String>,
        /// CSV of points, one "x,y,z" per line.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct EnvelopeArgs {
    #[arg(long, required_unless_present = "random")]
    functions: Option<PathBuf>,
    /// Generate `--n` random functions instead: paraboloids or linear.
    #[arg(long, conflicts_with = "functions", requires = "n")]
    random: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-cell CSV.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    scene: PathBuf,
    /// Suites to run (repeatable); all by default.
    #[arg(long)]
    suite: Vec<Suite>,
    /// Check a prism file written by `build --out` instead of rebuilding.
    #[arg(long)]
    prisms: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "boxes")]
    kind: SceneKind,
    /// Comma-separated, strictly increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    trials: usize,
    #[arg(long, default_value = "complement")]
    mode: Mode,
    #[arg(long)]
    cutting_r: Option<usize>,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Slope summary as JSON.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Gnuplot script plotting the prism counts of `--csv`.
    #[arg(long, requires = "csv")]
    gnuplot: Option<PathBuf>,
}

enum Failure {
    Check(String),
    Usage(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

type Outcome = Result<(), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn internal(e: impl std::fmt::Display) -> Failure {
    Failure::Internal(e.to_string())
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Outcome {
    fs::write(path, contents).map_err(|e| internal(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, v: &impl serde::Serialize) -> Outcome {
    write_file(path, serde_json::to_string_pretty(v).map_err(internal)?)
}

fn load_scene(path: &Path) -> Result<Scene, Failure> {
    Scene::load(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_point(s: &str) -> Result<Point3, Failure> {
    let c: Vec<&str> = s.split(',').map(str::trim).collect();
    let [x, y, z] = c.as_slice() else {
        return Err(usage(format!("point '{s}' needs three coordinates")));
    };
    let num = |t: &str| t.parse::<Scalar>().map_err(|e| usage(format!("coordinate '{t}': {e}")));
    Ok(Point3::new(num(x)?, num(y)?, num(z)?))
}

fn gen(seed: u64, a: GenArgs) -> Outcome {
    let params = GenParams { extent: a.extent, density: a.density, ..GenParams::default() };
    let scene = gen_scene(a.kind, a.n, seed, &params).map_err(usage)?;
    scene.save(&a.out).map_err(internal)?;
    info!(regions = scene.len(), path = %a.out.display(), "scene written");
    Ok(())
}

fn build(seed: u64, a: BuildArgs) -> Outcome {
    let scene = load_scene(&a.scene)?;
    let start = Instant::now();
    let b = build_vd(&scene, seed, a.mode, &BuildOptions::default()).map_err(internal)?;
    let millis = start.elapsed().as_secs_f64() * 1e3;
    info!(prisms = b.prisms.len(), millis, "decomposition built");
    if let Some(p) = &a.out {
        write_json(p, &PrismDump::new(&b, seed, scene.len()))?;
    }
    if let Some(p) = &a.trace {
        write_file(p, b.trace.to_csv())?;
    }
    println!("{}", json!({ "regions": scene.len(), "prisms": b.prisms.len(), "max_hdag_depth": b.trace.max_depth, "millis": millis }));
    Ok(())
}

fn cutting(seed: u64, a: CuttingArgs) -> Outcome {
    let scene = load_scene(&a.scene)?;
    if a.r < 2 || a.r > scene.len() {
        return Err(usage(format!("--r must lie in [2, {}]", scene.len())));
    }
    let cut = build_cutting(&scene, a.r, seed, a.mode).map_err(internal)?;
    info!(prisms = cut.prisms.len(), max_conflict = cut.max_conflict(), attempts = cut.attempts, "cutting built");
    if let Some(p) = &a.out {
        write_json(p, &cut.to_json())?;
    }
    let mut summary = json!({ "prisms": cut.prisms.len(), "max_conflict": cut.max_conflict(), "attempts": cut.attempts });
    let mut verdict = Ok(());
    if a.verify {
        let rep = verify_cutting(&cut, &scene, a.r);
        summary["verified"] = json!(rep.ok());
        summary["note"] = json!(rep.note);
        if !rep.ok() {
            verdict = Err(Failure::Check(format!("cutting check failed: {rep:?}")));
        }
    }
    println!("{summary}");
    verdict
}

fn read_points(path: &Path) -> Result<Vec<Point3>, Failure> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(usage)?;
        if rec.get(0) == Some("x") {
            continue;
        }
        out.push(parse_point(&rec.iter().collect::<Vec<_>>().join(","))?);
    }
    Ok(out)
}

fn enclose(seed: u64, cmd: EncloseCmd) -> Outcome {
    match cmd {
        EncloseCmd::Build { scene, index } => {
            let scene = load_scene(&scene)?;
            let start = Instant::now();
            let idx = build_index(&scene, seed).map_err(internal)?;
            let millis = start.elapsed().as_secs_f64() * 1e3;
            idx.save(&index).map_err(internal)?;
            println!("{}", json!({ "regions": scene.len(), "size": idx.size(), "millis": millis }));
            Ok(())
        }
        EncloseCmd::Query { index, point, points, out } => {
            let idx = EnclosureIndex::load(&index).map_err(usage)?;
            if let Some(p) = point {
                let q = parse_point(&p)?;
                let (ids, stats) = idx.query_with_stats(&q).map_err(internal)?;
                println!("{}", json!({ "count": ids.len(), "ids": ids, "stats": stats }));
                return Ok(());
            }
            let pts = read_points(points.as_deref().expect("clap requires --point or --points"))?;
            let sink: Box<dyn std::io::Write> = match &out {
                Some(p) => Box::new(fs::File::create(p).map_err(internal)?),
                None => Box::new(std::io::stdout()),
            };
            let mut w = csv::WriterBuilder::new().flexible(true).from_writer(sink);
            for (i, q) in pts.iter().enumerate() {
                let (ids, stats) = idx.query_with_stats(q).map_err(internal)?;
                let mut row = vec![i.to_string(), ids.len().to_string()];
                row.extend(ids.iter().map(usize::to_string));
                row.push(stats.scanned.to_string());
                row.push(stats.rounds.to_string());
                w.write_record(&row).map_err(internal)?;
            }
            w.flush().map_err(internal)
        }
    }
}

fn envelope(seed: u64, a: EnvelopeArgs) -> Outcome {
    let doc = match (&a.functions, a.random.as_deref()) {
        (Some(p), _) => FunctionsDoc::load(p).map_err(usage)?,
        (None, Some(kind)) => {
            let n = a.n.unwrap_or(0);
            let bbox = BBox::cube(0, 64);
            let functions = match kind {
                "paraboloids" => random_paraboloids(n, seed, &bbox),
                "linear" => random_linear(n, seed),
                other => return Err(usage(format!("unknown function family '{other}' (paraboloids, linear)"))),
            };
            FunctionsDoc::new(functions, &bbox)
        }
        (None, None) => unreachable!("clap requires --functions or --random"),
    };
    let bbox = doc.bbox().map_err(usage)?;
    let start = Instant::now();
    let md = build_min_diagram_vd(&doc.functions, &bbox).map_err(|e| match e {
        vdecomp::error::EnvelopeError::Empty | vdecomp::error::EnvelopeError::MixedFamilies => usage(e),
        e => internal(e),
    })?;
    let millis = start.elapsed().as_secs_f64() * 1e3;
    let per_cell: Vec<(usize, Scalar, usize)> = md
        .cells
        .iter()
        .map(|c| {
            let count = md.prisms.iter().filter(|p| p.label == [c.function]).count();
            (c.function, c.polytope.volume(), count)
        })
        .collect();
    if let Some(p) = &a.out {
        let prisms: Vec<PrismRecord> = md.prisms.iter().enumerate().map(|(i, p)| PrismRecord::new(i, p)).collect();
        let cells: Vec<_> =
            per_cell.iter().map(|(f, v, c)| json!({ "function": f, "volume": v, "prisms": c })).collect();
        write_json(p, &json!({ "functions": doc.functions, "bbox": doc.bbox, "cells": cells, "prisms": prisms }))?;
    }
    if let Some(p) = &a.stats {
        let mut s = String::from("function,cell_volume,prisms\n");
        for (f, v, c) in &per_cell {
            s.push_str(&format!("{f},{v},{c}\n"));
        }
        write_file(p, s)?;
    }
    println!(
        "{}",
        json!({ "functions": doc.functions.len(), "cells": md.cells.len(), "prisms": md.prisms.len(), "millis": millis })
    );
    Ok(())
}

fn verify(seed: u64, a: VerifyArgs) -> Outcome {
    let scene = load_scene(&a.scene)?;
    let suites = if a.suite.is_empty() { Suite::ALL.to_vec() } else { a.suite };
    let rep = match &a.prisms {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            let dump: PrismDump = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            verify_prisms(&scene, &dump.to_prisms(), dump.mode)
        }
        None => run_verify_suite(&scene, &suites, seed),
    };
    if let Some(p) = &a.report {
        write_json(p, &json!({ "passed": rep.passed(), "checks": rep.checks }))?;
    }
    for c in &rep.checks {
        let status = if c.skipped { "SKIP" } else if c.passed { "PASS" } else { "FAIL" };
        println!("{status} {:?}/{} {}", c.suite, c.name, c.detail);
    }
    if rep.passed() {
        Ok(())
    } else {
        Err(Failure::Check("verification failed".into()))
    }
}

fn bench(seed: u64, a: BenchArgs) -> Outcome {
    let mut plan = BenchPlan::new(a.kind, a.sizes, a.trials, seed);
    plan.mode = a.mode;
    plan.cutting_r = a.cutting_r;
    plan.validate().map_err(usage)?;
    let rep = run_bench(&plan).map_err(internal)?;
    for r in rep.rows.iter().filter(|r| r.error.is_some()) {
        tracing::warn!(n = r.n, trial = r.trial, error = r.error.as_deref().unwrap_or(""), "bench cell failed");
    }
    match &a.csv {
        Some(p) => write_csv(&rep.rows, fs::File::create(p).map_err(internal)?).map_err(internal)?,
        None => write_csv(&rep.rows, std::io::stdout()).map_err(internal)?,
    }
    if let (Some(g), Some(c)) = (&a.gnuplot, &a.csv) {
        write_file(g, gnuplot_script(&c.display().to_string(), "prisms"))?;
    }
    if let Some(p) = &a.summary {
        write_json(p, &rep.slopes)?;
    }
    for s in &rep.slopes {
        match s.slope {
            Some(v) => eprintln!("slope {}: {v:.3} band {:?}", s.metric, s.band),
            None => eprintln!("slope {}: undefined (fewer than two sizes)", s.metric),
        }
    }
    Ok(())
}

fn init_logs(json_logs: bool) {
    let filter = tracing_subscriber::EnvFilter::try_from_default_env()
        .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn"));
    let b = tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr);
    if json_logs {
        b.json().init();
    } else {
        b.compact().init();
    }
}

fn run(cli: Cli) -> Outcome {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(internal)?;
    }
    let seed = cli.seed;
    match cli.cmd {
        Cmd::Gen(a) => gen(seed, a),
        Cmd::Build(a) => build(seed, a),
        Cmd::Cutting(a) => cutting(seed, a),
        Cmd::Enclose(c) => enclose(seed, c),
        Cmd::Envelope(a) => envelope(seed, a),
        Cmd::Verify(a) => verify(seed, a),
        Cmd::Bench(a) => bench(seed, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    init_logs(cli.json_logs);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let msg = match &f {
                Failure::Check(m) | Failure::Usage(m) | Failure::Internal(m) => m,
            };
            eprintln!("vdtool: {msg}");
            ExitCode::from(f.code())
        }
    }
}
