//! The `avalanche` command line.

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use avalanche_core::avalanche::{for_each_avalanche, grid_experiment, SizeDistribution};
use avalanche_core::families::{all_trees, complete_lambda, complete_poly, cycle_poly, tree_poly, wheel_poly, RootedTree};
use avalanche_core::graph::Family;
use avalanche_core::parking::{is_parking, parking_to_recurrent, phi, ParkingFunction};
use avalanche_core::reconstruct::reconstruct_tree;
use avalanche_core::{Graph, MultiPoly, UniPoly, DEFAULT_STATE_LIMIT};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::format::{self, FormatError};
use crate::parallel;

#[derive(Debug, Parser)]
#[command(name = "avalanche", version, about = "Exact avalanche polynomials of the abelian sandpile model")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,

    /// Maximum number of stable states an enumeration may visit.
    #[arg(long, global = true, env = "AVALANCHE_LIMIT", default_value_t = DEFAULT_STATE_LIMIT,
          value_parser = clap::value_parser!(u64).range(1..))]
    limit: u64,

    /// Worker threads for enumeration (defaults to the available cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphKind {
    Tree,
    Cycle,
    Complete,
    Wheel,
    Path,
    Fan,
}

/// Families with a closed-form avalanche polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClosedKind {
    Tree,
    Cycle,
    Complete,
    Wheel,
}

#[derive(Debug, Args)]
struct GraphArgs {
    /// Graph JSON file, or a shorthand: K<n>, C<n>, W<n>, F<n>, P<n>, G<rows>x<cols>.
    #[arg(long, conflicts_with_all = ["kind", "n", "parents"])]
    graph: Option<String>,

    /// Graph family.
    #[arg(long, value_enum)]
    kind: Option<GraphKind>,

    /// Family size: vertex count for cycles, complete graphs and paths, rim
    /// size for wheels, path length for fans.
    #[arg(long)]
    n: Option<usize>,

    /// Parent array for `--kind tree`, e.g. "[null,0,0,1]" or "s 0 0 1".
    #[arg(long)]
    parents: Option<String>,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    kind: ClosedKind,

    /// Family size (see `--n` of the graph options).
    #[arg(long)]
    n: Option<usize>,

    /// Parent array for trees.
    #[arg(long)]
    parents: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RecurrentsMode {
    Count,
    List,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Multivariate avalanche polynomial by exhaustive simulation.
    Poly {
        #[command(flatten)]
        graph: GraphArgs,
        /// Print the univariate specialization instead.
        #[arg(long, conflicts_with = "burst")]
        univariate: bool,
        /// Print the burst-size specialization instead.
        #[arg(long)]
        burst: bool,
        /// Also write one JSON line per principal avalanche to this file.
        #[arg(long, value_name = "FILE")]
        records: Option<PathBuf>,
    },
    /// Number of principal avalanches of each size.
    Dist {
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Number of principal avalanches of each burst size.
    Burst {
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Count or list the recurrent sandpiles.
    Recurrents {
        #[arg(value_enum, default_value_t = RecurrentsMode::Count)]
        mode: RecurrentsMode,
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Closed-form avalanche polynomial of a family member.
    Family {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        univariate: bool,
    },
    /// Compare closed forms with brute force for every size up to --max-n.
    Verify {
        #[arg(long, value_enum)]
        kind: ClosedKind,
        #[arg(long)]
        max_n: usize,
    },
    /// Recover a rooted tree from its avalanche polynomial.
    TreeReconstruct {
        /// Polynomial file, JSON or text form ("-" reads stdin).
        #[arg(long)]
        poly: PathBuf,
    },
    /// Decompose a principal avalanche on a complete graph.
    Phi {
        #[command(flatten)]
        graph: GraphArgs,
        /// Recurrent sandpile, e.g. "8,7,8,1,0,3,7,2,4" or "1^3 0 1^5".
        #[arg(long)]
        sandpile: String,
        /// Non-sink vertex receiving the grain, counted from 1.
        #[arg(long)]
        vertex: usize,
    },
    /// Check a parking function (JSON array of 0-based values).
    Parking {
        #[arg(long, value_name = "FILE")]
        check: PathBuf,
    },
    /// Random grain drops on a grid; prints the avalanche size histogram.
    GridExperiment {
        #[arg(long, default_value_t = 20)]
        rows: usize,
        #[arg(long, default_value_t = 20)]
        cols: usize,
        #[arg(long, default_value_t = 100_000)]
        drops: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Invariant factors of the reduced Laplacian (the sandpile group).
    Snf {
        #[command(flatten)]
        graph: GraphArgs,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failed(String),
}

impl From<avalanche_core::Error> for CliError {
    fn from(e: avalanche_core::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

struct Ctx<'a> {
    format: OutputFormat,
    limit: u64,
    threads: usize,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    /// Prints the JSON value or the text, depending on `--format`.
    fn emit(&mut self, json: Value, text: impl FnOnce() -> String) -> CliResult<()> {
        match self.format {
            OutputFormat::Json => writeln!(self.out, "{json}")?,
            OutputFormat::Text => writeln!(self.out, "{}", text())?,
        }
        Ok(())
    }
}

/// Runs the command line `args` (program name first), writing results to
/// `out` and diagnostics to `err`. Returns the process exit code: 0 on
/// success, 2 on usage errors, 1 when a computation or validation fails.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    2
                }
            };
        }
    };
    let threads = cli.threads.map_or_else(parallel::default_threads, |t| t as usize);
    let mut ctx = Ctx { format: cli.format, limit: cli.limit, threads, out, err };
    match dispatch(cli.command, &mut ctx) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(ctx.err, "error: {msg}\n\nFor more information, try '--help'.");
            2
        }
        Err(CliError::Failed(msg)) => {
            let _ = writeln!(ctx.err, "error: {msg}");
            1
        }
    }
}

fn dispatch(command: Command, ctx: &mut Ctx<'_>) -> CliResult<i32> {
    match command {
        Command::Poly { graph, univariate, burst, records } => {
            let g = load_graph(&graph)?;
            if let Some(path) = records {
                write_records(&g, ctx.limit, &path)?;
            }
            let p = parallel::avalanche_polynomial(&g, ctx.limit, ctx.threads)?;
            if univariate {
                emit_unipoly(ctx, &p.univariate())?;
            } else if burst {
                emit_unipoly(ctx, &p.burst_specialize(&g)?)?;
            } else {
                emit_poly(ctx, &p, &g.variable_names())?;
            }
        }
        Command::Dist { graph } => {
            let g = load_graph(&graph)?;
            let p = parallel::avalanche_polynomial(&g, ctx.limit, ctx.threads)?;
            emit_histogram(ctx, &SizeDistribution::from_univariate(&p.univariate()))?;
        }
        Command::Burst { graph } => {
            let g = load_graph(&graph)?;
            let p = parallel::avalanche_polynomial(&g, ctx.limit, ctx.threads)?;
            emit_histogram(ctx, &SizeDistribution::from_univariate(&p.burst_specialize(&g)?))?;
        }
        Command::Recurrents { mode, graph } => {
            let g = load_graph(&graph)?;
            match mode {
                RecurrentsMode::Count => {
                    let n = parallel::recurrent_count(&g, ctx.limit, ctx.threads)?;
                    ctx.emit(json!({ "count": n }), || n.to_string())?;
                }
                RecurrentsMode::List => {
                    let all = parallel::recurrents(&g, ctx.limit, ctx.threads)?;
                    let json = Value::Array(all.iter().map(format::sandpile_json).collect());
                    ctx.emit(json, || all.iter().map(format::sandpile_text).collect::<Vec<_>>().join("\n"))?;
                }
            }
        }
        Command::Family { family, univariate } => {
            // The multivariate form of K_n has 2^(n-1) terms; the size
            // counts are available directly.
            if let (true, ClosedKind::Complete, Some(n @ 2..)) = (univariate, family.kind, family.n) {
                let mut u = UniPoly::zero();
                for m in 0..n {
                    u.add_term(m, complete_lambda(n - 1, m)?);
                }
                emit_unipoly(ctx, &u)?;
                return Ok(0);
            }
            let (g, p) = closed_form(&family)?;
            if univariate {
                emit_unipoly(ctx, &p.univariate())?;
            } else {
                emit_poly(ctx, &p, &g.variable_names())?;
            }
        }
        Command::Verify { kind, max_n } => return verify(ctx, kind, max_n),
        Command::TreeReconstruct { poly } => {
            let p = format::parse_poly(&read_input(&poly)?)?;
            let t = reconstruct_tree(&p)?;
            ctx.emit(format::parents_json(&t), || format::parents_text(&t))?;
        }
        Command::Phi { graph, sandpile, vertex } => {
            let g = load_graph(&graph)?;
            let n = g.n_nonsink();
            if g.edges() != Graph::complete(g.n_vertices())?.edges() {
                return Err(CliError::Failed("phi needs a complete graph".into()));
            }
            if vertex == 0 || vertex > n {
                return Err(CliError::Usage(format!("--vertex must be in 1..={n}")));
            }
            let c = format::parse_sandpile(&sandpile)?;
            if c.len() != n {
                return Err(avalanche_core::Error::LengthMismatch { expected: n, got: c.len() }.into());
            }
            let img = phi(&c, vertex - 1)?;
            let j: Vec<usize> = img.j.iter().map(|&w| w + 1).collect();
            let json = json!({
                "vertex": vertex,
                "size": img.size(),
                "j": j,
                "c1": format::sandpile_json(&img.c1),
                "c2": format::sandpile_json(&img.c2),
            });
            ctx.emit(json, || {
                let names: Vec<String> = j.iter().map(|w| format!("v{w}")).collect();
                format!(
                    "size = {}\nJ = {{{}}}\nc1 = ({})\nc2 = ({})",
                    img.size(),
                    names.join(", "),
                    format::sandpile_text(&img.c1),
                    format::sandpile_text(&img.c2)
                )
            })?;
        }
        Command::Parking { check } => {
            let p = format::parse_parking(&read_input(&check)?)?;
            if !is_parking(&p) {
                ctx.emit(json!({ "length": p.len(), "parking": false }), || "not a parking function".into())?;
                return Ok(1);
            }
            let c = parking_to_recurrent(&ParkingFunction::new(p.clone())?);
            let json = json!({ "length": p.len(), "parking": true, "recurrent": format::sandpile_json(&c) });
            ctx.emit(json, || format!("parking function\nrecurrent on K_{}: {}", p.len() + 1, format::sandpile_text(&c)))?;
        }
        Command::GridExperiment { rows, cols, drops, seed } => {
            let seed = seed.unwrap_or_else(|| {
                let _ = writeln!(ctx.err, "note: no --seed given, using seed 0");
                0
            });
            let hist = grid_experiment(rows, cols, drops, seed)?;
            let slope = loglog_slope(&hist);
            let counts: Vec<(u64, BigInt)> = hist.iter().map(|(&k, &c)| (k, BigInt::from(c))).collect();
            let slope_json = slope.map_or(Value::Null, |s| json!(round4(s)));
            let json = json!({
                "rows": rows,
                "cols": cols,
                "drops": drops,
                "seed": seed,
                "histogram": format::histogram_json(counts.iter().map(|(k, c)| (*k, c))),
                "loglog_slope": slope_json,
            });
            ctx.emit(json, || {
                let mut s = format!("grid {rows}x{cols}, {drops} drops, seed {seed}\nsize count\n");
                for (k, c) in &hist {
                    s += &format!("{k} {c}\n");
                }
                s += &match slope {
                    Some(x) => format!("log-log slope: {:.4}", round4(x)),
                    None => "log-log slope: n/a".into(),
                };
                s
            })?;
        }
        Command::Snf { graph } => {
            let g = load_graph(&graph)?;
            let factors = g.invariant_factors();
            let det = g.spanning_tree_count();
            let json = json!({
                "invariant_factors": factors.iter().map(format::big_number).collect::<Vec<_>>(),
                "spanning_trees": format::big_number(&det),
            });
            ctx.emit(json, || {
                let f: Vec<String> = factors.iter().map(BigInt::to_string).collect();
                format!("invariant factors: {}\nspanning trees: {det}", f.join(" "))
            })?;
        }
    }
    Ok(0)
}

fn read_input(path: &Path) -> CliResult<String> {
    if path == Path::new("-") {
        return Ok(io::read_to_string(io::stdin())?);
    }
    fs::read_to_string(path).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))
}

fn parse_shorthand(s: &str) -> Option<Family> {
    let (head, rest) = s.split_at(s.char_indices().nth(1)?.0);
    if head == "G" {
        let (r, c) = rest.split_once('x')?;
        return Some(Family::Grid { rows: r.parse().ok()?, cols: c.parse().ok()? });
    }
    let n: usize = rest.parse().ok()?;
    Some(match head {
        "K" => Family::Complete(n),
        "C" => Family::Cycle(n),
        "W" => Family::Wheel(n),
        "F" => Family::Fan(n),
        "P" => Family::Path(n),
        _ => return None,
    })
}

fn require_n(n: Option<usize>, kind: &str) -> CliResult<usize> {
    n.ok_or_else(|| CliError::Usage(format!("--kind {kind} needs --n")))
}

fn require_parents(parents: &Option<String>) -> CliResult<RootedTree> {
    let s = parents.as_ref().ok_or_else(|| CliError::Usage("--kind tree needs --parents".into()))?;
    Ok(format::parse_parents(s)?)
}

fn load_graph(args: &GraphArgs) -> CliResult<Graph> {
    if let Some(source) = &args.graph {
        if let Some(f) = parse_shorthand(source) {
            return Ok(Graph::family(&f)?);
        }
        return Ok(format::parse_graph_json(&read_input(Path::new(source))?)?);
    }
    let Some(kind) = args.kind else {
        return Err(CliError::Usage("a graph is required: use --graph or --kind".into()));
    };
    if kind != GraphKind::Tree && args.parents.is_some() {
        return Err(CliError::Usage("--parents only applies to --kind tree".into()));
    }
    let family = match kind {
        GraphKind::Tree => return Ok(require_parents(&args.parents)?.to_graph()?),
        GraphKind::Cycle => Family::Cycle(require_n(args.n, "cycle")?),
        GraphKind::Complete => Family::Complete(require_n(args.n, "complete")?),
        GraphKind::Wheel => Family::Wheel(require_n(args.n, "wheel")?),
        GraphKind::Path => Family::Path(require_n(args.n, "path")?),
        GraphKind::Fan => Family::Fan(require_n(args.n, "fan")?),
    };
    Ok(Graph::family(&family)?)
}

/// The graph (for variable names) and its closed-form polynomial.
fn closed_form(args: &FamilyArgs) -> CliResult<(Graph, MultiPoly)> {
    if args.kind == ClosedKind::Tree {
        let t = require_parents(&args.parents)?;
        return Ok((t.to_graph()?, tree_poly(&t)));
    }
    if args.parents.is_some() {
        return Err(CliError::Usage("--parents only applies to --kind tree".into()));
    }
    Ok(match args.kind {
        ClosedKind::Cycle => {
            let n = require_n(args.n, "cycle")?;
            (Graph::cycle(n)?, cycle_poly(n)?)
        }
        ClosedKind::Complete => {
            let n = require_n(args.n, "complete")?;
            (Graph::complete(n)?, complete_poly(n)?)
        }
        ClosedKind::Wheel => {
            let n = require_n(args.n, "wheel")?;
            (Graph::wheel(n)?, wheel_poly(n)?)
        }
        ClosedKind::Tree => unreachable!(),
    })
}

fn verify(ctx: &mut Ctx<'_>, kind: ClosedKind, max_n: usize) -> CliResult<i32> {
    let (name, min_n) = match kind {
        ClosedKind::Tree => ("tree", 1),
        ClosedKind::Cycle => ("cycle", 2),
        ClosedKind::Complete => ("complete", 2),
        ClosedKind::Wheel => ("wheel", 3),
    };
    if max_n < min_n {
        return Err(CliError::Usage(format!("--max-n must be at least {min_n} for {name}")));
    }
    let mut results = Vec::new();
    let mut lines = Vec::new();
    let mut all_ok = true;
    for n in min_n..=max_n {
        let (ok, checked) = match kind {
            ClosedKind::Tree => {
                let mut checked = 0u64;
                let mut ok = true;
                for t in all_trees(n) {
                    let brute = parallel::avalanche_polynomial(&t.to_graph()?, ctx.limit, ctx.threads)?;
                    ok &= brute == tree_poly(&t);
                    checked += 1;
                }
                (ok, checked)
            }
            _ => {
                let (g, p) = closed_form(&FamilyArgs { kind, n: Some(n), parents: None })?;
                (parallel::avalanche_polynomial(&g, ctx.limit, ctx.threads)? == p, 1)
            }
        };
        all_ok &= ok;
        results.push(json!({ "n": n, "graphs": checked, "ok": ok }));
        lines.push(format!("{name} n={n} graphs={checked} {}", if ok { "ok" } else { "MISMATCH" }));
    }
    ctx.emit(json!({ "kind": name, "ok": all_ok, "results": results }), || lines.join("\n"))?;
    if all_ok {
        Ok(0)
    } else {
        writeln!(ctx.err, "error: closed form and brute force disagree")?;
        Ok(1)
    }
}

fn write_records(g: &Graph, limit: u64, path: &Path) -> CliResult<()> {
    let file = fs::File::create(path).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    let mut failure = None;
    for_each_avalanche(g, limit, |r| {
        if failure.is_some() {
            return;
        }
        let line = json!({
            "recurrent": format::sandpile_json(&r.recurrent),
            "vertex": r.vertex,
            "topplings": r.topplings.counts(),
            "size": r.size,
            "burst": r.burst,
        });
        if let Err(e) = writeln!(w, "{line}") {
            failure = Some(e);
        }
    })?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    w.flush()?;
    Ok(())
}

fn emit_poly(ctx: &mut Ctx<'_>, p: &MultiPoly, names: &[String]) -> CliResult<()> {
    ctx.emit(format::poly_to_json(p), || p.display_with(names).to_string())
}

fn emit_unipoly(ctx: &mut Ctx<'_>, u: &UniPoly) -> CliResult<()> {
    let json = format::histogram_json(u.nonzero_terms().map(|(k, c)| (k as u64, c)));
    ctx.emit(json, || u.to_string())
}

fn emit_histogram(ctx: &mut Ctx<'_>, d: &SizeDistribution) -> CliResult<()> {
    let json = format::histogram_json(d.counts.iter().map(|(&k, c)| (k, c)));
    ctx.emit(json, || d.counts.iter().map(|(k, c)| format!("{k} {c}")).collect::<Vec<_>>().join("\n"))
}

/// Least-squares slope of `log(count)` against `log(size)` over sizes >= 1.
fn loglog_slope(hist: &std::collections::BTreeMap<u64, u64>) -> Option<f64> {
    let pts: Vec<(f64, f64)> = hist
        .iter()
        .filter(|&(&k, &c)| k > 0 && c > 0)
        .map(|(&k, &c)| ((k as f64).ln(), (c as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Four decimals, so that last-bit differences in `ln` between platforms do
/// not show up in the output.
fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}
