//! `ell3`: command-line front end.
//!
//! Exit codes: 0 success or SAT, 10 UNSAT, 1 a verification failed,
//! 2 usage, I/O or parse error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ell3_core::datasets::{bundled, bundled_text, parse_case, parse_pointset, CaseSpec, PointSetFile};
use ell3_core::encoder::to_dimacs;
use ell3_core::geometry::{classify_pair, enumerate_constraints, sqdist, PairClass};
use ell3_core::grid::{self, generate_grid, GridReport};
use ell3_core::proof::{check_all_cases, check_case, resolve_variant, CaseSummary};
use ell3_core::solver::certificate::{final_colors, parse_certificate, replay};
use ell3_core::strategy;
use ell3_core::svg::{render, Figure};
use ell3_core::{Color, Constraint, KindSet, Outcome, Problem, Verdict};

const EXIT_UNSAT: u8 = 10;
const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "ell3", version, about = "Exact checks for two-colorings of plane point sets")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Classify every pair of points by squared distance.
    Distances { points: String },
    /// List the constraints induced on a point set.
    Constraints {
        points: String,
        #[arg(long, default_value = "ell3,eq1,eq2")]
        kinds: KindSet,
    },
    /// Decide whether a seed coloring extends to the whole set.
    Solve {
        points: String,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        certificate: Option<PathBuf>,
        #[arg(long, default_value = "dfs")]
        solver: String,
        #[arg(long, default_value = "ell3,eq1,eq2")]
        kinds: KindSet,
    },
    /// Re-check a certificate written by `solve`.
    Replay {
        points: String,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long)]
        certificate: PathBuf,
        #[arg(long, default_value = "ell3,eq1,eq2")]
        kinds: KindSet,
    },
    /// Verify one forcing chain, by bundled name or from files.
    CheckCase {
        name: Option<String>,
        #[arg(long, requires = "case")]
        points: Option<String>,
        #[arg(long, requires = "points")]
        case: Option<String>,
    },
    /// Run every bundled check: fig1, the six cases and the grid.
    CheckAll {
        #[arg(long, default_value_t = grid::DEFAULT_RADIUS)]
        radius: u32,
    },
    /// Enumerate grid completions and check uniqueness and the circle property.
    Grid {
        #[arg(long, default_value_t = grid::DEFAULT_RADIUS)]
        radius: u32,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Write the instance as DIMACS CNF.
    Encode {
        points: String,
        #[arg(long)]
        seed: Option<String>,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value = "ell3,eq1,eq2")]
        kinds: KindSet,
    },
    /// Draw a point set, optionally colored from a certificate.
    Render {
        points: String,
        #[arg(long)]
        coloring: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// List the available deciders.
    Solvers,
}

/// A point file path, or the name of a bundled dataset.
fn load_points(arg: &str) -> Result<PointSetFile> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some((text, _)) = bundled_text(arg) {
            return Ok(parse_pointset(arg, text)?);
        }
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
    Ok(parse_pointset(name, &text)?)
}

fn load_case(arg: &str) -> Result<CaseSpec> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some((_, text)) = bundled_text(arg) {
            return Ok(parse_case(arg, text)?);
        }
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
    Ok(parse_case(name, &text)?)
}

struct Instance {
    points: PointSetFile,
    constraints: Vec<Constraint>,
    seed: Vec<(usize, Color)>,
    unused: Vec<String>,
}

fn load_instance(points: &str, seed: Option<&str>, kinds: KindSet) -> Result<Instance> {
    let points = load_points(points)?;
    let constraints = enumerate_constraints(&points.plane_points(), kinds)?;
    let (seed, unused) = match seed {
        Some(s) => load_case(s)?.resolve_seed(&points),
        None => (Vec::new(), Vec::new()),
    };
    Ok(Instance { points, constraints, seed, unused })
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn describe(c: &Constraint, labels: &[String]) -> String {
    let m: Vec<&str> = c.members.iter().map(|&i| labels[i].as_str()).collect();
    format!("{} {{{}}}", c.kind, m.join(", "))
}

fn cmd_distances(points: &str, format: Format) -> Result<u8> {
    let set = load_points(points)?;
    let pts = set.plane_points();
    let labels = set.display_labels();
    #[derive(Serialize)]
    struct Row<'a> {
        a: &'a str,
        b: &'a str,
        class: PairClass,
        sqdist: String,
    }
    let mut rows = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            rows.push(Row {
                a: &labels[i],
                b: &labels[j],
                class: classify_pair(&pts[i], &pts[j]),
                sqdist: sqdist(&pts[i], &pts[j]).to_string(),
            });
        }
    }
    match format {
        Format::Json => print_json(&rows)?,
        Format::Text => {
            for r in &rows {
                println!("{}\t{}\t{:?}\t{}", r.a, r.b, r.class, r.sqdist);
            }
            let unit = rows.iter().filter(|r| r.class == PairClass::Unit).count();
            let double = rows.iter().filter(|r| r.class == PairClass::Double).count();
            println!("# {} pairs, {unit} at distance 1, {double} at distance 2", rows.len());
        }
    }
    Ok(0)
}

fn cmd_constraints(points: &str, kinds: KindSet, format: Format) -> Result<u8> {
    let set = load_points(points)?;
    let cs = enumerate_constraints(&set.plane_points(), kinds)?;
    let labels = set.display_labels();
    let counts: Vec<(String, usize)> =
        kinds.kinds().map(|k| (k.to_string(), cs.iter().filter(|c| c.kind == k).count())).collect();
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                constraints: &'a [Constraint],
                counts: &'a [(String, usize)],
            }
            print_json(&Out { constraints: &cs, counts: &counts })?;
        }
        Format::Text => {
            for (id, c) in cs.iter().enumerate() {
                println!("C#{id} {}", describe(c, &labels));
            }
            let summary: Vec<String> = counts.iter().map(|(k, n)| format!("{k} {n}")).collect();
            println!("# {} constraints: {}", cs.len(), summary.join(", "));
        }
    }
    Ok(0)
}

fn cmd_solve(
    points: &str,
    seed: Option<&str>,
    certificate: Option<&Path>,
    solver: &str,
    kinds: KindSet,
    format: Format,
) -> Result<u8> {
    let decider = strategy::decider(solver)
        .ok_or_else(|| anyhow!("unknown solver `{solver}`; available: {}", strategy::names().join(", ")))?;
    let inst = load_instance(points, seed, kinds)?;
    let labels = inst.points.display_labels();
    let start = Instant::now();
    let decision = decider.decide(&Problem::new(inst.points.len(), &inst.constraints, &inst.seed))?;
    let elapsed = start.elapsed();
    if let Some(path) = certificate {
        let cert =
            decision.certificate.as_ref().ok_or_else(|| anyhow!("solver `{solver}` does not produce certificates"))?;
        fs::write(path, cert.to_text(&labels)).with_context(|| format!("writing {}", path.display()))?;
    }
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                solver: &'a str,
                verdict: Verdict,
                points: usize,
                constraints: usize,
                decisions: Option<usize>,
                coloring: Option<Vec<(&'a str, Color)>>,
                unused_seeds: &'a [String],
            }
            let coloring =
                decision.witness.as_ref().map(|w| labels.iter().map(String::as_str).zip(w.iter().copied()).collect());
            print_json(&Out {
                solver,
                verdict: decision.verdict,
                points: inst.points.len(),
                constraints: inst.constraints.len(),
                decisions: decision.certificate.as_ref().map(|c| c.decisions()),
                coloring,
                unused_seeds: &inst.unused,
            })?;
        }
        Format::Text => {
            for l in &inst.unused {
                println!("note: seed label {l} is not in the point set");
            }
            let verdict = match decision.verdict {
                Verdict::Sat => "SAT",
                Verdict::Unsat => "UNSAT",
            };
            println!(
                "{verdict} ({} points, {} constraints, solver {solver}, {:.3}s)",
                inst.points.len(),
                inst.constraints.len(),
                elapsed.as_secs_f64()
            );
            if let Some(w) = &decision.witness {
                for (l, c) in labels.iter().zip(w) {
                    println!("{l} {c}");
                }
            }
        }
    }
    Ok(match decision.verdict {
        Verdict::Sat => 0,
        Verdict::Unsat => EXIT_UNSAT,
    })
}

fn cmd_replay(points: &str, seed: Option<&str>, certificate: &Path, kinds: KindSet, format: Format) -> Result<u8> {
    let inst = load_instance(points, seed, kinds)?;
    let labels = inst.points.display_labels();
    let text = fs::read_to_string(certificate).with_context(|| format!("reading {}", certificate.display()))?;
    let parsed = parse_certificate(&text, &labels)?;
    let result = replay(inst.points.len(), &inst.constraints, &inst.seed, &parsed.events, parsed.claimed);
    let ok = result.is_ok();
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Out {
                claimed: Verdict,
                valid: bool,
                error: Option<String>,
            }
            print_json(&Out { claimed: parsed.claimed, valid: ok, error: result.err().map(|e| e.to_string()) })?;
        }
        Format::Text => match result {
            Ok(Outcome::Sat(_)) => println!("certificate valid: SAT ({} events)", parsed.events.len()),
            Ok(Outcome::Unsat) => println!("certificate valid: UNSAT ({} events)", parsed.events.len()),
            Err(e) => println!("certificate invalid: {e}"),
        },
    }
    Ok(if ok { 0 } else { EXIT_FAILED })
}

fn case_line(s: &CaseSummary) -> String {
    format!(
        "{}: s_{} double-forced after {} forced steps (variant {}), search {}",
        s.verdict.case,
        s.verdict.steps.len() + 1,
        s.verdict.steps.len(),
        s.verdict.variant.name(),
        if s.solver_unsat { "agrees" } else { "DISAGREES" }
    )
}

fn cmd_check_case(name: Option<&str>, points: Option<&str>, case: Option<&str>, format: Format) -> Result<u8> {
    let (pts, spec) = match (name, points, case) {
        (Some(n), None, None) => bundled(n)?,
        (None, Some(p), Some(c)) => (load_points(p)?, load_case(c)?),
        _ => bail!("give either a bundled case name or both --points and --case"),
    };
    match check_case(&pts, &spec) {
        Ok(summary) => {
            match format {
                Format::Json => print_json(&summary)?,
                Format::Text => {
                    print!("{}", summary.verdict.report());
                    println!("{}", case_line(&summary));
                }
            }
            Ok(if summary.solver_unsat { 0 } else { EXIT_FAILED })
        }
        Err(e) => {
            let hint = resolve_variant(&spec, &pts)
                .ok()
                .map(|(v, _)| format!(" (verifies under variant {})", v.name()))
                .unwrap_or_default();
            match format {
                Format::Json => {
                    print_json(&serde_json::json!({ "case": spec.name, "verified": false, "error": e.to_string() }))?
                }
                Format::Text => println!("{}: NOT verified: {e}{hint}", spec.name),
            }
            Ok(EXIT_FAILED)
        }
    }
}

fn grid_lines(r: &GridReport) -> Vec<String> {
    vec![
        format!(
            "grid radius {}: {} points, {} constraints, {} interior points",
            r.radius, r.points, r.constraints, r.interior
        ),
        format!(
            "interior patterns: {} ({})",
            r.patterns,
            if r.unique_up_to_isometry { "all isometric" } else { "NOT all isometric" }
        ),
        format!(
            "circle of radius 4/√3 monochromatic at every interior point: {}",
            if r.circle_property { "yes" } else { "NO" }
        ),
        "note: only the discrete grid is checked; the rotation argument over the continuous plane is not".into(),
    ]
}

fn grid_figure(radius: u32, witness: &[Color]) -> String {
    let region = generate_grid(radius);
    let pts = region.plane_points();
    let center = region.vertex(0, 0).expect("origin is in every region");
    render(&Figure {
        points: &pts,
        labels: vec![None; pts.len()],
        colors: witness.iter().map(|&c| Some(c)).collect(),
        circle: Some((center, 4.0 / 3f64.sqrt())),
        title: Some(format!("grid radius {radius}")),
    })
}

fn cmd_grid(radius: u32, svg: Option<&Path>, format: Format) -> Result<u8> {
    let report = grid::verify_grid(radius)?;
    if let Some(path) = svg {
        fs::write(path, grid_figure(radius, &report.witness)).with_context(|| format!("writing {}", path.display()))?;
    }
    match format {
        Format::Json => print_json(&report)?,
        Format::Text => grid_lines(&report).iter().for_each(|l| println!("{l}")),
    }
    Ok(if report.unique_up_to_isometry && report.circle_property { 0 } else { EXIT_FAILED })
}

fn cmd_check_all(radius: u32, format: Format) -> Result<u8> {
    let (pts, case) = bundled("fig1")?;
    let cs = enumerate_constraints(&pts.plane_points(), KindSet::triples())?;
    let (seed, _) = case.resolve_seed(&pts);
    let cert = ell3_core::solve(pts.len(), &cs, &seed)?;
    let fig1_ok =
        cert.verdict() == Verdict::Unsat && replay(pts.len(), &cs, &seed, &cert.events, Verdict::Unsat).is_ok();

    let cases = check_all_cases();
    let cases_ok = cases.as_ref().is_ok_and(|a| a.exhaustive && a.cases.iter().all(|c| c.solver_unsat));
    let grid = grid::verify_grid(radius);
    let grid_ok = grid.as_ref().is_ok_and(|g| g.unique_up_to_isometry && g.circle_property);

    let mark = |ok: bool| if ok { "✓" } else { "✗" };
    match format {
        Format::Json => print_json(&serde_json::json!({
            "fig1": { "verdict": cert.verdict(), "replayed": fig1_ok, "events": cert.events.len() },
            "cases": cases.as_ref().map(|a| a.cases.iter().map(|c| serde_json::json!({
                "case": c.verdict.case, "length": c.verdict.steps.len() + 1, "search_unsat": c.solver_unsat,
            })).collect::<Vec<_>>()).map_err(|e| e.to_string()),
            "grid": grid.as_ref().map_err(|e| e.to_string()).ok(),
        }))?,
        Format::Text => {
            match &cases {
                Ok(a) => a.cases.iter().for_each(|c| println!("  {}", case_line(c))),
                Err(e) => println!("  cases: {e}"),
            }
            if let Ok(g) = &grid {
                grid_lines(g).iter().for_each(|l| println!("  {l}"));
            }
            println!(
                "fig1: {} {}, cases 1-6: {} {}, grid: {} {}",
                if cert.verdict() == Verdict::Unsat { "UNSAT" } else { "SAT" },
                mark(fig1_ok),
                if cases_ok { "verified" } else { "failed" },
                mark(cases_ok),
                if grid_ok { "unique + circle" } else { "failed" },
                mark(grid_ok)
            );
        }
    }
    Ok(if fig1_ok && cases_ok && grid_ok { 0 } else { EXIT_FAILED })
}

fn cmd_encode(points: &str, seed: Option<&str>, output: &Path, kinds: KindSet) -> Result<u8> {
    let inst = load_instance(points, seed, kinds)?;
    let text = to_dimacs(&inst.points.points, &inst.constraints, &inst.seed)?;
    fs::write(output, text).with_context(|| format!("writing {}", output.display()))?;
    Ok(0)
}

fn cmd_render(points: &str, coloring: Option<&Path>, output: &Path) -> Result<u8> {
    let set = load_points(points)?;
    let pts = set.plane_points();
    let colors = match coloring {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let parsed = parse_certificate(&text, &set.display_labels())?;
            final_colors(set.len(), &parsed.events)
        }
        None => vec![None; set.len()],
    };
    let fig = Figure {
        points: &pts,
        labels: set.points.iter().map(|p| p.label.clone()).collect(),
        colors,
        circle: None,
        title: Some(set.name.clone()),
    };
    fs::write(output, render(&fig)).with_context(|| format!("writing {}", output.display()))?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    let f = cli.format;
    match cli.command {
        Command::Distances { points } => cmd_distances(&points, f),
        Command::Constraints { points, kinds } => cmd_constraints(&points, kinds, f),
        Command::Solve { points, seed, certificate, solver, kinds } => {
            cmd_solve(&points, seed.as_deref(), certificate.as_deref(), &solver, kinds, f)
        }
        Command::Replay { points, seed, certificate, kinds } => {
            cmd_replay(&points, seed.as_deref(), &certificate, kinds, f)
        }
        Command::CheckCase { name, points, case } => {
            cmd_check_case(name.as_deref(), points.as_deref(), case.as_deref(), f)
        }
        Command::CheckAll { radius } => cmd_check_all(radius, f),
        Command::Grid { radius, svg } => cmd_grid(radius, svg.as_deref(), f),
        Command::Encode { points, seed, output, kinds } => cmd_encode(&points, seed.as_deref(), &output, kinds),
        Command::Render { points, coloring, output } => cmd_render(&points, coloring.as_deref(), &output),
        Command::Solvers => {
            for d in strategy::deciders() {
                println!("{}\t{}", d.name(), d.description());
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
