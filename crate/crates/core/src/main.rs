//! `sat2tri` command line: compile CNF formulas to triangulated manifolds,
//! query the genus claim, and run the verification utilities.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use sat2tri::blockgraph::build_block_graph;
use sat2tri::compiler::{compile_with, BlockLibrary};
use sat2tri::farey::{farey_distance, fibonacci_distance_closed_form, fibonacci_slope, Slope};
use sat2tri::formula::{
    brute_force_sat, compile_bipartitions, parse_dimacs, parse_expr, Bipartition, Formula,
};
use sat2tri::splitting::{min_genus, MinGenus, SplittingError};
use sat2tri::tri::{homology_h1, parse_manifest, parse_tri_text, render_tri_text, validate, Complex};

#[derive(Parser)]
#[command(name = "sat2tri", version, about = "CNF → triangulated 3-manifold reduction toolkit")]
struct Cli {
    /// Emit machine-readable JSON instead of prose.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CnfInput {
    /// Formula file.
    #[arg(long)]
    cnf: PathBuf,
    /// Input format: `expr`, `dimacs`, or `auto` (detect).
    #[arg(long, default_value = "auto")]
    format: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile a CNF formula into a triangulation plus certificate.
    Compile {
        #[command(flatten)]
        input: CnfInput,
        /// Write the gluing table here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the JSON certificate here.
        #[arg(long)]
        cert: Option<PathBuf>,
        /// Block source: `abstract` stand-ins or `concrete` (a block directory).
        #[arg(long, default_value = "abstract")]
        mode: String,
        /// Directory of block data files (defaults to $SAT2TRI_BLOCKS in concrete mode).
        #[arg(long)]
        blocks: Option<PathBuf>,
        /// Override the per-gluing constant K.
        #[arg(long)]
        k_override: Option<u64>,
    },
    /// Report the genus claim, minimal amalgamated genus, and SAT verdict.
    Genus {
        #[command(flatten)]
        input: CnfInput,
    },
    /// Brute-force satisfiability oracle.
    Sat {
        #[command(flatten)]
        input: CnfInput,
    },
    /// Farey graph utilities.
    Farey {
        #[command(subcommand)]
        cmd: FareyCmd,
    },
    /// Fibonacci slope F_{k+1}/F_k and its closed-form distance to ∞.
    Fib {
        #[arg(long)]
        k: u64,
    },
    /// Validate a gluing table (and optionally its block manifest).
    Verify {
        #[arg(long)]
        tri: PathBuf,
        /// Block manifest with frames and declared H₁ to check against.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Compile a set of ordered bipartitions into a CNF formula.
    Bipartitions {
        #[arg(long)]
        n: u32,
        /// Comma-separated ordered bipartitions, e.g. `1|23,12|3`.
        #[arg(long)]
        set: String,
        /// Write the formula here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum FareyCmd {
    /// Exact Farey distance between two slopes.
    Dist { a: String, b: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn load_formula(input: &CnfInput) -> Result<Formula, String> {
    let text = std::fs::read_to_string(&input.cnf)
        .map_err(|e| format!("{}: {e}", input.cnf.display()))?;
    let format = match input.format.as_str() {
        "auto" => {
            let first = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("")
                .trim_start();
            if first.starts_with('p') || first.starts_with('c') { "dimacs" } else { "expr" }
        }
        other => other,
    };
    match format {
        "dimacs" => parse_dimacs(&text).map_err(|e| e.to_string()),
        "expr" => parse_expr(&text).map_err(|e| e.to_string()),
        other => Err(format!("unknown format {other:?} (expected expr|dimacs|auto)")),
    }
}

fn parse_slope(s: &str) -> Result<Slope, String> {
    s.parse().map_err(|_| format!("bad slope {s:?}"))
}

fn write_or_print(path: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    match &cli.cmd {
        Cmd::Compile { input, out, cert, mode, blocks, k_override } => {
            let f = load_formula(input)?;
            let lib = match mode.as_str() {
                "abstract" => BlockLibrary::abstract_library(),
                "concrete" => {
                    let dir = blocks
                        .clone()
                        .or_else(|| std::env::var_os("SAT2TRI_BLOCKS").map(PathBuf::from))
                        .ok_or("concrete mode needs --blocks or $SAT2TRI_BLOCKS")?;
                    BlockLibrary::load_dir(Path::new(&dir)).map_err(|e| e.to_string())?
                }
                other => return Err(format!("unknown mode {other:?} (expected abstract|concrete)")),
            };
            let result = compile_with(&f, &lib, *k_override).map_err(|e| e.to_string())?;
            if let Some(p) = out {
                std::fs::write(p, render_tri_text(&result.complex.tri))
                    .map_err(|e| format!("{}: {e}", p.display()))?;
            }
            let cert_json = serde_json::to_string_pretty(&result.certificate)
                .expect("certificate serializes");
            if let Some(p) = cert {
                std::fs::write(p, &cert_json).map_err(|e| format!("{}: {e}", p.display()))?;
            }
            if cli.json {
                println!("{cert_json}");
            } else {
                let c = &result.certificate;
                println!(
                    "|Q|={} blocks={} gluings={} tets={} (budget {}) authentic={}",
                    c.q_len,
                    c.census.total(),
                    c.gluings.len(),
                    c.tet_count,
                    c.tet_budget,
                    c.authentic
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Genus { input } => {
            let f = load_formula(input)?;
            let q = f.length();
            let sat = !brute_force_sat(&f).map_err(|e| e.to_string())?.is_empty();
            let bg = build_block_graph(&f);
            let mg = match min_genus(&bg) {
                Ok(mg) => Some(mg),
                Err(SplittingError::TooManyBlocks(..)) => None,
                Err(e) => return Err(e.to_string()),
            };
            if cli.json {
                let (kind, genus) = match &mg {
                    Some(MinGenus::Exact { genus, .. }) => ("exact", Some(*genus)),
                    Some(MinGenus::LowerBound { genus }) => ("lower-bound", Some(*genus)),
                    None => ("not-evaluated", None),
                };
                println!(
                    "{}",
                    json!({
                        "q_len": q,
                        "claim_genus": q + 2,
                        "satisfiable": sat,
                        "min_genus": {"kind": kind, "genus": genus},
                    })
                );
            } else {
                let verdict = match &mg {
                    Some(MinGenus::Exact { genus, .. }) => {
                        format!("min amalgamated genus {genus}")
                    }
                    Some(MinGenus::LowerBound { genus }) => {
                        format!("min amalgamated genus >= {genus}")
                    }
                    None => "min amalgamated genus not evaluated (too many blocks)".to_string(),
                };
                println!(
                    "|Q|={q}, claim genus {}, SAT: {}, {verdict}",
                    q + 2,
                    if sat { "yes" } else { "no" }
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Sat { input } => {
            let f = load_formula(input)?;
            let solutions = brute_force_sat(&f).map_err(|e| e.to_string())?;
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "satisfiable": !solutions.is_empty(),
                        "count": solutions.len(),
                    })
                );
            } else if solutions.is_empty() {
                println!("UNSAT");
            } else {
                println!("SAT ({} assignments)", solutions.len());
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Farey { cmd: FareyCmd::Dist { a, b } } => {
            let d = farey_distance(&parse_slope(a)?, &parse_slope(b)?);
            if cli.json {
                println!("{}", json!({ "distance": d }));
            } else {
                println!("{d}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Fib { k } => {
            let s = fibonacci_slope(*k);
            let d = fibonacci_distance_closed_form(*k);
            if cli.json {
                println!("{}", json!({ "slope": s.to_string(), "distance_to_infinity": d }));
            } else {
                println!("F_{{k+1}}/F_k = {s}, distance to inf = {d}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { tri, manifest } => {
            let text = std::fs::read_to_string(tri).map_err(|e| format!("{}: {e}", tri.display()))?;
            let table = parse_tri_text(&text).map_err(|e| e.to_string())?;
            let report = validate(&table);
            // Dense Smith normal form is only feasible for small tables;
            // larger complexes get the combinatorial checks only.
            const H1_TET_LIMIT: usize = 500;
            let h1 = if table.tet_count() <= H1_TET_LIMIT {
                homology_h1(&table).ok()
            } else {
                None
            };
            let mut manifest_errors: Vec<String> = Vec::new();
            if let Some(mpath) = manifest {
                let mtext = std::fs::read_to_string(mpath)
                    .map_err(|e| format!("{}: {e}", mpath.display()))?;
                match parse_manifest(&mtext) {
                    Err(e) => manifest_errors.push(e.to_string()),
                    Ok((frames, declared)) => {
                        let complex = Complex { tri: table.clone(), frames };
                        if let Err(e) = complex.validate_frames() {
                            manifest_errors.push(e.to_string());
                        }
                        match &h1 {
                            Some(computed) if *computed != declared => manifest_errors.push(format!(
                                "declared H1 rank {} differs from computed rank {}",
                                declared.rank, computed.rank
                            )),
                            _ => {}
                        }
                    }
                }
            }
            let ok = report.is_ok() && manifest_errors.is_empty();
            if cli.json {
                println!(
                    "{}",
                    json!({
                        "ok": ok,
                        "violations": report.violations,
                        "manifest_errors": manifest_errors,
                        "euler": report.euler,
                        "orientable": report.orientable,
                        "boundary_components": report.boundary.len(),
                        "h1_rank": h1.as_ref().map(|h| h.rank),
                        "h1_torsion": h1.as_ref().map(|h| h.torsion.clone()),
                    })
                );
            } else {
                print!("{report}");
                for e in &manifest_errors {
                    println!("manifest violation: {e}");
                }
                if let Some(h) = &h1 {
                    println!("H1: rank {} torsion {:?}", h.rank, h.torsion);
                }
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Bipartitions { n, set, out } => {
            if *n == 0 || *n > 9 {
                return Err("--n must be between 1 and 9".into());
            }
            let mut parts: BTreeSet<Bipartition> = BTreeSet::new();
            for spec in set.split(',') {
                let (plus, minus) = spec
                    .split_once('|')
                    .ok_or_else(|| format!("bad bipartition {spec:?} (expected PLUS|MINUS)"))?;
                let digits = |s: &str| -> Result<BTreeSet<u32>, String> {
                    s.chars()
                        .map(|c| {
                            c.to_digit(10)
                                .filter(|&d| d >= 1 && d <= *n)
                                .ok_or_else(|| format!("bad element {c:?} in {spec:?}"))
                        })
                        .collect()
                };
                parts.insert(
                    Bipartition::new(digits(plus)?, digits(minus)?, *n)
                        .map_err(|e| e.to_string())?,
                );
            }
            let f = compile_bipartitions(&parts, *n).map_err(|e| e.to_string())?;
            if cli.json {
                println!("{}", json!({ "formula": f.to_string(), "n": n }));
                if let Some(p) = out {
                    std::fs::write(p, format!("{f}\n")).map_err(|e| format!("{}: {e}", p.display()))?;
                }
            } else {
                write_or_print(out, &f.to_string())?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
