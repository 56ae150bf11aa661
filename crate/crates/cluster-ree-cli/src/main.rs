//! Command-line front end: classification, analytic REE, convex
//! verification, figure-data emission, twirling, and state generation.
//!
//! JSON goes to stdout (or `--out`); domain errors are reported as one JSON
//! object on stderr with exit code 1; usage errors exit with code 2.

use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use cluster_ree::{
    bisep_surface, biseparable_verdict, dephasing_state, genuine_ree, region_grid, sample_random,
    twirl_to_fvector, verify, verify_batch, BiasTarget, FVector, Half, HermitianMatrix, NoiseSpec,
    Region, RegionGrid, SurfacePoint,
};

#[derive(Parser)]
#[command(
    name = "cluster-ree",
    version,
    about = "Genuine entanglement of four-qubit cluster diagonal states"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the biseparability criteria and region of a state.
    Classify {
        /// Path to a state JSON {"F": [...]}, or '-' for stdin.
        #[arg(long)]
        input: String,
        /// Violation tolerance for the reduced inequalities.
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Compute the genuine relative entropy of entanglement in closed form.
    Ree {
        #[arg(long)]
        input: String,
        /// Report the value in nats instead of bits.
        #[arg(long)]
        nats: bool,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Cross-check the analytic value against the convex solver.
    Verify {
        /// Single state to verify.
        #[arg(long, conflicts_with = "batch")]
        input: Option<String>,
        /// Corpus file (JSONL, one {"F": [...]} per line). With --n the
        /// corpus is generated, written here, then verified.
        #[arg(long)]
        batch: Option<PathBuf>,
        /// Seed for corpus generation.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Number of states to generate into --batch.
        #[arg(long)]
        n: Option<usize>,
        /// Solver tolerance in bits; CLUSTER_ENT_TOL overrides the default.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Emit the region map over one parameter plane as CSV plus boundary
    /// polylines as JSON.
    Regions {
        /// Fixed block maximum; 0.3 and 0.6 reproduce the reference maps.
        #[arg(long, default_value_t = 0.3)]
        p0: f64,
        #[arg(long, default_value_t = 400)]
        res: usize,
        /// Switch to the (p3, p4) layer view, holding p7 at this value.
        #[arg(long = "p4-slice")]
        p4_slice: Option<f64>,
        /// Axis extent; defaults to 1 - p0.
        #[arg(long = "axis-max")]
        axis_max: Option<f64>,
        /// Either "grid.csv" or "grid.csv,boundaries.json".
        #[arg(long)]
        out: Option<String>,
    },
    /// Scan the biseparable-set border surfaces at fixed l0.
    #[command(name = "bisep-surface")]
    BisepSurface {
        #[arg(long)]
        l0: f64,
        #[arg(long, default_value_t = 100)]
        res: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Project a density matrix onto its cluster-basis diagonal.
    Twirl {
        /// Path to a matrix JSON {"re": [[...]], "im": [[...]]}, or '-'.
        #[arg(long)]
        input: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Generate test states.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Draw deterministic random states, optionally targeting a region.
    Sample {
        #[arg(long)]
        seed: u64,
        /// Region target, e.g. B, C1, A', D1'.
        #[arg(long)]
        region: Option<String>,
        /// Which inequality half drives the target (first/second).
        #[arg(long, default_value = "first")]
        half: String,
        /// Number of states; more than one emits JSONL.
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// Independent per-qubit phase flips applied to the cluster state.
    Dephase {
        /// Four comma-separated flip probabilities, e.g. 0.1,0.1,0.1,0.1.
        #[arg(long)]
        q: String,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args)]
struct OutArg {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Domain { kind: String, message: String },
    Usage(String),
}

impl From<cluster_ree::Error> for CliError {
    fn from(e: cluster_ree::Error) -> Self {
        CliError::Domain {
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain {
            kind: "Io".to_string(),
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Domain {
            kind: "Json".to_string(),
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain { kind, message }) => {
            let err = json!({"error": kind, "message": message});
            eprintln!("{err}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn read_input(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        Ok(buf)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

fn read_fvector(path: &str) -> Result<FVector, CliError> {
    Ok(serde_json::from_str(&read_input(path)?)?)
}

fn emit(out: &OutArg, text: &str) -> Result<(), CliError> {
    match &out.out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn solver_tol(flag: Option<f64>) -> f64 {
    flag.or_else(|| {
        std::env::var("CLUSTER_ENT_TOL")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(1e-6)
}

fn fvec_json(f: &FVector) -> Value {
    json!({"F": f.values().to_vec()})
}

fn verify_row(r: &cluster_ree::VerifyReport) -> Value {
    json!({
        "E_analytic": r.e_analytic,
        "E_oracle": r.e_oracle,
        "abs_diff": r.abs_diff,
        "region": r.region.region.to_string(),
        "half": r.region.half.map(|h| h.to_string()),
        "class": r.class.to_string(),
        "formula": r.formula.to_string(),
        "boundary_match": r.boundary_match,
        "iterations": r.iterations,
        "gap": r.gap,
        "feasibility_residual": r.feasibility_residual,
        "lambda_analytic": r.lambda_analytic.values().to_vec(),
        "lambda_oracle": r.lambda_oracle.values().to_vec(),
    })
}

fn grid_csv(grid: &RegionGrid) -> String {
    let mut csv = String::from("x,y,label\n");
    for cell in &grid.cells {
        csv.push_str(&format!("{},{},{}\n", cell.x, cell.y, cell.label));
    }
    csv
}

fn boundaries_json(grid: &RegionGrid) -> Value {
    let (xname, yname) = grid.view.axis_names();
    json!({
        "view": format!("{xname}-{yname}"),
        "p0": grid.p0,
        "fixed": grid.fixed,
        "axis_max": grid.axis_max,
        "resolution": grid.resolution,
        "boundaries": grid.boundaries.iter().map(|b| json!({
            "name": b.name,
            "points": b.points.iter().map(|&(x, y)| vec![x, y]).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "intersections": grid.pab_diag_intersection
            .map(|x| json!({"pab_diag": x}))
            .unwrap_or(json!({})),
    })
}

fn surface_csv(points: &[SurfacePoint]) -> String {
    let mut csv = String::from("l3,l7,l4,label\n");
    for p in points {
        csv.push_str(&format!("{},{},{},{}\n", p.l3, p.l7, p.l4, p.label));
    }
    csv
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Classify { input, eps, out } => {
            let f = read_fvector(&input)?;
            let (biseparable, report) = biseparable_verdict(&f, eps)?;
            let label = cluster_ree::classify(&f, eps)?;
            let doc = json!({
                "biseparable": biseparable,
                "region": label.region.to_string(),
                "half": label.half.map(|h| h.to_string()),
                "violated": report.violated_names(),
                "margins": report.margins.to_vec(),
            });
            emit(&out, &format!("{doc}\n"))
        }
        Cmd::Ree {
            input,
            nats,
            eps,
            out,
        } => {
            let f = read_fvector(&input)?;
            let r = genuine_ree(&f, eps)?;
            let value = if nats {
                r.value * std::f64::consts::LN_2
            } else {
                r.value
            };
            let doc = json!({
                "E": value,
                "unit": if nats { "nats" } else { "bits" },
                "region": r.region.region.to_string(),
                "half": r.region.half.map(|h| h.to_string()),
                "formula": r.formula.to_string(),
                "class": r.closest.class_tag.to_string(),
                "closest": fvec_json(&r.closest.lambda),
            });
            emit(&out, &format!("{doc}\n"))
        }
        Cmd::Verify {
            input,
            batch,
            seed,
            n,
            tol,
            out,
        } => {
            let tol = solver_tol(tol);
            match (input, batch) {
                (Some(path), None) => {
                    let f = read_fvector(&path)?;
                    let r = verify(&f, tol)?;
                    emit(&out, &format!("{}\n", verify_row(&r)))
                }
                (None, Some(corpus_path)) => {
                    let states: Vec<FVector> = match n {
                        Some(n) => {
                            let states = cluster_ree::sample_corpus(seed, n)?;
                            let mut doc = String::new();
                            for f in &states {
                                doc.push_str(&format!("{}\n", fvec_json(f)));
                            }
                            fs::write(&corpus_path, doc)?;
                            states
                        }
                        None => {
                            let text = fs::read_to_string(&corpus_path)?;
                            text.lines()
                                .filter(|l| !l.trim().is_empty())
                                .map(serde_json::from_str)
                                .collect::<Result<_, _>>()?
                        }
                    };
                    let reports = verify_batch(&states, tol)?;
                    let mut doc = String::new();
                    for r in &reports {
                        doc.push_str(&format!("{}\n", verify_row(r)));
                    }
                    emit(&out, &doc)
                }
                _ => Err(CliError::Usage(
                    "verify needs exactly one of --input or --batch".to_string(),
                )),
            }
        }
        Cmd::Regions {
            p0,
            res,
            p4_slice,
            axis_max,
            out,
        } => {
            let axis_max = axis_max.unwrap_or_else(|| (1.0 - p0).clamp(0.05, 1.0));
            let grid = region_grid(p0, axis_max, res, p4_slice)?;
            let csv = grid_csv(&grid);
            let bounds = format!("{}\n", boundaries_json(&grid));
            match out.as_deref() {
                None => {
                    let mut stdout = std::io::stdout().lock();
                    stdout.write_all(csv.as_bytes())?;
                }
                Some(spec) => {
                    let mut parts = spec.splitn(2, ',');
                    let csv_path = parts.next().expect("splitn yields at least one part");
                    fs::write(csv_path, &csv)?;
                    if let Some(json_path) = parts.next() {
                        fs::write(json_path, &bounds)?;
                    }
                }
            }
            Ok(())
        }
        Cmd::BisepSurface { l0, res, out } => {
            let points = bisep_surface(l0, res)?;
            emit(&out, &surface_csv(&points))
        }
        Cmd::Twirl { input, out } => {
            let rho: HermitianMatrix = serde_json::from_str(&read_input(&input)?)?;
            let f = twirl_to_fvector(&rho)?;
            emit(&out, &format!("{}\n", fvec_json(&f)))
        }
        Cmd::Gen { kind } => match kind {
            GenKind::Dephase { q, out } => {
                let parts: Vec<f64> = q
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| {
                        CliError::Usage(format!("--q expects four comma-separated numbers, got {q:?}"))
                    })?;
                let four: [f64; 4] = parts.try_into().map_err(|_| {
                    CliError::Usage("--q expects exactly four probabilities".to_string())
                })?;
                let f = dephasing_state(&NoiseSpec::new(four)?);
                emit(&out, &format!("{}\n", fvec_json(&f)))
            }
        },
        Cmd::Sample {
            seed,
            region,
            half,
            n,
            out,
        } => {
            let half = match half.as_str() {
                "first" => Half::First,
                "second" => Half::Second,
                other => {
                    return Err(CliError::Usage(format!(
                        "--half must be 'first' or 'second', got {other:?}"
                    )))
                }
            };
            let bias = region
                .map(|r| -> Result<BiasTarget, CliError> {
                    let region: Region = r.parse().map_err(CliError::Usage)?;
                    Ok(BiasTarget { region, half })
                })
                .transpose()?;
            let mut doc = String::new();
            for k in 0..n {
                let f = sample_random(seed.wrapping_add(k as u64), bias.as_ref())?;
                doc.push_str(&format!("{}\n", fvec_json(&f)));
            }
            emit(&out, &doc)
        }
    }
}
