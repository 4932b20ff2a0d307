//! The `confpersist` command line.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{build_independence_filtration, critical_radii, delta_check, DEFAULT_BUDGET};
use crate::covering::{build_config_rips, RipsParams};
use crate::error::{Error, Result};
use crate::export::json_number;
use crate::metric::{
    sample_circle, shortest_path_metric, FiniteMetricSpace, Tolerance, WeightedGraph,
};
use crate::obstruction::obstruction_report;
use crate::packing::{max_packing_radius, PackingMode};
use crate::persistence::{barcode_json, compute_persistence};
use crate::regular::{
    is_affine_kr_regular, is_kr_regular, realization_check, Field, SampledMap, DEFAULT_RANK_TOL,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const THREADS_ENV: &str = "CONFPERSIST_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "confpersist",
    version,
    about = "Hard-sphere configuration spaces of finite metric spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(Subcommand, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Export the filtered independence complex (and the configuration-Rips
    /// model with its cocycle when --delta is given).
    Build,
    /// Z/2 barcodes of the independence filtration.
    Persist,
    /// Dimension lower bounds from w1 and its Bockstein.
    Obstruct,
    /// Exhaustive (k,r)-regularity check of a sampled map.
    VerifyRegular,
    /// Maximal packing radius for k points.
    Pack,
    /// Audit of the boundary and inclusion maps.
    DeltaCheck,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Matrix,
    Graph,
    Circle,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldArg {
    Real,
    Complex,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Exact,
    Greedy,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RunConfig {
    /// Metric input: CSV distance matrix or JSON weighted graph.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "matrix", global = true)]
    pub metric: MetricKind,
    /// Sample count for --metric circle.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Circumference for --metric circle.
    #[arg(long, default_value_t = 1.0, global = true)]
    pub length: f64,
    #[arg(long, default_value_t = 2, global = true)]
    pub k: usize,
    #[arg(long, default_value_t = 0.0, global = true)]
    pub r: f64,
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// Comma-separated radii.
    #[arg(long, value_delimiter = ',', global = true)]
    pub r_grid: Vec<f64>,
    #[arg(long, global = true)]
    pub k_max: Option<usize>,
    #[arg(long, default_value_t = 2, global = true)]
    pub t_max: usize,
    /// Relative tolerance for comparisons (rank tolerance for verify-regular).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_BUDGET, global = true)]
    pub budget: u64,
    /// Output directory; results go to stdout when absent.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// CSV of map values for verify-regular.
    #[arg(long, global = true)]
    pub map: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "real", global = true)]
    pub field: FieldArg,
    #[arg(long, value_enum, default_value = "exact", global = true)]
    pub mode: ModeArg,
}

struct Artifact {
    name: &'static str,
    body: String,
}

struct Run<'a> {
    command: Command,
    cfg: &'a RunConfig,
    hash: String,
}

impl Run<'_> {
    fn header(&self) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "tool_version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config_hash": self.hash,
        })
    }

    fn document(&self, result: Value) -> Artifact {
        let mut doc = self.header();
        doc["config"] = serde_json::to_value(self.cfg).expect("config serializes");
        doc["result"] = result;
        Artifact {
            name: self.command.file_name(),
            body: serde_json::to_string_pretty(&doc).expect("json") + "\n",
        }
    }

    fn lines(&self, name: &'static str, kind: &str, lines: Vec<String>) -> Artifact {
        let mut head = self.header();
        head["artifact"] = json!(kind);
        let mut body = head.to_string();
        body.push('\n');
        for l in lines {
            body.push_str(&l);
            body.push('\n');
        }
        Artifact { name, body }
    }
}

impl Command {
    fn file_name(self) -> &'static str {
        match self {
            Command::Build => "build.json",
            Command::Persist => "barcode.json",
            Command::Obstruct => "obstruction.json",
            Command::VerifyRegular => "regularity.json",
            Command::Pack => "packing.json",
            Command::DeltaCheck => "delta_check.json",
        }
    }
}

/// Hash of the effective configuration and the bytes of every input file.
pub fn config_hash(cfg: &RunConfig) -> Result<String> {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(cfg)?);
    for p in [&cfg.input, &cfg.map].into_iter().flatten() {
        h.update(fs::read(p)?);
    }
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

fn tolerance(cfg: &RunConfig) -> Result<Tolerance> {
    match cfg.tol {
        Some(t) => Tolerance::new(t),
        None => Ok(Tolerance::default()),
    }
}

pub fn load_metric(cfg: &RunConfig) -> Result<FiniteMetricSpace> {
    let need_input = || {
        cfg.input
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("--input is required for this metric".into()))
    };
    let tol = tolerance(cfg)?;
    match cfg.metric {
        MetricKind::Matrix => {
            FiniteMetricSpace::from_csv_with_tolerance(fs::File::open(need_input()?)?, tol)
        }
        MetricKind::Graph => Ok(shortest_path_metric(&WeightedGraph::from_json_str(
            &fs::read_to_string(need_input()?)?,
        )?)),
        MetricKind::Circle => {
            let n = cfg.n.ok_or_else(|| {
                Error::InvalidArgument("--n is required for --metric circle".into())
            })?;
            sample_circle(n, cfg.length)
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "--{name} must be a nonnegative number, got {v}"
        )))
    }
}

fn execute(command: Command, cfg: &RunConfig) -> Result<Vec<Artifact>> {
    positive("r", cfg.r)?;
    for &v in &cfg.r_grid {
        positive("r-grid", v)?;
    }
    let run = Run {
        command,
        cfg,
        hash: config_hash(cfg)?,
    };
    let tol = tolerance(cfg)?;
    let x = load_metric(cfg)?;
    let k_max = cfg.k_max.unwrap_or(cfg.k);
    match command {
        Command::Build => {
            let filt = build_independence_filtration(&x, k_max, cfg.budget)?;
            let lines = filt
                .simplices()
                .iter()
                .map(|s| {
                    json!({
                        "verts": s.verts.iter().map(|&i| x.id(i)).collect::<Vec<_>>(),
                        "sep": json_number(s.sep),
                    })
                    .to_string()
                })
                .collect();
            let mut out = vec![run.lines("complex.jsonl", "independence_filtration", lines)];
            let mut summary = json!({
                "points": x.len(),
                "k_max": k_max,
                "simplices": filt.len(),
                "critical_radii": critical_radii(&x).into_iter().map(json_number).collect::<Vec<_>>(),
            });
            if let Some(delta) = cfg.delta {
                let grid = if cfg.r_grid.is_empty() {
                    vec![cfg.r.max(delta)]
                } else {
                    cfg.r_grid.clone()
                };
                let (model, g) = build_config_rips(
                    &x,
                    cfg.k,
                    delta,
                    &grid,
                    RipsParams {
                        dim_cap: (cfg.t_max + 1).max(2),
                        budget: cfg.budget,
                        tol,
                    },
                )?;
                let id = |v: usize| g.config_id(&x, v);
                let rips = model
                    .complex
                    .simplices()
                    .iter()
                    .map(|s| {
                        json!({
                            "verts": s.verts.iter().map(|&v| id(v)).collect::<Vec<_>>(),
                            "sep": json_number(s.sep),
                        })
                        .to_string()
                    })
                    .collect();
                out.push(run.lines("config_rips.jsonl", "config_rips_complex", rips));
                out.push(run.lines("cocycle.jsonl", "covering_cocycle", g.to_json_lines(&x)));
                summary["config_rips"] = json!({
                    "k": cfg.k,
                    "delta": delta,
                    "vertices": model.configurations.len(),
                    "simplices": model.complex.len(),
                    "excluded_triangles": model
                        .excluded_triangles
                        .iter()
                        .map(|t| t.iter().map(|&v| id(v)).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                });
            }
            out.push(run.document(summary));
            Ok(out)
        }
        Command::Persist => {
            let filt = build_independence_filtration(&x, k_max, cfg.budget)?;
            let barcode = compute_persistence(&filt, k_max.saturating_sub(1))?;
            Ok(vec![run.document(json!({
                "k_max": k_max,
                "intervals": barcode_json(&barcode),
            }))])
        }
        Command::Obstruct => {
            let delta = cfg
                .delta
                .ok_or_else(|| Error::InvalidArgument("--delta is required for obstruct".into()))?;
            let rep = obstruction_report(
                &x,
                cfg.k,
                cfg.r,
                delta,
                &cfg.r_grid,
                cfg.t_max,
                cfg.budget,
                tol,
            )?;
            Ok(vec![run.document(serde_json::to_value(rep)?)])
        }
        Command::VerifyRegular => {
            let path = cfg.map.as_ref().ok_or_else(|| {
                Error::InvalidArgument("--map is required for verify-regular".into())
            })?;
            let field = match cfg.field {
                FieldArg::Real => Field::Real,
                FieldArg::Complex => Field::Complex,
            };
            let f = SampledMap::from_csv(x, field, fs::File::open(path)?)?;
            let rank_tol = cfg.tol.unwrap_or(DEFAULT_RANK_TOL);
            let linear = is_kr_regular(&f, cfg.k, cfg.r, rank_tol, cfg.budget)?;
            let mut result = json!({
                "field": field,
                "dimension": f.dimension(),
                "linear": linear,
            });
            if field == Field::Real {
                result["affine"] = serde_json::to_value(is_affine_kr_regular(
                    &f, cfg.k, cfg.r, rank_tol, cfg.budget,
                )?)?;
                result["realization"] = serde_json::to_value(realization_check(
                    &f, cfg.k, cfg.r, rank_tol, cfg.budget,
                )?)?;
            }
            Ok(vec![run.document(result)])
        }
        Command::Pack => {
            let mode = match cfg.mode {
                ModeArg::Exact => PackingMode::Exact,
                ModeArg::Greedy => PackingMode::Greedy,
            };
            let p = max_packing_radius(&x, cfg.k, mode, cfg.budget, cfg.seed)?;
            Ok(vec![run.document(p.to_json(&x))])
        }
        Command::DeltaCheck => {
            let radii = if cfg.r_grid.is_empty() {
                critical_radii(&x)
            } else {
                cfg.r_grid.clone()
            };
            let rep = delta_check(&x, k_max, &radii, tol, cfg.budget)?;
            let passed = rep.passed();
            let mut v = serde_json::to_value(rep)?;
            v["passed"] = json!(passed);
            Ok(vec![run.document(v)])
        }
    }
}

fn write_artifacts(out: Option<&Path>, artifacts: &[Artifact]) -> Result<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            for a in artifacts {
                fs::write(dir.join(a.name), &a.body)?;
            }
        }
        None => {
            if let Some(a) = artifacts.last() {
                print!("{}", a.body);
            }
        }
    }
    Ok(())
}

pub fn error_json(e: &Error) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "error": {"kind": e.kind(), "message": e.to_string()},
    })
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

/// Runs one command; returns the process exit code.
pub fn dispatch(cli: &Cli) -> i32 {
    configure_threads();
    let result = execute(cli.command, &cli.config)
        .and_then(|arts| write_artifacts(cli.config.out.as_deref(), &arts));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let body = serde_json::to_string_pretty(&error_json(&e)).expect("json");
            eprintln!("{body}");
            if let Some(dir) = &cli.config.out {
                let _ = fs::create_dir_all(dir)
                    .and_then(|_| fs::write(dir.join("error.json"), body + "\n"));
            }
            1
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(&cli),
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            code
        }
    }
}
