//! `signbal` command-line tool.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error (unreadable or invalid
//! input, bad config), 3 verification failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use signbal::balance::{self, FrustrationMode, FrustrationReport, Target, MAX_EXACT_NODES};
use signbal::dynamics::{self, EltConfig, LatticeMode, Trajectory};
use signbal::generate::{self, LatticeParams, SsbmParams, TreeParams};
use signbal::io::{self, LoadedGraph};
use signbal::spectral;
use signbal::verify::{self, Suite};
use signbal::{Bipartition, SignedGraph};

#[derive(Parser)]
#[command(name = "signbal", version, about = "Balance, spectral measures and dynamics on signed networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Verdict, certificate bipartitions and d_b/d_a of an edge list.
    Classify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Spectral measures plus frustration counts toward balance and antibalance.
    Measure {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Write a synthetic network as an edge list.
    Generate {
        #[arg(value_enum)]
        kind: GenKind,
        /// JSON parameter file.
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a dynamical model and write the trajectory.
    Simulate {
        #[arg(value_enum)]
        model: SimModel,
        #[arg(long)]
        input: PathBuf,
        /// JSON run configuration.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Run built-in self-checks; exits 3 when any check fails.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Ssbm,
    Lattice,
    Tree,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum SimModel {
    Linear,
    Rw,
    Elt,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Spectra,
    Walks,
    Elt,
    All,
}

/// Contents of `simulate --config`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateConfig {
    horizon: usize,
    /// Initial-state spec; see [`initial_state`].
    #[serde(default = "default_init")]
    init: String,
    #[serde(default = "default_l0")]
    l0: f64,
    /// ELT only.
    theta_l: Option<f64>,
    /// ELT only; defaults to the largest edge magnitude.
    alpha: Option<f64>,
    /// ELT only: `general_thresholds[t-1][j]`.
    general_thresholds: Option<Vec<Vec<f64>>>,
    /// Seeding rule for `neighbourhood:<id>`.
    #[serde(default)]
    mode: Option<LatticeMode>,
}

fn default_init() -> String {
    "uniform".into()
}

fn default_l0() -> f64 {
    1.0
}

enum CliError {
    Usage(String),
    Data(String),
    Verification(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

fn data<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(m) | CliError::Data(m) | CliError::Verification(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(e.code())
        }
    }
}

fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Classify { input, output, format } => {
            let loaded = load(&input)?;
            let doc = classify_doc(&loaded)?;
            emit(output.as_deref(), &render(&doc, format))
        }
        Command::Measure { input, output, format } => {
            let loaded = load(&input)?;
            let doc = measure_doc(&loaded)?;
            emit(output.as_deref(), &render(&doc, format))
        }
        Command::Generate { kind, config, seed, output } => {
            let text = read(&config)?;
            let (g, comment) = generate_graph(kind, &text, seed)?;
            emit(output.as_deref(), &io::write_edge_list(&g, &[comment]))
        }
        Command::Simulate { model, input, config, output, format } => {
            let loaded = load(&input)?;
            let cfg: SimulateConfig = serde_json::from_str(&read(&config)?)
                .map_err(|e| CliError::Data(format!("{}: {e}", config.display())))?;
            simulate(model, &loaded.graph, &cfg, output.as_deref(), format)
        }
        Command::Verify { suite, output } => {
            let suite = match suite {
                SuiteArg::Spectra => Suite::Spectra,
                SuiteArg::Walks => Suite::Walks,
                SuiteArg::Elt => Suite::Elt,
                SuiteArg::All => Suite::All,
            };
            let report = verify::run(suite, &verify::default_fixtures());
            let text = serde_json::to_string_pretty(&report).expect("report serialises") + "\n";
            emit(output.as_deref(), &text)?;
            if report.passed {
                Ok(())
            } else {
                let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
                Err(CliError::Verification(format!("failed checks: {}", names.join(", "))))
            }
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<LoadedGraph, CliError> {
    io::read_edge_list(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Data(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// JSON, or `field,value` rows for the scalar fields of a flat object.
fn render(doc: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(doc).expect("values serialise") + "\n",
        Format::Csv => {
            let mut out = String::from("field,value\n");
            if let Value::Object(map) = doc {
                for (k, v) in map {
                    match v {
                        Value::Number(_) | Value::String(_) | Value::Bool(_) => {
                            let s = v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string());
                            out.push_str(&format!("{k},{s}\n"));
                        }
                        _ => {}
                    }
                }
            }
            out
        }
    }
}

fn classify_doc(loaded: &LoadedGraph) -> Result<Value, CliError> {
    let g = &loaded.graph;
    let c = balance::classify(g);
    let m = spectral::strict_unbalance_contraction(g).map_err(data)?;
    Ok(json!({
        "verdict": c.verdict,
        "n": g.n(),
        "edges": g.edge_count(),
        "balanced_partition": c.balanced_partition,
        "antibalanced_partition": c.antibalanced_partition,
        "d_b": m.d_b,
        "d_a": m.d_a,
        "labels": loaded.labels,
    }))
}

fn frustration_doc(g: &SignedGraph, target: Target) -> Result<FrustrationReport, CliError> {
    let mode = if g.n() <= MAX_EXACT_NODES { FrustrationMode::Exact } else { FrustrationMode::Heuristic };
    balance::frustration(g, target, mode).map_err(data)
}

fn measure_doc(loaded: &LoadedGraph) -> Result<Value, CliError> {
    let g = &loaded.graph;
    let c = balance::classify(g);
    let m = spectral::strict_unbalance_contraction(g).map_err(data)?;
    Ok(json!({
        "verdict": c.verdict,
        "d_b": m.d_b,
        "d_a": m.d_a,
        "rho_signed": m.rho_signed,
        "rho_unsigned": m.rho_unsigned,
        "contraction": m.contraction,
        "frustration_balanced": frustration_doc(g, Target::Balanced)?,
        "frustration_antibalanced": frustration_doc(g, Target::Antibalanced)?,
        "labels": loaded.labels,
    }))
}

fn parse_config<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Data(format!("config: {e}")))
}

fn generate_graph(kind: GenKind, text: &str, seed: Option<u64>) -> Result<(SignedGraph, String), CliError> {
    match kind {
        GenKind::Ssbm => {
            let mut p: SsbmParams = parse_config(text)?;
            if let Some(s) = seed {
                p.seed = s;
            }
            Ok((generate::ssbm(&p).map_err(data)?, describe(kind, &p)))
        }
        GenKind::Lattice => {
            let p: LatticeParams = parse_config(text)?;
            if seed.is_some() {
                return Err(CliError::Usage(
                    "--seed applies only to ssbm and tree; set the seed inside a flip_k sign plan".into(),
                ));
            }
            Ok((generate::ring_lattice(&p).map_err(data)?, describe(kind, &p)))
        }
        GenKind::Tree => {
            let mut p: TreeParams = parse_config(text)?;
            if let Some(s) = seed {
                p.seed = s;
            }
            Ok((generate::random_signed_tree(p.n, p.sign_prob, p.seed).map_err(data)?, describe(kind, &p)))
        }
    }
}

/// Comment line recording the generator and its parameters.
fn describe<T: Serialize>(kind: GenKind, p: &T) -> String {
    let name = match kind {
        GenKind::Ssbm => "ssbm",
        GenKind::Lattice => "lattice",
        GenKind::Tree => "tree",
    };
    format!("{name} {}", serde_json::to_string(p).expect("params serialise"))
}

/// Initial-state spec:
///
/// - `uniform`: every node at `l0`
/// - `node:<id>=<v>,<id>=<v>,...`: listed nodes set, others 0
/// - `bipartition`: `±l0` by the balanced certificate, else the antibalanced
///   one, else the bipartition of the nearest balanced structure
/// - `neighbourhood:<id>`: `<id>` at `+l0` and each neighbour at `±l0` by edge
///   sign (`mode` picks the balanced or antibalanced rule)
fn initial_state(g: &SignedGraph, spec: &str, l0: f64, mode: LatticeMode) -> Result<Vec<f64>, CliError> {
    let n = g.n();
    let bad = |m: String| CliError::Data(format!("init `{spec}`: {m}"));
    if spec == "uniform" {
        return Ok(vec![l0; n]);
    }
    if spec == "bipartition" {
        let c = balance::classify(g);
        let b: Bipartition = match (c.balanced_partition, c.antibalanced_partition) {
            (Some(b), _) | (None, Some(b)) => b,
            (None, None) => frustration_doc(g, Target::Balanced)?.partition,
        };
        return Ok(b.as_vector().iter().map(|s| s * l0).collect());
    }
    if let Some(rest) = spec.strip_prefix("neighbourhood:") {
        let center: usize = rest.parse().map_err(|_| bad(format!("invalid node id `{rest}`")))?;
        return dynamics::neighbourhood_seed(g, center, l0, mode).map_err(data);
    }
    if let Some(rest) = spec.strip_prefix("node:") {
        let mut x = vec![0.0; n];
        for item in rest.split(',') {
            let (id, v) =
                item.split_once('=').ok_or_else(|| bad(format!("expected `<id>=<value>`, found `{item}`")))?;
            let id: usize = id.trim().parse().map_err(|_| bad(format!("invalid node id `{id}`")))?;
            let v: f64 = v.trim().parse().map_err(|_| bad(format!("invalid value `{v}`")))?;
            if id >= n {
                return Err(bad(format!("node {id} out of range for n = {n}")));
            }
            x[id] = v;
        }
        return Ok(x);
    }
    Err(bad("expected uniform, bipartition, node:<id>=<v>,... or neighbourhood:<id>".into()))
}

#[derive(Serialize)]
struct SimulationDoc<'a> {
    trajectory: &'a Trajectory,
    #[serde(skip_serializing_if = "Option::is_none")]
    activations: Option<&'a dynamics::ActivationSets>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stationary: Option<Value>,
}

fn sidecar(output: &Path, suffix: &str) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    output.with_file_name(format!("{stem}.{suffix}.json"))
}

fn simulate(
    model: SimModel,
    g: &SignedGraph,
    cfg: &SimulateConfig,
    output: Option<&Path>,
    format: Format,
) -> Result<(), CliError> {
    let mode = cfg.mode.unwrap_or(LatticeMode::Balanced);
    if model != SimModel::Elt && (cfg.theta_l.is_some() || cfg.alpha.is_some() || cfg.general_thresholds.is_some()) {
        return Err(CliError::Data("theta_l, alpha and general_thresholds apply only to elt".into()));
    }
    let (traj, activations, stationary) = match model {
        SimModel::Linear => {
            let x0 = initial_state(g, &cfg.init, cfg.l0, mode)?;
            (dynamics::linear_adjacency_simulate(g, &x0, cfg.horizon).map_err(data)?, None, None)
        }
        SimModel::Rw => {
            let x0 = initial_state(g, &cfg.init, cfg.l0, mode)?;
            let traj = dynamics::random_walk_simulate(g, &x0, cfg.horizon).map_err(data)?;
            let prediction = match dynamics::predict_stationary(g, &x0) {
                Ok(p) => {
                    let at = p.at(cfg.horizon).to_vec();
                    json!({
                        "prediction": p,
                        "final_state": traj.last(),
                        "max_abs_deviation": dynamics::max_abs_diff(traj.last(), &at),
                    })
                }
                Err(e) => json!({ "prediction": null, "reason": e.to_string(), "final_state": traj.last() }),
            };
            (traj, None, Some(prediction))
        }
        SimModel::Elt => {
            let theta_l = cfg.theta_l.ok_or_else(|| CliError::Data("elt needs theta_l".into()))?;
            let alpha = cfg.alpha.unwrap_or_else(|| g.edges().iter().fold(0.0, |m, e| m.max(e.w.abs())));
            let elt = EltConfig {
                theta_l,
                alpha,
                l0: cfg.l0,
                horizon: cfg.horizon,
                general_thresholds: cfg.general_thresholds.clone(),
            };
            let lattice_run = cfg.init.starts_with("neighbourhood:")
                && elt.general_thresholds.is_none()
                && dynamics::lattice_shape(g).is_ok();
            let (traj, sets) = if lattice_run {
                let center: usize = cfg.init["neighbourhood:".len()..]
                    .parse()
                    .map_err(|_| CliError::Data(format!("init `{}`: invalid node id", cfg.init)))?;
                dynamics::elt_lattice_simulate(g, center, &elt, mode).map_err(data)?
            } else {
                let x0 = initial_state(g, &cfg.init, cfg.l0, mode)?;
                dynamics::elt_simulate(g, &x0, &elt).map_err(data)?
            };
            (traj, Some(sets), None)
        }
    };
    match format {
        Format::Json => {
            let doc = SimulationDoc { trajectory: &traj, activations: activations.as_ref(), stationary };
            emit(output, &(serde_json::to_string_pretty(&doc).expect("trajectory serialises") + "\n"))
        }
        Format::Csv => {
            emit(output, &io::trajectory_csv(&traj))?;
            let extras = [
                ("activations", activations.map(|a| serde_json::to_value(a).expect("sets serialise"))),
                ("stationary", stationary),
            ];
            for (suffix, value) in extras {
                if let Some(v) = value {
                    match output {
                        Some(p) => {
                            let path = sidecar(p, suffix);
                            let text = serde_json::to_string_pretty(&v).expect("values serialise") + "\n";
                            fs::write(&path, text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
                        }
                        None => eprintln!("{suffix}: {v}"),
                    }
                }
            }
            Ok(())
        }
    }
}
