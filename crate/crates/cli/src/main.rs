//! `mubkit`: construct and verify mutually unbiased bases and Hadamards.
//!
//! Every subcommand prints a JSON document. Exit status 0 means the checked
//! property holds, 1 that it fails (the document carries a witness), 2 that
//! the input or the arguments were unusable.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use mubkit::constructions::{
    check_planarity, default_planar_function, planar_family, system_from_function, PlanarFamily,
    PlanarityLevel, TorusFunction,
};
use mubkit::field::{prime_power, FiniteField};
use mubkit::flatmat::Phase;
use mubkit::io::{self, SystemData};
use mubkit::lgraph::{self, PairGraph};
use mubkit::mubcheck::{self, BasisSystem, Form};
use mubkit::rds::{planar_to_rds, rds_to_planar, verify_rds};
use mubkit::vector::Vector;
use mubkit::welch::{attains_welch, welch_report};
use mubkit::{Error, FlatMatrix, DEFAULT_TOL};

#[derive(Parser, Debug)]
#[command(name = "mubkit", version, about = "Mutually unbiased bases: construction and exact verification")]
struct Cli {
    /// Arithmetic used by the checks.
    #[arg(long, value_enum, global = true, default_value_t = Backend::Exact)]
    backend: Backend,
    /// Absolute tolerance of the float backend (ignored by the exact one).
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Seed for randomized options.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON document here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Backend {
    Exact,
    Float,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a complete MUB system for a prime power dimension.
    Gen(GenArgs),
    /// Check whether a system of bases is mutually unbiased.
    Verify { file: PathBuf },
    /// Evaluate the Welch bound of order k on all vectors of a system.
    Welch {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: u32,
    },
    /// Build the L-graph (or the weighted K-graph) of a flat matrix.
    Lgraph(LgraphArgs),
    /// Planarity conditions on functions into a torus.
    Planar {
        #[command(subcommand)]
        command: PlanarCommand,
    },
    /// Relative difference sets.
    Rds {
        #[command(subcommand)]
        command: RdsCommand,
    },
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Dimension; must be a prime power.
    #[arg(long)]
    dim: u64,
    /// Use x ↦ x² (odd characteristic).
    #[arg(long, conflicts_with_all = ["even_halfsquare", "family"])]
    odd_square: bool,
    /// Use x ↦ x²/2 (characteristic 2).
    #[arg(long, conflicts_with = "family")]
    even_halfsquare: bool,
    /// Planar family: dembowski-ostrom, coulter-matthews or ding-yuan.
    #[arg(long)]
    family: Option<String>,
    /// Exponent parameter of dembowski-ostrom and coulter-matthews.
    #[arg(long, default_value_t = 0)]
    alpha: u32,
    /// Parameter of ding-yuan.
    #[arg(long, default_value_t = 1)]
    u: u64,
    /// Shift one random entry of one basis by a quarter step (uses --seed);
    /// the output is then deliberately not unbiased.
    #[arg(long)]
    perturb: bool,
}

#[derive(Args, Debug)]
struct LgraphArgs {
    file: PathBuf,
    /// Write a Graphviz rendering here.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Use the weighted K-graph.
    #[arg(long)]
    weighted: bool,
    /// Also compute clique and chromatic numbers.
    #[arg(long)]
    solve: bool,
    /// Vertex cap of the exact solvers.
    #[arg(long, default_value_t = lgraph::DEFAULT_SOLVER_CAP)]
    cap: usize,
    /// Check that this graph and the L-graph of the given Hadamard cover the complete graph.
    #[arg(long)]
    cover: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum PlanarCommand {
    Check {
        file: PathBuf,
        #[arg(long, default_value = "general")]
        condition: String,
    },
}

#[derive(Subcommand, Debug)]
enum RdsCommand {
    Check { file: PathBuf },
    FromPlanar { file: PathBuf },
    ToPlanar {
        file: PathBuf,
        /// Presentation of N, e.g. `2,2`.
        #[arg(long, value_delimiter = ',')]
        n_moduli: Option<Vec<u64>>,
        /// Presentation of K/N.
        #[arg(long, value_delimiter = ',')]
        g_moduli: Option<Vec<u64>>,
    },
}

/// A JSON document and whether the checked property holds.
struct Outcome {
    doc: Value,
    holds: bool,
}

impl Outcome {
    fn new(doc: Value, holds: bool) -> Self {
        Self { doc, holds }
    }
}

fn read_json(path: &Path) -> Result<Value, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    io::parse(&text)
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.backend == Backend::Float && !(cli.tol > 0.0) {
        eprintln!("error: --tol must be positive");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(out) => {
            let text = io::render(&out.doc);
            match &cli.out {
                Some(p) => {
                    if let Err(e) = write_file(p, &text) {
                        eprintln!("error: {e}");
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(if out.holds { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let tol = if cli.backend == Backend::Exact { 0.0 } else { cli.tol };
    match &cli.command {
        Command::Gen(args) => cmd_gen(args, cli.seed),
        Command::Verify { file } => cmd_verify(&io::system_from_json(&read_json(file)?)?, cli.backend, tol),
        Command::Welch { file, k } => cmd_welch(&io::system_from_json(&read_json(file)?)?, *k, cli.backend, tol),
        Command::Lgraph(args) => cmd_lgraph(args, cli.backend, tol),
        Command::Planar { command: PlanarCommand::Check { file, condition } } => {
            let f = io::function_from_json(&read_json(file)?)?;
            let level = PlanarityLevel::parse(condition)?;
            let v = check_planarity(&f, level)?;
            Ok(Outcome::new(
                json!({"condition": level.name(), "holds": v.holds, "witness": v.witness}),
                v.holds,
            ))
        }
        Command::Rds { command } => cmd_rds(command),
    }
}

fn cmd_gen(args: &GenArgs, seed: u64) -> Result<Outcome, Error> {
    let n = args.dim;
    let (p, _) = prime_power(n).filter(|_| n >= 2).ok_or(Error::NotPrimePower(n))?;
    let field = FiniteField::of_order(n)?;
    let (f, construction): (TorusFunction, String) = if let Some(name) = &args.family {
        let family = match name.as_str() {
            "dembowski-ostrom" => PlanarFamily::DembowskiOstrom { alpha: args.alpha },
            "coulter-matthews" => PlanarFamily::CoulterMatthews { alpha: args.alpha },
            "ding-yuan" => PlanarFamily::DingYuan { u: args.u },
            other => return Err(Error::Parameter(format!("unknown family `{other}`"))),
        };
        (planar_family(&field, family)?, name.clone())
    } else if args.odd_square {
        if p == 2 {
            return Err(Error::Parameter("--odd-square needs odd characteristic".into()));
        }
        (TorusFunction::square(&field), "odd-square".into())
    } else if args.even_halfsquare {
        if p != 2 {
            return Err(Error::Parameter("--even-halfsquare needs characteristic 2".into()));
        }
        (TorusFunction::half_square(&field)?, "even-halfsquare".into())
    } else {
        let name = if p == 2 { "even-halfsquare" } else { "odd-square" };
        (default_planar_function(n)?, name.into())
    };
    let system = system_from_function(&f)?;
    let mut doc = io::system_to_json(&system)?;
    doc["construction"] = json!(construction);
    if args.perturb {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = rng.gen_range(1..system.len());
        let (row, col) = (rng.gen_range(0..n as usize), rng.gen_range(0..n as usize));
        let data = io::matrix_from_json(&doc["bases"][basis])?;
        let m = data.to_flat()?;
        let shifted = m.perturbed(row, col, Phase::new(1, 4 * m.nroot() as i64));
        doc["bases"][basis] = io::matrix_to_json(&shifted);
        doc["perturbed"] = json!({"basis": basis, "row": row, "column": col, "seed": seed});
    }
    Ok(Outcome::new(doc, true))
}

fn mub_outcome<V: Vector>(system: &BasisSystem<V>, tol: f64) -> Result<Outcome, Error> {
    match mubcheck::is_mub_system(system, tol) {
        Ok(v) => {
            let holds = v.is_mub;
            Ok(Outcome::new(v.to_json(), holds))
        }
        Err(Error::NotOrthonormal { basis, col_a, col_b }) => Ok(Outcome::new(
            json!({
                "dim": system.dim(),
                "bases": system.len(),
                "is_mub": false,
                "is_complete": false,
                "not_orthonormal": {"basis": basis, "columns": [col_a, col_b]},
            }),
            false,
        )),
        Err(e) => Err(e),
    }
}

fn cmd_verify(data: &SystemData, backend: Backend, tol: f64) -> Result<Outcome, Error> {
    let n = data.bases.first().map_or(0, |b| b.nrows());
    let hadamards = || data.bases.len() == n + 1 && data.form == Form::MuhStandard;
    let (mut out, schur) = match backend {
        Backend::Exact => {
            let out = mub_outcome(&data.exact()?, 0.0)?;
            let schur = if hadamards() {
                let hs: Result<Vec<FlatMatrix>, Error> = data.bases[1..].iter().map(|b| b.to_flat()).collect();
                hs.ok().map(|hs| mubcheck::glavnaja_check(&hs)).transpose()?
            } else {
                None
            };
            (out, schur)
        }
        Backend::Float => {
            let out = mub_outcome(&data.float()?, tol)?;
            let schur = if hadamards() {
                let cols = data.bases[1..].iter().map(|b| b.float_columns()).collect::<Result<Vec<_>, _>>()?;
                Some(mubcheck::glavnaja_check_columns(&cols, tol)?)
            } else {
                None
            };
            (out, schur)
        }
    };
    if let Some(s) = schur {
        out.doc["schur_criterion"] =
            json!({"complete": s.complete, "witness": s.witness.as_ref().map(|w| w.to_json())});
    }
    out.doc["backend"] = json!(if backend == Backend::Exact { "exact" } else { "float" });
    Ok(out)
}

fn cmd_welch(data: &SystemData, k: u32, backend: Backend, tol: f64) -> Result<Outcome, Error> {
    let (mut doc, verdict) = match backend {
        Backend::Exact => {
            let s = data.exact_vectors()?;
            (welch_report(&s, k, 0.0)?.to_json(), attains_welch(&s, k, 0.0)?)
        }
        Backend::Float => {
            let s = data.float_vectors()?;
            (welch_report(&s, k, tol)?.to_json(), attains_welch(&s, k, tol)?)
        }
    };
    doc["wset_attained"] = json!(verdict.attained);
    doc["witness"] = json!(verdict.witness.as_ref().map(|w| w.to_json()));
    let holds = doc["attained"].as_bool().unwrap_or(false) && verdict.attained;
    Ok(Outcome::new(doc, holds))
}

fn graph_of(m: &FlatMatrix, backend: Backend, tol: f64) -> PairGraph {
    match backend {
        Backend::Exact => lgraph::l_graph(m),
        Backend::Float => lgraph::l_graph_float(m, tol),
    }
}

fn cmd_lgraph(args: &LgraphArgs, backend: Backend, tol: f64) -> Result<Outcome, Error> {
    let a = io::matrix_from_json(&read_json(&args.file)?)?.to_flat()?;
    let (graph, dot) = if args.weighted {
        let (g, dot) = match backend {
            Backend::Exact => {
                let k = lgraph::k_graph(&a);
                (k.graph.clone(), k.to_dot("K"))
            }
            Backend::Float => {
                let cols = a.clone().with_normalized(false).float_columns();
                let k = lgraph::k_graph_columns(&cols, tol)?;
                (k.graph.clone(), k.to_dot("K"))
            }
        };
        (g, dot)
    } else {
        let g = graph_of(&a, backend, tol);
        let dot = g.to_dot("L");
        (g, dot)
    };
    if let Some(path) = &args.dot {
        write_file(path, &dot)?;
    }
    let mut doc = json!({
        "graph": if args.weighted { "K" } else { "L" },
        "rows": graph.n(),
        "vertices": graph.order(),
        "edges": graph.edge_count(),
    });
    if args.solve {
        let omega = lgraph::clique_number(&graph, args.cap)?;
        let chi = lgraph::chromatic_number(&graph, args.cap)?;
        doc["clique_number"] = json!(omega);
        doc["chromatic_number"] = json!(chi);
    }
    let mut holds = true;
    if let Some(path) = &args.cover {
        let h = io::matrix_from_json(&read_json(path)?)?.to_flat()?;
        let lh = graph_of(&h, backend, tol);
        let c = lgraph::covers_complete(&graph_of(&a, backend, tol), &lh)?;
        holds = c.covered;
        doc["covers_complete"] = json!(c.covered);
        doc["missing"] = json!(c.missing.iter().take(32).collect::<Vec<_>>());
        doc["missing_count"] = json!(c.missing.len());
    }
    Ok(Outcome::new(doc, holds))
}

fn cmd_rds(command: &RdsCommand) -> Result<Outcome, Error> {
    match command {
        RdsCommand::Check { file } => {
            let d = io::rds_from_json(&read_json(file)?)?;
            let r = verify_rds(&d)?;
            let mut doc = r.to_json();
            doc["params"] = d.params().to_json();
            Ok(Outcome::new(doc, r.valid))
        }
        RdsCommand::FromPlanar { file } => {
            let f = io::function_from_json(&read_json(file)?)?;
            match planar_to_rds(&f) {
                Ok(out) => {
                    let mut doc = io::rds_to_json(&out.rds);
                    doc["structure"] = out.structure.to_json();
                    Ok(Outcome::new(doc, true))
                }
                Err(Error::ConditionViolated { level, witness }) => Ok(Outcome::new(
                    json!({"valid": false, "condition": level, "witness": witness}),
                    false,
                )),
                Err(e) => Err(e),
            }
        }
        RdsCommand::ToPlanar { file, n_moduli, g_moduli } => {
            let d = io::rds_from_json(&read_json(file)?)?;
            match rds_to_planar(&d, n_moduli.as_deref(), g_moduli.as_deref()) {
                Ok(out) => {
                    let mut doc = io::function_to_json(&out.function);
                    doc["structure"] = out.structure.to_json();
                    Ok(Outcome::new(doc, true))
                }
                Err(Error::NotSemiregular(why)) => {
                    Ok(Outcome::new(json!({"valid": false, "reason": why}), false))
                }
                Err(e) => Err(e),
            }
        }
    }
}
