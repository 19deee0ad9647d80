//! `clustered`: command-line front end. Results go to stdout as JSON (TSV for
//! `table`), diagnostics to stderr.
//!
//! Exit codes: 0 success / certified / bound met, 1 refuted / witness found /
//! invalid input object, 2 usage or input error, 3 budget or cap exceeded,
//! 4 internal invariant violation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use clustered::constructions::{cary_tower, disjoint_copies, gi_chain};
use clustered::constructions::path_clique;
use clustered::engine::{certify, find_ratio, refute_with_cap, CertifyOutcome, Ratio, RefuteOutcome, PROFILE_CAP};
use clustered::greedy::{
    c2_guarantee, clustered_c2_tokens, clustered_general, clustered_k1, general_guarantee, k1_guarantee,
};
use clustered::model::{model_violations, random_ktree, recognize_tw2, two_tree_to_model, AnyModel};
use clustered::oracle::{alpha_exact_bruteforce, alpha_exact_treedp, BRUTE_FORCE_MAX_N, DEFAULT_NODE_BUDGET};
use clustered::{Error, Graph, KTreeModel};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "clustered", version, about = "Large c-clustered sets in graphs of bounded treewidth")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a graph from one of the extremal families, or a random k-tree.
    Generate(GenerateArgs),
    /// Exact value or constructive bound for alpha_c.
    #[command(subcommand)]
    Alpha(AlphaCommand),
    /// Search for a closure certificate of x_{2,c} >= P/Q.
    Certify(CertifyArgs),
    /// Search for a 2-tree with alpha_c / n < P/Q.
    Refute(RefuteArgs),
    /// Largest certifiable ratio with denominator at most --max-q.
    FindRatio(FindRatioArgs),
    /// Certified ratios for a range of c, as TSV.
    Table(TableArgs),
    /// Check that a vertex set is c-clustered in a graph.
    VerifySet(VerifySetArgs),
    /// Check that a k-tree model explains every edge of a graph.
    ValidateModel(ValidateModelArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    CaryTower,
    PathClique,
    GiChain,
    RandomKtree,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: FamilyName,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    c: Option<usize>,
    #[arg(long)]
    i: Option<usize>,
    /// Vertex count (random-ktree only).
    #[arg(long)]
    n: Option<usize>,
    /// Required for random-ktree.
    #[arg(long)]
    seed: Option<u64>,
    /// Disjoint copies of the generated graph.
    #[arg(long)]
    copies: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Subcommand)]
enum AlphaCommand {
    /// Exact alpha_c with a witness set.
    Exact(AlphaExactArgs),
    /// Constructive lower bound from a model.
    Bound(AlphaBoundArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Brute,
    Treedp,
}

#[derive(Args)]
struct AlphaExactArgs {
    #[arg(long)]
    c: usize,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    model: Option<PathBuf>,
    /// Defaults to treedp when a model is given or the graph has treewidth 2, brute otherwise.
    #[arg(long, value_enum)]
    engine: Option<Engine>,
    /// Node budget for the brute-force search.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    General,
    K1,
    C2,
}

#[derive(Args)]
struct AlphaBoundArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    /// Cluster cap; must be 2 (or omitted) for c2.
    #[arg(long)]
    c: Option<usize>,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    c: usize,
    #[arg(long)]
    ratio: Ratio,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RefuteArgs {
    #[arg(long)]
    c: usize,
    #[arg(long)]
    ratio: Ratio,
    #[arg(long, default_value_t = 40)]
    max_n: usize,
    /// Cap on profiles kept by the exhaustive search.
    #[arg(long, default_value_t = PROFILE_CAP)]
    max_profiles: usize,
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct FindRatioArgs {
    #[arg(long)]
    c: usize,
    #[arg(long)]
    max_q: i64,
    /// Also try to refute the next ratio above the result, with witnesses up to this size.
    #[arg(long)]
    refute_max_n: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    c_from: usize,
    #[arg(long)]
    c_to: usize,
    #[arg(long, default_value_t = 30)]
    max_q: i64,
}

#[derive(Args)]
struct VerifySetArgs {
    #[arg(long)]
    c: usize,
    #[arg(long)]
    graph: PathBuf,
    /// A JSON array of vertices, or an object with a "set" or "witness" array.
    #[arg(long)]
    set: PathBuf,
}

#[derive(Args)]
struct ValidateModelArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    model: PathBuf,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Cap(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded(_) => Failure::Cap(e.to_string()),
            Error::InvariantViolation(_) => Failure::Internal(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    Ok(Graph::from_json_str(&read(path)?)?)
}

fn read_model(path: &Path) -> Result<AnyModel, Failure> {
    Ok(AnyModel::from_json_str(&read(path)?)?)
}

/// Output paths must have an existing parent directory; checked before any computation.
fn check_out(path: Option<&PathBuf>) -> Result<(), Failure> {
    if let Some(p) = path {
        let parent = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        if !parent.is_dir() {
            return Err(Failure::Usage(format!("output directory {} does not exist", parent.display())));
        }
    }
    Ok(())
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn emit<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string(value).expect("outputs serialize"));
}

fn require(name: &str, v: Option<usize>) -> Result<usize, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("--{name} is required for this family")))
}

fn generate(a: &GenerateArgs) -> Outcome {
    for p in [Some(&a.out), a.model.as_ref(), a.dot.as_ref()] {
        check_out(p)?;
    }
    let (mut g, mut m, name) = match a.family {
        FamilyName::CaryTower => {
            let (g, m) = cary_tower(require("k", a.k)?, require("c", a.c)?)?;
            (g, m, "cary_tower")
        }
        FamilyName::PathClique => {
            let (g, m) = path_clique(require("k", a.k)?, require("c", a.c)?)?;
            (g, m, "path_clique")
        }
        FamilyName::GiChain => {
            let (g, t) = gi_chain(require("i", a.i)?)?;
            (g, two_tree_to_model(&t), "gi_chain")
        }
        FamilyName::RandomKtree => {
            let seed = a.seed.ok_or_else(|| Failure::Usage("--seed is required for random-ktree".into()))?;
            let (g, m) = random_ktree(require("k", a.k)?, require("n", a.n)?, seed)?;
            (g, m, "random_ktree")
        }
    };
    if let Some(copies) = a.copies {
        (g, m) = disjoint_copies(&g, &m, copies)?;
    }
    write(&a.out, &g.to_json_string())?;
    if let Some(p) = &a.model {
        write(p, &m.to_json_string())?;
    }
    if let Some(p) = &a.dot {
        write(p, &g.to_dot(&[]))?;
    }
    emit(&json!({"family": name, "n": g.n(), "edges": g.edge_count(), "k": m.k()}));
    Ok(0)
}

fn alpha_exact(a: &AlphaExactArgs) -> Outcome {
    check_out(a.dot.as_ref())?;
    let g = read_graph(&a.graph)?;
    let model: Option<KTreeModel> = a.model.as_deref().map(read_model).transpose()?.map(AnyModel::into_model);
    let engine = a.engine.unwrap_or(if model.is_some() || g.n() > BRUTE_FORCE_MAX_N { Engine::Treedp } else { Engine::Brute });
    let res = match engine {
        Engine::Brute => alpha_exact_bruteforce(&g, a.c, a.budget)?,
        Engine::Treedp => match model {
            Some(m) => alpha_exact_treedp(&m, &g, a.c)?,
            None => {
                let t = recognize_tw2(&g).map_err(|e| {
                    Failure::Usage(format!("{e}; pass --model for graphs of larger treewidth"))
                })?;
                alpha_exact_treedp(&two_tree_to_model(&t), &g, a.c)?
            }
        },
    };
    if let Some(p) = &a.dot {
        write(p, &g.to_dot(&res.witness))?;
    }
    emit(&res);
    if !res.exact {
        eprintln!("node budget exhausted; alpha is only a lower bound");
        return Ok(3);
    }
    Ok(0)
}

fn alpha_bound(a: &AlphaBoundArgs) -> Outcome {
    check_out(a.dot.as_ref())?;
    let g = read_graph(&a.graph)?;
    let m = read_model(&a.model)?.into_model();
    let (n, k) = (g.n(), m.k());
    let (set, c, formula, bound) = match a.algo {
        Algo::General | Algo::K1 => {
            let c = a.c.ok_or_else(|| Failure::Usage("--c is required".into()))?;
            if matches!(a.algo, Algo::General) {
                (clustered_general(&m, &g, c)?, c, format!("ceil({c}*{n}/({k}+{c}+1))"), general_guarantee(n, k, c))
            } else {
                (clustered_k1(&m, &g, c)?, c, format!("ceil({c}*{n}/({c}+1))"), k1_guarantee(n, c))
            }
        }
        Algo::C2 => {
            if a.c.is_some_and(|c| c != 2) {
                return Err(Failure::Usage("the c2 algorithm needs --c 2".into()));
            }
            let out = clustered_c2_tokens(&m, &g)?;
            (out.set, 2, format!("ceil(2*{n}/({k}+2))"), c2_guarantee(n, k))
        }
    };
    if let Some(p) = &a.dot {
        write(p, &g.to_dot(set.vertices()))?;
    }
    emit(&json!({"size": set.len(), "set": set.vertices(), "c": c, "guarantee": formula, "bound": bound}));
    Ok(if set.len() >= bound { 0 } else { 4 })
}

fn certify_cmd(a: &CertifyArgs) -> Outcome {
    check_out(a.out.as_ref())?;
    match certify(a.c, a.ratio)? {
        CertifyOutcome::Certified(cert) => {
            let text = cert.to_json_string();
            if let Some(p) = &a.out {
                write(p, &text)?;
            }
            println!("{text}");
            eprintln!("certified x_2,{} >= {} with {} types", a.c, a.ratio, cert.types.len());
            Ok(0)
        }
        CertifyOutcome::Failed(f) => {
            emit(&json!({"certified": false, "c": a.c, "ratio": a.ratio.to_string(), "failure": f.seed, "types": f.types.len()}));
            eprintln!("no certificate found; try `refute` for a witness");
            Ok(1)
        }
    }
}

fn refute_cmd(a: &RefuteArgs) -> Outcome {
    check_out(a.dot.as_ref())?;
    match refute_with_cap(a.c, a.ratio, a.max_n, a.max_profiles)? {
        RefuteOutcome::Witness(w) => {
            if let Some(p) = &a.dot {
                let g = w.two_tree.graph();
                let best = alpha_exact_treedp(&two_tree_to_model(&w.two_tree), &g, a.c)?;
                write(p, &g.to_dot(&best.witness))?;
            }
            emit(&json!({"outcome": "witness", "c": a.c, "ratio": a.ratio.to_string(), "witness": w}));
            Ok(1)
        }
        RefuteOutcome::NotFound { reason } => {
            emit(&json!({"outcome": "not_found", "c": a.c, "ratio": a.ratio.to_string(), "reason": reason}));
            Ok(0)
        }
    }
}

fn find_ratio_cmd(a: &FindRatioArgs) -> Outcome {
    check_out(a.out.as_ref())?;
    let Some(found) = find_ratio(a.c, a.max_q)? else {
        emit(&json!({"c": a.c, "max_q": a.max_q, "best": null}));
        return Ok(1);
    };
    let successor = found.best.farey_successor(a.max_q);
    let witness = match (a.refute_max_n, successor) {
        (Some(max_n), Some(s)) => match refute_with_cap(a.c, s, max_n, PROFILE_CAP)? {
            RefuteOutcome::Witness(w) => Some(serde_json::to_value(&w).expect("witness serializes")),
            RefuteOutcome::NotFound { reason } => {
                eprintln!("successor {s} not refuted: {reason}");
                None
            }
        },
        _ => None,
    };
    if let Some(p) = &a.out {
        write(p, &found.certificate.to_json_string())?;
    }
    emit(&json!({
        "c": a.c,
        "best": found.best.to_string(),
        "frontier": found.frontier.map(|r| r.to_string()),
        "successor": successor.map(|r| r.to_string()),
        "probes": found.probes.iter().map(|(r, ok)| json!([r.to_string(), ok])).collect::<Vec<_>>(),
        "certificate": found.certificate,
        "witness": witness,
    }));
    Ok(0)
}

fn table(a: &TableArgs) -> Outcome {
    if a.c_from < 2 || a.c_to < a.c_from {
        return Err(Failure::Usage("need 2 <= --c-from <= --c-to".into()));
    }
    let rows: Vec<Result<String, Error>> = std::thread::scope(|s| {
        let handles: Vec<_> = (a.c_from..=a.c_to)
            .map(|c| {
                s.spawn(move || {
                    Ok(match find_ratio(c, a.max_q)? {
                        Some(f) => format!("{c}\t{}\t{}\t{}", f.best, f.certificate.types.len(), f.probes.len()),
                        None => format!("{c}\t-\t0\t0"),
                    })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker thread")).collect()
    });
    println!("c\tratio\ttypes\tprobes");
    for row in rows {
        println!("{}", row?);
    }
    Ok(0)
}

fn verify_set(a: &VerifySetArgs) -> Outcome {
    let g = read_graph(&a.graph)?;
    let text = read(&a.set)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("bad set file: {e}")))?;
    let list = match &value {
        serde_json::Value::Array(_) => &value,
        serde_json::Value::Object(o) => ["set", "witness", "vertices"]
            .iter()
            .find_map(|k| o.get(*k))
            .ok_or_else(|| Failure::Usage("set object needs a \"set\" array".into()))?,
        _ => return Err(Failure::Usage("set file must hold an array or an object".into())),
    };
    let mut set: Vec<usize> =
        serde_json::from_value(list.clone()).map_err(|e| Failure::Usage(format!("bad vertex list: {e}")))?;
    set.sort_unstable();
    if set.windows(2).any(|w| w[0] == w[1]) {
        return Err(Failure::Usage("vertex listed twice".into()));
    }
    if a.c == 0 {
        return Err(Error::ZeroClusterCap.into());
    }
    let largest = g.max_component_size(&set)?;
    let valid = largest <= a.c;
    emit(&json!({"valid": valid, "size": set.len(), "largest_component": largest, "c": a.c}));
    Ok(if valid { 0 } else { 1 })
}

fn validate_model_cmd(a: &ValidateModelArgs) -> Outcome {
    let g = read_graph(&a.graph)?;
    let m = read_model(&a.model)?.into_model();
    let bad = model_violations(&m, &g)?;
    emit(&json!({"valid": bad.is_empty(), "k": m.k(), "violations": bad}));
    Ok(if bad.is_empty() { 0 } else { 1 })
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Alpha(AlphaCommand::Exact(a)) => alpha_exact(a),
        Command::Alpha(AlphaCommand::Bound(a)) => alpha_bound(a),
        Command::Certify(a) => certify_cmd(a),
        Command::Refute(a) => refute_cmd(a),
        Command::FindRatio(a) => find_ratio_cmd(a),
        Command::Table(a) => table(a),
        Command::VerifySet(a) => verify_set(a),
        Command::ValidateModel(a) => validate_model_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(4)
        }
    }
}
