use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use isoread::generators::{complete, cycle, gen_er, gen_petersen, gen_rook4, gen_shrikhande};
use isoread::harness::{
    bench_er, bench_to_csv, block_sweep, family_graph6, family_pair, run_pair, run_suite,
    suite_pairs, sweep_to_csv, Family, ProtocolConfig, SuiteSpec, DEFAULT_MASTER_SEED,
    DEFAULT_THRESHOLD,
};
use isoread::io::{parse_graph_text, read_features, vector_to_json};
use isoread::readout::{
    apply_readout, bundle_from_decomposition, decompose, ReadoutConfig, ReadoutKind,
};
use isoread::{is_isomorphic, to_graph6_string, wl_equivalent, Graph};

#[derive(Parser)]
#[command(
    name = "isoread",
    version,
    about = "Isotypic graph readouts and WL-hard separation experiments"
)]
struct Cli {
    /// Master seed for suites, pairs and benchmarks.
    #[arg(long, env = "ISOREAD_SEED", global = true, default_value_t = DEFAULT_MASTER_SEED)]
    master_seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print graphs as graph6, one per line.
    Gen(GenArgs),
    /// Compare two graph6 strings under colour refinement and exact isomorphism.
    WlCheck { a: String, b: String },
    /// Automorphisms, pair orbits, eigenvalues and sorted blocks of a graph.
    Decompose(DecomposeArgs),
    /// Read out a feature matrix as a JSON array.
    Readout(ReadoutArgs),
    /// Run the separation protocol on one pair.
    Separate(SeparateArgs),
    /// Run the 33-pair suite.
    Suite(SuiteArgs),
    /// Separated counts of the suite per block budget (CSV).
    Sweep(SweepArgs),
    /// Readout runtime on Erdős-Rényi graphs (CSV).
    BenchEr(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// cycles, cfi-k3, cfi-k4, gm-petersen, srg16, petersen, shrikhande,
    /// rook4, cycle, complete or er.
    name: String,
    /// Cycle half-lengths for `cycles`, or the length for `cycle`.
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    /// Node count for `complete` and `er`.
    #[arg(long)]
    n: Option<usize>,
    /// Edge probability for `er`.
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    /// Seed for `er`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Graph file (graph6 or edge list) or an inline graph6 string.
    #[arg(long)]
    graph: String,
    /// Orbit coefficients in canonical orbit order.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    coeffs: Option<Vec<f64>>,
    /// Seed of random orbit coefficients.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-12)]
    eig_tol: f64,
    #[arg(long, default_value_t = isoread::automorphism::DEFAULT_AUTOMORPHISM_CAP)]
    cap: usize,
}

#[derive(Args)]
struct ReadoutOpts {
    #[arg(long, default_value_t = 16)]
    max_blocks: usize,
    #[arg(long, default_value_t = 8)]
    rp_dim: usize,
    /// Seed of the random projection.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Subtract column means before projecting.
    #[arg(long)]
    center: bool,
    /// Seed of the orbit coefficients.
    #[arg(long, default_value_t = 0)]
    coeff_seed: u64,
}

impl ReadoutOpts {
    fn config(&self) -> ReadoutConfig {
        ReadoutConfig {
            max_blocks: self.max_blocks,
            rp_dim: self.rp_dim,
            seed: self.seed,
            centering: self.center,
            coeff_seed: self.coeff_seed,
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct ReadoutArgs {
    #[arg(long)]
    graph: String,
    /// Feature matrix: headerless CSV, or JSON `{n, d, data: [[row], ...]}` for a `.json` file.
    #[arg(long)]
    features: PathBuf,
    #[arg(long, default_value = "isotypic")]
    kind: ReadoutKind,
    #[command(flatten)]
    opts: ReadoutOpts,
}

#[derive(Args)]
struct ProtocolOpts {
    #[arg(long, default_value = "isotypic")]
    readout: ReadoutKind,
    #[arg(long, default_value_t = 5)]
    seeds: usize,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    #[arg(long, default_value_t = 16)]
    max_blocks: usize,
    #[arg(long, default_value_t = 8)]
    rp_dim: usize,
    #[arg(long)]
    center: bool,
    /// Include wall-clock timings (output is then not reproducible).
    #[arg(long)]
    timings: bool,
}

impl ProtocolOpts {
    fn config(&self, master_seed: u64) -> ProtocolConfig {
        let mut cfg = ProtocolConfig {
            kind: self.readout,
            seeds: self.seeds,
            threshold: self.threshold,
            master_seed,
            ..Default::default()
        };
        cfg.readout.max_blocks = self.max_blocks;
        cfg.readout.rp_dim = self.rp_dim;
        cfg.readout.centering = self.center;
        cfg
    }
}

#[derive(Args)]
struct SeparateArgs {
    /// One of cycles, cfi-k3, cfi-k4, gm-petersen, srg16.
    #[arg(long, conflicts_with = "pair", required_unless_present = "pair")]
    family: Option<Family>,
    /// Two graph files or inline graph6 strings.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pair: Option<Vec<String>>,
    /// Cycle half-length for `--family cycles`.
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[command(flatten)]
    protocol: ProtocolOpts,
}

#[derive(Args)]
struct SuiteArgs {
    /// Write the report here; `.csv` gives one row per pair, anything else JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cycle half-lengths.
    #[arg(long, value_delimiter = ',')]
    cycle_ks: Option<Vec<usize>>,
    #[command(flatten)]
    protocol: ProtocolOpts,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16")]
    blocks: Vec<usize>,
    #[arg(long, default_value = "isotypic")]
    readout: ReadoutKind,
    #[arg(long, default_value_t = 1)]
    seeds: usize,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "16,32,64,128")]
    ns: Vec<usize>,
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    #[arg(long, default_value_t = 50)]
    count: usize,
}

fn load_graph(arg: &str) -> Result<Graph> {
    let path = Path::new(arg);
    if path.exists() {
        return isoread::io::read_graph(path).with_context(|| format!("reading {arg}"));
    }
    parse_graph_text(arg).with_context(|| format!("{arg:?} is neither a file nor a graph6 string"))
}

fn gen(args: &GenArgs) -> Result<Vec<String>> {
    let one = |g: Graph| -> Result<Vec<String>> { Ok(vec![to_graph6_string(&g)?]) };
    let name = args.name.to_ascii_lowercase();
    match name.as_str() {
        "petersen" => one(gen_petersen()),
        "shrikhande" => one(gen_shrikhande()),
        "rook4" => one(gen_rook4()),
        "cycle" => {
            let &[k] = args.k.as_slice() else {
                bail!("cycle needs exactly one --k")
            };
            one(cycle(k)?)
        }
        "complete" => one(complete(args.n.context("complete needs --n")?)),
        "er" => one(gen_er(args.n.context("er needs --n")?, args.p, args.seed)?),
        _ => {
            let family: Family = name.parse()?;
            let ks = if args.k.is_empty() {
                SuiteSpec::default().cycle_ks
            } else {
                args.k.clone()
            };
            Ok(family_graph6(family, &ks)?)
        }
    }
}

fn decompose_json(args: &DecomposeArgs) -> Result<serde_json::Value> {
    let g = load_graph(&args.graph)?;
    let dec = decompose(
        &g,
        args.cap,
        args.coeffs.as_deref(),
        args.seed,
        args.eig_tol,
    )?;
    let bundle = bundle_from_decomposition(&g, &dec, dec.blocks.len().max(1));
    let blocks: Vec<_> = bundle
        .blocks
        .iter()
        .enumerate()
        .map(|(slot, b)| {
            json!({
                "slot": slot,
                "size": b.multiplicity,
                "eigenvalue": b.key.eigenvalue,
                "trace": b.key.trace,
                "trace_laplacian": b.key.trace_laplacian,
                "trace_adjacency": b.key.trace_adjacency,
            })
        })
        .collect();
    Ok(json!({
        "n": g.n(),
        "automorphisms": dec.automorphisms.len(),
        "capped": dec.automorphisms.capped,
        "orbits": dec.orbits.sizes().iter().zip(dec.orbits.representatives())
            .map(|(s, r)| json!({"size": s, "representative": [r.0, r.1]}))
            .collect::<Vec<_>>(),
        "coefficients": dec.coefficients,
        "eigenvalues": dec.eigen.eigenvalues,
        "block_sizes": bundle.blocks.iter().map(|b| b.multiplicity).collect::<Vec<_>>(),
        "blocks": blocks,
    }))
}

fn readout(args: &ReadoutArgs) -> Result<String> {
    let g = load_graph(&args.graph)?;
    let m = read_features(&args.features)
        .with_context(|| format!("reading {}", args.features.display()))?;
    let cfg = args.opts.config();
    let bundle = if args.kind.needs_bundle() {
        Some(isoread::prepare_bundle(&g, &cfg)?)
    } else {
        None
    };
    let z = apply_readout(args.kind, bundle.as_ref(), &m, &cfg)?;
    Ok(vector_to_json(&z)?)
}

fn separate(args: &SeparateArgs, master: u64) -> Result<String> {
    let (a, b) = match (&args.family, &args.pair) {
        (Some(f), _) => family_pair(*f, args.k)?,
        (None, Some(p)) => (load_graph(&p[0])?, load_graph(&p[1])?),
        (None, None) => bail!("give --family or --pair"),
    };
    let cfg = args.protocol.config(master);
    let mut report = run_pair(&a, &b, &cfg, 0)?;
    if let Some(f) = args.family {
        report.family = f.to_string();
        report.id = f.to_string();
    }
    if !args.protocol.timings {
        report.timings = None;
    }
    Ok(serde_json::to_string_pretty(&report)?)
}

fn suite(args: &SuiteArgs, master: u64) -> Result<()> {
    let mut spec = SuiteSpec::default();
    if let Some(ks) = &args.cycle_ks {
        spec.cycle_ks = ks.clone();
    }
    let pairs = suite_pairs(&spec)?;
    let mut report = run_suite(&pairs, &args.protocol.config(master))?;
    if !args.protocol.timings {
        report = report.without_timings();
    }
    match &args.out {
        None => print!("{}", report.table()),
        Some(path) => {
            let is_csv = path
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
            let body = if is_csv {
                report.to_csv()?
            } else {
                serde_json::to_string_pretty(&report)? + "\n"
            };
            std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
            eprint!("{}", report.table());
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()?;
    }
    let master = cli.master_seed;
    match &cli.command {
        Command::Gen(args) => gen(args)?.iter().for_each(|l| println!("{l}")),
        Command::WlCheck { a, b } => {
            let (g, h) = (load_graph(a)?, load_graph(b)?);
            let iso = is_isomorphic(&g, &h).ok();
            let out = json!({ "wl_equivalent": wl_equivalent(&g, &h), "isomorphic": iso });
            println!("{out}");
        }
        Command::Decompose(args) => {
            println!("{}", serde_json::to_string_pretty(&decompose_json(args)?)?)
        }
        Command::Readout(args) => println!("{}", readout(args)?),
        Command::Separate(args) => println!("{}", separate(args, master)?),
        Command::Suite(args) => suite(args, master)?,
        Command::Sweep(args) => {
            let cfg = ProtocolConfig {
                kind: args.readout,
                seeds: args.seeds,
                threshold: args.threshold,
                master_seed: master,
                ..Default::default()
            };
            let pairs = suite_pairs(&SuiteSpec::default())?;
            print!(
                "{}",
                sweep_to_csv(&block_sweep(&pairs, &cfg, &args.blocks)?)?
            );
        }
        Command::BenchEr(args) => {
            let rows = bench_er(
                &args.ns,
                args.p,
                args.count,
                master,
                &ProtocolConfig::default(),
            )?;
            print!("{}", bench_to_csv(&rows)?);
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
