use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use nashphase::experiments::{run_sweep, Caps, CountMode, GraphFamily, PGrid, SweepConfig, Z_99};
use nashphase::game::{read_game, sample_game, write_game};
use nashphase::graph::{
    expander_violation, gen_complete, gen_empty, gen_gnp, gen_grid, gen_path, read_graph, write_graph, GnpParams,
};
use nashphase::pne::{count_pne_with, exists_pne, PneOptions};
use nashphase::stein::{eval_r, eval_s, medium_regime_bound, predict_low_connectivity, stein_bounds_exact};
use nashphase::witness::{exposure_search, find_witness, nonexistence_probability_bound, write_certificate};
use nashphase::{Error, Graph, GraphicalGame};

#[derive(Parser)]
#[command(name = "nashphase", version, about = "Pure Nash equilibria of random graphical games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo sweep over a family and an edge-probability grid
    Sweep(SweepArgs),
    /// Count pure Nash equilibria exactly
    Count(GameArgs),
    /// Decide whether a pure Nash equilibrium exists
    Exists(GameArgs),
    /// Look for a d-bounded edge playing indifferent matching pennies
    Witness(WitnessArgs),
    /// Run the vertex-exposure search for an isolated matching-pennies edge
    Expose(GameArgs),
    /// Exact b1, b2 and TV bound of a graph
    Stein(GraphArgs),
    /// Envelopes, regime predictions and non-existence bounds
    Bounds(BoundsArgs),
    /// Decide strong (alpha, delta) expansion
    Expander(ExpanderArgs),
    /// Write a generated graph, or a sampled game on it
    Gen(GenArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Gnp,
    Complete,
    Path,
    Empty,
    Grid,
    File,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exists,
    Count,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Preset {
    High,
    Medium,
    Low,
}

#[derive(Args)]
struct Output {
    /// Output format
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write results here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GraphArgs {
    /// Graph file (first line n, then one "u v" edge per line, 1-based)
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Generate the graph from a family instead
    #[arg(long, value_enum)]
    family: Option<Family>,
    #[arg(short = 'n')]
    n: Option<usize>,
    /// Edge probability for the gnp family
    #[arg(short = 'p')]
    p: Option<f64>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    /// Seed for generated graphs (defaults to --seed where one exists)
    #[arg(long)]
    graph_seed: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct GameArgs {
    /// Game file (graph block followed by "v: bits" table lines)
    #[arg(long, conflicts_with = "graph")]
    game: Option<PathBuf>,
    /// Seed of the sampled game when no --game is given
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    graph: GraphArgs,
}

#[derive(Args)]
struct WitnessArgs {
    #[command(flatten)]
    game: GameArgs,
    /// Only edges whose endpoints have degree at most this (default: max degree)
    #[arg(long)]
    degree_cap: Option<usize>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(short = 'n')]
    n: usize,
    #[arg(short = 'p')]
    p: Option<f64>,
    /// Low-regime constant: p = c / n^2
    #[arg(long)]
    c: Option<f64>,
    /// Graph for the non-existence bounds
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    degree_cap: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ExpanderArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also sample a game on the graph and write the game file
    #[arg(long)]
    game: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value = "gnp")]
    family: Family,
    /// Graph sizes, comma separated
    #[arg(short = 'n', value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    /// Graph file for --family file
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Edge probabilities, comma separated
    #[arg(short = 'p', long = "p-grid", value_delimiter = ',', conflicts_with = "preset")]
    p_grid: Vec<f64>,
    /// Regime preset scaling p with n
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// High preset: p = (2 + eps) ln n / n
    #[arg(long, value_delimiter = ',', default_value = "1")]
    eps: Vec<f64>,
    /// Medium preset: p = beta / n
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    beta: Vec<f64>,
    /// Low preset: p = c / n^2
    #[arg(long, value_delimiter = ',', default_value = "8")]
    c: Vec<f64>,
    /// Reuse one G(n, p) graph drawn from this seed for every trial
    #[arg(long)]
    graph_seed: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "exists")]
    mode: Mode,
    /// Skip trials whose graph has a larger connected component
    #[arg(long, default_value_t = 30)]
    max_component: usize,
    /// z value of the Wilson interval
    #[arg(long, default_value_t = Z_99)]
    wilson_z: f64,
    /// Worker threads (0: one per core); results do not depend on it
    #[arg(long, env = "NASHPHASE_THREADS", default_value_t = 0)]
    threads: usize,
    /// Fill the seconds column with summed trial time
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    output: Output,
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn emit(output: &Output, text: &str) -> Outcome {
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Domain(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::Domain(e.to_string()))
        }
    }
}

fn config_line(config: serde_json::Value) {
    eprintln!("# config: {config}");
}

fn no_csv(output: &Output) -> Outcome {
    if output.format == Format::Csv {
        return Err(usage("--format csv is only available for sweep"));
    }
    Ok(())
}

impl GraphArgs {
    fn describe(&self, seed: Option<u64>) -> serde_json::Value {
        match &self.graph {
            Some(path) => json!({ "graph": path.display().to_string() }),
            None => json!({
                "family": self.family.map(family_name),
                "n": self.n,
                "p": self.p,
                "rows": self.rows,
                "cols": self.cols,
                "graph_seed": self.graph_seed.or(seed),
            }),
        }
    }

    fn load(&self, seed: u64) -> Result<Graph, Failure> {
        if let Some(path) = &self.graph {
            if self.family.is_some() {
                return Err(usage("give either --graph or --family, not both"));
            }
            return Ok(read_graph(&read_file(path)?)?);
        }
        let family = self.family.ok_or_else(|| usage("need --graph FILE or --family"))?;
        let n = || self.n.filter(|&n| n > 0).ok_or_else(|| usage("this family needs -n >= 1"));
        Ok(match family {
            Family::Gnp => {
                let p = self.p.ok_or_else(|| usage("gnp needs -p"))?;
                gen_gnp(&GnpParams::new(n()?, p, self.graph_seed.unwrap_or(seed))?)?
            }
            Family::Complete => gen_complete(n()?),
            Family::Path => gen_path(n()?),
            Family::Empty => gen_empty(n()?),
            Family::Grid => {
                let (r, c) = self.rows.zip(self.cols).ok_or_else(|| usage("grid needs --rows and --cols"))?;
                if r == 0 || c == 0 {
                    return Err(usage("grid needs positive --rows and --cols"));
                }
                gen_grid(r, c)
            }
            Family::File => return Err(usage("--family file needs --graph FILE")),
        })
    }
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Gnp => "gnp",
        Family::Complete => "complete",
        Family::Path => "path",
        Family::Empty => "empty",
        Family::Grid => "grid",
        Family::File => "file",
    }
}

impl GameArgs {
    fn describe(&self) -> serde_json::Value {
        match &self.game {
            Some(path) => json!({ "game": path.display().to_string() }),
            None => json!({ "source": self.graph.describe(Some(self.seed)), "seed": self.seed }),
        }
    }

    fn load(&self) -> Result<GraphicalGame, Failure> {
        match &self.game {
            Some(path) => Ok(read_game(&read_file(path)?)?),
            None => Ok(sample_game(&self.graph.load(self.seed)?, self.seed)?),
        }
    }
}

fn cmd_count(args: &GameArgs) -> Outcome {
    no_csv(&args.graph.output)?;
    config_line(json!({ "command": "count", "input": args.describe() }));
    let game = args.load()?;
    let result = count_pne_with(&game, &PneOptions::count_only())?;
    let text = match args.graph.output.format {
        Format::Json => {
            serde_json::to_string_pretty(&json!({ "z": result.count, "work": result.work })).unwrap() + "\n"
        }
        _ => format!("Z = {}\n", result.count),
    };
    emit(&args.graph.output, &text)
}

fn cmd_exists(args: &GameArgs) -> Outcome {
    no_csv(&args.graph.output)?;
    config_line(json!({ "command": "exists", "input": args.describe() }));
    let game = args.load()?;
    let exists = exists_pne(&game)?;
    let text = match args.graph.output.format {
        Format::Json => serde_json::to_string_pretty(&json!({ "exists": exists })).unwrap() + "\n",
        _ if exists => "PNE exists (Z ≥ 1)\n".to_string(),
        _ => "no PNE (Z = 0)\n".to_string(),
    };
    emit(&args.graph.output, &text)
}

fn emit_witness(output: &Output, game: &GraphicalGame, report: Option<nashphase::witness::WitnessReport>) -> Outcome {
    let text = match (output.format, &report) {
        (Format::Json, _) => serde_json::to_string_pretty(&report).unwrap() + "\n",
        (_, Some(r)) => write_certificate(r, game),
        (_, None) => "no witness found\n".to_string(),
    };
    emit(output, &text)
}

fn cmd_witness(args: &WitnessArgs) -> Outcome {
    no_csv(&args.game.graph.output)?;
    let game = args.game.load()?;
    let d = args.degree_cap.unwrap_or_else(|| game.graph().max_degree());
    config_line(json!({ "command": "witness", "input": args.game.describe(), "degree_cap": d }));
    emit_witness(&args.game.graph.output, &game, find_witness(&game, d))
}

fn cmd_expose(args: &GameArgs) -> Outcome {
    no_csv(&args.graph.output)?;
    config_line(json!({ "command": "expose", "input": args.describe() }));
    let game = args.load()?;
    emit_witness(&args.graph.output, &game, exposure_search(&game))
}

fn cmd_stein(args: &GraphArgs) -> Outcome {
    no_csv(&args.output)?;
    config_line(json!({ "command": "stein", "input": args.describe(Some(0)) }));
    let g = args.load(0)?;
    let s = stein_bounds_exact(&g)?;
    let text = match args.output.format {
        Format::Json => serde_json::to_string_pretty(&s).unwrap() + "\n",
        _ => format!("b1 = {}\nb2 = {}\n2(b1+b2) = {}\n|B_0| = {}\n", s.b1, s.b2, s.tv_bound, s.b0_size),
    };
    emit(&args.output, &text)
}

fn cmd_bounds(args: &BoundsArgs) -> Outcome {
    no_csv(&args.output)?;
    config_line(json!({
        "command": "bounds", "n": args.n, "p": args.p, "c": args.c,
        "graph": args.graph.as_ref().map(|p| p.display().to_string()), "degree_cap": args.degree_cap,
    }));
    let mut fields = serde_json::Map::new();
    if let Some(p) = args.p {
        fields.insert("S".into(), json!(eval_s(args.n, p)?));
        fields.insert("R".into(), json!(eval_r(args.n, p)?));
        if p > 0.0 && p < 1.0 {
            fields.insert("medium_regime_bound".into(), json!(medium_regime_bound(args.n, p)?));
        }
    }
    if let Some(c) = args.c {
        fields.insert("predict_low_connectivity".into(), json!(predict_low_connectivity(args.n, c)?));
        fields.insert("limit_exp_minus_c_over_16".into(), json!((-c / 16.0).exp()));
    }
    if let Some(path) = &args.graph {
        let g = read_graph(&read_file(path)?)?;
        let b = nonexistence_probability_bound(&g, args.degree_cap);
        fields.insert("nonexistence".into(), serde_json::to_value(b).unwrap());
    }
    if fields.is_empty() {
        return Err(usage("bounds needs at least one of -p, --c, --graph"));
    }
    let text = match args.output.format {
        Format::Json => serde_json::to_string_pretty(&fields).unwrap() + "\n",
        _ => {
            let mut out = String::new();
            for (k, v) in &fields {
                match v {
                    serde_json::Value::Object(inner) => {
                        for (ik, iv) in inner {
                            out += &format!("{k}.{ik} = {iv}\n");
                        }
                    }
                    _ => out += &format!("{k} = {v}\n"),
                }
            }
            out
        }
    };
    emit(&args.output, &text)
}

fn cmd_expander(args: &ExpanderArgs) -> Outcome {
    no_csv(&args.graph.output)?;
    config_line(json!({
        "command": "expander", "input": args.graph.describe(Some(args.seed)),
        "alpha": args.alpha, "delta": args.delta,
    }));
    let g = args.graph.load(args.seed)?;
    let violation = expander_violation(&g, args.alpha, args.delta)?;
    let one_based: Option<Vec<usize>> = violation.map(|s| s.into_iter().map(|v| v + 1).collect());
    let text = match (args.graph.output.format, &one_based) {
        (Format::Json, _) => {
            serde_json::to_string_pretty(&json!({ "strong_expander": one_based.is_none(), "violation": one_based }))
                .unwrap()
                + "\n"
        }
        (_, None) => "strong expander: yes\n".to_string(),
        (_, Some(s)) => {
            let list: Vec<String> = s.iter().map(usize::to_string).collect();
            format!("strong expander: no\nviolating set: {}\n", list.join(" "))
        }
    };
    emit(&args.graph.output, &text)
}

fn cmd_gen(args: &GenArgs) -> Outcome {
    if args.graph.output.format != Format::Text {
        return Err(usage("gen writes the text graph or game format only"));
    }
    config_line(
        json!({ "command": "gen", "input": args.graph.describe(Some(args.seed)), "seed": args.seed, "game": args.game }),
    );
    let g = args.graph.load(args.seed)?;
    let text = if args.game { write_game(&sample_game(&g, args.seed)?) } else { write_graph(&g) };
    emit(&args.graph.output, &text)
}

fn cmd_sweep(args: &SweepArgs) -> Outcome {
    let sizes = || {
        if args.n.is_empty() {
            Err(usage("sweep needs -n"))
        } else {
            Ok(args.n.clone())
        }
    };
    let family = match args.family {
        Family::Gnp => GraphFamily::Gnp { n: sizes()? },
        Family::Complete => GraphFamily::Complete { n: sizes()? },
        Family::Path => GraphFamily::Path { n: sizes()? },
        Family::Empty => GraphFamily::Empty { n: sizes()? },
        Family::Grid => {
            let (rows, cols) = args.rows.zip(args.cols).ok_or_else(|| usage("grid needs --rows and --cols"))?;
            GraphFamily::Grid { rows, cols }
        }
        Family::File => {
            let path = args.graph.as_ref().ok_or_else(|| usage("--family file needs --graph FILE"))?;
            GraphFamily::FromFile { path: path.display().to_string(), graph: read_graph(&read_file(path)?)? }
        }
    };
    let p_grid = match args.preset {
        Some(Preset::High) => PGrid::High { eps: args.eps.clone() },
        Some(Preset::Medium) => PGrid::Medium { beta: args.beta.clone() },
        Some(Preset::Low) => PGrid::Low { c: args.c.clone() },
        None if args.p_grid.is_empty() && args.family == Family::Gnp => {
            return Err(usage("gnp sweep needs -p/--p-grid or --preset"))
        }
        None => PGrid::Values { p: args.p_grid.clone() },
    };
    let mode = match args.mode {
        Mode::Exists => CountMode::Exists,
        Mode::Count => CountMode::FullCount,
    };
    let mut config = SweepConfig::new(family, p_grid, args.trials, args.seed, mode);
    config.graph_seed = args.graph_seed;
    config.caps = Caps { max_component: args.max_component };
    config.wilson_z = args.wilson_z;
    config.threads = args.threads;
    config.timing = args.timing;
    config_line(json!({ "command": "sweep", "config": config, "threads": args.threads, "timing": args.timing }));
    let result = run_sweep(&config)?;
    let text = match args.output.format {
        Format::Json => result.to_json() + "\n",
        Format::Csv => result.to_csv(),
        Format::Text => {
            let mut out = String::new();
            for r in &result.points {
                out += &format!(
                    "{} n={} p={} trials={} skips={} P(PNE)={} [{}, {}]",
                    r.family,
                    r.n,
                    r.p.map(|p| p.to_string()).unwrap_or_else(|| "-".into()),
                    r.trials,
                    r.skips,
                    r.p_pne.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into()),
                    r.wilson_lo.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into()),
                    r.wilson_hi.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into()),
                );
                if let (Some(m), Some(tv)) = (r.mean_z, r.tv_poisson1) {
                    out += &format!(" mean_Z={m:.4} tv={tv:.4}");
                }
                out.push('\n');
            }
            out
        }
    };
    emit(&args.output, &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Sweep(a) => cmd_sweep(a),
        Command::Count(a) => cmd_count(a),
        Command::Exists(a) => cmd_exists(a),
        Command::Witness(a) => cmd_witness(a),
        Command::Expose(a) => cmd_expose(a),
        Command::Stein(a) => cmd_stein(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Expander(a) => cmd_expander(a),
        Command::Gen(a) => cmd_gen(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
