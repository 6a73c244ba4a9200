//! Command-line front end. Every command prints a JSON report (to stdout
//! or `-o`); the process exit code is 0 on success, 1 when a check fails,
//! 2 on bad input and 3 when the position budget runs out.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::arena::{width, Measure, BUDGET_ENV, DEFAULT_BUDGET};
use crate::corpus::{random_digraph, DEFAULT_SEED};
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::families::{full_tree, gen_grk, gen_two_trees, grk_tree_shape};
use crate::parity::{powerset_construct, solve_imperfect, zielonka_solve, ObservationEquiv, ParityGame};
use crate::suites::{run_suite, Suite, SuiteParams, REPORT_SCHEMA};

#[derive(Parser, Debug)]
#[command(name = "pursuitwidth", version, about = "Cops-and-robbers width measures on digraphs")]
pub struct Cli {
    /// Position budget per game solve.
    #[arg(long, global = true, env = BUDGET_ENV, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write the report (or generated file) here instead of stdout.
    #[arg(short = 'o', long = "out", global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute a width measure of an edge-list graph.
    Width {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = MeasureArg::Dw)]
        measure: MeasureArg,
        /// Number of robbers for dw_r and tw_r.
        #[arg(long, default_value_t = 1)]
        r: usize,
    },
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Generate a graph family as an edge list.
    Generate(GenerateArgs),
    /// Solve parity games, possibly with imperfect information.
    Parity {
        #[arg(value_enum)]
        action: ParityAction,
        game: PathBuf,
        /// Observation classes, one per line; identity if omitted.
        obs: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MeasureArg {
    Dw,
    #[value(name = "dw_r")]
    DwR,
    Tw,
    #[value(name = "tw_r")]
    TwR,
    Dpw,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Measure {
        match m {
            MeasureArg::Dw => Measure::Dw,
            MeasureArg::DwR => Measure::DwR,
            MeasureArg::Tw => Measure::Tw,
            MeasureArg::TwR => Measure::TwR,
            MeasureArg::Dpw => Measure::Dpw,
        }
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_parser = parse_suite)]
    pub suite: Suite,
    /// Run on this graph only.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub nmax: usize,
    /// Random 5-vertex graphs added to the corpus.
    #[arg(long, default_value_t = 200)]
    pub random: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Robber counts (repeatable).
    #[arg(long)]
    pub r: Vec<usize>,
    /// Size parameter of the two-tree family.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Number of random parity games.
    #[arg(long, default_value_t = 200)]
    pub games: usize,
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse()
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Family {
    Thm7,
    Grk,
    Tree,
    Cycle,
    Random,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub family: Family,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Edge probability for random graphs.
    #[arg(long, default_value_t = 0.4)]
    pub p: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Emit Graphviz instead of an edge list.
    #[arg(long)]
    pub dot: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ParityAction {
    Solve,
    Powerset,
    SolveImperfect,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn digest(texts: &[&str]) -> String {
    let mut h = Sha256::new();
    for t in texts {
        h.update(t.as_bytes());
        h.update([0]);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn need(v: Option<usize>, flag: &str, family: &str) -> Result<usize> {
    v.ok_or_else(|| Error::Config(format!("{family} needs --{flag}")))
}

/// Output of a command: the report and its exit code, or raw file text.
pub enum Output {
    Report(Value, i32),
    Text(String),
}

pub fn execute(cli: &Cli) -> Result<Output> {
    let start = Instant::now();
    let command_echo: Vec<String> = std::env::args().collect();
    let envelope = |digest: String, results: Value, code: i32| {
        let report = json!({
            "schema": REPORT_SCHEMA,
            "command": command_echo,
            "input_digest": digest,
            "results": results,
            "seconds": start.elapsed().as_secs_f64(),
        });
        Output::Report(report, code)
    };
    match &cli.command {
        Command::Width { graph, measure, r } => {
            let text = read(graph)?;
            let g = Digraph::parse_edge_list(&text)?;
            let value = width(&g, (*measure).into(), *r, cli.budget)?;
            Ok(envelope(digest(&[&text]), json!({ "measure": Measure::from(*measure), "r": r, "vertices": g.n(), "value": value }), 0))
        }
        Command::Verify(a) => {
            let mut params = SuiteParams {
                nmax: a.nmax,
                random: a.random,
                seed: a.seed,
                r: a.r.clone(),
                n: a.n,
                budget: cli.budget,
                parity_games: a.games,
                graph: None,
                trace_out: None,
            };
            let mut texts = Vec::new();
            if let Some(path) = &a.graph {
                let text = read(path)?;
                params.graph = Some(Digraph::parse_edge_list(&text)?);
                texts.push(text);
                if a.suite == Suite::Thm10 {
                    let base = cli.out.clone().unwrap_or_else(|| path.clone());
                    params.trace_out = Some(base.with_extension("trace.jsonl"));
                }
            }
            let report = run_suite(a.suite, &params)?;
            eprintln!("{}", report.summary());
            let code = if report.passed { 0 } else { 1 };
            let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
            Ok(envelope(digest(&refs), serde_json::to_value(&report).expect("serializable"), code))
        }
        Command::Generate(a) => {
            let g = match a.family {
                Family::Thm7 => gen_two_trees(need(a.n, "n", "thm7")?)?.0,
                Family::Grk => gen_grk(need(a.r, "r", "grk")?, need(a.k, "k", "grk")?)?,
                Family::Tree => {
                    let (b, h) = grk_tree_shape(need(a.r, "r", "tree")?);
                    full_tree(b, h)?.0
                }
                Family::Cycle => Digraph::cycle(need(a.n, "n", "cycle")?)?,
                Family::Random => {
                    let n = need(a.n, "n", "random")?;
                    if n > crate::digraph::MAX_VERTICES {
                        return Err(Error::TooLarge(n));
                    }
                    if !(0.0..=1.0).contains(&a.p) {
                        return Err(Error::Config(format!("edge probability {} outside [0, 1]", a.p)));
                    }
                    random_digraph(n, a.p, &mut ChaCha8Rng::seed_from_u64(a.seed))
                }
            };
            Ok(Output::Text(if a.dot { g.emit_dot() } else { g.emit_edge_list() }))
        }
        Command::Parity { action, game, obs } => {
            let text = read(game)?;
            let pg = ParityGame::parse(&text)?;
            let obs_text = obs.as_ref().map(|p| read(p)).transpose()?;
            let eq = match &obs_text {
                Some(t) => ObservationEquiv::parse(pg.n(), t)?,
                None => ObservationEquiv::identity(pg.n()),
            };
            let d = digest(&[&text, obs_text.as_deref().unwrap_or("")]);
            match action {
                ParityAction::Solve => {
                    let (sol, _, _) = zielonka_solve(&pg)?;
                    let results = json!({
                        "winner_from_init": sol.winner[pg.init()],
                        "winner": sol.winner,
                        "player0_actions": sol.actions.iter().map(|a| a.map(|a| pg.actions()[a].clone())).collect::<Vec<_>>(),
                        "player1_moves": sol.moves,
                    });
                    Ok(envelope(d, results, 0))
                }
                ParityAction::Powerset => {
                    let kg = powerset_construct(&pg, &eq)?;
                    let mut out = String::new();
                    for (i, s) in kg.sets.iter().enumerate() {
                        out.push_str(&format!("# {i} = {{{}}}\n", s.to_list()));
                    }
                    out.push_str(&kg.game.emit());
                    Ok(Output::Text(out))
                }
                ParityAction::SolveImperfect => {
                    let res = solve_imperfect(&pg, &eq)?;
                    let code = match &res.verified {
                        Some(Err(_)) => 1,
                        _ => 0,
                    };
                    Ok(envelope(d, serde_json::to_value(&res).expect("serializable"), code))
                }
            }
        }
    }
}

/// Parses arguments, runs the command and writes its output; returns the
/// exit code.
pub fn main_with_args<I: IntoIterator<Item = String>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.unwrap_or(0)).build();
    let result = match pool {
        Ok(pool) => pool.install(|| execute(&cli)),
        Err(e) => Err(Error::Config(format!("cannot start {:?} workers: {e}", cli.jobs))),
    };
    let (text, code) = match result {
        Ok(Output::Report(v, code)) => (serde_json::to_string_pretty(&v).expect("serializable") + "\n", code),
        Ok(Output::Text(t)) => (t, 0),
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return Error::Io(e).exit_code();
    }
    code
}
