use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use monodromy::braid::{self, MonodromyTuple};
use monodromy::fixtures::{self, Fixture};
use monodromy::poisson::Case;
use monodromy::relations::RFamily;
use monodromy::suites::{self, Options, Suite};

#[derive(Parser)]
#[command(name = "monodromy", version, about = "Exact verification of monodromy-data algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite.
    Verify {
        /// rmatrix, quantum-relations, positivity, poisson-tables, jacobi,
        /// casimirs, ranks, braid-ihx, flips, reduction or all
        suite: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
        /// Restrict Poisson suites to one configuration, e.g. S013.
        #[arg(long)]
        case: Option<String>,
        /// Fixture JSON used instead of the bundled surfaces.
        #[arg(long)]
        surface: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        /// Also test ranks at a randomly rescaled point.
        #[arg(long)]
        seed: Option<u64>,
        /// Include per-check wall-clock times.
        #[arg(long)]
        timing: bool,
    },
    /// Summarize a fixture: generators, commutators, words and arc ends.
    Describe {
        /// Bundled fixture id or path to a fixture JSON file.
        fixture: String,
    },
    /// Apply a braid word to closed arcs at one cusp and re-verify.
    Braid {
        fixture: String,
        /// Arcs in thread order, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        arcs: Vec<String>,
        /// Generator indices j (for B_j), applied left to right.
        #[arg(long, value_delimiter = ',', required = true)]
        word: Vec<usize>,
    },
}

fn load_fixture(arg: &str) -> Result<Fixture, String> {
    let p = Path::new(arg);
    let r = if arg.ends_with(".json") || p.exists() { Fixture::from_path(p) } else { fixtures::load(arg) };
    r.map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Checks,
}

fn run(cli: Cli) -> Result<(), Failure> {
    let usage = Failure::Usage;
    match cli.command {
        Command::Verify { suite, k, s, case, surface, format, out, jobs, seed, timing } => {
            let suite: Suite = suite.parse().map_err(|e: suites::SuiteError| usage(e.to_string()))?;
            let case = case.map(|c| c.parse::<Case>()).transpose().map_err(|e| usage(e.to_string()))?;
            let surface = surface.map(|p| Fixture::from_path(&p)).transpose().map_err(|e| usage(e.to_string()))?;
            if let Some(n) = jobs {
                rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| usage(e.to_string()))?;
            }
            let opts = Options { k, s, case, surface, seed, timing };
            let report = suites::run_suite(suite, &opts).map_err(|e| usage(e.to_string()))?;
            let text = match format {
                Format::Text => report.render_text(),
                Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
            };
            match out {
                Some(path) => std::fs::write(&path, text).map_err(|e| usage(format!("{}: {e}", path.display())))?,
                None => print!("{text}"),
            }
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
        Command::Describe { fixture } => {
            let fx = load_fixture(&fixture).map_err(usage)?;
            print!("{}", suites::describe(&fx));
            Ok(())
        }
        Command::Braid { fixture, arcs, word } => {
            let fx = load_fixture(&fixture).map_err(usage)?;
            if let Some(a) = arcs.iter().find(|a| !fx.arcs.contains_key(*a)) {
                return Err(usage(format!("fixture {} has no arc `{a}`", fx.id)));
            }
            let names: Vec<&str> = arcs.iter().map(String::as_str).collect();
            let quantum = MonodromyTuple::quantum(&fx, &names);
            let moved = braid::braid_word(&word, &quantum).map_err(|e| usage(e.to_string()))?;
            let r = RFamily::kulish_sklyanin(2).expect("k = 2");
            let mut ok = true;
            match braid::verify_tuple(&moved, &r) {
                Ok(None) => println!("relations after {word:?}: pass"),
                Ok(Some(f)) => {
                    ok = false;
                    println!("relations after {word:?}: fail, {f}");
                }
                Err(e) => return Err(usage(e.to_string())),
            }
            let classical = MonodromyTuple::classical(&fx, &names).map_err(|e| usage(e.to_string()))?;
            let before = braid::trace_multiset(&classical, 2);
            let after = braid::braid_word(&word, &classical).map(|t| braid::trace_multiset(&t, 2)).map_err(|e| usage(e.to_string()))?;
            let same = before == after;
            ok &= same;
            println!("trace multiset preserved: {}", if same { "pass" } else { "fail" });
            if ok {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
