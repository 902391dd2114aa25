//! Command-line front end.
//!
//! Exit codes: 0 success, 1 result mismatch (or no counterexample found),
//! 2 usage or invalid parameters, 3 unreadable or malformed input.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dataset::{parse_query_terms, read_dataset, read_query, write_dataset, Fixture};
use crate::engine::{format_table, rstknn_query, to_json_lines, Mode};
use crate::error::{Error, Result};
use crate::generate::{generate_dataset, InstanceConfig, MAX_VOCAB};
use crate::object::{Point, QueryObject, StObject};
use crate::oracle::{counterexample_search, rknn_bruteforce_tree};
use crate::similarity::SimParams;
use crate::tree::{IurTree, DEFAULT_FANOUT};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "rstknn",
    version,
    about = "Reverse spatio-textual k-nearest-neighbor queries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a seeded random JSON-lines dataset.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of objects.
        #[arg(long)]
        n: usize,
        /// Vocabulary size (at most 8).
        #[arg(long, default_value_t = MAX_VOCAB)]
        vocab: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a query and print the result ids.
    Query {
        #[command(flatten)]
        input: QueryInput,
        #[arg(long, value_enum, default_value_t = QueryMode::Correct)]
        mode: QueryMode,
        /// Print the step-by-step trace table.
        #[arg(long)]
        trace: bool,
        /// Also write the trace as JSON lines to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every mode and report each one's difference from brute force.
    Compare {
        #[command(flatten)]
        input: QueryInput,
    },
    /// Search random instances for one where a mode disagrees with brute force.
    Search {
        #[arg(long, value_enum)]
        mode: QueryMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        trials: u64,
        /// Directory to write the fixture into.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct QueryInput {
    /// JSON-lines dataset.
    #[arg(long, required_unless_present = "fixture")]
    data: Option<PathBuf>,
    /// Query x coordinate.
    #[arg(long, allow_hyphen_values = true, required_unless_present_any = ["query_file", "fixture"])]
    qx: Option<f64>,
    /// Query y coordinate.
    #[arg(long, allow_hyphen_values = true, required_unless_present_any = ["query_file", "fixture"])]
    qy: Option<f64>,
    /// Query terms as `t1=2,t2=5`.
    #[arg(long, default_value = "")]
    qterms: String,
    /// Query as JSON: {"x": .., "y": .., "terms": {..}}.
    #[arg(long, conflicts_with_all = ["qx", "qy", "qterms"])]
    query_file: Option<PathBuf>,
    /// Neighbor rank.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Weight of spatial proximity, in [0, 1].
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_FANOUT)]
    fanout: usize,
    /// Fixture directory supplying dataset, query, parameters and an
    /// optional tree layout.
    #[arg(
        long,
        conflicts_with_all = ["data", "qx", "qy", "qterms", "query_file", "k", "alpha", "fanout"]
    )]
    fixture: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum QueryMode {
    Correct,
    Faulty2011,
    Faulty2014,
    Oracle,
}

impl QueryMode {
    fn engine(self) -> Option<Mode> {
        match self {
            QueryMode::Correct => Some(Mode::Correct),
            QueryMode::Faulty2011 => Some(Mode::Faulty2011),
            QueryMode::Faulty2014 => Some(Mode::Faulty2014),
            QueryMode::Oracle => None,
        }
    }
}

struct Loaded {
    tree: IurTree,
    query: QueryObject,
    params: SimParams,
}

fn load(input: &QueryInput) -> Result<Loaded> {
    if let Some(dir) = &input.fixture {
        let fixture = Fixture::read_dir(dir)?;
        return Ok(Loaded {
            tree: fixture.tree()?,
            query: fixture.query,
            params: fixture.params,
        });
    }
    let params = SimParams::new(input.alpha, input.k)?;
    let data = input
        .data
        .as_ref()
        .expect("clap requires --data without --fixture");
    let objects = read_dataset(data)?;
    let query = match &input.query_file {
        Some(path) => read_query(path)?,
        None => {
            let (x, y) = (input.qx.unwrap_or_default(), input.qy.unwrap_or_default());
            if !(x.is_finite() && y.is_finite()) {
                return Err(Error::InvalidParams(
                    "query coordinates must be finite".into(),
                ));
            }
            QueryObject::new(Point::new(x, y), parse_query_terms(&input.qterms)?)
        }
    };
    let tree = IurTree::build(objects, input.fanout)?;
    Ok(Loaded {
        tree,
        query,
        params,
    })
}

fn run_mode(l: &Loaded, mode: QueryMode) -> (Vec<String>, Option<crate::engine::QueryOutcome>) {
    match mode.engine() {
        Some(m) => {
            let outcome = rstknn_query(&l.tree, &l.query, l.params, m);
            (outcome.result.clone(), Some(outcome))
        }
        None => (rknn_bruteforce_tree(&l.tree, &l.query, l.params), None),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn set_diff(a: &[String], b: &[String]) -> Vec<String> {
    a.iter().filter(|x| !b.contains(x)).cloned().collect()
}

fn ids(v: &[String]) -> String {
    if v.is_empty() {
        "-".to_string()
    } else {
        v.join(" ")
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Gen {
            seed,
            n,
            vocab,
            out: path,
        } => {
            if n == 0 {
                return Err(Error::InvalidParams("--n must be at least 1".into()));
            }
            if vocab == 0 || vocab > MAX_VOCAB {
                return Err(Error::InvalidParams(format!(
                    "--vocab must lie in 1..={MAX_VOCAB}"
                )));
            }
            let objects: Vec<StObject> = generate_dataset(seed, n, vocab);
            write_dataset(&path, &objects)?;
            Ok(EXIT_OK)
        }
        Command::Query {
            input,
            mode,
            trace,
            out: trace_out,
        } => {
            let loaded = load(&input)?;
            let (result, outcome) = run_mode(&loaded, mode);
            let _ = writeln!(out, "{}", result.join(" "));
            if let Some(outcome) = outcome {
                if trace {
                    let _ = write!(out, "\n{}", format_table(&outcome.trace));
                }
                if let Some(path) = trace_out {
                    write_file(&path, &to_json_lines(&outcome.trace))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Compare { input } => {
            let loaded = load(&input)?;
            let (oracle, _) = run_mode(&loaded, QueryMode::Oracle);
            let _ = writeln!(out, "{:<11} {}", "oracle", ids(&oracle));
            let mut status = EXIT_OK;
            for mode in [
                QueryMode::Correct,
                QueryMode::Faulty2011,
                QueryMode::Faulty2014,
            ] {
                let (res, _) = run_mode(&loaded, mode);
                let name = mode.engine().expect("engine mode").name();
                let _ = writeln!(
                    out,
                    "{name:<11} {}  missing: {}  extra: {}",
                    ids(&res),
                    ids(&set_diff(&oracle, &res)),
                    ids(&set_diff(&res, &oracle)),
                );
                if mode == QueryMode::Correct && res != oracle {
                    status = EXIT_MISMATCH;
                }
            }
            Ok(status)
        }
        Command::Search {
            mode,
            seed,
            trials,
            out: dir,
        } => {
            let Some(engine_mode) = mode.engine() else {
                return Err(Error::InvalidParams(
                    "the oracle cannot disagree with itself".into(),
                ));
            };
            if trials == 0 {
                return Err(Error::InvalidParams("--trials must be at least 1".into()));
            }
            match counterexample_search(engine_mode, seed, trials, &InstanceConfig::default()) {
                None => {
                    let _ = writeln!(out, "no mismatch in {trials} trials");
                    Ok(EXIT_MISMATCH)
                }
                Some(cx) => {
                    let _ = writeln!(
                        out,
                        "trial {}: n={} k={} alpha={} fanout={}\n{:<11} {}\n{:<11} {}",
                        cx.trial,
                        cx.fixture.objects.len(),
                        cx.fixture.params.k,
                        cx.fixture.params.alpha,
                        cx.fixture.fanout,
                        engine_mode.name(),
                        ids(&cx.engine),
                        "oracle",
                        ids(&cx.oracle),
                    );
                    if let Some(dir) = dir {
                        cx.fixture.write_dir(&dir)?;
                    }
                    Ok(EXIT_OK)
                }
            }
        }
    }
}

/// Parses `args` (program name first) and runs the command, writing normal
/// output to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Parse { .. } | Error::Io { .. } => EXIT_PARSE,
                _ => EXIT_USAGE,
            }
        }
    }
}
