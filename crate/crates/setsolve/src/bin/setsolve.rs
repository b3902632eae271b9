use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use setsolve::{
    load_manifests, load_programs, read_goal, render_table, render_tsv, run_parallel, StdClock,
};
use setsolve_core::generate::{generate_manifest, GenSpec};
use setsolve_core::oracle::{find_model, universe, OracleConfig, Value};
use setsolve_core::prover::{check_unsat, ProofResult};
use setsolve_core::syntax::{parse_term, write_manifest};
use setsolve_core::{solve_with_clock, ClauseDB, Formula, Limits, Term, Verdict};

const TIMEOUT_ENV: &str = "SETSOLVE_TIMEOUT_SECS";

#[derive(Parser)]
#[command(
    name = "setsolve",
    version,
    about = "Set-constraint solver and proof-obligation checker"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the solutions of a goal.
    Solve {
        #[command(flatten)]
        input: GoalInput,
        #[command(flatten)]
        limits: LimitArgs,
        /// Stop after this many answers.
        #[arg(long)]
        max_solutions: Option<usize>,
    },
    /// Prove a theorem by showing its negation (the goal) has no solution.
    Prove {
        #[command(flatten)]
        input: GoalInput,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Run obligation manifests and print a report.
    Check {
        /// Program files.
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Obligation manifest (.obl); repeatable.
        #[arg(short, long = "manifest", required = true)]
        manifests: Vec<PathBuf>,
        #[arg(short, long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Print `-` instead of elapsed seconds.
        #[arg(long)]
        no_timing: bool,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Decide a goal by brute-force enumeration over a finite universe.
    Oracle {
        /// Program files.
        files: Vec<PathBuf>,
        #[arg(short, long)]
        goal: String,
        /// Comma-separated atoms and integers.
        #[arg(long, value_delimiter = ',', required = true)]
        universe: Vec<String>,
        /// Set-nesting depth of enumerated values.
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, default_value_t = 2_000_000)]
        budget: u64,
    },
    /// Write invariance, op-sat, init-sat and negation-consistency obligations.
    Generate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Invariant clause of arity 1 with a `not_` twin; repeatable.
        #[arg(long = "invariant", required = true)]
        invariants: Vec<String>,
        /// Operation clause of arity 2; repeatable.
        #[arg(long = "operation", required = true)]
        operations: Vec<String>,
        /// Clause giving the initial state.
        #[arg(long)]
        init: Option<String>,
        /// Output file; standard output if absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GoalInput {
    /// Program files; an argument starting with `@` names a goal file.
    #[arg(required = true)]
    files: Vec<String>,
    /// Goal text; wins over an `@file`.
    #[arg(short, long)]
    goal: Option<String>,
}

impl GoalInput {
    fn split(&self) -> (Vec<PathBuf>, Option<PathBuf>) {
        let mut goal_file = None;
        let mut files = Vec::new();
        for f in &self.files {
            match f.strip_prefix('@') {
                Some(g) => goal_file = Some(PathBuf::from(g)),
                None => files.push(PathBuf::from(f)),
            }
        }
        (files, goal_file)
    }
}

#[derive(Args)]
struct LimitArgs {
    /// Wall-clock limit in seconds (default 60, or $SETSOLVE_TIMEOUT_SECS).
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long)]
    max_depth: Option<u64>,
    #[arg(long)]
    max_steps: Option<u64>,
}

impl LimitArgs {
    fn limits(&self) -> Result<Limits, String> {
        let mut l = Limits::default();
        if let Ok(s) = std::env::var(TIMEOUT_ENV) {
            l.timeout = Some(secs(
                s.trim()
                    .parse()
                    .map_err(|_| format!("{TIMEOUT_ENV}: not a number: {s}"))?,
            )?);
        }
        if let Some(t) = self.timeout {
            l.timeout = Some(secs(t)?);
        }
        if let Some(d) = self.max_depth {
            l.max_depth = d;
        }
        if let Some(s) = self.max_steps {
            l.max_steps = s;
        }
        Ok(l)
    }
}

fn secs(t: f64) -> Result<Duration, String> {
    Duration::try_from_secs_f64(t).map_err(|_| format!("invalid timeout {t}"))
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Tsv,
}

/// Failure that maps to exit status 3.
struct Fatal(String);

impl<E: std::fmt::Display> From<E> for Fatal {
    fn from(e: E) -> Self {
        Fatal(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors share the input-error status; 2 means a resource limit.
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(Fatal(msg)) => {
            eprintln!("setsolve: {msg}");
            ExitCode::from(3)
        }
    }
}

fn goal_and_db(input: &GoalInput) -> Result<(Formula, ClauseDB), Fatal> {
    let (files, goal_file) = input.split();
    let db = load_programs(&files)?;
    let goal = read_goal(input.goal.as_deref(), goal_file.as_deref())?
        .ok_or_else(|| Fatal("no goal given (use -g or @file)".into()))?;
    Ok((goal, db))
}

fn run(cmd: Cmd) -> Result<u8, Fatal> {
    let mut out = std::io::stdout().lock();
    match cmd {
        Cmd::Solve {
            input,
            limits,
            max_solutions,
        } => {
            let (goal, db) = goal_and_db(&input)?;
            let mut limits = limits.limits()?;
            limits.max_answers = max_solutions;
            match solve_with_clock(&goal, &db, &limits, &StdClock::new())? {
                Verdict::Sat(answers) => {
                    for (i, a) in answers.iter().enumerate() {
                        if i > 0 {
                            writeln!(out)?;
                        }
                        write!(out, "{a}")?;
                    }
                    Ok(0)
                }
                Verdict::Unsat => {
                    writeln!(out, "unsat")?;
                    Ok(1)
                }
                Verdict::ResourceLimit(k) => {
                    writeln!(out, "unknown: {k} limit reached")?;
                    Ok(2)
                }
            }
        }
        Cmd::Prove { input, limits } => {
            let (goal, db) = goal_and_db(&input)?;
            match check_unsat(&goal, &db, &limits.limits()?, &StdClock::new())? {
                ProofResult::Theorem => {
                    writeln!(out, "THEOREM")?;
                    Ok(0)
                }
                ProofResult::Countermodel(a) => {
                    write!(out, "Countermodel:\n{a}")?;
                    Ok(1)
                }
                ProofResult::ResourceLimit(k) => {
                    writeln!(out, "unknown: {k} limit reached")?;
                    Ok(2)
                }
            }
        }
        Cmd::Check {
            files,
            manifests,
            jobs,
            format,
            no_timing,
            limits,
        } => {
            let db = load_programs(&files)?;
            let m = load_manifests(&manifests)?;
            let report = run_parallel(&m, &db, &limits.limits()?, jobs);
            let text = match format {
                Format::Table => render_table(&report, !no_timing),
                Format::Tsv => render_tsv(&report, !no_timing),
            };
            out.write_all(text.as_bytes())?;
            Ok(if report.all_met() { 0 } else { 1 })
        }
        Cmd::Oracle {
            files,
            goal,
            universe: atoms,
            depth,
            budget,
        } => {
            let db = load_programs(&files)?;
            let goal = read_goal(Some(&goal), None)?.expect("inline goal");
            let atoms = atoms
                .iter()
                .map(|a| value(a))
                .collect::<Result<Vec<_>, _>>()?;
            let config = OracleConfig {
                budget,
                ..OracleConfig::with_default_domain(universe(&atoms, depth, 1 << 16)?)
            };
            match find_model(&goal, &db, &config) {
                Ok(Some(model)) => {
                    writeln!(out, "sat")?;
                    for (v, x) in model.iter().filter(|(v, _)| goal.free_vars().contains(*v)) {
                        writeln!(out, "{} = {x}", v.name)?;
                    }
                    Ok(0)
                }
                Ok(None) => {
                    writeln!(out, "unsat")?;
                    Ok(1)
                }
                Err(e) => {
                    eprintln!("setsolve: oracle refused: {e}");
                    Ok(2)
                }
            }
        }
        Cmd::Generate {
            files,
            invariants,
            operations,
            init,
            output,
        } => {
            let db = load_programs(&files)?;
            let m = generate_manifest(
                &db,
                &GenSpec {
                    invariants,
                    operations,
                    init,
                },
            )?;
            let text = write_manifest(&m);
            match output {
                Some(p) => write_file(&p, &text)?,
                None => out.write_all(text.as_bytes())?,
            }
            Ok(0)
        }
    }
}

fn value(text: &str) -> Result<Value, Fatal> {
    match parse_term(text.trim())? {
        Term::Int(i) => Ok(Value::Int(i)),
        Term::Atom(a) => Ok(Value::Atom(a)),
        other => Err(Fatal(format!(
            "universe elements must be atoms or integers, got {other}"
        ))),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Fatal> {
    std::fs::write(path, text).map_err(|e| Fatal(format!("{}: {e}", path.display())))
}
