//! File loading, wall-clock timing, concurrent obligation runs and report
//! rendering for the `setsolve` command-line tool.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use setsolve_core::engine::LoadError;
use setsolve_core::prover::{run_obligation, ObligationResult, Outcome, RunReport};
use setsolve_core::syntax::{parse_goal, parse_manifest, parse_program_named, ManifestError};
use setsolve_core::{ClauseDB, Clock, Formula, Limits, ObligationManifest, SyntaxError};

/// Monotonic wall clock.
#[derive(Clone, Copy, Debug)]
pub struct StdClock(Instant);

impl StdClock {
    pub fn new() -> Self {
        StdClock(Instant::now())
    }
}

impl Default for StdClock {
    fn default() -> Self {
        StdClock::new()
    }
}

impl Clock for StdClock {
    fn now(&self) -> Duration {
        self.0.elapsed()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Syntax { path: String, source: SyntaxError },
    #[error("{path}: {source}")]
    Manifest {
        path: PathBuf,
        source: ManifestError,
    },
    #[error(transparent)]
    Load(#[from] LoadError),
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_programs<P: AsRef<Path>>(paths: &[P]) -> Result<ClauseDB, InputError> {
    let mut programs = Vec::with_capacity(paths.len());
    for p in paths {
        let p = p.as_ref();
        let name = p.display().to_string();
        let text = read(p)?;
        programs.push(
            parse_program_named(&text, &name)
                .map_err(|source| InputError::Syntax { path: name, source })?,
        );
    }
    Ok(ClauseDB::load(&programs)?)
}

/// Goal text given inline, or read from a file.
pub fn read_goal(inline: Option<&str>, file: Option<&Path>) -> Result<Option<Formula>, InputError> {
    let (text, origin) = match (inline, file) {
        (Some(g), _) => (g.to_string(), "<goal>".to_string()),
        (None, Some(f)) => (read(f)?, f.display().to_string()),
        (None, None) => return Ok(None),
    };
    let text = if text.trim_end().ends_with('.') {
        text
    } else {
        format!("{}.", text.trim_end())
    };
    parse_goal(&text)
        .map(Some)
        .map_err(|source| InputError::Syntax {
            path: origin,
            source,
        })
}

pub fn load_manifests<P: AsRef<Path>>(paths: &[P]) -> Result<ObligationManifest, InputError> {
    let mut all = ObligationManifest::default();
    for p in paths {
        let p = p.as_ref();
        let m = parse_manifest(&read(p)?).map_err(|source| InputError::Manifest {
            path: p.to_path_buf(),
            source,
        })?;
        all.entries.extend(m.entries);
    }
    Ok(all)
}

/// Runs every obligation on `jobs` worker threads. Rows come back in
/// manifest order whatever the completion order.
pub fn run_parallel(
    m: &ObligationManifest,
    db: &ClauseDB,
    limits: &Limits,
    jobs: usize,
) -> RunReport {
    let clock = StdClock::new();
    let slots: Vec<Mutex<Option<ObligationResult>>> =
        m.entries.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.max(1).min(m.entries.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(o) = m.entries.get(i) else { break };
                let r = run_obligation(o, db, limits, &clock);
                *slots[i]
                    .lock()
                    .expect("worker panicked while holding a slot") = Some(r);
            });
        }
    });
    RunReport {
        rows: slots
            .into_iter()
            .map(|s| {
                s.into_inner()
                    .expect("slot lock poisoned")
                    .expect("every obligation ran")
            })
            .collect(),
    }
}

fn seconds(d: Duration, timing: bool) -> String {
    if timing {
        format!("{:.3}", d.as_secs_f64())
    } else {
        "-".into()
    }
}

fn status(r: &ObligationResult) -> &'static str {
    if r.met() {
        "ok"
    } else {
        "FAIL"
    }
}

/// `name<TAB>category<TAB>verdict<TAB>expect<TAB>seconds` per row.
pub fn render_tsv(report: &RunReport, timing: bool) -> String {
    let mut out = String::new();
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.name,
            r.category.word(),
            r.verdict_word(),
            r.expect.word(),
            seconds(r.elapsed, timing)
        );
    }
    out
}

/// Aligned table, per-category totals, and details for every failing row.
pub fn render_table(report: &RunReport, timing: bool) -> String {
    let mut out = String::new();
    let w = report
        .rows
        .iter()
        .map(|r| r.name.len())
        .max()
        .unwrap_or(0)
        .max("obligation".len());
    let _ = writeln!(
        out,
        "{:<w$}  {:<15}  {:<11}  {:<6}  {:<6}  {:>8}",
        "obligation", "category", "verdict", "expect", "result", "seconds"
    );
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:<w$}  {:<15}  {:<11}  {:<6}  {:<6}  {:>8}",
            r.name,
            r.category.word(),
            r.verdict_word(),
            r.expect.word(),
            status(r),
            seconds(r.elapsed, timing)
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<15}  {:>5}  {:>5}  {:>8}",
        "category", "count", "met", "seconds"
    );
    for (c, t) in report.totals() {
        let _ = writeln!(
            out,
            "{:<15}  {:>5}  {:>5}  {:>8}",
            c.word(),
            t.count,
            t.met,
            seconds(t.elapsed, timing)
        );
    }
    let g = report.grand_total();
    let _ = writeln!(
        out,
        "{:<15}  {:>5}  {:>5}  {:>8}",
        "Totals",
        g.count,
        g.met,
        seconds(g.elapsed, timing)
    );
    for r in report.rows.iter().filter(|r| !r.met()) {
        let _ = writeln!(out);
        match &r.outcome {
            Outcome::Sat(a) => {
                let _ = write!(out, "Countermodel for {}:\n{a}", r.name);
            }
            Outcome::Unsat => {
                let _ = writeln!(out, "{}: expected sat but no solution exists", r.name);
            }
            Outcome::Limit(k) => {
                let _ = writeln!(out, "{}: {k} limit reached", r.name);
            }
            Outcome::Error(e) | Outcome::NegFailure(e) => {
                let _ = writeln!(out, "{}: {e}", r.name);
            }
        }
    }
    out
}
