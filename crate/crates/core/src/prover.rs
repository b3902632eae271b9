//! Proof obligations: theorem proving by unsatisfiability, negation
//! consistency of clause pairs, and per-obligation execution.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::time::Duration;

use crate::engine::{CallError, ClauseDB};
use crate::solver::{solve_with_clock, Answer, Clock, LimitKind, Limits, SolveError, Verdict};
use crate::term::{Formula, Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expect {
    Sat,
    Unsat,
}

impl Expect {
    pub fn word(self) -> &'static str {
        match self {
            Expect::Sat => "sat",
            Expect::Unsat => "unsat",
        }
    }

    pub fn from_word(w: &str) -> Option<Self> {
        match w {
            "sat" => Some(Expect::Sat),
            "unsat" => Some(Expect::Unsat),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Invariance,
    OpSat,
    InitSat,
    NegConsistency,
    Property,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Invariance,
        Category::OpSat,
        Category::InitSat,
        Category::NegConsistency,
        Category::Property,
    ];

    pub fn word(self) -> &'static str {
        match self {
            Category::Invariance => "invariance",
            Category::OpSat => "op-sat",
            Category::InitSat => "init-sat",
            Category::NegConsistency => "neg-consistency",
            Category::Property => "property",
        }
    }

    pub fn from_word(w: &str) -> Option<Self> {
        Category::ALL.into_iter().find(|c| c.word() == w)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obligation {
    pub name: String,
    pub category: Category,
    pub expect: Expect,
    pub goal: Formula,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ObligationManifest {
    pub entries: Vec<Obligation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofResult {
    Theorem,
    Countermodel(Answer),
    ResourceLimit(LimitKind),
}

/// `goal` is the negated conjecture; it is a theorem when the goal is unsatisfiable.
pub fn check_unsat(
    goal: &Formula,
    db: &ClauseDB,
    limits: &Limits,
    clock: &dyn Clock,
) -> Result<ProofResult, SolveError> {
    let limits = Limits {
        max_answers: Some(1),
        ..limits.clone()
    };
    Ok(match solve_with_clock(goal, db, &limits, clock)? {
        Verdict::Unsat => ProofResult::Theorem,
        Verdict::Sat(mut answers) => ProofResult::Countermodel(answers.swap_remove(0)),
        Verdict::ResourceLimit(k) => ProofResult::ResourceLimit(k),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NegConsistency {
    Ok,
    /// The named clause has no solution on its own.
    BothSatFailure {
        clause: String,
    },
    /// Clause and negation hold together.
    ConjunctionSat(Answer),
    ResourceLimit(LimitKind),
}

impl fmt::Display for NegConsistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegConsistency::Ok => f.write_str("ok"),
            NegConsistency::BothSatFailure { clause } => write!(f, "{clause} is unsatisfiable"),
            NegConsistency::ConjunctionSat(_) => {
                f.write_str("clause and negation are jointly satisfiable")
            }
            NegConsistency::ResourceLimit(k) => write!(f, "{k} limit reached"),
        }
    }
}

/// Checks that `pos` and `neg` are each satisfiable and jointly unsatisfiable
/// on shared fresh arguments.
pub fn neg_consistency(
    pos: &str,
    neg: &str,
    arity: usize,
    db: &ClauseDB,
    limits: &Limits,
    clock: &dyn Clock,
) -> Result<NegConsistency, SolveError> {
    for name in [pos, neg] {
        if db.get(name, arity).is_none() {
            return Err(SolveError::Call(CallError::Unknown {
                name: name.to_string(),
                arity,
            }));
        }
    }
    let args: Vec<Term> = (0..arity)
        .map(|i| Term::Var(Var::new(i as u32, &format!("V{i}"))))
        .collect();
    let one = Limits {
        max_answers: Some(1),
        ..limits.clone()
    };
    for name in [pos, neg] {
        match solve_with_clock(&Formula::call(name, args.clone()), db, &one, clock)? {
            Verdict::Sat(_) => {}
            Verdict::Unsat => {
                return Ok(NegConsistency::BothSatFailure {
                    clause: name.to_string(),
                })
            }
            Verdict::ResourceLimit(k) => return Ok(NegConsistency::ResourceLimit(k)),
        }
    }
    let both = Formula::and(Formula::call(pos, args.clone()), Formula::call(neg, args));
    Ok(match check_unsat(&both, db, limits, clock)? {
        ProofResult::Theorem => NegConsistency::Ok,
        ProofResult::Countermodel(a) => NegConsistency::ConjunctionSat(a),
        ProofResult::ResourceLimit(k) => NegConsistency::ResourceLimit(k),
    })
}

/// Recognises `p(Args) & q(Args)` with identical argument lists.
pub fn neg_consistency_pair(goal: &Formula) -> Option<(Arc<str>, Arc<str>, usize)> {
    match goal {
        Formula::And(a, b) => match (a.as_ref(), b.as_ref()) {
            (Formula::Call(p, xs), Formula::Call(q, ys)) if xs == ys => {
                Some((p.clone(), q.clone(), xs.len()))
            }
            _ => None,
        },
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Sat(Answer),
    Unsat,
    Limit(LimitKind),
    Error(String),
    /// A negation-consistency check that failed on one of its sub-checks.
    NegFailure(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObligationResult {
    pub name: String,
    pub category: Category,
    pub expect: Expect,
    pub outcome: Outcome,
    pub elapsed: Duration,
}

impl ObligationResult {
    pub fn verdict_word(&self) -> String {
        match &self.outcome {
            Outcome::Sat(_) => "sat".into(),
            Outcome::Unsat => "unsat".into(),
            Outcome::Limit(k) => format!("limit:{k}"),
            Outcome::Error(_) => "error".into(),
            Outcome::NegFailure(_) => "failed".into(),
        }
    }

    pub fn met(&self) -> bool {
        matches!(
            (&self.outcome, self.expect),
            (Outcome::Sat(_), Expect::Sat) | (Outcome::Unsat, Expect::Unsat)
        )
    }
}

/// Runs one obligation. Negation-consistency entries of the shape
/// `p(Args) & not_p(Args)` run the full three-part check.
pub fn run_obligation(
    o: &Obligation,
    db: &ClauseDB,
    limits: &Limits,
    clock: &dyn Clock,
) -> ObligationResult {
    let start = clock.now();
    let outcome = match (o.category, neg_consistency_pair(&o.goal)) {
        (Category::NegConsistency, Some((p, q, n))) => {
            match neg_consistency(&p, &q, n, db, limits, clock) {
                Ok(NegConsistency::Ok) => Outcome::Unsat,
                Ok(NegConsistency::ConjunctionSat(a)) => Outcome::Sat(a),
                Ok(NegConsistency::ResourceLimit(k)) => Outcome::Limit(k),
                Ok(other) => Outcome::NegFailure(other.to_string()),
                Err(e) => Outcome::Error(e.to_string()),
            }
        }
        _ => {
            let one = Limits {
                max_answers: Some(1),
                ..limits.clone()
            };
            match solve_with_clock(&o.goal, db, &one, clock) {
                Ok(Verdict::Unsat) => Outcome::Unsat,
                Ok(Verdict::Sat(mut a)) => Outcome::Sat(a.swap_remove(0)),
                Ok(Verdict::ResourceLimit(k)) => Outcome::Limit(k),
                Err(e) => Outcome::Error(e.to_string()),
            }
        }
    };
    ObligationResult {
        name: o.name.clone(),
        category: o.category,
        expect: o.expect,
        outcome,
        elapsed: clock.now().saturating_sub(start),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CategoryTotal {
    pub count: usize,
    pub met: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunReport {
    pub rows: Vec<ObligationResult>,
}

impl RunReport {
    pub fn all_met(&self) -> bool {
        self.rows.iter().all(ObligationResult::met)
    }

    /// Per-category totals in category order, skipping empty categories.
    pub fn totals(&self) -> Vec<(Category, CategoryTotal)> {
        Category::ALL
            .into_iter()
            .filter_map(|c| {
                let rows: Vec<_> = self.rows.iter().filter(|r| r.category == c).collect();
                (!rows.is_empty()).then(|| {
                    (
                        c,
                        CategoryTotal {
                            count: rows.len(),
                            met: rows.iter().filter(|r| r.met()).count(),
                            elapsed: rows.iter().map(|r| r.elapsed).sum(),
                        },
                    )
                })
            })
            .collect()
    }

    pub fn grand_total(&self) -> CategoryTotal {
        CategoryTotal {
            count: self.rows.len(),
            met: self.rows.iter().filter(|r| r.met()).count(),
            elapsed: self.rows.iter().map(|r| r.elapsed).sum(),
        }
    }
}

/// Sequential manifest run; see the command-line crate for concurrent runs.
pub fn run_manifest(
    m: &ObligationManifest,
    db: &ClauseDB,
    limits: &Limits,
    clock: &dyn Clock,
) -> RunReport {
    RunReport {
        rows: m
            .entries
            .iter()
            .map(|o| run_obligation(o, db, limits, clock))
            .collect(),
    }
}
