//! Generation of invariance, satisfiability and negation-consistency
//! obligations from a loaded model.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::engine::ClauseDB;
use crate::prover::{Category, Expect, Obligation, ObligationManifest};
use crate::term::{Formula, Term, Var};

/// Which clauses play which role. Invariants and the initial-state clause
/// take one state argument; operations take `(S, S_)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GenSpec {
    pub invariants: Vec<String>,
    pub operations: Vec<String>,
    pub init: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("invariants without a not_ twin: {}", .0.join(", "))]
    MissingNegation(Vec<String>),
    #[error("no clause {name}/{arity}")]
    MissingClause { name: String, arity: usize },
}

/// Operation bodies with more disjuncts than this get a single op-sat entry.
const MAX_DISJUNCTS: usize = 32;

pub fn generate_manifest(db: &ClauseDB, spec: &GenSpec) -> Result<ObligationManifest, GenError> {
    let need = |name: &str, arity: usize| {
        db.get(name, arity).ok_or(GenError::MissingClause {
            name: name.to_string(),
            arity,
        })
    };
    for inv in &spec.invariants {
        need(inv, 1)?;
    }
    let missing: Vec<String> = spec
        .invariants
        .iter()
        .filter(|i| db.get(&format!("not_{i}"), 1).is_none())
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(GenError::MissingNegation(missing));
    }
    let s = Term::Var(Var::new(0, "S"));
    let s_ = Term::Var(Var::new(1, "S_"));
    let mut entries = Vec::new();

    for inv in &spec.invariants {
        for op in &spec.operations {
            need(op, 2)?;
            entries.push(Obligation {
                name: format!("inv_{inv}__op_{op}"),
                category: Category::Invariance,
                expect: Expect::Unsat,
                goal: Formula::conj(vec![
                    Formula::call(inv, vec![s.clone()]),
                    Formula::call(op, vec![s.clone(), s_.clone()]),
                    Formula::call(&format!("not_{inv}"), vec![s_.clone()]),
                ]),
            });
        }
    }

    for op in &spec.operations {
        let clause = need(op, 2)?;
        let disjuncts = dnf(&clause.body);
        if disjuncts.len() <= 1 || disjuncts.len() > MAX_DISJUNCTS {
            entries.push(Obligation {
                name: format!("opsat_{op}"),
                category: Category::OpSat,
                expect: Expect::Sat,
                goal: Formula::call(op, vec![s.clone(), s_.clone()]),
            });
            continue;
        }
        // Head parameters become equalities so the disjunct keeps the clause's own names.
        let head: Vec<Formula> = clause
            .params
            .iter()
            .zip([&s, &s_])
            .filter(|(p, v)| p.as_var().map(|x| &x.name) != v.as_var().map(|x| &x.name))
            .map(|(p, v)| Formula::eq((*v).clone(), p.clone()))
            .collect();
        for (k, lits) in disjuncts.into_iter().enumerate() {
            entries.push(Obligation {
                name: format!("opsat_{op}__d{}", k + 1),
                category: Category::OpSat,
                expect: Expect::Sat,
                goal: Formula::conj(head.iter().cloned().chain(lits).collect()),
            });
        }
    }

    if let Some(init) = &spec.init {
        need(init, 1)?;
        for inv in &spec.invariants {
            entries.push(Obligation {
                name: format!("init_{inv}"),
                category: Category::InitSat,
                expect: Expect::Sat,
                goal: Formula::and(
                    Formula::call(init, vec![s.clone()]),
                    Formula::call(inv, vec![s.clone()]),
                ),
            });
        }
    }

    for inv in &spec.invariants {
        entries.push(Obligation {
            name: format!("negcons_{inv}"),
            category: Category::NegConsistency,
            expect: Expect::Unsat,
            goal: Formula::and(
                Formula::call(inv, vec![s.clone()]),
                Formula::call(&format!("not_{inv}"), vec![s.clone()]),
            ),
        });
    }
    Ok(ObligationManifest { entries })
}

/// Disjunctive normal form without unfolding calls: a list of conjunctions.
pub fn dnf(f: &Formula) -> Vec<Vec<Formula>> {
    match f {
        Formula::True => vec![vec![]],
        Formula::Or(a, b) => {
            let mut out = dnf(a);
            out.extend(dnf(b));
            out
        }
        Formula::And(a, b) => {
            let (l, r) = (dnf(a), dnf(b));
            let mut out = Vec::with_capacity(l.len() * r.len());
            for x in &l {
                for y in &r {
                    out.push(x.iter().chain(y).cloned().collect());
                }
            }
            out
        }
        other => vec![vec![other.clone()]],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_goal, parse_manifest, parse_program, write_manifest};

    const MODEL: &str = "\
        inv(S) :- S = [X,_] & X in {1,2}.\n\
        not_inv(S) :- S = [X,_] & X nin {1,2}.\n\
        lonely(S) :- S = [1,1].\n\
        init(S) :- S = [1,0].\n\
        step(S,S_) :- S = [1,T] & S_ = [2,T] or S = [2,T] & S_ = [1,T].\n\
        stay(S,S_) :- S_ = S.";

    fn db() -> ClauseDB {
        ClauseDB::load(&[parse_program(MODEL).unwrap()]).unwrap()
    }

    fn spec() -> GenSpec {
        GenSpec {
            invariants: vec!["inv".into()],
            operations: vec!["step".into(), "stay".into()],
            init: Some("init".into()),
        }
    }

    #[test]
    fn counts_per_category() {
        let m = generate_manifest(&db(), &spec()).unwrap();
        let count = |c| m.entries.iter().filter(|o| o.category == c).count();
        assert_eq!(count(Category::Invariance), 2);
        assert_eq!(count(Category::OpSat), 3);
        assert_eq!(count(Category::InitSat), 1);
        assert_eq!(count(Category::NegConsistency), 1);
        assert_eq!(m.entries[0].name, "inv_inv__op_step");
    }

    #[test]
    fn missing_negation_is_listed() {
        let mut sp = spec();
        sp.invariants.push("lonely".into());
        assert_eq!(
            generate_manifest(&db(), &sp),
            Err(GenError::MissingNegation(vec!["lonely".into()]))
        );
        sp.operations.push("nosuch".into());
        sp.invariants.pop();
        assert!(matches!(
            generate_manifest(&db(), &sp),
            Err(GenError::MissingClause { .. })
        ));
    }

    #[test]
    fn manifest_text_round_trips() {
        let m = generate_manifest(&db(), &spec()).unwrap();
        let again = parse_manifest(&write_manifest(&m)).unwrap();
        assert_eq!(again.entries.len(), m.entries.len());
        for (a, b) in m.entries.iter().zip(&again.entries) {
            assert_eq!(a.name, b.name);
            assert_eq!(a.goal.to_string(), b.goal.to_string());
        }
    }

    #[test]
    fn dnf_distributes() {
        let g = parse_goal("(A = 1 or A = 2) & (B = 1 or B = 2 or B = 3).").unwrap();
        assert_eq!(dnf(&g).len(), 6);
        assert_eq!(
            dnf(&parse_goal("true.").unwrap()),
            vec![Vec::<Formula>::new()]
        );
    }
}
