//! Clause database and call unfolding.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

pub use crate::syntax::Clause;
use crate::syntax::{SourceProgram, Span};
use crate::term::{Formula, Term, VarGen};

/// Where a clause was defined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Origin {
    pub file: Option<Arc<str>>,
    pub span: Span,
}

impl core::fmt::Display for Origin {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match &self.file {
            Some(file) => write!(f, "{file}:{}:{}", self.span.line, self.span.col),
            None => write!(f, "{}:{}", self.span.line, self.span.col),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LoadError {
    #[error("duplicate definition of {name}/{arity} at {second} (first defined at {first})")]
    Duplicate {
        name: String,
        arity: usize,
        first: Origin,
        second: Origin,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CallError {
    #[error("unknown clause {name}/{arity}")]
    Unknown { name: String, arity: usize },
    #[error("{name} called with {found} arguments but defined with arity {}", defined_list(.defined))]
    Arity {
        name: String,
        found: usize,
        defined: Vec<usize>,
    },
}

fn defined_list(arities: &[usize]) -> String {
    arities
        .iter()
        .map(|a| a.to_string())
        .collect::<Vec<_>>()
        .join("/")
}

/// Immutable after loading; share it freely between concurrent searches.
#[derive(Clone, Debug, Default)]
pub struct ClauseDB {
    clauses: BTreeMap<(Arc<str>, usize), (Clause, Origin)>,
    order: Vec<(Arc<str>, usize)>,
}

impl ClauseDB {
    pub fn new() -> Self {
        ClauseDB::default()
    }

    pub fn load(programs: &[SourceProgram]) -> Result<Self, LoadError> {
        let mut db = ClauseDB::new();
        for p in programs {
            for c in &p.clauses {
                let key = (c.name.clone(), c.arity());
                let origin = Origin {
                    file: p.file.clone(),
                    span: c.span,
                };
                if let Some((_, first)) = db.clauses.get(&key) {
                    return Err(LoadError::Duplicate {
                        name: c.name.to_string(),
                        arity: c.arity(),
                        first: first.clone(),
                        second: origin,
                    });
                }
                db.order.push(key.clone());
                db.clauses.insert(key, (c.clone(), origin));
            }
        }
        Ok(db)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn get(&self, name: &str, arity: usize) -> Option<&Clause> {
        self.clauses.get(&(Arc::from(name), arity)).map(|(c, _)| c)
    }

    pub fn origin(&self, name: &str, arity: usize) -> Option<&Origin> {
        self.clauses.get(&(Arc::from(name), arity)).map(|(_, o)| o)
    }

    /// Clauses in load order.
    pub fn clauses(&self) -> impl Iterator<Item = &Clause> {
        self.order.iter().map(|k| &self.clauses[k].0)
    }

    /// Renamed-apart body preceded by `actual = formal` equalities.
    pub fn unfold(
        &self,
        name: &str,
        args: &[Term],
        gen: &mut VarGen,
    ) -> Result<Formula, CallError> {
        let Some(clause) = self.get(name, args.len()) else {
            let defined: Vec<usize> = self
                .order
                .iter()
                .filter(|(n, _)| &**n == name)
                .map(|(_, a)| *a)
                .collect();
            return Err(if defined.is_empty() {
                CallError::Unknown {
                    name: name.to_string(),
                    arity: args.len(),
                }
            } else {
                CallError::Arity {
                    name: name.to_string(),
                    found: args.len(),
                    defined,
                }
            });
        };
        let mut map = BTreeMap::new();
        let mut parts: Vec<Formula> = args
            .iter()
            .zip(&clause.params)
            .map(|(a, p)| Formula::eq(a.clone(), p.rename_apart(&mut map, gen)))
            .collect();
        parts.push(clause.body.rename_apart(&mut map, gen));
        Ok(Formula::conj(parts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_program, parse_program_named};
    use alloc::collections::BTreeSet;
    use alloc::vec;

    const UPDATE: &str = "update(F,X,Y,F_,Error) :-
        F = {[X,V]/F1} & [X,V] nin F1 & F_ = {[X,Y]/F1} & Error = ok
        or
        dom(F,D) & X nin D & F_ = F & Error = err.";

    #[test]
    fn update_is_callable() {
        let db = ClauseDB::load(&[parse_program(UPDATE).unwrap()]).unwrap();
        let mut gen = VarGen::starting_at(100);
        let args = vec![
            Term::atom("f"),
            Term::int(1),
            Term::int(2),
            Term::atom("g"),
            Term::atom("e"),
        ];
        assert!(db.unfold("update", &args, &mut gen).is_ok());
    }

    #[test]
    fn duplicate_across_files() {
        let a = parse_program_named("p(X) :- X = 1.", "a.slog").unwrap();
        let b = parse_program_named("p(Y) :- Y = 2.", "b.slog").unwrap();
        match ClauseDB::load(&[a, b]) {
            Err(LoadError::Duplicate { first, second, .. }) => {
                assert_eq!(first.file.as_deref(), Some("a.slog"));
                assert_eq!(second.file.as_deref(), Some("b.slog"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_file_gives_empty_db() {
        assert!(ClauseDB::load(&[parse_program("").unwrap()])
            .unwrap()
            .is_empty());
    }

    #[test]
    fn unknown_and_arity_errors() {
        let db = ClauseDB::load(&[parse_program("p(X) :- X = 1.").unwrap()]).unwrap();
        let mut gen = VarGen::new();
        assert!(matches!(
            db.unfold("q", &[], &mut gen),
            Err(CallError::Unknown { .. })
        ));
        assert!(matches!(
            db.unfold("p", &[], &mut gen),
            Err(CallError::Arity { .. })
        ));
    }

    #[test]
    fn unfolding_twice_gives_disjoint_variables() {
        let db = ClauseDB::load(&[parse_program(UPDATE).unwrap()]).unwrap();
        let mut gen = VarGen::starting_at(100);
        let args: Vec<Term> = (0..5).map(Term::int).collect();
        let a = db.unfold("update", &args, &mut gen).unwrap().free_vars();
        let b = db.unfold("update", &args, &mut gen).unwrap().free_vars();
        assert!(!a.is_empty());
        assert_eq!(a.intersection(&b).collect::<BTreeSet<_>>().len(), 0);
    }
}
