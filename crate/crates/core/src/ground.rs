//! Direct evaluation of ground terms and constraints.
//!
//! Ground sets are brought to a canonical form (elements sorted, duplicates
//! removed) so that structural equality coincides with set equality.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::term::{ArithOp, Formula, PrimOp, Term};

/// Canonical form of a ground term, or `None` when it contains free
/// variables, ill-typed arithmetic, or a RIS whose filter cannot be evaluated.
pub fn canon(t: &Term) -> Option<Term> {
    match t {
        Term::Var(_) => None,
        Term::Int(_) | Term::Atom(_) | Term::Empty => Some(t.clone()),
        Term::Tuple(ts) => Some(Term::Tuple(ts.iter().map(canon).collect::<Option<_>>()?)),
        Term::Ctor(n, ts) => Some(Term::Ctor(
            n.clone(),
            ts.iter().map(canon).collect::<Option<_>>()?,
        )),
        Term::Arith(..) => eval_int(t).map(Term::Int),
        Term::SetCons(..) | Term::Ris(_) => Some(from_elems(elems(t)?)),
    }
}

/// Elements of a ground set term, sorted and deduplicated.
pub fn elems(t: &Term) -> Option<Vec<Term>> {
    let mut out = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            Term::Empty => break,
            Term::SetCons(e, r) => {
                out.push(canon(e)?);
                cur = r;
            }
            Term::Ris(r) => {
                for e in elems(&r.domain)? {
                    let inst = r
                        .filter
                        .rename(&[(r.bound.clone(), e.clone())].into_iter().collect());
                    if eval_formula(&inst)? {
                        out.push(e);
                    }
                }
                break;
            }
            _ => return None,
        }
    }
    out.sort();
    out.dedup();
    Some(out)
}

pub fn from_elems(mut es: Vec<Term>) -> Term {
    es.sort();
    es.dedup();
    Term::set(es)
}

pub fn eval_int(t: &Term) -> Option<BigInt> {
    match t {
        Term::Int(i) => Some(i.clone()),
        Term::Arith(op, a, b) => {
            let (a, b) = (eval_int(a)?, eval_int(b)?);
            Some(match op {
                ArithOp::Add => a + b,
                ArithOp::Sub => a - b,
                ArithOp::Mul => a * b,
            })
        }
        _ => None,
    }
}

/// Replaces every ground subterm by its canonical form; leaves the rest intact.
pub fn normalize(t: &Term) -> Term {
    if let Some(c) = canon(t) {
        return c;
    }
    if let Some(i) = eval_int(t) {
        return Term::Int(i);
    }
    match t {
        Term::Tuple(ts) => Term::Tuple(ts.iter().map(normalize).collect()),
        Term::Ctor(n, ts) => Term::Ctor(n.clone(), ts.iter().map(normalize).collect()),
        Term::SetCons(e, r) => Term::cons(normalize(e), normalize(r)),
        Term::Arith(op, a, b) => Term::arith(*op, normalize(a), normalize(b)),
        _ => t.clone(),
    }
}

fn is_set_value(t: &Term) -> bool {
    matches!(t, Term::Empty | Term::SetCons(..))
}

fn pairs(es: &[Term]) -> Option<Vec<(&Term, &Term)>> {
    es.iter()
        .map(|e| match e {
            Term::Tuple(ts) if ts.len() == 2 => Some((&ts[0], &ts[1])),
            _ => None,
        })
        .collect()
}

fn compose(r: &[Term], s: &[Term]) -> Option<Vec<Term>> {
    let (r, s) = (pairs(r)?, pairs(s)?);
    let mut by_first: BTreeMap<&Term, Vec<&Term>> = BTreeMap::new();
    for (a, b) in &s {
        by_first.entry(*a).or_default().push(*b);
    }
    let mut out = Vec::new();
    for (x, y) in &r {
        if let Some(zs) = by_first.get(y) {
            for z in zs {
                out.push(Term::pair((*x).clone(), (*z).clone()));
            }
        }
    }
    out.sort();
    out.dedup();
    Some(out)
}

fn is_pfun(f: &[Term]) -> Option<bool> {
    let ps = pairs(f)?;
    Some(ps.windows(2).all(|w| w[0].0 != w[1].0))
}

fn union(a: &[Term], b: &[Term]) -> Vec<Term> {
    let mut out: Vec<Term> = a.iter().chain(b.iter()).cloned().collect();
    out.sort();
    out.dedup();
    out
}

fn inter(a: &[Term], b: &[Term]) -> Vec<Term> {
    a.iter()
        .filter(|x| b.binary_search(x).is_ok())
        .cloned()
        .collect()
}

fn subset(a: &[Term], b: &[Term]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

/// Truth value of a primitive over ground arguments. `None` when some
/// argument is not ground, a set position holds a non-set, or a relational
/// argument is not a set of pairs where that matters for typing errors.
pub fn eval_prim(op: PrimOp, args: &[Term]) -> Option<bool> {
    if op == PrimOp::Foreach {
        let Term::Ris(r) = &args[0] else { return None };
        let dom = elems(&r.domain)?;
        let kept = elems(&args[0])?;
        return Some(dom.len() == kept.len());
    }
    if op.is_arith() {
        let (a, b) = match (eval_int(&args[0]), eval_int(&args[1])) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                canon(&args[0])?;
                canon(&args[1])?;
                return Some(false);
            }
        };
        return Some(match op {
            PrimOp::Lt => a < b,
            PrimOp::Le => a <= b,
            PrimOp::Gt => a > b,
            _ => a >= b,
        });
    }
    let cs: Vec<Term> = args.iter().map(canon).collect::<Option<_>>()?;
    let set = |i: usize| -> Option<Vec<Term>> {
        if is_set_value(&cs[i]) {
            elems(&cs[i])
        } else {
            None
        }
    };
    Some(match op {
        PrimOp::Eq => cs[0] == cs[1],
        PrimOp::Neq => cs[0] != cs[1],
        PrimOp::In => set(1)?.binary_search(&cs[0]).is_ok(),
        PrimOp::Nin => set(1)?.binary_search(&cs[0]).is_err(),
        PrimOp::Un => union(&set(0)?, &set(1)?) == set(2)?,
        PrimOp::Nun => union(&set(0)?, &set(1)?) != set(2)?,
        PrimOp::Inters => inter(&set(0)?, &set(1)?) == set(2)?,
        PrimOp::Ninters => inter(&set(0)?, &set(1)?) != set(2)?,
        PrimOp::Subset => subset(&set(0)?, &set(1)?),
        PrimOp::Nsubset => !subset(&set(0)?, &set(1)?),
        PrimOp::Disj => inter(&set(0)?, &set(1)?).is_empty(),
        PrimOp::Ndisj => !inter(&set(0)?, &set(1)?).is_empty(),
        PrimOp::Dom | PrimOp::Ran => {
            let r = set(0)?;
            let d = set(1)?;
            match pairs(&r) {
                None => false,
                Some(ps) => {
                    let proj: Vec<Term> = ps
                        .iter()
                        .map(|(a, b)| {
                            if op == PrimOp::Dom {
                                (*a).clone()
                            } else {
                                (*b).clone()
                            }
                        })
                        .collect();
                    from_elems(proj) == from_elems(d)
                }
            }
        }
        PrimOp::Comp | PrimOp::Ncomp => {
            let (r, s, t) = (set(0)?, set(1)?, set(2)?);
            let holds = match compose(&r, &s) {
                Some(c) => c == t,
                None => false,
            };
            if op == PrimOp::Comp {
                holds
            } else {
                match compose(&r, &s) {
                    Some(c) => c != t,
                    None => false,
                }
            }
        }
        PrimOp::Pfun => is_pfun(&set(0)?).unwrap_or(false),
        PrimOp::Apply => {
            let f = set(0)?;
            is_pfun(&f).unwrap_or(false)
                && f.binary_search(&Term::pair(cs[1].clone(), cs[2].clone()))
                    .is_ok()
        }
        PrimOp::Foreach | PrimOp::Lt | PrimOp::Le | PrimOp::Gt | PrimOp::Ge => unreachable!(),
    })
}

/// Evaluates a ground, call-free formula.
pub fn eval_formula(f: &Formula) -> Option<bool> {
    match f {
        Formula::True => Some(true),
        Formula::False => Some(false),
        Formula::Prim(p) => eval_prim(p.op, &p.args),
        Formula::Call(..) => None,
        Formula::Delayed(g) => eval_formula(g),
        Formula::And(a, b) => Some(eval_formula(a)? && eval_formula(b)?),
        Formula::Or(a, b) => Some(eval_formula(a)? || eval_formula(b)?),
    }
}
