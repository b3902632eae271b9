//! Syntactic unification extended with set unification.
//!
//! Equations between extensional set terms branch; every branch carries an
//! occurs-checked idempotent substitution plus residual equations that the
//! solver has to finish (arithmetic and RIS equations).

use alloc::vec;
use alloc::vec::Vec;

use crate::ground;
use crate::term::{Subst, Term, Var, VarGen};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnifyBranch {
    pub subst: Subst,
    pub residual: Vec<(Term, Term)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unification step budget of {0} exhausted")]
pub struct BudgetExhausted(pub u64);

pub const DEFAULT_BUDGET: u64 = 1_000_000;

struct Pending {
    subst: Subst,
    eqs: Vec<(Term, Term)>,
    residual: Vec<(Term, Term)>,
}

/// All branches of `a = b`; an empty result means the equation is unsatisfiable.
pub fn unify(a: &Term, b: &Term, gen: &mut VarGen) -> Vec<UnifyBranch> {
    unify_with_budget(a, b, gen, DEFAULT_BUDGET).expect("unification budget")
}

pub fn unify_with_budget(
    a: &Term,
    b: &Term,
    gen: &mut VarGen,
    budget: u64,
) -> Result<Vec<UnifyBranch>, BudgetExhausted> {
    let mut steps = 0u64;
    let mut out = Vec::new();
    let mut stack = vec![Pending {
        subst: Subst::new(),
        eqs: vec![(a.clone(), b.clone())],
        residual: vec![],
    }];
    while let Some(mut p) = stack.pop() {
        steps += 1;
        if steps > budget {
            return Err(BudgetExhausted(budget));
        }
        let Some((l, r)) = p.eqs.pop() else {
            let residual = p
                .residual
                .iter()
                .map(|(x, y)| (p.subst.apply(x), p.subst.apply(y)))
                .collect();
            out.push(UnifyBranch {
                subst: p.subst,
                residual,
            });
            continue;
        };
        let l = p.subst.apply(&l);
        let r = p.subst.apply(&r);
        // Children are pushed in reverse so that the first alternative is explored first.
        let mut children = step(l, r, p, gen);
        children.reverse();
        stack.extend(children);
    }
    Ok(out)
}

fn with_eqs(p: &Pending, eqs: Vec<(Term, Term)>) -> Pending {
    let mut q = Pending {
        subst: p.subst.clone(),
        eqs: p.eqs.clone(),
        residual: p.residual.clone(),
    };
    // Stack order: first equation in `eqs` handled first.
    q.eqs.extend(eqs.into_iter().rev());
    q
}

fn step(l: Term, r: Term, mut p: Pending, gen: &mut VarGen) -> Vec<Pending> {
    if l == r {
        return vec![p];
    }
    match (&l, &r) {
        (Term::Var(x), Term::Var(y)) => {
            let (from, to) = if x.id > y.id {
                (x.clone(), r.clone())
            } else {
                (y.clone(), l.clone())
            };
            p.subst.bind(from, to);
            vec![p]
        }
        (Term::Var(x), _) => bind_var(x.clone(), r, p, gen),
        (_, Term::Var(y)) => bind_var(y.clone(), l, p, gen),
        (Term::Arith(..), _) | (_, Term::Arith(..)) => arith_eq(l, r, p),
        (Term::Ris(_), _) | (_, Term::Ris(_)) => {
            if l.is_set_positioned() && r.is_set_positioned() {
                p.residual.push((l, r));
                vec![p]
            } else {
                vec![]
            }
        }
        (Term::Int(a), Term::Int(b)) => keep_if(a == b, p),
        (Term::Atom(a), Term::Atom(b)) => keep_if(a == b, p),
        (Term::Tuple(xs), Term::Tuple(ys)) if xs.len() == ys.len() => {
            let eqs = xs.iter().cloned().zip(ys.iter().cloned()).collect();
            vec![with_eqs(&p, eqs)]
        }
        (Term::Ctor(f, xs), Term::Ctor(g, ys)) if f == g && xs.len() == ys.len() => {
            let eqs = xs.iter().cloned().zip(ys.iter().cloned()).collect();
            vec![with_eqs(&p, eqs)]
        }
        (Term::SetCons(..), Term::SetCons(..)) => set_eq(&l, &r, p, gen),
        _ => vec![],
    }
}

fn keep_if(ok: bool, p: Pending) -> Vec<Pending> {
    if ok {
        vec![p]
    } else {
        vec![]
    }
}

fn arith_eq(l: Term, r: Term, mut p: Pending) -> Vec<Pending> {
    if let (Some(a), Some(b)) = (ground::eval_int(&l), ground::eval_int(&r)) {
        return keep_if(a == b, p);
    }
    let int_like = |t: &Term| matches!(t, Term::Int(_) | Term::Arith(..) | Term::Var(_));
    if int_like(&l) && int_like(&r) {
        p.residual.push((l, r));
        vec![p]
    } else {
        vec![]
    }
}

fn bind_var(x: Var, t: Term, mut p: Pending, gen: &mut VarGen) -> Vec<Pending> {
    if let Term::Arith(..) = t {
        if let Some(v) = ground::eval_int(&t) {
            p.subst.bind(x, Term::Int(v));
        } else {
            p.residual.push((Term::Var(x), t));
        }
        return vec![p];
    }
    if !t.occurs(&x) {
        p.subst.bind(x, t);
        return vec![p];
    }
    if let Term::SetCons(..) = t {
        let (elems, tail) = t.set_parts();
        if tail.as_var() == Some(&x) && !elems.iter().any(|e| e.occurs(&x)) {
            // X = {t1..tn / X} holds iff X = {t1..tn / N} for some N.
            let n = gen.fresh("N");
            let value = Term::set_with_tail(elems.into_iter().cloned().collect(), Term::Var(n));
            p.subst.bind(x, value);
            return vec![p];
        }
    }
    if contains_ris(&t) {
        p.residual.push((Term::Var(x), t));
        return vec![p];
    }
    vec![]
}

fn contains_ris(t: &Term) -> bool {
    match t {
        Term::Ris(_) => true,
        Term::SetCons(e, r) => contains_ris(e) || contains_ris(r),
        Term::Tuple(ts) | Term::Ctor(_, ts) => ts.iter().any(contains_ris),
        _ => false,
    }
}

fn set_eq(l: &Term, r: &Term, p: Pending, gen: &mut VarGen) -> Vec<Pending> {
    if let (Some(a), Some(b)) = (ground::canon(l), ground::canon(r)) {
        return keep_if(a == b, p);
    }
    let (le, lt) = l.set_parts();
    let (re, rt) = r.set_parts();
    if let (Some(x), Some(y)) = (lt.as_var(), rt.as_var()) {
        if x == y {
            let le: Vec<Term> = le.into_iter().cloned().collect();
            let re: Vec<Term> = re.into_iter().cloned().collect();
            return same_tail(le, re, x.clone(), p, gen);
        }
    }
    let (Term::SetCons(t, s), Term::SetCons(t2, s2)) = (l, r) else {
        unreachable!()
    };
    let (t, s, t2, s2) = (t.as_ref(), s.as_ref(), t2.as_ref(), s2.as_ref());
    let n = Term::Var(gen.fresh("N"));
    vec![
        with_eqs(&p, vec![(t.clone(), t2.clone()), (s.clone(), s2.clone())]),
        with_eqs(&p, vec![(t.clone(), t2.clone()), (l.clone(), s2.clone())]),
        with_eqs(&p, vec![(t.clone(), t2.clone()), (s.clone(), r.clone())]),
        with_eqs(
            &p,
            vec![
                (s.clone(), Term::cons(t2.clone(), n.clone())),
                (s2.clone(), Term::cons(t.clone(), n)),
            ],
        ),
    ]
}

/// `{a0..am / X} = {b0..bn / X}`.
fn same_tail(a: Vec<Term>, b: Vec<Term>, x: Var, p: Pending, gen: &mut VarGen) -> Vec<Pending> {
    let xt = Term::Var(x.clone());
    if a.is_empty() || b.is_empty() {
        let elems = if a.is_empty() { b } else { a };
        let n = gen.fresh("N");
        return vec![with_eqs(
            &p,
            vec![(xt, Term::set_with_tail(elems, Term::Var(n)))],
        )];
    }
    let a0 = a[0].clone();
    let a_rest = Term::set_with_tail(a[1..].to_vec(), xt.clone());
    let a_all = Term::set_with_tail(a.clone(), xt.clone());
    let b_all = Term::set_with_tail(b.clone(), xt.clone());
    let mut out = Vec::new();
    for j in 0..b.len() {
        let mut b_wo = b.clone();
        let bj = b_wo.remove(j);
        let b_rest = Term::set_with_tail(b_wo, xt.clone());
        out.push(with_eqs(
            &p,
            vec![(a0.clone(), bj.clone()), (a_rest.clone(), b_rest.clone())],
        ));
        out.push(with_eqs(
            &p,
            vec![(a0.clone(), bj.clone()), (a_all.clone(), b_rest)],
        ));
        out.push(with_eqs(
            &p,
            vec![(a0.clone(), bj), (a_rest.clone(), b_all.clone())],
        ));
    }
    let n = Term::Var(gen.fresh("N"));
    out.push(with_eqs(
        &p,
        vec![
            (xt, Term::cons(a0, n.clone())),
            (
                Term::set_with_tail(a[1..].to_vec(), n.clone()),
                Term::set_with_tail(b, n),
            ),
        ],
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;

    fn term(s: &str) -> Term {
        crate::syntax::term_by_name(s)
    }

    fn gen() -> VarGen {
        VarGen::starting_at(1 << 24)
    }

    #[test]
    fn permutation_of_ground_sets() {
        let bs = unify(&term("{1,2}"), &term("{2,1}"), &mut gen());
        assert!(!bs.is_empty());
        assert!(bs.iter().all(|b| b.subst.is_empty()));
    }

    #[test]
    fn open_set_against_singleton() {
        let a = term("{X/A}");
        let bs = unify(&a, &term("{1/{}}"), &mut gen());
        let vars = a.free_vars();
        let sols: BTreeSet<(Term, Term)> = bs
            .iter()
            .map(|b| {
                let r = b.subst.restrict(&vars);
                let get = |n: &str| {
                    let v = vars.iter().find(|v| &*v.name == n).unwrap();
                    ground::canon(&r.apply(&Term::Var(v.clone()))).unwrap()
                };
                (get("X"), get("A"))
            })
            .collect();
        let expected: BTreeSet<(Term, Term)> = [(term("1"), term("{}")), (term("1"), term("{1}"))]
            .into_iter()
            .collect();
        assert_eq!(sols, expected);
    }

    #[test]
    fn singleton_is_not_doubleton() {
        assert!(unify(&term("{X/{}}"), &term("{1/{2/{}}}"), &mut gen()).is_empty());
    }

    #[test]
    fn occurs_check() {
        assert!(unify(&term("X"), &term("[X,1]"), &mut gen()).is_empty());
        assert!(unify(&term("X"), &term("{X}"), &mut gen()).is_empty());
    }

    #[test]
    fn rotation_of_tail_variable() {
        let x = term("X");
        let bs = unify(&x, &term("{1/X}"), &mut gen());
        assert_eq!(bs.len(), 1);
        let v = bs[0].subst.apply(&x);
        let (elems, tail) = v.set_parts();
        assert_eq!(elems, vec![&Term::int(1)]);
        assert!(tail.is_var() && *tail != x);
    }

    #[test]
    fn same_tail_terminates() {
        let bs = unify(&term("{a/X}"), &term("{b/X}"), &mut gen());
        assert!(!bs.is_empty());
        for b in &bs {
            let l = b.subst.apply(&term("{a/X}"));
            let r = b.subst.apply(&term("{b/X}"));
            // Completing the tail with {} must give equal ground sets.
            let close = |t: &Term| {
                let (es, _) = t.set_parts();
                ground::from_elems(es.into_iter().cloned().collect())
            };
            assert_eq!(close(&l), close(&r));
        }
    }

    #[test]
    fn tuples_and_ctors() {
        assert_eq!(unify(&term("[X,b]"), &term("[a,Y]"), &mut gen()).len(), 1);
        assert!(unify(&term("goodT(X)"), &term("badT(X)"), &mut gen()).is_empty());
        assert!(unify(&term("5"), &term("five"), &mut gen()).is_empty());
    }

    #[test]
    fn arithmetic_is_residual() {
        let bs = unify(&term("X"), &term("Y + 1"), &mut gen());
        assert_eq!(bs.len(), 1);
        assert_eq!(bs[0].residual.len(), 1);
        let bs = unify(&term("X"), &term("4 + 5"), &mut gen());
        assert_eq!(bs[0].subst.apply(&term("X")), Term::int(9));
    }
}
