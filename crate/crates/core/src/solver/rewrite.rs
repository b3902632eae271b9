//! Rewrite rules for the primitive constraints.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;

use super::SolveError;
use crate::arith::{self, ArithError, Rel};
use crate::ground;
use crate::ris;
use crate::term::{Formula, Prim, PrimOp, Subst, Term, VarGen};
use crate::unify::{self, UnifyBranch};

/// Result of rewriting one constraint.
pub(super) enum Rw {
    Fail,
    Done,
    /// Irreducible: keep it in the store.
    Solved,
    /// Reducible only by case analysis; expand once everything else is stable.
    Defer,
    /// Keep it in the store and check the arithmetic store.
    Arith,
    Goal(Formula),
    Unify(Vec<UnifyBranch>),
}

fn p(op: PrimOp, args: Vec<Term>) -> Formula {
    Formula::prim(op, args)
}

fn eq(a: Term, b: Term) -> Formula {
    Formula::eq(a, b)
}

fn neq(a: Term, b: Term) -> Formula {
    p(PrimOp::Neq, vec![a, b])
}

fn in_(a: Term, b: Term) -> Formula {
    p(PrimOp::In, vec![a, b])
}

fn nin(a: Term, b: Term) -> Formula {
    p(PrimOp::Nin, vec![a, b])
}

fn pair(a: &Term, b: &Term) -> Term {
    Term::pair(a.clone(), b.clone())
}

fn single(t: Term) -> Term {
    Term::cons(t, Term::Empty)
}

fn and(items: Vec<Formula>) -> Rw {
    Rw::Goal(Formula::conj(items))
}

fn fresh(gen: &mut VarGen, hint: &str) -> Term {
    Term::Var(gen.fresh(hint))
}

fn set_positions(op: PrimOp) -> &'static [usize] {
    match op {
        PrimOp::In | PrimOp::Nin => &[1],
        PrimOp::Un
        | PrimOp::Nun
        | PrimOp::Inters
        | PrimOp::Ninters
        | PrimOp::Comp
        | PrimOp::Ncomp => &[0, 1, 2],
        PrimOp::Subset
        | PrimOp::Nsubset
        | PrimOp::Disj
        | PrimOp::Ndisj
        | PrimOp::Dom
        | PrimOp::Ran => &[0, 1],
        PrimOp::Pfun | PrimOp::Apply => &[0],
        _ => &[],
    }
}

/// Argument positions that must hold sets.
pub(super) fn set_args(prim: &Prim) -> impl Iterator<Item = &Term> {
    set_positions(prim.op).iter().map(move |&i| &prim.args[i])
}

/// Positions where a RIS with a known domain is unfolded before the rule applies.
fn unfold_positions(op: PrimOp) -> &'static [usize] {
    match op {
        PrimOp::Subset => &[0],
        PrimOp::In | PrimOp::Nin => &[],
        _ => set_positions(op),
    }
}

fn is_var_like(t: &Term) -> bool {
    ris::is_variable_like(t)
}

fn shape(t: &Term) -> Shape<'_> {
    match t {
        Term::Empty => Shape::Empty,
        Term::SetCons(e, r) => Shape::Cons(e, r),
        _ if is_var_like(t) => Shape::VarLike,
        _ => Shape::Other,
    }
}

enum Shape<'a> {
    Empty,
    Cons(&'a Term, &'a Term),
    VarLike,
    Other,
}

fn all_ground(args: &[Term]) -> bool {
    args.iter().all(Term::is_ground)
}

pub(super) fn rewrite(prim: &Prim, gen: &mut VarGen) -> Result<Rw, SolveError> {
    let args = &prim.args;
    for t in set_args(prim) {
        if !t.is_set_positioned() {
            return Err(SolveError::NotASet(t.clone()));
        }
    }
    if all_ground(args) {
        if let Some(v) = ground::eval_prim(prim.op, args) {
            return Ok(if v { Rw::Done } else { Rw::Fail });
        }
    }
    for &i in unfold_positions(prim.op) {
        if let Some(alts) = ris::unfold(&args[i]) {
            let alts = alts?;
            let branches = alts
                .into_iter()
                .map(|(cond, t)| {
                    let mut a = args.clone();
                    a[i] = t;
                    Formula::and(cond, p(prim.op, a))
                })
                .collect();
            return Ok(Rw::Goal(Formula::disj(branches)));
        }
    }
    let a = |i: usize| args[i].clone();
    match prim.op {
        PrimOp::Eq => eq_rule(&args[0], &args[1], gen),
        PrimOp::Neq => neq_rule(&args[0], &args[1], gen),
        PrimOp::In => in_rule(&args[0], &args[1], gen),
        PrimOp::Nin => nin_rule(&args[0], &args[1]),
        PrimOp::Un => Ok(un_rule(&args[0], &args[1], &args[2], gen)),
        PrimOp::Nun => {
            let z = fresh(gen, "Z");
            Ok(Rw::Goal(Formula::disj(vec![
                Formula::conj(vec![
                    in_(z.clone(), a(2)),
                    nin(z.clone(), a(0)),
                    nin(z.clone(), a(1)),
                ]),
                Formula::and(in_(z.clone(), a(0)), nin(z.clone(), a(2))),
                Formula::and(in_(z.clone(), a(1)), nin(z, a(2))),
            ])))
        }
        PrimOp::Inters => Ok(inters_rule(&args[0], &args[1], &args[2], gen)),
        PrimOp::Ninters => {
            let z = fresh(gen, "Z");
            Ok(Rw::Goal(Formula::or(
                Formula::and(
                    in_(z.clone(), a(2)),
                    Formula::or(nin(z.clone(), a(0)), nin(z.clone(), a(1))),
                ),
                Formula::conj(vec![
                    in_(z.clone(), a(0)),
                    in_(z.clone(), a(1)),
                    nin(z, a(2)),
                ]),
            )))
        }
        PrimOp::Subset => Ok(subset_rule(&args[0], &args[1])),
        PrimOp::Nsubset => {
            let z = fresh(gen, "Z");
            Ok(and(vec![in_(z.clone(), a(0)), nin(z, a(1))]))
        }
        PrimOp::Disj => Ok(disj_rule(&args[0], &args[1])),
        PrimOp::Ndisj => {
            let z = fresh(gen, "Z");
            Ok(and(vec![in_(z.clone(), a(0)), in_(z, a(1))]))
        }
        PrimOp::Dom => Ok(proj_rule(true, &args[0], &args[1], gen)),
        PrimOp::Ran => Ok(proj_rule(false, &args[0], &args[1], gen)),
        PrimOp::Comp => Ok(comp_rule(&args[0], &args[1], &args[2], gen)),
        PrimOp::Ncomp => {
            let n = fresh(gen, "T");
            Ok(and(vec![
                p(PrimOp::Comp, vec![a(0), a(1), n.clone()]),
                neq(n, a(2)),
            ]))
        }
        PrimOp::Pfun => Ok(pfun_rule(&args[0], gen)),
        PrimOp::Apply => Ok(and(vec![
            p(PrimOp::Pfun, vec![a(0)]),
            in_(Term::pair(a(1), a(2)), a(0)),
        ])),
        PrimOp::Foreach => match &args[0] {
            Term::Ris(r) => Ok(Rw::Goal(ris::foreach_expand(r))),
            other => Err(SolveError::NotASet(other.clone())),
        },
        PrimOp::Lt | PrimOp::Le | PrimOp::Gt | PrimOp::Ge => {
            arith_rule(prim.op, &args[0], &args[1])
        }
    }
}

fn is_risish(t: &Term) -> bool {
    matches!(t, Term::Ris(_)) || ris::has_ris_tail(t)
}

fn eq_rule(a: &Term, b: &Term, gen: &mut VarGen) -> Result<Rw, SolveError> {
    if a == b {
        return Ok(Rw::Done);
    }
    if matches!(a, Term::Arith(..)) || matches!(b, Term::Arith(..)) {
        return arith_rule(PrimOp::Eq, a, b);
    }
    if is_risish(a) || is_risish(b) {
        return ris_eq(a, b, gen);
    }
    unify_rw(a, b, gen)
}

fn unify_rw(a: &Term, b: &Term, gen: &mut VarGen) -> Result<Rw, SolveError> {
    let branches = unify::unify_with_budget(a, b, gen, unify::DEFAULT_BUDGET)?;
    Ok(Rw::Unify(branches))
}

fn ris_eq(a: &Term, b: &Term, gen: &mut VarGen) -> Result<Rw, SolveError> {
    for (this, other, left) in [(a, b, true), (b, a, false)] {
        if let Some(alts) = ris::unfold_in_tail(this) {
            let branches = alts?
                .into_iter()
                .map(|(cond, t)| {
                    let e = if left {
                        eq(t, other.clone())
                    } else {
                        eq(other.clone(), t)
                    };
                    Formula::and(cond, e)
                })
                .collect();
            return Ok(Rw::Goal(Formula::disj(branches)));
        }
    }
    for (this, other) in [(a, b), (b, a)] {
        if let Term::Var(x) = this {
            if !other.occurs(x) {
                return unify_rw(this, other, gen);
            }
        }
    }
    if !a.is_set_positioned() || !b.is_set_positioned() {
        return Ok(Rw::Fail);
    }
    Ok(and(vec![
        p(PrimOp::Subset, vec![a.clone(), b.clone()]),
        p(PrimOp::Subset, vec![b.clone(), a.clone()]),
    ]))
}

/// Set extensionality: some element lies in exactly one of the two sets.
fn set_witness(a: &Term, b: &Term, gen: &mut VarGen) -> Formula {
    let z = fresh(gen, "Z");
    Formula::or(
        Formula::and(in_(z.clone(), a.clone()), nin(z.clone(), b.clone())),
        Formula::and(in_(z.clone(), b.clone()), nin(z, a.clone())),
    )
}

pub(super) fn neq_witness(a: &Term, b: &Term, gen: &mut VarGen) -> Formula {
    set_witness(a, b, gen)
}

pub(super) fn neq_arith(a: &Term, b: &Term) -> Formula {
    Formula::or(
        p(PrimOp::Lt, vec![a.clone(), b.clone()]),
        p(PrimOp::Gt, vec![a.clone(), b.clone()]),
    )
}

fn neq_rule(a: &Term, b: &Term, gen: &mut VarGen) -> Result<Rw, SolveError> {
    if a == b {
        return Ok(Rw::Fail);
    }
    if matches!(a, Term::Arith(..)) || matches!(b, Term::Arith(..)) {
        return Ok(Rw::Goal(neq_arith(a, b)));
    }
    let (a, b) = if b.is_var() && !a.is_var() {
        (b, a)
    } else {
        (a, b)
    };
    if let Term::Var(x) = a {
        if let Term::SetCons(..) = b {
            let (elems, tail) = b.set_parts();
            if tail.as_var() == Some(x) && !elems.iter().any(|e| e.occurs(x)) {
                // X neq {t1..tn / X} iff some ti is not in X.
                let alts = elems
                    .into_iter()
                    .map(|e| nin(e.clone(), a.clone()))
                    .collect();
                return Ok(Rw::Goal(Formula::disj(alts)));
            }
        }
        if b.occurs(x) && !is_risish(b) {
            return Ok(Rw::Done);
        }
        return Ok(Rw::Solved);
    }
    if is_risish(a) || is_risish(b) {
        if a.is_set_positioned() && b.is_set_positioned() {
            return Ok(Rw::Goal(set_witness(a, b, gen)));
        }
        return Ok(Rw::Done);
    }
    Ok(match (a, b) {
        (Term::Tuple(xs), Term::Tuple(ys)) | (Term::Ctor(_, xs), Term::Ctor(_, ys))
            if xs.len() == ys.len() && same_functor(a, b) =>
        {
            let alts = xs
                .iter()
                .zip(ys)
                .map(|(x, y)| neq(x.clone(), y.clone()))
                .collect();
            Rw::Goal(Formula::disj(alts))
        }
        (Term::SetCons(..), Term::SetCons(..)) => Rw::Goal(set_witness(a, b, gen)),
        _ => {
            if let (Some(x), Some(y)) = (ground::canon(a), ground::canon(b)) {
                if x == y {
                    Rw::Fail
                } else {
                    Rw::Done
                }
            } else {
                // Different functors, or a set against a non-set.
                Rw::Done
            }
        }
    })
}

fn same_functor(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Tuple(_), Term::Tuple(_)) => true,
        (Term::Ctor(f, _), Term::Ctor(g, _)) => f == g,
        _ => false,
    }
}

fn in_rule(t: &Term, s: &Term, gen: &mut VarGen) -> Result<Rw, SolveError> {
    match s {
        Term::Empty => Ok(Rw::Fail),
        Term::SetCons(u, r) => {
            if **u == *t {
                return Ok(Rw::Done);
            }
            Ok(Rw::Goal(Formula::or(
                eq(t.clone(), (**u).clone()),
                in_(t.clone(), (**r).clone()),
            )))
        }
        Term::Var(x) => {
            if t.occurs(x) {
                return Ok(Rw::Fail);
            }
            let n = fresh(gen, "N");
            unify_rw(s, &Term::cons(t.clone(), n), gen)
        }
        Term::Ris(r) => Ok(Rw::Goal(ris::member(t, r)?)),
        other => Err(SolveError::NotASet(other.clone())),
    }
}

fn nin_rule(t: &Term, s: &Term) -> Result<Rw, SolveError> {
    match s {
        Term::Empty => Ok(Rw::Done),
        Term::SetCons(u, r) => Ok(and(vec![
            neq(t.clone(), (**u).clone()),
            nin(t.clone(), (**r).clone()),
        ])),
        Term::Var(x) => Ok(if t.occurs(x) { Rw::Done } else { Rw::Solved }),
        Term::Ris(r) => Ok(Rw::Goal(ris::non_member(t, r)?)),
        other => Err(SolveError::NotASet(other.clone())),
    }
}

fn un_rule(a: &Term, b: &Term, c: &Term, gen: &mut VarGen) -> Rw {
    if let (Some(ea), Some(eb)) = (ground::elems(a), ground::elems(b)) {
        let mut all = ea;
        all.extend(eb);
        return Rw::Goal(eq(c.clone(), ground::from_elems(all)));
    }
    match (shape(a), shape(b), shape(c)) {
        (_, _, Shape::Empty) => and(vec![eq(a.clone(), Term::Empty), eq(b.clone(), Term::Empty)]),
        (Shape::Empty, _, _) => Rw::Goal(eq(b.clone(), c.clone())),
        (_, Shape::Empty, _) => Rw::Goal(eq(a.clone(), c.clone())),
        _ if a == b => Rw::Goal(eq(a.clone(), c.clone())),
        (Shape::Cons(t, _), _, _) => un_cons(a, t, b, c, gen),
        (_, Shape::Cons(t, _), _) => un_cons(b, t, a, c, gen),
        (Shape::VarLike, Shape::VarLike, Shape::Cons(t, _)) => {
            let (n, n1, n2) = (fresh(gen, "N"), fresh(gen, "N"), fresh(gen, "N"));
            let t = t.clone();
            let cons = |x: &Term| Term::cons(t.clone(), x.clone());
            let un =
                |x: &Term, y: &Term, z: &Term| p(PrimOp::Un, vec![x.clone(), y.clone(), z.clone()]);
            and(vec![
                eq(c.clone(), cons(&n)),
                nin(t.clone(), n.clone()),
                Formula::disj(vec![
                    Formula::conj(vec![
                        eq(a.clone(), cons(&n1)),
                        nin(t.clone(), n1.clone()),
                        nin(t.clone(), b.clone()),
                        un(&n1, b, &n),
                    ]),
                    Formula::conj(vec![
                        nin(t.clone(), a.clone()),
                        eq(b.clone(), cons(&n1)),
                        nin(t.clone(), n1.clone()),
                        un(a, &n1, &n),
                    ]),
                    Formula::conj(vec![
                        eq(a.clone(), cons(&n1)),
                        nin(t.clone(), n1.clone()),
                        eq(b.clone(), cons(&n2)),
                        nin(t.clone(), n2.clone()),
                        un(&n1, &n2, &n),
                    ]),
                ]),
            ])
        }
        _ => Rw::Solved,
    }
}

/// `un({t/S}, b, c)`.
fn un_cons(a: &Term, t: &Term, b: &Term, c: &Term, gen: &mut VarGen) -> Rw {
    let (n, n1, n2) = (fresh(gen, "N"), fresh(gen, "N"), fresh(gen, "N"));
    let cons = |x: &Term| Term::cons(t.clone(), x.clone());
    let un = |x: &Term, y: &Term, z: &Term| p(PrimOp::Un, vec![x.clone(), y.clone(), z.clone()]);
    and(vec![
        eq(a.clone(), cons(&n1)),
        nin(t.clone(), n1.clone()),
        eq(c.clone(), cons(&n)),
        nin(t.clone(), n.clone()),
        Formula::or(
            Formula::and(nin(t.clone(), b.clone()), un(&n1, b, &n)),
            Formula::conj(vec![
                eq(b.clone(), cons(&n2)),
                nin(t.clone(), n2.clone()),
                un(&n1, &n2, &n),
            ]),
        ),
    ])
}

fn inters_rule(a: &Term, b: &Term, c: &Term, gen: &mut VarGen) -> Rw {
    if let (Some(ea), Some(eb)) = (ground::elems(a), ground::elems(b)) {
        let common = ea
            .into_iter()
            .filter(|x| eb.binary_search(x).is_ok())
            .collect();
        return Rw::Goal(eq(c.clone(), ground::from_elems(common)));
    }
    if matches!(a, Term::Empty) || matches!(b, Term::Empty) {
        return Rw::Goal(eq(c.clone(), Term::Empty));
    }
    if a == b {
        return Rw::Goal(eq(c.clone(), a.clone()));
    }
    let (a1, b1) = (fresh(gen, "A"), fresh(gen, "B"));
    and(vec![
        p(PrimOp::Un, vec![c.clone(), a1.clone(), a.clone()]),
        p(PrimOp::Un, vec![c.clone(), b1.clone(), b.clone()]),
        p(PrimOp::Disj, vec![a1, b1]),
    ])
}

fn subset_rule(a: &Term, b: &Term) -> Rw {
    if a == b {
        return Rw::Done;
    }
    match shape(a) {
        Shape::Empty => Rw::Done,
        Shape::Cons(t, s) => and(vec![
            in_(t.clone(), b.clone()),
            p(PrimOp::Subset, vec![s.clone(), b.clone()]),
        ]),
        _ => match (a, b) {
            (Term::Var(_), Term::Empty) => Rw::Goal(eq(a.clone(), Term::Empty)),
            _ => Rw::Solved,
        },
    }
}

fn disj_rule(a: &Term, b: &Term) -> Rw {
    match (shape(a), shape(b)) {
        (Shape::Empty, _) | (_, Shape::Empty) => Rw::Done,
        (Shape::Cons(t, s), _) => and(vec![
            nin(t.clone(), b.clone()),
            p(PrimOp::Disj, vec![s.clone(), b.clone()]),
        ]),
        (_, Shape::Cons(t, s)) => and(vec![
            nin(t.clone(), a.clone()),
            p(PrimOp::Disj, vec![a.clone(), s.clone()]),
        ]),
        _ if a == b => match a {
            Term::Var(_) => Rw::Goal(eq(a.clone(), Term::Empty)),
            _ => Rw::Goal(p(PrimOp::Subset, vec![a.clone(), Term::Empty])),
        },
        _ => Rw::Solved,
    }
}

fn proj_op(dom: bool) -> PrimOp {
    if dom {
        PrimOp::Dom
    } else {
        PrimOp::Ran
    }
}

/// `dom(r, d)` when `dom` holds, `ran(r, d)` otherwise.
fn proj_rule(dom: bool, r: &Term, d: &Term, gen: &mut VarGen) -> Rw {
    if let Some(es) = ground::elems(r) {
        let mut out = Vec::new();
        for e in es {
            match e {
                Term::Tuple(ts) if ts.len() == 2 => {
                    out.push(if dom { ts[0].clone() } else { ts[1].clone() })
                }
                _ => return Rw::Fail,
            }
        }
        return Rw::Goal(eq(d.clone(), ground::from_elems(out)));
    }
    match (shape(r), shape(d)) {
        (Shape::Empty, _) => Rw::Goal(eq(d.clone(), Term::Empty)),
        (_, Shape::Empty) => Rw::Goal(eq(r.clone(), Term::Empty)),
        (Shape::Cons(pr, rest), _) => {
            let (x, y, d1) = (fresh(gen, "X"), fresh(gen, "Y"), fresh(gen, "D"));
            let key = if dom { x.clone() } else { y.clone() };
            and(vec![
                eq(pr.clone(), pair(&x, &y)),
                eq(d.clone(), Term::cons(key, d1.clone())),
                p(proj_op(dom), vec![rest.clone(), d1]),
            ])
        }
        (_, Shape::Cons(..)) => Rw::Defer,
        _ => Rw::Solved,
    }
}

fn comp(r: Term, s: Term, t: Term) -> Formula {
    p(PrimOp::Comp, vec![r, s, t])
}

fn comp_rule(r: &Term, s: &Term, t: &Term, gen: &mut VarGen) -> Rw {
    if let (Some(er), Some(es)) = (ground::elems(r), ground::elems(s)) {
        let mut out = Vec::new();
        for x in &er {
            let Term::Tuple(xs) = x else { return Rw::Fail };
            if xs.len() != 2 {
                return Rw::Fail;
            }
            for y in &es {
                let Term::Tuple(ys) = y else { return Rw::Fail };
                if ys.len() != 2 {
                    return Rw::Fail;
                }
                if xs[1] == ys[0] {
                    out.push(pair(&xs[0], &ys[1]));
                }
            }
        }
        if er.is_empty() {
            // Pairs of `s` are still checked above only when `r` has elements.
            for y in &es {
                if !matches!(y, Term::Tuple(ys) if ys.len() == 2) {
                    return Rw::Fail;
                }
            }
        }
        return Rw::Goal(eq(t.clone(), ground::from_elems(out)));
    }
    match (shape(r), shape(s)) {
        (Shape::Empty, _) | (_, Shape::Empty) => Rw::Goal(eq(t.clone(), Term::Empty)),
        (Shape::Cons(pr, rest), _) => {
            if !matches!(rest, Term::Empty) {
                let (t0, t1) = (fresh(gen, "T"), fresh(gen, "T"));
                return and(vec![
                    comp(single(pr.clone()), s.clone(), t0.clone()),
                    comp(rest.clone(), s.clone(), t1.clone()),
                    p(PrimOp::Un, vec![t0, t1, t.clone()]),
                ]);
            }
            let (x, y) = (fresh(gen, "X"), fresh(gen, "Y"));
            let xy = single(pair(&x, &y));
            match (shape(s), shape(t)) {
                (Shape::Cons(q, s1), _) => {
                    let (u, w, t1) = (fresh(gen, "U"), fresh(gen, "W"), fresh(gen, "T"));
                    and(vec![
                        eq(pr.clone(), pair(&x, &y)),
                        eq(q.clone(), pair(&u, &w)),
                        Formula::or(
                            Formula::conj(vec![
                                eq(y.clone(), u.clone()),
                                eq(t.clone(), Term::cons(pair(&x, &w), t1.clone())),
                                comp(xy.clone(), s1.clone(), t1),
                            ]),
                            Formula::and(neq(y.clone(), u), comp(xy, s1.clone(), t.clone())),
                        ),
                    ])
                }
                (_, Shape::Empty) => {
                    let ds = fresh(gen, "D");
                    and(vec![
                        eq(pr.clone(), pair(&x, &y)),
                        p(PrimOp::Dom, vec![s.clone(), ds.clone()]),
                        nin(y, ds),
                    ])
                }
                (_, Shape::Cons(..)) => Rw::Defer,
                _ => Rw::Solved,
            }
        }
        (_, Shape::Cons(q, rest)) => {
            if !matches!(rest, Term::Empty) {
                let (t0, t1) = (fresh(gen, "T"), fresh(gen, "T"));
                return and(vec![
                    comp(r.clone(), single(q.clone()), t0.clone()),
                    comp(r.clone(), rest.clone(), t1.clone()),
                    p(PrimOp::Un, vec![t0, t1, t.clone()]),
                ]);
            }
            match shape(t) {
                Shape::Empty => {
                    let (u, w, rr) = (fresh(gen, "U"), fresh(gen, "W"), fresh(gen, "R"));
                    and(vec![
                        eq(q.clone(), pair(&u, &w)),
                        p(PrimOp::Ran, vec![r.clone(), rr.clone()]),
                        nin(u, rr),
                    ])
                }
                Shape::Cons(..) => Rw::Defer,
                _ => Rw::Solved,
            }
        }
        _ => match shape(t) {
            Shape::Cons(..) => Rw::Defer,
            _ => Rw::Solved,
        },
    }
}

fn pfun_rule(f: &Term, gen: &mut VarGen) -> Rw {
    match shape(f) {
        Shape::Empty => Rw::Done,
        Shape::Cons(pr, rest) => {
            let (x, y, g) = (fresh(gen, "X"), fresh(gen, "Y"), fresh(gen, "G"));
            and(vec![
                eq(pr.clone(), pair(&x, &y)),
                p(PrimOp::Pfun, vec![rest.clone()]),
                comp(single(pair(&x, &x)), rest.clone(), g.clone()),
                p(PrimOp::Subset, vec![g, single(pair(&x, &y))]),
            ])
        }
        _ => Rw::Solved,
    }
}

fn arith_rule(op: PrimOp, a: &Term, b: &Term) -> Result<Rw, SolveError> {
    let c = match arith::constraint(op, a, b) {
        Ok(c) => c,
        Err(ArithError::NotInteger(_)) => return Ok(Rw::Fail),
        Err(ArithError::Nonlinear(_)) => return Ok(Rw::Defer),
    };
    if c.expr.is_constant() {
        let holds = c.holds(&Default::default()).unwrap_or(false);
        return Ok(if holds { Rw::Done } else { Rw::Fail });
    }
    if c.rel == Rel::Eq && c.expr.coeffs.len() == 1 {
        let (v, k) = c.expr.coeffs.iter().next().unwrap();
        let value: BigRational = -&c.expr.constant / k;
        if !value.is_integer() {
            return Ok(Rw::Fail);
        }
        let mut subst = Subst::new();
        subst.insert_raw(v.clone(), Term::Int(value.to_integer()));
        return Ok(Rw::Unify(vec![UnifyBranch {
            subst,
            residual: vec![],
        }]));
    }
    Ok(Rw::Arith)
}

/// Case analysis for a deferred constraint; a nonlinear arithmetic
/// constraint that is still stuck is reported.
pub(super) fn expand_deferred(prim: &Prim, gen: &mut VarGen) -> Result<Formula, SolveError> {
    let args = &prim.args;
    let a = |i: usize| args[i].clone();
    match prim.op {
        PrimOp::Dom | PrimOp::Ran => {
            let dom = prim.op == PrimOp::Dom;
            let Shape::Cons(x, _) = shape(&args[1]) else {
                unreachable!("deferred projection")
            };
            let x = x.clone();
            let (d3, y, r1) = (fresh(gen, "D"), fresh(gen, "Y"), fresh(gen, "R"));
            let (rx, ro, dx) = (fresh(gen, "R"), fresh(gen, "R"), fresh(gen, "D"));
            let first = if dom { pair(&x, &y) } else { pair(&y, &x) };
            Ok(Formula::conj(vec![
                eq(a(1), Term::cons(x.clone(), d3.clone())),
                nin(x.clone(), d3.clone()),
                eq(a(0), Term::cons(first, r1.clone())),
                p(PrimOp::Un, vec![rx.clone(), ro.clone(), r1]),
                p(proj_op(dom), vec![ro, d3]),
                p(proj_op(dom), vec![rx, dx.clone()]),
                p(PrimOp::Subset, vec![dx, single(x)]),
            ]))
        }
        PrimOp::Comp => {
            let (r, s, t) = (&args[0], &args[1], &args[2]);
            if let Shape::Cons(pr, _) = shape(r) {
                // {[X,Y]} ; S = T with S open: T = {X} x {w : [Y,w] in S}.
                let (x, y) = (fresh(gen, "X"), fresh(gen, "Y"));
                let (sy, so, dy, d_o, w, dt) = (
                    fresh(gen, "S"),
                    fresh(gen, "S"),
                    fresh(gen, "D"),
                    fresh(gen, "D"),
                    fresh(gen, "W"),
                    fresh(gen, "D"),
                );
                return Ok(Formula::conj(vec![
                    eq(pr.clone(), pair(&x, &y)),
                    p(PrimOp::Un, vec![sy.clone(), so.clone(), s.clone()]),
                    p(PrimOp::Dom, vec![sy.clone(), dy.clone()]),
                    p(PrimOp::Subset, vec![dy, single(y.clone())]),
                    p(PrimOp::Dom, vec![so, d_o.clone()]),
                    nin(y, d_o),
                    p(PrimOp::Ran, vec![sy, w.clone()]),
                    p(PrimOp::Ran, vec![t.clone(), w]),
                    p(PrimOp::Dom, vec![t.clone(), dt.clone()]),
                    p(PrimOp::Subset, vec![dt, single(x)]),
                ]));
            }
            if let Shape::Cons(q, _) = shape(s) {
                let (u, w) = (fresh(gen, "U"), fresh(gen, "W"));
                let (ru, ro, rr, ror, dx, rt) = (
                    fresh(gen, "R"),
                    fresh(gen, "R"),
                    fresh(gen, "R"),
                    fresh(gen, "R"),
                    fresh(gen, "D"),
                    fresh(gen, "R"),
                );
                return Ok(Formula::conj(vec![
                    eq(q.clone(), pair(&u, &w)),
                    p(PrimOp::Un, vec![ru.clone(), ro.clone(), r.clone()]),
                    p(PrimOp::Ran, vec![ru.clone(), rr.clone()]),
                    p(PrimOp::Subset, vec![rr, single(u.clone())]),
                    p(PrimOp::Ran, vec![ro, ror.clone()]),
                    nin(u, ror),
                    p(PrimOp::Dom, vec![ru, dx.clone()]),
                    p(PrimOp::Dom, vec![t.clone(), dx]),
                    p(PrimOp::Ran, vec![t.clone(), rt.clone()]),
                    p(PrimOp::Subset, vec![rt, single(w)]),
                ]));
            }
            // Both relations open: the first pair of T has a witness in each.
            let Shape::Cons(first, _) = shape(t) else {
                unreachable!("deferred composition")
            };
            let (x, y, z) = (fresh(gen, "X"), fresh(gen, "Y"), fresh(gen, "Z"));
            Ok(Formula::conj(vec![
                eq(first.clone(), pair(&x, &z)),
                in_(pair(&x, &y), r.clone()),
                in_(pair(&y, &z), s.clone()),
                comp(r.clone(), s.clone(), t.clone()),
            ]))
        }
        _ => {
            let bad = match arith::constraint(
                if prim.op == PrimOp::Eq {
                    PrimOp::Eq
                } else {
                    prim.op
                },
                &args[0],
                &args[1],
            ) {
                Err(ArithError::Nonlinear(t)) => t,
                _ => Term::Tuple(vec![a(0), a(1)]),
            };
            Err(SolveError::Nonlinear(bad))
        }
    }
}
