//! Terms, formulas and substitutions.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::hash::{Hash, Hasher};

use num_bigint::BigInt;

/// A logic variable. Identity is the numeric id; the name is only used for printing.
#[derive(Clone, Debug)]
pub struct Var {
    pub id: u32,
    pub name: Arc<str>,
}

impl Var {
    pub fn new(id: u32, name: &str) -> Self {
        Var {
            id,
            name: Arc::from(name),
        }
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for Var {}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        self.id.cmp(&other.id)
    }
}

impl Hash for Var {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.id.hash(state)
    }
}

/// Issues variable ids. One generator per parse and one per search; ids
/// from a search generator start above every id already present in the goal.
#[derive(Clone, Debug, Default)]
pub struct VarGen {
    next: u32,
}

impl VarGen {
    pub fn new() -> Self {
        VarGen { next: 0 }
    }

    pub fn starting_at(next: u32) -> Self {
        VarGen { next }
    }

    pub fn peek(&self) -> u32 {
        self.next
    }

    /// A fresh variable whose printable name is derived from `hint`.
    pub fn fresh(&mut self, hint: &str) -> Var {
        let id = self.next;
        self.next += 1;
        Var {
            id,
            name: Arc::from(format!("_{hint}{id}").as_str()),
        }
    }

    /// A fresh variable that keeps `name` verbatim (used for parsed user variables).
    pub fn named(&mut self, name: &str) -> Var {
        let id = self.next;
        self.next += 1;
        Var::new(id, name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    Int(BigInt),
    Atom(Arc<str>),
    /// Ordered tuple, at least two components.
    Tuple(Vec<Term>),
    /// Free-constructor application such as `goodT(T)`.
    Ctor(Arc<str>, Vec<Term>),
    Empty,
    /// `{elem / rest}`, denoting `{elem} ∪ rest`.
    SetCons(Box<Term>, Box<Term>),
    Ris(Box<Ris>),
    /// Integer arithmetic expression; only meaningful inside arithmetic constraints.
    Arith(ArithOp, Box<Term>, Box<Term>),
}

/// Restricted intensional set `ris(X in A, filter)` = `{x : x ∈ A ∧ filter}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ris {
    pub bound: Var,
    pub domain: Term,
    pub filter: Formula,
}

impl Term {
    pub fn var(v: &Var) -> Term {
        Term::Var(v.clone())
    }

    pub fn int(i: i64) -> Term {
        Term::Int(BigInt::from(i))
    }

    pub fn atom(name: &str) -> Term {
        Term::Atom(Arc::from(name))
    }

    pub fn tuple(items: Vec<Term>) -> Term {
        Term::Tuple(items)
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Tuple(vec![a, b])
    }

    pub fn ctor(name: &str, args: Vec<Term>) -> Term {
        Term::Ctor(Arc::from(name), args)
    }

    pub fn cons(elem: Term, rest: Term) -> Term {
        Term::SetCons(Box::new(elem), Box::new(rest))
    }

    /// Extensional set with the given elements (in order) and tail.
    pub fn set_with_tail(elems: Vec<Term>, tail: Term) -> Term {
        elems
            .into_iter()
            .rev()
            .fold(tail, |acc, e| Term::cons(e, acc))
    }

    pub fn set(elems: Vec<Term>) -> Term {
        Term::set_with_tail(elems, Term::Empty)
    }

    pub fn ris(bound: Var, domain: Term, filter: Formula) -> Term {
        Term::Ris(Box::new(Ris {
            bound,
            domain,
            filter,
        }))
    }

    pub fn arith(op: ArithOp, a: Term, b: Term) -> Term {
        Term::Arith(op, Box::new(a), Box::new(b))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// Variable, `{}`, extensional set or RIS.
    pub fn is_set_positioned(&self) -> bool {
        matches!(
            self,
            Term::Var(_) | Term::Empty | Term::SetCons(..) | Term::Ris(_)
        )
    }

    /// Nonvariable set term.
    pub fn is_set_term(&self) -> bool {
        matches!(self, Term::Empty | Term::SetCons(..) | Term::Ris(_))
    }

    /// Splits an extensional chain into its elements and its tail.
    pub fn set_parts(&self) -> (Vec<&Term>, &Term) {
        let mut elems = Vec::new();
        let mut cur = self;
        while let Term::SetCons(e, r) = cur {
            elems.push(e.as_ref());
            cur = r;
        }
        (elems, cur)
    }

    pub fn is_ground(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Free variables, excluding RIS-bound ones.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Int(_) | Term::Atom(_) | Term::Empty => {}
            Term::Tuple(ts) | Term::Ctor(_, ts) => ts.iter().for_each(|t| t.collect_vars(out)),
            Term::SetCons(e, r) => {
                e.collect_vars(out);
                r.collect_vars(out);
            }
            Term::Arith(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Ris(r) => {
                r.domain.collect_vars(out);
                let mut inner = BTreeSet::new();
                r.filter.collect_vars(&mut inner);
                inner.remove(&r.bound);
                out.extend(inner);
            }
        }
    }

    pub fn occurs(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::Int(_) | Term::Atom(_) | Term::Empty => false,
            Term::Tuple(ts) | Term::Ctor(_, ts) => ts.iter().any(|t| t.occurs(v)),
            Term::SetCons(e, r) => e.occurs(v) || r.occurs(v),
            Term::Arith(_, a, b) => a.occurs(v) || b.occurs(v),
            Term::Ris(r) => {
                r.domain.occurs(v) || (r.bound != *v && r.filter.free_vars().contains(v))
            }
        }
    }

    /// Number of constructors; used as a termination measure in tests.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Int(_) | Term::Atom(_) | Term::Empty => 1,
            Term::Tuple(ts) | Term::Ctor(_, ts) => 1 + ts.iter().map(Term::size).sum::<usize>(),
            Term::SetCons(e, r) => 1 + e.size() + r.size(),
            Term::Arith(_, a, b) => 1 + a.size() + b.size(),
            Term::Ris(r) => 1 + r.domain.size(),
        }
    }

    /// Replaces variables by the terms in `map` without chasing bindings further.
    pub fn rename(&self, map: &BTreeMap<Var, Term>) -> Term {
        match self {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Int(_) | Term::Atom(_) | Term::Empty => self.clone(),
            Term::Tuple(ts) => Term::Tuple(ts.iter().map(|t| t.rename(map)).collect()),
            Term::Ctor(n, ts) => Term::Ctor(n.clone(), ts.iter().map(|t| t.rename(map)).collect()),
            Term::SetCons(e, r) => Term::cons(e.rename(map), r.rename(map)),
            Term::Arith(op, a, b) => Term::arith(*op, a.rename(map), b.rename(map)),
            Term::Ris(r) => {
                if map.contains_key(&r.bound) {
                    let mut inner = map.clone();
                    inner.remove(&r.bound);
                    Term::ris(
                        r.bound.clone(),
                        r.domain.rename(map),
                        r.filter.rename(&inner),
                    )
                } else {
                    Term::ris(r.bound.clone(), r.domain.rename(map), r.filter.rename(map))
                }
            }
        }
    }

    /// Renames every variable, including RIS-bound ones, to fresh ids.
    pub fn rename_apart(&self, map: &mut BTreeMap<Var, Term>, gen: &mut VarGen) -> Term {
        match self {
            Term::Var(v) => map
                .entry(v.clone())
                .or_insert_with(|| Term::Var(gen.fresh(hint_of(&v.name))))
                .clone(),
            Term::Int(_) | Term::Atom(_) | Term::Empty => self.clone(),
            Term::Tuple(ts) => Term::Tuple(ts.iter().map(|t| t.rename_apart(map, gen)).collect()),
            Term::Ctor(n, ts) => Term::Ctor(
                n.clone(),
                ts.iter().map(|t| t.rename_apart(map, gen)).collect(),
            ),
            Term::SetCons(e, r) => Term::cons(e.rename_apart(map, gen), r.rename_apart(map, gen)),
            Term::Arith(op, a, b) => {
                Term::arith(*op, a.rename_apart(map, gen), b.rename_apart(map, gen))
            }
            Term::Ris(r) => {
                let domain = r.domain.rename_apart(map, gen);
                let bound = gen.fresh(hint_of(&r.bound.name));
                let saved = map.insert(r.bound.clone(), Term::Var(bound.clone()));
                let filter = r.filter.rename_apart(map, gen);
                match saved {
                    Some(s) => map.insert(r.bound.clone(), s),
                    None => map.remove(&r.bound),
                };
                Term::ris(bound, domain, filter)
            }
        }
    }
}

fn hint_of(name: &str) -> &str {
    let trimmed = name.trim_start_matches('_');
    let end = trimmed
        .find(|c: char| c.is_ascii_digit())
        .unwrap_or(trimmed.len());
    let hint = &trimmed[..end];
    if hint.is_empty() {
        "G"
    } else {
        hint
    }
}

/// The fixed constraint vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrimOp {
    Eq,
    Neq,
    In,
    Nin,
    Un,
    Nun,
    Inters,
    Ninters,
    Subset,
    Nsubset,
    Disj,
    Ndisj,
    Dom,
    Ran,
    Comp,
    Ncomp,
    Pfun,
    Apply,
    Foreach,
    Lt,
    Le,
    Gt,
    Ge,
}

impl PrimOp {
    pub const ALL: [PrimOp; 23] = [
        PrimOp::Eq,
        PrimOp::Neq,
        PrimOp::In,
        PrimOp::Nin,
        PrimOp::Un,
        PrimOp::Nun,
        PrimOp::Inters,
        PrimOp::Ninters,
        PrimOp::Subset,
        PrimOp::Nsubset,
        PrimOp::Disj,
        PrimOp::Ndisj,
        PrimOp::Dom,
        PrimOp::Ran,
        PrimOp::Comp,
        PrimOp::Ncomp,
        PrimOp::Pfun,
        PrimOp::Apply,
        PrimOp::Foreach,
        PrimOp::Lt,
        PrimOp::Le,
        PrimOp::Gt,
        PrimOp::Ge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PrimOp::Eq => "=",
            PrimOp::Neq => "neq",
            PrimOp::In => "in",
            PrimOp::Nin => "nin",
            PrimOp::Un => "un",
            PrimOp::Nun => "nun",
            PrimOp::Inters => "inters",
            PrimOp::Ninters => "ninters",
            PrimOp::Subset => "subset",
            PrimOp::Nsubset => "nsubset",
            PrimOp::Disj => "disj",
            PrimOp::Ndisj => "ndisj",
            PrimOp::Dom => "dom",
            PrimOp::Ran => "ran",
            PrimOp::Comp => "comp",
            PrimOp::Ncomp => "ncomp",
            PrimOp::Pfun => "pfun",
            PrimOp::Apply => "apply",
            PrimOp::Foreach => "foreach",
            PrimOp::Lt => "<",
            PrimOp::Le => "=<",
            PrimOp::Gt => ">",
            PrimOp::Ge => ">=",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            PrimOp::Pfun | PrimOp::Foreach => 1,
            PrimOp::Un
            | PrimOp::Nun
            | PrimOp::Inters
            | PrimOp::Ninters
            | PrimOp::Comp
            | PrimOp::Ncomp
            | PrimOp::Apply => 3,
            _ => 2,
        }
    }

    pub fn is_infix(self) -> bool {
        matches!(
            self,
            PrimOp::Eq
                | PrimOp::Neq
                | PrimOp::In
                | PrimOp::Nin
                | PrimOp::Lt
                | PrimOp::Le
                | PrimOp::Gt
                | PrimOp::Ge
        )
    }

    pub fn is_arith(self) -> bool {
        matches!(self, PrimOp::Lt | PrimOp::Le | PrimOp::Gt | PrimOp::Ge)
    }

    /// Prefix constraint names (`un`, `dom`, ...); infix operators are handled by the lexer.
    pub fn from_prefix_name(name: &str) -> Option<PrimOp> {
        PrimOp::ALL
            .iter()
            .copied()
            .find(|op| !op.is_infix() && op.name() == name)
    }

    /// The negated constraint, when the vocabulary has one.
    pub fn negation(self) -> Option<PrimOp> {
        Some(match self {
            PrimOp::Eq => PrimOp::Neq,
            PrimOp::Neq => PrimOp::Eq,
            PrimOp::In => PrimOp::Nin,
            PrimOp::Nin => PrimOp::In,
            PrimOp::Un => PrimOp::Nun,
            PrimOp::Nun => PrimOp::Un,
            PrimOp::Inters => PrimOp::Ninters,
            PrimOp::Ninters => PrimOp::Inters,
            PrimOp::Subset => PrimOp::Nsubset,
            PrimOp::Nsubset => PrimOp::Subset,
            PrimOp::Disj => PrimOp::Ndisj,
            PrimOp::Ndisj => PrimOp::Disj,
            PrimOp::Comp => PrimOp::Ncomp,
            PrimOp::Ncomp => PrimOp::Comp,
            PrimOp::Lt => PrimOp::Ge,
            PrimOp::Ge => PrimOp::Lt,
            PrimOp::Le => PrimOp::Gt,
            PrimOp::Gt => PrimOp::Le,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prim {
    pub op: PrimOp,
    pub args: Vec<Term>,
}

impl Prim {
    pub fn new(op: PrimOp, args: Vec<Term>) -> Self {
        Prim { op, args }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Prim(Prim),
    Call(Arc<str>, Vec<Term>),
    /// `delay(G, false)`.
    Delayed(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn prim(op: PrimOp, args: Vec<Term>) -> Formula {
        Formula::Prim(Prim::new(op, args))
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::prim(PrimOp::Eq, vec![a, b])
    }

    pub fn call(name: &str, args: Vec<Term>) -> Formula {
        Formula::Call(Arc::from(name), args)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// Right-nested conjunction; `True` when empty.
    pub fn conj(items: Vec<Formula>) -> Formula {
        let mut it = items.into_iter().rev();
        match it.next() {
            None => Formula::True,
            Some(last) => it.fold(last, |acc, f| Formula::and(f, acc)),
        }
    }

    /// Right-nested disjunction; `False` when empty.
    pub fn disj(items: Vec<Formula>) -> Formula {
        let mut it = items.into_iter().rev();
        match it.next() {
            None => Formula::False,
            Some(last) => it.fold(last, |acc, f| Formula::or(f, acc)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Prim(p) => p.args.iter().for_each(|t| t.collect_vars(out)),
            Formula::Call(_, args) => args.iter().for_each(|t| t.collect_vars(out)),
            Formula::Delayed(g) => g.collect_vars(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn rename(&self, map: &BTreeMap<Var, Term>) -> Formula {
        self.map_terms(&mut |t| t.rename(map))
    }

    pub fn rename_apart(&self, map: &mut BTreeMap<Var, Term>, gen: &mut VarGen) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Prim(p) => Formula::Prim(Prim::new(
                p.op,
                p.args.iter().map(|t| t.rename_apart(map, gen)).collect(),
            )),
            Formula::Call(n, args) => Formula::Call(
                n.clone(),
                args.iter().map(|t| t.rename_apart(map, gen)).collect(),
            ),
            Formula::Delayed(g) => Formula::Delayed(Box::new(g.rename_apart(map, gen))),
            Formula::And(a, b) => {
                let a = a.rename_apart(map, gen);
                Formula::and(a, b.rename_apart(map, gen))
            }
            Formula::Or(a, b) => {
                let a = a.rename_apart(map, gen);
                Formula::or(a, b.rename_apart(map, gen))
            }
        }
    }

    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Prim(p) => {
                Formula::Prim(Prim::new(p.op, p.args.iter().map(&mut *f).collect()))
            }
            Formula::Call(n, args) => Formula::Call(n.clone(), args.iter().map(&mut *f).collect()),
            Formula::Delayed(g) => Formula::Delayed(Box::new(g.map_terms(f))),
            Formula::And(a, b) => {
                let a = a.map_terms(f);
                Formula::and(a, b.map_terms(f))
            }
            Formula::Or(a, b) => {
                let a = a.map_terms(f);
                Formula::or(a, b.map_terms(f))
            }
        }
    }

    /// True when the formula mentions a clause call anywhere (including inside RIS filters).
    pub fn has_call(&self) -> bool {
        match self {
            Formula::Call(..) => true,
            Formula::True | Formula::False | Formula::Prim(_) => false,
            Formula::Delayed(g) => g.has_call(),
            Formula::And(a, b) | Formula::Or(a, b) => a.has_call() || b.has_call(),
        }
    }

    /// Negation expressed with negated constraints only; `None` when some
    /// primitive has no negated counterpart or the formula contains calls.
    pub fn negate(&self) -> Option<Formula> {
        Some(match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Prim(p) => Formula::Prim(Prim::new(p.op.negation()?, p.args.clone())),
            Formula::And(a, b) => Formula::or(a.negate()?, b.negate()?),
            Formula::Or(a, b) => Formula::and(a.negate()?, b.negate()?),
            Formula::Call(..) | Formula::Delayed(_) => return None,
        })
    }
}

/// Finite map from variables to terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst {
    map: BTreeMap<Var, Term>,
}

impl Subst {
    pub fn new() -> Self {
        Subst {
            map: BTreeMap::new(),
        }
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.map.get(v)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    /// Inserts a raw binding without normalising other entries.
    pub fn insert_raw(&mut self, v: Var, t: Term) {
        self.map.insert(v, t);
    }

    /// Adds `v ↦ t` keeping the substitution idempotent. The caller has
    /// already applied the substitution to `t` and occurs-checked it.
    pub fn bind(&mut self, v: Var, t: Term) {
        let single: BTreeMap<Var, Term> = [(v.clone(), t.clone())].into_iter().collect();
        for val in self.map.values_mut() {
            if val.occurs(&v) {
                *val = val.rename(&single);
            }
        }
        self.map.insert(v, t);
    }

    /// Follows variable bindings at the root only.
    pub fn walk<'a>(&'a self, t: &'a Term) -> &'a Term {
        let mut cur = t;
        while let Term::Var(v) = cur {
            match self.map.get(v) {
                Some(next) => cur = next,
                None => break,
            }
        }
        cur
    }

    pub fn apply(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        self.apply_excluding(t, &[])
    }

    fn apply_excluding(&self, t: &Term, bound: &[&Var]) -> Term {
        match t {
            Term::Var(v) => {
                if bound.contains(&v) {
                    return t.clone();
                }
                match self.map.get(v) {
                    Some(b) => self.apply_excluding(b, bound),
                    None => t.clone(),
                }
            }
            Term::Int(_) | Term::Atom(_) | Term::Empty => t.clone(),
            Term::Tuple(ts) => {
                Term::Tuple(ts.iter().map(|x| self.apply_excluding(x, bound)).collect())
            }
            Term::Ctor(n, ts) => Term::Ctor(
                n.clone(),
                ts.iter().map(|x| self.apply_excluding(x, bound)).collect(),
            ),
            Term::SetCons(e, r) => Term::cons(
                self.apply_excluding(e, bound),
                self.apply_excluding(r, bound),
            ),
            Term::Arith(op, a, b) => Term::arith(
                *op,
                self.apply_excluding(a, bound),
                self.apply_excluding(b, bound),
            ),
            Term::Ris(r) => {
                let domain = self.apply_excluding(&r.domain, bound);
                let mut inner: Vec<&Var> = bound.to_vec();
                inner.push(&r.bound);
                let filter = r.filter.map_terms(&mut |x| self.apply_excluding(x, &inner));
                Term::ris(r.bound.clone(), domain, filter)
            }
        }
    }

    pub fn apply_formula(&self, f: &Formula) -> Formula {
        f.map_terms(&mut |t| self.apply(t))
    }

    pub fn apply_prim(&self, p: &Prim) -> Prim {
        Prim::new(p.op, p.args.iter().map(|t| self.apply(t)).collect())
    }

    /// `compose(s1, s2)`: applying the result equals applying `s1` then `s2`.
    pub fn compose(&self, then: &Subst) -> Subst {
        let mut map: BTreeMap<Var, Term> = self
            .map
            .iter()
            .map(|(v, t)| (v.clone(), then.apply(t)))
            .collect();
        for (v, t) in then.map.iter() {
            map.entry(v.clone()).or_insert_with(|| t.clone());
        }
        Subst { map }
    }

    pub fn restrict(&self, vars: &BTreeSet<Var>) -> Subst {
        Subst {
            map: self
                .map
                .iter()
                .filter(|(v, _)| vars.contains(v))
                .map(|(v, t)| (v.clone(), self.apply(t)))
                .collect(),
        }
    }
}

/// Human-facing name of a variable for diagnostics.
pub fn var_label(v: &Var) -> String {
    String::from(&*v.name)
}
