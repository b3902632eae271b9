//! Brute-force satisfiability over explicit finite domains.
//!
//! Shares no code with the rewriting solver: values are plain Rust sets and
//! every constraint is decided by direct computation. Variables are either
//! bound functionally (an equation whose other side is already known, the
//! output of a union, a relational image) or enumerated over a domain. A
//! variable that has to be enumerated but has no domain makes the oracle
//! refuse rather than guess.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;

use crate::engine::{CallError, ClauseDB};
use crate::term::{ArithOp, Formula, Prim, PrimOp, Subst, Term, Var, VarGen};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(BigInt),
    Atom(Arc<str>),
    Tuple(Vec<Value>),
    Ctor(Arc<str>, Vec<Value>),
    Set(BTreeSet<Value>),
}

impl Value {
    pub fn int(i: i64) -> Value {
        Value::Int(BigInt::from(i))
    }

    pub fn atom(a: &str) -> Value {
        Value::Atom(Arc::from(a))
    }

    pub fn set(items: impl IntoIterator<Item = Value>) -> Value {
        Value::Set(items.into_iter().collect())
    }

    fn as_set(&self) -> Option<&BTreeSet<Value>> {
        match self {
            Value::Set(s) => Some(s),
            _ => None,
        }
    }

    fn as_pair(&self) -> Option<(&Value, &Value)> {
        match self {
            Value::Tuple(v) if v.len() == 2 => Some((&v[0], &v[1])),
            _ => None,
        }
    }

    /// Back to a ground term.
    pub fn to_term(&self) -> Term {
        match self {
            Value::Int(i) => Term::Int(i.clone()),
            Value::Atom(a) => Term::Atom(a.clone()),
            Value::Tuple(v) => Term::Tuple(v.iter().map(Value::to_term).collect()),
            Value::Ctor(n, v) => Term::Ctor(n.clone(), v.iter().map(Value::to_term).collect()),
            Value::Set(s) => Term::set(s.iter().map(Value::to_term).collect()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(
            f: &mut fmt::Formatter<'_>,
            items: impl Iterator<Item = impl fmt::Display>,
        ) -> fmt::Result {
            for (i, x) in items.enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            Ok(())
        }
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Atom(a) => f.write_str(a),
            Value::Tuple(v) => {
                f.write_str("[")?;
                list(f, v.iter())?;
                f.write_str("]")
            }
            Value::Ctor(n, v) => {
                write!(f, "{n}(")?;
                list(f, v.iter())?;
                f.write_str(")")
            }
            Value::Set(s) => {
                f.write_str("{")?;
                list(f, s.iter())?;
                f.write_str("}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("variable {} must be enumerated but has no domain", .0.name)]
    Unbounded(Var),
    #[error("search budget of {0} steps exhausted")]
    Budget(u64),
    #[error("clause unfolding deeper than {0}")]
    Depth(usize),
    #[error("universe would exceed {0} values")]
    UniverseTooLarge(usize),
    #[error(transparent)]
    Call(#[from] CallError),
}

/// Search configuration.
#[derive(Clone, Debug)]
pub struct OracleConfig {
    /// Domain for variables without an entry in `var_domains`.
    pub default_domain: Option<Vec<Value>>,
    pub var_domains: BTreeMap<Var, Vec<Value>>,
    pub budget: u64,
    pub max_unfold: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            default_domain: None,
            var_domains: BTreeMap::new(),
            budget: 2_000_000,
            max_unfold: 64,
        }
    }
}

impl OracleConfig {
    pub fn with_default_domain(domain: Vec<Value>) -> Self {
        OracleConfig {
            default_domain: Some(domain),
            ..OracleConfig::default()
        }
    }

    /// Sets the domain of every variable called `name` in the goal.
    pub fn domain_for(mut self, goal: &Formula, name: &str, domain: Vec<Value>) -> Self {
        for v in goal.free_vars() {
            if &*v.name == name {
                self.var_domains.insert(v, domain.clone());
            }
        }
        self
    }
}

/// Atoms closed under finite subsets, `depth` times: depth 0 is the atoms,
/// depth k adds every subset of depth k-1.
pub fn universe(atoms: &[Value], depth: usize, cap: usize) -> Result<Vec<Value>, OracleError> {
    let mut level: BTreeSet<Value> = atoms.iter().cloned().collect();
    for _ in 0..depth {
        let items: Vec<Value> = level.iter().cloned().collect();
        if items.len() >= usize::BITS as usize || (1usize << items.len()) > cap {
            return Err(OracleError::UniverseTooLarge(cap));
        }
        for s in subsets(&items) {
            level.insert(Value::Set(s));
        }
        if level.len() > cap {
            return Err(OracleError::UniverseTooLarge(cap));
        }
    }
    Ok(level.into_iter().collect())
}

/// All subsets of `items`.
pub fn subsets(items: &[Value]) -> Vec<BTreeSet<Value>> {
    let mut out = vec![BTreeSet::new()];
    for x in items {
        let with: Vec<_> = out
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.insert(x.clone());
                s
            })
            .collect();
        out.extend(with);
    }
    out
}

/// All binary relations over `a × b`.
pub fn relations(a: &[Value], b: &[Value]) -> Vec<Value> {
    let pairs: Vec<Value> = a
        .iter()
        .flat_map(|x| {
            b.iter()
                .map(move |y| Value::Tuple(vec![x.clone(), y.clone()]))
        })
        .collect();
    subsets(&pairs).into_iter().map(Value::Set).collect()
}

type Env = BTreeMap<Var, Value>;

/// Decides whether `goal` has a solution with every enumerated variable
/// drawn from its domain. `Ok(Some(env))` is a witness.
pub fn find_model(
    goal: &Formula,
    db: &ClauseDB,
    config: &OracleConfig,
) -> Result<Option<Env>, OracleError> {
    let start = goal
        .free_vars()
        .iter()
        .map(|v| v.id + 1)
        .max()
        .unwrap_or(0)
        .max(1 << 24);
    let mut s = Oracle {
        db,
        config,
        steps: 0,
        gen: VarGen::starting_at(start),
    };
    let node = Node {
        goals: vec![(goal.clone(), 0)],
        waiting: Vec::new(),
        env: Env::new(),
        aliases: Vec::new(),
    };
    s.search(node)
}

pub fn is_satisfiable(
    goal: &Formula,
    db: &ClauseDB,
    config: &OracleConfig,
) -> Result<bool, OracleError> {
    find_model(goal, db, config).map(|m| m.is_some())
}

#[derive(Clone)]
struct Node {
    goals: Vec<(Formula, usize)>,
    waiting: Vec<Prim>,
    env: Env,
    /// `X = t` equations eliminated by substitution, in elimination order.
    aliases: Vec<(Var, Term)>,
}

impl Node {
    fn eliminate(&mut self, x: Var, t: Term) {
        let mut s = Subst::new();
        s.bind(x.clone(), t.clone());
        for (g, _) in &mut self.goals {
            *g = s.apply_formula(g);
        }
        for p in &mut self.waiting {
            *p = s.apply_prim(p);
        }
        self.aliases.push((x, t));
    }

    fn model(mut self) -> Env {
        for (x, t) in self.aliases.iter().rev() {
            if let Some(v) = eval(t, &self.env) {
                self.env.insert(x.clone(), v);
            }
        }
        self.env
    }
}

/// Componentwise equations for two tuples or constructor terms; `False`
/// when their shapes differ.
fn decompose(a: &Term, b: &Term) -> Option<Formula> {
    let parts = |xs: &[Term], ys: &[Term]| {
        Formula::conj(
            xs.iter()
                .zip(ys)
                .map(|(x, y)| Formula::eq(x.clone(), y.clone()))
                .collect(),
        )
    };
    match (a, b) {
        (Term::Tuple(xs), Term::Tuple(ys)) if xs.len() == ys.len() => Some(parts(xs, ys)),
        (Term::Ctor(f, xs), Term::Ctor(g, ys)) if f == g && xs.len() == ys.len() => {
            Some(parts(xs, ys))
        }
        (Term::Tuple(_) | Term::Ctor(..), Term::Tuple(_) | Term::Ctor(..)) => Some(Formula::False),
        _ => None,
    }
}

struct Oracle<'a> {
    db: &'a ClauseDB,
    config: &'a OracleConfig,
    steps: u64,
    gen: VarGen,
}

enum Ready {
    Decided(bool),
    /// Alternative binding sets; empty means no way to satisfy.
    Bind(Vec<Vec<(Var, Value)>>),
    Waiting,
}

impl Oracle<'_> {
    fn tick(&mut self) -> Result<(), OracleError> {
        self.steps += 1;
        if self.steps > self.config.budget {
            return Err(OracleError::Budget(self.config.budget));
        }
        Ok(())
    }

    fn domain(&self, v: &Var) -> Option<&Vec<Value>> {
        self.config
            .var_domains
            .get(v)
            .or(self.config.default_domain.as_ref())
    }

    /// `X = t` where `X` has neither a value nor a domain and `t` cannot be
    /// evaluated yet.
    fn alias(&self, p: &Prim, env: &Env) -> Option<(Var, Term)> {
        if p.op != PrimOp::Eq {
            return None;
        }
        for (i, j) in [(0, 1), (1, 0)] {
            if let Term::Var(x) = &p.args[i] {
                let t = &p.args[j];
                if !env.contains_key(x)
                    && self.domain(x).is_none()
                    && eval(t, env).is_none()
                    && !t.occurs(x)
                {
                    return Some((x.clone(), t.clone()));
                }
            }
        }
        None
    }

    fn search(&mut self, mut n: Node) -> Result<Option<Env>, OracleError> {
        loop {
            self.tick()?;
            let Some((g, depth)) = n.goals.pop() else {
                break;
            };
            match g {
                Formula::True => {}
                Formula::False => return Ok(None),
                Formula::And(a, b) => {
                    n.goals.push((*b, depth));
                    n.goals.push((*a, depth));
                }
                Formula::Or(a, b) => {
                    let mut left = n.clone();
                    left.goals.push((*a, depth));
                    if let Some(m) = self.search(left)? {
                        return Ok(Some(m));
                    }
                    n.goals.push((*b, depth));
                }
                Formula::Delayed(g) => n.goals.push((*g, depth)),
                Formula::Call(name, args) => {
                    if depth >= self.config.max_unfold {
                        return Err(OracleError::Depth(self.config.max_unfold));
                    }
                    let body = self.db.unfold(&name, &args, &mut self.gen)?;
                    n.goals.push((body, depth + 1));
                }
                Formula::Prim(p)
                    if p.op == PrimOp::Eq && decompose(&p.args[0], &p.args[1]).is_some() =>
                {
                    n.goals
                        .push((decompose(&p.args[0], &p.args[1]).expect("checked"), depth));
                }
                Formula::Prim(p) if self.alias(&p, &n.env).is_some() => {
                    let (x, t) = self.alias(&p, &n.env).expect("checked");
                    n.eliminate(x, t);
                }
                Formula::Prim(p) => match ready(&p, &n.env) {
                    Ready::Decided(true) => {}
                    Ready::Decided(false) => return Ok(None),
                    Ready::Waiting => n.waiting.push(p),
                    Ready::Bind(alts) => return self.branch(n, alts),
                },
            }
        }
        // Goals exhausted: re-examine waiting constraints, enumerate if stuck.
        if n.waiting.is_empty() {
            return Ok(Some(n.model()));
        }
        for (i, p) in n.waiting.iter().enumerate() {
            match ready(p, &n.env) {
                Ready::Waiting => {}
                _ => {
                    let p = n.waiting.remove(i);
                    n.goals.push((Formula::Prim(p), 0));
                    return self.search(n);
                }
            }
        }
        let p = &n.waiting[0];
        // Every variable bound yet still undecidable: an ill-sorted term such as `a + 1`.
        let Some(v) = p
            .args
            .iter()
            .flat_map(|a| a.free_vars())
            .find(|v| !n.env.contains_key(v))
        else {
            return Ok(None);
        };
        let Some(dom) = self.domain(&v).cloned() else {
            return Err(OracleError::Unbounded(v));
        };
        let alts = dom.into_iter().map(|x| vec![(v.clone(), x)]).collect();
        self.branch(n, alts)
    }

    fn branch(
        &mut self,
        n: Node,
        alts: Vec<Vec<(Var, Value)>>,
    ) -> Result<Option<Env>, OracleError> {
        for alt in alts {
            let mut m = n.clone();
            m.env.extend(alt);
            for p in m.waiting.drain(..) {
                m.goals.push((Formula::Prim(p), 0));
            }
            if let Some(model) = self.search(m)? {
                return Ok(Some(model));
            }
        }
        Ok(None)
    }
}

/// `foreach(X in D, φ)` holds when the RIS over `D` keeps all of `D`.
fn unfold_foreach(p: &Prim) -> Option<Prim> {
    match (p.op, p.args.first()) {
        (PrimOp::Foreach, Some(t @ Term::Ris(r))) => {
            Some(Prim::new(PrimOp::Eq, vec![r.domain.clone(), t.clone()]))
        }
        _ => None,
    }
}

fn ready(p: &Prim, env: &Env) -> Ready {
    if let Some(q) = unfold_foreach(p) {
        return ready(&q, env);
    }
    let vals: Vec<Option<Value>> = p.args.iter().map(|a| eval(a, env)).collect();
    if vals.iter().all(Option::is_some) {
        let vals: Vec<Value> = vals.into_iter().flatten().collect();
        return Ready::Decided(decide(p.op, &vals));
    }
    let out = |t: &Term, v: Option<Value>| match v {
        Some(v) => matches(t, &v, env).map_or(Ready::Bind(vec![]), |b| Ready::Bind(vec![b])),
        None => Ready::Waiting,
    };
    let set = |i: usize| vals[i].as_ref().and_then(|v| v.as_set().cloned());
    let known = |i: usize| vals[i].is_some();
    match p.op {
        PrimOp::Eq if known(0) => out(&p.args[1], vals[0].clone()).only_if_matchable(&p.args[1]),
        PrimOp::Eq if known(1) => out(&p.args[0], vals[1].clone()).only_if_matchable(&p.args[0]),
        PrimOp::In if known(1) && matchable(&p.args[0]) => match set(1) {
            Some(s) => Ready::Bind(
                s.iter()
                    .filter_map(|e| matches(&p.args[0], e, env))
                    .collect(),
            ),
            None => Ready::Decided(false),
        },
        PrimOp::Un | PrimOp::Inters | PrimOp::Comp
            if known(0) && known(1) && matchable(&p.args[2]) =>
        {
            let r = match (set(0), set(1)) {
                (Some(a), Some(b)) => match p.op {
                    PrimOp::Un => a.union(&b).cloned().collect(),
                    PrimOp::Inters => a.intersection(&b).cloned().collect(),
                    _ => match compose(&a, &b) {
                        Some(c) => c,
                        None => return Ready::Decided(false),
                    },
                },
                _ => return Ready::Decided(false),
            };
            out(&p.args[2], Some(Value::Set(r)))
        }
        PrimOp::Dom | PrimOp::Ran if known(0) && matchable(&p.args[1]) => {
            let proj = set(0).and_then(|r| project(&r, p.op == PrimOp::Dom));
            match proj {
                Some(d) => out(&p.args[1], Some(Value::Set(d))),
                None => Ready::Decided(false),
            }
        }
        PrimOp::Apply if known(0) && known(1) && matchable(&p.args[2]) => {
            let (Some(f), Some(x)) = (set(0), vals[1].as_ref()) else {
                return Ready::Decided(false);
            };
            if !is_pfun(&f) {
                return Ready::Decided(false);
            }
            match f.iter().filter_map(Value::as_pair).find(|(a, _)| *a == x) {
                Some((_, y)) => out(&p.args[2], Some(y.clone())),
                None => Ready::Decided(false),
            }
        }
        _ => Ready::Waiting,
    }
}

trait OnlyIf {
    fn only_if_matchable(self, t: &Term) -> Ready;
}

impl OnlyIf for Ready {
    fn only_if_matchable(self, t: &Term) -> Ready {
        if matchable(t) {
            self
        } else {
            Ready::Waiting
        }
    }
}

/// Terms that [`matches`] can destructure.
fn matchable(t: &Term) -> bool {
    match t {
        Term::Var(_) | Term::Int(_) | Term::Atom(_) => true,
        Term::Tuple(ts) | Term::Ctor(_, ts) => ts.iter().all(matchable),
        _ => t.is_ground(),
    }
}

/// Bindings that make `t` denote `v`, or `None` if impossible.
fn matches(t: &Term, v: &Value, env: &Env) -> Option<Vec<(Var, Value)>> {
    let mut out: Vec<(Var, Value)> = Vec::new();
    fn go(t: &Term, v: &Value, env: &Env, out: &mut Vec<(Var, Value)>) -> bool {
        if let Some(known) = eval(t, env) {
            return &known == v;
        }
        match (t, v) {
            (Term::Var(x), _) => match out.iter().find(|(y, _)| y == x) {
                Some((_, w)) => w == v,
                None => {
                    out.push((x.clone(), v.clone()));
                    true
                }
            },
            (Term::Tuple(ts), Value::Tuple(vs)) if ts.len() == vs.len() => {
                ts.iter().zip(vs).all(|(t, v)| go(t, v, env, out))
            }
            (Term::Ctor(n, ts), Value::Ctor(m, vs)) if n == m && ts.len() == vs.len() => {
                ts.iter().zip(vs).all(|(t, v)| go(t, v, env, out))
            }
            _ => false,
        }
    }
    go(t, v, env, &mut out).then_some(out)
}

/// Value of a term under `env`; `None` when some variable is unbound or an
/// arithmetic operand is not an integer.
pub fn eval(t: &Term, env: &Env) -> Option<Value> {
    Some(match t {
        Term::Var(v) => env.get(v)?.clone(),
        Term::Int(i) => Value::Int(i.clone()),
        Term::Atom(a) => Value::Atom(a.clone()),
        Term::Tuple(ts) => Value::Tuple(
            ts.iter()
                .map(|t| eval(t, env))
                .collect::<Option<Vec<_>>>()?,
        ),
        Term::Ctor(n, ts) => Value::Ctor(
            n.clone(),
            ts.iter()
                .map(|t| eval(t, env))
                .collect::<Option<Vec<_>>>()?,
        ),
        Term::Empty => Value::Set(BTreeSet::new()),
        Term::SetCons(e, rest) => {
            let Value::Set(mut s) = eval(rest, env)? else {
                return None;
            };
            s.insert(eval(e, env)?);
            Value::Set(s)
        }
        Term::Ris(r) => {
            let Value::Set(dom) = eval(&r.domain, env)? else {
                return None;
            };
            let mut out = BTreeSet::new();
            for x in dom {
                let mut inner = env.clone();
                inner.insert(r.bound.clone(), x.clone());
                if holds(&r.filter, &inner)? {
                    out.insert(x);
                }
            }
            Value::Set(out)
        }
        Term::Arith(op, a, b) => {
            let (Value::Int(a), Value::Int(b)) = (eval(a, env)?, eval(b, env)?) else {
                return None;
            };
            Value::Int(match op {
                ArithOp::Add => a + b,
                ArithOp::Sub => a - b,
                ArithOp::Mul => a * b,
            })
        }
    })
}

/// Truth of a call-free formula under `env`.
fn holds(f: &Formula, env: &Env) -> Option<bool> {
    match f {
        Formula::True => Some(true),
        Formula::False => Some(false),
        Formula::Prim(p) if p.op == PrimOp::Foreach => {
            holds(&Formula::Prim(unfold_foreach(p)?), env)
        }
        Formula::Prim(p) => {
            let vals = p
                .args
                .iter()
                .map(|t| eval(t, env))
                .collect::<Option<Vec<_>>>()?;
            Some(decide(p.op, &vals))
        }
        Formula::Delayed(g) => holds(g, env),
        Formula::And(a, b) => Some(holds(a, env)? && holds(b, env)?),
        Formula::Or(a, b) => Some(holds(a, env)? || holds(b, env)?),
        Formula::Call(..) => None,
    }
}

fn project(r: &BTreeSet<Value>, first: bool) -> Option<BTreeSet<Value>> {
    r.iter()
        .map(|p| {
            p.as_pair()
                .map(|(a, b)| if first { a.clone() } else { b.clone() })
        })
        .collect()
}

fn compose(r: &BTreeSet<Value>, s: &BTreeSet<Value>) -> Option<BTreeSet<Value>> {
    let r: Vec<(&Value, &Value)> = r.iter().map(Value::as_pair).collect::<Option<_>>()?;
    let s: Vec<(&Value, &Value)> = s.iter().map(Value::as_pair).collect::<Option<_>>()?;
    let mut out = BTreeSet::new();
    for (x, y) in &r {
        for (y2, z) in &s {
            if y == y2 {
                out.insert(Value::Tuple(vec![(*x).clone(), (*z).clone()]));
            }
        }
    }
    Some(out)
}

fn is_pfun(f: &BTreeSet<Value>) -> bool {
    let mut seen = BTreeSet::new();
    f.iter()
        .all(|p| p.as_pair().is_some_and(|(a, _)| seen.insert(a.clone())))
}

/// Decides a constraint on values. Ill-sorted arguments make it false.
fn decide(op: PrimOp, v: &[Value]) -> bool {
    use PrimOp::*;
    let set = |i: usize| v[i].as_set();
    let ints = || match (&v[0], &v[1]) {
        (Value::Int(a), Value::Int(b)) => Some((a, b)),
        _ => None,
    };
    match op {
        Eq => v[0] == v[1],
        Neq => v[0] != v[1],
        In => set(1).is_some_and(|s| s.contains(&v[0])),
        Nin => set(1).is_some_and(|s| !s.contains(&v[0])),
        Un | Inters => match (set(0), set(1), set(2)) {
            (Some(a), Some(b), Some(c)) => {
                let r: BTreeSet<Value> = if op == Un {
                    a.union(b).cloned().collect()
                } else {
                    a.intersection(b).cloned().collect()
                };
                &r == c
            }
            _ => false,
        },
        Subset => matches!((set(0), set(1)), (Some(a), Some(b)) if a.is_subset(b)),
        Disj => matches!((set(0), set(1)), (Some(a), Some(b)) if a.is_disjoint(b)),
        Dom | Ran => {
            matches!((set(0), set(1)), (Some(r), Some(d)) if project(r, op == Dom).as_ref() == Some(d))
        }
        Comp => {
            matches!((set(0), set(1), set(2)), (Some(r), Some(s), Some(t)) if compose(r, s).as_ref() == Some(t))
        }
        Pfun => set(0).is_some_and(is_pfun),
        Apply => match (set(0), &v[1]) {
            (Some(f), x) if is_pfun(f) => f
                .iter()
                .filter_map(Value::as_pair)
                .any(|(a, b)| a == x && b == &v[2]),
            _ => false,
        },
        Foreach => unreachable!("foreach is rewritten before evaluation"),
        Lt => ints().is_some_and(|(a, b)| a < b),
        Le => ints().is_some_and(|(a, b)| a <= b),
        Gt => ints().is_some_and(|(a, b)| a > b),
        Ge => ints().is_some_and(|(a, b)| a >= b),
        Nun | Ninters | Nsubset | Ndisj | Ncomp => {
            let pos = op
                .negation()
                .expect("negative constraints have a positive form");
            sorted_for(pos, v) && !decide(pos, v)
        }
    }
}

/// Negated constraints still require their arguments to be sets.
fn sorted_for(op: PrimOp, v: &[Value]) -> bool {
    let n = match op {
        PrimOp::Un | PrimOp::Inters | PrimOp::Comp => 3,
        _ => 2,
    };
    v.iter().take(n).all(|x| x.as_set().is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_goal, parse_program};

    fn ints(xs: &[i64]) -> Vec<Value> {
        xs.iter().map(|&i| Value::int(i)).collect()
    }

    fn sat(goal: &str, atoms: &[Value], depth: usize) -> Result<bool, OracleError> {
        let config = OracleConfig::with_default_domain(universe(atoms, depth, 1 << 12).unwrap());
        is_satisfiable(&parse_goal(goal).unwrap(), &ClauseDB::new(), &config)
    }

    #[test]
    fn set_examples() {
        assert_eq!(sat("un(A,B,{1}).", &ints(&[1]), 1), Ok(true));
        assert_eq!(sat("un(A,B,C) & nun(B,A,C).", &ints(&[0, 1]), 1), Ok(false));
        assert_eq!(sat("pfun({[a,1],[a,2]}).", &[], 0), Ok(false));
        assert_eq!(
            sat("comp({[1,2]},{[2,3]},T) & T = {[1,3]}.", &[], 0),
            Ok(true)
        );
    }

    #[test]
    fn functional_binding_needs_no_domain() {
        let g = parse_goal("X = [1,Y] & Y = {a} & dom({[X,b]},D).").unwrap();
        let m = find_model(&g, &ClauseDB::new(), &OracleConfig::default())
            .unwrap()
            .unwrap();
        let d = m.iter().find(|(v, _)| &*v.name == "D").unwrap().1;
        assert_eq!(d.to_string(), "{[1,{a}]}");
    }

    #[test]
    fn refuses_without_domain_or_budget() {
        let g = parse_goal("X neq Y.").unwrap();
        assert!(matches!(
            find_model(&g, &ClauseDB::new(), &OracleConfig::default()),
            Err(OracleError::Unbounded(_))
        ));
        let config = OracleConfig {
            budget: 10,
            ..OracleConfig::with_default_domain(ints(&[0, 1, 2, 3]))
        };
        let g = parse_goal("A neq B & B neq C & C neq D & D neq A & A = 7.").unwrap();
        assert_eq!(
            is_satisfiable(&g, &ClauseDB::new(), &config),
            Err(OracleError::Budget(10))
        );
    }

    #[test]
    fn ill_sorted_terms_are_false() {
        assert_eq!(sat("X = a & Y = X + 1.", &ints(&[0]), 0), Ok(false));
        assert_eq!(sat("X in {a} & X + 1 = Y.", &ints(&[0, 1]), 0), Ok(false));
        assert_eq!(sat("nun(1,{},{}).", &[], 0), Ok(false));
    }

    #[test]
    fn foreach_and_ris() {
        assert_eq!(sat("foreach(X in {1,2}, 0 < X).", &[], 0), Ok(true));
        assert_eq!(sat("foreach(X in {1,-2}, 0 < X).", &[], 0), Ok(false));
        assert_eq!(
            sat("Y in ris(X in {1,2}, 1 < X) & Y neq 2.", &[], 0),
            Ok(false)
        );
    }

    #[test]
    fn clauses_unfold() {
        let db =
            ClauseDB::load(&[parse_program("p(X) :- X in {1,2} & q(X). q(X) :- 1 < X.").unwrap()])
                .unwrap();
        let m = find_model(&parse_goal("p(X).").unwrap(), &db, &OracleConfig::default())
            .unwrap()
            .unwrap();
        assert_eq!(m.values().next(), Some(&Value::int(2)));
        let db = ClauseDB::load(&[parse_program("r(X) :- r(X).").unwrap()]).unwrap();
        let config = OracleConfig {
            max_unfold: 5,
            ..OracleConfig::default()
        };
        assert_eq!(
            is_satisfiable(&parse_goal("r(1).").unwrap(), &db, &config),
            Err(OracleError::Depth(5))
        );
    }

    #[test]
    fn universe_levels() {
        assert_eq!(universe(&ints(&[0, 1]), 1, 100).unwrap().len(), 2 + 4);
        assert_eq!(universe(&ints(&[0, 1]), 2, 1000).unwrap().len(), 6 + 64 - 4);
        assert!(universe(&ints(&[0, 1, 2]), 2, 100).is_err());
        assert_eq!(relations(&ints(&[0, 1]), &[Value::atom("a")]).len(), 4);
    }
}
