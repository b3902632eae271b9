//! Linear integer arithmetic: rational elimination with integer tightening,
//! plus bounded enumeration to confirm an integer point.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::term::{ArithOp, PrimOp, Term, Var};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("nonlinear arithmetic term `{0}`")]
    Nonlinear(Term),
    #[error("`{0}` is not an integer expression")]
    NotInteger(Term),
}

/// `Σ coeffs[x]·x + constant`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct LinExpr {
    pub coeffs: BTreeMap<Var, BigRational>,
    pub constant: BigRational,
}

impl LinExpr {
    pub fn constant(c: BigRational) -> Self {
        LinExpr {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(v: &Var) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(v.clone(), BigRational::one());
        LinExpr {
            coeffs,
            constant: BigRational::zero(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.coeffs.keys()
    }

    fn add_scaled(&mut self, other: &LinExpr, k: &BigRational) {
        for (v, c) in &other.coeffs {
            let e = self
                .coeffs
                .entry(v.clone())
                .or_insert_with(BigRational::zero);
            *e += c * k;
            if e.is_zero() {
                self.coeffs.remove(v);
            }
        }
        self.constant += &other.constant * k;
    }

    fn scale(&mut self, k: &BigRational) {
        if k.is_zero() {
            self.coeffs.clear();
            self.constant = BigRational::zero();
            return;
        }
        for c in self.coeffs.values_mut() {
            *c *= k;
        }
        self.constant *= k;
    }

    /// Replaces `v` by `e`.
    fn substitute(&mut self, v: &Var, e: &LinExpr) {
        if let Some(c) = self.coeffs.remove(v) {
            self.add_scaled(e, &c);
        }
    }

    pub fn eval(&self, env: &BTreeMap<Var, BigInt>) -> Option<BigRational> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            acc += c * BigRational::from_integer(env.get(v)?.clone());
        }
        Some(acc)
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if c.is_one() {
                write!(f, "{}", v.name)?;
            } else {
                write!(f, "{}*{}", c, v.name)?;
            }
        }
        if first || !self.constant.is_zero() {
            if !first {
                f.write_str(" + ")?;
            }
            write!(f, "{}", self.constant)?;
        }
        Ok(())
    }
}

/// Relation of a linear expression to zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Eq,
    Neq,
    Le,
    Lt,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinCon {
    pub expr: LinExpr,
    pub rel: Rel,
}

impl LinCon {
    pub fn holds(&self, env: &BTreeMap<Var, BigInt>) -> Option<bool> {
        let v = self.expr.eval(env)?;
        Some(match self.rel {
            Rel::Eq => v.is_zero(),
            Rel::Neq => !v.is_zero(),
            Rel::Le => !v.is_positive(),
            Rel::Lt => v.is_negative(),
        })
    }
}

pub fn linearize(t: &Term) -> Result<LinExpr, ArithError> {
    match t {
        Term::Int(i) => Ok(LinExpr::constant(BigRational::from_integer(i.clone()))),
        Term::Var(v) => Ok(LinExpr::var(v)),
        Term::Arith(op, a, b) => {
            let (mut a, b) = (linearize(a)?, linearize(b)?);
            match op {
                ArithOp::Add => {
                    a.add_scaled(&b, &BigRational::one());
                    Ok(a)
                }
                ArithOp::Sub => {
                    a.add_scaled(&b, &-BigRational::one());
                    Ok(a)
                }
                ArithOp::Mul => {
                    if a.is_constant() {
                        let mut b = b;
                        b.scale(&a.constant);
                        Ok(b)
                    } else if b.is_constant() {
                        a.scale(&b.constant);
                        Ok(a)
                    } else {
                        Err(ArithError::Nonlinear(t.clone()))
                    }
                }
            }
        }
        _ => Err(ArithError::NotInteger(t.clone())),
    }
}

/// `a op b` as a constraint on `a - b` (or `b - a` for `>`/`>=`).
pub fn constraint(op: PrimOp, a: &Term, b: &Term) -> Result<LinCon, ArithError> {
    let (la, lb) = (linearize(a)?, linearize(b)?);
    let diff = |mut x: LinExpr, y: &LinExpr| {
        x.add_scaled(y, &-BigRational::one());
        x
    };
    let (expr, rel) = match op {
        PrimOp::Eq => (diff(la, &lb), Rel::Eq),
        PrimOp::Neq => (diff(la, &lb), Rel::Neq),
        PrimOp::Lt => (diff(la, &lb), Rel::Lt),
        PrimOp::Le => (diff(la, &lb), Rel::Le),
        PrimOp::Gt => (diff(lb, &la), Rel::Lt),
        PrimOp::Ge => (diff(lb, &la), Rel::Le),
        _ => unreachable!("not an arithmetic relation"),
    };
    Ok(LinCon { expr, rel })
}

fn lcm_denoms(e: &LinExpr) -> BigInt {
    let mut l = BigInt::one();
    for c in e.coeffs.values().chain(core::iter::once(&e.constant)) {
        l = l.lcm(c.denom());
    }
    l
}

/// Integer normal form of a constraint; `Err(())` when it is trivially false.
/// `Ok(None)` when trivially true.
fn tighten(c: &LinCon) -> Result<Option<LinCon>, ()> {
    let mut e = c.expr.clone();
    let l = lcm_denoms(&e);
    e.scale(&BigRational::from_integer(l));
    let mut rel = c.rel;
    if rel == Rel::Lt {
        e.constant += BigRational::one();
        rel = Rel::Le;
    }
    if e.is_constant() {
        let k = &e.constant;
        let ok = match rel {
            Rel::Eq => k.is_zero(),
            Rel::Neq => !k.is_zero(),
            Rel::Le => !k.is_positive(),
            Rel::Lt => k.is_negative(),
        };
        return if ok { Ok(None) } else { Err(()) };
    }
    let g = e
        .coeffs
        .values()
        .fold(BigInt::zero(), |g, c| g.gcd(c.numer()));
    let k = e.constant.numer().clone();
    match rel {
        Rel::Eq => {
            if !k.is_multiple_of(&g) {
                return Err(());
            }
            e.scale(&BigRational::new(BigInt::one(), g));
        }
        Rel::Le => {
            // Σ a x ≤ -k  becomes  Σ (a/g) x ≤ floor(-k/g).
            let bound = (-k).div_floor(&g);
            for c in e.coeffs.values_mut() {
                *c /= BigRational::from_integer(g.clone());
            }
            e.constant = BigRational::from_integer(-bound);
        }
        Rel::Neq | Rel::Lt => {}
    }
    Ok(Some(LinCon { expr: e, rel }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntCheck {
    Consistent,
    Inconsistent,
    /// Feasible over the rationals; integrality not confirmed because some variable is unbounded.
    RationalOnly,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ArithStore {
    pub constraints: Vec<LinCon>,
}

/// Largest box enumerated by the integer check.
pub const BOX_LIMIT: u64 = 200_000;

impl ArithStore {
    pub fn new() -> Self {
        ArithStore::default()
    }

    /// Adds `c`; returns whether the store stays feasible over the rationals.
    pub fn assert(&mut self, c: LinCon) -> bool {
        self.constraints.push(c);
        self.rational_feasible()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.constraints
            .iter()
            .flat_map(|c| c.expr.vars().cloned())
            .collect()
    }

    pub fn rational_feasible(&self) -> bool {
        let ineqs = match eliminate_equalities(&self.constraints) {
            Some(v) => v,
            None => return false,
        };
        fourier_motzkin(ineqs, None).is_some()
    }

    /// Integer bounds of `v` implied by the relaxation.
    pub fn bounds(&self, v: &Var) -> Option<(Option<BigInt>, Option<BigInt>)> {
        let ineqs = eliminate_equalities_keep(&self.constraints, v)?;
        let projected = fourier_motzkin(ineqs, Some(v))?;
        let (mut lo, mut hi): (Option<BigInt>, Option<BigInt>) = (None, None);
        for c in projected {
            let Some(a) = c.expr.coeffs.get(v) else {
                continue;
            };
            // a·v + k ≤ 0
            let bound = -&c.expr.constant / a;
            if a.is_positive() {
                let b = bound.floor().to_integer();
                hi = Some(match hi {
                    Some(h) if h < b => h,
                    _ => b,
                });
            } else {
                let b = bound.ceil().to_integer();
                lo = Some(match lo {
                    Some(l) if l > b => l,
                    _ => b,
                });
            }
        }
        Some((lo, hi))
    }

    pub fn check_integer(&self) -> IntCheck {
        if !self.rational_feasible() {
            return IntCheck::Inconsistent;
        }
        let vars: Vec<Var> = self.vars().into_iter().collect();
        let mut ranges = Vec::new();
        let mut size: u64 = 1;
        for v in &vars {
            match self.bounds(v) {
                None => return IntCheck::Inconsistent,
                Some((Some(lo), Some(hi))) => {
                    if lo > hi {
                        return IntCheck::Inconsistent;
                    }
                    let width = (&hi - &lo + 1u32).to_u64().unwrap_or(u64::MAX);
                    size = size.saturating_mul(width);
                    ranges.push((lo, hi));
                }
                Some(_) => return IntCheck::RationalOnly,
            }
        }
        if size > BOX_LIMIT {
            return IntCheck::RationalOnly;
        }
        let mut env = BTreeMap::new();
        if self.search(&vars, &ranges, 0, &mut env) {
            IntCheck::Consistent
        } else {
            IntCheck::Inconsistent
        }
    }

    fn search(
        &self,
        vars: &[Var],
        ranges: &[(BigInt, BigInt)],
        i: usize,
        env: &mut BTreeMap<Var, BigInt>,
    ) -> bool {
        for c in &self.constraints {
            if let Some(false) = c.holds(env) {
                return false;
            }
        }
        if i == vars.len() {
            return true;
        }
        let (lo, hi) = &ranges[i];
        let mut x = lo.clone();
        while &x <= hi {
            env.insert(vars[i].clone(), x.clone());
            if self.search(vars, ranges, i + 1, env) {
                return true;
            }
            x += 1u32;
        }
        env.remove(&vars[i]);
        false
    }
}

fn eliminate_equalities(cs: &[LinCon]) -> Option<Vec<LinCon>> {
    eliminate(cs, None)
}

fn eliminate_equalities_keep(cs: &[LinCon], keep: &Var) -> Option<Vec<LinCon>> {
    eliminate(cs, Some(keep))
}

/// Gaussian elimination of equalities; returns the remaining `≤` constraints
/// (disequalities dropped). `keep` is never chosen as the pivot unless it is
/// the only variable left in an equality, in which case the equality is kept
/// as two inequalities.
fn eliminate(cs: &[LinCon], keep: Option<&Var>) -> Option<Vec<LinCon>> {
    let mut eqs = Vec::new();
    let mut ineqs = Vec::new();
    for c in cs {
        if c.rel == Rel::Neq {
            continue;
        }
        match tighten(c) {
            Err(()) => return None,
            Ok(None) => {}
            Ok(Some(t)) if t.rel == Rel::Eq => eqs.push(t.expr),
            Ok(Some(t)) => ineqs.push(t),
        }
    }
    while let Some(e) = eqs.pop() {
        let pivot = e.coeffs.keys().find(|v| Some(*v) != keep).cloned();
        let Some(pivot) = pivot else {
            let mut neg = e.clone();
            neg.scale(&-BigRational::one());
            for x in [e, neg] {
                match tighten(&LinCon {
                    expr: x,
                    rel: Rel::Le,
                }) {
                    Err(()) => return None,
                    Ok(None) => {}
                    Ok(Some(t)) => ineqs.push(t),
                }
            }
            continue;
        };
        // pivot = -(e - a·pivot)/a
        let a = e.coeffs[&pivot].clone();
        let mut sol = e.clone();
        sol.coeffs.remove(&pivot);
        sol.scale(&(-BigRational::one() / a));
        let mut next_eqs = Vec::new();
        for mut other in eqs.drain(..) {
            other.substitute(&pivot, &sol);
            match tighten(&LinCon {
                expr: other,
                rel: Rel::Eq,
            }) {
                Err(()) => return None,
                Ok(None) => {}
                Ok(Some(t)) => next_eqs.push(t.expr),
            }
        }
        eqs = next_eqs;
        let mut next_ineqs = Vec::new();
        for mut c in ineqs.drain(..) {
            c.expr.substitute(&pivot, &sol);
            match tighten(&c) {
                Err(()) => return None,
                Ok(None) => {}
                Ok(Some(t)) => next_ineqs.push(t),
            }
        }
        ineqs = next_ineqs;
    }
    Some(ineqs)
}

/// Eliminates every variable except `keep`; `None` when infeasible.
fn fourier_motzkin(mut cs: Vec<LinCon>, keep: Option<&Var>) -> Option<Vec<LinCon>> {
    cs.sort();
    cs.dedup();
    loop {
        let mut vars: BTreeSet<Var> = cs.iter().flat_map(|c| c.expr.vars().cloned()).collect();
        if let Some(k) = keep {
            vars.remove(k);
        }
        let best = vars
            .iter()
            .map(|v| {
                let pos = cs
                    .iter()
                    .filter(|c| c.expr.coeffs.get(v).is_some_and(|a| a.is_positive()))
                    .count();
                let neg = cs
                    .iter()
                    .filter(|c| c.expr.coeffs.get(v).is_some_and(|a| a.is_negative()))
                    .count();
                (pos * neg, v.clone())
            })
            .min();
        let Some((_, v)) = best else { return Some(cs) };
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for c in cs.drain(..) {
            match c.expr.coeffs.get(&v) {
                Some(a) if a.is_positive() => pos.push(c),
                Some(_) => neg.push(c),
                None => rest.push(c),
            }
        }
        for p in &pos {
            for n in &neg {
                let ap = p.expr.coeffs[&v].clone();
                let an = -n.expr.coeffs[&v].clone();
                let mut e = p.expr.clone();
                e.scale(&an);
                e.add_scaled(&n.expr, &ap);
                e.coeffs.remove(&v);
                match tighten(&LinCon {
                    expr: e,
                    rel: Rel::Le,
                }) {
                    Err(()) => return None,
                    Ok(None) => {}
                    Ok(Some(t)) => rest.push(t),
                }
            }
        }
        rest.sort();
        rest.dedup();
        cs = rest;
    }
}
