//! Satisfiability search.
//!
//! A goal is rewritten depth-first. Each search state holds a substitution,
//! an agenda of formulas still to process, a store of irreducible
//! constraints, deferred constraints that need case analysis, and parked
//! `delay` goals. When the agenda runs dry the state is stable: delayed goals
//! are flushed, deferred constraints are expanded, and finally the store is
//! checked (set/integer disequalities and integer feasibility) before the
//! state is reported as an answer.

mod rewrite;

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::time::Duration;

use crate::arith::{self, ArithStore, IntCheck};
use crate::engine::{CallError, ClauseDB};
use crate::ris::{self, RisError};
use crate::syntax::canonical_display;
use crate::term::{Formula, Prim, PrimOp, Subst, Term, Var, VarGen};
use crate::unify::{BudgetExhausted, UnifyBranch};
use rewrite::Rw;

/// Monotonic time source; the search only measures differences.
pub trait Clock: Sync {
    fn now(&self) -> Duration;
}

/// A clock that never advances, so the time limit never triggers.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> Duration {
        Duration::ZERO
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Clause unfoldings along one branch.
    pub max_depth: u64,
    /// Rewrite steps over the whole search.
    pub max_steps: u64,
    pub timeout: Option<Duration>,
    pub max_answers: Option<usize>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_depth: 10_000,
            max_steps: 1_000_000,
            timeout: Some(Duration::from_secs(60)),
            max_answers: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LimitKind {
    Depth,
    Steps,
    Time,
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitKind::Depth => "depth",
            LimitKind::Steps => "steps",
            LimitKind::Time => "time",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Call(#[from] CallError),
    #[error("`{0}` occurs where a set is required")]
    NotASet(Term),
    #[error(transparent)]
    Ris(#[from] RisError),
    #[error("nonlinear arithmetic `{0}`")]
    Nonlinear(Term),
    #[error("cannot solve the equation `{0} = {1}`")]
    UnsupportedEquation(Term, Term),
    #[error(transparent)]
    Budget(#[from] BudgetExhausted),
}

/// One solution: bindings of goal variables plus the irreducible constraints
/// left on the remaining variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Answer {
    pub bindings: Vec<(Var, Term)>,
    pub residual: Vec<Prim>,
    /// The arithmetic part was only shown feasible over the rationals.
    pub rational_only: bool,
}

impl Answer {
    pub fn binding(&self, name: &str) -> Option<&Term> {
        self.bindings
            .iter()
            .find(|(v, _)| &*v.name == name)
            .map(|(_, t)| t)
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bindings.is_empty() && self.residual.is_empty() {
            writeln!(f, "yes")?;
        }
        for (v, t) in &self.bindings {
            writeln!(f, "{} = {}", v.name, canonical_display(t))?;
        }
        if !self.residual.is_empty() {
            writeln!(f, "Residual:")?;
            for p in &self.residual {
                writeln!(f, "  {p}")?;
            }
        }
        if self.rational_only {
            writeln!(
                f,
                "(integrality not confirmed: arithmetic checked over the rationals)"
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Unsat,
    /// At least one answer; when a limit stops the search after the first
    /// answer the list holds the answers found so far.
    Sat(Vec<Answer>),
    ResourceLimit(LimitKind),
}

impl Verdict {
    pub fn is_unsat(&self) -> bool {
        matches!(self, Verdict::Unsat)
    }

    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat(_))
    }
}

/// Why a search stopped before exhausting its branches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Interrupt {
    Limit(LimitKind),
    Error(SolveError),
}

impl From<SolveError> for Interrupt {
    fn from(e: SolveError) -> Self {
        Interrupt::Error(e)
    }
}

/// Delay nesting beyond which a `delay` goal runs at once.
const MAX_DELAY_LEVEL: u8 = 2;

fn conjuncts(f: Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(a, b) => {
            conjuncts(*a, out);
            conjuncts(*b, out);
        }
        f => out.push(f),
    }
}

/// Largest ground bound whose subsets are enumerated instead of expanding a
/// deferred constraint.
const MAX_BOUND_ELEMS: usize = 8;

/// Disjunction `X = s1 or X = s2 ...` over the subsets of `G`, for the first
/// set variable `X` of `p` with a stored `subset(X, G)` and ground `G`.
fn bounded_choice(st: &State, p: &Prim) -> Option<Formula> {
    let vars: BTreeSet<Var> = rewrite::set_args(p)
        .filter_map(|t| match t {
            Term::Var(v) => Some(v.clone()),
            _ => None,
        })
        .collect();
    st.store.iter().find_map(|q| {
        if q.op != PrimOp::Subset {
            return None;
        }
        let q = st.subst.apply_prim(q);
        let Term::Var(x) = &q.args[0] else {
            return None;
        };
        let es = crate::ground::elems(&q.args[1])?;
        if !vars.contains(x) || es.len() > MAX_BOUND_ELEMS {
            return None;
        }
        let choices = (0u32..1 << es.len()).map(|mask| {
            let pick = es
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, e)| e.clone());
            Formula::eq(
                Term::Var(x.clone()),
                crate::ground::from_elems(pick.collect()),
            )
        });
        choices.reduce(Formula::or)
    })
}

#[derive(Clone, Debug)]
struct State {
    subst: Subst,
    agenda: Vec<(Formula, u8)>,
    store: Vec<Prim>,
    deferred: Vec<Prim>,
    delayed: Vec<(Formula, u8)>,
    depth: u64,
    gen: VarGen,
    rational_only: bool,
}

/// A lazily explored answer stream.
pub struct Search<'a> {
    db: &'a ClauseDB,
    limits: Limits,
    clock: &'a dyn Clock,
    start: Duration,
    steps: u64,
    goal_vars: BTreeSet<Var>,
    stack: Vec<State>,
}

fn max_var_id(f: &Formula) -> u32 {
    fn term(t: &Term, m: &mut u32) {
        match t {
            Term::Var(v) => *m = (*m).max(v.id),
            Term::Int(_) | Term::Atom(_) | Term::Empty => {}
            Term::Tuple(ts) | Term::Ctor(_, ts) => ts.iter().for_each(|t| term(t, m)),
            Term::SetCons(a, b) | Term::Arith(_, a, b) => {
                term(a, m);
                term(b, m);
            }
            Term::Ris(r) => {
                *m = (*m).max(r.bound.id);
                term(&r.domain, m);
                formula(&r.filter, m);
            }
        }
    }
    fn formula(f: &Formula, m: &mut u32) {
        match f {
            Formula::True | Formula::False => {}
            Formula::Prim(p) => p.args.iter().for_each(|t| term(t, m)),
            Formula::Call(_, args) => args.iter().for_each(|t| term(t, m)),
            Formula::Delayed(g) => formula(g, m),
            Formula::And(a, b) | Formula::Or(a, b) => {
                formula(a, m);
                formula(b, m);
            }
        }
    }
    let mut m = 0;
    formula(f, &mut m);
    m
}

fn is_arith_prim(p: &Prim) -> bool {
    p.op.is_arith() || p.op == PrimOp::Eq
}

fn mentions(p: &Prim, vars: &BTreeSet<Var>) -> bool {
    p.args.iter().any(|t| vars.iter().any(|v| t.occurs(v)))
}

fn arith_store(store: &[Prim]) -> ArithStore {
    let mut s = ArithStore::new();
    for p in store.iter().filter(|p| is_arith_prim(p)) {
        if let Ok(c) = arith::constraint(p.op, &p.args[0], &p.args[1]) {
            s.constraints.push(c);
        }
    }
    s
}

fn ris_domain_vars(t: &Term, out: &mut BTreeSet<Var>) {
    match t {
        Term::Ris(r) => {
            if let Term::Var(v) = &r.domain {
                out.insert(v.clone());
            }
            ris_domain_vars(&r.domain, out);
        }
        Term::Tuple(ts) | Term::Ctor(_, ts) => ts.iter().for_each(|x| ris_domain_vars(x, out)),
        Term::SetCons(a, b) => {
            ris_domain_vars(a, out);
            ris_domain_vars(b, out);
        }
        _ => {}
    }
}

impl<'a> Search<'a> {
    pub fn new(goal: &Formula, db: &'a ClauseDB, limits: &Limits, clock: &'a dyn Clock) -> Self {
        let state = State {
            subst: Subst::new(),
            agenda: vec![(goal.clone(), 0)],
            store: Vec::new(),
            deferred: Vec::new(),
            delayed: Vec::new(),
            depth: 0,
            gen: VarGen::starting_at(max_var_id(goal) + 1),
            rational_only: false,
        };
        Search {
            db,
            limits: limits.clone(),
            clock,
            start: clock.now(),
            steps: 0,
            goal_vars: goal
                .free_vars()
                .into_iter()
                .filter(|v| !v.name.starts_with('_'))
                .collect(),
            stack: vec![state],
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn tick(&mut self) -> Result<(), Interrupt> {
        self.steps += 1;
        if self.steps > self.limits.max_steps {
            return Err(Interrupt::Limit(LimitKind::Steps));
        }
        if self.steps.is_multiple_of(128) {
            if let Some(t) = self.limits.timeout {
                if self.clock.now().saturating_sub(self.start) > t {
                    return Err(Interrupt::Limit(LimitKind::Time));
                }
            }
        }
        Ok(())
    }

    /// Next answer in depth-first order; `Ok(None)` once every branch failed.
    pub fn next_answer(&mut self) -> Result<Option<Answer>, Interrupt> {
        'states: while let Some(mut st) = self.stack.pop() {
            loop {
                self.tick()?;
                let mut next = match st.agenda.pop() {
                    Some((f, lvl)) => self.step(st, f, lvl)?,
                    None => {
                        if !st.delayed.is_empty() {
                            let flushed: Vec<_> = st.delayed.drain(..).rev().collect();
                            st.agenda.extend(flushed);
                            continue;
                        }
                        if !st.deferred.is_empty() {
                            let p = st.subst.apply_prim(&st.deferred.remove(0));
                            let f = match bounded_choice(&st, &p) {
                                Some(choice) => Formula::and(choice, Formula::Prim(p)),
                                None => rewrite::expand_deferred(&p, &mut st.gen)?,
                            };
                            st.agenda.push((f, 0));
                            continue;
                        }
                        match self.final_check(&mut st)? {
                            Final::Goals => {
                                continue;
                            }
                            Final::Fail => continue 'states,
                            Final::Answer => return Ok(Some(self.answer(&st))),
                        }
                    }
                };
                match next.len() {
                    0 => continue 'states,
                    1 => st = next.pop().unwrap(),
                    _ => {
                        next.reverse();
                        self.stack.extend(next);
                        continue 'states;
                    }
                }
            }
        }
        Ok(None)
    }

    fn answer(&self, st: &State) -> Answer {
        let bindings = self
            .goal_vars
            .iter()
            .filter_map(|v| {
                let t = st.subst.apply(&Term::Var(v.clone()));
                (t != Term::Var(v.clone())).then(|| (v.clone(), t))
            })
            .collect();
        let residual = st
            .store
            .iter()
            .map(|p| {
                Prim::new(
                    p.op,
                    p.args
                        .iter()
                        .map(|a| crate::ground::normalize(&st.subst.apply(a)))
                        .collect(),
                )
            })
            .collect();
        Answer {
            bindings,
            residual,
            rational_only: st.rational_only,
        }
    }

    fn step(&self, mut st: State, f: Formula, lvl: u8) -> Result<Vec<State>, Interrupt> {
        match f {
            Formula::True => Ok(vec![st]),
            Formula::False => Ok(vec![]),
            Formula::And(a, b) => {
                let mut parts = Vec::new();
                conjuncts(Formula::And(a, b), &mut parts);
                // Ground primitives first, then bounds `subset(X, ground)`, so
                // both prune before open constraints start branching.
                let rank = |f: &Formula| match f {
                    Formula::Prim(p) if p.args.iter().all(|t| st.subst.apply(t).is_ground()) => 0,
                    Formula::Prim(p)
                        if p.op == PrimOp::Subset && st.subst.apply(&p.args[1]).is_ground() =>
                    {
                        1
                    }
                    _ => 2,
                };
                parts.sort_by_key(rank);
                st.agenda.extend(parts.into_iter().rev().map(|f| (f, lvl)));
                Ok(vec![st])
            }
            Formula::Or(a, b) => {
                let mut other = st.clone();
                st.agenda.push((*a, lvl));
                other.agenda.push((*b, lvl));
                Ok(vec![st, other])
            }
            Formula::Call(name, args) => {
                st.depth += 1;
                if st.depth > self.limits.max_depth {
                    return Err(Interrupt::Limit(LimitKind::Depth));
                }
                let body = self
                    .db
                    .unfold(&name, &args, &mut st.gen)
                    .map_err(SolveError::from)?;
                st.agenda.push((body, lvl));
                Ok(vec![st])
            }
            Formula::Delayed(g) => {
                let g = st.subst.apply_formula(&g);
                if g.free_vars().is_empty() || lvl >= MAX_DELAY_LEVEL {
                    st.agenda.push((g, lvl));
                } else {
                    st.delayed.push((g, lvl + 1));
                }
                Ok(vec![st])
            }
            Formula::Prim(p) => self.prim(st, p, lvl),
        }
    }

    fn prim(&self, mut st: State, p: Prim, lvl: u8) -> Result<Vec<State>, Interrupt> {
        let p = st.subst.apply_prim(&p);
        Ok(match rewrite::rewrite(&p, &mut st.gen)? {
            Rw::Fail => vec![],
            Rw::Done => vec![st],
            Rw::Solved => {
                st.store.push(p);
                vec![st]
            }
            Rw::Defer => {
                st.deferred.push(p);
                vec![st]
            }
            Rw::Arith => {
                st.store.push(p);
                if arith_store(&st.store).rational_feasible() {
                    vec![st]
                } else {
                    vec![]
                }
            }
            Rw::Goal(f) => {
                st.agenda.push((f, lvl));
                vec![st]
            }
            Rw::Unify(branches) => {
                let mut out = Vec::with_capacity(branches.len());
                let n = branches.len();
                let mut st = Some(st);
                for (i, b) in branches.into_iter().enumerate() {
                    let mut s = if i + 1 == n {
                        st.take().unwrap()
                    } else {
                        st.as_ref().unwrap().clone()
                    };
                    apply_branch(&mut s, b, lvl)?;
                    out.push(s);
                }
                out
            }
        })
    }

    fn final_check(&self, st: &mut State) -> Result<Final, Interrupt> {
        let mut sets = BTreeSet::new();
        let mut ints = BTreeSet::new();
        for p in &st.store {
            if is_arith_prim(p) {
                p.args.iter().for_each(|t| t.collect_vars(&mut ints));
                continue;
            }
            for t in rewrite::set_args(p) {
                if let Term::Var(v) = t {
                    sets.insert(v.clone());
                }
            }
            p.args.iter().for_each(|t| ris_domain_vars(t, &mut sets));
        }
        if sets.intersection(&ints).next().is_some() {
            return Ok(Final::Fail);
        }
        let is_set_var = |t: &Term| matches!(t, Term::Var(v) if sets.contains(v));
        let is_int_var = |t: &Term| matches!(t, Term::Var(v) if ints.contains(v));
        let set_like = |t: &Term| t.is_set_term() || is_set_var(t);
        let int_like = |t: &Term| matches!(t, Term::Int(_) | Term::Arith(..)) || is_int_var(t);

        let mut goals = Vec::new();
        let mut keep = Vec::new();
        for p in core::mem::take(&mut st.store) {
            if p.op == PrimOp::Neq {
                let (a, b) = (&p.args[0], &p.args[1]);
                if (is_set_var(a) && set_like(b)) || (is_set_var(b) && set_like(a)) {
                    goals.push(rewrite::neq_witness(a, b, &mut st.gen));
                    continue;
                }
                if (is_int_var(a) && int_like(b)) || (is_int_var(b) && int_like(a)) {
                    goals.push(rewrite::neq_arith(a, b));
                    continue;
                }
            }
            keep.push(p);
        }
        st.store = keep;
        if !goals.is_empty() {
            st.agenda.push((Formula::conj(goals), 0));
            return Ok(Final::Goals);
        }
        match arith_store(&st.store).check_integer() {
            IntCheck::Inconsistent => Ok(Final::Fail),
            IntCheck::RationalOnly => {
                st.rational_only = true;
                Ok(Final::Answer)
            }
            IntCheck::Consistent => Ok(Final::Answer),
        }
    }
}

enum Final {
    Goals,
    Fail,
    Answer,
}

fn apply_branch(s: &mut State, b: UnifyBranch, lvl: u8) -> Result<(), SolveError> {
    let mut bound = BTreeSet::new();
    for (v, t) in b.subst.iter() {
        s.subst.bind(v.clone(), s.subst.apply(t));
        bound.insert(v.clone());
    }
    for (l, r) in b.residual.into_iter().rev() {
        let arithmetic = matches!(l, Term::Arith(..)) || matches!(r, Term::Arith(..));
        let intensional = [&l, &r]
            .iter()
            .any(|t| matches!(t, Term::Ris(_)) || ris::has_ris_tail(t));
        if !arithmetic && !intensional {
            return Err(SolveError::UnsupportedEquation(l, r));
        }
        s.agenda.push((Formula::eq(l, r), lvl));
    }
    if !bound.is_empty() {
        wake(s, &bound);
    }
    Ok(())
}

/// Moves constraints that mention newly bound variables back to the agenda.
fn wake(s: &mut State, bound: &BTreeSet<Var>) {
    let (woken, kept): (Vec<Prim>, Vec<Prim>) = core::mem::take(&mut s.store)
        .into_iter()
        .partition(|p| mentions(p, bound));
    s.store = kept;
    let (woken_d, kept_d): (Vec<Prim>, Vec<Prim>) = core::mem::take(&mut s.deferred)
        .into_iter()
        .partition(|p| mentions(p, bound));
    s.deferred = kept_d;
    for p in woken.into_iter().chain(woken_d).rev() {
        s.agenda.push((Formula::Prim(p), 0));
    }
    let mut still = Vec::new();
    for (g, l) in core::mem::take(&mut s.delayed) {
        let g = s.subst.apply_formula(&g);
        if g.free_vars().is_empty() {
            s.agenda.push((g, l));
        } else {
            still.push((g, l));
        }
    }
    s.delayed = still;
}

pub fn solve(goal: &Formula, db: &ClauseDB, limits: &Limits) -> Result<Verdict, SolveError> {
    solve_with_clock(goal, db, limits, &NoClock)
}

pub fn solve_with_clock(
    goal: &Formula,
    db: &ClauseDB,
    limits: &Limits,
    clock: &dyn Clock,
) -> Result<Verdict, SolveError> {
    let mut search = Search::new(goal, db, limits, clock);
    let mut answers = Vec::new();
    loop {
        if limits.max_answers.is_some_and(|m| answers.len() >= m) {
            break;
        }
        match search.next_answer() {
            Ok(Some(a)) => answers.push(a),
            Ok(None) => break,
            Err(Interrupt::Error(e)) => return Err(e),
            Err(Interrupt::Limit(k)) => {
                if answers.is_empty() {
                    return Ok(Verdict::ResourceLimit(k));
                }
                break;
            }
        }
    }
    Ok(if answers.is_empty() {
        Verdict::Unsat
    } else {
        Verdict::Sat(answers)
    })
}

#[cfg(test)]
mod tests;
