use super::*;
use crate::syntax::{parse_goal, parse_program, parse_term};

const UPDATE: &str = "update(F,X,Y,F_,Error) :-
    F = {[X,V]/F1} & [X,V] nin F1 & F_ = {[X,Y]/F1} & Error = ok
    or
    comp({[X,X]},F,{}) & Error = err.";

fn run(goal: &str) -> Verdict {
    run_in(&ClauseDB::new(), goal)
}

fn run_in(db: &ClauseDB, goal: &str) -> Verdict {
    solve(&parse_goal(goal).unwrap(), db, &Limits::default()).unwrap()
}

fn answers(v: Verdict) -> Vec<Answer> {
    match v {
        Verdict::Sat(a) => a,
        other => panic!("expected answers, got {other:?}"),
    }
}

fn term(s: &str) -> Term {
    crate::ground::canon(&parse_term(s).unwrap()).unwrap()
}

fn bound(a: &Answer, name: &str) -> Term {
    crate::ground::canon(
        a.binding(name)
            .unwrap_or_else(|| panic!("{name} unbound in {a}")),
    )
    .unwrap()
}

#[test]
fn union_is_commutative() {
    assert!(run("un(A,B,C) & nun(B,A,C).").is_unsat());
    assert!(run("un(A,B,C) & un(B,A,D) & C neq D.").is_unsat());
}

#[test]
fn intersection_chain_binds_member() {
    let a = answers(run("X in M & inters({1,2},{2,3},W) & inters(W,{2,4},M)."));
    assert_eq!(bound(&a[0], "X"), Term::int(2));
    assert_eq!(bound(&a[0], "W"), term("{2}"));
    assert_eq!(bound(&a[0], "M"), term("{2}"));
}

#[test]
fn update_first_answer() {
    let db = ClauseDB::load(&[parse_program(UPDATE).unwrap()]).unwrap();
    let a = answers(run_in(
        &db,
        "update({[setlog,5],[hello,earth],[tokeneer,model]},hello,world,G,E).",
    ));
    assert_eq!(
        bound(&a[0], "G"),
        term("{[hello,world],[setlog,5],[tokeneer,model]}")
    );
    assert_eq!(bound(&a[0], "E"), Term::atom("ok"));
}

#[test]
fn update_error_branch_and_theorem() {
    let db = ClauseDB::load(&[parse_program(UPDATE).unwrap()]).unwrap();
    let a = answers(run_in(&db, "update({[a,1]},b,2,G,E)."));
    assert_eq!(a.len(), 1);
    assert_eq!(bound(&a[0], "E"), Term::atom("err"));
    // The error branch leaves the new state unconstrained.
    assert!(a[0].binding("G").is_none());
    assert!(run_in(&db, "update(F,X,Y,F_,err) & dom(F,D) & X in D.").is_unsat());
}

#[test]
fn union_of_singleton_has_three_splits() {
    let mut seen: Vec<(Term, Term)> = answers(run("un(A,B,{1})."))
        .iter()
        .map(|a| (bound(a, "A"), bound(a, "B")))
        .collect();
    seen.sort();
    seen.dedup();
    assert_eq!(seen.len(), 3);
}

#[test]
fn ground_relations() {
    let a = answers(run("dom({[1,a],[2,b]},D) & ran({[1,a],[2,b]},R)."));
    assert_eq!(bound(&a[0], "D"), term("{1,2}"));
    assert_eq!(bound(&a[0], "R"), term("{a,b}"));
    let a = answers(run("comp({[1,2],[3,4]},{[2,5]},T)."));
    assert_eq!(bound(&a[0], "T"), term("{[1,5]}"));
    assert!(run("pfun({[1,a],[1,b]}).").is_unsat());
    assert!(run("pfun({[1,a],[2,a]}).").is_sat());
}

#[test]
fn ncomp_singleton_detects_domain_membership() {
    assert!(run("ncomp({[1,1]},{[1,a]},{}).").is_sat());
    assert!(run("ncomp({[2,2]},{[1,a]},{}).").is_unsat());
    assert!(run("ncomp({[X,X]},F,{}) & comp({[X,X]},F,{}).").is_unsat());
}

#[test]
fn dom_with_open_relation() {
    let a = answers(run("dom(F,{1}) & pfun(F) & F neq {}."));
    assert!(!a.is_empty());
    assert!(run("dom(F,{}) & F neq {}.").is_unsat());
    assert!(run("dom(F,D) & [X,Y] in F & X nin D.").is_unsat());
}

#[test]
fn foreach_over_known_domain() {
    assert!(run("foreach(X in {1,2,3}, 0 < X).").is_sat());
    assert!(run("foreach(X in {1,2,3}, 1 < X).").is_unsat());
    let a = answers(run("foreach(X in {1,2}, X neq Y) & Y in {1,2,3}."));
    assert!(a.iter().all(|a| bound(a, "Y") == Term::int(3)));
}

#[test]
fn ris_membership() {
    assert!(run("2 in ris(X in {1,2,3}, 1 < X).").is_sat());
    assert!(run("1 in ris(X in {1,2,3}, 1 < X).").is_unsat());
    assert!(run("1 nin ris(X in {1,2,3}, 1 < X).").is_sat());
}

#[test]
fn delayed_goal_runs_after_bindings() {
    let a = answers(run("delay(X neq 1, false) & X in {1,2}."));
    assert_eq!(a.len(), 1);
    assert_eq!(bound(&a[0], "X"), Term::int(2));
    assert!(run("delay(X in {}, false) & X = 1.").is_unsat());
}

#[test]
fn arithmetic_scenario_values() {
    let a = answers(run(
        "LT = CT + LUD & AT = LT + AS & CT = 5 & LUD = 4 & AS = 10.",
    ));
    assert_eq!(bound(&a[0], "LT"), Term::int(9));
    assert_eq!(bound(&a[0], "AT"), Term::int(19));
    assert!(run("X > 3 & X < 4.").is_unsat());
    assert!(run("2 * X = 3.").is_unsat());
}

#[test]
fn sorts_do_not_mix() {
    assert!(run("X in S & X + 1 = 2 & S = {a}.").is_unsat());
}

#[test]
fn non_set_in_set_position_is_an_error() {
    let g = parse_goal("un(1,A,B).").unwrap();
    assert!(matches!(
        solve(&g, &ClauseDB::new(), &Limits::default()),
        Err(SolveError::NotASet(_))
    ));
}

#[test]
fn depth_limit_stops_runaway_recursion() {
    let db = ClauseDB::load(&[parse_program("loop(X) :- loop({X}).").unwrap()]).unwrap();
    let limits = Limits {
        max_depth: 50,
        ..Limits::default()
    };
    let v = solve(&parse_goal("loop(1).").unwrap(), &db, &limits).unwrap();
    assert_eq!(v, Verdict::ResourceLimit(LimitKind::Depth));
}

#[test]
fn step_limit_reports_steps() {
    let db = ClauseDB::load(&[parse_program("loop(X) :- loop({X}).").unwrap()]).unwrap();
    let limits = Limits {
        max_depth: u64::MAX,
        max_steps: 200,
        ..Limits::default()
    };
    let v = solve(&parse_goal("loop(1).").unwrap(), &db, &limits).unwrap();
    assert_eq!(v, Verdict::ResourceLimit(LimitKind::Steps));
}

#[test]
fn unknown_clause_is_an_error() {
    let g = parse_goal("nosuch(X).").unwrap();
    assert!(matches!(
        solve(&g, &ClauseDB::new(), &Limits::default()),
        Err(SolveError::Call(_))
    ));
}

#[test]
fn answer_display() {
    let a = answers(run("X = {2,1}."));
    assert_eq!(a[0].to_string(), "X = {1,2}\n");
    let a = answers(run("1 in {1}."));
    assert_eq!(a[0].to_string(), "yes\n");
}

#[test]
fn false_ground_conjunct_prunes_open_branching() {
    assert!(run("comp(V,{[0,1]/V},V) & [1,0] in V & un({0,2},{0,2},{0,1}).").is_unsat());
}

#[test]
fn ground_bound_cuts_infinite_composition() {
    let g = "comp(V,V,V) & comp({[2,0]/V},{[0,1],[1,1],[1,2]},V) & subset(V,{[0,1],[0,2],[1,1],[1,2]}).";
    assert!(run(g).is_unsat());
}

#[test]
fn deferred_projection_enumerates_bounded_relation() {
    let g = "comp(V,V,V) & dom(V,{0,1,2}) & subset(V,{[0,1],[0,2],[1,1],[1,2]}).";
    assert!(run(g).is_unsat());
    let a = answers(run("dom(V,{0,1}) & comp(V,V,V) & subset(V,{[0,1],[1,1]})."));
    assert_eq!(bound(&a[0], "V"), term("{[0,1],[1,1]}"));
}
