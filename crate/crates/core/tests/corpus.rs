//! The ID-station corpus checked against the brute-force oracle and a
//! hand-coded reference state machine.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::path::PathBuf;

use setsolve_core::oracle::{find_model, is_satisfiable, OracleConfig, Value};
use setsolve_core::syntax::parse_manifest;
use setsolve_core::{
    parse_goal, parse_program, solve, ClauseDB, Formula, Limits, Term, VarGen, Verdict,
};

const MAX_CLOCK: i64 = 20;

fn corpus(file: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "corpus", file]
        .iter()
        .collect();
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn db() -> ClauseDB {
    let programs = ["model.slog", "invariants.slog"].map(|f| parse_program(&corpus(f)).unwrap());
    ClauseDB::load(&programs).unwrap()
}

fn ints(r: std::ops::RangeInclusive<i64>) -> Vec<Value> {
    r.map(Value::int).collect()
}

fn atoms(xs: &[&str]) -> Vec<Value> {
    xs.iter().map(|a| Value::atom(a)).collect()
}

#[test]
fn unlock_door_preserves_door_latch_alarm_invariant() {
    let db = db();
    // The oracle enumerates in goal order, so the post-state check comes before
    // the pre-state invariant.
    let oracle_goal = parse_goal(
        "DLA = [CT,Door,Latch,Alarm,LT,AT] & C = [ASD,LUD] & \
         unlockDoor(DLA,C,DLA_) & not_doorLatchAlarmInv(DLA_) & doorLatchAlarmInv(DLA).",
    )
    .unwrap();
    let typed = |g: &Formula, durations: Vec<Value>| {
        OracleConfig::default()
            .domain_for(g, "CT", ints(0..=MAX_CLOCK))
            .domain_for(g, "LT", ints(0..=MAX_CLOCK))
            .domain_for(g, "AT", ints(0..=MAX_CLOCK))
            .domain_for(g, "Door", atoms(&["open", "closed"]))
            .domain_for(g, "Latch", atoms(&["locked", "unlocked"]))
            .domain_for(g, "Alarm", atoms(&["alarming", "silent"]))
            .domain_for(g, "ASD", durations.clone())
            .domain_for(g, "LUD", durations)
    };
    let config = typed(&oracle_goal, ints(0..=MAX_CLOCK));
    assert_eq!(is_satisfiable(&oracle_goal, &db, &config), Ok(false));

    let solver_goal = parse_goal(
        "configInv(C) & doorLatchAlarmInv(DLA) & unlockDoor(DLA,C,DLA_) & not_doorLatchAlarmInv(DLA_).",
    )
    .unwrap();
    assert_eq!(
        solve(&solver_goal, &db, &Limits::default()).unwrap(),
        Verdict::Unsat
    );

    // Negative durations break preservation; both sides must see it.
    let config = typed(&oracle_goal, ints(-2..=MAX_CLOCK));
    let model = find_model(&oracle_goal, &db, &config)
        .unwrap()
        .expect("a counterexample with a negative duration");
    let negative = |name: &str| {
        model
            .iter()
            .any(|(v, x)| &*v.name == name && *x < Value::int(0))
    };
    assert!(negative("ASD") || negative("LUD"));
    let unconfigured = parse_goal(
        "doorLatchAlarmInv(DLA) & unlockDoor(DLA,C,DLA_) & not_doorLatchAlarmInv(DLA_).",
    )
    .unwrap();
    assert!(solve(&unconfigured, &db, &Limits::default())
        .unwrap()
        .is_sat());
}

// Reference state machine, written independently of the clause text.

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Token {
    NoT,
    BadT,
    Plain,
    WithAuth,
}

const TOKENS: [Token; 4] = [Token::NoT, Token::BadT, Token::Plain, Token::WithAuth];
const STATUSES: [&str; 8] = [
    "quiescent",
    "gotUserToken",
    "waitingFinger",
    "gotFinger",
    "waitingUpdateToken",
    "waitingEntry",
    "waitingRemoveTokenSuccess",
    "waitingRemoveTokenFail",
];
const ROLES: [&str; 3] = ["guard", "auditManager", "securityOfficer"];

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
struct State {
    token: Token,
    present: bool,
    time: i64,
    open: bool,
    locked: bool,
    alarming: bool,
    latch_timeout: i64,
    alarm_timeout: i64,
    status: usize,
    enclave: &'static str,
    role: Option<&'static str>,
}

const ALARM_SILENT: i64 = 10;
const LATCH_UNLOCK: i64 = 4;

impl State {
    fn init() -> Self {
        State {
            token: Token::NoT,
            present: false,
            time: 0,
            open: false,
            locked: true,
            alarming: false,
            latch_timeout: 0,
            alarm_timeout: 0,
            status: 0,
            enclave: "enclaveQuiescent",
            role: None,
        }
    }

    fn status(&self) -> &'static str {
        STATUSES[self.status]
    }

    fn with_status(self, s: &str) -> Self {
        State {
            status: STATUSES.iter().position(|x| *x == s).unwrap(),
            ..self
        }
    }

    fn text(&self) -> String {
        let token = match self.token {
            Token::NoT => "noT",
            Token::BadT => "badT",
            Token::Plain => "goodT(plain)",
            Token::WithAuth => "goodT(withAuth)",
        };
        format!(
            "[[{token},{}],[{},{},{},{},{},{}],[{ALARM_SILENT},{LATCH_UNLOCK}],[{{[tis,key1]}},{{tis}}],{{}},[{},{},{}]]",
            if self.present { "present" } else { "absent" },
            self.time,
            if self.open { "open" } else { "closed" },
            if self.locked { "locked" } else { "unlocked" },
            if self.alarming { "alarming" } else { "silent" },
            self.latch_timeout,
            self.alarm_timeout,
            self.status(),
            self.enclave,
            self.role.map_or("{}".to_string(), |r| format!("{{{r}}}")),
        )
    }

    fn successors(&self) -> Vec<(&'static str, State)> {
        let s = *self;
        let mut out = Vec::new();
        let good = matches!(s.token, Token::Plain | Token::WithAuth);
        match s.status() {
            "quiescent" if s.present => {
                for t in TOKENS {
                    out.push((
                        "readUserToken",
                        State { token: t, ..s }.with_status("gotUserToken"),
                    ));
                }
            }
            "gotUserToken" => {
                if s.present && s.token == Token::Plain {
                    out.push(("bioCheckRequired", s.with_status("waitingFinger")));
                }
                if s.present && s.token == Token::WithAuth {
                    out.push(("bioCheckNotRequired", s.with_status("waitingEntry")));
                }
                if !good {
                    out.push((
                        "validateUserTokenFail",
                        s.with_status("waitingRemoveTokenFail"),
                    ));
                }
            }
            "waitingFinger" => out.push(("readFinger", s.with_status("gotFinger"))),
            "gotFinger" => {
                out.push(("validateFingerOK", s.with_status("waitingUpdateToken")));
                out.push((
                    "validateFingerFail",
                    s.with_status("waitingRemoveTokenFail"),
                ));
            }
            "waitingUpdateToken" => out.push(("writeUserToken", s.with_status("waitingEntry"))),
            "waitingEntry" => out.push(("entryOK", s.with_status("waitingRemoveTokenSuccess"))),
            "waitingRemoveTokenSuccess" if s.present => {
                out.push((
                    "tokenRemovalTimeout",
                    s.with_status("waitingRemoveTokenFail"),
                ));
                let lt = s.time + LATCH_UNLOCK;
                out.push((
                    "unlockDoorOp",
                    State {
                        present: false,
                        locked: false,
                        alarming: false,
                        latch_timeout: lt,
                        alarm_timeout: lt + ALARM_SILENT,
                        ..s
                    }
                    .with_status("quiescent"),
                ));
            }
            "waitingRemoveTokenFail" if !s.present => {
                out.push(("failedAccessTokenRemoved", s.with_status("quiescent")))
            }
            _ => {}
        }
        match (s.enclave, s.role) {
            ("enclaveQuiescent", None) => out.push((
                "readAdminToken",
                State {
                    enclave: "gotAdminToken",
                    ..s
                },
            )),
            ("gotAdminToken", None) => {
                for r in ROLES {
                    out.push((
                        "validateAdminTokenOK",
                        State {
                            enclave: "enclaveQuiescent",
                            role: Some(r),
                            ..s
                        },
                    ));
                }
            }
            ("enclaveQuiescent", Some(_)) => out.push((
                "startAdminOp",
                State {
                    enclave: "waitingStartAdminOp",
                    ..s
                },
            )),
            _ => {}
        }
        for time in s.time..=MAX_CLOCK {
            for open in [false, true] {
                for present in [false, true] {
                    let locked = time >= s.latch_timeout;
                    let alarming = locked && open && time >= s.alarm_timeout;
                    out.push((
                        "poll",
                        State {
                            time,
                            open,
                            present,
                            locked,
                            alarming,
                            ..s
                        },
                    ));
                }
            }
        }
        out
    }
}

fn explore() -> Vec<State> {
    let mut seen = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::from([State::init()]);
    seen.insert(State::init());
    while let Some(s) = queue.pop_front() {
        order.push(s);
        for (_, t) in s.successors() {
            if seen.insert(t) {
                queue.push_back(t);
            }
        }
    }
    order
}

/// Which state components each invariant reads; states that agree on them
/// are checked once.
fn projection(inv: usize, s: &State) -> String {
    match inv {
        1 | 2 => format!(
            "{} {} {} {} {} {}",
            s.time, s.open, s.locked, s.alarming, s.latch_timeout, s.alarm_timeout
        ),
        6 => format!("{:?} {}", s.token, s.status),
        _ => format!("{} {} {:?}", s.status, s.enclave, s.role),
    }
}

#[test]
fn reachable_states_satisfy_every_invariant() {
    let db = db();
    let states = explore();
    assert!(
        states.len() > 10_000,
        "only {} states reached",
        states.len()
    );
    let reached: HashSet<&str> = states.iter().map(State::status).collect();
    assert_eq!(reached.len(), STATUSES.len(), "every status is reachable");
    assert!(states.iter().any(|s| s.alarming));
    assert!(states.iter().any(|s| s.enclave == "waitingStartAdminOp"));

    for inv in 1..=7 {
        let mut checked = BTreeMap::new();
        for s in &states {
            checked.entry(projection(inv, s)).or_insert(*s);
        }
        for s in checked.values() {
            let g = parse_goal(&format!("idStationInv0{inv}({}).", s.text())).unwrap();
            assert_eq!(
                is_satisfiable(&g, &db, &OracleConfig::default()),
                Ok(true),
                "idStationInv0{inv} fails in {}",
                s.text()
            );
            let n = parse_goal(&format!("not_idStationInv0{inv}({}).", s.text())).unwrap();
            assert_eq!(is_satisfiable(&n, &db, &OracleConfig::default()), Ok(false));
        }
    }
}

#[test]
fn reference_machine_matches_operation_clauses() {
    let db = db();
    let states = explore();
    let step = (states.len() / 150).max(1);
    for s in states.iter().step_by(step) {
        let succ = s.successors();
        for (op, t) in &succ {
            let g = parse_goal(&format!("{op}({},{}).", s.text(), t.text())).unwrap();
            assert_eq!(
                is_satisfiable(&g, &db, &OracleConfig::default()),
                Ok(true),
                "{op}: {} -> {}",
                s.text(),
                t.text()
            );
        }
        // No transition of the clauses is missing from the reference machine.
        let known: Vec<String> = succ.iter().map(|(_, t)| t.text()).collect();
        let g = parse_goal(&format!(
            "S_ = [[Tok,P],[CT,Door,Latch,Alarm,LT,AT],Cfg,KS,{{}},Int] & anyOp(Op,{},S_) & S_ nin {{{}}}.",
            s.text(),
            known.join(",")
        ))
        .unwrap();
        let config = OracleConfig::default()
            .domain_for(&g, "CT", ints(0..=MAX_CLOCK))
            .domain_for(&g, "P", atoms(&["present", "absent"]))
            .domain_for(&g, "Door", atoms(&["open", "closed"]));
        let extra = find_model(&g, &db, &config).unwrap();
        assert!(
            extra.is_none(),
            "unexpected successor of {}: {:?}",
            s.text(),
            extra
        );
    }
}

// Delay changes scheduling only.

fn conjuncts(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        other => out.push(other.clone()),
    }
}

fn verdict_kind(v: &Verdict) -> &'static str {
    match v {
        Verdict::Sat(_) => "sat",
        Verdict::Unsat => "unsat",
        Verdict::ResourceLimit(_) => "limit",
    }
}

#[test]
fn delaying_a_call_keeps_the_verdict() {
    let db = db();
    let limits = Limits {
        max_answers: Some(1),
        ..Limits::default()
    };
    let mut checked = 0;
    for file in ["generated.obl", "lemmas.obl"] {
        for o in parse_manifest(&corpus(file)).unwrap().entries {
            let base = verdict_kind(&solve(&o.goal, &db, &limits).unwrap());
            let mut parts = Vec::new();
            conjuncts(&o.goal, &mut parts);
            for i in 0..parts.len() {
                if !matches!(parts[i], Formula::Call(..)) {
                    continue;
                }
                let mut p = parts.clone();
                p[i] = Formula::Delayed(Box::new(p[i].clone()));
                let v = solve(&Formula::conj(p), &db, &limits).unwrap();
                assert_eq!(
                    verdict_kind(&v),
                    base,
                    "{} with conjunct {i} delayed",
                    o.name
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 300, "{checked}");
}

// Unfolding a call by hand gives the same answers as calling it.

fn shape(t: &Term) -> String {
    let anon: BTreeMap<_, _> = t
        .free_vars()
        .into_iter()
        .map(|v| (v, Term::Var(setsolve_core::Var::new(0, "_"))))
        .collect();
    setsolve_core::syntax::canonical_display(&t.rename(&anon))
}

#[test]
fn inlined_operations_behave_like_calls() {
    let db = db();
    let s = Term::Var(setsolve_core::Var::new(0, "S"));
    let s_ = Term::Var(setsolve_core::Var::new(1, "S_"));
    let ops = db.clauses().filter(|c| {
        c.params.len() == 2
            && c.params
                .iter()
                .zip(["S", "S_"])
                .all(|(p, n)| p.as_var().is_some_and(|v| &*v.name == n))
    });
    let mut count = 0;
    for c in ops {
        count += 1;
        let name = c.name.to_string();
        let call = Formula::call(&name, vec![s.clone(), s_.clone()]);
        let inlined = Formula::and(
            parse_goal("initState(S0) & S = S0.").unwrap(),
            db.unfold(
                &name,
                &[s.clone(), s_.clone()],
                &mut VarGen::starting_at(1 << 22),
            )
            .unwrap(),
        );
        let called = Formula::and(parse_goal("initState(S0) & S = S0.").unwrap(), call);
        let answers = |g: &Formula| match solve(g, &db, &Limits::default()).unwrap() {
            Verdict::Sat(a) => {
                let mut v: Vec<String> = a
                    .iter()
                    .map(|a| {
                        ["S", "S_"]
                            .map(|n| a.binding(n).map_or("-".to_string(), shape))
                            .join(" ")
                    })
                    .collect();
                v.sort();
                v
            }
            Verdict::Unsat => vec![],
            Verdict::ResourceLimit(k) => panic!("{name}: {k}"),
        };
        assert_eq!(answers(&inlined), answers(&called), "{name}");
    }
    assert!(count >= 10, "{count}");
}
