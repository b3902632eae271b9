use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(file: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "..", "..", "corpus", file]
        .iter()
        .collect()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("setsolve-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn empty_program() -> PathBuf {
    scratch("empty.slog", "")
}

fn setsolve(args: &[&str]) -> Output {
    cmd().args(args).output().unwrap()
}

fn cmd() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_setsolve"));
    c.env_remove("SETSOLVE_TIMEOUT_SECS");
    c
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit status")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_exit_codes() {
    let p = empty_program();
    let p = p.to_str().unwrap();
    let sat = setsolve(&["solve", p, "-g", "X in {1,2}."]);
    assert_eq!(code(&sat), 0);
    assert_eq!(stdout(&sat), "X = 1\n\nX = 2\n");

    let unsat = setsolve(&["solve", p, "-g", "1 in {}."]);
    assert_eq!(code(&unsat), 1);
    assert_eq!(stdout(&unsat), "unsat\n");

    let limit = setsolve(&[
        "solve",
        p,
        "-g",
        "X in {1,2} & un(A,B,{X/C}) & nun(B,A,{X/C}).",
        "--max-steps",
        "5",
    ]);
    assert_eq!(code(&limit), 2);
    assert!(stdout(&limit).contains("steps limit"));

    assert_eq!(code(&setsolve(&["solve", p, "-g", "X in {1,."])), 3);
    assert_eq!(
        code(&setsolve(&["solve", "/no/such/file.slog", "-g", "true."])),
        3
    );
}

#[test]
fn max_solutions_truncates() {
    let p = empty_program();
    let o = setsolve(&[
        "solve",
        p.to_str().unwrap(),
        "-g",
        "X in {1,2,3}.",
        "--max-solutions",
        "1",
    ]);
    assert_eq!(stdout(&o), "X = 1\n");
}

#[test]
fn goal_file_and_inline_goal() {
    let p = empty_program();
    let g = scratch("goal.txt", "X = 7.");
    let at = format!("@{}", g.display());
    let from_file = setsolve(&["solve", p.to_str().unwrap(), &at]);
    assert_eq!(stdout(&from_file), "X = 7\n");
    let inline = setsolve(&["solve", p.to_str().unwrap(), &at, "-g", "X = 8."]);
    assert_eq!(stdout(&inline), "X = 8\n");
    assert_eq!(code(&setsolve(&["solve", p.to_str().unwrap()])), 3);
}

#[test]
fn prove_exit_codes() {
    let p = empty_program();
    let p = p.to_str().unwrap();
    let thm = setsolve(&["prove", p, "-g", "un(A,B,C) & nun(B,A,C)."]);
    assert_eq!((code(&thm), stdout(&thm)), (0, "THEOREM\n".to_string()));

    let cm = setsolve(&["prove", p, "-g", "X in {1} & X > 0."]);
    assert_eq!(code(&cm), 1);
    assert_eq!(stdout(&cm), "Countermodel:\nX = 1\n");

    let limited = setsolve(&[
        "prove",
        p,
        "-g",
        "un(A,B,C) & nun(B,A,C).",
        "--max-steps",
        "3",
    ]);
    assert_eq!(code(&limited), 2);
    let timed_out = setsolve(&[
        "prove",
        p,
        "-g",
        "un(A,B,C) & nun(B,A,C).",
        "--timeout",
        "0",
    ]);
    assert_eq!(code(&timed_out), 2);
    assert!(
        stdout(&timed_out).contains("time limit"),
        "{}",
        stdout(&timed_out)
    );
}

#[test]
fn timeout_from_environment() {
    let p = empty_program();
    let o = cmd()
        .env("SETSOLVE_TIMEOUT_SECS", "0")
        .args([
            "prove",
            p.to_str().unwrap(),
            "-g",
            "un(A,B,C) & nun(B,A,C).",
        ])
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    // The flag overrides the variable.
    let o = cmd()
        .env("SETSOLVE_TIMEOUT_SECS", "0")
        .args([
            "prove",
            p.to_str().unwrap(),
            "-g",
            "un(A,B,C) & nun(B,A,C).",
            "--timeout",
            "30",
        ])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let o = cmd()
        .env("SETSOLVE_TIMEOUT_SECS", "soon")
        .args(["prove", p.to_str().unwrap(), "-g", "true."])
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}

const MANIFEST: &str = "#obligation commutes expect=unsat category=property
un(A,B,C) & nun(B,A,C).
#obligation member expect=sat category=op-sat
X in {1,2}.
";

#[test]
fn check_reports_and_exit_codes() {
    let p = empty_program();
    let good = scratch("good.obl", MANIFEST);
    let o = setsolve(&[
        "check",
        p.to_str().unwrap(),
        "-m",
        good.to_str().unwrap(),
        "--no-timing",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("commutes"));

    let tsv = setsolve(&[
        "check",
        p.to_str().unwrap(),
        "-m",
        good.to_str().unwrap(),
        "--no-timing",
        "--format",
        "tsv",
    ]);
    assert_eq!(
        stdout(&tsv),
        "commutes\tproperty\tunsat\tunsat\t-\nmember\top-sat\tsat\tsat\t-\n"
    );

    let bad = scratch("bad.obl", &MANIFEST.replace("expect=sat", "expect=unsat"));
    let o = setsolve(&[
        "check",
        p.to_str().unwrap(),
        "-m",
        bad.to_str().unwrap(),
        "--no-timing",
    ]);
    assert_eq!(code(&o), 1);
    assert!(
        stdout(&o).contains("Countermodel for member:"),
        "{}",
        stdout(&o)
    );

    let broken = scratch(
        "broken.obl",
        "#obligation x expect=maybe category=property\ntrue.\n",
    );
    assert_eq!(
        code(&setsolve(&[
            "check",
            p.to_str().unwrap(),
            "-m",
            broken.to_str().unwrap()
        ])),
        3
    );
}

#[test]
fn oracle_exit_codes() {
    let p = empty_program();
    let p = p.to_str().unwrap();
    let sat = setsolve(&[
        "oracle",
        p,
        "-g",
        "X in {1,2} & X neq 1.",
        "--universe",
        "1,2",
    ]);
    assert_eq!(code(&sat), 0);
    assert_eq!(stdout(&sat), "sat\nX = 2\n");
    let unsat = setsolve(&[
        "oracle",
        p,
        "-g",
        "subset(S,{a}) & a in S & S neq {a}.",
        "--universe",
        "a",
    ]);
    assert_eq!(code(&unsat), 1);
    let refused = setsolve(&[
        "oracle",
        p,
        "-g",
        "un(A,B,C) & nun(B,A,C).",
        "--universe",
        "0,1,2",
        "--depth",
        "2",
        "--budget",
        "10",
    ]);
    assert_eq!(code(&refused), 2);
}

#[test]
fn generate_reproduces_corpus_manifest() {
    let out = std::env::temp_dir().join(format!("setsolve-gen-{}.obl", std::process::id()));
    let mut args: Vec<String> = vec!["generate".into()];
    args.push(corpus("model.slog").display().to_string());
    args.push(corpus("invariants.slog").display().to_string());
    for i in 1..=7 {
        args.extend(["--invariant".into(), format!("idStationInv0{i}")]);
    }
    let ops = "readUserToken bioCheckRequired bioCheckNotRequired validateUserTokenFail readFinger \
               validateFingerOK validateFingerFail writeUserToken entryOK tokenRemovalTimeout \
               failedAccessTokenRemoved unlockDoorOp poll readAdminToken validateAdminTokenOK startAdminOp";
    for op in ops.split_whitespace() {
        args.extend(["--operation".into(), op.into()]);
    }
    args.extend([
        "--init".into(),
        "initState".into(),
        "-o".into(),
        out.display().to_string(),
    ]);
    let o = cmd().args(&args).output().unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        std::fs::read_to_string(&out).unwrap(),
        std::fs::read_to_string(corpus("generated.obl")).unwrap()
    );
    let _ = std::fs::remove_file(out);
}

#[test]
fn missing_arguments_exit_3() {
    assert_eq!(code(&setsolve(&["solve"])), 3);
    assert_eq!(code(&setsolve(&["check", "x.slog"])), 3);
    assert_eq!(code(&setsolve(&["frobnicate"])), 3);
    assert_eq!(code(&setsolve(&["--version"])), 0);
}
