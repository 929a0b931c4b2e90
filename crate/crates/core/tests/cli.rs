use std::fs;
use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

fn path(rel: &str) -> String {
    root().join(rel).display().to_string()
}

fn files(dir: &str, ext: &str) -> Vec<String> {
    let mut out: Vec<String> = fs::read_dir(root().join(dir))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .map(|p| p.display().to_string())
        .collect();
    out.sort();
    out
}

/// Exit code, stdout, stderr.
fn ttt(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("ttt").chain(args.iter().copied());
    let code = ttt::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json_records(args: &[&str]) -> (i32, Vec<Value>) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let (code, out, _) = ttt(&full);
    let records = out
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap_or_else(|e| panic!("{args:?}: {e}: {l}")))
        .collect::<Vec<_>>();
    assert!(!records.is_empty(), "{args:?}");
    for r in &records {
        for field in ["subcommand", "input", "verdict", "details"] {
            assert!(r.get(field).is_some(), "{args:?}: missing {field} in {r}");
        }
    }
    (code, records)
}

#[test]
fn mode_queries() {
    assert_eq!(ttt(&["mode", "glo <= op"]), (0, "true\n".into(), String::new()));
    assert_eq!(ttt(&["mode", "sha <= glo"]).1, "false\n");
    assert_eq!(ttt(&["mode", "op.op = id"]).1, "true\n");
    assert_eq!(ttt(&["mode", "sha∘glo∘op"]).1, "sha\n");
    assert_eq!(ttt(&["mode", "op.glo"]).1, "op∘glo\n");
    assert_eq!(ttt(&["mode", "flat"]).0, 1);
}

#[test]
fn check_accepts_and_rejects() {
    let (code, out, _) = ttt(&["check", &path("corpus/01-interval.ttt")]);
    assert_eq!((code, out.as_str()), (0, "OK (14 declarations)\n"));
    let (code, out, err) = ttt(&["check", &path("corpus/15-mut-unbound.ttt")]);
    assert_eq!(code, 1);
    assert!((out + &err).contains(":4:47: UNBOUND_NAME"));
    let (code, _, _) = ttt(&["check", &path("corpus/no-such-file.ttt")]);
    assert_eq!(code, 2);
}

#[test]
fn norm_prints_type_and_normal_form() {
    let (code, out, _) = ttt(&["norm", &path("corpus/02-shapes.ttt"), "--term", "Delta1"]);
    assert_eq!(code, 0);
    assert_eq!(out, "Delta1 : U0\nDelta1 = I\n");
    let (code, _, _) = ttt(&["norm", &path("corpus/02-shapes.ttt"), "--term", "nothing"]);
    assert_eq!(code, 1);
}

#[test]
fn shape_totality_golden() {
    let (code, records) = json_records(&["shape", &path("shapes/totality.seq")]);
    assert_eq!(code, 0);
    let item = &records[0]["details"]["items"][0];
    assert_eq!(item["name"], "totality");
    assert_eq!(item["SIMPLICIAL"], Value::Bool(true));
    assert_eq!(item["CUBICAL"], Value::Bool(false));
}

#[test]
fn lat_queries() {
    let pres = path("presentations/simplex2.pres");
    let (code, out, _) = ttt(&[
        "lat",
        &pres,
        "--normal",
        "x1 \\/ x2",
        "--leq",
        "x2 <= x1",
        "--eq",
        "x1 = x2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().collect::<Vec<_>>().len(), 3, "{out}");
    assert!(out.lines().next().unwrap().ends_with("x1"), "{out}");
    let (_, records) = json_records(&["lat", "free:3", "--duality"]);
    assert_eq!(records[0]["details"]["duality"]["elements"], 20);
    assert_eq!(records[0]["details"]["duality"]["bijection"], true);
    let (_, records) = json_records(&["lat", "--glue"]);
    assert_eq!(records[0]["details"]["matches_case_tree"], true);
    assert_eq!(ttt(&["lat", "free:9"]).0, 1);
    assert_eq!(ttt(&["lat", &path("presentations/missing.pres")]).0, 2);
}

#[test]
fn json_parses_for_every_bundled_input() {
    for f in files("corpus", "ttt") {
        json_records(&["check", &f]);
    }
    for f in files("shapes", "seq") {
        let (code, _) = json_records(&["shape", &f]);
        assert_eq!(code, 0, "{f}");
    }
    for f in files("presentations", "pres") {
        json_records(&["lat", &f]);
        json_records(&["lat", &f, "--duality"]);
        json_records(&["lat", &f, "--normal", "1"]);
    }
    let (code, records) = json_records(&["corpus", &path("corpus")]);
    assert_eq!(code, 0);
    assert_eq!(records.len(), 1);
    json_records(&["norm", &path("corpus/06-cat.ttt"), "--term", "Cat"]);
    json_records(&["mode", "glo <= sha"]);
    json_records(&["mode", "op∘op"]);
    json_records(&["lat", "--glue"]);
}

#[test]
fn repeated_runs_are_identical() {
    let corpus = path("corpus");
    let shapes = files("shapes", "seq");
    let mut shape_args = vec!["shape"];
    shape_args.extend(shapes.iter().map(String::as_str));
    let commands: Vec<Vec<&str>> = vec![
        vec!["corpus", &corpus],
        vec!["--json", "corpus", &corpus],
        shape_args.clone(),
        [&["--json"][..], &shape_args].concat(),
        vec!["lat", "free:3"],
        vec!["--json", "lat", "simplex:4", "--duality"],
        vec!["lat", "--glue"],
    ];
    for args in commands {
        let first = ttt(&args);
        for _ in 0..2 {
            assert_eq!(ttt(&args), first, "{args:?}");
        }
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_ttt");
    let run = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let ok = run(&["mode", "glo <= id"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(ok.stdout, b"true\n");
    assert_eq!(
        run(&["check", &path("corpus/10-mut-locked-id.ttt")]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
