use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use ttt::check::ErrorKind;
use ttt::corpus::{run_corpus, Expected, Manifest, Outcome};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Top-level `def`/`postulate` names of the library files, with their kind
/// and how often each occurs.
fn library_declarations() -> BTreeMap<String, (&'static str, usize)> {
    let mut out: BTreeMap<String, (&'static str, usize)> = BTreeMap::new();
    let manifest = Manifest::load(&corpus_dir()).unwrap();
    for entry in manifest
        .entries
        .iter()
        .filter(|e| e.expected == Expected::Accept && e.file.starts_with('0'))
    {
        let src = fs::read_to_string(corpus_dir().join(&entry.file)).unwrap();
        for line in src.lines() {
            let mut words = line.split_whitespace();
            let kind = match words.next() {
                Some("def") => "def",
                Some("postulate") => "postulate",
                _ => continue,
            };
            let name: String = words
                .next()
                .unwrap()
                .chars()
                .take_while(|c| c.is_alphanumeric() || *c == '_' || *c == '\'')
                .collect();
            out.entry(name).or_insert((kind, 0)).1 += 1;
        }
    }
    out
}

#[test]
fn corpus_matches_manifest() {
    let report = run_corpus(&corpus_dir()).unwrap();
    assert!(report.ok(), "{report}");
    assert!(report.manifest_problems.is_empty());
    assert!(report.declarations >= 40, "{}", report.declarations);
    let rejects = report
        .results
        .iter()
        .filter(|r| matches!(r.expected, Expected::Reject(_)))
        .count();
    assert!(rejects >= 10, "{rejects}");
}

#[test]
fn rejections_carry_the_expected_kind() {
    let report = run_corpus(&corpus_dir()).unwrap();
    for r in &report.results {
        match (&r.expected, &r.outcome) {
            (Expected::Reject(want), Outcome::Rejected { kind, message }) => {
                assert_eq!(want, kind, "{}: {message}", r.file);
                assert!(!message.is_empty());
            }
            (Expected::Accept, Outcome::Accepted { declarations }) => assert!(*declarations > 0, "{}", r.file),
            _ => panic!("{}: expected {}, got {}", r.file, r.expected, r.outcome),
        }
    }
    let kinds: Vec<ErrorKind> = report
        .results
        .iter()
        .filter_map(|r| match r.expected {
            Expected::Reject(k) => Some(k),
            Expected::Accept => None,
        })
        .collect();
    for k in [
        ErrorKind::VariableLocked,
        ErrorKind::TypeMismatch,
        ErrorKind::UnboundName,
    ] {
        assert!(kinds.contains(&k), "{k}");
    }
}

#[test]
fn named_definitions_appear_once() {
    let decls = library_declarations();
    let definitions = [
        "le",
        "Delta1",
        "Delta2",
        "Delta3",
        "simplex",
        "Lambda21",
        "Lambda20",
        "Lambda22",
        "Spine2",
        "Spine3",
        "hom",
        "dhom",
        "isContr",
        "isProp",
        "isSet",
        "isEquiv",
        "isSegal",
        "isRezk",
        "isSimp",
        "isCategory",
        "Uni",
        "Prop",
        "isCocartArr",
        "hasLCCLifts",
        "LCCLiftsCompose",
        "Glue",
        "Cat",
    ];
    for name in definitions {
        assert_eq!(decls.get(name), Some(&("def", 1)), "{name}");
    }
}

#[test]
fn axioms_are_single_postulates() {
    let decls = library_declarations();
    let axioms = [
        "univalence",
        "intLattice",
        "crispInd",
        "intGlobalPoints",
        "intDetectsDiscrete",
        "cubesSeparate",
        "simpStability",
        "amazingRightAdjoint",
        "intOp",
        "duality",
        "IntIso",
        "aIsInner",
        "aHasLCCLifts",
        "aLCCLiftsCompose",
        "univCocart",
        "dua",
    ];
    for name in axioms {
        assert_eq!(decls.get(name), Some(&("postulate", 1)), "{name}");
    }
    assert!(decls.values().all(|(_, n)| *n == 1));
}

#[test]
fn manifest_errors_are_reported() {
    assert!(Manifest::parse("a.ttt MAYBE\n").is_err());
    assert!(Manifest::parse("a.ttt REJECT NO_SUCH_KIND\n").is_err());
    let m = Manifest::parse("# comment\n\na.ttt ACCEPT\nb.ttt REJECT TYPE_MISMATCH\n").unwrap();
    assert_eq!(m.entries.len(), 2);
    assert_eq!(m.entries[1].expected, Expected::Reject(ErrorKind::TypeMismatch));
    assert_eq!(m.entries[1].line, 4);
}

#[test]
fn coverage_catches_unlisted_and_repeated_files() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("coverage");
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    fs::write(dir.join("a.ttt"), "def x : U1 := U\n").unwrap();
    fs::write(dir.join("b.ttt"), "def y : U1 := U\n").unwrap();
    fs::write(dir.join("manifest"), "a.ttt ACCEPT\na.ttt ACCEPT\n").unwrap();
    let problems = Manifest::load(&dir).unwrap().coverage_problems(&dir).unwrap();
    assert_eq!(problems.len(), 2, "{problems:?}");
    let report = run_corpus(&dir).unwrap();
    assert!(!report.ok());
}
