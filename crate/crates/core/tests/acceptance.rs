//! One line per acceptance criterion, with its runtime against the budget.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ttt::check::Session;
use ttt::corpus::{run_corpus, Expected, Outcome};
use ttt::eval::convertible;
use ttt::lattice::{glue_case_table, LatTerm, Lattice, Presentation, Restriction};
use ttt::modality::{Generator, Modality, ModalityWord};
use ttt::shapes::{decide, parse_sequents, Atom, Formula, Options, Semantics, Sequent};
use ttt::syntax::{Context, Term};

mod common;

use common::{corpus_dir, equation_source};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// Criterion 1. Words are strings over g, s, o read outermost first.

fn rewrite(word: &str) -> String {
    let mut w = word.to_string();
    loop {
        let before = w.clone();
        for (l, r) in [
            ("oo", ""),
            ("gg", "g"),
            ("gs", "g"),
            ("go", "g"),
            ("sg", "s"),
            ("ss", "s"),
            ("so", "s"),
        ] {
            w = w.replace(l, r);
        }
        if w == before {
            return w;
        }
    }
}

fn to_word(m: Modality) -> String {
    m.word()
        .letters
        .iter()
        .map(|g| match g {
            Generator::Glo => 'g',
            Generator::Sha => 's',
            Generator::Op => 'o',
        })
        .collect()
}

fn from_letters(w: &str) -> ModalityWord {
    ModalityWord::new(
        w.chars()
            .map(|c| match c {
                'g' => Generator::Glo,
                's' => Generator::Sha,
                _ => Generator::Op,
            })
            .collect(),
    )
}

fn mode_theory() -> Result<String, String> {
    // Every word up to length 6 rewrites to one of six forms, as in the crate.
    let mut words = vec![String::new()];
    let mut forms = BTreeSet::new();
    for _ in 0..6 {
        let next: Vec<String> = words
            .iter()
            .flat_map(|w| ["g", "s", "o"].map(|c| format!("{w}{c}")))
            .collect();
        for w in words.iter().chain(&next) {
            let nf = rewrite(w);
            ensure(to_word(from_letters(w).normalize()) == nf, || format!("word {w:?}"))?;
            forms.insert(nf);
        }
        words = next;
    }
    let expected: BTreeSet<String> = ["", "o", "g", "s", "og", "os"].map(String::from).into();
    ensure(forms == expected, || format!("forms {forms:?}"))?;
    ensure(Modality::ALL.len() == 6, || "six modalities".into())?;
    ensure(
        Modality::ALL.iter().map(|m| to_word(*m)).collect::<BTreeSet<_>>() == expected,
        || "canonical forms".into(),
    )?;

    let m = |s: &str| s.parse::<Modality>().unwrap();
    let (id, op, glo, sha) = (m("id"), m("op"), m("glo"), m("sha"));
    let equations = [
        (glo, glo.compose(glo)),
        (glo, glo.compose(sha)),
        (glo, glo.compose(op)),
        (sha, sha.compose(glo)),
        (sha, sha.compose(sha)),
        (sha, sha.compose(op)),
        (id, op.compose(op)),
    ];
    for (i, (a, b)) in equations.iter().enumerate() {
        ensure(a == b, || format!("equation {i}: {a} vs {b}"))?;
    }
    ensure(glo.leq(id) && id.leq(sha), || "glo <= id <= sha".into())?;

    // Order oracle: closure of the two generating inequalities under
    // whiskering on both sides and transitivity.
    let all: Vec<String> = expected.iter().cloned().collect();
    let mut le: BTreeSet<(String, String)> = all.iter().map(|a| (a.clone(), a.clone())).collect();
    le.insert(("g".into(), "".into()));
    le.insert(("".into(), "s".into()));
    loop {
        let mut next = le.clone();
        for (a, b) in &le {
            for c in &all {
                next.insert((rewrite(&format!("{c}{a}")), rewrite(&format!("{c}{b}"))));
                next.insert((rewrite(&format!("{a}{c}")), rewrite(&format!("{b}{c}"))));
            }
            for (b2, c) in &le {
                if b == b2 {
                    next.insert((a.clone(), c.clone()));
                }
            }
        }
        if next == le {
            break;
        }
        le = next;
    }
    for a in Modality::ALL {
        for b in Modality::ALL {
            let oracle = le.contains(&(to_word(a), to_word(b)));
            ensure(a.leq(b) == oracle, || format!("{a} <= {b}: oracle {oracle}"))?;
        }
    }

    for a in Modality::ALL {
        for b in Modality::ALL {
            ensure(to_word(a.compose(b)) == rewrite(&(to_word(a) + &to_word(b))), || {
                format!("{a}∘{b}")
            })?;
            for c in Modality::ALL {
                ensure(a.compose(b.compose(c)) == a.compose(b).compose(c), || {
                    format!("assoc {a} {b} {c}")
                })?;
                if a.leq(b) {
                    ensure(c.compose(a).leq(c.compose(b)) && a.compose(c).leq(b.compose(c)), || {
                        format!("congruence {a} <= {b} under {c}")
                    })?;
                }
                if a.leq(b) && b.leq(c) {
                    ensure(a.leq(c), || format!("transitivity {a} {b} {c}"))?;
                }
            }
        }
        ensure(a.compose(id) == a && id.compose(a) == a, || format!("unit {a}"))?;
    }
    Ok(format!("6 forms, {} order pairs, 216 triples", le.len()))
}

fn calculus() -> Result<String, String> {
    let (src, names) = equation_source();
    let mut s = Session::new();
    s.check_source("equations.ttt", &src, Some(&corpus_dir()))
        .map_err(|e| e.to_string())?;
    let ctx = Context::new();
    for n in &names {
        let l = s.sig.get(&format!("{n}_l")).unwrap().clone();
        let ok = convertible(
            &s.sig,
            &ctx,
            &l.ty,
            &Term::constant(&l.name),
            &Term::constant(&format!("{n}_r")),
        );
        ensure(ok, || format!("{n} not convertible"))?;
    }
    ensure(names.len() >= 24, || format!("{} instances", names.len()))?;

    // Subject reduction: normal forms of library definitions check at the
    // same type.
    let mut lib = Session::new();
    lib.check_file(&corpus_dir().join("06-cat.ttt"))
        .map_err(|e| e.to_string())?;
    let sig = lib.sig;
    let mut spot = 0;
    for d in sig.declarations().filter(|d| !d.is_postulate()) {
        let nf = ttt::eval::normalize(&sig, &ctx, &d.ty, &Term::constant(&d.name)).map_err(|e| e.to_string())?;
        let copy = ttt::syntax::Declaration::definition(&format!("{}_nf", d.name), d.ty.clone(), nf);
        ttt::check::check_decl(&sig, &copy).map_err(|e| format!("{}: {e}", d.name))?;
        spot += 1;
    }
    ensure(spot >= 40, || format!("{spot} definitions"))?;
    Ok(format!(
        "{} equation instances, {spot} normal forms re-checked",
        names.len()
    ))
}

fn corpus() -> Result<String, String> {
    let report = run_corpus(&corpus_dir()).map_err(|e| e.to_string())?;
    for r in &report.results {
        ensure(r.pass, || {
            format!("{}: expected {}, got {}", r.file, r.expected, r.outcome)
        })?;
        if let (Expected::Reject(k), Outcome::Rejected { kind, .. }) = (&r.expected, &r.outcome) {
            ensure(k == kind, || r.file.clone())?;
        }
    }
    ensure(report.ok(), || format!("{report}"))?;
    ensure(report.declarations >= 40, || {
        format!("{} declarations", report.declarations)
    })?;
    let mut s = Session::new();
    s.check_file(&corpus_dir().join("06-cat.ttt"))
        .map_err(|e| e.to_string())?;
    let postulates = [
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
        "univCocart",
        "dua",
    ];
    for p in postulates {
        ensure(s.sig.get(p).is_some_and(|d| d.is_postulate()), || {
            format!("postulate {p}")
        })?;
    }
    for d in [
        "le",
        "Delta2",
        "Lambda21",
        "hom",
        "isSegal",
        "isRezk",
        "isSimp",
        "isCocartArr",
        "Glue",
        "Cat",
    ] {
        ensure(s.sig.get(d).is_some_and(|d| !d.is_postulate()), || {
            format!("definition {d}")
        })?;
    }
    Ok(format!(
        "{} files, {} declarations ({} postulates)",
        report.files, report.declarations, report.postulates
    ))
}

fn cardinalities() -> Result<String, String> {
    let free: Vec<usize> = (0..=3)
        .map(|k| {
            Lattice::new(Presentation::free_k(k), 3)
                .unwrap()
                .enumerate_elements()
                .len()
        })
        .collect();
    ensure(free == [2, 3, 6, 20], || format!("free sizes {free:?}"))?;
    for n in 0..=4 {
        let lat = Lattice::new(Presentation::simplex(n), 4).map_err(|e| e.to_string())?;
        let elements = lat.enumerate_elements();
        ensure(elements.len() == n + 2, || format!("Δ{n} has {}", elements.len()))?;
        // Each element reads back as 0, 1 or a single generator.
        for f in &elements {
            let t = lat.to_term(f);
            ensure(matches!(t, LatTerm::Zero | LatTerm::One | LatTerm::Gen(_)), || {
                format!("Δ{n}: {t}")
            })?;
        }
    }
    Ok(format!("free {free:?}, simplices n+2 for n <= 4"))
}

fn duality() -> Result<String, String> {
    let mut files: Vec<PathBuf> = fs::read_dir(root().join("presentations"))
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "pres"))
        .collect();
    files.sort();
    let mut checked = 0;
    for p in &files {
        let pres = Presentation::parse(&fs::read_to_string(p).unwrap()).map_err(|e| e.to_string())?;
        if pres.generators.len() > 3 {
            continue;
        }
        let r = Lattice::new(pres, 3).unwrap().duality_check();
        ensure(r.bijection && r.elements == r.monotone_maps, || {
            format!("{}", p.display())
        })?;
        checked += 1;
    }
    ensure(checked >= 7, || format!("{checked} presentations"))?;
    Ok(format!("{checked} bundled presentations"))
}

fn glue() -> Result<String, String> {
    let r = glue_case_table();
    ensure(r.elements == 6, || format!("{} maps", r.elements))?;
    ensure(r.matches_case_tree, || "case tree".into())?;
    let nonempty = r.cells.iter().filter(|c| !c.members.is_empty()).count();
    ensure(nonempty == 6, || format!("{nonempty} leaves"))?;
    let excluded = r
        .cells
        .iter()
        .find(|c| c.at_zero == Restriction::Identity && c.at_one == Restriction::Zero)
        .unwrap();
    ensure(excluded.members.is_empty() && r.excluded_cell_empty, || {
        "excluded cell".into()
    })?;
    let ones: Vec<&String> = r
        .cells
        .iter()
        .filter(|c| c.at_zero == Restriction::One)
        .flat_map(|c| &c.members)
        .collect();
    ensure(ones == ["1"] && r.one_leaf_is_constant, || {
        format!("α(0,−)=1 leaf {ones:?}")
    })?;
    Ok(format!("{} maps in {nonempty} leaves", r.elements))
}

fn random_term(rng: &mut ChaCha8Rng, vars: &[&str], depth: u32) -> LatTerm {
    if depth == 0 || rng.gen_bool(0.5) {
        return match rng.gen_range(0..10) {
            0 => LatTerm::Zero,
            1 => LatTerm::One,
            _ => LatTerm::gen(vars[rng.gen_range(0..vars.len())]),
        };
    }
    let (a, b) = (random_term(rng, vars, depth - 1), random_term(rng, vars, depth - 1));
    if rng.gen() {
        LatTerm::meet(a, b)
    } else {
        LatTerm::join(a, b)
    }
}

fn random_goal(rng: &mut ChaCha8Rng, vars: &[&str], depth: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        let (s, t) = (random_term(rng, vars, 1), random_term(rng, vars, 1));
        // Comparability statements separate chains from general lattices.
        return if rng.gen_bool(0.7) {
            Formula::or(Formula::le(s.clone(), t.clone()), Formula::le(t, s))
        } else {
            Formula::le(s, t)
        };
    }
    let (a, b) = (random_goal(rng, vars, depth - 1), random_goal(rng, vars, depth - 1));
    if rng.gen_bool(0.8) {
        Formula::or(a, b)
    } else {
        Formula::and(a, b)
    }
}

fn shape_semantics() -> Result<String, String> {
    let opts = Options::default();
    let load = |name: &str| {
        let src = fs::read_to_string(root().join("shapes").join(name)).unwrap();
        parse_sequents(&src, name).unwrap()
    };
    let totality = &load("totality.seq")[0];
    ensure(decide(totality, Semantics::Simplicial, &opts) == Ok(true), || {
        "totality simplicial".into()
    })?;
    ensure(decide(totality, Semantics::Cubical, &opts) == Ok(false), || {
        "totality cubical".into()
    })?;
    let coverings = load("covering.seq");
    ensure(coverings.len() == 3, || "three coverings".into())?;
    for c in &coverings {
        ensure(decide(c, Semantics::Simplicial, &opts) == Ok(true), || c.name.clone())?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let names = ["a", "b", "c"];
    let mut counts = BTreeMap::new();
    for i in 0..500 {
        let vars = &names[..rng.gen_range(1..=3)];
        let hyps = (0..rng.gen_range(0..=1))
            .map(|_| Atom::Le(random_term(&mut rng, vars, 1), random_term(&mut rng, vars, 1)))
            .collect();
        let seq = Sequent::new(&format!("case{i}"), vars, hyps, random_goal(&mut rng, vars, 3));
        let c = decide(&seq, Semantics::Cubical, &opts).map_err(|e| e.to_string())?;
        let s = decide(&seq, Semantics::Simplicial, &opts).map_err(|e| e.to_string())?;
        ensure(!c || s, || format!("{}: {seq}", seq.name))?;
        *counts.entry((c, s)).or_insert(0) += 1;
    }
    let gap = counts.get(&(false, true)).copied().unwrap_or(0);
    ensure(gap >= 25, || format!("only {gap} cases separate the semantics"))?;
    Ok(format!("500 random sequents, (cubical, simplicial) counts {counts:?}"))
}

fn determinism() -> Result<String, String> {
    let bin = env!("CARGO_BIN_EXE_ttt");
    let root = root();
    let mut shape = vec!["shape".to_string()];
    let mut seqs: Vec<String> = fs::read_dir(root.join("shapes"))
        .unwrap()
        .map(|e| e.unwrap().path().display().to_string())
        .collect();
    seqs.sort();
    shape.extend(seqs);
    let runs: Vec<Vec<String>> = vec![
        vec!["corpus".into(), "corpus".into()],
        vec!["--json".into(), "corpus".into(), "corpus".into()],
        shape.clone(),
        [vec!["--json".to_string()], shape].concat(),
        vec!["lat".into(), "presentations/free3.pres".into()],
        vec!["--json".into(), "lat".into(), "simplex:4".into(), "--duality".into()],
        vec!["lat".into(), "--glue".into()],
    ];
    for args in runs {
        let outputs: Vec<_> = (0..3)
            .map(|_| Command::new(bin).args(&args).current_dir(&root).output().unwrap())
            .collect();
        ensure(outputs[0].status.success(), || format!("{args:?} failed"))?;
        for o in &outputs[1..] {
            ensure(o.stdout == outputs[0].stdout && o.stderr == outputs[0].stderr, || {
                format!("{args:?} differs between runs")
            })?;
        }
    }
    Ok("corpus, shape and lat outputs identical over 3 runs".into())
}

type Criterion = (&'static str, Option<Duration>, fn() -> Result<String, String>);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("mode theory", Some(Duration::from_secs(1)), mode_theory),
        ("calculus", Some(Duration::from_secs(5)), calculus),
        ("corpus", Some(Duration::from_secs(10)), corpus),
        ("lattice cardinalities", Some(Duration::from_secs(2)), cardinalities),
        ("duality", Some(Duration::from_secs(5)), duality),
        ("glue case table", Some(Duration::from_secs(1)), glue),
        ("shape semantics", Some(Duration::from_secs(30)), shape_semantics),
        ("determinism", None, determinism),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let in_budget = budget.is_none_or(|b| took <= b);
        let verdict = match (&result, in_budget) {
            (Ok(detail), true) => format!("PASS ({detail})"),
            (Ok(_), false) => format!("FAIL (over budget of {:?})", budget.unwrap()),
            (Err(e), _) => format!("FAIL: {e}"),
        };
        if !verdict.starts_with("PASS") {
            failed += 1;
        }
        println!("criterion {} {name}: {verdict} [{:.3}s]", i + 1, took.as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
