use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ttt::lattice::{glue_case_table, LatTerm, Lattice, Presentation, Restriction};

fn random_term(rng: &mut ChaCha8Rng, k: usize, depth: u32) -> LatTerm {
    let leaf = depth == 0 || rng.gen_bool(0.25);
    if leaf {
        return match rng.gen_range(0..k + 2) {
            0 => LatTerm::Zero,
            1 => LatTerm::One,
            g => LatTerm::gen(&format!("x{}", g - 1)),
        };
    }
    let a = random_term(rng, k, depth - 1);
    let b = random_term(rng, k, depth - 1);
    if rng.gen() {
        LatTerm::meet(a, b)
    } else {
        LatTerm::join(a, b)
    }
}

type Monomial = BTreeSet<usize>;

/// Disjunctive normal form with absorption, canonical in the free lattice.
fn dnf(t: &LatTerm) -> BTreeSet<Monomial> {
    let raw: BTreeSet<Monomial> = match t {
        LatTerm::Zero => BTreeSet::new(),
        LatTerm::One => [Monomial::new()].into(),
        LatTerm::Gen(g) => [[g[1..].parse::<usize>().unwrap()].into()].into(),
        LatTerm::Join(a, b) => dnf(a).union(&dnf(b)).cloned().collect(),
        LatTerm::Meet(a, b) => {
            let (a, b) = (dnf(a), dnf(b));
            a.iter()
                .flat_map(|m| b.iter().map(move |n| m.union(n).cloned().collect()))
                .collect()
        }
    };
    raw.iter()
        .filter(|m| !raw.iter().any(|n| n != *m && n.is_subset(m)))
        .cloned()
        .collect()
}

fn dnf_leq(s: &BTreeSet<Monomial>, t: &BTreeSet<Monomial>) -> bool {
    s.iter().all(|m| t.iter().any(|n| n.is_subset(m)))
}

#[test]
fn free_lattice_agrees_with_dnf_rewriting() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut equal = 0;
    for case in 0..1000 {
        let k = 1 + case % 4;
        let lat = Lattice::new(Presentation::free_k(k), 4).unwrap();
        let s = random_term(&mut rng, k, 4);
        // Bias towards equal pairs by sometimes rewriting s.
        let t = if rng.gen_bool(0.3) {
            lat.to_term(&lat.normal_form(&s).unwrap())
        } else {
            random_term(&mut rng, k, 4)
        };
        let (ds, dt) = (dnf(&s), dnf(&t));
        let eq = lat.decide_eq(&s, &t).unwrap();
        assert_eq!(eq, ds == dt, "{s} = {t}");
        assert_eq!(lat.decide_leq(&s, &t).unwrap(), dnf_leq(&ds, &dt), "{s} <= {t}");
        equal += eq as usize;
    }
    assert!(equal > 200, "only {equal} equal pairs");
}

/// Δⁿ is the chain 0 < xn < … < x1 < 1.
fn chain_value(t: &LatTerm, n: usize) -> usize {
    match t {
        LatTerm::Zero => 0,
        LatTerm::One => n + 1,
        LatTerm::Gen(g) => n + 1 - g[1..].parse::<usize>().unwrap(),
        LatTerm::Meet(a, b) => chain_value(a, n).min(chain_value(b, n)),
        LatTerm::Join(a, b) => chain_value(a, n).max(chain_value(b, n)),
    }
}

#[test]
fn simplex_presentations_are_chains() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in 1..=4 {
        let lat = Lattice::new(Presentation::simplex(n), 4).unwrap();
        assert_eq!(lat.enumerate_elements().len(), n + 2);
        for _ in 0..150 {
            let s = random_term(&mut rng, n, 4);
            let t = random_term(&mut rng, n, 4);
            let (vs, vt) = (chain_value(&s, n), chain_value(&t, n));
            assert_eq!(lat.decide_leq(&s, &t).unwrap(), vs <= vt, "Δ{n}: {s} <= {t}");
            assert_eq!(lat.decide_eq(&s, &t).unwrap(), vs == vt, "Δ{n}: {s} = {t}");
        }
    }
}

#[test]
fn free_lattice_sizes_are_dedekind_numbers() {
    let sizes: Vec<usize> = (0..=4)
        .map(|k| {
            Lattice::new(Presentation::free_k(k), 4)
                .unwrap()
                .enumerate_elements()
                .len()
        })
        .collect();
    assert_eq!(sizes, [2, 3, 6, 20, 168]);
}

#[test]
fn read_back_is_a_section_of_normal_form() {
    let mut presentations: Vec<Presentation> = (0..=4).map(Presentation::free_k).collect();
    presentations.extend((1..=4).map(Presentation::simplex));
    for pres in presentations {
        let lat = Lattice::new(pres, 4).unwrap();
        for f in lat.enumerate_elements() {
            let t = lat.to_term(&f);
            assert_eq!(lat.normal_form(&t).unwrap(), f, "{t}");
            let printed = LatTerm::parse(&t.to_string()).unwrap();
            assert_eq!(lat.normal_form(&printed).unwrap(), f, "{t}");
        }
    }
}

fn bundled() -> Vec<(String, Presentation)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../presentations");
    let mut files: Vec<PathBuf> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "pres"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let src = fs::read_to_string(&p).unwrap();
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, Presentation::parse(&src).unwrap())
        })
        .collect()
}

#[test]
fn bundled_presentations_satisfy_duality() {
    let all = bundled();
    assert!(all.len() >= 7);
    for (name, pres) in all {
        let lat = Lattice::new(pres, 3).unwrap();
        let report = lat.duality_check();
        assert!(report.bijection, "{name}");
        assert_eq!(report.elements, report.monotone_maps, "{name}");
        assert_eq!(report.elements, lat.enumerate_elements().len(), "{name}");
    }
}

#[test]
fn bundled_sizes() {
    let sizes: Vec<(String, usize)> = bundled()
        .into_iter()
        .map(|(n, p)| (n, Lattice::new(p, 3).unwrap().enumerate_elements().len()))
        .collect();
    let expect = [
        ("free0.pres", 2),
        ("free1.pres", 3),
        ("free2.pres", 6),
        ("free3.pres", 20),
        ("pushout.pres", 5),
        ("simplex2.pres", 4),
        ("simplex3.pres", 5),
    ];
    let expect: Vec<(String, usize)> = expect.iter().map(|(n, s)| (n.to_string(), *s)).collect();
    assert_eq!(sizes, expect);
}

#[test]
fn glue_table_has_six_leaves() {
    let report = glue_case_table();
    assert_eq!(report.elements, 6);
    assert!(report.matches_case_tree && report.excluded_cell_empty && report.one_leaf_is_constant);
    let nonempty: Vec<_> = report.cells.iter().filter(|c| !c.members.is_empty()).collect();
    assert_eq!(nonempty.len(), 6);
    assert!(nonempty.iter().all(|c| c.members.len() == 1));
    let one: Vec<_> = report
        .cells
        .iter()
        .filter(|c| c.at_zero == Restriction::One)
        .flat_map(|c| c.members.iter())
        .collect();
    assert_eq!(one, ["1"]);
}

#[test]
fn bound_is_enforced() {
    assert!(Lattice::new(Presentation::free_k(5), 4).is_err());
    assert!(Lattice::new(Presentation::free_k(4), 4).is_ok());
}

fn term3() -> impl Strategy<Value = LatTerm> {
    let leaf = prop_oneof![
        Just(LatTerm::Zero),
        Just(LatTerm::One),
        (1..=3usize).prop_map(|i| LatTerm::gen(&format!("x{i}"))),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| LatTerm::meet(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| LatTerm::join(a, b)),
        ]
    })
}

proptest! {
    #[test]
    fn distributive_lattice_laws(a in term3(), b in term3(), c in term3()) {
        let lat = Lattice::new(Presentation::free_k(3), 3).unwrap();
        let eq = |s: LatTerm, t: LatTerm| lat.decide_eq(&s, &t).unwrap();
        let (m, j) = (LatTerm::meet, LatTerm::join);
        prop_assert!(eq(m(a.clone(), b.clone()), m(b.clone(), a.clone())));
        prop_assert!(eq(j(a.clone(), b.clone()), j(b.clone(), a.clone())));
        prop_assert!(eq(m(a.clone(), m(b.clone(), c.clone())), m(m(a.clone(), b.clone()), c.clone())));
        prop_assert!(eq(j(a.clone(), m(a.clone(), b.clone())), a.clone()));
        prop_assert!(eq(m(a.clone(), j(a.clone(), b.clone())), a.clone()));
        prop_assert!(eq(
            m(a.clone(), j(b.clone(), c.clone())),
            j(m(a.clone(), b.clone()), m(a.clone(), c.clone()))
        ));
        prop_assert!(eq(m(a.clone(), LatTerm::One), a.clone()));
        prop_assert!(eq(j(a.clone(), LatTerm::Zero), a.clone()));
        prop_assert!(lat.decide_leq(&m(a.clone(), b.clone()), &a).unwrap());
        prop_assert!(lat.decide_leq(&a, &j(a.clone(), b.clone())).unwrap());
    }

    #[test]
    fn order_matches_meet(a in term3(), b in term3()) {
        let lat = Lattice::new(Presentation::simplex(3), 3).unwrap();
        let leq = lat.decide_leq(&a, &b).unwrap();
        let by_meet = lat.decide_eq(&LatTerm::meet(a.clone(), b.clone()), &a).unwrap();
        prop_assert_eq!(leq, by_meet);
        let (fa, fb) = (lat.normal_form(&a).unwrap(), lat.normal_form(&b).unwrap());
        prop_assert_eq!(fa.leq(&fb), leq);
        prop_assert_eq!(fa.meet(&fb), lat.normal_form(&LatTerm::meet(a, b)).unwrap());
    }
}
