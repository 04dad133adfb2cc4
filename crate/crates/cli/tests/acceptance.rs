//! Acceptance suite: one test per criterion, each printing a pass line
//! and holding its stated runtime bound.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use serde::Deserialize;

use iwreath::cohopf::{
    cohopfian_verdict, eventually_subgroup_criterion, greedy_map_for_spec, Outcome, SequenceSpec,
    SequenceSpecJson, TailMode,
};
use iwreath::embed::{
    compose_degree_one, ia_into_pa, insert_middle, pembed_wreath, pembedding_from_parts,
    perm_iso_wreath, self_embed, term_witness, PEmbedding, VerifyMode,
};
use iwreath::equiv::perm_iso_to_subgroup;
use iwreath::groupspec::parse_group_spec;
use iwreath::kaloujnine::{choose_transversals, embed_via_series, validate_series};
use iwreath::wreath::{tower, Tower, WreathKind};
use iwreath::{Domain, Perm, PermGroup};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn group(degree: usize, gens: &[&str]) -> PermGroup {
    let gens = gens
        .iter()
        .map(|s| Perm::parse(s, degree).unwrap())
        .collect();
    PermGroup::from_generators(Domain::plain(degree), gens).unwrap()
}

fn c2() -> PermGroup {
    parse_group_spec("C2:reg").unwrap()
}
fn c3() -> PermGroup {
    parse_group_spec("C3:reg").unwrap()
}

fn assert_within(start: Instant, bound: Duration, what: &str) {
    let elapsed = start.elapsed();
    assert!(
        elapsed <= bound,
        "{what} took {elapsed:?}, bound is {bound:?}"
    );
}

#[test]
fn criterion_1_wreath_lift_instance() {
    let start = Instant::now();
    // S = C2, H = C2, G = the double transposition, blocks {0,2} and
    // {1,3} swapped by the generator, r = 2
    let h = c2();
    let g = group(4, &["(0 1)(2 3)"]);
    let input = pembedding_from_parts(
        &h,
        &g,
        vec![g.generators()[0].clone()],
        vec![vec![0, 2], vec![1, 3]],
        2,
    )
    .unwrap();
    assert!(input.verify().unwrap().passed());
    let e = pembed_wreath(&input, &c2()).unwrap();
    assert_eq!(e.source.order(), BigUint::from(8u32));
    assert_eq!(e.target.order(), BigUint::from(32u32));
    let report = e.verify().unwrap();
    assert!(report.passed(), "{report}");
    assert_eq!(report.verify_mode, VerifyMode::Exhaustive);
    assert_eq!(
        report.checked_pairs,
        8 * 4,
        "all 8x4 (element, point) pairs"
    );

    // measure |gamma(phi)| by enumerating all 16 functions of the target
    let gamma_idx: Vec<Vec<usize>> = input
        .gamma
        .iter()
        .map(|set| {
            set.iter()
                .map(|p| input.target.point_index(p).unwrap())
                .collect()
        })
        .collect();
    for phi in 0..4 {
        let (om, eps) = (phi / 2, phi % 2);
        let mut oracle = BTreeSet::new();
        for f in 0..16usize {
            let digit = |i: usize| (f >> (3 - i)) & 1;
            let constant = |set: &[usize]| set.iter().all(|&i| digit(i) == digit(set[0]));
            let other = 1 - eps;
            if constant(&gamma_idx[eps])
                && digit(gamma_idx[eps][0]) == om
                && !constant(&gamma_idx[other])
            {
                oracle.insert(f);
            }
        }
        assert_eq!(oracle.len() as u64, e.degree, "formula value 2");
        assert_eq!(oracle.len(), 2);
        let produced: BTreeSet<usize> = e.gamma[phi]
            .iter()
            .map(|p| e.target.point_index(p).unwrap())
            .collect();
        assert_eq!(produced, oracle);
    }
    assert_within(start, Duration::from_secs(1), "criterion 1");
    println!("criterion 1 (wreath lift instance): PASS");
}

#[test]
fn criterion_2_tower_embedding_with_compatibility() {
    let start = Instant::now();
    let seq = vec![c2(), c2(), c2()];
    let out = ia_into_pa(&seq, 2).unwrap();
    let e = out.top();
    assert_eq!(e.source.order(), BigUint::from(8u32));
    assert_eq!(e.target.order(), BigUint::from(128u32));
    let report = e.verify().unwrap();
    assert!(report.passed(), "{report}");
    assert_eq!(report.verify_mode, VerifyMode::Exhaustive);
    for c in &out.compatibility {
        assert!(c.ok, "projection compatibility at level {}", c.level);
        assert_eq!(c.checked_elements, 8, "exact equality on all elements");
    }
    assert_within(start, Duration::from_secs(1), "criterion 2");
    println!("criterion 2 (tower embedding + compatibility): PASS");
}

#[test]
fn criterion_3_series_embeddings() {
    let start = Instant::now();
    struct Case {
        group: PermGroup,
        chain: Vec<Vec<Perm>>,
        target_order: u32,
        pairs: usize,
    }
    let cases = vec![
        Case {
            group: parse_group_spec("S3:nat").unwrap(),
            chain: vec![vec![Perm::parse("(0 1 2)", 3).unwrap()], vec![]],
            target_order: 18,
            pairs: 36,
        },
        Case {
            group: parse_group_spec("C4:reg").unwrap(),
            chain: vec![vec![Perm::parse("(0 2)(1 3)", 4).unwrap()], vec![]],
            target_order: 8,
            pairs: 16,
        },
        Case {
            group: parse_group_spec("A4:nat").unwrap(),
            chain: vec![
                vec![
                    Perm::parse("(0 1)(2 3)", 4).unwrap(),
                    Perm::parse("(0 2)(1 3)", 4).unwrap(),
                ],
                vec![Perm::parse("(0 1)(2 3)", 4).unwrap()],
                vec![],
            ],
            target_order: 1536,
            pairs: 144,
        },
    ];
    for case in cases {
        let series = validate_series(&case.group, &case.chain).unwrap();
        let table = choose_transversals(&series).unwrap();
        let e = embed_via_series(&series, &table).unwrap();
        assert_eq!(e.target.order(), BigUint::from(case.target_order));
        let report = e.verify().unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.checked_pairs, case.pairs);
        // trivial kernel: the image has the full source order
        let (iota, _) = e.iota_table().unwrap();
        let images: std::collections::HashSet<_> = iota.iter().collect();
        assert_eq!(images.len(), case.group.order_usize().unwrap());
        // structured decomposition is exact
        for el in &iota {
            let flat = e.target.flat_images(el, 100_000).unwrap();
            let back = e
                .target
                .decompose_flat(&Perm::from_images(flat).unwrap())
                .unwrap();
            assert_eq!(&back, el);
        }
    }
    assert_within(start, Duration::from_secs(2), "criterion 3");
    println!("criterion 3 (series embeddings): PASS");
}

#[test]
fn criterion_4_self_embedding_constant_c2() {
    let start = Instant::now();
    let seq = vec![c2(), c2(), c2()];
    let se = self_embed(&seq, 2, &[2, 3], None).unwrap();
    assert_eq!(se.source_order, BigUint::from(8u32));
    assert_eq!(se.target_order, BigUint::from(128u32));
    assert!(se.proper);
    assert_eq!(se.index, BigUint::from(16u32));
    let report = se.embedding.verify().unwrap();
    assert!(report.passed(), "{report}");
    assert_within(start, Duration::from_secs(1), "criterion 4");
    println!("criterion 4 (constant C2 self-embedding): PASS");
}

#[test]
fn criterion_5_witness_lift_and_middle_insertion() {
    let start = Instant::now();

    // witness lift: C2 inside Sym(3) below, C2 identically on top
    let s3 = parse_group_spec("S3:nat").unwrap();
    let w1 = term_witness(&[c2(), s3], 1, 2).unwrap();
    let w2 = PEmbedding::identity(&c2());
    let e41 = perm_iso_wreath(&w1, &w2).unwrap();
    assert_eq!(e41.source.order(), BigUint::from(8u32));
    assert_eq!(e41.target.order(), BigUint::from(72u32));
    let report = e41.verify().unwrap();
    assert!(report.passed(), "{report}");
    // top-group factorization, generator by generator: base generators
    // project to the identity, top generators to the top witness images
    let node = e41.target.as_node().unwrap();
    let n_base = w1.source.generators().len() * w2.source.degree();
    for (k, img) in e41.iota_gens.iter().enumerate() {
        let projected = node.project_to_top(img).unwrap();
        if k < n_base {
            assert_eq!(projected, e41.target.as_node().unwrap().top().identity());
        } else {
            assert_eq!(projected, w2.iota_gens[k - n_base]);
        }
    }

    // middle insertion with C2 everywhere
    let e42 = insert_middle(&c2(), &c2(), &Tower::Leaf(c2())).unwrap();
    assert_eq!(e42.source.order(), BigUint::from(8u32));
    assert_eq!(e42.target.order(), BigUint::from(128u32));
    let report = e42.verify().unwrap();
    assert!(report.passed(), "{report}");
    // the inserted level identifies the top groups: projecting twice
    // reproduces the source top generator
    let w = e42.target.as_node().unwrap();
    let u = w.top().as_node().unwrap();
    let n_base = e42
        .source_tower
        .as_node()
        .unwrap()
        .bottom()
        .generators()
        .len()
        * e42
            .source_tower
            .as_node()
            .unwrap()
            .top_degree_usize()
            .unwrap();
    let source_top_gens = e42
        .source_tower
        .as_node()
        .unwrap()
        .top()
        .generators()
        .unwrap();
    for (k, img) in e42.iota_gens.iter().enumerate().skip(n_base) {
        let projected = u.project_to_top(&w.project_to_top(img).unwrap()).unwrap();
        assert_eq!(projected, source_top_gens[k - n_base]);
    }

    assert_within(start, Duration::from_secs(1), "criterion 5");
    println!("criterion 5 (witness lift and middle insertion): PASS");
}

#[test]
fn criterion_6_order_and_degree_formulas() {
    let start = Instant::now();
    // every fixture tower of order <= 10^4: structural order equals the
    // brute-force closure count of the flattened group
    let fixture_towers = vec![
        tower(WreathKind::ProductAction, &[c2(), c2()], 2).unwrap(),
        tower(WreathKind::ProductAction, &[c2(), c2(), c2()], 3).unwrap(),
        tower(WreathKind::Imprimitive, &[c2(), c3()], 2).unwrap(),
        tower(WreathKind::Imprimitive, &[c3(), c2()], 2).unwrap(),
        tower(WreathKind::Imprimitive, &[c2(), c2(), c2()], 3).unwrap(),
        tower(WreathKind::ProductAction, &[c3(), c2()], 2).unwrap(),
        tower(WreathKind::Imprimitive, &[c3(), c2(), c2()], 3).unwrap(),
    ];
    for t in fixture_towers {
        assert!(t.order() <= BigUint::from(10_000u32));
        let flat = t.flatten(100_000).unwrap();
        assert_eq!(flat.order_via_enumeration(1_000_000).unwrap(), t.order());
    }
    // the constant-C2 product-action table
    let seq = vec![c2(); 4];
    let mut degrees = Vec::new();
    let mut orders = Vec::new();
    for n in 1..=4 {
        let t = tower(WreathKind::ProductAction, &seq, n).unwrap();
        degrees.push(t.degree());
        orders.push(t.order());
    }
    assert_eq!(degrees, [2u32, 4, 16, 65536].map(BigUint::from).to_vec());
    assert_eq!(
        orders,
        vec![
            BigUint::from(2u32),
            BigUint::from(8u32),
            BigUint::from(128u32),
            BigUint::from(2u32).pow(23),
        ]
    );
    assert_within(start, Duration::from_secs(5), "criterion 6");
    println!("criterion 6 (order and degree formulas): PASS");
}

#[derive(Deserialize)]
struct WorkedExample {
    one_indexed_labels: Vec<String>,
    witness_subset_labels: Vec<String>,
    witness_subset_points: Vec<usize>,
}

#[test]
fn criterion_7_worked_example_witness() {
    let start = Instant::now();
    let fx: WorkedExample =
        serde_json::from_str(&std::fs::read_to_string(fixture("worked_example.json")).unwrap())
            .unwrap();
    // the textbook 1-indexed points become labels over 0-indexed storage
    let h = PermGroup::from_generators(
        Domain::with_labels(vec!["1".into(), "2".into()]).unwrap(),
        vec![Perm::parse("(0 1)", 2).unwrap()],
    )
    .unwrap();
    let g = PermGroup::from_generators(
        Domain::with_labels(fx.one_indexed_labels.clone()).unwrap(),
        vec![Perm::parse("(0 1)(2 3)", 4).unwrap()],
    )
    .unwrap();
    let w = perm_iso_to_subgroup(&h, &g).unwrap().expect("witness");
    assert_eq!(w.invariant_subset, fx.witness_subset_points);
    let labels: Vec<String> = w
        .invariant_subset
        .iter()
        .map(|&p| g.domain().label(p))
        .collect();
    assert_eq!(labels, fx.witness_subset_labels);
    // the subgroup witness is the whole target group
    assert_eq!(w.subgroup_gens, g.generators().to_vec());
    assert!(w.equivalence.verify(&h).unwrap());
    assert_within(start, Duration::from_millis(100), "criterion 7");
    println!("criterion 7 (worked example witness): PASS");
}

#[test]
fn criterion_8_verdicts_and_exit_codes() {
    let start = Instant::now();
    // library-level verdicts
    let load = |name: &str| -> SequenceSpec {
        let json: SequenceSpecJson =
            serde_json::from_str(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap();
        SequenceSpec::resolve(&json).unwrap()
    };
    let v = cohopfian_verdict(&load("const-a5.json")).unwrap();
    assert_eq!(v.outcome, Outcome::NonCoHopfian);
    assert_eq!(v.theorem.as_deref(), Some("C"));
    assert!(!v.witnesses.m.is_empty());
    let v = cohopfian_verdict(&load("distinct-psl2.json")).unwrap();
    assert_eq!(v.outcome, Outcome::CoHopfian);
    assert_eq!(v.theorem.as_deref(), Some("D"));
    let v = cohopfian_verdict(&load("unknown-verdict.json")).unwrap();
    assert_eq!(v.outcome, Outcome::Unknown);

    // exit codes through the binary: 0 / 0 / 2
    let exe = env!("CARGO_BIN_EXE_iwreath");
    for (file, expected) in [
        ("const-a5.json", 0),
        ("distinct-psl2.json", 0),
        ("unknown-verdict.json", 2),
    ] {
        let status = Command::new(exe)
            .arg("cohopf")
            .arg(fixture(file))
            .output()
            .unwrap();
        assert_eq!(
            status.status.code(),
            Some(expected),
            "exit code for {file}: {}",
            String::from_utf8_lossy(&status.stdout)
        );
    }
    assert_within(start, Duration::from_secs(2), "criterion 8");
    println!("criterion 8 (verdicts and exit codes): PASS");
}

#[test]
fn criterion_9_property_sweep() {
    let start = Instant::now();

    // embedding-composition transitivity across three groups
    let h = group(2, &["(0 1)"]);
    let g = group(4, &["(0 1)(2 3)"]);
    let f = parse_group_spec("S4:nat").unwrap();
    let e1 =
        PEmbedding::from_subgroup_witness(&h, &g, &perm_iso_to_subgroup(&h, &g).unwrap().unwrap());
    let e2 =
        PEmbedding::from_subgroup_witness(&g, &f, &perm_iso_to_subgroup(&g, &f).unwrap().unwrap());
    let e = compose_degree_one(&e1, &e2).unwrap();
    assert!(e.verify().unwrap().passed());

    // criterion versus recurrence on minimal-simple specs
    for (tail, mode, expected) in [
        (vec!["A5:nat"], TailMode::Cycle, Some(true)),
        (vec!["PSL2_4", "PSL2_8"], TailMode::Cycle, Some(true)),
        (vec!["PSL2_7", "PSL2_13"], TailMode::Distinct, Some(false)),
    ] {
        let spec = SequenceSpec::resolve(&SequenceSpecJson {
            prefix: vec![],
            tail: tail.iter().map(|s| s.to_string()).collect(),
            tail_mode: mode,
            n0: None,
        })
        .unwrap();
        let criterion = eventually_subgroup_criterion(&spec).unwrap();
        assert_eq!(criterion.holds, expected);
        let recur = iwreath::cohopf::almost_all_terms_recur(&spec).unwrap();
        assert_eq!(criterion.holds, Some(recur));
    }

    // a verdict's witnesses feed a working level-2 self-embedding
    let spec = SequenceSpec::resolve(&SequenceSpecJson {
        prefix: vec![],
        tail: vec!["C2:reg".into()],
        tail_mode: TailMode::Cycle,
        n0: None,
    })
    .unwrap();
    let verdict = cohopfian_verdict(&spec).unwrap();
    assert_eq!(verdict.outcome, Outcome::NonCoHopfian);
    let m = greedy_map_for_spec(&spec, 2).unwrap();
    let terms = spec.realized_terms(*m.last().unwrap()).unwrap();
    let se = self_embed(&terms, 2, &m, None).unwrap();
    assert!(se.proper && se.embedding.verify().unwrap().passed());

    // the larger seeded random batteries live in the core property suite;
    // this sweep must stay far inside the whole-suite budget
    assert_within(start, Duration::from_secs(10), "criterion 9");
    println!("criterion 9 (property sweep): PASS");
}
