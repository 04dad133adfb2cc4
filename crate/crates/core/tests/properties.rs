//! Cross-module invariant battery: action axioms, faithfulness,
//! transitivity, order formulas, projection kernels, equivalence
//! symmetry, degree-formula oracles, and verdict soundness.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use iwreath::cohopf::{
    cohopfian_verdict, greedy_map_for_spec, Outcome, SequenceSpec, SequenceSpecJson, TailMode,
};
use iwreath::embed::{ia_into_pa, self_embed};
use iwreath::equiv::actions_equivalent;
use iwreath::groupspec::parse_group_spec;
use iwreath::wreath::{tower, Tower, TowerElement, WreathKind};
use iwreath::{Domain, Perm, PermGroup};

const SAMPLE_SEED: u64 = 0x5EED;
const SAMPLES: usize = 10_000;

fn c2() -> PermGroup {
    parse_group_spec("C2:reg").unwrap()
}
fn c3() -> PermGroup {
    parse_group_spec("C3:reg").unwrap()
}

/// The tower fixture set used across the battery.
fn fixtures() -> Vec<(&'static str, Tower)> {
    let involution_pairs = PermGroup::from_generators(
        Domain::plain(4),
        vec![Perm::parse("(0 1)(2 3)", 4).unwrap()],
    )
    .unwrap();
    vec![
        (
            "pa(C2,C2)",
            tower(WreathKind::ProductAction, &[c2(), c2()], 2).unwrap(),
        ),
        (
            "ia(C2,C3)",
            tower(WreathKind::Imprimitive, &[c2(), c3()], 2).unwrap(),
        ),
        (
            "ia(C3,C2)",
            tower(WreathKind::Imprimitive, &[c3(), c2()], 2).unwrap(),
        ),
        (
            "pa(C2,C2,C2)",
            tower(WreathKind::ProductAction, &[c2(), c2(), c2()], 3).unwrap(),
        ),
        (
            "ia(C2,C2,C2)",
            tower(WreathKind::Imprimitive, &[c2(), c2(), c2()], 3).unwrap(),
        ),
        (
            "pa(C2,C3,C2)",
            tower(WreathKind::ProductAction, &[c2(), c3(), c2()], 3).unwrap(),
        ),
        (
            "pa(C2, intransitive)",
            Tower::Node(Box::new(
                iwreath::wreath::wreath_product_action(c2(), Tower::Leaf(involution_pairs))
                    .unwrap(),
            )),
        ),
    ]
}

fn random_element(t: &Tower, rng: &mut ChaCha8Rng) -> TowerElement {
    let gens = t.generators().unwrap();
    let len = rng.gen_range(1..=12usize);
    let mut el = t.identity();
    for _ in 0..len {
        let g = &gens[rng.gen_range(0..gens.len())];
        el = t.compose(&el, g).unwrap();
    }
    el
}

#[test]
fn action_axioms_on_the_fixture_battery() {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    for (name, t) in fixtures() {
        let degree = t.degree().to_usize().unwrap();
        let exhaustive = t
            .order()
            .to_usize()
            .map(|o| o * degree <= 1_000_000)
            .unwrap_or(false);
        if exhaustive {
            let els = t.elements(1_000_000).unwrap();
            let pts = t.points(1_000_000).unwrap();
            for x in &pts {
                assert_eq!(&t.act(&t.identity(), x).unwrap(), x, "{name}: identity");
            }
            for a in &els {
                for b in &els {
                    let ab = t.compose(a, b).unwrap();
                    for x in &pts {
                        assert_eq!(
                            t.act(&ab, x).unwrap(),
                            t.act(b, &t.act(a, x).unwrap()).unwrap(),
                            "{name}: composition axiom"
                        );
                    }
                }
            }
        } else {
            for _ in 0..SAMPLES {
                let a = random_element(&t, &mut rng);
                let b = random_element(&t, &mut rng);
                let x = t.point_from_index(rng.gen_range(0..degree)).unwrap();
                let ab = t.compose(&a, &b).unwrap();
                assert_eq!(
                    t.act(&ab, &x).unwrap(),
                    t.act(&b, &t.act(&a, &x).unwrap()).unwrap(),
                    "{name}: sampled composition axiom"
                );
            }
        }
    }
}

#[test]
fn faithfulness_and_order_formulas_by_enumeration() {
    for (name, t) in fixtures() {
        let order = t.order();
        if order <= BigUint::from(10_000u32) && t.degree() <= BigUint::from(100_000u32) {
            let flat = t.flatten(100_000).unwrap();
            // the structural order formula matches a raw closure count,
            // so non-identity elements act non-trivially
            assert_eq!(
                flat.order_via_enumeration(1_000_000).unwrap(),
                order,
                "{name}: enumeration"
            );
            assert_eq!(
                flat.order_via_stabilizer_chain(),
                order,
                "{name}: stabilizer chain"
            );
        }
    }
}

#[test]
fn transitivity_follows_the_structure() {
    for (name, t) in fixtures() {
        let claimed = t.is_transitive();
        if t.degree() <= BigUint::from(100_000u32) && t.order() <= BigUint::from(10_000u32) {
            let flat = t.flatten(100_000).unwrap();
            assert_eq!(flat.is_transitive(), claimed, "{name}");
        }
    }
    // product action with an intransitive bottom is intransitive
    let intransitive_bottom =
        PermGroup::from_generators(Domain::plain(4), vec![Perm::parse("(0 1)", 4).unwrap()])
            .unwrap();
    let w = iwreath::wreath::wreath_product_action(intransitive_bottom, Tower::Leaf(c2())).unwrap();
    assert!(!Tower::Node(Box::new(w)).is_transitive());
}

#[test]
fn projection_kernels_form_a_descending_chain() {
    // orders of ker(W_n -> W_l) strictly descend in l, with consecutive
    // indices |S_{l+1}|^(degree of level l)
    for terms in [vec![c2(), c2(), c2(), c2()], vec![c2(), c3(), c2()]] {
        let n = terms.len();
        let top = tower(WreathKind::ProductAction, &terms, n).unwrap();
        let mut kernel_orders = Vec::new();
        for l in 1..=n {
            let level = tower(WreathKind::ProductAction, &terms, l).unwrap();
            kernel_orders.push(top.order() / level.order());
        }
        for w in kernel_orders.windows(2) {
            assert!(w[0] > w[1], "kernels must strictly descend");
        }
        for l in 1..n {
            let level = tower(WreathKind::ProductAction, &terms, l).unwrap();
            let expected =
                BigUint::from(terms[l].degree()).pow(level.degree().to_u32().expect("desk scale"));
            assert_eq!(
                &kernel_orders[l - 1] / &kernel_orders[l],
                expected,
                "kernel index at level {l}"
            );
        }
    }
    // element-level: the kernel of the double projection has the product size
    let t = tower(WreathKind::ProductAction, &[c2(), c2(), c2()], 3).unwrap();
    let node = t.as_node().unwrap();
    let inner = node.top().as_node().unwrap();
    let ker = t
        .elements(200)
        .unwrap()
        .into_iter()
        .filter(|el| {
            let once = node.project_to_top(el).unwrap();
            inner.project_to_top(&once).unwrap() == inner.top().identity()
        })
        .count();
    assert_eq!(ker, 64); // 2^4 * 2^2
}

#[test]
fn equivalence_witnesses_are_symmetric_on_fixture_pairs() {
    let pairs = vec![
        (parse_group_spec("C3:reg").unwrap(), {
            PermGroup::from_generators(Domain::plain(3), vec![Perm::parse("(0 1 2)", 3).unwrap()])
                .unwrap()
        }),
        (
            parse_group_spec("A5:nat").unwrap(),
            parse_group_spec("PSL2_4:proj").unwrap(),
        ),
        (
            tower(WreathKind::ProductAction, &[c2(), c2()], 2)
                .unwrap()
                .flatten(100)
                .unwrap(),
            tower(WreathKind::ProductAction, &[c2(), c2()], 2)
                .unwrap()
                .flatten(100)
                .unwrap(),
        ),
    ];
    for (h, k) in pairs {
        let w = actions_equivalent(&h, &k)
            .unwrap()
            .expect("fixture pair should be equivalent");
        assert!(w.verify(&h).unwrap());
        let back = w.invert(&h, &k).unwrap();
        assert!(back.verify(&k).unwrap());
    }
}

#[test]
fn lifted_degree_formula_matches_the_function_space_oracle() {
    // level-3 lift: the target function space has 2^16 = 65536 functions;
    // filter each by the defining predicate and compare against gamma
    let seq = vec![c2(), c2(), c2(), c2()];
    let out = ia_into_pa(&seq, 3).unwrap();
    let e = out.top();
    let prev = &out.levels[out.levels.len() - 2];
    let sigma = prev.target.degree_usize().unwrap();
    let omega = 2usize;
    let gamma_idx: Vec<Vec<usize>> = prev
        .gamma
        .iter()
        .map(|set| {
            let mut v: Vec<usize> = set
                .iter()
                .map(|p| prev.target.point_index(p).unwrap())
                .collect();
            v.sort_unstable();
            v
        })
        .collect();
    let delta = prev.source.degree();
    let total = omega.pow(sigma as u32);
    assert_eq!(total, 65_536);
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); omega * delta];
    let mut assigned = 0usize;
    for f in 0..total {
        let digit = |i: usize| (f >> (sigma - 1 - i)) & 1;
        let constant_on = |set: &[usize]| set.iter().all(|&i| digit(i) == digit(set[0]));
        let mut owner = None;
        for eps in 0..delta {
            if constant_on(&gamma_idx[eps])
                && (0..delta)
                    .filter(|&d| d != eps)
                    .all(|d| !constant_on(&gamma_idx[d]))
            {
                owner = Some((digit(gamma_idx[eps][0]), eps));
                break;
            }
        }
        if let Some((om, eps)) = owner {
            buckets[om * delta + eps].push(f);
            assigned += 1;
        }
    }
    // formula value and measured sizes agree for all 8 lifted points
    assert_eq!(e.degree, 2048);
    for (phi, bucket) in buckets.iter().enumerate() {
        assert_eq!(bucket.len() as u64, e.degree, "bucket {phi}");
        let gamma: HashSet<usize> = e.gamma[phi]
            .iter()
            .map(|p| e.target.point_index(p).unwrap())
            .collect();
        let oracle: HashSet<usize> = bucket.iter().copied().collect();
        assert_eq!(gamma, oracle, "gamma({phi}) equals the oracle");
    }
    // disjointness: buckets never overlap by construction, and they
    // exhaust exactly |Phi| * r points
    assert_eq!(assigned, (omega * delta) * e.degree as usize);
}

#[test]
fn degree_one_images_preserve_the_order() {
    let s3 = parse_group_spec("S3:nat").unwrap();
    let series = iwreath::kaloujnine::validate_series(
        &s3,
        &[vec![Perm::parse("(0 1 2)", 3).unwrap()], vec![]],
    )
    .unwrap();
    let table = iwreath::kaloujnine::choose_transversals(&series).unwrap();
    let e = iwreath::kaloujnine::embed_via_series(&series, &table).unwrap();
    let gens: Vec<Perm> = e
        .iota_gens
        .iter()
        .map(|el| Perm::from_images(e.target.flat_images(el, 100).unwrap()).unwrap())
        .collect();
    let image = PermGroup::from_generators(Domain::plain(6), gens).unwrap();
    assert_eq!(image.order(), e.source.order());
}

#[test]
fn non_cohopfian_verdicts_power_level_two_self_embeddings() {
    let batch = [
        (vec![], vec!["C2:reg"]),
        (vec![], vec!["C3:reg"]),
        (vec![], vec!["C2:reg", "C3:reg"]),
    ];
    for (prefix, tail) in batch {
        let spec = SequenceSpec::resolve(&SequenceSpecJson {
            prefix: prefix.iter().map(|s: &&str| s.to_string()).collect(),
            tail: tail.iter().map(|s| s.to_string()).collect(),
            tail_mode: TailMode::Cycle,
            n0: None,
        })
        .unwrap();
        let verdict = cohopfian_verdict(&spec).unwrap();
        assert_eq!(verdict.outcome, Outcome::NonCoHopfian, "{tail:?}");
        let m = greedy_map_for_spec(&spec, 2).unwrap();
        let terms = spec.realized_terms(*m.last().unwrap()).unwrap();
        let se = self_embed(&terms, 2, &m, None).unwrap();
        assert!(se.proper, "{tail:?} must be proper");
        assert!(se.index > BigUint::from(1u32));
        let report = se.embedding.verify().unwrap();
        assert!(report.passed(), "{tail:?}: {report}");
    }
}

proptest! {
    #[test]
    fn perm_strings_round_trip(images in proptest::sample::select(
        // a pool of degrees, shuffled inside the test
        (2usize..9).collect::<Vec<_>>(),
    ), seed in any::<u64>()) {
        let n = images;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            v.swap(i, rng.gen_range(0..=i));
        }
        let p = Perm::from_images(v).unwrap();
        prop_assert_eq!(&Perm::parse(&p.to_cycle_string(), n).unwrap(), &p);
        prop_assert_eq!(&Perm::parse(&p.to_oneline_string(), n).unwrap(), &p);
    }

    #[test]
    fn composition_is_associative(seed in any::<u64>()) {
        let n = 7usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rand_perm = || {
            let mut v: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                v.swap(i, rng.gen_range(0..=i));
            }
            Perm::from_images(v).unwrap()
        };
        let (a, b, c) = (rand_perm(), rand_perm(), rand_perm());
        prop_assert_eq!(a.then(&b).then(&c), a.then(&b.then(&c)));
        prop_assert!(a.then(&a.inverse()).is_identity());
    }

    #[test]
    fn sampled_tower_axiom(seed in any::<u64>()) {
        let t = tower(WreathKind::ProductAction, &[c2(), c2(), c2()], 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_element(&t, &mut rng);
        let b = random_element(&t, &mut rng);
        let x = t.point_from_index(rng.gen_range(0..16)).unwrap();
        let ab = t.compose(&a, &b).unwrap();
        prop_assert_eq!(
            t.act(&ab, &x).unwrap(),
            t.act(&b, &t.act(&a, &x).unwrap()).unwrap()
        );
        let inv = t.inverse(&a).unwrap();
        prop_assert_eq!(t.act(&inv, &t.act(&a, &x).unwrap()).unwrap(), x);
    }
}

#[test]
fn stabilizer_chain_agrees_on_catalog_groups() {
    for (spec, order) in [("A5:nat", 60u32), ("PSL2_7", 168), ("PSL2_8", 504), ("PSL2_13", 1092)] {
        let g = parse_group_spec(spec).unwrap();
        assert_eq!(g.order_via_stabilizer_chain(), BigUint::from(order), "{spec}");
        assert_eq!(
            g.order_via_enumeration(1_000_000).unwrap(),
            BigUint::from(order),
            "{spec}"
        );
    }
}

#[test]
fn sampled_verification_certifies_large_identity_embeddings() {
    // the flattened level-4 tower has order 2^23: too big to enumerate,
    // so verification falls back to a generator sweep plus seeded samples
    // and certifies injectivity by the order comparison
    use iwreath::embed::{CheckVerdict, PEmbedding, VerifyMode};
    let t = tower(WreathKind::ProductAction, &[c2(), c2(), c2(), c2()], 4).unwrap();
    let flat = t.flatten(100_000).unwrap();
    let e = PEmbedding::identity(&flat);
    let report = e.verify().unwrap();
    assert!(report.passed(), "{report}");
    assert!(matches!(report.verify_mode, VerifyMode::Sampled { .. }));
    assert_eq!(report.injectivity, CheckVerdict::Certified);
}
