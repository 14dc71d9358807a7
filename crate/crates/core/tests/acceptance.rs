//! Acceptance suite: one test per criterion, exact tolerances, fixed seeds.
//!
//! Each test prints a `PASS criterion N` line on success (visible with
//! `cargo test --test acceptance -- --nocapture`). Random data generation is
//! seeded per criterion, so reruns are bit-identical.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spinal_core::families::{
    build_sigma, find_lifting_witness, random_word, verify_lifting, Datum,
};
use spinal_core::fp::{rank_mod_p, FpVector, PrimeField};
use spinal_core::hnn::{canonical_ball, orbit_ball, verify_hnn_relation, SigmaTower};
use spinal_core::nucleus::{
    compute_nucleus, default_closure_bound, nucleus_size, theoretical_nucleus, verify_quasinucleus,
};
use spinal_core::words::{Base, GroupWord};
use spinal_core::wreath::WreathTable;

/// Keeps the randomized data desk-scale so each criterion stays well under
/// its time budget; the formulas being checked are size-independent.
const NUCLEUS_CAP: u128 = 100;

fn random_nonzero_vector(rng: &mut ChaCha8Rng, p: u32) -> Vec<i64> {
    loop {
        let v: Vec<i64> = (0..p - 1).map(|_| rng.gen_range(0..p) as i64).collect();
        if v.iter().any(|&x| x != 0) {
            return v;
        }
    }
}

/// Grows a collection of `r` random vectors that stays linearly independent.
fn random_independent_vectors(rng: &mut ChaCha8Rng, p: u32, r: usize) -> Vec<Vec<i64>> {
    let field = PrimeField::new(p).unwrap();
    let mut rows: Vec<FpVector> = Vec::new();
    let mut out = Vec::new();
    while out.len() < r {
        let candidate = random_nonzero_vector(rng, p);
        let mut trial = rows.clone();
        trial.push(FpVector::from_ints(field, &candidate));
        if rank_mod_p(field, &trial).unwrap() == trial.len() {
            rows = trial;
            out.push(candidate);
        }
    }
    out
}

/// Random valid datum: one or two populated collections with small ranks,
/// capped nucleus size.
fn random_datum(rng: &mut ChaCha8Rng, p: u32) -> Datum {
    loop {
        let spines = rng.gen_range(1..=2usize);
        let mut raw: Vec<Vec<Vec<i64>>> = vec![Vec::new(); p as usize];
        for _ in 0..spines {
            let l = rng.gen_range(0..p as usize);
            if !raw[l].is_empty() {
                continue;
            }
            let r = rng.gen_range(1..=2usize.min(p as usize - 1));
            raw[l] = random_independent_vectors(rng, p, r);
        }
        if raw.iter().all(Vec::is_empty) {
            continue;
        }
        let Ok(datum) = Datum::validate(p, &raw) else {
            continue;
        };
        if nucleus_size(&datum) <= NUCLEUS_CAP {
            return datum;
        }
    }
}

/// The 50 data shared by criteria 1, 4, 9 and 12.
fn criterion_one_data() -> Vec<Datum> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1);
    let mut out = Vec::new();
    for _ in 0..25 {
        out.push(random_datum(&mut rng, 3));
    }
    for _ in 0..25 {
        out.push(random_datum(&mut rng, 5));
    }
    out
}

/// The 30 EGS data of criterion 2.
fn criterion_two_data() -> Vec<Datum> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
    let mut out = Vec::new();
    for p in [3u32, 5, 7] {
        for _ in 0..10 {
            let e = random_nonzero_vector(&mut rng, p);
            out.push(Datum::egs(p, &e).unwrap());
        }
    }
    out
}

/// The multi-edge spinal data of criterion 3.
fn criterion_three_data() -> Vec<Datum> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
    (0..5)
        .map(|_| {
            let vectors = random_independent_vectors(&mut rng, 5, 2);
            Datum::multi_edge(5, &vectors).unwrap()
        })
        .collect()
}

fn all_reference_data() -> Vec<Datum> {
    let mut out = criterion_one_data();
    out.extend(criterion_two_data());
    out.extend(criterion_three_data());
    out
}

fn d3() -> Datum {
    Datum::egs(3, &[1, 0]).unwrap()
}

/// Checks that the computed nucleus coincides with the closed-form
/// enumeration, element for element.
fn nucleus_matches_theory(datum: &Datum) -> bool {
    let table = datum.build_recursion();
    let computed = match compute_nucleus(&table, default_closure_bound(datum)) {
        Ok(nucleus) => nucleus,
        Err(_) => return false,
    };
    let theory = theoretical_nucleus(datum);
    if computed.len() as u128 != nucleus_size(datum) || theory.len() != computed.len() {
        return false;
    }
    theory
        .iter()
        .all(|element| computed.contains(&table, element).unwrap())
}

#[test]
fn criterion_01_nucleus_exactness_on_random_data() {
    let data = criterion_one_data();
    assert_eq!(data.len(), 50);
    for datum in &data {
        assert!(
            nucleus_matches_theory(datum),
            "nucleus mismatch for {}",
            datum.summary()
        );
    }
    println!("PASS criterion 1: nucleus exact on 50 random data (p in {{3,5}})");
}

#[test]
fn criterion_02_egs_nucleus_sizes() {
    for datum in criterion_two_data() {
        let p = datum.p() as u128;
        let table = datum.build_recursion();
        let nucleus = compute_nucleus(&table, default_closure_bound(&datum)).unwrap();
        assert_eq!(
            nucleus.len() as u128,
            3 * p - 2,
            "EGS nucleus size off for {}",
            datum.summary()
        );
    }
    println!("PASS criterion 2: EGS nuclei have size 3p-2 for p in {{3,5,7}}");
}

#[test]
fn criterion_03_multi_edge_nucleus_size() {
    for datum in criterion_three_data() {
        let table = datum.build_recursion();
        let nucleus = compute_nucleus(&table, default_closure_bound(&datum)).unwrap();
        assert_eq!(
            nucleus.len(),
            29,
            "multi-edge nucleus size off for {}",
            datum.summary()
        );
    }
    println!("PASS criterion 3: multi-edge spinal p=5, r=2 nuclei have size 29");
}

#[test]
fn criterion_04_depth_two_closure_property() {
    let mut mutation_failures = 0;
    for datum in all_reference_data() {
        let table = datum.build_recursion();
        let nucleus = compute_nucleus(&table, default_closure_bound(&datum)).unwrap();
        assert!(
            verify_quasinucleus(&table, nucleus.elements(), 2).unwrap(),
            "depth-2 closure property failed for {}",
            datum.summary()
        );

        // Drop one non-identity element and re-check; count the breakages.
        if mutation_failures == 0 {
            let victim = nucleus
                .elements()
                .iter()
                .find(|w| !w.is_identity())
                .expect("nucleus has non-identity elements")
                .clone();
            let mutated: Vec<GroupWord> = nucleus
                .elements()
                .iter()
                .filter(|w| **w != victim)
                .cloned()
                .collect();
            if !verify_quasinucleus(&table, &mutated, 2).unwrap() {
                mutation_failures += 1;
            }
        }
    }
    assert!(
        mutation_failures >= 1,
        "removing a non-identity element never broke the closure property"
    );
    println!("PASS criterion 4: depth-2 closure property holds; mutated sets fail");
}

#[test]
fn criterion_05_lifting_certificates_on_random_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC5);
    let mut checked = 0;
    let mut attempts = 0;
    while checked < 100 {
        attempts += 1;
        assert!(attempts < 20_000, "witness-satisfying data too rare");
        let p = if checked % 2 == 0 { 3 } else { 5 };
        let datum = random_datum(&mut rng, p);
        let Some(witness) = find_lifting_witness(&datum) else {
            continue;
        };
        let sigma = build_sigma(&datum, &witness).unwrap();
        let report = verify_lifting(&datum, &sigma, 50, 20, 0xC5 + checked as u64).unwrap();
        assert!(
            report.passed,
            "lifting verification failed for {}: {:?}",
            datum.summary(),
            report
        );
        checked += 1;
    }
    println!("PASS criterion 5: 100 witnessed data verified (fix-0, recovery, relators)");
}

#[test]
fn criterion_06_egs_closed_form_regression() {
    let datum = d3();
    let witness = find_lifting_witness(&datum).expect("the reference EGS datum is liftable");
    assert_eq!((witness.m, witness.k, witness.j), (3, 1, 1));

    let sigma = build_sigma(&datum, &witness).unwrap();
    // sigma(a) = b, sigma(b) = b^a, sigma(c) = c, letter for letter.
    assert_eq!(sigma.image(Base::A).unwrap().to_string(), "b[3,1]");
    assert_eq!(
        sigma.image(Base::B { l: 3, i: 1 }).unwrap().to_string(),
        "a^2 b[3,1] a"
    );
    assert_eq!(
        sigma.image(Base::B { l: 1, i: 1 }).unwrap().to_string(),
        "b[1,1]"
    );

    let symmetric = Datum::ggs(3, &[1, 2]).unwrap();
    assert!(find_lifting_witness(&symmetric).is_none());
    println!("PASS criterion 6: EGS closed form reproduced; symmetric vector has no witness");
}

fn wreath_identity_tables() -> Vec<WreathTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC7);
    let mut tables = Vec::new();
    for _ in 0..3 {
        tables.push(random_datum(&mut rng, 3).build_recursion());
    }
    for _ in 0..3 {
        tables.push(random_datum(&mut rng, 5).build_recursion());
    }
    tables
}

#[test]
fn criterion_07_section_identities() {
    let tables = wreath_identity_tables();
    let mut rng = ChaCha8Rng::seed_from_u64(0x707);
    for round in 0..1000 {
        let table = &tables[round % tables.len()];
        let p = table.p();
        let u = random_word(table, &mut rng, 6);
        let v = random_word(table, &mut rng, 6);
        let x = rng.gen_range(0..p) as u8;

        // section of a product
        let lhs = table.section(&u.multiply(&v), x).unwrap();
        let rhs = table
            .section(&u, x)
            .unwrap()
            .multiply(&table.section(&v, table.root_perm(&u).unwrap().apply(x)).unwrap());
        assert!(table.are_equal(&lhs, &rhs).unwrap(), "product identity failed");

        // section of an inverse
        let lhs = table.section(&u.invert(), x).unwrap();
        let rhs = table
            .section(&u, table.root_perm(&u).unwrap().inverse().apply(x))
            .unwrap()
            .invert();
        assert!(table.are_equal(&lhs, &rhs).unwrap(), "inverse identity failed");

        // cocycle
        let v1: Vec<u8> = (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(0..p) as u8).collect();
        let v2: Vec<u8> = (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(0..p) as u8).collect();
        let joined: Vec<u8> = v1.iter().chain(v2.iter()).copied().collect();
        let lhs = table.section_at(&u, &joined).unwrap();
        let rhs = table
            .section_at(&table.section_at(&u, &v1).unwrap(), &v2)
            .unwrap();
        assert!(table.are_equal(&lhs, &rhs).unwrap(), "cocycle identity failed");
    }
    println!("PASS criterion 7: 1000 instances of the section identities (p in {{3,5}})");
}

/// Independent oracle: compares the actions pointwise on every vertex word
/// of length `depth` (prefix-compatibility covers the shorter words).
fn actions_agree_by_brute_force(
    table: &WreathTable,
    u: &GroupWord,
    v: &GroupWord,
    depth: usize,
) -> bool {
    let p = table.p();
    let mut words: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..depth {
        words = words
            .iter()
            .flat_map(|w| {
                (0..p as u8).map(move |x| {
                    let mut next = w.clone();
                    next.push(x);
                    next
                })
            })
            .collect();
        for w in &words {
            if table.apply(u, w).unwrap() != table.apply(v, w).unwrap() {
                return false;
            }
        }
    }
    true
}

#[test]
fn criterion_08_equality_agrees_with_brute_force_action() {
    let datum = d3();
    let table = datum.build_recursion();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC8);
    for round in 0..200 {
        let u = random_word(&table, &mut rng, 6);
        // Mix in pairs that are equal by construction: v = u * conjugated
        // relator. Random pairs are almost always distinct.
        let v = if round % 10 == 0 {
            let base = if round % 20 == 0 {
                Base::A
            } else {
                Base::B { l: 3, i: 1 }
            };
            let relator = GroupWord::letter(3, base, 1).pow(3);
            u.multiply(&relator.conjugate_by(&random_word(&table, &mut rng, 3)))
        } else {
            random_word(&table, &mut rng, 6)
        };
        let decided = table.are_equal(&u, &v).unwrap();
        let observed = actions_agree_by_brute_force(&table, &u, &v, 8);
        assert_eq!(
            decided, observed,
            "equality decision disagrees with the action for `{u}` vs `{v}`"
        );
    }
    println!("PASS criterion 8: equality decision matches the depth-8 action on 200 pairs");
}

#[test]
fn criterion_09_generator_orders() {
    for datum in all_reference_data() {
        let p = datum.p();
        let table = datum.build_recursion();
        for base in datum.generator_bases() {
            let g = GroupWord::letter(p, base, 1);
            assert_eq!(
                table.order_of(&g, p).unwrap(),
                Some(p),
                "generator {base} of {} does not have order {p}",
                datum.summary()
            );
        }
    }
    println!("PASS criterion 9: every generator of every reference datum has order p");
}

#[test]
fn criterion_10_hnn_relation_on_the_ball() {
    let datum = d3();
    let table = datum.build_recursion();
    let witness = find_lifting_witness(&datum).unwrap();
    let sigma = build_sigma(&datum, &witness).unwrap();
    let ball = canonical_ball(3, 2, 3);
    let mut tower = SigmaTower::new(&table, &sigma, 8);
    for base in table.generators() {
        assert!(
            verify_hnn_relation(&table, &mut tower, base, &ball).unwrap(),
            "t {base} t^-1 and sigma({base}) act differently on the ball"
        );
    }
    println!("PASS criterion 10: t g t^-1 = sigma(g) on all 94 ball vertices, all generators");
}

#[test]
fn criterion_11_orbit_covers_the_ball() {
    let datum = d3();
    let table = datum.build_recursion();
    let sigma = build_sigma(&datum, &find_lifting_witness(&datum).unwrap()).unwrap();
    let mut tower = SigmaTower::new(&table, &sigma, 8);
    let report = orbit_ball(&table, &mut tower, 2, 3).unwrap();

    // Independent count: 40 vertices in the bottom copy plus 27 in each of
    // the two higher copies.
    let expected_total = (1 + 3 + 9 + 27) + 2 * (1 + 2 + 6 + 18);
    assert_eq!(report.total, expected_total);
    assert_eq!(report.reached, expected_total);
    assert!(report.transitive_on_ball);
    assert!(report.missed.is_empty());
    println!("PASS criterion 11: orbit of the base vertex covers all 94 ball vertices");
}

#[test]
fn criterion_12_abelianization_soundness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC12);
    for datum in all_reference_data() {
        let p = datum.p();
        let table = datum.build_recursion();
        for round in 0..500 {
            let u = random_word(&table, &mut rng, 20);

            // additivity
            let v = random_word(&table, &mut rng, 8);
            let sum: Vec<u32> = datum
                .abelianize(&u)
                .iter()
                .zip(datum.abelianize(&v))
                .map(|(&x, y)| (x + y) % p)
                .collect();
            assert_eq!(datum.abelianize(&u.multiply(&v)), sum);

            // triviality implies zero exponent sums; exercised both on the
            // random word and on a constructed trivial word
            if table.is_trivial(&u).unwrap() {
                assert!(datum.abelianize(&u).iter().all(|&c| c == 0));
            }
            if round % 50 == 0 {
                let bases = datum.generator_bases();
                let base = bases[round / 50 % bases.len()];
                let trivial = GroupWord::letter(p, base, 1)
                    .pow(p)
                    .conjugate_by(&random_word(&table, &mut rng, 4));
                assert!(table.is_trivial(&trivial).unwrap());
                assert!(datum.abelianize(&trivial).iter().all(|&c| c == 0));
            }
        }
    }
    println!("PASS criterion 12: abelianization additive and sound on 500 words per datum");
}
