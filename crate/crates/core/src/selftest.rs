//! Seeded property suites over a single datum, shared by the `selftest`
//! subcommand. Each suite returns a pass/fail verdict with a short detail
//! line; results are deterministic for a fixed seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::families::{build_sigma, find_lifting_witness, random_word, verify_lifting, Datum};
use crate::nucleus::{
    compute_nucleus, default_closure_bound, nucleus_size, theoretical_nucleus, verify_quasinucleus,
};
use crate::words::{Base, GroupWord};
use crate::wreath::{WreathError, WreathTable};

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_SAMPLES: usize = 200;

/// Nucleus suites are skipped above this size to keep the run interactive.
const NUCLEUS_SIZE_CAP: u128 = 4_000;

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn suite(name: &'static str, passed: bool, detail: String) -> SuiteResult {
    SuiteResult {
        name,
        passed,
        detail,
    }
}

fn random_path<R: Rng>(rng: &mut R, p: u32, max_len: usize) -> Vec<u8> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| rng.gen_range(0..p) as u8).collect()
}

fn section_product_identity(
    table: &WreathTable,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<SuiteResult, WreathError> {
    let mut failures = 0;
    for _ in 0..samples {
        let u = random_word(table, rng, 6);
        let v = random_word(table, rng, 6);
        let x = rng.gen_range(0..table.p()) as u8;
        let lhs = table.section(&u.multiply(&v), x)?;
        let rhs = table
            .section(&u, x)?
            .multiply(&table.section(&v, table.root_perm(&u)?.apply(x))?);
        if !table.are_equal(&lhs, &rhs)? {
            failures += 1;
        }
    }
    Ok(suite(
        "section-of-product identity",
        failures == 0,
        format!("{failures}/{samples} failures"),
    ))
}

fn section_inverse_identity(
    table: &WreathTable,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<SuiteResult, WreathError> {
    let mut failures = 0;
    for _ in 0..samples {
        let u = random_word(table, rng, 6);
        let x = rng.gen_range(0..table.p()) as u8;
        let lhs = table.section(&u.invert(), x)?;
        let rhs = table
            .section(&u, table.root_perm(&u)?.inverse().apply(x))?
            .invert();
        if !table.are_equal(&lhs, &rhs)? {
            failures += 1;
        }
    }
    Ok(suite(
        "section-of-inverse identity",
        failures == 0,
        format!("{failures}/{samples} failures"),
    ))
}

fn cocycle_identity(
    table: &WreathTable,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<SuiteResult, WreathError> {
    let mut failures = 0;
    for _ in 0..samples {
        let w = random_word(table, rng, 6);
        let v1 = random_path(rng, table.p(), 3);
        let v2 = random_path(rng, table.p(), 3);
        let joined: Vec<u8> = v1.iter().chain(v2.iter()).copied().collect();
        let lhs = table.section_at(&w, &joined)?;
        let rhs = table.section_at(&table.section_at(&w, &v1)?, &v2)?;
        if !table.are_equal(&lhs, &rhs)? {
            failures += 1;
        }
    }
    Ok(suite(
        "section cocycle identity",
        failures == 0,
        format!("{failures}/{samples} failures"),
    ))
}

fn action_composition(
    table: &WreathTable,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<SuiteResult, WreathError> {
    let mut failures = 0;
    for _ in 0..samples {
        let u = random_word(table, rng, 5);
        let v = random_word(table, rng, 5);
        let path = random_path(rng, table.p(), 4);
        let lhs = table.apply(&u.multiply(&v), &path)?;
        let rhs = table.apply(&v, &table.apply(&u, &path)?)?;
        if lhs != rhs {
            failures += 1;
        }
    }
    Ok(suite(
        "left-to-right action composition",
        failures == 0,
        format!("{failures}/{samples} failures"),
    ))
}

/// Compares `are_equal` with pointwise comparison of the actions on all
/// vertices down to the given depth.
pub fn actions_agree_to_depth(
    table: &WreathTable,
    u: &GroupWord,
    v: &GroupWord,
    depth: usize,
) -> Result<bool, WreathError> {
    let p = table.p();
    let mut level: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..depth {
        level = level
            .iter()
            .flat_map(|w| {
                (0..p as u8).map(move |x| {
                    let mut next = w.clone();
                    next.push(x);
                    next
                })
            })
            .collect();
        for w in &level {
            if table.apply(u, w)? != table.apply(v, w)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn equality_matches_action(
    table: &WreathTable,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<SuiteResult, WreathError> {
    let mut failures = 0;
    for _ in 0..samples {
        let u = random_word(table, rng, 4);
        let v = random_word(table, rng, 4);
        let decided = table.are_equal(&u, &v)?;
        let observed = actions_agree_to_depth(table, &u, &v, 6)?;
        if decided != observed {
            failures += 1;
        }
    }
    Ok(suite(
        "equality agrees with the action",
        failures == 0,
        format!("{failures}/{samples} failures"),
    ))
}

fn generator_orders(d: &Datum, table: &WreathTable) -> Result<SuiteResult, WreathError> {
    let p = d.p();
    let mut failures = Vec::new();
    for base in d.generator_bases() {
        let g = GroupWord::letter(p, base, 1);
        if table.order_of(&g, p)? != Some(p) {
            failures.push(base.to_string());
        }
    }
    Ok(suite(
        "generators have order p",
        failures.is_empty(),
        if failures.is_empty() {
            format!("all generators have order {p}")
        } else {
            format!("wrong order for {failures:?}")
        },
    ))
}

fn abelianization_checks(
    d: &Datum,
    table: &WreathTable,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<SuiteResult, WreathError> {
    let p = d.p();
    let mut failures = 0;
    for _ in 0..samples {
        let u = random_word(table, rng, 8);
        let v = random_word(table, rng, 8);
        let sum: Vec<u32> = d
            .abelianize(&u)
            .iter()
            .zip(d.abelianize(&v))
            .map(|(&x, y)| (x + y) % p)
            .collect();
        if d.abelianize(&u.multiply(&v)) != sum {
            failures += 1;
        }
        if table.is_trivial(&u)? && d.abelianize(&u).iter().any(|&c| c != 0) {
            failures += 1;
        }
    }
    // Constructed trivial words keep the implication non-vacuous.
    for base in d.generator_bases() {
        let relator = GroupWord::letter(p, base, 1).pow(p);
        let conjugated = relator.conjugate_by(&random_word(table, rng, 4));
        if d.abelianize(&conjugated).iter().any(|&c| c != 0) {
            failures += 1;
        }
    }
    Ok(suite(
        "abelianization is additive and kills trivial words",
        failures == 0,
        format!("{failures} failures over {samples} samples"),
    ))
}

fn spinal_subgroups(d: &Datum, table: &WreathTable) -> Result<SuiteResult, WreathError> {
    let p = d.p();
    let mut detail = Vec::new();
    let mut passed = true;
    for (l_idx, vectors) in d.collections().iter().enumerate() {
        let l = l_idx as u32 + 1;
        let r = vectors.len() as u32;
        if r == 0 {
            continue;
        }
        let generators: Vec<GroupWord> = (1..=r)
            .map(|i| GroupWord::letter(p, Base::B { l, i }, 1))
            .collect();
        // worklist closure under right multiplication, dedup by equality
        let mut elements: Vec<GroupWord> = vec![GroupWord::identity(p)];
        let mut frontier = vec![GroupWord::identity(p)];
        while let Some(w) = frontier.pop() {
            for g in &generators {
                let next = w.multiply(g);
                let mut known = false;
                for existing in &elements {
                    if table.are_equal(&next, existing)? {
                        known = true;
                        break;
                    }
                }
                if !known {
                    elements.push(next.clone());
                    frontier.push(next);
                }
            }
        }
        let expected = (p as usize).pow(r);
        if elements.len() != expected {
            passed = false;
        }
        let mut commute = true;
        for x in &generators {
            for y in &generators {
                if !table.are_equal(&x.multiply(y), &y.multiply(x))? {
                    commute = false;
                }
            }
        }
        if !commute {
            passed = false;
        }
        detail.push(format!("l={l}: {} elements (want {expected})", elements.len()));
    }
    Ok(suite(
        "spinal subgroups are elementary abelian of order p^r",
        passed,
        detail.join("; "),
    ))
}

fn lifting_suite(d: &Datum, seed: u64, samples: usize) -> Result<SuiteResult, WreathError> {
    match find_lifting_witness(d) {
        None => Ok(suite(
            "lifting certificate",
            true,
            "witness condition not satisfied; nothing to certify".into(),
        )),
        Some(witness) => {
            let sigma = build_sigma(d, &witness).expect("witness came from the search");
            let report = verify_lifting(d, &sigma, samples.min(60), 14, seed)?;
            Ok(suite(
                "lifting certificate",
                report.passed,
                format!(
                    "witness (m={}, k={}, j={}), {} sampled words",
                    witness.m, witness.k, witness.j, report.sampled_words
                ),
            ))
        }
    }
}

fn nucleus_suite(d: &Datum, table: &WreathTable) -> SuiteResult {
    let size = nucleus_size(d);
    if size > NUCLEUS_SIZE_CAP {
        return suite(
            "nucleus matches the closed form",
            true,
            format!("skipped: nucleus size {size} exceeds the selftest cap"),
        );
    }
    let computed = match compute_nucleus(table, default_closure_bound(d)) {
        Ok(n) => n,
        Err(err) => {
            return suite(
                "nucleus matches the closed form",
                false,
                format!("closure failed: {err}"),
            )
        }
    };
    let theory = theoretical_nucleus(d);
    let mut passed = computed.len() as u128 == size && theory.len() as u128 == size;
    if passed {
        for element in &theory {
            match computed.contains(table, element) {
                Ok(true) => {}
                _ => {
                    passed = false;
                    break;
                }
            }
        }
    }
    let quasi = matches!(verify_quasinucleus(table, computed.elements(), 2), Ok(true));
    suite(
        "nucleus matches the closed form",
        passed && quasi,
        format!(
            "computed {}, expected {size}, depth-2 closure property: {quasi}",
            computed.len()
        ),
    )
}

/// Runs every suite against the datum; deterministic for a fixed seed.
pub fn run_selftest(d: &Datum, seed: u64, samples: usize) -> Result<Vec<SuiteResult>, WreathError> {
    let table = d.build_recursion();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = vec![
        section_product_identity(&table, &mut rng, samples)?,
        section_inverse_identity(&table, &mut rng, samples)?,
        cocycle_identity(&table, &mut rng, samples)?,
        action_composition(&table, &mut rng, samples)?,
        equality_matches_action(&table, &mut rng, samples.min(60))?,
        generator_orders(d, &table)?,
        abelianization_checks(d, &table, &mut rng, samples)?,
        spinal_subgroups(d, &table)?,
        lifting_suite(d, seed, samples)?,
    ];
    results.push(nucleus_suite(d, &table));
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes_on_reference_data() {
        for datum in [
            Datum::egs(3, &[1, 0]).unwrap(),
            Datum::ggs(3, &[1, 2]).unwrap(),
            Datum::multi_edge(5, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]).unwrap(),
        ] {
            let results = run_selftest(&datum, DEFAULT_SEED, 40).unwrap();
            for result in &results {
                assert!(
                    result.passed,
                    "suite `{}` failed on {}: {}",
                    result.name,
                    datum.summary(),
                    result.detail
                );
            }
        }
    }

    #[test]
    fn action_depth_comparison_distinguishes_words() {
        let d = Datum::egs(3, &[1, 0]).unwrap();
        let table = d.build_recursion();
        let b = GroupWord::letter(3, Base::B { l: 3, i: 1 }, 1);
        let c = GroupWord::letter(3, Base::B { l: 1, i: 1 }, 1);
        assert!(!actions_agree_to_depth(&table, &b, &c, 4).unwrap());
        assert!(actions_agree_to_depth(&table, &b, &b, 4).unwrap());
    }
}
