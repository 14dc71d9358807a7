//! Defining data of spinal groups and their lifting endomorphisms.
//!
//! A [`Datum`] is an odd prime p together with p collections of linearly
//! independent vectors over Z/pZ; it determines a wreath recursion with the
//! rooted generator `a` and one spinal generator `b[l,i]` per vector. The
//! GGS, EGS and multi-edge families are special placements of the same data.
//!
//! The witness search and [`build_sigma`] construct an endomorphism `sigma`
//! whose images stabilize vertex 0 and recover their source generator as the
//! section at 0: a right inverse of the projection at vertex 0.
//! [`verify_lifting`] checks exactly those properties on generators, sampled
//! words, and a relator set.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::fp::{rank_mod_p, FpError, FpVector, PrimeField};
use crate::words::{Base, GroupWord};
use crate::wreath::{GenRecursion, Perm, WreathError, WreathTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DatumError {
    #[error(transparent)]
    Field(#[from] FpError),
    #[error("collection {l}: vector {i} has length {found}, expected {expected}")]
    BadVectorLength {
        l: usize,
        i: usize,
        expected: usize,
        found: usize,
    },
    #[error("collection {l} is linearly dependent")]
    DependentVectors { l: usize },
    #[error("all collections are empty; at least one vector is required")]
    AllEmpty,
    #[error("expected at most {expected} collections, found {found}")]
    TooManyCollections { expected: usize, found: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SigmaError {
    #[error("no conjugator exponent yields a lifting image for a; the witness is not valid")]
    NoValidConjugator,
    #[error(transparent)]
    Wreath(#[from] WreathError),
}

/// Validated defining datum of a spinal group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Datum {
    field: PrimeField,
    collections: Vec<Vec<FpVector>>,
}

impl Datum {
    /// Validates a raw datum: p an odd prime, p collections of vectors of
    /// length p-1, each collection linearly independent, not all empty.
    pub fn validate(p: u32, raw: &[Vec<Vec<i64>>]) -> Result<Self, DatumError> {
        let field = PrimeField::new(p)?;
        let expected = (p - 1) as usize;
        if raw.len() > p as usize {
            return Err(DatumError::TooManyCollections {
                expected: p as usize,
                found: raw.len(),
            });
        }
        let mut collections = Vec::with_capacity(p as usize);
        let mut padded: Vec<Vec<Vec<i64>>> = raw.to_vec();
        // Missing trailing collections count as empty.
        padded.resize(p as usize, Vec::new());
        for (l_idx, rows) in padded.iter().enumerate() {
            let mut vectors = Vec::with_capacity(rows.len());
            for (i_idx, row) in rows.iter().enumerate() {
                if row.len() != expected {
                    return Err(DatumError::BadVectorLength {
                        l: l_idx + 1,
                        i: i_idx + 1,
                        expected,
                        found: row.len(),
                    });
                }
                vectors.push(FpVector::from_ints(field, row));
            }
            if rank_mod_p(field, &vectors)? != vectors.len() {
                return Err(DatumError::DependentVectors { l: l_idx + 1 });
            }
            collections.push(vectors);
        }
        if collections.iter().all(Vec::is_empty) {
            return Err(DatumError::AllEmpty);
        }
        Ok(Datum { field, collections })
    }

    /// GGS placement: the single defining vector sits in the last collection.
    pub fn ggs(p: u32, e: &[i64]) -> Result<Self, DatumError> {
        PrimeField::new(p)?;
        let mut raw = vec![Vec::new(); p as usize];
        raw[p as usize - 1] = vec![e.to_vec()];
        Self::validate(p, &raw)
    }

    /// EGS placement: the first and last collections both hold the vector.
    pub fn egs(p: u32, e: &[i64]) -> Result<Self, DatumError> {
        PrimeField::new(p)?;
        let mut raw = vec![Vec::new(); p as usize];
        raw[0] = vec![e.to_vec()];
        raw[p as usize - 1] = vec![e.to_vec()];
        Self::validate(p, &raw)
    }

    /// Multi-edge placement: all r vectors sit in the last collection.
    pub fn multi_edge(p: u32, vectors: &[Vec<i64>]) -> Result<Self, DatumError> {
        PrimeField::new(p)?;
        let mut raw = vec![Vec::new(); p as usize];
        raw[p as usize - 1] = vectors.to_vec();
        Self::validate(p, &raw)
    }

    pub fn p(&self) -> u32 {
        self.field.modulus()
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn collections(&self) -> &[Vec<FpVector>] {
        &self.collections
    }

    /// The dimensions (r_1, ..., r_p).
    pub fn rank_profile(&self) -> Vec<usize> {
        self.collections.iter().map(Vec::len).collect()
    }

    pub fn rank(&self, l: u32) -> usize {
        self.collections[(l - 1) as usize].len()
    }

    /// Entry e^(l)_{i,n} with all indices 1-based, n in 1..p.
    pub fn entry(&self, l: u32, i: u32, n: u32) -> u32 {
        self.collections[(l - 1) as usize][(i - 1) as usize].entries()[(n - 1) as usize]
    }

    /// Generator bases in canonical order: `a`, then `b[l,i]` by (l, i).
    pub fn generator_bases(&self) -> Vec<Base> {
        let mut out = vec![Base::A];
        for (l_idx, vectors) in self.collections.iter().enumerate() {
            for i_idx in 0..vectors.len() {
                out.push(Base::B {
                    l: l_idx as u32 + 1,
                    i: i_idx as u32 + 1,
                });
            }
        }
        out
    }

    /// True when the datum has the EGS shape: one vector, shared by the
    /// first and last collections, nothing else.
    pub fn is_egs(&self) -> bool {
        let p = self.p() as usize;
        self.collections[0].len() == 1
            && self.collections[p - 1].len() == 1
            && self.collections[0][0] == self.collections[p - 1][0]
            && self.collections[1..p - 1].iter().all(Vec::is_empty)
    }

    /// Builds the wreath recursion: `a = (1,...,1) eps` and each `b[l,i]`
    /// rooted at position l-1 with `a^(e^(l)_{i,n})` at position
    /// (l-1+n) mod p.
    pub fn build_recursion(&self) -> WreathTable {
        let p = self.p();
        let mut table = WreathTable::new(p);
        table.insert(
            Base::A,
            GenRecursion {
                root: Perm::long_cycle(p),
                sections: vec![GroupWord::identity(p); p as usize],
            },
        );
        for (l_idx, vectors) in self.collections.iter().enumerate() {
            let l = l_idx as u32 + 1;
            for (i_idx, vector) in vectors.iter().enumerate() {
                let i = i_idx as u32 + 1;
                let base = Base::B { l, i };
                let mut sections = vec![GroupWord::identity(p); p as usize];
                sections[l_idx] = GroupWord::letter(p, base, 1);
                for n in 1..p {
                    let e = vector.entries()[(n - 1) as usize];
                    if e != 0 {
                        let pos = ((l - 1 + n) % p) as usize;
                        sections[pos] = GroupWord::letter(p, Base::A, e as i64);
                    }
                }
                table.insert(
                    base,
                    GenRecursion {
                        root: Perm::identity(p),
                        sections,
                    },
                );
            }
        }
        table
    }

    /// Exponent-sum vector of `w` in (Z/pZ)^(1 + r_1 + ... + r_p), with the
    /// `a`-coordinate first and the `b[l,i]`-coordinates in (l, i) order.
    pub fn abelianize(&self, w: &GroupWord) -> Vec<u32> {
        let mut offsets = BTreeMap::new();
        for (idx, base) in self.generator_bases().into_iter().enumerate() {
            offsets.insert(base, idx);
        }
        let mut coords = vec![0u32; offsets.len()];
        for letter in w.letters() {
            if let Some(&idx) = offsets.get(&letter.base) {
                coords[idx] = self.field.add(coords[idx], letter.exp);
            }
        }
        coords
    }

    /// Short human-readable shape summary, e.g. `p=3, r=[1,0,1]`.
    pub fn summary(&self) -> String {
        format!("p={}, r={:?}", self.p(), self.rank_profile())
    }
}

impl fmt::Display for Datum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.summary())
    }
}

/// Certificate produced by the witness search: indices (m, k, j) of the
/// defining entry, its inverse f, and the conjugator exponent s used in the
/// image of `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LiftWitness {
    pub m: u32,
    pub k: u32,
    pub j: u32,
    pub f: u32,
    pub s: u32,
}

/// Endomorphism given by generator images; applied by letter substitution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endomorphism {
    p: u32,
    images: BTreeMap<Base, GroupWord>,
}

impl Endomorphism {
    pub fn new(p: u32, images: BTreeMap<Base, GroupWord>) -> Self {
        Endomorphism { p, images }
    }

    pub fn image(&self, base: Base) -> Option<&GroupWord> {
        self.images.get(&base)
    }

    pub fn images(&self) -> impl Iterator<Item = (Base, &GroupWord)> {
        self.images.iter().map(|(b, w)| (*b, w))
    }

    /// Homomorphic substitution: each letter g^k maps to image(g)^k; the
    /// result is reduced.
    pub fn apply(&self, w: &GroupWord) -> GroupWord {
        let mut out = GroupWord::identity(self.p);
        for letter in w.letters() {
            let image = self
                .images
                .get(&letter.base)
                .unwrap_or_else(|| panic!("no image for generator {}", letter.base));
            out = out.multiply(&image.pow(letter.exp));
        }
        out
    }
}

/// True when `w` maps vertex 0 to itself.
pub fn fixes_vertex_zero(table: &WreathTable, w: &GroupWord) -> Result<bool, WreathError> {
    Ok(table.root_perm(w)?.apply(0) == 0)
}

/// Conjugator exponent for the image of `a`: the value of s for which
/// `(a^-s b[m,k] a^s)^f` fixes vertex 0 (automatic) and has section exactly
/// `a` at vertex 0. The shift s = 1-j-m always works when (m, k, j) is a
/// genuine witness, so it is tried first; remaining residues are scanned as
/// a fallback. A passing s with the wrong column can break the relator
/// substitution argument, so candidates other than 1-j-m are accepted only
/// if that one fails.
fn solve_conjugator(
    table: &WreathTable,
    d: &Datum,
    m: u32,
    k: u32,
    f: u32,
    j: u32,
) -> Result<u32, SigmaError> {
    let p = d.p();
    let preferred = d.field().reduce(1 - j as i64 - m as i64);
    let mut candidates = vec![preferred];
    candidates.extend((0..p).filter(|&s| s != preferred));
    let a = GroupWord::letter(p, Base::A, 1);
    for s in candidates {
        let image = sigma_a_image(d, m, k, f, s);
        if fixes_vertex_zero(table, &image)?
            && table.are_equal(&table.section(&image, 0)?, &a)?
        {
            return Ok(s);
        }
    }
    Err(SigmaError::NoValidConjugator)
}

fn sigma_a_image(d: &Datum, m: u32, k: u32, f: u32, s: u32) -> GroupWord {
    let p = d.p();
    let b = Base::B { l: m, i: k };
    if s == 0 {
        GroupWord::letter(p, b, f as i64)
    } else {
        GroupWord::from_letters(
            p,
            [
                (Base::A, -(s as i64)),
                (b, f as i64),
                (Base::A, s as i64),
            ],
        )
    }
}

/// Searches m = p down to 1, then k and j ascending, for indices with
/// e^(m)_{k,j} != 0 while column p-j vanishes in every collection. Returns
/// the first match, with f and the conjugator exponent filled in, or `None`
/// when no triple satisfies the conditions. Absence of a witness does not
/// decide non-liftability.
pub fn find_lifting_witness(d: &Datum) -> Option<LiftWitness> {
    let p = d.p();
    let table = d.build_recursion();
    for m in (1..=p).rev() {
        for k in 1..=d.rank(m) as u32 {
            for j in 1..p {
                if d.entry(m, k, j) == 0 {
                    continue;
                }
                let zero_column = (1..=p).all(|l| {
                    (1..=d.rank(l) as u32).all(|i| d.entry(l, i, p - j) == 0)
                });
                if !zero_column {
                    continue;
                }
                let f = d.field().inverse(d.entry(m, k, j)).expect("entry is nonzero");
                if let Ok(s) = solve_conjugator(&table, d, m, k, f, j) {
                    return Some(LiftWitness { m, k, j, f, s });
                }
            }
        }
    }
    None
}

/// Builds the lifting endomorphism for a witness:
/// `a -> (a^-s b[m,k] a^s)^f` and `b[l,i] -> a^-(p-l+1) b[l,i] a^(p-l+1)`.
/// All images are stored reduced.
pub fn build_sigma(d: &Datum, witness: &LiftWitness) -> Result<Endomorphism, SigmaError> {
    let p = d.p();
    let table = d.build_recursion();
    let s = solve_conjugator(&table, d, witness.m, witness.k, witness.f, witness.j)?;
    debug_assert_eq!(s, witness.s);

    let mut images = BTreeMap::new();
    images.insert(Base::A, sigma_a_image(d, witness.m, witness.k, witness.f, s));
    for (l_idx, vectors) in d.collections().iter().enumerate() {
        let l = l_idx as u32 + 1;
        for i_idx in 0..vectors.len() {
            let i = i_idx as u32 + 1;
            let base = Base::B { l, i };
            let shift = (p - l + 1) % p;
            let image = if shift == 0 {
                GroupWord::letter(p, base, 1)
            } else {
                GroupWord::from_letters(
                    p,
                    [
                        (Base::A, -(shift as i64)),
                        (base, 1),
                        (Base::A, shift as i64),
                    ],
                )
            };
            images.insert(base, image);
        }
    }
    Ok(Endomorphism::new(p, images))
}

/// Uniform reduced word: letters drawn uniformly from the generator bases
/// with uniform nonzero exponents, then reduced (so the result may be
/// shorter than `len`).
pub fn random_word<R: Rng>(table: &WreathTable, rng: &mut R, len: usize) -> GroupWord {
    let bases: Vec<Base> = table.generators().collect();
    let p = table.p();
    let mut word = GroupWord::identity(p);
    for _ in 0..len {
        let base = bases[rng.gen_range(0..bases.len())];
        let exp = rng.gen_range(1..p) as i64;
        word.push(base, exp);
    }
    word
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorCheck {
    pub generator: String,
    pub image: String,
    pub fixes_vertex_zero: bool,
    pub section_recovers_source: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RelatorCheck {
    pub relator: String,
    pub image_trivial: bool,
}

/// Outcome of [`verify_lifting`]; `passed` aggregates every check.
#[derive(Debug, Clone, Serialize)]
pub struct LiftReport {
    pub seed: u64,
    pub sample_size: usize,
    pub max_len: usize,
    pub generator_checks: Vec<GeneratorCheck>,
    pub sampled_words: usize,
    pub sampled_fix_failures: usize,
    pub sampled_recovery_failures: usize,
    pub relator_checks: Vec<RelatorCheck>,
    pub passed: bool,
}

/// Checks that `sigma` behaves as a lifting: every generator image (and the
/// image of each sampled word) fixes vertex 0 and has the source element as
/// its section at 0, and the relators `g^p` and `[b[l,i], b[l,i']]` map to
/// trivial words. Failures are reported, not thrown.
pub fn verify_lifting(
    d: &Datum,
    sigma: &Endomorphism,
    sample_size: usize,
    max_len: usize,
    seed: u64,
) -> Result<LiftReport, WreathError> {
    let table = d.build_recursion();
    let p = d.p();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut generator_checks = Vec::new();
    for base in d.generator_bases() {
        let g = GroupWord::letter(p, base, 1);
        let image = sigma.apply(&g);
        let fixes = fixes_vertex_zero(&table, &image)?;
        let recovers = fixes && table.are_equal(&table.section_at(&image, &[0])?, &g)?;
        generator_checks.push(GeneratorCheck {
            generator: base.to_string(),
            image: image.to_string(),
            fixes_vertex_zero: fixes,
            section_recovers_source: recovers,
        });
    }

    let mut fix_failures = 0;
    let mut recovery_failures = 0;
    for _ in 0..sample_size {
        let len = rng.gen_range(0..=max_len);
        let w = random_word(&table, &mut rng, len);
        let image = sigma.apply(&w);
        if !fixes_vertex_zero(&table, &image)? {
            fix_failures += 1;
            continue;
        }
        if !table.are_equal(&table.section_at(&image, &[0])?, &w)? {
            recovery_failures += 1;
        }
    }

    let mut relator_checks = Vec::new();
    let mut relators: Vec<GroupWord> = Vec::new();
    for base in d.generator_bases() {
        relators.push(GroupWord::letter(p, base, 1).pow(p));
    }
    for (l_idx, vectors) in d.collections().iter().enumerate() {
        let l = l_idx as u32 + 1;
        for i in 1..=vectors.len() as u32 {
            for i2 in (i + 1)..=vectors.len() as u32 {
                let u = GroupWord::letter(p, Base::B { l, i }, 1);
                let v = GroupWord::letter(p, Base::B { l, i: i2 }, 1);
                relators.push(
                    u.multiply(&v).multiply(&u.invert()).multiply(&v.invert()),
                );
            }
        }
    }
    for relator in relators {
        let trivial = table.is_trivial(&sigma.apply(&relator))?;
        relator_checks.push(RelatorCheck {
            relator: relator.to_string(),
            image_trivial: trivial,
        });
    }

    let passed = generator_checks
        .iter()
        .all(|c| c.fixes_vertex_zero && c.section_recovers_source)
        && fix_failures == 0
        && recovery_failures == 0
        && relator_checks.iter().all(|c| c.image_trivial);

    Ok(LiftReport {
        seed,
        sample_size,
        max_len,
        generator_checks,
        sampled_words: sample_size,
        sampled_fix_failures: fix_failures,
        sampled_recovery_failures: recovery_failures,
        relator_checks,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d3() -> Datum {
        Datum::egs(3, &[1, 0]).unwrap()
    }

    fn b3() -> Base {
        Base::B { l: 3, i: 1 }
    }

    fn c1() -> Base {
        Base::B { l: 1, i: 1 }
    }

    #[test]
    fn validate_accepts_d3() {
        let raw = vec![vec![vec![1, 0]], vec![], vec![vec![1, 0]]];
        let d = Datum::validate(3, &raw).unwrap();
        assert_eq!(d.rank_profile(), vec![1, 0, 1]);
        assert_eq!(d, d3());
        assert!(d.is_egs());
    }

    #[test]
    fn validate_rejects_bad_data() {
        assert_eq!(
            Datum::validate(3, &[vec![], vec![], vec![]]).unwrap_err(),
            DatumError::AllEmpty
        );
        let dependent = vec![
            vec![],
            vec![],
            vec![],
            vec![],
            vec![vec![1, 2, 0, 0], vec![2, 4, 0, 0]],
        ];
        assert_eq!(
            Datum::validate(5, &dependent).unwrap_err(),
            DatumError::DependentVectors { l: 5 }
        );
        let short = vec![vec![vec![1, 0, 0]], vec![], vec![]];
        assert_eq!(
            Datum::validate(3, &short).unwrap_err(),
            DatumError::BadVectorLength {
                l: 1,
                i: 1,
                expected: 2,
                found: 3
            }
        );
        assert!(matches!(
            Datum::validate(4, &[vec![vec![1, 0, 0]]]).unwrap_err(),
            DatumError::Field(FpError::NotPrime(4))
        ));
        let zero_vec = vec![vec![vec![0, 0]], vec![], vec![]];
        assert_eq!(
            Datum::validate(3, &zero_vec).unwrap_err(),
            DatumError::DependentVectors { l: 1 }
        );
        let surplus = vec![vec![vec![1, 0]], vec![], vec![], vec![]];
        assert_eq!(
            Datum::validate(3, &surplus).unwrap_err(),
            DatumError::TooManyCollections {
                expected: 3,
                found: 4
            }
        );
    }

    #[test]
    fn special_placements() {
        let ggs = Datum::ggs(3, &[1, 2]).unwrap();
        assert_eq!(ggs.rank_profile(), vec![0, 0, 1]);
        assert!(!ggs.is_egs());

        let egs = Datum::egs(3, &[1, 0]).unwrap();
        assert_eq!(egs.rank_profile(), vec![1, 0, 1]);

        let me = Datum::multi_edge(5, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]).unwrap();
        assert_eq!(me.rank_profile(), vec![0, 0, 0, 0, 2]);
    }

    #[test]
    fn recursion_matches_egs_shape() {
        let t = d3().build_recursion();
        let b = t.recursion(b3()).unwrap();
        assert!(b.root.is_identity());
        assert_eq!(b.sections[0].to_string(), "a");
        assert!(b.sections[1].is_identity());
        assert_eq!(b.sections[2].to_string(), "b[3,1]");

        let c = t.recursion(c1()).unwrap();
        assert!(c.root.is_identity());
        assert_eq!(c.sections[0].to_string(), "b[1,1]");
        assert_eq!(c.sections[1].to_string(), "a");
        assert!(c.sections[2].is_identity());

        let a = t.recursion(Base::A).unwrap();
        assert_eq!(a.root, Perm::long_cycle(3));
        assert!(a.sections.iter().all(GroupWord::is_identity));
    }

    #[test]
    fn witness_search_examples() {
        let w = find_lifting_witness(&d3()).unwrap();
        assert_eq!((w.m, w.k, w.j, w.f, w.s), (3, 1, 1, 1, 0));

        assert!(find_lifting_witness(&Datum::ggs(3, &[1, 2]).unwrap()).is_none());

        let p5 = Datum::ggs(5, &[1, 0, 0, 0]).unwrap();
        let w = find_lifting_witness(&p5).unwrap();
        assert_eq!((w.m, w.k, w.j), (5, 1, 1));
    }

    #[test]
    fn sigma_matches_egs_closed_form() {
        let d = d3();
        let witness = find_lifting_witness(&d).unwrap();
        let sigma = build_sigma(&d, &witness).unwrap();
        // a -> b, b -> b^a, c -> c, letter for letter
        assert_eq!(sigma.image(Base::A).unwrap().to_string(), "b[3,1]");
        assert_eq!(sigma.image(b3()).unwrap().to_string(), "a^2 b[3,1] a");
        assert_eq!(sigma.image(c1()).unwrap().to_string(), "b[1,1]");
    }

    #[test]
    fn sigma_for_forced_first_spine_witness() {
        // Forcing the search to the l=1 spine of the same datum: the
        // conjugator becomes s = 1-1-1 = -1 = 2 and sigma(a) = c^(a^2) with
        // sections (a, 1, c).
        let d = d3();
        let table = d.build_recursion();
        let f = d.field().inverse(d.entry(1, 1, 1)).unwrap();
        let s = solve_conjugator(&table, &d, 1, 1, f, 1).unwrap();
        assert_eq!(s, 2);
        let witness = LiftWitness { m: 1, k: 1, j: 1, f, s };
        let sigma = build_sigma(&d, &witness).unwrap();
        let image = sigma.image(Base::A).unwrap();
        assert_eq!(image.to_string(), "a b[1,1] a^2");
        assert_eq!(table.section(image, 0).unwrap().to_string(), "a");
        assert!(table.section(image, 1).unwrap().is_identity());
        assert_eq!(table.section(image, 2).unwrap().to_string(), "b[1,1]");
        assert!(verify_lifting(&d, &sigma, 40, 10, 7).unwrap().passed);
    }

    #[test]
    fn sigma_for_multi_edge_matches_closed_form() {
        let d = Datum::multi_edge(3, &[vec![1, 0]]).unwrap();
        let witness = find_lifting_witness(&d).unwrap();
        assert_eq!((witness.m, witness.k, witness.j, witness.s), (3, 1, 1, 0));
        let sigma = build_sigma(&d, &witness).unwrap();
        assert_eq!(sigma.image(Base::A).unwrap().to_string(), "b[3,1]");
        assert_eq!(sigma.image(b3()).unwrap().to_string(), "a^2 b[3,1] a");
    }

    #[test]
    fn apply_sigma_examples() {
        let d = d3();
        let sigma = build_sigma(&d, &find_lifting_witness(&d).unwrap()).unwrap();
        let a = GroupWord::letter(3, Base::A, 1);
        assert_eq!(sigma.apply(&a).to_string(), "b[3,1]");

        let ab = GroupWord::from_letters(3, [(Base::A, 1), (b3(), 1)]);
        // b * (a^2 b a) reduced
        assert_eq!(sigma.apply(&ab).to_string(), "b[3,1] a^2 b[3,1] a");

        assert!(sigma.apply(&GroupWord::identity(3)).is_identity());
    }

    #[test]
    fn verify_lifting_passes_for_reference_sigma_and_fails_when_sabotaged() {
        let d = d3();
        let sigma = build_sigma(&d, &find_lifting_witness(&d).unwrap()).unwrap();
        let report = verify_lifting(&d, &sigma, 30, 12, 42).unwrap();
        assert!(report.passed);

        // sigma(a) := a moves vertex 0, so the fix check fails first.
        let mut images: BTreeMap<Base, GroupWord> =
            sigma.images().map(|(b, w)| (b, w.clone())).collect();
        images.insert(Base::A, GroupWord::letter(3, Base::A, 1));
        let bad = Endomorphism::new(3, images);
        let report = verify_lifting(&d, &bad, 10, 6, 42).unwrap();
        assert!(!report.passed);
        let a_check = &report.generator_checks[0];
        assert_eq!(a_check.generator, "a");
        assert!(!a_check.fixes_vertex_zero);
    }

    #[test]
    fn sigma_kills_power_relators() {
        let d = d3();
        let sigma = build_sigma(&d, &find_lifting_witness(&d).unwrap()).unwrap();
        let table = d.build_recursion();
        let a_cubed = GroupWord::letter(3, Base::A, 1).pow(3);
        assert!(a_cubed.is_identity());
        // sigma(a)^3 = b^3 is a nonempty word but a trivial element
        let image = sigma.image(Base::A).unwrap().pow(3);
        assert!(table.is_trivial(&image).unwrap());
    }

    #[test]
    fn conjugator_tie_break_picks_the_proven_exponent() {
        // e = (1,0,1,2) over p=5: the witness is (m,k,j) = (5,1,3), and
        // e_1 = e_3 makes s = 0 pass the two local checks as well (fixes
        // vertex 0, section a there). Only s = 1-j-m = 3 places the spinal
        // entry of sigma(a) in the all-zero column, which the substitution
        // argument needs, so the search must settle on 3.
        let d = Datum::multi_edge(5, &[vec![1, 0, 1, 2]]).unwrap();
        let table = d.build_recursion();

        // the tie is real: the s = 0 candidate passes both local checks
        let tied = GroupWord::letter(5, Base::B { l: 5, i: 1 }, 1);
        assert!(fixes_vertex_zero(&table, &tied).unwrap());
        assert_eq!(table.section(&tied, 0).unwrap().to_string(), "a");

        let witness = find_lifting_witness(&d).unwrap();
        assert_eq!(
            (witness.m, witness.k, witness.j, witness.f, witness.s),
            (5, 1, 3, 1, 3)
        );
        let sigma = build_sigma(&d, &witness).unwrap();
        assert_eq!(sigma.image(Base::A).unwrap().to_string(), "a^2 b[5,1] a^3");
        assert!(verify_lifting(&d, &sigma, 30, 12, 5).unwrap().passed);
    }

    #[test]
    fn witnessed_p7_datum_verifies() {
        let d = Datum::egs(7, &[1, 0, 0, 0, 2, 0]).unwrap();
        let witness = find_lifting_witness(&d).unwrap();
        assert_eq!((witness.m, witness.k, witness.j), (7, 1, 1));
        let sigma = build_sigma(&d, &witness).unwrap();
        assert!(verify_lifting(&d, &sigma, 25, 10, 11).unwrap().passed);
    }

    #[test]
    fn sigma_images_are_conjugates_of_order_p() {
        let d = d3();
        let table = d.build_recursion();
        let sigma = build_sigma(&d, &find_lifting_witness(&d).unwrap()).unwrap();
        for (_, image) in sigma.images() {
            assert_eq!(table.order_of(image, 3).unwrap(), Some(3));
        }
    }

    #[test]
    fn sigma_kills_conjugated_relators() {
        let d = d3();
        let table = d.build_recursion();
        let sigma = build_sigma(&d, &find_lifting_witness(&d).unwrap()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for base in d.generator_bases() {
            let relator = GroupWord::letter(3, base, 1).pow(3);
            for _ in 0..10 {
                let conjugator = random_word(&table, &mut rng, 5);
                let image = sigma.apply(&relator.conjugate_by(&conjugator));
                assert!(table.is_trivial(&image).unwrap());
            }
        }
    }

    #[test]
    fn abelianize_examples() {
        let d = d3();
        // coordinates: (a, b[1,1], b[3,1]) = (a, c, b)
        let a2 = GroupWord::letter(3, Base::A, 2);
        assert_eq!(d.abelianize(&a2), vec![2, 0, 0]);

        let comm = GroupWord::from_letters(
            3,
            [(b3(), 1), (c1(), 1), (b3(), -1), (c1(), -1)],
        );
        assert_eq!(d.abelianize(&comm), vec![0, 0, 0]);

        let w = GroupWord::from_letters(3, [(Base::A, 1), (b3(), 1), (Base::A, 1), (b3(), 2)]);
        assert_eq!(d.abelianize(&w), vec![2, 0, 0]);
    }
}
