//! Action of the ascending extension on the unrooted (p+1)-regular tree.
//!
//! The unrooted tree is modeled as a union of nested rooted copies: a vertex
//! is a class `(k, w)` with `k >= 0` and `w` a vertex word, subject to the
//! identification `(k+1, 0w) = (k, w)`. Canonical form has `k = 0` or `w`
//! not starting with the letter 0. The distinguished end is the direction of
//! increasing k along the spine `(k, "")`.
//!
//! Letters act on canonical vertices as
//!
//! * `g^e`: `(k, w) -> (k, sigma^k(g)^e (w))`,
//! * `t`:   `(k, w) -> (k+1, w)`,
//! * `t^-1`: `(k, w) -> (k-1, w)` after rewriting to `k >= 1`,
//!
//! each followed by canonicalization. This is the unique assignment that
//! respects the identification (images under `sigma` fix vertex 0 with the
//! source element as their section there) and satisfies the defining
//! relation `t g t^-1 = sigma(g)` under the crate's left-to-right
//! composition order. Both facts are property-tested rather than assumed.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::families::Endomorphism;
use crate::words::{Base, GroupWord, Letter};
use crate::wreath::{WreathError, WreathTable};

/// Default cap on sigma iteration; image words grow with each application.
pub const DEFAULT_SIGMA_ITERATION_BOUND: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HnnError {
    #[error("sigma iteration {requested} exceeds the configured bound {bound}")]
    IterationBoundExceeded { requested: u32, bound: u32 },
    #[error(transparent)]
    Wreath(#[from] WreathError),
}

/// Canonical vertex of the unrooted tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HnnVertex {
    k: u32,
    word: Vec<u8>,
}

impl HnnVertex {
    /// Builds the canonical representative of the class of `(k, w)`:
    /// repeatedly rewrites `(k, 0u) -> (k-1, u)` while `k >= 1`.
    pub fn new(mut k: u32, word: &[u8]) -> Self {
        let mut start = 0;
        while k >= 1 && start < word.len() && word[start] == 0 {
            k -= 1;
            start += 1;
        }
        HnnVertex {
            k,
            word: word[start..].to_vec(),
        }
    }

    pub fn root() -> Self {
        HnnVertex {
            k: 0,
            word: Vec::new(),
        }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    /// The same class presented one copy higher: `(k+1, 0w)`.
    pub fn lifted_presentation(&self) -> (u32, Vec<u8>) {
        let mut word = Vec::with_capacity(self.word.len() + 1);
        word.push(0);
        word.extend_from_slice(&self.word);
        (self.k + 1, word)
    }
}

impl fmt::Display for HnnVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.k)?;
        if self.word.is_empty() {
            write!(f, "-")
        } else {
            for &x in &self.word {
                write!(f, "{x}")?;
            }
            Ok(())
        }
    }
}

/// Letters of words in the extension: group letters plus the stable letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HnnLetter {
    Gen(Letter),
    T,
    TInv,
}

/// Lazily extended table of iterated sigma images of the generators.
pub struct SigmaTower<'a> {
    sigma: &'a Endomorphism,
    bound: u32,
    powers: Vec<BTreeMap<Base, GroupWord>>,
}

impl<'a> SigmaTower<'a> {
    pub fn new(table: &WreathTable, sigma: &'a Endomorphism, bound: u32) -> Self {
        let mut level0 = BTreeMap::new();
        for base in table.generators() {
            level0.insert(base, GroupWord::letter(table.p(), base, 1));
        }
        SigmaTower {
            sigma,
            bound,
            powers: vec![level0],
        }
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    /// `sigma^k(g)`, cached per (generator, k).
    pub fn power(&mut self, base: Base, k: u32) -> Result<GroupWord, HnnError> {
        if k > self.bound {
            return Err(HnnError::IterationBoundExceeded {
                requested: k,
                bound: self.bound,
            });
        }
        while self.powers.len() <= k as usize {
            let previous = self.powers.last().expect("tower starts at level 0");
            let next: BTreeMap<Base, GroupWord> = previous
                .iter()
                .map(|(base, word)| (*base, self.sigma.apply(word)))
                .collect();
            self.powers.push(next);
        }
        self.powers[k as usize]
            .get(&base)
            .cloned()
            .ok_or_else(|| WreathError::UnknownGenerator(base.to_string()).into())
    }
}

/// Action of a single letter on a canonical vertex.
pub fn act(
    table: &WreathTable,
    tower: &mut SigmaTower,
    letter: &HnnLetter,
    v: &HnnVertex,
) -> Result<HnnVertex, HnnError> {
    match letter {
        HnnLetter::Gen(g) => {
            let image = tower.power(g.base, v.k())?.pow(g.exp);
            let moved = table.apply(&image, v.word())?;
            Ok(HnnVertex::new(v.k(), &moved))
        }
        HnnLetter::T => Ok(HnnVertex::new(v.k() + 1, v.word())),
        HnnLetter::TInv => {
            if v.k() == 0 {
                let (_, lifted) = v.lifted_presentation();
                Ok(HnnVertex::new(0, &lifted))
            } else {
                Ok(HnnVertex::new(v.k() - 1, v.word()))
            }
        }
    }
}

/// Left-to-right fold of [`act`], matching the composition order of
/// `GroupWord` products.
pub fn act_word(
    table: &WreathTable,
    tower: &mut SigmaTower,
    word: &[HnnLetter],
    v: &HnnVertex,
) -> Result<HnnVertex, HnnError> {
    let mut current = v.clone();
    for letter in word {
        current = act(table, tower, letter, &current)?;
    }
    Ok(current)
}

/// Group word lifted to a sequence of extension letters.
pub fn as_hnn_letters(w: &GroupWord) -> Vec<HnnLetter> {
    w.letters().iter().map(|&l| HnnLetter::Gen(l)).collect()
}

/// Checks the defining relation on a sample of vertices: `t g t^-1` and
/// `sigma(g)` must act identically on each.
pub fn verify_hnn_relation(
    table: &WreathTable,
    tower: &mut SigmaTower,
    base: Base,
    vertices: &[HnnVertex],
) -> Result<bool, HnnError> {
    let g = Letter { base, exp: 1 };
    let conjugated = vec![HnnLetter::T, HnnLetter::Gen(g), HnnLetter::TInv];
    let image = tower.power(base, 1)?;
    let substituted = as_hnn_letters(&image);
    for v in vertices {
        let lhs = act_word(table, tower, &conjugated, v)?;
        let rhs = act_word(table, tower, &substituted, v)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All canonical vertices with `k <= k_max` and `|w| <= l_max`, in sorted
/// order. Independent of the action machinery: canonical form requires
/// `k = 0` or a word not starting with 0.
pub fn canonical_ball(p: u32, k_max: u32, l_max: usize) -> Vec<HnnVertex> {
    let mut out = Vec::new();
    let mut words: Vec<Vec<u8>> = vec![Vec::new()];
    for len in 0..=l_max {
        if len > 0 {
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
        }
        for w in &words {
            out.push(HnnVertex {
                k: 0,
                word: w.clone(),
            });
            for k in 1..=k_max {
                if w.first() != Some(&0) {
                    out.push(HnnVertex { k, word: w.clone() });
                }
            }
        }
    }
    out.sort();
    out
}

/// Orbit of `start` under the given moves, restricted to the canonical ball
/// `k <= k_max, |w| <= l_max`; breadth-first with a deterministic frontier.
pub fn orbit_closure(
    table: &WreathTable,
    tower: &mut SigmaTower,
    moves: &[HnnLetter],
    start: &HnnVertex,
    k_max: u32,
    l_max: usize,
) -> Result<BTreeSet<HnnVertex>, HnnError> {
    let mut reached = BTreeSet::new();
    let mut frontier = VecDeque::new();
    if start.k() <= k_max && start.word().len() <= l_max {
        reached.insert(start.clone());
        frontier.push_back(start.clone());
    }
    while let Some(v) = frontier.pop_front() {
        for letter in moves {
            let image = act(table, tower, letter, &v)?;
            if image.k() > k_max || image.word().len() > l_max {
                continue;
            }
            if reached.insert(image.clone()) {
                frontier.push_back(image);
            }
        }
    }
    Ok(reached)
}

#[derive(Debug, Clone, Serialize)]
pub struct BallSpec {
    #[serde(rename = "K")]
    pub k_max: u32,
    #[serde(rename = "L")]
    pub l_max: usize,
}

/// Coverage report for the ball-restricted orbit of the base vertex.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitReport {
    pub ball: BallSpec,
    pub reached: usize,
    pub total: usize,
    pub transitive_on_ball: bool,
    pub missed: Vec<String>,
}

/// Runs the breadth-first orbit of `(0, "")` under all generators, their
/// inverses, and `t, t^-1`, and reports coverage of the canonical ball.
pub fn orbit_ball(
    table: &WreathTable,
    tower: &mut SigmaTower,
    k_max: u32,
    l_max: usize,
) -> Result<OrbitReport, HnnError> {
    let p = table.p();
    let mut moves = Vec::new();
    for base in table.generators() {
        moves.push(HnnLetter::Gen(Letter { base, exp: 1 }));
        moves.push(HnnLetter::Gen(Letter { base, exp: p - 1 }));
    }
    moves.push(HnnLetter::T);
    moves.push(HnnLetter::TInv);

    let reached = orbit_closure(table, tower, &moves, &HnnVertex::root(), k_max, l_max)?;
    let ball = canonical_ball(p, k_max, l_max);
    let missed: Vec<String> = ball
        .iter()
        .filter(|v| !reached.contains(v))
        .map(|v| v.to_string())
        .collect();
    Ok(OrbitReport {
        ball: BallSpec { k_max, l_max },
        reached: reached.len(),
        total: ball.len(),
        transitive_on_ball: missed.is_empty(),
        missed,
    })
}
