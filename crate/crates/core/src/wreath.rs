//! Wreath recursion tables and the section calculus.
//!
//! A [`WreathTable`] records, for every generator, its permutation of the
//! first tree level and its p first-level sections. Everything else is
//! derived from that data: sections of arbitrary words, the action on
//! vertices, the word problem, element equality, orders, and portraits.
//!
//! # Conventions
//!
//! Products act left to right: `apply(u * v, w) = apply(v, apply(u, w))`.
//! Accordingly the section of a product is
//! `(u v)|_x = u|_x * v|_(sigma_u(x))` and the root permutation of a product
//! composes as `sigma_(u v)(x) = sigma_v(sigma_u(x))`.
//!
//! # Word problem
//!
//! `is_trivial` evaluates the greatest fixed point of "has trivial root
//! permutation and all first-level sections are trivial": it walks the set
//! of words reachable from the input by iterated sectioning, treating words
//! already on the worklist as trivial-so-far, and answers false exactly when
//! some reachable section moves a first-level vertex. Sections of an n-letter
//! word have at most n letters, so the reachable set is finite and the walk
//! terminates; a configurable memo bound guards against misuse on
//! non-reducing recursions.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::words::{Base, GroupWord, Letter};

/// Soft cap on the word-problem memo, overridable per call.
pub const DEFAULT_MEMO_BOUND: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WreathError {
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("word problem memo exceeded {bound} entries; recursion does not appear to reduce")]
    DepthBoundExceeded { bound: usize },
}

/// A permutation of the first-level alphabet `0..p`, stored by images.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Perm {
    images: Vec<u8>,
}

impl Perm {
    pub fn identity(p: u32) -> Self {
        Perm {
            images: (0..p as u8).collect(),
        }
    }

    /// The long cycle x -> x+1 mod p.
    pub fn long_cycle(p: u32) -> Self {
        Perm {
            images: (0..p as u8).map(|x| (x + 1) % p as u8).collect(),
        }
    }

    /// Validates that `images` is a bijection of `0..images.len()`.
    pub fn new(images: Vec<u8>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if (x as usize) >= n || seen[x as usize] {
                return None;
            }
            seen[x as usize] = true;
        }
        Some(Perm { images })
    }

    pub fn degree(&self) -> u32 {
        self.images.len() as u32
    }

    pub fn apply(&self, x: u8) -> u8 {
        self.images[x as usize]
    }

    /// Composition in action order: `(self.then(other))(x) = other(self(x))`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm {
            images: self.images.iter().map(|&x| other.apply(x)).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0u8; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y as usize] = x as u8;
        }
        Perm { images }
    }

    pub fn pow(&self, k: u32) -> Perm {
        let mut out = Perm::identity(self.degree());
        for _ in 0..k {
            out = out.then(self);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x as u8 == y)
    }

    /// Cycle decomposition, fixed points omitted; empty for the identity.
    pub fn cycles(&self) -> Vec<Vec<u8>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start as u8];
            seen[start] = true;
            let mut x = self.images[start] as usize;
            while x != start {
                seen[x] = true;
                cycle.push(x as u8);
                x = self.images[x] as usize;
            }
            if cycle.len() > 1 {
                cycles.push(cycle);
            }
        }
        cycles
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cycle in cycles {
            write!(f, "(")?;
            for (idx, x) in cycle.iter().enumerate() {
                if idx > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// First-level decomposition of a single generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenRecursion {
    pub root: Perm,
    pub sections: Vec<GroupWord>,
}

/// The defining recursion of a spinal group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WreathTable {
    p: u32,
    gens: BTreeMap<Base, GenRecursion>,
}

/// Portrait of an element relative to a finite leaf set: internal nodes carry
/// the root permutation, leaves carry elements of the set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Portrait {
    Leaf(GroupWord),
    Node(Perm, Vec<Portrait>),
}

impl Portrait {
    pub fn depth(&self) -> usize {
        match self {
            Portrait::Leaf(_) => 0,
            Portrait::Node(_, children) => {
                1 + children.iter().map(Portrait::depth).max().unwrap_or(0)
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Portrait::Leaf(_) => 1,
            Portrait::Node(_, children) => children.iter().map(Portrait::leaf_count).sum(),
        }
    }
}

impl WreathTable {
    pub fn new(p: u32) -> Self {
        WreathTable {
            p,
            gens: BTreeMap::new(),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn insert(&mut self, base: Base, recursion: GenRecursion) {
        assert_eq!(recursion.sections.len(), self.p as usize);
        assert_eq!(recursion.root.degree(), self.p);
        self.gens.insert(base, recursion);
    }

    /// Generator bases in canonical order: `a` first, then `b[l,i]` by (l, i).
    pub fn generators(&self) -> impl Iterator<Item = Base> + '_ {
        self.gens.keys().copied()
    }

    pub fn recursion(&self, base: Base) -> Option<&GenRecursion> {
        self.gens.get(&base)
    }

    pub fn check_word(&self, w: &GroupWord) -> Result<(), WreathError> {
        for letter in w.letters() {
            if !self.gens.contains_key(&letter.base) {
                return Err(WreathError::UnknownGenerator(letter.base.to_string()));
            }
        }
        Ok(())
    }

    fn letter_root(&self, letter: &Letter) -> Result<Perm, WreathError> {
        let rec = self
            .gens
            .get(&letter.base)
            .ok_or_else(|| WreathError::UnknownGenerator(letter.base.to_string()))?;
        Ok(rec.root.pow(letter.exp))
    }

    /// Section of a single letter `g^k` at `x`: the product of the sections
    /// of g along the root-permutation orbit of x.
    fn letter_section(&self, letter: &Letter, x: u8) -> Result<GroupWord, WreathError> {
        let rec = self
            .gens
            .get(&letter.base)
            .ok_or_else(|| WreathError::UnknownGenerator(letter.base.to_string()))?;
        let mut out = GroupWord::identity(self.p);
        let mut pos = x;
        for _ in 0..letter.exp {
            out = out.multiply(&rec.sections[pos as usize]);
            pos = rec.root.apply(pos);
        }
        Ok(out)
    }

    /// Permutation induced on the first level by `w`.
    pub fn root_perm(&self, w: &GroupWord) -> Result<Perm, WreathError> {
        let mut out = Perm::identity(self.p);
        for letter in w.letters() {
            out = out.then(&self.letter_root(letter)?);
        }
        Ok(out)
    }

    /// First-level section of `w` at `x`, tracking the running image of x
    /// through each prefix of the word.
    pub fn section(&self, w: &GroupWord, x: u8) -> Result<GroupWord, WreathError> {
        assert!((x as u32) < self.p, "vertex letter out of range");
        let mut out = GroupWord::identity(self.p);
        let mut pos = x;
        for letter in w.letters() {
            out = out.multiply(&self.letter_section(letter, pos)?);
            pos = self.letter_root(letter)?.apply(pos);
        }
        Ok(out)
    }

    /// Iterated section along a vertex word; the empty path returns `w`.
    pub fn section_at(&self, w: &GroupWord, path: &[u8]) -> Result<GroupWord, WreathError> {
        let mut out = w.clone();
        for &x in path {
            out = self.section(&out, x)?;
        }
        Ok(out)
    }

    /// Image of the vertex `v` under the automorphism; length-preserving and
    /// prefix-compatible.
    pub fn apply(&self, w: &GroupWord, v: &[u8]) -> Result<Vec<u8>, WreathError> {
        let mut out = Vec::with_capacity(v.len());
        let mut current = w.clone();
        for &x in v {
            assert!((x as u32) < self.p, "vertex letter out of range");
            out.push(self.root_perm(&current)?.apply(x));
            current = self.section(&current, x)?;
        }
        Ok(out)
    }

    pub fn is_trivial(&self, w: &GroupWord) -> Result<bool, WreathError> {
        self.is_trivial_bounded(w, DEFAULT_MEMO_BOUND)
    }

    /// Word problem with an explicit memo bound. See the module docs for the
    /// coinductive reading of the worklist.
    pub fn is_trivial_bounded(
        &self,
        w: &GroupWord,
        memo_bound: usize,
    ) -> Result<bool, WreathError> {
        self.check_word(w)?;
        if !self.root_perm(w)?.is_identity() {
            return Ok(false);
        }
        let mut seen: HashSet<GroupWord> = HashSet::new();
        seen.insert(w.clone());
        let mut stack = vec![w.clone()];
        while let Some(u) = stack.pop() {
            for x in 0..self.p as u8 {
                let s = self.section(&u, x)?;
                if s.is_identity() {
                    continue;
                }
                if !self.root_perm(&s)?.is_identity() {
                    return Ok(false);
                }
                if seen.insert(s.clone()) {
                    if seen.len() > memo_bound {
                        return Err(WreathError::DepthBoundExceeded { bound: memo_bound });
                    }
                    stack.push(s);
                }
            }
        }
        Ok(true)
    }

    pub fn are_equal(&self, u: &GroupWord, v: &GroupWord) -> Result<bool, WreathError> {
        self.are_equal_bounded(u, v, DEFAULT_MEMO_BOUND)
    }

    /// Element equality: `u` and `v` define the same automorphism iff
    /// `u * v^-1` is trivial.
    pub fn are_equal_bounded(
        &self,
        u: &GroupWord,
        v: &GroupWord,
        memo_bound: usize,
    ) -> Result<bool, WreathError> {
        if u == v {
            return Ok(true);
        }
        self.is_trivial_bounded(&u.multiply(&v.invert()), memo_bound)
    }

    /// Least n <= max_order with w^n trivial, or `None` when no such n was
    /// found within the bound.
    pub fn order_of(&self, w: &GroupWord, max_order: u32) -> Result<Option<u32>, WreathError> {
        let mut acc = GroupWord::identity(self.p);
        for n in 1..=max_order {
            acc = acc.multiply(w);
            if self.is_trivial(&acc)? {
                return Ok(Some(n));
            }
        }
        Ok(None)
    }

    /// Portrait of `w` relative to `leaves`: a leaf as soon as `w` equals a
    /// member of the set, otherwise a node carrying the root permutation and
    /// the portraits of the p sections. Terminates whenever deep sections of
    /// `w` eventually fall into `leaves`, which holds when `leaves` is the
    /// nucleus of a contracting recursion.
    pub fn portrait(&self, w: &GroupWord, leaves: &[GroupWord]) -> Result<Portrait, WreathError> {
        for leaf in leaves {
            if self.are_equal(w, leaf)? {
                return Ok(Portrait::Leaf(leaf.clone()));
            }
        }
        let mut children = Vec::with_capacity(self.p as usize);
        for x in 0..self.p as u8 {
            children.push(self.portrait(&self.section(w, x)?, leaves)?);
        }
        Ok(Portrait::Node(self.root_perm(w)?, children))
    }
}
