//! Contracting nuclei: closure enumeration, cycle extraction, and the
//! quasinucleus check.
//!
//! [`self_similar_closure`] grows the least set that contains the identity,
//! the generators and their inverses, and the depth-two sections of every
//! pairwise product of members. Depth two is the contraction depth of this
//! family of recursions: products of two spinal generators from different
//! spines pick up transient cross terms at depth one that dissolve again one
//! level further down, so the depth-two closure converges to the nucleus
//! itself while a depth-one rule would accumulate the transients.
//!
//! [`minimal_nucleus`] then keeps the elements lying on, or reachable from,
//! directed cycles of the section graph. For these recursions the closure is
//! already cycle-saturated and the restriction is the identity map, but it
//! also cleans up seed sets that were handed transient extras.
//!
//! Membership throughout is element equality (`are_equal`) against stored
//! canonical representatives, with a cheap sound prefilter: two equal
//! elements must share their root permutation and their exponent-sum vector,
//! so only candidates matching both are compared for real.

use std::collections::{HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;
use thiserror::Error;

use crate::families::Datum;
use crate::words::{Base, GroupWord};
use crate::wreath::{WreathError, WreathTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NucleusError {
    #[error("closure exceeded {max_size} elements; the recursion does not appear to contract")]
    ClosureBoundExceeded { max_size: usize },
    #[error(transparent)]
    Wreath(#[from] WreathError),
}

/// Closure fallback bound when no datum is available to size the run.
pub const DEFAULT_CLOSURE_BOUND: usize = 10_000;

/// Default closure bound for a known datum: generous slack over the exact
/// nucleus count.
pub fn default_closure_bound(d: &Datum) -> usize {
    let size = nucleus_size(d).saturating_mul(4);
    usize::try_from(size).unwrap_or(usize::MAX)
}

/// Exact nucleus size p^(r_1) + ... + p^(r_p).
pub fn nucleus_size(d: &Datum) -> u128 {
    let p = d.p() as u128;
    d.rank_profile()
        .iter()
        .map(|&r| p.pow(r as u32))
        .sum()
}

type Signature = (Vec<u8>, Vec<(Base, u32)>);

/// Deduplicated element set keyed by canonical representatives.
struct ElementSet<'t> {
    table: &'t WreathTable,
    reps: Vec<GroupWord>,
    by_sig: HashMap<Signature, Vec<usize>>,
    by_word: HashMap<GroupWord, usize>,
}

impl<'t> ElementSet<'t> {
    fn new(table: &'t WreathTable) -> Self {
        ElementSet {
            table,
            reps: Vec::new(),
            by_sig: HashMap::new(),
            by_word: HashMap::new(),
        }
    }

    fn signature(&self, w: &GroupWord) -> Result<Signature, WreathError> {
        let root = self.table.root_perm(w)?;
        let root_images: Vec<u8> = (0..self.table.p() as u8).map(|x| root.apply(x)).collect();
        let mut sums: Vec<(Base, u32)> = Vec::new();
        for letter in w.letters() {
            match sums.iter_mut().find(|(b, _)| *b == letter.base) {
                Some((_, total)) => *total = (*total + letter.exp) % self.table.p(),
                None => sums.push((letter.base, letter.exp % self.table.p())),
            }
        }
        sums.retain(|&(_, total)| total != 0);
        sums.sort_unstable();
        Ok((root_images, sums))
    }

    fn len(&self) -> usize {
        self.reps.len()
    }

    /// Index of the element equal to `w`, if present. Keeps the shortest
    /// (short-lex least) representative seen for each element.
    fn find(&mut self, w: &GroupWord) -> Result<Option<usize>, WreathError> {
        if let Some(&idx) = self.by_word.get(w) {
            return Ok(Some(idx));
        }
        let sig = self.signature(w)?;
        if let Some(bucket) = self.by_sig.get(&sig) {
            for &idx in bucket {
                if self.table.are_equal(w, &self.reps[idx])? {
                    if w.cmp_short_lex(&self.reps[idx]).is_lt() {
                        self.reps[idx] = w.clone();
                    }
                    self.by_word.insert(w.clone(), idx);
                    return Ok(Some(idx));
                }
            }
        }
        Ok(None)
    }

    /// Finds `w` or inserts it as a new element; returns (index, inserted).
    fn insert_or_find(&mut self, w: &GroupWord) -> Result<(usize, bool), WreathError> {
        if let Some(idx) = self.find(w)? {
            return Ok((idx, false));
        }
        let idx = self.reps.len();
        let sig = self.signature(w)?;
        self.reps.push(w.clone());
        self.by_sig.entry(sig).or_default().push(idx);
        self.by_word.insert(w.clone(), idx);
        Ok((idx, true))
    }
}

/// Least set containing the identity, the generators and their inverses,
/// closed under depth-two sections of pairwise products; worklist iteration
/// in insertion order, so output ordering is reproducible. Errors out when
/// the set would exceed `max_size`, which signals a non-contracting
/// recursion.
pub fn self_similar_closure(
    table: &WreathTable,
    max_size: usize,
) -> Result<Vec<GroupWord>, NucleusError> {
    let p = table.p();
    let mut set = ElementSet::new(table);
    let mut pair_queue: VecDeque<(usize, usize)> = VecDeque::new();

    let mut seeds = vec![GroupWord::identity(p)];
    for base in table.generators() {
        seeds.push(GroupWord::letter(p, base, 1));
        seeds.push(GroupWord::letter(p, base, -1));
    }
    for seed in &seeds {
        let (idx, inserted) = set.insert_or_find(seed)?;
        if inserted {
            if set.len() > max_size {
                return Err(NucleusError::ClosureBoundExceeded { max_size });
            }
            enqueue_pairs(&mut pair_queue, idx);
        }
    }

    while let Some((i, j)) = pair_queue.pop_front() {
        let product = set.reps[i].multiply(&set.reps[j]);
        for x in 0..p as u8 {
            for y in 0..p as u8 {
                let section = table.section_at(&product, &[x, y])?;
                let (idx, inserted) = set.insert_or_find(&section)?;
                if inserted {
                    if set.len() > max_size {
                        return Err(NucleusError::ClosureBoundExceeded { max_size });
                    }
                    enqueue_pairs(&mut pair_queue, idx);
                }
            }
        }
    }
    Ok(set.reps)
}

fn enqueue_pairs(queue: &mut VecDeque<(usize, usize)>, idx: usize) {
    for other in 0..=idx {
        queue.push_back((other, idx));
        if other != idx {
            queue.push_back((idx, other));
        }
    }
}

/// A nucleus: canonical representatives sorted short-lex, plus the section
/// graph `element x letter -> element` realized over the set itself.
#[derive(Debug, Clone)]
pub struct Nucleus {
    p: u32,
    elements: Vec<GroupWord>,
    section_graph: Vec<Vec<usize>>,
}

impl Nucleus {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn elements(&self) -> &[GroupWord] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Edges of the section graph: `section_graph()[n][x]` is the index of
    /// `elements()[n]|_x`.
    pub fn section_graph(&self) -> &[Vec<usize>] {
        &self.section_graph
    }

    pub fn contains(&self, table: &WreathTable, w: &GroupWord) -> Result<bool, WreathError> {
        for element in &self.elements {
            if table.are_equal(w, element)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Section graph in DOT format, nodes labeled by canonical words and
    /// edges by first-level letters.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph nucleus {\n");
        for (idx, element) in self.elements.iter().enumerate() {
            out.push_str(&format!("  n{idx} [label=\"{element}\"];\n"));
        }
        for (idx, targets) in self.section_graph.iter().enumerate() {
            for (x, &target) in targets.iter().enumerate() {
                out.push_str(&format!("  n{idx} -> n{target} [label=\"{x}\"];\n"));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Restricts a self-similar set to the elements reachable from directed
/// cycles of its section graph. The input is first saturated under
/// first-level sections so that every edge has a target in the set.
pub fn minimal_nucleus(
    table: &WreathTable,
    seed_elements: &[GroupWord],
) -> Result<Nucleus, NucleusError> {
    let p = table.p();
    let mut set = ElementSet::new(table);
    let mut worklist: VecDeque<usize> = VecDeque::new();
    for element in seed_elements {
        let (idx, inserted) = set.insert_or_find(element)?;
        if inserted {
            worklist.push_back(idx);
        }
    }
    let mut edges: Vec<Vec<usize>> = Vec::new();
    while let Some(idx) = worklist.pop_front() {
        let mut targets = Vec::with_capacity(p as usize);
        for x in 0..p as u8 {
            let section = table.section(&set.reps[idx].clone(), x)?;
            let (target, inserted) = set.insert_or_find(&section)?;
            if inserted {
                worklist.push_back(target);
            }
            targets.push(target);
        }
        if idx >= edges.len() {
            edges.resize(idx + 1, Vec::new());
        }
        edges[idx] = targets;
    }
    edges.resize(set.len(), Vec::new());

    let mut graph: DiGraph<(), ()> = DiGraph::new();
    let nodes: Vec<NodeIndex> = (0..set.len()).map(|_| graph.add_node(())).collect();
    for (idx, targets) in edges.iter().enumerate() {
        for &target in targets {
            graph.add_edge(nodes[idx], nodes[target], ());
        }
    }

    // Cycle seeds: nontrivial strongly connected components and self-loops.
    let mut cyclic = vec![false; set.len()];
    for component in tarjan_scc(&graph) {
        if component.len() > 1 {
            for node in component {
                cyclic[node.index()] = true;
            }
        } else {
            let idx = component[0].index();
            if edges[idx].contains(&idx) {
                cyclic[idx] = true;
            }
        }
    }

    let mut keep = cyclic.clone();
    let mut frontier: VecDeque<usize> =
        (0..set.len()).filter(|&idx| cyclic[idx]).collect();
    while let Some(idx) = frontier.pop_front() {
        for &target in &edges[idx] {
            if !keep[target] {
                keep[target] = true;
                frontier.push_back(target);
            }
        }
    }

    let mut kept: Vec<usize> = (0..set.len()).filter(|&idx| keep[idx]).collect();
    kept.sort_by(|&x, &y| set.reps[x].cmp_short_lex(&set.reps[y]));
    let reindex: HashMap<usize, usize> = kept
        .iter()
        .enumerate()
        .map(|(new, &old)| (old, new))
        .collect();

    let elements: Vec<GroupWord> = kept.iter().map(|&idx| set.reps[idx].clone()).collect();
    let section_graph: Vec<Vec<usize>> = kept
        .iter()
        .map(|&old| {
            edges[old]
                .iter()
                .map(|target| {
                    *reindex
                        .get(target)
                        .expect("sections of cycle-reachable elements are cycle-reachable")
                })
                .collect()
        })
        .collect();

    Ok(Nucleus {
        p,
        elements,
        section_graph,
    })
}

/// Closure followed by cycle restriction.
pub fn compute_nucleus(table: &WreathTable, max_size: usize) -> Result<Nucleus, NucleusError> {
    let closure = self_similar_closure(table, max_size)?;
    minimal_nucleus(table, &closure)
}

/// Explicit enumeration of all powers of `a` together with every product
/// `b[l,1]^(t_1) ... b[l,r_l]^(t_r_l)` within each spine, sorted short-lex.
pub fn theoretical_nucleus(d: &Datum) -> Vec<GroupWord> {
    let p = d.p();
    let mut out = vec![GroupWord::identity(p)];
    for k in 1..p {
        out.push(GroupWord::letter(p, Base::A, k as i64));
    }
    for (l_idx, vectors) in d.collections().iter().enumerate() {
        let l = l_idx as u32 + 1;
        let r = vectors.len() as u32;
        if r == 0 {
            continue;
        }
        let mut exponents = vec![0u32; r as usize];
        loop {
            // advance the odometer
            let mut pos = 0;
            loop {
                if pos == r as usize {
                    break;
                }
                exponents[pos] += 1;
                if exponents[pos] < p {
                    break;
                }
                exponents[pos] = 0;
                pos += 1;
            }
            if pos == r as usize {
                break;
            }
            let word = GroupWord::from_letters(
                p,
                exponents.iter().enumerate().filter_map(|(i_idx, &t)| {
                    (t != 0).then_some((
                        Base::B {
                            l,
                            i: i_idx as u32 + 1,
                        },
                        t as i64,
                    ))
                }),
            );
            out.push(word);
        }
    }
    out.sort_by(|x, y| x.cmp_short_lex(y));
    out
}

/// True iff every depth-k section of every pairwise product of `elements`
/// is again a member of `elements` (membership by element equality).
pub fn verify_quasinucleus(
    table: &WreathTable,
    elements: &[GroupWord],
    k: u32,
) -> Result<bool, NucleusError> {
    assert!(k >= 1, "quasinucleus depth must be at least 1");
    let p = table.p();
    let mut set = ElementSet::new(table);
    for element in elements {
        set.insert_or_find(element)?;
    }
    let members: Vec<GroupWord> = set.reps.clone();

    let mut paths: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..k {
        paths = paths
            .into_iter()
            .flat_map(|path| {
                (0..p as u8).map(move |x| {
                    let mut next = path.clone();
                    next.push(x);
                    next
                })
            })
            .collect();
    }

    for n1 in &members {
        for n2 in &members {
            let product = n1.multiply(n2);
            for path in &paths {
                let section = table.section_at(&product, path)?;
                if set.find(&section)?.is_none() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Serialize)]
pub struct QuasinucleusReport {
    pub depth: u32,
    pub holds: bool,
}
