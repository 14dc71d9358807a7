//! Exact computation for spinal self-similar groups acting on p-ary rooted
//! trees.
//!
//! A group in this family is defined by an odd prime p and p collections of
//! linearly independent vectors over Z/pZ ([`families::Datum`]). The crate
//! provides:
//!
//! * the wreath-recursion calculus: sections, vertex actions, a decision
//!   procedure for the word problem, element equality, orders, and nucleus
//!   portraits ([`wreath`]);
//! * contracting nuclei by closure enumeration and cycle extraction, with
//!   the closed-form size and enumeration to compare against ([`nucleus`]);
//! * certification of lifting endomorphisms: witness search, construction
//!   of `sigma`, and randomized verification that it is a right inverse of
//!   the projection at vertex 0 ([`families`]);
//! * the induced action of the ascending extension on the unrooted
//!   (p+1)-regular tree with a distinguished end ([`hnn`]);
//! * text interfaces: a word grammar, JSON datum files, and an exportable
//!   recursion format ([`io`]).
//!
//! All values are immutable and safe to share across threads; the heavier
//! decision procedures take explicit bounds so misuse fails fast instead of
//! diverging.

pub mod families;
pub mod fp;
pub mod hnn;
pub mod io;
pub mod nucleus;
pub mod selftest;
pub mod words;
pub mod wreath;

pub use families::{
    build_sigma, find_lifting_witness, verify_lifting, Datum, Endomorphism, LiftReport,
    LiftWitness,
};
pub use nucleus::{
    compute_nucleus, minimal_nucleus, nucleus_size, self_similar_closure, theoretical_nucleus,
    verify_quasinucleus, Nucleus,
};
pub use words::{Base, GroupWord, Letter};
pub use wreath::{Perm, Portrait, WreathTable};
