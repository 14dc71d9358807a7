//! Words in the generators of a spinal recursion.
//!
//! A [`GroupWord`] is a reduced sequence of generator powers: adjacent
//! letters never share a base and no exponent is divisible by p. The empty
//! word is the identity. Reduction is purely syntactic (free reduction over
//! the letter alphabet plus exponent arithmetic mod p); deciding whether two
//! words represent the same tree automorphism is the job of
//! `WreathTable::are_equal`.

use std::cmp::Ordering;
use std::fmt;

/// Identifies a generator: the rooted generator `a` or a spinal generator
/// `b[l,i]` with `1 <= l <= p` and `1 <= i <= r_l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    A,
    B { l: u32, i: u32 },
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::A => write!(f, "a"),
            Base::B { l, i } => write!(f, "b[{l},{i}]"),
        }
    }
}

/// One maximal run `base^exp` with `exp` in `1..p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub base: Base,
    pub exp: u32,
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 1 {
            write!(f, "{}", self.base)
        } else {
            write!(f, "{}^{}", self.base, self.exp)
        }
    }
}

/// A reduced word over the generator alphabet of a fixed recursion.
///
/// Equality and hashing are representation-level only; two distinct reduced
/// words may still act identically on the tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupWord {
    p: u32,
    letters: Vec<Letter>,
}

impl GroupWord {
    /// The identity element of the group over the given odd prime.
    pub fn identity(p: u32) -> Self {
        GroupWord {
            p,
            letters: Vec::new(),
        }
    }

    /// Single-letter word `base^exp`; exponents are reduced mod p and a zero
    /// exponent yields the identity.
    pub fn letter(p: u32, base: Base, exp: i64) -> Self {
        Self::from_letters(p, [(base, exp)])
    }

    /// Builds and reduces a word from `(base, exponent)` pairs.
    pub fn from_letters<I>(p: u32, letters: I) -> Self
    where
        I: IntoIterator<Item = (Base, i64)>,
    {
        let mut word = GroupWord::identity(p);
        for (base, exp) in letters {
            word.push(base, exp);
        }
        word
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Number of maximal generator runs.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Representation-level identity test (empty reduced word).
    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    fn reduce_exp(&self, exp: i64) -> u32 {
        let p = self.p as i64;
        (((exp % p) + p) % p) as u32
    }

    /// Appends `base^exp`, merging with the tail run when bases match.
    /// Cancellation cascades across pushes: `a b b^2 a` over p=3 collapses
    /// to `a^2` because the vanished b-run exposes the leading a-run.
    pub fn push(&mut self, base: Base, exp: i64) {
        let mut exp = self.reduce_exp(exp);
        if exp == 0 {
            return;
        }
        if let Some(last) = self.letters.last() {
            if last.base == base {
                exp = self.reduce_exp(last.exp as i64 + exp as i64);
                self.letters.pop();
                if exp == 0 {
                    return;
                }
            }
        }
        self.letters.push(Letter { base, exp });
    }

    /// Concatenation followed by reduction. Both operands must live over the
    /// same prime.
    pub fn multiply(&self, other: &GroupWord) -> GroupWord {
        assert_eq!(
            self.p, other.p,
            "words over different primes cannot be multiplied"
        );
        let mut out = self.clone();
        for letter in &other.letters {
            out.push(letter.base, letter.exp as i64);
        }
        out
    }

    /// Reversed letters with negated exponents.
    pub fn invert(&self) -> GroupWord {
        let mut out = GroupWord::identity(self.p);
        for letter in self.letters.iter().rev() {
            out.push(letter.base, -(letter.exp as i64));
        }
        out
    }

    /// `self` multiplied by itself `k` times (`pow(0)` is the identity).
    pub fn pow(&self, k: u32) -> GroupWord {
        let mut out = GroupWord::identity(self.p);
        for _ in 0..k {
            out = out.multiply(self);
        }
        out
    }

    /// Conjugate `other^-1 * self * other`.
    pub fn conjugate_by(&self, other: &GroupWord) -> GroupWord {
        other.invert().multiply(self).multiply(other)
    }

    /// Short-lex comparison used for canonical representatives and sorted
    /// output: shorter words first, ties broken letter-by-letter via the
    /// derived ordering on [`Letter`].
    pub fn cmp_short_lex(&self, other: &GroupWord) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (idx, letter) in self.letters.iter().enumerate() {
            if idx > 0 {
                write!(f, " ")?;
            }
            write!(f, "{letter}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(l: u32, i: u32) -> Base {
        Base::B { l, i }
    }

    #[test]
    fn reduction_examples() {
        // a * a^2 = a^3 = 1 over p=3
        let w = GroupWord::from_letters(3, [(Base::A, 1), (Base::A, 2)]);
        assert!(w.is_identity());

        let w = GroupWord::from_letters(3, [(b(3, 1), 1), (b(3, 1), 1)]);
        assert_eq!(w.letters(), &[Letter { base: b(3, 1), exp: 2 }]);

        assert!(GroupWord::identity(3).is_identity());
    }

    #[test]
    fn cascading_cancellation() {
        // a b b^2 a over p=3: the b-run vanishes, then the two a-runs meet.
        let w = GroupWord::from_letters(
            3,
            [(Base::A, 1), (b(3, 1), 1), (b(3, 1), 2), (Base::A, 1)],
        );
        assert_eq!(w.to_string(), "a^2");
    }

    #[test]
    fn invert_examples() {
        let a = GroupWord::letter(3, Base::A, 1);
        assert_eq!(a.invert().to_string(), "a^2");

        let w = GroupWord::from_letters(3, [(Base::A, 1), (b(3, 1), 1)]);
        assert_eq!(w.invert().to_string(), "b[3,1]^2 a^2");

        assert!(GroupWord::identity(3).invert().is_identity());
    }

    #[test]
    fn multiply_examples() {
        let a = GroupWord::letter(3, Base::A, 1);
        let a2 = GroupWord::letter(3, Base::A, 2);
        assert!(a.multiply(&a2).is_identity());

        let bb = GroupWord::letter(3, b(3, 1), 1);
        let cc = GroupWord::letter(3, b(1, 1), 1);
        assert_eq!(bb.multiply(&cc).len(), 2);

        let ab = GroupWord::from_letters(3, [(Base::A, 1), (b(3, 1), 1)]);
        let b2 = GroupWord::letter(3, b(3, 1), 2);
        assert_eq!(ab.multiply(&b2).to_string(), "a");
    }

    #[test]
    fn display_and_ordering() {
        let w = GroupWord::from_letters(3, [(Base::A, 2), (b(3, 1), 1)]);
        assert_eq!(w.to_string(), "a^2 b[3,1]");
        assert_eq!(GroupWord::identity(3).to_string(), "1");

        let a = GroupWord::letter(3, Base::A, 1);
        let c = GroupWord::letter(3, b(1, 1), 1);
        assert_eq!(a.cmp_short_lex(&c), Ordering::Less);
        assert_eq!(GroupWord::identity(3).cmp_short_lex(&a), Ordering::Less);
    }

    fn arb_letters() -> impl Strategy<Value = Vec<(Base, i64)>> {
        let base = prop_oneof![
            Just(Base::A),
            (1u32..=3, 1u32..=2).prop_map(|(l, i)| Base::B { l, i }),
        ];
        proptest::collection::vec((base, -6i64..7), 0..12)
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent(letters in arb_letters()) {
            let w = GroupWord::from_letters(3, letters);
            let again = GroupWord::from_letters(
                3,
                w.letters().iter().map(|l| (l.base, l.exp as i64)),
            );
            prop_assert_eq!(&w, &again);
            for window in w.letters().windows(2) {
                prop_assert_ne!(window[0].base, window[1].base);
            }
            for letter in w.letters() {
                prop_assert!(letter.exp >= 1 && letter.exp < 3);
            }
        }

        #[test]
        fn invert_is_involutive(letters in arb_letters()) {
            let w = GroupWord::from_letters(3, letters);
            prop_assert_eq!(w.invert().invert(), w);
        }

        #[test]
        fn concat_reduce_is_associative(
            xs in arb_letters(), ys in arb_letters(), zs in arb_letters()
        ) {
            let (x, y, z) = (
                GroupWord::from_letters(3, xs),
                GroupWord::from_letters(3, ys),
                GroupWord::from_letters(3, zs),
            );
            prop_assert_eq!(
                x.multiply(&y).multiply(&z),
                x.multiply(&y.multiply(&z))
            );
        }

        #[test]
        fn inverse_cancels_syntactically(letters in arb_letters()) {
            let w = GroupWord::from_letters(3, letters);
            prop_assert!(w.multiply(&w.invert()).is_identity());
            prop_assert!(w.invert().multiply(&w).is_identity());
        }
    }
}
