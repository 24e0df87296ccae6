//! Fixed-width bitset over a lattice's arrow index.

use std::cmp::Ordering;
use std::fmt;

const WORDS: usize = 8;

/// Maximum number of non-identity arrows a lattice may have.
pub const MAX_ARROWS: usize = WORDS * 64;

/// A set of arrow indices, stored inline so that copies never allocate.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Bits([u64; WORDS]);

impl Bits {
    pub const fn empty() -> Self {
        Bits([0; WORDS])
    }

    /// The set `{0, .., len-1}`.
    pub fn full(len: usize) -> Self {
        debug_assert!(len <= MAX_ARROWS);
        let mut b = Bits::empty();
        for w in 0..WORDS {
            let lo = w * 64;
            if len >= lo + 64 {
                b.0[w] = u64::MAX;
            } else if len > lo {
                b.0[w] = (1u64 << (len - lo)) - 1;
            }
        }
        b
    }

    pub fn singleton(i: usize) -> Self {
        let mut b = Bits::empty();
        b.insert(i);
        b
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.0[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) -> bool {
        let fresh = !self.contains(i);
        self.0[i >> 6] |= 1 << (i & 63);
        fresh
    }

    #[inline]
    pub fn remove(&mut self, i: usize) -> bool {
        let present = self.contains(i);
        self.0[i >> 6] &= !(1 << (i & 63));
        present
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn union(&self, other: &Bits) -> Bits {
        let mut out = *self;
        out.union_with(other);
        out
    }

    #[inline]
    pub fn union_with(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a |= b;
        }
    }

    #[inline]
    pub fn intersection(&self, other: &Bits) -> Bits {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(other.0.iter()) {
            *a &= b;
        }
        out
    }

    #[inline]
    pub fn difference(&self, other: &Bits) -> Bits {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(other.0.iter()) {
            *a &= !b;
        }
        out
    }

    #[inline]
    pub fn symmetric_difference(&self, other: &Bits) -> Bits {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(other.0.iter()) {
            *a ^= b;
        }
        out
    }

    #[inline]
    pub fn is_subset(&self, other: &Bits) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a & !b == 0)
    }

    #[inline]
    pub fn intersects(&self, other: &Bits) -> bool {
        self.0.iter().zip(other.0.iter()).any(|(a, b)| a & b != 0)
    }

    pub fn iter(&self) -> BitsIter {
        BitsIter {
            words: self.0,
            word: 0,
        }
    }

    /// Lexicographic comparison of the ascending member lists.
    pub fn lex_cmp(&self, other: &Bits) -> Ordering {
        let mut a = self.iter();
        let mut b = other.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(x), Some(y)) if x != y => return x.cmp(&y),
                _ => {}
            }
        }
    }
}

impl FromIterator<usize> for Bits {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut b = Bits::empty();
        for i in iter {
            b.insert(i);
        }
        b
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct BitsIter {
    words: [u64; WORDS],
    word: usize,
}

impl Iterator for BitsIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        while self.word < WORDS {
            let w = self.words[self.word];
            if w != 0 {
                let bit = w.trailing_zeros() as usize;
                self.words[self.word] &= w - 1;
                return Some(self.word * 64 + bit);
            }
            self.word += 1;
        }
        None
    }
}
