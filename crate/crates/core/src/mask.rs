//! Fixed-width bit-mask subsets of a group's element indices.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::Elem;

const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

/// A subset of `0..n`, stored as little-endian 64-bit words.
///
/// Bits at positions `>= n` are always clear. Masks compare by their value as
/// an unsigned integer (bit `i` has weight `2^i`), which is the enumeration
/// order used by exhaustive verification.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SubsetMask {
    words: Vec<u64>,
    order: usize,
}

impl SubsetMask {
    pub fn empty(order: usize) -> Self {
        SubsetMask {
            words: vec![0; words_for(order)],
            order,
        }
    }

    pub fn full(order: usize) -> Self {
        let mut m = Self::empty(order);
        for w in m.words.iter_mut() {
            *w = u64::MAX;
        }
        m.clear_tail();
        m
    }

    /// Builds a mask from element indices. Panics if an index is out of range.
    pub fn from_elements<I>(order: usize, elems: I) -> Self
    where
        I: IntoIterator<Item = Elem>,
    {
        let mut m = Self::empty(order);
        for e in elems {
            m.insert(e);
        }
        m
    }

    /// Like [`SubsetMask::from_elements`] but reports the first out-of-range index.
    pub fn try_from_elements<I>(order: usize, elems: I) -> Result<Self, Elem>
    where
        I: IntoIterator<Item = Elem>,
    {
        let mut m = Self::empty(order);
        for e in elems {
            if e as usize >= order {
                return Err(e);
            }
            m.insert(e);
        }
        Ok(m)
    }

    /// Mask for `order <= 64` from a raw integer value; high bits are dropped.
    pub fn from_u64(order: usize, bits: u64) -> Self {
        assert!(order <= WORD_BITS, "from_u64 needs order <= 64");
        let mut m = Self::empty(order);
        if order > 0 {
            m.words[0] = bits;
            m.clear_tail();
        }
        m
    }

    pub(crate) fn from_words(order: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(order));
        let mut m = SubsetMask { words, order };
        m.clear_tail();
        m
    }

    /// The value of the mask as an integer, when it fits in one word.
    pub fn as_u64(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    fn clear_tail(&mut self) {
        let rem = self.order % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Number of group elements this mask ranges over.
    pub fn group_order(&self) -> usize {
        self.order
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    #[inline]
    pub fn contains(&self, e: Elem) -> bool {
        let e = e as usize;
        e < self.order && self.words[e / WORD_BITS] >> (e % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, e: Elem) {
        let e = e as usize;
        assert!(e < self.order, "element {e} outside group of order {}", self.order);
        self.words[e / WORD_BITS] |= 1 << (e % WORD_BITS);
    }

    #[inline]
    pub fn remove(&mut self, e: Elem) {
        let e = e as usize;
        if e < self.order {
            self.words[e / WORD_BITS] &= !(1 << (e % WORD_BITS));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn union_with(&mut self, other: &SubsetMask) {
        self.check_same(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &SubsetMask) {
        self.check_same(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union(&self, other: &SubsetMask) -> SubsetMask {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersection(&self, other: &SubsetMask) -> SubsetMask {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn is_subset_of(&self, other: &SubsetMask) -> bool {
        self.check_same(other);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &SubsetMask) -> bool {
        self.check_same(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    fn check_same(&self, other: &SubsetMask) {
        assert_eq!(
            self.order, other.order,
            "masks over groups of different order"
        );
    }

    /// Element indices in ascending order.
    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            idx: 0,
            cur: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<Elem> {
        self.iter().collect()
    }

    /// Smallest element, if any.
    pub fn first(&self) -> Option<Elem> {
        self.iter().next()
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Iter<'_> {
    type Item = Elem;

    #[inline]
    fn next(&mut self) -> Option<Elem> {
        loop {
            if self.cur != 0 {
                let tz = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some((self.idx * WORD_BITS + tz) as Elem);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

impl<'a> IntoIterator for &'a SubsetMask {
    type Item = Elem;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl Ord for SubsetMask {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order
            .cmp(&other.order)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for SubsetMask {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Masks serialize as sorted element-index arrays.
impl Serialize for SubsetMask {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}
