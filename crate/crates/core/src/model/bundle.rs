use std::fmt;

use serde::Serialize;

/// Largest number of goods a bundle mask can address.
pub const MAX_GOODS: usize = 63;

/// A set of goods, stored as a characteristic bitmask: bit `g` is set iff good `g`
/// belongs to the bundle.
///
/// Masks compare numerically, so a proper subset always has a strictly smaller
/// mask than its superset.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(into = "Vec<usize>")]
pub struct Bundle(u64);

impl Bundle {
    pub const EMPTY: Bundle = Bundle(0);

    pub const fn from_mask(mask: u64) -> Self {
        Bundle(mask)
    }

    /// Bundle of all goods `0..m`.
    pub fn full(m: usize) -> Self {
        debug_assert!(m <= MAX_GOODS);
        Bundle((1u64 << m) - 1)
    }

    pub fn singleton(good: usize) -> Self {
        debug_assert!(good < MAX_GOODS);
        Bundle(1u64 << good)
    }

    pub fn from_goods<I: IntoIterator<Item = usize>>(goods: I) -> Self {
        goods.into_iter().fold(Bundle::EMPTY, |b, g| b.with(g))
    }

    pub const fn mask(self) -> u64 {
        self.0
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn contains(self, good: usize) -> bool {
        good < 64 && self.0 & (1u64 << good) != 0
    }

    pub const fn with(self, good: usize) -> Self {
        Bundle(self.0 | (1u64 << good))
    }

    pub const fn without(self, good: usize) -> Self {
        Bundle(self.0 & !(1u64 << good))
    }

    pub const fn union(self, other: Bundle) -> Self {
        Bundle(self.0 | other.0)
    }

    pub const fn intersection(self, other: Bundle) -> Self {
        Bundle(self.0 & other.0)
    }

    pub const fn difference(self, other: Bundle) -> Self {
        Bundle(self.0 & !other.0)
    }

    pub const fn is_subset_of(self, other: Bundle) -> bool {
        self.0 & !other.0 == 0
    }

    pub const fn is_disjoint(self, other: Bundle) -> bool {
        self.0 & other.0 == 0
    }

    /// True when every member is below `m`.
    pub const fn fits(self, m: usize) -> bool {
        m >= 64 || self.0 >> m == 0
    }

    /// Members in ascending order.
    pub fn goods(self) -> Goods {
        Goods(self.0)
    }

    /// The `size` smallest members, i.e. the minimum-mask subset of that size.
    /// Returns `None` when the bundle has fewer than `size` members.
    pub fn lowest(self, size: usize) -> Option<Bundle> {
        if size > self.len() {
            return None;
        }
        Some(Bundle::from_goods(self.goods().take(size)))
    }

    /// All subsets of `self` with exactly `size` members, in ascending mask order.
    pub fn subsets_of_size(self, size: usize) -> SubsetsOfSize {
        SubsetsOfSize::new(self, size)
    }

    /// All subsets of `self` (including `∅` and `self`), in ascending mask order.
    pub fn subsets(self) -> Subsets {
        Subsets {
            pool: self.0,
            next: Some(0),
        }
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.goods()).finish()
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, g) in self.goods().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<usize> for Bundle {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Bundle::from_goods(iter)
    }
}

/// Iterator over the members of a bundle.
#[derive(Clone)]
pub struct Goods(u64);

impl Iterator for Goods {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let g = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(g)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Goods {}

/// Sub-mask enumeration over a pool.
pub struct Subsets {
    pool: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = Bundle;

    fn next(&mut self) -> Option<Bundle> {
        let cur = self.next?;
        self.next = if cur == self.pool {
            None
        } else {
            // next sub-mask in increasing order
            Some((cur | !self.pool).wrapping_add(1) & self.pool)
        };
        Some(Bundle(cur))
    }
}

/// Fixed-size subsets of a pool, driven by a Gosper step over the pool's rank space.
pub struct SubsetsOfSize {
    members: Vec<u64>,
    /// Current combination over member ranks, or `None` when exhausted.
    cursor: Option<u64>,
    limit: u64,
}

impl SubsetsOfSize {
    fn new(pool: Bundle, size: usize) -> Self {
        let members: Vec<u64> = pool.goods().map(|g| 1u64 << g).collect();
        let k = members.len();
        let cursor = if size > k {
            None
        } else if size == 0 {
            Some(0)
        } else {
            Some((1u64 << size) - 1)
        };
        SubsetsOfSize {
            members,
            cursor,
            limit: if k >= 64 { u64::MAX } else { 1u64 << k },
        }
    }

    fn expand(&self, ranks: u64) -> Bundle {
        let mut mask = 0;
        let mut r = ranks;
        while r != 0 {
            let i = r.trailing_zeros() as usize;
            mask |= self.members[i];
            r &= r - 1;
        }
        Bundle(mask)
    }
}

impl Iterator for SubsetsOfSize {
    type Item = Bundle;

    fn next(&mut self) -> Option<Bundle> {
        let cur = self.cursor?;
        let out = self.expand(cur);
        self.cursor = if cur == 0 {
            None
        } else {
            let lowest = cur & cur.wrapping_neg();
            let ripple = cur.wrapping_add(lowest);
            if ripple == 0 || ripple >= self.limit {
                None
            } else {
                Some((((ripple ^ cur) >> 2) / lowest) | ripple)
            }
        };
        Some(out)
    }
}

/// Binomial coefficient, saturating at `u64::MAX`.
impl From<Bundle> for Vec<usize> {
    fn from(b: Bundle) -> Self {
        b.goods().collect()
    }
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_size_subsets_match_filtered_enumeration() {
        let pool = Bundle::from_goods([0, 2, 3, 5, 6]);
        for size in 0..=6 {
            let fast: Vec<_> = pool.subsets_of_size(size).collect();
            let slow: Vec<_> = pool.subsets().filter(|s| s.len() == size).collect();
            assert_eq!(fast, slow, "size {size}");
            assert_eq!(fast.len() as u64, binomial(5, size));
        }
    }

    #[test]
    fn subsets_cover_pool() {
        let pool = Bundle::from_goods([1, 4, 7]);
        let all: Vec<_> = pool.subsets().collect();
        assert_eq!(all.len(), 8);
        assert_eq!(all.first(), Some(&Bundle::EMPTY));
        assert_eq!(all.last(), Some(&pool));
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn empty_pool() {
        assert_eq!(Bundle::EMPTY.subsets_of_size(0).count(), 1);
        assert_eq!(Bundle::EMPTY.subsets_of_size(1).count(), 0);
        assert_eq!(Bundle::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn lowest_is_minimum_mask() {
        let pool = Bundle::from_goods([1, 3, 4, 6]);
        assert_eq!(pool.lowest(2), Some(Bundle::from_goods([1, 3])));
        assert_eq!(pool.lowest(0), Some(Bundle::EMPTY));
        assert_eq!(pool.lowest(5), None);
        let min = pool.subsets_of_size(3).min().unwrap();
        assert_eq!(pool.lowest(3), Some(min));
    }

    #[test]
    fn display_lists_goods() {
        assert_eq!(Bundle::from_goods([2, 0]).to_string(), "{0,2}");
        assert_eq!(Bundle::EMPTY.to_string(), "{}");
    }
}
