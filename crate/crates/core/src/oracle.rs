//! Exhaustive reference procedures, independent of the constructive allocators.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, Profile, Valuation};
use crate::predicates::efx_relation;

/// Default cap on the number of allocations `n^m` an exhaustive search may visit.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    First,
    All,
    Count,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchResult {
    First(Option<Allocation>),
    All(Vec<Allocation>),
    Count(u64),
}

fn allocation_count(m: usize, n: usize, budget: u64) -> Result<u64> {
    let mut total: u64 = 1;
    for _ in 0..m {
        total = total
            .checked_mul(n as u64)
            .filter(|&t| t <= budget)
            .ok_or_else(|| Error::Capacity {
                what: format!("{n}^{m} allocations"),
                limit: budget,
            })?;
    }
    Ok(total)
}

/// All `n^m` assignments of `m` goods to `n` agents, in lexicographic order of the
/// owner vector `(owner(0), …, owner(m−1))`.
pub fn enumerate_allocations(m: usize, n: usize, budget: u64) -> Result<AllocationIter> {
    if n == 0 {
        return Err(Error::Malformed("no agents".into()));
    }
    allocation_count(m, n, budget)?;
    Ok(AllocationIter {
        owner: vec![0; m],
        n,
        done: false,
    })
}

pub struct AllocationIter {
    owner: Vec<usize>,
    n: usize,
    done: bool,
}

impl Iterator for AllocationIter {
    type Item = Allocation;

    fn next(&mut self) -> Option<Allocation> {
        if self.done {
            return None;
        }
        let out = Allocation::from_assignment(&self.owner, self.n).expect("owners are in range");
        self.done = true;
        for slot in self.owner.iter_mut().rev() {
            *slot += 1;
            if *slot < self.n {
                self.done = false;
                break;
            }
            *slot = 0;
        }
        Some(out)
    }
}

fn is_efx(profile: &Profile, a: &Allocation) -> bool {
    let bundles = a.bundles();
    profile.valuations().iter().enumerate().all(|(i, v)| {
        bundles
            .iter()
            .enumerate()
            .all(|(j, &other)| i == j || efx_relation(v, bundles[i], other))
    })
}

pub fn brute_force_efx(profile: &Profile, mode: SearchMode, budget: u64) -> Result<SearchResult> {
    let mut it = enumerate_allocations(profile.m(), profile.n(), budget)?;
    Ok(match mode {
        SearchMode::First => SearchResult::First(it.find(|a| is_efx(profile, a))),
        SearchMode::All => SearchResult::All(it.filter(|a| is_efx(profile, a)).collect()),
        SearchMode::Count => SearchResult::Count(it.filter(|a| is_efx(profile, a)).count() as u64),
    })
}

/// First EFX allocation in enumeration order, if any.
pub fn brute_force_first(profile: &Profile, budget: u64) -> Result<Option<Allocation>> {
    match brute_force_efx(profile, SearchMode::First, budget)? {
        SearchResult::First(a) => Ok(a),
        _ => unreachable!(),
    }
}

pub fn brute_force_all(profile: &Profile, budget: u64) -> Result<Vec<Allocation>> {
    match brute_force_efx(profile, SearchMode::All, budget)? {
        SearchResult::All(a) => Ok(a),
        _ => unreachable!(),
    }
}

pub fn brute_force_count(profile: &Profile, budget: u64) -> Result<u64> {
    match brute_force_efx(profile, SearchMode::Count, budget)? {
        SearchResult::Count(c) => Ok(c),
        _ => unreachable!(),
    }
}

/// Best `size`-subset of `pool` by plain enumeration; ties go to the larger mask.
pub fn brute_force_best_bundle(v: &Valuation, pool: Bundle, size: usize) -> Result<Bundle> {
    let mut best: Option<Bundle> = None;
    for s in pool.subsets() {
        if s.len() != size {
            continue;
        }
        best = match best {
            None => Some(s),
            Some(b) => match v.compare(s, b) {
                Ordering::Greater => Some(s),
                Ordering::Equal if s.mask() > b.mask() => Some(s),
                _ => Some(b),
            },
        };
    }
    best.ok_or_else(|| Error::Infeasible(format!("no {size}-good bundle inside {pool}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Value;

    fn additive(ws: &[i64]) -> Valuation {
        Valuation::additive(ws.iter().map(|&w| Value::integer(w)).collect()).unwrap()
    }

    #[test]
    fn enumeration_sizes_and_order() {
        assert_eq!(enumerate_allocations(1, 2, 100).unwrap().count(), 2);
        assert_eq!(enumerate_allocations(3, 2, 100).unwrap().count(), 8);
        assert_eq!(enumerate_allocations(4, 3, 100).unwrap().count(), 81);
        assert_eq!(enumerate_allocations(0, 3, 100).unwrap().count(), 1);
        let first: Vec<_> = enumerate_allocations(2, 2, 100).unwrap().collect();
        let b = |g: &[usize]| Bundle::from_goods(g.iter().copied());
        assert_eq!(first[0].bundles(), &[b(&[0, 1]), Bundle::EMPTY]);
        assert_eq!(first[1].bundles(), &[b(&[0]), b(&[1])]);
        assert_eq!(first[2].bundles(), &[b(&[1]), b(&[0])]);
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            enumerate_allocations(4, 3, 80),
            Err(Error::Capacity { limit: 80, .. })
        ));
        assert!(enumerate_allocations(4, 3, 81).is_ok());
    }

    #[test]
    fn two_identical_agents_two_goods() {
        let v = additive(&[1, 1]);
        let p = Profile::new(vec![v.clone(), v]).unwrap();
        // only the two split allocations are EFX
        assert_eq!(brute_force_count(&p, 100).unwrap(), 2);
        let first = brute_force_first(&p, 100).unwrap().unwrap();
        assert_eq!(first.bundle(0), Bundle::singleton(0));
    }

    #[test]
    fn best_bundle_by_enumeration() {
        let v = additive(&[1, 1, 3]);
        let full = Bundle::full(3);
        assert_eq!(
            brute_force_best_bundle(&v, full, 2).unwrap(),
            Bundle::from_goods([1, 2])
        );
        assert_eq!(brute_force_best_bundle(&v, full, 0).unwrap(), Bundle::EMPTY);
        assert!(brute_force_best_bundle(&v, Bundle::singleton(0), 2).is_err());
    }
}
