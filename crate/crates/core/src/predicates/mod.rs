//! Decision procedures for the fairness and valuation-class properties: the EFX
//! relation and report, ⟨k,l⟩ set/size monotonicity, strictness,
//! MMS-feasibility, and the construction-pattern classifier.

mod classify;

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, Profile, Valuation, MAX_TABLE_GOODS};

pub use classify::{
    applicable_patterns, classify_profile, quotient, Pattern, PatternFamily, Requirement,
    RoleAssignment, RoleGroup,
};

/// Brute-force MMS-feasibility is `O(3^m)`; larger instances are refused.
pub const MMS_MAX_GOODS: usize = 14;

/// `x` is envy-free from `y` up to any one good under `v`:
/// `v(x) ≥ v(y ∖ {g})` for every `g ∈ y`. Vacuously true for empty `y`.
pub fn efx_relation(v: &Valuation, x: Bundle, y: Bundle) -> bool {
    y.goods()
        .all(|g| v.compare(x, y.without(g)) != Ordering::Less)
}

/// Agent `envier` prefers the bundle of `envied` with `good` removed to its own.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub envier: usize,
    pub envied: usize,
    pub good: usize,
}

/// Every EFX violation of an allocation; empty iff the allocation is EFX.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EfxReport {
    pub violations: Vec<Violation>,
}

impl EfxReport {
    pub fn is_efx(&self) -> bool {
        self.violations.is_empty()
    }

    /// Agents that envy someone.
    pub fn enviers(&self) -> Vec<usize> {
        let mut e: Vec<usize> = self.violations.iter().map(|v| v.envier).collect();
        e.dedup();
        e
    }
}

/// Lists every `(i, j, g)` with `i ≠ j`, `g ∈ X_j` and `v_i(X_i) < v_i(X_j ∖ {g})`.
pub fn check_efx(profile: &Profile, alloc: &Allocation) -> Result<EfxReport> {
    alloc.validate_for(profile)?;
    let mut violations = Vec::new();
    for (i, v) in profile.valuations().iter().enumerate() {
        let own = alloc.bundle(i);
        for (j, &other) in alloc.bundles().iter().enumerate() {
            if i == j {
                continue;
            }
            for g in other.goods() {
                if v.compare(own, other.without(g)) == Ordering::Less {
                    violations.push(Violation {
                        envier: i,
                        envied: j,
                        good: g,
                    });
                }
            }
        }
    }
    Ok(EfxReport { violations })
}

/// Short-circuiting EFX test over raw bundles; the caller guarantees structure.
pub(crate) fn bundles_are_efx(profile: &Profile, bundles: &[Bundle]) -> bool {
    profile.valuations().iter().enumerate().all(|(i, v)| {
        bundles
            .iter()
            .enumerate()
            .all(|(j, &other)| i == j || efx_relation(v, bundles[i], other))
    })
}

/// A pair of bundles with `|smaller| < |larger|` but `v(smaller) > v(larger)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MonotonicityWitness {
    pub smaller: Bundle,
    pub larger: Bundle,
}

fn check_range(v: &Valuation, k: usize, l: usize) -> Result<()> {
    if k < 1 || k >= l || l > v.m() {
        return Err(Error::RangeOutOfBounds { k, l, m: v.m() });
    }
    Ok(())
}

fn check_enumerable(v: &Valuation) -> Result<()> {
    if v.m() > MAX_TABLE_GOODS {
        return Err(Error::Capacity {
            what: format!("exhaustive scan over {} goods", v.m()),
            limit: MAX_TABLE_GOODS as u64,
        });
    }
    Ok(())
}

/// ⟨k,l⟩-set monotonicity: `v(X) ≤ v(Y)` for all `X ⊆ Y` with `k ≤ |X| < |Y| ≤ l`.
pub fn is_set_monotonic_range(v: &Valuation, k: usize, l: usize) -> Result<bool> {
    Ok(set_monotonicity_witness(v, k, l)?.is_none())
}

/// First violating nested pair of the ⟨k,l⟩-set monotonicity condition, if any.
pub fn set_monotonicity_witness(
    v: &Valuation,
    k: usize,
    l: usize,
) -> Result<Option<MonotonicityWitness>> {
    check_range(v, k, l)?;
    check_enumerable(v)?;
    Ok(set_violation_between(v, k, l))
}

/// Set-monotonicity scan that also admits `k = 0` (the empty bundle) and treats
/// `k ≥ l` as vacuous. Chains of single-good extensions suffice since every
/// intermediate size stays inside `[k, l]`.
pub(crate) fn set_violation_between(
    v: &Valuation,
    k: usize,
    l: usize,
) -> Option<MonotonicityWitness> {
    let l = l.min(v.m());
    if k >= l {
        return None;
    }
    let full = v.full();
    for x in full.subsets() {
        let size = x.len();
        if size < k || size >= l {
            continue;
        }
        for g in full.difference(x).goods() {
            let y = x.with(g);
            if v.compare(x, y) == Ordering::Greater {
                return Some(MonotonicityWitness {
                    smaller: x,
                    larger: y,
                });
            }
        }
    }
    None
}

/// ⟨k,l⟩-size monotonicity: `v(X) ≤ v(Y)` for all `X ≠ Y` with `k ≤ |X| < |Y| ≤ l`.
pub fn is_size_monotonic_range(v: &Valuation, k: usize, l: usize) -> Result<bool> {
    Ok(size_monotonicity_witness(v, k, l)?.is_none())
}

pub fn size_monotonicity_witness(
    v: &Valuation,
    k: usize,
    l: usize,
) -> Result<Option<MonotonicityWitness>> {
    check_range(v, k, l)?;
    check_enumerable(v)?;
    Ok(size_violation_between(v, k, l))
}

/// Size monotonicity over `[k, l]` holds iff for each consecutive pair of sizes the
/// best bundle of the smaller size is no better than the worst of the next size.
/// The witness is (lowest-mask argmax of size s, lowest-mask argmin of size s+1)
/// for the first failing s.
pub(crate) fn size_violation_between(
    v: &Valuation,
    k: usize,
    l: usize,
) -> Option<MonotonicityWitness> {
    let l = l.min(v.m());
    if k >= l {
        return None;
    }
    let full = v.full();
    for s in k..l {
        let best = extreme(v, full.subsets_of_size(s), Ordering::Greater);
        let worst = extreme(v, full.subsets_of_size(s + 1), Ordering::Less);
        if let (Some(best), Some(worst)) = (best, worst) {
            if v.compare(best, worst) == Ordering::Greater {
                return Some(MonotonicityWitness {
                    smaller: best,
                    larger: worst,
                });
            }
        }
    }
    None
}

/// Maximal (`Greater`) or minimal (`Less`) bundle; earliest wins ties.
fn extreme(v: &Valuation, it: impl Iterator<Item = Bundle>, want: Ordering) -> Option<Bundle> {
    it.reduce(|acc, b| if v.compare(b, acc) == want { b } else { acc })
}

/// Maximal ⟨k,l⟩ ranges (k ≥ 1) on which `v` is size monotonic.
pub fn maximal_size_monotonic_ranges(v: &Valuation) -> Result<Vec<(usize, usize)>> {
    check_enumerable(v)?;
    let m = v.m();
    let mut ranges = Vec::new();
    let mut start: Option<usize> = None;
    for s in 1..m {
        let ok = size_violation_between(v, s, s + 1).is_none();
        match (ok, start) {
            (true, None) => start = Some(s),
            (false, Some(k)) => {
                ranges.push((k, s));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(k) = start {
        ranges.push((k, m));
    }
    Ok(ranges)
}

/// Fully set monotonic, including `v(∅) ≤ v(X)` for every `X`.
pub fn is_set_monotonic(v: &Valuation) -> Result<bool> {
    check_enumerable(v)?;
    Ok(set_violation_between(v, 0, v.m()).is_none())
}

/// All `2^m` bundles take pairwise distinct values.
pub fn is_strict(v: &Valuation) -> Result<bool> {
    if v.is_strictified() {
        return Ok(true);
    }
    check_enumerable(v)?;
    let mut all: Vec<Bundle> = v.full().subsets().collect();
    all.sort_by(|&a, &b| v.compare(a, b));
    Ok(all.windows(2).all(|w| v.compare(w[0], w[1]).is_ne()))
}

/// A subset and two 2-partitions of it with `max(low) < min(high)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MmsWitness {
    pub set: Bundle,
    pub low: (Bundle, Bundle),
    pub high: (Bundle, Bundle),
}

pub fn is_mms_feasible(v: &Valuation) -> Result<bool> {
    Ok(mms_witness(v)?.is_none())
}

/// Brute-force MMS-feasibility: for every `X` (ascending mask), the smallest
/// partition maximum is compared with the largest partition minimum.
pub fn mms_witness(v: &Valuation) -> Result<Option<MmsWitness>> {
    if v.m() > MMS_MAX_GOODS {
        return Err(Error::Capacity {
            what: format!("MMS-feasibility check over {} goods", v.m()),
            limit: MMS_MAX_GOODS as u64,
        });
    }
    let hi = |a: Bundle, b: Bundle| {
        if v.compare(a, b) == Ordering::Less {
            b
        } else {
            a
        }
    };
    let lo = |a: Bundle, b: Bundle| {
        if v.compare(a, b) == Ordering::Greater {
            b
        } else {
            a
        }
    };
    for x in v.full().subsets() {
        // (partition, its max side) minimizing the max; (partition, min side) maximizing the min
        let mut low: Option<((Bundle, Bundle), Bundle)> = None;
        let mut high: Option<((Bundle, Bundle), Bundle)> = None;
        for s in x.subsets() {
            let t = x.difference(s);
            if s > t {
                continue;
            }
            let (mx, mn) = (hi(s, t), lo(s, t));
            if low.is_none_or(|(_, b)| v.compare(mx, b) == Ordering::Less) {
                low = Some(((s, t), mx));
            }
            if high.is_none_or(|(_, b)| v.compare(mn, b) == Ordering::Greater) {
                high = Some(((s, t), mn));
            }
        }
        let (low, high) = (low.expect("∅ partition"), high.expect("∅ partition"));
        if v.compare(low.1, high.1) == Ordering::Less {
            return Ok(Some(MmsWitness {
                set: x,
                low: low.0,
                high: high.0,
            }));
        }
    }
    Ok(None)
}
