//! Constructive EFX allocators.
//!
//! * [`allocate_trivial`]: singletons, for `m ≤ n`.
//! * [`allocate_thm_n1`]: sequential greedy picks when all but one agent are
//!   size monotonic on the relevant range.
//! * [`allocate_thm_n2`]: iterative repair anchored on agent 1 when all but two
//!   agents are size monotonic.
//!
//! Every allocator works on the strictified profile, compares bundles only
//! through [`Valuation::compare`], and certifies its output with
//! [`check_efx`](crate::predicates::check_efx) before returning. A failed
//! certification surfaces as [`Error::ProofMismatch`].

mod thm_n1;
mod thm_n2;

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

pub use thm_n1::allocate_thm_n1;
pub use thm_n2::{allocate_thm_n2, InitialStep, IterStep, IterTrace, RepairCase, StepOutcome};

use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, Profile, Valuation};
use crate::oracle::{brute_force_first, DEFAULT_BUDGET};
use crate::predicates::{check_efx, classify_profile, Pattern, PatternFamily, RoleAssignment};
use crate::strictify::strictify_profile;

/// Unique best bundle of `size` goods from `pool`: the maximum under
/// [`Valuation::compare`], equal comparisons going to the larger mask (which is
/// the strictified order's choice). Additive-backed valuations take the top
/// `size` goods by `(weight, index)`.
pub fn best_bundle(v: &Valuation, pool: Bundle, size: usize) -> Result<Bundle> {
    if size > pool.len() {
        return Err(Error::Infeasible(format!(
            "no {size}-good bundle inside {pool}"
        )));
    }
    if let Some(weights) = v.additive_weights() {
        let mut goods: Vec<usize> = pool.goods().collect();
        goods.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(b.cmp(&a)));
        return Ok(Bundle::from_goods(goods.into_iter().take(size)));
    }
    Ok(pool
        .subsets_of_size(size)
        .reduce(|best, s| {
            if v.compare(s, best) == Ordering::Less {
                best
            } else {
                s
            }
        })
        .expect("size ≤ |pool| leaves at least one subset"))
}

/// Hands out `pool` position by position. Position `p` is agent `order[p]`; pickers
/// take their best bundle of `sizes[p]` goods from what is left, the others take
/// the minimum-mask subset of that size.
pub fn greedy_fill(
    profile: &Profile,
    order: &[usize],
    sizes: &[usize],
    pool: Bundle,
    pickers: &[bool],
) -> Result<Vec<Bundle>> {
    if order.len() != sizes.len() || order.len() != pickers.len() {
        return Err(Error::Internal(format!(
            "greedy fill got {} agents, {} sizes, {} picker flags",
            order.len(),
            sizes.len(),
            pickers.len()
        )));
    }
    let total: usize = sizes.iter().sum();
    if total != pool.len() {
        return Err(Error::Internal(format!(
            "bundle sizes {sizes:?} sum to {total}, pool {pool} has {} goods",
            pool.len()
        )));
    }
    let mut rest = pool;
    let mut out = Vec::with_capacity(order.len());
    for ((&agent, &size), &picks) in order.iter().zip(sizes).zip(pickers) {
        let b = if picks {
            best_bundle(profile.valuation(agent), rest, size)?
        } else {
            rest.lowest(size).expect("sizes sum to the pool size")
        };
        rest = rest.difference(b);
        out.push(b);
    }
    Ok(out)
}

/// Agent `i < m` receives good `i`; the rest receive nothing.
pub fn allocate_trivial(profile: &Profile) -> Result<Allocation> {
    let (n, m) = (profile.n(), profile.m());
    if m > n {
        return Err(Error::Precondition(format!(
            "singleton allocation needs m ≤ n, got m = {m}, n = {n}"
        )));
    }
    let bundles = (0..n)
        .map(|i| {
            if i < m {
                Bundle::singleton(i)
            } else {
                Bundle::EMPTY
            }
        })
        .collect();
    Allocation::new(bundles, m)
}

/// Checks an allocator's output under both the strictified and the original
/// profile.
pub(crate) fn certify(profile: &Profile, alloc: &Allocation, step: &str) -> Result<()> {
    let strict = strictify_profile(profile);
    for (label, p) in [("strictified", &strict), ("original", profile)] {
        let report = check_efx(p, alloc)?;
        if let Some(v) = report.violations.first() {
            return Err(Error::mismatch(
                step,
                format!(
                    "{} violation(s) under the {label} profile, first: agent {} envies agent {} without good {}",
                    report.violations.len(),
                    v.envier,
                    v.envied,
                    v.good
                ),
            ));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    Trivial,
    ThmN1(Pattern),
    ThmN2(Pattern),
    BruteForce,
    /// Exhaustive search found no EFX allocation.
    NoneFound,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Trivial => "trivial",
            Method::ThmN1(_) => "thm-n1",
            Method::ThmN2(_) => "thm-n2",
            Method::BruteForce => "brute-force",
            Method::NoneFound => "none",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::ThmN1(p) | Method::ThmN2(p) => write!(f, "{} ({p})", self.tag()),
            _ => f.write_str(self.tag()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AutoOutcome {
    pub allocation: Option<Allocation>,
    pub method: Method,
    pub roles: Option<RoleAssignment>,
    pub trace: Option<IterTrace>,
}

/// Picks the first applicable construction: singletons for `m ≤ n`, then the
/// patterns in [`Pattern::ALL`] order, then exhaustive search within `budget`.
pub fn auto_allocate(profile: &Profile) -> Result<AutoOutcome> {
    auto_allocate_with_budget(profile, DEFAULT_BUDGET)
}

pub fn auto_allocate_with_budget(profile: &Profile, budget: u64) -> Result<AutoOutcome> {
    if profile.m() <= profile.n() {
        return Ok(AutoOutcome {
            allocation: Some(allocate_trivial(profile)?),
            method: Method::Trivial,
            roles: None,
            trace: None,
        });
    }
    let strict = strictify_profile(profile);
    for pattern in Pattern::ALL {
        let Some(roles) = classify_profile(&strict, pattern)? else {
            continue;
        };
        let (allocation, method, trace) = match pattern.family() {
            PatternFamily::OneFree => (
                allocate_thm_n1(profile, &roles)?,
                Method::ThmN1(pattern),
                None,
            ),
            PatternFamily::TwoFree => {
                let (a, t) = allocate_thm_n2(profile, &roles)?;
                (a, Method::ThmN2(pattern), Some(t))
            }
        };
        return Ok(AutoOutcome {
            allocation: Some(allocation),
            method,
            roles: Some(roles),
            trace,
        });
    }
    let found = brute_force_first(profile, budget)?;
    Ok(AutoOutcome {
        method: if found.is_some() {
            Method::BruteForce
        } else {
            Method::NoneFound
        },
        allocation: found,
        roles: None,
        trace: None,
    })
}
