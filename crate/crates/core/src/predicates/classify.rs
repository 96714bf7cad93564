//! Matching a profile against the valuation-class patterns under which the
//! constructive allocators are guaranteed to produce an EFX allocation.
//!
//! A pattern splits the agents into role groups: one or two unconstrained
//! ("free") agents that are served first, a middle group and a tail group. The
//! classifier searches for an assignment of agents to groups, trying free agents
//! in lexicographic order, and returns the first one that works.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{set_violation_between, size_violation_between};
use crate::error::{Error, Result};
use crate::model::{Profile, Valuation, MAX_TABLE_GOODS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Pattern {
    ThmN1I,
    ThmN1Ii,
    ThmN2I,
    ThmN2Ii,
    Relax1I,
    Relax1Ii,
    Relax1Iii,
    Relax2I,
    Relax2Ii,
}

/// Which allocator serves a pattern: one free agent (sequential greedy) or two
/// (iterative repair).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PatternFamily {
    OneFree,
    TwoFree,
}

impl Pattern {
    /// Dispatch order used by automatic allocation.
    pub const ALL: [Pattern; 9] = [
        Pattern::ThmN1I,
        Pattern::ThmN1Ii,
        Pattern::ThmN2I,
        Pattern::ThmN2Ii,
        Pattern::Relax1I,
        Pattern::Relax1Ii,
        Pattern::Relax1Iii,
        Pattern::Relax2I,
        Pattern::Relax2Ii,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Pattern::ThmN1I => "ThmN1-i",
            Pattern::ThmN1Ii => "ThmN1-ii",
            Pattern::ThmN2I => "ThmN2-i",
            Pattern::ThmN2Ii => "ThmN2-ii",
            Pattern::Relax1I => "Relax1-i",
            Pattern::Relax1Ii => "Relax1-ii",
            Pattern::Relax1Iii => "Relax1-iii",
            Pattern::Relax2I => "Relax2-i",
            Pattern::Relax2Ii => "Relax2-ii",
        }
    }

    pub fn family(self) -> PatternFamily {
        match self {
            Pattern::ThmN1I
            | Pattern::ThmN1Ii
            | Pattern::Relax1I
            | Pattern::Relax1Ii
            | Pattern::Relax1Iii => PatternFamily::OneFree,
            _ => PatternFamily::TwoFree,
        }
    }

    /// Patterns that assume every agent is set monotonic (including on `∅`).
    pub fn needs_monotone_profile(self) -> bool {
        matches!(
            self,
            Pattern::ThmN1I | Pattern::ThmN1Ii | Pattern::ThmN2I | Pattern::ThmN2Ii
        )
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Pattern::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Malformed(format!("unknown pattern {s:?}")))
    }
}

/// `(ℓ, r)`: quotient and remainder of `m` by `n` for one-free patterns, of
/// `m − 1` by `n − 1` for two-free patterns.
pub fn quotient(family: PatternFamily, n: usize, m: usize) -> (usize, usize) {
    match family {
        PatternFamily::OneFree => (m / n, m % n),
        PatternFamily::TwoFree => ((m - 1) / (n - 1), (m - 1) % (n - 1)),
    }
}

/// A valuation-class demand. Ranges may be degenerate: `k = 0` brings the empty
/// bundle into scope and `k ≥ l` is vacuous.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Requirement {
    SizeMonotonic {
        k: usize,
        l: usize,
    },
    SetMonotonic {
        k: usize,
        l: usize,
    },
    /// Set monotonic over all bundles, `∅` included.
    Monotone,
}

impl Requirement {
    pub fn holds(&self, v: &Valuation) -> Result<bool> {
        if v.m() > MAX_TABLE_GOODS {
            return Err(Error::Capacity {
                what: format!("class check over {} goods", v.m()),
                limit: MAX_TABLE_GOODS as u64,
            });
        }
        Ok(match *self {
            Requirement::SizeMonotonic { k, l } => size_violation_between(v, k, l).is_none(),
            Requirement::SetMonotonic { k, l } => set_violation_between(v, k, l).is_none(),
            Requirement::Monotone => set_violation_between(v, 0, v.m()).is_none(),
        })
    }
}

impl fmt::Display for Requirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Requirement::SizeMonotonic { k, l } => write!(f, "<{k},{l}>-size"),
            Requirement::SetMonotonic { k, l } => write!(f, "<{k},{l}>-set"),
            Requirement::Monotone => write!(f, "monotone"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RoleGroup {
    Free,
    Middle,
    Tail,
}

/// Result of a successful classification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoleAssignment {
    pub pattern: Pattern,
    /// `order[p]` is the agent that plays role `p`: free agents first, then the
    /// middle group, then the tail group.
    pub order: Vec<usize>,
    pub ell: usize,
    pub r: usize,
    pub groups: Vec<RoleGroup>,
    /// Class claimed for each role.
    pub claims: Vec<Vec<Requirement>>,
}

impl RoleAssignment {
    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn count(&self, group: RoleGroup) -> usize {
        self.groups.iter().filter(|&&g| g == group).count()
    }

    /// Re-checks every claimed class against `profile`.
    pub fn revalidate(&self, profile: &Profile) -> Result<()> {
        let n = profile.n();
        let mut seen = vec![false; n];
        if self.order.len() != n || self.claims.len() != n || self.groups.len() != n {
            return Err(Error::Precondition(format!(
                "role assignment for {} agents applied to {n}",
                self.order.len()
            )));
        }
        for &a in &self.order {
            if a >= n || std::mem::replace(&mut seen[a], true) {
                return Err(Error::Precondition(format!(
                    "role order {:?} is not a permutation",
                    self.order
                )));
            }
        }
        if quotient(self.pattern.family(), n, profile.m()) != (self.ell, self.r) {
            return Err(Error::Precondition(format!(
                "ℓ = {}, r = {} do not match n = {n}, m = {}",
                self.ell,
                self.r,
                profile.m()
            )));
        }
        for (p, claims) in self.claims.iter().enumerate() {
            let agent = self.order[p];
            for req in claims {
                if !req.holds(profile.valuation(agent))? {
                    return Err(Error::Precondition(format!(
                        "agent {agent} is not {req} as role {p} of {} requires",
                        self.pattern
                    )));
                }
            }
        }
        Ok(())
    }
}

struct Shape {
    ell: usize,
    r: usize,
    free: (usize, Vec<Requirement>),
    middle: (usize, Vec<Requirement>),
    tail: (usize, Vec<Requirement>),
}

fn shape(pattern: Pattern, n: usize, m: usize) -> Option<Shape> {
    use Requirement::{SetMonotonic as Set, SizeMonotonic as Size};
    let (ell, r) = quotient(pattern.family(), n, m);
    let lo = ell.saturating_sub(1);
    let (applies, free, middle, tail) = match pattern {
        Pattern::ThmN1I => (
            r <= 1,
            (1, vec![]),
            (n - 1 - r, vec![Size { k: lo, l: ell }]),
            (r, vec![Size { k: lo, l: ell }]),
        ),
        Pattern::ThmN1Ii => (
            1 < r && r < n,
            (1, vec![]),
            (n - 1 - r, vec![Size { k: lo, l: ell }]),
            (r, vec![Size { k: ell, l: ell + 1 }]),
        ),
        Pattern::ThmN2I => (
            r <= 1,
            (2, vec![]),
            (n - 2 - r.min(n - 2), vec![Size { k: 1, l: ell }]),
            (r.min(n - 2), vec![Size { k: 1, l: ell }]),
        ),
        Pattern::ThmN2Ii => (
            1 < r && r + 2 <= n,
            (2, vec![]),
            (n.saturating_sub(2 + r), vec![Size { k: 1, l: ell }]),
            (r, vec![Size { k: 1, l: ell + 1 }]),
        ),
        Pattern::Relax1I => (
            r <= 1,
            (1, vec![Set { k: lo, l: ell }]),
            (n - 1 - r, vec![Size { k: lo, l: ell }]),
            (r, vec![Size { k: lo, l: ell }, Set { k: ell, l: ell + 1 }]),
        ),
        Pattern::Relax1Ii => (
            1 < r && r + 2 <= n,
            (1, vec![Set { k: lo, l: ell }]),
            (n.saturating_sub(1 + r), vec![Size { k: lo, l: ell }]),
            (r, vec![Size { k: ell, l: ell + 1 }, Set { k: lo, l: ell }]),
        ),
        Pattern::Relax1Iii => (
            r + 1 == n,
            (1, vec![]),
            (0, vec![]),
            (
                n - 1,
                vec![Size { k: ell, l: ell + 1 }, Set { k: lo, l: ell }],
            ),
        ),
        Pattern::Relax2I => (
            r <= 1,
            (2, vec![Set { k: 1, l: ell }]),
            (n - 2 - r.min(n - 2), vec![Size { k: 1, l: ell }]),
            (
                r.min(n - 2),
                vec![Size { k: 1, l: ell }, Set { k: ell, l: ell + 1 }],
            ),
        ),
        Pattern::Relax2Ii => (
            1 < r && r + 2 <= n,
            (2, vec![Set { k: 1, l: ell }]),
            (n.saturating_sub(2 + r), vec![Size { k: 1, l: ell }]),
            (r, vec![Size { k: 1, l: ell + 1 }]),
        ),
    };
    if !applies {
        return None;
    }
    let monotone = |mut reqs: Vec<Requirement>| {
        if pattern.needs_monotone_profile() {
            reqs.insert(0, Requirement::Monotone);
        }
        reqs
    };
    Some(Shape {
        ell,
        r,
        free: (free.0, monotone(free.1)),
        middle: (middle.0, monotone(middle.1)),
        tail: (tail.0, monotone(tail.1)),
    })
}

/// Memoized class checks for one profile.
struct ClassCache<'a> {
    profile: &'a Profile,
    memo: HashMap<(usize, Requirement), bool>,
}

impl ClassCache<'_> {
    fn satisfies(&mut self, agent: usize, reqs: &[Requirement]) -> Result<bool> {
        for req in reqs {
            let hit = match self.memo.get(&(agent, *req)) {
                Some(&h) => h,
                None => {
                    let h = req.holds(self.profile.valuation(agent))?;
                    self.memo.insert((agent, *req), h);
                    h
                }
            };
            if !hit {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Finds a role assignment under which `profile` meets `pattern`, or `None`.
///
/// Fails with a precondition error when `m ≤ n`: such instances are served by the
/// singleton allocation instead.
pub fn classify_profile(profile: &Profile, pattern: Pattern) -> Result<Option<RoleAssignment>> {
    let mut cache = ClassCache {
        profile,
        memo: HashMap::new(),
    };
    classify_with(&mut cache, pattern)
}

/// Every pattern that applies, in dispatch order.
pub fn applicable_patterns(profile: &Profile) -> Result<Vec<RoleAssignment>> {
    let mut cache = ClassCache {
        profile,
        memo: HashMap::new(),
    };
    let mut out = Vec::new();
    for pattern in Pattern::ALL {
        if let Some(roles) = classify_with(&mut cache, pattern)? {
            out.push(roles);
        }
    }
    Ok(out)
}

fn classify_with(cache: &mut ClassCache<'_>, pattern: Pattern) -> Result<Option<RoleAssignment>> {
    let (n, m) = (cache.profile.n(), cache.profile.m());
    if m <= n {
        return Err(Error::Precondition(format!(
            "m = {m} ≤ n = {n}: use the singleton allocation"
        )));
    }
    let Some(shape) = shape(pattern, n, m) else {
        return Ok(None);
    };
    debug_assert_eq!(shape.free.0 + shape.middle.0 + shape.tail.0, n);

    let mut free_choices: Vec<Vec<usize>> = Vec::new();
    if shape.free.0 == 1 {
        free_choices.extend((0..n).map(|a| vec![a]));
    } else {
        for a in 0..n {
            free_choices.extend((0..n).filter(|&b| b != a).map(|b| vec![a, b]));
        }
    }

    for free in free_choices {
        let mut ok = true;
        for &a in &free {
            if !cache.satisfies(a, &shape.free.1)? {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        if let Some((middle, tail)) = split_rest(cache, &shape, &free)? {
            let mut order = free.clone();
            let mut groups = vec![RoleGroup::Free; free.len()];
            let mut claims = vec![shape.free.1.clone(); free.len()];
            for (agents, group, reqs) in [
                (&middle, RoleGroup::Middle, &shape.middle.1),
                (&tail, RoleGroup::Tail, &shape.tail.1),
            ] {
                order.extend(agents.iter().copied());
                groups.extend(std::iter::repeat_n(group, agents.len()));
                claims.extend(std::iter::repeat_n(reqs.clone(), agents.len()));
            }
            return Ok(Some(RoleAssignment {
                pattern,
                order,
                ell: shape.ell,
                r: shape.r,
                groups,
                claims,
            }));
        }
    }
    Ok(None)
}

/// Splits the non-free agents into middle and tail groups. Agents that qualify
/// for only one group go there; the rest fill the middle group in index order.
fn split_rest(
    cache: &mut ClassCache<'_>,
    shape: &Shape,
    free: &[usize],
) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    let n = cache.profile.n();
    let (mut only_mid, mut only_tail, mut both) = (Vec::new(), Vec::new(), Vec::new());
    for a in (0..n).filter(|a| !free.contains(a)) {
        let mid = shape.middle.0 > 0 && cache.satisfies(a, &shape.middle.1)?;
        let tail = shape.tail.0 > 0 && cache.satisfies(a, &shape.tail.1)?;
        match (mid, tail) {
            (true, true) => both.push(a),
            (true, false) => only_mid.push(a),
            (false, true) => only_tail.push(a),
            (false, false) => return Ok(None),
        }
    }
    if only_mid.len() > shape.middle.0 || only_tail.len() > shape.tail.0 {
        return Ok(None);
    }
    let fill = shape.middle.0 - only_mid.len();
    let mut middle = only_mid;
    middle.extend(both.iter().take(fill).copied());
    middle.sort_unstable();
    let mut tail = only_tail;
    tail.extend(both.iter().skip(fill).copied());
    tail.sort_unstable();
    Ok(Some((middle, tail)))
}
