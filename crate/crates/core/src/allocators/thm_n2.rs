//! Iterative envy repair for two-free patterns.
//!
//! Roles: agent 1 and agent 2 are the free agents (roles 0 and 1), the remaining
//! roles are size monotonic. With `ℓ = ⌊(m−1)/(n−1)⌋` and `r = (m−1) mod (n−1)`:
//!
//! 1. `X¹`: agent 1 takes its best single good `W¹`, agent 2 its best `ℓ`-bundle
//!    `Y¹` of the rest, the middle roles pick best `ℓ`-bundles in turn and the `r`
//!    tail roles take minimum-mask `(ℓ+1)`-bundles. If only agent 1 envies, go on.
//! 2. Step `c ≥ 2`, with `M = max |X^{c−1}_i|`:
//!    * `W^c` is agent 1's best `c`-bundle among those leaving room for an
//!      `(M−1)`-bundle agent 1 prefers to its current bundle; `Y^c` is agent 1's
//!      best `(M−1)`-bundle outside `W^c`.
//!    * Candidate `X^c`: agent 2 takes whichever of `W^c`, `Y^c` it prefers, agent 1
//!      the other, the rest is split into bundles of `M−1` and `M` goods.
//!    * If the candidate is not EFX, `X̄^c`: agent 1 takes `W^c`, agent 2 its best
//!      `(M−1)`-bundle outside `W^c`, the rest split as before.
//!    * If `X̄^c` is not EFX either, only agent 1 may envy and `|W^c| < M − 1`
//!      must hold; continue with `X^c := X̄^c`.
//!
//! Each of these claims is checked at runtime; a failure is reported as a proof
//! mismatch naming the step.

use serde::Serialize;

use super::{best_bundle, certify, greedy_fill};
use crate::error::{Error, Result};
use crate::model::{Allocation, Bundle, Profile, Valuation};
use crate::predicates::{bundles_are_efx, EfxReport, PatternFamily, RoleAssignment, Violation};
use crate::strictify::strictify_profile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StepOutcome {
    /// The initial allocation is EFX.
    InitialEfx,
    /// The candidate built from `W^c` and `Y^c` is EFX.
    CandidateEfx,
    /// The repaired allocation `X̄^c` is EFX.
    BarEfx,
    /// Only agent 1 envies; the loop goes on.
    Continue,
}

/// Which free agent holds `W^c` in the failed candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RepairCase {
    /// Agent 2 took `W^c`.
    A,
    /// Agent 1 kept `W^c`.
    B,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InitialStep {
    pub w: Bundle,
    pub y: Bundle,
    pub max_size: usize,
    pub outcome: StepOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IterStep {
    pub c: usize,
    pub w: Bundle,
    pub y: Bundle,
    /// Largest bundle size of the previous allocation.
    pub prev_max: usize,
    /// Largest bundle size of the allocation this step settles on.
    pub max_size: usize,
    /// Agent 1's bundle in that allocation.
    pub agent1: Bundle,
    pub case: Option<RepairCase>,
    pub outcome: StepOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IterTrace {
    /// Role order used (`order[0]` is agent 1, `order[1]` agent 2).
    pub order: Vec<usize>,
    pub initial: InitialStep,
    pub steps: Vec<IterStep>,
}

impl IterTrace {
    /// Index `c` of the last allocation built (1 when `X¹` was already EFX).
    pub fn depth(&self) -> usize {
        self.steps.last().map_or(1, |s| s.c)
    }

    pub fn outcome(&self) -> StepOutcome {
        self.steps
            .last()
            .map_or(self.initial.outcome, |s| s.outcome)
    }

    /// Verifies the loop invariants against agent 1's strictified valuation:
    /// `|W^c| = c` with consecutive `c`, agent 1 keeps `W^c` whenever the loop
    /// continues or repairs, agent 1's bundle strictly improves, the maximum
    /// bundle size never grows and drops by at most one per step, a step whose
    /// previous maximum is `c + 1` is final, and only the last step may stop.
    pub fn check_invariants(&self, agent1: &Valuation) -> std::result::Result<(), String> {
        if self.initial.w.len() != 1 {
            return Err(format!("|W¹| = {}", self.initial.w.len()));
        }
        let expect_initial = if self.steps.is_empty() {
            StepOutcome::InitialEfx
        } else {
            StepOutcome::Continue
        };
        if self.initial.outcome != expect_initial {
            return Err(format!("initial outcome {:?}", self.initial.outcome));
        }
        let mut prev_bundle = self.initial.w;
        let mut prev_max = self.initial.max_size;
        for (i, s) in self.steps.iter().enumerate() {
            let last = i + 1 == self.steps.len();
            if s.c != i + 2 {
                return Err(format!("step {i} has c = {}", s.c));
            }
            if s.w.len() != s.c {
                return Err(format!("|W^{}| = {}", s.c, s.w.len()));
            }
            if s.prev_max != prev_max {
                return Err(format!(
                    "step {} records previous max {}, expected {prev_max}",
                    s.c, s.prev_max
                ));
            }
            if s.max_size > prev_max || s.max_size + 1 < prev_max {
                return Err(format!(
                    "max bundle size went from {prev_max} to {} at c = {}",
                    s.max_size, s.c
                ));
            }
            match s.outcome {
                StepOutcome::Continue if last => {
                    return Err(format!("trace ends on a continuing step c = {}", s.c))
                }
                StepOutcome::Continue | StepOutcome::BarEfx if s.agent1 != s.w => {
                    return Err(format!("agent 1 does not hold W^{} at c = {}", s.c, s.c))
                }
                StepOutcome::InitialEfx => {
                    return Err(format!("initial outcome recorded at c = {}", s.c))
                }
                StepOutcome::CandidateEfx | StepOutcome::BarEfx if !last => {
                    return Err(format!("loop went on after an EFX step c = {}", s.c))
                }
                _ => {}
            }
            if s.prev_max == s.c + 1 && !last {
                return Err(format!(
                    "step c = {} with previous max c+1 is not final",
                    s.c
                ));
            }
            if !agent1.prefers(s.agent1, prev_bundle) {
                return Err(format!(
                    "agent 1's bundle did not improve at c = {}: {} → {}",
                    s.c, prev_bundle, s.agent1
                ));
            }
            prev_bundle = s.agent1;
            prev_max = s.max_size;
        }
        Ok(())
    }
}

/// Violations in role space, short-circuiting on the first non-agent-1 envier.
fn role_report(strict: &Profile, bundles: &[Bundle]) -> EfxReport {
    let mut violations = Vec::new();
    for (i, v) in strict.valuations().iter().enumerate() {
        for (j, &other) in bundles.iter().enumerate() {
            if i == j {
                continue;
            }
            for g in other.goods() {
                if v.compare(bundles[i], other.without(g)).is_lt() {
                    violations.push(Violation {
                        envier: i,
                        envied: j,
                        good: g,
                    });
                }
            }
        }
    }
    EfxReport { violations }
}

fn only_agent1_envies(report: &EfxReport) -> std::result::Result<(), Violation> {
    match report.violations.iter().find(|v| v.envier != 0) {
        Some(v) => Err(*v),
        None => Ok(()),
    }
}

fn max_size(bundles: &[Bundle]) -> usize {
    bundles.iter().map(|b| b.len()).max().unwrap_or(0)
}

/// Splits `pool` among roles `2..n`: the first roles pick their best
/// `small`-bundles, the last `large` roles take minimum-mask `(small+1)`-bundles.
fn fill_rest(
    strict: &Profile,
    pool: Bundle,
    small: usize,
    large: usize,
    step: &str,
) -> Result<Vec<Bundle>> {
    let n = strict.n();
    let k = n - 2;
    if large > k || pool.len() != k * small + large {
        return Err(Error::mismatch(
            step,
            format!(
                "{} goods cannot be split among {k} agents into bundles of {small} and {} ({large} large)",
                pool.len(),
                small + 1
            ),
        ));
    }
    let order: Vec<usize> = (2..n).collect();
    let sizes: Vec<usize> = (0..k)
        .map(|p| if p < k - large { small } else { small + 1 })
        .collect();
    let pickers: Vec<bool> = (0..k).map(|p| p < k - large).collect();
    greedy_fill(strict, &order, &sizes, pool, &pickers)
}

/// Number of `M`-sized bundles when `pool` goods go to the `n − 2` size-monotonic
/// roles in bundles of `M − 1` or `M`.
fn large_count(pool: usize, n: usize, mm: usize, step: &str) -> Result<usize> {
    let base = (n - 2) * (mm - 1);
    if pool < base || pool - base > n - 2 {
        return Err(Error::mismatch(
            step,
            format!(
                "{pool} remaining goods do not fit {} agents with bundles of {} or {mm}",
                n - 2,
                mm - 1
            ),
        ));
    }
    Ok(pool - base)
}

/// Iterative repair for two-free patterns. Returns the EFX allocation and the
/// per-step trace.
pub fn allocate_thm_n2(
    profile: &Profile,
    roles: &RoleAssignment,
) -> Result<(Allocation, IterTrace)> {
    let (n, m) = (profile.n(), profile.m());
    if m <= n {
        return Err(Error::Precondition(format!(
            "iterative repair needs m > n, got m = {m}, n = {n}"
        )));
    }
    if roles.pattern.family() != PatternFamily::TwoFree {
        return Err(Error::Precondition(format!(
            "{} is not a two-free pattern",
            roles.pattern
        )));
    }
    roles.revalidate(profile)?;

    let strict = strictify_profile(profile).permuted(&roles.order);
    let (v1, v2) = (strict.valuation(0), strict.valuation(1));
    let full = Bundle::full(m);
    let (ell, r) = (roles.ell, roles.r);

    let w1 = best_bundle(v1, full, 1)?;
    let y1 = best_bundle(v2, full.difference(w1), ell)?;
    let mut bundles = vec![w1, y1];
    bundles.extend(fill_rest(
        &strict,
        full.difference(w1).difference(y1),
        ell,
        r,
        "X¹",
    )?);

    let mut trace = IterTrace {
        order: roles.order.clone(),
        initial: InitialStep {
            w: w1,
            y: y1,
            max_size: max_size(&bundles),
            outcome: StepOutcome::InitialEfx,
        },
        steps: Vec::new(),
    };

    let report = role_report(&strict, &bundles);
    if report.is_efx() {
        return finish(profile, roles, &bundles, trace);
    }
    if let Err(v) = only_agent1_envies(&report) {
        return Err(Error::mismatch(
            "X¹",
            format!(
                "role {} envies role {} (good {}); only agent 1 may envy",
                v.envier, v.envied, v.good
            ),
        ));
    }
    if ell == 1 || (ell == 2 && r == 0) {
        return Err(Error::mismatch(
            "X¹",
            format!("ℓ = {ell}, r = {r}: bundles of at most two goods, yet agent 1 envies"),
        ));
    }
    trace.initial.outcome = StepOutcome::Continue;

    let mut prev_agent1 = w1;
    let mut prev_max = trace.initial.max_size;

    for c in 2.. {
        if c > m {
            return Err(Error::mismatch(
                "loop bound",
                format!("no EFX allocation after {m} steps"),
            ));
        }
        let mm = prev_max;
        let label = |what: &str| format!("{what} (c = {c})");
        if mm < 2 || c + mm - 1 > m {
            return Err(Error::mismatch(
                label("G"),
                format!(
                    "no room for a {c}-bundle next to a {}-bundle among {m} goods",
                    mm.saturating_sub(1)
                ),
            ));
        }
        let t_size = mm - 1;

        // W^c = argmax over G^{c−1}; only bundles beating the incumbent need the
        // membership test.
        let mut w: Option<Bundle> = None;
        for s in full.subsets_of_size(c) {
            if w.is_some_and(|best| !v1.prefers(s, best)) {
                continue;
            }
            let witness = best_bundle(v1, full.difference(s), t_size)?;
            if v1.prefers(witness, prev_agent1) {
                w = Some(s);
            }
        }
        let w = w.ok_or_else(|| {
            Error::mismatch(
                label("G"),
                "no bundle leaves room for an envied (M−1)-bundle",
            )
        })?;
        let y = best_bundle(v1, full.difference(w), t_size)?;
        if !v1.prefers(y, prev_agent1) {
            return Err(Error::mismatch(
                label("H"),
                format!("Y = {y} does not beat {prev_agent1}"),
            ));
        }

        // Candidate: agent 2 chooses between W and Y.
        let (a1, a2) = if v2.prefers(w, y) { (y, w) } else { (w, y) };
        let pool = full.difference(w).difference(y);
        let large = large_count(pool.len(), n, mm, &label("X"))?;
        let mut candidate = vec![a1, a2];
        candidate.extend(fill_rest(&strict, pool, mm - 1, large, &label("X"))?);
        if bundles_are_efx(&strict, &candidate) {
            trace.steps.push(IterStep {
                c,
                w,
                y,
                prev_max: mm,
                max_size: max_size(&candidate),
                agent1: a1,
                case: None,
                outcome: StepOutcome::CandidateEfx,
            });
            return finish(profile, roles, &candidate, trace);
        }
        let case = if a2 == w {
            RepairCase::A
        } else {
            RepairCase::B
        };

        // Repair: agent 1 keeps W, agent 2 re-picks outside W.
        let y2 = best_bundle(v2, full.difference(w), mm - 1)?;
        let pool = full.difference(w).difference(y2);
        let large = large_count(pool.len(), n, mm, &label("X̄"))?;
        let mut bar = vec![w, y2];
        bar.extend(fill_rest(&strict, pool, mm - 1, large, &label("X̄"))?);
        let report = role_report(&strict, &bar);
        let mut step = IterStep {
            c,
            w,
            y,
            prev_max: mm,
            max_size: max_size(&bar),
            agent1: w,
            case: Some(case),
            outcome: StepOutcome::BarEfx,
        };
        if report.is_efx() {
            trace.steps.push(step);
            return finish(profile, roles, &bar, trace);
        }
        if let Err(v) = only_agent1_envies(&report) {
            return Err(Error::mismatch(
                label("X̄"),
                format!(
                    "case {case:?}: role {} envies role {} (good {}); only agent 1 may envy",
                    v.envier, v.envied, v.good
                ),
            ));
        }
        if mm == c + 1 {
            return Err(Error::mismatch(
                label("termination"),
                "previous max is c + 1, so this step must be EFX, yet agent 1 envies",
            ));
        }
        if c + 1 >= mm {
            return Err(Error::mismatch(
                label("X̄"),
                format!(
                    "agent 1 envies while |W| = {c} is not below M − 1 = {}",
                    mm - 1
                ),
            ));
        }
        step.outcome = StepOutcome::Continue;
        trace.steps.push(step);
        bundles = bar;
        prev_agent1 = w;
        prev_max = max_size(&bundles);
    }
    unreachable!("the loop returns or fails within m steps")
}

fn finish(
    profile: &Profile,
    roles: &RoleAssignment,
    role_bundles: &[Bundle],
    trace: IterTrace,
) -> Result<(Allocation, IterTrace)> {
    let alloc = Allocation::from_roles(role_bundles, &roles.order, profile.m())?;
    certify(profile, &alloc, "iterative repair")?;
    Ok((alloc, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Value;
    use crate::oracle::brute_force_all;
    use crate::predicates::{classify_profile, Pattern};
    use crate::strictify::strictify;

    fn table(m: usize, f: impl Fn(Bundle) -> i64) -> Valuation {
        Valuation::from_fn(m, |s| Value::integer(f(s))).unwrap()
    }

    /// Monotone, and far from size monotonic: goods 0 and 1 dominate.
    fn skewed(m: usize) -> Valuation {
        table(m, |s| {
            let heavy = [0usize, 1].iter().filter(|&&g| s.contains(g)).count() as i64;
            100 * heavy + s.len() as i64
        })
    }

    fn sized(m: usize, salt: u64) -> Valuation {
        table(m, |s| {
            1000 * s.len() as i64 + ((s.mask() * 29 + salt) % 89) as i64
        })
    }

    fn run(p: &Profile) -> (Allocation, IterTrace) {
        let roles = classify_profile(p, Pattern::ThmN2I)
            .unwrap()
            .or_else(|| classify_profile(p, Pattern::ThmN2Ii).unwrap())
            .expect("two-free pattern applies");
        let (a, t) = allocate_thm_n2(p, &roles).unwrap();
        let v1 = strictify(p.valuation(roles.order[0]));
        t.check_invariants(&v1).unwrap();
        (a, t)
    }

    #[test]
    fn small_ell_exits_at_initial_allocation() {
        // n = 3, m = 5: ℓ = 2, r = 0
        let p = Profile::new(vec![skewed(5), skewed(5), sized(5, 1)]).unwrap();
        let (_, t) = run(&p);
        assert_eq!(t.outcome(), StepOutcome::InitialEfx);
        assert_eq!(t.depth(), 1);
        // n = 4, m = 5: ℓ = 1
        let q = Profile::new(vec![skewed(5), skewed(5), sized(5, 1), sized(5, 2)]).unwrap();
        assert_eq!(run(&q).1.depth(), 1);
    }

    #[test]
    fn two_agents_four_goods() {
        let p = Profile::new(vec![skewed(4), skewed(4)]).unwrap();
        let (a, t) = run(&p);
        assert!(t.depth() <= 3);
        assert!(brute_force_all(&p, 1 << 20).unwrap().contains(&a));
    }

    #[test]
    fn three_agents_seven_goods() {
        // ℓ = 3, r = 0; agent 3 is size monotonic on <1,4>
        let p = Profile::new(vec![skewed(7), skewed(7), sized(7, 5)]).unwrap();
        let (a, t) = run(&p);
        for s in &t.steps {
            assert_eq!(s.w.len(), s.c);
        }
        assert!(t.depth() >= 2, "agent 1 envies the initial allocation");
        assert!(brute_force_all(&p, 1 << 20).unwrap().contains(&a));
    }

    #[test]
    fn corrupted_traces_are_rejected() {
        let p = Profile::new(vec![skewed(7), skewed(7), sized(7, 5)]).unwrap();
        let (_, t) = run(&p);
        let v1 = strictify(p.valuation(t.order[0]));
        let mut bad = t.clone();
        bad.steps[0].c = 3;
        assert!(bad.check_invariants(&v1).is_err());
        let mut bad = t.clone();
        bad.steps[0].max_size = t.initial.max_size + 1;
        assert!(bad.check_invariants(&v1).is_err());
        let mut bad = t.clone();
        bad.steps[0].agent1 = t.initial.w;
        assert!(bad.check_invariants(&v1).is_err());
        let mut bad = t.clone();
        bad.initial.outcome = StepOutcome::InitialEfx;
        assert!(bad.check_invariants(&v1).is_err());
    }

    #[test]
    fn rejects_one_free_roles() {
        let p = Profile::new(vec![skewed(5), sized(5, 0)]).unwrap();
        let roles = classify_profile(&p, Pattern::ThmN1I).unwrap().unwrap();
        assert!(matches!(
            allocate_thm_n2(&p, &roles),
            Err(Error::Precondition(_))
        ));
    }
}
