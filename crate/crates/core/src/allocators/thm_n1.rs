use super::{certify, greedy_fill};
use crate::error::{Error, Result};
use crate::model::Profile;
use crate::model::{Allocation, Bundle};
use crate::predicates::{PatternFamily, RoleAssignment};
use crate::strictify::strictify_profile;

/// Sequential greedy allocation for one-free patterns.
///
/// With `ℓ = ⌊m/n⌋` and `r = m mod n`, the first `n − r` roles (the free agent,
/// then the middle group) each take their best `ℓ`-bundle from what remains; the
/// `r` tail roles take minimum-mask bundles of `ℓ + 1` goods.
pub fn allocate_thm_n1(profile: &Profile, roles: &RoleAssignment) -> Result<Allocation> {
    let (n, m) = (profile.n(), profile.m());
    if m <= n {
        return Err(Error::Precondition(format!(
            "greedy construction needs m > n, got m = {m}, n = {n}"
        )));
    }
    if roles.pattern.family() != PatternFamily::OneFree {
        return Err(Error::Precondition(format!(
            "{} is not a one-free pattern",
            roles.pattern
        )));
    }
    roles.revalidate(profile)?;

    let (ell, r) = (roles.ell, roles.r);
    let strict = strictify_profile(profile);
    let sizes: Vec<usize> = (0..n)
        .map(|p| if p < n - r { ell } else { ell + 1 })
        .collect();
    let pickers: Vec<bool> = (0..n).map(|p| p < n - r).collect();
    let bundles = greedy_fill(&strict, &roles.order, &sizes, Bundle::full(m), &pickers)?;
    let alloc = Allocation::from_roles(&bundles, &roles.order, m)?;
    certify(profile, &alloc, "greedy allocation")?;
    Ok(alloc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Valuation, Value};
    use crate::oracle::brute_force_all;
    use crate::predicates::{classify_profile, Pattern};

    fn additive(ws: &[i64]) -> Valuation {
        Valuation::additive(ws.iter().map(|&w| Value::integer(w)).collect()).unwrap()
    }

    /// Size-dominant table: every bundle outranks all smaller ones.
    fn sized(m: usize, salt: u64) -> Valuation {
        Valuation::from_fn(m, |s| {
            Value::integer(1000 * s.len() as i64 + ((s.mask() * 31 + salt) % 97) as i64)
        })
        .unwrap()
    }

    #[test]
    fn two_agents_five_goods() {
        let p = Profile::new(vec![additive(&[5, 4, 3, 2, 1]), sized(5, 3)]).unwrap();
        let roles = classify_profile(&p, Pattern::ThmN1I).unwrap().unwrap();
        assert_eq!(roles.order, vec![0, 1]);
        assert_eq!((roles.ell, roles.r), (2, 1));
        let a = allocate_thm_n1(&p, &roles).unwrap();
        assert_eq!(a.bundle(0), Bundle::from_goods([0, 1]));
        assert_eq!(a.bundle(1), Bundle::from_goods([2, 3, 4]));
        assert!(brute_force_all(&p, 1 << 20).unwrap().contains(&a));
    }

    #[test]
    fn three_agents_six_goods_all_pick() {
        let p = Profile::new(vec![
            additive(&[9, 1, 1, 7, 1, 1]),
            sized(6, 1),
            sized(6, 2),
        ])
        .unwrap();
        let roles = classify_profile(&p, Pattern::ThmN1I).unwrap().unwrap();
        assert_eq!((roles.ell, roles.r), (2, 0));
        let a = allocate_thm_n1(&p, &roles).unwrap();
        assert_eq!(a.sizes(), vec![2, 2, 2]);
        assert_eq!(a.bundle(0), Bundle::from_goods([0, 3]));
    }

    #[test]
    fn rejects_m_le_n_and_wrong_family() {
        let p = Profile::new(vec![sized(2, 0), sized(2, 1)]).unwrap();
        let q = Profile::new(vec![sized(5, 0), sized(5, 1)]).unwrap();
        let roles = classify_profile(&q, Pattern::ThmN1I).unwrap().unwrap();
        assert!(matches!(
            allocate_thm_n1(&p, &roles),
            Err(Error::Precondition(_))
        ));
        let two = classify_profile(&q, Pattern::ThmN2I).unwrap().unwrap();
        assert!(matches!(
            allocate_thm_n1(&q, &two),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn stale_roles_are_rejected() {
        let good = Profile::new(vec![additive(&[5, 4, 3, 2, 1]), sized(5, 3)]).unwrap();
        let roles = classify_profile(&good, Pattern::ThmN1I).unwrap().unwrap();
        let bad =
            Profile::new(vec![additive(&[5, 4, 3, 2, 1]), additive(&[9, 1, 1, 1, 1])]).unwrap();
        assert!(matches!(
            allocate_thm_n1(&bad, &roles),
            Err(Error::Precondition(_))
        ));
    }
}
