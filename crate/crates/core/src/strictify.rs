//! Lifting weak valuations to strict ones.
//!
//! A strictified valuation orders bundles by the key `(wrapped value, size, mask)`.
//! Distinct bundles never tie, every strict comparison of the wrapped valuation is
//! kept, and equal-valued bundles of different sizes favour the larger one, so
//! both set- and size-monotonicity carry over as strict relations. Any allocation
//! that is EFX under the strictified profile is EFX under the original one.

use crate::error::Result;
use crate::model::{Bundle, Profile, Valuation, Value};

/// Strict version of `v`. Idempotent.
pub fn strictify(v: &Valuation) -> Valuation {
    Valuation::strictified(v.clone())
}

pub fn strictify_profile(profile: &Profile) -> Profile {
    Profile::new(profile.valuations().iter().map(strictify).collect())
        .expect("strictification keeps agent count and goods")
}

/// Table whose entries are the dense ranks of `v`'s comparison order. For a
/// strictified `v` this is a strict table (values `0..2^m`) inducing the same order.
pub fn materialize(v: &Valuation) -> Result<Valuation> {
    let m = v.m();
    let mut order: Vec<Bundle> = Bundle::full(m).subsets().collect();
    order.sort_by(|&a, &b| v.compare(a, b));
    let mut values = vec![Value::zero(); order.len()];
    let mut rank = 0i64;
    for (w, b) in order.iter().enumerate() {
        if w > 0 && v.compare(order[w - 1], *b).is_ne() {
            rank += 1;
        }
        values[b.mask() as usize] = Value::integer(rank);
    }
    Valuation::table(m, values)
}

#[cfg(test)]
mod tests {
    use std::cmp::Ordering::*;

    use super::*;
    use crate::predicates::is_strict;

    fn table(m: usize, xs: &[i64]) -> Valuation {
        Valuation::table(m, xs.iter().map(|&x| Value::integer(x)).collect()).unwrap()
    }

    fn sorted(v: &Valuation) -> Vec<Bundle> {
        let mut all: Vec<Bundle> = v.full().subsets().collect();
        all.sort_by(|&a, &b| v.compare(a, b));
        all
    }

    #[test]
    fn equal_singletons_break_by_mask() {
        let v = table(2, &[0, 1, 1, 2]);
        let s = strictify(&v);
        assert_eq!(s.compare(Bundle::singleton(0), Bundle::singleton(1)), Less);
        let b = Bundle::from_mask;
        assert_eq!(sorted(&s), vec![b(0), b(1), b(2), b(3)]);
    }

    #[test]
    fn size_breaks_ties_before_mask() {
        let v = table(2, &[0, 5, 0, 5]);
        let s = strictify(&v);
        // {0} ⊂ {0,1} with equal wrapped values
        assert_eq!(s.compare(Bundle::singleton(0), Bundle::full(2)), Less);
    }

    #[test]
    fn strict_table_order_unchanged() {
        let v = table(2, &[0, 3, 1, 7]);
        assert_eq!(sorted(&strictify(&v)), sorted(&v));
    }

    #[test]
    fn additive_singletons() {
        let v = Valuation::additive(vec![2.into(), 1.into(), 1.into()]).unwrap();
        let s = strictify(&v);
        let mut singles: Vec<Bundle> = (0..3).map(Bundle::singleton).collect();
        singles.sort_by(|&a, &b| s.compare(a, b));
        assert_eq!(
            singles,
            vec![
                Bundle::singleton(1),
                Bundle::singleton(2),
                Bundle::singleton(0)
            ]
        );
    }

    #[test]
    fn idempotent() {
        let v = table(1, &[0, 0]);
        let once = strictify(&v);
        let twice = strictify(&once);
        assert_eq!(once, twice);
    }

    #[test]
    fn constant_profile_orders_by_size_then_mask() {
        let zero = table(2, &[0, 0, 0, 0]);
        let p = Profile::new(vec![zero.clone(), zero]).unwrap();
        let sp = strictify_profile(&p);
        let b = Bundle::from_mask;
        for v in sp.valuations() {
            assert_eq!(sorted(v), vec![b(0), b(1), b(2), b(3)]);
            assert!(is_strict(v).unwrap());
        }
    }

    #[test]
    fn materialized_strict_table() {
        let v = table(2, &[0, 1, 1, 2]);
        let t = materialize(&strictify(&v)).unwrap();
        assert!(is_strict(&t).unwrap());
        assert_eq!(sorted(&t), sorted(&strictify(&v)));
        assert_eq!(t.value(Bundle::full(2)).unwrap(), Value::integer(3));
    }
}
