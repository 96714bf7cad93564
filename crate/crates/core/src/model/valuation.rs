use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::bundle::{Bundle, MAX_GOODS};
use super::value::Value;
use crate::error::{Error, Result};

/// Table-backed valuations store all `2^m` values; above this they are refused.
pub const MAX_TABLE_GOODS: usize = 20;

/// A valuation oracle over the goods `0..m`.
///
/// Cheap to clone: the underlying data is shared.
#[derive(Clone)]
pub struct Valuation {
    m: usize,
    kind: Kind,
}

#[derive(Clone)]
enum Kind {
    Table(Arc<TableData>),
    Additive(Arc<AdditiveData>),
    Strictified(Arc<Valuation>),
}

struct TableData {
    values: Vec<Value>,
    /// Dense rank of each entry under the value order; equal values share a rank.
    ranks: Vec<u32>,
}

struct AdditiveData {
    weights: Vec<Value>,
    /// Weights scaled by the lcm of their denominators, when every subset sum fits.
    scaled: Option<Vec<i128>>,
}

/// Borrowed view of a valuation's representation.
#[derive(Clone, Copy, Debug)]
pub enum ValuationKind<'a> {
    Table(&'a [Value]),
    Additive(&'a [Value]),
    Strictified(&'a Valuation),
}

impl Valuation {
    /// Explicit table indexed by bundle mask (`values[mask]`).
    pub fn table(m: usize, values: Vec<Value>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Malformed("valuation needs at least one good".into()));
        }
        if m > MAX_TABLE_GOODS {
            return Err(Error::Capacity {
                what: format!("table valuation over {m} goods"),
                limit: MAX_TABLE_GOODS as u64,
            });
        }
        if values.len() != 1 << m {
            return Err(Error::Malformed(format!(
                "table over {m} goods needs {} entries, got {}",
                1u64 << m,
                values.len()
            )));
        }
        let mut order: Vec<u32> = (0..values.len() as u32).collect();
        order.sort_by(|&a, &b| values[a as usize].cmp(&values[b as usize]));
        let mut ranks = vec![0u32; values.len()];
        let mut rank = 0u32;
        for w in 0..order.len() {
            if w > 0 && values[order[w] as usize] != values[order[w - 1] as usize] {
                rank += 1;
            }
            ranks[order[w] as usize] = rank;
        }
        Ok(Valuation {
            m,
            kind: Kind::Table(Arc::new(TableData { values, ranks })),
        })
    }

    /// Table built by evaluating `f` on every bundle.
    pub fn from_fn(m: usize, mut f: impl FnMut(Bundle) -> Value) -> Result<Self> {
        if m > MAX_TABLE_GOODS {
            return Err(Error::Capacity {
                what: format!("table valuation over {m} goods"),
                limit: MAX_TABLE_GOODS as u64,
            });
        }
        let values = (0..1u64 << m)
            .map(|mask| f(Bundle::from_mask(mask)))
            .collect();
        Valuation::table(m, values)
    }

    /// Additive valuation: a bundle is worth the sum of its goods' weights.
    pub fn additive(weights: Vec<Value>) -> Result<Self> {
        let m = weights.len();
        if m == 0 {
            return Err(Error::Malformed("valuation needs at least one good".into()));
        }
        if m > MAX_GOODS {
            return Err(Error::Capacity {
                what: format!("additive valuation over {m} goods"),
                limit: MAX_GOODS as u64,
            });
        }
        if let Some(g) = weights.iter().position(Value::is_negative) {
            return Err(Error::Malformed(format!("negative weight for good {g}")));
        }
        let scaled = scale_to_integers(&weights);
        Ok(Valuation {
            m,
            kind: Kind::Additive(Arc::new(AdditiveData { weights, scaled })),
        })
    }

    /// Wraps `inner` so that ties are broken by bundle size, then by mask.
    pub(crate) fn strictified(inner: Valuation) -> Self {
        if inner.is_strictified() {
            return inner;
        }
        Valuation {
            m: inner.m,
            kind: Kind::Strictified(Arc::new(inner)),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn kind(&self) -> ValuationKind<'_> {
        match &self.kind {
            Kind::Table(t) => ValuationKind::Table(&t.values),
            Kind::Additive(a) => ValuationKind::Additive(&a.weights),
            Kind::Strictified(v) => ValuationKind::Strictified(v),
        }
    }

    pub fn is_strictified(&self) -> bool {
        matches!(self.kind, Kind::Strictified(_))
    }

    /// Additive weights underneath any strictification wrappers.
    pub fn additive_weights(&self) -> Option<&[Value]> {
        match &self.kind {
            Kind::Additive(a) => Some(&a.weights),
            Kind::Strictified(v) => v.additive_weights(),
            Kind::Table(_) => None,
        }
    }

    pub fn full(&self) -> Bundle {
        Bundle::full(self.m)
    }

    fn check(&self, s: Bundle) -> Result<()> {
        if s.fits(self.m) {
            Ok(())
        } else {
            Err(Error::Malformed(format!(
                "bundle {s} references goods outside 0..{}",
                self.m
            )))
        }
    }

    /// Exact value of a bundle. A strictified valuation reports the wrapped value;
    /// its strictness lives in [`Valuation::compare`] only.
    pub fn value(&self, s: Bundle) -> Result<Value> {
        self.check(s)?;
        Ok(self.value_unchecked(s))
    }

    fn value_unchecked(&self, s: Bundle) -> Value {
        match &self.kind {
            Kind::Table(t) => t.values[s.mask() as usize].clone(),
            Kind::Additive(a) => s.goods().map(|g| &a.weights[g]).sum(),
            Kind::Strictified(v) => v.value_unchecked(s),
        }
    }

    pub fn try_compare(&self, s: Bundle, t: Bundle) -> Result<Ordering> {
        self.check(s)?;
        self.check(t)?;
        Ok(self.compare_unchecked(s, t))
    }

    /// Exact comparison of two bundles.
    ///
    /// # Panics
    /// If either bundle references goods outside `0..m`.
    pub fn compare(&self, s: Bundle, t: Bundle) -> Ordering {
        assert!(
            s.fits(self.m) && t.fits(self.m),
            "bundle outside 0..{}: {s} / {t}",
            self.m
        );
        self.compare_unchecked(s, t)
    }

    fn compare_unchecked(&self, s: Bundle, t: Bundle) -> Ordering {
        match &self.kind {
            Kind::Table(tab) => tab.ranks[s.mask() as usize].cmp(&tab.ranks[t.mask() as usize]),
            Kind::Additive(a) => match &a.scaled {
                Some(w) => {
                    let sum = |b: Bundle| b.goods().map(|g| w[g]).sum::<i128>();
                    sum(s).cmp(&sum(t))
                }
                None => self.value_unchecked(s).cmp(&self.value_unchecked(t)),
            },
            Kind::Strictified(v) => v
                .compare_unchecked(s, t)
                .then_with(|| s.len().cmp(&t.len()))
                .then_with(|| s.cmp(&t)),
        }
    }

    /// `self(s) > self(t)`.
    pub fn prefers(&self, s: Bundle, t: Bundle) -> bool {
        self.compare(s, t) == Ordering::Greater
    }
}

fn scale_to_integers(weights: &[Value]) -> Option<Vec<i128>> {
    let lcm = weights
        .iter()
        .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let scaled: Option<Vec<i128>> = weights
        .iter()
        .map(|w| (w.numer() * (&lcm / w.denom())).to_i128())
        .collect();
    let scaled = scaled?;
    let mut total: i128 = 0;
    for w in &scaled {
        total = total.checked_add(*w)?;
    }
    Some(scaled)
}

impl PartialEq for Valuation {
    fn eq(&self, other: &Self) -> bool {
        if self.m != other.m {
            return false;
        }
        match (&self.kind, &other.kind) {
            (Kind::Table(a), Kind::Table(b)) => a.values == b.values,
            (Kind::Additive(a), Kind::Additive(b)) => a.weights == b.weights,
            (Kind::Strictified(a), Kind::Strictified(b)) => a == b,
            _ => false,
        }
    }
}

impl std::fmt::Debug for Valuation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind() {
            ValuationKind::Table(v) => f.debug_tuple("Table").field(&v).finish(),
            ValuationKind::Additive(w) => f.debug_tuple("Additive").field(&w).finish(),
            ValuationKind::Strictified(v) => f.debug_tuple("Strictified").field(v).finish(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> Vec<Value> {
        xs.iter().map(|&x| Value::integer(x)).collect()
    }

    #[test]
    fn additive_values() {
        let v = Valuation::additive(ints(&[10, 1, 1, 1])).unwrap();
        assert_eq!(v.value(Bundle::singleton(0)).unwrap(), Value::integer(10));
        let w = Valuation::additive(ints(&[3, 2, 1])).unwrap();
        assert_eq!(
            w.value(Bundle::from_goods([1, 2])).unwrap(),
            Value::integer(3)
        );
        assert_eq!(
            w.compare(Bundle::singleton(0), Bundle::from_goods([1, 2])),
            Ordering::Equal
        );
    }

    #[test]
    fn empty_bundle_of_normalized_table() {
        let v = Valuation::from_fn(3, |s| Value::integer(s.len() as i64)).unwrap();
        assert_eq!(v.value(Bundle::EMPTY).unwrap(), Value::zero());
    }

    #[test]
    fn out_of_range_is_malformed() {
        let v = Valuation::additive(ints(&[1, 2])).unwrap();
        assert!(matches!(
            v.value(Bundle::singleton(2)),
            Err(Error::Malformed(_))
        ));
        assert!(v.try_compare(Bundle::singleton(5), Bundle::EMPTY).is_err());
    }

    #[test]
    fn rational_additive_uses_exact_sums() {
        let w = vec![
            Value::ratio(1, 3).unwrap(),
            Value::ratio(1, 6).unwrap(),
            Value::ratio(1, 2).unwrap(),
        ];
        let v = Valuation::additive(w).unwrap();
        assert_eq!(
            v.compare(Bundle::from_goods([0, 1]), Bundle::singleton(2)),
            Ordering::Equal
        );
        assert_eq!(v.value(Bundle::full(3)).unwrap(), Value::integer(1));
    }

    #[test]
    fn huge_weights_fall_back_to_big_sums() {
        let big: Value = "170141183460469231731687303715884105727".parse().unwrap();
        let v = Valuation::additive(vec![big.clone(), big, Value::integer(1)]).unwrap();
        assert_eq!(
            v.compare(Bundle::from_goods([0, 1]), Bundle::from_goods([0, 2])),
            Ordering::Greater
        );
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Valuation::table(2, ints(&[0, 1, 2])).is_err());
        assert!(matches!(
            Valuation::table(21, vec![]),
            Err(Error::Capacity { .. })
        ));
        assert!(Valuation::additive(ints(&[1, -1])).is_err());
        assert!(Valuation::additive(vec![]).is_err());
    }
}
