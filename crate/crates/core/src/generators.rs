//! Seeded instance families.
//!
//! All randomness comes from ChaCha8 seeded with a `u64`, consumed in a fixed
//! order, so a seed and parameter set name the same profile on every platform.
//! Every generator checks its output against the advertised class before
//! returning it.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Bundle, Profile, Valuation, Value};
use crate::predicates::{
    is_mms_feasible, is_set_monotonic, is_size_monotonic_range, is_strict, mms_witness, quotient,
    MmsWitness, PatternFamily,
};
use crate::strictify::{materialize, strictify};

/// Largest `m` accepted by the table generators.
pub const MAX_GENERATED_GOODS: usize = 16;

/// Size weight of the size-dominant construction; noise stays below it.
pub const SIZE_WEIGHT: i64 = 1_000_000;

/// Per-agent class demand for [`gen_sized_profile`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassSpec {
    /// Strict set-monotonic table with no further structure.
    Arbitrary,
    /// `⟨k,l⟩`-size monotonic.
    SizeMonotonic { k: usize, l: usize },
}

impl fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassSpec::Arbitrary => f.write_str("arbitrary"),
            ClassSpec::SizeMonotonic { k, l } => write!(f, "{k}:{l}"),
        }
    }
}

impl FromStr for ClassSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("arbitrary") {
            return Ok(ClassSpec::Arbitrary);
        }
        let bad = || Error::Malformed(format!("class spec {s:?}: expected `arbitrary` or `k:l`"));
        let (k, l) = s.split_once(':').ok_or_else(bad)?;
        let k = k.trim().parse().map_err(|_| bad())?;
        let l = l.trim().parse().map_err(|_| bad())?;
        if k == 0 || k >= l {
            return Err(Error::Malformed(format!(
                "class spec {s:?}: need 1 ≤ k < l"
            )));
        }
        Ok(ClassSpec::SizeMonotonic { k, l })
    }
}

/// Comma-separated list of [`ClassSpec`]s.
pub fn parse_specs(s: &str) -> Result<Vec<ClassSpec>> {
    s.split(',').map(str::parse).collect()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_goods(m: usize) -> Result<()> {
    if m > MAX_GENERATED_GOODS {
        return Err(Error::Capacity {
            what: format!("table generation over {m} goods"),
            limit: MAX_GENERATED_GOODS as u64,
        });
    }
    Ok(())
}

fn self_check(ok: Result<bool>, what: impl FnOnce() -> String) -> Result<()> {
    if ok? {
        Ok(())
    } else {
        Err(Error::Internal(format!(
            "generated {} fails its class",
            what()
        )))
    }
}

/// Independent uniform integer weights per agent.
pub fn gen_additive(
    seed: u64,
    n: usize,
    m: usize,
    weights: RangeInclusive<u64>,
) -> Result<Profile> {
    if *weights.start() == 0 || weights.is_empty() || *weights.end() > i64::MAX as u64 {
        return Err(Error::Malformed(format!(
            "weight range {}..={} must be nonempty and positive",
            weights.start(),
            weights.end()
        )));
    }
    let mut r = rng(seed);
    let vals = (0..n)
        .map(|_| {
            let w = (0..m)
                .map(|_| Value::integer(r.random_range(weights.clone()) as i64))
                .collect();
            Valuation::additive(w)
        })
        .collect::<Result<Vec<_>>>()?;
    Profile::new(vals)
}

/// Uniform value per bundle, `v(∅) = 0`, closed upward by a running maximum
/// over subsets, then strictified and written out as a rank table.
fn monotone_table(r: &mut ChaCha8Rng, m: usize) -> Result<Valuation> {
    let size = 1usize << m;
    let mut v: Vec<u32> = (0..size).map(|_| r.random_range(0..1_000_000)).collect();
    v[0] = 0;
    for g in 0..m {
        let bit = 1 << g;
        for mask in 0..size {
            if mask & bit != 0 {
                v[mask] = v[mask].max(v[mask ^ bit]);
            }
        }
    }
    let weak = Valuation::table(m, v.into_iter().map(|x| Value::integer(x.into())).collect())?;
    let strict = materialize(&strictify(&weak))?;
    self_check(is_set_monotonic(&strict), || "monotone table".into())?;
    self_check(is_strict(&strict), || "monotone table".into())?;
    Ok(strict)
}

/// Strict set-monotonic rank tables, one per agent.
pub fn gen_monotone_table(seed: u64, n: usize, m: usize) -> Result<Profile> {
    check_goods(m)?;
    let mut r = rng(seed);
    Profile::new(
        (0..n)
            .map(|_| monotone_table(&mut r, m))
            .collect::<Result<_>>()?,
    )
}

/// `v(S) = |S|·C + noise(S)` with `0 ≤ noise < C` and `v(∅) = 0`: size monotonic on
/// every range, and set monotonic.
fn size_dominant(r: &mut ChaCha8Rng, m: usize) -> Result<Valuation> {
    let mut values = Vec::with_capacity(1 << m);
    for mask in 0..1u64 << m {
        let size = i64::from(mask.count_ones());
        let noise = if mask == 0 {
            0
        } else {
            r.random_range(0..SIZE_WEIGHT)
        };
        values.push(Value::integer(size * SIZE_WEIGHT + noise));
    }
    Valuation::table(m, values)
}

/// One agent per spec.
pub fn gen_sized_profile(seed: u64, m: usize, specs: &[ClassSpec]) -> Result<Profile> {
    check_goods(m)?;
    let mut r = rng(seed);
    let mut vals = Vec::with_capacity(specs.len());
    for (i, spec) in specs.iter().enumerate() {
        let v = match *spec {
            ClassSpec::Arbitrary => monotone_table(&mut r, m)?,
            ClassSpec::SizeMonotonic { k, l } => {
                if l > m {
                    return Err(Error::RangeOutOfBounds { k, l, m });
                }
                let v = size_dominant(&mut r, m)?;
                self_check(is_size_monotonic_range(&v, k, l), || {
                    format!("agent {i} for <{k},{l}>")
                })?;
                v
            }
        };
        vals.push(v);
    }
    Profile::new(vals)
}

fn sized_specs(
    seed: u64,
    family: PatternFamily,
    free: usize,
    n: usize,
    m: usize,
) -> Result<Vec<ClassSpec>> {
    if n < 2 || m <= n {
        return Err(Error::Precondition(format!(
            "need n ≥ 2 and m > n, got n = {n}, m = {m}"
        )));
    }
    let (ell, _) = quotient(family, n, m);
    let k = ell.saturating_sub(1).max(1);
    let l = (ell + 1).min(m);
    let mut specs: Vec<ClassSpec> = (0..n)
        .map(|i| {
            if i < free {
                ClassSpec::Arbitrary
            } else {
                ClassSpec::SizeMonotonic {
                    k: if free == 2 { 1 } else { k },
                    l,
                }
            }
        })
        .collect();
    specs.shuffle(&mut rng(seed ^ 0x5eed_5eed_5eed_5eed));
    Ok(specs)
}

/// Specs with one arbitrary agent at a seeded position and `n − 1` agents size
/// monotonic around `ℓ = ⌊m/n⌋`.
pub fn thm_n1_specs(seed: u64, n: usize, m: usize) -> Result<Vec<ClassSpec>> {
    sized_specs(seed, PatternFamily::OneFree, 1, n, m)
}

/// Specs with two arbitrary agents at seeded positions and `n − 2` agents size
/// monotonic on `⟨1, ℓ+1⟩`, `ℓ = ⌊(m−1)/(n−1)⌋`.
pub fn thm_n2_specs(seed: u64, n: usize, m: usize) -> Result<Vec<ClassSpec>> {
    sized_specs(seed, PatternFamily::TwoFree, 2, n, m)
}

/// Properties a fixture is known to have.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureExpectations {
    pub mms_feasible: bool,
    pub mms_witness: Option<MmsWitness>,
    /// `((k, l), size monotonic on ⟨k,l⟩)`.
    pub size_monotonic: Vec<((usize, usize), bool)>,
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    pub valuation: Valuation,
    pub expected: FixtureExpectations,
}

impl Fixture {
    /// Every agent of an `n`-agent profile gets the fixture valuation.
    pub fn profile(&self, n: usize) -> Result<Profile> {
        Profile::new(vec![self.valuation.clone(); n])
    }

    /// Evaluates the listed properties and reports any mismatch.
    pub fn verify(&self) -> Result<()> {
        let v = &self.valuation;
        let mut bad = Vec::new();
        let feasible = is_mms_feasible(v)?;
        if feasible != self.expected.mms_feasible {
            bad.push(format!("MMS-feasible = {feasible}"));
        }
        let w = mms_witness(v)?;
        if w != self.expected.mms_witness {
            bad.push(format!("MMS witness = {w:?}"));
        }
        for &((k, l), want) in &self.expected.size_monotonic {
            let got = is_size_monotonic_range(v, k, l)?;
            if got != want {
                bad.push(format!("<{k},{l}>-size monotonic = {got}"));
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Internal(format!(
                "fixture {}: {}",
                self.name,
                bad.join(", ")
            )))
        }
    }
}

fn b(goods: &[usize]) -> Bundle {
    Bundle::from_goods(goods.iter().copied())
}

fn table_from(m: usize, entries: &[(&[usize], i64)]) -> Valuation {
    let mut values = vec![Value::zero(); 1 << m];
    for (goods, x) in entries {
        values[b(goods).mask() as usize] = Value::integer(*x);
    }
    Valuation::table(m, values).expect("fixture table is well formed")
}

/// Goods `a, b, c, d` are indices `0..4`.
pub fn fixtures() -> Vec<Fixture> {
    let (a, bb, c, d) = (0, 1, 2, 3);
    let mms_violation = table_from(
        4,
        &[
            (&[a], 1),
            (&[bb], 2),
            (&[c], 3),
            (&[d], 4),
            (&[a, bb], 10),
            (&[a, c], 11),
            (&[a, d], 7),
            (&[bb, c], 8),
            (&[bb, d], 6),
            (&[c, d], 9),
            (&[a, bb, c], 20),
            (&[a, bb, d], 21),
            (&[a, c, d], 22),
            (&[bb, c, d], 23),
            (&[a, bb, c, d], 30),
        ],
    );
    let dominant = Valuation::from_fn(4, |s| {
        Value::integer(s.goods().map(|g| if g == a { 10 } else { 1 }).sum())
    })
    .expect("four goods");
    vec![
        Fixture {
            name: "mms-violation",
            description: "size monotonic on <1,2> and <2,3>, yet not MMS-feasible",
            valuation: mms_violation,
            expected: FixtureExpectations {
                mms_feasible: false,
                mms_witness: Some(MmsWitness {
                    set: Bundle::full(4),
                    low: (b(&[bb, c]), b(&[a, d])),
                    high: (b(&[a, bb]), b(&[c, d])),
                }),
                size_monotonic: vec![((1, 2), true), ((2, 3), true)],
            },
        },
        Fixture {
            name: "additive-dominant",
            description: "additive with weights 10, 1, 1, 1: MMS-feasible, not size monotonic",
            valuation: dominant,
            expected: FixtureExpectations {
                mms_feasible: true,
                mms_witness: None,
                size_monotonic: vec![((1, 2), false), ((2, 3), false)],
            },
        },
    ]
}

pub fn fixture(name: &str) -> Option<Fixture> {
    fixtures().into_iter().find(|f| f.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicates::{
        classify_profile, size_monotonicity_witness, MonotonicityWitness, Pattern,
    };

    #[test]
    fn additive_is_deterministic() {
        let a = gen_additive(7, 3, 6, 1..=100).unwrap();
        let b = gen_additive(7, 3, 6, 1..=100).unwrap();
        let c = gen_additive(8, 3, 6, 1..=100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(gen_additive(1, 2, 3, 0..=5).is_err());
    }

    #[test]
    fn additive_outputs_are_mms_feasible() {
        for seed in 0..5 {
            let p = gen_additive(seed, 2, 6, 1..=20).unwrap();
            for v in p.valuations() {
                assert!(is_mms_feasible(v).unwrap());
                assert!(is_set_monotonic(v).unwrap());
            }
        }
    }

    #[test]
    fn monotone_tables_are_strict_and_monotone() {
        for seed in 0..20 {
            let p = gen_monotone_table(seed, 2, 5).unwrap();
            for v in p.valuations() {
                assert!(is_strict(v).unwrap());
                assert!(is_set_monotonic(v).unwrap());
            }
        }
        assert!(matches!(
            gen_monotone_table(0, 2, 17),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn sized_profile_meets_demands() {
        let specs = parse_specs("arbitrary,1:3").unwrap();
        let p = gen_sized_profile(3, 5, &specs).unwrap();
        assert!(is_size_monotonic_range(p.valuation(1), 1, 3).unwrap());
        let full = gen_sized_profile(
            4,
            5,
            &[
                ClassSpec::SizeMonotonic { k: 1, l: 5 },
                ClassSpec::Arbitrary,
            ],
        )
        .unwrap();
        for k in 1..5 {
            for l in k + 1..=5 {
                assert!(is_size_monotonic_range(full.valuation(0), k, l).unwrap());
            }
        }
        assert!(gen_sized_profile(0, 3, &[ClassSpec::SizeMonotonic { k: 1, l: 4 }]).is_err());
    }

    #[test]
    fn class_spec_parsing() {
        assert_eq!(
            parse_specs("arbitrary, 2:4").unwrap(),
            vec![
                ClassSpec::Arbitrary,
                ClassSpec::SizeMonotonic { k: 2, l: 4 }
            ]
        );
        assert!("3:3".parse::<ClassSpec>().is_err());
        assert!("0:2".parse::<ClassSpec>().is_err());
        assert!("size".parse::<ClassSpec>().is_err());
        assert_eq!(ClassSpec::SizeMonotonic { k: 1, l: 4 }.to_string(), "1:4");
    }

    #[test]
    fn spec_helpers_classify() {
        for seed in 0..10 {
            let specs = thm_n2_specs(seed, 3, 7).unwrap();
            let p = gen_sized_profile(seed, 7, &specs).unwrap();
            assert!(classify_profile(&p, Pattern::ThmN2I).unwrap().is_some());
            let specs = thm_n1_specs(seed, 3, 8).unwrap();
            let p = gen_sized_profile(seed, 8, &specs).unwrap();
            assert!(classify_profile(&p, Pattern::ThmN1Ii).unwrap().is_some());
        }
    }

    #[test]
    fn fixtures_hold() {
        for f in fixtures() {
            f.verify().unwrap();
        }
        let dominant = fixture("additive-dominant").unwrap().valuation;
        assert_eq!(
            size_monotonicity_witness(&dominant, 1, 2).unwrap(),
            Some(MonotonicityWitness {
                smaller: b(&[0]),
                larger: b(&[1, 2])
            })
        );
        assert_eq!(
            size_monotonicity_witness(&dominant, 2, 3).unwrap(),
            Some(MonotonicityWitness {
                smaller: b(&[0, 1]),
                larger: b(&[1, 2, 3])
            })
        );
        assert!(fixture("nope").is_none());
    }
}
