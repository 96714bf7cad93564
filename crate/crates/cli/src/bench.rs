use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use efx_core::allocators::{allocate_thm_n1, allocate_thm_n2};
use efx_core::generators::{gen_sized_profile, thm_n1_specs, thm_n2_specs, MAX_GENERATED_GOODS};
use efx_core::oracle::brute_force_first;
use efx_core::predicates::{check_efx, classify_profile, Pattern, PatternFamily};
use efx_core::{Allocation, Profile, Result};

use crate::commands::emit;
use crate::{BenchArgs, Failure, Suite, EXIT_MISMATCH};

pub const HEADER: &str = "trial,seed,n,m,method,loop_depth,wall_ms,efx_certified,oracle_agreement";

/// Largest `n^m` the oracle column enumerates.
const ORACLE_CAP: u64 = 1_000_000;

struct Row {
    trial: u64,
    seed: u64,
    n: usize,
    m: usize,
    method: String,
    depth: usize,
    wall_ms: f64,
    certified: bool,
    oracle: Option<bool>,
}

fn construct(p: &Profile, family: PatternFamily) -> Result<(Allocation, String, usize)> {
    for pattern in Pattern::ALL.into_iter().filter(|p| p.family() == family) {
        let Some(roles) = classify_profile(p, pattern)? else {
            continue;
        };
        return match family {
            PatternFamily::OneFree => Ok((allocate_thm_n1(p, &roles)?, pattern.name().into(), 0)),
            PatternFamily::TwoFree => {
                let (a, t) = allocate_thm_n2(p, &roles)?;
                Ok((a, pattern.name().into(), t.depth()))
            }
        };
    }
    Err(efx_core::Error::Precondition("no pattern applies".into()))
}

fn trial(a: &BenchArgs, t: u64) -> Result<Row> {
    let seed = a.seed.wrapping_add(t);
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let n = r.random_range(2..=a.max_n.min(a.max_m - 1));
    let m = r.random_range(n + 1..=a.max_m);
    let family = match a.suite {
        Suite::ThmN1 => PatternFamily::OneFree,
        Suite::ThmN2 => PatternFamily::TwoFree,
        Suite::OracleCross if t.is_multiple_of(2) => PatternFamily::OneFree,
        Suite::OracleCross => PatternFamily::TwoFree,
    };
    let specs = match family {
        PatternFamily::OneFree => thm_n1_specs(seed, n, m)?,
        PatternFamily::TwoFree => thm_n2_specs(seed, n, m)?,
    };
    let p = gen_sized_profile(seed, m, &specs)?;
    let start = Instant::now();
    let outcome = construct(&p, family);
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let (alloc, method, depth) = match outcome {
        Ok((a, method, depth)) => (Some(a), method, depth),
        Err(e) => (None, format!("error: {e}").replace(',', ";"), 0),
    };
    let certified = match &alloc {
        Some(x) => check_efx(&p, x)?.is_efx(),
        None => false,
    };
    let oracle_on = a.oracle || matches!(a.suite, Suite::OracleCross);
    let within_cap = (n as u64)
        .checked_pow(m as u32)
        .is_some_and(|c| c <= ORACLE_CAP);
    let oracle = if oracle_on && within_cap {
        Some(certified && brute_force_first(&p, ORACLE_CAP)?.is_some())
    } else {
        None
    };
    Ok(Row {
        trial: t,
        seed,
        n,
        m,
        method,
        depth,
        wall_ms,
        certified,
        oracle,
    })
}

pub(crate) fn run(a: BenchArgs) -> Result<(), Failure> {
    if a.max_n < 2 || a.max_m < 3 || a.max_m > MAX_GENERATED_GOODS {
        return Err(Failure::Usage(format!(
            "need --max-n ≥ 2 and 3 ≤ --max-m ≤ {MAX_GENERATED_GOODS}"
        )));
    }
    let rows: Vec<Row> = (0..a.trials)
        .into_par_iter()
        .map(|t| trial(&a, t))
        .collect::<Result<_>>()?;
    let mut csv = String::from(HEADER);
    csv.push('\n');
    for r in &rows {
        let oracle = r.oracle.map(|b| b.to_string()).unwrap_or_default();
        writeln!(
            csv,
            "{},{},{},{},{},{},{:.3},{},{oracle}",
            r.trial, r.seed, r.n, r.m, r.method, r.depth, r.wall_ms, r.certified
        )
        .unwrap();
    }
    emit(a.out.as_ref(), &csv)?;
    let uncertified = rows
        .iter()
        .filter(|r| !r.certified || r.oracle == Some(false))
        .count();
    if uncertified > 0 {
        eprintln!("{uncertified} trial(s) not certified or not matching the oracle");
        return Err(Failure::Exit(EXIT_MISMATCH));
    }
    Ok(())
}
