use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;

use efx_core::allocators::{
    allocate_thm_n1, allocate_thm_n2, allocate_trivial, auto_allocate_with_budget, AutoOutcome,
    Method,
};
use efx_core::format::{parse_allocation, parse_instance, write_allocation, write_instance};
use efx_core::generators::{
    fixture, fixtures, gen_additive, gen_monotone_table, gen_sized_profile, parse_specs,
};
use efx_core::oracle::{brute_force_first, DEFAULT_BUDGET};
use efx_core::predicates::{
    applicable_patterns, check_efx, classify_profile, is_mms_feasible, is_set_monotonic, is_strict,
    maximal_size_monotonic_ranges, Pattern, PatternFamily, MMS_MAX_GOODS,
};
use efx_core::strictify::strictify_profile;
use efx_core::{Error, Profile};

use crate::{
    Algo, CheckArgs, ClassifyArgs, Failure, Family, GenArgs, SolveArgs, EXIT_MISMATCH,
    EXIT_NONE_FOUND,
};

pub(crate) fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

/// Writes to `path`, or to stdout when absent.
pub(crate) fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(p.clone(), e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|e| Failure::Io(PathBuf::from("<stdout>"), e))
        }
    }
}

fn load_instance(path: &Path) -> Result<Profile, Failure> {
    Ok(parse_instance(&read(path)?)?)
}

fn required<T>(v: Option<T>, flag: &str, family: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("--{flag} is required for --family {family}")))
}

pub(crate) fn gen(a: GenArgs) -> Result<(), Failure> {
    let profile = match a.family {
        Family::Additive => {
            if a.min_weight == 0 || a.min_weight > a.max_weight {
                return Err(Failure::Usage(
                    "weights need 1 ≤ --min-weight ≤ --max-weight".into(),
                ));
            }
            let m = required(a.m, "m", "additive")?;
            gen_additive(a.seed, a.n.unwrap_or(2), m, a.min_weight..=a.max_weight)?
        }
        Family::MonotoneTable => {
            let m = required(a.m, "m", "monotone-table")?;
            gen_monotone_table(a.seed, a.n.unwrap_or(2), m)?
        }
        Family::Sized => {
            let m = required(a.m, "m", "sized")?;
            let spec = required(a.spec.as_deref(), "spec", "sized")?;
            let specs = parse_specs(spec).map_err(|e| Failure::Usage(e.to_string()))?;
            if a.n.is_some_and(|n| n != specs.len()) {
                return Err(Failure::Usage(format!(
                    "--n {} does not match the {} entries of --spec",
                    a.n.unwrap(),
                    specs.len()
                )));
            }
            gen_sized_profile(a.seed, m, &specs)?
        }
        Family::Fixture => {
            let name = required(a.name.as_deref(), "name", "fixture")?;
            let f = fixture(name).ok_or_else(|| {
                let known: Vec<&str> = fixtures().iter().map(|f| f.name).collect();
                Failure::Usage(format!(
                    "unknown fixture {name:?}; known: {}",
                    known.join(", ")
                ))
            })?;
            if a.m.is_some_and(|m| m != f.valuation.m()) {
                return Err(Failure::Usage(format!(
                    "fixture {name} has m = {}",
                    f.valuation.m()
                )));
            }
            f.profile(a.n.unwrap_or(2))?
        }
    };
    emit(a.out.as_ref(), &write_instance(&profile)?)
}

fn budget() -> Result<u64, Failure> {
    match std::env::var("EFX_BUDGET") {
        Ok(s) => s.trim().parse().map_err(|_| {
            Failure::Usage(format!(
                "EFX_BUDGET must be a nonnegative integer, got {s:?}"
            ))
        }),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn by_family(profile: &Profile, family: PatternFamily) -> Result<AutoOutcome, Failure> {
    let strict = strictify_profile(profile);
    for pattern in Pattern::ALL.into_iter().filter(|p| p.family() == family) {
        let Some(roles) = classify_profile(&strict, pattern)? else {
            continue;
        };
        let (allocation, method, trace) = match family {
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
    let name = match family {
        PatternFamily::OneFree => "one-free",
        PatternFamily::TwoFree => "two-free",
    };
    Err(Error::Precondition(format!("no {name} pattern applies to this instance")).into())
}

pub(crate) fn solve(a: SolveArgs) -> Result<(), Failure> {
    let profile = load_instance(&a.input)?;
    let budget = budget()?;
    let outcome = match a.algo {
        Algo::Auto => auto_allocate_with_budget(&profile, budget)?,
        Algo::Trivial => AutoOutcome {
            allocation: Some(allocate_trivial(&profile)?),
            method: Method::Trivial,
            roles: None,
            trace: None,
        },
        Algo::ThmN1 => by_family(&profile, PatternFamily::OneFree)?,
        Algo::ThmN2 => by_family(&profile, PatternFamily::TwoFree)?,
        Algo::Brute => {
            let found = brute_force_first(&profile, budget)?;
            AutoOutcome {
                method: if found.is_some() {
                    Method::BruteForce
                } else {
                    Method::NoneFound
                },
                allocation: found,
                roles: None,
                trace: None,
            }
        }
    };
    if let Some(path) = &a.trace {
        let text = serde_json::to_string_pretty(&outcome.trace).expect("trace serializes");
        emit(Some(path), &(text + "\n"))?;
    }
    let Some(alloc) = &outcome.allocation else {
        eprintln!("no EFX allocation exists (exhaustive search)");
        if a.json {
            println!(
                "{}",
                json!({ "method": outcome.method.tag(), "allocation": null })
            );
        }
        return Err(Failure::Exit(EXIT_NONE_FOUND));
    };
    let report = check_efx(&profile, alloc)?;
    if !report.is_efx() {
        eprintln!(
            "error: {} output fails certification with {} violation(s)",
            outcome.method,
            report.violations.len()
        );
        return Err(Failure::Exit(EXIT_MISMATCH));
    }
    eprintln!("method: {}", outcome.method);
    emit(a.out.as_ref(), &write_allocation(alloc))?;
    if a.json {
        let line = json!({
            "method": outcome.method.tag(),
            "pattern": outcome.roles.as_ref().map(|r| r.pattern.name()),
            "allocation": alloc.bundles(),
            "loop_depth": outcome.trace.as_ref().map(|t| t.depth()),
            "efx": true,
        });
        println!("{line}");
    }
    Ok(())
}

pub(crate) fn check(a: CheckArgs) -> Result<(), Failure> {
    let profile = load_instance(&a.input)?;
    let alloc = parse_allocation(&read(&a.allocation)?, profile.m())?;
    let report = check_efx(&profile, &alloc)?;
    if a.json {
        println!(
            "{}",
            json!({ "efx": report.is_efx(), "violations": report.violations })
        );
    } else if report.is_efx() {
        println!("EFX: no violations");
    } else {
        println!("not EFX: {} violation(s)", report.violations.len());
        for v in &report.violations {
            println!(
                "agent {} envies agent {} without good {}",
                v.envier, v.envied, v.good
            );
        }
    }
    if report.is_efx() {
        Ok(())
    } else {
        Err(Failure::Exit(EXIT_NONE_FOUND))
    }
}

pub(crate) fn classify(a: ClassifyArgs) -> Result<(), Failure> {
    let profile = load_instance(&a.input)?;
    let m = profile.m();
    let mut agents = Vec::new();
    for v in profile.valuations() {
        let mms = if m <= MMS_MAX_GOODS {
            Some(is_mms_feasible(v)?)
        } else {
            None
        };
        agents.push(json!({
            "size_monotonic_ranges": maximal_size_monotonic_ranges(v)?,
            "set_monotonic": is_set_monotonic(v)?,
            "strict": is_strict(v)?,
            "mms_feasible": mms,
        }));
    }
    let patterns = if m <= profile.n() {
        Vec::new()
    } else {
        applicable_patterns(&strictify_profile(&profile))?
    };
    if a.json {
        let line = json!({
            "n": profile.n(),
            "m": m,
            "agents": agents,
            "singletons_suffice": m <= profile.n(),
            "patterns": patterns,
        });
        println!("{line}");
        return Ok(());
    }
    println!("n = {}, m = {m}", profile.n());
    for (i, info) in agents.iter().enumerate() {
        let ranges: Vec<String> = info["size_monotonic_ranges"]
            .as_array()
            .into_iter()
            .flatten()
            .map(|r| format!("<{},{}>", r[0], r[1]))
            .collect();
        let mms = match info["mms_feasible"].as_bool() {
            Some(b) => b.to_string(),
            None => format!("skipped (m > {MMS_MAX_GOODS})"),
        };
        println!(
            "agent {i}: size monotonic on {}; set monotonic: {}; strict: {}; MMS-feasible: {mms}",
            if ranges.is_empty() {
                "none".to_string()
            } else {
                ranges.join(" ")
            },
            info["set_monotonic"],
            info["strict"],
        );
    }
    if m <= profile.n() {
        println!("m <= n: the singleton allocation is EFX");
    } else if patterns.is_empty() {
        println!("no construction pattern applies");
    }
    for roles in &patterns {
        let groups: Vec<String> = roles
            .order
            .iter()
            .zip(&roles.groups)
            .map(|(agent, g)| format!("{agent}:{g:?}"))
            .collect();
        println!(
            "pattern {} (ell = {}, r = {}): {}",
            roles.pattern,
            roles.ell,
            roles.r,
            groups.join(" ")
        );
    }
    Ok(())
}
