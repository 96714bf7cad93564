use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn efx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_efx"))
        .args(args)
        .env_remove("EFX_BUDGET")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn gen(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let out = path(dir, name);
    let mut all = vec!["gen"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", s(&out)]);
    let o = efx(&all);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn gen_additive_round_trips() {
    let dir = TempDir::new().unwrap();
    let f = gen(
        &dir,
        "a.txt",
        &[
            "--family", "additive", "--n", "3", "--m", "7", "--seed", "1",
        ],
    );
    let text = fs::read_to_string(&f).unwrap();
    let p = efx_core::format::parse_instance(&text).unwrap();
    assert_eq!((p.n(), p.m()), (3, 7));
    assert_eq!(efx_core::format::write_instance(&p).unwrap(), text);
    let again = gen(
        &dir,
        "b.txt",
        &[
            "--family", "additive", "--n", "3", "--m", "7", "--seed", "1",
        ],
    );
    assert_eq!(fs::read_to_string(again).unwrap(), text);
}

#[test]
fn gen_fixture_writes_table() {
    let o = efx(&["gen", "--family", "fixture", "--name", "mms-violation"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("agent 0 table: 0 1 2 10 3 11 8 20 4 7 6 21 9 22 23 30"));
    assert_eq!(
        code(&efx(&["gen", "--family", "fixture", "--name", "nope"])),
        64
    );
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(code(&efx(&["gen", "--family", "nonsense"])), 64);
    assert_eq!(code(&efx(&["gen", "--family", "additive"])), 64);
    assert_eq!(
        code(&efx(&[
            "gen", "--family", "sized", "--m", "5", "--spec", "1:1"
        ])),
        64
    );
    assert_eq!(code(&efx(&["frobnicate"])), 64);
    assert_eq!(code(&efx(&["--help"])), 0);
}

#[test]
fn sized_instance_solves_with_thm_n2() {
    let dir = TempDir::new().unwrap();
    let f = gen(
        &dir,
        "s.txt",
        &[
            "--family",
            "sized",
            "--spec",
            "arbitrary,arbitrary,1:4",
            "--n",
            "3",
            "--m",
            "7",
        ],
    );
    let c = efx(&["classify", "--in", s(&f)]);
    assert_eq!(code(&c), 0);
    assert!(stdout(&c).contains("pattern ThmN2-i"));

    let out = path(&dir, "alloc.txt");
    let trace = path(&dir, "trace.json");
    let o = efx(&[
        "solve",
        "--algo",
        "thm-n2",
        "--in",
        s(&f),
        "--out",
        s(&out),
        "--trace",
        s(&trace),
        "--json",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let line: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(line["method"], "thm-n2");
    assert_eq!(line["efx"], true);
    let t: serde_json::Value = serde_json::from_str(&fs::read_to_string(trace).unwrap()).unwrap();
    assert!(t["initial"]["w"].as_array().is_some_and(|w| w.len() == 1));

    assert_eq!(
        code(&efx(&["check", "--in", s(&f), "--allocation", s(&out)])),
        0
    );
}

#[test]
fn thm_n1_instance_is_certified() {
    let dir = TempDir::new().unwrap();
    let f = gen(
        &dir,
        "s.txt",
        &[
            "--family",
            "sized",
            "--spec",
            "arbitrary,1:3,1:3",
            "--m",
            "7",
            "--seed",
            "4",
        ],
    );
    let out = path(&dir, "alloc.txt");
    let o = efx(&["solve", "--algo", "thm-n1", "--in", s(&f), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        code(&efx(&[
            "check",
            "--in",
            s(&f),
            "--allocation",
            s(&out),
            "--json"
        ])),
        0
    );
}

#[test]
fn solve_exit_codes() {
    let dir = TempDir::new().unwrap();
    let small = gen(
        &dir,
        "small.txt",
        &["--family", "additive", "--n", "3", "--m", "2"],
    );
    assert_eq!(
        code(&efx(&["solve", "--algo", "thm-n2", "--in", s(&small)])),
        2
    );
    assert_eq!(
        code(&efx(&["solve", "--algo", "trivial", "--in", s(&small)])),
        0
    );

    let b = gen(
        &dir,
        "b.txt",
        &["--family", "additive", "--n", "2", "--m", "3"],
    );
    assert_eq!(code(&efx(&["solve", "--algo", "brute", "--in", s(&b)])), 0);
    assert_eq!(code(&efx(&["solve", "--algo", "auto", "--in", s(&b)])), 0);

    let budget = Command::new(env!("CARGO_BIN_EXE_efx"))
        .args(["solve", "--algo", "brute", "--in", s(&b)])
        .env("EFX_BUDGET", "4")
        .output()
        .unwrap();
    assert_eq!(code(&budget), 2);

    let garbage = path(&dir, "garbage.txt");
    fs::write(&garbage, "efx-instance v1\nn two\n").unwrap();
    assert_eq!(code(&efx(&["solve", "--in", s(&garbage)])), 65);
}

#[test]
fn check_reports_violations_and_structure() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("i.txt");
    fs::write(
        &f,
        "efx-instance v1\nn 2\nm 3\nagent 0 additive: 1 5 5\nagent 1 additive: 1 5 5\n",
    )
    .unwrap();
    let envious = path(&dir, "envious.txt");
    fs::write(&envious, "agent 0: 0\nagent 1: 1 2\n").unwrap();
    let o = efx(&["check", "--in", s(&f), "--allocation", s(&envious)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("agent 0 envies agent 1"));

    let overlap = path(&dir, "overlap.txt");
    fs::write(&overlap, "agent 0: 0 1\nagent 1: 1 2\n").unwrap();
    assert_eq!(
        code(&efx(&["check", "--in", s(&f), "--allocation", s(&overlap)])),
        65
    );
}

#[test]
fn bench_rows_are_certified_and_deterministic() {
    let run = || {
        efx(&[
            "bench", "--suite", "thm-n2", "--trials", "100", "--seed", "9",
        ])
    };
    let (a, b) = (run(), run());
    assert_eq!(code(&a), 0);
    let strip = |o: &Output| -> Vec<String> {
        stdout(o)
            .lines()
            .map(|l| {
                let mut f: Vec<&str> = l.split(',').collect();
                f.remove(6);
                f.join(",")
            })
            .collect()
    };
    let rows = strip(&a);
    assert_eq!(rows.len(), 101);
    assert!(rows[1..]
        .iter()
        .all(|r| r.split(',').nth(6) == Some("true")));
    assert_eq!(rows, strip(&b));

    let empty = efx(&["bench", "--suite", "oracle-cross", "--trials", "0"]);
    assert_eq!(code(&empty), 0);
    assert_eq!(stdout(&empty).lines().count(), 1);

    let cross = efx(&[
        "bench",
        "--suite",
        "oracle-cross",
        "--trials",
        "20",
        "--max-m",
        "7",
    ]);
    assert_eq!(code(&cross), 0);
    assert!(stdout(&cross)
        .lines()
        .skip(1)
        .all(|l| l.ends_with(",true,true")));
}
