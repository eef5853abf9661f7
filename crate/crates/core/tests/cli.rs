use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lpgen::geometry::CenterPoint;
use lpgen::io::{instance_to_string, read_instance, read_stats};
use lpgen::rng::derive_stream;
use lpgen::support::{build_objective, build_support};
use lpgen::validator::validate_instance;
use lpgen::{draw_candidate, GeneratorParams, LpInstance};
use proptest::prelude::*;

fn lpgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpgen"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_then_validate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.lpp");
    let stats = dir.path().join("p.stats");
    let res = lpgen(&[
        "gen",
        "--n",
        "2",
        "--d",
        "5",
        "--seed",
        "42",
        "--out",
        path(&out),
        "--stats-out",
        path(&stats),
    ]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("2 10 5 42\n"));

    let res = lpgen(&["validate", "--in", path(&out)]);
    assert!(res.status.success());
    assert!(String::from_utf8_lossy(&res.stdout).starts_with("ok"));

    let map = read_stats(fs::read(&stats).unwrap().as_slice()).unwrap();
    let rejected =
        map["rejected_distance"] + map["rejected_objective"] + map["rejected_similarity"];
    assert_eq!(map["candidates_drawn"], 5 + rejected);
    assert!(map.contains_key("rounds") && map.contains_key("wall_time_ms"));
}

#[test]
fn parallel_engine_files_validate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("par.lpp");
    let stats = dir.path().join("par.stats");
    let res = lpgen(&[
        "gen",
        "--n",
        "10",
        "--d",
        "20",
        "--seed",
        "9",
        "--workers",
        "8",
        "--engine",
        "par",
        "--out",
        path(&out),
        "--stats-out",
        path(&stats),
    ]);
    assert!(res.status.success());
    assert!(lpgen(&["validate", "--in", path(&out)]).status.success());
    let map = read_stats(fs::read(&stats).unwrap().as_slice()).unwrap();
    assert!(map["rounds"] >= 3);
    assert_eq!(
        map["candidates_drawn"],
        map["accepted"]
            + map["rejected_distance"]
            + map["rejected_objective"]
            + map["rejected_similarity"]
            + map["discarded"]
    );
}

#[test]
fn support_only_stats_are_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.lpp");
    let stats = dir.path().join("s.stats");
    let res = lpgen(&[
        "gen",
        "--d",
        "0",
        "--out",
        path(&out),
        "--stats-out",
        path(&stats),
    ]);
    assert!(res.status.success());
    let map = read_stats(fs::read(&stats).unwrap().as_slice()).unwrap();
    for key in [
        "candidates_drawn",
        "rejected_distance",
        "rejected_objective",
        "rejected_similarity",
    ] {
        assert_eq!(map[key], 0, "{key}");
    }
}

#[test]
fn invalid_parameters_are_reported_together() {
    let res = lpgen(&["gen", "--theta", "150", "--alpha", "200", "--lmax", "0.8"]);
    assert!(!res.status.success());
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("theta ≤ alpha/2"), "{err}");
    assert!(err.contains("l_max ≤ 0.7"), "{err}");
}

#[test]
fn unknown_flag_fails() {
    assert!(!lpgen(&["gen", "--bogus", "1"]).status.success());
    assert!(!lpgen(&["frobnicate"]).status.success());
}

#[test]
fn validate_reports_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.lpp");
    assert!(lpgen(&["gen", "--seed", "3", "--out", path(&out)])
        .status
        .success());
    let text = fs::read_to_string(&out).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    // Duplicate the first random row over the second one.
    lines[7] = lines[6].clone();
    fs::write(&out, lines.join("\n") + "\n").unwrap();
    let res = lpgen(&["validate", "--in", path(&out)]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stdout).contains("dissimilarity"));
}

#[test]
fn malformed_file_is_a_diagnosed_failure() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.lpp");
    fs::write(&bad, "1 3 0 0\n1 200\n-1 x\n1 100\n100\n").unwrap();
    let res = lpgen(&["validate", "--in", path(&bad)]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("line 3"));
    let missing = dir.path().join("missing.lpp");
    assert!(!lpgen(&["validate", "--in", path(&missing)])
        .status
        .success());
}

#[test]
fn render_requires_two_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("n3.lpp");
    assert!(lpgen(&["gen", "--n", "3", "--d", "2", "--out", path(&out)])
        .status
        .success());
    let res = lpgen(&["render", "--in", path(&out)]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("two-dimensional"));
}

#[test]
fn bench_prints_a_table() {
    let res = lpgen(&[
        "bench",
        "--n",
        "2",
        "--d",
        "5",
        "--seed",
        "1",
        "--workers-list",
        "1,8",
    ]);
    assert!(res.status.success());
    let out = String::from_utf8_lossy(&res.stdout);
    assert!(out.contains("wall_time_ms[1] = "));
    assert!(out.contains("speedup[1] = 1.000"));
    assert!(out.contains("wall_time_ms[8] = "));
}

#[test]
fn unwritable_destination() {
    let res = lpgen(&["gen", "--out", "/nonexistent-dir/x.lpp"]);
    assert!(!res.status.success());
}

#[test]
fn validated_instance_from_file_matches_generator() {
    let p = GeneratorParams {
        n: 5,
        d: 8,
        seed: 11,
        ..Default::default()
    };
    let (inst, _) = lpgen::generate_sequential(&p).unwrap();
    let back = read_instance(instance_to_string(&inst).as_bytes(), &p).unwrap();
    assert_eq!(back, inst);
    assert!(validate_instance(&back).ok());
}

fn arbitrary_instance(n: usize, d: usize, seed: u64, alpha: f64) -> LpInstance {
    let params = GeneratorParams {
        n,
        d,
        seed,
        alpha,
        theta: alpha / 3.0,
        rho: alpha / 7.0,
        ..Default::default()
    };
    let mut rng = derive_stream(seed, 0);
    let h = CenterPoint::new(n, alpha);
    LpInstance {
        support: build_support(n, alpha),
        random: (0..d)
            .map(|_| draw_candidate(&mut rng, &params, &h))
            .collect(),
        objective: build_objective(n, params.theta),
        params,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn write_read_round_trip(
        n in prop::sample::select(vec![1usize, 2, 5, 10]),
        d in prop::sample::select(vec![0usize, 1, 5]),
        seed in any::<u64>(),
        alpha in 1e-3f64..1e6,
    ) {
        let inst = arbitrary_instance(n, d, seed, alpha);
        let text = instance_to_string(&inst);
        let back = read_instance(text.as_bytes(), &inst.params).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(instance_to_string(&back), text);
    }
}
