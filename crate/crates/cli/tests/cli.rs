use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treasury_kelly::{
    growth_rate, optimal_fraction, robust_report, solve_uncertainty_set, BinaryGame,
    DivergenceSpec, Fraction,
};

fn tkelly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tkelly"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

/// Value column of a `label value` table row.
fn cell(text: &str, label: &str, column: usize) -> f64 {
    text.lines()
        .find(|l| l.split_whitespace().next() == Some(label))
        .and_then(|l| l.split_whitespace().nth(column))
        .unwrap_or_else(|| panic!("no {label} in\n{text}"))
        .parse()
        .unwrap()
}

/// `a` agrees with `b` to nine significant digits.
fn same_to_print(a: f64, b: f64) {
    assert!((a - b).abs() <= 5e-9 * b.abs().max(1e-300), "{a} vs {b}");
}

#[test]
fn kelly_commands() {
    assert_eq!(
        stdout(&tkelly(&["kelly", "optimal", "--p", "0.75"])),
        "0.5\n"
    );
    let bits = stdout(&tkelly(&[
        "kelly", "growth", "--p", "0.75", "--f", "0.5", "--unit", "bits",
    ]));
    assert!((bits.trim().parse::<f64>().unwrap() - 0.188_722).abs() < 1e-6);
    let out = stdout(&tkelly(&[
        "kelly",
        "expand",
        "--p",
        "0.6",
        "--epsilon",
        "0.01",
        "--order",
        "3",
    ]));
    assert!(cell(&out, "difference", 1).abs() < 1e-8);
}

#[test]
fn fraction_commands() {
    let out = stdout(&tkelly(&[
        "fraction", "solve", "--q", "0.6", "--alpha", "0",
    ]));
    assert_eq!(
        (cell(&out, "p_minus", 1), cell(&out, "p_plus", 1)),
        (0.6, 0.6)
    );
    let args = [
        "fraction",
        "solve",
        "--q",
        "0.6",
        "--alpha",
        "0.0025",
        "--divergence",
        "se",
    ];
    let out = stdout(&tkelly(&args));
    assert_eq!(
        (cell(&out, "p_minus", 1), cell(&out, "p_plus", 1)),
        (0.55, 0.65)
    );
    let args = [
        "fraction",
        "robust",
        "--q",
        "0.6",
        "--alpha",
        "0.005",
        "--divergence",
        "kl",
        "--lambda",
        "1",
    ];
    let out = stdout(&tkelly(&args));
    assert!(cell(&out, "equal", 1) < 0.2);
    for rule in ["kelly", "worst", "equal", "best", "heuristic"] {
        cell(&out, rule, 1);
    }
}

#[test]
fn printed_numbers_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let p: f64 = rng.gen_range(0.01..0.99);
        let f: f64 = rng.gen_range(-0.99..0.99);
        let (ps, fs) = (format!("{p}"), format!("{f}"));
        let g = stdout(&tkelly(&["kelly", "growth", "--p", &ps, "--f", &fs]));
        let g: f64 = g.trim().parse().unwrap();
        same_to_print(
            g,
            growth_rate(BinaryGame::new(p).unwrap(), Fraction::new(f).unwrap()).nats(),
        );
        let o: f64 = stdout(&tkelly(&["kelly", "optimal", "--p", &ps]))
            .trim()
            .parse()
            .unwrap();
        same_to_print(o, optimal_fraction(BinaryGame::new(p).unwrap()).value());

        let q: f64 = rng.gen_range(0.3..0.9);
        let alpha: f64 = rng.gen_range(0.0..0.02);
        let (qs, alphas) = (format!("{q}"), format!("{alpha}"));
        let out = stdout(&tkelly(&[
            "fraction", "solve", "--q", &qs, "--alpha", &alphas,
        ]));
        let set = solve_uncertainty_set(&DivergenceSpec::Kl, q, alpha).unwrap();
        same_to_print(cell(&out, "p_minus", 1), set.p_minus());
        same_to_print(cell(&out, "p_plus", 1), set.p_plus());
        let out = stdout(&tkelly(&[
            "fraction", "robust", "--q", &qs, "--alpha", &alphas,
        ]));
        let r = robust_report(&DivergenceSpec::Kl, q, alpha, 1.0).unwrap();
        same_to_print(cell(&out, "equal", 1), r.equal.value());
        same_to_print(cell(&out, "heuristic", 1), r.heuristic.value());
    }
}

#[test]
fn exit_codes_on_fuzzed_flags() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let values = [
        "0.6", "0.5", "-0.2", "1.5", "0", "1", "abc", "", "nan", "1e-3", "-1e-3",
    ];
    let flags = [
        "--p",
        "--f",
        "--epsilon",
        "--order",
        "--unit",
        "--q",
        "--alpha",
        "--lambda",
        "--divergence",
        "--bogus",
    ];
    let commands: [&[&str]; 7] = [
        &["kelly", "growth"],
        &["kelly", "optimal"],
        &["kelly", "expand"],
        &["fraction", "solve"],
        &["fraction", "robust"],
        &["fraction", "series"],
        &["kelly", "nope"],
    ];
    for _ in 0..150 {
        let mut args: Vec<&str> = commands.choose(&mut rng).unwrap().to_vec();
        for _ in 0..rng.gen_range(0..5) {
            args.push(flags.choose(&mut rng).unwrap());
            args.push(values.choose(&mut rng).unwrap());
        }
        let out = tkelly(&args);
        let code = out.status.code().unwrap();
        assert!([0, 1, 2].contains(&code), "{args:?} -> {code}");
        if code == 0 {
            assert!(out.stderr.is_empty(), "{args:?}");
            assert!(!out.stdout.is_empty(), "{args:?}");
        } else {
            assert!(out.stdout.is_empty(), "{args:?}");
            assert!(!out.stderr.is_empty(), "{args:?}");
        }
    }
}

#[test]
fn domain_and_usage_errors() {
    let code = |args: &[&str]| tkelly(args).status.code().unwrap();
    assert_eq!(code(&["kelly", "growth", "--p", "1.5", "--f", "0.1"]), 1);
    assert_eq!(code(&["kelly", "growth", "--p", "0.6", "--f", "1"]), 1);
    assert_eq!(
        code(&[
            "kelly",
            "expand",
            "--p",
            "0.6",
            "--epsilon",
            "0.1",
            "--order",
            "4"
        ]),
        1
    );
    assert_eq!(code(&["kelly", "growth", "--p", "0.6"]), 2);
    assert_eq!(code(&["kelly", "growth", "--p", "x", "--f", "0.1"]), 2);
    assert_eq!(
        code(&["kelly", "growth", "--p", "0.6", "--f", "0.1", "--unit", "hartleys"]),
        2
    );
    let no_root = tkelly(&["fraction", "solve", "--q", "0.6", "--alpha", "5"]);
    assert_eq!(no_root.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&no_root.stderr).contains("no lower root"));
    assert_eq!(
        code(&["fraction", "robust", "--q", "0.6", "--alpha", "0.01", "--lambda", "-1"]),
        1
    );
    assert_eq!(code(&["flywheel", "run"]), 2);
    assert_eq!(
        code(&["flywheel", "run", "--config", "/nonexistent/x.toml"]),
        2
    );
}

#[test]
fn invalid_config_reports_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    let text = std::fs::read_to_string(scenario("accretion.toml"))
        .unwrap()
        .replace("cash = 1.0", "cash = 1.0\nleverage = 3");
    std::fs::write(&bad, text).unwrap();
    let out = tkelly(&["flywheel", "run", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 16") && err.contains("leverage"), "{err}");

    let semantic = dir.path().join("semantic.toml");
    let text = std::fs::read_to_string(scenario("accretion.toml"))
        .unwrap()
        .replace("haircut = [0.5]", "haircut = [1.5]");
    std::fs::write(&semantic, text).unwrap();
    let out = tkelly(&["flywheel", "run", "--config", semantic.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("haircut"));
}

#[test]
fn flywheel_example_table() {
    let out = stdout(&tkelly(&["flywheel", "example"]));
    assert_eq!(
        (cell(&out, "share_price", 1), cell(&out, "share_price", 2)),
        (1.0, 1.6)
    );
    assert_eq!((cell(&out, "mnav", 1), cell(&out, "mnav", 2)), (4.0, 4.0));
    assert_eq!(
        (
            cell(&out, "btc_per_share", 1),
            cell(&out, "btc_per_share", 2)
        ),
        (0.25, 0.4)
    );
    assert_eq!(cell(&out, "share_price_change", 1), 0.6);
}

#[test]
fn accretion_run_is_increasing() {
    let config = scenario("accretion.toml");
    let out = tkelly(&["flywheel", "run", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("step,shares,tokens,"));
    let bps: Vec<f64> = lines
        .map(|l| l.split(',').nth(6).unwrap().parse().unwrap())
        .collect();
    assert_eq!(bps.len(), 10);
    assert!(bps.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn batch_matches_single_runs() {
    let dir = tempfile::tempdir().unwrap();
    let configs = [scenario("accretion.toml"), scenario("cascade.toml")];
    let mut args = vec![
        "flywheel",
        "run",
        "--jobs",
        "2",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ];
    for c in &configs {
        args.extend(["--config", c.to_str().unwrap()]);
    }
    assert_eq!(tkelly(&args).status.code(), Some(0));
    for (c, stem) in configs.iter().zip(["accretion", "cascade"]) {
        let single = tkelly(&["flywheel", "run", "--config", c.to_str().unwrap()]).stdout;
        let written = std::fs::read(dir.path().join(format!("{stem}.csv"))).unwrap();
        assert_eq!(single, written);
    }

    let out_file = dir.path().join("stress.csv");
    let args = [
        "flywheel",
        "stress",
        "--config",
        configs[1].to_str().unwrap(),
        "--out",
        out_file.to_str().unwrap(),
    ];
    let out = tkelly(&args);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(&out_file).unwrap();
    assert!(csv.starts_with("shock_kind,magnitude,rounds,converged,"));
    assert_eq!(csv.lines().count(), 4);

    let two = tkelly(&[
        "flywheel",
        "run",
        "--config",
        configs[0].to_str().unwrap(),
        "--config",
        configs[1].to_str().unwrap(),
    ]);
    assert_eq!(two.status.code(), Some(2));
}
