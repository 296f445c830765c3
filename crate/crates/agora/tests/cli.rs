//! End-to-end tests of the `gen` / `run` / `report` commands: file layouts,
//! the public/private boundary at the file layer, manifest replay, error
//! reporting and exit codes.

use std::fs;
use std::path::Path;
use std::process::Command;

use agora::cli::{
    cmd_gen, cmd_report, cmd_run, DecisionFile, GenOptions, ReportFormat, ReportOptions,
    RunOptions, ScoreFile,
};
use agora::error::Error;
use agora::manifest::RunManifest;

fn small_gen(out: &Path) -> GenOptions {
    GenOptions {
        seed: 7,
        out: out.to_path_buf(),
        count: 3,
        k: 5,
        dim: 6,
        categories: 4,
        size_min: 80,
        size_max: 160,
        acquirer_size: 60,
        ..GenOptions::default()
    }
}

#[test]
fn gen_writes_markets_and_a_sealed_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let paths = cmd_gen(&small_gen(dir.path())).unwrap();
    assert_eq!(paths.len(), 3);
    for (i, p) in paths.iter().enumerate() {
        assert_eq!(
            p.file_name().unwrap().to_str().unwrap(),
            format!("market_{}.json", i + 1)
        );
        assert!(p.is_file());
    }
    let manifest: RunManifest =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert!(manifest.verify());
    assert_eq!(manifest.market_seeds.len(), 3);

    // Every market file embeds the manifest digest.
    let text = fs::read_to_string(&paths[0]).unwrap();
    assert!(text.contains(&manifest.digest));
}

#[test]
fn gen_builds_a_minimal_single_provider_market() {
    let dir = tempfile::tempdir().unwrap();
    let opts = GenOptions {
        count: 1,
        k: 1,
        dim: 4,
        categories: 2,
        size_min: 30,
        size_max: 40,
        acquirer_size: 20,
        ..small_gen(dir.path())
    };
    let paths = cmd_gen(&opts).unwrap();
    assert_eq!(paths.len(), 1);
    let scores = cmd_run(&RunOptions {
        markets: dir.path().to_path_buf(),
        strategy: "single:0".into(),
        ..RunOptions::default()
    })
    .unwrap();
    assert_eq!(scores.len(), 1);
}

#[test]
fn gen_replay_from_manifest_reproduces_identical_bytes() {
    let root = tempfile::tempdir().unwrap();
    let first = root.path().join("first");
    let replay = root.path().join("replay");
    cmd_gen(&small_gen(&first)).unwrap();
    cmd_gen(&GenOptions {
        out: replay.clone(),
        from_manifest: Some(first.join("manifest.json")),
        ..GenOptions::default()
    })
    .unwrap();
    for i in 1..=3 {
        let name = format!("market_{i}.json");
        assert_eq!(
            fs::read(first.join(&name)).unwrap(),
            fs::read(replay.join(&name)).unwrap(),
            "{name} must replay identically"
        );
    }
}

#[test]
fn public_only_replay_stays_public_only() {
    let root = tempfile::tempdir().unwrap();
    let first = root.path().join("first");
    cmd_gen(&GenOptions {
        public_only: true,
        ..small_gen(&first)
    })
    .unwrap();
    let replay = root.path().join("replay");
    cmd_gen(&GenOptions {
        out: replay.clone(),
        from_manifest: Some(first.join("manifest.json")),
        ..GenOptions::default()
    })
    .unwrap();
    assert_eq!(
        fs::read(first.join("market_1.json")).unwrap(),
        fs::read(replay.join("market_1.json")).unwrap()
    );
}

#[test]
fn gen_rejects_a_tampered_manifest() {
    let root = tempfile::tempdir().unwrap();
    let first = root.path().join("first");
    cmd_gen(&small_gen(&first)).unwrap();
    let path = first.join("manifest.json");
    let mut manifest: RunManifest =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    manifest.base_seed ^= 1;
    fs::write(&path, serde_json::to_vec_pretty(&manifest).unwrap()).unwrap();

    let err = cmd_gen(&GenOptions {
        out: root.path().join("replay"),
        from_manifest: Some(path),
        ..GenOptions::default()
    })
    .unwrap_err();
    assert!(matches!(err, Error::Parse { .. }), "{err}");
}

#[test]
fn public_only_bundles_hold_no_private_data_and_still_run() {
    let dir = tempfile::tempdir().unwrap();
    let opts = GenOptions {
        public_only: true,
        ..small_gen(dir.path())
    };
    let paths = cmd_gen(&opts).unwrap();
    for p in &paths {
        let text = fs::read_to_string(p).unwrap();
        assert!(!text.contains("\"private\""), "{} leaks private data", p.display());
        assert!(!text.contains("\"category\""));
    }

    // Strategies still run against public-only files; no scores come back.
    let scores = cmd_run(&RunOptions {
        markets: dir.path().to_path_buf(),
        strategy: "all".into(),
        ..RunOptions::default()
    })
    .unwrap();
    assert!(scores.is_empty());
    for i in 1..=3 {
        assert!(dir.path().join(format!("decision_all_m{i}.json")).is_file());
        assert!(!dir.path().join(format!("score_all_m{i}.json")).is_file());
    }
}

#[test]
fn run_writes_decisions_and_scores_for_full_bundles() {
    let dir = tempfile::tempdir().unwrap();
    cmd_gen(&small_gen(dir.path())).unwrap();

    for strategy in ["all", "percent:20", "single:0", "lp:2", "lp:inf"] {
        let scores = cmd_run(&RunOptions {
            markets: dir.path().to_path_buf(),
            strategy: strategy.into(),
            ..RunOptions::default()
        })
        .unwrap_or_else(|e| panic!("{strategy}: {e}"));
        assert_eq!(scores.len(), 3, "{strategy}");
    }

    let decision: DecisionFile = serde_json::from_str(
        &fs::read_to_string(dir.path().join("decision_percent-20_m1.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(decision.strategy, "percent:20");
    assert_eq!(decision.decision.counts.len(), 5);
    assert_eq!(decision.decision.fractions.len(), 5);

    let score: ScoreFile = serde_json::from_str(
        &fs::read_to_string(dir.path().join("score_lp-2_m3.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(score.market_index, 3);
    assert!((0.0..=100.0).contains(&score.result.score));

    // Run manifests record the strategy and reseal the digest.
    let run_manifest: RunManifest = serde_json::from_str(
        &fs::read_to_string(dir.path().join("run_all.json")).unwrap(),
    )
    .unwrap();
    assert!(run_manifest.verify());
    assert_eq!(run_manifest.strategy.as_deref(), Some("all"));
}

#[test]
fn run_accepts_a_single_market_file() {
    let dir = tempfile::tempdir().unwrap();
    let paths = cmd_gen(&small_gen(dir.path())).unwrap();
    let scores = cmd_run(&RunOptions {
        markets: paths[1].clone(),
        strategy: "cofr".into(),
        ..RunOptions::default()
    })
    .unwrap();
    assert_eq!(scores.len(), 1);
    assert_eq!(scores[0].0, 2, "market index comes from the file");
}

#[test]
fn report_assembles_canonical_csv_and_markdown() {
    let dir = tempfile::tempdir().unwrap();
    cmd_gen(&small_gen(dir.path())).unwrap();
    for strategy in ["single:0", "all", "percent:20"] {
        cmd_run(&RunOptions {
            markets: dir.path().to_path_buf(),
            strategy: strategy.into(),
            ..RunOptions::default()
        })
        .unwrap();
    }

    let csv = cmd_report(&ReportOptions {
        scores: dir.path().to_path_buf(),
        out: Some(dir.path().join("report.csv")),
        format: ReportFormat::Csv,
    })
    .unwrap();
    let lines: Vec<&str> = csv.trim().lines().collect();
    assert_eq!(lines[0], "strategy,market_1,market_2,market_3,average");
    assert!(lines[1].starts_with("all,"));
    assert!(lines[2].starts_with("percent:20,"));
    assert!(lines[3].starts_with("single:0,"));
    assert_eq!(fs::read_to_string(dir.path().join("report.csv")).unwrap(), csv);

    let md = cmd_report(&ReportOptions {
        scores: dir.path().to_path_buf(),
        out: None,
        format: ReportFormat::Markdown,
    })
    .unwrap();
    assert!(md.starts_with("| strategy |"));
}

#[test]
fn report_flags_missing_market_cells() {
    let dir = tempfile::tempdir().unwrap();
    cmd_gen(&small_gen(dir.path())).unwrap();
    cmd_run(&RunOptions {
        markets: dir.path().to_path_buf(),
        strategy: "all".into(),
        ..RunOptions::default()
    })
    .unwrap();
    fs::remove_file(dir.path().join("score_all_m2.json")).unwrap();

    let err = cmd_report(&ReportOptions {
        scores: dir.path().to_path_buf(),
        out: None,
        format: ReportFormat::Csv,
    })
    .unwrap_err();
    assert!(matches!(err, Error::IncompleteData(_)), "{err}");
    assert!(err.to_string().contains("market 2"));
}

#[test]
fn report_names_the_malformed_file() {
    let dir = tempfile::tempdir().unwrap();
    cmd_gen(&small_gen(dir.path())).unwrap();
    cmd_run(&RunOptions {
        markets: dir.path().to_path_buf(),
        strategy: "all".into(),
        ..RunOptions::default()
    })
    .unwrap();
    fs::write(dir.path().join("score_all_m2.json"), b"{ not json").unwrap();

    let err = cmd_report(&ReportOptions {
        scores: dir.path().to_path_buf(),
        out: None,
        format: ReportFormat::Csv,
    })
    .unwrap_err();
    match &err {
        Error::Parse { path, .. } => assert!(path.contains("score_all_m2.json")),
        other => panic!("expected a parse error, got {other}"),
    }
}

// --- binary-level checks -----------------------------------------------------

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_agora"))
}

#[test]
fn binary_exit_codes_reflect_error_classes() {
    let dir = tempfile::tempdir().unwrap();
    let dir_str = dir.path().to_str().unwrap();

    // Success.
    let out = bin()
        .args([
            "gen", "--seed", "1", "--out", dir_str, "--markets", "1", "--k", "3", "--dim", "4",
            "--categories", "3", "--size-min", "40", "--size-max", "60", "--acquirer-size", "30",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");

    // Unknown strategy: usage-class exit code 2, listing the valid names.
    let out = bin()
        .args(["run", "--markets", dir_str, "--strategy", "telepathy"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("valid strategies"), "{stderr}");
    assert!(stderr.contains("cofr"), "{stderr}");

    // Missing input directory: I/O-class exit code 3, and nothing created.
    let missing = dir.path().join("missing").join("nowhere");
    let out = bin()
        .args(["run", "--markets", missing.to_str().unwrap(), "--strategy", "all"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(!missing.exists(), "a failed run must not create directories");

    // Strategy whose parameters are invalid for the market: domain errors
    // exit nonzero without writing scores.
    let out = bin()
        .args(["run", "--markets", dir_str, "--strategy", "single:99"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn binary_report_prints_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let dir_str = dir.path().to_str().unwrap();
    let out = bin()
        .args([
            "gen", "--seed", "3", "--out", dir_str, "--markets", "2", "--k", "3", "--dim", "4",
            "--categories", "3", "--size-min", "40", "--size-max", "60", "--acquirer-size", "30",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = bin()
        .args(["run", "--markets", dir_str, "--strategy", "all"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = bin().args(["report", "--scores", dir_str]).output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("strategy,market_1,market_2,average"), "{stdout}");
}
