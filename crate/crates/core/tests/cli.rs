use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_skc");

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn skc(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args)
        .env_remove("SKC_SEED")
        .env_remove("SKC_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

const SMALL: &str = "name = \"small\"\nquantities = [\"xi_b\", \"bounds\"]\n[config]\nn_A = 2\nn_B = 2\nn_E = 1\nrho = 0.5\n[mc]\ntrials = 300\n";

#[test]
fn eval_writes_pinned_header() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "small.toml", SMALL);
    let out = dir.path().join("out");
    let o = skc(
        &["eval", "--config", &cfg, "--out", out.to_str().unwrap()],
        &[],
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = read(&out, "small.csv");
    assert_eq!(
        csv.lines().next().unwrap(),
        "parameter,value,xi_b_mean,xi_b_stderr,lower_mean,lower_stderr,upper_mean,upper_stderr,trials,seed"
    );
    assert!(csv.lines().nth(1).unwrap().ends_with(",300,1"));
    assert!(String::from_utf8_lossy(&o.stdout).contains("upper"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let missing = skc(
        &["eval", "--config", "/nonexistent/x.toml", "--out", out],
        &[],
    );
    assert_eq!(missing.status.code(), Some(2));

    let bad_syntax = write(&dir, "bad.toml", "[config\nn_A = 1\n");
    assert_eq!(
        skc(&["eval", "--config", &bad_syntax, "--out", out], &[])
            .status
            .code(),
        Some(2)
    );

    let short = write(
        &dir,
        "short.toml",
        "[config]\nn_A = 4\nn_B = 1\nn_E = 1\nphi_A = 2\n",
    );
    let o = skc(&["eval", "--config", &short, "--out", out], &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("phi >= n"));

    // lambda_EB = 0 is a valid config but the gap is unbounded: numeric failure.
    let noiseless = write(
        &dir,
        "noiseless.toml",
        "[config]\nn_A = 2\nn_B = 2\nn_E = 1\nlambda_EB = 0.0\n[mc]\ntrials = 10\n",
    );
    assert_eq!(
        skc(&["eval", "--config", &noiseless, "--out", out], &[])
            .status
            .code(),
        Some(4)
    );

    let empty = write(&dir, "empty.toml", "configs = []\n");
    assert_eq!(
        skc(&["verify", "--config", &empty, "--out", out], &[])
            .status
            .code(),
        Some(3)
    );

    assert_eq!(skc(&["eval", "--out", out], &[]).status.code(), Some(3));
    assert_eq!(
        skc(
            &["eval", "--config", SMALL, "--out", out],
            &[("SKC_THREADS", "zero")]
        )
        .status
        .code(),
        Some(3)
    );
}

#[test]
fn verify_bundled_set_and_mutation_control() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let ok = skc(&["verify", "--out", out], &[]);
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stdout)
    );
    let report: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "verify-report.json")).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["failed"], 0);

    let bad = skc(&["verify", "--mutate-g", "--out", out], &[]);
    assert_eq!(bad.status.code(), Some(5));
    let stdout = String::from_utf8_lossy(&bad.stdout);
    assert!(stdout.contains("FAILED pilot_mi"), "{stdout}");
    let report: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "verify-report.json")).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn seed_precedence() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "small.toml", SMALL);
    let run = |extra: &[&str], env: &[(&str, &str)]| {
        let out = TempDir::new().unwrap();
        let mut args = vec![
            "eval",
            "--config",
            &cfg,
            "--out",
            out.path().to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        let o = skc(&args, env);
        assert_eq!(o.status.code(), Some(0));
        read(out.path(), "small.csv")
    };
    let default = run(&[], &[]);
    let env7 = run(&[], &[("SKC_SEED", "7")]);
    assert!(env7.lines().nth(1).unwrap().ends_with(",7"));
    assert_ne!(default, env7);
    assert_eq!(run(&["--seed", "7"], &[]), env7);
    assert_eq!(run(&["--seed", "1"], &[("SKC_SEED", "7")]), default);

    // A seed in the file beats the environment.
    let with_seed = write(&dir, "seeded.toml", &format!("{SMALL}seed = 1\n"));
    let out = TempDir::new().unwrap();
    let o = skc(
        &[
            "eval",
            "--config",
            &with_seed,
            "--out",
            out.path().to_str().unwrap(),
        ],
        &[("SKC_SEED", "7")],
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read(out.path(), "small.csv"), default);
}

#[test]
fn sweep_outputs_are_byte_identical_across_threads_and_env() {
    let cfg = configs_dir().join("eve_noise_n424.toml");
    let cfg = cfg.to_str().unwrap();
    let mut outputs = Vec::new();
    for (threads, env) in [("1", None), ("3", None), ("8", None), ("", Some("2"))] {
        let out = TempDir::new().unwrap();
        let mut args = vec![
            "sweep",
            "--config",
            cfg,
            "--trials",
            "500",
            "--out",
            out.path().to_str().unwrap(),
        ];
        if !threads.is_empty() {
            args.extend(["--threads", threads]);
        }
        let env: Vec<(&str, &str)> = env.map(|t| vec![("SKC_THREADS", t)]).unwrap_or_default();
        let o = skc(&args, &env);
        assert_eq!(o.status.code(), Some(0));
        outputs.push((
            read(out.path(), "eve_noise_n424.csv"),
            read(out.path(), "eve_noise_n424.svg"),
        ));
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn dof_command_reports_budget() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "budget.toml",
        "[config]\nn_A = 8\nn_B = 4\nn_E = 6\n[mc]\ntrials = 20\n[dof]\nquantity = \"cs1\"\npowers = [1, 10, 100, 1000]\nbudget = 4\n",
    );
    let o = skc(
        &[
            "dof",
            "--config",
            &cfg,
            "--out",
            dir.path().to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("best (v_A, v_B) = (4, 0) with DoF 8"));
    assert_eq!(
        read(dir.path(), "budget-budget.csv"),
        "v_a,v_b,dof,best\n0,4,0,0\n1,3,2,0\n2,2,4,0\n3,1,6,0\n4,0,8,1\n"
    );
}
