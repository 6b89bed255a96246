use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use resolvability::experiments::output::read_csv;
use resolvability::experiments::TvSweepRow;

const BIN: &str = env!("CARGO_BIN_EXE_resolvability");

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

const SWEEP: &str = r#"
version = 1
id = "cli-sweep"
seed = 42
channel = { family = "bsc", crossover = 0.2 }
input = { kind = "uniform" }
n = [3, 5]
rates = [0.3, 0.6]
num_codebooks = 6
epsilon = 0.05
"#;

#[test]
fn sweep_output_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sweep.toml", SWEEP);
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "3", "1"].iter().enumerate() {
        let out = dir.path().join(format!("out{i}.csv"));
        let o = run(&[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--threads",
            threads,
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(std::fs::read(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn seed_flag_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sweep.toml", SWEEP);
    let a = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    let b = run(&["sweep", "--config", cfg.to_str().unwrap(), "--seed", "43"]);
    assert!(a.status.success() && b.status.success());
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn summaries_match_per_codebook_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sweep.toml", SWEEP);
    let o = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let rows: Vec<TvSweepRow> = read_csv(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    let mut groups = 0;
    for s in rows.iter().filter(|r| r.method == "summary-mean") {
        let tvs: Vec<f64> = rows
            .iter()
            .filter(|r| r.n == s.n && r.r_nats == s.r_nats && !r.method.starts_with("summary"))
            .map(|r| r.tv)
            .collect();
        assert_eq!(tvs.len(), 6);
        let mean = tvs.iter().sum::<f64>() / tvs.len() as f64;
        assert!((mean - s.tv).abs() <= 1e-12);
        let max = rows
            .iter()
            .find(|r| r.n == s.n && r.r_nats == s.r_nats && r.method == "summary-max")
            .unwrap();
        assert!((tvs.iter().cloned().fold(f64::MIN, f64::max) - max.tv).abs() <= 1e-12);
        groups += 1;
    }
    assert_eq!(groups, 4);
}

#[test]
fn json_output_is_an_array_of_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sweep.toml", SWEEP);
    let o = run(&["sweep", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2 * 2 * (6 + 2));
    assert_eq!(v[0]["experiment_id"], "cli-sweep");
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let empty_n = write(dir.path(), "a.toml", &SWEEP.replace("n = [3, 5]", "n = []"));
    let o = run(&["sweep", "--config", empty_n.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n"));

    let unknown = write(dir.path(), "b.toml", &format!("{SWEEP}\nbogus = 1\n"));
    let o = run(&["sweep", "--config", unknown.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));

    let no_seed = write(dir.path(), "c.toml", &SWEEP.replace("seed = 42", ""));
    assert_eq!(
        run(&["sweep", "--config", no_seed.to_str().unwrap()]).status.code(),
        Some(2)
    );

    let wrong_kind = write(dir.path(), "d.toml", &format!("kind = \"bounds-table\"\n{SWEEP}"));
    assert_eq!(
        run(&["sweep", "--config", wrong_kind.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn rate_below_mutual_information_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        &SWEEP.replace("rates = [0.3, 0.6]", "rates = [0.1]"),
    );
    let o = run(&["concentrate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn second_order_below_hypothesis_exits_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
version = 1
seed = 1
channel = { family = "bsc", crossover = 0.25 }
input = { kind = "uniform" }
n = [4, 8]
xi = 0.1
c = 2.0
d = 0.5
num_codebooks = 0
"#;
    let cfg = write(dir.path(), "s.toml", text);
    let o = run(&["second-order", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stdout).contains("hypothesis-not-met"));

    let ok = write(dir.path(), "t.toml", &text.replace("n = [4, 8]", "n = [8, 16]"));
    assert_eq!(
        run(&["second-order", "--config", ok.to_str().unwrap()]).status.code(),
        Some(0)
    );
}

#[test]
fn bounds_table_and_stats_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "b.toml", SWEEP);
    let o = run(&["bounds", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("experiment_id,channel,bound,"));
    let o = run(&["stats", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.is_object());
}

#[test]
fn drawn_codebook_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "d.toml", SWEEP);
    let o = run(&["draw", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let cb = resolvability::Codebook::read_csv(&o.stdout[..]).unwrap();
    assert_eq!(cb.n(), 3);
    assert_eq!(cb.m(), (3.0f64 * 0.3).exp().floor() as usize);
}

#[test]
fn missing_config_file_is_an_io_error() {
    let o = run(&["sweep", "--config", "/nonexistent/x.toml"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/x.toml"));
}
