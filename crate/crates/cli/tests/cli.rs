use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cilearn::libsvm::write_all;
use cilearn::synthetic::{gaussian_cluster, points_on_sphere, separable_stream, SeparableSpec};
use cilearn::{Label, LabeledInstance};
use tempfile::TempDir;

fn cilearn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cilearn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_rows(dir: &Path, name: &str, rows: &[LabeledInstance]) -> PathBuf {
    let path = dir.join(name);
    write_all(fs::File::create(&path).unwrap(), rows).unwrap();
    path
}

fn stream_file(dir: &Path) -> PathBuf {
    let rows = separable_stream(&SeparableSpec {
        samples: 600,
        features: 10,
        seed: 1,
        ..Default::default()
    });
    write_rows(dir, "stream.libsvm", &rows)
}

fn split_files(dir: &Path) -> (PathBuf, PathBuf) {
    let rows = separable_stream(&SeparableSpec {
        samples: 300,
        features: 10,
        margin: 0.05,
        seed: 2,
        ..Default::default()
    });
    (
        write_rows(dir, "train.libsvm", &rows[..200]),
        write_rows(dir, "test.libsvm", &rows[200..]),
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn online_writes_trace_and_summary() {
    let dir = TempDir::new().unwrap();
    let data = stream_file(dir.path());
    let trace = dir.path().join("trace.csv");
    let summary = dir.path().join("summary.csv");
    let out = cilearn(&[
        "online",
        "--algo",
        "aspgd",
        "--data",
        s(&data),
        "--lambda",
        "0",
        "--trace",
        s(&trace),
        "--summary",
        s(&summary),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let trace = fs::read_to_string(trace).unwrap();
    assert_eq!(
        trace.lines().next(),
        Some("samples_seen,gmean,mistake_rate,fmeasure,sum")
    );
    assert_eq!(trace.lines().count(), 1 + 6);
    let summary = fs::read_to_string(summary).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(
        lines[0],
        "algo,dataset,accuracy,sensitivity,specificity,gmean,sum,mistake_rate"
    );
    assert!(lines[1].starts_with("aspgd,stream,"));
    assert_eq!(stdout(&out).trim(), lines[1]);
}

#[test]
fn online_trace_defaults_to_stdout() {
    let dir = TempDir::new().unwrap();
    let data = stream_file(dir.path());
    let out = cilearn(&[
        "online",
        "--algo",
        "pagmean",
        "--data",
        s(&data),
        "--trace-every",
        "250",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let seen: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(seen, ["250", "500", "600"]);
    assert!(stderr(&out).contains("pagmean,stream,"));
}

#[test]
fn online_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let data = stream_file(dir.path());
    let mut traces = Vec::new();
    for run in 0..2 {
        let trace = dir.path().join(format!("trace{run}.csv"));
        let out = cilearn(&[
            "online",
            "--algo",
            "pa2",
            "--data",
            s(&data),
            "--trace",
            s(&trace),
            "--seed",
            "7",
        ]);
        assert!(out.status.success());
        traces.push(fs::read(trace).unwrap());
    }
    assert_eq!(traces[0], traces[1]);
}

#[test]
fn online_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let data = stream_file(dir.path());
    let out = cilearn(&["online", "--algo", "bogus", "--data", s(&data)]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("bogus"));

    let out = cilearn(&[
        "online",
        "--algo",
        "pa",
        "--data",
        s(&dir.path().join("missing.libsvm")),
    ]);
    assert!(!out.status.success());

    let bad = dir.path().join("bad.libsvm");
    fs::write(&bad, "+1 1:0.5\n-1 0:0.3\n").unwrap();
    let out = cilearn(&["online", "--algo", "pa", "--data", s(&bad)]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let out = cilearn(&["online", "--algo", "pa", "--data", s(&data), "--no-such-flag", "1"]);
    assert!(!out.status.success());

    let out = cilearn(&["online", "--algo", "aspgd", "--data", s(&data), "--eta", "0.5"]);
    assert!(!out.status.success(), "fixed eta with acceleration needs a fixed mu");
}

#[test]
fn distributed_prints_default_lambda_and_summary() {
    let dir = TempDir::new().unwrap();
    let (train, test) = split_files(dir.path());
    let history = dir.path().join("history.csv");
    let timing = dir.path().join("timing.csv");
    for algo in ["dscil-lbfgs", "dscil-rcd", "cilsd"] {
        let out = cilearn(&[
            "distributed",
            "--algo",
            algo,
            "--train",
            s(&train),
            "--test",
            s(&test),
            "--workers",
            "2",
            "--history",
            s(&history),
            "--timing",
            s(&timing),
        ]);
        assert!(out.status.success(), "{algo}: {}", stderr(&out));
        assert!(stderr(&out).contains("0.1 * lambda_max"));
        let line = stdout(&out);
        assert!(line.starts_with(&format!("{algo},train,")), "{line}");
        let gmean: f64 = line.trim().split(',').nth(5).unwrap().parse().unwrap();
        assert!(gmean > 0.5, "{algo}: {gmean}");
        assert!(fs::read_to_string(&history).unwrap().lines().count() > 1);
        assert_eq!(fs::read_to_string(&timing).unwrap().lines().count(), 1 + 2 + 1);
    }
}

#[test]
fn distributed_worker_counts_agree_for_cilsd() {
    let dir = TempDir::new().unwrap();
    let (train, test) = split_files(dir.path());
    let runs: Vec<String> = ["1", "3"]
        .iter()
        .map(|w| {
            let out = cilearn(&[
                "distributed",
                "--algo",
                "cilsd",
                "--train",
                s(&train),
                "--test",
                s(&test),
                "--workers",
                w,
            ]);
            assert!(out.status.success());
            stdout(&out)
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn distributed_grid_and_costs() {
    let dir = TempDir::new().unwrap();
    let (train, test) = split_files(dir.path());
    let summary = dir.path().join("grid.csv");
    let out = cilearn(&[
        "distributed",
        "--algo",
        "dscil-rcd",
        "--train",
        s(&train),
        "--test",
        s(&test),
        "--workers",
        "2",
        "--grid",
        "0.001,0.01",
        "--costs",
        "0.3,0.7",
        "--shuffle",
        "--seed",
        "3",
        "--summary",
        s(&summary),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(summary).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.contains("dscil-rcd[lambda=0.001]"));

    let out = cilearn(&[
        "distributed",
        "--algo",
        "cilsd",
        "--train",
        s(&train),
        "--test",
        s(&test),
        "--costs",
        "0.5,0.6",
    ]);
    assert!(!out.status.success());
    let out = cilearn(&[
        "distributed",
        "--algo",
        "admm",
        "--train",
        s(&train),
        "--test",
        s(&test),
    ]);
    assert!(!out.status.success());
    let out = cilearn(&[
        "distributed",
        "--algo",
        "cilsd",
        "--train",
        s(&train),
        "--test",
        s(&test),
        "--workers",
        "0",
    ]);
    assert!(!out.status.success());
}

#[test]
fn distributed_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let (train, test) = split_files(dir.path());
    let mut histories = Vec::new();
    for run in 0..2 {
        let history = dir.path().join(format!("h{run}.csv"));
        let out = cilearn(&[
            "distributed",
            "--algo",
            "dscil-rcd",
            "--train",
            s(&train),
            "--test",
            s(&test),
            "--workers",
            "3",
            "--seed",
            "11",
            "--shuffle",
            "--history",
            s(&history),
        ]);
        assert!(out.status.success());
        histories.push((fs::read(history).unwrap(), out.stdout));
    }
    assert_eq!(histories[0], histories[1]);
}

fn svdd_file(dir: &Path) -> PathBuf {
    let mut rows: Vec<LabeledInstance> = gaussian_cluster(120, &[0.0, 0.0], 0.1, 1)
        .into_iter()
        .map(|x| LabeledInstance::new(x, Label::Negative))
        .collect();
    rows.extend(
        points_on_sphere(5, &[0.0, 0.0], 1.0, 2)
            .into_iter()
            .map(|x| LabeledInstance::new(x, Label::Positive)),
    );
    write_rows(dir, "points.libsvm", &rows)
}

#[test]
fn svdd_flags_the_injected_points() {
    let dir = TempDir::new().unwrap();
    let data = svdd_file(dir.path());
    let out_path = dir.path().join("detect.csv");
    let out = cilearn(&[
        "svdd",
        "--data",
        s(&data),
        "--train-size",
        "100",
        "--out",
        s(&out_path),
        "--threads",
        "3",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "row_index,distance_sq,flagged");
    assert_eq!(lines.len(), 1 + 25);
    assert!(lines[21..].iter().all(|l| l.ends_with(",1")));
    assert!(stderr(&out).contains("threshold"));

    let again = cilearn(&["svdd", "--data", s(&data), "--train-size", "100"]);
    assert!(again.status.success());
    assert_eq!(again.stdout, fs::read(&out_path).unwrap());
}

#[test]
fn svdd_per_feature_and_errors() {
    let dir = TempDir::new().unwrap();
    let data = svdd_file(dir.path());
    let out = cilearn(&["svdd", "--data", s(&data), "--train-size", "100", "--per-feature"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("feature,row_index,distance_sq,flagged"));
    assert_eq!(text.lines().count(), 1 + 2 * 25);

    let out = cilearn(&["svdd", "--data", s(&data), "--train-size", "1000"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("--train-size"));
    let out = cilearn(&["svdd", "--data", s(&data), "--train-size", "10", "--sigma", "0"]);
    assert!(!out.status.success());
}
