use std::path::Path;
use std::process::{Command, Output};

use mfspec::signal_io::{self, SampleFormat};
use mfspec::synthgen;
use mfspec::TimeSeries;

fn mfspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfspec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fixture(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[test]
fn analyze_rejects_empty_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.csv");
    std::fs::write(&manifest, "path,raga,artist,instrument,valence\n").unwrap();
    let out = mfspec(&["analyze", "--manifest", s(&manifest), "--out", s(&dir.path().join("o"))]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no inputs"));
}

#[test]
fn analyze_reports_bad_clip_and_keeps_going() {
    let dir = tempfile::tempdir().unwrap();
    let ts = TimeSeries::with_rate(
        synthgen::white_noise(8_000 * 6, 1)
            .unwrap()
            .samples
            .iter()
            .map(|x| 0.2 * x)
            .collect(),
        8_000,
    );
    signal_io::write_wav(&dir.path().join("ok.wav"), &ts, SampleFormat::Pcm16).unwrap();
    std::fs::write(
        dir.path().join("m.csv"),
        "path,raga,artist,instrument,valence\nok.wav,Durga,A,sitar,positive\nmissing.wav,Durga,A,sitar,positive\n",
    )
    .unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "segment_seconds = 3.0\n").unwrap();
    let out_dir = dir.path().join("o");
    let out = mfspec(&[
        "analyze",
        "--manifest",
        s(&dir.path().join("m.csv")),
        "--config",
        s(&config),
        "--out",
        s(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let segments = std::fs::read_to_string(out_dir.join("segments.csv")).unwrap();
    assert_eq!(segments.lines().count(), 3);
    let errors = std::fs::read_to_string(out_dir.join("errors.json")).unwrap();
    assert!(errors.contains("missing"));
}

#[test]
fn synth_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = mfspec(&[
            "synth",
            "fgn",
            "--n",
            "1024",
            "--h",
            "0.7",
            "--seed",
            "4",
            "--out",
            s(&path),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn synth_cascade_sums_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    assert!(
        mfspec(&["synth", "cascade", "--k", "12", "--a", "0.7", "--out", s(&path)])
            .status
            .success()
    );
    let text = std::fs::read_to_string(&path).unwrap();
    let values: Vec<f64> = text.lines().skip(1).map(|l| l.parse().unwrap()).collect();
    assert_eq!(values.len(), 4096);
    assert!((values.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn synth_rejects_single_sample() {
    let dir = tempfile::tempdir().unwrap();
    let out = mfspec(&["synth", "white", "--n", "1", "--out", s(&dir.path().join("w.csv"))]);
    assert!(!out.status.success());
    assert!(!dir.path().join("w.csv").exists());
}

#[test]
fn classify_reference_fixture() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("reference_segments.csv"), dir.path().join("segments.csv")).unwrap();
    let out = mfspec(&[
        "classify",
        "--reports",
        s(dir.path()),
        "--labels",
        s(&fixture("reference_labels.csv")),
        "--out",
        s(dir.path()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let thresholds: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("thresholds.json")).unwrap()).unwrap();
    assert_eq!(thresholds.as_array().unwrap().len(), 3);
    assert_eq!(
        std::fs::read_to_string(dir.path().join("classified.csv"))
            .unwrap()
            .lines()
            .count(),
        19
    );

    let report = mfspec(&["report", "--run", s(dir.path())]);
    assert!(report.status.success());
    for name in [
        "threshold_flute.svg",
        "artist_raga_matrix.csv",
        "raga_mia_ki_malhar.svg",
        "summary.txt",
    ] {
        assert!(dir.path().join("report").join(name).exists(), "{name}");
    }
    let first = std::fs::read(dir.path().join("report/threshold_sarod.svg")).unwrap();
    assert!(mfspec(&["report", "--run", s(dir.path())]).status.success());
    assert_eq!(
        first,
        std::fs::read(dir.path().join("report/threshold_sarod.svg")).unwrap()
    );
}

#[test]
fn classify_names_unlabeled_clip() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("reference_segments.csv"), dir.path().join("segments.csv")).unwrap();
    let labels = std::fs::read_to_string(fixture("reference_labels.csv")).unwrap();
    let trimmed: String = labels
        .lines()
        .filter(|l| !l.starts_with("khan_durga"))
        .map(|l| format!("{l}\n"))
        .collect();
    std::fs::write(dir.path().join("labels.csv"), trimmed).unwrap();
    let out = mfspec(&[
        "classify",
        "--reports",
        s(dir.path()),
        "--labels",
        s(&dir.path().join("labels.csv")),
        "--out",
        s(dir.path()),
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("UnlabeledClip") && stderr.contains("khan_durga"),
        "{stderr}"
    );
}

#[test]
fn classify_single_class_warns_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let segments = std::fs::read_to_string(fixture("reference_segments.csv")).unwrap();
    std::fs::write(dir.path().join("segments.csv"), &segments).unwrap();
    // Every flute clip relabelled positive.
    let labels = std::fs::read_to_string(fixture("reference_labels.csv")).unwrap();
    let relabelled: String = labels
        .lines()
        .map(|l| if l.contains(",flute,") { l.replace(",negative", ",positive") } else { l.to_string() } + "\n")
        .collect();
    std::fs::write(dir.path().join("labels.csv"), relabelled).unwrap();
    let out = mfspec(&[
        "classify",
        "--reports",
        s(dir.path()),
        "--labels",
        s(&dir.path().join("labels.csv")),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let thresholds: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("thresholds.json")).unwrap()).unwrap();
    assert_eq!(thresholds.as_array().unwrap().len(), 2);
}

#[test]
fn report_without_classification_renders_partially() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("reference_segments.csv"), dir.path().join("segments.csv")).unwrap();
    let out = mfspec(&["report", "--run", s(dir.path())]);
    assert!(out.status.success());
    let report = dir.path().join("report");
    assert!(report.join("artist_raga_matrix.svg").exists());
    assert!(!report.join("threshold_flute.svg").exists());

    let empty = tempfile::tempdir().unwrap();
    let out = mfspec(&["report", "--run", s(empty.path())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("MissingArtifacts"));
}
