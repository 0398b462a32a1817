use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use walshlab::formats::{
    read_json, write_json, CertificateFile, LowerBoundFile, MultiplierFile, PieceSpec, SignalFile,
    SpectrumFile,
};
use walshlab::trials::spiky_pair;
use walshlab_core::Resolution;

fn walshlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_walshlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_pair(dir: &TempDir, level: u32, seed: u64) -> (PathBuf, PathBuf) {
    let (f, g) = spiky_pair(seed, Resolution::new(level).unwrap());
    let (pf, pg) = (path(dir, "f.json"), path(dir, "g.json"));
    write_json(&pf, &SignalFile::from_signal(&f)).unwrap();
    write_json(&pg, &SignalFile::from_signal(&g)).unwrap();
    (pf, pg)
}

#[test]
fn lowerbound_pairing_for_eight() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "lb.json");
    let run = walshlab(&["lowerbound", "--n", "8", "--out", s(&out)]);
    assert!(run.status.success(), "{run:?}");
    let report: LowerBoundFile = read_json(&out).unwrap();
    assert_eq!(report.n_resolution, 10);
    assert!((report.pairing + 8.0 / 256.0).abs() <= 1e-12);
}

#[test]
fn transform_round_trips() {
    let dir = TempDir::new().unwrap();
    let (pf, _) = write_pair(&dir, 7, 3);
    let original: SignalFile = read_json(&pf).unwrap();
    for haar in [false, true] {
        let spec = path(&dir, "spec.json");
        let back = path(&dir, "back.json");
        let mut fwd = vec!["--N", "7", "transform", "--in", s(&pf), "--out", s(&spec)];
        let mut inv = vec![
            "transform",
            "--inverse",
            "--in",
            s(&spec),
            "--out",
            s(&back),
        ];
        if haar {
            fwd.push("--haar");
            inv.push("--haar");
        }
        assert!(walshlab(&fwd).status.success());
        assert!(walshlab(&inv).status.success());
        let round: SignalFile = read_json(&back).unwrap();
        assert_eq!(round.n, 7);
        for (a, b) in round.values.iter().zip(&original.values) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
        let spectrum: SpectrumFile = read_json(&spec).unwrap();
        assert_eq!(spectrum.coeffs.len(), if haar { 127 } else { 128 });
    }
}

#[test]
fn apply_projects_onto_pieces() {
    let dir = TempDir::new().unwrap();
    let (pf, _) = write_pair(&dir, 6, 5);
    let m = MultiplierFile {
        n: 6,
        pieces: Some(vec![PieceSpec {
            start: 0,
            end: 1,
            value: 1.0,
        }]),
        values: None,
        atom: None,
    };
    let pm = path(&dir, "m.json");
    write_json(&pm, &m).unwrap();
    let out = path(&dir, "out.json");
    let run = walshlab(&[
        "apply",
        "--multiplier",
        s(&pm),
        "--in",
        s(&pf),
        "--out",
        s(&out),
    ]);
    assert!(run.status.success(), "{run:?}");
    let f: SignalFile = read_json(&pf).unwrap();
    let mean = f.values.iter().sum::<f64>() / 64.0;
    let tf: SignalFile = read_json(&out).unwrap();
    assert!(tf.values.iter().all(|v| (v - mean).abs() < 1e-12));
}

#[test]
fn input_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let (pf, pg) = write_pair(&dir, 6, 1);
    let out = path(&dir, "cert.json");

    // Declared resolution disagrees with the files.
    let run = walshlab(&[
        "--N",
        "7",
        "certify-square",
        "--f",
        s(&pf),
        "--g",
        s(&pg),
        "--lambda",
        "2",
        "--r",
        "1",
        "--out",
        s(&out),
    ]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("resolution"));

    // Mixed resolutions across inputs.
    let (f7, _) = spiky_pair(2, Resolution::new(7).unwrap());
    let p7 = path(&dir, "f7.json");
    write_json(&p7, &SignalFile::from_signal(&f7)).unwrap();
    let run = walshlab(&[
        "certify-square",
        "--f",
        s(&p7),
        "--g",
        s(&pg),
        "--lambda",
        "2",
        "--r",
        "1",
        "--out",
        s(&out),
    ]);
    assert_eq!(run.status.code(), Some(1));

    // A multiplier giving two forms at once.
    let m = MultiplierFile {
        n: 6,
        pieces: Some(vec![PieceSpec {
            start: 0,
            end: 1,
            value: 1.0,
        }]),
        values: Some(vec![0.0; 64]),
        atom: None,
    };
    let pm = path(&dir, "m.json");
    write_json(&pm, &m).unwrap();
    let run = walshlab(&[
        "certify-multiplier",
        "--f",
        s(&pf),
        "--phi",
        s(&pg),
        "--multiplier",
        s(&pm),
        "--q",
        "1.5",
        "--out",
        s(&out),
    ]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("multiplier"));

    // Missing and malformed files.
    let run = walshlab(&["transform", "--in", "/nonexistent.json", "--out", s(&out)]);
    assert_eq!(run.status.code(), Some(1));
    std::fs::write(&pm, "{ not json").unwrap();
    let run = walshlab(&[
        "apply",
        "--multiplier",
        s(&pm),
        "--in",
        s(&pf),
        "--out",
        s(&out),
    ]);
    assert_eq!(run.status.code(), Some(1));
}

#[test]
fn certificates_pass_and_violations_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let (pf, pg) = write_pair(&dir, 8, 11);
    let out = path(&dir, "cert.json");
    let base = [
        "certify-square",
        "--f",
        s(&pf),
        "--g",
        s(&pg),
        "--lambda",
        "3",
        "--r",
        "1.5",
        "--out",
        s(&out),
    ];
    let run = walshlab(&base);
    assert_eq!(run.status.code(), Some(0), "{run:?}");
    let cert: CertificateFile = read_json(&out).unwrap();
    assert!(cert.passed && cert.violations.is_empty());
    assert_eq!(cert.parts.len(), 3);
    let intervals: usize = cert.parts.iter().map(|p| p.collection.len()).sum();
    assert!(intervals > 3);

    // Demanding full disjointness flags every interval with children.
    let mut strict = base.to_vec();
    strict.extend(["--sparseness", "1"]);
    let run = walshlab(&strict);
    assert_eq!(run.status.code(), Some(2), "{run:?}");
    let cert: CertificateFile = read_json(&out).unwrap();
    assert!(!cert.passed);
    assert!(cert.all_violations() > 0);

    let m = MultiplierFile {
        n: 8,
        pieces: Some(vec![
            PieceSpec {
                start: 1,
                end: 2,
                value: 1.0,
            },
            PieceSpec {
                start: 5,
                end: 7,
                value: -0.5,
            },
            PieceSpec {
                start: 40,
                end: 100,
                value: 2.0,
            },
        ]),
        values: None,
        atom: None,
    };
    let pm = path(&dir, "m.json");
    write_json(&pm, &m).unwrap();
    let run = walshlab(&[
        "certify-multiplier",
        "--f",
        s(&pf),
        "--phi",
        s(&pg),
        "--multiplier",
        s(&pm),
        "--q",
        "1.5",
        "--out",
        s(&out),
    ]);
    assert_eq!(run.status.code(), Some(0), "{run:?}");
    let cert: CertificateFile = read_json(&out).unwrap();
    assert!(!cert.parts.is_empty());
    assert!(cert.ratio.is_finite() && cert.ratio > 0.0);
}

#[test]
fn scans_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let config = path(&dir, "scan.json");
    std::fs::write(&config, r#"{ "seed": 3, "random_members": 3 }"#).unwrap();
    for kind in ["zygmund", "cww", "qscaling", "weights"] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = path(&dir, &format!("{kind}-{run}.csv"));
            let status = walshlab(&[
                "--N",
                "8",
                "scan",
                "--kind",
                kind,
                "--config",
                s(&config),
                "--out",
                s(&out),
            ]);
            assert!(status.status.success(), "{status:?}");
            let csv = std::fs::read(&out).unwrap();
            let json = std::fs::read(out.with_extension("json")).unwrap();
            outputs.push((csv, json));
        }
        assert_eq!(outputs[0], outputs[1], "{kind}");
        let text = String::from_utf8(outputs[0].0.clone()).unwrap();
        assert!(text.lines().count() > 2, "{kind}: {text}");
    }
}

#[test]
fn unknown_scan_fields_are_rejected() {
    let dir = TempDir::new().unwrap();
    let config = path(&dir, "scan.json");
    std::fs::write(&config, r#"{ "sead": 3 }"#).unwrap();
    let out = path(&dir, "out.csv");
    let run = walshlab(&[
        "--N",
        "8",
        "scan",
        "--kind",
        "cww",
        "--config",
        s(&config),
        "--out",
        s(&out),
    ]);
    assert_eq!(run.status.code(), Some(1));
}

#[test]
fn selftest_quick_passes() {
    let run = walshlab(&["selftest", "--level", "quick"]);
    let text = String::from_utf8_lossy(&run.stdout);
    assert_eq!(run.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 8);
}
