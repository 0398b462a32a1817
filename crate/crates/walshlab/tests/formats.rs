use walshlab::families::FAMILY_VERSION;
use walshlab::formats::{Basis, InputError, MultiplierFile, SignalFile, SpectrumFile};
use walshlab::scans::ScanConfig;
use walshlab::Calibration;

#[test]
fn signal_file_schema() {
    let f: SignalFile = serde_json::from_str(r#"{"N": 2, "values": [1, 2, 3, 4]}"#).unwrap();
    let signal = f.to_signal().unwrap();
    assert_eq!(signal.values(), &[1.0, 2.0, 3.0, 4.0]);
    let bad: SignalFile = serde_json::from_str(r#"{"N": 3, "values": [1, 2]}"#).unwrap();
    assert!(bad.to_signal().is_err());
}

#[test]
fn weights_must_be_positive() {
    let w: SignalFile =
        serde_json::from_str(r#"{"N": 1, "values": [1, 0], "positive": true}"#).unwrap();
    assert!(w.to_weight().is_err());
    let w: SignalFile =
        serde_json::from_str(r#"{"N": 1, "values": [1, 2], "positive": true}"#).unwrap();
    assert!(w.to_weight().is_ok());
}

#[test]
fn spectrum_bases() {
    let s: SpectrumFile =
        serde_json::from_str(r#"{"N": 1, "basis": "walsh", "coeffs": [1, 0]}"#).unwrap();
    assert_eq!(s.basis, Basis::Walsh);
    assert!(s.to_walsh().is_ok());
    let h: SpectrumFile =
        serde_json::from_str(r#"{"N": 2, "basis": "haar", "mean": 0.5, "coeffs": [1, 0, 0]}"#)
            .unwrap();
    assert_eq!(h.to_haar().unwrap().mean(), 0.5);
    assert!(
        serde_json::from_str::<SpectrumFile>(r#"{"N": 1, "basis": "fourier", "coeffs": []}"#)
            .is_err()
    );
}

#[test]
fn multiplier_forms() {
    let pieces: MultiplierFile =
        serde_json::from_str(r#"{"N": 3, "pieces": [{"start": 0, "end": 2, "value": 1.5}]}"#)
            .unwrap();
    assert_eq!(pieces.parse().unwrap().symbol().value(1), 1.5);

    let atom: MultiplierFile = serde_json::from_str(
        r#"{"N": 3, "atom": {"q": 2, "J": 1, "blocks": [{"k": 2, "intervals": [[2, 3]]}]}}"#,
    )
    .unwrap();
    let m = atom.parse().unwrap().symbol();
    assert_eq!(m.value(2), 1.0);
    assert_eq!(m.value(3), 0.0);

    for bad in [
        r#"{"N": 3}"#,
        r#"{"N": 3, "values": [1, 2]}"#,
        r#"{"N": 3, "pieces": [{"start": 0, "end": 2, "value": 1}, {"start": 1, "end": 3, "value": 1}]}"#,
        r#"{"N": 3, "pieces": [{"start": 4, "end": 9, "value": 1}]}"#,
        r#"{"N": 3, "atom": {"q": 2, "J": 1, "blocks": [{"k": 2, "intervals": [[2, 3], [3, 4]]}]}}"#,
    ] {
        let file: MultiplierFile = serde_json::from_str(bad).unwrap();
        assert!(
            matches!(file.parse(), Err(InputError::Multiplier(_))),
            "{bad}"
        );
    }
}

#[test]
fn empty_scan_config_takes_defaults() {
    let c: ScanConfig = serde_json::from_str("{}").unwrap();
    assert_eq!(c, ScanConfig::default());
    assert_eq!(c.p, 2.5);
}

#[test]
fn builtin_calibration_is_populated() {
    let c = Calibration::builtin();
    assert_eq!(c.family_version, FAMILY_VERSION);
    assert_eq!(c.trials, 200);
    assert!(c.multiplier_ratio > 0.0 && c.square_ratio > 0.0 && c.weighted_constant > 0.0);
    assert!(c.decomposition_psi2.linf > 0.0 && c.decomposition_lq.square > 0.0);
}
