//! Presets are value-frozen: their serialized form must not drift.

use qic_core::*;
use sha2::{Digest, Sha256};

fn fingerprint(name: &str, d: Dimension) -> String {
    let json = serde_json::to_string(&preset(name, d).unwrap()).unwrap();
    hex::encode(Sha256::digest(json.as_bytes()))
}

const FROZEN: [(&str, Dimension, &str); 6] = [
    ("table1", Dimension::Two, "d4f2d8687e51d20fb96874434dbf6daf7a3fa0dae033e5b5466f2e03be2d4aec"),
    ("table1", Dimension::Three, "c50546528243c40a78210cc8133614fc764dcbf857dd43aa6b93c0f07e2487ad"),
    ("single", Dimension::Two, "abc65a6864d550d201482d76097a18cc2ace15a450ac2d09991f5169259aabcf"),
    ("single", Dimension::Three, "75fa01f39abd6c5040d248b50d35c98955097885043cd1f700c10a5f1edfa792"),
    ("shockwave", Dimension::Two, "eef06f1b2104e1413022fc3d155cfb24426ac2b40f1ba258e8f9cc1ea6cf290b"),
    ("shockwave", Dimension::Three, "afabb3b33c54904ae6ae50bb58e4ea48621e34fb23755810290ecad2db42348b"),
];

#[test]
fn preset_hashes_are_stable() {
    for (name, d, want) in FROZEN {
        assert_eq!(fingerprint(name, d), want, "{name} {d:?}");
    }
}

#[test]
fn table1_parameters() {
    let sc = table1_scenario(Dimension::Three);
    assert_eq!(sc.alice.smearing.kind(), SmearingKind::HardShell { r_inner: 0.0, r_outer: 1.0 });
    assert_eq!((sc.alice.time, sc.alice.coupling), (0.0, 1.0));
    let radii: Vec<SmearingKind> = sc.bobs.iter().map(|b| b.smearing.kind()).collect();
    assert_eq!(
        radii,
        [
            SmearingKind::HardShell { r_inner: 0.0, r_outer: 0.9 },
            SmearingKind::HardShell { r_inner: 1.1, r_outer: 2.9 },
            SmearingKind::HardShell { r_inner: 3.1, r_outer: 4.0 },
        ]
    );
    assert!(sc.bobs.iter().all(|b| b.time == 2.0 && b.coupling == 0.2));
}

#[test]
fn snapshot_defaults() {
    assert_eq!(preset("single", Dimension::Three).unwrap().default_times, [0.0, 2.0, 4.0]);
    assert_eq!(preset("shockwave", Dimension::Two).unwrap().default_times, [8.0]);
    let g = shockwave_scenario(Dimension::Three);
    let xs: Vec<f64> = g.iter().map(|g| g.smearing.center()[0]).collect();
    assert_eq!(xs, [6.5, 8.0, 9.5]);
    assert!(g.iter().all(|g| g.smearing.kind() == SmearingKind::Gaussian { sigma: 0.2 }));
}
