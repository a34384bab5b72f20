//! Every shipped fixture parses, re-serializes and parses back to the same value.

use std::path::PathBuf;

use gleason_csm::frame::{classical_qubit_model, FrameFixture, FrameFunction};
use gleason_csm::pipeline::MeasurementPlan;
use gleason_csm::scalar_lemma::{check_hypotheses, lemma_report, LemmaVerdict, ScalarCandidate};
use serde::de::DeserializeOwned;
use serde::Serialize;

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn load<T: DeserializeOwned>(name: &str) -> T {
    serde_json::from_str(&std::fs::read_to_string(dir().join(name)).unwrap()).unwrap()
}

fn round_trip<T: Serialize + DeserializeOwned>(value: &T) -> T {
    serde_json::from_str(&serde_json::to_string(value).unwrap()).unwrap()
}

#[test]
fn every_fixture_is_known() {
    let mut names: Vec<String> = std::fs::read_dir(dir())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "born_rho.json",
            "classical_qubit.json",
            "excluded_q42.json",
            "g0_offset_q60.json",
            "identity_q60.json",
            "plan_zxz.json",
            "sine_q60.json",
            "sqrt_q60.json",
            "square_q60.json",
        ]
    );
}

#[test]
fn frame_fixtures() {
    for name in ["born_rho.json", "classical_qubit.json"] {
        let f: FrameFixture = load(name);
        assert_eq!(round_trip(&f), f);
        let func = FrameFunction::from_fixture(f.clone()).unwrap();
        assert_eq!(func.to_fixture().unwrap(), f);
    }
    let shipped = FrameFunction::from_fixture(load("classical_qubit.json")).unwrap();
    let built = classical_qubit_model(8).unwrap();
    for (a, b) in shipped.entries().unwrap().iter().zip(built.entries().unwrap()) {
        assert!(a.v.ray_distance(&b.v) < 1e-15 && a.f == b.f);
    }
}

#[test]
fn candidate_fixtures() {
    let expected = [
        ("identity_q60.json", LemmaVerdict::Identity),
        ("excluded_q42.json", LemmaVerdict::Identity),
        ("square_q60.json", LemmaVerdict::HypothesesFailed),
        ("sqrt_q60.json", LemmaVerdict::HypothesesFailed),
        ("g0_offset_q60.json", LemmaVerdict::HypothesesFailed),
        ("sine_q60.json", LemmaVerdict::HypothesesFailed),
    ];
    for (name, verdict) in expected {
        let c: ScalarCandidate = load(name);
        assert_eq!(round_trip(&c), c);
        assert_eq!(lemma_report(&c).verdict, verdict, "{name}");
    }
    let sine: ScalarCandidate = load("sine_q60.json");
    let h = check_hypotheses(&sine);
    assert!(h.h1_g0.pass && h.h2_monotone.pass && !h.h3_triple_sum.pass);
}

#[test]
fn plan_fixture() {
    let plan: MeasurementPlan = load("plan_zxz.json");
    assert_eq!(plan.steps.len(), 2);
    let back = round_trip(&plan);
    assert_eq!(back.initial, plan.initial);
    assert_eq!(back.steps.len(), plan.steps.len());
    for (a, b) in back.steps.iter().zip(&plan.steps) {
        assert_eq!(a.context, b.context);
    }
}
