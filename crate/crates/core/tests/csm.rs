use std::sync::Arc;

use gleason_csm::csm::{
    exact_transitions, extravalence_partition, measure, refinement_contradiction_demo, verify_theorem1, Modality,
    QuantumSystem,
};
use gleason_csm::hilbert::{basis_containing, random_basis, random_unit_vector, Field, OrthonormalBasis};
use gleason_csm::seed::{self, split};
use rand::seq::SliceRandom;

#[test]
fn generic_dim4_rows() {
    let sys = QuantumSystem::new(4, Field::Complex).unwrap();
    let a = Arc::new(random_basis(4, Field::Complex, 21).unwrap());
    let b = Arc::new(random_basis(4, Field::Complex, 22).unwrap());
    let r = verify_theorem1(&sys, &a, &b, 100_000, 23).unwrap();
    assert!(r.pass, "{r:?}");
    assert!(r.exact.iter().flatten().all(|&p| p > 0.0 && p < 1.0));
    assert!(r.row_sum_defect < 1e-10 && r.column_sum_defect < 1e-10);
}

#[test]
fn repeated_measurement_repeats() {
    let mut rng = seed::rng(2);
    for s in 0..50u64 {
        let dim = 2 + s as usize % 4;
        let start = Arc::new(random_basis(dim, Field::Complex, split(2, s)).unwrap());
        let c = Arc::new(random_basis(dim, Field::Complex, split(3, s)).unwrap());
        let m = Modality::new(start, s as usize % dim).unwrap();
        let first = measure(&m, &c, rand::Rng::random(&mut rng)).unwrap();
        let second = measure(&first, &c, rand::Rng::random(&mut rng)).unwrap();
        assert_eq!(first.outcome(), second.outcome());
    }
}

#[test]
fn transitions_depend_only_on_classes() {
    let mut rng = seed::rng(4);
    for s in 0..20 {
        let u = random_unit_vector(3, Field::Complex, &mut rng).unwrap();
        let v = random_unit_vector(3, Field::Complex, &mut rng).unwrap();
        let cu = Arc::new(basis_containing(&u, s).unwrap());
        let cx = Arc::new(basis_containing(&u, s + 100).unwrap());
        let cv = Arc::new(basis_containing(&v, s + 200).unwrap());
        let a = exact_transitions(&Modality::new(cu, 0).unwrap(), &cv).unwrap()[0];
        let b = exact_transitions(&Modality::new(cx, 0).unwrap(), &cv).unwrap()[0];
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn partition_recovers_construction() {
    let mut rng = seed::rng(5);
    let vectors: Vec<_> = (0..5).map(|_| random_unit_vector(4, Field::Complex, &mut rng).unwrap()).collect();
    let mut labels: Vec<usize> = (0..50).map(|i| i % 5).collect();
    labels.shuffle(&mut rng);
    let modalities: Vec<Modality> = labels
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let c: Arc<OrthonormalBasis> = Arc::new(basis_containing(&vectors[k], i as u64).unwrap());
            Modality::new(c, 0).unwrap()
        })
        .collect();
    let classes = extravalence_partition(&modalities).unwrap();
    assert_eq!(classes.len(), 5);
    for c in &classes {
        let k = labels[c.members[0]];
        assert!(c.members.iter().all(|&m| labels[m] == k));
        assert_eq!(c.members.len(), 10);
    }
}

#[test]
fn generic_round_trip_in_dim3() {
    let sys = QuantumSystem::new(3, Field::Real).unwrap();
    let cu = Arc::new(random_basis(3, Field::Real, 31).unwrap());
    let cv = Arc::new(random_basis(3, Field::Real, 32).unwrap());
    let r = refinement_contradiction_demo(&sys, &cu, &cv, 100_000, 33).unwrap();
    assert!(r.pass, "{r:?}");
    let row = exact_transitions(&Modality::new(cu.clone(), 0).unwrap(), &cv).unwrap();
    // P(u0 -> v_j) = P(v_j -> u0) for rank-1 classes
    let two_step: f64 = row.iter().map(|p| p * p).sum();
    assert!((two_step - r.exact_return).abs() < 1e-12);
}
