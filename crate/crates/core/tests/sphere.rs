use gleason_csm::frame::FrameFunction;
use gleason_csm::hilbert::{random_unit_vector, DensityMatrix, Field, UnitVector};
use gleason_csm::seed;
use gleason_csm::sphere::{
    basic_lemma_decomposition, build_piron_chain, central_projection, descent_through, verify_monotonicity,
};
use rand::Rng;

fn random_pole_function(rng: &mut seed::SimRng) -> (UnitVector, FrameFunction) {
    let p = random_unit_vector(3, Field::Real, rng).unwrap();
    let f = FrameFunction::born(DensityMatrix::pure(&p), Field::Real);
    (p, f)
}

#[test]
fn descents_never_increase_f() {
    let mut rng = seed::rng(1);
    for _ in 0..100 {
        let (p, f) = random_pole_function(&mut rng);
        let u = random_unit_vector(3, Field::Real, &mut rng).unwrap();
        let d = descent_through(&u, &p).unwrap();
        let up = d.point(rng.random::<f64>() * 6.3).unwrap();
        let r = basic_lemma_decomposition(&f, &u, &up, &p).unwrap();
        assert!(r.f_u >= r.f_uprime - 1e-12);
        assert!(r.residual < 1e-10 && r.f_v < 1e-12);
    }
}

#[test]
fn plane_normal_is_along_u_cross_e() {
    let mut rng = seed::rng(2);
    for _ in 0..100 {
        let p = random_unit_vector(3, Field::Real, &mut rng).unwrap();
        let u = random_unit_vector(3, Field::Real, &mut rng).unwrap();
        let d = descent_through(&u, &p).unwrap();
        let (u3, e3, n3) = (
            d.top().unwrap().to_real3().unwrap(),
            d.equatorial().unwrap().to_real3().unwrap(),
            d.plane_normal().unwrap().to_real3().unwrap(),
        );
        assert!((u3.cross(&e3) - n3).norm() < 1e-10 || (u3.cross(&e3) + n3).norm() < 1e-10);
        assert!(e3.dot(&p.to_real3().unwrap()).abs() < 1e-10);
    }
}

#[test]
fn chains_for_pure_states() {
    let mut rng = seed::rng(3);
    let mut built = 0;
    while built < 100 {
        let (p, f) = random_pole_function(&mut rng);
        let a = random_unit_vector(3, Field::Real, &mut rng).unwrap();
        let b = random_unit_vector(3, Field::Real, &mut rng).unwrap();
        let (u, v) = if a.overlap(&p) > b.overlap(&p) { (a, b) } else { (b, a) };
        if u.overlap(&p) - v.overlap(&p) < 0.05 || v.overlap(&p) < 1e-6 {
            continue;
        }
        let chain = build_piron_chain(&u, &v, &p, 200).unwrap();
        assert!(chain.vectors()[0].same_ray(&u, 1e-12));
        let end = chain.vectors().last().unwrap();
        assert!(end.same_ray(&v, 1e-8), "end off by {}", end.ray_distance(&v));
        let report = verify_monotonicity(&f, &chain).unwrap();
        assert!((report.f_start - u.overlap(&p)).abs() < 1e-10);
        built += 1;
    }
}

#[test]
fn projection_is_injective() {
    let mut rng = seed::rng(4);
    let p = UnitVector::basis_vector(3, 2, Field::Real).unwrap();
    let mut tested = 0;
    while tested < 10_000 {
        let a = random_unit_vector(3, Field::Real, &mut rng).unwrap();
        let b = random_unit_vector(3, Field::Real, &mut rng).unwrap();
        if a.overlap(&p) < 1e-6 || b.overlap(&p) < 1e-6 || a.ray_distance(&b) < 1e-6 {
            continue;
        }
        let (x, y) = (central_projection(&a, &p).unwrap(), central_projection(&b, &p).unwrap());
        assert!((x[0] - y[0]).hypot(x[1] - y[1]) >= 1e-12);
        tested += 1;
    }
}
