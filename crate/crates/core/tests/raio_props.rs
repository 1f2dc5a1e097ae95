mod common;

use common::*;
use proptest::prelude::*;
use prepsim::random::{
    haar_unitary, random_density, random_proper_projector, random_subprojector, seeded_rng,
};
use prepsim::{
    build_decoupled_instance, build_leaky_instance, build_twin_instance, check_localization_lemma,
    check_raio_conditions, check_raio_equality, evolve_prepared_two_routes, raio_equality_residual,
    tensor_product, Complex64 as C, DimensionSignature, Operator, RaioVerdict, Tolerances,
};

fn sig(d: &[usize]) -> DimensionSignature {
    DimensionSignature::new(d.to_vec()).unwrap()
}

fn amplitudes(theta: f64, phase: f64) -> (C, C) {
    (C::new(theta.cos(), 0.0), C::from_polar(theta.sin(), phase))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn localization_lemma_holds(seed in any::<u64>(), d in prop::sample::select(vec![4usize, 6, 8])) {
        let tol = Tolerances::default();
        let mut rng = seeded_rng(seed);
        let rho: Operator<f64> = random_density(sig(&[d]), &mut rng);
        let p_r = random_proper_projector(sig(&[d]), &mut rng).unwrap();
        let f = random_subprojector(&p_r, &mut rng).unwrap();
        let r = check_localization_lemma(&f, &p_r, &rho, &tol).unwrap();
        prop_assert!(r <= 1e-10);
        // Oracle: tr(Fρ) = tr(F P_R ρ P_R) when F ≤ P_R.
        let lhs = elementwise_trace_product(rho.matrix(), f.matrix()).re;
        let compressed = p_r.matrix() * rho.matrix() * p_r.matrix();
        let rhs = elementwise_trace_product(&compressed, f.matrix()).re;
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn twin_instances_verify(
        seed in any::<u64>(),
        d in prop::sample::select(vec![4usize, 8, 16]),
        theta in 0.1f64..1.47,
        phase in 0.0f64..std::f64::consts::TAU,
    ) {
        let tol = Tolerances::default();
        let (a, b) = amplitudes(theta, phase);
        let inst = build_twin_instance(a, b, d, d / 2, seed, &tol).unwrap();
        let report = check_raio_equality(&inst, &tol).unwrap();
        prop_assert!(report.conditions.all_hold(), "{:?}", report.conditions);
        prop_assert_eq!(report.verdict, RaioVerdict::Verified);
        prop_assert!(report.equality_residual.unwrap() <= 1e-9);
        prop_assert!((report.conditions.p_q - theta.cos().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn verdict_is_invariant_under_a_change_of_basis(seed in any::<u64>()) {
        let tol = Tolerances::default();
        let (a, b) = amplitudes(0.6, 1.0);
        let inst = build_twin_instance(a, b, 4, 2, seed, &tol).unwrap();
        let w = haar_unitary::<f64, _>(sig(&[2, 4]), &mut seeded_rng(seed ^ 0xABCD));
        let moved = inst.conjugated(&w, &tol).unwrap();
        let before = check_raio_equality(&inst, &tol).unwrap();
        let after = check_raio_equality(&moved, &tol).unwrap();
        prop_assert_eq!(before.verdict, after.verdict);
        let [m1, m2, m3] = before.conditions.margins();
        let [n1, n2, n3] = after.conditions.margins();
        prop_assert!((m1 - n1).abs() < 1e-10 && (m2 - n2).abs() < 1e-10 && (m3 - n3).abs() < 1e-10);
        let leaky = build_leaky_instance(a, b, 4, 2, seed, &tol).unwrap();
        let r1 = raio_equality_residual(&leaky, &tol).unwrap();
        let r2 = raio_equality_residual(&leaky.conjugated(&w, &tol).unwrap(), &tol).unwrap();
        prop_assert!((r1 - r2).abs() < 1e-9);
    }

    #[test]
    fn loosening_tolerance_never_breaks_certainty_conditions(seed in any::<u64>(), k in 3i32..9) {
        // Only conditions (ii) and (iii) are monotone: (i) tightens as eps grows.
        let strict = Tolerances::new(10f64.powi(-k - 1), 1e-9, 10f64.powi(-k - 1)).unwrap();
        let loose = Tolerances::new(10f64.powi(-k), 1e-9, 10f64.powi(-k)).unwrap();
        let (a, b) = amplitudes(0.7, 0.3);
        for inst in [
            build_twin_instance(a, b, 6, 3, seed, &strict).unwrap(),
            build_leaky_instance(a, b, 6, 3, seed, &strict).unwrap(),
            build_decoupled_instance(a, b, 6, 3, seed, &strict).unwrap(),
        ] {
            let s = check_raio_conditions(&inst, &strict).unwrap();
            let l = check_raio_conditions(&inst, &loose).unwrap();
            prop_assert!(!s.cond_ii.holds || l.cond_ii.holds);
            prop_assert!(!s.cond_iii.holds || l.cond_iii.holds);
        }
    }

    #[test]
    fn two_routes_agree_with_naive_composite_evolution(seed in any::<u64>(), wide in any::<bool>()) {
        let tol = Tolerances::default();
        let d2 = if wide { 8 } else { 3 };
        let mut rng = seeded_rng(seed);
        let rho: Operator<f64> = random_density(sig(&[2, d2]), &mut rng);
        let q = random_proper_projector(sig(&[d2]), &mut rng).unwrap();
        let u1 = haar_unitary(sig(&[2]), &mut rng);
        let u2 = haar_unitary(sig(&[d2]), &mut rng);
        let routes = evolve_prepared_two_routes(&rho, &q, &u1, &u2, &tol).unwrap();
        prop_assert!(routes.residual.trace_norm <= 1e-10);

        let q_full = naive_embed_second(q.matrix(), 2);
        let collapsed = &q_full * rho.matrix() * &q_full;
        let p = naive_trace(&collapsed);
        let u = naive_kron(u1.matrix(), u2.matrix());
        let evolved = &u * collapsed.map(|z| z / p) * u.adjoint();
        let oracle = naive_trace_second(&evolved, 2, d2);
        prop_assert!(hermitian_trace_norm(&(routes.route_a.matrix() - &oracle)) < 1e-10);
        prop_assert!(hermitian_trace_norm(&(routes.route_b.matrix() - &oracle)) < 1e-10);
    }
}

#[test]
fn decoupled_final_event_breaks_condition_ii() {
    let tol = Tolerances::default();
    let (a, b) = amplitudes(std::f64::consts::FRAC_PI_4, 0.0);
    let mut failing = Vec::new();
    for seed in 0..100u64 {
        let d = [4, 8, 16][(seed % 3) as usize];
        let inst = build_decoupled_instance(a, b, d, d / 2, seed, &tol).unwrap();
        let cond = check_raio_conditions(&inst, &tol).unwrap();
        if !cond.cond_ii.holds {
            failing.push(raio_equality_residual(&inst, &tol).unwrap());
        }
    }
    assert!(failing.len() >= 95, "only {} of 100 failed", failing.len());
    failing.sort_by(f64::total_cmp);
    let median = failing[failing.len() / 2];
    assert!(median > 1e-3, "median residual {median}");
}

#[test]
fn leaky_instances_satisfy_ii_but_not_iii() {
    let tol = Tolerances::default();
    let (a, b) = amplitudes(0.5, 0.2);
    for seed in 0..20u64 {
        let inst = build_leaky_instance(a, b, 8, 4, seed, &tol).unwrap();
        let cond = check_raio_conditions(&inst, &tol).unwrap();
        assert!(cond.cond_i.holds && cond.cond_ii.holds);
        assert!(!cond.cond_iii.holds);
        let report = check_raio_equality(&inst, &tol).unwrap();
        assert_eq!(report.verdict, RaioVerdict::ConditionsViolated);
        assert!(raio_equality_residual(&inst, &tol).unwrap() > 1e-6);
    }
}

#[test]
fn trivial_identity_final_event_violates_iii() {
    let tol = Tolerances::default();
    let (a, b) = amplitudes(0.5, 0.0);
    let inst = build_twin_instance(a, b, 4, 2, 3, &tol).unwrap();
    let all = inst.with_final_event(&Operator::identity(sig(&[2, 4])), &tol).unwrap();
    let cond = check_raio_conditions(&all, &tol).unwrap();
    assert!(cond.cond_ii.holds);
    assert!(!cond.cond_iii.holds);
}

#[test]
fn product_evolution_of_pure_twin_state() {
    // Hand-built instance: |Φ⟩ = (|0⟩|0⟩ + |1⟩|1⟩)/√2, Q = P = |0⟩⟨0| on II, U = X ⊗ I.
    let tol = Tolerances::default();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = nalgebra::DVector::from_vec(vec![C::new(h, 0.0), zero(), zero(), C::new(h, 0.0)]);
    let rho = Operator::pure_state(&psi, sig(&[2, 2]), &tol).unwrap();
    let q = prepsim::embed(
        &Operator::diagonal_projector(&[true, false], sig(&[2])).unwrap(),
        1,
        &sig(&[2, 2]),
    )
    .unwrap();
    let x = nalgebra::DMatrix::from_row_slice(2, 2, &[zero(), C::new(1.0, 0.0), C::new(1.0, 0.0), zero()]);
    let u = tensor_product(
        &Operator::unitary(x, sig(&[2]), &tol).unwrap(),
        &Operator::identity(sig(&[2])),
    );
    let inst = prepsim::RaioInstance::new(&rho, &q, &q, &u, &tol).unwrap();
    let report = check_raio_equality(&inst, &tol).unwrap();
    assert_eq!(report.verdict, RaioVerdict::Verified);
    assert!(report.equality_residual.unwrap() < 1e-14);
}
