//! Acceptance criteria 1–11. Each criterion prints one line with its verdict,
//! the worst residual observed and its wall time; the test fails if any line
//! reports FAIL.

use std::path::Path;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use prepsim::preparators::{hole_packet, spin_up_state};
use prepsim::random::{
    haar_unitary, random_density, random_proper_projector, random_pure_vector,
    random_subprojector, seeded_rng,
};
use prepsim::{
    build_decoupled_instance, build_hole, build_sg, build_twin_instance, check_localization_lemma,
    check_raio_conditions, check_raio_equality, conditional_state, evolve_prepared_two_routes,
    luders_collapse, operator_distance, raio_equality_residual, run_preparation,
    verify_coincidence_factorization, Complex64 as C, DimensionSignature, GridGeometry64, HoleVariant,
    Operator64, PreparationResult, RaioVerdict, SgVariant, Tolerances64,
};
use prepsim_cli::{run_command, Command, RunConfig};

fn sig(d: &[usize]) -> DimensionSignature {
    DimensionSignature::new(d.to_vec()).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn criterion(id: u32, title: &str, limit: Option<Duration>, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = body();
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed < l);
    let pass = out.pass && in_time;
    let limit_text = limit.map(|l| format!(" (limit {:.0} s)", l.as_secs_f64())).unwrap_or_default();
    println!(
        "criterion {id:>2} {}: {title}: {}; {:.3} s{limit_text}",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64()
    );
    pass
}

fn balanced() -> (C, C) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    (C::new(h, 0.0), C::new(h, 0.0))
}

/// Reduced state of `|v⟩⟨v|` on the first factor, with `v = (I ⊗ Q)ψ / ‖(I ⊗ Q)ψ‖`,
/// computed with plain index loops.
fn projected_vector_route(psi: &DVector<C>, q: &DMatrix<C>, d1: usize) -> DMatrix<C> {
    let d2 = q.nrows();
    let mut v = DVector::from_element(d1 * d2, C::new(0.0, 0.0));
    for i in 0..d1 {
        for k in 0..d2 {
            for l in 0..d2 {
                v[i * d2 + k] += q[(k, l)] * psi[i * d2 + l];
            }
        }
    }
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v /= C::new(norm, 0.0);
    let mut out = DMatrix::from_element(d1, d1, C::new(0.0, 0.0));
    for i in 0..d1 {
        for j in 0..d1 {
            for k in 0..d2 {
                out[(i, j)] += v[i * d2 + k] * v[j * d2 + k].conj();
            }
        }
    }
    out
}

fn hermitian_trace_norm(m: &DMatrix<C>) -> f64 {
    let h = (m + m.adjoint()) * C::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().map(|l| l.abs()).sum()
}

fn result_distance(a: &PreparationResult<f64>, b: &PreparationResult<f64>) -> f64 {
    let prepared = operator_distance(&a.prepared_state, &b.prepared_state).unwrap().trace_norm;
    let evolved = operator_distance(&a.evolved_state, &b.evolved_state).unwrap().trace_norm;
    prepared.max(evolved).max((a.probability - b.probability).abs())
}

fn sg_conditional_state() -> Outcome {
    let tol = Tolerances64::default();
    let (a, b) = balanced();
    let geom = GridGeometry64::default();
    let mut worst_p: f64 = 0.0;
    let mut worst_d: f64 = 0.0;
    for variant in [
        SgVariant::Measurement,
        SgVariant::DetectorPassthrough { seed: 0 },
        SgVariant::Negative,
        SgVariant::Geometrical,
    ] {
        let spec = build_sg(a, b, &geom, variant, &tol).unwrap();
        assert_eq!(spec.rho_composite().signature().dims(), &[2, 64]);
        let out = run_preparation(&spec, &tol).unwrap();
        worst_p = worst_p.max((out.probability - 0.5).abs());
        worst_d = worst_d.max(operator_distance(&out.prepared_state, &spin_up_state()).unwrap().trace_norm);
    }
    Outcome {
        pass: worst_p <= 1e-12 && worst_d <= 1e-10,
        detail: format!("|p - 0.5| = {worst_p:.3e} (<= 1e-12), distance to |+z><+z| = {worst_d:.3e} (<= 1e-10)"),
    }
}

fn sg_amplitude_law() -> Outcome {
    let tol = Tolerances64::default();
    let geom = GridGeometry64::default();
    let (mut worst_p, mut worst_d, mut checked) = (0.0f64, 0.0f64, 0);
    for seed in 0..50 {
        let v = random_pure_vector::<f64, _>(2, &mut seeded_rng(seed));
        let (a, b) = (v[0], v[1]);
        let out = run_preparation(&build_sg(a, b, &geom, SgVariant::Negative, &tol).unwrap(), &tol).unwrap();
        worst_p = worst_p.max((out.probability - a.norm_sqr()).abs());
        if a.norm_sqr() > 1e-6 {
            checked += 1;
            worst_d = worst_d.max(operator_distance(&out.prepared_state, &spin_up_state()).unwrap().trace_norm);
        }
    }
    Outcome {
        pass: worst_p <= 1e-10 && worst_d <= 1e-10,
        detail: format!("max |p - |alpha|^2| = {worst_p:.3e}, max state distance = {worst_d:.3e} over {checked} states (<= 1e-10)"),
    }
}

fn pure_state_routes() -> Outcome {
    let tol = Tolerances64::default();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for (d1, d2) in [(2, 3), (3, 4), (2, 8)] {
        for seed in 0..200u64 {
            let mut rng = seeded_rng(seed);
            let psi = random_pure_vector::<f64, _>(d1 * d2, &mut rng);
            let rho = Operator64::pure_state(&psi, sig(&[d1, d2]), &tol).unwrap();
            let q = random_proper_projector(sig(&[d2]), &mut rng).unwrap();
            let via_trace = conditional_state(&rho, &q, &tol).unwrap().state;
            let via_vector = projected_vector_route(&psi, q.matrix(), d1);
            worst = worst.max(hermitian_trace_norm(&(via_trace.matrix() - via_vector)));
            cases += 1;
        }
    }
    Outcome {
        pass: worst <= 1e-10,
        detail: format!("max trace-norm gap = {worst:.3e} over {cases} cases (<= 1e-10)"),
    }
}

fn coincidence_factorization() -> Outcome {
    let tol = Tolerances64::default();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for dims in [[2, 3], [3, 3]] {
        for seed in 0..500u64 {
            let mut rng = seeded_rng(seed);
            let rho: Operator64 = random_density(sig(&dims), &mut rng);
            let p = random_proper_projector(sig(&dims[..1]), &mut rng).unwrap();
            let q = random_proper_projector(sig(&dims[1..]), &mut rng).unwrap();
            worst = worst.max(verify_coincidence_factorization(&rho, &p, &q, &tol).unwrap());
            cases += 1;
        }
    }
    Outcome {
        pass: worst <= 1e-10,
        detail: format!("max residual = {worst:.3e} over {cases} triples (<= 1e-10)"),
    }
}

fn localization_lemma() -> Outcome {
    let tol = Tolerances64::default();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for d in [4, 6, 8] {
        for seed in 0..1000u64 {
            let mut rng = seeded_rng(seed);
            let rho: Operator64 = random_density(sig(&[d]), &mut rng);
            let p_r = random_proper_projector(sig(&[d]), &mut rng).unwrap();
            let f = random_subprojector(&p_r, &mut rng).unwrap();
            worst = worst.max(check_localization_lemma(&f, &p_r, &rho, &tol).unwrap());
            cases += 1;
        }
    }
    Outcome {
        pass: worst <= 1e-10,
        detail: format!("max residual = {worst:.3e} over {cases} triples (<= 1e-10)"),
    }
}

fn raio_theorem() -> Outcome {
    let tol = Tolerances64::default();
    let mut worst: f64 = 0.0;
    let mut unverified = Vec::new();
    let mut cases = 0;
    for d in [4, 8, 16] {
        for seed in 0..100u64 {
            let v = random_pure_vector::<f64, _>(2, &mut seeded_rng(seed ^ 0x5eed));
            let (a, b) = if v[0].norm_sqr() > 0.01 && v[1].norm_sqr() > 0.01 {
                (v[0], v[1])
            } else {
                balanced()
            };
            let inst = build_twin_instance(a, b, d, d / 2, seed, &tol).unwrap();
            let report = check_raio_equality(&inst, &tol).unwrap();
            if report.verdict != RaioVerdict::Verified || !report.conditions.all_hold() {
                unverified.push((d, seed));
            }
            worst = worst.max(report.equality_residual.unwrap_or(f64::INFINITY));
            cases += 1;
        }
    }
    Outcome {
        pass: unverified.is_empty() && worst <= 1e-9,
        detail: format!(
            "{} of {cases} instances verified, max equality residual = {worst:.3e} (<= 1e-9){}",
            cases - unverified.len(),
            if unverified.is_empty() { String::new() } else { format!(", unverified {unverified:?}") }
        ),
    }
}

fn conditions_are_load_bearing() -> Outcome {
    let tol = Tolerances64::default();
    let (a, b) = balanced();
    let mut failing = Vec::new();
    let mut residuals = Vec::new();
    let mut held = Vec::new();
    for seed in 0..100u64 {
        let d = [4, 8, 16][(seed % 3) as usize];
        let inst = build_decoupled_instance(a, b, d, d / 2, seed, &tol).unwrap();
        if check_raio_conditions(&inst, &tol).unwrap().cond_ii.holds {
            held.push(seed);
        } else {
            failing.push(seed);
            residuals.push(raio_equality_residual(&inst, &tol).unwrap());
        }
    }
    residuals.sort_by(f64::total_cmp);
    let median = if residuals.is_empty() {
        f64::NAN
    } else {
        let n = residuals.len();
        if n % 2 == 1 {
            residuals[n / 2]
        } else {
            0.5 * (residuals[n / 2 - 1] + residuals[n / 2])
        }
    };
    let fraction = failing.len() as f64 / 100.0;
    Outcome {
        pass: fraction >= 0.95 && median > 1e-3,
        detail: format!(
            "condition (ii) failed for {:.2} of instances (>= 0.95), median residual among them = {median:.3e} (> 1e-3); failing seeds {failing:?}; held for seeds {held:?}",
            fraction
        ),
    }
}

fn evolution_factorization() -> Outcome {
    let tol = Tolerances64::default();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for d2 in [3, 8] {
        for seed in 0..200u64 {
            let mut rng = seeded_rng(seed);
            let rho: Operator64 = random_density(sig(&[2, d2]), &mut rng);
            let q = random_proper_projector(sig(&[d2]), &mut rng).unwrap();
            let u1 = haar_unitary(sig(&[2]), &mut rng);
            let u2 = haar_unitary(sig(&[d2]), &mut rng);
            let routes = evolve_prepared_two_routes(&rho, &q, &u1, &u2, &tol).unwrap();
            worst = worst.max(routes.residual.trace_norm);
            cases += 1;
        }
    }
    Outcome {
        pass: worst <= 1e-10,
        detail: format!("max two-route residual = {worst:.3e} over {cases} cases (<= 1e-10)"),
    }
}

fn seeded_geometry(seed: u64) -> GridGeometry64 {
    use rand::Rng;
    let mut rng = seeded_rng(seed);
    let n_sites = rng.random_range(8..64usize);
    let split_index = rng.random_range(2..n_sites - 1);
    GridGeometry64 {
        n_sites,
        split_index,
        packet_width: rng.random_range(0.5..5.0),
        packet_centers: (
            rng.random_range(split_index as f64..(n_sites - 1) as f64),
            rng.random_range(0.0..(split_index - 1) as f64),
        ),
    }
}

fn dynamical_geometrical_equivalence() -> Outcome {
    let tol = Tolerances64::default();
    let (mut worst_sg, mut worst_hole) = (0.0f64, 0.0f64);
    for seed in 0..20u64 {
        let g = seeded_geometry(seed);
        let v = random_pure_vector::<f64, _>(2, &mut seeded_rng(seed + 500));
        let sg = |variant| run_preparation(&build_sg(v[0], v[1], &g, variant, &tol).unwrap(), &tol).unwrap();
        worst_sg = worst_sg.max(result_distance(&sg(SgVariant::Negative), &sg(SgVariant::Geometrical)));
        let psi = hole_packet(&g).unwrap();
        let hole = |variant| run_preparation(&build_hole(&psi, &g, variant, &tol).unwrap(), &tol).unwrap();
        worst_hole = worst_hole.max(result_distance(&hole(HoleVariant::Negative), &hole(HoleVariant::Geometrical)));
    }
    Outcome {
        pass: worst_sg <= 1e-12 && worst_hole <= 1e-12,
        detail: format!("max gap: sg {worst_sg:.3e}, hole {worst_hole:.3e} over 20 geometries (<= 1e-12)"),
    }
}

fn luders_idempotence_and_certainty() -> Outcome {
    let tol = Tolerances64::default();
    let (mut worst_twice, mut worst_certain, mut certain_cases) = (0.0f64, 0.0f64, 0);
    for seed in 0..500u64 {
        let mut rng = seeded_rng(seed);
        let f = random_proper_projector(sig(&[6]), &mut rng).unwrap();
        let mut rho: Operator64 = random_density(sig(&[6]), &mut rng);
        if seed % 2 == 1 {
            // Supported inside range(F), so tr(ρF) = 1.
            let inside = f.matrix() * rho.matrix() * f.matrix();
            let inside = &inside / inside.trace();
            let inside = (&inside + inside.adjoint()) * C::new(0.5, 0.0);
            rho = Operator64::density(inside, sig(&[6]), &tol).unwrap();
        }
        let once = luders_collapse(&rho, &f, &tol).unwrap();
        let twice = luders_collapse(&once.state, &f, &tol).unwrap();
        worst_twice = worst_twice.max(operator_distance(&once.state, &twice.state).unwrap().trace_norm);
        if once.raw_probability >= 1.0 - 1e-9 {
            certain_cases += 1;
            worst_certain = worst_certain.max(operator_distance(&once.state, &rho).unwrap().trace_norm);
        }
    }
    Outcome {
        pass: worst_twice <= 1e-10 && worst_certain <= 1e-9 && certain_cases > 0,
        detail: format!(
            "double vs single collapse {worst_twice:.3e} (<= 1e-10); certain events {certain_cases}, max change {worst_certain:.3e} (<= 1e-9)"
        ),
    }
}

fn determinism() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut lines = Vec::new();
    let mut pass = true;
    for (name, trials) in [("raio-twin", 100), ("sg-negative", 5), ("hole-geometrical", 5)] {
        let cfg = RunConfig::new(Command::Sweep, dir.join(format!("{name}.toml")))
            .with_seed(2024)
            .with_trials(trials);
        let first = run_command(&cfg).unwrap().numeric_payload();
        let second = run_command(&cfg).unwrap().numeric_payload();
        let threaded = run_command(&cfg.clone().with_threads(4)).unwrap().numeric_payload();
        let same = first == second && first == threaded;
        pass &= same;
        lines.push(format!("{name} x{trials}: {}", if same { "identical" } else { "differs" }));
    }
    Outcome {
        pass,
        detail: format!("rerun payload bytes {}", lines.join(", ")),
    }
}

#[test]
fn acceptance_criteria() {
    let s = Duration::from_secs;
    let results = [
        criterion(1, "SG conditional state", Some(s(1)), sg_conditional_state),
        criterion(2, "SG amplitude law", Some(s(5)), sg_amplitude_law),
        criterion(3, "conditional state by trace and by projected vector", Some(s(10)), pure_state_routes),
        criterion(4, "coincidence factorization", Some(s(10)), coincidence_factorization),
        criterion(5, "localization lemma", Some(s(20)), localization_lemma),
        criterion(6, "RAIO theorem on twin instances", Some(s(30)), raio_theorem),
        criterion(7, "RAIO conditions are load-bearing", Some(s(30)), conditions_are_load_bearing),
        criterion(8, "evolution factorization", Some(s(15)), evolution_factorization),
        criterion(9, "dynamical/geometrical equivalence", Some(s(5)), dynamical_geometrical_equivalence),
        criterion(10, "Luders idempotence and certainty", Some(s(10)), luders_idempotence_and_certainty),
        criterion(11, "sweep determinism", None, determinism),
    ];
    let failed: Vec<usize> = (0..results.len()).filter(|&i| !results[i]).map(|i| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

