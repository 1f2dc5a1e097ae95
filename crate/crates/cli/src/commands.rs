use std::collections::BTreeMap;
use std::time::Instant;

use prepsim::random::{haar_unitary, random_density, random_projector, random_subprojector, trial_rng};
use prepsim::{
    check_localization_lemma, check_raio_equality, embed, evolve_prepared_two_routes, event_probability,
    luders_collapse, make_half_space_projector, operator_distance, raio_equality_residual, run_preparation,
    verify_coincidence_factorization, DimensionSignature, Operator64, Occurrence, RaioInstance64,
    RaioReport, RaioVerdict, Side, Tolerances64, Trigger,
};
use rayon::prelude::*;

use crate::config::{Command, RunConfig};
use crate::error::{CliError, Result};
use crate::report::{
    Check, OperatorAudit, Payload, PreparationPayload, RaioPayload, Report, ScenarioEcho, SweepPayload,
    TrialFailure, TrialRecord, ValidationPayload,
};
use crate::scenario::{load_scenario, ModelInfo, Scenario, Setup};

/// Loads the scenario named in `cfg` and executes the command.
pub fn run_command(cfg: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let scenario = load_scenario(&cfg.scenario_path, &cfg.tolerance_overrides)?;
    let mut report = run_scenario(&scenario, cfg)?;
    report.wall_time_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Executes the command on an already loaded scenario. The wall time is left at zero.
pub fn run_scenario(scenario: &Scenario, cfg: &RunConfig) -> Result<Report> {
    if cfg.trials == 0 {
        return Err(CliError::Usage("trials must be at least 1".into()));
    }
    let (root_seed, payload, checks) = match cfg.command {
        Command::Run => run(scenario, cfg)?,
        Command::RaioCheck => raio_check(scenario, cfg)?,
        Command::Sweep => match cfg.threads {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start {n} worker threads: {e}")))?
                .install(|| sweep(scenario, cfg))?,
            None => sweep(scenario, cfg)?,
        },
        Command::Validate => validate(scenario, cfg)?,
    };
    let passed = checks.iter().all(|c| c.pass);
    Ok(Report {
        tool: "prepsim".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: cfg.command.as_str().into(),
        scenario: ScenarioEcho {
            path: scenario.origin.clone(),
            label: scenario.label(),
            model: scenario.file.model.as_str().into(),
            variant: scenario.file.variant.clone(),
            signature: scenario.signature(),
        },
        root_seed,
        trials: (cfg.command == Command::Sweep).then_some(cfg.trials),
        tolerances: (&scenario.tolerances).into(),
        payload,
        checks,
        passed,
        wall_time_seconds: 0.0,
    })
}

type Outcome = (u64, Payload, Vec<Check>);
type TrialOutcome = Result<(TrialRecord, Vec<Check>)>;

fn run(scenario: &Scenario, cfg: &RunConfig) -> Result<Outcome> {
    let tol = &scenario.tolerances;
    let Setup::Preparator { spec, info } = &scenario.setup else {
        return Err(CliError::Usage(format!(
            "{} describes a RAIO instance, not a preparator; use raio-check, sweep or validate",
            scenario.origin
        )));
    };
    let result = run_preparation(spec, tol)?;
    let mut checks = vec![
        Check::at_most(
            "prepared_state_density",
            result.prepared_state.kind_deviation(),
            tol.validation_eps,
        ),
        Check::at_most(
            "evolved_state_density",
            result.evolved_state.kind_deviation(),
            tol.validation_eps,
        ),
        Check::at_most(
            "evolution_two_routes",
            result.two_route_residual.trace_norm,
            tol.identity_eps,
        ),
    ];
    let mut spin_up_fidelity = None;
    match info {
        ModelInfo::Sg { alpha, .. } => {
            let fidelity = result.prepared_state.matrix()[(0, 0)].re;
            spin_up_fidelity = Some(fidelity);
            checks.push(Check::at_most(
                "trigger_probability_amplitude_law",
                (result.raw_probability - alpha.norm_sqr()).abs(),
                tol.identity_eps,
            ));
            if alpha.norm_sqr() > tol.certainty_eps {
                checks.push(Check::at_most("spin_up_fidelity", (1.0 - fidelity).abs(), tol.identity_eps));
            }
        }
        ModelInfo::Hole { geometry } => {
            let screen = make_half_space_projector(geometry, Side::Lower)?;
            let leak = screen.compose(&result.prepared_state)?;
            checks.push(Check::at_most(
                "prepared_support_in_hole",
                prepsim::tensor::max_entry(leak.matrix()),
                tol.identity_eps,
            ));
        }
        ModelInfo::Custom => {}
    }
    let (t_i, t_f) = spec.times();
    let payload = PreparationPayload {
        kind: spec.kind().as_str().into(),
        occurrence: spec.occurrence().as_str().into(),
        times: [t_i, t_f],
        probability: result.probability,
        raw_probability: result.raw_probability,
        spin_up_fidelity,
        prepared_state: (&result.prepared_state).into(),
        evolved_state: (&result.evolved_state).into(),
        two_route_residual: result.two_route_residual.into(),
    };
    Ok((cfg.seed.unwrap_or(0), Payload::Preparation(payload), checks))
}

fn raio_payload(inst: &RaioInstance64, seed: Option<u64>, tol: &Tolerances64) -> Result<(RaioPayload, Vec<Check>)> {
    let report = check_raio_equality(inst, tol)?;
    let unconditional = raio_equality_residual(inst, tol).ok();
    let checks = raio_checks(&report, unconditional, tol);
    Ok((
        RaioPayload {
            instance_seed: seed,
            conditions: report.conditions,
            verdict: report.verdict.as_str().into(),
            equality_residual: report.equality_residual,
            unconditional_residual: unconditional,
        },
        checks,
    ))
}

/// Condition (i) reports its violation below the margin; (ii) and (iii) the
/// shortfall of the evolved probability from 1; the equality its trace-norm residual.
fn raio_checks(report: &RaioReport<f64>, unconditional: Option<f64>, tol: &Tolerances64) -> Vec<Check> {
    let c = &report.conditions;
    // margin = p − (1 − eps), so the shortfall 1 − p is eps − margin.
    let shortfall = |margin: f64| (tol.certainty_eps - margin).max(0.0);
    vec![
        Check::with_pass("raio_condition_i", (-c.cond_i.margin).max(0.0), 0.0, c.cond_i.holds),
        Check::with_pass("raio_condition_ii", shortfall(c.cond_ii.margin), tol.certainty_eps, c.cond_ii.holds),
        Check::with_pass("raio_condition_iii", shortfall(c.cond_iii.margin), tol.certainty_eps, c.cond_iii.holds),
        Check::with_pass(
            "raio_equality",
            report.equality_residual.or(unconditional).unwrap_or(f64::NAN),
            tol.identity_eps,
            report.verdict == RaioVerdict::Verified,
        ),
    ]
}

fn raio_check(scenario: &Scenario, cfg: &RunConfig) -> Result<Outcome> {
    let tol = &scenario.tolerances;
    match &scenario.setup {
        Setup::Raio { twin, instance } => {
            let seed = cfg.seed.unwrap_or(twin.seed);
            let inst = if seed == twin.seed {
                instance.clone()
            } else {
                twin.build(seed, tol)?
            };
            let (payload, checks) = raio_payload(&inst, Some(seed), tol)?;
            Ok((seed, Payload::Raio(payload), checks))
        }
        Setup::Preparator { spec, .. } => {
            let inst = spec.raio_instance(tol)?;
            let (payload, checks) = raio_payload(&inst, None, tol)?;
            Ok((cfg.seed.unwrap_or(0), Payload::Raio(payload), checks))
        }
    }
}

fn sweep(scenario: &Scenario, cfg: &RunConfig) -> Result<Outcome> {
    let tol = scenario.tolerances;
    let root = cfg.seed.unwrap_or(0);
    let (kind, trials): (&str, Vec<TrialOutcome>) = match &scenario.setup {
        Setup::Raio { twin, .. } => (
            "raio",
            (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let seed = root.wrapping_add(t);
                    let inst = twin.build(seed, &tol)?;
                    let (_, checks) = raio_payload(&inst, Some(seed), &tol)?;
                    Ok((record(t, seed, &checks), checks))
                })
                .collect(),
        ),
        Setup::Preparator { spec, .. } => {
            let dims = spec.rho_composite().signature().dims().to_vec();
            (
                "properties",
                (0..cfg.trials)
                    .into_par_iter()
                    .map(|t| {
                        let checks = property_trial(&dims, root, t, &tol)?;
                        Ok((record(t, root.wrapping_add(t), &checks), checks))
                    })
                    .collect(),
            )
        }
    };
    let trials = trials.into_iter().collect::<Result<Vec<_>>>()?;

    let mut pass_counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut max_residuals: BTreeMap<String, f64> = BTreeMap::new();
    let mut tolerances: BTreeMap<String, f64> = BTreeMap::new();
    let mut failures = Vec::new();
    let mut records = Vec::with_capacity(trials.len());
    for (rec, checks) in trials {
        for c in &checks {
            *pass_counts.entry(c.name.clone()).or_default() += u64::from(c.pass);
            let m = max_residuals.entry(c.name.clone()).or_insert(f64::NEG_INFINITY);
            *m = m.max(c.residual);
            tolerances.insert(c.name.clone(), c.tolerance);
        }
        if !rec.pass {
            failures.push(TrialFailure {
                seed: rec.seed,
                checks: checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()).collect(),
            });
        }
        records.push(rec);
    }
    let checks = pass_counts
        .iter()
        .map(|(name, &count)| {
            Check::with_pass(
                name.clone(),
                max_residuals[name],
                tolerances[name],
                count == cfg.trials,
            )
        })
        .collect();
    let payload = SweepPayload {
        sweep: kind.into(),
        trials: cfg.trials,
        passed_trials: records.iter().filter(|r| r.pass).count() as u64,
        pass_counts,
        max_residuals,
        failures,
        records,
    };
    Ok((root, Payload::Sweep(payload), checks))
}

fn record(trial: u64, seed: u64, checks: &[Check]) -> TrialRecord {
    TrialRecord {
        trial,
        seed,
        pass: checks.iter().all(|c| c.pass),
        residuals: checks.iter().map(|c| (c.name.clone(), c.residual)).collect(),
    }
}

/// Random projector of rank about half the dimension; the identity on a
/// one-dimensional factor.
fn half_projector(d: usize, rng: &mut prepsim::random::SeededRng) -> prepsim::Result<Operator64> {
    let sig = DimensionSignature::single(d)?;
    if d < 2 {
        return Ok(Operator64::identity(sig));
    }
    random_projector(sig, d / 2, rng)
}

/// Randomized invariants on the scenario's factor dimensions.
fn property_trial(dims: &[usize], root: u64, t: u64, tol: &Tolerances64) -> Result<Vec<Check>> {
    let mut rng = trial_rng(root, t);
    let sig = DimensionSignature::new(dims.to_vec())?;
    let rho: Operator64 = random_density(sig.clone(), &mut rng);
    let p_i = half_projector(dims[0], &mut rng)?;
    let q = half_projector(dims[1], &mut rng)?;
    let u_i = haar_unitary(DimensionSignature::single(dims[0])?, &mut rng);
    let u_ii = haar_unitary(DimensionSignature::single(dims[1])?, &mut rng);

    let routes = evolve_prepared_two_routes(&rho, &q, &u_i, &u_ii, tol)?;
    let coincidence = verify_coincidence_factorization(&rho, &p_i, &q, tol)?;
    let q_full = embed(&q, 1, &sig)?;
    let once = luders_collapse(&rho, &q_full, tol)?.state;
    let twice = luders_collapse(&once, &q_full, tol)?.state;
    let idempotence = operator_distance(&once, &twice)?.trace_norm;
    let f = random_subprojector(&q_full, &mut rng)?;
    let localization = check_localization_lemma(&f, &q_full, &rho, tol)?;
    Ok(vec![
        Check::at_most("coincidence_factorization", coincidence, tol.identity_eps),
        Check::at_most("evolution_two_routes", routes.residual.trace_norm, tol.identity_eps),
        Check::at_most("localization_lemma", localization, tol.identity_eps),
        Check::at_most("luders_idempotence", idempotence, tol.identity_eps),
    ])
}

fn audit(name: &str, op: &Operator64, tol: &Tolerances64) -> (OperatorAudit, Check) {
    let deviation = op.kind_deviation();
    (
        OperatorAudit {
            name: name.into(),
            kind: op.kind().as_str().into(),
            dims: op.signature().dims().to_vec(),
            deviation,
        },
        Check::at_most(format!("{name}_is_{}", op.kind()), deviation, tol.validation_eps),
    )
}

fn validate(scenario: &Scenario, cfg: &RunConfig) -> Result<Outcome> {
    let tol = &scenario.tolerances;
    let mut entries: Vec<(&str, Operator64)> = Vec::new();
    let (probability, possible_required) = match &scenario.setup {
        Setup::Preparator { spec, .. } => {
            entries.push(("rho_composite", spec.rho_composite().clone()));
            if let Trigger::Event(q) = spec.trigger() {
                entries.push(("trigger", q.clone()));
            }
            entries.push(("u_object", spec.u_object().clone()));
            entries.push(("u_preparator", spec.u_preparator().clone()));
            let p = event_probability(spec.rho_composite(), &spec.trigger_operator(), Some(1), tol)?;
            (p.raw, spec.occurrence() != Occurrence::None)
        }
        Setup::Raio { instance, .. } => {
            entries.push(("rho_initial", instance.rho_initial().clone()));
            entries.push(("trigger", instance.trigger().clone()));
            entries.push(("final_event", instance.final_event().clone()));
            entries.push(("evolution", instance.evolution().clone()));
            let p = event_probability(instance.rho_initial(), instance.trigger(), None, tol)?;
            (p.raw, true)
        }
    };
    let (operators, mut checks): (Vec<_>, Vec<_>) = entries.iter().map(|(n, op)| audit(n, op, tol)).unzip();
    if possible_required {
        checks.push(Check::with_pass(
            "trigger_possible",
            (tol.certainty_eps - probability).max(0.0),
            0.0,
            probability > tol.certainty_eps,
        ));
    }
    if let Setup::Preparator {
        info: ModelInfo::Sg { alpha, beta, .. },
        ..
    } = &scenario.setup
    {
        checks.push(Check::at_most(
            "amplitudes_normalized",
            (alpha.norm_sqr() + beta.norm_sqr() - 1.0).abs(),
            tol.validation_eps,
        ));
    }
    let payload = ValidationPayload {
        operators,
        trigger_probability: probability,
    };
    Ok((cfg.seed.unwrap_or(0), Payload::Validation(payload), checks))
}
