//! Retroactive apparent ideal occurrence (RAIO).
//!
//! Given an initial state `ρ(t_i)`, a triggering event `Q`, a final event `P`
//! and the evolution `U` from `t_i` to `t_f`, the theorem states that when
//!
//! 1. `0 < tr(Q ρ(t_i)) < 1`,
//! 2. ideal occurrence of `Q` at `t_i` makes `P` certain at `t_f`, and
//! 3. ideal occurrence of `Q^⊥` at `t_i` makes `P^⊥` certain at `t_f`,
//!
//! collapsing on `P` after the evolution gives the same state as collapsing on
//! `Q` before it:
//!
//! ```text
//! P ρ(t_f) P / tr(P ρ(t_f))  =  U [Q ρ(t_i) Q / tr(Q ρ(t_i))] U†
//! ```
//!
//! This module checks the conditions and the equality numerically, along with
//! the localization lemma and the factorized evolution of a prepared state.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::collapse::{conditional_state, luders_collapse, probability_unchecked};
use crate::error::{Error, Result};
use crate::random::{haar_unitary_matrix, random_projector, random_pure_vector, seeded_rng};
use crate::scalar::{c, c_zero, Real, C};
use crate::tensor::{
    embed, operator_distance, partial_trace, tensor_product, DimensionSignature, Distance, Operator,
    OperatorKind, Tolerances,
};

/// The four operators entering the RAIO theorem, all on one signature.
#[derive(Clone, Debug, PartialEq)]
pub struct RaioInstance<T: Real> {
    rho_initial: Operator<T>,
    trigger: Operator<T>,
    final_event: Operator<T>,
    evolution: Operator<T>,
}

impl<T: Real> RaioInstance<T> {
    pub fn new(
        rho_initial: &Operator<T>,
        trigger: &Operator<T>,
        final_event: &Operator<T>,
        evolution: &Operator<T>,
        tol: &Tolerances<T>,
    ) -> Result<Self> {
        rho_initial.require_same_signature(trigger)?;
        rho_initial.require_same_signature(final_event)?;
        rho_initial.require_same_signature(evolution)?;
        Ok(Self {
            rho_initial: rho_initial.ensure_kind(OperatorKind::Density, tol)?,
            trigger: trigger.ensure_kind(OperatorKind::Projector, tol)?,
            final_event: final_event.ensure_kind(OperatorKind::Projector, tol)?,
            evolution: evolution.ensure_kind(OperatorKind::Unitary, tol)?,
        })
    }

    pub fn rho_initial(&self) -> &Operator<T> {
        &self.rho_initial
    }

    pub fn trigger(&self) -> &Operator<T> {
        &self.trigger
    }

    pub fn final_event(&self) -> &Operator<T> {
        &self.final_event
    }

    pub fn evolution(&self) -> &Operator<T> {
        &self.evolution
    }

    pub fn signature(&self) -> &DimensionSignature {
        self.rho_initial.signature()
    }

    /// `ρ(t_f) = U ρ(t_i) U†`.
    pub fn rho_final(&self) -> Operator<T> {
        self.rho_initial
            .conjugate_by(&self.evolution)
            .expect("signatures checked at construction")
    }

    /// Conjugates every operator by the unitary `w`: ρ→WρW†, Q→WQW†, P→WPW†, U→WUW†.
    pub fn conjugated(&self, w: &Operator<T>, tol: &Tolerances<T>) -> Result<Self> {
        let w = w.ensure_kind(OperatorKind::Unitary, tol)?;
        Ok(Self {
            rho_initial: self.rho_initial.conjugate_by(&w)?,
            trigger: self.trigger.conjugate_by(&w)?,
            final_event: self.final_event.conjugate_by(&w)?,
            evolution: self.evolution.conjugate_by(&w)?,
        })
    }

    /// Replaces the final event, keeping the other three operators.
    pub fn with_final_event(&self, final_event: &Operator<T>, tol: &Tolerances<T>) -> Result<Self> {
        Self::new(&self.rho_initial, &self.trigger, final_event, &self.evolution, tol)
    }
}

/// Outcome of one theorem condition; `margin > 0` (or `>= 0`) means it holds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck<T> {
    pub holds: bool,
    pub margin: T,
}

/// Verdicts of conditions (i)–(iii).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RaioConditions<T> {
    /// `tr(Q ρ(t_i))`.
    pub p_q: T,
    pub cond_i: ConditionCheck<T>,
    pub cond_ii: ConditionCheck<T>,
    pub cond_iii: ConditionCheck<T>,
}

impl<T: Real> RaioConditions<T> {
    pub fn all_hold(&self) -> bool {
        self.cond_i.holds && self.cond_ii.holds && self.cond_iii.holds
    }

    pub fn margins(&self) -> [T; 3] {
        [self.cond_i.margin, self.cond_ii.margin, self.cond_iii.margin]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RaioVerdict {
    Verified,
    ConditionsViolated,
    EqualityViolated,
}

impl RaioVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Verified => "verified",
            Self::ConditionsViolated => "conditions-violated",
            Self::EqualityViolated => "equality-violated",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RaioReport<T> {
    pub conditions: RaioConditions<T>,
    /// Trace-norm residual of the RAIO equality; `None` when the conditions
    /// failed and the equality was not evaluated.
    pub equality_residual: Option<T>,
    pub verdict: RaioVerdict,
}

/// Probability of `target` after ideal occurrence of `event` in `rho` and
/// evolution by `u`; zero when `event` cannot occur.
fn certainty_after<T: Real>(
    rho: &Operator<T>,
    event: &Operator<T>,
    target: &Operator<T>,
    u: &Operator<T>,
    tol: &Tolerances<T>,
) -> Result<T> {
    match luders_collapse(rho, event, tol) {
        Ok(collapsed) => {
            let evolved = collapsed.state.conjugate_by(u)?;
            Ok(evolved.trace_product(target)?.re)
        }
        Err(Error::ImpossibleEvent(_)) => Ok(T::zero()),
        Err(e) => Err(e),
    }
}

/// Evaluates conditions (i)–(iii) with margins.
pub fn check_raio_conditions<T: Real>(
    inst: &RaioInstance<T>,
    tol: &Tolerances<T>,
) -> Result<RaioConditions<T>> {
    let eps = tol.certainty_eps;
    let one = T::one();
    let p_q = probability_unchecked(&inst.rho_initial, &inst.trigger, tol)?.raw;
    let margin_i = (p_q - eps).min(one - eps - p_q);

    let p_after_q = certainty_after(
        &inst.rho_initial,
        &inst.trigger,
        &inst.final_event,
        &inst.evolution,
        tol,
    )?;
    let p_after_not_q = certainty_after(
        &inst.rho_initial,
        &inst.trigger.complement(),
        &inst.final_event.complement(),
        &inst.evolution,
        tol,
    )?;
    let margin_ii = p_after_q - (one - eps);
    let margin_iii = p_after_not_q - (one - eps);
    Ok(RaioConditions {
        p_q,
        cond_i: ConditionCheck {
            holds: margin_i > T::zero(),
            margin: margin_i,
        },
        cond_ii: ConditionCheck {
            holds: margin_ii >= T::zero(),
            margin: margin_ii,
        },
        cond_iii: ConditionCheck {
            holds: margin_iii >= T::zero(),
            margin: margin_iii,
        },
    })
}

/// Trace-norm distance between `L_P(U ρ U†)` and `U L_Q(ρ) U†`, regardless of
/// whether the theorem's conditions hold.
pub fn raio_equality_residual<T: Real>(inst: &RaioInstance<T>, tol: &Tolerances<T>) -> Result<T> {
    let lhs = luders_collapse(&inst.rho_final(), &inst.final_event, tol)?.state;
    let rhs = luders_collapse(&inst.rho_initial, &inst.trigger, tol)?
        .state
        .conjugate_by(&inst.evolution)?;
    Ok(operator_distance(&lhs, &rhs)?.trace_norm)
}

/// Checks conditions (i)–(iii), then the RAIO equality when they hold.
pub fn check_raio_equality<T: Real>(inst: &RaioInstance<T>, tol: &Tolerances<T>) -> Result<RaioReport<T>> {
    let conditions = check_raio_conditions(inst, tol)?;
    if !conditions.all_hold() {
        return Ok(RaioReport {
            conditions,
            equality_residual: None,
            verdict: RaioVerdict::ConditionsViolated,
        });
    }
    let residual = raio_equality_residual(inst, tol)?;
    let verdict = if residual <= tol.identity_eps {
        RaioVerdict::Verified
    } else {
        RaioVerdict::EqualityViolated
    };
    Ok(RaioReport {
        conditions,
        equality_residual: Some(residual),
        verdict,
    })
}

/// Localization lemma residual `|tr(Fρ) − tr(P_R ρ) · tr(F ρ′)|`, with
/// `ρ′ = P_R ρ P_R / tr(P_R ρ)`. Requires `F ≤ P_R`, i.e. `F P_R = F`.
pub fn check_localization_lemma<T: Real>(
    event: &Operator<T>,
    region: &Operator<T>,
    rho: &Operator<T>,
    tol: &Tolerances<T>,
) -> Result<T> {
    let f = event.ensure_kind(OperatorKind::Projector, tol)?;
    let p_r = region.ensure_kind(OperatorKind::Projector, tol)?;
    let rho = rho.ensure_kind(OperatorKind::Density, tol)?;
    let implied = operator_distance(&f.compose(&p_r)?, &f)?.max_entry;
    if implied > tol.identity_eps {
        return Err(Error::NotImplied(implied.as_f64()));
    }
    let localized = luders_collapse(&rho, &p_r, tol)?;
    let lhs = rho.trace_product(&f)?.re;
    let rhs = localized.raw_probability * localized.state.trace_product(&f)?.re;
    Ok((lhs - rhs).abs())
}

/// The prepared state evolved to `t_f`, computed by two independent routes.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoRoutes<T: Real> {
    /// `tr_II[(U_I⊗U_II) L_Q(ρ) (U_I⊗U_II)†]`: composite evolution of the collapsed state.
    pub route_a: Operator<T>,
    /// `U_I ρ_I(t_i) U_I†` with `ρ_I(t_i)` the conditional state.
    pub route_b: Operator<T>,
    pub residual: Distance<T>,
}

pub fn evolve_prepared_two_routes<T: Real>(
    rho: &Operator<T>,
    trigger: &Operator<T>,
    u_object: &Operator<T>,
    u_preparator: &Operator<T>,
    tol: &Tolerances<T>,
) -> Result<TwoRoutes<T>> {
    let u_i = u_object.ensure_kind(OperatorKind::Unitary, tol)?;
    let u_ii = u_preparator.ensure_kind(OperatorKind::Unitary, tol)?;
    let q_full = embed(trigger, 1, rho.signature())?;
    let u = tensor_product(&u_i, &u_ii);
    rho.require_same_signature(&u)?;

    let collapsed = luders_collapse(rho, &q_full, tol)?.state;
    let route_a = partial_trace(&collapsed.conjugate_by(&u)?, &[0])?;

    let prepared = conditional_state(rho, trigger, tol)?.state;
    let route_b = prepared.conjugate_by(&u_i)?;

    let residual = operator_distance(&route_a, &route_b)?;
    Ok(TwoRoutes {
        route_a,
        route_b,
        residual,
    })
}

fn check_amplitudes<T: Real>(alpha: C<T>, beta: C<T>, tol: &Tolerances<T>) -> Result<T> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if (norm - T::one()).abs() > tol.validation_eps {
        return Err(Error::NotNormalized(norm.as_f64()));
    }
    Ok(alpha.norm_sqr())
}

/// How the final event of a generated instance relates to the trigger.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum TwinVariant {
    /// `U_II` maps `range(Q_II)` onto region R exactly.
    Twin,
    /// `Q_II` has rank one less than R, so part of `range(Q_II^⊥)` also lands in R.
    Leaky,
    /// P is a random projector unrelated to Q.
    Decoupled,
}

fn build_instance<T: Real>(
    alpha: C<T>,
    beta: C<T>,
    d_preparator: usize,
    region_size: usize,
    seed: u64,
    variant: TwinVariant,
    tol: &Tolerances<T>,
) -> Result<RaioInstance<T>> {
    let p_alpha = check_amplitudes(alpha, beta, tol)?;
    if p_alpha <= tol.certainty_eps || p_alpha >= T::one() - tol.certainty_eps {
        return Err(Error::Degenerate(format!(
            "|alpha|^2 = {p_alpha} leaves no room for both the trigger and its complement"
        )));
    }
    if region_size == 0 || region_size >= d_preparator {
        return Err(Error::Degenerate(format!(
            "region size {region_size} must lie strictly between 0 and {d_preparator}"
        )));
    }
    let q_rank = match variant {
        TwinVariant::Leaky if region_size < 2 => {
            return Err(Error::Degenerate("a leaky instance needs region size >= 2".into()))
        }
        TwinVariant::Leaky => region_size - 1,
        _ => region_size,
    };

    let mut rng = seeded_rng(seed);
    let d = d_preparator;
    let sig_i = DimensionSignature::single(2)?;
    let sig_ii = DimensionSignature::single(d)?;
    let sig = DimensionSignature::bipartite(2, d)?;

    // Basis adapted to Q_II: the first q_rank columns span range(Q_II).
    let v = haar_unitary_matrix::<T, _>(d, &mut rng);
    let q_cols = v.columns(0, q_rank).into_owned();
    let rest = v.columns(q_rank, d - q_rank).into_owned();
    let q_ii = Operator::projector_onto(&q_cols, sig_ii.clone(), tol)?;
    let phi_plus = &q_cols * random_pure_vector::<T, _>(q_rank, &mut rng);
    let phi_minus = &rest * random_pure_vector::<T, _>(d - q_rank, &mut rng);

    // U_II sends v_j into R = span(e_0..e_{region_size}) for j < region_size.
    let mut w = DMatrix::from_element(d, d, c_zero());
    w.view_mut((0, 0), (region_size, region_size))
        .copy_from(&haar_unitary_matrix::<T, _>(region_size, &mut rng));
    w.view_mut((region_size, region_size), (d - region_size, d - region_size))
        .copy_from(&haar_unitary_matrix::<T, _>(d - region_size, &mut rng));
    let u_ii = Operator::unitary(&w * v.adjoint(), sig_ii.clone(), tol)?;
    let u_i = Operator::unitary(haar_unitary_matrix::<T, _>(2, &mut rng), sig_i, tol)?;

    let mut psi = DVector::from_element(2 * d, c_zero());
    for k in 0..d {
        psi[k] = alpha * phi_plus[k];
        psi[d + k] = beta * phi_minus[k];
    }
    let rho = Operator::pure_state(&psi, sig.clone(), tol)?;

    let region = match variant {
        TwinVariant::Decoupled => random_projector::<T, _>(sig_ii, region_size, &mut rng)?,
        _ => {
            let mask: Vec<bool> = (0..d).map(|k| k < region_size).collect();
            Operator::diagonal_projector(&mask, sig_ii)?
        }
    };
    RaioInstance::new(
        &rho,
        &embed(&q_ii, 1, &sig)?,
        &embed(&region, 1, &sig)?,
        &tensor_product(&u_i, &u_ii),
        tol,
    )
}

/// Seeded twin-observable instance on `[2, d_preparator]` satisfying
/// conditions (i)–(iii) by construction.
///
/// `|Φ⟩ = α|0⟩|φ⁺⟩ + β|1⟩|φ⁻⟩` with `φ⁺ ∈ range(Q_II)`, `φ⁻ ⟂ range(Q_II)`;
/// `U = U_I ⊗ U_II` where `U_II` maps `range(Q_II)` onto the coordinate
/// subspace R of the first `region_size` basis vectors; `P = I ⊗ P_R`.
pub fn build_twin_instance<T: Real>(
    alpha: C<T>,
    beta: C<T>,
    d_preparator: usize,
    region_size: usize,
    seed: u64,
    tol: &Tolerances<T>,
) -> Result<RaioInstance<T>> {
    build_instance(alpha, beta, d_preparator, region_size, seed, TwinVariant::Twin, tol)
}

/// Like [`build_twin_instance`] but with `P` a random rank-`region_size`
/// projector drawn independently of `Q`.
pub fn build_decoupled_instance<T: Real>(
    alpha: C<T>,
    beta: C<T>,
    d_preparator: usize,
    region_size: usize,
    seed: u64,
    tol: &Tolerances<T>,
) -> Result<RaioInstance<T>> {
    build_instance(alpha, beta, d_preparator, region_size, seed, TwinVariant::Decoupled, tol)
}

/// Like [`build_twin_instance`] but `Q_II` has rank `region_size − 1`, so
/// condition (ii) holds while condition (iii) generically fails.
pub fn build_leaky_instance<T: Real>(
    alpha: C<T>,
    beta: C<T>,
    d_preparator: usize,
    region_size: usize,
    seed: u64,
    tol: &Tolerances<T>,
) -> Result<RaioInstance<T>> {
    build_instance(alpha, beta, d_preparator, region_size, seed, TwinVariant::Leaky, tol)
}

/// Equal-weight amplitudes `1/√2`.
pub fn balanced_amplitudes<T: Real>() -> (C<T>, C<T>) {
    let h = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    (c(h, T::zero()), c(h, T::zero()))
}
