//! Event probabilities, the selective Lüders update and conditional states.

use crate::error::{Error, Result};
use crate::scalar::{c, Real};
use crate::tensor::{embed, partial_trace, Operator, OperatorKind, Tolerances};

/// Probability of an event, clamped into `[0, 1]`, with the unclamped trace kept.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Probability<T> {
    pub value: T,
    pub raw: T,
}

/// State left behind by the occurrence of an event, with that event's probability.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalStateResult<T: Real> {
    /// Probability of the condition, clamped into `[0, 1]`.
    pub probability: T,
    /// `tr(ρ F)` before clamping.
    pub raw_probability: T,
    pub state: Operator<T>,
}

/// `tr(ρ F)`, with `F` first embedded on factor `subsystem` when given.
pub fn event_probability<T: Real>(
    rho: &Operator<T>,
    event: &Operator<T>,
    subsystem: Option<usize>,
    tol: &Tolerances<T>,
) -> Result<Probability<T>> {
    let rho = rho.ensure_kind(OperatorKind::Density, tol)?;
    let event = event.ensure_kind(OperatorKind::Projector, tol)?;
    let event = match subsystem {
        Some(k) => embed(&event, k, rho.signature())?,
        None => event,
    };
    probability_unchecked(&rho, &event, tol)
}

/// Probability for operands already known to be a density operator and a projector.
pub(crate) fn probability_unchecked<T: Real>(
    rho: &Operator<T>,
    event: &Operator<T>,
    tol: &Tolerances<T>,
) -> Result<Probability<T>> {
    let raw = rho.trace_product(event)?.re;
    let eps = tol.validation_eps;
    if !raw.is_finite() || raw < -eps || raw > T::one() + eps {
        return Err(Error::ProbabilityOutOfRange(raw.as_f64()));
    }
    let value = if raw < T::zero() {
        T::zero()
    } else if raw > T::one() {
        T::one()
    } else {
        raw
    };
    Ok(Probability { value, raw })
}

fn require_possible<T: Real>(p: &Probability<T>, tol: &Tolerances<T>) -> Result<()> {
    if p.raw <= tol.certainty_eps {
        return Err(Error::ImpossibleEvent(p.raw.as_f64()));
    }
    Ok(())
}

/// Selective Lüders update `ρ → FρF / tr(ρF)` for ideal occurrence of `F`.
pub fn luders_collapse<T: Real>(
    rho: &Operator<T>,
    event: &Operator<T>,
    tol: &Tolerances<T>,
) -> Result<ConditionalStateResult<T>> {
    let rho = rho.ensure_kind(OperatorKind::Density, tol)?;
    let event = event.ensure_kind(OperatorKind::Projector, tol)?;
    let p = probability_unchecked(&rho, &event, tol)?;
    require_possible(&p, tol)?;
    let f = event.matrix();
    let m = (f * rho.matrix() * f).map(|z| z / c(p.raw, T::zero()));
    let state = Operator::general(m, rho.signature().clone())?.hermitized();
    let state = Operator::density(state.into_matrix(), rho.signature().clone(), tol)?;
    Ok(ConditionalStateResult {
        probability: p.value,
        raw_probability: p.raw,
        state,
    })
}

/// State of subsystem I given that the second-subsystem event `condition`
/// occurred in whatever way: `tr_II(ρ Q) / tr(ρ Q)`.
///
/// `rho` must be bipartite. Accepts mixed composite states.
pub fn conditional_state<T: Real>(
    rho: &Operator<T>,
    condition: &Operator<T>,
    tol: &Tolerances<T>,
) -> Result<ConditionalStateResult<T>> {
    let rho = rho.ensure_kind(OperatorKind::Density, tol)?;
    require_bipartite(&rho)?;
    let q = condition.ensure_kind(OperatorKind::Projector, tol)?;
    let q_full = embed(&q, 1, rho.signature())?;
    let p = probability_unchecked(&rho, &q_full, tol)?;
    require_possible(&p, tol)?;
    let reduced = partial_trace(&rho.compose(&q_full)?, &[0])?;
    // tr_II(ρQ) is Hermitian analytically; symmetrize away round-off.
    let m = reduced
        .hermitized()
        .into_matrix()
        .map(|z| z / c(p.raw, T::zero()));
    let state = Operator::density(m, reduced.signature().clone(), tol)?;
    Ok(ConditionalStateResult {
        probability: p.value,
        raw_probability: p.raw,
        state,
    })
}

/// `|tr(ρ (P⊗Q)) − tr(ρ Q) · tr(ρ̄ P)|` where `ρ̄` is the conditional state given `Q`.
pub fn verify_coincidence_factorization<T: Real>(
    rho: &Operator<T>,
    p_first: &Operator<T>,
    q_second: &Operator<T>,
    tol: &Tolerances<T>,
) -> Result<T> {
    let rho = rho.ensure_kind(OperatorKind::Density, tol)?;
    require_bipartite(&rho)?;
    let p = p_first.ensure_kind(OperatorKind::Projector, tol)?;
    let q = q_second.ensure_kind(OperatorKind::Projector, tol)?;
    let coincidence = embed(&p, 0, rho.signature())?.compose(&embed(&q, 1, rho.signature())?)?;
    let lhs = rho.trace_product(&coincidence)?.re;
    let cond = conditional_state(&rho, &q, tol)?;
    let rhs = cond.raw_probability * cond.state.trace_product(&p)?.re;
    Ok((lhs - rhs).abs())
}

fn require_bipartite<T: Real>(rho: &Operator<T>) -> Result<()> {
    if rho.signature().len() != 2 {
        return Err(Error::InvalidSignature(format!(
            "conditional states need a bipartite signature, got {}",
            rho.signature()
        )));
    }
    Ok(())
}
