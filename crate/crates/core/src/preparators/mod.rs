//! The four-entity description of a preparator: a composite object ⊗
//! preparator state at `t_i`, a triggering event on the preparator, the
//! conditional (prepared) state of the object, and the factorized evolution
//! `U_I ⊗ U_II` from `t_i` to `t_f`.
//!
//! Dynamical preparators (the triggering event actually occurs at `t_i`) and
//! geometrical ones (it occurs only retroactively, via RAIO) are run through
//! the same [`run_preparation`].

mod geometry;
mod hole;
mod sg;

pub use geometry::{make_half_space_projector, GridGeometry, Side, AMPLITUDE_FLOOR};
pub use hole::{build_hole, hole_packet, HoleVariant};
pub use sg::{build_sg, spin_down_state, spin_up_state, SgVariant};

use std::fmt;
use std::str::FromStr;

use crate::collapse::{conditional_state, probability_unchecked};
use crate::error::{Error, Result};
use crate::raio::{evolve_prepared_two_routes, RaioInstance};
use crate::scalar::Real;
use crate::tensor::{
    embed, partial_trace, tensor_product, DimensionSignature, Distance, Operator, OperatorKind,
    Tolerances,
};

/// How the triggering event comes about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PreparatorKind {
    /// The triggering event actually occurs at `t_i` through a measurement.
    Dynamical,
    /// Geometry singles out a region; the event occurs only retroactively.
    Geometrical,
}

/// Manner in which the triggering event occurs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Occurrence {
    Ideal,
    General,
    FictitiousRaio,
    /// No event on the preparator; the condition is the certain event.
    None,
}

impl PreparatorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Dynamical => "dynamical",
            Self::Geometrical => "geometrical",
        }
    }
}

impl Occurrence {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ideal => "ideal",
            Self::General => "general",
            Self::FictitiousRaio => "fictitious-raio",
            Self::None => "none",
        }
    }
}

impl fmt::Display for PreparatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Occurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PreparatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dynamical" => Ok(Self::Dynamical),
            "geometrical" => Ok(Self::Geometrical),
            other => Err(Error::InvalidSpec(format!("unknown preparator kind `{other}`"))),
        }
    }
}

impl FromStr for Occurrence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(Self::Ideal),
            "general" => Ok(Self::General),
            "fictitious-raio" => Ok(Self::FictitiousRaio),
            "none" => Ok(Self::None),
            other => Err(Error::InvalidSpec(format!("unknown occurrence `{other}`"))),
        }
    }
}

/// Triggering event on the preparator factor.
#[derive(Clone, Debug, PartialEq)]
pub enum Trigger<T: Real> {
    Event(Operator<T>),
    /// The identity: no event, the prepared state is the reduced state.
    Certain,
}

/// A validated preparator: the four entities plus metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct PreparatorSpec<T: Real> {
    rho_composite: Operator<T>,
    trigger: Trigger<T>,
    u_object: Operator<T>,
    u_preparator: Operator<T>,
    kind: PreparatorKind,
    occurrence: Occurrence,
    label: String,
    /// `(t_i, t_f)`; metadata only, dynamics enters through the unitaries.
    times: (T, T),
}

impl<T: Real> PreparatorSpec<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        rho_composite: &Operator<T>,
        trigger: Trigger<T>,
        u_object: &Operator<T>,
        u_preparator: &Operator<T>,
        kind: PreparatorKind,
        occurrence: Occurrence,
        label: impl Into<String>,
        tol: &Tolerances<T>,
    ) -> Result<Self> {
        let rho = rho_composite.ensure_kind(OperatorKind::Density, tol)?;
        let sig = rho.signature().clone();
        if sig.len() != 2 {
            return Err(Error::InvalidSpec(format!(
                "composite state must be bipartite (object, preparator), got {sig}"
            )));
        }
        let (d_i, d_ii) = (sig.dims()[0], sig.dims()[1]);
        let u_object = factor_operator(u_object, d_i, "U_I", OperatorKind::Unitary, tol)?;
        let u_preparator = factor_operator(u_preparator, d_ii, "U_II", OperatorKind::Unitary, tol)?;
        let trigger = match trigger {
            Trigger::Event(q) => Trigger::Event(factor_operator(
                &q,
                d_ii,
                "trigger",
                OperatorKind::Projector,
                tol,
            )?),
            Trigger::Certain => Trigger::Certain,
        };
        if kind == PreparatorKind::Geometrical && occurrence != Occurrence::FictitiousRaio {
            return Err(Error::InvalidSpec(format!(
                "a geometrical preparator needs fictitious-raio occurrence, got {occurrence}"
            )));
        }
        if occurrence == Occurrence::None && trigger != Trigger::Certain {
            return Err(Error::InvalidSpec(
                "occurrence `none` requires the certain-event trigger".into(),
            ));
        }
        let spec = Self {
            rho_composite: rho,
            trigger,
            u_object,
            u_preparator,
            kind,
            occurrence,
            label: label.into(),
            times: (T::zero(), T::one()),
        };
        if occurrence != Occurrence::None {
            let q = embed(&spec.trigger_operator(), 1, &sig)?;
            let p = probability_unchecked(&spec.rho_composite, &q, tol)?;
            if p.raw <= tol.certainty_eps {
                return Err(Error::ImpossibleEvent(p.raw.as_f64()));
            }
        }
        Ok(spec)
    }

    /// Sets the `(t_i, t_f)` labels.
    pub fn with_times(mut self, t_initial: T, t_final: T) -> Self {
        self.times = (t_initial, t_final);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn rho_composite(&self) -> &Operator<T> {
        &self.rho_composite
    }

    pub fn trigger(&self) -> &Trigger<T> {
        &self.trigger
    }

    /// Trigger as an operator on the preparator factor (identity when certain).
    pub fn trigger_operator(&self) -> Operator<T> {
        match &self.trigger {
            Trigger::Event(q) => q.clone(),
            Trigger::Certain => Operator::identity(self.preparator_signature()),
        }
    }

    pub fn u_object(&self) -> &Operator<T> {
        &self.u_object
    }

    pub fn u_preparator(&self) -> &Operator<T> {
        &self.u_preparator
    }

    pub fn kind(&self) -> PreparatorKind {
        self.kind
    }

    pub fn occurrence(&self) -> Occurrence {
        self.occurrence
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn times(&self) -> (T, T) {
        self.times
    }

    pub fn object_signature(&self) -> DimensionSignature {
        DimensionSignature::single(self.rho_composite.signature().dims()[0]).expect("validated")
    }

    pub fn preparator_signature(&self) -> DimensionSignature {
        DimensionSignature::single(self.rho_composite.signature().dims()[1]).expect("validated")
    }

    /// RAIO instance with the embedded trigger as `Q`, `U = U_I ⊗ U_II`, and
    /// final event `P = U Q U†`, the region the triggered branch evolves into.
    pub fn raio_instance(&self, tol: &Tolerances<T>) -> Result<RaioInstance<T>> {
        let sig = self.rho_composite.signature();
        let q = embed(&self.trigger_operator(), 1, sig)?;
        let u = tensor_product(&self.u_object, &self.u_preparator);
        let p = q.conjugate_by(&u)?.hermitized();
        RaioInstance::new(&self.rho_composite, &q, &p, &u, tol)
    }
}

fn factor_operator<T: Real>(
    op: &Operator<T>,
    dim: usize,
    name: &str,
    kind: OperatorKind,
    tol: &Tolerances<T>,
) -> Result<Operator<T>> {
    if op.dim() != dim {
        return Err(Error::InvalidSpec(format!(
            "{name} has dimension {}, factor has dimension {dim}",
            op.dim()
        )));
    }
    op.ensure_kind(kind, tol)
        .map_err(|e| Error::InvalidSpec(format!("{name}: {e}")))
}

/// Output of [`run_preparation`].
#[derive(Clone, Debug, PartialEq)]
pub struct PreparationResult<T: Real> {
    /// Triggering probability, clamped into `[0, 1]`.
    pub probability: T,
    pub raw_probability: T,
    /// `ρ_I(t_i)`.
    pub prepared_state: Operator<T>,
    /// `ρ_I(t_f) = U_I ρ_I(t_i) U_I†`.
    pub evolved_state: Operator<T>,
    /// Distance between the composite-evolution route and `evolved_state`'s route.
    pub two_route_residual: Distance<T>,
}

/// Prepared state, its evolution to `t_f`, and the two-route consistency check.
pub fn run_preparation<T: Real>(spec: &PreparatorSpec<T>, tol: &Tolerances<T>) -> Result<PreparationResult<T>> {
    let q = spec.trigger_operator();
    let (probability, raw_probability, prepared_state) = if spec.occurrence == Occurrence::None {
        let reduced = partial_trace(&spec.rho_composite, &[0])?.hermitized();
        let reduced = Operator::density(reduced.into_matrix(), spec.object_signature(), tol)?;
        (T::one(), T::one(), reduced)
    } else {
        let cond = conditional_state(&spec.rho_composite, &q, tol)?;
        (cond.probability, cond.raw_probability, cond.state)
    };
    let evolved_state = prepared_state.conjugate_by(&spec.u_object)?;
    let routes = evolve_prepared_two_routes(
        &spec.rho_composite,
        &q,
        &spec.u_object,
        &spec.u_preparator,
        tol,
    )?;
    Ok(PreparationResult {
        probability,
        raw_probability,
        prepared_state,
        evolved_state,
        two_route_residual: routes.residual,
    })
}
