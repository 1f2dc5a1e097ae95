//! Hole-in-the-screen preparator.
//!
//! Object I is the particle on the spatial grid; preparator II is a
//! two-state screen record `{no momentum transfer, momentum transfer}`. The
//! preparation interaction correlates the hole-passing part of the incoming
//! packet with "no transfer" and the screen-hitting part with "transfer". The
//! trigger `Q^h = I − Q^rs` is "no transfer".

use nalgebra::DVector;

use super::geometry::{normalized, GridGeometry, Side};
use super::{Occurrence, PreparatorKind, PreparatorSpec, Trigger};
use crate::error::{Error, Result};
use crate::scalar::{c_zero, Real, C};
use crate::tensor::{DimensionSignature, Operator, OperatorKind, Tolerances};

/// Record basis index for "no momentum transfer" (hole passed).
pub const RECORD_PASSED: usize = 0;
/// Record basis index for "momentum transfer" (screen hit).
pub const RECORD_HIT: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HoleVariant {
    /// Non-hit of the rest of the screen is registered: ideal occurrence of `Q^h`.
    Negative,
    /// Nothing registered at the screen; detection behind it implies `Q^h`.
    Geometrical,
}

impl HoleVariant {
    pub fn name(self) -> &'static str {
        match self {
            Self::Negative => "negative",
            Self::Geometrical => "geometrical",
        }
    }
}

/// Incoming packet: equal superposition of the untruncated Gaussians centered
/// on the hole and on the screen.
pub fn hole_packet<T: Real>(geom: &GridGeometry<T>) -> Result<DVector<C<T>>> {
    geom.validate()?;
    let (hole, screen) = geom.packet_centers;
    Ok(normalized(geom.gaussian(hole) + geom.gaussian(screen)))
}

pub fn build_hole<T: Real>(
    psi_in: &DVector<C<T>>,
    geom: &GridGeometry<T>,
    variant: HoleVariant,
    tol: &Tolerances<T>,
) -> Result<PreparatorSpec<T>> {
    geom.validate()?;
    let n = geom.n_sites;
    if psi_in.len() != n {
        return Err(Error::Degenerate(format!(
            "incoming packet has {} amplitudes, grid has {n} sites",
            psi_in.len()
        )));
    }
    let norm = psi_in.norm_squared();
    if (norm - T::one()).abs() > tol.validation_eps {
        return Err(Error::NotNormalized(norm.as_f64()));
    }
    let passage: T = (0..n)
        .filter(|&x| geom.contains(Side::Upper, x))
        .map(|x| psi_in[x].norm_sqr())
        .fold(T::zero(), |a, b| a + b);
    if passage <= tol.certainty_eps {
        return Err(Error::ImpossibleEvent(passage.as_f64()));
    }

    let mut phi = DVector::from_element(2 * n, c_zero());
    for x in 0..n {
        let record = if geom.contains(Side::Upper, x) {
            RECORD_PASSED
        } else {
            RECORD_HIT
        };
        phi[2 * x + record] = psi_in[x];
    }
    let rho = Operator::pure_state(&phi, DimensionSignature::bipartite(n, 2)?, tol)?;

    let record_sig = DimensionSignature::single(2)?;
    let hit = Operator::diagonal_projector(&[false, true], record_sig.clone())?;
    let passed = hit.complement();

    let u_object = Operator::identity(geom.signature()).ensure_kind(OperatorKind::Unitary, tol)?;
    let u_record = Operator::identity(record_sig).ensure_kind(OperatorKind::Unitary, tol)?;
    let (kind, occurrence) = match variant {
        HoleVariant::Negative => (PreparatorKind::Dynamical, Occurrence::Ideal),
        HoleVariant::Geometrical => (PreparatorKind::Geometrical, Occurrence::FictitiousRaio),
    };
    PreparatorSpec::new(
        &rho,
        Trigger::Event(passed),
        &u_object,
        &u_record,
        kind,
        occurrence,
        format!("hole-{}", variant.name()),
        tol,
    )
}
