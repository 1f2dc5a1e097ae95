//! Discretized Stern-Gerlach preparators.
//!
//! Object I is the spin (basis `|+,z⟩ = e_0`, `|−,z⟩ = e_1`), preparator II is
//! the spatial grid. After the magnetic coupling the composite state is
//! `α|+,z⟩|ψ⁺⟩ + β|−,z⟩|ψ⁻⟩` with `ψ⁺` in the upper half-space and `ψ⁻` in
//! the lower one; the trigger is the upper half-space projector `Q⁺`.

use nalgebra::{DMatrix, DVector};

use super::geometry::{make_half_space_projector, GridGeometry, Side};
use super::{Occurrence, PreparatorKind, PreparatorSpec, Trigger};
use crate::error::{Error, Result};
use crate::random::{haar_unitary_matrix, seeded_rng};
use crate::scalar::{c_one, c_zero, Real, C};
use crate::tensor::{DimensionSignature, Operator, OperatorKind, Tolerances};

/// Which modification of the Stern-Gerlach arrangement is modeled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SgVariant {
    /// Standard arrangement with both plates.
    Measurement,
    /// Upper plate replaced by a detector that lets the particle pass; the
    /// detector's spatial disturbance `ψ⁺ → ψ^out` is a seeded unitary on the
    /// upper sites.
    DetectorPassthrough { seed: u64 },
    /// Anti-coincidence with the lower detector: ideal occurrence of `Q⁺`.
    Negative,
    /// No upper plate; the final measurement's location implies `Q⁺` retroactively.
    Geometrical,
}

impl SgVariant {
    pub fn name(self) -> &'static str {
        match self {
            Self::Measurement => "measurement",
            Self::DetectorPassthrough { .. } => "detector-passthrough",
            Self::Negative => "negative",
            Self::Geometrical => "geometrical",
        }
    }

    fn classification(self) -> (PreparatorKind, Occurrence) {
        match self {
            Self::Measurement | Self::DetectorPassthrough { .. } => {
                (PreparatorKind::Dynamical, Occurrence::General)
            }
            Self::Negative => (PreparatorKind::Dynamical, Occurrence::Ideal),
            Self::Geometrical => (PreparatorKind::Geometrical, Occurrence::FictitiousRaio),
        }
    }
}

/// `|+,z⟩⟨+,z|`.
pub fn spin_up_state<T: Real>() -> Operator<T> {
    Operator::diagonal_projector(&[true, false], DimensionSignature::single(2).expect("2 > 0"))
        .expect("mask matches")
        .ensure_kind(OperatorKind::Density, &Tolerances::default())
        .expect("pure state")
}

/// `|−,z⟩⟨−,z|`.
pub fn spin_down_state<T: Real>() -> Operator<T> {
    Operator::diagonal_projector(&[false, true], DimensionSignature::single(2).expect("2 > 0"))
        .expect("mask matches")
        .ensure_kind(OperatorKind::Density, &Tolerances::default())
        .expect("pure state")
}

pub fn build_sg<T: Real>(
    alpha: C<T>,
    beta: C<T>,
    geom: &GridGeometry<T>,
    variant: SgVariant,
    tol: &Tolerances<T>,
) -> Result<PreparatorSpec<T>> {
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    if (norm - T::one()).abs() > tol.validation_eps {
        return Err(Error::NotNormalized(norm.as_f64()));
    }
    geom.validate()?;
    let n = geom.n_sites;
    let psi_up = geom.packet(Side::Upper)?;
    let psi_down = geom.packet(Side::Lower)?;

    let mut phi = DVector::from_element(2 * n, c_zero());
    for x in 0..n {
        phi[x] = alpha * psi_up[x];
        phi[n + x] = beta * psi_down[x];
    }
    let sig = DimensionSignature::bipartite(2, n)?;
    let rho = Operator::pure_state(&phi, sig, tol)?;
    let trigger = make_half_space_projector(geom, Side::Upper)?;

    let u_object = Operator::identity(DimensionSignature::single(2)?).ensure_kind(OperatorKind::Unitary, tol)?;
    let u_preparator = match variant {
        SgVariant::DetectorPassthrough { seed } => detector_unitary(geom, seed, tol)?,
        _ => Operator::identity(geom.signature()).ensure_kind(OperatorKind::Unitary, tol)?,
    };
    let (kind, occurrence) = variant.classification();
    PreparatorSpec::new(
        &rho,
        Trigger::Event(trigger),
        &u_object,
        &u_preparator,
        kind,
        occurrence,
        format!("sg-{}", variant.name()),
        tol,
    )
}

/// Seeded Haar unitary on the upper sites, identity on the lower ones.
fn detector_unitary<T: Real>(geom: &GridGeometry<T>, seed: u64, tol: &Tolerances<T>) -> Result<Operator<T>> {
    let n = geom.n_sites;
    let s = geom.split_index;
    let block = haar_unitary_matrix::<T, _>(n - s, &mut seeded_rng(seed));
    let mut u = DMatrix::from_element(n, n, c_zero());
    for x in 0..s {
        u[(x, x)] = c_one();
    }
    u.view_mut((s, s), (n - s, n - s)).copy_from(&block);
    Operator::unitary(u, geom.signature(), tol)
}
