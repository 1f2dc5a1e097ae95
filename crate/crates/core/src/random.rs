//! Seeded random instances: Haar unitaries, Ginibre density operators,
//! random projectors and pure states.
//!
//! Every sweep derives per-trial generators as `root_seed + trial_index`
//! through [`trial_rng`], so trials can run in any order or in parallel and
//! still reproduce bit-for-bit.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::{c, modulus, Real, C};
use crate::tensor::{hermitian_eigenvalues, DimensionSignature, Operator, OperatorKind};

/// Generator used for every seeded construction in the crate.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for trial `index` of a sweep rooted at `root_seed`.
pub fn trial_rng(root_seed: u64, index: u64) -> SeededRng {
    seeded_rng(root_seed.wrapping_add(index))
}

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.sample::<f64, _>(StandardNormal))
}

/// Entries i.i.d. standard complex normal.
pub fn ginibre<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C<T>> {
    let half = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    DMatrix::from_fn(rows, cols, |_, _| c(gaussian::<T, R>(rng) * half, gaussian::<T, R>(rng) * half))
}

/// Haar-distributed unitary matrix (QR of a Ginibre matrix with the phase fix).
pub fn haar_unitary_matrix<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<C<T>> {
    let qr = ginibre::<T, R>(n, n, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let m = modulus(d);
        if m > T::zero() {
            let phase = c(d.re / m, d.im / m);
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

pub fn haar_unitary<T: Real, R: Rng + ?Sized>(signature: DimensionSignature, rng: &mut R) -> Operator<T> {
    let m = haar_unitary_matrix(signature.total(), rng);
    Operator::from_parts(m, signature, OperatorKind::Unitary)
}

/// Uniformly random unit vector.
pub fn random_pure_vector<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<C<T>> {
    let v = DVector::from_fn(n, |_, _| c(gaussian::<T, R>(rng), gaussian::<T, R>(rng)));
    let norm = v.norm();
    v.map(|z| z / c(norm, T::zero()))
}

pub fn random_pure_state<T: Real, R: Rng + ?Sized>(
    signature: DimensionSignature,
    rng: &mut R,
) -> Operator<T> {
    let psi = random_pure_vector::<T, R>(signature.total(), rng);
    Operator::from_parts(psi.clone() * psi.adjoint(), signature, OperatorKind::Density)
}

/// Full-rank mixed state `G G† / tr(G G†)` from a square Ginibre matrix.
pub fn random_density<T: Real, R: Rng + ?Sized>(signature: DimensionSignature, rng: &mut R) -> Operator<T> {
    let n = signature.total();
    let g = ginibre::<T, R>(n, n, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let m = m.map(|z| z / c(tr, T::zero()));
    let half = T::lit(0.5);
    let m = (&m + m.adjoint()).map(|z| z * half);
    Operator::from_parts(m, signature, OperatorKind::Density)
}

/// Projector onto the span of the first `rank` columns of a Haar unitary.
pub fn random_projector<T: Real, R: Rng + ?Sized>(
    signature: DimensionSignature,
    rank: usize,
    rng: &mut R,
) -> Result<Operator<T>> {
    let n = signature.total();
    if rank > n {
        return Err(Error::Degenerate(format!("rank {rank} exceeds dimension {n}")));
    }
    let u = haar_unitary_matrix::<T, R>(n, rng);
    let cols = u.columns(0, rank).into_owned();
    Ok(Operator::from_parts(&cols * cols.adjoint(), signature, OperatorKind::Projector))
}

/// Projector of uniformly random rank in `1..n`.
pub fn random_proper_projector<T: Real, R: Rng + ?Sized>(
    signature: DimensionSignature,
    rng: &mut R,
) -> Result<Operator<T>> {
    let n = signature.total();
    if n < 2 {
        return Err(Error::Degenerate("a proper projector needs dimension >= 2".into()));
    }
    let rank = rng.random_range(1..n);
    random_projector(signature, rank, rng)
}

/// Random projector `F ≤ bound`: spectral projector of a random Hermitian
/// operator compressed into `range(bound)`, keeping a random nonempty subset
/// of its eigenvectors with nonzero eigenvalue.
pub fn random_subprojector<T: Real, R: Rng + ?Sized>(bound: &Operator<T>, rng: &mut R) -> Result<Operator<T>> {
    let n = bound.dim();
    let rank = hermitian_eigenvalues(bound.matrix())
        .iter()
        .filter(|&&l| l > T::lit(0.5))
        .count();
    if rank == 0 {
        return Ok(Operator::zero(bound.signature().clone()));
    }
    let g = ginibre::<T, R>(n, n, rng);
    let h = &g + g.adjoint();
    // Shift so every eigenvalue inside range(bound) is >= 1 and outside is 0.
    let shift = T::lit(1.0) + h.norm();
    let p = bound.matrix();
    let compressed = p * (h + DMatrix::identity(n, n).map(|z: C<T>| z * c(shift, T::zero()))) * p;
    let half = T::lit(0.5);
    let compressed = (&compressed + compressed.adjoint()).map(|z| z * half);
    let eig = compressed.symmetric_eigen();
    let inside: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > T::lit(0.5)).collect();
    let keep = rng.random_range(1..=inside.len());
    let mut chosen = DMatrix::zeros(n, keep);
    for (col, &i) in inside.iter().take(keep).enumerate() {
        chosen.set_column(col, &eig.eigenvectors.column(i));
    }
    Ok(Operator::from_parts(
        &chosen * chosen.adjoint(),
        bound.signature().clone(),
        OperatorKind::Projector,
    ))
}
