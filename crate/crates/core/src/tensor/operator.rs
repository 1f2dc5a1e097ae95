use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{c_one, c_zero, modulus, Real, C};
use crate::tensor::{DimensionSignature, Tolerances};

/// Role an [`Operator`] plays; each role carries its own validity invariant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Density,
    Projector,
    Unitary,
    General,
}

impl OperatorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Density => "density",
            Self::Projector => "projector",
            Self::Unitary => "unitary",
            Self::General => "general",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "density" => Ok(Self::Density),
            "projector" => Ok(Self::Projector),
            "unitary" => Ok(Self::Unitary),
            "general" => Ok(Self::General),
            other => Err(Error::InvalidRecord(format!("unknown operator kind `{other}`"))),
        }
    }
}

/// Dense complex square matrix over a tensor-product space, tagged with its role.
///
/// Values are immutable once built; every kind-tagged constructor checks the
/// kind invariant against `validation_eps`.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator<T: Real> {
    matrix: DMatrix<C<T>>,
    signature: DimensionSignature,
    kind: OperatorKind,
}

impl<T: Real> Operator<T> {
    /// Builds an operator of the given kind, validating the kind invariant.
    pub fn new(
        matrix: DMatrix<C<T>>,
        signature: DimensionSignature,
        kind: OperatorKind,
        tol: &Tolerances<T>,
    ) -> Result<Self> {
        check_shape(&matrix, &signature)?;
        validate_kind(&matrix, kind, tol.validation_eps)?;
        Ok(Self {
            matrix,
            signature,
            kind,
        })
    }

    pub fn general(matrix: DMatrix<C<T>>, signature: DimensionSignature) -> Result<Self> {
        check_shape(&matrix, &signature)?;
        Ok(Self {
            matrix,
            signature,
            kind: OperatorKind::General,
        })
    }

    pub fn density(
        matrix: DMatrix<C<T>>,
        signature: DimensionSignature,
        tol: &Tolerances<T>,
    ) -> Result<Self> {
        Self::new(matrix, signature, OperatorKind::Density, tol)
    }

    pub fn projector(
        matrix: DMatrix<C<T>>,
        signature: DimensionSignature,
        tol: &Tolerances<T>,
    ) -> Result<Self> {
        Self::new(matrix, signature, OperatorKind::Projector, tol)
    }

    pub fn unitary(
        matrix: DMatrix<C<T>>,
        signature: DimensionSignature,
        tol: &Tolerances<T>,
    ) -> Result<Self> {
        Self::new(matrix, signature, OperatorKind::Unitary, tol)
    }

    /// Skips validation. Callers guarantee the invariant analytically.
    pub(crate) fn from_parts(
        matrix: DMatrix<C<T>>,
        signature: DimensionSignature,
        kind: OperatorKind,
    ) -> Self {
        debug_assert_eq!(matrix.nrows(), signature.total());
        debug_assert_eq!(matrix.ncols(), signature.total());
        Self {
            matrix,
            signature,
            kind,
        }
    }

    /// Identity, tagged as a projector (it is also unitary; see [`Operator::ensure_kind`]).
    pub fn identity(signature: DimensionSignature) -> Self {
        let n = signature.total();
        Self::from_parts(DMatrix::identity(n, n), signature, OperatorKind::Projector)
    }

    /// The zero projector (the impossible event).
    pub fn zero(signature: DimensionSignature) -> Self {
        let n = signature.total();
        Self::from_parts(DMatrix::zeros(n, n), signature, OperatorKind::Projector)
    }

    /// `|ψ⟩⟨ψ|` for a normalized state vector.
    pub fn pure_state(
        psi: &DVector<C<T>>,
        signature: DimensionSignature,
        tol: &Tolerances<T>,
    ) -> Result<Self> {
        let matrix = psi * psi.adjoint();
        Self::density(matrix, signature, tol)
    }

    /// Projector onto the span of orthonormal columns.
    pub fn projector_onto(
        columns: &DMatrix<C<T>>,
        signature: DimensionSignature,
        tol: &Tolerances<T>,
    ) -> Result<Self> {
        Self::projector(columns * columns.adjoint(), signature, tol)
    }

    /// Diagonal 0/1 projector selecting the basis states flagged `true`.
    pub fn diagonal_projector(mask: &[bool], signature: DimensionSignature) -> Result<Self> {
        let n = signature.total();
        if mask.len() != n {
            return Err(Error::ShapeMismatch {
                rows: mask.len(),
                cols: mask.len(),
                expected: n,
            });
        }
        let mut m = DMatrix::zeros(n, n);
        for (i, &on) in mask.iter().enumerate() {
            if on {
                m[(i, i)] = c_one();
            }
        }
        Ok(Self::from_parts(m, signature, OperatorKind::Projector))
    }

    pub fn matrix(&self) -> &DMatrix<C<T>> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C<T>> {
        self.matrix
    }

    pub fn signature(&self) -> &DimensionSignature {
        &self.signature
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C<T> {
        self.matrix.trace()
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<C<T>> {
        self.require_same_signature(other)?;
        let n = self.dim();
        let mut acc = c_zero();
        for i in 0..n {
            for j in 0..n {
                acc += self.matrix[(i, j)] * other.matrix[(j, i)];
            }
        }
        Ok(acc)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.matrix.adjoint(), self.signature.clone(), self.kind)
    }

    /// Matrix product; the result is tagged general.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        self.require_same_signature(rhs)?;
        Ok(Self::from_parts(
            &self.matrix * &rhs.matrix,
            self.signature.clone(),
            OperatorKind::General,
        ))
    }

    /// `U · self · U†`. Kind is kept when `U` is tagged unitary.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        self.require_same_signature(u)?;
        let kind = if u.kind == OperatorKind::Unitary {
            self.kind
        } else {
            OperatorKind::General
        };
        Ok(Self::from_parts(
            &u.matrix * &self.matrix * u.matrix.adjoint(),
            self.signature.clone(),
            kind,
        ))
    }

    /// `I − self`, the complementary event of a projector.
    pub fn complement(&self) -> Self {
        let n = self.dim();
        let m = DMatrix::<C<T>>::identity(n, n) - &self.matrix;
        let kind = match self.kind {
            OperatorKind::Projector => OperatorKind::Projector,
            _ => OperatorKind::General,
        };
        Self::from_parts(m, self.signature.clone(), kind)
    }

    pub fn scale(&self, factor: C<T>) -> Self {
        Self::from_parts(
            &self.matrix * factor,
            self.signature.clone(),
            OperatorKind::General,
        )
    }

    /// `(M + M†)/2`, keeping the tag.
    pub fn hermitized(&self) -> Self {
        let half = T::lit(0.5);
        let m = (&self.matrix + self.matrix.adjoint()).map(|z| z * half);
        Self::from_parts(m, self.signature.clone(), self.kind)
    }

    /// Returns a copy tagged `kind` if the matrix satisfies that kind's invariant.
    pub fn ensure_kind(&self, kind: OperatorKind, tol: &Tolerances<T>) -> Result<Self> {
        if self.kind == kind {
            return Ok(self.clone());
        }
        validate_kind(&self.matrix, kind, tol.validation_eps)?;
        Ok(Self::from_parts(
            self.matrix.clone(),
            self.signature.clone(),
            kind,
        ))
    }

    /// Re-checks the tagged kind invariant.
    pub fn validate(&self, tol: &Tolerances<T>) -> Result<()> {
        check_shape(&self.matrix, &self.signature)?;
        validate_kind(&self.matrix, self.kind, tol.validation_eps)
    }

    /// Largest deviation over the checks defining this operator's kind; zero
    /// for [`OperatorKind::General`], infinite for non-finite entries.
    pub fn kind_deviation(&self) -> T {
        kind_deviation(&self.matrix, self.kind)
    }

    pub(crate) fn require_same_signature(&self, other: &Self) -> Result<()> {
        if self.signature != other.signature {
            return Err(Error::SignatureMismatch {
                left: self.signature.dims().to_vec(),
                right: other.signature.dims().to_vec(),
            });
        }
        Ok(())
    }
}

fn check_shape<T: Real>(matrix: &DMatrix<C<T>>, signature: &DimensionSignature) -> Result<()> {
    let expected = signature.total();
    if matrix.nrows() != expected || matrix.ncols() != expected {
        return Err(Error::ShapeMismatch {
            rows: matrix.nrows(),
            cols: matrix.ncols(),
            expected,
        });
    }
    Ok(())
}

/// Largest entry of `|M − M†|`.
fn hermitian_deviation<T: Real>(m: &DMatrix<C<T>>) -> T {
    let n = m.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in i..n {
            let d = modulus(m[(i, j)] - m[(j, i)].conj());
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

pub(crate) fn max_abs<T: Real>(m: &DMatrix<C<T>>) -> T {
    m.iter()
        .map(|&z| modulus(z))
        .fold(T::zero(), |a, b| if b > a { b } else { a })
}

fn violation<T: Real>(kind: OperatorKind, check: &'static str, deviation: T, eps: T) -> Error {
    Error::KindViolation {
        kind,
        check,
        deviation: deviation.as_f64(),
        tolerance: eps.as_f64(),
    }
}

pub(crate) fn validate_kind<T: Real>(m: &DMatrix<C<T>>, kind: OperatorKind, eps: T) -> Result<()> {
    if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::KindViolation {
            kind,
            check: "finite entries",
            deviation: f64::INFINITY,
            tolerance: eps.as_f64(),
        });
    }
    let n = m.nrows();
    match kind {
        OperatorKind::General => Ok(()),
        OperatorKind::Density => {
            let herm = hermitian_deviation(m);
            if herm > eps {
                return Err(violation(kind, "hermiticity", herm, eps));
            }
            let tr = m.trace();
            let tr_dev = modulus(tr - c_one());
            if tr_dev > eps {
                return Err(violation(kind, "unit trace", tr_dev, eps));
            }
            let min_eig = min_eigenvalue(m);
            if min_eig < -eps {
                return Err(violation(kind, "positive semidefiniteness", -min_eig, eps));
            }
            Ok(())
        }
        OperatorKind::Projector => {
            let herm = hermitian_deviation(m);
            if herm > eps {
                return Err(violation(kind, "hermiticity", herm, eps));
            }
            let idem = max_abs(&(m * m - m));
            if idem > eps {
                return Err(violation(kind, "idempotence", idem, eps));
            }
            Ok(())
        }
        OperatorKind::Unitary => {
            let dev = max_abs(&(m * m.adjoint() - DMatrix::<C<T>>::identity(n, n)));
            if dev > eps {
                return Err(violation(kind, "unitarity", dev, eps));
            }
            Ok(())
        }
    }
}

fn kind_deviation<T: Real>(m: &DMatrix<C<T>>, kind: OperatorKind) -> T {
    if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return T::lit(f64::INFINITY);
    }
    let n = m.nrows();
    match kind {
        OperatorKind::General => T::zero(),
        OperatorKind::Density => {
            let tr_dev = modulus(m.trace() - c_one());
            let neg = -min_eigenvalue(m);
            hermitian_deviation(m).max(tr_dev).max(neg).max(T::zero())
        }
        OperatorKind::Projector => hermitian_deviation(m).max(max_abs(&(m * m - m))),
        OperatorKind::Unitary => max_abs(&(m * m.adjoint() - DMatrix::<C<T>>::identity(n, n))),
    }
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues<T: Real>(m: &DMatrix<C<T>>) -> Vec<T> {
    let half = T::lit(0.5);
    let h = (m + m.adjoint()).map(|z| z * half);
    let mut eig: Vec<T> = h.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    eig
}

fn min_eigenvalue<T: Real>(m: &DMatrix<C<T>>) -> T {
    hermitian_eigenvalues(m)
        .first()
        .copied()
        .unwrap_or_else(T::zero)
}
