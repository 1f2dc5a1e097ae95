//! Tensor-product structure: Kronecker products, subsystem embeddings,
//! partial traces and operator distances.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::{c_zero, Real, C};
use crate::tensor::operator::max_abs;
use crate::tensor::{DimensionSignature, Operator, OperatorKind};

/// Kronecker product `a ⊗ b` with subsystem order `a` then `b`.
///
/// Projector, unitary and density tags survive when both operands share them.
pub fn tensor_product<T: Real>(a: &Operator<T>, b: &Operator<T>) -> Operator<T> {
    let (n, m) = (a.dim(), b.dim());
    let (am, bm) = (a.matrix(), b.matrix());
    let mut out = DMatrix::from_element(n * m, n * m, c_zero());
    for i in 0..n {
        for j in 0..n {
            let aij = am[(i, j)];
            if aij == c_zero() {
                continue;
            }
            for k in 0..m {
                for l in 0..m {
                    out[(i * m + k, j * m + l)] = aij * bm[(k, l)];
                }
            }
        }
    }
    let kind = match (a.kind(), b.kind()) {
        (x, y) if x == y && x != OperatorKind::General => x,
        _ => OperatorKind::General,
    };
    Operator::from_parts(out, a.signature().concat(b.signature()), kind)
}

/// Lifts an operator on factor `index` to the full space: identity elsewhere.
pub fn embed<T: Real>(
    op: &Operator<T>,
    index: usize,
    signature: &DimensionSignature,
) -> Result<Operator<T>> {
    let dk = signature.factor(index)?;
    if op.dim() != dk {
        return Err(Error::FactorDimensionMismatch {
            index,
            expected: dk,
            found: op.dim(),
        });
    }
    let before: usize = signature.dims()[..index].iter().product();
    let after: usize = signature.dims()[index + 1..].iter().product();
    let n = signature.total();
    let q = op.matrix();
    let mut out = DMatrix::from_element(n, n, c_zero());
    for a in 0..before {
        for i in 0..dk {
            for j in 0..dk {
                let qij = q[(i, j)];
                if qij == c_zero() {
                    continue;
                }
                let row0 = (a * dk + i) * after;
                let col0 = (a * dk + j) * after;
                for b in 0..after {
                    out[(row0 + b, col0 + b)] = qij;
                }
            }
        }
    }
    let kind = match op.kind() {
        OperatorKind::Projector => OperatorKind::Projector,
        OperatorKind::Unitary => OperatorKind::Unitary,
        // Identity factors break unit trace.
        _ if signature.len() == 1 => op.kind(),
        _ => OperatorKind::General,
    };
    Ok(Operator::from_parts(out, signature.clone(), kind))
}

/// Partial trace over every factor not listed in `keep`.
///
/// `keep` is treated as a set; the kept factors retain their original order.
pub fn partial_trace<T: Real>(op: &Operator<T>, keep: &[usize]) -> Result<Operator<T>> {
    if keep.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    let sig = op.signature();
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&k| k >= sig.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: sig.len(),
        });
    }
    let kept_sig = sig.restrict(&keep);
    let n = sig.total();
    let kept_n = kept_sig.total();

    // Split every composite index into (kept multi-index, traced multi-index).
    let strides = sig.strides();
    let mut kept_index = vec![0usize; n];
    let mut traced_index = vec![0usize; n];
    for (full, (ki, ti)) in kept_index.iter_mut().zip(traced_index.iter_mut()).enumerate() {
        let (mut k_lin, mut t_lin) = (0usize, 0usize);
        for (f, (&d, &s)) in sig.dims().iter().zip(&strides).enumerate() {
            let digit = (full / s) % d;
            if keep.binary_search(&f).is_ok() {
                k_lin = k_lin * d + digit;
            } else {
                t_lin = t_lin * d + digit;
            }
        }
        *ki = k_lin;
        *ti = t_lin;
    }

    let m = op.matrix();
    let mut out = DMatrix::from_element(kept_n, kept_n, c_zero());
    for r in 0..n {
        for c in 0..n {
            if traced_index[r] == traced_index[c] {
                out[(kept_index[r], kept_index[c])] += m[(r, c)];
            }
        }
    }
    let kind = match op.kind() {
        OperatorKind::Density => OperatorKind::Density,
        _ => OperatorKind::General,
    };
    Ok(Operator::from_parts(out, kept_sig, kind))
}

/// Both norms of `A − B`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Distance<T> {
    /// Largest entry modulus of the difference.
    pub max_entry: T,
    /// Sum of singular values of the difference.
    pub trace_norm: T,
}

pub fn operator_distance<T: Real>(a: &Operator<T>, b: &Operator<T>) -> Result<Distance<T>> {
    a.require_same_signature(b)?;
    let diff = a.matrix() - b.matrix();
    Ok(Distance {
        max_entry: max_abs(&diff),
        trace_norm: trace_norm(&diff),
    })
}

/// Trace norm (sum of singular values) of an arbitrary square matrix.
pub fn trace_norm<T: Real>(m: &DMatrix<C<T>>) -> T {
    if max_abs(m) == T::zero() {
        return T::zero();
    }
    m.clone()
        .singular_values()
        .iter()
        .fold(T::zero(), |acc, &s| acc + s)
}

/// Modulus of the largest entry; exposed for fast-fail equality checks.
pub fn max_entry<T: Real>(m: &DMatrix<C<T>>) -> T {
    max_abs(m)
}
