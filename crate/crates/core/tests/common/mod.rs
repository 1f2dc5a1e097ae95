//! Independent reference computations. Nothing here calls into the library's
//! tensor routines; matrices are handled as plain nested index loops.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use prepsim::Complex64 as C;

pub fn zero() -> C {
    C::new(0.0, 0.0)
}

/// `(A ⊗ B)[(i,k),(j,l)] = A[i,j] B[k,l]`, row-major composite index.
pub fn naive_kron(a: &DMatrix<C>, b: &DMatrix<C>) -> DMatrix<C> {
    let (n, m) = (a.nrows(), b.nrows());
    let mut out = DMatrix::from_element(n * m, n * m, zero());
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[(i * m + k, j * m + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn naive_trace(a: &DMatrix<C>) -> C {
    let mut t = zero();
    for i in 0..a.nrows() {
        t += a[(i, i)];
    }
    t
}

/// `Σ_ij A_ij B_ji`.
pub fn elementwise_trace_product(a: &DMatrix<C>, b: &DMatrix<C>) -> C {
    let mut t = zero();
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            t += a[(i, j)] * b[(j, i)];
        }
    }
    t
}

/// Bipartite `[d1, d2]` partial trace by explicit double loop.
pub fn naive_trace_second(m: &DMatrix<C>, d1: usize, d2: usize) -> DMatrix<C> {
    let mut out = DMatrix::from_element(d1, d1, zero());
    for i in 0..d1 {
        for j in 0..d1 {
            for k in 0..d2 {
                out[(i, j)] += m[(i * d2 + k, j * d2 + k)];
            }
        }
    }
    out
}

pub fn naive_trace_first(m: &DMatrix<C>, d1: usize, d2: usize) -> DMatrix<C> {
    let mut out = DMatrix::from_element(d2, d2, zero());
    for k in 0..d2 {
        for l in 0..d2 {
            for i in 0..d1 {
                out[(k, l)] += m[(i * d2 + k, i * d2 + l)];
            }
        }
    }
    out
}

/// `I_{d1} ⊗ Q` on `[d1, d2]` entry by entry.
pub fn naive_embed_second(q: &DMatrix<C>, d1: usize) -> DMatrix<C> {
    let d2 = q.nrows();
    let mut out = DMatrix::from_element(d1 * d2, d1 * d2, zero());
    for i in 0..d1 {
        for k in 0..d2 {
            for l in 0..d2 {
                out[(i * d2 + k, i * d2 + l)] = q[(k, l)];
            }
        }
    }
    out
}

pub fn max_entry(m: &DMatrix<C>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Pure-state route for the prepared state of a bipartite pure composite:
/// project the vector with `I ⊗ Q`, renormalize, then reduce `|v⟩⟨v|` by the
/// naive loop.
pub fn projected_vector_route(psi: &DVector<C>, q: &DMatrix<C>, d1: usize) -> DMatrix<C> {
    let d2 = q.nrows();
    let mut v = DVector::from_element(d1 * d2, zero());
    for i in 0..d1 {
        for k in 0..d2 {
            let mut acc = zero();
            for l in 0..d2 {
                acc += q[(k, l)] * psi[i * d2 + l];
            }
            v[i * d2 + k] = acc;
        }
    }
    let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let c = 1.0 / norm2.sqrt();
    let v = v.map(|z| z * c);
    let mut out = DMatrix::from_element(d1, d1, zero());
    for i in 0..d1 {
        for j in 0..d1 {
            for k in 0..d2 {
                out[(i, j)] += v[i * d2 + k] * v[j * d2 + k].conj();
            }
        }
    }
    out
}

/// Trace norm of a Hermitian matrix via the absolute eigenvalue sum.
pub fn hermitian_trace_norm(m: &DMatrix<C>) -> f64 {
    let h = (m + m.adjoint()) * C::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().map(|l| l.abs()).sum()
}
