use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered subsystem dimensions of a tensor-product space.
///
/// Composite basis states are ordered row-major: factor 0 varies slowest.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct DimensionSignature(Vec<usize>);

impl DimensionSignature {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        if dims.is_empty() {
            return Err(Error::InvalidSignature("no factors".into()));
        }
        if let Some(pos) = dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidSignature(format!("factor {pos} has dimension 0")));
        }
        dims.iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidSignature("total dimension overflows".into()))?;
        Ok(Self(dims))
    }

    /// Single-factor signature of dimension `dim`.
    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    pub fn bipartite(first: usize, second: usize) -> Result<Self> {
        Self::new(vec![first, second])
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    pub fn factor(&self, index: usize) -> Result<usize> {
        self.0.get(index).copied().ok_or(Error::IndexOutOfRange {
            index,
            len: self.0.len(),
        })
    }

    /// Signature of `self` followed by `other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut dims = self.0.clone();
        dims.extend_from_slice(&other.0);
        Self(dims)
    }

    /// Signature restricted to the given (sorted, deduplicated) factor indices.
    pub(crate) fn restrict(&self, keep: &[usize]) -> Self {
        Self(keep.iter().map(|&k| self.0[k]).collect())
    }

    /// Row-major strides: stride of factor k is the product of all later dimensions.
    pub(crate) fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.0.len()];
        for k in (0..self.0.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.0[k + 1];
        }
        strides
    }
}

impl TryFrom<Vec<usize>> for DimensionSignature {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<DimensionSignature> for Vec<usize> {
    fn from(sig: DimensionSignature) -> Self {
        sig.0
    }
}

impl fmt::Display for DimensionSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}
