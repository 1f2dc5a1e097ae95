//! Plain-data form of an [`Operator`] used by the file formats.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{c, Real};
use crate::tensor::{DimensionSignature, Operator, OperatorKind, Tolerances};

/// Serialized operator: `dims`, `kind`, and row-major `re` / `im` matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorRecord {
    pub dims: Vec<usize>,
    pub kind: OperatorKind,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl<T: Real> From<&Operator<T>> for OperatorRecord {
    fn from(op: &Operator<T>) -> Self {
        let m = op.matrix();
        let rows = |part: fn(&crate::scalar::C<T>) -> T| -> Vec<Vec<f64>> {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| part(&m[(i, j)]).as_f64()).collect())
                .collect()
        };
        Self {
            dims: op.signature().dims().to_vec(),
            kind: op.kind(),
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

impl OperatorRecord {
    /// Rebuilds the operator, re-validating its kind invariant.
    pub fn to_operator<T: Real>(&self, tol: &Tolerances<T>) -> Result<Operator<T>> {
        let sig = DimensionSignature::new(self.dims.clone())?;
        let n = sig.total();
        for (name, part) in [("re", &self.re), ("im", &self.im)] {
            if part.len() != n || part.iter().any(|row| row.len() != n) {
                return Err(Error::InvalidRecord(format!(
                    "`{name}` must be a {n}x{n} nested list for dims {:?}",
                    self.dims
                )));
            }
        }
        let convert = |x: f64| {
            T::from_f64(x).ok_or_else(|| Error::InvalidRecord(format!("unrepresentable value {x}")))
        };
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(c(convert(self.re[i][j])?, convert(self.im[i][j])?));
            }
        }
        let matrix = DMatrix::from_row_slice(n, n, &entries);
        Operator::new(matrix, sig, self.kind, tol)
    }
}
