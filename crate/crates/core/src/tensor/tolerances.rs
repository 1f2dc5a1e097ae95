use crate::error::{Error, Result};
use crate::scalar::Real;

/// Numerical thresholds used across validation, equality and certainty checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances<T> {
    /// Operator-kind checks (Hermiticity, idempotence, unitarity, trace, PSD floor).
    pub validation_eps: T,
    /// Equality-of-operators checks.
    pub identity_eps: T,
    /// Probability-equals-one and probability-equals-zero checks.
    pub certainty_eps: T,
}

impl<T: Real> Tolerances<T> {
    pub fn new(validation_eps: T, identity_eps: T, certainty_eps: T) -> Result<Self> {
        let tol = Self {
            validation_eps,
            identity_eps,
            certainty_eps,
        };
        tol.check()?;
        Ok(tol)
    }

    pub fn check(&self) -> Result<()> {
        for (name, v) in [
            ("validation_eps", self.validation_eps),
            ("identity_eps", self.identity_eps),
            ("certainty_eps", self.certainty_eps),
        ] {
            if !(v > T::zero() && v < T::one()) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} = {v} must lie strictly between 0 and 1"
                )));
            }
        }
        Ok(())
    }

    /// Sets one entry by name; used for command-line overrides.
    pub fn with(mut self, name: &str, value: T) -> Result<Self> {
        match name {
            "validation_eps" => self.validation_eps = value,
            "identity_eps" => self.identity_eps = value,
            "certainty_eps" => self.certainty_eps = value,
            other => return Err(Error::InvalidTolerance(format!("unknown tolerance `{other}`"))),
        }
        self.check()?;
        Ok(self)
    }
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        let eps = T::lit(T::DEFAULT_EPS);
        Self {
            validation_eps: eps,
            identity_eps: eps,
            certainty_eps: eps,
        }
    }
}
