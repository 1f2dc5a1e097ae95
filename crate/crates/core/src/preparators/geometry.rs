use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::scalar::{c, c_zero, modulus, Real, C};
use crate::tensor::{DimensionSignature, Operator};

/// Entries below this modulus are zeroed when a packet is truncated to its half-space.
pub const AMPLITUDE_FLOOR: f64 = 1e-12;

/// One-dimensional spatial grid split into a lower part `[0, split_index)` and
/// an upper part `[split_index, n_sites)`.
///
/// For the Stern-Gerlach model the upper part is the upper half-space; for
/// the hole model it is the hole and the lower part is the rest of the screen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridGeometry<T> {
    pub n_sites: usize,
    pub split_index: usize,
    /// Standard deviation of `|ψ|²` in grid units.
    pub packet_width: T,
    /// Centers of the upper (ψ⁺ / hole-passing) and lower (ψ⁻ / screen-hitting) packets.
    pub packet_centers: (T, T),
}

impl<T: Real> Default for GridGeometry<T> {
    fn default() -> Self {
        Self {
            n_sites: 64,
            split_index: 32,
            packet_width: T::lit(4.0),
            packet_centers: (T::lit(48.0), T::lit(16.0)),
        }
    }
}

/// Half of the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Upper,
    Lower,
}

impl<T: Real> GridGeometry<T> {
    pub fn validate(&self) -> Result<()> {
        if self.split_index == 0 || self.split_index >= self.n_sites {
            return Err(Error::Degenerate(format!(
                "split index {} must lie strictly inside a grid of {} sites",
                self.split_index, self.n_sites
            )));
        }
        if !(self.packet_width.is_finite() && self.packet_width > T::zero()) {
            return Err(Error::Degenerate(format!(
                "packet width {} must be positive",
                self.packet_width
            )));
        }
        let split = T::from_usize(self.split_index).unwrap_or_else(T::zero);
        let last = T::from_usize(self.n_sites - 1).unwrap_or_else(T::zero);
        let (up, low) = self.packet_centers;
        if !(up >= split && up <= last) {
            return Err(Error::Degenerate(format!(
                "upper packet center {up} lies outside the upper sites [{split}, {last}]"
            )));
        }
        if !(low >= T::zero() && low <= split - T::one()) {
            return Err(Error::Degenerate(format!(
                "lower packet center {low} lies outside the lower sites [0, {}]",
                self.split_index - 1
            )));
        }
        Ok(())
    }

    pub fn signature(&self) -> DimensionSignature {
        DimensionSignature::single(self.n_sites).expect("n_sites validated positive")
    }

    pub fn contains(&self, side: Side, site: usize) -> bool {
        match side {
            Side::Upper => site >= self.split_index,
            Side::Lower => site < self.split_index,
        }
    }

    /// Normalized Gaussian amplitudes around `center` over the whole grid.
    pub fn gaussian(&self, center: T) -> DVector<C<T>> {
        let four_var = T::lit(4.0) * self.packet_width * self.packet_width;
        let v = DVector::from_fn(self.n_sites, |x, _| {
            let d = T::from_usize(x).unwrap_or_else(T::zero) - center;
            c((-(d * d) / four_var).exp(), T::zero())
        });
        normalized(v)
    }

    /// Gaussian packet confined to `side`: entries on the other side or below
    /// [`AMPLITUDE_FLOOR`] are zeroed and the result renormalized, so packets
    /// on opposite sides are exactly orthogonal.
    pub fn packet(&self, side: Side) -> Result<DVector<C<T>>> {
        self.validate()?;
        let center = match side {
            Side::Upper => self.packet_centers.0,
            Side::Lower => self.packet_centers.1,
        };
        let floor = T::lit(AMPLITUDE_FLOOR);
        let mut v = self.gaussian(center);
        for (x, z) in v.iter_mut().enumerate() {
            if !self.contains(side, x) || modulus(*z) < floor {
                *z = c_zero();
            }
        }
        if v.norm() <= floor {
            return Err(Error::Degenerate("packet has no support on its side".into()));
        }
        Ok(normalized(v))
    }
}

pub(crate) fn normalized<T: Real>(v: DVector<C<T>>) -> DVector<C<T>> {
    let norm = v.norm();
    v.map(|z| z / c(norm, T::zero()))
}

/// Diagonal 0/1 projector onto one half of the grid. The lower projector is
/// computed as the complement of the upper one, so the two sum to the identity.
pub fn make_half_space_projector<T: Real>(geom: &GridGeometry<T>, side: Side) -> Result<Operator<T>> {
    geom.validate()?;
    let mask: Vec<bool> = (0..geom.n_sites).map(|x| geom.contains(Side::Upper, x)).collect();
    let upper = Operator::diagonal_projector(&mask, geom.signature())?;
    Ok(match side {
        Side::Upper => upper,
        Side::Lower => upper.complement(),
    })
}
