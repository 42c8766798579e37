use crate::error::{Error, Result};

use super::density::{DensityMatrix, STATE_TOL};
use super::matrix::{ComplexMatrix, C64};

const NORM_TOL: f64 = 1e-12;

/// Point of the Bloch ball, `ρ = (I + x σx + y σy + z σz) / 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Self { x, y, z };
        if !(v.norm() <= 1.0 + NORM_TOL) {
            return Err(Error::Domain {
                name: "|bloch vector|",
                value: v.norm(),
                domain: "[0, 1]",
            });
        }
        Ok(v)
    }

    pub(crate) const fn raw(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub(crate) fn add_scaled(&self, other: &Self, s: f64) -> Self {
        Self::raw(self.x + s * other.x, self.y + s * other.y, self.z + s * other.z)
    }

    pub(crate) fn sub(&self, other: &Self) -> Self {
        self.add_scaled(other, -1.0)
    }

    pub(crate) fn scaled(&self, s: f64) -> Self {
        Self::raw(s * self.x, s * self.y, s * self.z)
    }

    pub fn is_pure(&self) -> bool {
        (self.norm() - 1.0).abs() <= STATE_TOL
    }

    /// `(I + v·σ)/2`.
    pub fn to_density(&self) -> DensityMatrix {
        let half = 0.5;
        let m = ComplexMatrix::from_rows(&[
            vec![C64::from(half * (1.0 + self.z)), C64::new(half * self.x, -half * self.y)],
            vec![C64::new(half * self.x, half * self.y), C64::from(half * (1.0 - self.z))],
        ])
        .expect("2x2");
        DensityMatrix::from_parts_unchecked(m, vec![2])
    }

    /// `v = Tr(ρ σ)` for a single-qubit state.
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "Bloch vector of a {}-dimensional state",
                rho.dim()
            )));
        }
        let m = rho.matrix();
        let off = m.get(1, 0) + m.get(0, 1).conj();
        Ok(Self::raw(off.re, off.im, (m.get(0, 0) - m.get(1, 1)).re))
    }

    /// Ket `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩` pointing along this direction.
    pub fn to_pure_ket(&self) -> [C64; 2] {
        let n = self.norm();
        let (x, y, z) = if n > 0.0 {
            (self.x / n, self.y / n, self.z / n)
        } else {
            (0.0, 0.0, 1.0)
        };
        let theta = z.clamp(-1.0, 1.0).acos();
        let phi = y.atan2(x);
        [
            C64::from((0.5 * theta).cos()),
            C64::from_polar((0.5 * theta).sin(), phi),
        ]
    }
}

/// `(I + v·σ)/2`, rejecting vectors outside the ball.
pub fn bloch_to_density(v: &BlochVector) -> Result<DensityMatrix> {
    if !(v.norm() <= 1.0 + NORM_TOL) {
        return Err(Error::Domain {
            name: "|bloch vector|",
            value: v.norm(),
            domain: "[0, 1]",
        });
    }
    Ok(v.to_density())
}

pub fn density_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    BlochVector::from_density(rho)
}
