use crate::error::{Error, Result};

use super::density::{DensityMatrix, STATE_TOL};

/// Eigenvalues below this are treated as exactly zero in entropies.
pub const EIGEN_ZERO: f64 = 1e-12;

/// Tolerance for the argument of [`binary_h`] outside `[0, 1]`.
const H_DOMAIN_TOL: f64 = 1e-12;

/// `h(x) = -((1+x)/2) log₂((1+x)/2) - ((1-x)/2) log₂((1-x)/2)`, the entropy of a
/// qubit whose Bloch vector has length `x`.
pub fn binary_h(x: f64) -> Result<f64> {
    if !(x >= -H_DOMAIN_TOL && x <= 1.0 + H_DOMAIN_TOL) {
        return Err(Error::Domain {
            name: "x",
            value: x,
            domain: "[0, 1]",
        });
    }
    Ok(binary_h_clamped(x))
}

/// [`binary_h`] with the argument clamped into `[0, 1]`.
#[inline]
pub(crate) fn binary_h_clamped(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    xlog2x_neg(0.5 * (1.0 + x)) + xlog2x_neg(0.5 * (1.0 - x))
}

/// `-x log₂ x` with `0 log 0 = 0`.
#[inline]
pub(crate) fn xlog2x_neg(x: f64) -> f64 {
    if x <= EIGEN_ZERO {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Shannon entropy of a spectrum. Eigenvalues in `[-STATE_TOL, 0)` are
/// clipped; anything more negative is rejected.
pub fn entropy_of_eigenvalues(values: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &v in values {
        if v < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {v:.3e}")));
        }
        s += xlog2x_neg(v);
    }
    Ok(s.max(0.0))
}

/// `S(ρ) = -Tr ρ log₂ ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    rho.entropy()
}

/// `S(ρ‖σ) = Tr ρ (log₂ ρ - log₂ σ)`; `f64::INFINITY` when the support of
/// `ρ` is not contained in that of `σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "relative entropy between dimensions {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let eig = sigma.matrix().hermitian_eigen()?;
    let n = sigma.dim();
    let mut cross = 0.0;
    for k in 0..n {
        let v = eig.vectors.column(k);
        let w = rho.matrix().mul_vec(&v);
        let weight: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
        let lambda = eig.values[k];
        if lambda <= EIGEN_ZERO {
            if weight > EIGEN_ZERO {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += weight * lambda.log2();
    }
    let value = -rho.entropy()? - cross;
    Ok(if value.abs() < STATE_TOL { value.max(0.0) } else { value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::ComplexMatrix;
    use crate::qcore::C64;

    #[test]
    fn binary_h_reference_points() {
        assert_eq!(binary_h(0.0).unwrap(), 1.0);
        assert_eq!(binary_h(1.0).unwrap(), 0.0);
        // -(p log p + q log q), p = (1 + 1/√2)/2 = 0.853553..., q = 0.146446...
        let p: f64 = 0.5 * (1.0 + std::f64::consts::FRAC_1_SQRT_2);
        let q = 1.0 - p;
        let direct = -(p * p.log2() + q * q.log2());
        assert!((binary_h(std::f64::consts::FRAC_1_SQRT_2).unwrap() - direct).abs() < 1e-15);
        assert!((direct - 0.600876).abs() < 1e-6);
    }

    #[test]
    fn binary_h_domain() {
        assert!(binary_h(1.0 + 1e-13).is_ok());
        assert!(binary_h(-1e-13).is_ok());
        assert!(matches!(binary_h(1.01), Err(Error::Domain { .. })));
        assert!(matches!(binary_h(-0.2), Err(Error::Domain { .. })));
        assert!(binary_h(f64::NAN).is_err());
    }

    #[test]
    fn entropy_reference_states() {
        let mixed = DensityMatrix::maximally_mixed(vec![2]);
        assert!((mixed.entropy().unwrap() - 1.0).abs() < 1e-15);
        let pure = DensityMatrix::from_pure(&[C64::from(1.0), C64::from(0.0)], vec![2]).unwrap();
        assert_eq!(pure.entropy().unwrap(), 0.0);
        let x = std::f64::consts::FRAC_1_SQRT_2;
        let diag = DensityMatrix::qubit(ComplexMatrix::from_real_diagonal(&[(1.0 + x) / 2.0, (1.0 - x) / 2.0]))
            .unwrap();
        assert!((diag.entropy().unwrap() - binary_h(x).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_examples() {
        let zero = DensityMatrix::from_pure(&[C64::from(1.0), C64::from(0.0)], vec![2]).unwrap();
        let one = DensityMatrix::from_pure(&[C64::from(0.0), C64::from(1.0)], vec![2]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(vec![2]);
        assert_eq!(relative_entropy(&zero, &zero).unwrap(), 0.0);
        assert!((relative_entropy(&zero, &mixed).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(relative_entropy(&zero, &one).unwrap(), f64::INFINITY);
        assert!(relative_entropy(&zero, &DensityMatrix::maximally_mixed(vec![4])).is_err());
    }

    #[test]
    fn entropy_rejects_negative_spectrum() {
        assert!(entropy_of_eigenvalues(&[1.1, -0.1]).is_err());
        assert_eq!(entropy_of_eigenvalues(&[1.0, -1e-11]).unwrap(), 0.0);
    }
}
