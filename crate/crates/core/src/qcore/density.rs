use crate::error::{Error, Result};

use super::entropy::entropy_of_eigenvalues;
use super::matrix::{ComplexMatrix, C64};

/// Validity tolerance for density matrices (Hermiticity, trace, positivity).
pub const STATE_TOL: f64 = 1e-10;

/// Trace-one positive semidefinite Hermitian matrix on a tensor product of
/// subsystems with dimensions `dims`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates `mat` against [`STATE_TOL`] and the subsystem layout.
    pub fn new(mat: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        check_layout(&mat, &dims)?;
        let herm = mat.hermitian_deviation();
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("Hermiticity violated by {herm:.3e}")));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min_eig = mat.hermitian_eigenvalues()?[0];
        if min_eig < -STATE_TOL {
            return Err(Error::InvalidState(format!("minimum eigenvalue {min_eig:.3e}")));
        }
        Ok(Self { mat, dims })
    }

    /// Skips validation; callers guarantee validity by construction.
    pub(crate) fn from_parts_unchecked(mat: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), mat.nrows());
        Self { mat, dims }
    }

    /// Single-qubit state.
    pub fn qubit(mat: ComplexMatrix) -> Result<Self> {
        Self::new(mat, vec![2])
    }

    /// `|ψ⟩⟨ψ|` for a normalised ket.
    pub fn from_pure(ket: &[C64], dims: Vec<usize>) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("ket has squared norm {norm}")));
        }
        let mat = ComplexMatrix::projector(ket);
        check_layout(&mat, &dims)?;
        Ok(Self { mat, dims })
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        let mat = ComplexMatrix::identity(n).scale_real(1.0 / n as f64);
        Self { mat, dims }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Same matrix, regrouped into a different subsystem layout.
    pub fn with_dims(self, dims: Vec<usize>) -> Result<Self> {
        check_layout(&self.mat, &dims)?;
        Ok(Self { mat: self.mat, dims })
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.mat.hermitian_eigenvalues()
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> Result<f64> {
        entropy_of_eigenvalues(&self.eigenvalues()?)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dims != other.dims {
            return f64::INFINITY;
        }
        self.mat.max_abs_diff(&other.mat)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            mat: self.mat.kron(&other.mat),
            dims,
        }
    }

    /// `U ρ U†` for a unitary on the full space.
    pub fn evolve(&self, unitary: &ComplexMatrix) -> Result<Self> {
        if unitary.nrows() != self.dim() || !unitary.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "unitary {}x{} on state of dimension {}",
                unitary.nrows(),
                unitary.ncols(),
                self.dim()
            )));
        }
        let mat = &(unitary * &self.mat) * &unitary.adjoint();
        Ok(Self {
            mat: mat.hermitian_part(),
            dims: self.dims.clone(),
        })
    }

    /// Reduced state on the subsystems in `keep` (returned in ascending order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            return Err(Error::InvalidSubsystem("nothing to keep".into()));
        }
        if let Some(&bad) = keep.iter().find(|&&k| k >= self.dims.len()) {
            return Err(Error::InvalidSubsystem(format!(
                "index {bad} for {} subsystems",
                self.dims.len()
            )));
        }
        let traced: Vec<usize> = (0..self.dims.len()).filter(|k| !keep.contains(k)).collect();
        let strides = strides(&self.dims);
        let keep_offsets = offsets(&self.dims, &strides, &keep);
        let trace_offsets = offsets(&self.dims, &strides, &traced);
        let n = keep_offsets.len();
        let mat = ComplexMatrix::from_fn(n, n, |r, c| {
            trace_offsets
                .iter()
                .map(|&t| self.mat.get(keep_offsets[r] + t, keep_offsets[c] + t))
                .sum()
        });
        let dims = keep.iter().map(|&k| self.dims[k]).collect();
        Ok(Self { mat, dims })
    }

    /// Reorders subsystems: position `k` of the result holds old subsystem `order[k]`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (0..self.dims.len()).collect::<Vec<_>>() {
            return Err(Error::InvalidSubsystem(format!("{order:?} is not a permutation")));
        }
        let map = permutation_map(&self.dims, order);
        let n = self.dim();
        let mat = ComplexMatrix::from_fn(n, n, |i, j| self.mat.get(map[i], map[j]));
        let dims = order.iter().map(|&k| self.dims[k]).collect();
        Ok(Self { mat, dims })
    }
}

/// Free-function form of [`DensityMatrix::partial_trace`].
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    rho.partial_trace(keep)
}

fn check_layout(mat: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    if !mat.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", mat.nrows(), mat.ncols())));
    }
    if dims.is_empty() || dims.contains(&0) || dims.iter().product::<usize>() != mat.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "dims {dims:?} do not factor dimension {}",
            mat.nrows()
        )));
    }
    Ok(())
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Full-space offsets of every joint index of the listed subsystems,
/// enumerated with the first listed subsystem most significant.
fn offsets(dims: &[usize], strides: &[usize], subsystems: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &k in subsystems {
        out = out
            .iter()
            .flat_map(|&base| (0..dims[k]).map(move |d| base + d * strides[k]))
            .collect();
    }
    out
}

/// For each index of the permuted space, the matching index of the original.
pub(crate) fn permutation_map(dims: &[usize], order: &[usize]) -> Vec<usize> {
    let s = strides(dims);
    offsets(dims, &s, order)
}

/// Embeds `op` acting on the leading factor of dimension `op.nrows()` as `op ⊗ I`.
pub(crate) fn leading_kron_identity(op: &ComplexMatrix, rest: usize) -> ComplexMatrix {
    op.kron(&ComplexMatrix::identity(rest))
}
