//! Super-activation of phase damping: two copies of a channel that cannot
//! create correlations from a single classical input do so jointly after a
//! local two-qubit unitary.
//!
//! Subsystems are ordered `(A, A′, B, B′)` throughout, so the channels and the
//! unitary act on the leading 4-dimensional factor `AA′`.

use std::f64::consts::FRAC_1_SQRT_2;

use rand::Rng;

use crate::channels::{phase_damping, tensor_channels, KrausChannel};
use crate::error::{check_unit_interval, Error, Result};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::qcore::random::{haar_unitary, random_hermitian, stream_rng};
use crate::qcore::{commutator, xlog2x_neg, ComplexMatrix, DensityMatrix, C64, I};

/// Tolerance of the reduced-state identities.
pub const PAIRWISE_TOL: f64 = 1e-10;

/// Tolerance of the commutator identity.
pub const COMMUTATOR_TOL: f64 = 1e-12;

/// `U|ij⟩ = |ψ_ij⟩` with `ψ₀₀ = (|00⟩+|11⟩)/√2`, `ψ₀₁ = (|01⟩-|10⟩)/√2`,
/// `ψ₁₀ = (|0-⟩-|1+⟩)/√2`, `ψ₁₁ = (|0+⟩+|1-⟩)/√2`.
pub fn superactivation_unitary() -> ComplexMatrix {
    let s = FRAC_1_SQRT_2;
    let h = 0.5;
    // columns in the order 00, 01, 10, 11
    let columns: [[f64; 4]; 4] = [
        [s, 0.0, 0.0, s],
        [0.0, s, -s, 0.0],
        [h, -h, -h, -h],
        [h, h, h, -h],
    ];
    ComplexMatrix::from_fn(4, 4, |i, j| C64::from(columns[j][i]))
}

/// `|ψ_ij⟩`, the column `2i + j` of [`superactivation_unitary`].
pub fn psi(i: usize, j: usize) -> Vec<C64> {
    superactivation_unitary().column(2 * i + j)
}

/// `½(|00⟩⟨00| + |11⟩⟨11|)`.
fn seed_pair() -> DensityMatrix {
    DensityMatrix::from_parts_unchecked(ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]), vec![2, 2])
}

/// `ρ_AB ⊗ ρ_A′B′` in `(A, A′, B, B′)` order.
pub fn input_state() -> DensityMatrix {
    seed_pair()
        .tensor(&seed_pair())
        .permute(&[0, 2, 1, 3])
        .expect("fixed permutation")
}

fn pd_pair(p: f64) -> Result<KrausChannel> {
    let pd = phase_damping(p)?;
    Ok(tensor_channels(&pd, &pd))
}

/// `(Λ_PD ⊗ Λ_PD ⊗ I)(U ρ U†)` in `(A, A′, B, B′)` order.
pub fn output_state(p: f64) -> Result<DensityMatrix> {
    check_unit_interval("p", p)?;
    let u = superactivation_unitary().kron(&ComplexMatrix::identity(4));
    let rotated = input_state().evolve(&u)?;
    pd_pair(p)?.apply_local(&rotated, &[0, 1])
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommutatorWitness {
    /// `[Λ⊗Λ(ψ₀₀), Λ⊗Λ(ψ₁₁)]`.
    pub commutator: ComplexMatrix,
    /// `(i/8) p √(1-p) (I⊗σ_y + σ_y⊗I)`.
    pub predicted: ComplexMatrix,
    /// `±1`, whichever sign of the prediction is closer.
    pub sign: f64,
    pub residual: f64,
    pub matches: bool,
}

pub fn predicted_commutator(p: f64) -> ComplexMatrix {
    let y = ComplexMatrix::pauli_y();
    let id = ComplexMatrix::identity(2);
    let dir = &id.kron(&y) + &y.kron(&id);
    dir.scale(I * (p * (1.0 - p).sqrt() / 8.0))
}

pub fn commutator_witness(p: f64) -> Result<CommutatorWitness> {
    check_unit_interval("p", p)?;
    let ch = pd_pair(p)?;
    let a = ch.apply_matrix(&ComplexMatrix::projector(&psi(0, 0)))?;
    let b = ch.apply_matrix(&ComplexMatrix::projector(&psi(1, 1)))?;
    let c = commutator(&a, &b)?;
    let predicted = predicted_commutator(p);
    let plus = c.max_abs_diff(&predicted);
    let minus = c.max_abs_diff(&predicted.scale_real(-1.0));
    let (sign, residual) = if plus <= minus { (1.0, plus) } else { (-1.0, minus) };
    Ok(CommutatorWitness {
        commutator: c,
        predicted,
        sign,
        residual,
        matches: residual <= COMMUTATOR_TOL,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairwiseCheck {
    pub name: &'static str,
    pub residual: f64,
    pub holds: bool,
}

impl PairwiseCheck {
    fn new(name: &'static str, residual: f64) -> Self {
        Self {
            name,
            residual,
            holds: residual <= PAIRWISE_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuperactReport {
    pub p: f64,
    pub commutator_norm: f64,
    pub predicted_norm: f64,
    pub commutator_sign: f64,
    pub commutator_residual: f64,
    pub commutator_match: bool,
    pub pairwise_checks: Vec<PairwiseCheck>,
    pub output_state: DensityMatrix,
    /// Sampled upper bound on the deficit across `AA′:BB′`, when requested.
    pub deficit_upper_bound: Option<f64>,
}

impl SuperactReport {
    pub fn pairwise_ok(&self) -> bool {
        self.pairwise_checks.iter().all(|c| c.holds)
    }

    /// Adds [`bipartite_correlation_lower_bound`] to the report.
    pub fn with_deficit_bound(mut self, samples: usize, seed: u64) -> Result<Self> {
        self.deficit_upper_bound = Some(deficit_bound_of(&self.output_state, samples, seed)?);
        Ok(self)
    }
}

/// Output state, commutator witness and the reduced-state identities
/// `ρ′_AB = I/2 ⊗ ρ′_B`, `ρ′_A′B′ = I/2 ⊗ ρ′_B′`, `ρ′_AA′ = I/4`.
pub fn build_scenario(p: f64) -> Result<SuperactReport> {
    let out = output_state(p)?;
    let witness = commutator_witness(p)?;
    let half = DensityMatrix::maximally_mixed(vec![2]);

    let product_check = |a: usize, b: usize| -> Result<f64> {
        let joint = out.partial_trace(&[a, b])?;
        let marginal_b = out.partial_trace(&[b])?;
        Ok(joint.matrix().max_abs_diff(&half.tensor(&marginal_b).into_matrix()))
    };
    let aa = out.partial_trace(&[0, 1])?;
    let checks = vec![
        PairwiseCheck::new("rho_AB = I/2 (x) rho_B", product_check(0, 2)?),
        PairwiseCheck::new("rho_A'B' = I/2 (x) rho_B'", product_check(1, 3)?),
        PairwiseCheck::new(
            "rho_AA' = I/4",
            aa.matrix().max_abs_diff(DensityMatrix::maximally_mixed(vec![2, 2]).matrix()),
        ),
    ];
    Ok(SuperactReport {
        p,
        commutator_norm: witness.commutator.frobenius_norm(),
        predicted_norm: witness.predicted.frobenius_norm(),
        commutator_sign: witness.sign,
        commutator_residual: witness.residual,
        commutator_match: witness.matches,
        pairwise_checks: checks,
        output_state: out,
        deficit_upper_bound: None,
    })
}

/// `-Tr X log₂ X` for a positive semidefinite block.
fn block_entropy(x: &ComplexMatrix) -> Result<f64> {
    Ok(x.hermitian_eigenvalues()?.into_iter().map(xlog2x_neg).sum())
}

/// Deficit objective across the split `(first factor of dimension dim_a) : rest`
/// for the measurement whose basis is the columns of `w`.
struct SplitDeficit<'a> {
    rho: &'a DensityMatrix,
    dim_a: usize,
    entropy: f64,
}

impl SplitDeficit<'_> {
    fn eval(&self, w: &ComplexMatrix) -> Result<f64> {
        let rest = self.rho.dim() / self.dim_a;
        let id = ComplexMatrix::identity(rest);
        let mut s = 0.0;
        for i in 0..self.dim_a {
            let bra = ComplexMatrix::from_fn(1, self.dim_a, |_, a| w.get(a, i).conj());
            let k = bra.kron(&id);
            let block = &(&k * self.rho.matrix()) * &k.adjoint();
            s += block_entropy(&block)?;
        }
        Ok(s - self.entropy)
    }
}

/// `exp(iH)` for Hermitian `H`.
fn exp_i_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = h.hermitian_eigen()?;
    let n = h.nrows();
    let v = &eig.vectors;
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| v.get(i, k) * C64::from_polar(1.0, eig.values[k]) * v.get(j, k).conj())
            .sum()
    }))
}

/// Hermitian matrix with zero diagonal from `n(n-1)` real parameters.
fn hermitian_from_params(n: usize, x: &[f64]) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            let z = C64::new(x[k], x[k + 1]);
            h.set(i, j, z);
            h.set(j, i, z.conj());
            k += 2;
        }
    }
    h
}

/// Seed basis for sample `k`: Haar-random for even `k`, otherwise the
/// eigenbasis of `Tr_rest[(I ⊗ X) ρ]` for a random Hermitian `X`.
fn seed_basis<R: Rng + ?Sized>(rho: &DensityMatrix, dim_a: usize, k: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if k % 2 == 0 {
        return Ok(haar_unitary(dim_a, rng));
    }
    let rest = rho.dim() / dim_a;
    let x = random_hermitian(rest, rng);
    let weighted = &rho.matrix().clone() * &ComplexMatrix::identity(dim_a).kron(&x);
    let reduced = ComplexMatrix::from_fn(dim_a, dim_a, |a, ap| {
        (0..rest).map(|b| weighted.get(a * rest + b, ap * rest + b)).sum()
    });
    Ok(reduced.hermitian_eigen()?.vectors)
}

fn deficit_bound_of(rho: &DensityMatrix, samples: usize, seed: u64) -> Result<f64> {
    let dim_a = 4;
    let obj = SplitDeficit {
        rho,
        dim_a,
        entropy: rho.entropy()?,
    };
    let n_params = dim_a * (dim_a - 1);
    let opts = NelderMeadOptions {
        ftol: 1e-12,
        max_iter: 3000,
    };
    let mut best = f64::INFINITY;
    for k in 0..samples.max(1) {
        let mut rng = stream_rng(seed, k as u64);
        let v = seed_basis(rho, dim_a, k, &mut rng)?;
        let mut failure = None;
        let m = nelder_mead(
            |x| {
                let w = exp_i_hermitian(&hermitian_from_params(dim_a, x)).map(|e| &v * &e);
                match w.and_then(|w| obj.eval(&w)) {
                    Ok(f) => f,
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::INFINITY
                    }
                }
            },
            &vec![0.0; n_params],
            &vec![0.1; n_params],
            &opts,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        best = best.min(m.value);
    }
    if best < -1e-9 {
        return Err(Error::Internal(format!("deficit bound evaluated to {best:.3e}")));
    }
    Ok(best.max(0.0))
}

/// Smallest one-way deficit across `AA′:BB′` of the output state found by
/// Nelder-Mead over 4-dimensional measurement bases from `samples` seeds.
///
/// This is an upper bound on the exact deficit; a clearly positive value
/// indicates the correlation created between the two halves. Sample `k`
/// always uses random stream `k`, so the result is non-increasing in
/// `samples`.
pub fn bipartite_correlation_lower_bound(p: f64, samples: usize, seed: u64) -> Result<f64> {
    let out = output_state(p)?;
    let grouped = out.with_dims(vec![4, 4])?;
    deficit_bound_of(&grouped, samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::ZERO;

    #[test]
    fn unitary_columns() {
        let u = superactivation_unitary();
        assert!((&u.adjoint() * &u).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
        let s = FRAC_1_SQRT_2;
        let expected = [C64::from(s), ZERO, ZERO, C64::from(s)];
        assert!(psi(0, 0).iter().zip(&expected).all(|(a, b)| (a - b).norm() < 1e-15));
        // (|0+⟩ + |1-⟩)/√2 = (|00⟩ + |01⟩ + |10⟩ - |11⟩)/2
        let p11 = psi(1, 1);
        assert!((p11[3].re + 0.5).abs() < 1e-15 && (p11[0].re - 0.5).abs() < 1e-15);
        let overlap: C64 = psi(0, 0).iter().zip(&p11).map(|(a, b)| a.conj() * b).sum();
        assert!(overlap.norm() < 1e-15);
    }

    #[test]
    fn commutator_prefactor() {
        for k in 0..=10 {
            let p = k as f64 / 10.0;
            let w = commutator_witness(p).unwrap();
            assert!(w.matches, "p = {p}: residual {}", w.residual);
        }
        let w = commutator_witness(0.5).unwrap();
        let expected = 0.5 * 0.5f64.sqrt() * 2f64.sqrt() / 4.0;
        assert!((w.commutator.frobenius_norm() - expected).abs() < 1e-12);
        assert_eq!(w.sign, 1.0);
    }

    #[test]
    fn pairwise_identities() {
        for k in 0..=10 {
            let r = build_scenario(k as f64 / 10.0).unwrap();
            assert!(r.pairwise_ok(), "{:?}", r.pairwise_checks);
        }
        assert!(build_scenario(1.5).is_err());
    }

    #[test]
    fn no_correlation_without_noise() {
        assert!(bipartite_correlation_lower_bound(0.0, 2, 1).unwrap() < 1e-8);
    }

    #[test]
    fn bound_positive_and_monotone() {
        let few = bipartite_correlation_lower_bound(0.5, 2, 7).unwrap();
        let more = bipartite_correlation_lower_bound(0.5, 4, 7).unwrap();
        assert!(more <= few);
        assert!(more > 1e-4);
    }
}
