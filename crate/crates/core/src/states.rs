//! State families: classical-quantum and classical-classical states, rank-2
//! quantum-classical states, Bloch-ball decompositions and purification.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::qcore::{BlochVector, ComplexMatrix, DensityMatrix, C64, ONE, STATE_TOL, ZERO};

const ORTHO_TOL: f64 = 1e-10;
const WEIGHT_TOL: f64 = 1e-12;

/// Orthonormal rank-1 measurement basis on one subsystem.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveBasis {
    vectors: Vec<Vec<C64>>,
}

impl ProjectiveBasis {
    pub fn computational(dim: usize) -> Self {
        let vectors = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { ONE } else { ZERO }).collect())
            .collect();
        Self { vectors }
    }

    /// Qubit basis `{cos χ|0⟩ + e^{iφ} sin χ|1⟩, -e^{-iφ} sin χ|0⟩ + cos χ|1⟩}`.
    pub fn qubit(chi: f64, phi: f64) -> Self {
        let (s, c) = chi.sin_cos();
        let e = C64::from_polar(1.0, phi);
        Self {
            vectors: vec![vec![C64::from(c), e * s], vec![-e.conj() * s, C64::from(c)]],
        }
    }

    pub fn from_vectors(vectors: Vec<Vec<C64>>) -> Result<Self> {
        let d = vectors.len();
        if d == 0 || vectors.iter().any(|v| v.len() != d) {
            return Err(Error::DimensionMismatch(format!("{d} vectors do not form a square basis")));
        }
        for i in 0..d {
            for j in 0..d {
                let ip: C64 = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a.conj() * b).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                if (ip - expected).norm() > ORTHO_TOL {
                    return Err(Error::InvalidInput(format!(
                        "basis vectors {i},{j} have inner product {ip}"
                    )));
                }
            }
        }
        Ok(Self { vectors })
    }

    /// Columns of a unitary.
    pub fn from_unitary(u: &ComplexMatrix) -> Result<Self> {
        Self::from_vectors((0..u.ncols()).map(|j| u.column(j)).collect())
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn projector(&self, i: usize) -> ComplexMatrix {
        ComplexMatrix::projector(&self.vectors[i])
    }

    /// Unitary whose columns are the basis vectors.
    pub fn to_unitary(&self) -> ComplexMatrix {
        let d = self.dim();
        ComplexMatrix::from_fn(d, d, |i, j| self.vectors[j][i])
    }

    /// `(χ, φ)` of the first vector for a qubit basis: χ ∈ [0, π/2], φ ∈ [0, 2π).
    pub fn qubit_angles(&self) -> Option<(f64, f64)> {
        (self.dim() == 2).then(|| ket_angles(&self.vectors[0]))
    }

    /// Angles identifying the measurement (the unordered pair of projectors):
    /// χ ∈ [0, π/2], φ ∈ [0, π), with every z-basis measurement mapped to (0, 0).
    pub fn measurement_angles(&self) -> Option<(f64, f64)> {
        self.qubit_angles().map(|(chi, phi)| canonical_measurement_angles(chi, phi))
    }
}

/// Polar half-angle and relative phase of a qubit ket.
fn ket_angles(v: &[C64]) -> (f64, f64) {
    let chi = v[1].norm().atan2(v[0].norm());
    let phi = if v[0].norm() < 1e-15 || v[1].norm() < 1e-15 {
        0.0
    } else {
        (v[1].arg() - v[0].arg()).rem_euclid(2.0 * PI)
    };
    (chi, phi)
}

/// Canonical representative of the measurement `ProjectiveBasis::qubit(chi, phi)`.
pub fn canonical_measurement_angles(chi: f64, phi: f64) -> (f64, f64) {
    let (chi, phi) = ket_angles(&ProjectiveBasis::qubit(chi, phi).vectors[0]);
    const POLE: f64 = 1e-12;
    if chi < POLE || FRAC_PI_2 - chi < POLE {
        return (0.0, 0.0);
    }
    if phi >= PI {
        (FRAC_PI_2 - chi, (phi - PI).max(0.0))
    } else {
        (chi, phi)
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.iter().any(|&q| !(q >= 0.0)) {
        return Err(Error::InvalidInput(format!("negative weight in {weights:?}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::InvalidInput(format!("weights sum to {total}")));
    }
    Ok(())
}

/// `Σ_i q_i Π_{α_i} ⊗ ρ_i^B`.
pub fn cq_state(weights: &[f64], basis_a: &ProjectiveBasis, states_b: &[DensityMatrix]) -> Result<DensityMatrix> {
    check_weights(weights)?;
    if weights.len() != basis_a.dim() || states_b.len() != weights.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights, A basis of dimension {}, {} B states",
            weights.len(),
            basis_a.dim(),
            states_b.len()
        )));
    }
    let dim_b = states_b[0].dim();
    if states_b.iter().any(|s| s.dim() != dim_b) {
        return Err(Error::DimensionMismatch("B states of different dimensions".into()));
    }
    let d = basis_a.dim() * dim_b;
    let mut acc = ComplexMatrix::zeros(d, d);
    for (i, (&q, rho_b)) in weights.iter().zip(states_b).enumerate() {
        if q == 0.0 {
            continue;
        }
        acc = &acc + &basis_a.projector(i).kron(rho_b.matrix()).scale_real(q);
    }
    DensityMatrix::new(acc, vec![basis_a.dim(), dim_b])
}

/// Classical-classical input `Σ_j q_j Π_{α_j} ⊗ Π_{β_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CCInput {
    weights: Vec<f64>,
    basis_a: ProjectiveBasis,
    basis_b: ProjectiveBasis,
}

impl CCInput {
    /// B basis defaults to the computational one.
    pub fn new(weights: Vec<f64>, basis_a: ProjectiveBasis) -> Result<Self> {
        let basis_b = ProjectiveBasis::computational(basis_a.dim());
        Self::with_basis_b(weights, basis_a, basis_b)
    }

    pub fn with_basis_b(weights: Vec<f64>, basis_a: ProjectiveBasis, basis_b: ProjectiveBasis) -> Result<Self> {
        check_weights(&weights)?;
        if weights.len() != basis_a.dim() || weights.len() != basis_b.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for bases of dimension {} and {}",
                weights.len(),
                basis_a.dim(),
                basis_b.dim()
            )));
        }
        Ok(Self {
            weights,
            basis_a,
            basis_b,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn basis_a(&self) -> &ProjectiveBasis {
        &self.basis_a
    }

    pub fn basis_b(&self) -> &ProjectiveBasis {
        &self.basis_b
    }

    pub fn state(&self) -> DensityMatrix {
        cc_state(self)
    }
}

pub fn cc_state(input: &CCInput) -> DensityMatrix {
    let da = input.basis_a.dim();
    let db = input.basis_b.dim();
    let mut acc = ComplexMatrix::zeros(da * db, da * db);
    for (j, &q) in input.weights.iter().enumerate() {
        if q == 0.0 {
            continue;
        }
        acc = &acc + &input.basis_a.projector(j).kron(&input.basis_b.projector(j)).scale_real(q);
    }
    DensityMatrix::from_parts_unchecked(acc, vec![da, db])
}

/// Rank-2 quantum-classical state `p₀|00⟩⟨00| + p₁|φ1⟩⟨φ1|` with
/// `p₀ - p₁ = t` and `|φ⟩ = cos φ|0⟩ + sin φ|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rank2QCParams {
    pub t: f64,
    pub phi: f64,
}

impl Rank2QCParams {
    pub fn new(t: f64, phi: f64) -> Result<Self> {
        if !(t.abs() <= 1.0) {
            return Err(Error::Domain {
                name: "t",
                value: t,
                domain: "[-1, 1]",
            });
        }
        Ok(Self { t, phi })
    }

    pub fn weights(&self) -> (f64, f64) {
        (0.5 * (1.0 + self.t), 0.5 * (1.0 - self.t))
    }

    fn phi_ket(&self) -> [C64; 2] {
        [C64::from(self.phi.cos()), C64::from(self.phi.sin())]
    }

    /// `√p₀|000⟩ + √p₁|φ11⟩` in (A, B, C) order.
    pub fn purification(&self) -> Vec<C64> {
        let (p0, p1) = self.weights();
        let f = self.phi_ket();
        let mut psi = vec![ZERO; 8];
        psi[0] += p0.sqrt();
        // |a⟩|1⟩|1⟩ sits at index 4a + 3
        psi[3] += f[0] * p1.sqrt();
        psi[7] += f[1] * p1.sqrt();
        psi
    }
}

pub fn rank2_qc_state(params: &Rank2QCParams) -> DensityMatrix {
    let (p0, p1) = params.weights();
    let zero = ComplexMatrix::projector(&[ONE, ZERO]);
    let one = ComplexMatrix::projector(&[ZERO, ONE]);
    let phi = ComplexMatrix::projector(&params.phi_ket());
    let m = &zero.kron(&zero).scale_real(p0) + &phi.kron(&one).scale_real(p1);
    DensityMatrix::from_parts_unchecked(m, vec![2, 2])
}

/// Two pure qubit states `ψ`, `φ` on the chord through two Bloch points,
/// with `ρ₁ = w₁ψ + (1-w₁)φ` and `ρ₂ = w₂ψ + (1-w₂)φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lemma1Decomposition {
    pub psi: BlochVector,
    pub phi: BlochVector,
    pub w1: f64,
    pub w2: f64,
}

impl Lemma1Decomposition {
    pub fn psi_ket(&self) -> [C64; 2] {
        self.psi.to_pure_ket()
    }

    pub fn phi_ket(&self) -> [C64; 2] {
        self.phi.to_pure_ket()
    }

    /// `(w ψ + (1-w) φ)` as a density matrix.
    pub fn mixture(&self, w: f64) -> DensityMatrix {
        self.psi.scaled(w).add_scaled(&self.phi, 1.0 - w).to_density()
    }
}

/// Writes both qubit states as mixtures of the same two pure states: the
/// endpoints of the chord of the Bloch sphere through their Bloch points.
///
/// Coincident inputs use the chord along -z (or the diameter through the
/// point if it is pure), so `ψ = |0⟩`, `φ = |1⟩` for two maximally mixed states.
pub fn lemma1_decompose(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<Lemma1Decomposition> {
    let c1 = BlochVector::from_density(rho1)?;
    let c2 = BlochVector::from_density(rho2)?;
    let gap = c2.sub(&c1);
    let dir = if gap.norm() > 1e-12 {
        gap.scaled(1.0 / gap.norm())
    } else if c1.is_pure() {
        c1.scaled(-1.0 / c1.norm())
    } else {
        BlochVector::raw(0.0, 0.0, -1.0)
    };
    // |c1 + s dir| = 1  ⇔  s² + 2 s (c1·dir) + |c1|² - 1 = 0
    let b = c1.dot(&dir);
    let disc = (b * b - c1.dot(&c1) + 1.0).max(0.0).sqrt();
    let s_psi = -b - disc;
    let s_phi = -b + disc;
    let psi = c1.add_scaled(&dir, s_psi);
    let phi = c1.add_scaled(&dir, s_phi);
    let span = s_phi - s_psi;
    let (w1, w2) = if span > 1e-15 {
        let s2 = gap.dot(&dir);
        (s_phi / span, (s_phi - s2) / span)
    } else {
        (1.0, 1.0)
    };
    let clamp = |w: f64| w.clamp(0.0, 1.0);
    let normalise = |v: BlochVector| v.scaled(1.0 / v.norm());
    Ok(Lemma1Decomposition {
        psi: normalise(psi),
        phi: normalise(phi),
        w1: clamp(w1),
        w2: clamp(w2),
    })
}

/// Purification `Σ_k √λ_k |e_k⟩|k⟩_C` of a state of rank at most 2, with a
/// qubit purifying system appended as the last factor.
pub fn purify_rank2(rho: &DensityMatrix) -> Result<Vec<C64>> {
    let eig = rho.matrix().hermitian_eigen()?;
    let n = rho.dim();
    let rank = eig.values.iter().filter(|&&v| v > STATE_TOL).count();
    if rank > 2 {
        return Err(Error::RankTooLarge(rank));
    }
    let mut psi = vec![ZERO; 2 * n];
    // largest eigenvalue pairs with |0⟩_C
    for (c, k) in [n - 1, n.saturating_sub(2)].into_iter().enumerate().take(n.min(2)) {
        let lambda = eig.values[k].max(0.0);
        if lambda <= STATE_TOL && c == 1 {
            continue;
        }
        for i in 0..n {
            psi[2 * i + c] += eig.vectors.get(i, k) * lambda.sqrt();
        }
    }
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(psi.into_iter().map(|z| z / norm).collect())
}
