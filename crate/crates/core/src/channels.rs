//! Quantum channels in operator-sum form.

use rand::Rng;

use crate::error::{check_unit_interval, Error, Result};
use crate::qcore::random::{haar_unitary, random_probabilities, seeded_rng};
use crate::qcore::{commutator, ComplexMatrix, DensityMatrix, C64, ONE, ZERO};
use crate::states::ProjectiveBasis;

/// Completeness tolerance for `Σ E†E = I`.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Output commutator norm above which the probe reports a witness.
pub const PROBE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
    name: Option<String>,
}

impl KrausChannel {
    /// Validates shapes and completeness.
    pub fn new(kraus: Vec<ComplexMatrix>, name: Option<String>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidChannel("no Kraus operators".into()))?;
        let (dim_out, dim_in) = (first.nrows(), first.ncols());
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidChannel("empty Kraus operator".into()));
        }
        if kraus.iter().any(|e| e.nrows() != dim_out || e.ncols() != dim_in) {
            return Err(Error::InvalidChannel("Kraus operators of different shapes".into()));
        }
        let ch = Self {
            dim_in,
            dim_out,
            kraus,
            name,
        };
        let dev = ch.completeness_deviation();
        if dev > COMPLETENESS_TOL {
            return Err(Error::InvalidChannel(format!("Σ E†E deviates from I by {dev:.3e}")));
        }
        Ok(ch)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// `max |Σ E†E - I|`.
    pub fn completeness_deviation(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for e in &self.kraus {
            sum = &sum + &(&e.adjoint() * e);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.dim_in))
    }

    /// `Σ E X E†` for an arbitrary operator `X`.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.nrows() != self.dim_in || x.ncols() != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "channel on dimension {} applied to {}x{}",
                self.dim_in,
                x.nrows(),
                x.ncols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for e in &self.kraus {
            out = &out + &(&(e * x) * &e.adjoint());
        }
        Ok(out)
    }

    /// Channel output. The subsystem layout is kept when the channel is
    /// square, otherwise the output is a single system.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.apply_matrix(rho.matrix())?.hermitian_part();
        let dims = if self.dim_in == self.dim_out {
            rho.dims().to_vec()
        } else {
            vec![self.dim_out]
        };
        Ok(DensityMatrix::from_parts_unchecked(out, dims))
    }

    /// `(Λ ⊗ I) ρ` with the channel acting on the listed subsystems, whose
    /// joint dimension (in the listed order) must equal the channel's.
    pub fn apply_local(&self, rho: &DensityMatrix, targets: &[usize]) -> Result<DensityMatrix> {
        if self.dim_in != self.dim_out {
            return Err(Error::InvalidChannel("local action needs a square channel".into()));
        }
        let n = rho.dims().len();
        if targets.is_empty() || targets.iter().any(|&t| t >= n) {
            return Err(Error::InvalidSubsystem(format!("{targets:?} for {n} subsystems")));
        }
        let mut order = targets.to_vec();
        order.extend((0..n).filter(|k| !targets.contains(k)));
        let joint: usize = targets.iter().map(|&t| rho.dims()[t]).product();
        if joint != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "channel on dimension {} applied to subsystems of joint dimension {joint}",
                self.dim_in
            )));
        }
        let moved = rho.permute(&order)?;
        let rest = rho.dim() / joint;
        let lifted: Vec<ComplexMatrix> = self
            .kraus
            .iter()
            .map(|e| crate::qcore::leading_kron_identity(e, rest))
            .collect();
        let mut out = ComplexMatrix::zeros(rho.dim(), rho.dim());
        for e in &lifted {
            out = &out + &(&(e * moved.matrix()) * &e.adjoint());
        }
        let moved_out = DensityMatrix::from_parts_unchecked(out.hermitian_part(), moved.dims().to_vec());
        let mut inverse = vec![0; n];
        for (k, &o) in order.iter().enumerate() {
            inverse[o] = k;
        }
        moved_out.permute(&inverse)
    }

    /// `(Λ ⊗ I) ρ` with the channel on subsystem 0.
    pub fn apply_local_a(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.apply_local(rho, &[0])
    }

    /// `max |Σ E E† - I|` is within `tol`. Square channels only.
    pub fn is_unital(&self, tol: f64) -> bool {
        if self.dim_in != self.dim_out {
            return false;
        }
        let mut sum = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for e in &self.kraus {
            sum = &sum + &(e * &e.adjoint());
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.dim_out)) <= tol
    }
}

/// Kraus set `{E_i ⊗ F_j}`.
pub fn tensor_channels(a: &KrausChannel, b: &KrausChannel) -> KrausChannel {
    let kraus = a
        .kraus
        .iter()
        .flat_map(|e| b.kraus.iter().map(move |f| e.kron(f)))
        .collect();
    let name = match (&a.name, &b.name) {
        (Some(x), Some(y)) => Some(format!("{x}⊗{y}")),
        _ => None,
    };
    KrausChannel {
        dim_in: a.dim_in * b.dim_in,
        dim_out: a.dim_out * b.dim_out,
        kraus,
        name,
    }
}

pub fn identity(dim: usize) -> KrausChannel {
    KrausChannel {
        dim_in: dim,
        dim_out: dim,
        kraus: vec![ComplexMatrix::identity(dim)],
        name: Some("id".into()),
    }
}

pub fn unitary(u: &ComplexMatrix) -> Result<KrausChannel> {
    KrausChannel::new(vec![u.clone()], Some("unitary".into()))
}

/// Amplitude damping with decay probability `p`:
/// `E₀ = |0⟩⟨0| + √(1-p)|1⟩⟨1|`, `E₁ = √p|0⟩⟨1|`. `p = 0` is the identity,
/// `p = 1` resets every state to `|0⟩`.
pub fn amplitude_damping(p: f64) -> Result<KrausChannel> {
    check_unit_interval("p", p)?;
    let e0 = ComplexMatrix::from_real_diagonal(&[1.0, (1.0 - p).sqrt()]);
    let e1 = ComplexMatrix::ket_bra(&[ONE, ZERO], &[ZERO, C64::from(p.sqrt())]);
    Ok(KrausChannel {
        dim_in: 2,
        dim_out: 2,
        kraus: vec![e0, e1],
        name: Some(format!("ad({p})")),
    })
}

/// Phase damping: `E₀ = |0⟩⟨0| + √(1-p)|1⟩⟨1|`, `E₁ = √p|1⟩⟨1|`.
pub fn phase_damping(p: f64) -> Result<KrausChannel> {
    check_unit_interval("p", p)?;
    let e0 = ComplexMatrix::from_real_diagonal(&[1.0, (1.0 - p).sqrt()]);
    let e1 = ComplexMatrix::from_real_diagonal(&[0.0, p.sqrt()]);
    Ok(KrausChannel {
        dim_in: 2,
        dim_out: 2,
        kraus: vec![e0, e1],
        name: Some(format!("pd({p})")),
    })
}

/// Measure in `basis` and prepare `outputs[i]` on outcome `i`:
/// `E_i = |ψ_i⟩⟨α_i|`.
pub fn rank1_channel(outputs: &[Vec<C64>], basis: &ProjectiveBasis) -> Result<KrausChannel> {
    if outputs.len() != basis.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} output states for a basis of dimension {}",
            outputs.len(),
            basis.dim()
        )));
    }
    let dim_out = outputs[0].len();
    for (i, psi) in outputs.iter().enumerate() {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if psi.len() != dim_out || (norm - 1.0).abs() > COMPLETENESS_TOL {
            return Err(Error::InvalidInput(format!("output state {i} is not a normalised ket")));
        }
    }
    let kraus = outputs
        .iter()
        .zip(basis.vectors())
        .map(|(psi, alpha)| ComplexMatrix::ket_bra(psi, alpha))
        .collect();
    Ok(KrausChannel {
        dim_in: basis.dim(),
        dim_out,
        kraus,
        name: Some("rank1".into()),
    })
}

/// `Ẽ₀ = |0⟩⟨0|`, `Ẽ₁ = |+⟩⟨1|`.
pub fn max_qcp_channel() -> KrausChannel {
    let h = C64::from(std::f64::consts::FRAC_1_SQRT_2);
    rank1_channel(&[vec![ONE, ZERO], vec![h, h]], &ProjectiveBasis::computational(2))
        .expect("fixed kets are normalised")
        .with_name("maxqcp")
}

/// Random channel with `n_kraus` operators, from a Haar isometry.
pub fn random_channel<R: Rng + ?Sized>(dim: usize, n_kraus: usize, rng: &mut R) -> KrausChannel {
    let u = haar_unitary(dim * n_kraus, rng);
    // the first `dim` columns form an isometry; row block k is E_k
    let kraus = (0..n_kraus)
        .map(|k| ComplexMatrix::from_fn(dim, dim, |i, j| u.get(k * dim + i, j)))
        .collect();
    KrausChannel {
        dim_in: dim,
        dim_out: dim,
        kraus,
        name: Some("random".into()),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProbeOutcome {
    /// Commuting inputs whose outputs do not commute.
    Witness {
        trial: usize,
        a: ComplexMatrix,
        b: ComplexMatrix,
        commutator_norm: f64,
    },
    /// No witness in `trials` samples. Not a proof of commutativity preservation.
    Pass { trials: usize },
}

/// Samples pairs of commuting states (diagonal in a shared Haar-random basis)
/// and reports the first pair whose channel outputs fail to commute.
pub fn commutativity_probe(ch: &KrausChannel, trials: usize, seed: u64) -> Result<ProbeOutcome> {
    let d = ch.dim_in();
    let mut rng = seeded_rng(seed);
    for trial in 0..trials.max(1) {
        let u = haar_unitary(d, &mut rng);
        let make = |w: &[f64]| &(&u * &ComplexMatrix::from_real_diagonal(w)) * &u.adjoint();
        let a = make(&random_probabilities(d, &mut rng));
        let b = make(&random_probabilities(d, &mut rng));
        let c = commutator(&ch.apply_matrix(&a)?, &ch.apply_matrix(&b)?)?;
        let commutator_norm = c.frobenius_norm();
        if commutator_norm > PROBE_TOL {
            return Ok(ProbeOutcome::Witness {
                trial,
                a,
                b,
                commutator_norm,
            });
        }
    }
    Ok(ProbeOutcome::Pass { trials: trials.max(1) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random::random_density;

    fn ket_state(v: [C64; 2]) -> DensityMatrix {
        DensityMatrix::from_pure(&v, vec![2]).unwrap()
    }

    #[test]
    fn identity_and_ad_examples() {
        let rho = random_density(&[2], 2, &mut seeded_rng(2));
        assert!(identity(2).apply(&rho).unwrap().max_abs_diff(&rho) < 1e-15);
        let full = amplitude_damping(1.0).unwrap().apply(&rho).unwrap();
        assert!(full.matrix().max_abs_diff(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0])) < 1e-15);
        let p = 0.3;
        let out = amplitude_damping(p).unwrap().apply(&ket_state([ZERO, ONE])).unwrap();
        assert!(out.matrix().max_abs_diff(&ComplexMatrix::from_real_diagonal(&[p, 1.0 - p])) < 1e-15);
        let ground = ket_state([ONE, ZERO]);
        assert_eq!(amplitude_damping(0.7).unwrap().apply(&ground).unwrap(), ground);
        assert!(amplitude_damping(1.2).is_err());
    }

    #[test]
    fn unitality() {
        for k in 0..=10 {
            assert!(phase_damping(k as f64 / 10.0).unwrap().is_unital(1e-12));
        }
        assert!(!amplitude_damping(0.3).unwrap().is_unital(1e-12));
        assert!(amplitude_damping(0.0).unwrap().is_unital(1e-12));
        assert!(!max_qcp_channel().is_unital(1e-12));
        let u = haar_unitary(2, &mut seeded_rng(3));
        assert!(unitary(&u).unwrap().is_unital(1e-12));
    }

    #[test]
    fn pd_shrinks_transverse_bloch() {
        let p: f64 = 0.36;
        let v = crate::qcore::BlochVector::new(0.3, -0.4, 0.5).unwrap();
        let out = phase_damping(p).unwrap().apply(&v.to_density()).unwrap();
        let w = crate::qcore::BlochVector::from_density(&out).unwrap();
        let s = (1.0 - p).sqrt();
        assert!((w.x - 0.3 * s).abs() < 1e-14 && (w.y + 0.4 * s).abs() < 1e-14 && (w.z - 0.5).abs() < 1e-14);
    }

    #[test]
    fn tensor_completeness() {
        let pd = phase_damping(0.4).unwrap();
        let both = tensor_channels(&pd, &pd);
        assert_eq!(both.kraus().len(), 4);
        assert!(both.completeness_deviation() < 1e-12);
        let id = tensor_channels(&identity(2), &identity(2));
        assert!(id.kraus()[0].max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn rejects_incomplete() {
        let e = ComplexMatrix::from_real_diagonal(&[1.0, 0.5]);
        assert!(matches!(KrausChannel::new(vec![e], None), Err(Error::InvalidChannel(_))));
        assert!(KrausChannel::new(vec![], None).is_err());
        let bad = vec![vec![ONE, ONE], vec![ONE, ZERO]];
        assert!(rank1_channel(&bad, &ProjectiveBasis::computational(2)).is_err());
    }

    #[test]
    fn local_action_matches_kron() {
        let mut rng = seeded_rng(4);
        let rho = random_density(&[2, 3], 6, &mut rng);
        let ch = random_channel(2, 3, &mut rng);
        let direct = rho.matrix().clone();
        let mut expected = ComplexMatrix::zeros(6, 6);
        for e in ch.kraus() {
            let big = e.kron(&ComplexMatrix::identity(3));
            expected = &expected + &(&(&big * &direct) * &big.adjoint());
        }
        let out = ch.apply_local_a(&rho).unwrap();
        assert!(out.matrix().max_abs_diff(&expected) < 1e-13);

        // same channel on the second factor of the swapped state
        let swapped = rho.permute(&[1, 0]).unwrap();
        let out_b = ch.apply_local(&swapped, &[1]).unwrap().permute(&[1, 0]).unwrap();
        assert!(out_b.max_abs_diff(&out) < 1e-13);
        assert!(ch.apply_local(&rho, &[1]).is_err());
    }

    #[test]
    fn max_qcp_channel_output() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let rho = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]), vec![2, 2]).unwrap();
        let out = max_qcp_channel().apply_local_a(&rho).unwrap();
        let params = crate::states::Rank2QCParams::new(0.0, std::f64::consts::FRAC_PI_4).unwrap();
        assert!(out.max_abs_diff(&crate::states::rank2_qc_state(&params)) < 1e-15);
        assert!((max_qcp_channel().kraus()[1].get(0, 1).re - h).abs() < 1e-15);
    }

    #[test]
    fn probe() {
        assert_eq!(commutativity_probe(&identity(2), 50, 1).unwrap(), ProbeOutcome::Pass { trials: 50 });
        assert!(matches!(
            commutativity_probe(&max_qcp_channel(), 50, 1).unwrap(),
            ProbeOutcome::Witness { .. }
        ));
    }

    #[test]
    fn random_channels_are_complete() {
        let mut rng = seeded_rng(9);
        for _ in 0..20 {
            assert!(random_channel(2, 3, &mut rng).completeness_deviation() < 1e-12);
        }
    }
}
