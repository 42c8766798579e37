//! Quantum discord and one-way deficit over projective measurements on A,
//! concurrence, entanglement of formation and the Koashi-Winter relation.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::qcore::{
    binary_h_clamped, eigenvalues_2x2, xlog2x_neg, ComplexMatrix, DensityMatrix, C64, EIGEN_ZERO,
};
use crate::states::{canonical_measurement_angles, purify_rank2, ProjectiveBasis, Rank2QCParams};

/// Values in `[-NEGATIVE_TOL, 0)` are float noise and clipped to zero.
pub const NEGATIVE_TOL: f64 = 1e-9;

/// Two results closer than this are a tie, settled by smaller angles.
const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Measure {
    Discord,
    Deficit,
}

impl Measure {
    pub const ALL: [Measure; 2] = [Measure::Discord, Measure::Deficit];

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Discord => "discord",
            Measure::Deficit => "deficit",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "discord" => Ok(Measure::Discord),
            "deficit" => Ok(Measure::Deficit),
            other => Err(Error::InvalidInput(format!("unknown measure {other:?}"))),
        }
    }
}

/// Budget of the measurement search: a `chi_points × phi_points` grid over
/// `χ ∈ [0, π/2]`, `φ ∈ [0, π)`, then Nelder-Mead from the best grid minima.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InnerOptions {
    pub chi_points: usize,
    pub phi_points: usize,
    pub restarts: usize,
    pub ftol: f64,
    pub max_iter: usize,
}

impl Default for InnerOptions {
    fn default() -> Self {
        Self {
            chi_points: 64,
            phi_points: 32,
            restarts: 3,
            ftol: 1e-10,
            max_iter: 500,
        }
    }
}

impl InnerOptions {
    /// Cheap budget for screening many candidate states.
    pub fn screening() -> Self {
        Self {
            chi_points: 12,
            phi_points: 8,
            restarts: 1,
            ftol: 1e-9,
            max_iter: 200,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OptimizerDiagnostics {
    pub grid_best: f64,
    pub evaluations: usize,
    pub refinements: usize,
    pub iterations: usize,
    /// Whether the refinement that produced the returned minimum converged.
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementResult {
    pub value: f64,
    pub basis: ProjectiveBasis,
    /// Canonical angles of the minimising measurement, `χ ∈ [0, π/2]`, `φ ∈ [0, π)`.
    pub chi: f64,
    pub phi: f64,
    pub diagnostics: OptimizerDiagnostics,
}

/// `Σ_i (Π_i ⊗ I) ρ (Π_i ⊗ I)` for a basis on subsystem 0.
pub fn measure_a(rho: &DensityMatrix, basis: &ProjectiveBasis) -> Result<DensityMatrix> {
    let da = rho.dims()[0];
    if basis.dim() != da {
        return Err(Error::DimensionMismatch(format!(
            "basis of dimension {} on subsystem of dimension {da}",
            basis.dim()
        )));
    }
    let rest = rho.dim() / da;
    let mut out = ComplexMatrix::zeros(rho.dim(), rho.dim());
    for i in 0..da {
        let p = basis.projector(i).kron(&ComplexMatrix::identity(rest));
        out = &out + &(&(&p * rho.matrix()) * &p);
    }
    Ok(DensityMatrix::from_parts_unchecked(out.hermitian_part(), rho.dims().to_vec()))
}

/// Reduced state of subsystem 0 against the rest.
fn marginal_a(rho: &DensityMatrix) -> Result<DensityMatrix> {
    rho.partial_trace(&[0])
}

/// `S(ρ) - S(ρ_A)`, subsystem 0 playing A.
pub fn conditional_entropy_ba(rho: &DensityMatrix) -> Result<f64> {
    check_bipartite(rho)?;
    Ok(rho.entropy()? - marginal_a(rho)?.entropy()?)
}

fn check_bipartite(rho: &DensityMatrix) -> Result<()> {
    if rho.dims().len() != 2 {
        return Err(Error::DimensionMismatch(format!("expected two subsystems, got dims {:?}", rho.dims())));
    }
    Ok(())
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(Error::DimensionMismatch(format!("expected dims [2, 2], got {:?}", rho.dims())));
    }
    Ok(())
}

/// Entropy of an unnormalised 2×2 Hermitian block `[[a, b], [b*, d]]`.
#[inline]
fn block_entropy(a: f64, d: f64, b: C64) -> f64 {
    let (lo, hi) = eigenvalues_2x2(a, d, b);
    xlog2x_neg(lo) + xlog2x_neg(hi)
}

/// The measurement objective of a two-qubit state as a function of the
/// angles `(χ, φ)` of the measured basis, in closed form.
#[derive(Clone, Debug)]
pub(crate) struct TwoQubitObjective {
    // 2×2 blocks ⟨a|ρ|a'⟩ on B, row-major
    r00: [C64; 4],
    r11: [C64; 4],
    r01: [C64; 4],
    rho_b: [C64; 4],
    entropy: f64,
    entropy_a: f64,
}

impl TwoQubitObjective {
    pub(crate) fn new(mat: &ComplexMatrix) -> Result<Self> {
        let spectrum = mat.hermitian_eigenvalues()?;
        let entropy = crate::qcore::entropy_of_eigenvalues(&spectrum)?;
        Ok(Self::with_entropy(mat, entropy))
    }

    /// `entropy` is `S(ρ)`, supplied by callers that know it in closed form.
    pub(crate) fn with_entropy(mat: &ComplexMatrix, entropy: f64) -> Self {
        let block = |a: usize, ap: usize| {
            [
                mat.get(2 * a, 2 * ap),
                mat.get(2 * a, 2 * ap + 1),
                mat.get(2 * a + 1, 2 * ap),
                mat.get(2 * a + 1, 2 * ap + 1),
            ]
        };
        let r00 = block(0, 0);
        let r11 = block(1, 1);
        let r01 = block(0, 1);
        let rho_b = [r00[0] + r11[0], r00[1] + r11[1], r00[2] + r11[2], r00[3] + r11[3]];
        let p0 = r00[0].re + r00[3].re;
        let b = mat.get(0, 2) + mat.get(1, 3);
        let entropy_a = block_entropy(p0, 1.0 - p0, b);
        Self {
            r00,
            r11,
            r01,
            rho_b,
            entropy,
            entropy_a,
        }
    }

    /// `S(ρ_Π)` and the outcome entropy `H(p₀, p₁)`.
    #[inline]
    fn measured(&self, chi: f64, phi: f64) -> (f64, f64) {
        let (s, c) = chi.sin_cos();
        let e = C64::from_polar(c * s, phi);
        let (cc, ss) = (c * c, s * s);
        // M₀ = c² R00 + s² R11 + cs (e^{iφ} R01 + e^{-iφ} R10), R10 = R01†
        let m = |k: usize, kt: usize| {
            self.r00[k] * cc + self.r11[k] * ss + e * self.r01[k] + e.conj() * self.r01[kt].conj()
        };
        let a0 = m(0, 0).re;
        let d0 = m(3, 3).re;
        let b0 = m(1, 2);
        let a1 = self.rho_b[0].re - a0;
        let d1 = self.rho_b[3].re - d0;
        let b1 = self.rho_b[1] - b0;
        let p0 = a0 + d0;
        let joint = block_entropy(a0, d0, b0) + block_entropy(a1, d1, b1);
        let outcome = xlog2x_neg(p0) + xlog2x_neg(1.0 - p0);
        (joint, outcome)
    }

    #[inline]
    pub(crate) fn eval(&self, measure: Measure, chi: f64, phi: f64) -> f64 {
        let (joint, outcome) = self.measured(chi, phi);
        match measure {
            Measure::Discord => (joint - outcome) - (self.entropy - self.entropy_a),
            Measure::Deficit => joint - self.entropy,
        }
    }

    pub(crate) fn minimize(&self, measure: Measure, opts: &InnerOptions) -> Result<(f64, f64, f64, OptimizerDiagnostics)> {
        let f = |chi: f64, phi: f64| self.eval(measure, chi, phi);
        minimize_angles(f, opts)
    }
}

/// Grid plus Nelder-Mead search of a function of the qubit measurement
/// angles. Returns the clipped minimum, the canonical angles and diagnostics.
fn minimize_angles<F>(f: F, opts: &InnerOptions) -> Result<(f64, f64, f64, OptimizerDiagnostics)>
where
    F: Fn(f64, f64) -> f64,
{
    let nc = opts.chi_points.max(2);
    let np = opts.phi_points.max(1);
    let dchi = FRAC_PI_2 / (nc - 1) as f64;
    let dphi = PI / np as f64;
    let mut grid = vec![0.0; nc * np];
    for i in 0..nc {
        let chi = i as f64 * dchi;
        for j in 0..np {
            grid[i * np + j] = f(chi, j as f64 * dphi);
        }
    }
    let mut evaluations = grid.len();

    let is_local_min = |i: usize, j: usize| {
        let v = grid[i * np + j];
        let mut ok = true;
        for di in [-1i64, 0, 1] {
            for dj in [-1i64, 0, 1] {
                if di == 0 && dj == 0 {
                    continue;
                }
                let (ii, jj) = (i as i64 + di, j as i64 + dj);
                if ii < 0 || ii >= nc as i64 {
                    continue;
                }
                let jj = jj.rem_euclid(np as i64) as usize;
                if grid[ii as usize * np + jj] < v {
                    ok = false;
                }
            }
        }
        ok
    };
    let mut order: Vec<usize> = (0..grid.len()).collect();
    // stable sort keeps the (smallest χ, smallest φ) grid point first among equals
    order.sort_by(|&a, &b| grid[a].total_cmp(&grid[b]));
    let restarts = opts.restarts.max(1);
    let mut starts: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&k| is_local_min(k / np, k % np))
        .take(restarts)
        .collect();
    for &k in &order {
        if starts.len() >= restarts {
            break;
        }
        if !starts.contains(&k) {
            starts.push(k);
        }
    }
    let grid_best = grid[order[0]];

    let nm = NelderMeadOptions {
        ftol: opts.ftol,
        max_iter: opts.max_iter,
    };
    let mut best: Option<(f64, f64, f64, bool)> = None;
    let mut iterations = 0;
    let consider = |value: f64, chi: f64, phi: f64, converged: bool, best: &mut Option<(f64, f64, f64, bool)>| {
        let (chi, phi) = canonical_measurement_angles(chi, phi);
        let better = match best {
            None => true,
            Some((bv, bc, bp, _)) => {
                value < *bv - TIE_TOL || (value <= *bv + TIE_TOL && (chi, phi) < (*bc, *bp))
            }
        };
        if better {
            *best = Some((value, chi, phi, converged));
        }
    };
    let k0 = order[0];
    consider(grid_best, (k0 / np) as f64 * dchi, (k0 % np) as f64 * dphi, true, &mut best);
    for &k in &starts {
        let x0 = [(k / np) as f64 * dchi, (k % np) as f64 * dphi];
        let m = nelder_mead(|x| f(x[0], x[1]), &x0, &[0.5 * dchi, 0.5 * dphi], &nm);
        evaluations += m.evaluations;
        iterations += m.iterations;
        consider(m.value, m.x[0], m.x[1], m.converged, &mut best);
    }
    let (value, chi, phi, converged) = best.expect("at least one candidate");
    let value = clip_negative(value)?;
    Ok((
        value,
        chi,
        phi,
        OptimizerDiagnostics {
            grid_best,
            evaluations,
            refinements: starts.len(),
            iterations,
            converged,
        },
    ))
}

pub(crate) fn clip_negative(value: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -NEGATIVE_TOL {
        Ok(0.0)
    } else {
        Err(Error::Internal(format!("correlation measure evaluated to {value:.3e}")))
    }
}

/// Minimum of the chosen measure over projective measurements on qubit A.
pub fn minimize_over_measurements(rho: &DensityMatrix, measure: Measure, opts: &InnerOptions) -> Result<MeasurementResult> {
    check_two_qubit(rho)?;
    let obj = TwoQubitObjective::new(rho.matrix())?;
    let (value, chi, phi, diagnostics) = obj.minimize(measure, opts)?;
    Ok(MeasurementResult {
        value,
        basis: ProjectiveBasis::qubit(chi, phi),
        chi,
        phi,
        diagnostics,
    })
}

pub fn discord_ba(rho: &DensityMatrix) -> Result<MeasurementResult> {
    discord_ba_with(rho, &InnerOptions::default())
}

pub fn discord_ba_with(rho: &DensityMatrix, opts: &InnerOptions) -> Result<MeasurementResult> {
    minimize_over_measurements(rho, Measure::Discord, opts)
}

pub fn deficit_ba(rho: &DensityMatrix) -> Result<MeasurementResult> {
    deficit_ba_with(rho, &InnerOptions::default())
}

pub fn deficit_ba_with(rho: &DensityMatrix, opts: &InnerOptions) -> Result<MeasurementResult> {
    minimize_over_measurements(rho, Measure::Deficit, opts)
}

/// Value of the measure for one fixed measurement on A, any dimensions.
pub fn measurement_objective(rho: &DensityMatrix, basis: &ProjectiveBasis, measure: Measure) -> Result<f64> {
    check_bipartite(rho)?;
    let measured = measure_a(rho, basis)?;
    let base = match measure {
        Measure::Discord => conditional_entropy_ba(&measured)? - conditional_entropy_ba(rho)?,
        Measure::Deficit => measured.entropy()? - rho.entropy()?,
    };
    Ok(base)
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    let yy = ComplexMatrix::pauli_y().kron(&ComplexMatrix::pauli_y());
    let conj = ComplexMatrix::from_fn(4, 4, |i, j| rho.matrix().get(i, j).conj());
    let flipped = &(&yy * &conj) * &yy;
    let sqrt_rho = rho.matrix().hermitian_map(|x| x.max(0.0).sqrt())?;
    let r = &(&sqrt_rho * &flipped) * &sqrt_rho;
    let mut lambdas: Vec<f64> = r.hermitian_eigenvalues()?.into_iter().map(|x| x.max(0.0).sqrt()).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0))
}

/// Entanglement of formation `h(√(1 - C²))`.
pub fn eof(rho: &DensityMatrix) -> Result<f64> {
    let c = concurrence(rho)?;
    Ok(binary_h_clamped((1.0 - c * c).max(0.0).sqrt()))
}

/// Discord `δ_{B|A}` of a state of rank at most 2 through a qubit
/// purification `C`: `E(ρ_BC) + S(ρ_BC) - S(ρ_C)`.
pub fn discord_via_koashi_winter(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    let psi = purify_rank2(rho)?;
    let abc = DensityMatrix::from_pure(&psi, vec![2, 2, 2])?;
    let bc = abc.partial_trace(&[1, 2])?;
    let c = abc.partial_trace(&[2])?;
    clip_negative(eof(&bc)? + bc.entropy()? - c.entropy()?)
}

/// Closed-form discord of the rank-2 quantum-classical family:
/// `h(√(1-(1-t²)cos²φ)) + h(√(1-(1-t²)sin²φ)) - h(|t|)`.
pub fn rank2_discord_formula(params: &Rank2QCParams) -> f64 {
    let Rank2QCParams { t, phi } = *params;
    let w = 1.0 - t * t;
    let (s, c) = phi.sin_cos();
    let h = |x: f64| binary_h_clamped(x.max(0.0).sqrt());
    h(1.0 - w * c * c) + h(1.0 - w * s * s) - binary_h_clamped(t.abs())
}

/// Smallest eigenvalue below which a state is treated as rank deficient.
pub const RANK_TOL: f64 = EIGEN_ZERO;
