//! Quantum-correlating power of single-qubit channels: the numerical search
//! over classical-classical inputs, closed forms for amplitude damping and the
//! maximum over the rank-2 quantum-classical family.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rayon::prelude::*;

use crate::channels::KrausChannel;
use crate::correlations::{minimize_over_measurements, InnerOptions, Measure, TwoQubitObjective};
use crate::error::{check_unit_interval, Error, Result};
use crate::optimize::{bisect, nelder_mead, scan_minimize, NelderMeadOptions};
use crate::qcore::{binary_h_clamped, eigenvalues_2x2, xlog2x_neg, ComplexMatrix, DensityMatrix};
use crate::correlations::rank2_discord_formula;
use crate::states::{cc_state, cq_state, CCInput, ProjectiveBasis, Rank2QCParams};

/// Budget of the outer search over inputs `q|θ,φ⟩⟨θ,φ| ⊗ |0⟩⟨0| + (1-q)|θ⊥⟩⟨θ⊥| ⊗ |1⟩⟨1|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QcpOptions {
    /// Grid sizes over `q ∈ [0, 1]`, `θ ∈ [0, π/2]` and `φ ∈ [0, 2π)`.
    pub q_points: usize,
    pub theta_points: usize,
    pub phi_points: usize,
    /// Inner search used while scanning the outer grid.
    pub screening: InnerOptions,
    /// Number of grid points refined by Nelder-Mead.
    pub refine_starts: usize,
    /// Inner search used during refinement.
    pub refine_inner: InnerOptions,
    /// Inner search for the final reported value.
    pub inner: InnerOptions,
    pub outer_ftol: f64,
    pub outer_max_iter: usize,
}

impl Default for QcpOptions {
    fn default() -> Self {
        Self {
            q_points: 21,
            theta_points: 32,
            phi_points: 16,
            screening: InnerOptions::screening(),
            refine_starts: 3,
            refine_inner: InnerOptions {
                chi_points: 16,
                phi_points: 8,
                restarts: 2,
                ftol: 1e-11,
                max_iter: 300,
            },
            inner: InnerOptions::default(),
            outer_ftol: 1e-9,
            outer_max_iter: 300,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QcpDiagnostics {
    pub grid_best: f64,
    pub outer_evaluations: usize,
    pub outer_iterations: usize,
    pub outer_converged: bool,
    pub inner_converged: bool,
}

impl QcpDiagnostics {
    pub fn converged(&self) -> bool {
        self.outer_converged && self.inner_converged
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QcpResult {
    pub value: f64,
    pub measure: Measure,
    pub optimal_input: CCInput,
    /// Outer parameters of the optimal input.
    pub q: f64,
    pub theta: f64,
    pub phi_a: f64,
    pub optimal_measurement: ProjectiveBasis,
    pub chi: f64,
    pub phi: f64,
    pub diagnostics: QcpDiagnostics,
}

/// `q Λ(|θ,φ⟩⟨θ,φ|) ⊗ |0⟩⟨0| + (1-q) Λ(|θ⊥⟩⟨θ⊥|) ⊗ |1⟩⟨1|` and its entropy.
fn cc_output(ch: &KrausChannel, q: f64, theta: f64, phi_a: f64) -> Result<(ComplexMatrix, f64)> {
    let basis = ProjectiveBasis::qubit(theta, phi_a);
    let x0 = ch.apply_matrix(&basis.projector(0))?.scale_real(q);
    let x1 = ch.apply_matrix(&basis.projector(1))?.scale_real(1.0 - q);
    let mut m = ComplexMatrix::zeros(4, 4);
    let mut entropy = 0.0;
    for (j, x) in [x0, x1].iter().enumerate() {
        for a in 0..2 {
            for ap in 0..2 {
                m.set(2 * a + j, 2 * ap + j, x.get(a, ap));
            }
        }
        let b = 0.5 * (x.get(0, 1) + x.get(1, 0).conj());
        let (lo, hi) = eigenvalues_2x2(x.get(0, 0).re, x.get(1, 1).re, b);
        entropy += xlog2x_neg(lo) + xlog2x_neg(hi);
    }
    Ok((m, entropy))
}

fn check_qubit_channel(ch: &KrausChannel) -> Result<()> {
    if ch.dim_in() != 2 || ch.dim_out() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "QCP search needs a qubit channel, got {}→{}",
            ch.dim_in(),
            ch.dim_out()
        )));
    }
    Ok(())
}

/// Inner minimum for the input at outer coordinates `(u, θ, φ)`, `q = sin²u`.
fn inner_value(ch: &KrausChannel, measure: Measure, x: &[f64], inner: &InnerOptions) -> Result<(f64, f64, f64, bool)> {
    let q = x[0].sin().powi(2);
    let (m, entropy) = cc_output(ch, q, x[1], x[2])?;
    let obj = TwoQubitObjective::with_entropy(&m, entropy);
    let (v, chi, phi, diag) = obj.minimize(measure, inner)?;
    Ok((v, chi, phi, diag.converged))
}

pub fn qcp_numeric(ch: &KrausChannel, measure: Measure) -> Result<QcpResult> {
    qcp_numeric_with(ch, measure, &QcpOptions::default())
}

/// Maximum of the measure over classical-classical inputs passed through
/// `Λ ⊗ I`, with the B basis fixed to the computational one.
pub fn qcp_numeric_with(ch: &KrausChannel, measure: Measure, opts: &QcpOptions) -> Result<QcpResult> {
    check_qubit_channel(ch)?;
    let nq = opts.q_points.max(2);
    let nt = opts.theta_points.max(2);
    let np = opts.phi_points.max(1);
    let points: Vec<[f64; 3]> = (0..nq)
        .flat_map(|i| {
            let u = (i as f64 / (nq - 1) as f64).sqrt().asin();
            (0..nt).flat_map(move |j| {
                let theta = FRAC_PI_2 * j as f64 / (nt - 1) as f64;
                (0..np).map(move |k| [u, theta, 2.0 * PI * k as f64 / np as f64])
            })
        })
        .collect();
    let values: Vec<f64> = points
        .par_iter()
        .map(|x| inner_value(ch, measure, x, &opts.screening).map(|r| r.0))
        .collect::<Result<_>>()?;
    let mut outer_evaluations = values.len();

    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let grid_best = values[order[0]];
    let mut starts: Vec<usize> = Vec::new();
    for &k in &order {
        if starts.len() >= opts.refine_starts.max(1) {
            break;
        }
        // skip grid points describing the same input as an accepted start
        if starts.iter().all(|&s| (values[s] - values[k]).abs() > 1e-9 || s == k) {
            starts.push(k);
        }
    }
    if starts.len() < opts.refine_starts.max(1) {
        for &k in &order {
            if starts.len() >= opts.refine_starts.max(1) {
                break;
            }
            if !starts.contains(&k) {
                starts.push(k);
            }
        }
    }

    let steps = [
        0.5 * FRAC_PI_2 / (nq - 1) as f64,
        0.5 * FRAC_PI_2 / (nt - 1) as f64,
        PI / np as f64,
    ];
    let nm = NelderMeadOptions {
        ftol: opts.outer_ftol,
        max_iter: opts.outer_max_iter,
    };
    let mut best: Option<(Vec<f64>, f64, bool, usize)> = None;
    for &k in &starts {
        let mut failure = None;
        let m = nelder_mead(
            |x| match inner_value(ch, measure, x, &opts.refine_inner) {
                Ok(r) => -r.0,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::INFINITY
                }
            },
            &points[k],
            &steps,
            &nm,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        outer_evaluations += m.evaluations;
        let (x, v) = if -m.value >= values[k] {
            (m.x, -m.value)
        } else {
            (points[k].to_vec(), values[k])
        };
        if best.as_ref().is_none_or(|b| v > b.1) {
            best = Some((x, v, m.converged, m.iterations));
        }
    }
    let (x, _, outer_converged, outer_iterations) = best.expect("at least one start");
    let (value, chi, phi, inner_converged) = inner_value(ch, measure, &x, &opts.inner)?;

    let q = x[0].sin().powi(2);
    let theta_raw = x[1];
    let phi_raw = x[2];
    // the basis depends on θ through cos θ, sin θ; report θ ∈ [0, π/2], φ ∈ [0, 2π)
    let basis = ProjectiveBasis::qubit(theta_raw, phi_raw);
    let (theta, phi_a) = basis.qubit_angles().expect("qubit basis");
    let optimal_input = CCInput::new(vec![q, 1.0 - q], basis)?;
    Ok(QcpResult {
        value,
        measure,
        optimal_input,
        q,
        theta,
        phi_a,
        optimal_measurement: ProjectiveBasis::qubit(chi, phi),
        chi,
        phi,
        diagnostics: QcpDiagnostics {
            grid_best,
            outer_evaluations,
            outer_iterations,
            outer_converged,
            inner_converged,
        },
    })
}

/// Measure of `(Λ ⊗ I)` applied to one classical-classical input.
pub fn qcp_at_input(ch: &KrausChannel, measure: Measure, input: &CCInput, inner: &InnerOptions) -> Result<f64> {
    let out = ch.apply_local_a(&cc_state(input))?;
    Ok(minimize_over_measurements(&out, measure, inner)?.value)
}

/// `h(p) + h(√(1-p)) - h(√(1-p+p²)) - 1`.
pub fn qcp_ad_discord(p: f64) -> Result<f64> {
    check_unit_interval("p", p)?;
    let v = binary_h_clamped(p) + binary_h_clamped((1.0 - p).sqrt()) - reference_entropy(p) - 1.0;
    Ok(v.max(0.0))
}

/// `h(√(1-p+p²))`, the output entropy of the optimal amplitude-damping input.
fn reference_entropy(p: f64) -> f64 {
    binary_h_clamped((1.0 - p + p * p).sqrt())
}

fn t_pair(p: f64, chi: f64) -> (f64, f64) {
    let (s2, c2) = (2.0 * chi).sin_cos();
    let r = (1.0 - p).sqrt();
    (r * s2 + p * c2, r * s2 - p * c2)
}

/// `(h(t₁) + h(t₂)) / 2` with `t₁,₂ = √(1-p) sin 2χ ± p cos 2χ`.
pub fn deficit_objective(p: f64, chi: f64) -> f64 {
    let (t1, t2) = t_pair(p, chi);
    0.5 * (binary_h_clamped(t1.abs()) + binary_h_clamped(t2.abs()))
}

fn log_ratio(t: f64) -> f64 {
    let t = t.clamp(-1.0 + 1e-300, 1.0 - 1e-16);
    ((1.0 + t) / (1.0 - t)).log2()
}

/// Stationarity residual `√(1-p) cos 2χ (L₁+L₂) - p sin 2χ (L₁-L₂)` with
/// `L_k = log₂((1+t_k)/(1-t_k))`. Proportional to `-d/dχ` of [`deficit_objective`].
pub fn chi_residual(p: f64, chi: f64) -> f64 {
    let (t1, t2) = t_pair(p, chi);
    let (l1, l2) = (log_ratio(t1), log_ratio(t2));
    let (s2, c2) = (2.0 * chi).sin_cos();
    (1.0 - p).sqrt() * c2 * (l1 + l2) - p * s2 * (l1 - l2)
}

/// Interior root of [`chi_residual`] in `(0, π/4)` with the lowest
/// [`deficit_objective`]. `NoRoot` when the residual has no sign change
/// away from the endpoints, where it always vanishes.
pub fn solve_chi(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain {
            name: "p",
            value: p,
            domain: "(0, 1)",
        });
    }
    const SCAN: usize = 2000;
    const EDGE: f64 = 1e-6;
    let (lo, hi) = (EDGE, FRAC_PI_4 - EDGE);
    let h = (hi - lo) / SCAN as f64;
    let mut best: Option<(f64, f64)> = None;
    let mut prev = (lo, chi_residual(p, lo));
    for k in 1..=SCAN {
        let x = lo + k as f64 * h;
        let g = chi_residual(p, x);
        if prev.1 != 0.0 && g != 0.0 && prev.1.signum() != g.signum() {
            let root = bisect(|c| chi_residual(p, c), prev.0, x, 1e-15, 200)?;
            let d = deficit_objective(p, root);
            if best.is_none_or(|b| d < b.1) {
                best = Some((root, d));
            }
        }
        prev = (x, g);
    }
    best.map(|b| b.0).ok_or(Error::NoRoot { lo, hi })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeficitBranch {
    /// Measurement along x, `χ = π/4`.
    Transverse,
    /// Measurement along z, `χ = 0`.
    Longitudinal,
    /// Interior stationary `χ`.
    Interior,
}

impl DeficitBranch {
    pub fn index(self) -> usize {
        match self {
            DeficitBranch::Transverse => 1,
            DeficitBranch::Longitudinal => 2,
            DeficitBranch::Interior => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdDeficit {
    pub value: f64,
    pub branch: DeficitBranch,
    /// Optimal measurement angle in `[0, π/4]`.
    pub chi: f64,
    /// Branch values in the order transverse, longitudinal, interior.
    pub branch_values: [f64; 3],
    /// `|chi_residual|` at `chi` when the interior branch is active.
    pub residual: Option<f64>,
}

/// Three-branch closed form of the deficit QCP of amplitude damping.
/// The interior branch is the global minimum of [`deficit_objective`] over
/// `χ ∈ [0, π/4]`, certified by [`solve_chi`] when it is active.
pub fn qcp_ad_deficit(p: f64) -> Result<AdDeficit> {
    check_unit_interval("p", p)?;
    let reference = reference_entropy(p);
    let b1 = deficit_objective(p, FRAC_PI_4) - reference;
    let b2 = deficit_objective(p, 0.0) - reference;
    let (chi_min, d_min) = scan_minimize(|c| deficit_objective(p, c), 0.0, FRAC_PI_4, 4001, 1e-13);
    let b3 = d_min - reference;
    let endpoints = b1.min(b2);
    const BRANCH_TOL: f64 = 1e-12;
    let (branch, chi, residual) = if b3 < endpoints - BRANCH_TOL && p > 0.0 && p < 1.0 {
        let (chi, residual) = match solve_chi(p) {
            Ok(root) if deficit_objective(p, root) <= d_min + 1e-12 => (root, chi_residual(p, root).abs()),
            _ => (chi_min, chi_residual(p, chi_min).abs()),
        };
        (DeficitBranch::Interior, chi, Some(residual))
    } else if b1 <= b2 {
        (DeficitBranch::Transverse, FRAC_PI_4, None)
    } else {
        (DeficitBranch::Longitudinal, 0.0, None)
    };
    let value = match branch {
        DeficitBranch::Interior => deficit_objective(p, chi) - reference,
        DeficitBranch::Transverse => b1,
        DeficitBranch::Longitudinal => b2,
    };
    Ok(AdDeficit {
        value: value.max(0.0),
        branch,
        chi,
        branch_values: [b1, b2, b3.min(endpoints)],
        residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeficitSweepRow {
    pub p: f64,
    pub chi: f64,
    pub deficit: f64,
    pub branch: DeficitBranch,
}

/// Optimal measurement angle and deficit QCP of amplitude damping along a
/// grid of `p`.
pub fn deficit_basis_sweep(p_grid: &[f64]) -> Result<Vec<DeficitSweepRow>> {
    p_grid
        .iter()
        .map(|&p| {
            let r = qcp_ad_deficit(p)?;
            Ok(DeficitSweepRow {
                p,
                chi: r.chi,
                deficit: r.value,
                branch: r.branch,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaxQcp {
    pub t: f64,
    pub phi: f64,
    pub value: f64,
}

/// Maximum of the rank-2 quantum-classical discord over `t ∈ [-1, 1]`,
/// `φ ∈ [0, π/2]`.
pub fn max_qcp_search() -> MaxQcp {
    let f = |t: f64, phi: f64| {
        rank2_discord_formula(&Rank2QCParams {
            t: t.clamp(-1.0, 1.0),
            phi: phi.clamp(0.0, FRAC_PI_2),
        })
    };
    const N: usize = 41;
    let mut best = (0.0, 0.0, f64::NEG_INFINITY);
    for i in 0..N {
        let t = -1.0 + 2.0 * i as f64 / (N - 1) as f64;
        for j in 0..N {
            let phi = FRAC_PI_2 * j as f64 / (N - 1) as f64;
            let v = f(t, phi);
            if v > best.2 {
                best = (t, phi, v);
            }
        }
    }
    let m = nelder_mead(
        |x| -f(x[0], x[1]),
        &[best.0, best.1],
        &[0.02, 0.02],
        &NelderMeadOptions {
            ftol: 1e-16,
            max_iter: 2000,
        },
    );
    let (t, phi) = (m.x[0].clamp(-1.0, 1.0), m.x[1].clamp(0.0, FRAC_PI_2));
    MaxQcp { t, phi, value: f(t, phi) }
}

/// Classical-quantum input `Σ_i q_i Π_{α_i} ⊗ ρ_i^B`.
#[derive(Clone, Debug, PartialEq)]
pub struct CqInput {
    pub weights: Vec<f64>,
    pub basis_a: ProjectiveBasis,
    pub states_b: Vec<DensityMatrix>,
}

impl CqInput {
    pub fn state(&self) -> Result<DensityMatrix> {
        cq_state(&self.weights, &self.basis_a, &self.states_b)
    }

    /// Same weights and A basis with `ρ_i^B` replaced by `|i⟩⟨i|`.
    pub fn classical_counterpart(&self) -> Result<CCInput> {
        CCInput::new(self.weights.clone(), self.basis_a.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Theorem1Check {
    pub q_cq: f64,
    pub q_cc: f64,
}

impl Theorem1Check {
    pub fn holds(&self, tol: f64) -> bool {
        self.q_cc >= self.q_cq - tol
    }
}

/// Measure of the channel output for a classical-quantum input and for its
/// classical-classical counterpart.
pub fn theorem1_check(input: &CqInput, ch: &KrausChannel, measure: Measure) -> Result<Theorem1Check> {
    theorem1_check_with(input, ch, measure, &InnerOptions::default())
}

pub fn theorem1_check_with(input: &CqInput, ch: &KrausChannel, measure: Measure, inner: &InnerOptions) -> Result<Theorem1Check> {
    check_qubit_channel(ch)?;
    let cq_out = ch.apply_local_a(&input.state()?)?;
    let q_cq = minimize_over_measurements(&cq_out, measure, inner)?.value;
    let q_cc = qcp_at_input(ch, measure, &input.classical_counterpart()?, inner)?;
    Ok(Theorem1Check { q_cq, q_cc })
}
