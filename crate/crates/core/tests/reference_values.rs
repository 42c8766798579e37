use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use approx::assert_abs_diff_eq;
use qcorr_core::channels::{
    amplitude_damping, commutativity_probe, identity, max_qcp_channel, phase_damping, tensor_channels, ProbeOutcome,
};
use qcorr_core::correlations::{concurrence, deficit_ba, discord_ba, eof, rank2_discord_formula};
use qcorr_core::qcore::random::{haar_unitary, random_density, seeded_rng};
use qcorr_core::qcore::{binary_h, relative_entropy, von_neumann_entropy};
use qcorr_core::qcp::{
    qcp_ad_deficit, qcp_ad_discord, qcp_numeric, theorem1_check, CqInput, DeficitBranch,
};
use qcorr_core::states::{cc_state, rank2_qc_state};
use qcorr_core::superact::{bipartite_correlation_lower_bound, build_scenario, commutator_witness, superactivation_unitary};
use qcorr_core::{CCInput, ComplexMatrix, DensityMatrix, Measure, ProjectiveBasis, Rank2QCParams, C64};

fn diag(values: &[f64]) -> DensityMatrix {
    let n = values.len();
    let dims = if n == 4 { vec![2, 2] } else { vec![n] };
    DensityMatrix::new(ComplexMatrix::from_real_diagonal(values), dims).unwrap()
}

#[test]
fn entropy_reference_points() {
    let x = FRAC_1_SQRT_2;
    assert_abs_diff_eq!(binary_h(x).unwrap(), 0.6008760366928562, epsilon = 1e-12);
    assert_abs_diff_eq!(von_neumann_entropy(&diag(&[(1.0 + x) / 2.0, (1.0 - x) / 2.0])).unwrap(), 0.6008760366928562, epsilon = 1e-12);
    assert_abs_diff_eq!(relative_entropy(&diag(&[1.0, 0.0]), &diag(&[0.5, 0.5])).unwrap(), 1.0, epsilon = 1e-12);
    assert!(relative_entropy(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0])).unwrap().is_infinite());
}

#[test]
fn seed_pair_is_cq_state() {
    let rho = cc_state(&CCInput::new(vec![0.5, 0.5], ProjectiveBasis::computational(2)).unwrap());
    assert_eq!(rho, diag(&[0.5, 0.0, 0.0, 0.5]));
    assert!(discord_ba(&rho).unwrap().value < 1e-8);
}

#[test]
fn optimal_ad_input_output_matches_closed_forms() {
    let input = cc_state(&CCInput::new(vec![0.5, 0.5], ProjectiveBasis::qubit(FRAC_PI_4, 0.0)).unwrap());
    for &p in &[0.2, 0.5, 0.8] {
        let out = amplitude_damping(p).unwrap().apply_local_a(&input).unwrap();
        assert_abs_diff_eq!(discord_ba(&out).unwrap().value, qcp_ad_discord(p).unwrap(), epsilon = 1e-8);
        assert_abs_diff_eq!(deficit_ba(&out).unwrap().value, qcp_ad_deficit(p).unwrap().value, epsilon = 1e-8);
    }
}

#[test]
fn ad_deficit_branch_values() {
    let r = qcp_ad_deficit(0.5).unwrap();
    assert_eq!(r.branch, DeficitBranch::Transverse);
    assert_abs_diff_eq!(r.value, 0.2463, epsilon = 1e-4);
    assert_abs_diff_eq!(r.branch_values[1], 0.4567, epsilon = 1e-4);
}

#[test]
fn koashi_winter_inputs() {
    let rho = rank2_qc_state(&Rank2QCParams::new(0.0, FRAC_PI_4).unwrap());
    // the BC marginal of the purification has concurrence 1/√2 for this state
    let psi = qcorr_core::states::purify_rank2(&rho).unwrap();
    let bc = DensityMatrix::from_pure(&psi, vec![2, 2, 2]).unwrap().partial_trace(&[1, 2]).unwrap();
    let c = concurrence(&bc).unwrap();
    assert!(c > 0.0 && c < 1.0);
    assert_abs_diff_eq!(eof(&bc).unwrap(), binary_h((1.0 - c * c).sqrt()).unwrap(), epsilon = 1e-12);
}

#[test]
fn rank2_formula_agrees_with_optimiser() {
    for &t in &[-0.6, -0.2, 0.0, 0.3, 0.7] {
        for &phi in &[0.2, 0.5, FRAC_PI_4, 1.1, 1.4] {
            let params = Rank2QCParams::new(t, phi).unwrap();
            let numeric = discord_ba(&rank2_qc_state(&params)).unwrap().value;
            assert_abs_diff_eq!(rank2_discord_formula(&params), numeric, epsilon = 1e-7);
        }
    }
}

#[test]
fn unital_channels_have_zero_qcp() {
    assert!(qcp_numeric(&identity(2), Measure::Discord).unwrap().value < 1e-6);
    assert!(qcp_numeric(&phase_damping(0.5).unwrap(), Measure::Deficit).unwrap().value < 1e-6);
    let u = haar_unitary(2, &mut seeded_rng(12));
    let ch = qcorr_core::channels::unitary(&u).unwrap();
    assert!(qcp_numeric(&ch, Measure::Discord).unwrap().value < 1e-6);
}

#[test]
fn ad_optimal_input_location() {
    let r = qcp_numeric(&amplitude_damping(0.4).unwrap(), Measure::Discord).unwrap();
    assert!((r.q - 0.5).abs() < 1e-3, "q = {}", r.q);
    assert!((r.theta - FRAC_PI_4).abs() < 1e-2, "theta = {}", r.theta);
    assert!(r.diagnostics.converged());
}

#[test]
fn random_rank1_channels_bounded_by_maximum() {
    let mut rng = seeded_rng(31);
    let cap = 2.0 * binary_h(FRAC_1_SQRT_2).unwrap() - 1.0;
    for _ in 0..5 {
        let outputs = vec![
            qcorr_core::qcore::random::random_ket(2, &mut rng),
            qcorr_core::qcore::random::random_ket(2, &mut rng),
        ];
        let basis = ProjectiveBasis::from_unitary(&haar_unitary(2, &mut rng)).unwrap();
        let ch = qcorr_core::channels::rank1_channel(&outputs, &basis).unwrap();
        assert!(qcp_numeric(&ch, Measure::Discord).unwrap().value <= cap + 1e-4);
    }
}

#[test]
fn theorem1_trivial_cases() {
    let zero = DensityMatrix::qubit(ComplexMatrix::from_real_diagonal(&[1.0, 0.0])).unwrap();
    let one = DensityMatrix::qubit(ComplexMatrix::from_real_diagonal(&[0.0, 1.0])).unwrap();
    let input = CqInput {
        weights: vec![0.5, 0.5],
        basis_a: ProjectiveBasis::qubit(0.7, 0.3),
        states_b: vec![zero, one],
    };
    let r = theorem1_check(&input, &max_qcp_channel(), Measure::Discord).unwrap();
    assert_abs_diff_eq!(r.q_cq, r.q_cc, epsilon = 1e-12);
}

#[test]
fn superactivation_contrast() {
    let p = 0.3;
    assert!(qcp_numeric(&phase_damping(p).unwrap(), Measure::Discord).unwrap().value <= 1e-6);
    let w = commutator_witness(p).unwrap();
    assert!(w.matches && w.commutator.frobenius_norm() > 1e-3);
    let report = build_scenario(p).unwrap();
    assert!(report.pairwise_ok());
    assert!(bipartite_correlation_lower_bound(p, 2, 3).unwrap() > 1e-4);
    let u = superactivation_unitary();
    assert_abs_diff_eq!(u.get(0, 0).re, FRAC_1_SQRT_2, epsilon = 1e-15);
}

#[test]
fn probe_finds_pd_pair_witness() {
    let pd = phase_damping(0.5).unwrap();
    let both = tensor_channels(&pd, &pd);
    // commuting inputs exist whose outputs do not commute
    assert!(matches!(commutativity_probe(&both, 200, 4).unwrap(), ProbeOutcome::Witness { .. }));
    assert!(matches!(commutativity_probe(&pd, 200, 4).unwrap(), ProbeOutcome::Pass { .. }));
}

#[test]
fn bell_state_values() {
    let s = C64::from(FRAC_1_SQRT_2);
    let z = C64::from(0.0);
    let bell = DensityMatrix::from_pure(&[s, z, z, s], vec![2, 2]).unwrap();
    assert_abs_diff_eq!(discord_ba(&bell).unwrap().value, 1.0, epsilon = 1e-9);
    assert_abs_diff_eq!(deficit_ba(&bell).unwrap().value, 1.0, epsilon = 1e-9);
    let rho = random_density(&[2, 2], 1, &mut seeded_rng(40));
    // pure states: discord equals the entropy of the marginal
    let marginal = rho.partial_trace(&[0]).unwrap().entropy().unwrap();
    assert_abs_diff_eq!(discord_ba(&rho).unwrap().value, marginal, epsilon = 1e-8);
}
