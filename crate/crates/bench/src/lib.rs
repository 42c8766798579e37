//! Fixtures shared by the benchmarks.

use qcorr_core::qcore::random::{random_density, seeded_rng};
use qcorr_core::qcp::QcpOptions;
use qcorr_core::{DensityMatrix, InnerOptions};

/// Full-rank random state on the given subsystem dimensions.
pub fn random_state(dims: &[usize], seed: u64) -> DensityMatrix {
    let n = dims.iter().product();
    random_density(dims, n, &mut seeded_rng(seed))
}

/// A reduced outer search: coarse grid, single refinement start.
pub fn quick_qcp_options() -> QcpOptions {
    QcpOptions {
        q_points: 7,
        theta_points: 8,
        phi_points: 4,
        refine_starts: 1,
        inner: InnerOptions {
            chi_points: 32,
            phi_points: 16,
            ..InnerOptions::default()
        },
        ..QcpOptions::default()
    }
}
