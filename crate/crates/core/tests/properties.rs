//! Randomised invariants of both engines.

mod common;

use proptest::prelude::*;

use waveguide_dce::lindblad::{self, DensityMatrix};
use waveguide_dce::{build_liouvillian, perturbative, MotionSpec, SystemSpec};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn evolution_is_a_quantum_channel((s, rho0) in common::spec_and_state(3), t in 0.0..5.0f64) {
        common::channel(&s, &rho0, t)?;
    }

    #[test]
    fn liouvillian_has_weak_parity_symmetry((s, rho) in common::spec_and_state(3)) {
        common::weak_parity(&s, &rho)?;
    }

    #[test]
    fn liouvillian_preserves_hermiticity((s, rho) in common::spec_and_state(3)) {
        common::hermiticity(&s, &rho)?;
    }

    #[test]
    fn collective_dynamics_conserves_total_spin(
        n in 2usize..=3,
        v in 0.0..2.0f64,
        detuning in -1.0..1.0f64,
        t in 0.1..4.0f64,
        e in common::entries(8),
    ) {
        common::total_spin(n, v, detuning, t, &e)?;
    }

    #[test]
    fn motion_couplings_sum_to_zero(phases in prop::collection::vec(0.0..10.0f64, 2..=5)) {
        common::alpha_sum_rule(&phases)?;
    }

    #[test]
    fn pair_spectrum_closes_on_self_energy(
        phases in common::phases(1, 3),
        amps in prop::collection::vec((-0.05..0.05f64, -0.05..0.05f64), 3),
        total in -2.0..2.0f64,
    ) {
        common::optical_theorem(&phases, &amps, total)?;
    }

    #[test]
    fn finite_repulsion_converges_to_hard_core(phases in common::phases(2, 4), total in -2.0..2.0f64) {
        common::finite_chi(&phases, total)?;
    }

    #[test]
    fn self_energy_forms_agree(phases in common::phases(2, 5), total in -2.0..2.0f64) {
        common::self_energy_forms(&phases, total)?;
    }

    #[test]
    fn uniform_parallel_motion_rate_is_additive(n in 1usize..=4, kd in 0.01..3.0f64, detuning in -1.0..1.0f64) {
        let s = SystemSpec::periodic(n, kd, detuning, MotionSpec::parallel(0.01)).unwrap();
        let w = perturbative::emission_rate_pert(&s).unwrap();
        prop_assert!((w - 4e-4 * n as f64).abs() < 1e-12);
    }

    #[test]
    fn evolved_states_pass_validation((s, rho0) in common::spec_and_state(2), t in 0.0..3.0f64) {
        let rho = DensityMatrix::new(rho0).unwrap();
        let out = lindblad::evolve(&build_liouvillian(&s).unwrap(), &rho, t).unwrap();
        prop_assert!(DensityMatrix::new(out.into_matrix()).is_ok());
    }
}
