//! Invariant checks shared by the property suite and the acceptance report.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use waveguide_dce::linalg::{self, c64, re, CMat};
use waveguide_dce::lindblad::Propagator;
use waveguide_dce::perturbative::{MechSelfEnergy, PairEmission, TwoExcitationProblem};
use waveguide_dce::{build_liouvillian, build_lowering_ops, Direction, MotionKind, MotionSpec, OperatorSet, SystemSpec};

pub type Check = Result<(), TestCaseError>;

pub fn motion_kind() -> impl Strategy<Value = MotionKind> {
    prop_oneof![Just(MotionKind::Perpendicular), Just(MotionKind::Parallel)]
}

/// Array with random positions, detuning and per-qubit complex amplitudes.
pub fn spec(max_qubits: usize) -> impl Strategy<Value = SystemSpec> {
    (1..=max_qubits)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0.0..std::f64::consts::TAU, n),
                -2.0..2.0f64,
                motion_kind(),
                prop::collection::vec((0.0..1.5f64, 0.0..std::f64::consts::TAU), n),
            )
        })
        .prop_map(|(phases, detuning, kind, amps)| {
            let motion = amps.iter().map(|&(r, t)| MotionSpec { kind, amplitude: linalg::cis(t) * r }).collect();
            SystemSpec::new(phases, detuning, motion).unwrap()
        })
}

/// `XX†/Tr X X†` from a random complex matrix.
pub fn random_state(dim: usize, entries: &[(f64, f64)]) -> CMat {
    let x = CMat::from_fn(dim, dim, |i, j| {
        let (a, b) = entries[i * dim + j];
        c64::new(a, b)
    });
    let rho = &x * linalg::dagger(&x);
    let tr = linalg::trace(&rho);
    linalg::scale(&rho, re(1.0) / tr)
}

pub fn entries(dim: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim * dim)
}

pub fn spec_and_state(max_qubits: usize) -> impl Strategy<Value = (SystemSpec, CMat)> {
    spec(max_qubits).prop_flat_map(|s| {
        let d = s.hilbert_dim();
        (Just(s), entries(d)).prop_map(move |(s, e)| (s, random_state(d, &e)))
    })
}

pub fn phases(min: usize, max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..6.0f64, min..=max)
}

/// `e^{Lt}` applied without the Hermitian symmetrisation done by `lindblad::evolve`.
pub fn raw_evolve(spec: &SystemSpec, rho0: &CMat, t: f64) -> CMat {
    let l = build_liouvillian(spec).unwrap();
    let x = Propagator::new(&l).propagate(&linalg::vectorize(rho0), t).unwrap();
    linalg::unvectorize(&x, spec.hilbert_dim())
}

fn apply(spec: &SystemSpec, rho: &CMat) -> CMat {
    build_liouvillian(spec).unwrap().apply(rho)
}

pub fn channel(spec: &SystemSpec, rho0: &CMat, t: f64) -> Check {
    let rho = raw_evolve(spec, rho0, t);
    let tr = linalg::trace(&rho);
    prop_assert!((tr - re(1.0)).norm() < 1e-9, "trace {tr}");
    let herm = linalg::max_abs_diff(&rho, &linalg::dagger(&rho));
    prop_assert!(herm < 1e-9, "Hermiticity {herm:e}");
    let min = linalg::hermitian_eigenvalues(&linalg::hermitian_part(&rho)).unwrap()[0];
    prop_assert!(min > -1e-9, "eigenvalue {min:e}");
    Ok(())
}

pub fn hermiticity(spec: &SystemSpec, rho: &CMat) -> Check {
    let out = apply(spec, rho);
    let gap = linalg::max_abs_diff(&out, &linalg::dagger(&out));
    prop_assert!(gap < 1e-12, "{gap:e}");
    Ok(())
}

pub fn weak_parity(spec: &SystemSpec, rho: &CMat) -> Check {
    let p = OperatorSet::build(spec).unwrap().parity();
    let left = apply(spec, &(&p * rho * &p));
    let right = &p * apply(spec, rho) * &p;
    let gap = linalg::max_abs_diff(&left, &right);
    prop_assert!(gap < 1e-12, "{gap:e}");
    Ok(())
}

/// `Tr S²ρ` is constant for co-located qubits with equal real amplitude.
pub fn total_spin(n: usize, v: f64, detuning: f64, t: f64, e: &[(f64, f64)]) -> Check {
    let s = SystemSpec::periodic(n, 0.0, detuning, MotionSpec::perpendicular(v)).unwrap();
    let d = s.hilbert_dim();
    let rho0 = random_state(d, &e[..d * d]);
    let b = build_lowering_ops(n).unwrap();
    let lower = b.iter().fold(linalg::zeros(d, d), |acc, x| acc + x);
    let raise = linalg::dagger(&lower);
    let half = linalg::scale(&linalg::identity(d), re(0.5 * n as f64));
    let sz = b.iter().fold(linalg::zeros(d, d), |acc, x| acc + linalg::dagger(x) * x) - half;
    // S² = S₊S₋ + S_z² − S_z
    let s2 = &raise * &lower + &sz * &sz - &sz;
    let before = linalg::trace(&(&s2 * &rho0)).re;
    let after = linalg::trace(&(&s2 * raw_evolve(&s, &rho0, t))).re;
    prop_assert!((before - after).abs() < 1e-9, "{before} -> {after}");
    Ok(())
}

pub fn alpha_sum_rule(phases: &[f64]) -> Check {
    for st in TwoExcitationProblem::new(phases).eigenstates().unwrap() {
        let sum: c64 = st.alpha.iter().sum();
        prop_assert!(sum.norm() < 1e-9, "{sum}");
    }
    Ok(())
}

/// `∫ I_σ dω/2π` summed over directions against `−4 Im a†Σa`.
pub fn optical_theorem(phases: &[f64], amps: &[(f64, f64)], total: f64) -> Check {
    let a: Vec<c64> = amps[..phases.len()].iter().map(|&(x, y)| c64::new(x, y)).collect();
    let emission = PairEmission::new(phases, &a, total).unwrap();
    let integrated = emission.directional_rate(Direction::Forward, 1e-11).unwrap()
        + emission.directional_rate(Direction::Backward, 1e-11).unwrap();
    let rate = MechSelfEnergy::direct(&TwoExcitationProblem::new(phases), total).unwrap().rate(&a);
    prop_assert!((integrated - rate).abs() < 1e-8 * rate.max(1e-300), "{integrated:e} vs {rate:e}");
    Ok(())
}

pub fn finite_chi(phases: &[f64], total: f64) -> Check {
    let problem = TwoExcitationProblem::new(phases);
    let exact = problem.at(total).unwrap();
    let scale = |m: &CMat| linalg::max_abs(m).max(1.0);
    let mut previous = f64::INFINITY;
    for chi in [1e6, 1e8, 1e10] {
        let finite = problem.at_finite_chi(total, chi).unwrap();
        let gap = [
            linalg::max_abs_diff(&finite.resolvent, &exact.resolvent) / scale(&exact.resolvent),
            linalg::max_abs_diff(&finite.vertex, &exact.vertex) / scale(&exact.vertex),
            linalg::max_abs_diff(&finite.contact, &exact.contact) / scale(&exact.contact),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        prop_assert!(gap < previous, "χ = {chi:e}: {gap:e} after {previous:e}");
        previous = gap;
    }
    prop_assert!(previous < 1e-6, "final gap {previous:e}");
    Ok(())
}

/// Direct against spectral self-energy; near-degenerate pair spectra are skipped.
pub fn self_energy_forms(phases: &[f64], total: f64) -> Check {
    let problem = TwoExcitationProblem::new(phases);
    let states = problem.eigenstates().unwrap();
    let separation = states
        .iter()
        .enumerate()
        .flat_map(|(i, a)| states[i + 1..].iter().map(move |b| (a.energy - b.energy).norm()))
        .fold(f64::INFINITY, f64::min);
    if separation < 1e-3 {
        return Err(TestCaseError::reject("near-degenerate pair spectrum"));
    }
    let direct = MechSelfEnergy::direct(&problem, total).unwrap();
    let spectral = MechSelfEnergy::spectral(&states, phases.len(), total);
    let gap = linalg::max_abs_diff(&direct.matrix, &spectral.matrix);
    prop_assert!(gap < 1e-9 * linalg::max_abs(&direct.matrix).max(1.0), "{gap:e}");
    Ok(())
}
