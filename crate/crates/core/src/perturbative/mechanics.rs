use super::pairs::{odd_phase, PairState, TwoExcitationProblem};
use super::require_parallel;
use crate::error::{Error, Result};
use crate::linalg::{self, c64, re, CMat, I, ZERO};
use crate::system::SystemSpec;

/// Mechanical self-energy `Σ(Ω)` in units of `k₀²Γ₀`.
#[derive(Debug, Clone)]
pub struct MechSelfEnergy {
    pub matrix: CMat,
}

impl MechSelfEnergy {
    /// Direct evaluation through the hard-core pair resolvent.
    pub fn direct(problem: &TwoExcitationProblem, total: f64) -> Result<Self> {
        let n = problem.n_qubits();
        let phases = problem.phases();
        let r = problem.at(total)?.resolvent;
        let matrix = CMat::from_fn(n, n, |i, j| {
            let mut acc = ZERO;
            for l in 0..n {
                let left = odd_phase(phases, i, l);
                if left == ZERO {
                    continue;
                }
                for m in 0..n {
                    let right = odd_phase(phases, j, m);
                    acc += (r[(i * n + l, j * n + m)] + r[(i * n + l, m * n + j)]) * left * right;
                }
            }
            if i == j {
                acc - I
            } else {
                acc
            }
        });
        Ok(MechSelfEnergy { matrix })
    }

    /// Expansion over pair eigenstates, `Σᵢⱼ = 2 Σ_ν αᵢαⱼ/(Ω − E_ν) − iδᵢⱼ`.
    pub fn spectral(states: &[PairState], n: usize, total: f64) -> Self {
        let matrix = CMat::from_fn(n, n, |i, j| {
            let acc: c64 = states.iter().map(|s| s.alpha[i] * s.alpha[j] * 2.0 / (re(total) - s.energy)).sum();
            if i == j {
                acc - I
            } else {
                acc
            }
        });
        MechSelfEnergy { matrix }
    }

    /// Photon pair emission rate `−4 Im Σₙₘ aₙ* aₘ` for motion amplitudes `aₙ = k₀uₙ`.
    pub fn rate(&self, amplitudes: &[c64]) -> f64 {
        let n = amplitudes.len();
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += amplitudes[i].conj() * self.matrix[(i, j)] * amplitudes[j];
            }
        }
        -4.0 * acc.im
    }

    pub fn eigenvalues(&self) -> Result<Vec<c64>> {
        Ok(linalg::eigen(&self.matrix)?.0)
    }
}

/// `Σ(Ω)` for the spec's array. The spectral and direct forms are cross-checked and the direct
/// one is returned; a defective pair spectrum skips the check.
pub fn mech_self_energy(spec: &SystemSpec, total: f64) -> Result<MechSelfEnergy> {
    require_parallel(spec)?;
    let problem = TwoExcitationProblem::new(spec.phases());
    let direct = MechSelfEnergy::direct(&problem, total)?;
    if let Ok(states) = problem.eigenstates() {
        let spectral = MechSelfEnergy::spectral(&states, spec.n_qubits(), total);
        let scale = linalg::max_abs(&direct.matrix).max(1.0);
        let gap = linalg::max_abs_diff(&spectral.matrix, &direct.matrix);
        if gap > 1e-6 * scale {
            return Err(Error::EigenSolve(format!(
                "self-energy forms disagree by {gap:e} at Ω = {total}: near-degenerate pair spectrum"
            )));
        }
    }
    Ok(direct)
}

/// All pair eigenstates, longest-lived first.
pub fn dark_states(spec: &SystemSpec) -> Result<Vec<PairState>> {
    if spec.n_qubits() < 2 {
        return Err(Error::InvalidSpec("pair states need at least two qubits".into()));
    }
    let states = TwoExcitationProblem::new(spec.phases()).eigenstates()?;
    for s in &states {
        let sum: c64 = s.alpha.iter().sum();
        if sum.norm() > 1e-9 {
            return Err(Error::EigenSolve(format!("coupling sum rule violated by {:e}", sum.norm())));
        }
    }
    Ok(states)
}

/// Vibrational mode parameters: `omega_mech = Ω₀ − 2ω₀` and `zero_point = k₀u₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanicalSpec {
    pub omega_mech: f64,
    pub zero_point: f64,
}

impl MechanicalSpec {
    pub fn new(omega_mech: f64, zero_point: f64) -> Result<Self> {
        if !(zero_point >= 0.0) || !omega_mech.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "mechanical mode needs finite Ω₀ and k₀u₀ ≥ 0, got {omega_mech}, {zero_point}"
            )));
        }
        Ok(MechanicalSpec { omega_mech, zero_point })
    }

    /// Dressed phonon propagator `𝒢(Ω) = [Ω − Ω₀ − (k₀u₀)²Σ(Ω)]⁻¹`.
    pub fn green(&self, sigma: &MechSelfEnergy, total: f64) -> Result<CMat> {
        let n = sigma.matrix.nrows();
        let g2 = self.zero_point * self.zero_point;
        let m = CMat::from_fn(n, n, |i, j| {
            let d = if i == j { re(total - self.omega_mech) } else { ZERO };
            d - sigma.matrix[(i, j)] * g2
        });
        linalg::inverse(&m)
    }
}

/// `−(1/π) Im Tr 𝒢(Ω)` on a grid.
pub fn mech_green_dos(spec: &SystemSpec, mech: &MechanicalSpec, grid: &[f64]) -> Result<Vec<f64>> {
    require_parallel(spec)?;
    if mech.zero_point <= 0.0 {
        return Err(Error::InvalidSpec("density of states needs k₀u₀ > 0".into()));
    }
    let problem = TwoExcitationProblem::new(spec.phases());
    grid.iter()
        .map(|&w| {
            let sigma = MechSelfEnergy::direct(&problem, w)?;
            let g = mech
                .green(&sigma, w)
                .map_err(|e| Error::SingularSolve(format!("phonon propagator at Ω = {w}: {e}")))?;
            Ok(-linalg::trace(&g).im / std::f64::consts::PI)
        })
        .collect()
}

/// Two-level model of the breathing mode hybridised with the dark pair state:
/// `[[Ω₀ − i(k₀u₀)², (2√2/3)k₀u₀], [(2√2/3)k₀u₀, E_dark]]`.
pub fn biphonoriton_hamiltonian(mech: &MechanicalSpec, dark_energy: c64) -> CMat {
    let ku = mech.zero_point;
    let g = re(2.0 * 2f64.sqrt() / 3.0 * ku);
    let mut h = linalg::zeros(2, 2);
    h[(0, 0)] = c64::new(mech.omega_mech, -ku * ku);
    h[(0, 1)] = g;
    h[(1, 0)] = g;
    h[(1, 1)] = dark_energy;
    h
}

/// The same two-level model with the coupling `√2 k₀u₀ Σₙ αₙ modeₙ` taken from the pair state's
/// coefficients; `mode` is a normalised vibration pattern.
pub fn biphonoriton_hamiltonian_derived(mech: &MechanicalSpec, dark: &PairState, mode: &[c64]) -> CMat {
    let ku = mech.zero_point;
    let overlap: c64 = dark.alpha.iter().zip(mode).map(|(a, m)| a * m).sum();
    let g = overlap * (2f64.sqrt() * ku);
    let mut h = linalg::zeros(2, 2);
    h[(0, 0)] = c64::new(mech.omega_mech, -ku * ku);
    h[(0, 1)] = g;
    h[(1, 0)] = g;
    h[(1, 1)] = dark.energy;
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::MotionSpec;
    use std::f64::consts::PI;

    fn array(n: usize, kd: f64) -> SystemSpec {
        SystemSpec::periodic(n, kd, 0.0, MotionSpec::parallel(0.0)).unwrap()
    }

    #[test]
    fn two_qubit_closed_form() {
        for (kd, w) in [(0.4, 0.3), (1.3, -0.7), (2.9, 0.05)] {
            let s = mech_self_energy(&array(2, kd), w).unwrap().matrix;
            let s12 = -linalg::cis(2.0 * kd) / c64::new(w, 2.0);
            assert!((s[(0, 1)] - s12).norm() < 1e-10);
            assert!((s[(0, 0)] - (-I - s12)).norm() < 1e-10);
            assert!((s[(1, 1)] - s[(0, 0)]).norm() < 1e-10);
        }
    }

    #[test]
    fn single_qubit_is_purely_radiative() {
        let s = mech_self_energy(&array(1, 0.0), 0.7).unwrap();
        assert!((s.matrix[(0, 0)] + I).norm() < 1e-15);
        assert!((s.rate(&[re(0.1)]) - 0.04).abs() < 1e-15);
    }

    #[test]
    fn uniform_motion_has_no_collective_effect() {
        let spec = array(4, 0.7);
        for w in [-1.0, 0.0, 0.4] {
            let s = mech_self_energy(&spec, w).unwrap();
            let rate = s.rate(&[re(0.01); 4]);
            assert!((rate - 4.0 * 4.0 * 1e-4).abs() < 1e-14);
        }
    }

    #[test]
    fn single_qubit_dos_is_lorentzian() {
        let spec = array(1, 0.0);
        let mech = MechanicalSpec::new(0.3, 0.2).unwrap();
        let g = 0.04;
        let grid = [0.3, 0.3 + g, 1.0];
        let dos = mech_green_dos(&spec, &mech, &grid).unwrap();
        for (w, d) in grid.iter().zip(dos) {
            let expect = g / PI / ((w - 0.3).powi(2) + g * g);
            assert!((d - expect).abs() < 1e-12 * expect.max(1.0));
        }
    }
}
