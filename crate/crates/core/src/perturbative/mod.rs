//! Diagrammatic engine, first order in the motion amplitude.
//!
//! All frequencies are offsets: single-photon `ω` from the qubit frequency `ω₀`, and two-photon or
//! mechanical `Ω` from `2ω₀`, in units of `Γ₀`. Motion amplitudes are `aₙ = k₀uₙ`. A
//! [`SystemSpec`] with detuning `Δ` corresponds to `Ω = 2Δ`.

mod green;
mod mechanics;
mod pairs;
mod scattering;

pub use green::ExcitationGreen;
pub use mechanics::{
    biphonoriton_hamiltonian, biphonoriton_hamiltonian_derived, dark_states, mech_green_dos, mech_self_energy, MechSelfEnergy,
    MechanicalSpec,
};
pub use pairs::{odd_phase, PairPropagator, PairState, TwoExcitationProblem};
pub use scattering::{reflected_g2, reflected_g2_single, ScatteringContext, G2_WINDOW};

use crate::error::{Error, Result};
use crate::linalg::{c64, cis, ZERO};
use crate::quadrature;
use crate::system::{Direction, SystemSpec};

/// Motion amplitude above which the first-order expansion is no longer trusted.
pub const PERTURBATIVE_AMPLITUDE: f64 = 0.3;

/// `ψ_{σ₁σ₂}` indexed by `[σ₁.index()][σ₂.index()]`.
pub type AmplitudeTable = [[c64; 2]; 2];

pub(crate) fn require_parallel(spec: &SystemSpec) -> Result<()> {
    if spec.is_parallel() {
        Ok(())
    } else {
        Err(Error::NotApplicable("mechanical backaction implemented for parallel motion only".into()))
    }
}

/// Two-photon emission at fixed total frequency `Ω`, reusable across `ω₁`.
#[derive(Debug, Clone)]
pub struct PairEmission {
    green: ExcitationGreen,
    amplitudes: Vec<c64>,
    total: f64,
    /// `Σ_{lm} F_{ij,lm}(aₗ − aₘ)φₗₘ`, flattened over `ij`.
    scattered: Vec<c64>,
}

impl PairEmission {
    pub fn new(phases: &[f64], amplitudes: &[c64], total: f64) -> Result<Self> {
        if phases.len() != amplitudes.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for {} qubits",
                amplitudes.len(),
                phases.len()
            )));
        }
        let n = phases.len();
        let problem = TwoExcitationProblem::new(phases);
        let prop = problem.at(total)?;
        let x: Vec<c64> = (0..n * n)
            .map(|r| {
                let (l, m) = (r / n, r % n);
                (amplitudes[l] - amplitudes[m]) * odd_phase(phases, l, m)
            })
            .collect();
        let scattered = (0..n * n).map(|r| (0..n * n).map(|c| prop.vertex[(r, c)] * x[c]).sum()).collect();
        Ok(PairEmission { green: ExcitationGreen::new(phases), amplitudes: amplitudes.to_vec(), total, scattered })
    }

    pub fn from_spec(spec: &SystemSpec) -> Result<Self> {
        require_parallel(spec)?;
        Self::new(spec.phases(), &spec.amplitudes(), 2.0 * spec.detuning())
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// All four `ψ_{σ₁σ₂}(ω₁, Ω − ω₁)`.
    pub fn amplitude(&self, omega1: f64) -> Result<AmplitudeTable> {
        let omega2 = self.total - omega1;
        let n = self.green.len();
        let phases = self.green.phases();
        let s1 = [self.green.emission(omega1, Direction::Forward)?, self.green.emission(omega1, Direction::Backward)?];
        let s2 = [self.green.emission(omega2, Direction::Forward)?, self.green.emission(omega2, Direction::Backward)?];
        let mut out = [[ZERO; 2]; 2];
        for d1 in Direction::BOTH {
            for d2 in Direction::BOTH {
                let (a, b) = (&s1[d1.index()], &s2[d2.index()]);
                let mut pair = ZERO;
                for i in 0..n {
                    for j in 0..n {
                        pair += a[i] * b[j] * self.scattered[i * n + j];
                    }
                }
                let mut single = ZERO;
                for m in 0..n {
                    single += self.amplitudes[m]
                        * (b[m] * cis(-d1.sign() * phases[m]) * d1.sign()
                            + a[m] * cis(-d2.sign() * phases[m]) * d2.sign());
                }
                out[d1.index()][d2.index()] = -(crate::linalg::I * pair + single);
            }
        }
        Ok(out)
    }

    /// `I_σ(ω) = |ψ_{σσ}|² + |ψ_{σ,−σ}|²`.
    pub fn spectrum(&self, dir: Direction, omega: f64) -> Result<f64> {
        let t = self.amplitude(omega)?;
        Ok(t[dir.index()].iter().map(|z| z.norm_sqr()).sum())
    }

    /// `∫ I_σ dω/2π` by adaptive quadrature over the real line.
    pub fn directional_rate(&self, dir: Direction, rel_tol: f64) -> Result<f64> {
        let mut failure = None;
        let integral = quadrature::adaptive_real_line(
            |w| match self.spectrum(dir, w) {
                Ok(v) => c64::new(v, 0.0),
                Err(e) => {
                    failure.get_or_insert(e);
                    ZERO
                }
            },
            0.5 * self.total,
            2.0,
            1e-300,
            rel_tol,
            4000,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(integral.value.re / (2.0 * std::f64::consts::PI))
    }
}

/// `ψ_{σ₁σ₂}(ω₁, Ω − ω₁)` for the spec's motion, with `Ω = 2Δ`.
pub fn two_photon_amplitude(spec: &SystemSpec, omega1: f64) -> Result<AmplitudeTable> {
    PairEmission::from_spec(spec)?.amplitude(omega1)
}

/// `I_σ(ω)` on a grid, for both directions (`[forward, backward]`).
pub fn emission_spectrum_pert(spec: &SystemSpec, grid: &[f64]) -> Result<Vec<[f64; 2]>> {
    let ctx = PairEmission::from_spec(spec)?;
    grid.iter()
        .map(|&w| Ok([ctx.spectrum(Direction::Forward, w)?, ctx.spectrum(Direction::Backward, w)?]))
        .collect()
}

/// Total pair-emission photon rate `W = −4 Im Σₙₘ aₙ* aₘ` at `Ω = 2Δ`.
pub fn emission_rate_pert(spec: &SystemSpec) -> Result<f64> {
    let sigma = mech_self_energy(spec, 2.0 * spec.detuning())?;
    Ok(sigma.rate(&spec.amplitudes()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::MotionSpec;

    fn lorentz(w: f64) -> c64 {
        c64::new(w, 1.0).inv()
    }

    #[test]
    fn single_qubit_amplitude() {
        let a = c64::new(0.02, 0.01);
        let ctx = PairEmission::new(&[0.0], &[a], 0.6).unwrap();
        let w1 = -0.35;
        let t = ctx.amplitude(w1).unwrap();
        for d1 in Direction::BOTH {
            for d2 in Direction::BOTH {
                let expect = -a * (lorentz(w1) * d2.sign() + lorentz(0.6 - w1) * d1.sign());
                assert!((t[d1.index()][d2.index()] - expect).norm() < 1e-15);
            }
        }
        let res = PairEmission::new(&[0.0], &[a], 0.0).unwrap().amplitude(0.0).unwrap();
        assert!((res[0][0] - crate::linalg::I * a * 2.0).norm() < 1e-15);
        assert!((res[1][1] + crate::linalg::I * a * 2.0).norm() < 1e-15);
        assert!(res[0][1].norm() < 1e-15);
    }

    #[test]
    fn optical_theorem_closes() {
        let spec = SystemSpec::new(
            vec![0.0, 0.8, 1.9],
            0.15,
            vec![MotionSpec::parallel(0.01), MotionSpec::parallel(c64::new(-0.02, 0.005)), MotionSpec::parallel(0.004)],
        )
        .unwrap();
        let ctx = PairEmission::from_spec(&spec).unwrap();
        let total: f64 = Direction::BOTH.iter().map(|&d| ctx.directional_rate(d, 1e-11).unwrap()).sum();
        let w = emission_rate_pert(&spec).unwrap();
        assert!(((total - w) / w).abs() < 1e-8, "{total} vs {w}");
    }
}
