use std::cell::RefCell;
use std::collections::HashMap;

use crate::error::Result;
use crate::linalg::{self, c64, cis, CMat, I};
use crate::system::Direction;

/// Single-excitation Green's function `G(ω) = (ω − H)⁻¹` of the array, with
/// `H_ij = −i e^{i|φᵢ − φⱼ|}`. Frequencies are offsets from the qubit resonance, in units of `Γ₀`.
#[derive(Debug)]
pub struct ExcitationGreen {
    phases: Vec<f64>,
    hamiltonian: CMat,
    cache: RefCell<HashMap<u64, CMat>>,
}

impl ExcitationGreen {
    pub fn new(phases: &[f64]) -> Self {
        let n = phases.len();
        let hamiltonian = CMat::from_fn(n, n, |i, j| -I * cis((phases[i] - phases[j]).abs()));
        ExcitationGreen { phases: phases.to_vec(), hamiltonian, cache: RefCell::new(HashMap::new()) }
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// Non-Hermitian single-excitation Hamiltonian.
    pub fn hamiltonian(&self) -> &CMat {
        &self.hamiltonian
    }

    pub fn at(&self, omega: f64) -> Result<CMat> {
        if let Some(g) = self.cache.borrow().get(&omega.to_bits()) {
            return Ok(g.clone());
        }
        let n = self.len();
        let m = CMat::from_fn(n, n, |i, j| if i == j { c64::new(omega, 0.0) } else { linalg::ZERO })
            - &self.hamiltonian;
        let g = linalg::inverse(&m)?;
        let mut cache = self.cache.borrow_mut();
        if cache.len() > 4096 {
            cache.clear();
        }
        cache.insert(omega.to_bits(), g.clone());
        Ok(g)
    }

    /// Emission amplitudes `sᵢ^σ(ω) = Σⱼ Gᵢⱼ(ω) e^{−iσφⱼ}`.
    pub fn emission(&self, omega: f64, dir: Direction) -> Result<Vec<c64>> {
        let g = self.at(omega)?;
        let n = self.len();
        Ok((0..n)
            .map(|i| (0..n).map(|j| g[(i, j)] * cis(-dir.sign() * self.phases[j])).sum())
            .collect())
    }

    /// Single-photon coefficient `t_{σ'σ}(ω) = δ − i Σᵢⱼ Gᵢⱼ e^{i(σφⱼ − σ'φᵢ)}`.
    pub fn transmission(&self, out: Direction, inc: Direction, omega: f64) -> Result<c64> {
        let g = self.at(omega)?;
        let n = self.len();
        let mut acc = linalg::ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += g[(i, j)] * cis(inc.sign() * self.phases[j] - out.sign() * self.phases[i]);
            }
        }
        let delta = if out == inc { linalg::ONE } else { linalg::ZERO };
        Ok(delta - I * acc)
    }
}

impl Clone for ExcitationGreen {
    fn clone(&self) -> Self {
        ExcitationGreen {
            phases: self.phases.clone(),
            hamiltonian: self.hamiltonian.clone(),
            cache: RefCell::new(HashMap::new()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_single_qubit() {
        let g = ExcitationGreen::new(&[0.0, 0.7, 2.1]);
        let w = 0.3;
        let m = g.at(w).unwrap();
        let back = &m * (CMat::from_fn(3, 3, |i, j| if i == j { c64::new(w, 0.0) } else { linalg::ZERO }) - g.hamiltonian());
        assert!(linalg::max_abs_diff(&back, &linalg::identity(3)) < 1e-12);
        let one = ExcitationGreen::new(&[0.0]);
        let s = one.emission(0.4, Direction::Forward).unwrap()[0];
        assert!((s - 1.0 / c64::new(0.4, 1.0)).norm() < 1e-15);
        // a single qubit reflects fully on resonance
        let r = one.transmission(Direction::Backward, Direction::Forward, 0.0).unwrap();
        assert!((r + 1.0).norm() < 1e-15);
    }
}
