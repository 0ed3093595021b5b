//! Two-excitation problem on ordered pairs `|ij⟩ ↦ i·N + j` with hard-core qubits.
//!
//! The fictitious on-site repulsion `χ` is sent to infinity exactly. With `A = Ω − ℋ⁽²⁾`,
//! `P` the projector on doubly occupied sites `|ii⟩` and `Q = 1 − P`:
//! `(A − χP)⁻¹ → Q(QAQ)⁻¹Q`, `A(A − χP)⁻¹ → Q + PAQ(QAQ)⁻¹Q` and
//! `[χP(A − χP)⁻¹A]_PP → −A_PP + A_PQ(QAQ)⁻¹A_QP`.

use crate::error::{Error, Result};
use crate::linalg::{self, c64, cis, re, CMat, ZERO};

/// Above this condition number the hard-core pair block counts as singular: a lossless pair state
/// sits at the requested two-photon energy.
pub const MAX_PAIR_CONDITION: f64 = 1e13;

/// `sign(φₗ − φₘ) e^{i|φₗ − φₘ|}` (zero for co-located qubits).
pub fn odd_phase(phases: &[f64], l: usize, m: usize) -> c64 {
    let d = phases[l] - phases[m];
    if d == 0.0 {
        ZERO
    } else {
        cis(d.abs()) * d.signum()
    }
}

#[derive(Debug, Clone)]
pub struct TwoExcitationProblem {
    phases: Vec<f64>,
    h2: CMat,
    doubles: Vec<usize>,
    distinct: Vec<usize>,
}

/// Hard-core limits of the pair propagator at one total frequency.
#[derive(Debug, Clone)]
pub struct PairPropagator {
    /// `Q(QAQ)⁻¹Q`, `N² × N²`.
    pub resolvent: CMat,
    /// `Q + PAQ(QAQ)⁻¹Q`, `N² × N²`.
    pub vertex: CMat,
    /// `Kᵢⱼ = [U(A − U)⁻¹A]_{ii,jj}` in the limit, `N × N`.
    pub contact: CMat,
}

/// One eigenstate of the symmetric hard-core two-excitation problem.
#[derive(Debug, Clone)]
pub struct PairState {
    /// Complex energy, offset from twice the qubit frequency.
    pub energy: c64,
    /// Symmetric wavefunction with `Σ ψᵢⱼψᵢⱼ = 1` (no conjugation) and `ψᵢᵢ = 0`.
    pub psi: CMat,
    /// Motion couplings `αₙ = Σₘ ψₙₘ sign(φₙ − φₘ) e^{i|φₙ − φₘ|}`.
    pub alpha: Vec<c64>,
}

impl PairState {
    /// The same couplings with the direction sign dropped (perpendicular analogue).
    pub fn even_alpha(&self, phases: &[f64]) -> Vec<c64> {
        let n = phases.len();
        (0..n).map(|i| (0..n).map(|m| self.psi[(i, m)] * cis((phases[i] - phases[m]).abs())).sum()).collect()
    }
}

impl TwoExcitationProblem {
    pub fn new(phases: &[f64]) -> Self {
        let n = phases.len();
        let h = CMat::from_fn(n, n, |i, j| -linalg::I * cis((phases[i] - phases[j]).abs()));
        let h2 = CMat::from_fn(n * n, n * n, |r, c| {
            let (i, j) = (r / n, r % n);
            let (k, l) = (c / n, c % n);
            let mut x = ZERO;
            if j == l {
                x += h[(i, k)];
            }
            if i == k {
                x += h[(j, l)];
            }
            x
        });
        let doubles = (0..n).map(|i| i * n + i).collect();
        let distinct = (0..n * n).filter(|r| r / n != r % n).collect();
        TwoExcitationProblem { phases: phases.to_vec(), h2, doubles, distinct }
    }

    pub fn n_qubits(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// `ℋ⁽²⁾ = H ⊗ 1 + 1 ⊗ H` on ordered pairs.
    pub fn hamiltonian(&self) -> &CMat {
        &self.h2
    }

    fn shifted(&self, omega: f64) -> CMat {
        let d = self.h2.nrows();
        CMat::from_fn(d, d, |i, j| if i == j { re(omega) } else { ZERO }) - &self.h2
    }

    pub fn at(&self, omega: f64) -> Result<PairPropagator> {
        let n = self.n_qubits();
        let d = n * n;
        let a = self.shifted(omega);
        let q = &self.distinct;
        let p = &self.doubles;
        let t = if q.is_empty() {
            CMat::zeros(0, 0)
        } else {
            let block = CMat::from_fn(q.len(), q.len(), |i, j| a[(q[i], q[j])]);
            linalg::inverse_conditioned(&block, MAX_PAIR_CONDITION)
                .map_err(|e| Error::SingularSolve(format!("pair resolvent at Ω = {omega}: {e}")))?
        };
        let mut resolvent = linalg::zeros(d, d);
        for (x, &qi) in q.iter().enumerate() {
            for (y, &qj) in q.iter().enumerate() {
                resolvent[(qi, qj)] = t[(x, y)];
            }
        }
        // A_PQ T
        let apq = CMat::from_fn(p.len(), q.len(), |i, j| a[(p[i], q[j])]);
        let apq_t = &apq * &t;
        let mut vertex = linalg::zeros(d, d);
        for &qi in q {
            vertex[(qi, qi)] = linalg::ONE;
        }
        for (x, &pi) in p.iter().enumerate() {
            for (y, &qj) in q.iter().enumerate() {
                vertex[(pi, qj)] = apq_t[(x, y)];
            }
        }
        let aqp = CMat::from_fn(q.len(), p.len(), |i, j| a[(q[i], p[j])]);
        let coupled = &apq_t * &aqp;
        let contact = CMat::from_fn(n, n, |i, j| -a[(p[i], p[j])] + coupled[(i, j)]);
        Ok(PairPropagator { resolvent, vertex, contact })
    }

    /// The same three objects at finite `χ`, by direct inversion of `A − χP`.
    pub fn at_finite_chi(&self, omega: f64, chi: f64) -> Result<PairPropagator> {
        let n = self.n_qubits();
        let mut m = self.shifted(omega);
        let a = m.clone();
        for &pi in &self.doubles {
            m[(pi, pi)] -= re(chi);
        }
        let inv = linalg::inverse(&m)?;
        let vertex = &a * &inv;
        let inv_a = &inv * &a;
        let contact = CMat::from_fn(n, n, |i, j| inv_a[(self.doubles[i], self.doubles[j])] * chi);
        Ok(PairPropagator { resolvent: inv, vertex, contact })
    }

    /// Eigenstates of the symmetric hard-core sector, sorted by decreasing lifetime.
    pub fn eigenstates(&self) -> Result<Vec<PairState>> {
        let n = self.n_qubits();
        if n < 2 {
            return Ok(Vec::new());
        }
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let s = 0.5f64.sqrt();
        // columns (|ij⟩ + |ji⟩)/√2
        let v = CMat::from_fn(n * n, pairs.len(), |r, c| {
            let (i, j) = pairs[c];
            if r == i * n + j || r == j * n + i {
                re(s)
            } else {
                ZERO
            }
        });
        let h = v.transpose() * &self.h2 * &v;
        let (energies, vecs) = linalg::eigen(&h)?;
        let mut states = Vec::with_capacity(pairs.len());
        for (k, &energy) in energies.iter().enumerate() {
            let c = CMat::from_fn(pairs.len(), 1, |i, _| vecs[(i, k)]);
            let norm: c64 = (0..pairs.len()).map(|i| c[(i, 0)] * c[(i, 0)]).sum();
            if norm.norm() < 1e-10 {
                return Err(Error::EigenSolve(format!(
                    "self-orthogonal pair state at E = {energy}: spectrum is defective"
                )));
            }
            let c = linalg::scale(&c, norm.sqrt().inv());
            let flat = &v * &c;
            let psi = CMat::from_fn(n, n, |i, j| flat[(i * n + j, 0)]);
            let alpha = (0..n).map(|i| (0..n).map(|m| psi[(i, m)] * odd_phase(&self.phases, i, m)).sum()).collect();
            states.push(PairState { energy, psi, alpha });
        }
        states.sort_by(|a, b| a.energy.im.abs().total_cmp(&b.energy.im.abs()));
        Ok(states)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hard_core_limit_matches_large_chi() {
        let prob = TwoExcitationProblem::new(&[0.0, 0.9, 1.7]);
        let exact = prob.at(0.4).unwrap();
        let mut last = f64::INFINITY;
        for chi in [1e4, 1e6, 1e8] {
            let f = prob.at_finite_chi(0.4, chi).unwrap();
            let gap = linalg::max_abs_diff(&f.resolvent, &exact.resolvent)
                + linalg::max_abs_diff(&f.vertex, &exact.vertex)
                + linalg::max_abs_diff(&f.contact, &exact.contact);
            assert!(gap < last);
            last = gap;
        }
        assert!(last < 1e-6);
    }

    #[test]
    fn pair_states_are_symmetric_and_normalized() {
        let prob = TwoExcitationProblem::new(&[0.0, 0.3, 0.6, 0.9]);
        let states = prob.eigenstates().unwrap();
        assert_eq!(states.len(), 6);
        for s in &states {
            assert!(linalg::max_abs_diff(&s.psi, &linalg::transpose(&s.psi)) < 1e-12);
            let norm: c64 = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| s.psi[(i, j)] * s.psi[(i, j)]).sum();
            assert!((norm - 1.0).norm() < 1e-10);
            let sum: c64 = s.alpha.iter().sum();
            assert!(sum.norm() < 1e-9);
            assert!(s.energy.im <= 1e-12);
        }
    }
}
