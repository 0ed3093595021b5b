//! Co-located qubits with equal real amplitude: dynamics restricted to the symmetric
//! (maximal total spin) sector, `|m = −N/2 … +N/2⟩`, index = number of excitations.

use crate::error::{Error, Result};
use crate::lindblad::{DensityMatrix, KernelProjector};
use crate::linalg::{self, c64, re, CMat, I, ONE, ZERO};
use crate::system::Superoperator;

/// Purity above which a symmetric state counts as pure for [`bipartite_concurrence_cb`].
pub const PURE_STATE_TOL: f64 = 1e-8;

/// Spin operators of the symmetric sector for `N` qubits.
#[derive(Debug, Clone)]
pub struct DickeOperators {
    n_qubits: usize,
    pub sx: CMat,
    pub sy: CMat,
    pub sz: CMat,
    /// `S₊`, raising the excitation number.
    pub raising: CMat,
    /// `S₋ = Σₙ bₙ`.
    pub lowering: CMat,
}

impl DickeOperators {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidSpec("at least one qubit is required".into()));
        }
        let d = n_qubits + 1;
        let half = n_qubits as f64 / 2.0;
        let raising = CMat::from_fn(d, d, |i, j| {
            if i == j + 1 {
                re((((n_qubits - j) * (j + 1)) as f64).sqrt())
            } else {
                ZERO
            }
        });
        let lowering = linalg::dagger(&raising);
        let sx = linalg::scale(&(&raising + &lowering), re(0.5));
        let sy = linalg::scale(&(&raising - &lowering), c64::new(0.0, -0.5));
        let sz = CMat::from_fn(d, d, |i, j| if i == j { re(i as f64 - half) } else { ZERO });
        Ok(DickeOperators { n_qubits, sx, sy, sz, raising, lowering })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.n_qubits + 1
    }

    /// Collective jump `S_v = S₋ + v S₊`.
    pub fn jump(&self, v: f64) -> CMat {
        &self.lowering + linalg::scale(&self.raising, re(v))
    }
}

/// `dρ/dt = iΔ[S_z, ρ] − (ρ S_v†S_v + S_v†S_v ρ − 2 S_v ρ S_v†)`.
pub fn build_collective_liouvillian(n_qubits: usize, v: f64, delta: f64) -> Result<Superoperator> {
    let ops = DickeOperators::new(n_qubits)?;
    Ok(liouvillian(&ops, v, delta))
}

fn liouvillian(ops: &DickeOperators, v: f64, delta: f64) -> Superoperator {
    let s = ops.jump(v);
    let sd = linalg::dagger(&s);
    // H_eff = −Δ S_z − i S_v†S_v
    let h = linalg::scale(&ops.sz, re(-delta)) - linalg::scale(&(&sd * &s), I);
    Superoperator::from_parts(&h, &[(re(2.0), &s, &sd)])
}

/// Steady state reached from `|m = −N/2⟩`.
///
/// Even `N` at `Δ = 0` gives the pure kernel vector of `S_v`. At `Δ = 0, |v| = 1` the jump is
/// Hermitian up to a phase and the dynamics only dephase in its eigenbasis, so the limit is the
/// dephased initial state. Everything else is the (unique) kernel of the Liouvillian.
pub fn collective_steady_state(n_qubits: usize, v: f64, delta: f64) -> Result<DensityMatrix> {
    if !v.is_finite() || !delta.is_finite() {
        return Err(Error::InvalidSpec(format!("non-finite v = {v} or Δ = {delta}")));
    }
    let ops = DickeOperators::new(n_qubits)?;
    let d = ops.dim();
    if delta == 0.0 && n_qubits % 2 == 0 {
        let (kernel, _) = linalg::null_spaces(&ops.jump(v), 1e-10)?;
        if kernel.ncols() == 1 {
            let state: Vec<c64> = (0..d).map(|i| kernel[(i, 0)]).collect();
            return DensityMatrix::pure(&state);
        }
    }
    if delta == 0.0 && (v.abs() - 1.0).abs() < 1e-14 {
        return dephased_ground(&ops, v);
    }
    let l = liouvillian(&ops, v, delta);
    unique_kernel(&l).or_else(|_| {
        let p = KernelProjector::new(&l)?;
        crate::lindblad::project_state(&p, d, &DensityMatrix::ground(d))
    })
}

fn dephased_ground(ops: &DickeOperators, v: f64) -> Result<DensityMatrix> {
    // S_v = 2S_x for v = 1 and −2iS_y for v = −1
    let generator = if v > 0.0 { &ops.sx } else { &ops.sy };
    let (_, basis) = linalg::hermitian_eigen(generator)?;
    let d = ops.dim();
    let mut rho = linalg::zeros(d, d);
    for k in 0..d {
        let w = basis[(0, k)].norm_sqr();
        for i in 0..d {
            for j in 0..d {
                rho[(i, j)] += basis[(i, k)] * basis[(j, k)].conj() * w;
            }
        }
    }
    DensityMatrix::normalized(&rho)
}

/// Solves `Lρ = 0` with one equation replaced by `Tr ρ = 1`.
fn unique_kernel(l: &Superoperator) -> Result<DensityMatrix> {
    let d = l.hilbert_dim();
    let n = d * d;
    let mut m = l.matrix().clone();
    let mut rhs = linalg::zeros(n, 1);
    for j in 0..n {
        m[(0, j)] = if j % (d + 1) == 0 { ONE } else { ZERO };
    }
    rhs[(0, 0)] = ONE;
    let x = linalg::solve(&m, &rhs)?;
    let residual = (l.matrix() * &x).norm_l2();
    if !(residual < 1e-9) {
        return Err(Error::SingularSolve(format!("stationary residual {residual:e}")));
    }
    DensityMatrix::normalized(&linalg::unvectorize(&x, d))
}

/// `(S_v†S_v)⁻¹` normalized to unit trace; the odd-`N`, `Δ = 0` steady state.
pub fn inverse_jump_state(n_qubits: usize, v: f64) -> Result<DensityMatrix> {
    let ops = DickeOperators::new(n_qubits)?;
    let s = ops.jump(v);
    let inv = linalg::inverse(&(linalg::dagger(&s) * &s))?;
    DensityMatrix::normalized(&inv)
}

/// Mean excitation per qubit, `(⟨S_z⟩ + N/2)/N`.
pub fn filling(rho: &DensityMatrix) -> Result<f64> {
    let ops = dicke_for(rho)?;
    Ok((rho.expectation(&ops.sz).re + ops.n_qubits as f64 / 2.0) / ops.n_qubits as f64)
}

fn dicke_for(rho: &DensityMatrix) -> Result<DickeOperators> {
    if rho.dim() < 2 {
        return Err(Error::DimensionMismatch("symmetric-sector state needs dimension ≥ 2".into()));
    }
    DickeOperators::new(rho.dim() - 1)
}

/// Filling of the pure even-`N` steady state at `Δ = 0` as a ratio of terminating
/// hypergeometric sums.
pub fn filling_analytic(n_qubits: usize, v: f64) -> Result<f64> {
    if n_qubits < 2 || n_qubits % 2 == 1 {
        return Err(Error::InvalidSpec(format!("closed-form filling needs even N ≥ 2, got {n_qubits}")));
    }
    let n = n_qubits as f64;
    let x = v * v;
    let num = hyp2f1_terminating(1.5, 1.0 - n / 2.0, (3.0 - n) / 2.0, x, n_qubits / 2 - 1);
    let den = hyp2f1_terminating(0.5, -n / 2.0, (1.0 - n) / 2.0, x, n_qubits / 2);
    Ok(x * num / ((n - 1.0) * den))
}

/// `₂F₁(a, b; c; x)` summed through `x^{last}`.
fn hyp2f1_terminating(a: f64, b: f64, c: f64, x: f64, last: usize) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..last {
        let k = k as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x;
        sum += term;
    }
    sum
}

/// Wineland parameter `ξ_R = √(N⟨S_x²⟩)/|⟨S_z⟩|`.
pub fn spin_squeezing_xi_r(rho: &DensityMatrix) -> Result<f64> {
    let ops = dicke_for(rho)?;
    let sz = rho.expectation(&ops.sz).re;
    if sz.abs() < 1e-12 {
        return Err(Error::Undefined(format!("⟨S_z⟩ = {sz:e} leaves ξ_R undefined")));
    }
    let sx2 = rho.expectation(&(&ops.sx * &ops.sx)).re;
    Ok((ops.n_qubits as f64 * sx2).sqrt() / sz.abs())
}

/// One-qubit-versus-rest concurrence `√(2(1 − Tr ρ₁²))` of a pure symmetric state.
pub fn bipartite_concurrence_cb(rho: &DensityMatrix) -> Result<f64> {
    let ops = dicke_for(rho)?;
    let purity = rho.purity();
    if purity < 1.0 - PURE_STATE_TOL {
        return Err(Error::NotApplicable(format!("state is mixed (purity {purity})")));
    }
    let n = ops.n_qubits as f64;
    let r2: f64 = [&ops.sx, &ops.sy, &ops.sz]
        .iter()
        .map(|s| (2.0 * rho.expectation(s).re / n).powi(2))
        .sum();
    // Tr ρ₁² = (1 + |r|²)/2
    Ok((1.0 - r2).max(0.0).sqrt())
}

/// Holstein–Primakoff filling `v²/((1 − v²)N)` for `|v| < 1`.
pub fn hp_filling(n_qubits: usize, v: f64) -> f64 {
    v * v / ((1.0 - v * v) * n_qubits as f64)
}

/// Holstein–Primakoff asymptotic decay rate `(1 − v²)N`.
pub fn hp_decay_rate(n_qubits: usize, v: f64) -> f64 {
    (1.0 - v * v) * n_qubits as f64
}

/// Large-`N` limit `√|(1 − v)/(1 + v)|` of the squeezing parameter.
pub fn xi_r_limit(v: f64) -> f64 {
    ((1.0 - v) / (1.0 + v)).abs().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_algebra() {
        let ops = DickeOperators::new(5).unwrap();
        let c = linalg::commutator(&ops.sx, &ops.sy);
        assert!(linalg::max_abs_diff(&c, &linalg::scale(&ops.sz, I)) < 1e-12);
        let c = linalg::commutator(&ops.sy, &ops.sz);
        assert!(linalg::max_abs_diff(&c, &linalg::scale(&ops.sx, I)) < 1e-12);
        // S² = S(S+1) on the whole sector
        let s2 = &ops.sx * &ops.sx + &ops.sy * &ops.sy + &ops.sz * &ops.sz;
        assert!(linalg::max_abs_diff(&s2, &linalg::scale(&linalg::identity(6), re(2.5 * 3.5))) < 1e-12);
    }

    #[test]
    fn single_qubit_filling() {
        for v in [0.1, 0.5, 2.0] {
            let rho = collective_steady_state(1, v, 0.3).unwrap();
            assert!((filling(&rho).unwrap() - v * v / (1.0 + v * v)).abs() < 1e-12);
        }
    }

    #[test]
    fn vacuum_without_modulation() {
        let rho = collective_steady_state(4, 0.0, 0.2).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn even_closed_form_matches_state() {
        let v: f64 = 0.7;
        for n in [2usize, 4, 6] {
            let rho = collective_steady_state(n, v, 0.0).unwrap();
            let h = n / 2;
            let binom = |a: usize, b: usize| (0..b).fold(1.0, |acc, k| acc * (a - k) as f64 / (k + 1) as f64);
            let mut psi = vec![ZERO; n + 1];
            for k in 0..=h {
                psi[2 * k] = re((-v).powi(k as i32) * binom(h, k) / binom(n, 2 * k).sqrt());
            }
            let expect = DensityMatrix::pure(&psi).unwrap();
            assert!(linalg::max_abs_diff(rho.matrix(), expect.matrix()) < 1e-10);
            assert!((filling(&rho).unwrap() - filling_analytic(n, v).unwrap()).abs() < 1e-12);
        }
        assert!((filling_analytic(2, 0.5).unwrap() - 0.2).abs() < 1e-15);
        assert!(filling_analytic(3, 0.5).is_err());
    }

    #[test]
    fn odd_inverse_cross_check() {
        for n in [3usize, 5] {
            let a = collective_steady_state(n, 0.6, 0.0).unwrap();
            let b = inverse_jump_state(n, 0.6).unwrap();
            assert!(linalg::max_abs_diff(a.matrix(), b.matrix()) < 1e-9);
            assert!(a.purity() < 1.0 - 1e-3);
        }
    }

    #[test]
    fn half_filling_at_unit_amplitude() {
        for n in [3usize, 4] {
            for delta in [0.0, 0.1] {
                let rho = collective_steady_state(n, 1.0, delta).unwrap();
                assert!((filling(&rho).unwrap() - 0.5).abs() < 1e-9, "N={n} Δ={delta}");
            }
        }
    }

    #[test]
    fn squeezing_and_concurrence_references() {
        let ground = DensityMatrix::ground(9);
        assert!((spin_squeezing_xi_r(&ground).unwrap() - 1.0).abs() < 1e-12);
        assert!(bipartite_concurrence_cb(&ground).unwrap() < 1e-12);
        let rho = collective_steady_state(2, 0.5, 0.0).unwrap();
        assert!((bipartite_concurrence_cb(&rho).unwrap() - 0.8).abs() < 1e-12);
        let mixed = collective_steady_state(3, 0.5, 0.0).unwrap();
        assert!(matches!(bipartite_concurrence_cb(&mixed), Err(Error::NotApplicable(_))));
        assert!((xi_r_limit(1.0 / 3.0) - 0.5f64.sqrt()).abs() < 1e-15);
    }
}
