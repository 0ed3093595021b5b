//! Emission and entanglement observables of the exact master-equation solution.
//!
//! The emitted field in direction `σ` is generated by the collective emitter
//! `B_σ = Σₙ B_{n,σ} e^{−iσφₙ}`; all field correlators reduce to qubit correlators of these
//! operators evaluated with the quantum regression theorem on the steady state reached from
//! the ground state.

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMat, I, ONE, ZERO};
use crate::lindblad::{self, DensityMatrix, Regression};
use crate::quadrature::GaussLegendre;
use crate::system::{self, Direction, OperatorSet, Superoperator, SystemSpec};

/// Direction-resolved collective emitters `[B₊, B₋]`.
pub fn collective_emitters(spec: &SystemSpec) -> Result<[CMat; 2]> {
    let ops = OperatorSet::build(spec)?;
    Ok(emitters_from(spec, &ops))
}

fn emitters_from(spec: &SystemSpec, ops: &OperatorSet) -> [CMat; 2] {
    Direction::BOTH.map(|dir| {
        let d = ops.dim();
        let mut out = linalg::zeros(d, d);
        for (n, &phi) in spec.phases().iter().enumerate() {
            out += linalg::scale(ops.jump(dir, n), linalg::cis(-dir.sign() * phi));
        }
        out
    })
}

/// One-photon directional matrix `J⁽¹⁾_{σσ'} = Tr(B_{σ'}†B_σ ρ)` and its normalized copy.
#[derive(Debug, Clone)]
pub struct DirectionalMatrix1 {
    pub j: CMat,
    pub rho: CMat,
}

impl DirectionalMatrix1 {
    /// `Tr σ_z ρ⁽¹⁾`
    pub fn directivity(&self) -> f64 {
        (self.rho[(0, 0)] - self.rho[(1, 1)]).re
    }

    pub fn total_rate(&self) -> f64 {
        linalg::trace(&self.j).re
    }
}

/// Time-averaged two-photon directional matrix over pairs `(++, +−, −+, −−)`.
#[derive(Debug, Clone)]
pub struct DirectionalMatrix2 {
    pub j: CMat,
    pub rho: DensityMatrix,
    /// Upper bound on the truncated tail of the time integral.
    pub tail_bound: f64,
    /// Set when the pair amplitude has a non-decaying component; `rho` is then its
    /// long-time average.
    pub persistent: bool,
}

/// Field squeezing at the central frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingReport {
    pub xi_plus: f64,
    pub xi_minus: f64,
    pub xi_even: f64,
    pub xi_odd: f64,
    /// Optimal quadrature angles in the order `(+, −, even, odd)`, in `[0, π)`.
    pub theta: [f64; 4],
}

/// Quadrature settings for the pair-amplitude time integral.
#[derive(Debug, Clone, Copy)]
pub struct PairIntegration {
    /// Upper integration limit; defaults to `20 / gap`.
    pub tau_max: Option<f64>,
    /// Gauss–Legendre nodes per panel.
    pub order: usize,
    /// Largest tolerated ratio of tail bound to `Tr J⁽²⁾`.
    pub tail_tolerance: f64,
}

impl Default for PairIntegration {
    fn default() -> Self {
        PairIntegration { tau_max: None, order: 16, tail_tolerance: 1e-6 }
    }
}

/// Pair amplitude `ψ_{σ₁σ₂}(τ)` sampled on a grid, indexed `values[σ₁][σ₂][k]`.
#[derive(Debug, Clone)]
pub struct PairWavefunction {
    pub tau: Vec<f64>,
    pub values: [[Vec<c64>; 2]; 2],
}

/// Steady state of an array together with everything needed for its emission statistics.
#[derive(Debug, Clone)]
pub struct EmissionModel {
    spec: SystemSpec,
    ops: OperatorSet,
    regression: Regression,
    rho: DensityMatrix,
    emitters: [CMat; 2],
}

impl EmissionModel {
    /// Steady state reached from all qubits in the ground state.
    pub fn new(spec: &SystemSpec) -> Result<Self> {
        let ops = OperatorSet::build(spec)?;
        let d = ops.dim();
        Self::build(spec, ops, &DensityMatrix::ground(d))
    }

    pub fn from_initial(spec: &SystemSpec, rho0: &DensityMatrix) -> Result<Self> {
        let ops = OperatorSet::build(spec)?;
        Self::build(spec, ops, rho0)
    }

    fn build(spec: &SystemSpec, ops: OperatorSet, rho0: &DensityMatrix) -> Result<Self> {
        let l = system::liouvillian_from(spec, &ops);
        let regression = Regression::new(&l)?;
        let rho = lindblad::project_state(regression.kernel(), ops.dim(), rho0)?;
        let emitters = emitters_from(spec, &ops);
        Ok(EmissionModel { spec: spec.clone(), ops, regression, rho, emitters })
    }

    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    pub fn operators(&self) -> &OperatorSet {
        &self.ops
    }

    pub fn liouvillian(&self) -> &Superoperator {
        self.regression.liouvillian()
    }

    pub fn regression(&self) -> &Regression {
        &self.regression
    }

    pub fn steady_state(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn emitter(&self, dir: Direction) -> &CMat {
        &self.emitters[dir.index()]
    }

    /// Excited-state population of each qubit.
    pub fn filling(&self) -> Vec<f64> {
        self.ops
            .lowering
            .iter()
            .map(|b| self.rho.expectation(&(linalg::dagger(b) * b)).re)
            .collect()
    }

    /// Photon emission rate `W_σ = Tr(B_σ†B_σ ρ)`.
    pub fn rate(&self, dir: Direction) -> f64 {
        let b = self.emitter(dir);
        self.rho.expectation(&(linalg::dagger(b) * b)).re
    }

    /// `I_σ(ν) = 2 Re Tr{B_σ†(iν − L)⁻¹[B_σ ρ]}` with the stationary part of `B_σρ` removed.
    pub fn spectrum(&self, dir: Direction, nu: f64) -> Result<f64> {
        let b = self.emitter(dir);
        let x = b * self.rho.matrix();
        Ok(2.0 * self.regression.resolve(&linalg::dagger(b), &x, I * nu)?.re)
    }

    /// Normalized intensity correlation `g⁽²⁾_σ(t)`.
    pub fn g2(&self, dir: Direction, t: f64) -> Result<f64> {
        let b = self.emitter(dir);
        let bd = linalg::dagger(b);
        let w = self.rate(dir);
        if w <= 1e-300 {
            return Err(Error::Undefined("g2 of a direction without emission".into()));
        }
        let x = b * self.rho.matrix() * &bd;
        Ok(self.regression.correlate(&(&bd * b), &x, t.abs())?.re / (w * w))
    }

    pub fn directional_matrix1(&self) -> Result<DirectionalMatrix1> {
        let j = CMat::from_fn(2, 2, |s, sp| {
            let a = &self.emitters[s];
            let b = &self.emitters[sp];
            self.rho.expectation(&(linalg::dagger(b) * a))
        });
        let tr = linalg::trace(&j).re;
        if tr <= 1e-14 {
            return Err(Error::Undefined(format!("directivity with total emission rate {tr:e}")));
        }
        let rho = linalg::scale(&j, linalg::re(1.0 / tr));
        Ok(DirectionalMatrix1 { j, rho })
    }

    /// `B_σ'ρ − Tr(B_σ'ρ)ρ` for both directions.
    fn pair_sources(&self) -> [CMat; 2] {
        self.emitters.clone().map(|b| {
            let x = &b * self.rho.matrix();
            let coherent = linalg::trace(&x);
            x - linalg::scale(self.rho.matrix(), coherent)
        })
    }

    /// `ψ̃_{σσ'}(τ) = −Tr{B_σ e^{Lτ}[B_σ'ρ]}` for `τ ≥ 0`, coherent part removed.
    fn pair_amplitudes_at(&self, sources: &[CMat; 2], tau: f64) -> Result<[[c64; 2]; 2]> {
        let mut out = [[ZERO; 2]; 2];
        for (sp, x) in sources.iter().enumerate() {
            let y = self.regression.propagator().propagate(&linalg::vectorize(x), tau)?;
            let y = linalg::unvectorize(&y, self.ops.dim());
            for (s, b) in self.emitters.iter().enumerate() {
                out[s][sp] = -linalg::trace_prod(b, &y);
            }
        }
        Ok(out)
    }

    /// `ψ_{σσ'}(τ)` for either sign of `τ`.
    pub fn pair_amplitude(&self, s: Direction, sp: Direction, tau: f64) -> Result<c64> {
        let sources = self.pair_sources();
        let a = self.pair_amplitudes_at(&sources, tau.abs())?;
        Ok(if tau >= 0.0 { a[s.index()][sp.index()] } else { a[sp.index()][s.index()] })
    }

    pub fn pair_wavefunction(&self, tau: &[f64]) -> Result<PairWavefunction> {
        let sources = self.pair_sources();
        let mut values: [[Vec<c64>; 2]; 2] = Default::default();
        for &t in tau {
            let a = self.pair_amplitudes_at(&sources, t.abs())?;
            for s in 0..2 {
                for sp in 0..2 {
                    values[s][sp].push(if t >= 0.0 { a[s][sp] } else { a[sp][s] });
                }
            }
        }
        Ok(PairWavefunction { tau: tau.to_vec(), values })
    }

    /// Stationary (non-decaying) component of `ψ̃` and the decaying sources.
    fn split_sources(&self) -> ([CMat; 2], [[c64; 2]; 2]) {
        let sources = self.pair_sources();
        let mut persistent = [[ZERO; 2]; 2];
        let decaying = [0, 1].map(|sp| {
            let v = linalg::vectorize(&sources[sp]);
            let p = linalg::unvectorize(&self.regression.kernel().project(&v), self.ops.dim());
            for s in 0..2 {
                persistent[s][sp] = -linalg::trace_prod(&self.emitters[s], &p);
            }
            &sources[sp] - p
        });
        (decaying, persistent)
    }

    /// Eigenvalues of the Liouvillian outside its kernel.
    fn decay_spectrum(&self) -> Result<Vec<c64>> {
        let vals = match self.regression.propagator() {
            lindblad::Propagator::Spectral(s) => s.eigenvalues.clone(),
            lindblad::Propagator::Exponential(m) => linalg::eigen(m)?.0,
        };
        let scale = vals.iter().map(|z| z.norm()).fold(0.0, f64::max);
        Ok(vals.into_iter().filter(|z| z.norm() >= lindblad::KERNEL_REL_TOL * scale).collect())
    }

    /// Time-averaged two-photon directional matrix.
    pub fn directional_matrix2(&self, opts: &PairIntegration) -> Result<DirectionalMatrix2> {
        let (decaying, persistent) = self.split_sources();
        let flat = |a: &[[c64; 2]; 2]| [a[0][0], a[0][1], a[1][0], a[1][1]];
        let scale = self.rate(Direction::Forward) + self.rate(Direction::Backward);
        let p = flat(&persistent);
        let p_norm = p.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if p_norm > 1e-8 * scale.max(1e-300) {
            let j = CMat::from_fn(4, 4, |a, b| p[a] * p[b].conj());
            let rho = DensityMatrix::new(linalg::scale(&j, linalg::re(1.0 / (p_norm * p_norm))))?;
            return Ok(DirectionalMatrix2 { j, rho, tail_bound: 0.0, persistent: true });
        }

        let spectrum = self.decay_spectrum()?;
        let gap = spectrum.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min);
        if !(gap > 0.0) || !gap.is_finite() {
            return Err(Error::Undefined("Liouvillian gap is zero".into()));
        }
        let fastest = spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tau_max = opts.tau_max.unwrap_or(20.0 / gap);
        let gl = GaussLegendre::new(opts.order.max(2));

        let mut j = linalg::zeros(4, 4);
        let mut t0 = 0.0;
        let mut width = 0.25 / fastest;
        while t0 < tau_max {
            // modes still alive at t0 limit the panel width
            let (mut max_im, mut max_re) = (0.0f64, 0.0f64);
            for z in &spectrum {
                if z.re * t0 > -40.0 {
                    max_im = max_im.max(z.im.abs());
                    max_re = max_re.max(z.re.abs());
                }
            }
            let mut w = width;
            if max_im > 0.0 {
                w = w.min(std::f64::consts::PI / max_im);
            }
            if max_re > 0.0 {
                w = w.min(8.0 / max_re);
            }
            let t1 = (t0 + w).min(tau_max);
            for (x, wt) in gl.nodes.iter().zip(&gl.weights) {
                let tau = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * x;
                let a = flat(&self.amplitudes_from(&decaying, tau)?);
                let f = wt * 0.5 * (t1 - t0);
                for r in 0..4 {
                    for c in 0..4 {
                        j[(r, c)] += a[r] * a[c].conj() * f;
                    }
                }
            }
            t0 = t1;
            width *= 1.3;
        }

        let tail_bound = self.tail_bound(&decaying, tau_max, gap)?;
        let tr = linalg::trace(&j).re;
        if !(tr > 0.0) {
            return Err(Error::Undefined("no photon pairs are emitted".into()));
        }
        if tail_bound > opts.tail_tolerance * tr {
            return Err(Error::NotConverged { bound: tail_bound / tr });
        }
        let j = linalg::hermitian_part(&j);
        let rho = DensityMatrix::new(linalg::scale(&j, linalg::re(1.0 / tr)))?;
        Ok(DirectionalMatrix2 { j, rho, tail_bound, persistent: false })
    }

    fn amplitudes_from(&self, sources: &[CMat; 2], tau: f64) -> Result<[[c64; 2]; 2]> {
        self.pair_amplitudes_at(sources, tau)
    }

    /// `Σ_{σσ'} (‖B_σ‖ ‖e^{Lτ}x_σ'‖)² / (2·gap)` at the truncation point.
    fn tail_bound(&self, sources: &[CMat; 2], tau: f64, gap: f64) -> Result<f64> {
        let mut acc = 0.0;
        for x in sources {
            let y = self.regression.propagator().propagate(&linalg::vectorize(x), tau)?;
            for b in &self.emitters {
                let m = b.norm_l2() * y.norm_l2();
                acc += m * m;
            }
        }
        Ok(acc / (2.0 * gap))
    }

    /// Quadrature squeezing at the central frequency for both directions and both parities.
    pub fn squeezing(&self) -> Result<SqueezingReport> {
        let rho = self.rho.matrix();
        let mut f = [[ZERO; 2]; 2];
        let mut psi = [[ZERO; 2]; 2];
        for s in 0..2 {
            for sp in 0..2 {
                let x = &self.emitters[sp] * rho;
                // Tr{B_σ†(−L)⁻¹[B_σ'ρ]} and Tr{B_σ L⁻¹[B_σ'ρ]}
                f[s][sp] = self.regression.resolve(&linalg::dagger(&self.emitters[s]), &x, ZERO)?;
                psi[s][sp] = -self.regression.resolve(&self.emitters[s], &x, ZERO)?;
            }
        }
        let angle = |z: c64| (0.5 * (z.arg() - std::f64::consts::PI)).rem_euclid(std::f64::consts::PI);
        let single = |s: usize| {
            let p = psi[s][s] * 2.0;
            (1.0 + 4.0 * f[s][s].re - 2.0 * p.norm(), angle(p))
        };
        let mode = |odd: bool| {
            let mut fs = ZERO;
            let mut ps = ZERO;
            for s in 0..2 {
                for sp in 0..2 {
                    let w = if odd && s != sp { -1.0 } else { 1.0 };
                    fs += f[s][sp] * w;
                    ps += psi[s][sp] * w;
                }
            }
            (1.0 + 2.0 * fs.re - 2.0 * ps.norm(), angle(ps))
        };
        let (xi_plus, t0) = single(0);
        let (xi_minus, t1) = single(1);
        let (xi_even, t2) = mode(false);
        let (xi_odd, t3) = mode(true);
        Ok(SqueezingReport { xi_plus, xi_minus, xi_even, xi_odd, theta: [t0, t1, t2, t3] })
    }
}

/// Emission spectra `[I₊(ν), I₋(ν)]` on a frequency grid measured from half the modulation
/// frequency.
pub fn emission_spectrum(spec: &SystemSpec, nu_grid: &[f64]) -> Result<[Vec<f64>; 2]> {
    let model = EmissionModel::new(spec)?;
    let mut out = [Vec::with_capacity(nu_grid.len()), Vec::with_capacity(nu_grid.len())];
    for &nu in nu_grid {
        for dir in Direction::BOTH {
            out[dir.index()].push(model.spectrum(dir, nu)?);
        }
    }
    Ok(out)
}

/// One-photon directional matrix and directivity `D_z`.
pub fn directivity(spec: &SystemSpec) -> Result<(DirectionalMatrix1, f64)> {
    let m = EmissionModel::new(spec)?.directional_matrix1()?;
    let dz = m.directivity();
    Ok((m, dz))
}

pub fn two_photon_wavefunction(spec: &SystemSpec, tau_grid: &[f64]) -> Result<PairWavefunction> {
    EmissionModel::new(spec)?.pair_wavefunction(tau_grid)
}

/// Two-photon directional matrix and its concurrence `C_D`.
pub fn directional_concurrence(
    spec: &SystemSpec,
    opts: &PairIntegration,
) -> Result<(DirectionalMatrix2, f64)> {
    let m = EmissionModel::new(spec)?.directional_matrix2(opts)?;
    let c = wootters_concurrence(&m.rho)?;
    Ok((m, c))
}

pub fn squeezing(spec: &SystemSpec) -> Result<SqueezingReport> {
    EmissionModel::new(spec)?.squeezing()
}

/// Wootters concurrence of a two-qubit state.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(format!("two-qubit state expected, got dimension {}", rho.dim())));
    }
    let m = rho.matrix();
    // σ_y ⊗ σ_y
    let yy = CMat::from_fn(4, 4, |i, j| match (i, j) {
        (0, 3) | (3, 0) => -ONE,
        (1, 2) | (2, 1) => ONE,
        _ => ZERO,
    });
    let tilde = &yy * linalg::conj(m) * &yy;
    let s = linalg::psd_sqrt(m)?;
    let r = &s * tilde * &s;
    let mut lam: Vec<f64> = linalg::hermitian_eigenvalues(&r)?.iter().map(|x| x.max(0.0).sqrt()).collect();
    lam.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::MotionSpec;
    use std::f64::consts::PI;

    fn perp(v: f64, delta: f64) -> EmissionModel {
        EmissionModel::new(&SystemSpec::single(MotionSpec::perpendicular(v), delta).unwrap()).unwrap()
    }

    #[test]
    fn single_emitter_matches_jump_operator() {
        let spec = SystemSpec::single(MotionSpec::parallel(0.2), 0.0).unwrap();
        let ops = OperatorSet::build(&spec).unwrap();
        let [bp, bm] = collective_emitters(&spec).unwrap();
        assert!(linalg::max_abs_diff(&bp, ops.jump(Direction::Forward, 0)) < 1e-15);
        assert!(linalg::max_abs_diff(&bm, ops.jump(Direction::Backward, 0)) < 1e-15);
    }

    #[test]
    fn quarter_wave_pair_is_not_mirror_symmetric() {
        let spec = SystemSpec::periodic(2, PI / 2.0, 0.0, MotionSpec::perpendicular(0.3)).unwrap();
        let [bp, bm] = collective_emitters(&spec).unwrap();
        assert!(linalg::max_abs_diff(&bp, &bm) > 0.1);
    }

    #[test]
    fn single_qubit_rate_and_g2() {
        let v: f64 = 0.5;
        let m = perp(v, 0.0);
        let w = 2.0 * v * v / (1.0 + v * v);
        assert!((m.rate(Direction::Forward) - w).abs() < 1e-12);
        let gv = 1.0 + v * v;
        for &t in &[0.0, 0.3, 1.1] {
            let g = 1.0 + (1.0 - v * v).powi(2) / (4.0 * v * v) * (-2.0 * gv * t).exp();
            assert!((m.g2(Direction::Backward, t).unwrap() - g).abs() < 1e-9 * g);
        }
    }

    #[test]
    fn vacuum_emits_nothing() {
        let m = perp(0.0, 0.3);
        assert!(m.spectrum(Direction::Forward, 0.4).unwrap().abs() < 1e-15);
        let psi = m.pair_wavefunction(&[-1.0, 0.0, 1.0]).unwrap();
        assert!(psi.values.iter().flatten().flatten().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn perpendicular_squeezing_formula() {
        for &v in &[0.22, 0.5, 3.0] {
            let r = perp(v, 0.0).squeezing().unwrap();
            let xi = 1.0 - 4.0 * v * (1.0 - v) * (1.0 - v) / ((1.0 + v * v) * (1.0 + v) * (1.0 + v));
            assert!((r.xi_plus - xi).abs() < 1e-10);
            assert!((r.xi_even - (2.0 * xi - 1.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn wootters_reference_states() {
        let h = 1.0 / 2f64.sqrt();
        let bell = DensityMatrix::pure(&[linalg::re(h), ZERO, ZERO, linalg::re(h)]).unwrap();
        assert!((wootters_concurrence(&bell).unwrap() - 1.0).abs() < 1e-12);
        let product = DensityMatrix::ground(4);
        assert!(wootters_concurrence(&product).unwrap().abs() < 1e-12);
        let mixed = CMat::from_fn(4, 4, |i, j| if i == j { linalg::re(0.25) } else { ZERO });
        assert!(wootters_concurrence(&DensityMatrix::new(mixed).unwrap()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn pair_integral_matches_mode_sum() {
        let spec = SystemSpec::phase_delayed(2, 0.4, 0.2, crate::system::MotionKind::Perpendicular, 0.6, 0.7)
            .unwrap();
        let m = EmissionModel::new(&spec).unwrap();
        let j = m.directional_matrix2(&PairIntegration::default()).unwrap().j;
        // closed form Σ aᵢ aⱼ* / −(λᵢ + λⱼ*) from the eigenmodes
        let lindblad::Propagator::Spectral(sd) = m.regression().propagator() else { panic!() };
        let (decaying, _) = m.split_sources();
        let coef: Vec<Vec<c64>> = (0..4)
            .map(|k| {
                let (s, sp) = (k / 2, k % 2);
                let c = sd.coefficients(&linalg::vectorize(&decaying[sp]));
                (0..sd.len())
                    .map(|i| {
                        let r = linalg::unvectorize(&sd.right_modes.col(i).as_mat().to_owned(), 4);
                        -linalg::trace_prod(&m.emitters[s], &r) * c[(i, 0)]
                    })
                    .collect()
            })
            .collect();
        for a in 0..4 {
            for b in 0..4 {
                let mut exact = ZERO;
                for i in 0..sd.len() {
                    for k in 0..sd.len() {
                        let den = -(sd.eigenvalues[i] + sd.eigenvalues[k].conj());
                        if den.norm() > 1e-9 {
                            exact += coef[a][i] * coef[b][k].conj() / den;
                        }
                    }
                }
                assert!((j[(a, b)] - exact).norm() < 1e-9, "{a}{b}: {} vs {}", j[(a, b)], exact);
            }
        }
    }
}
