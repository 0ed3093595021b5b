//! Time evolution, steady states and quantum-regression correlators of a Liouvillian.

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMat, I, ONE, ZERO};
use crate::system::Superoperator;

/// Tolerances used by [`DensityMatrix::new`].
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Relative threshold below which a singular value of the Liouvillian counts as zero.
pub const KERNEL_REL_TOL: f64 = 1e-8;

/// Eigenvector condition number above which propagation falls back to the matrix exponential.
pub const MAX_MODE_CONDITION: f64 = 1e8;

/// Hermitian, unit-trace, positive-semidefinite operator.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMat,
}

impl DensityMatrix {
    /// Validates all invariants.
    pub fn new(matrix: CMat) -> Result<Self> {
        let d = matrix.nrows();
        if matrix.ncols() != d || d == 0 {
            return Err(Error::InvalidState(format!("{}x{} is not square", d, matrix.ncols())));
        }
        let herm = linalg::max_abs_diff(&matrix, &linalg::dagger(&matrix));
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = linalg::trace(&matrix);
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = linalg::hermitian_eigenvalues(&matrix)?.first().copied().unwrap_or(0.0);
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(DensityMatrix { matrix })
    }

    /// Hermitian part of `matrix` divided by its trace, without the positivity check.
    pub fn normalized(matrix: &CMat) -> Result<Self> {
        let h = linalg::hermitian_part(matrix);
        let tr = linalg::trace(&h).re;
        if !(tr.abs() > 1e-300) || !tr.is_finite() {
            return Err(Error::InvalidState(format!("cannot normalize operator with trace {tr}")));
        }
        Ok(DensityMatrix { matrix: linalg::scale(&h, linalg::re(1.0 / tr)) })
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) state vector.
    pub fn pure(state: &[c64]) -> Result<Self> {
        let v = linalg::column(state);
        let norm = v.norm_l2();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v = linalg::scale(&v, linalg::re(1.0 / norm));
        Ok(DensityMatrix { matrix: &v * v.adjoint() })
    }

    /// Basis projector `|k⟩⟨k|`.
    pub fn basis(dim: usize, k: usize) -> Self {
        DensityMatrix { matrix: CMat::from_fn(dim, dim, |i, j| if i == k && j == k { ONE } else { ZERO }) }
    }

    /// All qubits (or the Dicke ladder) in the ground state.
    pub fn ground(dim: usize) -> Self {
        Self::basis(dim, 0)
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `Tr(ρ A)`
    pub fn expectation(&self, op: &CMat) -> c64 {
        linalg::trace_prod(&self.matrix, op)
    }

    pub fn purity(&self) -> f64 {
        linalg::trace_prod(&self.matrix, &self.matrix).re
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(linalg::hermitian_eigenvalues(&self.matrix)?.first().copied().unwrap_or(0.0))
    }
}

/// Eigen-decomposition `L = Σ λᵢ rᵢ ℓᵢ†` with biorthonormal modes.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<c64>,
    pub right_modes: CMat,
    pub left_modes: CMat,
    pub condition: f64,
}

impl SpectralDecomposition {
    pub fn new(l: &Superoperator) -> Result<Self> {
        let (eigenvalues, right) = linalg::eigen(l.matrix())?;
        let condition = linalg::condition_number(&right)?;
        if !condition.is_finite() {
            return Err(Error::EigenSolve("eigenvector matrix is singular".into()));
        }
        let left = linalg::dagger(&linalg::inverse(&right)?);
        Ok(SpectralDecomposition { eigenvalues, right_modes: right, left_modes: left, condition })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    fn scale_of(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Indices of eigenvalues with `|λ| < KERNEL_REL_TOL · max|λ|`.
    pub fn kernel_indices(&self) -> Vec<usize> {
        let s = self.scale_of();
        (0..self.len()).filter(|&i| self.eigenvalues[i].norm() < KERNEL_REL_TOL * s).collect()
    }

    /// Smallest decay rate `|Re λ|` among non-kernel modes.
    pub fn gap(&self) -> f64 {
        let kernel = self.kernel_indices();
        (0..self.len())
            .filter(|i| !kernel.contains(i))
            .map(|i| self.eigenvalues[i].re.abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Mode coefficients `ℓᵢ† x`.
    pub fn coefficients(&self, x: &CMat) -> CMat {
        self.left_modes.adjoint() * x
    }

    /// `e^{Lt} x` for a vectorized operator.
    pub fn propagate(&self, x: &CMat, t: f64) -> CMat {
        let c = self.coefficients(x);
        let n = self.len();
        let scaled = CMat::from_fn(n, x.ncols(), |i, j| c[(i, j)] * (self.eigenvalues[i] * t).exp());
        &self.right_modes * scaled
    }
}

/// Propagator `e^{Lt}` evaluated either through the eigenmodes or, when those are
/// ill-conditioned, by the scaled-and-squared exponential.
#[derive(Debug, Clone)]
pub enum Propagator {
    Spectral(SpectralDecomposition),
    Exponential(CMat),
}

impl Propagator {
    pub fn new(l: &Superoperator) -> Self {
        match SpectralDecomposition::new(l) {
            Ok(s) if s.condition <= MAX_MODE_CONDITION => Propagator::Spectral(s),
            _ => Propagator::Exponential(l.matrix().clone()),
        }
    }

    pub fn is_spectral(&self) -> bool {
        matches!(self, Propagator::Spectral(_))
    }

    pub fn propagate(&self, x: &CMat, t: f64) -> Result<CMat> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::NonFiniteTime(t));
        }
        if t == 0.0 {
            return Ok(x.clone());
        }
        Ok(match self {
            Propagator::Spectral(s) => s.propagate(x, t),
            Propagator::Exponential(l) => linalg::expm(&linalg::scale(l, linalg::re(t))) * x,
        })
    }
}

/// `e^{Lt}[ρ₀]`.
pub fn evolve(l: &Superoperator, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    check_dims(l, rho0.matrix())?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::NonFiniteTime(t));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let x = Propagator::new(l).propagate(&linalg::vectorize(rho0.matrix()), t)?;
    Ok(DensityMatrix { matrix: linalg::hermitian_part(&linalg::unvectorize(&x, l.hilbert_dim())) })
}

fn check_dims(l: &Superoperator, op: &CMat) -> Result<()> {
    if op.nrows() != l.hilbert_dim() || op.ncols() != l.hilbert_dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator {}x{} for Hilbert dimension {}",
            op.nrows(),
            op.ncols(),
            l.hilbert_dim()
        )));
    }
    Ok(())
}

/// Projector onto the kernel of `L` along its range, `P = R (L†R)⁻¹ L†` with `R`, `L` the right
/// and left null spaces.
#[derive(Debug, Clone)]
pub struct KernelProjector {
    right: CMat,
    // (L†R)⁻¹ L†
    dual: CMat,
}

impl KernelProjector {
    pub fn new(l: &Superoperator) -> Result<Self> {
        let (right, left) = linalg::null_spaces(l.matrix(), KERNEL_REL_TOL)?;
        if right.ncols() == 0 {
            return Err(Error::NoKernel);
        }
        let overlap = left.adjoint() * &right;
        let dual = linalg::inverse(&overlap)? * left.adjoint();
        Ok(KernelProjector { right, dual })
    }

    /// Number of independent stationary operators.
    pub fn rank(&self) -> usize {
        self.right.ncols()
    }

    /// `P x` for a vectorized operator.
    pub fn project(&self, x: &CMat) -> CMat {
        &self.right * (&self.dual * x)
    }

    pub fn matrix(&self) -> CMat {
        &self.right * &self.dual
    }
}

/// Long-time limit of the evolution from `ρ₀`: its projection onto the kernel of `L`.
pub fn steady_state_from(l: &Superoperator, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    check_dims(l, rho0.matrix())?;
    let p = KernelProjector::new(l)?;
    project_state(&p, l.hilbert_dim(), rho0)
}

pub(crate) fn project_state(p: &KernelProjector, d: usize, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    let x = p.project(&linalg::vectorize(rho0.matrix()));
    DensityMatrix::normalized(&linalg::unvectorize(&x, d))
}

/// Which condition ended [`evolve_to_limit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopCriterion {
    /// `‖dρ/dt‖` fell below the threshold.
    Stationary,
    /// The time limit was reached first.
    TimeLimit,
}

#[derive(Debug, Clone)]
pub struct LimitReport {
    pub state: DensityMatrix,
    pub time: f64,
    pub residual: f64,
    pub criterion: StopCriterion,
}

pub const LIMIT_RESIDUAL: f64 = 1e-10;
pub const LIMIT_TIME: f64 = 1e4;

/// Evolves on a doubling time grid until `‖L[ρ]‖ < 1e-10` or `t = 10⁴`.
pub fn evolve_to_limit(l: &Superoperator, rho0: &DensityMatrix) -> Result<LimitReport> {
    check_dims(l, rho0.matrix())?;
    let prop = Propagator::new(l);
    let x0 = linalg::vectorize(rho0.matrix());
    let mut t: f64 = 1.0;
    loop {
        let t_eval = t.min(LIMIT_TIME);
        let x = prop.propagate(&x0, t_eval)?;
        let residual = (l.matrix() * &x).norm_l2();
        let done = residual < LIMIT_RESIDUAL;
        if done || t_eval >= LIMIT_TIME {
            let state =
                DensityMatrix { matrix: linalg::hermitian_part(&linalg::unvectorize(&x, l.hilbert_dim())) };
            let criterion = if done { StopCriterion::Stationary } else { StopCriterion::TimeLimit };
            return Ok(LimitReport { state, time: t_eval, residual, criterion });
        }
        t *= 2.0;
    }
}

/// Reusable context for two-time correlators of one Liouvillian.
#[derive(Debug, Clone)]
pub struct Regression {
    l: Superoperator,
    propagator: Propagator,
    kernel: KernelProjector,
}

impl Regression {
    pub fn new(l: &Superoperator) -> Result<Self> {
        Ok(Regression { l: l.clone(), propagator: Propagator::new(l), kernel: KernelProjector::new(l)? })
    }

    pub fn liouvillian(&self) -> &Superoperator {
        &self.l
    }

    pub fn propagator(&self) -> &Propagator {
        &self.propagator
    }

    pub fn kernel(&self) -> &KernelProjector {
        &self.kernel
    }

    /// `Tr{A e^{Lt}[X]}`.
    pub fn correlate(&self, a: &CMat, x: &CMat, t: f64) -> Result<c64> {
        check_dims(&self.l, a)?;
        check_dims(&self.l, x)?;
        let y = self.propagator.propagate(&linalg::vectorize(x), t)?;
        Ok(linalg::trace_prod(a, &linalg::unvectorize(&y, self.l.hilbert_dim())))
    }

    /// Component of `X` outside the kernel of `L`.
    pub fn fluctuation(&self, x: &CMat) -> CMat {
        let v = linalg::vectorize(x);
        linalg::unvectorize(&(&v - self.kernel.project(&v)), self.l.hilbert_dim())
    }

    /// `Tr{A (z − L)⁻¹[X']}` with `X'` the part of `X` outside the kernel.
    pub fn resolve(&self, a: &CMat, x: &CMat, z: c64) -> Result<c64> {
        check_dims(&self.l, a)?;
        check_dims(&self.l, x)?;
        let v = linalg::vectorize(x);
        let v = &v - self.kernel.project(&v);
        let n = v.nrows();
        // adding P keeps the operator regular on the kernel without affecting its complement
        let m = CMat::from_fn(n, n, |i, j| if i == j { z } else { ZERO }) - self.l.matrix()
            + self.kernel.matrix();
        let y = linalg::solve(&m, &v)?;
        let residual = (&m * &y - &v).norm_l2();
        if !(residual <= 1e-10 * v.norm_l2().max(1.0)) {
            return Err(Error::SingularSolve(format!("resolvent residual {residual:e} at z = {z}")));
        }
        Ok(linalg::trace_prod(a, &linalg::unvectorize(&y, self.l.hilbert_dim())))
    }
}

/// `Tr{A e^{Lt}[B ρ]}`.
pub fn regression_time(
    l: &Superoperator,
    rho_ss: &DensityMatrix,
    a: &CMat,
    b: &CMat,
    t: f64,
) -> Result<c64> {
    check_dims(l, b)?;
    let x = b * rho_ss.matrix();
    let prop = Propagator::new(l);
    let y = prop.propagate(&linalg::vectorize(&x), t)?;
    check_dims(l, a)?;
    Ok(linalg::trace_prod(a, &linalg::unvectorize(&y, l.hilbert_dim())))
}

/// `Tr{A (iν − L)⁻¹[B ρ]}` with the stationary part of `Bρ` removed.
pub fn regression_resolvent(
    l: &Superoperator,
    rho_ss: &DensityMatrix,
    a: &CMat,
    b: &CMat,
    nu: f64,
) -> Result<c64> {
    check_dims(l, b)?;
    Regression::new(l)?.resolve(a, &(b * rho_ss.matrix()), I * nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{build_liouvillian, MotionSpec, OperatorSet, SystemSpec};

    fn single(v: f64, delta: f64) -> Superoperator {
        build_liouvillian(&SystemSpec::single(MotionSpec::perpendicular(v), delta).unwrap()).unwrap()
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(linalg::identity(2)).is_err());
        let m = CMat::from_fn(2, 2, |i, j| if i == j { linalg::re(0.5) } else { ZERO });
        assert!(DensityMatrix::new(m).is_ok());
        let bad = CMat::from_fn(2, 2, |i, j| if i == j { linalg::re(if i == 0 { 1.5 } else { -0.5 }) } else { ZERO });
        assert!(matches!(DensityMatrix::new(bad), Err(Error::InvalidState(_))));
    }

    #[test]
    fn zero_time_is_identity() {
        let l = single(0.4, 0.2);
        let rho = DensityMatrix::pure(&[linalg::re(0.6), c64::new(0.0, 0.8)]).unwrap();
        let out = evolve(&l, &rho, 0.0).unwrap();
        assert_eq!(linalg::max_abs_diff(out.matrix(), rho.matrix()), 0.0);
        assert!(matches!(evolve(&l, &rho, f64::NAN), Err(Error::NonFiniteTime(_))));
    }

    #[test]
    fn free_decay_of_excited_qubit() {
        let l = single(0.0, 0.3);
        let rho = DensityMatrix::basis(2, 1);
        for &t in &[0.1, 0.7, 2.5] {
            let p = evolve(&l, &rho, t).unwrap().matrix()[(1, 1)].re;
            assert!((p - (-2.0 * t).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_and_exponential_paths_agree() {
        let spec = SystemSpec::periodic(2, 0.7, 0.3, MotionSpec::parallel(0.4)).unwrap();
        let l = build_liouvillian(&spec).unwrap();
        let x = linalg::vectorize(DensityMatrix::ground(4).matrix());
        let a = Propagator::new(&l);
        assert!(a.is_spectral());
        let b = Propagator::Exponential(l.matrix().clone());
        for &t in &[0.3, 3.0, 30.0] {
            let d = linalg::max_abs_diff(&a.propagate(&x, t).unwrap(), &b.propagate(&x, t).unwrap());
            assert!(d < 1e-10, "t = {t}: {d:e}");
        }
    }

    #[test]
    fn single_qubit_steady_filling() {
        for &(v, delta) in &[(0.3, 0.0), (2.0, 0.7), (1.0, -0.4)] {
            let rho = steady_state_from(&single(v, delta), &DensityMatrix::ground(2)).unwrap();
            let n = v * v / (1.0 + v * v);
            assert!((rho.matrix()[(1, 1)].re - n).abs() < 1e-12);
            assert!(rho.matrix()[(0, 1)].norm() < 1e-12);
        }
    }

    #[test]
    fn steady_state_is_idempotent() {
        let spec = SystemSpec::periodic(2, 0.0, 0.2, MotionSpec::perpendicular(0.5)).unwrap();
        let l = build_liouvillian(&spec).unwrap();
        let rho = steady_state_from(&l, &DensityMatrix::ground(4)).unwrap();
        let again = steady_state_from(&l, &rho).unwrap();
        assert!(linalg::max_abs_diff(rho.matrix(), again.matrix()) < 1e-9);
    }

    #[test]
    fn limit_matches_projection() {
        let l = single(0.5, 0.3);
        let rep = evolve_to_limit(&l, &DensityMatrix::ground(2)).unwrap();
        assert_eq!(rep.criterion, StopCriterion::Stationary);
        assert!((rep.state.matrix()[(1, 1)].re - 0.2).abs() < 1e-10);
    }

    #[test]
    fn identity_observable_is_constant() {
        let l = single(0.5, 0.3);
        let rho = steady_state_from(&l, &DensityMatrix::ground(2)).unwrap();
        let ops = OperatorSet::build(&SystemSpec::single(MotionSpec::perpendicular(0.5), 0.3).unwrap()).unwrap();
        let b = &ops.jumps[0][0];
        let id = linalg::identity(2);
        let c0 = linalg::trace(&(b * rho.matrix()));
        for &t in &[0.0, 1.0, 4.0] {
            let c = regression_time(&l, &rho, &id, b, t).unwrap();
            assert!((c - c0).norm() < 1e-12);
        }
    }

    #[test]
    fn resolvent_decays_at_large_frequency() {
        let spec = SystemSpec::single(MotionSpec::perpendicular(0.5), 0.3).unwrap();
        let l = build_liouvillian(&spec).unwrap();
        let rho = steady_state_from(&l, &DensityMatrix::ground(2)).unwrap();
        let ops = OperatorSet::build(&spec).unwrap();
        let b = &ops.jumps[0][0];
        let bd = linalg::dagger(b);
        let w = linalg::trace(&(&bd * b * rho.matrix())).re;
        let big = regression_resolvent(&l, &rho, &bd, b, 1e6).unwrap();
        // (iν)⁻¹ Tr(B†Bρ) to leading order
        assert!((big * c64::new(0.0, 1e6) - linalg::re(w)).norm() < 1e-5);
    }
}
