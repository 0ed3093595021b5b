//! Model specification and operator construction.
//!
//! Units: the single-qubit radiative rate is 1 and the speed of light is 1. Qubit positions enter
//! only through the phases `k₀ zₙ`. Basis state index 0 is the qubit ground state and qubit 0 is
//! the leftmost tensor factor.

use std::env;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, CMat, I, ONE, ZERO};

/// Environment variable overriding [`DEFAULT_MAX_HILBERT_DIM`].
pub const MAX_DIM_ENV: &str = "DCE_MAX_HILBERT_DIM";

/// Largest Hilbert-space dimension the dense solver accepts by default (six qubits).
pub const DEFAULT_MAX_HILBERT_DIM: usize = 64;

/// Current Hilbert dimension cap, honouring [`MAX_DIM_ENV`].
pub fn max_hilbert_dim() -> usize {
    env::var(MAX_DIM_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&d| d > 0)
        .unwrap_or(DEFAULT_MAX_HILBERT_DIM)
}

/// Direction of the mechanical oscillation relative to the waveguide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MotionKind {
    /// Modulates the coupling strength; emission is the same in both directions.
    Perpendicular,
    /// Modulates the emission phase; the modulated coupling flips sign with direction.
    Parallel,
}

impl MotionKind {
    pub fn name(self) -> &'static str {
        match self {
            MotionKind::Perpendicular => "perpendicular",
            MotionKind::Parallel => "parallel",
        }
    }
}

impl std::str::FromStr for MotionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "perpendicular" | "perp" => Ok(MotionKind::Perpendicular),
            "parallel" | "par" => Ok(MotionKind::Parallel),
            other => Err(Error::InvalidSpec(format!("unknown motion kind '{other}'"))),
        }
    }
}

/// Motion of one qubit.
///
/// For perpendicular motion `amplitude` is the relative coupling modulation `v`; for parallel
/// motion it is the displacement amplitude in units of the inverse wave number, `k₀u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionSpec {
    pub kind: MotionKind,
    pub amplitude: c64,
}

impl MotionSpec {
    pub fn perpendicular(v: impl Into<c64>) -> Self {
        MotionSpec { kind: MotionKind::Perpendicular, amplitude: v.into() }
    }

    pub fn parallel(ku: impl Into<c64>) -> Self {
        MotionSpec { kind: MotionKind::Parallel, amplitude: ku.into() }
    }

    /// Modulated coupling for emission in direction `sign` (±1).
    pub fn modulated_coupling(&self, sign: Direction) -> c64 {
        match self.kind {
            MotionKind::Perpendicular => self.amplitude,
            MotionKind::Parallel => I * self.amplitude * sign.sign(),
        }
    }
}

/// Propagation direction along the waveguide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Forward, Direction::Backward];

    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Direction::Forward => 0,
            Direction::Backward => 1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Direction::Forward => "+",
            Direction::Backward => "-",
        }
    }
}

/// Full physical configuration of a qubit array.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    phases: Vec<f64>,
    detuning: f64,
    motion: Vec<MotionSpec>,
}

impl SystemSpec {
    /// Validated constructor. `phases[n] = k₀zₙ`, `detuning = Ω/2 − ω₀`.
    pub fn new(phases: Vec<f64>, detuning: f64, motion: Vec<MotionSpec>) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::InvalidSpec("at least one qubit is required".into()));
        }
        if phases.len() != motion.len() {
            return Err(Error::InvalidSpec(format!(
                "{} phases but {} motion entries",
                phases.len(),
                motion.len()
            )));
        }
        if let Some(p) = phases.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidSpec(format!("non-finite phase {p}")));
        }
        if !detuning.is_finite() {
            return Err(Error::InvalidSpec(format!("non-finite detuning {detuning}")));
        }
        if motion.iter().any(|m| !(m.amplitude.re.is_finite() && m.amplitude.im.is_finite())) {
            return Err(Error::InvalidSpec("non-finite motion amplitude".into()));
        }
        Ok(SystemSpec { phases, detuning, motion })
    }

    pub fn single(motion: MotionSpec, detuning: f64) -> Result<Self> {
        Self::new(vec![0.0], detuning, vec![motion])
    }

    /// Periodic array `φₙ = n·kd` with identical motion.
    pub fn periodic(n: usize, kd: f64, detuning: f64, motion: MotionSpec) -> Result<Self> {
        Self::new((0..n).map(|i| i as f64 * kd).collect(), detuning, vec![motion; n])
    }

    /// Periodic array with a linear phase delay `α` between neighbouring oscillators:
    /// `aₙ = a·e^{−iα(n − (N−1)/2)}`, so each oscillator leads the next one by `α`.
    /// With this sign `α = 2kd` favours emission towards `+z`.
    pub fn phase_delayed(
        n: usize,
        kd: f64,
        detuning: f64,
        kind: MotionKind,
        amplitude: f64,
        alpha: f64,
    ) -> Result<Self> {
        let centre = (n as f64 - 1.0) / 2.0;
        let motion = (0..n)
            .map(|i| MotionSpec {
                kind,
                amplitude: linalg::cis(-alpha * (i as f64 - centre)) * amplitude,
            })
            .collect();
        Self::new((0..n).map(|i| i as f64 * kd).collect(), detuning, motion)
    }

    pub fn n_qubits(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    pub fn motion(&self) -> &[MotionSpec] {
        &self.motion
    }

    pub fn with_detuning(&self, detuning: f64) -> Result<Self> {
        Self::new(self.phases.clone(), detuning, self.motion.clone())
    }

    pub fn with_motion(&self, motion: Vec<MotionSpec>) -> Result<Self> {
        Self::new(self.phases.clone(), self.detuning, motion)
    }

    /// Motion amplitudes `aₙ`.
    pub fn amplitudes(&self) -> Vec<c64> {
        self.motion.iter().map(|m| m.amplitude).collect()
    }

    /// `true` if every qubit moves along the waveguide.
    pub fn is_parallel(&self) -> bool {
        self.motion.iter().all(|m| m.kind == MotionKind::Parallel)
    }

    pub fn hilbert_dim(&self) -> usize {
        1usize << self.n_qubits().min(usize::BITS as usize - 1)
    }

    /// Propagation phase and direction from qubit `m` to qubit `n`:
    /// `(|φₙ − φₘ|, sign(φₙ − φₘ))`, with `None` for coinciding positions.
    pub fn link(&self, n: usize, m: usize) -> (f64, Option<Direction>) {
        let d = self.phases[n] - self.phases[m];
        let dir = if d > 0.0 {
            Some(Direction::Forward)
        } else if d < 0.0 {
            Some(Direction::Backward)
        } else {
            None
        };
        (d.abs(), dir)
    }
}

/// Checks a Hilbert dimension against the configured cap.
pub fn check_dimension(n_qubits: usize) -> Result<usize> {
    let cap = max_hilbert_dim();
    if n_qubits == 0 {
        return Err(Error::InvalidSpec("at least one qubit is required".into()));
    }
    if n_qubits >= usize::BITS as usize - 1 || (1usize << n_qubits) > cap {
        let dim = if n_qubits < usize::BITS as usize - 1 { 1usize << n_qubits } else { usize::MAX };
        return Err(Error::DimensionCap { dim, cap });
    }
    Ok(1usize << n_qubits)
}

/// Lowering operators `bₙ` on the `2^N` dimensional space.
pub fn build_lowering_ops(n_qubits: usize) -> Result<Vec<CMat>> {
    let dim = check_dimension(n_qubits)?;
    Ok((0..n_qubits)
        .map(|q| {
            // qubit q is bit (N−1−q) of the basis index
            let bit = 1usize << (n_qubits - 1 - q);
            let mut b = linalg::zeros(dim, dim);
            for col in 0..dim {
                if col & bit != 0 {
                    b[(col ^ bit, col)] = ONE;
                }
            }
            b
        })
        .collect())
}

/// Jump operators `B_{n,±} = bₙ + g_{n,±} bₙ†`, indexed `[direction][qubit]`.
pub fn build_jump_operators(spec: &SystemSpec) -> Result<[Vec<CMat>; 2]> {
    let lowering = build_lowering_ops(spec.n_qubits())?;
    Ok(jump_operators_from(spec, &lowering))
}

fn jump_operators_from(spec: &SystemSpec, lowering: &[CMat]) -> [Vec<CMat>; 2] {
    Direction::BOTH.map(|dir| {
        lowering
            .iter()
            .zip(spec.motion())
            .map(|(b, m)| b + linalg::scale(&linalg::dagger(b), m.modulated_coupling(dir)))
            .collect()
    })
}

/// All operators of the model.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub lowering: Vec<CMat>,
    /// `jumps[d][n]` with `d` = [`Direction::index`].
    pub jumps: [Vec<CMat>; 2],
    pub h_eff: CMat,
}

impl OperatorSet {
    pub fn build(spec: &SystemSpec) -> Result<Self> {
        let lowering = build_lowering_ops(spec.n_qubits())?;
        let jumps = jump_operators_from(spec, &lowering);
        let h_eff = effective_hamiltonian_from(spec, &lowering, &jumps);
        Ok(OperatorSet { lowering, jumps, h_eff })
    }

    pub fn jump(&self, dir: Direction, n: usize) -> &CMat {
        &self.jumps[dir.index()][n]
    }

    pub fn dim(&self) -> usize {
        self.h_eff.nrows()
    }

    /// Total excitation number `Σ bₙ†bₙ`.
    pub fn number(&self) -> CMat {
        let d = self.dim();
        let mut out = linalg::zeros(d, d);
        for b in &self.lowering {
            out += linalg::dagger(b) * b;
        }
        out
    }

    /// Excitation parity `(−1)^{Σ bₙ†bₙ}`.
    pub fn parity(&self) -> CMat {
        let d = self.dim();
        CMat::from_fn(d, d, |i, j| {
            if i == j {
                if i.count_ones() % 2 == 0 { ONE } else { -ONE }
            } else {
                ZERO
            }
        })
    }
}

/// Pairwise coupling terms `(n, m, factor, directions)` between distinct qubits.
///
/// Coinciding qubits couple through the average over both directions.
fn pair_terms(spec: &SystemSpec) -> Vec<(usize, usize, c64, Vec<(Direction, f64)>)> {
    let n = spec.n_qubits();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let (dist, dir) = spec.link(a, b);
            let dirs = match dir {
                Some(d) => vec![(d, 1.0)],
                None => vec![(Direction::Forward, 0.5), (Direction::Backward, 0.5)],
            };
            out.push((a, b, linalg::cis(dist), dirs));
        }
    }
    out
}

/// Non-Hermitian effective Hamiltonian.
pub fn build_effective_hamiltonian(spec: &SystemSpec) -> Result<CMat> {
    let lowering = build_lowering_ops(spec.n_qubits())?;
    let jumps = jump_operators_from(spec, &lowering);
    Ok(effective_hamiltonian_from(spec, &lowering, &jumps))
}

fn effective_hamiltonian_from(spec: &SystemSpec, lowering: &[CMat], jumps: &[Vec<CMat>; 2]) -> CMat {
    let d = lowering[0].nrows();
    let mut h = linalg::zeros(d, d);
    let half_i = c64::new(0.0, -0.5);
    for (n, b) in lowering.iter().enumerate() {
        h -= linalg::scale(&(linalg::dagger(b) * b), linalg::re(spec.detuning()));
        for dir in Direction::BOTH {
            let bj = &jumps[dir.index()][n];
            h += linalg::scale(&(linalg::dagger(bj) * bj), half_i);
        }
    }
    for (n, m, phase, dirs) in pair_terms(spec) {
        for (dir, w) in dirs {
            let bn = &jumps[dir.index()][n];
            let bm = &jumps[dir.index()][m];
            h += linalg::scale(&(linalg::dagger(bn) * bm), -I * phase * w);
        }
    }
    h
}

/// Liouvillian acting on column-stacked density matrices.
#[derive(Debug, Clone)]
pub struct Superoperator {
    matrix: CMat,
    hilbert_dim: usize,
}

impl Superoperator {
    pub fn from_matrix(matrix: CMat, hilbert_dim: usize) -> Result<Self> {
        if matrix.nrows() != hilbert_dim * hilbert_dim || matrix.ncols() != matrix.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "superoperator {}x{} for Hilbert dimension {hilbert_dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Superoperator { matrix, hilbert_dim })
    }

    /// Assembles `ρ ↦ −i(Hρ − ρH†) + Σₖ cₖ Aₖ ρ Cₖ`.
    pub fn from_parts(h_eff: &CMat, sandwiches: &[(c64, &CMat, &CMat)]) -> Self {
        let d = h_eff.nrows();
        let id = linalg::identity(d);
        let mut l = linalg::zeros(d * d, d * d);
        linalg::add_sandwich(&mut l, -I, h_eff, &id);
        linalg::add_sandwich(&mut l, I, &id, &linalg::dagger(h_eff));
        for &(c, a, b) in sandwiches {
            linalg::add_sandwich(&mut l, c, a, b);
        }
        Superoperator { matrix: l, hilbert_dim: d }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    /// `L[X]` for a `d × d` operator.
    pub fn apply(&self, x: &CMat) -> CMat {
        linalg::unvectorize(&(&self.matrix * linalg::vectorize(x)), self.hilbert_dim)
    }
}

/// Liouvillian of the array in the frame rotating at half the modulation frequency.
pub fn build_liouvillian(spec: &SystemSpec) -> Result<Superoperator> {
    let ops = OperatorSet::build(spec)?;
    Ok(liouvillian_from(spec, &ops))
}

pub(crate) fn liouvillian_from(spec: &SystemSpec, ops: &OperatorSet) -> Superoperator {
    let daggers: [Vec<CMat>; 2] = [0, 1].map(|k| ops.jumps[k].iter().map(linalg::dagger).collect());
    let mut terms: Vec<(c64, &CMat, &CMat)> = Vec::new();
    for dir in Direction::BOTH {
        let k = dir.index();
        for n in 0..spec.n_qubits() {
            terms.push((ONE, &ops.jumps[k][n], &daggers[k][n]));
        }
    }
    let pairs = pair_terms(spec);
    for (n, m, phase, dirs) in &pairs {
        for &(dir, w) in dirs {
            let k = dir.index();
            // J and its conjugate partner
            terms.push((*phase * w, &ops.jumps[k][*m], &daggers[k][*n]));
            terms.push((phase.conj() * w, &ops.jumps[k][*n], &daggers[k][*m]));
        }
    }
    Superoperator::from_parts(&ops.h_eff, &terms)
}
