//! Named experiments: a configuration describes a parameter grid, each grid point is solved by
//! one of the engines, and the results are written as a CSV table with a `.meta` sidecar.

mod config;
mod evaluate;
mod output;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

pub use config::{parse_scalar, Axis, AxisName, Diagnostic, ExperimentConfig, MechParams, SystemParams};
pub use output::{meta_path, write_csv, Table};

use crate::error::Error;
use crate::linalg;
use crate::perturbative::MechanicalSpec;
use crate::system::{self, MotionKind, MotionSpec, SystemSpec};

/// Which solver an experiment uses; decides the applicable checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    /// Full `2^N` master equation.
    Master,
    /// Permutation-symmetric sector of co-located qubits.
    Collective,
    /// First-order pair emission.
    Pair,
    /// Phonon propagator and two-photon scattering.
    Backaction,
}

macro_rules! experiments {
    ($($variant:ident => $name:literal, $engine:ident, $qubits:expr, [$($probe:ident),*], [$($col:literal),*], $summary:literal;)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum Experiment { $($variant),* }

        impl Experiment {
            pub const ALL: &'static [Experiment] = &[$(Experiment::$variant),*];

            pub fn name(self) -> &'static str {
                match self { $(Experiment::$variant => $name),* }
            }

            pub fn summary(self) -> &'static str {
                match self { $(Experiment::$variant => $summary),* }
            }

            pub fn engine(self) -> Engine {
                match self { $(Experiment::$variant => Engine::$engine),* }
            }

            /// Qubit number the experiment is defined for, if fixed.
            pub fn fixed_qubits(self) -> Option<usize> {
                match self { $(Experiment::$variant => $qubits),* }
            }

            /// Probe axes the grid must contain.
            pub fn probes(self) -> &'static [AxisName] {
                match self { $(Experiment::$variant => &[$(AxisName::$probe),*]),* }
            }

            /// Observable columns following the axis columns.
            pub fn columns(self) -> &'static [&'static str] {
                match self { $(Experiment::$variant => &[$($col),*]),* }
            }
        }
    };
}

experiments! {
    SingleSpectrum => "single-spectrum", Master, Some(1), [Frequency], ["I_plus", "I_minus"],
        "single-qubit emission spectrum I_σ(ω − ω₀) against the modulation frequency";
    PairRateMap => "pair-rate-map", Pair, None, [], ["W", "W_independent"],
        "first-order pair emission rate against Ω and kd";
    QuadRateMap => "quad-rate-map", Pair, Some(4), [], ["W_o1", "W_e1", "W_e2"],
        "four-qubit emission rate for the three non-uniform vibration modes";
    SqueezingCurve => "squeezing-curve", Master, None, [], ["xi_plus", "xi_minus", "xi_even", "xi_odd"],
        "central-frequency quadrature squeezing of the emitted field";
    ConcurrenceMap => "concurrence-map", Master, Some(2), [], ["concurrence", "purity", "filling_1", "filling_2"],
        "steady-state two-qubit concurrence";
    ConcurrenceDynamics => "concurrence-dynamics", Master, Some(2), [Time], ["concurrence", "purity", "filling_mean"],
        "two-qubit concurrence along the evolution from the ground state";
    LimitingConcurrence => "limiting-concurrence", Master, Some(2), [], ["concurrence", "purity", "residual", "stationary"],
        "long-time two-qubit state reached from the ground state by time evolution";
    DirectivityMap => "directivity-map", Master, None, [], ["D_z", "W_plus", "W_minus"],
        "one-photon directivity and directional rates";
    DirectionalConcurrenceMap => "directional-concurrence-map", Master, None, [], ["C_D", "persistent", "tail_bound"],
        "concurrence of the photon-pair direction matrix";
    PhaseTransition => "phase-transition", Collective, None, [], ["filling", "filling_analytic", "xi_R", "C_b"],
        "collective steady state of co-located qubits: filling, spin squeezing, bipartite concurrence";
    MechDos => "mech-dos", Backaction, None, [Frequency], ["dos"],
        "mechanical density of states against Ω − 2ω₀";
    ScatterG2Single => "scatter-g2-single", Backaction, Some(1), [Frequency, Tau], ["g2", "g2_closed"],
        "reflected-light g²(τ) of one qubit, quadrature and closed form";
    ScatterG2Array => "scatter-g2-array", Backaction, None, [Frequency, Tau], ["g2", "reflectance", "r_re", "r_im"],
        "reflected-light g²(τ) of an array";
    Steady => "steady", Master, None, [], ["filling_mean", "filling_min", "filling_max", "purity", "W_plus", "W_minus", "pair_coherence_re", "pair_coherence_im"],
        "steady-state populations, purity, rates and the ⟨b₀b₁⟩ pair coherence";
    Spectrum => "spectrum", Master, None, [Frequency], ["I_plus", "I_minus"],
        "emission spectrum I_σ(ω − ω₀) of an array";
    Sweep => "sweep", Master, None, [], ["W_plus", "W_minus", "W_total", "W_pert"],
        "master-equation rates next to the first-order rate (parallel motion)";
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL.iter().copied().find(|e| e.name() == s.trim()).ok_or_else(|| {
            format!("unknown experiment '{}' (run `dce list-experiments`)", s.trim())
        })
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters of one system-level grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub system: SystemParams,
    pub mech: Option<MechParams>,
}

impl Point {
    fn set(&mut self, axis: AxisName, value: f64) {
        let s = &mut self.system;
        match axis {
            AxisName::NQubits => s.n_qubits = value.round() as usize,
            AxisName::Kd => s.kd = value,
            AxisName::Detuning => s.detuning = value,
            AxisName::Omega => s.detuning = 0.5 * value,
            AxisName::Amplitude => s.amplitude = value,
            AxisName::PhaseDelay => s.phase_delay = value,
            AxisName::MechOmega => self.mech.get_or_insert(MechParams { omega: 0.0, zero_point: 0.0 }).omega = value,
            AxisName::MechZeroPoint => {
                self.mech.get_or_insert(MechParams { omega: 0.0, zero_point: 0.0 }).zero_point = value
            }
            AxisName::Frequency | AxisName::Tau | AxisName::Time => {}
        }
    }

    pub fn phases(&self) -> Vec<f64> {
        let s = &self.system;
        match &s.positions {
            Some(p) => p.clone(),
            None => (0..s.n_qubits).map(|i| i as f64 * s.kd).collect(),
        }
    }

    /// `aₙ = amplitude · patternₙ · e^{−iα(n − (N−1)/2)}`.
    pub fn spec(&self) -> crate::Result<SystemSpec> {
        let s = &self.system;
        let phases = self.phases();
        let n = phases.len();
        let centre = (n as f64 - 1.0) / 2.0;
        let motion = (0..n)
            .map(|i| {
                let rel = s.pattern.as_ref().map_or(1.0, |p| p[i]);
                let a = linalg::cis(-s.phase_delay * (i as f64 - centre)) * (s.amplitude * rel);
                MotionSpec { kind: s.motion, amplitude: a }
            })
            .collect();
        SystemSpec::new(phases, s.detuning, motion)
    }

    pub fn mechanical(&self) -> crate::Result<MechanicalSpec> {
        let m = self.mech.ok_or_else(|| Error::InvalidSpec("mechanical parameters missing".into()))?;
        MechanicalSpec::new(m.omega, m.zero_point)
    }
}

/// Probe values inside one system point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Probe {
    pub frequency: f64,
    pub tau: f64,
    pub time: f64,
}

impl Probe {
    fn set(&mut self, axis: AxisName, value: f64) {
        match axis {
            AxisName::Frequency => self.frequency = value,
            AxisName::Tau => self.tau = value,
            AxisName::Time => self.time = value,
            _ => {}
        }
    }
}

/// Semantic checks on a parsed configuration; an empty list means it can run.
pub fn validate(config: &ExperimentConfig) -> Vec<Diagnostic> {
    let mut d = Vec::new();
    let exp = config.experiment;
    let sys = &config.system;
    let has = |a: AxisName| config.axis(a).is_some();

    for (i, a) in config.axes.iter().enumerate() {
        if config.axes[..i].iter().any(|b| b.name == a.name) {
            d.push(Diagnostic::new(format!("grid.{i}.name"), format!("axis '{}' appears twice", a.name.name())));
        }
        if a.name.is_probe() && !exp.probes().contains(&a.name) {
            d.push(Diagnostic::new(
                format!("grid.{i}.name"),
                format!("axis '{}' is not used by {exp}", a.name.name()),
            ));
        }
        if a.name == AxisName::NQubits && a.values.iter().any(|&x| x < 1.0 || x.fract() != 0.0) {
            d.push(Diagnostic::new(format!("grid.{i}.values"), "qubit numbers must be positive integers"));
        }
        if a.name == AxisName::Time && a.values.iter().any(|&x| x < 0.0) {
            d.push(Diagnostic::new(format!("grid.{i}"), "times must be non-negative"));
        }
    }
    for p in exp.probes() {
        if !has(*p) {
            d.push(Diagnostic::general(format!("{exp} needs a grid axis named '{}'", p.name())));
        }
    }
    if has(AxisName::Detuning) && has(AxisName::Omega) {
        d.push(Diagnostic::general("axes 'detuning' and 'omega' set the same parameter"));
    }
    if sys.positions.is_some() && (has(AxisName::Kd) || has(AxisName::NQubits)) {
        d.push(Diagnostic::new("system.positions", "explicit positions exclude 'kd' and 'n_qubits' axes"));
    }
    if sys.n_qubits == 0 && !has(AxisName::NQubits) {
        d.push(Diagnostic::new("system.n_qubits", "at least one qubit is required"));
    }
    if let Some(p) = &sys.pattern {
        if has(AxisName::NQubits) {
            d.push(Diagnostic::new("system.pattern", "a fixed pattern cannot follow an 'n_qubits' axis"));
        } else if p.len() != sys.n_qubits {
            d.push(Diagnostic::new(
                "system.pattern",
                format!("{} entries for {} qubits", p.len(), sys.n_qubits),
            ));
        }
    }

    let n_max = config.max_qubits();
    if let Some(n) = exp.fixed_qubits() {
        let ok = match config.axis(AxisName::NQubits) {
            Some(a) => a.values.iter().all(|&x| x as usize == n),
            None => sys.n_qubits == n,
        };
        if !ok {
            d.push(Diagnostic::new("system.n_qubits", format!("{exp} is defined for {n} qubit(s)")));
        }
    }

    let mech_axes = has(AxisName::MechOmega) || has(AxisName::MechZeroPoint);
    match exp.engine() {
        Engine::Master => {
            let cap = system::max_hilbert_dim();
            if n_max >= usize::BITS as usize - 1 || (1usize << n_max) > cap {
                d.push(Diagnostic::new(
                    "system.n_qubits",
                    format!(
                        "{n_max} qubits need Hilbert dimension 2^{n_max}, above the cap {cap} (raise {})",
                        system::MAX_DIM_ENV
                    ),
                ));
            }
        }
        Engine::Collective => {
            let cap = system::max_hilbert_dim();
            if n_max + 1 > cap {
                d.push(Diagnostic::new(
                    "system.n_qubits",
                    format!("collective dimension {} is above the cap {cap} (raise {})", n_max + 1, system::MAX_DIM_ENV),
                ));
            }
            if sys.motion != MotionKind::Perpendicular {
                d.push(Diagnostic::new("system.motion", "the collective solver models perpendicular motion only"));
            }
            if sys.kd != 0.0 || sys.positions.is_some() || has(AxisName::Kd) {
                d.push(Diagnostic::new("system.kd", "the collective solver assumes co-located qubits (kd = 0)"));
            }
            if sys.pattern.is_some() || sys.phase_delay != 0.0 || has(AxisName::PhaseDelay) {
                d.push(Diagnostic::general("the collective solver needs identical motion of all qubits"));
            }
        }
        Engine::Pair => {
            if sys.motion != MotionKind::Parallel {
                d.push(Diagnostic::new("system.motion", "perturbative pair emission implemented for parallel motion only"));
            }
            if exp == Experiment::QuadRateMap && (sys.pattern.is_some() || sys.phase_delay != 0.0 || has(AxisName::PhaseDelay)) {
                d.push(Diagnostic::general("quad-rate-map drives fixed vibration modes; pattern and phase delay are not used"));
            }
        }
        Engine::Backaction => {
            if sys.motion != MotionKind::Parallel {
                d.push(Diagnostic::new("system.motion", "mechanical backaction implemented for parallel motion only"));
            }
            if config.mech.is_none() && !(has(AxisName::MechOmega) && has(AxisName::MechZeroPoint)) {
                d.push(Diagnostic::new("mech", "mech.omega and mech.zero_point are required"));
            }
        }
    }
    if mech_axes && exp.engine() != Engine::Backaction {
        d.push(Diagnostic::general(format!("{exp} has no mechanical mode; drop the mech axes")));
    }
    if exp == Experiment::MechDos {
        let zero = config.mech.map(|m| m.zero_point);
        let bad_axis = config.axis(AxisName::MechZeroPoint).is_some_and(|a| a.values.iter().any(|&x| x <= 0.0));
        if bad_axis || (config.axis(AxisName::MechZeroPoint).is_none() && zero.is_some_and(|z| z <= 0.0)) {
            d.push(Diagnostic::new("mech.zero_point", "the density of states needs k₀u₀ > 0"));
        }
    }
    d
}

/// Parses and validates configuration text.
pub fn validate_text(text: &str) -> Vec<Diagnostic> {
    match ExperimentConfig::parse(text) {
        Ok(c) => validate(&c),
        Err(d) => d,
    }
}

/// Why a run stopped.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid configuration:\n{}", .0.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    Config(Vec<Diagnostic>),
    #[error("solver failed at {point}: {source}")]
    Solver { point: String, source: Error },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl RunError {
    /// Process exit status: 1 for configuration problems, 2 for solver failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io { .. } => 1,
            RunError::Solver { .. } => 2,
        }
    }
}

fn describe(axes: &[&Axis], idx: &[usize]) -> String {
    axes.iter()
        .zip(idx)
        .map(|(a, &k)| format!("{}={}", a.name.name(), a.values[k]))
        .collect::<Vec<_>>()
        .join(", ")
}

fn unravel(mut k: usize, sizes: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; sizes.len()];
    for (slot, &n) in idx.iter_mut().zip(sizes).rev() {
        *slot = k % n;
        k /= n;
    }
    idx
}

/// Evaluates the whole grid. Rows follow the axes in declared order, axis 0 slowest.
pub fn tabulate(config: &ExperimentConfig, threads: Option<usize>) -> Result<Table, RunError> {
    let diags = validate(config);
    if !diags.is_empty() {
        return Err(RunError::Config(diags));
    }
    let sys_axes: Vec<&Axis> = config.axes.iter().filter(|a| !a.name.is_probe()).collect();
    let probe_axes: Vec<&Axis> = config.axes.iter().filter(|a| a.name.is_probe()).collect();
    let sys_sizes: Vec<usize> = sys_axes.iter().map(|a| a.values.len()).collect();
    let probe_sizes: Vec<usize> = probe_axes.iter().map(|a| a.values.len()).collect();
    let n_sys: usize = sys_sizes.iter().product();
    let n_probe: usize = probe_sizes.iter().product();

    let probes: Vec<Probe> = (0..n_probe)
        .map(|k| {
            let mut p = Probe::default();
            for (a, &i) in probe_axes.iter().zip(&unravel(k, &probe_sizes)) {
                p.set(a.name, a.values[i]);
            }
            p
        })
        .collect();

    let solve = |k: usize| -> Result<Vec<Vec<f64>>, RunError> {
        let idx = unravel(k, &sys_sizes);
        let mut point = Point { system: config.system.clone(), mech: config.mech };
        for (a, &i) in sys_axes.iter().zip(&idx) {
            point.set(a.name, a.values[i]);
        }
        let fail = |source: Error, probe: Option<usize>| {
            let mut where_ = describe(&sys_axes, &idx);
            if let Some(j) = probe {
                let extra = describe(&probe_axes, &unravel(j, &probe_sizes));
                where_ = [where_, extra].into_iter().filter(|s| !s.is_empty()).collect::<Vec<_>>().join(", ");
            }
            if where_.is_empty() {
                where_ = "the base configuration".into();
            }
            RunError::Solver { point: where_, source }
        };
        let row = evaluate::prepare(config.experiment, &point).map_err(|e| fail(e, None))?;
        probes.iter().enumerate().map(|(j, p)| row(p).map_err(|e| fail(e, Some(j)))).collect()
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| RunError::Config(vec![Diagnostic::general(format!("thread pool: {e}"))]))?;
    let results: Vec<Vec<Vec<f64>>> =
        pool.install(|| (0..n_sys).into_par_iter().map(solve).collect::<Result<_, _>>())?;

    let sizes: Vec<usize> = config.axes.iter().map(|a| a.values.len()).collect();
    let total: usize = sizes.iter().product();
    let mut rows = Vec::with_capacity(total);
    for k in 0..total {
        let idx = unravel(k, &sizes);
        let (mut si, mut pi) = (Vec::new(), Vec::new());
        let mut row: Vec<f64> = Vec::new();
        for (a, &i) in config.axes.iter().zip(&idx) {
            row.push(a.values[i]);
            if a.name.is_probe() {
                pi.push(i);
            } else {
                si.push(i);
            }
        }
        let flat = |ix: &[usize], sz: &[usize]| ix.iter().zip(sz).fold(0, |acc, (&i, &n)| acc * n + i);
        row.extend_from_slice(&results[flat(&si, &sys_sizes)][flat(&pi, &probe_sizes)]);
        rows.push(row);
    }
    let mut columns: Vec<String> = config.axes.iter().map(|a| a.name.name().to_string()).collect();
    columns.extend(config.experiment.columns().iter().map(|c| c.to_string()));
    Ok(Table { columns, rows })
}

/// What [`run`] wrote.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub csv: PathBuf,
    pub meta: PathBuf,
    pub rows: usize,
}

/// Runs a configuration and writes the CSV table and its sidecar.
pub fn run(config: &ExperimentConfig, out: Option<&Path>, threads: Option<usize>) -> Result<RunReport, RunError> {
    let table = tabulate(config, threads)?;
    let csv = match (out, &config.output) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(p)) => PathBuf::from(p),
        (None, None) => PathBuf::from(format!("{}.csv", config.experiment.name())),
    };
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| RunError::Io { path, source }
    };
    if let Some(dir) = csv.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io(dir))?;
    }
    write_csv(&csv, &table).map_err(io(&csv))?;
    let meta = meta_path(&csv);
    output::write_meta(&meta, config, &table, threads).map_err(io(&meta))?;
    Ok(RunReport { csv, meta, rows: table.rows.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn every_experiment_round_trips_its_name() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), *e);
        }
    }

    #[test]
    fn backaction_needs_parallel_motion() {
        let c = config(
            "experiment = mech-dos\nsystem.n_qubits = 4\nsystem.kd = 0.1\nmech.omega = 0\nmech.zero_point = 0.3\n\
             grid.0.name = frequency\ngrid.0.min = -1\ngrid.0.max = 1\ngrid.0.points = 5\n",
        );
        let d = validate(&c);
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("mechanical backaction implemented for parallel motion only"));
    }

    #[test]
    fn full_solver_cap_is_reported() {
        let c = config("experiment = steady\nsystem.n_qubits = 7\nsystem.amplitude = 0.3\n");
        let d = validate(&c);
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("cap"), "{}", d[0]);
        let ok = config("experiment = steady\nsystem.n_qubits = 2\nsystem.amplitude = 0.3\n");
        assert!(validate(&ok).is_empty());
    }

    #[test]
    fn rows_follow_declared_axis_order() {
        let c = config(
            "experiment = spectrum\nsystem.amplitude = 0.3\ngrid.0.name = frequency\ngrid.0.values = -1, 1\n\
             grid.1.name = amplitude\ngrid.1.values = 0.1, 0.2, 0.3\n",
        );
        let t = tabulate(&c, Some(2)).unwrap();
        assert_eq!(t.rows.len(), 6);
        assert_eq!((t.rows[0][0], t.rows[0][1]), (-1.0, 0.1));
        assert_eq!((t.rows[1][0], t.rows[1][1]), (-1.0, 0.2));
        assert_eq!((t.rows[3][0], t.rows[3][1]), (1.0, 0.1));
        assert_eq!(t.columns, ["frequency", "amplitude", "I_plus", "I_minus"]);
    }
}
