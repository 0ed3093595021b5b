//! Flat `key = value` experiment configuration.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! line    := blank | comment | entry
//! comment := '#' anything
//! entry   := key '=' value [comment]
//! key     := segment ('.' segment)*
//! value   := scalar | scalar (',' scalar)*
//! scalar  := float | [float '*'] 'pi' ['/' float] | word
//! ```
//!
//! Recognised keys:
//!
//! | key | meaning |
//! |-----|---------|
//! | `experiment` | runner name, see `dce list-experiments` |
//! | `output` | CSV path (overridden by `--out`) |
//! | `system.n_qubits` | number of qubits (default 1) |
//! | `system.kd` | phase `k₀d` between neighbours (default 0) |
//! | `system.positions` | explicit phases `k₀zₙ`; overrides `n_qubits` and `kd` |
//! | `system.detuning` | `Δ = Ω/2 − ω₀` (default 0) |
//! | `system.motion` | `perpendicular` or `parallel` |
//! | `system.amplitude` | `v` or `k₀u` |
//! | `system.pattern` | relative real amplitude per qubit (default all 1) |
//! | `system.phase_delay` | phase lag `α` between neighbouring oscillators (default 0) |
//! | `mech.omega` | `Ω₀ − 2ω₀` |
//! | `mech.zero_point` | `k₀u₀` |
//! | `grid.<i>.name` | axis parameter |
//! | `grid.<i>.min`, `grid.<i>.max`, `grid.<i>.points` | uniform axis, both ends included |
//! | `grid.<i>.values` | explicit axis values |
//!
//! Axes are numbered from 0 and vary slowest-first in the output.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::Experiment;
use crate::system::MotionKind;

/// One configuration problem, optionally tied to a key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub key: Option<String>,
    pub message: String,
}

impl Diagnostic {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic { key: Some(key.into()), message: message.into() }
    }

    pub fn general(message: impl Into<String>) -> Self {
        Diagnostic { key: None, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.key {
            Some(k) => write!(f, "{k}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Quantities an axis can scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisName {
    NQubits,
    Kd,
    Detuning,
    /// Two-photon or modulation frequency `Ω − 2ω₀`, i.e. `2Δ`.
    Omega,
    Amplitude,
    PhaseDelay,
    MechOmega,
    MechZeroPoint,
    /// Probe frequency of a spectrum or of the drive, `ω − ω₀` (or `Ω − 2ω₀` for the DOS).
    Frequency,
    Tau,
    Time,
}

impl AxisName {
    pub const ALL: [AxisName; 11] = [
        AxisName::NQubits,
        AxisName::Kd,
        AxisName::Detuning,
        AxisName::Omega,
        AxisName::Amplitude,
        AxisName::PhaseDelay,
        AxisName::MechOmega,
        AxisName::MechZeroPoint,
        AxisName::Frequency,
        AxisName::Tau,
        AxisName::Time,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxisName::NQubits => "n_qubits",
            AxisName::Kd => "kd",
            AxisName::Detuning => "detuning",
            AxisName::Omega => "omega",
            AxisName::Amplitude => "amplitude",
            AxisName::PhaseDelay => "phase_delay",
            AxisName::MechOmega => "mech_omega",
            AxisName::MechZeroPoint => "zero_point",
            AxisName::Frequency => "frequency",
            AxisName::Tau => "tau",
            AxisName::Time => "time",
        }
    }

    /// Probe axes do not change the physical system and are evaluated inside one system point.
    pub fn is_probe(self) -> bool {
        matches!(self, AxisName::Frequency | AxisName::Tau | AxisName::Time)
    }
}

impl FromStr for AxisName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        AxisName::ALL
            .iter()
            .copied()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = AxisName::ALL.iter().map(|a| a.name()).collect();
                format!("unknown axis '{s}' (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: AxisName,
    pub values: Vec<f64>,
}

/// Physical parameters of one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    pub n_qubits: usize,
    pub kd: f64,
    pub positions: Option<Vec<f64>>,
    pub detuning: f64,
    pub motion: MotionKind,
    pub amplitude: f64,
    pub pattern: Option<Vec<f64>>,
    pub phase_delay: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            n_qubits: 1,
            kd: 0.0,
            positions: None,
            detuning: 0.0,
            motion: MotionKind::Perpendicular,
            amplitude: 0.0,
            pattern: None,
            phase_delay: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechParams {
    pub omega: f64,
    pub zero_point: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub output: Option<String>,
    pub system: SystemParams,
    pub mech: Option<MechParams>,
    pub axes: Vec<Axis>,
}

/// Parses a scalar: a float or a multiple of `pi`.
pub fn parse_scalar(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Ok(x) = s.parse::<f64>() {
        return Some(x);
    }
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), Some(b.trim().parse::<f64>().ok()?)),
        None => (s, None),
    };
    let (coef, rest) = match num.split_once('*') {
        Some((a, b)) => (a.trim().parse::<f64>().ok()?, b.trim()),
        None => match num.strip_prefix('-') {
            Some(r) => (-1.0, r.trim()),
            None => (1.0, num),
        },
    };
    if rest != "pi" {
        return None;
    }
    Some(coef * std::f64::consts::PI / den.unwrap_or(1.0))
}

fn parse_list(s: &str) -> Option<Vec<f64>> {
    s.split(',').map(parse_scalar).collect()
}

#[derive(Default)]
struct AxisDraft {
    name: Option<String>,
    min: Option<f64>,
    max: Option<f64>,
    points: Option<usize>,
    values: Option<Vec<f64>>,
}

impl ExperimentConfig {
    /// Parses configuration text, returning every problem found.
    pub fn parse(text: &str) -> Result<Self, Vec<Diagnostic>> {
        let mut diags = Vec::new();
        let mut entries: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line.split_once('=') {
                Some((k, v)) => {
                    let k = k.trim().to_string();
                    if entries.insert(k.clone(), v.trim().to_string()).is_some() {
                        diags.push(Diagnostic::new(k, format!("duplicate key on line {}", lineno + 1)));
                    }
                }
                None => diags.push(Diagnostic::general(format!("line {}: expected 'key = value'", lineno + 1))),
            }
        }

        let mut experiment = None;
        let mut output = None;
        let mut system = SystemParams::default();
        let mut mech_omega = None;
        let mut mech_zero = None;
        let mut drafts: BTreeMap<usize, AxisDraft> = BTreeMap::new();

        let number = |k: &str, v: &str, diags: &mut Vec<Diagnostic>| -> Option<f64> {
            let x = parse_scalar(v);
            if x.is_none() || !x.is_some_and(f64::is_finite) {
                diags.push(Diagnostic::new(k, format!("'{v}' is not a finite number")));
                return None;
            }
            x
        };
        let list = |k: &str, v: &str, diags: &mut Vec<Diagnostic>| -> Option<Vec<f64>> {
            match parse_list(v) {
                Some(xs) if xs.iter().all(|x| x.is_finite()) => Some(xs),
                _ => {
                    diags.push(Diagnostic::new(k, format!("'{v}' is not a comma-separated list of numbers")));
                    None
                }
            }
        };
        let count = |k: &str, v: &str, diags: &mut Vec<Diagnostic>| -> Option<usize> {
            let x = v.parse::<usize>().ok();
            if x.is_none() {
                diags.push(Diagnostic::new(k, format!("'{v}' is not a non-negative integer")));
            }
            x
        };

        for (k, v) in &entries {
            let parts: Vec<&str> = k.split('.').collect();
            match parts.as_slice() {
                ["experiment"] => match v.parse::<Experiment>() {
                    Ok(e) => experiment = Some(e),
                    Err(e) => diags.push(Diagnostic::new(k, e)),
                },
                ["output"] => output = Some(v.clone()),
                ["system", "n_qubits"] => {
                    if let Some(n) = count(k, v, &mut diags) {
                        system.n_qubits = n;
                    }
                }
                ["system", "kd"] => system.kd = number(k, v, &mut diags).unwrap_or(system.kd),
                ["system", "positions"] => system.positions = list(k, v, &mut diags),
                ["system", "detuning"] => system.detuning = number(k, v, &mut diags).unwrap_or(0.0),
                ["system", "motion"] => match v.parse::<MotionKind>() {
                    Ok(m) => system.motion = m,
                    Err(e) => diags.push(Diagnostic::new(k, e.to_string())),
                },
                ["system", "amplitude"] => system.amplitude = number(k, v, &mut diags).unwrap_or(0.0),
                ["system", "pattern"] => system.pattern = list(k, v, &mut diags),
                ["system", "phase_delay"] => system.phase_delay = number(k, v, &mut diags).unwrap_or(0.0),
                ["mech", "omega"] => mech_omega = number(k, v, &mut diags),
                ["mech", "zero_point"] => mech_zero = number(k, v, &mut diags),
                ["grid", idx, field] => {
                    let Ok(i) = idx.parse::<usize>() else {
                        diags.push(Diagnostic::new(k, "grid axes are numbered 0, 1, 2, …"));
                        continue;
                    };
                    let d = drafts.entry(i).or_default();
                    match *field {
                        "name" => d.name = Some(v.clone()),
                        "min" => d.min = number(k, v, &mut diags),
                        "max" => d.max = number(k, v, &mut diags),
                        "points" => d.points = count(k, v, &mut diags),
                        "values" => d.values = list(k, v, &mut diags),
                        _ => diags.push(Diagnostic::new(k, "unknown key")),
                    }
                }
                _ => diags.push(Diagnostic::new(k, "unknown key")),
            }
        }

        if let Some(p) = &system.positions {
            system.n_qubits = p.len();
        }
        let mech = match (mech_omega, mech_zero) {
            (Some(omega), Some(zero_point)) => Some(MechParams { omega, zero_point }),
            (None, None) => None,
            _ => {
                diags.push(Diagnostic::new("mech", "both mech.omega and mech.zero_point are required"));
                None
            }
        };

        let mut axes = Vec::new();
        for (expected, (i, d)) in drafts.into_iter().enumerate() {
            let key = format!("grid.{i}");
            if i != expected {
                diags.push(Diagnostic::new(&key, format!("axis numbering skips grid.{expected}")));
            }
            let label = d.name.clone().unwrap_or_else(|| "?".into());
            let name = match d.name.as_deref().map(str::parse::<AxisName>) {
                Some(Ok(n)) => Some(n),
                Some(Err(e)) => {
                    diags.push(Diagnostic::new(format!("{key}.name"), e));
                    None
                }
                None => {
                    diags.push(Diagnostic::new(format!("{key}.name"), "missing axis name"));
                    None
                }
            };
            let values = match (d.values, d.min, d.max, d.points) {
                (Some(vs), None, None, None) => Some(vs),
                (None, Some(lo), Some(hi), Some(n)) => {
                    if n < 2 {
                        diags.push(Diagnostic::new(
                            format!("{key}.points"),
                            format!("axis '{label}' needs at least 2 points, got {n}"),
                        ));
                        None
                    } else {
                        Some((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect())
                    }
                }
                (None, None, None, None) => {
                    diags.push(Diagnostic::new(&key, format!("axis '{label}' is empty")));
                    None
                }
                (Some(_), ..) => {
                    diags.push(Diagnostic::new(&key, "give either values or min/max/points, not both"));
                    None
                }
                _ => {
                    diags.push(Diagnostic::new(&key, format!("axis '{label}' needs min, max and points")));
                    None
                }
            };
            if let Some(vs) = &values {
                if vs.is_empty() {
                    diags.push(Diagnostic::new(&key, format!("axis '{label}' is empty")));
                }
            }
            if let (Some(name), Some(values)) = (name, values) {
                if !values.is_empty() {
                    axes.push(Axis { name, values });
                }
            }
        }

        let Some(experiment) = experiment else {
            diags.push(Diagnostic::new("experiment", "missing experiment name"));
            return Err(diags);
        };
        if diags.is_empty() {
            Ok(ExperimentConfig { experiment, output, system, mech, axes })
        } else {
            Err(diags)
        }
    }

    pub fn axis(&self, name: AxisName) -> Option<&Axis> {
        self.axes.iter().find(|a| a.name == name)
    }

    /// Largest value an axis or the base configuration gives to a parameter.
    pub(crate) fn max_qubits(&self) -> usize {
        match self.axis(AxisName::NQubits) {
            Some(a) => a.values.iter().fold(0.0f64, |m, &x| m.max(x)) as usize,
            None => self.system.n_qubits,
        }
    }
}
