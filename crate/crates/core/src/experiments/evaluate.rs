use super::{Experiment, Point, Probe};
use crate::collective;
use crate::error::{Error, Result};
use crate::linalg::{self, c64, re};
use crate::lindblad::{self, DensityMatrix, StopCriterion};
use crate::observables::{self, EmissionModel, PairIntegration};
use crate::perturbative::{self, ExcitationGreen};
use crate::system::{self, Direction};

pub(super) type Row<'a> = Box<dyn Fn(&Probe) -> Result<Vec<f64>> + 'a>;

/// Undefined quantities become `NaN` in the table instead of aborting the sweep.
fn or_nan(r: Result<f64>) -> Result<f64> {
    match r {
        Ok(x) => Ok(x),
        Err(Error::Undefined(_) | Error::NotApplicable(_)) => Ok(f64::NAN),
        Err(e) => Err(e),
    }
}

fn fixed(values: Vec<f64>) -> Row<'static> {
    Box::new(move |_| Ok(values.clone()))
}

fn two_qubit_summary(rho: &DensityMatrix) -> Result<(f64, f64)> {
    Ok((observables::wootters_concurrence(rho)?, rho.purity()))
}

fn mean_filling(rho: &DensityMatrix, n: usize) -> Result<Vec<f64>> {
    let lowering = system::build_lowering_ops(n)?;
    Ok(lowering.iter().map(|b| rho.expectation(&(linalg::dagger(b) * b)).re).collect())
}

/// Solves one system point and returns the per-probe row builder.
pub(super) fn prepare(exp: Experiment, point: &Point) -> Result<Row<'static>> {
    let spec = point.spec()?;
    let n = spec.n_qubits();
    let delta = spec.detuning();
    Ok(match exp {
        Experiment::SingleSpectrum | Experiment::Spectrum => {
            let model = EmissionModel::new(&spec)?;
            // the model's frequency is measured from Ω/2 = ω₀ + Δ
            Box::new(move |p: &Probe| {
                let nu = p.frequency - delta;
                Ok(vec![model.spectrum(Direction::Forward, nu)?, model.spectrum(Direction::Backward, nu)?])
            })
        }
        Experiment::PairRateMap => {
            let w = perturbative::emission_rate_pert(&spec)?;
            let independent: f64 = spec.amplitudes().iter().map(|a| 4.0 * a.norm_sqr()).sum();
            fixed(vec![w, independent])
        }
        Experiment::QuadRateMap => {
            let sigma = perturbative::mech_self_energy(&spec, 2.0 * delta)?;
            let a = point.system.amplitude;
            let h = std::f64::consts::FRAC_1_SQRT_2 * a;
            let modes = [
                [0.5 * a, -0.5 * a, -0.5 * a, 0.5 * a],
                [h, 0.0, 0.0, -h],
                [0.0, h, -h, 0.0],
            ];
            fixed(modes.iter().map(|m| sigma.rate(&m.map(re))).collect())
        }
        Experiment::SqueezingCurve => {
            let r = observables::squeezing(&spec)?;
            fixed(vec![r.xi_plus, r.xi_minus, r.xi_even, r.xi_odd])
        }
        Experiment::ConcurrenceMap => {
            let model = EmissionModel::new(&spec)?;
            let (c, purity) = two_qubit_summary(model.steady_state())?;
            let f = model.filling();
            fixed(vec![c, purity, f[0], f[1]])
        }
        Experiment::ConcurrenceDynamics => {
            let l = system::build_liouvillian(&spec)?;
            let rho0 = DensityMatrix::ground(spec.hilbert_dim());
            Box::new(move |p: &Probe| {
                let rho = lindblad::evolve(&l, &rho0, p.time)?;
                let (c, purity) = two_qubit_summary(&rho)?;
                let f = mean_filling(&rho, n)?;
                Ok(vec![c, purity, f.iter().sum::<f64>() / n as f64])
            })
        }
        Experiment::LimitingConcurrence => {
            let l = system::build_liouvillian(&spec)?;
            let report = lindblad::evolve_to_limit(&l, &DensityMatrix::ground(spec.hilbert_dim()))?;
            let (c, purity) = two_qubit_summary(&report.state)?;
            let stationary = if report.criterion == StopCriterion::Stationary { 1.0 } else { 0.0 };
            fixed(vec![c, purity, report.residual, stationary])
        }
        Experiment::DirectivityMap => {
            let (m, dz) = observables::directivity(&spec)?;
            fixed(vec![dz, m.j[(0, 0)].re, m.j[(1, 1)].re])
        }
        Experiment::DirectionalConcurrenceMap => {
            let (m, c) = observables::directional_concurrence(&spec, &PairIntegration::default())?;
            fixed(vec![c, if m.persistent { 1.0 } else { 0.0 }, m.tail_bound])
        }
        Experiment::PhaseTransition => {
            let v = point.system.amplitude;
            let rho = collective::collective_steady_state(n, v, delta)?;
            let analytic = if delta == 0.0 && n % 2 == 0 { collective::filling_analytic(n, v)? } else { f64::NAN };
            fixed(vec![
                collective::filling(&rho)?,
                analytic,
                or_nan(collective::spin_squeezing_xi_r(&rho))?,
                or_nan(collective::bipartite_concurrence_cb(&rho))?,
            ])
        }
        Experiment::MechDos => {
            let mech = point.mechanical()?;
            Box::new(move |p: &Probe| perturbative::mech_green_dos(&spec, &mech, &[p.frequency]))
        }
        Experiment::ScatterG2Single => {
            let mech = point.mechanical()?;
            let phases = spec.phases().to_vec();
            Box::new(move |p: &Probe| {
                Ok(vec![
                    or_nan(perturbative::reflected_g2(&phases, &mech, p.frequency, p.tau))?,
                    perturbative::reflected_g2_single(&mech, p.frequency, p.tau),
                ])
            })
        }
        Experiment::ScatterG2Array => {
            let mech = point.mechanical()?;
            let phases = spec.phases().to_vec();
            Box::new(move |p: &Probe| {
                let r = ExcitationGreen::new(&phases).transmission(Direction::Backward, Direction::Forward, p.frequency)?;
                Ok(vec![
                    or_nan(perturbative::reflected_g2(&phases, &mech, p.frequency, p.tau))?,
                    r.norm_sqr(),
                    r.re,
                    r.im,
                ])
            })
        }
        Experiment::Steady => {
            let model = EmissionModel::new(&spec)?;
            let f = model.filling();
            let rho = model.steady_state();
            let pair = if n >= 2 {
                let b = &model.operators().lowering;
                rho.expectation(&(&b[0] * &b[1]))
            } else {
                c64::new(0.0, 0.0)
            };
            fixed(vec![
                f.iter().sum::<f64>() / n as f64,
                f.iter().copied().fold(f64::INFINITY, f64::min),
                f.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                rho.purity(),
                model.rate(Direction::Forward),
                model.rate(Direction::Backward),
                pair.re,
                pair.im,
            ])
        }
        Experiment::Sweep => {
            let model = EmissionModel::new(&spec)?;
            let (wp, wm) = (model.rate(Direction::Forward), model.rate(Direction::Backward));
            let pert = if spec.is_parallel() { perturbative::emission_rate_pert(&spec)? } else { f64::NAN };
            fixed(vec![wp, wm, wp + wm, pert])
        }
    })
}
