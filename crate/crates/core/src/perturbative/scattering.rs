use std::f64::consts::PI;

use super::green::ExcitationGreen;
use super::mechanics::{MechSelfEnergy, MechanicalSpec};
use super::pairs::TwoExcitationProblem;
use super::PairEmission;
use crate::error::{Error, Result};
use crate::linalg::{c64, cis, CMat, I, ZERO};
use crate::quadrature;
use crate::system::Direction;

/// Half-width of the explicit `ω′` integration window in the g² integral.
pub const G2_WINDOW: f64 = 200.0;

/// Two-photon scattering at fixed total frequency `ω₁ + ω₂`.
#[derive(Debug, Clone)]
pub struct ScatteringContext {
    green: ExcitationGreen,
    total: f64,
    contact: CMat,
    phonon: CMat,
    /// Pair emission with unit displacement of one qubit at a time, scaled by `k₀u₀`.
    emitters: Vec<PairEmission>,
}

impl ScatteringContext {
    pub fn new(phases: &[f64], mech: &MechanicalSpec, total: f64) -> Result<Self> {
        let n = phases.len();
        let problem = TwoExcitationProblem::new(phases);
        let contact = problem.at(total)?.contact;
        let sigma = MechSelfEnergy::direct(&problem, total)?;
        let phonon = mech.green(&sigma, total)?;
        let emitters = (0..n)
            .map(|i| {
                let a: Vec<c64> =
                    (0..n).map(|j| if i == j { c64::new(mech.zero_point, 0.0) } else { ZERO }).collect();
                PairEmission::new(phases, &a, total)
            })
            .collect::<Result<_>>()?;
        Ok(ScatteringContext { green: ExcitationGreen::new(phases), total, contact, phonon, emitters })
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn green(&self) -> &ExcitationGreen {
        &self.green
    }

    /// Vibration-independent frequency-mixing part `M⁽⁰⁾`.
    pub fn direct_part(&self, out: [Direction; 2], inc: [Direction; 2], omega1p: f64, omega1: f64) -> Result<c64> {
        let n = self.green.len();
        let a = self.green.emission(omega1p, out[0])?;
        let b = self.green.emission(self.total - omega1p, out[1])?;
        let c = self.green.emission(omega1, inc[0].flip())?;
        let d = self.green.emission(self.total - omega1, inc[1].flip())?;
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += a[i] * b[i] * self.contact[(i, j)] * c[j] * d[j];
            }
        }
        Ok(acc * -2.0)
    }

    /// Part `M⁽ᵛ⁾` mediated by a real vibration.
    pub fn vibrational_part(&self, out: [Direction; 2], inc: [Direction; 2], omega1p: f64, omega1: f64) -> Result<c64> {
        let outgoing = self.emitter_column(out, omega1p)?;
        let incoming = self.emitter_column([inc[0].flip(), inc[1].flip()], omega1)?;
        let n = self.green.len();
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.phonon[(i, j)] * outgoing[i] * incoming[j];
            }
        }
        Ok(acc)
    }

    fn emitter_column(&self, dirs: [Direction; 2], omega1: f64) -> Result<Vec<c64>> {
        self.emitters.iter().map(|e| Ok(e.amplitude(omega1)?[dirs[0].index()][dirs[1].index()])).collect()
    }

    /// `M_{σ₁′σ₂′,σ₁σ₂}(ω₁′, Ω − ω₁′; ω₁, Ω − ω₁)`.
    pub fn matrix_element(&self, out: [Direction; 2], inc: [Direction; 2], omega1p: f64, omega1: f64) -> Result<c64> {
        Ok(self.direct_part(out, inc, omega1p, omega1)? + self.vibrational_part(out, inc, omega1p, omega1)?)
    }
}

/// `∫_L^∞ e^{−ixτ}/x² dx`.
fn tail_kernel(lower: f64, tau: f64) -> Result<c64> {
    if tau < 0.0 {
        return Ok(tail_kernel(lower, -tau)?.conj());
    }
    if tau == 0.0 {
        return Ok(c64::new(1.0 / lower, 0.0));
    }
    // asymptotic series beyond X, where Xτ is large
    let asymptotic = |x: f64| {
        let it = I * tau;
        let mut term = (it * x * x).inv();
        let mut sum = term;
        for k in 1..8 {
            term *= (k as f64 + 1.0) / (it * x);
            sum += term;
        }
        sum * cis(-x * tau)
    };
    let switch = 60.0 / tau;
    if lower >= switch {
        return Ok(asymptotic(lower));
    }
    let near = quadrature::adaptive(|x| cis(-x * tau) / (x * x), lower, switch, 1e-15, 1e-12, 2000)?;
    Ok(near.value + asymptotic(switch))
}

/// Second-order correlation of light reflected from a weak coherent drive at `ω`.
pub fn reflected_g2(phases: &[f64], mech: &MechanicalSpec, omega: f64, tau: f64) -> Result<f64> {
    let ctx = ScatteringContext::new(phases, mech, 2.0 * omega)?;
    let r = ctx.green.transmission(Direction::Backward, Direction::Forward, omega)?;
    if r.norm() < 1e-12 {
        return Err(Error::Undefined(format!(
            "reflection vanishes at ω = {omega}: g² diverges (dark-state bunching)"
        )));
    }
    let out = [Direction::Backward, Direction::Backward];
    let inc = [Direction::Forward, Direction::Forward];
    let mut failure = None;
    let mut integrand = |x: f64| match ctx.matrix_element(out, inc, omega + x, omega) {
        Ok(m) => m * cis(-x * tau),
        Err(e) => {
            failure.get_or_insert(e);
            ZERO
        }
    };
    let window = quadrature::adaptive(&mut integrand, -G2_WINDOW, G2_WINDOW, 1e-14, 1e-11, 20000)?;
    let upper = integrand(G2_WINDOW) * cis(G2_WINDOW * tau) * G2_WINDOW * G2_WINDOW;
    let lower = integrand(-G2_WINDOW) * cis(-G2_WINDOW * tau) * G2_WINDOW * G2_WINDOW;
    if let Some(e) = failure {
        return Err(e);
    }
    let kernel = tail_kernel(G2_WINDOW, tau)?;
    let integral = window.value + upper * kernel + lower * kernel.conj();
    Ok((1.0 + I * integral / (4.0 * PI * r * r)).norm_sqr())
}

/// Closed form of [`reflected_g2`] for one qubit.
pub fn reflected_g2_single(mech: &MechanicalSpec, omega: f64, tau: f64) -> f64 {
    let g = mech.zero_point * mech.zero_point;
    let mix = 1.0 + c64::new(omega, 1.0) * g / c64::new(2.0 * omega - mech.omega_mech, g);
    let decay = cis(omega * tau.abs()) * (-tau.abs()).exp();
    (1.0 - mix * decay).norm_sqr()
}
