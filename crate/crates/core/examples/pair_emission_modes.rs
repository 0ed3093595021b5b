// First-order photon-pair emission from a four-qubit array: mechanical self-energy, the rate for
// each vibration pattern and the two-photon spectrum.

use waveguide_dce::linalg::re;
use waveguide_dce::perturbative::{self, MechSelfEnergy};
use waveguide_dce::{Direction, MotionSpec, SystemSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let kd = 0.3;
    let spec = SystemSpec::periodic(4, kd, 0.0, MotionSpec::parallel(0.0))?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let modes = [
        ("uniform", [0.5, 0.5, 0.5, 0.5]),
        ("o1", [h, 0.0, 0.0, -h]),
        ("e1", [0.5, -0.5, -0.5, 0.5]),
        ("e2", [0.0, h, -h, 0.0]),
    ];
    for total in [-1.0, 0.0, 1.0] {
        let sigma: MechSelfEnergy = perturbative::mech_self_energy(&spec, total)?;
        let rates: Vec<String> = modes.iter().map(|(name, m)| format!("{name} {:.3e}", sigma.rate(&m.map(re)))).collect();
        println!("Omega - 2w0 = {total:+.1}: {}", rates.join("  "));
    }

    let moving = SystemSpec::new(
        (0..4).map(|n| n as f64 * kd).collect(),
        0.0,
        modes[3].1.iter().map(|&u| MotionSpec::parallel(0.01 * u)).collect(),
    )?;
    let grid = [-2.0, -1.0, 0.0, 1.0, 2.0];
    for (w, [plus, minus]) in grid.iter().zip(perturbative::emission_spectrum_pert(&moving, &grid)?) {
        println!("w - w0 {w:+.1}: I+ {plus:.3e}  I- {minus:.3e}");
    }
    let w = perturbative::emission_rate_pert(&moving)?;
    let pair = perturbative::PairEmission::from_spec(&moving)?;
    println!("W {w:.6e} = W+ {:.6e} + W- {:.6e}", pair.directional_rate(Direction::Forward, 1e-8)?, pair.directional_rate(Direction::Backward, 1e-8)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
