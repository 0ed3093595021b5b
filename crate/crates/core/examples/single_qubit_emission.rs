// One modulated qubit: steady-state filling, directional rates and the emission spectrum,
// cross-checked against the first-order pair amplitude.

use waveguide_dce::observables::EmissionModel;
use waveguide_dce::{perturbative, Direction, MotionSpec, SystemSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let ku = 0.02;
    let spec = SystemSpec::single(MotionSpec::parallel(ku), 0.0)?;
    let model = EmissionModel::new(&spec)?;
    let total: f64 = Direction::BOTH.iter().map(|&d| model.rate(d)).sum();
    let pert = perturbative::emission_rate_pert(&spec)?;
    println!("filling {:.3e}  W(master) {total:.6e}  W(first order) {pert:.6e}", model.filling()[0]);

    for nu in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        println!("nu {nu:+.1}  I+ {:.4e}  I- {:.4e}", model.spectrum(Direction::Forward, nu)?, model.spectrum(Direction::Backward, nu)?);
    }
    if (total - pert).abs() > 5.0 * ku * ku * pert {
        return Err("master equation and first-order rate disagree".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
