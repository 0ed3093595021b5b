// Long-lived two-excitation states of a dense array and their hybridisation with a mechanical
// breathing mode, seen in the phonon density of states.

use waveguide_dce::perturbative::{self, MechanicalSpec};
use waveguide_dce::{MotionSpec, SystemSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SystemSpec::periodic(4, 0.05, 0.0, MotionSpec::parallel(0.0))?;
    for s in perturbative::dark_states(&spec)?.iter().take(4) {
        let alpha: f64 = s.alpha.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        println!("E - 2w0 = {:+.5} {:+.5}i   |alpha| {alpha:.3e}", s.energy.re, s.energy.im);
    }

    let mech = MechanicalSpec::new(0.0, 0.1f64.sqrt())?;
    let grid: Vec<f64> = (0..=40).map(|k| -1.0 + 0.05 * k as f64).collect();
    let dos = perturbative::mech_green_dos(&spec, &mech, &grid)?;
    for (w, d) in grid.iter().zip(&dos).step_by(4) {
        println!("Omega - 2w0 {w:+.2}: DOS {d:.4}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
