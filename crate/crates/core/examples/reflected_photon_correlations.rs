// Second-order correlation of light reflected from a vibrating qubit, and from a short array.

use waveguide_dce::perturbative::{self, MechanicalSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mech = MechanicalSpec::new(0.5, 0.3)?;
    for tau in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let numeric = perturbative::reflected_g2(&[0.0], &mech, 0.2, tau)?;
        let closed = perturbative::reflected_g2_single(&mech, 0.2, tau);
        println!("N=1 tau {tau:.1}: g2 {numeric:.6} (closed form {closed:.6})");
    }
    let phases = [0.0, 0.5];
    for tau in [0.0, 1.0, 3.0] {
        println!("N=2 tau {tau:.1}: g2 {:.6}", perturbative::reflected_g2(&phases, &mech, 0.2, tau)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
