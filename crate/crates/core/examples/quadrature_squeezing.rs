// Squeezing of the emitted field at the central frequency, per direction and for the even and
// odd combinations of the two directions.

use waveguide_dce::observables;
use waveguide_dce::{MotionSpec, SystemSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for v in [0.1, 0.3, 0.5] {
        let single = observables::squeezing(&SystemSpec::single(MotionSpec::perpendicular(v), 0.0)?)?;
        let pair = observables::squeezing(&SystemSpec::periodic(2, 0.5, 0.0, MotionSpec::perpendicular(v))?)?;
        println!(
            "v {v}: N=1 xi+ {:.4}  |  N=2 xi+ {:.4} xi- {:.4} even {:.4} odd {:.4}",
            single.xi_plus, pair.xi_plus, pair.xi_minus, pair.xi_even, pair.xi_odd
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
