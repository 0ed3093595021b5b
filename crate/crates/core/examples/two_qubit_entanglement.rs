// Two qubits half a wavelength apart, modulated in phase: the steady state is the pure
// entangled state (|00⟩ − v|11⟩)/√(1 + v²). Also follows the concurrence in time from the ground state.

use waveguide_dce::lindblad::{self, DensityMatrix};
use waveguide_dce::observables::{self, EmissionModel};
use waveguide_dce::{build_liouvillian, MotionKind, SystemSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let v = 0.5;
    let spec = SystemSpec::phase_delayed(2, std::f64::consts::PI, 0.0, MotionKind::Perpendicular, v, 0.0)?;
    let model = EmissionModel::new(&spec)?;
    let rho = model.steady_state();
    let c = observables::wootters_concurrence(rho)?;
    println!("steady state: concurrence {c:.6} (expected {:.6})  purity {:.6}", 2.0 * v / (1.0 + v * v), rho.purity());

    let l = build_liouvillian(&spec)?;
    let ground = DensityMatrix::ground(spec.hilbert_dim());
    for t in [0.5, 1.0, 2.0, 5.0, 20.0] {
        let rho_t = lindblad::evolve(&l, &ground, t)?;
        println!("t {t:>4}: concurrence {:.4}", observables::wootters_concurrence(&rho_t)?);
    }
    let limit = lindblad::evolve_to_limit(&l, &ground)?;
    println!("long-time limit reached via {:?}, residual {:.1e}", limit.criterion, limit.residual);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
