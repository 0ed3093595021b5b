// Parameter sweeps from a configuration text, the same path the `dce` binary takes.

use waveguide_dce::experiments::{self, ExperimentConfig};

const CONFIG: &str = "\
experiment = sweep
system.n_qubits = 2
system.kd = pi/4
system.motion = parallel
grid.0.name = amplitude
grid.0.values = 0.01, 0.02, 0.05
grid.1.name = detuning
grid.1.min = -1
grid.1.max = 1
grid.1.points = 3
";

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let config = ExperimentConfig::parse(CONFIG).map_err(|d| format!("{d:?}"))?;
    let problems = experiments::validate(&config);
    if !problems.is_empty() {
        return Err(format!("{problems:?}").into());
    }
    let table = experiments::tabulate(&config, Some(2))?;
    print!("{}", table.to_csv());

    let out = std::env::temp_dir().join(format!("dce-example-{}.csv", std::process::id()));
    let report = experiments::run(&config, Some(&out), None)?;
    println!("{report:?}");
    std::fs::remove_file(&out)?;
    std::fs::remove_file(experiments::meta_path(&out))?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
