// Co-located qubits driven collectively: the filling switches from nearly empty to nearly full
// around v = 1, more sharply for larger arrays.

use waveguide_dce::collective;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let drives = [0.5, 0.9, 1.0, 1.1, 1.5];
    println!("{:>4} {}", "N", drives.map(|v| format!("{v:>8}")).join(""));
    for n in [2, 8, 32] {
        let mut row = String::new();
        for v in drives {
            let rho = collective::collective_steady_state(n, v, 0.0)?;
            row.push_str(&format!("{:>8.4}", collective::filling(&rho)?));
        }
        println!("{n:>4} {row}");
    }
    let rho = collective::collective_steady_state(32, 0.5, 0.0)?;
    println!(
        "N=32, v=0.5: xi_R {:.4} (large-N {:.4}), filling {:.4} (Holstein-Primakoff {:.4})",
        collective::spin_squeezing_xi_r(&rho)?,
        collective::xi_r_limit(0.5),
        collective::filling(&rho)?,
        collective::hp_filling(32, 0.5)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
