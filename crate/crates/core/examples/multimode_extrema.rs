//! Closed-form multimode gap against exact diagonalization as the drive strength grows.

use bichromatic_floquet::analytic::gap_multimode;
use bichromatic_floquet::floquet::{solve, DriveConfig, TruncationConfig};
use bichromatic_floquet::sweep::{local_maxima, local_minima, LinearRange};
use std::f64::consts::PI;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let omegas = LinearRange::new(0.0, 12.0, 25)?.values();
    let mut exact = Vec::new();
    let mut model = Vec::new();
    for &a in &omegas {
        let d = DriveConfig::new(1.0, 0.2, a, PI / 30.0, 3, 1, 1.0)?;
        exact.push(solve(&d, &TruncationConfig::for_drive(&d))?.gap_distance());
        model.push(gap_multimode(&d));
    }
    for (i, a) in omegas.iter().enumerate() {
        println!(
            "Omega {a:>5.1}  exact {:.6}  closed form {:.6}",
            exact[i], model[i]
        );
    }
    println!(
        "exact maxima {:?} minima {:?}",
        local_maxima(&exact),
        local_minima(&exact)
    );
    println!(
        "model maxima {:?} minima {:?}",
        local_maxima(&model),
        local_minima(&model)
    );
    Ok(())
}
