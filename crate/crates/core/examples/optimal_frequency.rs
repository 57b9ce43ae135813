//! Base frequency that cancels the bias sensitivity, and the exact sensitivity there.

use bichromatic_floquet::analytic::{bias_sensitivity_multimode, optimal_base_frequency};
use bichromatic_floquet::floquet::{fourier_weights, solve, DriveConfig, TruncationConfig};
use std::f64::consts::PI;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!(
        "{:>6} {:>6} {:>10} {:>12} {:>12}",
        "b", "nu", "omega*", "analytic", "exact"
    );
    for nu in [PI / 30.0, PI / 12.0] {
        for b in [0.05, 0.1] {
            let probe = DriveConfig::new(1.0, b, 0.1, nu, 3, 1, 1.0)?;
            let opt = optimal_base_frequency(&probe)?;
            let d = probe.with_omega(opt.omega_star);
            let exact = fourier_weights(&solve(&d, &TruncationConfig::for_drive(&d))?, 0)?.g0();
            let analytic = bias_sensitivity_multimode(&d)?;
            println!(
                "{b:>6.2} {nu:>6.3} {:>10.6} {analytic:>12.3e} {exact:>12.3e}",
                opt.omega_star
            );
        }
    }
    Ok(())
}
