//! Quasienergies of a bichromatically driven qubit, checked against direct time evolution.

use bichromatic_floquet::floquet::{propagator_oracle, solve, DriveConfig, TruncationConfig};
use std::f64::consts::PI;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let drive = DriveConfig::new(1.0, 0.2, 0.1, PI / 30.0, 3, 1, 1.0)?;
    let trunc = TruncationConfig::for_drive(&drive);
    let spec = solve(&drive, &trunc)?;
    println!("n_max           {}", trunc.n_max);
    println!("eps+            {:.12}", spec.eps_plus);
    println!("eps-            {:.12}", spec.eps_minus);
    println!("gap             {:.12}", spec.gap());

    let oracle = propagator_oracle(&drive, 1 << 14)?;
    println!("oracle distance {:.12}", oracle.gap_distance());
    println!("extended dist.  {:.12}", spec.gap_distance());
    println!("unitarity       {:.1e}", oracle.unitarity_defect);
    Ok(())
}
