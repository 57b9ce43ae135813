//! DC and AC gap sensitivities along the bias for a fast and a resonant drive.

use bichromatic_floquet::floquet::DriveConfig;
use bichromatic_floquet::noise::NoiseModel;
use bichromatic_floquet::sweep::{local_minima, sweep_line, LineAxis, LinearRange, ScanOptions};
use std::f64::consts::FRAC_PI_2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let range = LinearRange::new(-0.5, 0.5, 51)?;
    for (label, nu) in [("fast", 0.0), ("resonant", FRAC_PI_2)] {
        let d = DriveConfig::new(1.0, 0.0, 0.1, nu, 3, 1, 1.0)?;
        let line = sweep_line(
            &d,
            LineAxis::B,
            &range,
            None,
            &ScanOptions::default(),
            &NoiseModel::default(),
        )?;
        let dc = line.column(|p| p.obs.dgap_db.abs());
        let ac = line.column(|p| p.obs.dgap_domega.abs());
        let mean_ac = ac.iter().sum::<f64>() / ac.len() as f64;
        println!("{label}: mean |dgap/dOmega| = {mean_ac:.4e}");
        for i in local_minima(&dc) {
            println!(
                "  |dgap/db| minimum {:.3e} at b = {:+.3}",
                dc[i], line.points[i].x
            );
        }
    }
    Ok(())
}
