//! Exact gap near a two-tone multiphoton resonance against the RWA and GVV predictions.

use bichromatic_floquet::floquet::DriveConfig;
use bichromatic_floquet::noise::NoiseModel;
use bichromatic_floquet::sweep::{fastscan, LinearRange, ScanOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let template = DriveConfig::from_tone_amplitudes(1.0, 0.0, 0.0, 1.0, 3, 1, 10.0)?;
    let range = LinearRange::new(0.0, 30.0, 16)?;
    let line = fastscan(
        &template,
        1,
        -2,
        0.01,
        &range,
        &ScanOptions::default(),
        &NoiseModel::default(),
    )?;
    println!(
        "{:>6} {:>11} {:>11} {:>11}",
        "Omega1", "exact", "rwa", "gvv"
    );
    for p in &line.points {
        let r = p.resonance.expect("fastscan fills resonance columns");
        println!(
            "{:>6.1} {:>11.6} {:>11.6} {:>11.6}",
            p.x, p.obs.gap_distance, r.gap_rwa, r.gap_gvv
        );
    }
    Ok(())
}
