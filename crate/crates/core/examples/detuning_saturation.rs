//! Dephasing time against inverse detuning at a lifetime maximum of the fast-drive scan.

use bichromatic_floquet::floquet::DriveConfig;
use bichromatic_floquet::noise::NoiseModel;
use bichromatic_floquet::sweep::{
    delta_scan, detect_t_phi_maxima, log_spaced, LinearRange, ScanOptions,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let template = DriveConfig::from_tone_amplitudes(1.0, 0.0, 0.0, 1.0, 3, 1, 10.0)?;
    let opts = ScanOptions::default();
    let noise = NoiseModel::default();
    let maxima = detect_t_phi_maxima(
        &template,
        1,
        -2,
        0.01,
        &LinearRange::new(0.0, 150.0, 151)?,
        &opts,
        &noise,
    )?;
    let Some(&omega_1) = maxima.first() else {
        println!("no interior maximum found");
        return Ok(());
    };
    println!("T_phi maximum at Omega1 = {omega_1}");
    let d = DriveConfig::from_tone_amplitudes(1.0, 0.0, omega_1, 1.0, 3, 1, 10.0)?;
    for p in delta_scan(&d, 1, -2, &log_spaced(1e-6, 1.0, 13)?, &opts, &noise)? {
        println!("1/delta {:>10.3e}  T_phi {:.5e}", p.inv_delta, p.obs.t_phi);
    }
    Ok(())
}
