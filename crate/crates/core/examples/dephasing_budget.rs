//! Fourier weights of the transition and the resulting dephasing time.

use bichromatic_floquet::floquet::{fourier_weights, solve, DriveConfig, TruncationConfig};
use bichromatic_floquet::noise::{dephasing_rate, spectral_density, NoiseModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let noise = NoiseModel::default();
    for (label, nu) in [("fast", 0.0), ("resonant", std::f64::consts::FRAC_PI_2)] {
        let drive = DriveConfig::new(1.0, 0.05, 0.1, nu, 3, 1, 1.0)?;
        let trunc = TruncationConfig::for_drive(&drive);
        let w = fourier_weights(&solve(&drive, &trunc)?, trunc.k_max)?;
        let d = dephasing_rate(&w, &drive, &noise)?;
        println!("{label}:");
        for (k, g) in w.iter().filter(|(_, g)| g.abs() > 1e-6) {
            let s = if k == 0 {
                f64::NAN
            } else {
                spectral_density(k as f64 * drive.omega, &noise)?
            };
            println!("  k = {k:>3}  g = {g:+.6e}  S(kω) = {s:.3e}");
        }
        println!(
            "  dc {:.3e}  ac {:.3e}  T_phi {:.4e}",
            d.term_dc, d.term_ac, d.t_phi
        );
    }
    Ok(())
}
