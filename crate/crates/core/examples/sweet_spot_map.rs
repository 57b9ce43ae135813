//! Coarse (b, ν) map with sweet and sour spots, written as CSV.

use bichromatic_floquet::noise::NoiseModel;
use bichromatic_floquet::sweep::{
    find_sweet_spots, sweep_grid, DriveTemplate, GridSpec, LinearRange, OmegaPolicy, ScanOptions,
};
use std::f64::consts::FRAC_PI_2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = GridSpec {
        b_range: LinearRange::new(-1.0, 1.0, 41)?,
        nu_range: LinearRange::new(0.0, FRAC_PI_2, 21)?,
        omega_policy: OmegaPolicy::Fixed(1.0),
        template: DriveTemplate {
            w_q: 1.0,
            big_omega: 0.1,
            n1: 3,
            n2: 1,
        },
    };
    let result = sweep_grid(&spec, &ScanOptions::default(), &NoiseModel::default())?;
    let report = find_sweet_spots(&result, 1e-3, 1e-3, 1e-1);

    let path = std::env::temp_dir().join("sweet_spot_map.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["b", "nu", "dgap_db", "dgap_dOmega", "t_phi"])?;
    for p in &result.points {
        w.write_record(
            [p.b, p.nu, p.obs.dgap_db, p.obs.dgap_domega, p.obs.t_phi].map(|v| v.to_string()),
        )?;
    }
    w.flush()?;

    println!("wrote {}", path.display());
    println!(
        "dc sweet {}  doubly sweet {}  sour {}",
        report.dc_sweet.len(),
        report.doubly_sweet.len(),
        report.sour.len()
    );
    if let Some(best) = result.max_t_phi() {
        println!(
            "max T_phi {:.3e} at b = {:+.2}, nu = {:.3}",
            best.obs.t_phi, best.b, best.nu
        );
    }
    Ok(())
}
