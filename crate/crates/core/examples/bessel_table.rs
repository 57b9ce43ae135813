//! Integer-order Bessel functions and a few of the identities they satisfy.

use bichromatic_floquet::analytic::bessel_j;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for x in [0.5, 5.0, 25.0, 80.0] {
        let row: Vec<String> = [0, 1, 2, 5, 20]
            .iter()
            .map(|&n| bessel_j(n, x).map(|v| format!("{v:+.6e}")))
            .collect::<Result<_, _>>()?;
        println!("x = {x:>5}: {}", row.join("  "));
    }

    let x = 7.3;
    let mut norm = bessel_j(0, x)?.powi(2);
    for n in 1..=60 {
        norm += 2.0 * bessel_j(n, x)?.powi(2);
    }
    let recurrence = bessel_j(2, x)? - (2.0 / x) * bessel_j(1, x)? + bessel_j(0, x)?;
    println!("sum J_n^2 - 1         = {:.2e}", norm - 1.0);
    println!("J_2 - (2/x) J_1 + J_0 = {recurrence:.2e}");
    println!(
        "J_-3 + J_3            = {:.2e}",
        bessel_j(-3, x)? + bessel_j(3, x)?
    );
    Ok(())
}
