use crate::error::{invalid, Result};

/// Largest supported `|x|`.
pub const MAX_ARGUMENT: f64 = 100.0;
/// Largest supported `|order|`.
pub const MAX_ORDER: i64 = 200;

const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// Integer-order Bessel function of the first kind, `J_order(x)`.
pub fn bessel_j(order: i64, x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > MAX_ARGUMENT {
        return Err(invalid(
            "x",
            format!("|x| must be at most {MAX_ARGUMENT}, got {x}"),
        ));
    }
    if order.abs() > MAX_ORDER {
        return Err(invalid(
            "order",
            format!("|order| must be at most {MAX_ORDER}, got {order}"),
        ));
    }
    Ok(jn(order, x))
}

/// Unchecked `J_order(x)`; callers stay inside the supported domain.
pub(crate) fn jn(order: i64, x: f64) -> f64 {
    let n = order.unsigned_abs();
    // J_{-n} = (-1)^n J_n and J_n(-x) = (-1)^n J_n(x)
    let flips = (order < 0) as u64 + (x < 0.0) as u64;
    let v = jn_positive(n, x.abs());
    if flips % 2 == 1 && n % 2 == 1 {
        -v
    } else {
        v
    }
}

fn jn_positive(n: u64, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let q = 0.25 * x * x;
    if x <= 2.0 || q <= 0.25 * (n as f64 + 1.0) {
        series(n, x)
    } else {
        miller(n, x)
    }
}

fn series(n: u64, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut lead = 1.0;
    for i in 1..=n {
        lead *= half / i as f64;
    }
    if lead == 0.0 {
        return 0.0;
    }
    let q = half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200u64 {
        term *= -q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

fn miller(n: u64, x: f64) -> f64 {
    let reach = (n as f64).max(x);
    let mut m = (reach + 20.0 + 2.0 * (40.0 * reach).sqrt()) as u64;
    m += m % 2;

    let two_over_x = 2.0 / x;
    let mut above = 0.0;
    let mut current = 1e-30;
    let mut norm = 0.0;
    let mut wanted = 0.0;
    for k in (1..=m).rev() {
        let below = k as f64 * two_over_x * current - above;
        above = current;
        current = below;
        // `current` now holds the unnormalized value at order k - 1.
        if current.abs() > RESCALE_ABOVE {
            current *= RESCALE_BY;
            above *= RESCALE_BY;
            norm *= RESCALE_BY;
            wanted *= RESCALE_BY;
        }
        let order = k - 1;
        if order == n {
            wanted = current;
        }
        if order % 2 == 0 && order > 0 {
            norm += 2.0 * current;
        }
    }
    norm += current;
    wanted / norm
}
