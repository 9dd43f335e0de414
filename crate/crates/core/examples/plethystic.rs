//! Plethystic exponential and logarithm on exact truncated series,
//! checked on MacMahon's function.
//!
//! ```text
//! cargo run --example plethystic -- 12
//! ```

use brane_dt::lp::Q;
use brane_dt::series::{plethystic_exp, plethystic_log, TruncatedSeries};

fn main() -> brane_dt::Result<()> {
    let d: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(12);
    let naturals: Vec<Q> = (0..=d as i64).map(|n| Q::from_integer(n.into())).collect();
    let f = TruncatedSeries::univariate(&naturals, d);
    let m = plethystic_exp(&f)?;
    println!("Exp(sum n x^n) = {m}");
    println!("Log of that    = {}", plethystic_log(&m)?);
    // Two variables: Exp(x0 + x1) = 1 / ((1 - x0)(1 - x1)).
    let g = TruncatedSeries::variable(2, 3, 0).add(&TruncatedSeries::variable(2, 3, 1))?;
    println!("Exp(x0 + x1)   = {}", plethystic_exp(&g)?);
    println!("psi_2(x0 + x1) = {}", g.adams(2)?);
    Ok(())
}
