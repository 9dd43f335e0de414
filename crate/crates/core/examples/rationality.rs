//! Computes the specialized plethystic logarithm of a partition function,
//! guesses a rational function for it and compares with a given one.
//!
//! ```text
//! cargo run --release --example rationality -- spp 1 12 "(x+2x^2+3x^3+2x^4+5x^5+6x^6+5x^7+2x^8+3x^9+2x^10+x^11)/(1-x^6)^2"
//! ```

use brane_dt::ideals::partition_function;
use brane_dt::model::builtin_tiling;
use brane_dt::series::{detect_recurrence, parse_rational_function, plethystic_log};

fn main() -> brane_dt::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map_or("c3", String::as_str);
    let vertex: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let d: u32 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(12);
    let t = builtin_tiling(name, None)?;
    let z = partition_function(&t, vertex, d)?;
    let log = plethystic_log(&z.to_series(t.vertex_count, d))?.specialize();
    println!("Log Z = {log}");
    let coeffs = log.coefficients()?;
    match detect_recurrence(&coeffs) {
        Some(g) => println!("guess: ({}) / ({})", g.numerator, g.denominator),
        None => println!("no recurrence short enough for {} terms", coeffs.len()),
    }
    if let Some(expr) = args.get(3) {
        let want = parse_rational_function(expr)?.expand(d)?;
        let verdict = if want == log { "matches" } else { "differs from" };
        println!("computed series {verdict} {expr} through degree {d}");
    }
    Ok(())
}
