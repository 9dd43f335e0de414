//! Computes the partition function a second way, from perfect matchings of
//! the periodic tiling and their height functions, and compares it with the
//! ideal count.
//!
//! ```text
//! cargo run --release --example matching_route -- spp 1 8
//! ```

use std::time::Instant;

use brane_dt::dimer::z_via_matchings;
use brane_dt::ideals::partition_function;
use brane_dt::model::builtin_tiling;

fn main() -> brane_dt::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map_or("conifold", String::as_str);
    let vertex: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let max_size: u32 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(6);
    let t = builtin_tiling(name, None)?;

    let start = Instant::now();
    let route = z_via_matchings(&t, vertex, max_size)?;
    let elapsed = start.elapsed();
    let ideals = partition_function(&t, vertex, max_size)?;

    println!("matchings counted: {}", route.matchings);
    println!(
        "branches pruned: {} negative height, {} oversize",
        route.pruned_negative, route.pruned_oversize
    );
    println!("by size: {:?}", route.series.by_size());
    println!("agrees with ideal count: {}", route.series == ideals);
    println!("time: {:.2?}", elapsed);
    Ok(())
}
