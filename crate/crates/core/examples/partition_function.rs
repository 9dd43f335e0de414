//! Counts ideals of the path poset for a builtin tiling.
//!
//! ```text
//! cargo run --release --example partition_function -- spp 1 10
//! ```

use brane_dt::ideals::partition_function;
use brane_dt::model::builtin_tiling;

fn main() -> brane_dt::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map_or("c3", String::as_str);
    let vertex: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let max_size: u32 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(6);
    let t = builtin_tiling(name, None)?;
    let z = partition_function(&t, vertex, max_size)?;
    print!("{}", z.to_text());
    println!("# by size: {:?}", z.by_size());
    Ok(())
}
