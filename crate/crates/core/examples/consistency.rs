//! Consistency certificate, direct extension search and resolution
//! character check for one tiling.
//!
//! Usage: `cargo run --release --example consistency -- spp`

use std::time::Instant;

use brane_dt::model::builtin_tiling;
use brane_dt::verify::{consistency_report_with_search, verify_resolution_character, DEFAULT_MAX_STATES};

fn main() -> brane_dt::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "spp".into());
    let param = args.next().map(|p| p.parse().expect("integer parameter"));
    let t = builtin_tiling(&name, param)?;
    let start = Instant::now();
    let report = consistency_report_with_search(&t, None, DEFAULT_MAX_STATES);
    print!("{report}");
    println!("search time: {:.2?}", start.elapsed());
    for v in 0..t.vertex_count {
        let start = Instant::now();
        let check = verify_resolution_character(&t, v, 6)?;
        println!(
            "vertex {v}: character identity {} on {} weights ({:.2?})",
            if check.passed() { "holds" } else { "FAILS" },
            check.weights_checked,
            start.elapsed()
        );
    }
    Ok(())
}
