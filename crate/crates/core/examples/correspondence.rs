//! Sends a few ideals to perfect matchings of the periodic tiling and prints
//! the matching difference and height function of each.
//!
//! ```text
//! cargo run --example correspondence -- conifold 0 3
//! ```

use brane_dt::dimer::{height_field, ideal_to_matching, matching_to_ideal};
use brane_dt::ideals::{enumerate_ideals, table_for};
use brane_dt::model::builtin_tiling;

fn main() -> brane_dt::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map_or("conifold", String::as_str);
    let vertex: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let size: u32 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(3);
    let t = builtin_tiling(name, None)?;
    let mt = table_for(&t, vertex, size, None)?;
    for om in enumerate_ideals(&mt, size)?.iter().filter(|o| o.len() == size as usize) {
        let d = ideal_to_matching(&mt, om)?;
        let h = height_field(&mt, &d)?;
        println!("ideal {:?}:", om.elements.iter().map(|c| format!("{}^{}", c.end, c.k)).collect::<Vec<_>>());
        print!("{}", d.serialize(&t));
        let heights: Vec<String> = h.values.iter().map(|(v, x)| format!("h({v})={x}")).collect();
        println!("{}", heights.join(" "));
        assert_eq!(&matching_to_ideal(&mt, &d)?, om);
        println!();
    }
    Ok(())
}
