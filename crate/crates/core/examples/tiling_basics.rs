//! Parses a tiling, validates it and prints the quiver data derived from it:
//! potential, weight lattice, perfect matchings and an R-charge.
//!
//! ```text
//! cargo run --example tiling_basics
//! cargo run --example tiling_basics -- path/to/file.tiling
//! ```

use brane_dt::matching::{perfect_matchings, r_charge};
use brane_dt::model::{builtin_tiling, parse_tiling, potential_terms, validate_tiling, weight_lattice};

fn main() -> brane_dt::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable tiling file"),
        None => builtin_tiling("conifold", None)?.to_text(),
    };
    let t = parse_tiling(&text)?;
    print!("{text}");
    print!("{}", validate_tiling(&t));
    println!("potential:");
    for term in potential_terms(&t) {
        println!("  {term}");
    }
    let w = weight_lattice(&t)?;
    println!("weight lattice rank {} (ambient {})", w.lattice_rank, w.ambient_rank);
    println!("omega_bar = {:?}", w.omega_bar);
    let ms = perfect_matchings(&t);
    println!("{} perfect matchings:", ms.len());
    for m in &ms {
        println!("  {}", m.serialize(&t));
    }
    let r = r_charge(&t)?;
    for (a, v) in t.arrows.iter().zip(&r.values) {
        println!("R({}) = {v}", a.name);
    }
    Ok(())
}
