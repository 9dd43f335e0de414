//! Walks the first layers of the path poset of a builtin tiling: each class
//! is a point of the universal cover together with a power of the face
//! cycle.
//!
//! ```text
//! cargo run --example path_poset -- conifold 0 3
//! ```

use std::collections::BTreeSet;

use brane_dt::cover::PathClass;
use brane_dt::ideals::table_for;
use brane_dt::model::builtin_tiling;

fn main() -> brane_dt::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map_or("c3", String::as_str);
    let vertex: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let depth: u32 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(3);
    let t = builtin_tiling(name, None)?;
    let mt = table_for(&t, vertex, depth + 1, None)?;
    let mut layer = BTreeSet::from([PathClass::new(vertex, (0, 0), 0)]);
    for level in 0..=depth {
        let shown: Vec<String> = layer.iter().map(|c| format!("{}^{}", c.end, c.k)).collect();
        println!("length {level}: {}", shown.join("  "));
        let mut next = BTreeSet::new();
        for c in &layer {
            for (_, child) in mt.class_children(c)? {
                next.insert(child);
            }
        }
        layer = next;
    }
    Ok(())
}
