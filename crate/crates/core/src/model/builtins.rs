//! Built-in tilings. Shift vectors are one valid fundamental-domain
//! presentation of each torus embedding; any other valid choice yields the
//! same periodic quiver up to relabeling of cells.

use super::{parse_tiling, validate_tiling, TilingSpec};
use crate::error::{Error, Result};

const C3: &str = "\
vertices 1
arrow x 0 0 1 0
arrow y 0 0 0 1
arrow z 0 0 -1 -1
face + x y z
face - x z y
";

// x_i : i -> i+1, y_i : i+1 -> i.
const CONIFOLD: &str = "\
vertices 2
arrow x0 0 1 0 0
arrow x1 1 0 1 0
arrow y0 1 0 -1 -1
arrow y1 0 1 0 1
face + x0 x1 y1 y0
face - x1 x0 y0 y1
";

// Vertex k of the usual picture is index k mod 3, so vertex 1 (with the
// loop) is index 1 and vertex 3 is index 0.
const SPP: &str = "\
vertices 3
arrow x11 1 1 -1 -1
arrow x12 1 2 0 1
arrow x21 2 1 1 0
arrow x23 2 0 0 0
arrow x32 0 2 -1 -1
arrow x13 1 0 0 0
arrow x31 0 1 1 1
face + x21 x12 x23 x32
face - x32 x23 x31 x13
face + x13 x31 x11
face - x12 x21 x11
";

// Model I of dP3; vertex k is index k mod 6.
const DP3: &str = "\
vertices 6
arrow x12 1 2 -1 -1
arrow x23 2 3 0 0
arrow x34 3 4 0 1
arrow x45 4 5 1 0
arrow x56 5 0 0 0
arrow x61 0 1 0 0
arrow x13 1 3 0 -1
arrow x35 3 5 0 0
arrow x51 5 1 0 1
arrow x24 2 4 0 0
arrow x46 4 0 0 0
arrow x62 0 2 0 0
face + x12 x23 x34 x45 x56 x61
face + x13 x35 x51
face + x24 x46 x62
face - x23 x35 x56 x62
face - x13 x34 x46 x61
face - x12 x24 x45 x51
";

pub fn builtin_names() -> &'static [&'static str] {
    &["c3", "conifold", "c3-zn", "spp", "dp3"]
}

/// Orbifold C^3/Z_n with action (1,0,-1): x_i : i -> i+1, y_i : i+1 -> i,
/// loops z_i, faces `+ z_{i+1} y_i x_i` and `- x_i y_i z_i`.
fn c3_zn_text(n: usize) -> String {
    let mut s = format!("vertices {n}\n");
    for i in 0..n {
        let j = (i + 1) % n;
        let (xs, ys) = if i + 1 < n { ((0, 0), (1, 0)) } else { ((0, 1), (1, -1)) };
        s += &format!("arrow x{i} {i} {j} {} {}\n", xs.0, xs.1);
        s += &format!("arrow y{i} {j} {i} {} {}\n", ys.0, ys.1);
        s += &format!("arrow z{i} {i} {i} -1 0\n");
    }
    for i in 0..n {
        let j = (i + 1) % n;
        s += &format!("face + z{j} y{i} x{i}\n");
        s += &format!("face - x{i} y{i} z{i}\n");
    }
    s
}

pub fn builtin_tiling(name: &str, param: Option<u32>) -> Result<TilingSpec> {
    let text = match name {
        "c3" => C3.to_string(),
        "conifold" => CONIFOLD.to_string(),
        "spp" => SPP.to_string(),
        "dp3" => DP3.to_string(),
        "c3-zn" => {
            let n = param.ok_or_else(|| Error::InvalidParameter {
                name: name.into(),
                msg: "missing parameter n".into(),
            })?;
            if n < 2 {
                return Err(Error::InvalidParameter {
                    name: name.into(),
                    msg: format!("n must be at least 2, got {n}"),
                });
            }
            c3_zn_text(n as usize)
        }
        other => return Err(Error::UnknownBuiltin(other.to_string())),
    };
    if name != "c3-zn" && param.is_some() {
        return Err(Error::InvalidParameter {
            name: name.into(),
            msg: "takes no parameter".into(),
        });
    }
    let t = parse_tiling(&text)?;
    let report = validate_tiling(&t);
    if !report.ok() {
        return Err(Error::InvalidTiling(report.to_string()));
    }
    Ok(t)
}
