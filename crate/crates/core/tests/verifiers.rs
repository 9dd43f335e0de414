use brane_dt::model::{builtin_tiling, validate_tiling, Sign, TilingSpec};
use brane_dt::verify::{check_condition_c, consistency_report, verify_resolution_character, DEFAULT_MAX_STATES};

fn builtins() -> Vec<TilingSpec> {
    let mut v: Vec<TilingSpec> = ["c3", "conifold", "spp", "dp3"]
        .iter()
        .map(|n| builtin_tiling(n, None).unwrap())
        .collect();
    v.push(builtin_tiling("c3-zn", Some(3)).unwrap());
    v
}

/// True if some check rejects the tiling.
fn some_verifier_fails(t: &TilingSpec) -> bool {
    if !validate_tiling(t).ok() || !consistency_report(t).certified() {
        return true;
    }
    (0..t.vertex_count).any(|v| !matches!(verify_resolution_character(t, v, 4), Ok(r) if r.passed()))
}

#[test]
fn corrupted_face_orientation_is_caught() {
    for t in builtins() {
        assert!(!some_verifier_fails(&t));
        for f in 0..t.faces.len() {
            let mut flipped = t.clone();
            flipped.faces[f].sign = match flipped.faces[f].sign {
                Sign::Plus => Sign::Minus,
                Sign::Minus => Sign::Plus,
            };
            assert!(some_verifier_fails(&flipped), "sign flip of face {f}");
            let mut reversed = t.clone();
            reversed.faces[f].cycle.reverse();
            if reversed.faces[f].cycle.len() > 2 {
                assert!(some_verifier_fails(&reversed), "reversal of face {f}");
            }
        }
    }
}

#[test]
fn shortest_path_criteria_agree_on_all_builtins() {
    for t in builtins() {
        let r = check_condition_c(&t, None, DEFAULT_MAX_STATES).unwrap();
        assert!(r.criterion_mismatches.is_empty(), "{:?}", r.criterion_mismatches);
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        assert!(r.inconclusive.is_none());
    }
}

#[test]
fn character_identity_on_a_larger_orbifold() {
    let t = builtin_tiling("c3-zn", Some(5)).unwrap();
    for v in 0..t.vertex_count {
        assert!(verify_resolution_character(&t, v, 6).unwrap().passed());
    }
}
