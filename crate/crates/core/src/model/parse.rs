use std::collections::HashMap;

use super::{Arrow, Face, Sign, TilingSpec};
use crate::error::{Error, Result};

#[derive(PartialEq, PartialOrd)]
enum Section {
    Start,
    Arrows,
    Faces,
}

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        msg: msg.into(),
    }
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses the line-oriented tiling format:
///
/// ```text
/// vertices <N>
/// arrow <name> <src> <dst> <dx> <dy>
/// face <+|-> <arrow> <arrow> ...
/// ```
///
/// `#` starts a comment. Only syntax and name resolution are checked here;
/// see [`super::validate_tiling`] for the semantic invariants.
pub fn parse_tiling(text: &str) -> Result<TilingSpec> {
    let mut section = Section::Start;
    let mut vertex_count: Option<usize> = None;
    let mut arrows: Vec<Arrow> = Vec::new();
    let mut names: HashMap<String, usize> = HashMap::new();
    let mut faces: Vec<Face> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some(&head) = tokens.first() else {
            continue;
        };
        match head {
            "vertices" => {
                if vertex_count.is_some() || section != Section::Start {
                    return Err(syntax(line, "`vertices` must appear once, first"));
                }
                if tokens.len() != 2 {
                    return Err(syntax(line, "expected `vertices <N>`"));
                }
                let n: usize = tokens[1]
                    .parse()
                    .map_err(|_| syntax(line, format!("bad vertex count `{}`", tokens[1])))?;
                vertex_count = Some(n);
            }
            "arrow" => {
                let n = vertex_count.ok_or_else(|| syntax(line, "`vertices` must come first"))?;
                if section == Section::Faces {
                    return Err(syntax(line, "arrows must be declared before faces"));
                }
                section = Section::Arrows;
                if tokens.len() != 6 {
                    return Err(syntax(line, "expected `arrow <name> <src> <dst> <dx> <dy>`"));
                }
                let name = tokens[1];
                if !valid_name(name) {
                    return Err(syntax(line, format!("bad arrow name `{name}`")));
                }
                let vertex = |s: &str| -> Result<usize> {
                    let v: usize = s
                        .parse()
                        .map_err(|_| syntax(line, format!("bad vertex `{s}`")))?;
                    if v >= n {
                        return Err(syntax(line, format!("vertex {v} out of range 0..{n}")));
                    }
                    Ok(v)
                };
                let int = |s: &str| -> Result<i32> {
                    s.parse()
                        .map_err(|_| syntax(line, format!("bad shift component `{s}`")))
                };
                let arrow = Arrow {
                    name: name.to_string(),
                    src: vertex(tokens[2])?,
                    dst: vertex(tokens[3])?,
                    shift: (int(tokens[4])?, int(tokens[5])?),
                };
                if names.contains_key(name) {
                    return Err(Error::DuplicateArrow {
                        line,
                        name: name.to_string(),
                    });
                }
                names.insert(name.to_string(), arrows.len());
                arrows.push(arrow);
            }
            "face" => {
                if vertex_count.is_none() {
                    return Err(syntax(line, "`vertices` must come first"));
                }
                section = Section::Faces;
                if tokens.len() < 3 {
                    return Err(syntax(line, "expected `face <+|-> <arrow> ...`"));
                }
                let sign = match tokens[1] {
                    "+" => Sign::Plus,
                    "-" => Sign::Minus,
                    s => return Err(syntax(line, format!("bad face sign `{s}`"))),
                };
                let cycle = tokens[2..]
                    .iter()
                    .map(|&nm| {
                        names.get(nm).copied().ok_or_else(|| Error::UnknownArrow {
                            line,
                            name: nm.to_string(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                faces.push(Face { sign, cycle });
            }
            other => return Err(syntax(line, format!("unknown keyword `{other}`"))),
        }
    }

    let vertex_count = vertex_count.ok_or_else(|| syntax(0, "missing `vertices` line"))?;
    Ok(TilingSpec {
        vertex_count,
        arrows,
        faces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const C3: &str = "\
# C^3: one vertex, three loops
vertices 1
arrow x 0 0 1 0
arrow y 0 0 0 1
arrow z 0 0 -1 -1
face + x y z
face - x z y
";

    #[test]
    fn parses_c3() {
        let t = parse_tiling(C3).unwrap();
        assert_eq!(t.vertex_count, 1);
        assert_eq!(t.arrows.len(), 3);
        assert_eq!(t.faces.len(), 2);
        assert_eq!(t.arrows[2].shift, (-1, -1));
        assert_eq!(t.faces[1].cycle, vec![0, 2, 1]);
    }

    #[test]
    fn unknown_arrow() {
        let err = parse_tiling(&C3.replace("face - x z y", "face - x w y")).unwrap_err();
        assert_eq!(
            err,
            Error::UnknownArrow {
                line: 7,
                name: "w".into()
            }
        );
        assert!(err.to_string().contains("unknown arrow"));
    }

    #[test]
    fn duplicate_arrow() {
        let err = parse_tiling(&C3.replace("arrow y", "arrow x")).unwrap_err();
        assert!(matches!(err, Error::DuplicateArrow { line: 4, .. }));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let cases = [
            ("vertices 1\narrow x 0 0 1\n", 2),
            ("arrow x 0 0 1 0\n", 1),
            ("vertices 1\narrow x 0 1 1 0\n", 2),
            ("vertices 1\narrow x 0 0 1 0\nface * x\n", 3),
            ("vertices 1\narrow x 0 0 1 0\nface + x\narrow y 0 0 0 1\n", 4),
            ("vertices 1\nvertices 2\n", 2),
            ("vertices 1\nbogus\n", 2),
            ("vertices 1\narrow x-y 0 0 0 0\n", 2),
        ];
        for (text, line) in cases {
            match parse_tiling(text) {
                Err(Error::Syntax { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }
}
