//! `.obl` obligation manifests.
//!
//! ```text
//! #obligation union_commutes expect=unsat category=property
//! un(A,B,C) & un(B,A,D) & C neq D.
//! ```

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{parse_goal, SyntaxError};
use crate::prover::{Category, Expect, Obligation, ObligationManifest};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ManifestError {
    #[error("line {line}: {message}")]
    Header { line: u32, message: String },
    #[error("obligation `{name}` (line {line}): {source}")]
    Goal {
        name: String,
        line: u32,
        source: SyntaxError,
    },
    #[error("line {line}: duplicate obligation name `{name}`")]
    Duplicate { name: String, line: u32 },
}

const HEADER: &str = "#obligation";

pub fn parse_manifest(text: &str) -> Result<ObligationManifest, ManifestError> {
    let mut entries = Vec::new();
    let mut names = BTreeSet::new();
    let mut current: Option<(u32, String, Expect, Category, String)> = None;

    let finish = |cur: Option<(u32, String, Expect, Category, String)>,
                  entries: &mut Vec<Obligation>|
     -> Result<(), ManifestError> {
        if let Some((line, name, expect, category, body)) = cur {
            let goal = parse_goal(&body).map_err(|source| ManifestError::Goal {
                name: name.clone(),
                line,
                source: shift(source, line),
            })?;
            entries.push(Obligation {
                name,
                category,
                expect,
                goal,
            });
        }
        Ok(())
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx as u32 + 1;
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix(HEADER) {
            finish(current.take(), &mut entries)?;
            let (name, expect, category) = parse_header(rest, line_no)?;
            if !names.insert(name.clone()) {
                return Err(ManifestError::Duplicate {
                    name,
                    line: line_no,
                });
            }
            current = Some((line_no, name, expect, category, String::new()));
        } else if let Some((_, _, _, _, body)) = current.as_mut() {
            body.push_str(raw);
            body.push('\n');
        } else if !line.is_empty() && !line.starts_with('%') {
            return Err(ManifestError::Header {
                line: line_no,
                message: "goal text before the first `#obligation` header".to_string(),
            });
        }
    }
    finish(current.take(), &mut entries)?;
    Ok(ObligationManifest { entries })
}

/// Goal bodies start on the line after their header.
fn shift(e: SyntaxError, header_line: u32) -> SyntaxError {
    match e {
        SyntaxError::Char { line, col, ch } => SyntaxError::Char {
            line: line + header_line,
            col,
            ch,
        },
        SyntaxError::Unexpected {
            line,
            col,
            expected,
            found,
        } => SyntaxError::Unexpected {
            line: line + header_line,
            col,
            expected,
            found,
        },
        SyntaxError::Invalid { line, col, message } => SyntaxError::Invalid {
            line: line + header_line,
            col,
            message,
        },
        other => other,
    }
}

fn parse_header(rest: &str, line: u32) -> Result<(String, Expect, Category), ManifestError> {
    let err = |message: String| ManifestError::Header { line, message };
    let mut words = rest.split_whitespace();
    let name = words
        .next()
        .ok_or_else(|| err("missing obligation name".into()))?;
    if !name
        .chars()
        .all(|c| c.is_alphanumeric() || c == '_' || c == '-')
    {
        return Err(err(format!("invalid obligation name `{name}`")));
    }
    let (mut expect, mut category) = (None, None);
    for w in words {
        if let Some(v) = w.strip_prefix("expect=") {
            expect = Some(
                Expect::from_word(v).ok_or_else(|| err(format!("unknown expectation `{v}`")))?,
            );
        } else if let Some(v) = w.strip_prefix("category=") {
            category =
                Some(Category::from_word(v).ok_or_else(|| err(format!("unknown category `{v}`")))?);
        } else {
            return Err(err(format!("unexpected header field `{w}`")));
        }
    }
    Ok((
        name.to_string(),
        expect.ok_or_else(|| err("missing expect=".into()))?,
        category.ok_or_else(|| err("missing category=".into()))?,
    ))
}

pub fn write_manifest(m: &ObligationManifest) -> String {
    let mut out = String::new();
    for o in &m.entries {
        out.push_str(&format!(
            "{HEADER} {} expect={} category={}\n{}.\n",
            o.name,
            o.expect.word(),
            o.category.word(),
            o.goal
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "% sample\n\
#obligation union_commutes expect=unsat category=property\n\
un(A,B,C) &\n  un(B,A,D) & C neq D.\n\
#obligation member expect=sat category=op-sat\n\
X in {1}.\n";

    #[test]
    fn parses_entries() {
        let m = parse_manifest(SAMPLE).unwrap();
        assert_eq!(m.entries.len(), 2);
        assert_eq!(m.entries[0].expect, Expect::Unsat);
        assert_eq!(m.entries[1].category, Category::OpSat);
    }

    #[test]
    fn write_then_parse() {
        let m = parse_manifest(SAMPLE).unwrap();
        let again = parse_manifest(&write_manifest(&m)).unwrap();
        assert_eq!(again.entries.len(), 2);
        assert_eq!(
            again.entries[0].goal.to_string(),
            m.entries[0].goal.to_string()
        );
    }

    #[test]
    fn duplicate_names_rejected() {
        let t = "#obligation a expect=sat category=op-sat\nX = 1.\n#obligation a expect=sat category=op-sat\nX = 2.\n";
        assert!(matches!(
            parse_manifest(t),
            Err(ManifestError::Duplicate { .. })
        ));
    }

    #[test]
    fn goal_errors_carry_absolute_lines() {
        let t = "#obligation a expect=sat category=op-sat\nX = {1,\n";
        match parse_manifest(t) {
            Err(ManifestError::Goal { source, .. }) => assert_eq!(source.position().0, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_manifest() {
        assert!(parse_manifest("").unwrap().entries.is_empty());
    }
}
