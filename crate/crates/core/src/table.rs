//! The pentagon type table: a line-oriented text format holding linear angle
//! relations and edge conditions per type, parsed and validated on load.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::labels::{edge_index, vertex_index};

/// The table shipped with the crate.
pub const DEFAULT_TABLE: &str = include_str!("../data/types.table");

/// Number of edge-to-edge types a valid table must contain.
pub const EDGE_TO_EDGE_TYPE_COUNT: usize = 8;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("type {type_name} (line {line}): relation `{relation}`: {message}")]
    Validation {
        type_name: String,
        line: usize,
        relation: String,
        message: String,
    },
    #[error("table must define exactly {EDGE_TO_EDGE_TYPE_COUNT} edge-to-edge types, found {0}")]
    WrongTypeCount(usize),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// `sum coef_i * angle_i = rhs` (degrees).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AngleRelation {
    pub coef: [i64; 5],
    pub rhs: i64,
    pub text: String,
}

/// `sum coef_i * edge_i = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeRelation {
    pub coef: [i64; 5],
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeDefinition {
    pub name: String,
    pub edge_to_edge: bool,
    pub angle_relations: Vec<AngleRelation>,
    /// Groups of edges with equal length, each of size >= 2, disjoint.
    pub edge_classes: Vec<Vec<usize>>,
    pub edge_relations: Vec<EdgeRelation>,
    #[serde(skip)]
    pub line: usize,
}

impl fmt::Display for TypeDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "type {}:", self.name)?;
        for r in &self.angle_relations {
            write!(f, " {};", r.text)?;
        }
        for c in &self.edge_classes {
            let s: Vec<String> = c
                .iter()
                .map(|&i| crate::geometry::EDGE_LABELS[i].to_string())
                .collect();
            write!(f, " {};", s.join("="))?;
        }
        for r in &self.edge_relations {
            write!(f, " {};", r.text)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeTable {
    pub types: Vec<TypeDefinition>,
}

impl TypeTable {
    pub fn edge_to_edge(&self) -> impl Iterator<Item = &TypeDefinition> {
        self.types.iter().filter(|t| t.edge_to_edge)
    }

    pub fn get(&self, name: &str) -> Option<&TypeDefinition> {
        self.types.iter().find(|t| t.name == name)
    }

    pub fn shipped() -> TypeTable {
        parse_type_table(DEFAULT_TABLE).expect("shipped type table is valid")
    }
}

pub fn load_type_table(path: &Path) -> Result<TypeTable, TableError> {
    let text = std::fs::read_to_string(path).map_err(|source| TableError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_type_table(&text)
}

/// A parsed but not yet validated linear form: `(coefficient, label)` terms.
type RawForm = Vec<(i64, char)>;

fn parse_form(s: &str, line: usize) -> Result<RawForm, TableError> {
    let err = |message: String| TableError::Parse { line, message };
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(err("empty linear form".into()));
    }
    let mut terms = Vec::new();
    let mut chars = compact.chars().peekable();
    while chars.peek().is_some() {
        let mut sign = 1;
        match chars.peek() {
            Some('+') => {
                chars.next();
            }
            Some('-') => {
                sign = -1;
                chars.next();
            }
            _ if !terms.is_empty() => return Err(err(format!("expected + or - in `{s}`"))),
            _ => {}
        }
        let mut digits = String::new();
        while let Some(c) = chars.peek().filter(|c| c.is_ascii_digit()) {
            digits.push(*c);
            chars.next();
        }
        let coef: i64 = if digits.is_empty() {
            1
        } else {
            digits
                .parse()
                .map_err(|_| err(format!("bad coefficient `{digits}`")))?
        };
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() => terms.push((sign * coef, c)),
            Some(c) => return Err(err(format!("unexpected `{c}` in `{s}`"))),
            None => return Err(err(format!("dangling coefficient in `{s}`"))),
        }
    }
    Ok(terms)
}

struct Pending {
    def: TypeDefinition,
    raw_angles: Vec<(RawForm, String, usize)>,
    raw_edges: Vec<(Vec<String>, usize)>,
    raw_edge_rel: Vec<(RawForm, RawForm, String, usize)>,
}

pub fn parse_type_table(text: &str) -> Result<TypeTable, TableError> {
    let types = parse_type_definitions(text)?;
    let n = types.iter().filter(|t| t.edge_to_edge).count();
    if n != EDGE_TO_EDGE_TYPE_COUNT {
        return Err(TableError::WrongTypeCount(n));
    }
    Ok(TypeTable { types })
}

/// Parse and validate `type` blocks without checking the table's shape.
pub fn parse_type_definitions(text: &str) -> Result<Vec<TypeDefinition>, TableError> {
    let mut pending: Vec<Pending> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = content
            .split_once(char::is_whitespace)
            .map(|(k, r)| (k, r.trim()))
            .unwrap_or((content, ""));
        let perr = |message: String| TableError::Parse { line, message };
        if keyword == "type" {
            let fields: Vec<&str> = rest.split_whitespace().collect();
            let [name, kind] = fields[..] else {
                return Err(perr(
                    "expected `type <name> edge-to-edge|non-edge-to-edge`".into(),
                ));
            };
            let edge_to_edge = match kind {
                "edge-to-edge" => true,
                "non-edge-to-edge" => false,
                other => return Err(perr(format!("unknown type kind `{other}`"))),
            };
            pending.push(Pending {
                def: TypeDefinition {
                    name: name.to_string(),
                    edge_to_edge,
                    angle_relations: Vec::new(),
                    edge_classes: Vec::new(),
                    edge_relations: Vec::new(),
                    line,
                },
                raw_angles: Vec::new(),
                raw_edges: Vec::new(),
                raw_edge_rel: Vec::new(),
            });
            continue;
        }
        let Some(cur) = pending.last_mut() else {
            return Err(perr(format!("`{keyword}` before any `type` line")));
        };
        match keyword {
            "angle" => {
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| perr(format!("angle relation `{rest}` lacks `=`")))?;
                let rhs: i64 = rhs
                    .trim()
                    .parse()
                    .map_err(|_| perr(format!("right-hand side `{}` is not an integer", rhs.trim())))?;
                let form = parse_form(lhs, line)?;
                cur.raw_angles.push((form, rest.to_string(), line));
                cur.def.angle_relations.push(AngleRelation {
                    coef: [0; 5],
                    rhs,
                    text: rest.to_string(),
                });
            }
            "edges" => {
                let groups: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if groups.is_empty() {
                    return Err(perr("`edges` needs at least one group".into()));
                }
                cur.raw_edges.push((groups, line));
            }
            "edge-relation" => {
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| perr(format!("edge relation `{rest}` lacks `=`")))?;
                let l = parse_form(lhs, line)?;
                let r = parse_form(rhs, line)?;
                cur.raw_edge_rel.push((l, r, rest.to_string(), line));
            }
            other => return Err(perr(format!("unknown directive `{other}`"))),
        }
    }
    if pending.is_empty() {
        return Err(TableError::Parse {
            line: 0,
            message: "no type definitions found".into(),
        });
    }
    let mut types = Vec::with_capacity(pending.len());
    for p in pending {
        types.push(validate(p)?);
    }
    let names: BTreeSet<&str> = types.iter().map(|t| t.name.as_str()).collect();
    if names.len() != types.len() {
        return Err(TableError::Parse {
            line: 0,
            message: "duplicate type names".into(),
        });
    }
    Ok(types)
}

fn validate(p: Pending) -> Result<TypeDefinition, TableError> {
    let mut def = p.def;
    let verr = |relation: &str, line: usize, message: String| TableError::Validation {
        type_name: def.name.clone(),
        line,
        relation: relation.to_string(),
        message,
    };
    for (i, (form, text, line)) in p.raw_angles.iter().enumerate() {
        let mut coef = [0i64; 5];
        for &(c, label) in form {
            let v = vertex_index(label)
                .ok_or_else(|| verr(text, *line, format!("unknown vertex label `{label}`")))?;
            coef[v] += c;
        }
        if coef.iter().all(|&c| c == 0) {
            return Err(verr(text, *line, "all coefficients vanish".into()));
        }
        let rel = &mut def.angle_relations[i];
        if rel.rhs % 180 != 0 {
            return Err(verr(
                text,
                *line,
                format!("right-hand side {} is not a multiple of 180", rel.rhs),
            ));
        }
        rel.coef = coef;
    }
    let mut seen = [false; 5];
    for (groups, line) in &p.raw_edges {
        for g in groups {
            let mut class = Vec::new();
            for part in g.split('=') {
                let mut cs = part.chars();
                let (Some(c), None) = (cs.next(), cs.next()) else {
                    return Err(verr(g, *line, format!("`{part}` is not a single edge label")));
                };
                let e = edge_index(c)
                    .ok_or_else(|| verr(g, *line, format!("unknown edge label `{c}`")))?;
                if seen[e] {
                    return Err(verr(g, *line, format!("edge `{c}` appears in two groups")));
                }
                seen[e] = true;
                class.push(e);
            }
            if class.len() < 2 {
                return Err(verr(g, *line, "an equality group needs two edges".into()));
            }
            class.sort_unstable();
            def.edge_classes.push(class);
        }
    }
    for (lhs, rhs, text, line) in &p.raw_edge_rel {
        let mut coef = [0i64; 5];
        for (side, sign) in [(lhs, 1), (rhs, -1)] {
            for &(c, label) in side {
                let e = edge_index(label)
                    .ok_or_else(|| verr(text, *line, format!("unknown edge label `{label}`")))?;
                coef[e] += sign * c;
            }
        }
        if coef.iter().all(|&c| c == 0) {
            return Err(verr(text, *line, "relation is trivially true".into()));
        }
        def.edge_relations.push(EdgeRelation {
            coef,
            text: text.clone(),
        });
    }
    Ok(def)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_table_has_eight_edge_to_edge_types() {
        let t = TypeTable::shipped();
        let names: Vec<&str> = t.edge_to_edge().map(|d| d.name.as_str()).collect();
        assert_eq!(names, ["1", "2", "4", "5", "6", "7", "8", "9"]);
        assert!(t.get("15").is_some_and(|d| !d.edge_to_edge));
    }

    #[test]
    fn relation_coefficients() {
        let t = TypeTable::shipped();
        let t7 = t.get("7").unwrap();
        assert_eq!(t7.angle_relations[0].coef, [0, 2, 1, 0, 0]);
        assert_eq!(t7.angle_relations[1].coef, [1, 0, 0, 2, 0]);
        assert_eq!(t7.edge_classes, vec![vec![0, 1, 2, 4]]);
        let t6 = t.get("6").unwrap();
        assert_eq!(t6.angle_relations[1].coef, [1, 0, -2, 0, 0]);
        let t3 = t.get("3").unwrap();
        assert_eq!(t3.edge_relations[0].coef, [0, -1, 1, -1, 0]);
    }

    #[test]
    fn unknown_label_is_a_validation_error() {
        let text = DEFAULT_TABLE.replace("angle B + C + D = 360", "angle B + C + F = 360");
        match parse_type_table(&text) {
            Err(TableError::Validation {
                type_name,
                relation,
                ..
            }) => {
                assert_eq!(type_name, "1");
                assert!(relation.contains('F'));
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn empty_file_is_a_parse_error() {
        assert!(matches!(
            parse_type_table(""),
            Err(TableError::Parse { .. })
        ));
        assert!(matches!(
            parse_type_table("# only comments\n\n"),
            Err(TableError::Parse { .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let text = "type 1 edge-to-edge\n  angle B + C + D 360\n";
        match parse_type_table(text) {
            Err(TableError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rhs_must_be_multiple_of_180() {
        let text = DEFAULT_TABLE.replace("angle 3A = 180", "angle A = 60");
        assert!(matches!(
            parse_type_table(&text),
            Err(TableError::Validation { .. })
        ));
    }

    #[test]
    fn missing_type_is_rejected() {
        let cut = DEFAULT_TABLE.split("type 9 edge-to-edge").next().unwrap();
        assert!(matches!(
            parse_type_table(cut),
            Err(TableError::WrongTypeCount(7))
        ));
    }
}
