//! Pentagon spec files.
//!
//! ```text
//! # comment
//! [cairo]
//! angles = 120, 120, 90, 120, 90
//! edges  = 0.7320508075688772, 1, 1, 1, 1
//! expect = 2, 4          # or `none`
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{AngleVector, EdgeVector};

pub const CORPUS: &str = include_str!("../data/corpus.pent");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PentagonSpec {
    pub name: String,
    pub angles: AngleVector,
    pub edges: EdgeVector,
    /// Edge-to-edge types the pentagon is expected to belong to.
    pub expect: Option<Vec<String>>,
    pub line: usize,
}

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Default)]
struct Block {
    name: String,
    line: usize,
    angles: Option<[f64; 5]>,
    edges: Option<[f64; 5]>,
    expect: Option<Vec<String>>,
}

fn five(value: &str, what: &str, line: usize) -> Result<[f64; 5], SpecError> {
    let err = |message: String| SpecError::Parse { line, message };
    let nums = value
        .split(',')
        .map(|v| {
            let v = v.trim();
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| err(format!("`{v}` is not a number")))
        })
        .collect::<Result<Vec<f64>, SpecError>>()?;
    nums.try_into()
        .map_err(|v: Vec<f64>| err(format!("{what} needs 5 values, got {}", v.len())))
}

fn finish(b: Block) -> Result<PentagonSpec, SpecError> {
    let err = |message: String| SpecError::Parse { line: b.line, message };
    let angles = b.angles.ok_or_else(|| err(format!("[{}] has no angles", b.name)))?;
    let edges = b.edges.ok_or_else(|| err(format!("[{}] has no edges", b.name)))?;
    let sum: f64 = angles.iter().sum();
    if (sum - 540.0).abs() > 1e-6 {
        return Err(err(format!("[{}] angles sum to {sum}, expected 540", b.name)));
    }
    if angles.iter().any(|&a| a <= 0.0 || a >= 180.0) {
        return Err(err(format!("[{}] is not convex", b.name)));
    }
    if edges.iter().any(|&e| e <= 0.0) {
        return Err(err(format!("[{}] has a non-positive edge", b.name)));
    }
    Ok(PentagonSpec {
        name: b.name,
        angles: AngleVector(angles),
        edges: EdgeVector(edges),
        expect: b.expect,
        line: b.line,
    })
}

pub fn parse_specs(text: &str) -> Result<Vec<PentagonSpec>, SpecError> {
    let mut out = Vec::new();
    let mut cur: Option<Block> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| SpecError::Parse { line, message };
        if let Some(name) = content.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .map(str::trim)
                .filter(|n| !n.is_empty())
                .ok_or_else(|| err(format!("bad section header `{content}`")))?;
            if let Some(b) = cur.take() {
                out.push(finish(b)?);
            }
            if out.iter().any(|s: &PentagonSpec| s.name == name) {
                return Err(err(format!("duplicate name `{name}`")));
            }
            cur = Some(Block {
                name: name.to_string(),
                line,
                ..Block::default()
            });
            continue;
        }
        let b = cur.as_mut().ok_or_else(|| err("key outside a [section]".into()))?;
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
        match key {
            "angles" => b.angles = Some(five(value, "angles", line)?),
            "edges" => b.edges = Some(five(value, "edges", line)?),
            "expect" => {
                b.expect = Some(if value == "none" {
                    Vec::new()
                } else {
                    value.split(',').map(|s| s.trim().to_string()).collect()
                })
            }
            other => return Err(err(format!("unknown key `{other}`"))),
        }
    }
    if let Some(b) = cur {
        out.push(finish(b)?);
    }
    if out.is_empty() {
        return Err(SpecError::Parse {
            line: 0,
            message: "no pentagons defined".into(),
        });
    }
    Ok(out)
}

pub fn load_specs(path: &Path) -> Result<Vec<PentagonSpec>, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_specs(&text)
}

pub fn corpus() -> Vec<PentagonSpec> {
    parse_specs(CORPUS).expect("shipped corpus parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_angles_is_rejected_with_line() {
        let text = "[bad]\n\nangles = 108, 108, 108, 216\nedges = 1,1,1,1,1\n";
        match parse_specs(text) {
            Err(SpecError::Parse { line: 3, message }) => assert!(message.contains("got 4"), "{message}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn comments_and_expectations() {
        let text = "# header\n[regular]  # trailing\nangles=108,108,108,108,108\nedges=1,1,1,1,1\nexpect = none\n[x]\nangles=90,90,90,135,135\nedges=1,1,1,1,1\nexpect=4, 2\n";
        let specs = parse_specs(text).unwrap();
        assert_eq!(specs.len(), 2);
        assert_eq!(specs[0].expect, Some(vec![]));
        assert_eq!(specs[1].expect, Some(vec!["4".to_string(), "2".to_string()]));
        assert_eq!(specs[1].line, 6);
    }

    #[test]
    fn errors_name_their_line() {
        for (text, line) in [
            ("angles = 1,2,3,4,5\n", 1),
            ("[a]\nangles = 108,108,108,108,x\n", 2),
            ("[a]\nangles = 100,100,100,100,100\nedges=1,1,1,1,1\n", 1),
            ("[a]\nshape = 1\n", 2),
            ("[a]\nangles=108,108,108,108,108\nedges=1,1,1,1,1\n[a]\n", 4),
        ] {
            match parse_specs(text) {
                Err(SpecError::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn corpus_has_every_edge_to_edge_type() {
        let c = corpus();
        for t in ["1", "2", "4", "5", "6", "7", "8", "9"] {
            assert!(c.iter().any(|s| s.name == format!("type{t}")), "type {t}");
        }
        assert!(c.iter().any(|s| s.name == "regular"));
        assert!(c.iter().any(|s| s.name == "type15"));
    }
}
