//! Vertex/edge label bookkeeping: size-3 angle multisets and the dihedral
//! relabelings of a pentagon.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::{AngleVector, EdgeVector, EDGE_LABELS, VERTEX_LABELS};

pub fn vertex_index(c: char) -> Option<usize> {
    VERTEX_LABELS.iter().position(|&l| l == c)
}

pub fn edge_index(c: char) -> Option<usize> {
    EDGE_LABELS.iter().position(|&l| l == c)
}

/// Three vertex labels with repetition, sorted. Represents an angle
/// equation such as `A + B + D = 360` or `2A + B = 360`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Triple(pub [u8; 3]);

impl Triple {
    pub fn new(mut labels: [u8; 3]) -> Triple {
        labels.sort_unstable();
        Triple(labels)
    }

    /// All 35 size-3 multisets over five labels in lexicographic order.
    pub fn all() -> Vec<Triple> {
        let mut out = Vec::with_capacity(35);
        for i in 0..5u8 {
            for j in i..5 {
                for k in j..5 {
                    out.push(Triple([i, j, k]));
                }
            }
        }
        out
    }

    pub fn contains(&self, v: u8) -> bool {
        self.0.contains(&v)
    }

    pub fn distinct(&self) -> Vec<u8> {
        let mut d = self.0.to_vec();
        d.dedup();
        d
    }

    /// Coefficient of each label in the equation.
    pub fn counts(&self) -> [i64; 5] {
        let mut c = [0; 5];
        for &l in &self.0 {
            c[l as usize] += 1;
        }
        c
    }

    pub fn angle_sum(&self, angles: &AngleVector) -> f64 {
        self.0.iter().map(|&l| angles.0[l as usize]).sum()
    }

    pub fn relabel(&self, r: &Relabel) -> Triple {
        let inv = r.vertex_inverse();
        Triple::new(self.0.map(|l| inv[l as usize] as u8))
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let counts = self.counts();
        let mut first = true;
        for (i, &n) in counts.iter().enumerate() {
            if n == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            if n > 1 {
                write!(f, "{n}")?;
            }
            write!(f, "{}", VERTEX_LABELS[i])?;
        }
        Ok(())
    }
}

impl FromStr for Triple {
    type Err = String;

    /// Accepts `A+B+D`, `2A+B`, `3C` and also `ABD`.
    fn from_str(s: &str) -> Result<Self, String> {
        let mut labels = Vec::new();
        for term in s.split('+').map(str::trim).filter(|t| !t.is_empty()) {
            let digits: String = term.chars().take_while(|c| c.is_ascii_digit()).collect();
            let rest = &term[digits.len()..];
            let n: usize = if digits.is_empty() {
                1
            } else {
                digits.parse().map_err(|_| format!("bad count in `{term}`"))?
            };
            for c in rest.chars() {
                let v = vertex_index(c).ok_or_else(|| format!("unknown vertex label `{c}`"))?;
                for _ in 0..n {
                    labels.push(v as u8);
                }
            }
        }
        if labels.len() != 3 {
            return Err(format!("`{s}` names {} angles, expected 3", labels.len()));
        }
        Ok(Triple::new([labels[0], labels[1], labels[2]]))
    }
}

impl From<Triple> for String {
    fn from(t: Triple) -> String {
        t.to_string()
    }
}

impl TryFrom<String> for Triple {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

/// A dihedral relabeling: new vertex `i` is old vertex `vertex[i]`, new
/// edge `i` is old edge `edge[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Relabel {
    pub vertex: [usize; 5],
    pub edge: [usize; 5],
    pub reflected: bool,
}

impl Relabel {
    pub fn rotation(k: usize) -> Relabel {
        Relabel {
            vertex: std::array::from_fn(|i| (i + k) % 5),
            edge: std::array::from_fn(|i| (i + k) % 5),
            reflected: false,
        }
    }

    pub fn reflection(k: usize) -> Relabel {
        Relabel {
            vertex: std::array::from_fn(|i| (k + 5 - i) % 5),
            edge: std::array::from_fn(|i| (k + 9 - i) % 5),
            reflected: true,
        }
    }

    /// The ten symmetries of the labeled pentagon, identity first.
    pub fn dihedral() -> Vec<Relabel> {
        (0..5)
            .map(Relabel::rotation)
            .chain((0..5).map(Relabel::reflection))
            .collect()
    }

    pub fn vertex_inverse(&self) -> [usize; 5] {
        let mut inv = [0; 5];
        for (i, &v) in self.vertex.iter().enumerate() {
            inv[v] = i;
        }
        inv
    }

    pub fn edge_inverse(&self) -> [usize; 5] {
        let mut inv = [0; 5];
        for (i, &e) in self.edge.iter().enumerate() {
            inv[e] = i;
        }
        inv
    }

    pub fn angles(&self, a: &AngleVector) -> AngleVector {
        AngleVector(self.vertex.map(|v| a.0[v]))
    }

    pub fn edges(&self, e: &EdgeVector) -> EdgeVector {
        EdgeVector(self.edge.map(|i| e.0[i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thirty_five_triples() {
        assert_eq!(Triple::all().len(), 35);
    }

    #[test]
    fn parse_and_display() {
        let t: Triple = "2A+B".parse().unwrap();
        assert_eq!(t, Triple([0, 0, 1]));
        assert_eq!(t.to_string(), "2A+B");
        assert_eq!("A + B + D".parse::<Triple>().unwrap().to_string(), "A+B+D");
        assert!("A+F+B".parse::<Triple>().is_err());
        assert!("A+B".parse::<Triple>().is_err());
    }

    #[test]
    fn reflection_keeps_edges_between_their_vertices() {
        for r in Relabel::dihedral() {
            // new edge i must join new vertices i and i+1
            for i in 0..5 {
                let (u, v) = (r.vertex[i], r.vertex[(i + 1) % 5]);
                let e = r.edge[i];
                let ends = [e, (e + 1) % 5];
                assert!(ends.contains(&u) && ends.contains(&v), "{r:?} edge {i}");
            }
        }
    }
}
