//! Pentagon classification against the type table and the tentative
//! 3-valent vertex profile.

use serde::Serialize;

use crate::geometry::{AngleVector, EdgeVector, Tolerance, VERTEX_LABELS};
use crate::labels::{Relabel, Triple};
use crate::table::{TypeDefinition, TypeTable};

/// A relation that failed, but by less than ten times its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NearMiss {
    pub type_name: String,
    pub relation: String,
    /// Residual divided by the tolerance it was tested against.
    pub ratio: f64,
}

/// A matching type together with the relabeling under which it matched.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeMatch {
    pub type_name: String,
    /// `relabel[i]` is the original vertex playing the role of table vertex `i`.
    pub relabel: [usize; 5],
    pub reflected: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ClassificationResult {
    /// Matching edge-to-edge types, in table order.
    pub types: Vec<String>,
    /// Matching non-edge-to-edge entries, kept apart.
    pub other_types: Vec<String>,
    pub matches: Vec<TypeMatch>,
    pub near_misses: Vec<NearMiss>,
}

impl ClassificationResult {
    pub fn contains(&self, name: &str) -> bool {
        self.types.iter().any(|t| t == name)
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }
}

/// Largest residual ratio (residual / tolerance) of one type under one labeling,
/// with the worst offending relation's text.
fn type_residual(
    def: &TypeDefinition,
    angles: &AngleVector,
    edges: &EdgeVector,
    tol: &Tolerance,
) -> (f64, String) {
    let mut worst = (0.0f64, String::new());
    let mut bump = |ratio: f64, text: &str| {
        if ratio > worst.0 || worst.1.is_empty() && ratio >= worst.0 {
            worst = (ratio, text.to_string());
        }
    };
    for r in &def.angle_relations {
        let lhs: f64 = r.coef.iter().zip(angles.0).map(|(&c, a)| c as f64 * a).sum();
        let weight: i64 = r.coef.iter().map(|c| c.abs()).sum();
        let res = (lhs - r.rhs as f64).abs() / weight as f64;
        bump(res / tol.angle, &r.text);
    }
    let scale = edges.max();
    let e = edges.0.map(|x| x / scale);
    for class in &def.edge_classes {
        let lo = class.iter().map(|&i| e[i]).fold(f64::INFINITY, f64::min);
        let hi = class.iter().map(|&i| e[i]).fold(0.0, f64::max);
        let text: Vec<String> = class
            .iter()
            .map(|&i| crate::geometry::EDGE_LABELS[i].to_string())
            .collect();
        bump((hi - lo) / tol.len, &text.join("="));
    }
    for r in &def.edge_relations {
        let lhs: f64 = r.coef.iter().zip(e).map(|(&c, x)| c as f64 * x).sum();
        let weight: i64 = r.coef.iter().map(|c| c.abs()).sum();
        bump(lhs.abs() / weight as f64 / tol.len, &r.text);
    }
    worst
}

/// Every table type the pentagon satisfies under some relabeling of its
/// vertices (rotation or reflection of the label sequence).
pub fn classify(
    angles: &AngleVector,
    edges: &EdgeVector,
    table: &TypeTable,
    tol: &Tolerance,
) -> ClassificationResult {
    let mut out = ClassificationResult::default();
    for def in &table.types {
        let mut best: Option<(f64, String)> = None;
        let mut matched = None;
        for r in Relabel::dihedral() {
            let (ratio, text) = type_residual(def, &r.angles(angles), &r.edges(edges), tol);
            if ratio <= 1.0 {
                matched = Some(r);
                break;
            }
            if best.as_ref().is_none_or(|b| ratio < b.0) {
                best = Some((ratio, text));
            }
        }
        if let Some(r) = matched {
            if def.edge_to_edge {
                out.types.push(def.name.clone());
            } else {
                out.other_types.push(def.name.clone());
            }
            out.matches.push(TypeMatch {
                type_name: def.name.clone(),
                relabel: r.vertex,
                reflected: r.reflected,
            });
        } else if let Some((ratio, relation)) = best.filter(|b| b.0 < 10.0) {
            out.near_misses.push(NearMiss {
                type_name: def.name.clone(),
                relation,
                ratio,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TentativeNodeProfile {
    /// For each vertex label, the size-3 multisets containing it whose
    /// angles sum to 360.
    pub per_vertex: [Vec<Triple>; 5],
    pub qualifying: usize,
}

impl TentativeNodeProfile {
    pub fn triples(&self) -> Vec<Triple> {
        let mut all: Vec<Triple> = self.per_vertex.iter().flatten().copied().collect();
        all.sort();
        all.dedup();
        all
    }

    pub fn qualifying_labels(&self) -> Vec<char> {
        (0..5)
            .filter(|&i| !self.per_vertex[i].is_empty())
            .map(|i| VERTEX_LABELS[i])
            .collect()
    }
}

pub fn tentative_3valent_profile(angles: &AngleVector, tol: &Tolerance) -> TentativeNodeProfile {
    let mut per_vertex: [Vec<Triple>; 5] = Default::default();
    for t in Triple::all() {
        if (t.angle_sum(angles) - 360.0).abs() <= tol.angle {
            for v in t.distinct() {
                per_vertex[v as usize].push(t);
            }
        }
    }
    let qualifying = per_vertex.iter().filter(|l| !l.is_empty()).count();
    TentativeNodeProfile {
        per_vertex,
        qualifying,
    }
}

/// Exactly three vertices can sit in 3-valent nodes, so any tiling uses only
/// 3- and 4-valent nodes.
pub fn corollary1_applies(profile: &TentativeNodeProfile) -> bool {
    profile.qualifying == 3
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn regular_is_unclassified() {
        let t = TypeTable::shipped();
        let r = classify(&AngleVector([108.0; 5]), &EdgeVector([1.0; 5]), &t, &tol());
        assert!(r.types.is_empty());
        assert!(r.other_types.is_empty());
    }

    #[test]
    fn type15_matches_no_edge_to_edge_type() {
        let t = TypeTable::shipped();
        let c = (6f64.sqrt() + 2f64.sqrt()) / 2.0;
        let r = classify(
            &AngleVector([150.0, 60.0, 135.0, 105.0, 90.0]),
            &EdgeVector([2.0, 1.0, c, 1.0, 1.0]),
            &t,
            &tol(),
        );
        assert!(r.types.is_empty(), "{:?}", r.types);
        assert_eq!(r.other_types, vec!["15".to_string()]);
    }

    #[test]
    fn relabeled_type4_still_matches() {
        let t = TypeTable::shipped();
        // Cairo pentagon, then rotate the labels by two.
        let a = AngleVector([120.0, 120.0, 90.0, 120.0, 90.0]);
        let e = EdgeVector([3f64.sqrt() - 1.0, 1.0, 1.0, 1.0, 1.0]);
        let r = Relabel::rotation(2);
        let res = classify(&r.angles(&a), &r.edges(&e), &t, &tol());
        assert!(res.contains("4"), "{res:?}");
    }

    #[test]
    fn profile_counts() {
        let p = tentative_3valent_profile(&AngleVector([108.0; 5]), &tol());
        assert_eq!(p.qualifying, 0);
        assert!(!corollary1_applies(&p));
        let p = tentative_3valent_profile(&AngleVector([120.0, 120.0, 120.0, 90.0, 90.0]), &tol());
        assert_eq!(p.qualifying, 3);
        assert!(corollary1_applies(&p));
        assert_eq!(p.triples().len(), 10);
    }
}
