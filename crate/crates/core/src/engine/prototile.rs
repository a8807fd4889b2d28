use serde::{Deserialize, Serialize};

use crate::geometry::{build_pentagon, AngleVector, EdgeVector, GeometryError, PentagonShape, Tolerance, Vec2};

/// One chirality of the prototile in its own frame, corners listed
/// counterclockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variant {
    pub mirrored: bool,
    pub points: [Vec2; 5],
    /// Vertex label at each counterclockwise position.
    pub labels: [u8; 5],
    /// Edge label of the edge leaving each position.
    pub edge_labels: [u8; 5],
    pub angles: [f64; 5],
    pub lengths: [f64; 5],
}

/// The shared prototile: a unit-diameter convex pentagon with both
/// chiralities and a table of reachable corner-angle sums.
#[derive(Debug, Clone, PartialEq)]
pub struct Prototile {
    pub shape: PentagonShape,
    pub variants: [Variant; 2],
    pub min_angle: f64,
    /// `sums[c]`: sorted distinct sums of `c` corner angles not above 360.
    pub sums: Vec<Vec<f64>>,
}

pub const MIRROR_LABELS: [u8; 5] = [0, 4, 3, 2, 1];
pub const MIRROR_EDGE_LABELS: [u8; 5] = [4, 3, 2, 1, 0];

impl Prototile {
    pub fn new(angles: &AngleVector, edges: &EdgeVector, tol: &Tolerance) -> Result<Prototile, GeometryError> {
        let shape = build_pentagon(angles, edges, tol)?.normalized();
        Ok(Prototile::from_shape(shape, tol))
    }

    pub fn from_shape(shape: PentagonShape, tol: &Tolerance) -> Prototile {
        let a = shape.angles.0;
        let e = shape.edges.0;
        let direct = Variant {
            mirrored: false,
            points: shape.vertices,
            labels: [0, 1, 2, 3, 4],
            edge_labels: [0, 1, 2, 3, 4],
            angles: a,
            lengths: e,
        };
        let mirrored = Variant {
            mirrored: true,
            points: MIRROR_LABELS.map(|l| {
                let v = shape.vertices[l as usize];
                Vec2::new(v.x, -v.y)
            }),
            labels: MIRROR_LABELS,
            edge_labels: MIRROR_EDGE_LABELS,
            angles: MIRROR_LABELS.map(|l| a[l as usize]),
            lengths: MIRROR_EDGE_LABELS.map(|l| e[l as usize]),
        };
        let min_angle = a.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_count = ((360.0 + tol.angle) / min_angle).floor() as usize;
        let mut sums: Vec<Vec<f64>> = vec![vec![0.0]];
        for c in 1..=max_count {
            let mut next: Vec<f64> = Vec::new();
            for &s in &sums[c - 1] {
                for &x in &a {
                    if s + x <= 360.0 + tol.angle * (c as f64 + 1.0) {
                        next.push(s + x);
                    }
                }
            }
            next.sort_by(f64::total_cmp);
            next.dedup_by(|x, y| (*x - *y).abs() <= 1e-9);
            sums.push(next);
        }
        Prototile {
            shape,
            variants: [direct, mirrored],
            min_angle,
            sums,
        }
    }

    pub fn angle(&self, label: u8) -> f64 {
        self.shape.angles.0[label as usize]
    }

    /// Whether `gap` degrees can be filled by between 1 and `slots` corners.
    pub fn can_fill(&self, gap: f64, slots: usize, tol: f64) -> bool {
        (1..=slots.min(self.sums.len() - 1)).any(|c| {
            let t = tol * (c as f64 + 1.0);
            let v = &self.sums[c];
            let i = v.partition_point(|&s| s < gap - t);
            i < v.len() && v[i] <= gap + t
        })
    }

    pub fn max_valence(&self) -> usize {
        self.sums.len() - 1
    }
}
