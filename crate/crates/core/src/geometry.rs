//! Planar primitives for convex pentagons.
//!
//! Labels follow one fixed convention throughout the crate: vertices
//! `A..E` run counterclockwise and edge `a` joins `A -> B`, `b` joins
//! `B -> C`, and so on up to `e` joining `E -> A`. Angles are interior
//! angles in degrees.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const VERTEX_LABELS: [char; 5] = ['A', 'B', 'C', 'D', 'E'];
pub const EDGE_LABELS: [char; 5] = ['a', 'b', 'c', 'd', 'e'];

/// Numeric tolerances. `len` is relative to a unit-diameter shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub angle: f64,
    pub len: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            angle: 1e-6,
            len: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn from_angle_deg(deg: f64) -> Self {
        let r = deg.to_radians();
        Vec2::new(r.cos(), r.sin())
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn rotate(self, rad: f64) -> Vec2 {
        let (s, c) = rad.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Interior angles `A..E` in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleVector(pub [f64; 5]);

/// Edge lengths `a..e`; only ratios matter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeVector(pub [f64; 5]);

impl AngleVector {
    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn is_valid(&self, tol: &Tolerance) -> bool {
        (self.sum() - 540.0).abs() <= tol.angle && self.0.iter().all(|a| a.is_finite())
    }

    pub fn is_convex(&self) -> bool {
        self.0.iter().all(|&a| a > 0.0 && a < 180.0)
    }

    /// Heading in degrees of each directed edge when `a` points along +x.
    pub fn edge_headings(&self) -> [f64; 5] {
        let mut h = [0.0; 5];
        for i in 1..5 {
            h[i] = h[i - 1] + 180.0 - self.0[i];
        }
        h
    }

    pub fn edge_directions(&self) -> [Vec2; 5] {
        self.edge_headings().map(Vec2::from_angle_deg)
    }
}

impl EdgeVector {
    pub fn is_valid(&self) -> bool {
        self.0.iter().all(|&e| e.is_finite() && e > 0.0)
    }

    pub fn scaled(&self, s: f64) -> EdgeVector {
        EdgeVector(self.0.map(|e| e * s))
    }

    pub fn max(&self) -> f64 {
        self.0.iter().cloned().fold(0.0, f64::max)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("angles sum to {sum} degrees, expected 540")]
    AngleSum { sum: f64 },
    #[error("edge lengths must be finite and positive")]
    InvalidEdges,
    #[error("pentagon does not close: defect {defect:e} exceeds tolerance")]
    NotClosed { defect: f64 },
    #[error("pentagon is not convex at vertex {vertex}")]
    NotConvex { vertex: char },
}

/// Sum of the five directed edges traversed with the given interior angles.
/// Zero exactly when the data describe a closed pentagon.
pub fn closure_defect(angles: &AngleVector, edges: &EdgeVector) -> Vec2 {
    angles
        .edge_directions()
        .iter()
        .zip(edges.0.iter())
        .fold(Vec2::ZERO, |acc, (&d, &len)| acc + d * len)
}

/// A realized convex pentagon, vertices counterclockwise starting at `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PentagonShape {
    pub vertices: [Vec2; 5],
    pub angles: AngleVector,
    pub edges: EdgeVector,
}

/// Realize angle and edge data with `A` at the origin and `a` along +x.
pub fn build_pentagon(
    angles: &AngleVector,
    edges: &EdgeVector,
    tol: &Tolerance,
) -> Result<PentagonShape, GeometryError> {
    if !edges.is_valid() {
        return Err(GeometryError::InvalidEdges);
    }
    if let Some(i) = angles.0.iter().position(|&a| !(a > 0.0 && a < 180.0)) {
        return Err(GeometryError::NotConvex {
            vertex: VERTEX_LABELS[i],
        });
    }
    if !angles.is_valid(tol) {
        return Err(GeometryError::AngleSum { sum: angles.sum() });
    }
    let scale: f64 = edges.0.iter().sum::<f64>() / 2.0;
    let defect = closure_defect(angles, edges).norm() / scale;
    if defect > tol.len {
        return Err(GeometryError::NotClosed { defect });
    }
    let dirs = angles.edge_directions();
    let mut vertices = [Vec2::ZERO; 5];
    for i in 1..5 {
        vertices[i] = vertices[i - 1] + dirs[i - 1] * edges.0[i - 1];
    }
    let shape = PentagonShape {
        vertices,
        angles: *angles,
        edges: *edges,
    };
    for i in 0..5 {
        let prev = vertices[(i + 4) % 5];
        let next = vertices[(i + 1) % 5];
        if (vertices[i] - prev).cross(next - vertices[i]) <= 0.0 {
            return Err(GeometryError::NotConvex {
                vertex: VERTEX_LABELS[i],
            });
        }
    }
    Ok(shape)
}

impl PentagonShape {
    pub fn area(&self) -> f64 {
        polygon_area(&self.vertices)
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..5 {
            for j in i + 1..5 {
                d = d.max(self.vertices[i].dist(self.vertices[j]));
            }
        }
        d
    }

    /// Uniformly rescaled copy with diameter 1.
    pub fn normalized(&self) -> PentagonShape {
        let s = 1.0 / self.diameter();
        PentagonShape {
            vertices: self.vertices.map(|v| v * s),
            angles: self.angles,
            edges: self.edges.scaled(s),
        }
    }

    pub fn measured_angles(&self) -> AngleVector {
        AngleVector(interior_angles(&self.vertices))
    }

    pub fn measured_edges(&self) -> EdgeVector {
        let v = &self.vertices;
        EdgeVector(std::array::from_fn(|i| v[i].dist(v[(i + 1) % 5])))
    }
}

/// Interior angles in degrees of a counterclockwise convex polygon.
pub fn interior_angles(v: &[Vec2; 5]) -> [f64; 5] {
    std::array::from_fn(|i| {
        let prev = v[(i + 4) % 5];
        let next = v[(i + 1) % 5];
        let a = prev - v[i];
        let b = next - v[i];
        b.cross(a).atan2(b.dot(a)).to_degrees().rem_euclid(360.0)
    })
}

pub fn polygon_area(v: &[Vec2]) -> f64 {
    let n = v.len();
    (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum::<f64>() / 2.0
}

/// Rigid motion of the plane, optionally composed with the reflection
/// `(x, y) -> (x, -y)` applied first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Congruence {
    /// Rotation in radians.
    pub rotation: f64,
    pub translation: Vec2,
    pub mirrored: bool,
}

impl Congruence {
    pub const IDENTITY: Congruence = Congruence {
        rotation: 0.0,
        translation: Vec2::ZERO,
        mirrored: false,
    };

    pub fn apply(&self, p: Vec2) -> Vec2 {
        self.apply_linear(p) + self.translation
    }

    pub fn apply_linear(&self, p: Vec2) -> Vec2 {
        let p = if self.mirrored { Vec2::new(p.x, -p.y) } else { p };
        p.rotate(self.rotation)
    }

    /// `self.compose(other)` maps `p` to `self(other(p))`.
    pub fn compose(&self, other: &Congruence) -> Congruence {
        let inner = if self.mirrored {
            -other.rotation
        } else {
            other.rotation
        };
        Congruence {
            rotation: self.rotation + inner,
            translation: self.apply_linear(other.translation) + self.translation,
            mirrored: self.mirrored ^ other.mirrored,
        }
    }

    pub fn inverse(&self) -> Congruence {
        let rotation = if self.mirrored {
            self.rotation
        } else {
            -self.rotation
        };
        let lin = Congruence {
            rotation,
            translation: Vec2::ZERO,
            mirrored: self.mirrored,
        };
        Congruence {
            translation: -lin.apply_linear(self.translation),
            ..lin
        }
    }

    /// Reflection across the line through the origin at `axis_rad`.
    pub fn reflection(axis_rad: f64) -> Congruence {
        Congruence {
            rotation: 2.0 * axis_rad,
            translation: Vec2::ZERO,
            mirrored: true,
        }
    }

    pub fn translation(t: Vec2) -> Congruence {
        Congruence {
            translation: t,
            ..Congruence::IDENTITY
        }
    }

    /// Maximum displacement this congruence applies to the given points.
    pub fn max_displacement(&self, pts: &[Vec2]) -> f64 {
        pts.iter()
            .map(|&p| self.apply(p).dist(p))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Overlap {
    Disjoint,
    SharesBoundaryOnly,
    InteriorsIntersect,
}

/// Overlap classification of two placed shapes.
pub fn overlap(
    shape1: &PentagonShape,
    c1: &Congruence,
    shape2: &PentagonShape,
    c2: &Congruence,
    tol: f64,
) -> Overlap {
    let p1 = oriented_points(shape1, c1);
    let p2 = oriented_points(shape2, c2);
    convex_overlap(&p1, &p2, tol)
}

/// World vertices of a placed shape, reordered counterclockwise if mirrored.
pub fn oriented_points(shape: &PentagonShape, c: &Congruence) -> [Vec2; 5] {
    let mut p = shape.vertices.map(|v| c.apply(v));
    if c.mirrored {
        p.reverse();
    }
    p
}

/// Separating-axis test for two counterclockwise convex polygons.
pub fn convex_overlap(a: &[Vec2], b: &[Vec2], tol: f64) -> Overlap {
    let mut max_gap = f64::NEG_INFINITY;
    for (poly, _) in [(a, b), (b, a)] {
        let n = poly.len();
        for i in 0..n {
            let e = poly[(i + 1) % n] - poly[i];
            let len = e.norm();
            if len == 0.0 {
                continue;
            }
            let axis = e.perp() * (1.0 / len);
            let (amin, amax) = project(a, axis);
            let (bmin, bmax) = project(b, axis);
            let gap = (bmin - amax).max(amin - bmax);
            if gap > tol {
                return Overlap::Disjoint;
            }
            max_gap = max_gap.max(gap);
        }
    }
    if max_gap >= -tol {
        Overlap::SharesBoundaryOnly
    } else {
        Overlap::InteriorsIntersect
    }
}

fn project(pts: &[Vec2], axis: Vec2) -> (f64, f64) {
    pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let d = p.dot(axis);
        (lo.min(d), hi.max(d))
    })
}

/// True when `p` lies on segment `a-b` strictly away from both endpoints.
pub fn on_segment_interior(p: Vec2, a: Vec2, b: Vec2, tol: f64) -> bool {
    let ab = b - a;
    let len = ab.norm();
    if len <= tol {
        return false;
    }
    let t = (p - a).dot(ab) / (len * len);
    if t * len <= tol || (1.0 - t) * len <= tol {
        return false;
    }
    (ab.cross(p - a) / len).abs() <= tol
}

/// Convex point containment, boundary included within `tol`.
pub fn point_in_convex(p: Vec2, poly: &[Vec2], tol: f64) -> bool {
    let n = poly.len();
    (0..n).all(|i| {
        let a = poly[i];
        let e = poly[(i + 1) % n] - a;
        e.cross(p - a) / e.norm() >= -tol
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regular() -> (AngleVector, EdgeVector) {
        (AngleVector([108.0; 5]), EdgeVector([1.0; 5]))
    }

    #[test]
    fn regular_closes() {
        let (a, e) = regular();
        assert!(closure_defect(&a, &e).norm() < 1e-12);
        let s = build_pentagon(&a, &e, &Tolerance::default()).unwrap();
        for (m, x) in s.measured_angles().0.iter().zip(a.0) {
            assert!((m - x).abs() < 1e-9);
        }
        for m in s.measured_edges().0 {
            assert!((m - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn perturbed_edge_breaks_closure() {
        let (a, _) = regular();
        let e = EdgeVector([1.0, 1.0, 1.0, 1.0, 2.0]);
        assert!(closure_defect(&a, &e).norm() > 0.5);
        assert!(matches!(
            build_pentagon(&a, &e, &Tolerance::default()),
            Err(GeometryError::NotClosed { .. })
        ));
    }

    #[test]
    fn reflex_angle_rejected() {
        let a = AngleVector([190.0, 100.0, 100.0, 75.0, 75.0]);
        let e = EdgeVector([1.0; 5]);
        assert!(matches!(
            build_pentagon(&a, &e, &Tolerance::default()),
            Err(GeometryError::NotConvex { vertex: 'A' })
        ));
    }

    #[test]
    fn cairo_closure_root() {
        // Edges (1, 1, x, x, 1): the defect's x-component is linear in x.
        let a = AngleVector([120.0, 120.0, 90.0, 120.0, 90.0]);
        let f = |x: f64| closure_defect(&a, &EdgeVector([1.0, 1.0, x, x, 1.0]));
        let (mut lo, mut hi) = (0.5, 2.0);
        assert!(f(lo).x * f(hi).x < 0.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if f(lo).x * f(mid).x <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let x = 0.5 * (lo + hi);
        assert!(f(x).norm() < 1e-12);
        assert!((x - 2.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn overlap_cases() {
        let (a, e) = regular();
        let s = build_pentagon(&a, &e, &Tolerance::default()).unwrap();
        let id = Congruence::IDENTITY;
        let far = Congruence::translation(Vec2::new(2.0 * s.diameter(), 0.0));
        assert_eq!(overlap(&s, &id, &s, &far, 1e-9), Overlap::Disjoint);
        assert_eq!(overlap(&s, &id, &s, &id, 1e-9), Overlap::InteriorsIntersect);
        // reflect across edge a (the x-axis)
        let refl = Congruence::reflection(0.0);
        assert_eq!(
            overlap(&s, &id, &s, &refl, 1e-9),
            Overlap::SharesBoundaryOnly
        );
    }

    #[test]
    fn congruence_inverse_and_mirror() {
        let c = Congruence {
            rotation: 0.7,
            translation: Vec2::new(1.5, -2.0),
            mirrored: true,
        };
        let id = c.compose(&c.inverse());
        let pts = [Vec2::new(0.3, 0.2), Vec2::new(-1.0, 4.0)];
        assert!(id.max_displacement(&pts) < 1e-12);
        let r = Congruence::reflection(0.3);
        assert!(r.compose(&r).max_displacement(&pts) < 1e-12);
    }
}
