//! Translation lattices of patches, torus quotients and exact node-valence
//! densities.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{tiles_with_trivalent, Patch, Prototile};
use crate::exact::Q;
use crate::geometry::{convex_overlap, on_segment_interior, point_in_convex, Congruence, Overlap, Tolerance, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodLattice {
    pub t1: Vec2,
    pub t2: Vec2,
}

impl PeriodLattice {
    pub fn det(&self) -> f64 {
        self.t1.cross(self.t2)
    }

    /// Lattice coordinates of `p`.
    pub fn coords(&self, p: Vec2) -> (f64, f64) {
        let d = self.det();
        (p.cross(self.t2) / d, self.t1.cross(p) / d)
    }

    pub fn point(&self, s: f64, t: f64) -> Vec2 {
        self.t1 * s + self.t2 * t
    }

    pub fn shift(&self, m: i64, n: i64) -> Vec2 {
        self.point(m as f64, n as f64)
    }

    /// `p` translated into the half-open fundamental parallelogram.
    pub fn reduce(&self, p: Vec2, eps: f64) -> (Vec2, (i64, i64)) {
        let (s, t) = self.coords(p);
        let wrap = |x: f64| {
            let mut f = x.floor();
            if x - f > 1.0 - eps {
                f += 1.0;
            }
            f
        };
        let (fs, ft) = (wrap(s), wrap(t));
        (p - self.point(fs, ft), (fs as i64, ft as i64))
    }

    /// Gauss-reduced basis of the same lattice, `t1` shortest, positive
    /// orientation.
    pub fn reduced(&self) -> PeriodLattice {
        let (mut a, mut b) = (self.t1, self.t2);
        loop {
            if b.norm() < a.norm() {
                std::mem::swap(&mut a, &mut b);
            }
            let mu = (a.dot(b) / a.dot(a)).round();
            if mu == 0.0 {
                break;
            }
            b = b - a * mu;
            if b.norm() >= a.norm() {
                break;
            }
        }
        if a.cross(b) < 0.0 {
            b = -b;
        }
        PeriodLattice { t1: a, t2: b }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PeriodError {
    #[error("patch is complete to depth {depth}, at least {required} is needed")]
    PatchTooSmall { depth: u32, required: u32 },
}

#[derive(Debug, Error, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "error", rename_all = "kebab-case")]
pub enum TorusError {
    #[error("tile {tile} has no translate by ({}, {}) in the patch", vector.x, vector.y)]
    NotInvariant { tile: usize, vector: Vec2 },
    #[error("{tiles} tiles of area {tile_area} do not fill a cell of area {cell_area}")]
    AreaMismatch { tiles: usize, tile_area: f64, cell_area: f64 },
    #[error("edge {edge} of torus tile {tile} has no mate modulo the lattice")]
    OpenBoundary { tile: usize, edge: usize },
    #[error("node at ({}, {}) has angle sum {angle_sum}", position.x, position.y)]
    NodeNotClosed { position: Vec2, angle_sum: f64 },
    #[error("torus tiles {a} and {b} overlap")]
    Overlap { a: usize, b: usize },
    #[error("a node lies inside edge {edge} of torus tile {tile}")]
    NotEdgeToEdge { tile: usize, edge: usize },
    #[error("torus tile {tile} is not congruent to the prototile")]
    NotCongruent { tile: usize },
    #[error("lattice vectors are parallel")]
    Degenerate,
}

fn orientation_eq(a: &Congruence, b: &Congruence) -> bool {
    a.mirrored == b.mirrored && {
        let d = (a.rotation - b.rotation).rem_euclid(2.0 * PI);
        d.min(2.0 * PI - d) <= 1e-7
    }
}

fn anchor(c: &Congruence) -> Vec2 {
    c.translation
}

struct Core<'a> {
    patch: &'a Patch,
    tiles: Vec<usize>,
}

impl Core<'_> {
    fn contains(&self, p: Vec2) -> bool {
        let tol = self.patch.tol.len;
        self.tiles
            .iter()
            .any(|&t| point_in_convex(p, &self.patch.tiles[t].points, tol))
    }

    /// A patch tile with the orientation of `like` whose anchor is `p`.
    fn tile_at(&self, p: Vec2, like: &Congruence) -> Option<usize> {
        let n = self.patch.find_node(p, self.patch.tol.len * 10.0)?;
        self.patch.nodes[n]
            .corners
            .iter()
            .map(|&(t, _)| t)
            .find(|&t| {
                let c = &self.patch.tiles[t].congruence;
                orientation_eq(c, like) && anchor(c).dist(p) <= self.patch.tol.len * 10.0
            })
    }

    /// Core tiles whose translate by `v` should lie in the patch but does not.
    fn violation(&self, v: Vec2) -> Option<usize> {
        self.tiles.iter().copied().find(|&k| {
            let c = &self.patch.tiles[k].congruence;
            let target = anchor(c) + v;
            self.contains(target) && self.tile_at(target, c).is_none()
        })
    }
}

fn core_of(patch: &Patch) -> Core<'_> {
    let d = patch.completed_depth();
    Core {
        patch,
        tiles: (0..patch.tiles.len())
            .filter(|&t| patch.tiles[t].ring < d)
            .collect(),
    }
}

/// Translation vectors that map every core tile landing inside the core
/// onto a tile of the patch, shortest first, one of each `+-t` pair.
pub fn period_candidates(patch: &Patch, min_depth: u32) -> Result<Vec<Vec2>, PeriodError> {
    let depth = patch.completed_depth();
    if depth < min_depth.max(1) || patch.tiles.len() < 2 {
        return Err(PeriodError::PatchTooSmall {
            depth,
            required: min_depth,
        });
    }
    let core = core_of(patch);
    let eps = 1e-7;
    let mut cands: Vec<Vec2> = Vec::new();
    for &i in &core.tiles {
        for &j in &core.tiles {
            let (ci, cj) = (&patch.tiles[i].congruence, &patch.tiles[j].congruence);
            if i == j || !orientation_eq(ci, cj) {
                continue;
            }
            let v = anchor(cj) - anchor(ci);
            if v.y < -eps || (v.y.abs() <= eps && v.x <= 0.0) {
                continue;
            }
            if !cands.iter().any(|c| c.dist(v) <= eps) {
                cands.push(v);
            }
        }
    }
    cands.sort_by(|a, b| {
        a.norm()
            .total_cmp(&b.norm())
            .then(a.y.atan2(a.x).total_cmp(&b.y.atan2(b.x)))
    });
    Ok(cands
        .into_iter()
        .filter(|&v| core.violation(v).is_none() && core.violation(-v).is_none())
        .collect())
}

/// The two shortest independent surviving translations, Gauss-reduced.
pub fn detect_periods(patch: &Patch, min_depth: u32) -> Result<Option<PeriodLattice>, PeriodError> {
    let s = period_candidates(patch, min_depth)?;
    Ok(lattice_from(&s))
}

pub fn lattice_from(survivors: &[Vec2]) -> Option<PeriodLattice> {
    let t1 = *survivors.first()?;
    let t2 = *survivors
        .iter()
        .find(|v| t1.cross(**v).abs() > 1e-6 * t1.norm() * v.norm())?;
    Some(PeriodLattice { t1, t2 }.reduced())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusTile {
    pub congruence: Congruence,
    pub points: [Vec2; 5],
    pub labels: [u8; 5],
    /// Node class of each corner.
    pub nodes: [usize; 5],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusNode {
    /// Representative position inside the fundamental parallelogram.
    pub position: Vec2,
    pub corners: Vec<(usize, u8)>,
    pub angle_sum: f64,
}

impl TorusNode {
    pub fn valence(&self) -> usize {
        self.corners.len()
    }
}

/// Edge `edge` of `tile` mates edge `mate_edge` of `mate` shifted by `shift`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeMating {
    pub tile: usize,
    pub edge: usize,
    pub mate: usize,
    pub mate_edge: usize,
    pub shift: (i64, i64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusTiling {
    pub lattice: PeriodLattice,
    pub tiles: Vec<TorusTile>,
    pub nodes: Vec<TorusNode>,
    pub matings: Vec<EdgeMating>,
}

impl TorusTiling {
    pub fn corner_valences(&self) -> Vec<[usize; 5]> {
        self.tiles
            .iter()
            .map(|t| t.nodes.map(|n| self.nodes[n].valence()))
            .collect()
    }
}

const SHIFTS: std::ops::RangeInclusive<i64> = -2..=2;

/// Quotient of `patch` by `lattice`, validated: the result is a certificate
/// that the fundamental domain tiles the plane periodically, edge to edge.
pub fn build_torus(patch: &Patch, lattice: &PeriodLattice) -> Result<TorusTiling, TorusError> {
    let tol = patch.tol;
    if lattice.det().abs() <= tol.len {
        return Err(TorusError::Degenerate);
    }
    let core = core_of(patch);
    for g in [lattice.t1, lattice.t2, -lattice.t1, -lattice.t2] {
        if let Some(tile) = core.violation(g) {
            return Err(TorusError::NotInvariant { tile, vector: g });
        }
    }
    let eps = 1e-9;
    // one representative per (orientation, anchor modulo lattice)
    // outer-ring tiles are only constrained on one side; classes come from the core
    let mut order: Vec<usize> = core.tiles.clone();
    order.sort_by_key(|&t| (patch.tiles[t].ring, t));
    let mut tiles: Vec<TorusTile> = Vec::new();
    for t in order {
        let pt = &patch.tiles[t];
        let (a, (m, n)) = lattice.reduce(anchor(&pt.congruence), eps);
        let dup = tiles.iter().any(|x| {
            orientation_eq(&x.congruence, &pt.congruence) && {
                let (r, _) = lattice.reduce(x.congruence.translation - a + lattice.point(0.5, 0.5), eps);
                r.dist(lattice.point(0.5, 0.5)) <= 1e-7
            }
        });
        if dup {
            continue;
        }
        let shift = lattice.shift(m, n);
        tiles.push(TorusTile {
            congruence: Congruence {
                translation: a,
                ..pt.congruence
            },
            points: pt.points.map(|p| p - shift),
            labels: pt.labels,
            nodes: [0; 5],
        });
    }
    validate_torus(&patch.prototile, lattice, tiles, &tol)
}

/// Check every torus invariant and derive node classes and edge matings.
pub fn validate_torus(
    proto: &Prototile,
    lattice: &PeriodLattice,
    mut tiles: Vec<TorusTile>,
    tol: &Tolerance,
) -> Result<TorusTiling, TorusError> {
    let cell = lattice.det().abs();
    if cell <= tol.len {
        return Err(TorusError::Degenerate);
    }
    let area = proto.shape.area();
    if ((tiles.len() as f64 * area - cell) / cell).abs() > 1e-6 {
        return Err(TorusError::AreaMismatch {
            tiles: tiles.len(),
            tile_area: area,
            cell_area: cell,
        });
    }
    for (i, t) in tiles.iter().enumerate() {
        let expect: Vec<Vec2> = t.labels.iter().map(|&l| t.congruence.apply(proto.shape.vertices[l as usize])).collect();
        if expect.iter().zip(&t.points).any(|(a, b)| a.dist(*b) > tol.len * 10.0) {
            return Err(TorusError::NotCongruent { tile: i });
        }
    }
    // node classes modulo the lattice
    let same_mod = |a: Vec2, b: Vec2| {
        let c = lattice.point(0.5, 0.5);
        lattice.reduce(a - b + c, 1e-9).0.dist(c) <= 1e-7
    };
    let mut nodes: Vec<TorusNode> = Vec::new();
    for ti in 0..tiles.len() {
        for k in 0..5 {
            let p = tiles[ti].points[k];
            let id = match nodes.iter().position(|n| same_mod(n.position, p)) {
                Some(id) => id,
                None => {
                    nodes.push(TorusNode {
                        position: lattice.reduce(p, 1e-9).0,
                        corners: Vec::new(),
                        angle_sum: 0.0,
                    });
                    nodes.len() - 1
                }
            };
            nodes[id].corners.push((ti, k as u8));
            nodes[id].angle_sum += proto.angle(tiles[ti].labels[k]);
            tiles[ti].nodes[k] = id;
        }
    }
    for n in &nodes {
        if (n.angle_sum - 360.0).abs() > tol.angle {
            return Err(TorusError::NodeNotClosed {
                position: n.position,
                angle_sum: n.angle_sum,
            });
        }
    }
    // matings, overlaps and T-junctions against nearby lattice translates
    let close = tol.len * 10.0;
    let mut matings = Vec::new();
    for i in 0..tiles.len() {
        for e in 0..5 {
            let (p, q) = (tiles[i].points[e], tiles[i].points[(e + 1) % 5]);
            let mut found = None;
            'search: for j in 0..tiles.len() {
                for m in SHIFTS {
                    for n in SHIFTS {
                        let s = lattice.shift(m, n);
                        for f in 0..5 {
                            let (a, b) = (tiles[j].points[f] + s, tiles[j].points[(f + 1) % 5] + s);
                            if a.dist(q) <= close && b.dist(p) <= close {
                                found = Some(EdgeMating {
                                    tile: i,
                                    edge: e,
                                    mate: j,
                                    mate_edge: f,
                                    shift: (m, n),
                                });
                                break 'search;
                            }
                        }
                    }
                }
            }
            matings.push(found.ok_or(TorusError::OpenBoundary { tile: i, edge: e })?);
        }
    }
    for i in 0..tiles.len() {
        for j in 0..tiles.len() {
            for m in SHIFTS {
                for n in SHIFTS {
                    if i == j && m == 0 && n == 0 {
                        continue;
                    }
                    let s = lattice.shift(m, n);
                    let other = tiles[j].points.map(|p| p + s);
                    if convex_overlap(&tiles[i].points, &other, tol.len) == Overlap::InteriorsIntersect {
                        return Err(TorusError::Overlap { a: i, b: j });
                    }
                    for (e, w) in (0..5).map(|e| (e, (tiles[i].points[e], tiles[i].points[(e + 1) % 5]))) {
                        if other.iter().any(|&p| on_segment_interior(p, w.0, w.1, tol.len)) {
                            return Err(TorusError::NotEdgeToEdge { tile: i, edge: e });
                        }
                    }
                }
            }
        }
    }
    Ok(TorusTiling {
        lattice: *lattice,
        tiles,
        nodes,
        matings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub tiles: usize,
    /// Number of k-valent node classes per fundamental domain.
    pub counts: BTreeMap<usize, usize>,
    /// Exact densities `count_k / tiles`, as `p/q` strings.
    pub densities: BTreeMap<usize, String>,
    /// `sum_k k * density_k`, which double counting forces to be 5.
    pub corner_sum: String,
    pub corner_identity: bool,
}

impl DensityReport {
    pub fn density(&self, k: usize) -> Q {
        Q::new(
            BigInt::from(*self.counts.get(&k).unwrap_or(&0)),
            BigInt::from(self.tiles),
        )
    }
}

pub fn node_density(torus: &TorusTiling) -> DensityReport {
    let mut counts = BTreeMap::new();
    for n in &torus.nodes {
        *counts.entry(n.valence()).or_insert(0usize) += 1;
    }
    densities_from(torus.tiles.len(), counts)
}

pub fn densities_from(tiles: usize, counts: BTreeMap<usize, usize>) -> DensityReport {
    let n = BigInt::from(tiles.max(1));
    let densities: BTreeMap<usize, Q> = counts
        .iter()
        .map(|(&k, &c)| (k, Q::new(BigInt::from(c), n.clone())))
        .collect();
    let corner_sum: Q = densities
        .iter()
        .map(|(&k, d)| d * Q::from_integer(BigInt::from(k)))
        .sum();
    let five = Q::from_integer(BigInt::from(5));
    DensityReport {
        tiles,
        corner_identity: corner_sum == five,
        corner_sum: corner_sum.to_string(),
        densities: densities.into_iter().map(|(k, d)| (k, d.to_string())).collect(),
        counts,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum Lemma1 {
    /// No node of valence five or more.
    Vacuous,
    Witness { tile: usize },
    /// High-valence node present and no tile with four 3-valent corners.
    Falsified { max_valence: usize },
}

impl Lemma1 {
    pub fn passed(&self) -> bool {
        !matches!(self, Lemma1::Falsified { .. })
    }
}

pub fn lemma1_check(torus: &TorusTiling) -> Lemma1 {
    let max_valence = torus.nodes.iter().map(|n| n.valence()).max().unwrap_or(0);
    if max_valence < 5 {
        return Lemma1::Vacuous;
    }
    match tiles_with_trivalent(&torus.corner_valences(), 4).first() {
        Some(&tile) => Lemma1::Witness { tile },
        None => Lemma1::Falsified { max_valence },
    }
}

/// A torus tile with at least three 3-valent corners.
pub fn torus_bagina_witness(torus: &TorusTiling) -> Option<usize> {
    tiles_with_trivalent(&torus.corner_valences(), 3).first().copied()
}

/// Tiles per primitive cell as an integer when the ratio is integral.
pub fn tiles_per_cell(torus: &TorusTiling, proto: &Prototile) -> Option<u64> {
    let r = torus.lattice.det().abs() / proto.shape.area();
    let n = r.round();
    ((r - n).abs() < 1e-6).then(|| n.to_u64()).flatten()
}
