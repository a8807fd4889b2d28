use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::prototile::Prototile;
use crate::geometry::{Congruence, Tolerance, Vec2};
use crate::labels::{vertex_index, Triple};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacedTile {
    pub congruence: Congruence,
    /// World corners, counterclockwise.
    pub points: [Vec2; 5],
    /// Vertex label at each counterclockwise corner.
    pub labels: [u8; 5],
    pub nodes: [usize; 5],
    pub ring: u32,
}

impl PlacedTile {
    pub fn mirrored(&self) -> bool {
        self.congruence.mirrored
    }

    pub fn bbox(&self) -> (Vec2, Vec2) {
        bbox(&self.points)
    }
}

pub(crate) fn bbox(p: &[Vec2]) -> (Vec2, Vec2) {
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for q in p {
        lo = Vec2::new(lo.x.min(q.x), lo.y.min(q.y));
        hi = Vec2::new(hi.x.max(q.x), hi.y.max(q.y));
    }
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub position: Vec2,
    /// Incident `(tile, corner position)` pairs.
    pub corners: Vec<(usize, u8)>,
    pub angle_sum: f64,
    /// Seed annotation: this node must become 3-valent with these labels.
    pub required: Option<Triple>,
}

impl NodeRecord {
    pub fn valence(&self) -> usize {
        self.corners.len()
    }

    pub fn is_closed(&self, tol: &Tolerance) -> bool {
        (self.angle_sum - 360.0).abs() <= tol.angle
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeedError {
    #[error("seed spec names vertex {0} twice")]
    DuplicateVertex(char),
    #[error("seed spec names unknown vertex `{0}`")]
    UnknownVertex(char),
    #[error("condition {triple} at vertex {vertex} does not contain that vertex")]
    VertexNotInCondition { vertex: char, triple: Triple },
}

/// Required 3-valent node conditions at vertices of the seed tile.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub conditions: Vec<(char, Triple)>,
}

const NODE_CELL: f64 = 0.25;
const TILE_CELL: f64 = 1.0;

type Cell = (i64, i64);

fn cell_of(p: Vec2, size: f64) -> Cell {
    ((p.x / size).floor() as i64, (p.y / size).floor() as i64)
}

fn cells_in(lo: Vec2, hi: Vec2, size: f64) -> impl Iterator<Item = Cell> {
    let (a, b) = (cell_of(lo, size), cell_of(hi, size));
    (a.0..=b.0).flat_map(move |x| (a.1..=b.1).map(move |y| (x, y)))
}

/// A growing edge-to-edge configuration of prototile copies.
#[derive(Debug, Clone)]
pub struct Patch {
    pub prototile: Arc<Prototile>,
    pub tol: Tolerance,
    pub tiles: Vec<PlacedTile>,
    pub nodes: Vec<NodeRecord>,
    /// Directed edge `(from, to)` in the owning tile's counterclockwise order.
    pub edges: HashMap<(usize, usize), (usize, u8)>,
    node_grid: HashMap<Cell, Vec<usize>>,
    tile_grid: HashMap<Cell, Vec<usize>>,
}

/// What one placement added, for exact undo.
#[derive(Debug, Clone)]
pub(crate) struct Applied {
    first_new_node: usize,
    touched: Vec<usize>,
}

impl Patch {
    pub fn empty(prototile: Arc<Prototile>, tol: Tolerance) -> Patch {
        Patch {
            prototile,
            tol,
            tiles: Vec::new(),
            nodes: Vec::new(),
            edges: HashMap::new(),
            node_grid: HashMap::new(),
            tile_grid: HashMap::new(),
        }
    }

    pub fn node_is_closed(&self, n: usize) -> bool {
        self.nodes[n].is_closed(&self.tol)
    }

    pub fn find_node(&self, p: Vec2, radius: f64) -> Option<usize> {
        let c = cell_of(p, NODE_CELL);
        let mut best: Option<(f64, usize)> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.node_grid.get(&(c.0 + dx, c.1 + dy)) {
                    for &id in ids {
                        let d = self.nodes[id].position.dist(p);
                        if d <= radius && best.is_none_or(|b| d < b.0) {
                            best = Some((d, id));
                        }
                    }
                }
            }
        }
        best.map(|b| b.1)
    }

    pub fn nodes_near(&self, lo: Vec2, hi: Vec2) -> Vec<usize> {
        let mut out: Vec<usize> = cells_in(lo, hi, NODE_CELL)
            .filter_map(|c| self.node_grid.get(&c))
            .flatten()
            .copied()
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn tiles_near(&self, lo: Vec2, hi: Vec2) -> Vec<usize> {
        let mut out: Vec<usize> = cells_in(lo, hi, TILE_CELL)
            .filter_map(|c| self.tile_grid.get(&c))
            .flatten()
            .copied()
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Add a tile whose corner nodes are given (`None` creates a node).
    pub(crate) fn apply(&mut self, congruence: Congruence, points: [Vec2; 5], labels: [u8; 5], nodes: [Option<usize>; 5]) -> Applied {
        let tile_id = self.tiles.len();
        let first_new_node = self.nodes.len();
        let mut ids = [0usize; 5];
        let mut touched = Vec::new();
        for i in 0..5 {
            ids[i] = match nodes[i] {
                Some(n) => {
                    touched.push(n);
                    n
                }
                None => {
                    let id = self.nodes.len();
                    self.nodes.push(NodeRecord {
                        position: points[i],
                        corners: Vec::new(),
                        angle_sum: 0.0,
                        required: None,
                    });
                    self.node_grid.entry(cell_of(points[i], NODE_CELL)).or_default().push(id);
                    id
                }
            };
            let n = &mut self.nodes[ids[i]];
            n.corners.push((tile_id, i as u8));
            n.angle_sum += self.prototile.angle(labels[i]);
        }
        for i in 0..5 {
            self.edges.insert((ids[i], ids[(i + 1) % 5]), (tile_id, i as u8));
        }
        let (lo, hi) = bbox(&points);
        for c in cells_in(lo, hi, TILE_CELL) {
            self.tile_grid.entry(c).or_default().push(tile_id);
        }
        self.tiles.push(PlacedTile {
            congruence,
            points,
            labels,
            nodes: ids,
            ring: 0,
        });
        self.recompute_rings();
        Applied { first_new_node, touched }
    }

    pub(crate) fn undo(&mut self, applied: Applied) {
        let tile = self.tiles.pop().expect("undo without tile");
        let tile_id = self.tiles.len();
        let (lo, hi) = tile.bbox();
        for c in cells_in(lo, hi, TILE_CELL) {
            if let Some(v) = self.tile_grid.get_mut(&c) {
                v.retain(|&t| t != tile_id);
                if v.is_empty() {
                    self.tile_grid.remove(&c);
                }
            }
        }
        for i in 0..5 {
            self.edges.remove(&(tile.nodes[i], tile.nodes[(i + 1) % 5]));
        }
        for &n in &applied.touched {
            let node = &mut self.nodes[n];
            node.corners.retain(|&(t, _)| t != tile_id);
            // resum rather than subtract to keep sums drift-free
            node.angle_sum = node
                .corners
                .iter()
                .map(|&(t, p)| self.prototile.angle(self.tiles[t].labels[p as usize]))
                .sum();
        }
        while self.nodes.len() > applied.first_new_node {
            let id = self.nodes.len() - 1;
            let node = self.nodes.pop().expect("node");
            let c = cell_of(node.position, NODE_CELL);
            if let Some(v) = self.node_grid.get_mut(&c) {
                v.retain(|&x| x != id);
                if v.is_empty() {
                    self.node_grid.remove(&c);
                }
            }
        }
        self.recompute_rings();
    }

    /// Ring of each tile: corona distance from tile 0 through shared nodes.
    pub fn recompute_rings(&mut self) {
        if self.tiles.is_empty() {
            return;
        }
        let mut ring = vec![u32::MAX; self.tiles.len()];
        ring[0] = 0;
        let mut q = VecDeque::from([0usize]);
        while let Some(t) = q.pop_front() {
            for &n in &self.tiles[t].nodes {
                for &(u, _) in &self.nodes[n].corners {
                    if ring[u] == u32::MAX {
                        ring[u] = ring[t] + 1;
                        q.push_back(u);
                    }
                }
            }
        }
        for (t, r) in self.tiles.iter_mut().zip(ring) {
            t.ring = r;
        }
    }

    pub fn mate(&self, from: usize, to: usize) -> Option<(usize, u8)> {
        self.edges.get(&(to, from)).copied()
    }

    /// Largest `d` such that every node of every tile with ring below `d`
    /// is closed.
    pub fn completed_depth(&self) -> u32 {
        let mut open_ring = u32::MAX;
        for n in 0..self.nodes.len() {
            if self.node_is_closed(n) {
                continue;
            }
            for &(t, _) in &self.nodes[n].corners {
                open_ring = open_ring.min(self.tiles[t].ring);
            }
        }
        if open_ring == u32::MAX {
            self.tiles.iter().map(|t| t.ring + 1).max().unwrap_or(0)
        } else {
            open_ring
        }
    }

    pub fn max_ring(&self) -> u32 {
        self.tiles.iter().map(|t| t.ring).max().unwrap_or(0)
    }

    /// Tiles all of whose corners sit at closed nodes.
    pub fn interior_tiles(&self) -> Vec<usize> {
        (0..self.tiles.len())
            .filter(|&t| self.tiles[t].nodes.iter().all(|&n| self.node_is_closed(n)))
            .collect()
    }

    pub fn valence_census(&self) -> std::collections::BTreeMap<usize, usize> {
        let mut m = std::collections::BTreeMap::new();
        for n in 0..self.nodes.len() {
            if self.node_is_closed(n) {
                *m.entry(self.nodes[n].valence()).or_insert(0) += 1;
            }
        }
        m
    }
}

/// A one-tile patch: the direct prototile at the identity, with optional
/// required node conditions at named vertices.
pub fn seed_patch(prototile: Arc<Prototile>, spec: &SeedSpec, tol: Tolerance) -> Result<Patch, SeedError> {
    let mut seen = [false; 5];
    for &(v, t) in &spec.conditions {
        let i = vertex_index(v).ok_or(SeedError::UnknownVertex(v))?;
        if seen[i] {
            return Err(SeedError::DuplicateVertex(v));
        }
        seen[i] = true;
        if !t.contains(i as u8) {
            return Err(SeedError::VertexNotInCondition { vertex: v, triple: t });
        }
    }
    let mut patch = Patch::empty(prototile.clone(), tol);
    let v = &prototile.variants[0];
    patch.apply(Congruence::IDENTITY, v.points, v.labels, [None; 5]);
    for &(c, t) in &spec.conditions {
        let i = vertex_index(c).expect("checked");
        let node = patch.tiles[0].nodes[i];
        patch.nodes[node].required = Some(t);
    }
    Ok(patch)
}
