use serde::{Deserialize, Serialize};

use super::patch::{bbox, Applied, Patch};
use crate::geometry::{convex_overlap, on_segment_interior, Congruence, Overlap, Vec2};

/// Search configuration for one grow call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    pub target_depth: u32,
    /// Placements committed before giving up.
    pub max_placements: u64,
    pub reflections: bool,
    /// Forbid nodes with five or more tiles.
    pub corollary1_prune: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            target_depth: 2,
            max_placements: 1_000_000,
            reflections: true,
            corollary1_prune: false,
        }
    }
}

impl Limits {
    pub fn valence_cap(&self) -> usize {
        if self.corollary1_prune {
            4
        } else {
            usize::MAX
        }
    }
}

/// A congruent copy ready to be added to a patch.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub variant: u8,
    /// Position of the mated edge in the variant's counterclockwise order.
    pub edge: u8,
    pub congruence: Congruence,
    pub points: [Vec2; 5],
    pub labels: [u8; 5],
    pub nodes: [Option<usize>; 5],
}

/// Distance below which a new corner that did not snap to a node is taken
/// as an inconsistent near-coincidence rather than a fresh node.
const CONFLICT_RADIUS: f64 = 1e-6;

/// All admissible copies mating an edge to the open directed edge `from -> to`.
pub fn candidate_placements(patch: &Patch, from: usize, to: usize, limits: &Limits) -> Vec<Placement> {
    let mut out = Vec::new();
    if patch.mate(from, to).is_some() || !patch.edges.contains_key(&(from, to)) {
        return out;
    }
    let u = patch.nodes[from].position;
    let v = patch.nodes[to].position;
    let len = u.dist(v);
    let tol = patch.tol;
    let proto = &patch.prototile;
    let variants = if limits.reflections { 2 } else { 1 };
    for k in 0..5u8 {
        for vi in 0..variants {
            let var = &proto.variants[vi];
            // the copy's edge labelled `k` in table order
            let pos = var.edge_labels.iter().position(|&l| l == k).expect("label");
            if (var.lengths[pos] - len).abs() > tol.len {
                continue;
            }
            // copy edge pos -> pos+1 runs to -> from
            let p0 = var.points[pos];
            let p1 = var.points[(pos + 1) % 5];
            let d_local = p1 - p0;
            let d_world = u - v;
            let rotation = d_world.y.atan2(d_world.x) - d_local.y.atan2(d_local.x);
            let lin = Congruence {
                rotation,
                translation: Vec2::ZERO,
                mirrored: var.mirrored,
            };
            // variant points already carry the reflection
            let rot = |p: Vec2| p.rotate(rotation);
            let translation = v - rot(p0);
            let mut points = var.points.map(|p| rot(p) + translation);
            points[pos] = v;
            points[(pos + 1) % 5] = u;
            let mut nodes = [None; 5];
            nodes[pos] = Some(to);
            nodes[(pos + 1) % 5] = Some(from);
            let c = Congruence { translation, ..lin };
            if let Some(p) = admissible(patch, c, points, var.labels, nodes, limits) {
                out.push(Placement {
                    variant: vi as u8,
                    edge: pos as u8,
                    ..p
                });
            }
        }
    }
    // a mirror-symmetric prototile yields the same region twice; keep the
    // direct copy so each region has one labelling
    let same_region = |a: &Placement, b: &Placement| {
        a.points
            .iter()
            .all(|p| b.points.iter().any(|q| p.dist(*q) <= tol.len))
    };
    let mut kept: Vec<Placement> = Vec::with_capacity(out.len());
    for p in out.iter().filter(|p| p.variant == 0).chain(out.iter().filter(|p| p.variant == 1)) {
        if !kept.iter().any(|k| same_region(k, p)) {
            kept.push(p.clone());
        }
    }
    out.retain(|p| kept.contains(p));
    out
}

fn admissible(
    patch: &Patch,
    congruence: Congruence,
    points: [Vec2; 5],
    labels: [u8; 5],
    mut nodes: [Option<usize>; 5],
    limits: &Limits,
) -> Option<Placement> {
    let tol = patch.tol;
    let proto = &patch.prototile;
    let cap = limits.valence_cap().min(proto.max_valence());
    for i in 0..5 {
        if nodes[i].is_none() {
            if let Some(n) = patch.find_node(points[i], CONFLICT_RADIUS) {
                if patch.nodes[n].position.dist(points[i]) > tol.len {
                    return None;
                }
                nodes[i] = Some(n);
            }
        }
    }
    for i in 0..5 {
        for j in i + 1..5 {
            if nodes[i].is_some() && nodes[i] == nodes[j] {
                return None;
            }
        }
    }
    // node angle budget, valence cap and required conditions
    for i in 0..5 {
        let a = proto.angle(labels[i]);
        let (sum, count, required, present) = match nodes[i] {
            Some(n) => {
                let node = &patch.nodes[n];
                if patch.node_is_closed(n) {
                    return None;
                }
                let present: Vec<u8> = node
                    .corners
                    .iter()
                    .map(|&(t, p)| patch.tiles[t].labels[p as usize])
                    .collect();
                (node.angle_sum + a, node.valence() + 1, node.required, present)
            }
            None => (a, 1, None, Vec::new()),
        };
        if sum > 360.0 + tol.angle || count > cap {
            return None;
        }
        let gap = 360.0 - sum;
        match required {
            Some(t) => {
                let mut rest = t.0.to_vec();
                for l in present.iter().chain(std::iter::once(&labels[i])) {
                    let idx = rest.iter().position(|x| x == l)?;
                    rest.remove(idx);
                }
                let need: f64 = rest.iter().map(|&l| proto.angle(l)).sum();
                if (need - gap).abs() > tol.angle * 4.0 {
                    return None;
                }
            }
            None => {
                if gap > tol.angle && !proto.can_fill(gap, cap.saturating_sub(count), tol.angle) {
                    return None;
                }
            }
        }
    }
    // each directed edge belongs to one tile
    for i in 0..5 {
        if let (Some(a), Some(b)) = (nodes[i], nodes[(i + 1) % 5]) {
            if patch.edges.contains_key(&(a, b)) {
                return None;
            }
        }
    }
    let (lo, hi) = bbox(&points);
    let pad = Vec2::new(tol.len, tol.len);
    // existing nodes may not sit inside a new edge
    for n in patch.nodes_near(lo - pad, hi + pad) {
        if nodes.contains(&Some(n)) {
            continue;
        }
        let p = patch.nodes[n].position;
        for i in 0..5 {
            if on_segment_interior(p, points[i], points[(i + 1) % 5], tol.len) {
                return None;
            }
        }
    }
    for t in patch.tiles_near(lo - pad, hi + pad) {
        let other = &patch.tiles[t].points;
        // new corners may not sit inside an existing edge
        for i in 0..5 {
            if nodes[i].is_none() {
                for j in 0..5 {
                    if on_segment_interior(points[i], other[j], other[(j + 1) % 5], tol.len) {
                        return None;
                    }
                }
            }
        }
        if convex_overlap(&points, other, tol.len) == Overlap::InteriorsIntersect {
            return None;
        }
    }
    Some(Placement {
        variant: 0,
        edge: 0,
        congruence,
        points,
        labels,
        nodes,
    })
}

pub(crate) fn apply_placement(patch: &mut Patch, p: &Placement) -> Applied {
    patch.apply(p.congruence, p.points, p.labels, p.nodes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    ReachedTargetDepth,
    Exhausted,
    BudgetExceeded,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Placements committed to the patch.
    pub placements: u64,
    pub backtracks: u64,
    /// Deepest stack of simultaneous placements.
    pub peak_depth: u64,
    /// Candidate copies tested against the patch.
    pub candidates_tested: u64,
}

#[derive(Debug, Clone)]
pub struct GrowResult {
    pub outcome: Outcome,
    pub patch: Patch,
    pub stats: SearchStats,
}

struct Frame {
    candidates: Vec<Placement>,
    next: usize,
    applied: Option<Applied>,
}

/// Resumable depth-first search. After a `ReachedTargetDepth` result,
/// calling [`Search::run`] again continues with the next completion.
pub struct Search {
    pub patch: Patch,
    pub limits: Limits,
    pub stats: SearchStats,
    stack: Vec<Frame>,
    started: bool,
}

impl Search {
    pub fn new(patch: Patch, limits: Limits) -> Search {
        Search {
            patch,
            limits,
            stats: SearchStats::default(),
            stack: Vec::new(),
            started: false,
        }
    }

    fn must_close(&self, n: usize) -> bool {
        let d = self.limits.target_depth;
        self.patch.nodes[n]
            .corners
            .iter()
            .any(|&(t, _)| self.patch.tiles[t].ring < d)
    }

    /// Open edges at open nodes that must close, each with its candidates;
    /// returns the one with fewest candidates, or `None` when the target
    /// depth is complete.
    fn select(&mut self) -> Option<Vec<Placement>> {
        let mut best: Option<((usize, usize), Vec<Placement>)> = None;
        let mut frontier: Vec<(usize, usize)> = Vec::new();
        for n in 0..self.patch.nodes.len() {
            if self.patch.node_is_closed(n) || !self.must_close(n) {
                continue;
            }
            for &(t, p) in &self.patch.nodes[n].corners {
                let ids = &self.patch.tiles[t].nodes;
                let p = p as usize;
                let out = (ids[p], ids[(p + 1) % 5]);
                let inc = (ids[(p + 4) % 5], ids[p]);
                for e in [out, inc] {
                    if self.patch.mate(e.0, e.1).is_none() {
                        frontier.push(e);
                    }
                }
            }
        }
        frontier.sort_unstable();
        frontier.dedup();
        if frontier.is_empty() {
            return None;
        }
        for e in frontier {
            let c = candidate_placements(&self.patch, e.0, e.1, &self.limits);
            self.stats.candidates_tested += if self.limits.reflections { 10 } else { 5 };
            let better = best.as_ref().is_none_or(|b| c.len() < b.1.len());
            if better {
                let done = c.len() <= 1;
                best = Some((e, c));
                if done {
                    break;
                }
            }
        }
        best.map(|b| b.1)
    }

    pub fn run(&mut self) -> Outcome {
        let mut descend = !self.started;
        self.started = true;
        loop {
            if descend {
                if self.stats.placements >= self.limits.max_placements {
                    return Outcome::BudgetExceeded;
                }
                match self.select() {
                    None => return Outcome::ReachedTargetDepth,
                    Some(candidates) => self.stack.push(Frame {
                        candidates,
                        next: 0,
                        applied: None,
                    }),
                }
                self.stats.peak_depth = self.stats.peak_depth.max(self.stack.len() as u64);
            }
            // advance the top frame to its next candidate
            loop {
                let Some(top) = self.stack.last_mut() else {
                    return Outcome::Exhausted;
                };
                if let Some(a) = top.applied.take() {
                    self.patch.undo(a);
                    self.stats.backtracks += 1;
                }
                if top.next < top.candidates.len() {
                    let p = top.candidates[top.next].clone();
                    top.next += 1;
                    top.applied = Some(apply_placement(&mut self.patch, &p));
                    self.stats.placements += 1;
                    break;
                }
                self.stack.pop();
            }
            descend = true;
        }
    }

    pub fn into_result(self, outcome: Outcome) -> GrowResult {
        GrowResult {
            outcome,
            patch: self.patch,
            stats: self.stats,
        }
    }
}

/// Grow `patch` until every node of every tile within `target_depth - 1`
/// rings of the seed is closed, the search space is exhausted, or the
/// placement budget runs out.
pub fn grow(patch: Patch, limits: Limits) -> GrowResult {
    let mut s = Search::new(patch, limits);
    let outcome = s.run();
    s.into_result(outcome)
}
