//! Serializable snapshot of a grown patch.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::engine::{GrowResult, Outcome, Patch, SearchStats};
use crate::geometry::{AngleVector, EdgeVector, Vec2};
use crate::labels::Triple;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpTile {
    pub mirrored: bool,
    pub rotation: f64,
    pub translation: Vec2,
    pub labels: [u8; 5],
    pub vertices: [Vec2; 5],
    pub ring: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpNode {
    pub position: Vec2,
    pub valence: usize,
    pub angle_sum: f64,
    pub closed: bool,
    pub required: Option<Triple>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchDump {
    pub angles: AngleVector,
    pub edges: EdgeVector,
    pub outcome: Outcome,
    pub stats: SearchStats,
    pub completed_depth: u32,
    pub census: BTreeMap<usize, usize>,
    pub tiles: Vec<DumpTile>,
    pub nodes: Vec<DumpNode>,
}

impl PatchDump {
    pub fn new(patch: &Patch, outcome: Outcome, stats: SearchStats) -> PatchDump {
        let shape = &patch.prototile.shape;
        PatchDump {
            angles: shape.angles,
            edges: shape.edges,
            outcome,
            stats,
            completed_depth: patch.completed_depth(),
            census: patch.valence_census(),
            tiles: patch
                .tiles
                .iter()
                .map(|t| DumpTile {
                    mirrored: t.congruence.mirrored,
                    rotation: t.congruence.rotation,
                    translation: t.congruence.translation,
                    labels: t.labels,
                    vertices: t.points,
                    ring: t.ring,
                })
                .collect(),
            nodes: patch
                .nodes
                .iter()
                .enumerate()
                .map(|(i, n)| DumpNode {
                    position: n.position,
                    valence: n.valence(),
                    angle_sum: n.angle_sum,
                    closed: patch.node_is_closed(i),
                    required: n.required,
                })
                .collect(),
        }
    }

    pub fn from_result(r: &GrowResult) -> PatchDump {
        PatchDump::new(&r.patch, r.outcome, r.stats)
    }
}
