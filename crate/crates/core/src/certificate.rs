//! The certify pipeline (grow, detect periods, build and validate the torus,
//! census checks) and its JSON certificate.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{seed_patch, Limits, Outcome, Prototile, Search, SearchStats, SeedSpec};
use crate::geometry::{AngleVector, EdgeVector, Tolerance, Vec2};
use crate::periodic::{
    build_torus, lattice_from, lemma1_check, node_density, period_candidates, tiles_per_cell, torus_bagina_witness,
    DensityReport, EdgeMating, Lemma1, PeriodLattice, TorusError, TorusTiling,
};

pub const CERTIFICATE_FORMAT: &str = "pentatile-certificate/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    /// Smallest ring depth the patch must complete.
    pub depth: u32,
    /// Depth is raised up to this value when no lattice is found.
    pub max_depth: u32,
    /// Completions examined per depth before moving on.
    pub max_completions: usize,
    pub limits: Limits,
    pub tol: Tolerance,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            depth: 3,
            max_depth: 5,
            max_completions: 16,
            limits: Limits::default(),
            tol: Tolerance::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrototileRecord {
    pub angles: AngleVector,
    pub edges: EdgeVector,
    /// Unit-diameter realization, `A` at the origin.
    pub vertices: [Vec2; 5],
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertTile {
    pub mirrored: bool,
    pub rotation: f64,
    pub translation: Vec2,
    pub labels: [u8; 5],
    pub vertices: [Vec2; 5],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertNode {
    pub position: Vec2,
    pub valence: usize,
    pub angle_sum: f64,
    pub corners: Vec<(usize, u8)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checks {
    pub area_identity: bool,
    pub edges_mated: bool,
    pub nodes_closed: bool,
    pub no_overlap: bool,
    pub edge_to_edge: bool,
    pub congruent: bool,
    pub corner_identity: bool,
    pub bagina_witness: Option<usize>,
    pub lemma1: Lemma1,
}

impl Checks {
    pub fn all_passed(&self) -> bool {
        self.area_identity
            && self.edges_mated
            && self.nodes_closed
            && self.no_overlap
            && self.edge_to_edge
            && self.congruent
            && self.corner_identity
            && self.bagina_witness.is_some()
            && self.lemma1.passed()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub depth: u32,
    pub patch_tiles: usize,
    pub completions_examined: usize,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub format: String,
    pub prototile: PrototileRecord,
    pub lattice: PeriodLattice,
    pub tiles_per_cell: usize,
    pub tiles: Vec<CertTile>,
    pub nodes: Vec<CertNode>,
    pub matings: Vec<EdgeMating>,
    pub density: DensityReport,
    pub checks: Checks,
    pub search: SearchRecord,
    pub tolerance: Tolerance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Prototile,
    Grow,
    Detect,
    Torus,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stage::Prototile => "prototile",
            Stage::Grow => "grow",
            Stage::Detect => "detect",
            Stage::Torus => "torus",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: Stage,
    pub message: String,
    pub grow_outcome: Option<Outcome>,
    pub stats: Option<SearchStats>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertifyError {
    #[error("certification stopped at stage {}: {}", .0.stage, .0.message)]
    Stage(StageFailure),
    /// A proven census property failed on a validated torus.
    #[error("FALSIFICATION: {check} failed on a validated torus")]
    Falsification { check: String, dump: Box<Certificate> },
}

fn record(proto: &Prototile) -> PrototileRecord {
    PrototileRecord {
        angles: proto.shape.angles,
        edges: proto.shape.edges,
        vertices: proto.shape.vertices,
        area: proto.shape.area(),
    }
}

fn assemble(proto: &Prototile, torus: &TorusTiling, search: SearchRecord, tol: Tolerance) -> Certificate {
    let density = node_density(torus);
    let lemma1 = lemma1_check(torus);
    let checks = Checks {
        area_identity: true,
        edges_mated: true,
        nodes_closed: true,
        no_overlap: true,
        edge_to_edge: true,
        congruent: true,
        corner_identity: density.corner_identity,
        bagina_witness: torus_bagina_witness(torus),
        lemma1,
    };
    Certificate {
        format: CERTIFICATE_FORMAT.into(),
        prototile: record(proto),
        lattice: torus.lattice,
        tiles_per_cell: tiles_per_cell(torus, proto).map_or(torus.tiles.len(), |n| n as usize),
        tiles: torus
            .tiles
            .iter()
            .map(|t| CertTile {
                mirrored: t.congruence.mirrored,
                rotation: t.congruence.rotation,
                translation: t.congruence.translation,
                labels: t.labels,
                vertices: t.points,
            })
            .collect(),
        nodes: torus
            .nodes
            .iter()
            .map(|n| CertNode {
                position: n.position,
                valence: n.valence(),
                angle_sum: n.angle_sum,
                corners: n.corners.clone(),
            })
            .collect(),
        matings: torus.matings.clone(),
        density,
        checks,
        search,
        tolerance: tol,
    }
}

/// Grow, detect a lattice, validate the torus and run the census checks.
pub fn certify(angles: &AngleVector, edges: &EdgeVector, opts: &CertifyOptions) -> Result<Certificate, CertifyError> {
    let fail = |stage, message: String, grow_outcome, stats| {
        CertifyError::Stage(StageFailure {
            stage,
            message,
            grow_outcome,
            stats,
        })
    };
    let proto = Arc::new(Prototile::new(angles, edges, &opts.tol).map_err(|e| fail(Stage::Prototile, e.to_string(), None, None))?);
    let mut last: Option<StageFailure> = None;
    for depth in opts.depth..=opts.max_depth.max(opts.depth) {
        let seed = seed_patch(proto.clone(), &SeedSpec::default(), opts.tol).expect("empty seed spec");
        let limits = Limits {
            target_depth: depth,
            ..opts.limits
        };
        let mut search = Search::new(seed, limits);
        for completion in 0..opts.max_completions {
            let outcome = search.run();
            if outcome != Outcome::ReachedTargetDepth {
                if completion == 0 {
                    return Err(fail(
                        Stage::Grow,
                        format!("patch search ended {outcome:?} before completing depth {depth}"),
                        Some(outcome),
                        Some(search.stats),
                    ));
                }
                break;
            }
            let survivors = match period_candidates(&search.patch, opts.depth) {
                Ok(s) => s,
                Err(e) => return Err(fail(Stage::Detect, e.to_string(), Some(outcome), Some(search.stats))),
            };
            let Some(lattice) = lattice_from(&survivors) else {
                last = Some(StageFailure {
                    stage: Stage::Detect,
                    message: format!("no two independent periods in the depth-{depth} patch"),
                    grow_outcome: Some(outcome),
                    stats: Some(search.stats),
                });
                continue;
            };
            match build_torus(&search.patch, &lattice) {
                Ok(torus) => {
                    let rec = SearchRecord {
                        depth,
                        patch_tiles: search.patch.tiles.len(),
                        completions_examined: completion + 1,
                        stats: search.stats,
                    };
                    let cert = assemble(&proto, &torus, rec, opts.tol);
                    let falsified = if !cert.checks.corner_identity {
                        Some("corner identity")
                    } else if cert.checks.bagina_witness.is_none() {
                        Some("Bagina witness")
                    } else if !cert.checks.lemma1.passed() {
                        Some("Lemma 1 witness")
                    } else {
                        None
                    };
                    if let Some(check) = falsified {
                        return Err(CertifyError::Falsification {
                            check: check.into(),
                            dump: Box::new(cert),
                        });
                    }
                    return Ok(cert);
                }
                Err(e) => {
                    last = Some(StageFailure {
                        stage: Stage::Torus,
                        message: e.to_string(),
                        grow_outcome: Some(outcome),
                        stats: Some(search.stats),
                    });
                }
            }
        }
    }
    Err(CertifyError::Stage(last.unwrap_or(StageFailure {
        stage: Stage::Detect,
        message: "no completion examined".into(),
        grow_outcome: None,
        stats: None,
    })))
}

#[derive(Debug, Error, Clone, PartialEq, Serialize, Deserialize)]
pub enum VerifyError {
    #[error("unsupported certificate format `{0}`")]
    Format(String),
    #[error("prototile data do not describe a closed convex pentagon")]
    Prototile,
    #[error("tile {0} is not congruent to the prototile")]
    Congruence(usize),
    #[error("torus invariant failed: {0}")]
    Torus(String),
    #[error("claimed {field} does not match the recomputed value")]
    Mismatch { field: String },
    #[error("census property failed: {0}")]
    Census(String),
}

impl From<TorusError> for VerifyError {
    fn from(e: TorusError) -> Self {
        VerifyError::Torus(e.to_string())
    }
}
