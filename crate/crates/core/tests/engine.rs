use std::sync::Arc;

use pentatile_core::engine::{bagina_witness, candidate_placements, SeedError, WitnessError};
use pentatile_core::spec_file::corpus;
use pentatile_core::*;

fn proto(name: &str) -> Arc<Prototile> {
    let s = corpus().into_iter().find(|s| s.name == name).unwrap();
    Arc::new(Prototile::new(&s.angles, &s.edges, &Tolerance::default()).unwrap())
}

fn seed(name: &str) -> Patch {
    seed_patch(proto(name), &SeedSpec::default(), Tolerance::default()).unwrap()
}

/// Every tile edge is either mated full-length or open, no tiles overlap
/// and no node sits inside another tile's edge.
fn assert_edge_to_edge(p: &Patch) {
    let tol = Tolerance::default();
    for (i, t) in p.tiles.iter().enumerate() {
        for k in 0..5 {
            let (from, to) = (t.nodes[k], t.nodes[(k + 1) % 5]);
            if let Some((j, _)) = p.mate(from, to) {
                assert_ne!(i, j);
            }
            let (a, b) = (t.points[k], t.points[(k + 1) % 5]);
            for (n, node) in p.nodes.iter().enumerate() {
                if n == from || n == to {
                    continue;
                }
                let ab = b - a;
                let s = (node.position - a).dot(ab) / ab.dot(ab);
                let off = ab.cross(node.position - a).abs() / ab.norm();
                assert!(!(s > 1e-6 && s < 1.0 - 1e-6 && off < 1e-6), "node {n} inside edge {k} of tile {i}");
            }
        }
        for (j, u) in p.tiles.iter().enumerate().skip(i + 1) {
            assert_ne!(
                overlap(&p.prototile.shape, &t.congruence, &p.prototile.shape, &u.congruence, tol.len),
                Overlap::InteriorsIntersect,
                "tiles {i} and {j}"
            );
        }
    }
    for (n, node) in p.nodes.iter().enumerate() {
        assert!(node.angle_sum <= 360.0 + tol.angle);
        if p.node_is_closed(n) {
            assert!(node.valence() >= 3);
        }
    }
}

#[test]
fn empty_seed_is_one_tile_with_open_edges() {
    let p = seed("cairo");
    assert_eq!(p.tiles.len(), 1);
    assert_eq!(p.nodes.len(), 5);
    assert_eq!(p.edges.len(), 5);
    for k in 0..5 {
        assert!(p.mate(p.tiles[0].nodes[k], p.tiles[0].nodes[(k + 1) % 5]).is_none());
    }
    assert_eq!(p.completed_depth(), 0);
}

#[test]
fn seed_spec_errors() {
    let t: Triple = "A+B+D".parse().unwrap();
    let bad = |conditions: Vec<(char, Triple)>| seed_patch(proto("cairo"), &SeedSpec { conditions }, Tolerance::default());
    assert!(matches!(bad(vec![('A', t), ('A', t)]), Err(SeedError::DuplicateVertex('A'))));
    assert!(matches!(bad(vec![('Q', t)]), Err(SeedError::UnknownVertex('Q'))));
    assert!(matches!(bad(vec![('C', t)]), Err(SeedError::VertexNotInCondition { .. })));
    let ok = bad(vec![('A', t), ('B', t)]).unwrap();
    assert_eq!(ok.nodes[ok.tiles[0].nodes[0]].required, Some(t));
}

#[test]
fn regular_pentagon_exhausts_immediately() {
    let r = grow(seed("regular"), Limits::default());
    assert_eq!(r.outcome, Outcome::Exhausted);
    assert_eq!(r.stats.placements, 0);
}

#[test]
fn cairo_reaches_depth_two_edge_to_edge() {
    let r = grow(seed("cairo"), Limits::default());
    assert_eq!(r.outcome, Outcome::ReachedTargetDepth);
    assert!(r.patch.completed_depth() >= 2);
    assert_eq!(r.patch.tiles.len(), 23);
    assert_edge_to_edge(&r.patch);
}

#[test]
fn every_corpus_tiler_grows_cleanly() {
    for name in ["type1", "type2", "type4", "type5", "type6", "type7", "type8", "type9"] {
        let r = grow(seed(name), Limits::default());
        assert_eq!(r.outcome, Outcome::ReachedTargetDepth, "{name}");
        assert_edge_to_edge(&r.patch);
    }
}

#[test]
fn reflections_can_be_disabled() {
    let limits = Limits {
        reflections: false,
        ..Limits::default()
    };
    let r = grow(seed("cairo"), limits);
    assert!(r.patch.tiles.iter().all(|t| !t.congruence.mirrored));
    let p = seed("type5");
    let t = &p.tiles[0];
    let c = candidate_placements(&p, t.nodes[0], t.nodes[1], &limits);
    assert!(!c.is_empty());
    assert!(c.iter().all(|c| !c.congruence.mirrored));
}

#[test]
fn candidates_mate_the_open_edge() {
    let p = seed("type9");
    let t = &p.tiles[0];
    let (from, to) = (t.nodes[1], t.nodes[2]);
    let cands = candidate_placements(&p, from, to, &Limits::default());
    assert!(!cands.is_empty());
    let (a, b) = (p.nodes[from].position, p.nodes[to].position);
    for c in &cands {
        let hit = (0..5).any(|k| c.points[k].dist(b) < 1e-9 && c.points[(k + 1) % 5].dist(a) < 1e-9);
        assert!(hit);
    }
}

#[test]
fn witness_needs_closed_nodes() {
    let r = grow(seed("cairo"), Limits::default());
    let inner = r.patch.interior_tiles();
    assert!(!inner.is_empty());
    assert!(bagina_witness(&r.patch, &inner, 3).unwrap().is_some());
    let open = (0..r.patch.tiles.len()).find(|t| !inner.contains(t)).unwrap();
    assert_eq!(
        bagina_witness(&r.patch, &[open], 3),
        Err(WitnessError::OpenNodesPresent { tile: open })
    );
}

#[test]
fn search_resumes_after_a_completion() {
    let mut s = engine::Search::new(seed("type5"), Limits::default());
    assert_eq!(s.run(), Outcome::ReachedTargetDepth);
    let placed = s.stats.placements;
    let again = s.run();
    assert!(s.stats.placements >= placed);
    assert_ne!(again, Outcome::BudgetExceeded);
}
