use std::sync::Arc;

use pentatile_core::cases::{enumerate_candidate_patterns, partition_classes, ReductionRules};
use pentatile_core::geometry::polygon_area;
use pentatile_core::spec_file::corpus;
use pentatile_core::*;
use proptest::prelude::*;

fn tol() -> Tolerance {
    Tolerance::default()
}

/// A convex pentagon inscribed in the unit circle.
fn cyclic_pentagon() -> impl Strategy<Value = [Vec2; 5]> {
    prop::array::uniform5(0.25f64..1.0).prop_map(|w| {
        let total: f64 = w.iter().sum();
        let mut t = 0.0;
        w.map(|x| {
            let p = Vec2::from_angle_deg(t);
            t += 360.0 * x / total;
            p
        })
    })
}

fn measure(p: &[Vec2; 5]) -> (AngleVector, EdgeVector) {
    let angles = std::array::from_fn(|i| {
        let (a, b) = (p[(i + 4) % 5] - p[i], p[(i + 1) % 5] - p[i]);
        b.cross(a).atan2(b.dot(a)).to_degrees()
    });
    let edges = std::array::from_fn(|i| p[i].dist(p[(i + 1) % 5]));
    (AngleVector(angles), EdgeVector(edges))
}

proptest! {
    #[test]
    fn pentagon_round_trip(p in cyclic_pentagon()) {
        let (a, e) = measure(&p);
        prop_assume!(a.0.iter().all(|&x| x < 179.0));
        let shape = build_pentagon(&a, &e, &tol()).unwrap();
        let (ma, me) = (shape.measured_angles(), shape.measured_edges());
        for i in 0..5 {
            prop_assert!((ma.0[i] - a.0[i]).abs() < 1e-7);
            prop_assert!((me.0[i] - e.0[i]).abs() < 1e-9);
        }
        prop_assert!((shape.area() - polygon_area(&p)).abs() < 1e-9);
    }

    #[test]
    fn scaling_scales_area_and_keeps_class(p in cyclic_pentagon(), s in 0.1f64..10.0) {
        let (a, e) = measure(&p);
        prop_assume!(a.0.iter().all(|&x| x < 179.0));
        let one = build_pentagon(&a, &e, &tol()).unwrap();
        let big = build_pentagon(&a, &e.scaled(s), &tol()).unwrap();
        prop_assert!((big.area() - s * s * one.area()).abs() < 1e-9 * s * s);
        let table = TypeTable::shipped();
        prop_assert_eq!(classify(&a, &e, &table, &tol()).types, classify(&a, &e.scaled(s), &table, &tol()).types);
    }

    #[test]
    fn overlap_is_symmetric(
        which in 0usize..9,
        r1 in -3.2f64..3.2, r2 in -3.2f64..3.2,
        x in -1.5f64..1.5, y in -1.5f64..1.5,
        m1: bool, m2: bool,
    ) {
        let spec = &corpus()[which];
        let shape = build_pentagon(&spec.angles, &spec.edges, &tol()).unwrap();
        let c1 = Congruence { rotation: r1, translation: Vec2::ZERO, mirrored: m1 };
        let c2 = Congruence { rotation: r2, translation: Vec2::new(x, y), mirrored: m2 };
        prop_assert_eq!(overlap(&shape, &c1, &shape, &c2, 1e-9), overlap(&shape, &c2, &shape, &c1, 1e-9));
        let far = Congruence { translation: Vec2::new(x + 50.0, y), ..c2 };
        prop_assert_eq!(overlap(&shape, &c1, &shape, &far, 1e-9), Overlap::Disjoint);
    }

    #[test]
    fn profile_follows_relabeling(which in 0usize..11, k in 0usize..10) {
        let spec = &corpus()[which];
        let r = Relabel::dihedral()[k];
        let before = tentative_3valent_profile(&spec.angles, &tol());
        let after = tentative_3valent_profile(&r.angles(&spec.angles), &tol());
        prop_assert_eq!(before.qualifying, after.qualifying);
        for i in 0..5 {
            let mut want: Vec<Triple> = before.per_vertex[r.vertex[i]].iter().map(|t| t.relabel(&r)).collect();
            let mut got = after.per_vertex[i].clone();
            want.sort();
            got.sort();
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn classification_ignores_relabeling(which in 0usize..11, k in 0usize..10) {
        let spec = &corpus()[which];
        let r = Relabel::dihedral()[k];
        let table = TypeTable::shipped();
        prop_assert_eq!(
            classify(&spec.angles, &spec.edges, &table, &tol()).types,
            classify(&r.angles(&spec.angles), &r.edges(&spec.edges), &table, &tol()).types
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solved_type_samples_round_trip(which in 0usize..8, seed in 0u64..1000) {
        let table = TypeTable::shipped();
        let def = table.edge_to_edge().nth(which).unwrap();
        let opts = SolveOptions { seed, samples_per_dim: 2, ..SolveOptions::default() };
        let out = solve_constraints(&ConstraintSet::from_type(def), &opts).unwrap();
        for s in &out.family().unwrap().samples {
            prop_assert!(classify(&s.angles, &s.edges, &table, &tol()).contains(&def.name));
        }
    }

    #[test]
    fn solver_verdicts_are_checkable(t1 in 0usize..35, t2 in 0usize..35, t3 in 0usize..35, rhs in 0i64..4) {
        let all = Triple::all();
        let eq = |t: Triple, r: i64| cases_eq(t.counts(), r);
        let cs = ConstraintSet {
            angle_relations: vec![eq(all[t1], 360), eq(all[t2], 360), eq(all[t3], 90 * rhs + 180)],
            ..ConstraintSet::default()
        };
        match solve_constraints(&cs, &SolveOptions { samples_per_dim: 1, ..SolveOptions::default() }).unwrap() {
            SolveOutcome::Infeasible { certificate } => prop_assert!(certificate.verify(&cs)),
            SolveOutcome::Family { family } => {
                for s in &family.samples {
                    prop_assert!(s.angles.is_convex());
                    for r in &cs.angle_relations {
                        let v: f64 = (0..5).map(|i| r.coef[i] as f64 * s.angles.0[i]).sum();
                        prop_assert!((v - r.rhs as f64).abs() < 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn relabeled_patterns_have_relabeled_families(id in 0usize..465, k in 0usize..10) {
        let p = &enumerate_candidate_patterns(&ReductionRules::default())[id];
        let r = Relabel::dihedral()[k];
        let q = p.relabel(&r);
        let opts = SolveOptions { samples_per_dim: 2, ..SolveOptions::default() };
        let out = solve_constraints(&p.constraints(), &opts).unwrap();
        let other = solve_constraints(&q.constraints(), &opts).unwrap();
        prop_assert_eq!(out.family().is_some(), other.family().is_some());
        let Some(fam) = out.family() else { return Ok(()) };
        let target = q.constraints();
        for s in &fam.samples {
            let (a, e) = (r.angles(&s.angles), r.edges(&s.edges));
            for eq in &target.angle_relations {
                let v: f64 = (0..5).map(|i| eq.coef[i] as f64 * a.0[i]).sum();
                prop_assert!((v - eq.rhs as f64).abs() < 1e-6);
            }
            for class in partition_classes(&q.edges) {
                for w in class.windows(2) {
                    prop_assert!((e.0[w[0]] - e.0[w[1]]).abs() < 1e-8);
                }
            }
        }
    }
}

fn cases_eq(coef: [i64; 5], rhs: i64) -> pentatile_core::solve::AngleEq {
    pentatile_core::solve::AngleEq { coef, rhs }
}

fn grow_dump(name: &str, limits: Limits) -> PatchDump {
    let spec = corpus().into_iter().find(|s| s.name == name).unwrap();
    let proto = Prototile::new(&spec.angles, &spec.edges, &tol()).unwrap();
    let seed = seed_patch(Arc::new(proto), &SeedSpec::default(), tol()).unwrap();
    PatchDump::from_result(&grow(seed, limits))
}

#[test]
fn growth_is_deterministic() {
    for name in ["cairo", "type5", "type9"] {
        let a = serde_json::to_string(&grow_dump(name, Limits::default())).unwrap();
        let b = serde_json::to_string(&grow_dump(name, Limits::default())).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn corollary1_pruning_agrees_where_it_applies() {
    let mut applied = 0;
    for spec in corpus() {
        let profile = tentative_3valent_profile(&spec.angles, &tol());
        if !corollary1_applies(&profile) || spec.name == "regular" {
            continue;
        }
        applied += 1;
        let free = grow_dump(&spec.name, Limits::default());
        let pruned = grow_dump(
            &spec.name,
            Limits {
                corollary1_prune: true,
                ..Limits::default()
            },
        );
        assert_eq!(free.outcome, pruned.outcome, "{}", spec.name);
        assert!(pruned.census.keys().all(|&k| k <= 4), "{}", spec.name);
    }
    assert!(applied > 0);
}

#[test]
fn budget_zero_places_nothing() {
    let d = grow_dump(
        "cairo",
        Limits {
            max_placements: 0,
            ..Limits::default()
        },
    );
    assert_eq!(d.outcome, Outcome::BudgetExceeded);
    assert_eq!(d.tiles.len(), 1);
}
