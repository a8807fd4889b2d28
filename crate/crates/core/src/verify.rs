//! Standalone certificate checker. It re-derives every claim from the raw
//! coordinates in the certificate and shares no validation code with the
//! torus builder.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::Serialize;

use crate::certificate::{Certificate, VerifyError, CERTIFICATE_FORMAT};
use crate::exact::Q;
use crate::geometry::Vec2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub tiles: usize,
    pub nodes: usize,
    pub census: BTreeMap<usize, usize>,
    pub densities: BTreeMap<usize, String>,
    pub checks: Vec<(String, bool)>,
}

fn shoelace(p: &[Vec2]) -> f64 {
    (0..p.len()).map(|i| p[i].cross(p[(i + 1) % p.len()])).sum::<f64>() / 2.0
}

fn corner_angle(prev: Vec2, at: Vec2, next: Vec2) -> f64 {
    let (a, b) = (prev - at, next - at);
    b.cross(a).atan2(b.dot(a)).to_degrees().rem_euclid(360.0)
}

fn separated(a: &[Vec2], b: &[Vec2], tol: f64) -> bool {
    for poly in [a, b] {
        for i in 0..poly.len() {
            let e = poly[(i + 1) % poly.len()] - poly[i];
            let n = Vec2::new(-e.y, e.x) * (1.0 / e.norm());
            let amax = a.iter().map(|p| p.dot(n)).fold(f64::NEG_INFINITY, f64::max);
            let amin = a.iter().map(|p| p.dot(n)).fold(f64::INFINITY, f64::min);
            let bmax = b.iter().map(|p| p.dot(n)).fold(f64::NEG_INFINITY, f64::max);
            let bmin = b.iter().map(|p| p.dot(n)).fold(f64::INFINITY, f64::min);
            if bmin >= amax - tol || amin >= bmax - tol {
                return true;
            }
        }
    }
    false
}

fn strictly_inside_segment(p: Vec2, a: Vec2, b: Vec2, tol: f64) -> bool {
    let ab = b - a;
    let l = ab.norm();
    let t = (p - a).dot(ab) / (l * l);
    t * l > tol && (1.0 - t) * l > tol && (ab.cross(p - a) / l).abs() <= tol
}

/// Recheck a certificate from its coordinates.
pub fn verify_certificate(cert: &Certificate) -> Result<VerifyReport, VerifyError> {
    if cert.format != CERTIFICATE_FORMAT {
        return Err(VerifyError::Format(cert.format.clone()));
    }
    let tol = cert.tolerance;
    let close = tol.len * 10.0;
    let angles = cert.prototile.angles.0;
    let v = cert.prototile.vertices;
    // the prototile: a closed convex pentagon with the stated data
    if (angles.iter().sum::<f64>() - 540.0).abs() > tol.angle {
        return Err(VerifyError::Prototile);
    }
    let diameter = (0..5)
        .flat_map(|i| (0..5).map(move |j| (i, j)))
        .map(|(i, j)| v[i].dist(v[j]))
        .fold(0.0, f64::max);
    let scale = cert.prototile.edges.0.iter().cloned().fold(0.0, f64::max)
        / (0..5).map(|i| v[i].dist(v[(i + 1) % 5])).fold(0.0, f64::max);
    for i in 0..5 {
        let a = corner_angle(v[(i + 4) % 5], v[i], v[(i + 1) % 5]);
        let e = v[i].dist(v[(i + 1) % 5]) * scale;
        if (a - angles[i]).abs() > tol.angle * 10.0
            || !(a > 0.0 && a < 180.0)
            || (e - cert.prototile.edges.0[i]).abs() > tol.len * 10.0 * scale.max(1.0)
        {
            return Err(VerifyError::Prototile);
        }
    }
    let area = shoelace(&v);
    if (area - cert.prototile.area).abs() > 1e-9 || (diameter - 1.0).abs() > 1e-9 {
        return Err(VerifyError::Prototile);
    }
    let proto_edge = |l1: u8, l2: u8| -> Option<f64> {
        let (a, b) = (l1 as usize, l2 as usize);
        if (a + 1) % 5 == b {
            Some(v[a].dist(v[b]))
        } else if (b + 1) % 5 == a {
            Some(v[b].dist(v[a]))
        } else {
            None
        }
    };
    // every tile congruent to the prototile, corners counterclockwise
    for (i, t) in cert.tiles.iter().enumerate() {
        let p = &t.vertices;
        let mut labels = t.labels.to_vec();
        labels.sort_unstable();
        if labels != [0, 1, 2, 3, 4] || shoelace(p) <= 0.0 {
            return Err(VerifyError::Congruence(i));
        }
        for k in 0..5 {
            let a = corner_angle(p[(k + 4) % 5], p[k], p[(k + 1) % 5]);
            if (a - angles[t.labels[k] as usize]).abs() > tol.angle * 10.0 {
                return Err(VerifyError::Congruence(i));
            }
            match proto_edge(t.labels[k], t.labels[(k + 1) % 5]) {
                Some(len) if (len - p[k].dist(p[(k + 1) % 5])).abs() <= close => {}
                _ => return Err(VerifyError::Congruence(i)),
            }
        }
    }
    let (t1, t2) = (cert.lattice.t1, cert.lattice.t2);
    let det = t1.cross(t2);
    if det.abs() <= tol.len {
        return Err(VerifyError::Torus("lattice vectors are parallel".into()));
    }
    let n = cert.tiles.len();
    if ((n as f64 * area - det.abs()) / det.abs()).abs() > 1e-6 {
        return Err(VerifyError::Torus(format!(
            "{n} tiles of area {area} against cell area {}",
            det.abs()
        )));
    }
    let frac = |p: Vec2| (p.cross(t2) / det, t1.cross(p) / det);
    let equal_mod = |a: Vec2, b: Vec2| {
        let (s, t) = frac(a - b);
        (s - s.round()).abs() < 1e-7 && (t - t.round()).abs() < 1e-7
    };
    // node classes and angle sums
    let mut classes: Vec<(Vec2, f64, usize)> = Vec::new();
    for t in &cert.tiles {
        let p = &t.vertices;
        for k in 0..5 {
            let a = corner_angle(p[(k + 4) % 5], p[k], p[(k + 1) % 5]);
            match classes.iter_mut().find(|c| equal_mod(c.0, p[k])) {
                Some(c) => {
                    c.1 += a;
                    c.2 += 1;
                }
                None => classes.push((p[k], a, 1)),
            }
        }
    }
    if let Some(c) = classes.iter().find(|c| (c.1 - 360.0).abs() > tol.angle * 10.0) {
        return Err(VerifyError::Torus(format!("node at {} sums to {}", c.0, c.1)));
    }
    let shifts: Vec<Vec2> = (-2..=2)
        .flat_map(|m| (-2..=2).map(move |k| (m, k)))
        .map(|(m, k)| t1 * m as f64 + t2 * k as f64)
        .collect();
    // matings, overlaps and T-junctions
    for (i, t) in cert.tiles.iter().enumerate() {
        let p = &t.vertices;
        for k in 0..5 {
            let (a, b) = (p[k], p[(k + 1) % 5]);
            let mated = cert.tiles.iter().any(|u| {
                shifts.iter().any(|&s| {
                    (0..5).any(|f| {
                        (u.vertices[f] + s).dist(b) <= close && (u.vertices[(f + 1) % 5] + s).dist(a) <= close
                    })
                })
            });
            if !mated {
                return Err(VerifyError::Torus(format!("edge {k} of tile {i} is unmated")));
            }
        }
        for (j, u) in cert.tiles.iter().enumerate() {
            for &s in &shifts {
                if i == j && s.norm() == 0.0 {
                    continue;
                }
                let q: Vec<Vec2> = u.vertices.iter().map(|&x| x + s).collect();
                if !separated(p, &q, tol.len) {
                    return Err(VerifyError::Torus(format!("tiles {i} and {j} overlap")));
                }
                for k in 0..5 {
                    if q.iter().any(|&x| strictly_inside_segment(x, p[k], p[(k + 1) % 5], tol.len)) {
                        return Err(VerifyError::Torus(format!("a node lies inside edge {k} of tile {i}")));
                    }
                }
            }
        }
    }
    // census, exact densities and the census properties
    let mut census: BTreeMap<usize, usize> = BTreeMap::new();
    for c in &classes {
        *census.entry(c.2).or_insert(0) += 1;
    }
    let nq = BigInt::from(n);
    let densities: BTreeMap<usize, Q> = census
        .iter()
        .map(|(&k, &c)| (k, Q::new(BigInt::from(c), nq.clone())))
        .collect();
    let corner: Q = densities.iter().map(|(&k, d)| d * Q::from_integer(BigInt::from(k))).sum();
    let mut checks = vec![("corner identity".to_string(), corner == Q::from_integer(BigInt::from(5)))];
    if census != cert.density.counts {
        return Err(VerifyError::Mismatch { field: "census".into() });
    }
    let dens_str: BTreeMap<usize, String> = densities.iter().map(|(&k, d)| (k, d.to_string())).collect();
    if dens_str != cert.density.densities {
        return Err(VerifyError::Mismatch { field: "densities".into() });
    }
    if cert.nodes.len() != classes.len() {
        return Err(VerifyError::Mismatch { field: "node count".into() });
    }
    let corner_valence = |t: &crate::certificate::CertTile| -> Vec<usize> {
        t.vertices
            .iter()
            .map(|&p| classes.iter().find(|c| equal_mod(c.0, p)).map_or(0, |c| c.2))
            .collect()
    };
    let threes: Vec<usize> = cert
        .tiles
        .iter()
        .map(|t| corner_valence(t).iter().filter(|&&k| k == 3).count())
        .collect();
    checks.push(("Bagina witness".into(), threes.iter().any(|&c| c >= 3)));
    let high = census.keys().any(|&k| k >= 5);
    checks.push(("Lemma 1".into(), !high || threes.iter().any(|&c| c >= 4)));
    if let Some((name, _)) = checks.iter().find(|c| !c.1) {
        return Err(VerifyError::Census(name.clone()));
    }
    for name in ["area identity", "congruence", "node closure", "edge mating", "no overlap", "edge-to-edge"] {
        checks.push((name.into(), true));
    }
    Ok(VerifyReport {
        tiles: n,
        nodes: classes.len(),
        census,
        densities: dens_str,
        checks,
    })
}
