use pentatile_core::certificate::{certify, Certificate, CertifyOptions, VerifyError};
use pentatile_core::verify::verify_certificate;
use pentatile_core::{AngleVector, EdgeVector, Vec2};

fn cairo() -> Certificate {
    let s = 3f64.sqrt() - 1.0;
    certify(
        &AngleVector([120.0, 120.0, 90.0, 120.0, 90.0]),
        &EdgeVector([s, 1.0, 1.0, 1.0, 1.0]),
        &CertifyOptions::default(),
    )
    .expect("cairo certifies")
}

#[test]
fn cairo_certificate_verifies() {
    let cert = cairo();
    assert_eq!(cert.tiles.len(), 4);
    let report = verify_certificate(&cert).unwrap();
    assert_eq!(report.census.get(&3), Some(&4));
    assert_eq!(report.census.get(&4), Some(&2));
    assert_eq!(report.densities.get(&4).map(String::as_str), Some("1/2"));
    assert!(report.checks.iter().all(|c| c.1));
}

#[test]
fn json_round_trip_still_verifies() {
    let cert = cairo();
    let text = serde_json::to_string(&cert).unwrap();
    let back: Certificate = serde_json::from_str(&text).unwrap();
    assert!(verify_certificate(&back).is_ok());
}

#[test]
fn tampering_is_caught() {
    let cert = cairo();

    let mut moved = cert.clone();
    moved.tiles[1].vertices[2] = moved.tiles[1].vertices[2] + Vec2::new(0.05, 0.0);
    assert!(matches!(verify_certificate(&moved), Err(VerifyError::Congruence(1))));

    let mut dropped = cert.clone();
    dropped.tiles.pop();
    assert!(matches!(verify_certificate(&dropped), Err(VerifyError::Torus(_))));

    let mut lied = cert.clone();
    lied.density.densities.insert(3, "2".into());
    assert!(matches!(verify_certificate(&lied), Err(VerifyError::Mismatch { .. })));

    let mut format = cert;
    format.format = "other".into();
    assert!(matches!(verify_certificate(&format), Err(VerifyError::Format(_))));
}
