use std::sync::Arc;

use pentatile_core::spec_file::corpus;
use pentatile_core::*;

const GOLDEN: &str = "tests/data/cairo_depth2.svg";

fn cairo_svg() -> String {
    let s = corpus().into_iter().find(|s| s.name == "cairo").unwrap();
    let proto = Arc::new(Prototile::new(&s.angles, &s.edges, &Tolerance::default()).unwrap());
    let seed = seed_patch(proto, &SeedSpec::default(), Tolerance::default()).unwrap();
    let dump = PatchDump::from_result(&grow(seed, Limits::default()));
    render_svg(&Figure::from(&dump), true)
}

#[test]
fn cairo_patch_matches_snapshot() {
    let svg = cairo_svg();
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join(GOLDEN);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &svg).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap();
    assert_eq!(svg, want);
    assert_eq!(svg.matches("<path").count(), 23);
}
