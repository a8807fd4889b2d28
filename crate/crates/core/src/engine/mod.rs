//! Edge-to-edge patch search over congruent copies of one prototile.

mod patch;
mod prototile;
mod search;
mod witness;

pub use patch::{seed_patch, NodeRecord, Patch, PlacedTile, SeedError, SeedSpec};
pub use prototile::{Prototile, Variant, MIRROR_EDGE_LABELS, MIRROR_LABELS};
pub use search::{candidate_placements, grow, GrowResult, Limits, Outcome, Placement, Search, SearchStats};
pub use witness::{bagina_witness, tiles_with_trivalent, WitnessError};
