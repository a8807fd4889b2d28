use thiserror::Error;

use super::patch::Patch;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessError {
    #[error("tile {tile} has an open node")]
    OpenNodesPresent { tile: usize },
}

/// Tiles (by index into `valences`) with at least `threshold` 3-valent corners.
pub fn tiles_with_trivalent(valences: &[[usize; 5]], threshold: usize) -> Vec<usize> {
    valences
        .iter()
        .enumerate()
        .filter(|(_, v)| v.iter().filter(|&&k| k == 3).count() >= threshold)
        .map(|(i, _)| i)
        .collect()
}

/// A tile among `tiles` with at least `threshold` closed 3-valent corners.
/// Every examined tile must have all five nodes closed.
pub fn bagina_witness(patch: &Patch, tiles: &[usize], threshold: usize) -> Result<Option<usize>, WitnessError> {
    let mut valences = Vec::with_capacity(tiles.len());
    for &t in tiles {
        let nodes = &patch.tiles[t].nodes;
        if nodes.iter().any(|&n| !patch.node_is_closed(n)) {
            return Err(WitnessError::OpenNodesPresent { tile: t });
        }
        valences.push(nodes.map(|n| patch.nodes[n].valence()));
    }
    Ok(tiles_with_trivalent(&valences, threshold).first().map(|&i| tiles[i]))
}
