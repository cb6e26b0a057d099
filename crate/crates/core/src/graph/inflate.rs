use rayon::prelude::*;

use super::{Graph, Provenance};
use crate::error::{invalid, Result};

/// The distance-`k` graph `G(k)`: same vertices, `u ~ v` iff `dist(u, v) == k`.
///
/// The result may be disconnected or irregular. An empty edge set is not an
/// error; callers can check `num_edges() == 0`.
pub fn inflate(g: &Graph, k: usize) -> Result<Graph> {
    if k == 0 {
        return Err(invalid("inflation distance must be at least 1"));
    }
    let edges: Vec<(usize, usize)> = (0..g.n())
        .into_par_iter()
        .flat_map_iter(|u| {
            let dist = g.bfs_limited(u, k);
            dist.into_iter()
                .enumerate()
                .filter(move |&(w, d)| d == k && u < w)
                .map(move |(w, _)| (u, w))
        })
        .collect();
    Graph::from_edges(g.n(), edges, Provenance::Inflated { k, base: Box::new(g.provenance().clone()) })
}
