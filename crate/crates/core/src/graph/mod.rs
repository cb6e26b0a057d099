//! Undirected simple graphs and the constructions used throughout the crate.
//!
//! A [`Graph`] is immutable once built. Vertices are `0..n`, edges are stored
//! once as `(u, v)` with `u < v`, and the adjacency lists are sorted.

mod ball;
mod inflate;
mod io;
mod lps;
mod named;
mod random;

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ball::{assumption1_scan, ball_stats, girth, BallStats, ScanReport, CYCLE_EDGE_BUDGET, CYCLE_RANK_BUDGET};
pub use inflate::inflate;
pub use io::{parse_edge_list, read_edge_list, write_edge_list};
pub use lps::{build_lps, is_prime, legendre};
pub use named::build_named;
pub use random::{build_random_regular, build_random_regular_girth};

/// Marker for unreachable vertices in BFS distance vectors.
pub const UNREACHED: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    Named { name: String, params: Vec<usize> },
    RandomRegular { n: usize, d: usize, seed: u64 },
    HighGirth { n: usize, d: usize, girth: usize, seed: u64 },
    Lps { p: u64, q: u64 },
    Inflated { k: usize, base: Box<Provenance> },
    File { path: String },
    Edges,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Named { name, params } => write!(f, "{name}{params:?}"),
            Provenance::RandomRegular { n, d, seed } => write!(f, "random-regular(n={n},d={d},seed={seed})"),
            Provenance::HighGirth { n, d, girth, seed } => {
                write!(f, "random-regular(n={n},d={d},girth>={girth},seed={seed})")
            }
            Provenance::Lps { p, q } => write!(f, "lps(p={p},q={q})"),
            Provenance::Inflated { k, base } => write!(f, "inflated(k={k}, {base})"),
            Provenance::File { path } => write!(f, "file({path})"),
            Provenance::Edges => write!(f, "edges"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub min: usize,
    pub max: usize,
    pub regular: bool,
}

#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    provenance: Provenance,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Graph {
    /// Builds a graph from an edge list, rejecting loops, parallel edges and
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>, provenance: Provenance) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at {u}")));
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(format!("parallel edge ({}, {})", w[0].0, w[0].1)));
        }
        for &(u, v) in &list {
            adj[u].push(v);
            adj[v].push(u);
        }
        for nb in &mut adj {
            nb.sort_unstable();
        }
        Ok(Graph { n, edges: list, adj, provenance })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub(crate) fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let min = self.adj.iter().map(Vec::len).min().unwrap_or(0);
        let max = self.adj.iter().map(Vec::len).max().unwrap_or(0);
        DegreeProfile { min, max, regular: min == max }
    }

    /// The common degree, if the graph is regular and nonempty.
    pub fn regular_degree(&self) -> Option<usize> {
        let p = self.degree_profile();
        (p.regular && self.n > 0).then_some(p.min)
    }

    pub fn bfs(&self, src: usize) -> Vec<usize> {
        self.bfs_limited(src, usize::MAX)
    }

    /// BFS distances from `src`, only explored up to `radius`; vertices
    /// farther away are [`UNREACHED`].
    pub fn bfs_limited(&self, src: usize, radius: usize) -> Vec<usize> {
        let mut dist = vec![UNREACHED; self.n];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            if dist[u] >= radius {
                continue;
            }
            for &w in &self.adj[u] {
                if dist[w] == UNREACHED {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distance(&self, u: usize, v: usize) -> Option<usize> {
        let d = self.bfs(u)[v];
        (d != UNREACHED).then_some(d)
    }

    /// Connected component label of every vertex, labels in order of first vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![UNREACHED; self.n];
        let mut next = 0;
        for s in 0..self.n {
            if label[s] != UNREACHED {
                continue;
            }
            label[s] = next;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if label[w] == UNREACHED {
                        label[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn num_components(&self) -> usize {
        self.components().iter().copied().max().map_or(0, |m| m + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.num_components() <= 1
    }

    /// Per-component bipartiteness: entry `c` is true when component `c` is bipartite.
    pub fn bipartite_components(&self) -> Vec<bool> {
        let label = self.components();
        let ncomp = label.iter().copied().max().map_or(0, |m| m + 1);
        let mut ok = vec![true; ncomp];
        let mut side = vec![UNREACHED; self.n];
        for s in 0..self.n {
            if side[s] != UNREACHED {
                continue;
            }
            side[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if side[w] == UNREACHED {
                        side[w] = 1 - side[u];
                        queue.push_back(w);
                    } else if side[w] == side[u] {
                        ok[label[s]] = false;
                    }
                }
            }
        }
        ok
    }

    /// True when some connected component with at least one edge is bipartite.
    pub fn has_bipartite_component(&self) -> bool {
        let label = self.components();
        let bip = self.bipartite_components();
        (0..self.n).any(|v| !self.adj[v].is_empty() && bip[label[v]])
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartite_components().iter().all(|&b| b)
    }

    /// Largest finite distance; `None` for disconnected graphs.
    pub fn diameter(&self) -> Option<usize> {
        let mut best = 0;
        for v in 0..self.n {
            for d in self.bfs(v) {
                if d == UNREACHED {
                    return None;
                }
                best = best.max(d);
            }
        }
        Some(best)
    }

    pub fn eccentricity(&self, v: usize) -> Option<usize> {
        let dist = self.bfs(v);
        if dist.contains(&UNREACHED) {
            None
        } else {
            dist.into_iter().max()
        }
    }
}
