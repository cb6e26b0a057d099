//! Balls, spheres, girth and cycle statistics.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Graph, UNREACHED};

/// Enumeration of simple cycles is attempted only for subgraphs with at most
/// this many edges...
pub const CYCLE_EDGE_BUDGET: usize = 64;
/// ...and cycle rank at most this.
pub const CYCLE_RANK_BUDGET: usize = 20;

/// Length of the shortest cycle; `None` for forests.
pub fn girth(g: &Graph) -> Option<usize> {
    let n = g.n();
    let mut best = usize::MAX;
    let mut dist = vec![UNREACHED; n];
    let mut parent = vec![UNREACHED; n];
    let mut queue = VecDeque::new();
    for root in 0..n {
        dist.fill(UNREACHED);
        dist[root] = 0;
        parent[root] = UNREACHED;
        queue.clear();
        queue.push_back(root);
        'bfs: while let Some(u) = queue.pop_front() {
            if 2 * dist[u] + 1 >= best {
                break;
            }
            for &w in g.neighbors(u) {
                if dist[w] == UNREACHED {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if parent[u] != w {
                    best = best.min(dist[u] + dist[w] + 1);
                    if dist[w] == dist[u] {
                        break 'bfs;
                    }
                }
            }
        }
    }
    (best != usize::MAX).then_some(best)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallStats {
    pub center: usize,
    pub radius: usize,
    /// `levels[i] = |D_i|`, the size of the sphere of radius `i`.
    pub levels: Vec<usize>,
    /// Edges with an endpoint in `B_{k-1}` minus `|B_k|`; equals `-1` on a tree ball.
    pub paper_t: i64,
    /// `paper_t + 1`, so that tree balls score zero.
    pub excess: usize,
    /// Cycle rank of the subgraph formed by the edges touching `B_{k-1}`.
    pub cycle_rank: usize,
    /// Simple cycles in that subgraph, when within the enumeration budget.
    pub simple_cycle_count: Option<u64>,
}

impl BallStats {
    pub fn size(&self) -> usize {
        self.levels.iter().sum()
    }
}

/// Level sizes and tree excess of the radius-`k` ball around `v`.
///
/// The relevant edges are those `{x, y}` with `y` in `B_{k-1}`; these are
/// exactly the edges a walk started at `v` can traverse before first
/// reaching the sphere `D_k`.
pub fn ball_stats(g: &Graph, v: usize, k: usize) -> BallStats {
    let dist = g.bfs_limited(v, k);
    let mut levels = vec![0; k + 1];
    for &d in &dist {
        if d != UNREACHED && d <= k {
            levels[d] += 1;
        }
    }
    let ball: usize = levels.iter().sum();
    let relevant: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .copied()
        .filter(|&(x, y)| (k > 0) && (dist[x] < k || dist[y] < k))
        .collect();
    let paper_t = relevant.len() as i64 - ball as i64;
    let excess = (paper_t + 1) as usize;
    let cycle_rank = relevant.len() + 1 - ball;
    let simple_cycle_count = count_simple_cycles(&relevant);
    BallStats { center: v, radius: k, levels, paper_t, excess, cycle_rank, simple_cycle_count }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub radius: usize,
    /// Largest tree excess of the absorption-relevant ball subgraph.
    pub max_excess: usize,
    /// Largest cycle rank of the induced ball subgraph (all edges inside `B_r`).
    pub max_cycle_rank: usize,
    /// Largest number of simple cycles in an induced ball; an upper bound
    /// `2^rank - 1` whenever `bound_only` is set.
    pub max_simple_cycles: u64,
    pub bound_only: bool,
    pub centers: usize,
}

/// Aggregates ball statistics over every center.
pub fn assumption1_scan(g: &Graph, r: usize) -> ScanReport {
    let per_center: Vec<(usize, usize, u64, bool)> = (0..g.n())
        .into_par_iter()
        .map(|v| {
            let stats = ball_stats(g, v, r);
            let dist = g.bfs_limited(v, r);
            let induced: Vec<(usize, usize)> = g
                .edges()
                .iter()
                .copied()
                .filter(|&(x, y)| dist[x] <= r && dist[y] <= r)
                .collect();
            let size = dist.iter().filter(|&&d| d <= r).count();
            let rank = induced.len() + 1 - size;
            match count_simple_cycles(&induced) {
                Some(c) => (stats.excess, rank, c, false),
                None => (stats.excess, rank, cycle_bound(rank), true),
            }
        })
        .collect();
    let mut report = ScanReport {
        radius: r,
        max_excess: 0,
        max_cycle_rank: 0,
        max_simple_cycles: 0,
        bound_only: false,
        centers: g.n(),
    };
    for (excess, rank, cycles, bound) in per_center {
        report.max_excess = report.max_excess.max(excess);
        report.max_cycle_rank = report.max_cycle_rank.max(rank);
        report.max_simple_cycles = report.max_simple_cycles.max(cycles);
        report.bound_only |= bound;
    }
    report
}

fn cycle_bound(rank: usize) -> u64 {
    if rank >= 64 {
        u64::MAX
    } else {
        (1u64 << rank) - 1
    }
}

/// Counts simple cycles of an edge set (connected or not) by walking the
/// whole cycle space: every simple cycle is a unique nonzero element of it.
/// Returns `None` when the edge set exceeds the enumeration budget.
pub(crate) fn count_simple_cycles(edges: &[(usize, usize)]) -> Option<u64> {
    if edges.len() > CYCLE_EDGE_BUDGET {
        return None;
    }
    let mut verts: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    verts.sort_unstable();
    verts.dedup();
    let idx = |x: usize| verts.binary_search(&x).unwrap();
    let local: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (idx(u), idx(v))).collect();
    let m = verts.len();

    // Spanning forest; every non-tree edge closes one fundamental cycle.
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
    for (e, &(u, v)) in local.iter().enumerate() {
        adj[u].push((v, e));
        adj[v].push((u, e));
    }
    let mut parent_edge = vec![usize::MAX; m];
    let mut parent = vec![usize::MAX; m];
    let mut depth = vec![usize::MAX; m];
    let mut tree_edge = vec![false; local.len()];
    for root in 0..m {
        if depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(w, e) in &adj[u] {
                if depth[w] == usize::MAX {
                    depth[w] = depth[u] + 1;
                    parent[w] = u;
                    parent_edge[w] = e;
                    tree_edge[e] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let mut basis = Vec::new();
    for (e, &(u, v)) in local.iter().enumerate() {
        if tree_edge[e] {
            continue;
        }
        let mut mask = 1u64 << e;
        let (mut a, mut b) = (u, v);
        while a != b {
            if depth[a] >= depth[b] {
                mask ^= 1u64 << parent_edge[a];
                a = parent[a];
            } else {
                mask ^= 1u64 << parent_edge[b];
                b = parent[b];
            }
        }
        basis.push(mask);
    }
    if basis.len() > CYCLE_RANK_BUDGET {
        return None;
    }

    // Gray-code walk over all nonzero combinations.
    let mut count = 0u64;
    let mut current = 0u64;
    let mut deg = vec![0u8; m];
    for i in 1u64..(1u64 << basis.len()) {
        current ^= basis[i.trailing_zeros() as usize];
        if is_single_cycle(current, &local, &mut deg) {
            count += 1;
        }
    }
    Some(count)
}

fn is_single_cycle(mask: u64, edges: &[(usize, usize)], deg: &mut [u8]) -> bool {
    deg.fill(0);
    let mut first = None;
    let mut bits = mask;
    while bits != 0 {
        let e = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        let (u, v) = edges[e];
        deg[u] += 1;
        deg[v] += 1;
        first.get_or_insert(u);
    }
    if deg.iter().any(|&d| d != 0 && d != 2) {
        return false;
    }
    // All degrees are 2, so the edge set is a disjoint union of cycles; it is
    // a single cycle iff walking from one vertex uses every edge.
    let Some(start) = first else { return false };
    let total = mask.count_ones();
    let mut used = 0u64;
    let mut at = start;
    let mut steps = 0;
    loop {
        let next = (0..edges.len()).find(|&e| {
            mask & (1u64 << e) != 0 && used & (1u64 << e) == 0 && (edges[e].0 == at || edges[e].1 == at)
        });
        match next {
            Some(e) => {
                used |= 1u64 << e;
                steps += 1;
                at = if edges[e].0 == at { edges[e].1 } else { edges[e].0 };
            }
            None => break,
        }
    }
    steps == total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_named, Provenance};

    /// Independent oracle: DFS over simple paths from each minimum vertex.
    fn brute_force_cycles(g: &Graph) -> (u64, Option<usize>) {
        fn dfs(g: &Graph, start: usize, at: usize, len: usize, on: &mut [bool], count: &mut u64, shortest: &mut usize) {
            for &w in g.neighbors(at) {
                if w == start && len >= 3 {
                    *count += 1;
                    *shortest = (*shortest).min(len);
                } else if w > start && !on[w] {
                    on[w] = true;
                    dfs(g, start, w, len + 1, on, count, shortest);
                    on[w] = false;
                }
            }
        }
        let mut count = 0;
        let mut shortest = usize::MAX;
        for s in 0..g.n() {
            let mut on = vec![false; g.n()];
            on[s] = true;
            dfs(g, s, s, 1, &mut on, &mut count, &mut shortest);
        }
        // each cycle is found once per direction
        (count / 2, (shortest != usize::MAX).then_some(shortest))
    }

    #[test]
    fn girth_fixtures() {
        assert_eq!(girth(&build_named("complete", &[4]).unwrap()), Some(3));
        let p = build_named("petersen", &[]).unwrap();
        assert_eq!(girth(&p), brute_force_cycles(&p).1);
        assert_eq!(girth(&p), Some(5));
        assert_eq!(girth(&build_named("hypercube", &[4]).unwrap()), Some(4));
        assert_eq!(girth(&build_named("cycle", &[7]).unwrap()), Some(7));
        let path = Graph::from_edges(4, [(0, 1), (1, 2), (1, 3)], Provenance::Edges).unwrap();
        assert_eq!(girth(&path), None);
    }

    #[test]
    fn ball_stats_petersen() {
        let g = build_named("petersen", &[]).unwrap();
        let s = ball_stats(&g, 0, 2);
        assert_eq!(s.levels, vec![1, 3, 6]);
        assert_eq!((s.paper_t, s.excess, s.cycle_rank), (-1, 0, 0));
        assert_eq!(s.simple_cycle_count, Some(0));
    }

    #[test]
    fn ball_stats_k4_and_c6() {
        let s = ball_stats(&build_named("complete", &[4]).unwrap(), 2, 1);
        assert_eq!((s.levels.clone(), s.paper_t, s.excess), (vec![1, 3], -1, 0));
        let s = ball_stats(&build_named("cycle", &[6]).unwrap(), 0, 3);
        assert_eq!((s.levels.clone(), s.paper_t, s.excess), (vec![1, 2, 2, 1], 0, 1));
        assert_eq!(s.simple_cycle_count, Some(1));
    }

    #[test]
    fn empty_spheres_are_zero() {
        let s = ball_stats(&build_named("complete", &[4]).unwrap(), 0, 3);
        assert_eq!(s.levels, vec![1, 3, 0, 0]);
        assert_eq!(s.size(), 4);
    }

    #[test]
    fn full_radius_levels_sum_to_n() {
        for g in [
            build_named("petersen", &[]).unwrap(),
            build_named("prism", &[5]).unwrap(),
            build_named("hypercube", &[4]).unwrap(),
        ] {
            let diam = g.diameter().unwrap();
            for v in 0..g.n() {
                let s = ball_stats(&g, v, diam);
                assert_eq!(s.size(), g.n());
                assert_eq!(s.excess as i64, s.paper_t + 1);
            }
        }
    }

    #[test]
    fn cycle_space_count_matches_brute_force() {
        for g in [
            build_named("petersen", &[]).unwrap(),
            build_named("complete", &[5]).unwrap(),
            build_named("prism", &[4]).unwrap(),
            build_named("hypercube", &[3]).unwrap(),
        ] {
            assert_eq!(count_simple_cycles(g.edges()), Some(brute_force_cycles(&g).0), "{:?}", g.provenance());
        }
    }

    #[test]
    fn scan_fixtures() {
        let p = build_named("petersen", &[]).unwrap();
        let r = assumption1_scan(&p, 2);
        assert_eq!(r.max_cycle_rank, 15 - 10 + 1);
        assert_eq!(r.max_excess, 0);
        assert_eq!(r.max_simple_cycles, brute_force_cycles(&p).0);
        assert!(!r.bound_only);
        let c6 = build_named("cycle", &[6]).unwrap();
        assert_eq!(assumption1_scan(&c6, 3).max_excess, 1);
    }

    #[test]
    fn large_rank_falls_back_to_bound() {
        let k8 = build_named("complete", &[8]).unwrap();
        assert_eq!(count_simple_cycles(k8.edges()), None);
        let r = assumption1_scan(&k8, 1);
        assert!(r.bound_only);
        assert_eq!(r.max_cycle_rank, 28 - 8 + 1);
        assert_eq!(r.max_simple_cycles, (1 << 21) - 1);
    }
}
