use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, Provenance};
use crate::error::{invalid, Error, Result};

/// Random `d`-regular simple graph from the pairing (configuration) model.
///
/// Each attempt pairs the `n*d` half-edges uniformly; an attempt producing a
/// loop or a parallel edge is discarded and the whole pairing is redrawn. At
/// most `10 * n` attempts are made.
pub fn build_random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    check_params(n, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = pairing(n, d, &mut rng)?;
    Graph::from_edges(n, edges, Provenance::RandomRegular { n, d, seed })
}

/// Random `d`-regular graph with girth at least `min_girth`.
///
/// Starts from [`build_random_regular`] and removes short cycles by
/// double-edge switches `{a,b},{c,e} -> {a,c},{b,e}`. A switch is kept only if
/// neither new edge lies on a cycle shorter than `min_girth`, so the set of
/// edges on short cycles shrinks with every accepted switch.
pub fn build_random_regular_girth(n: usize, d: usize, min_girth: usize, seed: u64) -> Result<Graph> {
    check_params(n, d)?;
    if min_girth < 3 {
        return build_random_regular(n, d, seed)
            .map(|g| g.with_provenance(Provenance::HighGirth { n, d, girth: min_girth, seed }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = pairing(n, d, &mut rng)?;
    let mut adj = vec![Vec::with_capacity(d); n];
    for (u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut scratch = BfsScratch::new(n);
    let max_short = min_girth - 2;
    let budget = 1000 * n;
    let mut attempts = 0;
    loop {
        let mut bad: Vec<(usize, usize)> = Vec::new();
        for u in 0..n {
            for &v in &adj[u] {
                if u < v && scratch.within(&adj, u, v, max_short) {
                    bad.push((u, v));
                }
            }
        }
        if bad.is_empty() {
            break;
        }
        for (a, b) in bad {
            if !adj[a].contains(&b) || !scratch.within(&adj, a, b, max_short) {
                continue;
            }
            loop {
                attempts += 1;
                if attempts > budget {
                    return Err(Error::RejectionBudget { attempts });
                }
                let c = rng.gen_range(0..n);
                let e = adj[c][rng.gen_range(0..adj[c].len())];
                if [a, b].contains(&c) || [a, b].contains(&e) || adj[a].contains(&c) || adj[b].contains(&e) {
                    continue;
                }
                replace(&mut adj, a, b, c);
                replace(&mut adj, c, e, a);
                replace(&mut adj, b, a, e);
                replace(&mut adj, e, c, b);
                if scratch.within(&adj, a, c, max_short) || scratch.within(&adj, b, e, max_short) {
                    replace(&mut adj, a, c, b);
                    replace(&mut adj, c, a, e);
                    replace(&mut adj, b, e, a);
                    replace(&mut adj, e, b, c);
                    continue;
                }
                break;
            }
        }
    }
    let edges = (0..n).flat_map(|u| adj[u].iter().filter(move |&&v| u < v).map(move |&v| (u, v)));
    let g = Graph::from_edges(n, edges.collect::<Vec<_>>(), Provenance::HighGirth { n, d, girth: min_girth, seed })?;
    if !g.is_connected() {
        return Err(Error::Internal("edge switching disconnected the graph".into()));
    }
    Ok(g)
}

fn check_params(n: usize, d: usize) -> Result<()> {
    if (n * d) % 2 == 1 {
        return Err(Error::OddDegreeSum { n, d });
    }
    if d >= n {
        return Err(invalid(format!("degree {d} must be smaller than n = {n}")));
    }
    if d < 2 {
        return Err(invalid(format!("degree must be at least 2, got {d}")));
    }
    Ok(())
}

fn pairing(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(usize, usize)>> {
    let max_attempts = 10 * n;
    let mut points: Vec<usize> = (0..n * d).map(|p| p / d).collect();
    'attempt: for _ in 0..max_attempts {
        points.shuffle(rng);
        let mut edges: Vec<(usize, usize)> = points
            .chunks_exact(2)
            .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
            .collect();
        if edges.iter().any(|&(u, v)| u == v) {
            continue;
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            continue 'attempt;
        }
        return Ok(edges);
    }
    Err(Error::RejectionBudget { attempts: max_attempts })
}

fn replace(adj: &mut [Vec<usize>], u: usize, old: usize, new: usize) {
    let slot = adj[u].iter().position(|&w| w == old).expect("edge present");
    adj[u][slot] = new;
}

/// Bounded BFS reused across many queries.
struct BfsScratch {
    stamp: Vec<u32>,
    dist: Vec<usize>,
    epoch: u32,
    queue: Vec<usize>,
}

impl BfsScratch {
    fn new(n: usize) -> Self {
        BfsScratch { stamp: vec![0; n], dist: vec![0; n], epoch: 0, queue: Vec::new() }
    }

    /// Is `v` within distance `limit` of `u` once the edge `{u, v}` is removed?
    fn within(&mut self, adj: &[Vec<usize>], u: usize, v: usize, limit: usize) -> bool {
        self.epoch += 1;
        self.queue.clear();
        self.stamp[u] = self.epoch;
        self.dist[u] = 0;
        self.queue.push(u);
        let mut head = 0;
        while head < self.queue.len() {
            let x = self.queue[head];
            head += 1;
            if self.dist[x] >= limit {
                continue;
            }
            for &y in &adj[x] {
                if x == u && y == v {
                    continue;
                }
                if self.stamp[y] != self.epoch {
                    if y == v {
                        return true;
                    }
                    self.stamp[y] = self.epoch;
                    self.dist[y] = self.dist[x] + 1;
                    self.queue.push(y);
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{girth, write_edge_list};

    #[test]
    fn handshake_count() {
        let g = build_random_regular(10, 3, 7).unwrap();
        assert_eq!(g.num_edges(), 15);
        assert_eq!(g.regular_degree(), Some(3));
    }

    #[test]
    fn four_vertex_cubic_is_k4() {
        let g = build_random_regular(4, 3, 1).unwrap();
        assert_eq!(g.num_edges(), 6);
        assert!((0..4).all(|u| (0..4).all(|v| u == v || g.has_edge(u, v))));
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(build_random_regular(5, 3, 0), Err(Error::OddDegreeSum { .. })));
        assert!(build_random_regular(4, 4, 0).is_err());
        assert!(build_random_regular(4, 1, 0).is_err());
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = write_edge_list(&build_random_regular(200, 3, 42).unwrap());
        let b = write_edge_list(&build_random_regular(200, 3, 42).unwrap());
        let c = write_edge_list(&build_random_regular(200, 3, 43).unwrap());
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn switching_reaches_target_girth() {
        let g = build_random_regular_girth(400, 3, 7, 3).unwrap();
        assert_eq!(g.regular_degree(), Some(3));
        assert!(g.is_connected());
        assert!(girth(&g).unwrap() >= 7);
    }
}
