//! Seeded SRW trajectories, regeneration times and the escape-transfer
//! experiment.
//!
//! Every trajectory draws from its own ChaCha8 stream `(seed, stream)`, so
//! results do not depend on thread scheduling.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::srw_chain;
use crate::error::{invalid, Error, Result};
use crate::graph::{inflate, Graph, UNREACHED};
use crate::hitting::{candidate_sets, survival_vector, w_kernel};

/// Minimum block count accepted by [`block_statistics`].
pub const MIN_BLOCKS: usize = 1000;
/// Steps allowed per requested regeneration before giving up.
pub const REGENERATION_STEP_BUDGET: usize = 1_000_000;

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkTrace {
    pub graph: String,
    pub start: usize,
    pub k: usize,
    pub seed: u64,
    pub stream: u64,
    pub positions: Vec<usize>,
    /// `T_0 = 0 < T_1 < ...`
    pub regenerations: Vec<usize>,
    pub good: Vec<bool>,
    /// Non-good times in each completed block.
    pub u: Vec<usize>,
}

impl WalkTrace {
    /// Anchor `X_{T_i}` in force at each time.
    pub fn anchors(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.positions.len());
        let mut i = 0;
        for t in 0..self.positions.len() {
            while i + 1 < self.regenerations.len() && self.regenerations[i + 1] <= t {
                i += 1;
            }
            out.push(self.positions[self.regenerations[i]]);
        }
        out
    }

    pub fn block_lengths(&self) -> Vec<usize> {
        self.regenerations.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `t,vertex,anchor,good` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,vertex,anchor,good\n");
        for (t, ((x, a), g)) in self.positions.iter().zip(self.anchors()).zip(&self.good).enumerate() {
            let _ = writeln!(s, "{t},{x},{a},{}", u8::from(*g));
        }
        s
    }
}

/// Online regeneration bookkeeping, fed one position at a time.
struct Regenerator<'g> {
    g: &'g Graph,
    k: usize,
    dist: Vec<usize>,
    regenerations: Vec<usize>,
    good: Vec<bool>,
    u: Vec<usize>,
    block_good: usize,
}

impl<'g> Regenerator<'g> {
    fn new(g: &'g Graph, k: usize) -> Self {
        Regenerator { g, k, dist: Vec::new(), regenerations: Vec::new(), good: Vec::new(), u: Vec::new(), block_good: 0 }
    }

    fn anchor(&mut self, x: usize) -> Result<()> {
        self.dist = self.g.bfs_limited(x, self.k);
        if !self.dist.contains(&self.k) {
            return Err(Error::EmptySphere { v: x, k: self.k });
        }
        self.good.push(true);
        self.block_good = 1;
        Ok(())
    }

    /// Returns whether `x` at time `t` is a regeneration.
    fn push(&mut self, t: usize, x: usize) -> Result<bool> {
        if t == 0 {
            self.regenerations.push(0);
            self.anchor(x)?;
            return Ok(false);
        }
        let dx = self.dist[x];
        if dx == self.k {
            let last = *self.regenerations.last().expect("T_0 recorded");
            self.u.push(t - last - self.block_good);
            self.regenerations.push(t);
            self.anchor(x)?;
            return Ok(true);
        }
        let farther = self.g.neighbors(x).iter().filter(|&&w| self.dist[w] == UNREACHED || self.dist[w] > dx).count();
        let good = dx == 0 || farther + 1 >= self.g.degree(x);
        self.good.push(good);
        self.block_good += usize::from(good);
        Ok(false)
    }

    fn regeneration_count(&self) -> usize {
        self.regenerations.len() - 1
    }
}

fn step(g: &Graph, x: usize, rng: &mut ChaCha8Rng) -> usize {
    let nb = g.neighbors(x);
    nb[rng.gen_range(0..nb.len())]
}

fn check_start(g: &Graph, v: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(invalid("regeneration distance must be at least 1"));
    }
    if v >= g.n() {
        return Err(invalid(format!("vertex {v} out of range")));
    }
    if g.degree(v) == 0 {
        return Err(Error::IsolatedVertices(vec![v]));
    }
    Ok(())
}

fn finish(g: &Graph, v: usize, k: usize, seed: u64, stream: u64, positions: Vec<usize>, r: Regenerator) -> WalkTrace {
    WalkTrace {
        graph: g.provenance().to_string(),
        start: v,
        k,
        seed,
        stream,
        positions,
        regenerations: r.regenerations,
        good: r.good,
        u: r.u,
    }
}

/// `steps` SRW moves from `v` with regenerations at distance `k`.
pub fn simulate_walk(g: &Graph, v: usize, steps: usize, k: usize, seed: u64, stream: u64) -> Result<WalkTrace> {
    check_start(g, v, k)?;
    let mut rng = rng_for(seed, stream);
    let mut r = Regenerator::new(g, k);
    let mut positions = Vec::with_capacity(steps + 1);
    let mut x = v;
    for t in 0..=steps {
        if t > 0 {
            x = step(g, x, &mut rng);
        }
        positions.push(x);
        r.push(t, x)?;
    }
    Ok(finish(g, v, k, seed, stream, positions, r))
}

/// Runs from `v` until `blocks` regenerations have occurred.
pub fn simulate_blocks(g: &Graph, v: usize, blocks: usize, k: usize, seed: u64, stream: u64) -> Result<WalkTrace> {
    check_start(g, v, k)?;
    let mut rng = rng_for(seed, stream);
    let mut r = Regenerator::new(g, k);
    let mut positions = vec![v];
    r.push(0, v)?;
    let budget = REGENERATION_STEP_BUDGET.saturating_mul(blocks.max(1));
    let mut x = v;
    let mut t = 0;
    while r.regeneration_count() < blocks {
        t += 1;
        if t > budget {
            return Err(Error::Budget(format!("{blocks} regenerations not reached within {budget} steps")));
        }
        x = step(g, x, &mut rng);
        positions.push(x);
        r.push(t, x)?;
    }
    Ok(finish(g, v, k, seed, stream, positions, r))
}

/// Re-derives regenerations, good flags and `U` from positions alone.
pub fn replay(g: &Graph, positions: &[usize], k: usize) -> Result<(Vec<usize>, Vec<bool>, Vec<usize>)> {
    let mut r = Regenerator::new(g, k);
    for (t, &x) in positions.iter().enumerate() {
        r.push(t, x)?;
    }
    Ok((r.regenerations, r.good, r.u))
}

/// Independent single-block runs from `v`, trial `i` on stream `i`.
pub fn first_blocks(g: &Graph, v: usize, k: usize, trials: usize, seed: u64) -> Result<Vec<WalkTrace>> {
    (0..trials as u64).into_par_iter().map(|i| simulate_blocks(g, v, 1, k, seed, i)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockStats {
    pub blocks: usize,
    pub mean_t1: f64,
    pub var_t1: f64,
    pub stderr_t1: f64,
    pub ci95: (f64, f64),
    /// `survival[l] = P[U_0 > l]`, empirical, up to the largest observed value.
    pub u0_survival: Vec<f64>,
    /// `exp` of the least-squares slope of `log P[U_0 > l]`.
    pub decay_ratio: Option<f64>,
    pub survival_monotone: bool,
    pub eventually_below_one: bool,
}

/// Statistics over the first block of every trace.
pub fn block_statistics(traces: &[WalkTrace]) -> Result<BlockStats> {
    let firsts: Vec<(usize, usize)> =
        traces.iter().filter_map(|tr| Some((*tr.block_lengths().first()?, *tr.u.first()?))).collect();
    let blocks = firsts.len();
    if blocks < MIN_BLOCKS {
        return Err(invalid(format!("block statistics need at least {MIN_BLOCKS} blocks, got {blocks}")));
    }
    let nf = blocks as f64;
    let mean = firsts.iter().map(|&(l, _)| l as f64).sum::<f64>() / nf;
    let var = firsts.iter().map(|&(l, _)| (l as f64 - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let se = (var / nf).sqrt();
    let max_u = firsts.iter().map(|&(_, u)| u).max().unwrap_or(0);
    let mut counts = vec![0usize; max_u + 1];
    for &(_, u) in &firsts {
        counts[u] += 1;
    }
    let mut above = blocks;
    let mut u0_survival = Vec::with_capacity(max_u + 1);
    for c in &counts {
        above -= c;
        u0_survival.push(above as f64 / nf);
    }
    let points: Vec<(f64, f64)> =
        u0_survival.iter().enumerate().filter(|(_, &s)| s > 0.0).map(|(l, &s)| (l as f64, s.ln())).collect();
    let decay_ratio = (points.len() >= 2).then(|| {
        let m = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
        let my = points.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
        (sxy / sxx).exp()
    });
    Ok(BlockStats {
        blocks,
        mean_t1: mean,
        var_t1: var,
        stderr_t1: se,
        ci95: (mean - 1.96 * se, mean + 1.96 * se),
        survival_monotone: u0_survival.windows(2).all(|w| w[1] <= w[0]),
        eventually_below_one: u0_survival.last().is_none_or(|&s| s < 1.0),
        u0_survival,
        decay_ratio,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YRow {
    pub anchor: usize,
    pub trials: usize,
    /// `(y, empirical frequency, exact W(anchor, y))`
    pub entries: Vec<(usize, f64, f64)>,
    pub tv: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YKernelCheck {
    pub k: usize,
    pub seed: u64,
    pub rows: Vec<YRow>,
    pub max_tv: f64,
}

/// Empirical law of `Y_1` given `Y_0 = x` against the exact `W(x, .)`.
pub fn empirical_y_kernel(g: &Graph, k: usize, anchors: &[usize], trials: usize, seed: u64) -> Result<YKernelCheck> {
    if trials == 0 {
        return Err(invalid("trials must be positive"));
    }
    let mut rows = Vec::with_capacity(anchors.len());
    for &x in anchors {
        let exact = crate::hitting::sphere_hit_distribution(g, x, k)?;
        let hits: Vec<usize> = (0..trials as u64)
            .into_par_iter()
            .map(|i| {
                let tr = simulate_blocks(g, x, 1, k, seed, ((x as u64) << 32) | i)?;
                Ok(*tr.positions.last().expect("nonempty"))
            })
            .collect::<Result<_>>()?;
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for y in hits {
            *counts.entry(y).or_default() += 1;
        }
        let mut entries = Vec::new();
        let mut tv = 0.0;
        for (&y, &p) in exact.sphere.iter().zip(&exact.probabilities) {
            let f = counts.remove(&y).unwrap_or(0) as f64 / trials as f64;
            tv += (f - p).abs();
            entries.push((y, f, p));
        }
        if !counts.is_empty() {
            return Err(Error::Internal(format!("walk from {x} regenerated off the sphere")));
        }
        rows.push(YRow { anchor: x, trials, entries, tv: 0.5 * tv });
    }
    let max_tv = rows.iter().map(|r| r.tv).fold(0.0, f64::max);
    Ok(YKernelCheck { k, seed, rows, max_tv })
}

/// `ceil((d - 2) t / (d k))`.
pub fn tau(t: usize, d: usize, k: usize) -> usize {
    ((d - 2) * t).div_ceil(d * k)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetTerms {
    pub set: Vec<usize>,
    /// `max_{a in A} P_a[T_{A^c} > t + s]` for SRW.
    pub srw_escape: f64,
    /// `max_{a in A} P_a[Y_0, ..., Y_tau in A]`.
    pub y_escape: f64,
    /// The same for the SRW kernel `K` of `G(k)`.
    pub k_escape: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegenerationTerm {
    pub start: usize,
    /// Estimate of `P_a[T_tau > t + s]`.
    pub estimate: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeTransfer {
    pub k: usize,
    pub alpha: f64,
    pub t: usize,
    pub s: usize,
    pub tau: usize,
    pub trials: usize,
    pub seed: u64,
    pub sets: Vec<SetTerms>,
    pub regeneration: Vec<RegenerationTerm>,
    pub lhs: f64,
    pub y_term: f64,
    pub regeneration_term: f64,
    pub regeneration_stderr: f64,
    pub pass: bool,
}

/// Checks `max P_a[T_{A^c} > t+s] <= max P_a[Y stays in A for tau(t) steps] + max_a P_a[T_tau > t+s]`
/// over the candidate small sets. The regeneration term is estimated only at
/// starts lying in some candidate set, which is all the inequality uses.
pub fn escape_transfer_experiment(
    g: &Graph,
    k: usize,
    alpha: f64,
    t: usize,
    s: usize,
    trials: usize,
    seed: u64,
) -> Result<EscapeTransfer> {
    let d = g.regular_degree().ok_or(Error::NotRegular)?;
    if trials == 0 {
        return Err(invalid("trials must be positive"));
    }
    let c = srw_chain(g)?;
    if alpha < c.min_stationary() {
        return Err(invalid(format!("alpha = {alpha} is below the smallest stationary mass")));
    }
    let sets = candidate_sets(&c, alpha)?;
    if sets.is_empty() {
        return Err(invalid("no candidate sets"));
    }
    let horizon = t + s;
    let tau = tau(t, d, k);
    let w = w_kernel(g, k)?;
    let kc = inflate(g, k).ok().and_then(|h| srw_chain(&h).ok());
    let terms: Vec<SetTerms> = sets
        .par_iter()
        .map(|set| {
            let srw = survival_vector(&c, set, horizon)?.into_iter().fold(0.0, f64::max);
            let mut y = 0.0f64;
            for &a in set {
                y = y.max(w.killed_survival(set, a, tau)?);
            }
            let k_escape = match &kc {
                Some(kc) => Some(survival_vector(kc, set, tau)?.into_iter().fold(0.0, f64::max)),
                None => None,
            };
            Ok(SetTerms { set: set.clone(), srw_escape: srw, y_escape: y, k_escape })
        })
        .collect::<Result<_>>()?;
    let starts: BTreeSet<usize> = sets.iter().flatten().copied().collect();
    let regeneration: Vec<RegenerationTerm> = starts
        .iter()
        .map(|&a| {
            let slow: Vec<bool> = (0..trials as u64)
                .into_par_iter()
                .map(|i| regenerations_short(g, a, k, tau, horizon, seed, ((a as u64) << 32) | i))
                .collect::<Result<_>>()?;
            let p = slow.iter().filter(|&&b| b).count() as f64 / trials as f64;
            Ok(RegenerationTerm { start: a, estimate: p, stderr: (p * (1.0 - p) / trials as f64).sqrt() })
        })
        .collect::<Result<_>>()?;
    let lhs = terms.iter().map(|x| x.srw_escape).fold(0.0, f64::max);
    let y_term = terms.iter().map(|x| x.y_escape).fold(0.0, f64::max);
    let worst = regeneration.iter().fold(&regeneration[0], |b, r| if r.estimate > b.estimate { r } else { b });
    let pass = lhs <= y_term + worst.estimate + 4.0 * worst.stderr + 1e-12;
    Ok(EscapeTransfer {
        k,
        alpha,
        t,
        s,
        tau,
        trials,
        seed,
        sets: terms,
        lhs,
        y_term,
        regeneration_term: worst.estimate,
        regeneration_stderr: worst.stderr,
        regeneration,
        pass,
    })
}

/// Whether fewer than `tau` regenerations happen by time `horizon`.
fn regenerations_short(g: &Graph, a: usize, k: usize, tau: usize, horizon: usize, seed: u64, stream: u64) -> Result<bool> {
    if tau == 0 {
        return Ok(false);
    }
    let mut rng = rng_for(seed, stream);
    let mut r = Regenerator::new(g, k);
    r.push(0, a)?;
    let mut x = a;
    for step_t in 1..=horizon {
        x = step(g, x, &mut rng);
        if r.push(step_t, x)? && r.regeneration_count() >= tau {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_named;
    use crate::hitting::expected_regeneration_time;
    use proptest::prelude::*;

    fn named(name: &str) -> Graph {
        build_named(name, if name == "complete" { &[4] } else { &[] }).unwrap()
    }

    /// Regenerations and good flags from full BFS at every step.
    fn naive(g: &Graph, positions: &[usize], k: usize) -> (Vec<usize>, Vec<bool>) {
        let mut regs = vec![0];
        let mut good = vec![true];
        let mut anchor = positions[0];
        for (t, &x) in positions.iter().enumerate().skip(1) {
            let dx = g.distance(anchor, x).unwrap();
            if dx == k {
                regs.push(t);
                good.push(true);
                anchor = x;
                continue;
            }
            let farther = g.neighbors(x).iter().filter(|&&w| g.distance(anchor, w).unwrap() > dx).count();
            good.push(dx == 0 || farther >= g.degree(x) - 1);
        }
        (regs, good)
    }

    #[test]
    fn k4_regenerates_every_step() {
        let tr = simulate_walk(&named("complete"), 0, 10, 1, 3, 0).unwrap();
        assert_eq!(tr.regenerations, (0..=10).collect::<Vec<_>>());
        assert!(tr.u.iter().all(|&u| u == 0));
    }

    #[test]
    fn petersen_is_all_good() {
        let tr = simulate_walk(&named("petersen"), 0, 5000, 2, 11, 0).unwrap();
        assert!(tr.good.iter().all(|&g| g));
        assert!(tr.u.iter().all(|&u| u == 0));
        assert!(tr.block_lengths().iter().all(|&l| l >= 2));
    }

    #[test]
    fn prism_has_bad_times() {
        let tr = simulate_walk(&named("prism"), 0, 5000, 2, 11, 0).unwrap();
        assert!(tr.good.iter().any(|&g| !g));
        assert!(tr.u.iter().any(|&u| u >= 1));
    }

    #[test]
    fn trace_invariants_and_replay() {
        let g = crate::graph::build_random_regular(80, 3, 2).unwrap();
        for stream in 0..5 {
            let tr = simulate_walk(&g, 3, 3000, 3, 99, stream).unwrap();
            let (regs, good) = naive(&g, &tr.positions, 3);
            assert_eq!(tr.regenerations, regs);
            assert_eq!(tr.good, good);
            assert_eq!(replay(&g, &tr.positions, 3).unwrap(), (tr.regenerations.clone(), tr.good.clone(), tr.u.clone()));
            for (i, w) in tr.regenerations.windows(2).enumerate() {
                let a = tr.positions[w[0]];
                assert_eq!(g.distance(a, tr.positions[w[1]]), Some(3));
                assert!((w[0]..w[1]).all(|t| g.distance(a, tr.positions[t]).unwrap() < 3));
                let goods = tr.good[w[0]..w[1]].iter().filter(|&&b| b).count();
                assert_eq!(tr.u[i], w[1] - w[0] - goods);
            }
        }
    }

    #[test]
    fn seeded_walks_are_reproducible() {
        let g = named("petersen");
        assert_eq!(simulate_walk(&g, 0, 200, 2, 5, 1).unwrap(), simulate_walk(&g, 0, 200, 2, 5, 1).unwrap());
        assert_ne!(simulate_walk(&g, 0, 200, 2, 5, 1).unwrap().positions, simulate_walk(&g, 0, 200, 2, 5, 2).unwrap().positions);
    }

    #[test]
    fn regeneration_impossible_is_an_error() {
        assert!(matches!(simulate_walk(&named("complete"), 0, 10, 2, 0, 0), Err(Error::EmptySphere { .. })));
        assert!(simulate_walk(&named("complete"), 0, 10, 0, 0, 0).is_err());
    }

    #[test]
    fn csv_dump() {
        let tr = simulate_walk(&named("complete"), 0, 2, 1, 0, 0).unwrap();
        let csv = tr.to_csv();
        assert!(csv.starts_with("t,vertex,anchor,good\n0,0,0,1\n"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn block_statistics_petersen() {
        let g = named("petersen");
        let traces = first_blocks(&g, 0, 2, 20_000, 7).unwrap();
        let st = block_statistics(&traces).unwrap();
        let exact = expected_regeneration_time(&g, 0, 2).unwrap();
        assert!((st.mean_t1 - exact).abs() <= 4.0 * st.stderr_t1);
        assert_eq!(st.u0_survival, vec![0.0]);
        assert!(st.decay_ratio.is_none());
        assert!(block_statistics(&traces[..10]).is_err());
    }

    #[test]
    fn block_statistics_prism() {
        let g = named("prism");
        let traces = first_blocks(&g, 0, 2, 20_000, 7).unwrap();
        let st = block_statistics(&traces).unwrap();
        let exact = expected_regeneration_time(&g, 0, 2).unwrap();
        assert!((st.mean_t1 - exact).abs() <= 4.0 * st.stderr_t1);
        assert!(st.u0_survival[0] > 0.0);
        assert!(st.survival_monotone && st.eventually_below_one);
        assert!(st.decay_ratio.unwrap() < 1.0);
    }

    #[test]
    fn y_kernel_examples() {
        let chk = empirical_y_kernel(&named("petersen"), 2, &[0, 4], 20_000, 1).unwrap();
        assert!(chk.max_tv <= 0.02);
        for row in &chk.rows {
            assert_eq!(row.entries.len(), 6);
            for &(_, f, p) in &row.entries {
                let se = (p * (1.0 - p) / row.trials as f64).sqrt();
                assert!((f - p).abs() <= 4.0 * se);
            }
        }
        let chk = empirical_y_kernel(&named("prism"), 2, &[0], 20_000, 1).unwrap();
        assert_eq!(chk.rows[0].entries.len(), 2);
        assert!(chk.max_tv <= 0.02);
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(60, 3, 2), 10);
        assert_eq!(tau(0, 5, 3), 0);
        assert_eq!(tau(61, 3, 2), 11);
    }

    #[test]
    fn escape_transfer_petersen() {
        let e = escape_transfer_experiment(&named("petersen"), 2, 0.25, 12, 6, 5000, 3).unwrap();
        assert_eq!(e.tau, 2);
        assert!(e.pass);
        for st in &e.sets {
            assert!((st.y_escape - st.k_escape.unwrap()).abs() <= 1e-12);
        }
        let e = escape_transfer_experiment(&named("petersen"), 2, 0.25, 0, 3, 100, 3).unwrap();
        assert_eq!((e.tau, e.regeneration_term), (0, 0.0));
        assert!(e.lhs <= 1.0 && e.pass);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn replay_is_pure(seed in 0u64..1000, k in 1usize..4) {
            let g = crate::graph::build_random_regular(40, 3, seed).unwrap();
            let tr = simulate_walk(&g, 0, 400, k, seed, 0).unwrap();
            let (regs, good, u) = replay(&g, &tr.positions, k).unwrap();
            prop_assert_eq!(regs, tr.regenerations);
            prop_assert_eq!(good, tr.good);
            prop_assert_eq!(u, tr.u);
        }
    }
}
