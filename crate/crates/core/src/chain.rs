//! Reversible finite Markov chains: kernels, exact evolution of distributions,
//! distances to stationarity and worst-start mixing profiles.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::Graph;

/// Row sums and detailed balance are checked to this tolerance.
pub const KERNEL_TOL: f64 = 1e-12;
/// Exact worst-start maximization is used up to this many states.
pub const EXACT_START_LIMIT: usize = 5000;
/// Number of farthest-point starts used above [`EXACT_START_LIMIT`].
pub const SAMPLED_STARTS: usize = 64;
/// Largest number of stored entries a dense matrix power may produce.
pub const POWER_ENTRY_BUDGET: usize = 25_000_000;

/// Row-stochastic sparse matrix in compressed-row form.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl Kernel {
    /// Builds a kernel from per-row `(column, value)` lists. Zero entries are dropped.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_unstable_by_key(|&(c, _)| c);
            for (c, v) in row {
                if v != 0.0 {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Kernel { row_ptr, cols, vals }
    }

    pub fn n(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, x: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[x]..self.row_ptr[x + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        let r = self.row_ptr[x]..self.row_ptr[x + 1];
        match self.cols[r.clone()].binary_search(&y) {
            Ok(i) => self.vals[r.start + i],
            Err(_) => 0.0,
        }
    }

    /// `out = mu * P` (distribution step).
    pub fn step(&self, mu: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (x, &m) in mu.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            for (y, p) in self.row(x) {
                out[y] += m * p;
            }
        }
    }

    /// `out = P * f` (function step).
    pub fn apply(&self, f: &[f64], out: &mut [f64]) {
        for (x, o) in out.iter_mut().enumerate() {
            *o = self.row(x).map(|(y, p)| p * f[y]).sum();
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.n();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for x in 0..n {
            for (y, p) in self.row(x) {
                m[(x, y)] = p;
            }
        }
        m
    }

    fn support_components(&self) -> Vec<usize> {
        let n = self.n();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for (w, _) in self.row(u) {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    fn support_bfs(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for (w, _) in self.row(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Periodicity {
    Aperiodic,
    /// Some communicating class is bipartite (period 2).
    BipartitePeriodic,
}

#[derive(Clone, Debug)]
pub struct ReversibleChain {
    kernel: Kernel,
    stationary: Vec<f64>,
    periodicity: Periodicity,
    components: Vec<usize>,
    source: String,
}

impl ReversibleChain {
    /// Wraps a kernel with a claimed stationary law, verifying row sums,
    /// normalization and detailed balance.
    pub fn from_kernel(kernel: Kernel, stationary: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        let n = kernel.n();
        if stationary.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: stationary.len() });
        }
        for x in 0..n {
            let s: f64 = kernel.row(x).map(|(_, p)| p).sum();
            if (s - 1.0).abs() > KERNEL_TOL || kernel.row(x).any(|(_, p)| p < 0.0) {
                return Err(Error::NotReversible(format!("row {x} is not a probability vector (sum {s})")));
            }
        }
        let total: f64 = stationary.iter().sum();
        if (total - 1.0).abs() > KERNEL_TOL || stationary.iter().any(|&p| p <= 0.0) {
            return Err(Error::NotReversible("stationary vector is not a positive probability vector".into()));
        }
        for x in 0..n {
            for (y, p) in kernel.row(x) {
                let flux = stationary[x] * p - stationary[y] * kernel.get(y, x);
                if flux.abs() > KERNEL_TOL {
                    return Err(Error::NotReversible(format!("detailed balance fails at ({x}, {y}) by {flux:e}")));
                }
            }
        }
        let components = kernel.support_components();
        let periodicity = periodicity_of(&kernel, &components);
        Ok(ReversibleChain { kernel, stationary, periodicity, components, source: source.into() })
    }

    pub fn n(&self) -> usize {
        self.kernel.n()
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn periodicity(&self) -> Periodicity {
        self.periodicity
    }

    pub fn is_aperiodic(&self) -> bool {
        self.periodicity == Periodicity::Aperiodic
    }

    /// Communicating class of each state.
    pub fn components(&self) -> &[usize] {
        &self.components
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn min_stationary(&self) -> f64 {
        self.stationary.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn periodicity_of(kernel: &Kernel, components: &[usize]) -> Periodicity {
    let n = kernel.n();
    let mut side = vec![u8::MAX; n];
    let ncomp = components.iter().copied().max().map_or(0, |m| m + 1);
    let mut bipartite = vec![true; ncomp];
    for s in 0..n {
        if side[s] != u8::MAX {
            continue;
        }
        side[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for (w, _) in kernel.row(u) {
                if side[w] == u8::MAX {
                    side[w] = 1 - side[u];
                    queue.push_back(w);
                } else if side[w] == side[u] {
                    // covers self-loops too
                    bipartite[components[s]] = false;
                }
            }
        }
    }
    if bipartite.iter().any(|&b| b) {
        Periodicity::BipartitePeriodic
    } else {
        Periodicity::Aperiodic
    }
}

/// Simple random walk: `P(x, y) = 1/deg(x)` on edges, `pi(x) = deg(x) / 2|E|`.
pub fn srw_chain(g: &Graph) -> Result<ReversibleChain> {
    let isolated: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) == 0).collect();
    if !isolated.is_empty() {
        return Err(Error::IsolatedVertices(isolated));
    }
    let rows = (0..g.n())
        .map(|x| {
            let p = 1.0 / g.degree(x) as f64;
            g.neighbors(x).iter().map(|&y| (y, p)).collect()
        })
        .collect();
    let two_m = 2.0 * g.num_edges() as f64;
    let stationary = (0..g.n()).map(|x| g.degree(x) as f64 / two_m).collect();
    ReversibleChain::from_kernel(Kernel::from_rows(rows), stationary, g.provenance().to_string())
}

/// `mu0 * P^t`.
pub fn evolve(c: &ReversibleChain, mu0: &[f64], t: usize) -> Result<Vec<f64>> {
    if mu0.len() != c.n() {
        return Err(Error::DimensionMismatch { expected: c.n(), got: mu0.len() });
    }
    let mut mu = mu0.to_vec();
    let mut next = vec![0.0; c.n()];
    for _ in 0..t {
        c.kernel.step(&mu, &mut next);
        std::mem::swap(&mut mu, &mut next);
    }
    Ok(mu)
}

pub fn point_mass(n: usize, x: usize) -> Vec<f64> {
    let mut mu = vec![0.0; n];
    mu[x] = 1.0;
    mu
}

/// Total variation distance `1/2 sum |mu - nu|`.
pub fn total_variation(mu: &[f64], nu: &[f64]) -> f64 {
    0.5 * mu.iter().zip(nu).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Squared `L2(pi)` distance of the density `mu/pi` from 1,
/// i.e. `sum_y pi(y) (mu(y)/pi(y))^2 - 1`, evaluated as `sum (mu - pi)^2 / pi`.
pub fn l2_squared(mu: &[f64], pi: &[f64]) -> f64 {
    mu.iter().zip(pi).map(|(m, p)| (m - p) * (m - p) / p).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distances {
    pub tv: f64,
    pub l2sq: f64,
}

/// TV and squared L2 distances of `P^t(x, .)` from stationarity.
pub fn distances(c: &ReversibleChain, x: usize, t: usize) -> Result<Distances> {
    if x >= c.n() {
        return Err(invalid(format!("state {x} out of range")));
    }
    let mu = evolve(c, &point_mass(c.n(), x), t)?;
    Ok(Distances { tv: total_variation(&mu, &c.stationary), l2sq: l2_squared(&mu, &c.stationary) })
}

/// Distances from `x` at every `t in 0..=t_max`.
pub fn distance_curve(c: &ReversibleChain, x: usize, t_max: usize) -> Vec<Distances> {
    let mut curve = Vec::with_capacity(t_max + 1);
    let mut mu = point_mass(c.n(), x);
    let mut next = vec![0.0; c.n()];
    for t in 0..=t_max {
        curve.push(Distances { tv: total_variation(&mu, &c.stationary), l2sq: l2_squared(&mu, &c.stationary) });
        if t < t_max {
            c.kernel.step(&mu, &mut next);
            std::mem::swap(&mut mu, &mut next);
        }
    }
    curve
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffRatio {
    pub eps: f64,
    /// `t_mix(eps) / t_mix(1 - eps)`
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingProfile {
    pub eps: Vec<f64>,
    /// `t_mix(eps)`; `None` when not reached by `t_max`.
    pub t_mix: Vec<Option<usize>>,
    /// Worst-start TV at `t = 0, 1, ...` until every start is below the smallest `eps`.
    pub worst_tv: Vec<f64>,
    pub ratios: Vec<CutoffRatio>,
    pub starts: usize,
    /// Set when only a sample of starts was used: the profile is then a lower bound.
    pub lower_bound_profile: bool,
    /// TV and L2 were nonincreasing along every evolved trajectory.
    pub monotone: bool,
}

impl MixingProfile {
    pub fn t_mix_at(&self, eps: f64) -> Option<usize> {
        self.eps.iter().position(|&e| e == eps).and_then(|i| self.t_mix[i])
    }
}

/// Worst-start mixing times `t_mix(eps) = min { t : max_x TV(P^t(x,.), pi) <= eps }`.
///
/// Every start is evolved until its own TV drops to `min(eps)` or `t_max` is
/// reached. Since each start's TV is nonincreasing, the worst-start curve at
/// time `t` is attained among the starts still running at `t`.
pub fn mixing_profile(c: &ReversibleChain, eps_grid: &[f64], t_max: usize) -> Result<MixingProfile> {
    if !c.is_aperiodic() {
        return Err(Error::Periodic);
    }
    if eps_grid.is_empty() || eps_grid.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(invalid("eps grid must be nonempty with values in (0, 1)"));
    }
    let eps_min = eps_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let (starts, sampled) = mixing_starts(c);
    let curves: Vec<(Vec<f64>, bool)> = starts
        .par_iter()
        .map(|&x| {
            let mut mu = point_mass(c.n(), x);
            let mut next = vec![0.0; c.n()];
            let mut tvs = Vec::new();
            let mut monotone = true;
            let mut prev = (f64::INFINITY, f64::INFINITY);
            for t in 0..=t_max {
                let tv = total_variation(&mu, &c.stationary);
                let l2 = l2_squared(&mu, &c.stationary);
                monotone &= tv <= prev.0 + KERNEL_TOL && l2 <= prev.1 * (1.0 + 1e-9) + KERNEL_TOL;
                prev = (tv, l2);
                tvs.push(tv);
                if tv <= eps_min || t == t_max {
                    break;
                }
                c.kernel.step(&mu, &mut next);
                std::mem::swap(&mut mu, &mut next);
            }
            (tvs, monotone)
        })
        .collect();
    let horizon = curves.iter().map(|(tv, _)| tv.len()).max().unwrap_or(0);
    let worst_tv: Vec<f64> = (0..horizon)
        .map(|t| curves.iter().filter_map(|(tv, _)| tv.get(t).copied()).fold(0.0, f64::max))
        .collect();
    let t_mix: Vec<Option<usize>> = eps_grid.iter().map(|&e| worst_tv.iter().position(|&tv| tv <= e)).collect();
    let mut ratios = Vec::new();
    for (i, &e) in eps_grid.iter().enumerate() {
        if e > 0.5 {
            continue;
        }
        if let Some(j) = eps_grid.iter().position(|&f| (f - (1.0 - e)).abs() < 1e-12) {
            if let (Some(a), Some(b)) = (t_mix[i], t_mix[j]) {
                if b > 0 {
                    ratios.push(CutoffRatio { eps: e, ratio: a as f64 / b as f64 });
                }
            }
        }
    }
    Ok(MixingProfile {
        eps: eps_grid.to_vec(),
        t_mix,
        worst_tv,
        ratios,
        starts: starts.len(),
        lower_bound_profile: sampled,
        monotone: curves.iter().all(|(_, m)| *m),
    })
}

/// All states for small chains; otherwise farthest-point samples in the
/// support graph, starting from state 0.
pub fn mixing_starts(c: &ReversibleChain) -> (Vec<usize>, bool) {
    let n = c.n();
    if n <= EXACT_START_LIMIT {
        return ((0..n).collect(), false);
    }
    let mut chosen = vec![0];
    let mut nearest = c.kernel.support_bfs(0);
    while chosen.len() < SAMPLED_STARTS {
        let (far, _) = nearest.iter().enumerate().max_by_key(|&(i, &d)| (d, std::cmp::Reverse(i))).unwrap();
        chosen.push(far);
        for (a, b) in nearest.iter_mut().zip(c.kernel.support_bfs(far)) {
            *a = (*a).min(b);
        }
    }
    (chosen, true)
}

/// The `t`-step chain: kernel `P^t`, same stationary law.
pub fn power_chain(c: &ReversibleChain, t: usize) -> Result<ReversibleChain> {
    if t == 0 {
        return Err(invalid("power exponent must be at least 1"));
    }
    if t == 1 {
        return Ok(c.clone());
    }
    let n = c.n();
    // Row x of P^t is delta_x P^t; its support is the radius-t support ball.
    let reach: usize = (0..n.min(64)).map(|x| c.kernel.support_bfs(x).iter().filter(|&&d| d <= t).count()).max().unwrap_or(0);
    if n.saturating_mul(reach) > POWER_ENTRY_BUDGET {
        return Err(Error::Budget(format!("P^{t} on {n} states needs about {} entries", n * reach)));
    }
    let rows: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mu = evolve(c, &point_mass(n, x), t).expect("dimension checked");
            mu.into_iter().enumerate().filter(|&(_, p)| p != 0.0).collect()
        })
        .collect();
    ReversibleChain::from_kernel(Kernel::from_rows(rows), c.stationary.clone(), format!("{}^{t}", c.source))
}
