//! Killed-chain survival, escape-time quantiles and sphere-hitting laws.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{mixing_profile, ReversibleChain};
use crate::error::{invalid, Error, Result};
use crate::graph::{ball_stats, Graph};
use crate::spectral::{lanczos_extremes, restricted_top_eig, spectrum, validate_set, SpectrumMode, DENSE_BUDGET, ITERATIVE_TOL};

pub const HIT_SLACK: f64 = 1e-10;
pub const LEMMA52_SLACK: f64 = 1e-12;
/// Largest state space for exhaustive set enumeration.
pub const EXACT_SEARCH_LIMIT: usize = 20;
/// Largest interior `B_{k-1}` solved by dense LU; bigger balls use mass propagation.
pub const DIRECT_SOLVE_LIMIT: usize = 2000;
pub const ABSORB_TOL: f64 = 1e-15;
pub const ABSORB_MAX_ITER: usize = 10_000_000;
pub const DEFAULT_HIT_HORIZON: usize = 100_000;
const MASS_TOL: f64 = 1e-12;

/// `P_A` in local coordinates: `rows[i]` lists `(j, P(set[i], set[j]))`.
struct Killed {
    set: Vec<usize>,
    rows: Vec<Vec<(usize, f64)>>,
}

impl Killed {
    fn from_rows(set: Vec<usize>, row: impl Fn(usize) -> Vec<(usize, f64)>) -> Self {
        let rows = set
            .iter()
            .map(|&x| row(x).into_iter().filter_map(|(y, p)| set.binary_search(&y).ok().map(|j| (j, p))).collect())
            .collect();
        Killed { set, rows }
    }

    fn new(c: &ReversibleChain, set: &[usize]) -> Result<Self> {
        let set = validate_set(c.n(), set)?;
        Ok(Self::from_rows(set, |x| c.kernel().row(x).collect()))
    }

    fn index(&self, a: usize) -> Result<usize> {
        self.set.binary_search(&a).map_err(|_| Error::NotInSet(a))
    }

    fn apply(&self, f: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row.iter().fold(0.0, |acc, &(j, p)| acc + p * f[j]);
        }
    }

    /// `P_A^t 1`, indexed like `set`.
    fn survival(&self, t: usize) -> Vec<f64> {
        let mut f = vec![1.0; self.set.len()];
        let mut next = vec![0.0; self.set.len()];
        for _ in 0..t {
            self.apply(&f, &mut next);
            std::mem::swap(&mut f, &mut next);
        }
        f
    }

    /// First `t` with `max_a P_a[T_{A^c} > t] <= eps`, and the maximizing
    /// start one step earlier.
    fn first_escape(&self, eps: f64, horizon: usize) -> Result<(usize, usize)> {
        let mut f = vec![1.0; self.set.len()];
        let mut next = vec![0.0; self.set.len()];
        let mut prev = 0;
        for t in 0..=horizon {
            let (arg, max) = argmax(&f);
            if max <= eps {
                return Ok((t, prev));
            }
            prev = arg;
            if t == horizon {
                break;
            }
            self.apply(&f, &mut next);
            std::mem::swap(&mut f, &mut next);
        }
        Err(Error::Budget(format!("survival in a set of size {} stays above {eps} for {horizon} steps", self.set.len())))
    }
}

fn argmax(v: &[f64]) -> (usize, f64) {
    v.iter().enumerate().fold((0, f64::NEG_INFINITY), |best, (i, &x)| if x > best.1 { (i, x) } else { best })
}

/// `P_a[T_{A^c} > t]` for every `a` in `set` (sorted order).
pub fn survival_vector(c: &ReversibleChain, set: &[usize], t: usize) -> Result<Vec<f64>> {
    Ok(Killed::new(c, set)?.survival(t))
}

/// `P_a[T_{A^c} > t] = (P_A^t 1)(a)`.
pub fn survival_probability(c: &ReversibleChain, set: &[usize], a: usize, t: usize) -> Result<f64> {
    let killed = Killed::new(c, set)?;
    let i = killed.index(a)?;
    Ok(killed.survival(t)[i])
}

/// Survival at `t = 0..=t_max` from `a`.
pub fn survival_curve(c: &ReversibleChain, set: &[usize], a: usize, t_max: usize) -> Result<Vec<f64>> {
    let killed = Killed::new(c, set)?;
    let i = killed.index(a)?;
    let mut f = vec![1.0; killed.set.len()];
    let mut next = vec![0.0; killed.set.len()];
    let mut curve = vec![1.0];
    for _ in 0..t_max {
        killed.apply(&f, &mut next);
        std::mem::swap(&mut f, &mut next);
        curve.push(f[i]);
    }
    Ok(curve)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HitSearch {
    /// Every set with `pi(A) <= alpha`; `n <= 20` only.
    Exact,
    /// Balls, greedily grown connected sets and level sets of the second
    /// eigenvector. Gives a lower bound on the true quantile.
    CandidateFamily,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HitQuantile {
    pub alpha: f64,
    pub eps: f64,
    pub search: HitSearch,
    pub time: usize,
    /// True when the search did not cover every admissible set.
    pub lower_bound: bool,
    pub sets_examined: usize,
    pub worst_set: Vec<usize>,
    pub worst_start: Option<usize>,
}

/// `hit_{1-alpha}(eps)`: the first `t` with
/// `max_{x, A : pi(A) <= alpha} P_x[T_{A^c} > t] <= eps`.
///
/// Survival is monotone under inclusion of sets, so only sets that cannot be
/// enlarged within the mass budget need to be examined.
pub fn hit_quantile(c: &ReversibleChain, alpha: f64, eps: f64, search: HitSearch, horizon: usize) -> Result<HitQuantile> {
    for (name, x) in [("alpha", alpha), ("eps", eps)] {
        if !(x > 0.0 && x < 1.0) {
            return Err(invalid(format!("{name} must lie in (0, 1), got {x}")));
        }
    }
    let n = c.n();
    let pi = c.stationary();
    let sets: Vec<Vec<usize>> = match search {
        HitSearch::Exact => {
            if n > EXACT_SEARCH_LIMIT {
                return Err(Error::Budget(format!("exact set search needs n <= {EXACT_SEARCH_LIMIT}, got {n}")));
            }
            (1u32..(1 << n))
                .into_par_iter()
                .filter_map(|mask| {
                    let mass: f64 = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| pi[i]).sum();
                    if mass > alpha + MASS_TOL || mask == (1 << n) - 1 {
                        return None;
                    }
                    let room = (0..n).filter(|&i| mask >> i & 1 == 0).any(|i| mass + pi[i] <= alpha + MASS_TOL);
                    (!room).then(|| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
                })
                .collect()
        }
        HitSearch::CandidateFamily => candidate_sets(c, alpha)?,
    };
    let lower_bound = search == HitSearch::CandidateFamily;
    let results: Vec<(usize, usize)> = sets
        .par_iter()
        .map(|s| Killed::new(c, s).and_then(|k| k.first_escape(eps, horizon)))
        .collect::<Result<_>>()?;
    // first maximizer in the deterministic set order
    let mut best: Option<(usize, usize)> = None;
    for (i, &(t, _)) in results.iter().enumerate() {
        if best.is_none_or(|(bt, _)| t > bt) {
            best = Some((t, i));
        }
    }
    let (time, worst_set, worst_start) = match best {
        Some((t, i)) => (t, sets[i].clone(), Some(sets[i][results[i].1])),
        None => (0, Vec::new(), None),
    };
    Ok(HitQuantile { alpha, eps, search, time, lower_bound, sets_examined: sets.len(), worst_set, worst_start })
}

/// Sorted, deduplicated candidate sets, each maximal under the mass budget.
pub fn candidate_sets(c: &ReversibleChain, alpha: f64) -> Result<Vec<Vec<usize>>> {
    let n = c.n();
    let pi = c.stationary();
    if pi.iter().all(|&p| p > alpha + MASS_TOL) {
        return Ok(Vec::new());
    }
    let seeds: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .flat_map_iter(|v| {
            let mut out = Vec::new();
            if pi[v] <= alpha + MASS_TOL {
                out.push(vec![v]);
                let ball = largest_ball(c, v, alpha);
                if ball.len() > 1 {
                    out.push(ball);
                }
            }
            out
        })
        .collect();
    let mut family: BTreeSet<Vec<usize>> = seeds.par_iter().map(|s| greedy_extend(c, s.clone(), alpha)).collect::<Vec<_>>().into_iter().collect();
    if n >= 3 {
        let ext = lanczos_extremes(c, ITERATIVE_TOL)?;
        let score: Vec<f64> = ext.max_vector.iter().zip(pi).map(|(v, p)| v / p.sqrt()).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| score[a].total_cmp(&score[b]).then(a.cmp(&b)));
        for dir in [false, true] {
            if dir {
                order.reverse();
            }
            let mut set = Vec::new();
            let mut mass = 0.0;
            for &v in &order {
                if mass + pi[v] > alpha + MASS_TOL {
                    break;
                }
                mass += pi[v];
                set.push(v);
            }
            if !set.is_empty() {
                family.insert(greedy_extend(c, set, alpha));
            }
        }
    }
    Ok(family.into_iter().filter(|s| s.len() < n).collect())
}

fn largest_ball(c: &ReversibleChain, v: usize, alpha: f64) -> Vec<usize> {
    let pi = c.stationary();
    let mut ball = vec![v];
    let mut mass = pi[v];
    let mut seen = BTreeSet::from([v]);
    let mut frontier = vec![v];
    loop {
        let mut shell = BTreeSet::new();
        for &x in &frontier {
            for (y, _) in c.kernel().row(x) {
                if !seen.contains(&y) {
                    shell.insert(y);
                }
            }
        }
        let shell_mass: f64 = shell.iter().map(|&y| pi[y]).sum();
        if shell.is_empty() || mass + shell_mass > alpha + MASS_TOL {
            return ball;
        }
        mass += shell_mass;
        seen.extend(shell.iter().copied());
        ball.extend(shell.iter().copied());
        frontier = shell.into_iter().collect();
    }
}

/// Adds the vertex with the largest transition mass into the set, ties to
/// the smallest index, until nothing else fits under `alpha`.
fn greedy_extend(c: &ReversibleChain, mut set: Vec<usize>, alpha: f64) -> Vec<usize> {
    let n = c.n();
    let pi = c.stationary();
    let mut inside = vec![false; n];
    let mut mass = 0.0;
    for &x in &set {
        inside[x] = true;
        mass += pi[x];
    }
    loop {
        let mut best: Option<(usize, f64)> = None;
        for y in 0..n {
            if inside[y] || mass + pi[y] > alpha + MASS_TOL {
                continue;
            }
            let score: f64 = c.kernel().row(y).filter(|&(z, _)| inside[z]).map(|(_, p)| p).sum();
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((y, score));
            }
        }
        match best {
            Some((y, _)) => {
                inside[y] = true;
                mass += pi[y];
                set.push(y);
            }
            None => break,
        }
    }
    set.sort_unstable();
    set
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralHitRecord {
    pub t: usize,
    /// Start attaining `max_a pi_A(a) P_a[T_{A^c} > t]^2`.
    pub start: usize,
    /// `pi_A(a) P_a[T_{A^c} > t]^2`
    pub lhs: f64,
    /// `||P_A^t 1_A||^2_{2,A}` as a weighted sum of survival probabilities.
    pub middle: f64,
    /// The same norm from the symmetrized iteration.
    pub middle_alt: f64,
    /// `lambda(A)^{2t}`
    pub rhs: f64,
    pub left_pass: bool,
    pub right_pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum LaE2Check {
    Skipped { reason: String },
    Checked { lambda2: f64, hit: usize, lower_bound: bool, rhs: f64, pass: bool },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum HitmixCheck {
    Skipped { reason: String },
    /// `C_impl = (t_mix(eps + alpha) - hit) / (t_rel log(1/alpha))`
    Measured { t_mix: usize, hit: usize, t_rel: f64, c_impl: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HitReport {
    pub set: Vec<usize>,
    pub pi_a: f64,
    /// Start with the largest survival at the last requested time.
    pub start: usize,
    pub survival: Vec<f64>,
    pub lambda_a: f64,
    pub lambda_a_residual: f64,
    pub alpha: f64,
    pub eps: f64,
    pub spectral_hit: Vec<SpectralHitRecord>,
    pub la_e2: LaE2Check,
    pub hitmix: HitmixCheck,
    pub pass: bool,
}

/// Evaluates the `spectralhit` chain on `set` at every `t` in `t_list`, the
/// `hit_{1-alpha}(sqrt(alpha)) <= 1/2 |log_{1/(2 lambda2)} min pi|` bound,
/// and the constant implied by `t_mix(eps + alpha) <= hit_{1-alpha}(eps) + C t_rel log(1/alpha)`.
pub fn verify_spectral_hit(
    c: &ReversibleChain,
    set: &[usize],
    t_list: &[usize],
    alpha: f64,
    eps: f64,
    search: HitSearch,
) -> Result<HitReport> {
    let killed = Killed::new(c, set)?;
    let pi = c.stationary();
    let pi_a: f64 = killed.set.iter().map(|&x| pi[x]).sum();
    let weights: Vec<f64> = killed.set.iter().map(|&x| pi[x] / pi_a).collect();
    let eig = restricted_top_eig(c, &killed.set)?;
    let lambda_a = eig.lambda;
    let t_max = t_list.iter().copied().max().unwrap_or(0);

    let sym = Killed::from_rows(killed.set.clone(), |x| {
        c.kernel().row(x).map(|(y, p)| (y, (pi[x] / pi[y]).sqrt() * p)).collect()
    });
    let mut f = vec![1.0; killed.set.len()];
    let mut g: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let mut scratch = vec![0.0; killed.set.len()];
    let mut survival_rows = Vec::with_capacity(t_max + 1);
    let mut records = Vec::new();
    let wanted: BTreeSet<usize> = t_list.iter().copied().collect();
    for t in 0..=t_max {
        if t > 0 {
            killed.apply(&f, &mut scratch);
            std::mem::swap(&mut f, &mut scratch);
            sym.apply(&g, &mut scratch);
            std::mem::swap(&mut g, &mut scratch);
        }
        survival_rows.push(f.clone());
        if wanted.contains(&t) {
            let (i, lhs) = argmax(&f.iter().zip(&weights).map(|(s, w)| w * s * s).collect::<Vec<_>>());
            let middle: f64 = f.iter().zip(&weights).map(|(s, w)| w * s * s).sum();
            let middle_alt: f64 = g.iter().map(|x| x * x).sum();
            let rhs = lambda_a.abs().powi(2 * t as i32);
            records.push(SpectralHitRecord {
                t,
                start: killed.set[i],
                lhs,
                middle,
                middle_alt,
                rhs,
                left_pass: lhs <= middle + HIT_SLACK,
                right_pass: middle <= rhs + HIT_SLACK,
            });
        }
    }
    let start_idx = argmax(survival_rows.last().expect("t = 0 row")).0;
    let survival = survival_rows.iter().map(|row| row[start_idx]).collect();

    let mode = if c.n() <= DENSE_BUDGET { SpectrumMode::DenseFull } else { SpectrumMode::IterativeExtremal };
    let summary = spectrum(c, mode)?;
    let la_e2 = if !(summary.lambda2 > 0.0 && summary.lambda2 < 0.5) {
        LaE2Check::Skipped { reason: format!("lambda2 = {} is outside (0, 1/2)", summary.lambda2) }
    } else {
        let q = hit_quantile(c, alpha, alpha.sqrt(), search, DEFAULT_HIT_HORIZON)?;
        let rhs = 0.5 * (c.min_stationary().ln() / (1.0 / (2.0 * summary.lambda2)).ln()).abs();
        LaE2Check::Checked { lambda2: summary.lambda2, hit: q.time, lower_bound: q.lower_bound, rhs, pass: q.time as f64 <= rhs + HIT_SLACK }
    };
    let hitmix = if !c.is_aperiodic() {
        HitmixCheck::Skipped { reason: "chain is periodic".into() }
    } else if eps + alpha >= 1.0 {
        HitmixCheck::Skipped { reason: format!("eps + alpha = {} is not below 1", eps + alpha) }
    } else if let Some(t_rel) = summary.t_rel {
        let profile = mixing_profile(c, &[eps + alpha], DEFAULT_HIT_HORIZON)?;
        let t_mix = profile.t_mix[0].ok_or_else(|| Error::Budget("t_mix not reached within the horizon".into()))?;
        let hit = hit_quantile(c, alpha, eps, search, DEFAULT_HIT_HORIZON)?.time;
        let c_impl = (t_mix as f64 - hit as f64) / (t_rel * (1.0 / alpha).ln());
        HitmixCheck::Measured { t_mix, hit, t_rel, c_impl }
    } else {
        HitmixCheck::Skipped { reason: "relaxation time is infinite".into() }
    };
    let pass = records.iter().all(|r| r.left_pass && r.right_pass)
        && !matches!(la_e2, LaE2Check::Checked { pass: false, .. });
    Ok(HitReport {
        set: killed.set.clone(),
        pi_a,
        start: killed.set[start_idx],
        survival,
        lambda_a,
        lambda_a_residual: eig.residual,
        alpha,
        eps,
        spectral_hit: records,
        la_e2,
        hitmix,
        pass,
    })
}

/// Expected visits to each interior vertex before the walk from `v` first
/// reaches `D_k(v)`, i.e. row `v` of `(I - Q)^{-1}` over `B_{k-1}(v)`.
struct Green {
    dist: Vec<usize>,
    interior: Vec<usize>,
    visits: Vec<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
#[cfg_attr(not(test), allow(dead_code))]
enum Solver {
    Auto,
    Direct,
    Propagate,
}

fn green_row(g: &Graph, v: usize, k: usize, solver: Solver) -> Result<Green> {
    if k == 0 {
        return Err(invalid("sphere radius must be at least 1"));
    }
    if v >= g.n() {
        return Err(invalid(format!("vertex {v} out of range")));
    }
    let dist = g.bfs_limited(v, k);
    if !dist.contains(&k) {
        return Err(Error::EmptySphere { v, k });
    }
    let interior: Vec<usize> = (0..g.n()).filter(|&x| dist[x] < k).collect();
    let m = interior.len();
    let local = |x: usize| interior.binary_search(&x).ok();
    let direct = match solver {
        Solver::Auto => m <= DIRECT_SOLVE_LIMIT,
        Solver::Direct => true,
        Solver::Propagate => false,
    };
    let visits = if direct {
        // (I - Q)^T y = e_v
        let mut a = DMatrix::<f64>::identity(m, m);
        for (i, &x) in interior.iter().enumerate() {
            let p = 1.0 / g.degree(x) as f64;
            for &y in g.neighbors(x) {
                if let Some(j) = local(y) {
                    a[(j, i)] -= p;
                }
            }
        }
        let mut e = DVector::zeros(m);
        e[local(v).expect("center is interior")] = 1.0;
        let y = a.lu().solve(&e).ok_or_else(|| Error::Internal(format!("singular absorbing system at v = {v}, k = {k}")))?;
        y.iter().copied().collect()
    } else {
        let mut mu = vec![0.0; m];
        mu[local(v).expect("center is interior")] = 1.0;
        let mut acc = vec![0.0; m];
        let mut next = vec![0.0; m];
        let mut iter = 0;
        loop {
            for (a, x) in acc.iter_mut().zip(&mu) {
                *a += x;
            }
            let remaining: f64 = mu.iter().sum();
            if remaining <= ABSORB_TOL {
                break;
            }
            iter += 1;
            if iter > ABSORB_MAX_ITER {
                return Err(Error::NoConvergence { iterations: iter, residual: remaining });
            }
            next.fill(0.0);
            for (i, &x) in interior.iter().enumerate() {
                if mu[i] == 0.0 {
                    continue;
                }
                let share = mu[i] / g.degree(x) as f64;
                for &y in g.neighbors(x) {
                    if let Some(j) = local(y) {
                        next[j] += share;
                    }
                }
            }
            std::mem::swap(&mut mu, &mut next);
        }
        acc
    };
    Ok(Green { dist, interior, visits })
}

fn sphere_law(g: &Graph, green: &Green, k: usize) -> (Vec<usize>, Vec<f64>) {
    let sphere: Vec<usize> = (0..g.n()).filter(|&x| green.dist[x] == k).collect();
    let mut probs = vec![0.0; sphere.len()];
    for (&x, &y) in green.interior.iter().zip(&green.visits) {
        let share = y / g.degree(x) as f64;
        for &u in g.neighbors(x) {
            if green.dist[u] == k {
                probs[sphere.binary_search(&u).expect("sphere vertex")] += share;
            }
        }
    }
    (sphere, probs)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereHit {
    pub center: usize,
    pub radius: usize,
    pub degree: usize,
    pub sphere: Vec<usize>,
    /// `P_v[T_{D_k} = T_u]` for `u` in `sphere`.
    pub probabilities: Vec<f64>,
    pub total: f64,
    /// `1 / (d (d-1)^{k-1})`
    pub lower_bound: f64,
    pub min_probability: f64,
    /// `max_u P_v[T_{D_k} = T_u] d (d-1)^{k-1}`
    pub c_hat: f64,
    pub excess: usize,
    pub pass: bool,
}

fn sphere_scale(d: usize, k: usize) -> f64 {
    d as f64 * ((d - 1) as f64).powi(k as i32 - 1)
}

/// Law of the first hitting point of `D_k(v)` from `v`, with the
/// `1/(d (d-1)^{k-1})` lower bound checked.
pub fn sphere_hit_distribution(g: &Graph, v: usize, k: usize) -> Result<SphereHit> {
    sphere_hit_with(g, v, k, Solver::Auto)
}

fn sphere_hit_with(g: &Graph, v: usize, k: usize, solver: Solver) -> Result<SphereHit> {
    let d = g.regular_degree().ok_or(Error::NotRegular)?;
    let green = green_row(g, v, k, solver)?;
    let (sphere, probabilities) = sphere_law(g, &green, k);
    let scale = sphere_scale(d, k);
    let lower_bound = 1.0 / scale;
    let min_probability = probabilities.iter().copied().fold(f64::INFINITY, f64::min);
    let max = probabilities.iter().copied().fold(0.0, f64::max);
    Ok(SphereHit {
        center: v,
        radius: k,
        degree: d,
        total: probabilities.iter().sum(),
        sphere,
        probabilities,
        lower_bound,
        min_probability,
        c_hat: max * scale,
        excess: ball_stats(g, v, k).excess,
        pass: min_probability >= lower_bound - LEMMA52_SLACK,
    })
}

/// `E_v[T_1]`, the expected time to first reach distance `k` from `v`.
pub fn expected_regeneration_time(g: &Graph, v: usize, k: usize) -> Result<f64> {
    Ok(green_row(g, v, k, Solver::Auto)?.visits.iter().sum())
}

/// Transition matrix `W` of the regeneration chain `Y_i = X_{T_i}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WKernel {
    pub k: usize,
    /// `rows[x]` is the sphere-hitting law from `x`, sorted by target.
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl WKernel {
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        let row = &self.rows[x];
        row.binary_search_by_key(&y, |&(z, _)| z).map_or(0.0, |i| row[i].1)
    }

    /// `P_a[Y_1, ..., Y_t all in A]`, the `W`-chain killed on leaving `A`.
    pub fn killed_survival(&self, set: &[usize], a: usize, t: usize) -> Result<f64> {
        let set = validate_set(self.n(), set)?;
        let killed = Killed::from_rows(set, |x| self.rows[x].clone());
        let i = killed.index(a)?;
        Ok(killed.survival(t)[i])
    }
}

pub fn w_kernel(g: &Graph, k: usize) -> Result<WKernel> {
    let rows = (0..g.n())
        .into_par_iter()
        .map(|x| {
            let h = sphere_hit_distribution(g, x, k)?;
            Ok(h.sphere.into_iter().zip(h.probabilities).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WKernel { k, rows })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WvsK {
    pub k: usize,
    pub degree: usize,
    pub inflated_edges: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Extremes of `K(x, y) d (d-1)^{k-1}`.
    pub min_k_scaled: f64,
    pub max_k_scaled: f64,
    pub min_w: f64,
    pub lower_bound: f64,
    pub max_c_hat: f64,
    pub pass: bool,
}

/// Compares `W` with the SRW kernel `K` of `G(k)`, `K(x, y) = 1/|D_k(x)|`.
pub fn w_vs_k_report(g: &Graph, k: usize) -> Result<WvsK> {
    let d = g.regular_degree().ok_or(Error::NotRegular)?;
    let w = w_kernel(g, k)?;
    let scale = sphere_scale(d, k);
    let mut rep = WvsK {
        k,
        degree: d,
        inflated_edges: 0,
        min_ratio: f64::INFINITY,
        max_ratio: 0.0,
        min_k_scaled: f64::INFINITY,
        max_k_scaled: 0.0,
        min_w: f64::INFINITY,
        lower_bound: 1.0 / scale,
        max_c_hat: 0.0,
        pass: true,
    };
    for row in &w.rows {
        let kxy = 1.0 / row.len() as f64;
        for &(_, wxy) in row {
            rep.inflated_edges += 1;
            rep.min_ratio = rep.min_ratio.min(wxy / kxy);
            rep.max_ratio = rep.max_ratio.max(wxy / kxy);
            rep.min_w = rep.min_w.min(wxy);
            rep.max_c_hat = rep.max_c_hat.max(wxy * scale);
        }
        rep.min_k_scaled = rep.min_k_scaled.min(kxy * scale);
        rep.max_k_scaled = rep.max_k_scaled.max(kxy * scale);
    }
    rep.inflated_edges /= 2;
    rep.pass = rep.min_k_scaled >= 1.0 - LEMMA52_SLACK && rep.min_w >= rep.lower_bound - LEMMA52_SLACK;
    Ok(rep)
}
