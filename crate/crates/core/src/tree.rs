//! Exact computations on the infinite `d`-regular tree and on `Z`.
//!
//! SRW on the tree, observed through its level (distance from the root), is
//! the birth-death chain on `{0, 1, ...}` that moves up with probability
//! `(d-1)/d` and down with probability `1/d` from every level `>= 1`, and is
//! forced up from level 0.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{evolve, point_mass, srw_chain};
use crate::error::{invalid, Error, Result};
use crate::graph::Graph;

/// Largest time horizon for the level-chain dynamic program.
pub const LEVEL_DP_HORIZON: usize = 10_000;
/// Largest `k` accepted by [`td1_bound_check`] (horizon `k + 2k^2 = 78`).
pub const TD1_MAX_K: usize = 6;
pub const DOMINATION_SLACK: f64 = 1e-12;
pub const TD1_SLACK: f64 = 1e-12;

/// The level process of SRW on the `d`-regular tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelChain {
    pub d: usize,
    /// Kill the chain when it returns to level 0.
    pub no_return: bool,
}

impl LevelChain {
    pub fn new(d: usize, no_return: bool) -> Result<Self> {
        if d < 3 {
            return Err(invalid(format!("tree degree must be at least 3, got {d}")));
        }
        Ok(LevelChain { d, no_return })
    }

    pub fn up_probability(&self, level: usize) -> f64 {
        if level == 0 {
            1.0
        } else {
            (self.d - 1) as f64 / self.d as f64
        }
    }

    /// Level after `t` steps from 0, or `None` if killed.
    pub fn sample<R: Rng>(&self, rng: &mut R, t: usize) -> Option<usize> {
        let mut level = 0;
        for _ in 0..t {
            if level == 0 || rng.gen_range(0..self.d) != 0 {
                level += 1;
            } else {
                level -= 1;
                if level == 0 && self.no_return {
                    return None;
                }
            }
        }
        Some(level)
    }
}

/// Law of the level at time `t` started from the root, as a vector over
/// levels `0..=t`. With `no_return`, paths that revisit level 0 after time 0
/// are killed, so the vector then sums to `P[T_0^+ > t]`.
pub fn level_distribution_vector(d: usize, t: usize, no_return: bool) -> Result<Vec<f64>> {
    if d < 3 {
        return Err(invalid(format!("tree degree must be at least 3, got {d}")));
    }
    if t > LEVEL_DP_HORIZON {
        return Err(Error::Budget(format!("level DP horizon {t} exceeds {LEVEL_DP_HORIZON}")));
    }
    let up = (d - 1) as f64 / d as f64;
    let down = 1.0 / d as f64;
    let mut cur = vec![0.0; t + 2];
    let mut next = vec![0.0; t + 2];
    cur[0] = 1.0;
    for s in 0..t {
        next.fill(0.0);
        next[1] += cur[0];
        for level in 1..=s {
            let m = cur[level];
            if m == 0.0 {
                continue;
            }
            next[level + 1] += m * up;
            next[level - 1] += m * down;
        }
        if no_return {
            next[0] = 0.0;
        }
        std::mem::swap(&mut cur, &mut next);
    }
    cur.truncate(t + 1);
    Ok(cur)
}

pub fn level_distribution(d: usize, t: usize, k: usize, no_return: bool) -> Result<f64> {
    Ok(level_distribution_vector(d, t, no_return)?.get(k).copied().unwrap_or(0.0))
}

/// `|L_k| = d (d-1)^{k-1}` for `k >= 1`, and 1 for the root.
pub fn sphere_size(d: usize, k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        d as f64 * ((d - 1) as f64).powi(k as i32 - 1)
    }
}

/// Heat kernel `P^t_{T_d}(o, v)` for a vertex `v` at distance `k` from `o`.
pub fn tree_kernel(d: usize, t: usize, k: usize) -> Result<f64> {
    Ok(level_distribution(d, t, k, false)? / sphere_size(d, k))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Td1Check {
    pub d: usize,
    pub k: usize,
    pub horizon: usize,
    /// `P_0[level(k + 2k^2) = k, T_0^+ > k + 2k^2]`
    pub lhs: f64,
    pub c0: f64,
    /// `c0 k^-2 2^{k+2k^2} (d-1)^{k^2+k-1} d^{-(k+2k^2)+1}`
    pub rhs: f64,
    pub pass: bool,
    /// Largest `c0` for which the inequality holds.
    pub max_c0: f64,
}

pub fn td1_bound_check(d: usize, k: usize, c0: f64) -> Result<Td1Check> {
    if k == 0 {
        return Err(invalid("td1 check needs k >= 1"));
    }
    if k > TD1_MAX_K {
        return Err(Error::Budget(format!("k = {k} exceeds the exact DP budget k <= {TD1_MAX_K}")));
    }
    let horizon = k + 2 * k * k;
    let lhs = level_distribution(d, horizon, k, true)?;
    let unit = 2f64.powi(horizon as i32) * ((d - 1) as f64).powi((k * k + k - 1) as i32)
        / (d as f64).powi(horizon as i32 - 1)
        / (k * k) as f64;
    let rhs = c0 * unit;
    Ok(Td1Check { d, k, horizon, lhs, c0, rhs, pass: lhs >= rhs - TD1_SLACK, max_c0: lhs / unit })
}

/// Number of `+-1` step sequences of length `k + 2k^2` from 0 that end at `k`
/// and never revisit 0.
pub fn count_z_paths(k: usize) -> BigUint {
    let m = k + 2 * k * k;
    // counts[j]: paths at position j >= 1; a path ending at k > 0 without
    // revisiting 0 must take its first step up
    let mut counts = vec![BigUint::zero(); m + 2];
    counts[1] = BigUint::one();
    for _ in 1..m {
        let mut next = vec![BigUint::zero(); m + 2];
        for j in 1..=m {
            if counts[j].is_zero() {
                continue;
            }
            next[j + 1] += &counts[j];
            if j > 1 {
                next[j - 1] += &counts[j];
            }
        }
        counts = next;
    }
    if k == 0 {
        return BigUint::zero();
    }
    counts[k].clone()
}

fn binomial(n: usize, r: usize) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Ballot-number form of [`count_z_paths`]: with `m = k + 2k^2` and the first
/// step forced up, `C(m-1, u) - C(m-1, u+1)` where `u = (m - 1 + k - 1) / 2`
/// is the number of remaining up-steps.
pub fn ballot_closed_form(k: usize) -> BigUint {
    if k == 0 {
        return BigUint::zero();
    }
    let m = k + 2 * k * k;
    let u = (m - 1 + k - 1) / 2;
    binomial(m - 1, u) - binomial(m - 1, u + 1)
}

/// `M(k) k^2 / 2^{k+2k^2}`.
pub fn z_path_ratio(k: usize) -> f64 {
    let m = k + 2 * k * k;
    count_z_paths(k).to_f64().unwrap_or(f64::INFINITY) * (k * k) as f64 / 2f64.powi(m as i32)
}

/// `P_0[T_0^+ > T_k]` for SRW on `Z`: half of the ruin probability
/// `P_1[T_k < T_0]`, obtained by solving the harmonic system on `{0, ..., k}`.
pub fn z_escape_probability(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    if k == 1 {
        return Ok(0.5);
    }
    // h(i) = (h(i-1) + h(i+1)) / 2 on 1..k-1, h(0) = 0, h(k) = 1; Thomas algorithm.
    let n = k - 1;
    let mut c = vec![0.0; n];
    let mut r = vec![0.0; n];
    for i in 0..n {
        let (sub, diag, sup) = (-0.5, 1.0, -0.5);
        let rhs = if i == n - 1 { 0.5 } else { 0.0 };
        let denom = if i == 0 { diag } else { diag - sub * c[i - 1] };
        c[i] = sup / denom;
        r[i] = if i == 0 { rhs / denom } else { (rhs - sub * r[i - 1]) / denom };
    }
    let mut h = vec![0.0; n];
    h[n - 1] = r[n - 1];
    for i in (0..n - 1).rev() {
        h[i] = r[i] - c[i] * h[i + 1];
    }
    Ok(0.5 * h[0])
}

/// `c_d = 2 sqrt(d(d-1)) / (d-2)^{3/2}`.
pub fn c_d(d: usize) -> f64 {
    let d = d as f64;
    2.0 * (d * (d - 1.0)).sqrt() / (d - 2.0).powf(1.5)
}

/// `d/(d-2) log_{d-1} n + c_d Phi^{-1}(eps) sqrt(log_{d-1} n)`; may be negative.
pub fn diameter_lower_bound(n: usize, d: usize, eps: f64) -> Result<f64> {
    if d < 3 {
        return Err(invalid(format!("degree must be at least 3, got {d}")));
    }
    if n < 2 {
        return Err(invalid("n must be at least 2"));
    }
    let log_n = (n as f64).ln() / ((d - 1) as f64).ln();
    Ok(d as f64 / (d - 2) as f64 * log_n + c_d(d) * inv_normal_cdf(eps)? * log_n.sqrt())
}

/// Standard normal quantile, Wichura's AS241 (PPND16) rational approximation.
pub fn inv_normal_cdf(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("probability must lie in (0, 1), got {p}")));
    }
    const A: [f64; 8] = [
        3.387_132_872_796_366_5,
        133.141_667_891_784_38,
        1_971.590_950_306_551_3,
        13_731.693_765_509_46,
        45_921.953_931_549_87,
        67_265.770_927_008_7,
        33_430.575_583_588_13,
        2_509.080_928_730_122_7,
    ];
    const B: [f64; 8] = [
        1.0,
        42.313_330_701_600_91,
        687.187_007_492_057_9,
        5_394.196_021_424_751,
        21_213.794_301_586_597,
        39_307.895_800_092_71,
        28_729.085_735_721_943,
        5_226.495_278_852_854,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_5,
        4.630_337_846_156_546,
        5.769_497_221_460_691,
        3.647_848_324_763_204_5,
        1.270_458_252_452_368_4,
        0.241_780_725_177_450_6,
        0.022_723_844_989_269_184,
        7.745_450_142_783_414e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_759,
        1.676_384_830_183_803_8,
        0.689_767_334_985_1,
        0.148_103_976_427_480_08,
        0.015_198_666_563_616_457,
        5.475_938_084_995_345e-4,
        1.050_750_071_644_416_9e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103,
        5.463_784_911_164_114,
        1.784_826_539_917_291_3,
        0.296_560_571_828_504_87,
        0.026_532_189_526_576_124,
        0.001_242_660_947_388_078_4,
        2.711_555_568_743_487_6e-5,
        2.010_334_399_292_288_1e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        0.599_832_206_555_888,
        0.136_929_880_922_735_8,
        0.014_875_361_290_850_615,
        7.868_691_311_456_133e-4,
        1.846_318_317_510_054_8e-5,
        1.421_511_758_316_446e-7,
        2.044_263_103_389_939_7e-15,
    ];
    fn ratio(num: &[f64; 8], den: &[f64; 8], x: f64) -> f64 {
        let horner = |c: &[f64; 8]| c.iter().rev().fold(0.0, |acc, &a| acc * x + a);
        horner(num) / horner(den)
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return Ok(q * ratio(&A, &B, r));
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let z = if r <= 5.0 { ratio(&C, &D, r - 1.6) } else { ratio(&E, &F, r - 5.0) };
    Ok(if q < 0.0 { -z } else { z })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domination {
    pub x: usize,
    pub y: usize,
    pub distance: Option<usize>,
    pub t: usize,
    pub graph_kernel: f64,
    pub tree_kernel: f64,
    pub pass: bool,
}

/// Checks `P^t(x, y) >= P^t_{T_d}(o, v)` with `dist(o, v) = dist(x, y)`.
pub fn kernel_domination_check(g: &Graph, x: usize, y: usize, t: usize) -> Result<Domination> {
    let d = g.regular_degree().ok_or(Error::NotRegular)?;
    if x >= g.n() || y >= g.n() {
        return Err(invalid("vertex out of range"));
    }
    let chain = srw_chain(g)?;
    let graph_kernel = evolve(&chain, &point_mass(g.n(), x), t)?[y];
    let distance = g.distance(x, y);
    let tree = match distance {
        Some(k) if k <= t => tree_kernel(d, t, k)?,
        _ => 0.0,
    };
    Ok(Domination { x, y, distance, t, graph_kernel, tree_kernel: tree, pass: graph_kernel >= tree - DOMINATION_SLACK })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Concentration {
    pub d: usize,
    pub t: usize,
    pub mean: f64,
    pub stddev: f64,
    /// `(level, P[level at time t <= level])` for every level with positive mass.
    pub lower_tail: Vec<(usize, f64)>,
}

impl Concentration {
    /// `P[level <= x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.lower_tail.iter().take_while(|(l, _)| (*l as f64) <= x).last().map_or(0.0, |&(_, p)| p)
    }
}

pub fn tree_distance_concentration(d: usize, t: usize) -> Result<Concentration> {
    if t == 0 {
        return Err(invalid("t must be at least 1"));
    }
    let dist = level_distribution_vector(d, t, false)?;
    let mean: f64 = dist.iter().enumerate().map(|(l, p)| l as f64 * p).sum();
    let var: f64 = dist.iter().enumerate().map(|(l, p)| (l as f64 - mean).powi(2) * p).sum();
    let mut acc = 0.0;
    let lower_tail = dist
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(l, &p)| {
            acc += p;
            (l, acc)
        })
        .collect();
    Ok(Concentration { d, t, mean, stddev: var.max(0.0).sqrt(), lower_tail })
}
