//! Spectra of reversible chains and Perron roots of restricted kernels.
//!
//! Every reversible kernel `P` is similar to the symmetric matrix
//! `S = D^{1/2} P D^{-1/2}` with `D = diag(pi)`, so all solvers here work on
//! `S(x, y) = sqrt(pi(x) / pi(y)) P(x, y)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::ReversibleChain;
use crate::error::{invalid, Error, Result};
use crate::graph::Graph;

pub const DENSE_BUDGET: usize = 3000;
pub const ITERATIVE_TOL: f64 = 1e-10;
pub const RAMANUJAN_TOL: f64 = 1e-9;
pub const RESTRICTED_TOL: f64 = 1e-10;
pub const RESTRICTED_MAX_ITER: usize = 100_000;
const LANCZOS_SEED: u64 = 0x05ee_d1a4_c205;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumMode {
    DenseFull,
    IterativeExtremal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub n: usize,
    pub lambda2: f64,
    pub lambda_min: f64,
    /// Largest modulus among eigenvalues other than the (per-component) eigenvalue 1.
    pub lambda_star: f64,
    /// `1 / (1 - lambda_star)`; absent when `lambda_star = 1`.
    pub t_rel: Option<f64>,
    pub degree: Option<usize>,
    /// `2 sqrt(d - 1) / d` for regular chains.
    pub rho_d: Option<f64>,
    pub method: SpectrumMode,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    /// Full spectrum in decreasing order (dense mode only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eigenvalues: Option<Vec<f64>>,
}

pub fn rho(d: usize) -> f64 {
    2.0 * ((d - 1) as f64).sqrt() / d as f64
}

fn regular_degree(c: &ReversibleChain) -> Option<usize> {
    let k = c.kernel();
    let d = k.row(0).count();
    let p = 1.0 / d as f64;
    (0..c.n()).all(|x| k.row(x).count() == d && k.row(x).all(|(_, v)| v == p)).then_some(d)
}

fn symmetric_dense(c: &ReversibleChain) -> DMatrix<f64> {
    let n = c.n();
    let pi = c.stationary();
    let mut s = DMatrix::zeros(n, n);
    for x in 0..n {
        for (y, p) in c.kernel().row(x) {
            s[(x, y)] = (pi[x] / pi[y]).sqrt() * p;
        }
    }
    // symmetric up to rounding; average the two triangles
    (&s + s.transpose()) * 0.5
}

/// `out = S f` for the symmetrized kernel.
fn symmetric_apply(c: &ReversibleChain, sqrt_pi: &[f64], f: &[f64], out: &mut [f64]) {
    for (x, o) in out.iter_mut().enumerate() {
        *o = c.kernel().row(x).map(|(y, p)| p * f[y] / sqrt_pi[y]).sum::<f64>() * sqrt_pi[x];
    }
}

/// Orthonormal eigenvectors of `S` for eigenvalue 1: `sqrt(pi)` restricted to
/// each communicating class.
fn top_vectors(c: &ReversibleChain) -> Vec<Vec<f64>> {
    let comps = c.components();
    let ncomp = comps.iter().copied().max().map_or(0, |m| m + 1);
    let mut vecs = vec![vec![0.0; c.n()]; ncomp];
    for (x, &k) in comps.iter().enumerate() {
        vecs[k][x] = c.stationary()[x].sqrt();
    }
    for v in &mut vecs {
        let norm = dot(v, v).sqrt();
        v.iter_mut().for_each(|a| *a /= norm);
    }
    vecs
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(b, a)| *b += alpha * a);
}

pub fn spectrum(c: &ReversibleChain, mode: SpectrumMode) -> Result<SpectrumSummary> {
    let ncomp = c.components().iter().copied().max().map_or(0, |m| m + 1);
    let degree = regular_degree(c);
    let rho_d = degree.filter(|&d| d >= 2).map(rho);
    match mode {
        SpectrumMode::DenseFull => {
            let n = c.n();
            if n > DENSE_BUDGET {
                return Err(Error::Budget(format!("dense eigensolve on {n} states exceeds {DENSE_BUDGET}")));
            }
            let s = symmetric_dense(c);
            let eig = SymmetricEigen::new(s.clone());
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
            let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
            let residual = order
                .iter()
                .map(|&i| {
                    let v = eig.eigenvectors.column(i);
                    (&s * v - v * eig.eigenvalues[i]).norm()
                })
                .fold(0.0, f64::max);
            let rest = &values[ncomp.min(n)..];
            let lambda_star = rest.iter().map(|a| a.abs()).fold(0.0, f64::max);
            Ok(SpectrumSummary {
                n,
                lambda2: values.get(1).copied().unwrap_or(values[0]),
                lambda_min: values[n - 1],
                lambda_star,
                t_rel: t_rel(lambda_star),
                degree,
                rho_d,
                method: mode,
                residuals: vec![residual],
                iterations: 1,
                eigenvalues: Some(values),
            })
        }
        SpectrumMode::IterativeExtremal => {
            let ext = lanczos_extremes(c, ITERATIVE_TOL)?;
            let lambda2 = if ncomp > 1 { 1.0 } else { ext.max };
            let lambda_star = ext.max.abs().max(ext.min.abs());
            Ok(SpectrumSummary {
                n: c.n(),
                lambda2,
                lambda_min: ext.min,
                lambda_star,
                t_rel: t_rel(lambda_star),
                degree,
                rho_d,
                method: mode,
                residuals: vec![ext.residual_max, ext.residual_min],
                iterations: ext.iterations,
                eigenvalues: None,
            })
        }
    }
}

fn t_rel(lambda_star: f64) -> Option<f64> {
    (lambda_star < 1.0 - 1e-12).then(|| 1.0 / (1.0 - lambda_star))
}

#[derive(Clone, Debug)]
pub struct Extremes {
    pub max: f64,
    pub min: f64,
    /// Ritz vector of `max`, in the symmetrized coordinates.
    pub max_vector: Vec<f64>,
    pub residual_max: f64,
    pub residual_min: f64,
    pub iterations: usize,
}

/// Largest and smallest eigenvalues of `S` on the orthogonal complement of
/// its eigenvalue-1 eigenvectors, by Lanczos with full reorthogonalization.
/// Converged when both Ritz residuals are at most `tol`.
pub fn lanczos_extremes(c: &ReversibleChain, tol: f64) -> Result<Extremes> {
    let n = c.n();
    let sqrt_pi: Vec<f64> = c.stationary().iter().map(|p| p.sqrt()).collect();
    let deflate = top_vectors(c);
    let dim = n.saturating_sub(deflate.len());
    if dim == 0 {
        return Err(invalid("no nontrivial eigenvalues to compute"));
    }
    let orth = |v: &mut Vec<f64>, basis: &[Vec<f64>]| {
        for _ in 0..2 {
            for b in deflate.iter().chain(basis) {
                let h = dot(v, b);
                axpy(-h, b, v);
            }
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(LANCZOS_SEED);
    let mut q: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    orth(&mut q, &[]);
    let norm = dot(&q, &q).sqrt();
    q.iter_mut().for_each(|a| *a /= norm);

    let max_iter = dim.min(3000);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut last = (f64::NAN, f64::NAN, f64::INFINITY, f64::INFINITY, Vec::new());
    for j in 0..max_iter {
        symmetric_apply(c, &sqrt_pi, &q, &mut w);
        let alpha = dot(&w, &q);
        basis.push(q.clone());
        alphas.push(alpha);
        let mut r = w.clone();
        orth(&mut r, &basis);
        let beta = dot(&r, &r).sqrt();
        let m = j + 1;
        let exhausted = beta < 1e-13 || m == max_iter;
        if m % 8 == 0 || exhausted || m < 8 {
            let mut t = DMatrix::zeros(m, m);
            for i in 0..m {
                t[(i, i)] = alphas[i];
                if i + 1 < m {
                    t[(i, i + 1)] = betas[i];
                    t[(i + 1, i)] = betas[i];
                }
            }
            let eig = SymmetricEigen::new(t);
            let (imax, imin) = extreme_indices(&eig.eigenvalues);
            let res = |i: usize| if exhausted && beta < 1e-13 { beta } else { beta * eig.eigenvectors[(m - 1, i)].abs() };
            let y: Vec<f64> = eig.eigenvectors.column(imax).iter().copied().collect();
            last = (eig.eigenvalues[imax], eig.eigenvalues[imin], res(imax), res(imin), y);
            if (last.2 <= tol && last.3 <= tol) || (exhausted && beta < 1e-13) {
                let mut vec = vec![0.0; n];
                for (coef, b) in last.4.iter().zip(&basis) {
                    axpy(*coef, b, &mut vec);
                }
                return Ok(Extremes {
                    max: last.0,
                    min: last.1,
                    max_vector: vec,
                    residual_max: last.2,
                    residual_min: last.3,
                    iterations: m,
                });
            }
        }
        if exhausted {
            break;
        }
        betas.push(beta);
        q = r.into_iter().map(|a| a / beta).collect();
    }
    Err(Error::NoConvergence { iterations: basis.len(), residual: last.2.max(last.3) })
}

fn extreme_indices(v: &DVector<f64>) -> (usize, usize) {
    let mut imax = 0;
    let mut imin = 0;
    for i in 0..v.len() {
        if v[i] > v[imax] {
            imax = i;
        }
        if v[i] < v[imin] {
            imin = i;
        }
    }
    (imax, imin)
}

/// `sum lambda_i` and `sum lambda_i^2` against `trace(P)` and `trace(P^2)`;
/// returns the two absolute discrepancies. Dense summaries only.
pub fn trace_discrepancy(c: &ReversibleChain, s: &SpectrumSummary) -> Option<(f64, f64)> {
    let values = s.eigenvalues.as_ref()?;
    let k = c.kernel();
    let tr1: f64 = (0..c.n()).map(|x| k.get(x, x)).sum();
    let tr2: f64 = (0..c.n()).map(|x| k.row(x).map(|(y, p)| p * k.get(y, x)).sum::<f64>()).sum();
    let s1: f64 = values.iter().sum();
    let s2: f64 = values.iter().map(|a| a * a).sum();
    Some(((s1 - tr1).abs(), (s2 - tr2).abs()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RamanujanClass {
    Ramanujan,
    OneSidedAtMargin,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub class: RamanujanClass,
    pub degree: usize,
    pub rho_d: f64,
    /// Largest nontrivial eigenvalue (excluding +1).
    pub lambda2: f64,
    /// Smallest eigenvalue other than -1.
    pub min_nontrivial: f64,
    /// `lambda2 / rho_d`: finite-size surrogate for the one-sided condition.
    pub margin: f64,
    pub bipartite: bool,
}

/// Ramanujan iff every eigenvalue outside `{1, -1}` has modulus at most
/// `rho_d + 1e-9`; one-sided when only the upper side satisfies it.
pub fn classify_ramanujan(g: &Graph, s: &SpectrumSummary) -> Result<Classification> {
    let d = g.regular_degree().ok_or(Error::NotRegular)?;
    if d < 3 {
        return Err(invalid(format!("Ramanujan classification needs degree >= 3, got {d}")));
    }
    let rho_d = rho(d);
    let bipartite = g.has_bipartite_component();
    let trivial = |a: f64| (a - 1.0).abs() <= RAMANUJAN_TOL || (a + 1.0).abs() <= RAMANUJAN_TOL;
    let (upper, lower) = match &s.eigenvalues {
        Some(values) => {
            let nontrivial: Vec<f64> = values.iter().copied().filter(|&a| !trivial(a)).collect();
            (
                nontrivial.first().copied().unwrap_or(0.0),
                nontrivial.last().copied().unwrap_or(0.0),
            )
        }
        None => {
            let lower = if !trivial(s.lambda_min) {
                s.lambda_min
            } else if g.is_connected() && bipartite {
                // bipartite spectra are symmetric
                -s.lambda2
            } else {
                return Err(invalid("iterative summary cannot resolve the eigenvalue next to -1"));
            };
            (s.lambda2, lower)
        }
    };
    let upper_ok = upper <= rho_d + RAMANUJAN_TOL || trivial(upper);
    let lower_ok = lower >= -rho_d - RAMANUJAN_TOL;
    let class = match (upper_ok, lower_ok) {
        (true, true) => RamanujanClass::Ramanujan,
        (true, false) => RamanujanClass::OneSidedAtMargin,
        _ => RamanujanClass::Neither,
    };
    Ok(Classification { class, degree: d, rho_d, lambda2: upper, min_nontrivial: lower, margin: upper / rho_d, bipartite })
}

/// Time after which `4 TV^2 <= n lambda^{2t} <= eps^2`, i.e.
/// `log(n / eps^2) / (2 log(1 / lambda))`.
pub fn poincare_bound(n: usize, lambda_star: f64, eps: f64) -> Result<f64> {
    if n < 2 {
        return Err(invalid("poincare bound needs n >= 2"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("eps must lie in (0, 1), got {eps}")));
    }
    if !(0.0..1.0).contains(&lambda_star) {
        return Err(invalid(format!("lambda must lie in [0, 1), got {lambda_star}")));
    }
    if lambda_star == 0.0 {
        // P^1 is already stationary
        return Ok(0.0);
    }
    Ok(0.5 * (n as f64 / (eps * eps)).ln() / (1.0 / lambda_star).ln())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestrictedEig {
    pub lambda: f64,
    /// Perron vector of the symmetrized restriction, indexed like the set.
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) fn validate_set(n: usize, set: &[usize]) -> Result<Vec<usize>> {
    let mut a = set.to_vec();
    a.sort_unstable();
    a.dedup();
    if a.is_empty() {
        return Err(Error::InvalidSet("set is empty".into()));
    }
    if a.len() == n {
        return Err(Error::InvalidSet("set is the whole state space".into()));
    }
    if let Some(&x) = a.iter().find(|&&x| x >= n) {
        return Err(Error::InvalidSet(format!("state {x} out of range")));
    }
    Ok(a)
}

/// Symmetrized restriction as local sparse rows.
fn restricted_rows(c: &ReversibleChain, a: &[usize]) -> Vec<Vec<(usize, f64)>> {
    let pi = c.stationary();
    a.iter()
        .map(|&x| {
            c.kernel()
                .row(x)
                .filter_map(|(y, p)| a.binary_search(&y).ok().map(|j| (j, (pi[x] / pi[y]).sqrt() * p)))
                .collect()
        })
        .collect()
}

/// Perron root `lambda(A)` of the killed kernel `P_A`.
///
/// Power iteration on `(I + S_A) / 2`, which is nonnegative with a positive
/// diagonal, so iterates stay nonnegative and converge to the Perron vector
/// even when `P_A` itself is periodic.
pub fn restricted_top_eig(c: &ReversibleChain, set: &[usize]) -> Result<RestrictedEig> {
    let a = validate_set(c.n(), set)?;
    let rows = restricted_rows(c, &a);
    let m = a.len();
    let mut x: Vec<f64> = a.iter().map(|&i| c.stationary()[i].sqrt()).collect();
    let norm = dot(&x, &x).sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
    let mut y = vec![0.0; m];
    let mut theta = 0.0;
    let mut residual = f64::INFINITY;
    for it in 1..=RESTRICTED_MAX_ITER {
        for (i, row) in rows.iter().enumerate() {
            y[i] = 0.5 * (x[i] + row.iter().map(|&(j, s)| s * x[j]).sum::<f64>());
        }
        theta = dot(&x, &y);
        residual = 2.0 * y.iter().zip(&x).map(|(b, a)| (b - theta * a).powi(2)).sum::<f64>().sqrt();
        let norm = dot(&y, &y).sqrt();
        for (a, b) in x.iter_mut().zip(&y) {
            *a = b / norm;
        }
        if residual <= RESTRICTED_TOL {
            return Ok(RestrictedEig { lambda: 2.0 * theta - 1.0, vector: x, residual, iterations: it, converged: true });
        }
    }
    Ok(RestrictedEig { lambda: 2.0 * theta - 1.0, vector: x, residual, iterations: RESTRICTED_MAX_ITER, converged: false })
}

/// Dense eigensolve of the symmetrized restriction; an independent route to
/// `lambda(A)`.
pub fn restricted_top_eig_dense(c: &ReversibleChain, set: &[usize]) -> Result<f64> {
    let a = validate_set(c.n(), set)?;
    let rows = restricted_rows(c, &a);
    let m = a.len();
    let mut s = DMatrix::zeros(m, m);
    for (i, row) in rows.iter().enumerate() {
        for &(j, v) in row {
            s[(i, j)] = v;
        }
    }
    let s = (&s + s.transpose()) * 0.5;
    Ok(SymmetricEigen::new(s).eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetBoundCheck {
    pub lambda_a: f64,
    pub lambda2: f64,
    pub pi_a: f64,
    /// `lambda2 + pi(A)`
    pub paper_rhs: f64,
    /// Evaluated only when `lambda2 >= 0`.
    pub paper_pass: Option<bool>,
    /// `lambda2 + (1 - lambda2) pi(A)`
    pub refined_rhs: f64,
    pub refined_pass: bool,
}

/// Compares `lambda(A)` with `lambda2 + pi(A)` (when `lambda2 >= 0`) and with
/// the refined `lambda2 + (1 - lambda2) pi(A)` (always).
pub fn set_bound_check(lambda_a: f64, lambda2: f64, pi_a: f64, slack: f64) -> SetBoundCheck {
    let paper_rhs = lambda2 + pi_a;
    let refined_rhs = lambda2 + (1.0 - lambda2) * pi_a;
    SetBoundCheck {
        lambda_a,
        lambda2,
        pi_a,
        paper_rhs,
        paper_pass: (lambda2 >= 0.0).then_some(lambda_a <= paper_rhs + slack),
        refined_rhs,
        refined_pass: lambda_a <= refined_rhs + slack,
    }
}

pub fn set_mass(c: &ReversibleChain, set: &[usize]) -> f64 {
    set.iter().map(|&x| c.stationary()[x]).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// `max P1(x,y) / P2(x,y)` over the support of `P1`.
    pub c1: f64,
    /// `max` of `pi1/pi2` and `pi2/pi1`.
    pub c2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

pub const COMPARISON_SLACK: f64 = 1e-9;

/// Checks `lambda_{P1}(A) <= C1 C2^2 lambda_{P2}(A)`.
pub fn compare_restricted(c1: &ReversibleChain, c2: &ReversibleChain, set: &[usize]) -> Result<Comparison> {
    if c1.n() != c2.n() {
        return Err(Error::DimensionMismatch { expected: c1.n(), got: c2.n() });
    }
    let mut k1: f64 = 0.0;
    for x in 0..c1.n() {
        for (y, p) in c1.kernel().row(x) {
            let q = c2.kernel().get(x, y);
            if q == 0.0 {
                return Err(Error::SupportViolation { x, y });
            }
            k1 = k1.max(p / q);
        }
    }
    let k2 = c1
        .stationary()
        .iter()
        .zip(c2.stationary())
        .map(|(a, b)| (a / b).max(b / a))
        .fold(1.0, f64::max);
    let l1 = restricted_top_eig(c1, set)?.lambda;
    let l2 = restricted_top_eig(c2, set)?.lambda;
    let rhs = k1 * k2 * k2 * l2;
    Ok(Comparison { c1: k1, c2: k2, lambda1: l1, lambda2: l2, lhs: l1, rhs, pass: l1 <= rhs + COMPARISON_SLACK })
}
