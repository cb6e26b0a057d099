//! Lubotzky–Phillips–Sarnak Cayley graphs `X^{p,q}`.

use std::collections::HashMap;

use super::{Graph, Provenance};
use crate::error::{invalid, Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 1;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Legendre symbol `(a | q)` for an odd prime `q`: 1, -1, or 0.
pub fn legendre(a: u64, q: u64) -> i32 {
    match pow_mod(a % q, (q - 1) / 2, q) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

fn inv_mod(a: u64, q: u64) -> u64 {
    pow_mod(a, q - 2, q)
}

/// 2x2 matrix over F_q, row-major.
type Mat = [u64; 4];

fn mul(a: &Mat, b: &Mat, q: u64) -> Mat {
    [
        (a[0] * b[0] + a[1] * b[2]) % q,
        (a[0] * b[1] + a[1] * b[3]) % q,
        (a[2] * b[0] + a[3] * b[2]) % q,
        (a[2] * b[1] + a[3] * b[3]) % q,
    ]
}

/// Scales so that the first nonzero entry is 1: a canonical PGL_2 representative.
fn normalize(m: Mat, q: u64) -> Mat {
    let lead = *m.iter().find(|&&x| x != 0).expect("nonsingular matrix");
    let s = inv_mod(lead, q);
    m.map(|x| x * s % q)
}

fn key(m: &Mat, q: u64) -> u64 {
    ((m[0] * q + m[1]) * q + m[2]) * q + m[3]
}

/// The `p + 1` LPS generators over F_q.
fn generators(p: u64, q: u64) -> Vec<Mat> {
    let i = (2..q).find(|&x| x * x % q == q - 1).expect("q = 1 mod 4 has sqrt(-1)");
    let r = (p as f64).sqrt() as i64 + 1;
    let mut gens = Vec::new();
    for a0 in (1..=r).step_by(2) {
        for a1 in -r..=r {
            for a2 in -r..=r {
                for a3 in -r..=r {
                    if a0 * a0 + a1 * a1 + a2 * a2 + a3 * a3 != p as i64 {
                        continue;
                    }
                    let m = |x: i64| x.rem_euclid(q as i64) as u64;
                    let (a0, a1, a2, a3) = (m(a0), m(a1), m(a2), m(a3));
                    gens.push([
                        (a0 + i * a1) % q,
                        (a2 + i * a3) % q,
                        (q - a2 + i * a3) % q,
                        (a0 + q * q - i * a1 % q) % q,
                    ]);
                }
            }
        }
    }
    gens
}

/// Cayley graph of PSL_2(F_q) (when `(p|q) = 1`) or PGL_2(F_q) (when
/// `(p|q) = -1`, bipartite) with respect to the LPS generators. The result is
/// `(p+1)`-regular on `q(q^2-1)/2` or `q(q^2-1)` vertices respectively.
pub fn build_lps(p: u64, q: u64) -> Result<Graph> {
    for (name, x) in [("p", p), ("q", q)] {
        if !is_prime(x) {
            return Err(invalid(format!("{name} = {x} is not prime")));
        }
        if x % 4 != 1 {
            return Err(invalid(format!("{name} = {x} is not 1 mod 4")));
        }
    }
    if p == q {
        return Err(invalid("p and q must differ"));
    }
    if (q * q) <= 4 * p {
        return Err(invalid(format!("q = {q} must exceed 2*sqrt(p) = {:.3}", 2.0 * (p as f64).sqrt())));
    }
    let gens: Vec<Mat> = generators(p, q).into_iter().map(|g| normalize(g, q)).collect();
    if gens.len() as u64 != p + 1 {
        return Err(Error::Internal(format!("found {} generators, expected {}", gens.len(), p + 1)));
    }

    let identity = [1, 0, 0, 1];
    let mut index: HashMap<u64, usize> = HashMap::from([(key(&identity, q), 0)]);
    let mut verts = vec![identity];
    let mut edges = Vec::new();
    let mut head = 0;
    while head < verts.len() {
        let g = verts[head];
        for s in &gens {
            let h = normalize(mul(&g, s, q), q);
            let next = verts.len();
            let j = *index.entry(key(&h, q)).or_insert(next);
            if j == next {
                verts.push(h);
            }
            if head < j {
                edges.push((head, j));
            }
        }
        head += 1;
    }
    edges.sort_unstable();
    edges.dedup();
    let g = Graph::from_edges(verts.len(), edges, Provenance::Lps { p, q })?;
    if g.regular_degree() != Some((p + 1) as usize) {
        return Err(Error::Internal("LPS graph is not (p+1)-regular".into()));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_legendre() {
        assert!(is_prime(13) && is_prime(17) && !is_prime(4) && !is_prime(1));
        assert_eq!(legendre(13, 17), 1);
        assert_eq!(legendre(5, 13), -1);
    }

    #[test]
    fn generator_count() {
        assert_eq!(generators(5, 13).len(), 6);
        assert_eq!(generators(13, 17).len(), 14);
        assert_eq!(generators(17, 13).len(), 18);
    }

    #[test]
    fn input_errors() {
        assert!(build_lps(4, 13).is_err());
        assert!(build_lps(7, 13).is_err());
        assert!(build_lps(13, 13).is_err());
        assert!(build_lps(29, 5).is_err());
    }

    #[test]
    fn bipartite_pgl_case() {
        let g = build_lps(5, 13).unwrap();
        assert_eq!(g.n(), 13 * 168);
        assert_eq!(g.regular_degree(), Some(6));
        assert!(g.is_connected());
        assert!(g.is_bipartite());
    }

    #[test]
    fn non_bipartite_psl_case() {
        let g = build_lps(13, 17).unwrap();
        assert_eq!(g.n(), 17 * (17 * 17 - 1) / 2);
        assert_eq!(g.n(), 2448);
        assert_eq!(g.regular_degree(), Some(14));
        assert!(g.is_connected());
        assert!(!g.is_bipartite());
    }
}
