use super::{Graph, Provenance};
use crate::error::{invalid, Error, Result};

/// Standard small graphs used as fixtures.
///
/// | name        | params       | graph                          |
/// |-------------|--------------|--------------------------------|
/// | `complete`  | `[n]`        | K_n, n >= 2                    |
/// | `cycle`     | `[n]`        | C_n, n >= 3                    |
/// | `hypercube` | `[dim]`      | Q_dim, dim >= 1                |
/// | `petersen`  | `[]`         | the Petersen graph             |
/// | `prism`     | `[m]` or `[]`| C_m x K_2, m >= 3 (default 3)  |
pub fn build_named(name: &str, params: &[usize]) -> Result<Graph> {
    let one = |what: &str| -> Result<usize> {
        match params {
            [x] => Ok(*x),
            _ => Err(invalid(format!("{name} takes exactly one parameter ({what})"))),
        }
    };
    let (n, edges): (usize, Vec<(usize, usize)>) = match name {
        "complete" => {
            let n = one("n")?;
            if n < 2 {
                return Err(invalid(format!("complete graph needs n >= 2, got {n}")));
            }
            (n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect())
        }
        "cycle" => {
            let n = one("n")?;
            if n < 3 {
                return Err(invalid(format!("cycle needs n >= 3, got {n}")));
            }
            (n, (0..n).map(|u| (u, (u + 1) % n)).collect())
        }
        "hypercube" => {
            let dim = one("dim")?;
            if dim == 0 || dim > 20 {
                return Err(invalid(format!("hypercube dimension must be in 1..=20, got {dim}")));
            }
            let n = 1usize << dim;
            let edges = (0..n)
                .flat_map(|u| (0..dim).map(move |b| (u, u ^ (1 << b))))
                .filter(|&(u, v)| u < v)
                .collect();
            (n, edges)
        }
        "petersen" => {
            if !params.is_empty() {
                return Err(invalid("petersen takes no parameters"));
            }
            let mut edges = Vec::with_capacity(15);
            for i in 0..5 {
                edges.push((i, (i + 1) % 5));
                edges.push((i, i + 5));
                edges.push((5 + i, 5 + (i + 2) % 5));
            }
            (10, edges)
        }
        "prism" => {
            let m = match params {
                [] => 3,
                [m] => *m,
                _ => return Err(invalid("prism takes at most one parameter (m)")),
            };
            if m < 3 {
                return Err(invalid(format!("prism needs m >= 3, got {m}")));
            }
            let mut edges = Vec::with_capacity(3 * m);
            for i in 0..m {
                edges.push((i, (i + 1) % m));
                edges.push((m + i, m + (i + 1) % m));
                edges.push((i, m + i));
            }
            (2 * m, edges)
        }
        other => return Err(Error::UnknownGraph(other.to_string())),
    };
    Graph::from_edges(n, edges, Provenance::Named { name: name.to_string(), params: params.to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4() {
        let g = build_named("complete", &[4]).unwrap();
        assert_eq!((g.n(), g.num_edges(), g.regular_degree()), (4, 6, Some(3)));
    }

    #[test]
    fn petersen() {
        let g = build_named("petersen", &[]).unwrap();
        assert_eq!((g.n(), g.num_edges(), g.regular_degree()), (10, 15, Some(3)));
        assert!(g.is_connected());
    }

    #[test]
    fn hypercube() {
        let g = build_named("hypercube", &[3]).unwrap();
        assert_eq!((g.n(), g.num_edges(), g.regular_degree()), (8, 12, Some(3)));
        assert!(g.is_bipartite());
    }

    #[test]
    fn prism() {
        let g = build_named("prism", &[]).unwrap();
        assert_eq!((g.n(), g.num_edges(), g.regular_degree()), (6, 9, Some(3)));
    }

    #[test]
    fn errors() {
        assert!(matches!(build_named("moebius", &[]), Err(Error::UnknownGraph(_))));
        assert!(build_named("complete", &[1]).is_err());
        assert!(build_named("cycle", &[2]).is_err());
        assert!(build_named("petersen", &[3]).is_err());
    }
}
