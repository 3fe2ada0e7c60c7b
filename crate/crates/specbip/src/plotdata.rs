//! Plain-text plot data: eigenvalue magnitude profiles and sparsity
//! patterns. The CLI writes these files; any plotting tool can render them.

use std::fmt::Write as _;

use crate::graph::{Graph, NodePermutation};
use crate::linalg::eigh;
use crate::Result;

/// Eigenvalue magnitudes in nondecreasing order, one `index |lambda|` pair
/// per line (1-based index). The flat plateau at the left end shows the
/// numerically zero eigenvalues.
pub fn eigplot_data(g: &Graph) -> Result<String> {
    let fact = eigh(&g.to_dense())?;
    let mut mags: Vec<f64> = fact.values.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    let mut out = String::from("# index abs_eigenvalue\n");
    for (i, m) in mags.iter().enumerate() {
        let _ = writeln!(out, "{} {:e}", i + 1, m);
    }
    Ok(out)
}

/// Positions of the nonzero entries as `row col` pairs (1-based), after
/// applying the optional node permutation, in row-major order. When `n1` is
/// given it is emitted in the header so plots can draw the partition
/// separator lines.
pub fn spy_data(g: &Graph, perm: Option<&NodePermutation>, n1: Option<usize>) -> String {
    let mut out = String::new();
    out.push_str("# row col\n");
    if let Some(n1) = n1 {
        let _ = writeln!(out, "# n1 {}", n1);
    }
    let mut points = Vec::with_capacity(2 * g.edge_count());
    for &(i, j, _) in g.entries() {
        let (pi, pj) = match perm {
            Some(p) => (p.apply(i), p.apply(j)),
            None => (i, j),
        };
        points.push((pi, pj));
        if pi != pj {
            points.push((pj, pi));
        }
    }
    points.sort_unstable();
    for (r, c) in points {
        let _ = writeln!(out, "{} {}", r + 1, c + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigplot_four_cycle() {
        let g = Graph::from_pairs(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let data = eigplot_data(&g).unwrap();
        let mags: Vec<f64> = data
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
            .collect();
        let expected = [0.0, 0.0, 2.0, 2.0];
        for (m, e) in mags.iter().zip(expected.iter()) {
            assert!((m - e).abs() < 1e-12);
        }
    }

    #[test]
    fn spy_has_no_diagonal_for_loop_free_graphs() {
        let g = Graph::from_pairs(3, [(0, 1), (1, 2)]).unwrap();
        let data = spy_data(&g, None, Some(2));
        assert!(data.contains("# n1 2"));
        for line in data.lines().filter(|l| !l.starts_with('#')) {
            let mut it = line.split_whitespace();
            let r: usize = it.next().unwrap().parse().unwrap();
            let c: usize = it.next().unwrap().parse().unwrap();
            assert_ne!(r, c);
        }
        // symmetric pairs both present
        assert!(data.contains("1 2\n") && data.contains("2 1\n"));
    }

    #[test]
    fn spy_applies_permutation() {
        let g = Graph::from_pairs(2, [(0, 1)]).unwrap();
        let p = NodePermutation::new(vec![1, 0]).unwrap();
        let data = spy_data(&g, Some(&p), None);
        // edge is still (1,2)/(2,1) after the swap, but comes from swapped
        // endpoints; for a single edge the pattern is unchanged
        assert!(data.contains("1 2"));
    }
}
