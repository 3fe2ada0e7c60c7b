//! Red-black ordering: the BFS parity two-coloring baseline.

use std::collections::VecDeque;

use crate::graph::{frustration, Graph, NodePermutation, Partition};
use crate::{Error, Result};

/// Two-colors a connected graph by breadth-first-search distance parity
/// from `root` (0-based). Set 1 collects the even-distance nodes, set 2 the
/// odd ones, swapped when needed so set 1 is not smaller. The permutation
/// lists set 1 then set 2, in BFS discovery order within each; neighbors
/// are visited in ascending index order, so the result is deterministic for
/// a fixed root. `is_exact` reports whether the coloring is frustration-free,
/// which holds exactly when the graph is bipartite.
pub fn red_black_order(
    g: &Graph,
    root: usize,
) -> Result<(Partition, NodePermutation, bool)> {
    let n = g.n();
    if root >= n {
        return Err(Error::IndexOutOfRange { index: root, n });
    }
    let adj = g.neighbor_lists();
    let mut dist = vec![usize::MAX; n];
    let mut bfs_order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    dist[root] = 0;
    queue.push_back(root);
    while let Some(u) = queue.pop_front() {
        bfs_order.push(u);
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    if bfs_order.len() != n {
        return Err(Error::Disconnected);
    }

    let even = bfs_order.iter().filter(|&&v| dist[v] % 2 == 0).count();
    let odd = n - even;
    let set1_parity = if even >= odd { 0 } else { 1 };

    let membership: Vec<u8> = (0..n)
        .map(|v| if dist[v] % 2 == set1_parity { 1 } else { 2 })
        .collect();
    let partition = Partition::from_membership(membership)?;

    let mut order: Vec<usize> = bfs_order
        .iter()
        .copied()
        .filter(|&v| partition.label(v) == 1)
        .collect();
    order.extend(bfs_order.iter().copied().filter(|&v| partition.label(v) == 2));
    let sigma = NodePermutation::from_ordering(&order)?;

    let is_exact = frustration(g, &partition)? == 0.0;
    Ok((partition, sigma, is_exact))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_rooted_at_end() {
        let g = Graph::from_pairs(3, [(0, 1), (1, 2)]).unwrap();
        let (part, sigma, exact) = red_black_order(&g, 0).unwrap();
        assert!(exact);
        assert_eq!(part.set1(), vec![0, 2]);
        assert_eq!(part.set2(), vec![1]);
        assert_eq!(sigma.ordering(), vec![0, 2, 1]);
    }

    #[test]
    fn triangle_is_not_exact() {
        let g = Graph::from_pairs(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        let (part, _, exact) = red_black_order(&g, 0).unwrap();
        assert!(!exact);
        // parity groups {0} vs {1, 2}; the larger group becomes set 1
        assert_eq!(part.set1(), vec![1, 2]);
        assert_eq!(frustration(&g, &part).unwrap(), 1.0);
    }

    #[test]
    fn bipartite_graphs_color_exactly_from_any_root() {
        let g = Graph::from_pairs(6, [(0, 3), (0, 4), (1, 4), (2, 5), (1, 5), (2, 3)])
            .unwrap();
        for root in 0..6 {
            let (part, _, exact) = red_black_order(&g, root).unwrap();
            assert!(exact, "root {}", root);
            assert_eq!(frustration(&g, &part).unwrap(), 0.0);
        }
    }

    #[test]
    fn set_sizes_are_ordered() {
        // star from the center: even set is just the root
        let g = Graph::from_pairs(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let (part, _, _) = red_black_order(&g, 0).unwrap();
        assert!(part.n1 >= part.n2);
        assert_eq!(part.n1, 3);
    }

    #[test]
    fn disconnected_is_rejected() {
        let g = Graph::from_pairs(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(red_black_order(&g, 0), Err(Error::Disconnected)));
    }
}
