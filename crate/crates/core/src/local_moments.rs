//! Myopic-view moment machinery: each node computes the diagonal entries
//! `[L_{i,r}^k]_{00}` of powers of its local Laplacian submatrix, and the
//! average of those contributions equals the global spectral moments for
//! every order `k <= 2r + 1`.

use alloc::vec::Vec;

use crate::graph::{neighborhood, GraphError, GraphView, NodeId};
use crate::spectra::{local_laplacian, MomentVector, SpectraError};

/// One node's view contribution: `mu[k-1] = [L_{i,r}^k]_{00}` for
/// `k = 1..=2r+1`, where row 0 of the submatrix is the node itself.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeContribution {
    pub node: NodeId,
    pub mu: Vec<f64>,
}

/// Computes a node's contribution from its `r`-ball. `mu[0]` is the node's
/// degree; subsequent entries weigh ever longer closed walks confined to
/// the ball.
pub fn node_contribution<V: GraphView>(
    g: &V,
    i: NodeId,
    r: usize,
) -> Result<NodeContribution, GraphError> {
    debug_assert!(r >= 1, "the view bound 2r+1 needs r >= 1");
    let ball = neighborhood(g, i, r)?;
    let sub = local_laplacian(g, &ball);
    let order = 2 * r + 1;
    let n = sub.dim();
    // Track only the anchor's row of each power: row_k = row_{k-1} * L.
    let mut row: Vec<f64> = (0..n).map(|j| sub.get(0, j)).collect();
    let mut mu = Vec::with_capacity(order);
    mu.push(row[0]);
    for _ in 2..=order {
        let mut next = alloc::vec![0.0; n];
        for (j, &coeff) in row.iter().enumerate() {
            if coeff == 0.0 {
                continue;
            }
            for (nx, l) in next.iter_mut().zip((0..n).map(|c| sub.get(j, c))) {
                *nx += coeff * l;
            }
        }
        row = next;
        mu.push(row[0]);
    }
    Ok(NodeContribution { node: i, mu })
}

/// Componentwise average of one contribution per node: the global moment
/// vector, exactly, for orders covered by the view radius.
pub fn aggregate_moments(contribs: &[NodeContribution]) -> Result<MomentVector, SpectraError> {
    let order = contribs.first().map(|c| c.mu.len()).unwrap_or(0);
    for c in contribs {
        if c.mu.len() != order {
            return Err(SpectraError::OrderMismatch { left: order, right: c.mu.len() });
        }
    }
    let n = contribs.len() as f64;
    let mut m = alloc::vec![0.0; order];
    for c in contribs {
        for (acc, &v) in m.iter_mut().zip(&c.mu) {
            *acc += v;
        }
    }
    for acc in &mut m {
        *acc /= n;
    }
    Ok(MomentVector::new(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{chain, ring, star};
    use crate::graph::{Edge, Graph};
    use crate::spectra::{laplacian, moments_via_trace};

    fn nid(i: usize) -> NodeId {
        NodeId::new(i)
    }

    fn random_connected(n: usize, p: f64, seed: u64) -> Graph {
        crate::generators::erdos_renyi_connected(n, p, seed).unwrap()
    }

    fn all_contribs(g: &Graph, r: usize) -> Vec<NodeContribution> {
        g.node_ids().map(|i| node_contribution(g, i, r).unwrap()).collect()
    }

    #[test]
    fn star_center_first_entry_is_degree() {
        let g = star(10).unwrap();
        let c = node_contribution(&g, nid(0), 1).unwrap();
        assert_eq!(c.mu[0], 9.0);
    }

    #[test]
    fn ring_contribution_matches_hand_submatrix_powers() {
        // L_{i,1} on a long ring is [[2,-1,-1],[-1,2,0],[-1,0,2]];
        // [L^k]_00 for k = 1..3 works out to 2, 6, 20.
        let g = ring(20).unwrap();
        for i in [0usize, 7, 19] {
            let c = node_contribution(&g, nid(i), 1).unwrap();
            assert_eq!(c.mu, alloc::vec![2.0, 6.0, 20.0]);
        }
    }

    #[test]
    fn contribution_equals_global_power_diagonal() {
        let g = random_connected(30, 0.15, 42);
        let l = laplacian(&g);
        let mut p = l.clone();
        for k in 1..=5usize {
            if k > 1 {
                p = l.mul(&p);
            }
            for i in g.node_ids() {
                let c = node_contribution(&g, i, 2).unwrap();
                let global = p.get(i.index(), i.index());
                assert!(
                    (c.mu[k - 1] - global).abs() <= 1e-8 * global.abs().max(1.0),
                    "node {i} k={k}: {} vs {global}",
                    c.mu[k - 1]
                );
            }
        }
    }

    #[test]
    fn degree_identities_hold() {
        let g = random_connected(20, 0.25, 7);
        for i in g.node_ids() {
            let c = node_contribution(&g, i, 1).unwrap();
            let d = g.degree(i) as f64;
            assert_eq!(c.mu[0], d);
            assert_eq!(c.mu[1], d * d + d);
        }
    }

    #[test]
    fn star_aggregate_matches_reported_moments() {
        let g = star(10).unwrap();
        let m = aggregate_moments(&all_contribs(&g, 2)).unwrap();
        let want = [1.8, 10.8, 100.8, 1000.8, 10000.8];
        for (k, w) in want.iter().enumerate() {
            assert!((m.moment(k + 1) - w).abs() <= 1e-9 * w);
        }
    }

    #[test]
    fn chain_aggregate_matches_reported_moments() {
        let g = chain(20).unwrap();
        let m = aggregate_moments(&all_contribs(&g, 2)).unwrap();
        let want = [1.9, 5.6, 18.4, 63.6, 226.4];
        for (k, w) in want.iter().enumerate() {
            assert!((m.moment(k + 1) - w).abs() <= 1e-9 * w);
        }
    }

    #[test]
    fn single_node_graph_has_zero_moments() {
        let g = Graph::empty(1);
        let m = aggregate_moments(&all_contribs(&g, 1)).unwrap();
        assert_eq!(m.as_slice(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn aggregate_rejects_mismatched_lengths() {
        let g = ring(5).unwrap();
        let mut contribs = all_contribs(&g, 1);
        contribs[2].mu.pop();
        assert!(aggregate_moments(&contribs).is_err());
    }

    #[test]
    fn aggregate_equals_trace_up_to_view_bound() {
        for seed in 0..8u64 {
            let g = random_connected(18, 0.2, seed);
            let l = laplacian(&g);
            for r in 1..=3usize {
                let order = 2 * r + 1;
                let local = aggregate_moments(&all_contribs(&g, r)).unwrap();
                let global = moments_via_trace(&l, order);
                for k in 1..=order {
                    let (a, b) = (local.moment(k), global.moment(k));
                    assert!(
                        (a - b).abs() <= 1e-8 * a.abs().max(b.abs()).max(1.0),
                        "seed {seed} r={r} k={k}: {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn view_bound_is_tight_on_a_long_ring() {
        // k = 2r + 2 walks can peek one hop beyond the ball: a witness that
        // the 2r+1 view bound cannot be improved.
        let g = ring(20).unwrap();
        let r = 1;
        let k = 2 * r + 2;
        let mut local_m = 0.0;
        for i in g.node_ids() {
            let ball = neighborhood(&g, i, r).unwrap();
            let sub = local_laplacian(&g, &ball);
            let mut p = sub.clone();
            for _ in 1..k {
                p = sub.mul(&p);
            }
            local_m += p.get(0, 0) / 20.0;
        }
        let global = moments_via_trace(&laplacian(&g), k).moment(k);
        assert!((local_m - global).abs() > 1e-6, "expected disagreement at k = 2r+2");
    }

    #[test]
    fn contribution_ignores_edits_outside_the_ball() {
        let g = chain(12).unwrap();
        let before = node_contribution(&g, nid(1), 2).unwrap();
        // Edit far outside node 1's 2-ball.
        let edited = g.add_edge(Edge::new(nid(11), nid(9))).unwrap();
        let after = node_contribution(&edited, nid(1), 2).unwrap();
        assert_eq!(before, after);
        // Control: an edit inside the ball does change it.
        let near = g.add_edge(Edge::new(nid(3), nid(1))).unwrap();
        assert_ne!(before, node_contribution(&near, nid(1), 2).unwrap());
    }

    #[test]
    fn submatrix_diagonal_carries_global_degrees() {
        // Node 1 sits on the boundary of node 0's 1-ball; its diagonal
        // entry must be its global degree, not its degree inside the ball.
        let g = chain(8).unwrap();
        let sub = local_laplacian(&g, &neighborhood(&g, nid(0), 1).unwrap());
        assert_eq!(sub.get(1, 1), 2.0);
        assert_eq!(node_contribution(&g, nid(0), 1).unwrap().mu[0], 1.0);
    }
}
