//! Seeded construction of the benchmark topologies and random models.
//! Fixed seed means identical output, bit for bit.

use alloc::vec::Vec;
use core::fmt;

use crate::graph::{Edge, Graph, GraphView, NodeId};
use crate::rng::SimRng;

#[derive(Debug, Clone, PartialEq)]
pub enum GenError {
    BadParams(&'static str),
    /// Rejection sampling for a connected G(n, p) gave up; `p` is too small.
    ConnectivityCapExceeded { attempts: usize },
}

impl fmt::Display for GenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenError::BadParams(msg) => write!(f, "invalid generator parameters: {msg}"),
            GenError::ConnectivityCapExceeded { attempts } => {
                write!(f, "no connected sample after {attempts} attempts; p is too small")
            }
        }
    }
}

impl core::error::Error for GenError {}

fn nid(i: usize) -> NodeId {
    NodeId::new(i)
}

/// Hub 0 adjacent to every other node.
pub fn star(n: usize) -> Result<Graph, GenError> {
    if n < 2 {
        return Err(GenError::BadParams("star needs n >= 2"));
    }
    Graph::from_edges(n, (1..n).map(|i| Edge::new(nid(i), nid(0))))
        .map_err(|_| GenError::BadParams("star construction"))
}

/// Two adjacent hubs 0 and 1, each carrying (n-2)/2 leaves.
pub fn two_star(n: usize) -> Result<Graph, GenError> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(GenError::BadParams("two_star needs even n >= 4"));
    }
    let half = (n - 2) / 2;
    let mut edges = Vec::with_capacity(n - 1);
    edges.push(Edge::new(nid(1), nid(0)));
    for i in 0..half {
        edges.push(Edge::new(nid(2 + i), nid(0)));
        edges.push(Edge::new(nid(2 + half + i), nid(1)));
    }
    Graph::from_edges(n, edges).map_err(|_| GenError::BadParams("two_star construction"))
}

/// Path 0 - 1 - ... - (n-1).
pub fn chain(n: usize) -> Result<Graph, GenError> {
    if n < 2 {
        return Err(GenError::BadParams("chain needs n >= 2"));
    }
    Graph::from_edges(n, (1..n).map(|i| Edge::new(nid(i), nid(i - 1))))
        .map_err(|_| GenError::BadParams("chain construction"))
}

/// Cycle on n nodes.
pub fn ring(n: usize) -> Result<Graph, GenError> {
    if n < 3 {
        return Err(GenError::BadParams("ring needs n >= 3"));
    }
    let edges = (1..n)
        .map(|i| Edge::new(nid(i), nid(i - 1)))
        .chain(core::iter::once(Edge::new(nid(n - 1), nid(0))));
    Graph::from_edges(n, edges).map_err(|_| GenError::BadParams("ring construction"))
}

/// Small-world model: a ring, chords to every node within ring-distance `k`
/// (distance 1 being the ring itself), then each absent pair added
/// independently with probability `p`. Edges are added, not rewired, so the
/// ring survives and the result is always connected.
pub fn watts_strogatz(n: usize, k: usize, p: f64, seed: u64) -> Result<Graph, GenError> {
    if n < 3 {
        return Err(GenError::BadParams("watts_strogatz needs n >= 3"));
    }
    if k < 1 {
        return Err(GenError::BadParams("watts_strogatz needs k >= 1"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(GenError::BadParams("watts_strogatz needs 0 <= p <= 1"));
    }
    let mut g = Graph::empty(n);
    for i in 0..n {
        for d in 1..=k {
            let j = (i + d) % n;
            if let Some(e) = Edge::try_new(nid(i), nid(j)) {
                if !g.has_edge(nid(i), nid(j)) {
                    g = g.add_edge(e).expect("circulant edge");
                }
            }
        }
    }
    let mut rng = SimRng::from_seed(seed);
    for i in 1..n {
        for j in 0..i {
            if !g.has_edge(nid(i), nid(j)) && rng.bool(p) {
                g = g.add_edge(Edge::new(nid(i), nid(j))).expect("random chord");
            }
        }
    }
    Ok(g)
}

/// Preferential attachment: a clique on `m + 1` seed nodes, then each new
/// node attaches `m` edges sampled degree-proportionally without
/// replacement. Connected by construction.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Result<Graph, GenError> {
    if m < 1 || m >= n {
        return Err(GenError::BadParams("barabasi_albert needs 1 <= m < n"));
    }
    let mut rng = SimRng::from_seed(seed);
    let mut g = Graph::empty(n);
    // Degree-proportional sampling from a repeated-node list: each node
    // appears once per incident edge.
    let mut stubs: Vec<NodeId> = Vec::new();
    for i in 1..=m {
        for j in 0..i {
            g = g.add_edge(Edge::new(nid(i), nid(j))).expect("seed clique edge");
            stubs.push(nid(i));
            stubs.push(nid(j));
        }
    }
    for v in m + 1..n {
        let mut targets: Vec<NodeId> = Vec::with_capacity(m);
        while targets.len() < m {
            let t = stubs[rng.index(stubs.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for t in targets {
            g = g.add_edge(Edge::new(nid(v), t)).expect("attachment edge");
            stubs.push(nid(v));
            stubs.push(t);
        }
    }
    Ok(g)
}

const ER_MAX_ATTEMPTS: usize = 1000;

/// G(n, p) resampled until connected (at most 1000 attempts).
pub fn erdos_renyi_connected(n: usize, p: f64, seed: u64) -> Result<Graph, GenError> {
    if n < 2 {
        return Err(GenError::BadParams("erdos_renyi needs n >= 2"));
    }
    if !(0.0 < p && p <= 1.0) {
        return Err(GenError::BadParams("erdos_renyi needs 0 < p <= 1"));
    }
    let mut rng = SimRng::from_seed(seed);
    for _ in 0..ER_MAX_ATTEMPTS {
        let mut edges = Vec::new();
        for i in 1..n {
            for j in 0..i {
                if rng.bool(p) {
                    edges.push(Edge::new(nid(i), nid(j)));
                }
            }
        }
        let g = Graph::from_edges(n, edges).expect("pair enumeration is duplicate-free");
        if crate::graph::is_connected(&g) {
            return Ok(g);
        }
    }
    Err(GenError::ConnectivityCapExceeded { attempts: ER_MAX_ATTEMPTS })
}

/// A generator request, as carried by run configurations.
#[derive(Debug, Clone, PartialEq)]
pub enum GenSpec {
    Star { n: usize },
    TwoStar { n: usize },
    Chain { n: usize },
    Ring { n: usize },
    WattsStrogatz { n: usize, k: usize, p: f64, seed: u64 },
    BarabasiAlbert { n: usize, m: usize, seed: u64 },
    ErdosRenyi { n: usize, p: f64, seed: u64 },
}

impl GenSpec {
    pub fn build(&self) -> Result<Graph, GenError> {
        match *self {
            GenSpec::Star { n } => star(n),
            GenSpec::TwoStar { n } => two_star(n),
            GenSpec::Chain { n } => chain(n),
            GenSpec::Ring { n } => ring(n),
            GenSpec::WattsStrogatz { n, k, p, seed } => watts_strogatz(n, k, p, seed),
            GenSpec::BarabasiAlbert { n, m, seed } => barabasi_albert(n, m, seed),
            GenSpec::ErdosRenyi { n, p, seed } => erdos_renyi_connected(n, p, seed),
        }
    }

    pub fn node_count(&self) -> usize {
        match *self {
            GenSpec::Star { n }
            | GenSpec::TwoStar { n }
            | GenSpec::Chain { n }
            | GenSpec::Ring { n }
            | GenSpec::WattsStrogatz { n, .. }
            | GenSpec::BarabasiAlbert { n, .. }
            | GenSpec::ErdosRenyi { n, .. } => n,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_connected;
    use crate::spectra::{laplacian, moments_via_trace};

    #[test]
    fn deterministic_families_match_reported_moments() {
        // two_star values are the exact ones; the reported list rounds the
        // last two to 1480 and 16590.
        let cases: [(&Graph, [f64; 5]); 3] = [
            (&star(10).unwrap(), [1.8, 10.8, 100.8, 1000.8, 10000.8]),
            (&two_star(20).unwrap(), [1.9, 12.8, 133.6, 1480.4, 16590.4]),
            (&ring(20).unwrap(), [2.0, 6.0, 20.0, 70.0, 252.0]),
        ];
        for (g, want) in cases {
            let m = moments_via_trace(&laplacian(g), 5);
            for (k, w) in want.iter().enumerate() {
                let got = m.moment(k + 1);
                assert!((got - w).abs() <= 1e-9 * w.abs().max(1.0), "m_{}: {got} vs {w}", k + 1);
            }
        }
    }

    #[test]
    fn two_star_shape() {
        let g = two_star(20).unwrap();
        assert_eq!(g.degree(NodeId::new(0)), 10);
        assert_eq!(g.degree(NodeId::new(1)), 10);
        assert_eq!(g.edge_count(), 19);
        assert!(two_star(7).is_err());
    }

    #[test]
    fn ws_with_p_zero_k_one_is_plain_ring() {
        let g = watts_strogatz(12, 1, 0.0, 4).unwrap();
        assert_eq!(g, ring(12).unwrap());
    }

    #[test]
    fn ws_with_p_zero_k_two_is_four_regular() {
        let g = watts_strogatz(40, 2, 0.0, 4).unwrap();
        for v in g.node_ids() {
            assert_eq!(g.degree(v), 4);
        }
        let m = moments_via_trace(&laplacian(&g), 1);
        assert!((m.moment(1) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn ws_mean_moments_near_reported_realization() {
        // The reported triple is a single random realization; check the
        // ensemble mean lands in its neighborhood.
        let mut mean = [0.0f64; 3];
        let runs = 40;
        for seed in 0..runs {
            let g = watts_strogatz(40, 2, 3.0 / 40.0, seed).unwrap();
            assert!(is_connected(&g));
            let m = moments_via_trace(&laplacian(&g), 3);
            for (k, acc) in mean.iter_mut().enumerate() {
                *acc += m.moment(k + 1) / runs as f64;
            }
        }
        let reported = [6.55, 51.9, 457.0];
        for k in 0..3 {
            let rel = (mean[k] - reported[k]).abs() / reported[k];
            assert!(rel < 0.25, "m_{}: mean {} vs reported {}", k + 1, mean[k], reported[k]);
        }
    }

    #[test]
    fn ba_base_case_is_complete_graph() {
        let g = barabasi_albert(5, 4, 9).unwrap();
        assert_eq!(g.edge_count(), 10);
    }

    #[test]
    fn ba_edge_count_matches_construction() {
        for (n, m, seed) in [(50, 4, 0), (30, 2, 5), (10, 3, 1)] {
            let g = barabasi_albert(n, m, seed).unwrap();
            let expected = m * (m + 1) / 2 + (n - m - 1) * m;
            assert_eq!(g.edge_count(), expected);
            assert!(is_connected(&g));
        }
    }

    #[test]
    fn ba_moments_near_reported_order_of_magnitude() {
        // The reported quintuple is one realization, and the high moments
        // are dominated by the largest hub degree, so only order-of-
        // magnitude proximity is meaningful.
        let reported = [7.72, 111.0, 2.81e3, 9.70e4, 3.82e6];
        let mut mean = [0.0f64; 5];
        let runs = 20;
        for seed in 0..runs {
            let g = barabasi_albert(50, 4, seed).unwrap();
            let m = moments_via_trace(&laplacian(&g), 5);
            for (k, acc) in mean.iter_mut().enumerate() {
                *acc += m.moment(k + 1) / runs as f64;
            }
        }
        for k in 0..5 {
            let ratio = mean[k] / reported[k];
            assert!(
                (0.1..=10.0).contains(&ratio),
                "m_{}: mean {} vs reported {}",
                k + 1,
                mean[k],
                reported[k]
            );
        }
    }

    #[test]
    fn er_is_connected_and_seed_deterministic() {
        let a = erdos_renyi_connected(10, 0.5, 3).unwrap();
        let b = erdos_renyi_connected(10, 0.5, 3).unwrap();
        assert_eq!(a, b);
        assert!(is_connected(&a));
        let full = erdos_renyi_connected(6, 1.0, 0).unwrap();
        assert_eq!(full.edge_count(), 15);
    }

    #[test]
    fn er_gives_up_when_p_is_hopeless() {
        assert!(matches!(
            erdos_renyi_connected(40, 1e-6, 0),
            Err(GenError::ConnectivityCapExceeded { .. })
        ));
    }

    #[test]
    fn seeded_families_replay_identically() {
        for seed in [0u64, 1, 99] {
            assert_eq!(
                watts_strogatz(20, 2, 0.2, seed).unwrap(),
                watts_strogatz(20, 2, 0.2, seed).unwrap()
            );
            assert_eq!(barabasi_albert(20, 3, seed).unwrap(), barabasi_albert(20, 3, seed).unwrap());
        }
    }
}
