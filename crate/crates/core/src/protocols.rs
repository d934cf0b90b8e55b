//! Synchronous-round simulated message passing and the three distributed
//! primitives the design loop needs: Metropolis averaging, max-consensus
//! connectivity verification with per-edge virtual cuts, and min-consensus
//! election of the globally best action.
//!
//! Rounds are barriers: state written in round `s` becomes readable in
//! round `s + 1`, and a node only ever reads its first-order neighbors.
//! Every update here is double-buffered, so the transcript is independent
//! of intra-round execution order.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{Edge, Graph, GraphView, NodeId};
use crate::spectra::MomentVector;

#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolError {
    MaxRoundsExceeded { rounds: usize, spread: f64 },
    LengthMismatch { expected: usize, got: usize },
}

impl fmt::Display for ProtocolError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProtocolError::MaxRoundsExceeded { rounds, spread } => {
                write!(f, "consensus did not converge in {rounds} rounds (spread {spread:e})")
            }
            ProtocolError::LengthMismatch { expected, got } => {
                write!(f, "expected {expected} per-node values, got {got}")
            }
        }
    }
}

impl core::error::Error for ProtocolError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolPhase {
    AverageConsensus,
    ConnectivityCheck,
    Election,
}

/// What a node holds (and would broadcast) at the end of a round.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Reals(Vec<f64>),
    Marks(Vec<u32>),
    Action(ActionRecord),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranscriptEvent {
    pub phase: ProtocolPhase,
    pub round: usize,
    pub node: NodeId,
    pub payload: Payload,
}

/// Ordered log of per-(round, node) protocol state, for debugging dumps
/// and replay tests.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Transcript {
    pub events: Vec<TranscriptEvent>,
}

/// A candidate action owned by a master node: the partner endpoint, the
/// spectral pseudodistance the edit would reach, and the full resulting
/// moment vector. A record with no partner is the sentinel "no beneficial
/// local action", carrying the sentinel distance.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionRecord {
    pub master: NodeId,
    pub partner: Option<NodeId>,
    pub sd: f64,
    pub moments: MomentVector,
}

impl ActionRecord {
    pub fn sentinel(master: NodeId, sentinel_sd: f64, moments: MomentVector) -> Self {
        ActionRecord { master, partner: None, sd: sentinel_sd, moments }
    }

    pub fn is_sentinel(&self) -> bool {
        self.partner.is_none()
    }

    pub fn edge(&self) -> Option<Edge> {
        self.partner.map(|p| Edge::new(self.master, p))
    }

    fn partner_rank(&self) -> i64 {
        self.partner.map(|p| p.index() as i64).unwrap_or(-1)
    }

    /// Strict election ordering: smaller distance wins; ties go to the
    /// larger master index, then the larger partner index.
    fn beats(&self, other: &ActionRecord) -> bool {
        match self.sd.total_cmp(&other.sd) {
            core::cmp::Ordering::Less => true,
            core::cmp::Ordering::Greater => false,
            core::cmp::Ordering::Equal => match self.master.cmp(&other.master) {
                core::cmp::Ordering::Greater => true,
                core::cmp::Ordering::Less => false,
                core::cmp::Ordering::Equal => self.partner_rank() > other.partner_rank(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusRun {
    pub values: Vec<Vec<f64>>,
    pub rounds: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeletionCheck {
    /// Verified-safe deletions grouped by master node.
    pub safe_by_master: Vec<Vec<Edge>>,
    /// Last round that changed any state; the protocol always runs for
    /// `n` rounds, which suffices because the diameter is below `n`.
    pub rounds_to_fixpoint: usize,
    /// Final per-node, per-critical-edge consensus marks.
    pub final_marks: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElectionOutcome {
    /// Every node's record after the election converged.
    pub records: Vec<ActionRecord>,
}

impl ElectionOutcome {
    pub fn winner(&self) -> &ActionRecord {
        &self.records[0]
    }

    pub fn unanimous(&self) -> bool {
        self.records.windows(2).all(|w| w[0] == w[1])
    }
}

/// The synchronous-round world: a snapshot of the communication graph plus
/// an optional transcript sink.
#[derive(Debug, Clone)]
pub struct SimNetwork {
    graph: Graph,
    transcript: Option<Transcript>,
}

impl SimNetwork {
    pub fn new(graph: Graph) -> Self {
        SimNetwork { graph, transcript: None }
    }

    pub fn with_transcript(graph: Graph) -> Self {
        SimNetwork { graph, transcript: Some(Transcript::default()) }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn transcript(&self) -> Option<&Transcript> {
        self.transcript.as_ref()
    }

    pub fn take_transcript(&mut self) -> Option<Transcript> {
        let taken = self.transcript.take();
        if taken.is_some() {
            self.transcript = Some(Transcript::default());
        }
        taken
    }

    fn record(&mut self, phase: ProtocolPhase, round: usize, node: usize, payload: Payload) {
        if let Some(t) = &mut self.transcript {
            t.events.push(TranscriptEvent { phase, round, node: NodeId::new(node), payload });
        }
    }

    fn record_reals(&mut self, phase: ProtocolPhase, round: usize, state: &[Vec<f64>]) {
        if self.transcript.is_some() {
            for (i, v) in state.iter().enumerate() {
                self.record(phase, round, i, Payload::Reals(v.clone()));
            }
        }
    }

    /// Distributed averaging with Metropolis weights
    /// `w_ij = 1 / (1 + max(d_i, d_j))`. Stops once the largest
    /// componentwise spread falls below `tol`; every node then holds the
    /// exact average of the inputs to within that spread.
    pub fn average_consensus(
        &mut self,
        values: &[Vec<f64>],
        tol: f64,
        max_rounds: usize,
    ) -> Result<ConsensusRun, ProtocolError> {
        let n = self.graph.node_count();
        if values.len() != n {
            return Err(ProtocolError::LengthMismatch { expected: n, got: values.len() });
        }
        let width = values.first().map(|v| v.len()).unwrap_or(0);
        for v in values {
            if v.len() != width {
                return Err(ProtocolError::LengthMismatch { expected: width, got: v.len() });
            }
        }

        let spread_of = |state: &[Vec<f64>]| -> f64 {
            let mut worst = 0.0f64;
            for c in 0..width {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for v in state {
                    lo = lo.min(v[c]);
                    hi = hi.max(v[c]);
                }
                worst = worst.max(hi - lo);
            }
            worst
        };

        let mut state: Vec<Vec<f64>> = values.to_vec();
        let mut rounds = 0;
        loop {
            let spread = spread_of(&state);
            if spread < tol {
                return Ok(ConsensusRun { values: state, rounds });
            }
            if rounds >= max_rounds {
                return Err(ProtocolError::MaxRoundsExceeded { rounds, spread });
            }
            let mut next = state.clone();
            for i in 0..n {
                let vi = NodeId::new(i);
                let di = self.graph.degree(vi);
                for &j in self.graph.neighbors(vi) {
                    let w = 1.0 / (1.0 + di.max(self.graph.degree(j)) as f64);
                    for c in 0..width {
                        next[i][c] += w * (state[j.index()][c] - state[i][c]);
                    }
                }
            }
            state = next;
            rounds += 1;
            self.record_reals(ProtocolPhase::AverageConsensus, rounds, &state);
        }
    }

    /// Simultaneous connectivity verification for every critical edge, by
    /// high-dimensional max consensus with the checked edge virtually cut.
    ///
    /// Marks start at the node's own index — deterministic and pairwise
    /// distinct, so the equality test is exact rather than almost-sure
    /// under random initialization: edge `(k, i)` is safe if and only if
    /// master `k` and partner `i` converge to the same mark, i.e. they
    /// stay in one component of the cut graph.
    pub fn verify_deletions(&mut self, critical: &[Edge]) -> DeletionCheck {
        let n = self.graph.node_count();
        debug_assert!(critical
            .iter()
            .all(|e| self.graph.has_edge(e.master(), e.partner())));

        let mut marks: Vec<Vec<u32>> = (0..n).map(|k| vec![k as u32; critical.len()]).collect();
        let mut rounds_to_fixpoint = 0;
        for round in 1..=n {
            let mut next = marks.clone();
            let mut changed = false;
            for k in 0..n {
                let vk = NodeId::new(k);
                for (idx, e) in critical.iter().enumerate() {
                    let mut best = marks[k][idx];
                    for &l in self.graph.neighbors(vk) {
                        // The virtual cut: neither endpoint of the checked
                        // edge listens across it for that edge's entry.
                        if e.other(vk) == Some(l) {
                            continue;
                        }
                        best = best.max(marks[l.index()][idx]);
                    }
                    if best != next[k][idx] {
                        next[k][idx] = best;
                        changed = true;
                    }
                }
            }
            marks = next;
            if changed {
                rounds_to_fixpoint = round;
            }
            if self.transcript.is_some() {
                for (k, m) in marks.iter().enumerate() {
                    self.record(ProtocolPhase::ConnectivityCheck, round, k, Payload::Marks(m.clone()));
                }
            }
        }

        let mut safe_by_master: Vec<Vec<Edge>> = vec![Vec::new(); n];
        for (idx, e) in critical.iter().enumerate() {
            let m = e.master().index();
            let p = e.partner().index();
            if marks[m][idx] == marks[p][idx] {
                safe_by_master[m].push(*e);
            }
        }
        for list in &mut safe_by_master {
            list.sort_unstable();
        }
        DeletionCheck { safe_by_master, rounds_to_fixpoint, final_marks: marks }
    }

    /// Min-consensus election over the per-node action records. After `n`
    /// rounds every node holds the same minimal record under the ordering
    /// (distance ascending, master descending, partner descending).
    pub fn elect_global_action(&mut self, locals: &[ActionRecord]) -> ElectionOutcome {
        let n = self.graph.node_count();
        debug_assert_eq!(locals.len(), n, "one record per node");
        let mut records: Vec<ActionRecord> = locals.to_vec();
        for round in 1..=n {
            let mut next = records.clone();
            for (k, slot) in next.iter_mut().enumerate() {
                for &l in self.graph.neighbors(NodeId::new(k)) {
                    if records[l.index()].beats(slot) {
                        *slot = records[l.index()].clone();
                    }
                }
            }
            records = next;
            if self.transcript.is_some() {
                for (k, r) in records.iter().enumerate() {
                    self.record(ProtocolPhase::Election, round, k, Payload::Action(r.clone()));
                }
            }
        }
        ElectionOutcome { records }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{chain, erdos_renyi_connected, ring, star};
    use crate::graph::{bridges, Graph};
    use crate::local_moments::node_contribution;

    fn nid(i: usize) -> NodeId {
        NodeId::new(i)
    }

    fn mv(values: &[f64]) -> MomentVector {
        MomentVector::new(values.to_vec())
    }

    #[test]
    fn consensus_fixed_point_converges_immediately() {
        let g = ring(6).unwrap();
        let values: Vec<Vec<f64>> = (0..6).map(|_| vec![3.5, -1.0]).collect();
        let run = SimNetwork::new(g).average_consensus(&values, 1e-9, 100).unwrap();
        assert_eq!(run.rounds, 0);
        assert_eq!(run.values, values);
    }

    #[test]
    fn consensus_on_k2_averages_symmetrically() {
        let g = Graph::from_edges(2, [Edge::new(nid(1), nid(0))]).unwrap();
        let run = SimNetwork::new(g)
            .average_consensus(&[vec![0.0], vec![2.0]], 1e-12, 100)
            .unwrap();
        for v in &run.values {
            assert!((v[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn consensus_spreads_star_moment_contributions() {
        let g = star(10).unwrap();
        let values: Vec<Vec<f64>> =
            g.node_ids().map(|i| node_contribution(&g, i, 2).unwrap().mu).collect();
        let run = SimNetwork::new(g).average_consensus(&values, 1e-6, 10_000).unwrap();
        let want = [1.8, 10.8, 100.8, 1000.8, 10000.8];
        for v in &run.values {
            for (got, w) in v.iter().zip(want) {
                assert!((got - w).abs() < 1e-5, "{got} vs {w}");
            }
        }
    }

    #[test]
    fn consensus_reports_spread_when_capped() {
        // Disconnected pair never mixes.
        let g = Graph::empty(2);
        let err = SimNetwork::new(g)
            .average_consensus(&[vec![0.0], vec![2.0]], 1e-9, 50)
            .unwrap_err();
        match err {
            ProtocolError::MaxRoundsExceeded { rounds, spread } => {
                assert_eq!(rounds, 50);
                assert!((spread - 2.0).abs() < 1e-12);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn ring_edges_are_all_safe() {
        let g = ring(6).unwrap();
        let critical: Vec<Edge> = g.edges().collect();
        let check = SimNetwork::new(g.clone()).verify_deletions(&critical);
        let safe: usize = check.safe_by_master.iter().map(|s| s.len()).sum();
        assert_eq!(safe, 6);
        assert!(check.rounds_to_fixpoint <= 6);
    }

    #[test]
    fn path_edges_are_all_unsafe() {
        let g = chain(5).unwrap();
        let critical: Vec<Edge> = g.edges().collect();
        let check = SimNetwork::new(g).verify_deletions(&critical);
        assert!(check.safe_by_master.iter().all(|s| s.is_empty()));
    }

    #[test]
    fn verification_matches_bridge_oracle_on_random_graphs() {
        for seed in 0..25u64 {
            let g = erdos_renyi_connected(30, 0.12, seed).unwrap();
            let critical: Vec<Edge> = g.edges().collect();
            let check = SimNetwork::new(g.clone()).verify_deletions(&critical);
            let bridge_set = bridges(&g);
            for e in &critical {
                let safe = check.safe_by_master[e.master().index()].contains(e);
                assert_eq!(safe, !bridge_set.contains(e), "seed {seed}, edge {e}");
            }
            assert!(check.rounds_to_fixpoint <= g.node_count());
        }
    }

    #[test]
    fn marks_grow_monotonically() {
        let g = erdos_renyi_connected(12, 0.25, 3).unwrap();
        let critical: Vec<Edge> = g.edges().collect();
        let mut net = SimNetwork::with_transcript(g.clone());
        let _ = net.verify_deletions(&critical);
        let transcript = net.take_transcript().unwrap();
        let n = g.node_count();
        let mut prev: Vec<Vec<u32>> = (0..n).map(|k| vec![k as u32; critical.len()]).collect();
        for ev in &transcript.events {
            if let Payload::Marks(m) = &ev.payload {
                let k = ev.node.index();
                for (new, old) in m.iter().zip(&prev[k]) {
                    assert!(new >= old, "mark shrank at node {k}");
                }
                prev[k] = m.clone();
            }
        }
    }

    #[test]
    fn lone_beneficial_action_wins_everywhere() {
        let g = ring(7).unwrap();
        let d = 1e18;
        let base = mv(&[1.0, 2.0, 3.0]);
        let mut locals: Vec<ActionRecord> =
            (0..7).map(|i| ActionRecord::sentinel(nid(i), d, base.clone())).collect();
        locals[3] = ActionRecord {
            master: nid(3),
            partner: Some(nid(1)),
            sd: 0.25,
            moments: mv(&[1.1, 2.2, 3.3]),
        };
        let outcome = SimNetwork::new(g).elect_global_action(&locals);
        assert!(outcome.unanimous());
        assert_eq!(outcome.winner(), &locals[3]);
    }

    #[test]
    fn all_sentinels_signal_convergence() {
        let g = chain(5).unwrap();
        let d = 1e18;
        let locals: Vec<ActionRecord> =
            (0..5).map(|i| ActionRecord::sentinel(nid(i), d, mv(&[0.0]))).collect();
        let outcome = SimNetwork::new(g).elect_global_action(&locals);
        assert!(outcome.unanimous());
        let w = outcome.winner();
        assert!(w.is_sentinel());
        assert_eq!(w.sd, d);
        // Sentinel ties resolve to the largest master index.
        assert_eq!(w.master, nid(4));
    }

    #[test]
    fn equal_distance_tie_goes_to_larger_master() {
        let g = ring(6).unwrap();
        let d = 1e18;
        let mut locals: Vec<ActionRecord> =
            (0..6).map(|i| ActionRecord::sentinel(nid(i), d, mv(&[0.0]))).collect();
        locals[2] =
            ActionRecord { master: nid(2), partner: Some(nid(0)), sd: 0.5, moments: mv(&[1.0]) };
        locals[5] =
            ActionRecord { master: nid(5), partner: Some(nid(1)), sd: 0.5, moments: mv(&[2.0]) };
        let outcome = SimNetwork::new(g).elect_global_action(&locals);
        assert!(outcome.unanimous());
        assert_eq!(outcome.winner().master, nid(5));
    }

    #[test]
    fn election_matches_centralized_argmin() {
        for seed in 0..10u64 {
            let g = erdos_renyi_connected(15, 0.2, seed).unwrap();
            let mut rng = crate::rng::SimRng::from_seed(seed ^ 0xABCD);
            let locals: Vec<ActionRecord> = (0..15)
                .map(|i| ActionRecord {
                    master: nid(i),
                    partner: Some(nid(rng.index(15))).filter(|&p| p != nid(i)),
                    sd: (rng.index(5) as f64) * 0.125,
                    moments: mv(&[rng.f64()]),
                })
                .collect();
            let outcome = SimNetwork::new(g).elect_global_action(&locals);
            assert!(outcome.unanimous(), "seed {seed}");
            let mut best = locals[0].clone();
            for r in &locals[1..] {
                if r.beats(&best) {
                    best = r.clone();
                }
            }
            assert_eq!(outcome.winner(), &best, "seed {seed}");
        }
    }

    #[test]
    fn transcripts_replay_bitwise() {
        let g = erdos_renyi_connected(10, 0.3, 8).unwrap();
        let critical: Vec<Edge> = g.edges().collect();
        let values: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let run = |g: &Graph| {
            let mut net = SimNetwork::with_transcript(g.clone());
            net.average_consensus(&values, 1e-8, 1000).unwrap();
            net.verify_deletions(&critical);
            net.take_transcript().unwrap()
        };
        assert_eq!(run(&g), run(&g));
    }
}
