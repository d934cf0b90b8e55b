//! The greedy decentralized design loop: master assignment, candidate
//! enumeration, per-master best local action, global election, state
//! update, termination.
//!
//! One design round is a deterministic pipeline over a frozen graph
//! snapshot. Each applied edit strictly decreases the pseudodistance to the
//! target, so the loop terminates — either at a sentinel round (no agent
//! can improve) or at the iteration cap.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{
    is_connected, neighborhood, Edge, Graph, GraphError, GraphView, NodeId, NodeSet,
};
use crate::local_moments::{aggregate_moments, node_contribution};
use crate::perturbation::{moment_delta, EditKind, PerturbError};
use crate::protocols::{ActionRecord, ProtocolError, SimNetwork, Transcript};
use crate::rng::{derive_seed, SimRng};
use crate::spectra::{spectral_pseudodistance, MomentVector, SpectraError, SpectralTarget};

/// How an agent certifies that deleting one of its edges cannot disconnect
/// the network before escalating to the consensus check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SafetyRule {
    /// The partner has a neighbor other than the master inside the
    /// master's r-ball: `|N_j ∩ N_{i,r}| > 1`. Airtight for `r = 1` only,
    /// kept as an option for comparison runs.
    NeighborIntersection,
    /// The partner stays reachable from the master inside the master's
    /// r-ball with the edge cut. Sound for every radius and equally local.
    #[default]
    SubgraphReachability,
}

/// Whether initial moments are averaged by a trusted reduction or by the
/// Metropolis consensus protocol.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ConsensusMode {
    #[default]
    Exact,
    Protocol { tol: f64, max_rounds: usize },
}

pub const DEFAULT_SENTINEL: f64 = 1e18;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Agent view radius; the controlled moment order is `2r + 1`.
    pub r: usize,
    pub target: SpectralTarget,
    /// Iteration cap; 0 means the default of `10 * n`.
    pub max_iters: usize,
    pub seed: u64,
    /// "No beneficial action" marker; must exceed any attainable distance.
    pub sentinel: f64,
    pub safety_rule: SafetyRule,
    pub consensus: ConsensusMode,
    pub record_transcript: bool,
}

impl RunConfig {
    pub fn new(r: usize, target: SpectralTarget) -> Self {
        RunConfig {
            r,
            target,
            max_iters: 0,
            seed: 0,
            sentinel: DEFAULT_SENTINEL,
            safety_rule: SafetyRule::default(),
            consensus: ConsensusMode::default(),
            record_transcript: false,
        }
    }

    /// The moment order `K = 2r + 1` the loop controls.
    pub fn moment_order(&self) -> usize {
        2 * self.r + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ControllerError {
    DisconnectedInput,
    /// An applied edit disconnected the graph — impossible by construction
    /// under the default safety rule, so this is an assertion failure.
    Disconnected { t: usize },
    InvalidRadius,
    TargetOrderTooSmall { have: usize, need: usize },
    Graph(GraphError),
    Spectra(SpectraError),
    Protocol(ProtocolError),
    Perturb(PerturbError),
}

impl fmt::Display for ControllerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ControllerError::DisconnectedInput => write!(f, "initial graph is not connected"),
            ControllerError::Disconnected { t } => {
                write!(f, "edit at round {t} disconnected the graph")
            }
            ControllerError::InvalidRadius => write!(f, "view radius must be at least 1"),
            ControllerError::TargetOrderTooSmall { have, need } => {
                write!(f, "target provides {have} moments but the loop needs {need}")
            }
            ControllerError::Graph(e) => write!(f, "{e}"),
            ControllerError::Spectra(e) => write!(f, "{e}"),
            ControllerError::Protocol(e) => write!(f, "{e}"),
            ControllerError::Perturb(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ControllerError {}

impl From<GraphError> for ControllerError {
    fn from(e: GraphError) -> Self {
        ControllerError::Graph(e)
    }
}

impl From<SpectraError> for ControllerError {
    fn from(e: SpectraError) -> Self {
        ControllerError::Spectra(e)
    }
}

impl From<ProtocolError> for ControllerError {
    fn from(e: ProtocolError) -> Self {
        ControllerError::Protocol(e)
    }
}

impl From<PerturbError> for ControllerError {
    fn from(e: PerturbError) -> Self {
        ControllerError::Perturb(e)
    }
}

/// Per-edge and per-nonedge master assignments: `deletions[i]` holds the
/// edges mastered by node `i`, `additions[i]` the r-local nonedges it may
/// propose to add.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterSets {
    pub deletions: Vec<Vec<Edge>>,
    pub additions: Vec<Vec<Edge>>,
}

/// Every edge lands in exactly one deletion set (its larger endpoint's),
/// and every nonedge whose endpoints are within distance `r` lands in
/// exactly one addition set.
pub fn assign_masters(g: &Graph, r: usize) -> MasterSets {
    let n = g.node_count();
    let mut deletions = vec![Vec::new(); n];
    let mut additions = vec![Vec::new(); n];
    for e in g.edges() {
        deletions[e.master().index()].push(e);
    }
    for i in g.node_ids() {
        let ball = neighborhood(g, i, r).expect("node ids are in range");
        for j in ball.iter() {
            if j < i && !g.has_edge(i, j) {
                additions[i.index()].push(Edge::new(i, j));
            }
        }
        additions[i.index()].sort_unstable();
    }
    MasterSets { deletions, additions }
}

/// Edges whose deletion safety cannot be certified from the master's local
/// view; these are escalated to the max-consensus verification.
pub fn critical_edges(g: &Graph, r: usize, rule: SafetyRule) -> Vec<Edge> {
    let mut out = Vec::new();
    for e in g.edges() {
        let m = e.master();
        let p = e.partner();
        let ball = neighborhood(g, m, r).expect("endpoint in range");
        let locally_safe = match rule {
            SafetyRule::NeighborIntersection => {
                // Partner's neighbors inside the master's ball; the master
                // itself is always one of them.
                g.neighbors(p).iter().filter(|&&w| ball.contains(w)).count() > 1
            }
            SafetyRule::SubgraphReachability => {
                reachable_in_ball_without_edge(g, &ball, m, p)
            }
        };
        if !locally_safe {
            out.push(e);
        }
    }
    out
}

/// BFS from `from` to `to` inside `ball`, never crossing the (from, to)
/// edge itself.
fn reachable_in_ball_without_edge(g: &Graph, ball: &NodeSet, from: NodeId, to: NodeId) -> bool {
    let mut seen = vec![false; g.node_count()];
    seen[from.index()] = true;
    let mut queue = alloc::collections::VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if (v == from && w == to) || (v == to && w == from) {
                continue;
            }
            if !seen[w.index()] && ball.contains(w) {
                if w == to {
                    return true;
                }
                seen[w.index()] = true;
                queue.push_back(w);
            }
        }
    }
    false
}

/// The myopic view and shared state of one agent.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub id: NodeId,
    /// The node's r-ball in the current graph.
    pub ball: NodeSet,
    /// Local copy of the network's moment vector, length `2r + 1`.
    pub moments: MomentVector,
    /// Local copy of the pseudodistance to the target.
    pub sd: f64,
}

/// One master's most beneficial local action: the argmin of the trial
/// pseudodistance over its addition and verified-deletion candidates, or
/// the sentinel when nothing strictly improves. Within-agent ties break by
/// a seeded draw.
pub fn best_local_action(
    g: &Graph,
    agent: &AgentState,
    additions: &[Edge],
    safe_deletions: &[Edge],
    config: &RunConfig,
    t: usize,
) -> Result<ActionRecord, ControllerError> {
    let order = config.moment_order();
    let mut best_sd = f64::INFINITY;
    let mut ties: Vec<(Edge, MomentVector)> = Vec::new();
    let candidates = additions
        .iter()
        .map(|&e| (e, EditKind::Add))
        .chain(safe_deletions.iter().map(|&e| (e, EditKind::Delete)));
    for (e, kind) in candidates {
        let delta = moment_delta(g, e, kind, config.r)?;
        let trial = agent.moments.plus(&delta.delta);
        let sd = spectral_pseudodistance(&trial, config.target.moments(), order)?;
        match sd.total_cmp(&best_sd) {
            core::cmp::Ordering::Less => {
                best_sd = sd;
                ties.clear();
                ties.push((e, trial));
            }
            core::cmp::Ordering::Equal => ties.push((e, trial)),
            core::cmp::Ordering::Greater => {}
        }
    }
    // Strict improvement only: an exactly-zero delta is rejected so the
    // trace decreases monotonically and the loop cannot two-cycle between
    // isospectral edits.
    if ties.is_empty() || best_sd - agent.sd >= 0.0 {
        return Ok(ActionRecord::sentinel(agent.id, config.sentinel, agent.moments.clone()));
    }
    let pick = if ties.len() == 1 {
        0
    } else {
        let mut rng =
            SimRng::from_seed(derive_seed(config.seed, t as u64, agent.id.index() as u64));
        rng.index(ties.len())
    };
    let (edge, moments) = ties.swap_remove(pick);
    Ok(ActionRecord { master: agent.id, partner: Some(edge.partner()), sd: best_sd, moments })
}

/// What one design round did.
#[derive(Debug, Clone, PartialEq)]
pub enum StepAction {
    Added(Edge),
    Deleted(Edge),
    /// Sentinel round: every agent reported "no beneficial action".
    Converged,
}

impl StepAction {
    pub fn edge(&self) -> Option<Edge> {
        match self {
            StepAction::Added(e) | StepAction::Deleted(e) => Some(*e),
            StepAction::Converged => None,
        }
    }

    pub fn is_edit(&self) -> bool {
        self.edge().is_some()
    }
}

/// State after one design round: the action taken, and the pseudodistance
/// and moment vector every agent now holds.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: usize,
    pub action: StepAction,
    pub sd: f64,
    pub moments: MomentVector,
}

/// The synchronous-round world: graph, agents, and round counter.
#[derive(Debug, Clone)]
pub struct World {
    graph: Graph,
    agents: Vec<AgentState>,
    config: RunConfig,
    t: usize,
    converged: bool,
    transcripts: Vec<(usize, Transcript)>,
}

impl World {
    /// Builds the round-0 world: checks connectivity, computes every
    /// agent's initial moments by distributed averaging (exact or via the
    /// consensus protocol) and its distance to the target.
    pub fn new(g0: Graph, mut config: RunConfig) -> Result<World, ControllerError> {
        if config.r == 0 {
            return Err(ControllerError::InvalidRadius);
        }
        if g0.node_count() == 0 || !is_connected(&g0) {
            return Err(ControllerError::DisconnectedInput);
        }
        let order = config.moment_order();
        if config.target.moments().order() < order {
            return Err(ControllerError::TargetOrderTooSmall {
                have: config.target.moments().order(),
                need: order,
            });
        }
        if config.max_iters == 0 {
            config.max_iters = 10 * g0.node_count();
        }

        let contribs: Result<Vec<_>, _> =
            g0.node_ids().map(|i| node_contribution(&g0, i, config.r)).collect();
        let contribs = contribs?;
        let mut transcripts = Vec::new();
        let per_agent_moments: Vec<MomentVector> = match config.consensus {
            ConsensusMode::Exact => {
                let m = aggregate_moments(&contribs)?;
                vec![m; g0.node_count()]
            }
            ConsensusMode::Protocol { tol, max_rounds } => {
                let values: Vec<Vec<f64>> = contribs.iter().map(|c| c.mu.clone()).collect();
                let mut net = if config.record_transcript {
                    SimNetwork::with_transcript(g0.clone())
                } else {
                    SimNetwork::new(g0.clone())
                };
                let run = net.average_consensus(&values, tol, max_rounds)?;
                if let Some(t) = net.take_transcript() {
                    transcripts.push((0, t));
                }
                run.values.into_iter().map(MomentVector::new).collect()
            }
        };

        let mut agents = Vec::with_capacity(g0.node_count());
        for (i, moments) in g0.node_ids().zip(per_agent_moments) {
            let ball = neighborhood(&g0, i, config.r)?;
            let sd = spectral_pseudodistance(&moments, config.target.moments(), order)?;
            agents.push(AgentState { id: i, ball, moments, sd });
        }
        Ok(World { graph: g0, agents, config, t: 0, converged: false, transcripts })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn agents(&self) -> &[AgentState] {
        &self.agents
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn take_transcripts(&mut self) -> Vec<(usize, Transcript)> {
        core::mem::take(&mut self.transcripts)
    }

    /// One full round: critical-edge escalation, deletion verification,
    /// per-master local argmin, global election, and — when a strictly
    /// improving action exists — the single edit plus state adoption.
    pub fn design_step(&mut self) -> Result<TraceRow, ControllerError> {
        if self.converged {
            return Ok(TraceRow {
                t: self.t,
                action: StepAction::Converged,
                sd: self.agents[0].sd,
                moments: self.agents[0].moments.clone(),
            });
        }

        let masters = assign_masters(&self.graph, self.config.r);
        let critical = critical_edges(&self.graph, self.config.r, self.config.safety_rule);
        let mut net = if self.config.record_transcript {
            SimNetwork::with_transcript(self.graph.clone())
        } else {
            SimNetwork::new(self.graph.clone())
        };
        let check = net.verify_deletions(&critical);

        let mut records = Vec::with_capacity(self.agents.len());
        for agent in &self.agents {
            let i = agent.id.index();
            // Deletable: locally certified safe plus protocol-verified.
            let mut safe: Vec<Edge> = masters.deletions[i]
                .iter()
                .copied()
                .filter(|e| critical.binary_search(e).is_err())
                .chain(check.safe_by_master[i].iter().copied())
                .collect();
            safe.sort_unstable();
            records.push(best_local_action(
                &self.graph,
                agent,
                &masters.additions[i],
                &safe,
                &self.config,
                self.t,
            )?);
        }

        let outcome = net.elect_global_action(&records);
        debug_assert!(outcome.unanimous(), "election must agree at every node");
        let winner = outcome.winner().clone();
        if let Some(t) = net.take_transcript() {
            self.transcripts.push((self.t, t));
        }

        if winner.sd >= self.config.sentinel {
            self.converged = true;
            return Ok(TraceRow {
                t: self.t,
                action: StepAction::Converged,
                sd: self.agents[0].sd,
                moments: self.agents[0].moments.clone(),
            });
        }

        let edge = winner.edge().expect("non-sentinel record carries a partner");
        let (action, edited) = if self.graph.has_edge(edge.master(), edge.partner()) {
            (StepAction::Deleted(edge), self.graph.remove_edge(edge)?)
        } else {
            (StepAction::Added(edge), self.graph.add_edge(edge)?)
        };
        if !is_connected(&edited) {
            return Err(ControllerError::Disconnected { t: self.t });
        }
        self.graph = edited;
        for agent in &mut self.agents {
            agent.moments = winner.moments.clone();
            agent.sd = winner.sd;
            agent.ball = neighborhood(&self.graph, agent.id, self.config.r)?;
        }
        let row = TraceRow { t: self.t, action, sd: winner.sd, moments: winner.moments };
        self.t += 1;
        Ok(row)
    }
}

/// Everything a finished run produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub graph: Graph,
    pub trace: Vec<TraceRow>,
    pub converged: bool,
    pub initial_sd: f64,
    pub final_sd: f64,
    pub final_moments: MomentVector,
    pub transcripts: Vec<(usize, Transcript)>,
}

/// Iterates design rounds until the sentinel or the iteration cap. Edits
/// appear in the trace; the terminal sentinel round does not.
pub fn run_design(g0: Graph, config: RunConfig) -> Result<RunOutcome, ControllerError> {
    let mut world = World::new(g0, config)?;
    let initial_sd = world.agents[0].sd;
    let max_iters = world.config.max_iters;
    let mut trace = Vec::new();
    while !world.converged && trace.len() < max_iters {
        let row = world.design_step()?;
        if row.action.is_edit() {
            trace.push(row);
        }
    }
    Ok(RunOutcome {
        converged: world.converged,
        initial_sd,
        final_sd: world.agents[0].sd,
        final_moments: world.agents[0].moments.clone(),
        transcripts: core::mem::take(&mut world.transcripts),
        trace,
        graph: world.graph,
    })
}
