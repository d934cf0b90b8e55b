//! Simple undirected graphs as sorted adjacency sets, `r`-ball
//! neighborhoods, induced subgraphs, and centralized connectivity oracles.
//!
//! Graph values are immutable snapshots: edits return new values, so a
//! round's graph can be shared read-only across agents.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Index of a node, unique within a graph, `0..n`.
///
/// The total order on indices is what every master-node tie-break in the
/// design loop relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(index: usize) -> Self {
        NodeId(index as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An unordered node pair stored canonically with the larger index first.
///
/// The larger endpoint is the edge's *master*: the only agent authorized to
/// decide an edit on this pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    hi: NodeId,
    lo: NodeId,
}

impl Edge {
    /// Canonicalizes the pair; panics on a self-loop.
    pub fn new(a: NodeId, b: NodeId) -> Self {
        Self::try_new(a, b).expect("self-loop is not a valid edge")
    }

    pub fn try_new(a: NodeId, b: NodeId) -> Option<Self> {
        match a.cmp(&b) {
            core::cmp::Ordering::Greater => Some(Edge { hi: a, lo: b }),
            core::cmp::Ordering::Less => Some(Edge { hi: b, lo: a }),
            core::cmp::Ordering::Equal => None,
        }
    }

    /// The larger endpoint, which masters this pair.
    pub fn master(self) -> NodeId {
        self.hi
    }

    /// The smaller endpoint.
    pub fn partner(self) -> NodeId {
        self.lo
    }

    pub fn endpoints(self) -> (NodeId, NodeId) {
        (self.hi, self.lo)
    }

    pub fn touches(self, v: NodeId) -> bool {
        self.hi == v || self.lo == v
    }

    /// The endpoint opposite `v`; `None` if `v` is not an endpoint.
    pub fn other(self, v: NodeId) -> Option<NodeId> {
        if v == self.hi {
            Some(self.lo)
        } else if v == self.lo {
            Some(self.hi)
        } else {
            None
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.hi, self.lo)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    InvalidNode { node: NodeId, node_count: usize },
    EdgePresent(Edge),
    EdgeAbsent(Edge),
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::InvalidNode { node, node_count } => {
                write!(f, "node {node} out of range for graph on {node_count} nodes")
            }
            GraphError::EdgePresent(e) => write!(f, "edge {e} already present"),
            GraphError::EdgeAbsent(e) => write!(f, "edge {e} not present"),
        }
    }
}

impl core::error::Error for GraphError {}

/// Read-only adjacency access.
///
/// The locality-sensitive operations (`neighborhood`, the local Laplacian
/// builders, `moment_delta`) are generic over this trait so tests can wrap a
/// graph in an access-recording view and check which adjacency lists were
/// actually touched.
pub trait GraphView {
    fn node_count(&self) -> usize;

    /// Sorted neighbor list of `v`.
    fn neighbors(&self, v: NodeId) -> &[NodeId];

    fn degree(&self, v: NodeId) -> usize {
        self.neighbors(v).len()
    }

    fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }
}

/// Simple undirected graph: no self-loops, no multi-edges, unweighted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n);
        for e in edges {
            g.insert_edge(e)?;
        }
        Ok(g)
    }

    fn check_node(&self, v: NodeId) -> Result<(), GraphError> {
        if v.index() < self.adj.len() {
            Ok(())
        } else {
            Err(GraphError::InvalidNode { node: v, node_count: self.adj.len() })
        }
    }

    fn insert_edge(&mut self, e: Edge) -> Result<(), GraphError> {
        self.check_node(e.master())?;
        self.check_node(e.partner())?;
        let (a, b) = e.endpoints();
        match self.adj[a.index()].binary_search(&b) {
            Ok(_) => return Err(GraphError::EdgePresent(e)),
            Err(pos) => self.adj[a.index()].insert(pos, b),
        }
        let pos = self.adj[b.index()].binary_search(&a).unwrap_err();
        self.adj[b.index()].insert(pos, a);
        Ok(())
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.adj.len()).map(NodeId::new)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    /// All edges in canonical `(master, partner)` order, sorted.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj.iter().enumerate().flat_map(|(i, nbrs)| {
            let i = NodeId::new(i);
            nbrs.iter().take_while(move |&&j| j < i).map(move |&j| Edge::new(i, j))
        })
    }

    /// Returns the graph with `e` added; the edit distance to `self` is 1.
    pub fn add_edge(&self, e: Edge) -> Result<Graph, GraphError> {
        let mut g = self.clone();
        g.insert_edge(e)?;
        Ok(g)
    }

    /// Returns the graph with `e` removed; the edit distance to `self` is 1.
    pub fn remove_edge(&self, e: Edge) -> Result<Graph, GraphError> {
        self.check_node(e.master())?;
        self.check_node(e.partner())?;
        let (a, b) = e.endpoints();
        let mut g = self.clone();
        match g.adj[a.index()].binary_search(&b) {
            Ok(pos) => {
                g.adj[a.index()].remove(pos);
            }
            Err(_) => return Err(GraphError::EdgeAbsent(e)),
        }
        let pos = g.adj[b.index()].binary_search(&a).unwrap();
        g.adj[b.index()].remove(pos);
        Ok(g)
    }
}

impl GraphView for Graph {
    fn node_count(&self) -> usize {
        self.adj.len()
    }

    fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v.index()]
    }
}

/// An ordered, duplicate-free list of nodes with a positional index map.
///
/// When built from a neighborhood, position 0 holds the anchor node and the
/// remaining nodes are sorted; a plain sorted set has no anchor semantics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSet {
    nodes: Vec<NodeId>,
    // (node, position), sorted by node for binary-search lookups.
    index: Vec<(NodeId, usize)>,
}

impl NodeSet {
    fn build_index(nodes: &[NodeId]) -> Vec<(NodeId, usize)> {
        let mut index: Vec<(NodeId, usize)> =
            nodes.iter().enumerate().map(|(p, &v)| (v, p)).collect();
        index.sort_unstable();
        index
    }

    /// Anchor-first ordering: `anchor` at position 0, the rest sorted.
    pub fn from_anchor(anchor: NodeId, others: impl IntoIterator<Item = NodeId>) -> Self {
        let mut rest: Vec<NodeId> = others.into_iter().filter(|&v| v != anchor).collect();
        rest.sort_unstable();
        rest.dedup();
        let mut nodes = Vec::with_capacity(rest.len() + 1);
        nodes.push(anchor);
        nodes.extend(rest);
        let index = Self::build_index(&nodes);
        NodeSet { nodes, index }
    }

    /// Fully sorted set with no anchor.
    pub fn from_nodes(nodes: impl IntoIterator<Item = NodeId>) -> Self {
        let mut nodes: Vec<NodeId> = nodes.into_iter().collect();
        nodes.sort_unstable();
        nodes.dedup();
        let index = Self::build_index(&nodes);
        NodeSet { nodes, index }
    }

    /// Sorted union of the members of `self` and `other`.
    pub fn union(&self, other: &NodeSet) -> NodeSet {
        NodeSet::from_nodes(self.nodes.iter().chain(other.nodes.iter()).copied())
    }

    pub fn anchor(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().copied()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.position(v).is_some()
    }

    /// Position of `v` in the set's ordering, if present.
    pub fn position(&self, v: NodeId) -> Option<usize> {
        self.index
            .binary_search_by_key(&v, |&(node, _)| node)
            .ok()
            .map(|i| self.index[i].1)
    }
}

/// The `r`-th order neighborhood of `i`: all nodes within BFS distance `r`,
/// with `i` at position 0 and the rest sorted.
pub fn neighborhood<V: GraphView>(g: &V, i: NodeId, r: usize) -> Result<NodeSet, GraphError> {
    if i.index() >= g.node_count() {
        return Err(GraphError::InvalidNode { node: i, node_count: g.node_count() });
    }
    let mut seen = vec![false; g.node_count()];
    seen[i.index()] = true;
    let mut members = Vec::new();
    let mut queue = VecDeque::new();
    queue.push_back((i, 0usize));
    while let Some((v, d)) = queue.pop_front() {
        if d == r {
            continue;
        }
        for &w in g.neighbors(v) {
            if !seen[w.index()] {
                seen[w.index()] = true;
                members.push(w);
                queue.push_back((w, d + 1));
            }
        }
    }
    Ok(NodeSet::from_anchor(i, members))
}

/// Induced subgraph on `s`, with nodes re-indexed by `s`'s order.
pub fn local_subgraph(g: &Graph, s: &NodeSet) -> Result<Graph, GraphError> {
    for v in s.iter() {
        if v.index() >= g.node_count() {
            return Err(GraphError::InvalidNode { node: v, node_count: g.node_count() });
        }
    }
    let mut adj = vec![Vec::new(); s.len()];
    for (p, v) in s.iter().enumerate() {
        for &w in g.neighbors(v) {
            if let Some(q) = s.position(w) {
                adj[p].push(NodeId::new(q));
            }
        }
        adj[p].sort_unstable();
    }
    Ok(Graph { adj })
}

/// BFS reachability from node 0. The empty graph counts as connected.
pub fn is_connected(g: &Graph) -> bool {
    component_count(g) <= 1
}

/// Number of connected components.
pub fn component_count(g: &Graph) -> usize {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut components = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        queue.push_back(NodeId::new(start));
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if !seen[w.index()] {
                    seen[w.index()] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    components
}

/// All bridges, via the standard DFS low-link computation. Exact ground
/// truth for the connectivity tests and the deletion-safety oracle.
pub fn bridges(g: &Graph) -> Vec<Edge> {
    let n = g.node_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![usize::MAX; n];
    let mut out = Vec::new();
    let mut timer = 0usize;
    // Iterative DFS; each frame tracks the parent and the neighbor cursor.
    let mut stack: Vec<(usize, usize, usize)> = Vec::new(); // (v, parent, next neighbor idx)
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        stack.push((root, usize::MAX, 0));
        while let Some(&mut (v, parent, ref mut idx)) = stack.last_mut() {
            let nbrs = g.neighbors(NodeId::new(v));
            if *idx < nbrs.len() {
                let w = nbrs[*idx].index();
                *idx += 1;
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, v, 0));
                } else if w != parent {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&mut (p, _, _)) = stack.last_mut() {
                    low[p] = low[p].min(low[v]);
                    if low[v] > disc[p] {
                        out.push(Edge::new(NodeId::new(p), NodeId::new(v)));
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}
