//! Exact effect of a single edge edit on the first `2r + 1` spectral
//! moments, computed from the union of the endpoints' `r`-balls.
//!
//! Closed walks short enough to be counted by those moments cannot both
//! touch an endpoint and escape the union, so the trace difference of the
//! two union submatrices is the whole story — an identity, not an
//! approximation.

use alloc::vec::Vec;
use core::fmt;

use crate::graph::{neighborhood, Edge, GraphError, GraphView};
use crate::spectra::{local_laplacian, EigenDecomposition};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditKind {
    Add,
    Delete,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PerturbError {
    EdgePresent(Edge),
    EdgeAbsent(Edge),
    /// An addition whose endpoints are farther apart than the view radius.
    NotLocal { edge: Edge, radius: usize },
    Graph(GraphError),
}

impl fmt::Display for PerturbError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PerturbError::EdgePresent(e) => write!(f, "cannot add {e}: already present"),
            PerturbError::EdgeAbsent(e) => write!(f, "cannot delete {e}: not present"),
            PerturbError::NotLocal { edge, radius } => {
                write!(f, "cannot add {edge}: endpoints not within view radius {radius}")
            }
            PerturbError::Graph(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PerturbError {}

impl From<GraphError> for PerturbError {
    fn from(e: GraphError) -> Self {
        PerturbError::Graph(e)
    }
}

/// The moment increments `delta[k-1] = m_k(G +/- e) - m_k(G)` for
/// `k = 1..=2r+1`, along with the size of the union index set they were
/// computed on.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeEditDelta {
    pub edge: Edge,
    pub kind: EditKind,
    pub delta: Vec<f64>,
    pub union_size: usize,
}

/// Computes the exact moment increments of a single edge edit without
/// touching any adjacency outside the union of the endpoints' `r`-balls.
pub fn moment_delta<V: GraphView>(
    g: &V,
    e: Edge,
    kind: EditKind,
    r: usize,
) -> Result<EdgeEditDelta, PerturbError> {
    let (i, j) = e.endpoints();
    let ball_i = neighborhood(g, i, r)?;
    let present = g.has_edge(i, j);
    match kind {
        EditKind::Add => {
            if present {
                return Err(PerturbError::EdgePresent(e));
            }
            if !ball_i.contains(j) {
                return Err(PerturbError::NotLocal { edge: e, radius: r });
            }
        }
        EditKind::Delete => {
            if !present {
                return Err(PerturbError::EdgeAbsent(e));
            }
        }
    }
    let ball_j = neighborhood(g, j, r)?;
    let union = ball_i.union(&ball_j);
    let pi = union.position(i).expect("endpoint is in its own ball");
    let pj = union.position(j).expect("endpoint is in its own ball");

    let base = local_laplacian(g, &union);
    // The edited submatrix differs in exactly four entries.
    let mut edited = base.clone();
    let sign = match kind {
        EditKind::Add => 1.0,
        EditKind::Delete => -1.0,
    };
    edited.add_sym(pi, pi, sign);
    edited.add_sym(pj, pj, sign);
    edited.add_sym(pi, pj, -sign);

    let order = 2 * r + 1;
    let n = g.node_count() as f64;
    let base_traces = base.power_traces(order);
    let edited_traces = edited.power_traces(order);
    let delta = edited_traces
        .into_iter()
        .zip(base_traces)
        .map(|(after, before)| (after - before) / n)
        .collect();
    Ok(EdgeEditDelta { edge: e, kind, delta, union_size: union.len() })
}

/// First-order eigenvalue shifts `(v_{k,i} - v_{k,j})^2` for adding edge
/// `(i, j)`: the classical perturbation baseline. Diagnostic only — the
/// design loop never calls this.
pub fn first_order_eig_shift(eig: &EigenDecomposition, e: Edge) -> Vec<f64> {
    let (i, j) = e.endpoints();
    (0..eig.dim())
        .map(|k| {
            let v = eig.eigenvector(k);
            let d = v[i.index()] - v[j.index()];
            d * d
        })
        .collect()
}
