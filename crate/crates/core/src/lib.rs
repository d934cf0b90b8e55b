//! Multi-agent spectral network design.
//!
//! A group of `n` agents, each seeing only an `r`-ball of the communication
//! graph, iteratively adds and deletes edges to drive the Laplacian
//! eigenvalue spectrum toward a target. The core pieces are:
//!
//! - [`graph`]: simple undirected graphs, `r`-ball neighborhoods, and the
//!   centralized connectivity oracles used by tests and the safety rules.
//! - [`matrix`] / [`spectra`]: dense symmetric linear algebra, a Jacobi
//!   eigensolver, Laplacian spectral moments, and moment-space distances.
//! - [`local_moments`]: per-node moment contributions from myopic views and
//!   their aggregation into exact global moments.
//! - [`perturbation`]: the exact effect of a single edge edit on the first
//!   `2r+1` moments, computed from the union of the endpoints' `r`-balls.
//! - [`protocols`]: synchronous-round message passing — distributed
//!   averaging, max-consensus connectivity verification, and min-consensus
//!   action election.
//! - [`controller`]: the greedy design loop tying the above together.
//! - [`generators`]: seeded benchmark topologies.
//!
//! The crate is `no_std`-compatible (requires `alloc`); all IO, file
//! formats, and the CLI live in the companion `specnet-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod controller;
pub mod generators;
pub mod graph;
pub mod local_moments;
pub mod matrix;
pub mod perturbation;
pub mod protocols;
pub mod spectra;

mod num;
mod rng;

pub use controller::{
    assign_masters, critical_edges, run_design, AgentState, ConsensusMode, ControllerError,
    MasterSets, RunConfig, RunOutcome, SafetyRule, StepAction, TraceRow, World,
};
pub use generators::{
    barabasi_albert, chain, erdos_renyi_connected, ring, star, two_star, watts_strogatz, GenError,
    GenSpec,
};
pub use graph::{
    bridges, component_count, is_connected, local_subgraph, neighborhood, Edge, Graph, GraphError,
    GraphView, NodeId, NodeSet,
};
pub use local_moments::{aggregate_moments, node_contribution, NodeContribution};
pub use matrix::DenseSymMatrix;
pub use perturbation::{first_order_eig_shift, moment_delta, EdgeEditDelta, EditKind, PerturbError};
pub use protocols::{
    ActionRecord, ConsensusRun, DeletionCheck, ElectionOutcome, Payload, ProtocolError,
    ProtocolPhase, SimNetwork, Transcript, TranscriptEvent,
};
pub use spectra::{
    char_poly_from_moments, extend_moments, laplacian, local_laplacian, moments_from_spectrum,
    moments_via_trace, spectral_distance_full, spectral_pseudodistance, sym_eig, sym_eig_full,
    EigenDecomposition, MomentVector, SpectralTarget, Spectrum, SpectraError,
};
