//! Parallel dynamic max-flow/min-cut engine.
//!
//! `dynflow` computes max-flow on a capacitated directed graph with a
//! round-synchronous parallel push-relabel solver, then maintains the result
//! under batches of edge-capacity increases and decreases without
//! recomputing from scratch:
//!
//! * [`solve_static`] — max-flow and min-cut from zero state;
//! * [`apply_updates`] + [`solve_dynamic_pr`] — fold a batch into the
//!   residual graph and repair, treating deficient vertices as auxiliary
//!   sinks;
//! * [`solve_dynamic_pp`] — repair assuming the previous min-cut mostly
//!   survives, running push (sink side) and pull (source side) as concurrent
//!   pipelines with a localized correction afterwards.
//!
//! Graphs live in a bidirectional CSR ([`BiCsrGraph`]); every solver runs
//! under either a topology-driven or a worklist (data-driven) [`Schedule`]
//! on an [`Engine`] with a configurable executor count. The sequential Dinic
//! oracle ([`oracle_maxflow`]) and the certificate checks back every
//! equivalence test.
//!
//! ```
//! use dynflow::*;
//!
//! let graph = BiCsrGraph::build(
//!     &[(0, 1, 4), (0, 2, 2), (1, 2, 3), (1, 3, 1), (2, 3, 6)],
//!     4, 0, 3,
//! )?;
//! let engine = Engine::new();
//! let options = SolveOptions::default();
//!
//! let mut state = FlowState::new(&graph);
//! let result = solve_static(&engine, &graph, &mut state, &options);
//! assert_eq!(result.flow_value, 6);
//! verify_certificate(&graph, &state, &result).expect("min-cut certificate");
//!
//! // Shrink the (0,1) edge and repair instead of recomputing.
//! let batch = UpdateBatch::new(
//!     BatchKind::Decremental,
//!     vec![UpdateEntry { from: 0, to: 1, new_capacity: 2 }],
//! );
//! apply_updates(&engine, &graph, &mut state, &batch)?;
//! let repaired = solve_dynamic_pr(&engine, &graph, &mut state, &options);
//! assert_eq!(repaired.flow_value, 4);
//! # Ok::<(), dynflow::Error>(())
//! ```
//!
//! See the `examples/` directory for runnable tours of each capability.

#![forbid(unsafe_code)]

mod audit;
mod engine;
mod error;
mod graph;
mod state;

mod dynamic_pp;
mod dynamic_pr;
mod oracle;
mod static_solver;

pub mod io;
pub mod workload;

pub use engine::{Engine, Schedule, SolveOptions, Worklist};
pub use error::{Error, Result};
pub use graph::BiCsrGraph;
pub use state::{recompute_excess, CutSide, FlowResult, FlowState, Part, SolveStats};

pub use dynamic_pp::solve_dynamic_pp;
pub use dynamic_pr::{apply_updates, solve_dynamic_pr, BatchKind, UpdateBatch, UpdateEntry};
pub use oracle::{
    oracle_maxflow, verify_certificate, verify_preflow_state, CertificateError, OracleFlow,
    PreflowError,
};
pub use static_solver::{init_preflow, solve_static};
