//! Round-synchronous parallel substrate.
//!
//! An [`Engine`] owns a thread pool and exposes the primitives every solver
//! round is made of: level-synchronous BFS relabeling over the residual
//! graph, active-vertex detection, worklist compaction and per-vertex kernel
//! launches. Phases never overlap: each primitive joins all its executors
//! before returning, which is the barrier the kernels rely on.

use std::sync::atomic::{AtomicI64, AtomicU32, Ordering::Relaxed};

use rayon::prelude::*;

use crate::graph::BiCsrGraph;

/// How kernel launches pick their vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    /// Apply the operator to every vertex; inactive ones no-op.
    TopologyDriven,
    /// Compact the active vertices into a worklist first.
    DataDriven,
}

impl std::fmt::Display for Schedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Schedule::TopologyDriven => write!(f, "topology"),
            Schedule::DataDriven => write!(f, "data"),
        }
    }
}

/// Dense list of vertex ids produced by parallel compaction. Order is
/// unspecified; contents are exactly the qualifying set.
#[derive(Debug, Clone, Default)]
pub struct Worklist {
    pub items: Vec<u32>,
}

impl Worklist {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Per-solve options shared by all solvers.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub schedule: Schedule,
    /// Pushes/relabels a kernel may perform per vertex between global
    /// relabels. `None` selects the graph's average-degree heuristic.
    pub kernel_cycles: Option<u32>,
    /// Run the instrumented invariant checks at every round boundary.
    /// Violations panic; meant for tests and debugging.
    pub audit: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            schedule: Schedule::DataDriven,
            kernel_cycles: None,
            audit: false,
        }
    }
}

impl SolveOptions {
    pub fn with_schedule(schedule: Schedule) -> Self {
        SolveOptions {
            schedule,
            ..Default::default()
        }
    }

    pub(crate) fn cycles_for(&self, graph: &BiCsrGraph) -> u32 {
        self.kernel_cycles
            .unwrap_or_else(|| graph.default_kernel_cycles())
            .max(1)
    }
}

/// Thread-pool wrapper all parallel phases run on.
#[derive(Debug)]
pub struct Engine {
    pool: rayon::ThreadPool,
    threads: usize,
}

impl Engine {
    /// Engine over all available hardware parallelism.
    pub fn new() -> Self {
        Self::with_threads(
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
        )
    }

    /// Engine with an explicit executor count (1 gives the sequential
    /// debugging mode; results must not depend on this number).
    pub fn with_threads(threads: usize) -> Self {
        let threads = threads.max(1);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool construction");
        Engine { pool, threads }
    }

    pub fn thread_count(&self) -> usize {
        self.threads
    }

    pub(crate) fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.pool.install(f)
    }

    /// Launch `op` on every vertex in parallel.
    pub(crate) fn for_each_vertex(&self, vertex_count: usize, op: impl Fn(u32) + Sync + Send) {
        self.install(|| (0..vertex_count as u32).into_par_iter().for_each(op));
    }

    /// Launch `op` on the members of a worklist in parallel.
    pub(crate) fn for_each_in(&self, worklist: &Worklist, op: impl Fn(u32) + Sync) {
        self.install(|| worklist.items.par_iter().for_each(|&u| op(u)));
    }

    /// Compact the vertices satisfying `predicate` into a worklist.
    ///
    /// The result contains each qualifying vertex exactly once, in an
    /// unspecified order.
    pub fn compact_active(
        &self,
        vertex_count: usize,
        predicate: impl Fn(u32) -> bool + Sync,
    ) -> Worklist {
        let items = self.install(|| {
            (0..vertex_count as u32)
                .into_par_iter()
                .filter(|&u| predicate(u))
                .collect()
        });
        Worklist { items }
    }

    /// Parallel reduction: does any vertex satisfy the predicate? Termination
    /// checks run through this so no per-vertex data leaves the parallel
    /// domain.
    pub fn any_active(
        &self,
        vertex_count: usize,
        predicate: impl Fn(u32) -> bool + Sync + Send,
    ) -> bool {
        self.install(|| (0..vertex_count as u32).into_par_iter().any(predicate))
    }

    /// One kernel phase: apply `op` to the active set under the given
    /// schedule. Topology-driven launches every vertex and relies on the
    /// operator's own activity guard; data-driven compacts `active` first.
    /// Either way the phase is complete when this returns.
    pub fn run_kernel(
        &self,
        schedule: Schedule,
        vertex_count: usize,
        active: impl Fn(u32) -> bool + Sync,
        op: impl Fn(u32) + Sync + Send,
    ) {
        match schedule {
            Schedule::TopologyDriven => self.for_each_vertex(vertex_count, op),
            Schedule::DataDriven => {
                let worklist = self.compact_active(vertex_count, active);
                self.for_each_in(&worklist, op);
            }
        }
    }

    /// Level-synchronous backward BFS over the residual graph.
    ///
    /// Callers pre-set root heights to 0 and everything else to
    /// `vertex_count`. Afterwards `heights[u]` is the length of the shortest
    /// residual path from `u` to any root (an edge `(u, v)` with positive
    /// residual steps from `v`'s level to `u` at level + 1); unreachable
    /// vertices keep `vertex_count`. `allow` restricts the traversal to a
    /// vertex region.
    pub fn bfs_backward(
        &self,
        graph: &BiCsrGraph,
        residual: &[AtomicI64],
        heights: &[AtomicU32],
        allow: impl Fn(u32) -> bool + Sync,
    ) {
        self.bfs(graph, residual, heights, &allow, Direction::Backward);
    }

    /// Level-synchronous forward BFS: `heights[v]` becomes the shortest
    /// residual path length from any root to `v`, following residual edges in
    /// their own direction.
    pub fn bfs_forward(
        &self,
        graph: &BiCsrGraph,
        residual: &[AtomicI64],
        heights: &[AtomicU32],
        allow: impl Fn(u32) -> bool + Sync,
    ) {
        self.bfs(graph, residual, heights, &allow, Direction::Forward);
    }

    fn bfs(
        &self,
        graph: &BiCsrGraph,
        residual: &[AtomicI64],
        heights: &[AtomicU32],
        allow: &(impl Fn(u32) -> bool + Sync),
        direction: Direction,
    ) {
        let n = graph.vertex_count();
        let unreached = n as u32;
        self.install(|| {
            let mut frontier: Vec<u32> = (0..n as u32)
                .into_par_iter()
                .filter(|&u| allow(u) && heights[u as usize].load(Relaxed) == 0)
                .collect();
            let mut level = 0u32;
            while !frontier.is_empty() {
                level += 1;
                frontier = frontier
                    .par_iter()
                    .fold(Vec::new, |mut next, &v| {
                        let mut claim = |u: u32| {
                            if allow(u)
                                && heights[u as usize]
                                    .compare_exchange(unreached, level, Relaxed, Relaxed)
                                    .is_ok()
                            {
                                next.push(u);
                            }
                        };
                        match direction {
                            Direction::Backward => {
                                // Edges (u, v) with residual step u onto the
                                // frontier one level above v.
                                for &slot in graph.in_slots(v) {
                                    if residual[slot as usize].load(Relaxed) > 0 {
                                        claim(graph.slot_owner(slot));
                                    }
                                }
                            }
                            Direction::Forward => {
                                for slot in graph.out_slots(v) {
                                    if residual[slot as usize].load(Relaxed) > 0 {
                                        claim(graph.target(slot));
                                    }
                                }
                            }
                        }
                        next
                    })
                    .reduce(Vec::new, |mut a, mut b| {
                        a.append(&mut b);
                        a
                    });
            }
        });
    }
}

impl Default for Engine {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Clone, Copy)]
enum Direction {
    Backward,
    Forward,
}
