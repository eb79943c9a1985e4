//! Mutable solver state shared across concurrent executors.
//!
//! All per-slot and per-vertex quantities live in atomic cells so that kernel
//! phases can mutate them from many executors at once. Memory ordering is
//! `Relaxed` throughout: every cell is only combined through indivisible
//! read-modify-write operations inside a phase, and phases are separated by
//! full barriers (parallel-iterator joins) which publish all prior writes.

use std::sync::atomic::{AtomicI64, AtomicU32, AtomicU8, Ordering::Relaxed};
use std::time::Duration;

use rayon::prelude::*;

use crate::engine::Engine;
use crate::graph::BiCsrGraph;

/// Partition label used by the push-pull solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Part {
    Unassigned = 0,
    S = 1,
    T = 2,
    P = 3,
    SPrime = 4,
    TPrime = 5,
}

impl Part {
    pub(crate) fn from_u8(x: u8) -> Part {
        match x {
            1 => Part::S,
            2 => Part::T,
            3 => Part::P,
            4 => Part::SPrime,
            5 => Part::TPrime,
            _ => Part::Unassigned,
        }
    }
}

/// Side of the min-cut a vertex ends up on. `S` contains the source, `T` the
/// sink.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutSide {
    S,
    T,
}

/// Work counters reported with every solve.
#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    /// Completed rounds (BFS + kernels) of the main loop(s).
    pub rounds: u64,
    /// Push operations (pulls included for the push-pull solver).
    pub pushes: u64,
    /// Pushes that zeroed their slot's residual.
    pub saturating_pushes: u64,
    /// Kernel relabels (lifts) performed by vertices.
    pub relabels: u64,
    /// Height raises applied by global relabeling (BFS), counted per vertex
    /// per round.
    pub bfs_relabels: u64,
    /// Steep residual edges saturated by the invalid-edge removal kernels.
    pub invalid_edges_removed: u64,
    pub wall_time: Duration,
}

impl SolveStats {
    /// Kernel relabels plus BFS height raises: the quantity bounded by
    /// `|V|^2` per solve.
    pub fn total_relabels(&self) -> u64 {
        self.relabels + self.bfs_relabels
    }
}

/// Atomic counter block threaded through the kernels.
#[derive(Debug, Default)]
pub(crate) struct Counters {
    pub pushes: std::sync::atomic::AtomicU64,
    pub saturating_pushes: std::sync::atomic::AtomicU64,
    pub relabels: std::sync::atomic::AtomicU64,
    pub bfs_relabels: std::sync::atomic::AtomicU64,
    pub invalid_edges_removed: std::sync::atomic::AtomicU64,
}

impl Counters {
    pub(crate) fn to_stats(&self, rounds: u64, wall_time: Duration) -> SolveStats {
        SolveStats {
            rounds,
            pushes: self.pushes.load(Relaxed),
            saturating_pushes: self.saturating_pushes.load(Relaxed),
            relabels: self.relabels.load(Relaxed),
            bfs_relabels: self.bfs_relabels.load(Relaxed),
            invalid_edges_removed: self.invalid_edges_removed.load(Relaxed),
            wall_time,
        }
    }
}

/// Max-flow value, min-cut labeling and run statistics.
#[derive(Debug, Clone)]
pub struct FlowResult {
    pub flow_value: i64,
    pub cut_side: Vec<CutSide>,
    pub stats: SolveStats,
}

impl FlowResult {
    /// Vertices on the source side of the cut.
    pub fn cut_source_side(&self) -> impl Iterator<Item = u32> + '_ {
        self.cut_side
            .iter()
            .enumerate()
            .filter(|(_, &side)| side == CutSide::S)
            .map(|(u, _)| u as u32)
    }
}

/// Mutable solver state: residuals, current capacities, excess, heights and
/// partition labels.
#[derive(Debug)]
pub struct FlowState {
    residual: Vec<AtomicI64>,
    capacity: Vec<AtomicI64>,
    excess: Vec<AtomicI64>,
    h_plus: Vec<AtomicU32>,
    h_minus: Vec<AtomicU32>,
    part: Vec<AtomicU8>,
}

fn atomic_i64(values: impl Iterator<Item = i64>) -> Vec<AtomicI64> {
    values.map(AtomicI64::new).collect()
}

impl FlowState {
    /// Fresh state for a graph: residual = capacity everywhere, zero flow.
    pub fn new(graph: &BiCsrGraph) -> Self {
        let n = graph.vertex_count();
        FlowState {
            residual: atomic_i64(graph.capacities().iter().copied()),
            capacity: atomic_i64(graph.capacities().iter().copied()),
            excess: atomic_i64(std::iter::repeat_n(0, n)),
            h_plus: (0..n).map(|_| AtomicU32::new(0)).collect(),
            h_minus: (0..n).map(|_| AtomicU32::new(0)).collect(),
            part: (0..n)
                .map(|_| AtomicU8::new(Part::Unassigned as u8))
                .collect(),
        }
    }

    /// Deep copy of the current state.
    pub fn duplicate(&self) -> Self {
        FlowState {
            residual: atomic_i64(self.residual.iter().map(|c| c.load(Relaxed))),
            capacity: atomic_i64(self.capacity.iter().map(|c| c.load(Relaxed))),
            excess: atomic_i64(self.excess.iter().map(|c| c.load(Relaxed))),
            h_plus: self
                .h_plus
                .iter()
                .map(|c| AtomicU32::new(c.load(Relaxed)))
                .collect(),
            h_minus: self
                .h_minus
                .iter()
                .map(|c| AtomicU32::new(c.load(Relaxed)))
                .collect(),
            part: self
                .part
                .iter()
                .map(|c| AtomicU8::new(c.load(Relaxed)))
                .collect(),
        }
    }

    #[inline]
    pub(crate) fn residual_cells(&self) -> &[AtomicI64] {
        &self.residual
    }

    #[inline]
    pub(crate) fn capacity_cells(&self) -> &[AtomicI64] {
        &self.capacity
    }

    #[inline]
    pub(crate) fn excess_cells(&self) -> &[AtomicI64] {
        &self.excess
    }

    #[inline]
    pub(crate) fn h_plus_cells(&self) -> &[AtomicU32] {
        &self.h_plus
    }

    #[inline]
    pub(crate) fn h_minus_cells(&self) -> &[AtomicU32] {
        &self.h_minus
    }

    #[inline]
    pub(crate) fn part_cells(&self) -> &[AtomicU8] {
        &self.part
    }

    #[inline]
    pub fn residual(&self, slot: u32) -> i64 {
        self.residual[slot as usize].load(Relaxed)
    }

    /// Current capacity of a slot (diverges from the graph's original value
    /// once batches have been applied).
    #[inline]
    pub fn current_capacity(&self, slot: u32) -> i64 {
        self.capacity[slot as usize].load(Relaxed)
    }

    #[inline]
    pub fn excess(&self, u: u32) -> i64 {
        self.excess[u as usize].load(Relaxed)
    }

    #[inline]
    pub fn h_plus(&self, u: u32) -> u32 {
        self.h_plus[u as usize].load(Relaxed)
    }

    #[inline]
    pub fn h_minus(&self, u: u32) -> u32 {
        self.h_minus[u as usize].load(Relaxed)
    }

    #[inline]
    pub fn part(&self, u: u32) -> Part {
        Part::from_u8(self.part[u as usize].load(Relaxed))
    }

    pub fn residual_snapshot(&self) -> Vec<i64> {
        self.residual.iter().map(|c| c.load(Relaxed)).collect()
    }

    pub fn capacity_snapshot(&self) -> Vec<i64> {
        self.capacity.iter().map(|c| c.load(Relaxed)).collect()
    }

    pub fn excess_snapshot(&self) -> Vec<i64> {
        self.excess.iter().map(|c| c.load(Relaxed)).collect()
    }

    pub fn h_plus_snapshot(&self) -> Vec<u32> {
        self.h_plus.iter().map(|c| c.load(Relaxed)).collect()
    }

    pub fn h_minus_snapshot(&self) -> Vec<u32> {
        self.h_minus.iter().map(|c| c.load(Relaxed)).collect()
    }

    /// Net flow across `slot` in its direction: `capacity - residual`.
    /// Negative means the pair carries net flow the other way.
    #[inline]
    pub fn net_flow(&self, slot: u32) -> i64 {
        self.current_capacity(slot) - self.residual(slot)
    }

    /// Overwrite one residual cell. Test and instrumentation hook; solvers go
    /// through the kernels.
    pub fn set_residual(&self, slot: u32, value: i64) {
        self.residual[slot as usize].store(value, Relaxed);
    }

    pub fn set_h_plus(&self, u: u32, value: u32) {
        self.h_plus[u as usize].store(value, Relaxed);
    }

    pub fn set_h_minus(&self, u: u32, value: u32) {
        self.h_minus[u as usize].store(value, Relaxed);
    }

    pub fn set_excess(&self, u: u32, value: i64) {
        self.excess[u as usize].store(value, Relaxed);
    }
}

/// Recompute every vertex's excess from residuals and current capacities:
/// `e(u)` is the net inflow summed over the slots targeting `u`. Source and
/// sink included, so the excess array always sums to zero afterwards.
pub fn recompute_excess(engine: &Engine, graph: &BiCsrGraph, state: &FlowState) {
    let excess = state.excess_cells();
    engine.install(|| {
        (0..graph.vertex_count() as u32)
            .into_par_iter()
            .for_each(|u| {
                let e: i64 = graph.in_slots(u).iter().map(|&i| state.net_flow(i)).sum();
                excess[u as usize].store(e, Relaxed);
            });
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1() -> BiCsrGraph {
        BiCsrGraph::build(
            &[(0, 1, 4), (0, 2, 2), (1, 2, 3), (1, 3, 1), (2, 3, 6)],
            4,
            0,
            3,
        )
        .unwrap()
    }

    #[test]
    fn fresh_state_mirrors_capacities() {
        let g = g1();
        let st = FlowState::new(&g);
        for slot in 0..g.slot_count() as u32 {
            assert_eq!(st.residual(slot), g.capacity(slot));
            assert_eq!(st.current_capacity(slot), g.capacity(slot));
            assert_eq!(st.net_flow(slot), 0, "untouched state carries no flow");
        }
        for u in 0..4 {
            assert_eq!(st.excess(u), 0);
            assert_eq!(st.part(u), Part::Unassigned);
        }
    }

    #[test]
    fn net_flow_saturated_edge() {
        let g = g1();
        let st = FlowState::new(&g);
        let s01 = g.slot_between(0, 1).unwrap();
        st.set_residual(s01, 0);
        assert_eq!(st.net_flow(s01), 4);
    }

    #[test]
    fn excess_recomputation_at_max_flow() {
        let g = g1();
        let st = FlowState::new(&g);
        let engine = Engine::new();

        // Zero flow: every excess recomputes to zero.
        recompute_excess(&engine, &g, &st);
        assert_eq!(st.excess_snapshot(), vec![0, 0, 0, 0]);

        // Load the max-flow assignment of G1 into the residuals.
        let flow = crate::oracle::oracle_maxflow(&g).flow;
        for slot in 0..g.slot_count() as u32 {
            let rev = g.reverse(slot);
            st.set_residual(
                slot,
                g.capacity(slot) - flow[slot as usize] + flow[rev as usize],
            );
        }
        let s23 = g.slot_between(2, 3).unwrap();
        assert_eq!(st.residual(s23), 1);
        assert_eq!(st.net_flow(s23), 5);
        assert_eq!(st.net_flow(g.reverse(s23)), -5, "antisymmetry");

        recompute_excess(&engine, &g, &st);
        assert_eq!(st.excess_snapshot(), vec![-6, 0, 0, 6]);
    }

    #[test]
    fn duplicate_is_independent() {
        let g = g1();
        let st = FlowState::new(&g);
        let copy = st.duplicate();
        st.set_excess(1, 7);
        assert_eq!(copy.excess(1), 0);
        assert_eq!(st.excess(1), 7);
    }
}
