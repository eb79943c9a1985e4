//! Static max-flow from scratch.
//!
//! The solve alternates global relabeling (backward BFS from the sink over
//! the residual graph) with a bounded push/relabel kernel and an
//! invalid-edge removal kernel, until no active vertex remains. Heights are
//! capped at `|V|`: a vertex at the cap is permanently out of play for the
//! rest of the solve, and the final cap set is the source side of a min-cut.

use std::sync::atomic::Ordering::Relaxed;
use std::time::Instant;

use rayon::prelude::*;

use crate::audit::{self, SlotMarks};
use crate::engine::{Engine, Schedule, SolveOptions};
use crate::graph::BiCsrGraph;
use crate::state::{Counters, CutSide, FlowResult, FlowState, Part};

/// Reset a state to the preflow start: zero flow everywhere, zero heights,
/// then saturate every edge leaving the source.
pub fn init_preflow(engine: &Engine, graph: &BiCsrGraph, state: &FlowState) {
    let residual = state.residual_cells();
    let capacity = state.capacity_cells();
    engine.install(|| {
        residual
            .par_iter()
            .zip(capacity.par_iter())
            .for_each(|(r, c)| r.store(c.load(Relaxed), Relaxed));
    });
    let excess = state.excess_cells();
    let h_plus = state.h_plus_cells();
    let h_minus = state.h_minus_cells();
    let part = state.part_cells();
    engine.for_each_vertex(graph.vertex_count(), |u| {
        excess[u as usize].store(0, Relaxed);
        h_plus[u as usize].store(0, Relaxed);
        h_minus[u as usize].store(0, Relaxed);
        part[u as usize].store(Part::Unassigned as u8, Relaxed);
    });
    saturate_source_slots(engine, graph, state);
}

/// Move all remaining residual on the source's out-slots to their reverse
/// slots, crediting the receiving vertices. On a fresh state this is the
/// classic preflow initialization; on an updated state it re-saturates only
/// what the updates freed up.
pub(crate) fn saturate_source_slots(engine: &Engine, graph: &BiCsrGraph, state: &FlowState) {
    let s = graph.source();
    let residual = state.residual_cells();
    let excess = state.excess_cells();
    let slots = graph.out_slots(s);
    engine.install(|| {
        (slots.start..slots.end).into_par_iter().for_each(|slot| {
            let moved = residual[slot as usize].swap(0, Relaxed);
            if moved != 0 {
                residual[graph.reverse(slot) as usize].fetch_add(moved, Relaxed);
                excess[graph.target(slot) as usize].fetch_add(moved, Relaxed);
                excess[s as usize].fetch_sub(moved, Relaxed);
            }
        });
    });
}

/// Push/relabel operator for one vertex, bounded by `kernel_cycles`.
///
/// While active (positive excess, height below `|V|`), the vertex scans its
/// residual out-slots for the lowest neighbor (ties to the smallest slot id,
/// heights read live) and either pushes `min(excess, residual)` toward it or
/// lifts itself one above it. A vertex with no residual out-edge lifts
/// straight to `|V|`.
pub(crate) fn push_relabel_vertex(
    graph: &BiCsrGraph,
    state: &FlowState,
    u: u32,
    kernel_cycles: u32,
    counters: &Counters,
    allow: impl Fn(u32) -> bool,
    marks: Option<(&SlotMarks, u8)>,
) {
    let n = graph.vertex_count() as u32;
    if u == graph.source() || u == graph.sink() || !allow(u) {
        return;
    }
    let residual = state.residual_cells();
    let excess = state.excess_cells();
    let heights = state.h_plus_cells();
    for _ in 0..kernel_cycles {
        if heights[u as usize].load(Relaxed) >= n {
            break;
        }
        let e = excess[u as usize].load(Relaxed);
        if e <= 0 {
            // May become active later in the phase through a neighbor's push.
            continue;
        }
        let mut best = None;
        let mut best_height = u32::MAX;
        for slot in graph.out_slots(u) {
            if residual[slot as usize].load(Relaxed) > 0 {
                let v = graph.target(slot);
                if allow(v) {
                    let hv = heights[v as usize].load(Relaxed);
                    if hv < best_height {
                        best_height = hv;
                        best = Some(slot);
                    }
                }
            }
        }
        let Some(slot) = best else {
            heights[u as usize].store(n, Relaxed);
            counters.relabels.fetch_add(1, Relaxed);
            break;
        };
        if heights[u as usize].load(Relaxed) > best_height {
            let v = graph.target(slot);
            let rev = graph.reverse(slot);
            // Only this executor subtracts from u's out-slots and u's excess,
            // so both reads are safe lower bounds.
            let d = e.min(residual[slot as usize].load(Relaxed));
            let before = residual[slot as usize].fetch_sub(d, Relaxed);
            residual[rev as usize].fetch_add(d, Relaxed);
            excess[u as usize].fetch_sub(d, Relaxed);
            excess[v as usize].fetch_add(d, Relaxed);
            if let Some((m, track)) = marks {
                m.mark(slot, track);
                m.mark(rev, track);
            }
            counters.pushes.fetch_add(1, Relaxed);
            if before == d {
                counters.saturating_pushes.fetch_add(1, Relaxed);
            }
        } else {
            let lifted = (best_height + 1).min(n);
            heights[u as usize].store(lifted, Relaxed);
            counters.relabels.fetch_add(1, Relaxed);
            if lifted >= n {
                break;
            }
        }
    }
}

/// Saturate every steep residual out-slot of `u`: edges `(u, v)` with
/// `h+(u) > h+(v) + 1` move their full residual to the reverse slot and the
/// matching amount of excess from `u` to `v`. Runs after a push phase with
/// heights frozen.
pub(crate) fn remove_invalid_edges_vertex(
    graph: &BiCsrGraph,
    state: &FlowState,
    u: u32,
    counters: &Counters,
    allow: impl Fn(u32) -> bool,
    marks: Option<(&SlotMarks, u8)>,
) {
    if !allow(u) {
        return;
    }
    let residual = state.residual_cells();
    let excess = state.excess_cells();
    let heights = state.h_plus_cells();
    let hu = heights[u as usize].load(Relaxed);
    if hu <= 1 {
        return; // cannot be steeper than any height >= 0
    }
    for slot in graph.out_slots(u) {
        let v = graph.target(slot);
        if !allow(v) {
            continue;
        }
        let hv = heights[v as usize].load(Relaxed);
        if hu > hv + 1 && residual[slot as usize].load(Relaxed) > 0 {
            let amount = residual[slot as usize].swap(0, Relaxed);
            debug_assert!(amount >= 0);
            if amount > 0 {
                let rev = graph.reverse(slot);
                residual[rev as usize].fetch_add(amount, Relaxed);
                excess[u as usize].fetch_sub(amount, Relaxed);
                excess[v as usize].fetch_add(amount, Relaxed);
                if let Some((m, track)) = marks {
                    m.mark(slot, track);
                    m.mark(rev, track);
                }
                counters.invalid_edges_removed.fetch_add(1, Relaxed);
            }
        }
    }
}

/// The round loop shared by the static and dynamic push-relabel solvers:
/// reset heights per `is_root`, global-relabel by backward BFS, then (while
/// any vertex is active) run the push kernel and the removal kernel.
///
/// `is_root` is re-evaluated against live excess at every reset, which is how
/// deficient vertices act as auxiliary sinks in the dynamic solves. `allow`
/// restricts everything — resets, BFS, kernels and neighbor scans — to a
/// vertex region. Returns the number of kernel rounds executed.
#[allow(clippy::too_many_arguments)]
pub(crate) fn push_relabel_rounds(
    engine: &Engine,
    graph: &BiCsrGraph,
    state: &FlowState,
    schedule: Schedule,
    kernel_cycles: u32,
    counters: &Counters,
    audit_on: bool,
    is_root: impl Fn(u32) -> bool + Sync,
    allow: impl Fn(u32) -> bool + Sync + Copy,
) -> u64 {
    let n = graph.vertex_count();
    let nn = n as u32;
    let s = graph.source();
    let t = graph.sink();
    let heights = state.h_plus_cells();
    let excess = state.excess_cells();
    let mut prev_heights = vec![0u32; n];
    let mut rounds = 0u64;
    loop {
        for (u, h) in prev_heights.iter_mut().enumerate() {
            *h = heights[u].load(Relaxed);
        }
        engine.for_each_vertex(n, |u| {
            if allow(u) {
                let h = if is_root(u) { 0 } else { nn };
                heights[u as usize].store(h, Relaxed);
            }
        });
        engine.bfs_backward(graph, state.residual_cells(), heights, allow);
        let raises = engine.install(|| {
            prev_heights
                .par_iter()
                .enumerate()
                .filter(|&(u, &prev)| allow(u as u32) && heights[u].load(Relaxed) > prev)
                .count() as u64
        });
        counters.bfs_relabels.fetch_add(raises, Relaxed);
        if audit_on {
            audit::assert_monotone(
                &prev_heights,
                &state.h_plus_snapshot(),
                allow,
                "global relabel",
            );
        }

        let active = |u: u32| {
            allow(u)
                && u != s
                && u != t
                && excess[u as usize].load(Relaxed) > 0
                && heights[u as usize].load(Relaxed) < nn
        };
        if !engine.any_active(n, active) {
            break;
        }
        rounds += 1;

        match schedule {
            Schedule::TopologyDriven => {
                engine.for_each_vertex(n, |u| {
                    push_relabel_vertex(graph, state, u, kernel_cycles, counters, allow, None)
                });
                engine.for_each_vertex(n, |u| {
                    remove_invalid_edges_vertex(graph, state, u, counters, allow, None)
                });
            }
            Schedule::DataDriven => {
                // The removal kernel reuses the push worklist: only vertices
                // relabeled in this phase can own steep edges.
                let worklist = engine.compact_active(n, active);
                engine.for_each_in(&worklist, |u| {
                    push_relabel_vertex(graph, state, u, kernel_cycles, counters, allow, None)
                });
                engine.for_each_in(&worklist, |u| {
                    remove_invalid_edges_vertex(graph, state, u, counters, allow, None)
                });
            }
        }

        if audit_on {
            audit::assert_state_sound(graph, state, "push round");
            audit::assert_no_steep_plus(graph, state, allow, "push round");
            audit::assert_height_distance_bound(graph, state, &is_root, allow, "push round");
        }
    }
    rounds
}

/// Compute max-flow and min-cut from scratch.
///
/// Returns the flow value (`e(t)` at termination), the min-cut labeling
/// (`S = {h+ = |V|}`) and the work counters.
pub fn solve_static(
    engine: &Engine,
    graph: &BiCsrGraph,
    state: &mut FlowState,
    options: &SolveOptions,
) -> FlowResult {
    let start = Instant::now();
    let state: &FlowState = state;
    let counters = Counters::default();
    init_preflow(engine, graph, state);
    if options.audit {
        audit::assert_state_sound(graph, state, "init preflow");
    }
    let t = graph.sink();
    let rounds = push_relabel_rounds(
        engine,
        graph,
        state,
        options.schedule,
        options.cycles_for(graph),
        &counters,
        options.audit,
        |u| u == t,
        |_| true,
    );
    let nn = graph.vertex_count() as u32;
    let flow_value = state.excess(t);
    let cut_side = (0..nn)
        .map(|u| {
            if state.h_plus(u) >= nn {
                CutSide::S
            } else {
                CutSide::T
            }
        })
        .collect();
    FlowResult {
        flow_value,
        cut_side,
        stats: counters.to_stats(rounds, start.elapsed()),
    }
}
