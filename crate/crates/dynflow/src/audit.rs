//! Runtime invariant instrumentation.
//!
//! When a solve runs with `SolveOptions::audit`, these checks execute at the
//! round boundaries and panic on the first violation. They are assertions,
//! not recoverable errors: a violation means the solver state is broken.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicU8, Ordering::Relaxed};

use crate::graph::BiCsrGraph;
use crate::state::FlowState;

pub(crate) const PUSH_TRACK: u8 = 1;
pub(crate) const PULL_TRACK: u8 = 2;

/// Per-slot marks recording which pipeline touched a residual cell during the
/// current round of the push-pull solver.
pub(crate) struct SlotMarks {
    marks: Vec<AtomicU8>,
}

impl SlotMarks {
    pub(crate) fn new(slots: usize) -> Self {
        SlotMarks {
            marks: (0..slots).map(|_| AtomicU8::new(0)).collect(),
        }
    }

    #[inline]
    pub(crate) fn mark(&self, slot: u32, track: u8) {
        self.marks[slot as usize].fetch_or(track, Relaxed);
    }

    pub(crate) fn clear(&self) {
        for m in &self.marks {
            m.store(0, Relaxed);
        }
    }

    /// Panics if any slot was mutated by both the push and the pull track.
    pub(crate) fn assert_tracks_disjoint(&self) {
        for (slot, m) in self.marks.iter().enumerate() {
            let v = m.load(Relaxed);
            assert!(
                v != PUSH_TRACK | PULL_TRACK,
                "audit: slot {slot} mutated by both push and pull tracks in one round"
            );
        }
    }
}

/// Residuals non-negative, pair-sum conservation with current capacities and
/// zero total excess.
pub(crate) fn assert_state_sound(graph: &BiCsrGraph, state: &FlowState, context: &str) {
    for slot in 0..graph.slot_count() as u32 {
        let r = state.residual(slot);
        assert!(r >= 0, "audit[{context}]: slot {slot} residual {r} < 0");
        let rev = graph.reverse(slot);
        let pair = r + state.residual(rev);
        let caps = state.current_capacity(slot) + state.current_capacity(rev);
        assert_eq!(
            pair, caps,
            "audit[{context}]: pair-sum broken at slot {slot}"
        );
    }
    let total: i64 = (0..graph.vertex_count() as u32)
        .map(|u| state.excess(u))
        .sum();
    assert_eq!(total, 0, "audit[{context}]: excess sums to {total}");
}

/// After a push-removal phase no region-internal residual edge may be steep
/// downward: h+(u) <= h+(v) + 1.
pub(crate) fn assert_no_steep_plus(
    graph: &BiCsrGraph,
    state: &FlowState,
    allow: impl Fn(u32) -> bool,
    context: &str,
) {
    for u in 0..graph.vertex_count() as u32 {
        if !allow(u) {
            continue;
        }
        let hu = state.h_plus(u);
        for slot in graph.out_slots(u) {
            let v = graph.target(slot);
            if !allow(v) || state.residual(slot) <= 0 {
                continue;
            }
            let hv = state.h_plus(v);
            assert!(
                hu <= hv + 1,
                "audit[{context}]: steep h+ edge {u}(h={hu}) -> {v}(h={hv})"
            );
        }
    }
}

/// After a pull-removal phase no region-internal residual edge may be steep
/// upward: h-(v) <= h-(u) + 1.
pub(crate) fn assert_no_steep_minus(
    graph: &BiCsrGraph,
    state: &FlowState,
    allow: impl Fn(u32) -> bool,
    context: &str,
) {
    for u in 0..graph.vertex_count() as u32 {
        if !allow(u) {
            continue;
        }
        let hu = state.h_minus(u);
        for slot in graph.out_slots(u) {
            let v = graph.target(slot);
            if !allow(v) || state.residual(slot) <= 0 {
                continue;
            }
            let hv = state.h_minus(v);
            assert!(
                hv <= hu + 1,
                "audit[{context}]: steep h- edge {u}(h={hu}) -> {v}(h={hv})"
            );
        }
    }
}

/// Sequential backward BFS distances from the given roots over the current
/// residual graph; unreachable vertices get `u32::MAX`.
fn backward_distances(
    graph: &BiCsrGraph,
    state: &FlowState,
    roots: &[u32],
    allow: &impl Fn(u32) -> bool,
) -> Vec<u32> {
    let mut dist = vec![u32::MAX; graph.vertex_count()];
    let mut queue = VecDeque::new();
    for &r in roots {
        dist[r as usize] = 0;
        queue.push_back(r);
    }
    while let Some(v) = queue.pop_front() {
        for &slot in graph.in_slots(v) {
            if state.residual(slot) <= 0 {
                continue;
            }
            let u = graph.slot_owner(slot);
            if allow(u) && dist[u as usize] == u32::MAX {
                dist[u as usize] = dist[v as usize] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Height/distance bound: every vertex that can reach the current root set in
/// the residual graph satisfies h+(v) <= d(v).
pub(crate) fn assert_height_distance_bound(
    graph: &BiCsrGraph,
    state: &FlowState,
    is_root: impl Fn(u32) -> bool,
    allow: impl Fn(u32) -> bool,
    context: &str,
) {
    let roots: Vec<u32> = (0..graph.vertex_count() as u32)
        .filter(|&u| allow(u) && is_root(u))
        .collect();
    let dist = backward_distances(graph, state, &roots, &allow);
    for u in 0..graph.vertex_count() as u32 {
        if !allow(u) || dist[u as usize] == u32::MAX {
            continue;
        }
        let h = state.h_plus(u);
        let d = dist[u as usize];
        assert!(
            h <= d,
            "audit[{context}]: h+({u}) = {h} exceeds residual distance {d}"
        );
    }
}

/// Heights never decrease across a global relabel within one solve.
pub(crate) fn assert_monotone(
    previous: &[u32],
    current: &[u32],
    allow: impl Fn(u32) -> bool,
    context: &str,
) {
    for (u, (&before, &after)) in previous.iter().zip(current).enumerate() {
        if allow(u as u32) {
            assert!(
                after >= before,
                "audit[{context}]: height of vertex {u} dropped {before} -> {after}"
            );
        }
    }
}

/// The regions reached by the backward-h+ BFS and the forward-h- BFS must be
/// disjoint in the push-pull solver.
pub(crate) fn assert_regions_disjoint(graph: &BiCsrGraph, state: &FlowState, context: &str) {
    let n = graph.vertex_count() as u32;
    for u in 0..n {
        assert!(
            !(state.h_plus(u) < n && state.h_minus(u) < n),
            "audit[{context}]: vertex {u} reached by both height functions"
        );
    }
}
