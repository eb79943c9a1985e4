//! Push-pull repair: dynamic max-flow assuming the previous min-cut mostly
//! survives.
//!
//! The previous cut splits the graph into `S` and `T`. After folding in the
//! updates, every residual `S -> T` edge is saturated, which residually
//! disconnects the two sides. Overflow in `T` is then pushed toward the sink
//! and the `T`-side deficits (guided by `h+`), while deficits in `S` pull
//! from the source and the `S`-side surpluses (guided by the second height
//! function `h-`). The two tracks touch disjoint vertices and slots, so they
//! run as concurrent pipelines. Whatever neither track could settle — the
//! vertices no height function reaches — forms a pocket `P` that a localized
//! push-relabel pass repairs, after which the refreshed cut `S'/T'` is read
//! off the partition labels and the flow is the excess summed over `T'`.

use std::sync::atomic::Ordering::Relaxed;
use std::time::Instant;

use rayon::prelude::*;

use crate::audit::{self, SlotMarks, PULL_TRACK, PUSH_TRACK};
use crate::engine::{Engine, Schedule, SolveOptions};
use crate::graph::BiCsrGraph;
use crate::state::{recompute_excess, Counters, CutSide, FlowResult, FlowState, Part};
use crate::static_solver::{
    push_relabel_rounds, push_relabel_vertex, remove_invalid_edges_vertex,
};

/// Pull operator for one deficient vertex, bounded by `kernel_cycles`.
///
/// While `u` is pull-active (negative excess, `h-` below `|V|`) it scans its
/// incoming residual slots for the lowest `h-` neighbor and either pulls
/// `min(-e(u), residual)` across that slot or lifts `h-(u)` one above it.
pub(crate) fn pull_relabel_vertex(
    graph: &BiCsrGraph,
    state: &FlowState,
    u: u32,
    kernel_cycles: u32,
    counters: &Counters,
    marks: Option<(&SlotMarks, u8)>,
) {
    let n = graph.vertex_count() as u32;
    if u == graph.source() || u == graph.sink() {
        return;
    }
    let residual = state.residual_cells();
    let excess = state.excess_cells();
    let heights = state.h_minus_cells();
    for _ in 0..kernel_cycles {
        if heights[u as usize].load(Relaxed) >= n {
            break;
        }
        let e = excess[u as usize].load(Relaxed);
        if e >= 0 {
            continue;
        }
        let mut best = None;
        let mut best_height = u32::MAX;
        for &slot in graph.in_slots(u) {
            if residual[slot as usize].load(Relaxed) > 0 {
                let v = graph.slot_owner(slot);
                let hv = heights[v as usize].load(Relaxed);
                if hv < best_height {
                    best_height = hv;
                    best = Some(slot);
                }
            }
        }
        let Some(slot) = best else {
            heights[u as usize].store(n, Relaxed);
            counters.relabels.fetch_add(1, Relaxed);
            break;
        };
        if heights[u as usize].load(Relaxed) > best_height {
            let v = graph.slot_owner(slot);
            let rev = graph.reverse(slot);
            // Pull the deficit toward zero, bounded by what the slot holds.
            let d = (-e).min(residual[slot as usize].load(Relaxed));
            let before = residual[slot as usize].fetch_sub(d, Relaxed);
            residual[rev as usize].fetch_add(d, Relaxed);
            excess[u as usize].fetch_add(d, Relaxed);
            excess[v as usize].fetch_sub(d, Relaxed);
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

/// Saturate every residual out-slot of `u` that is steep upward in `h-`:
/// edges `(u, v)` with `h-(v) > h-(u) + 1`. Same transfer arithmetic as the
/// push-side removal.
pub(crate) fn remove_invalid_pull_edges_vertex(
    graph: &BiCsrGraph,
    state: &FlowState,
    u: u32,
    counters: &Counters,
    marks: Option<(&SlotMarks, u8)>,
) {
    let residual = state.residual_cells();
    let excess = state.excess_cells();
    let heights = state.h_minus_cells();
    let hu = heights[u as usize].load(Relaxed);
    for slot in graph.out_slots(u) {
        let v = graph.target(slot);
        let hv = heights[v as usize].load(Relaxed);
        if hv > hu + 1 && residual[slot as usize].load(Relaxed) > 0 {
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

/// Repair max-flow after [`crate::apply_updates`] using the push-pull scheme.
///
/// `prev_h_plus` must be the `h+` array at the previous solve's termination
/// (static or dynamic); its `< |V|` entries define the surviving `T` side.
/// Panics if the caller never ran a solve (length mismatch stands in for the
/// missing-prior-state misuse).
pub fn solve_dynamic_pp(
    engine: &Engine,
    graph: &BiCsrGraph,
    state: &mut FlowState,
    prev_h_plus: &[u32],
    options: &SolveOptions,
) -> FlowResult {
    let start = Instant::now();
    let state: &FlowState = state;
    let counters = Counters::default();
    let n = graph.vertex_count();
    let nn = n as u32;
    let s = graph.source();
    let t = graph.sink();
    assert_eq!(
        prev_h_plus.len(),
        n,
        "push-pull repair needs the previous solve's h+ labeling"
    );

    let residual = state.residual_cells();
    let excess = state.excess_cells();
    let h_plus = state.h_plus_cells();
    let h_minus = state.h_minus_cells();
    let part = state.part_cells();

    // Stage 1: the previous cut is the working partition. Both height
    // functions restart from zero for this solve.
    engine.for_each_vertex(n, |u| {
        let side = if prev_h_plus[u as usize] < nn {
            Part::T
        } else {
            Part::S
        };
        part[u as usize].store(side as u8, Relaxed);
        h_plus[u as usize].store(0, Relaxed);
        h_minus[u as usize].store(0, Relaxed);
    });

    // Stage 2: force the old cut — no residual may cross S -> T.
    engine.for_each_vertex(n, |u| {
        if part[u as usize].load(Relaxed) != Part::S as u8 {
            return;
        }
        for slot in graph.out_slots(u) {
            if part[graph.target(slot) as usize].load(Relaxed) == Part::T as u8 {
                let moved = residual[slot as usize].swap(0, Relaxed);
                if moved != 0 {
                    residual[graph.reverse(slot) as usize].fetch_add(moved, Relaxed);
                }
            }
        }
    });

    // Stage 3.
    recompute_excess(engine, graph, state);
    if options.audit {
        audit::assert_state_sound(graph, state, "pp cut saturation");
        assert_no_residual_cut_crossing(graph, state, "pp cut saturation");
    }

    // Stage 4: concurrent push on T and pull on S.
    let kernel_cycles = options.cycles_for(graph);
    let marks = options.audit.then(|| SlotMarks::new(graph.slot_count()));
    let mut prev_hp = vec![0u32; n];
    let mut prev_hm = vec![0u32; n];
    let mut rounds = 0u64;
    loop {
        for u in 0..n {
            prev_hp[u] = h_plus[u].load(Relaxed);
            prev_hm[u] = h_minus[u].load(Relaxed);
        }
        engine.for_each_vertex(n, |u| {
            let ui = u as usize;
            let e = excess[ui].load(Relaxed);
            let p = part[ui].load(Relaxed);
            let hp = if u == t || (e < 0 && p == Part::T as u8) {
                0
            } else {
                nn
            };
            let hm = if u == s || (e > 0 && p == Part::S as u8) {
                0
            } else {
                nn
            };
            h_plus[ui].store(hp, Relaxed);
            h_minus[ui].store(hm, Relaxed);
        });
        engine.install(|| {
            rayon::join(
                || engine.bfs_backward(graph, residual, h_plus, |_| true),
                || engine.bfs_forward(graph, residual, h_minus, |_| true),
            );
        });
        let raises = engine.install(|| {
            let plus = prev_hp
                .par_iter()
                .enumerate()
                .filter(|&(u, &prev)| h_plus[u].load(Relaxed) > prev)
                .count() as u64;
            let minus = prev_hm
                .par_iter()
                .enumerate()
                .filter(|&(u, &prev)| h_minus[u].load(Relaxed) > prev)
                .count() as u64;
            plus + minus
        });
        counters.bfs_relabels.fetch_add(raises, Relaxed);
        if options.audit {
            audit::assert_monotone(&prev_hp, &state.h_plus_snapshot(), |_| true, "pp h+ bfs");
            audit::assert_monotone(&prev_hm, &state.h_minus_snapshot(), |_| true, "pp h- bfs");
            audit::assert_regions_disjoint(graph, state, "pp bfs");
        }

        let push_active = |u: u32| {
            u != s
                && u != t
                && excess[u as usize].load(Relaxed) > 0
                && h_plus[u as usize].load(Relaxed) < nn
        };
        let pull_active = |u: u32| {
            u != s
                && u != t
                && excess[u as usize].load(Relaxed) < 0
                && h_minus[u as usize].load(Relaxed) < nn
        };
        if !engine.any_active(n, push_active) && !engine.any_active(n, pull_active) {
            break;
        }
        rounds += 1;

        if let Some(m) = &marks {
            m.clear();
        }
        let push_marks = marks.as_ref().map(|m| (m, PUSH_TRACK));
        let pull_marks = marks.as_ref().map(|m| (m, PULL_TRACK));
        let schedule = options.schedule;
        // Two internally ordered pipelines over disjoint regions; the join is
        // the barrier before the next global relabel.
        engine.install(|| {
            rayon::join(
                || match schedule {
                    Schedule::TopologyDriven => {
                        (0..nn).into_par_iter().for_each(|u| {
                            push_relabel_vertex(
                                graph,
                                state,
                                u,
                                kernel_cycles,
                                &counters,
                                |_| true,
                                push_marks,
                            )
                        });
                        (0..nn).into_par_iter().for_each(|u| {
                            remove_invalid_edges_vertex(
                                graph,
                                state,
                                u,
                                &counters,
                                |_| true,
                                push_marks,
                            )
                        });
                    }
                    Schedule::DataDriven => {
                        let worklist: Vec<u32> =
                            (0..nn).into_par_iter().filter(|&u| push_active(u)).collect();
                        worklist.par_iter().for_each(|&u| {
                            push_relabel_vertex(
                                graph,
                                state,
                                u,
                                kernel_cycles,
                                &counters,
                                |_| true,
                                push_marks,
                            )
                        });
                        worklist.par_iter().for_each(|&u| {
                            remove_invalid_edges_vertex(
                                graph,
                                state,
                                u,
                                &counters,
                                |_| true,
                                push_marks,
                            )
                        });
                    }
                },
                || match schedule {
                    Schedule::TopologyDriven => {
                        (0..nn).into_par_iter().for_each(|u| {
                            pull_relabel_vertex(graph, state, u, kernel_cycles, &counters, pull_marks)
                        });
                        (0..nn).into_par_iter().for_each(|u| {
                            remove_invalid_pull_edges_vertex(graph, state, u, &counters, pull_marks)
                        });
                    }
                    Schedule::DataDriven => {
                        let worklist: Vec<u32> =
                            (0..nn).into_par_iter().filter(|&u| pull_active(u)).collect();
                        worklist.par_iter().for_each(|&u| {
                            pull_relabel_vertex(graph, state, u, kernel_cycles, &counters, pull_marks)
                        });
                        worklist.par_iter().for_each(|&u| {
                            remove_invalid_pull_edges_vertex(graph, state, u, &counters, pull_marks)
                        });
                    }
                },
            );
        });

        if options.audit {
            if let Some(m) = &marks {
                m.assert_tracks_disjoint();
            }
            audit::assert_state_sound(graph, state, "pp round");
            audit::assert_no_steep_plus(graph, state, |_| true, "pp round");
            audit::assert_no_steep_minus(graph, state, |_| true, "pp round");
            audit::assert_height_distance_bound(
                graph,
                state,
                |u| u == t || (excess[u as usize].load(Relaxed) < 0 && part[u as usize].load(Relaxed) == Part::T as u8),
                |_| true,
                "pp round",
            );
            assert_no_residual_cut_crossing(graph, state, "pp round");
        }
    }

    // Stage 5: the pocket neither track reached.
    engine.for_each_vertex(n, |u| {
        let ui = u as usize;
        if h_plus[ui].load(Relaxed) >= nn && h_minus[ui].load(Relaxed) >= nn {
            part[ui].store(Part::P as u8, Relaxed);
        }
    });

    // Stage 6: localized push-relabel inside P, deficient vertices as sinks.
    let in_pocket = |u: u32| part[u as usize].load(Relaxed) == Part::P as u8;
    if engine.any_active(n, in_pocket) {
        engine.for_each_vertex(n, |u| {
            if in_pocket(u) {
                h_plus[u as usize].store(0, Relaxed);
            }
        });
        rounds += push_relabel_rounds(
            engine,
            graph,
            state,
            options.schedule,
            kernel_cycles,
            &counters,
            options.audit,
            |u| u == t || (u != s && excess[u as usize].load(Relaxed) < 0),
            in_pocket,
        );
    }

    // Stage 7: refresh the partition labels.
    engine.for_each_vertex(n, |u| {
        let ui = u as usize;
        let new = match Part::from_u8(part[ui].load(Relaxed)) {
            Part::P => {
                if h_plus[ui].load(Relaxed) < nn {
                    Part::TPrime
                } else {
                    Part::SPrime
                }
            }
            Part::T => Part::TPrime,
            Part::S => Part::SPrime,
            other => other,
        };
        part[ui].store(new as u8, Relaxed);
    });

    // Stage 8: flow is the excess accumulated on the refreshed sink side.
    let flow_value = engine.install(|| {
        (0..nn)
            .into_par_iter()
            .filter(|&u| part[u as usize].load(Relaxed) == Part::TPrime as u8)
            .map(|u| excess[u as usize].load(Relaxed))
            .sum()
    });
    let cut_side = (0..nn)
        .map(|u| {
            if state.part(u) == Part::TPrime {
                CutSide::T
            } else {
                CutSide::S
            }
        })
        .collect();
    FlowResult {
        flow_value,
        cut_side,
        stats: counters.to_stats(rounds, start.elapsed()),
    }
}

/// No residual edge may cross from the S-labeled region into the T-labeled
/// region while the stage-4 loop runs.
fn assert_no_residual_cut_crossing(graph: &BiCsrGraph, state: &FlowState, context: &str) {
    for u in 0..graph.vertex_count() as u32 {
        if state.part(u) != Part::S {
            continue;
        }
        for slot in graph.out_slots(u) {
            if state.part(graph.target(slot)) == Part::T {
                let r = state.residual(slot);
                assert_eq!(
                    r,
                    0,
                    "audit[{context}]: residual S->T edge survives at slot {slot}"
                );
            }
        }
    }
}
