//! Dynamic repair of max-flow after a batch of capacity updates.
//!
//! Capacity changes are folded into the residual graph in place; edges whose
//! flow now exceeds the shrunk capacity go transiently negative and a clamp
//! sweep sends the overhang back across the reverse slot, leaving deficient
//! vertices behind. The repair solve then treats every deficient vertex as an
//! auxiliary sink next to `t`: heights grow from the whole sink set, and the
//! usual push/removal rounds route surplus either onward to `t` or back to
//! fill the deficits. The final flow value is the excess summed over the
//! height-zero vertices.

use std::sync::atomic::Ordering::Relaxed;
use std::time::Instant;

use rayon::prelude::*;

use crate::audit;
use crate::engine::{Engine, SolveOptions};
use crate::error::{Error, Result};
use crate::graph::BiCsrGraph;
use crate::state::{recompute_excess, Counters, CutSide, FlowResult, FlowState};
use crate::static_solver::{push_relabel_rounds, saturate_source_slots};

/// Flavor of a generated batch. Metadata only: application logic never
/// branches on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatchKind {
    Incremental,
    Decremental,
    Mixed,
}

impl std::fmt::Display for BatchKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BatchKind::Incremental => write!(f, "inc"),
            BatchKind::Decremental => write!(f, "dec"),
            BatchKind::Mixed => write!(f, "mix"),
        }
    }
}

impl std::str::FromStr for BatchKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "inc" | "incremental" => Ok(BatchKind::Incremental),
            "dec" | "decremental" => Ok(BatchKind::Decremental),
            "mix" | "mixed" => Ok(BatchKind::Mixed),
            other => Err(format!("unknown batch kind `{other}` (inc|dec|mix)")),
        }
    }
}

/// One capacity assignment targeting an existing edge slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UpdateEntry {
    pub from: u32,
    pub to: u32,
    pub new_capacity: u32,
}

/// Ordered batch of capacity updates. Entries must name existing slots and no
/// ordered pair may appear twice.
#[derive(Debug, Clone)]
pub struct UpdateBatch {
    pub kind: BatchKind,
    pub entries: Vec<UpdateEntry>,
}

impl UpdateBatch {
    pub fn new(kind: BatchKind, entries: Vec<UpdateEntry>) -> Self {
        UpdateBatch { kind, entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Fold a batch into the state: set the new capacities, shift the residuals
/// by the same deltas, then clamp. A slot driven negative (flow above the new
/// capacity) hands the overhang to its reverse slot and zeroes itself.
///
/// All-or-nothing: an entry naming a missing slot or a duplicated ordered
/// pair rejects the whole batch before anything is touched. Excess becomes
/// stale; the dynamic solvers recompute it on entry.
pub fn apply_updates(
    engine: &Engine,
    graph: &BiCsrGraph,
    state: &mut FlowState,
    batch: &UpdateBatch,
) -> Result<()> {
    // Resolve and validate before mutating anything.
    let mut slots = Vec::with_capacity(batch.entries.len());
    for entry in &batch.entries {
        let slot = graph
            .slot_between(entry.from, entry.to)
            .ok_or(Error::MissingEdge {
                u: entry.from,
                v: entry.to,
            })?;
        slots.push(slot);
    }
    let mut sorted = slots.clone();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        let dup = w[0];
        return Err(Error::DuplicateUpdate {
            u: graph.slot_owner(dup),
            v: graph.target(dup),
        });
    }

    let state: &FlowState = state;
    let residual = state.residual_cells();
    let capacity = state.capacity_cells();

    // Entry-parallel capacity/residual shift; slots are distinct.
    engine.install(|| {
        batch
            .entries
            .par_iter()
            .zip(slots.par_iter())
            .for_each(|(entry, &slot)| {
                let new_cap = entry.new_capacity as i64;
                let old_cap = capacity[slot as usize].swap(new_cap, Relaxed);
                residual[slot as usize].fetch_add(new_cap - old_cap, Relaxed);
            });
    });

    // Clamp sweep. At most one slot of a pair can be negative (their sum is
    // the non-negative pair capacity), so the transfers never chase each
    // other.
    engine.for_each_vertex(graph.vertex_count(), |u| {
        for slot in graph.out_slots(u) {
            let r = residual[slot as usize].load(Relaxed);
            if r < 0 {
                residual[slot as usize].store(0, Relaxed);
                residual[graph.reverse(slot) as usize].fetch_add(r, Relaxed);
            }
        }
    });
    Ok(())
}

/// Repair the max-flow after [`apply_updates`].
///
/// Re-saturates the source's out-slots, then runs the push-relabel rounds
/// with the sink *set* `{t} ∪ {deficient vertices}` at height zero. Returns
/// the flow as the excess summed over height-zero vertices, and the refreshed
/// min-cut.
pub fn solve_dynamic_pr(
    engine: &Engine,
    graph: &BiCsrGraph,
    state: &mut FlowState,
    options: &SolveOptions,
) -> FlowResult {
    let start = Instant::now();
    let state: &FlowState = state;
    let counters = Counters::default();
    let n = graph.vertex_count();
    let nn = n as u32;
    let s = graph.source();
    let t = graph.sink();

    recompute_excess(engine, graph, state);
    saturate_source_slots(engine, graph, state);
    if options.audit {
        audit::assert_state_sound(graph, state, "updates applied");
    }

    // Heights restart from zero for the repair solve.
    let heights = state.h_plus_cells();
    engine.for_each_vertex(n, |u| heights[u as usize].store(0, Relaxed));

    let excess = state.excess_cells();
    let rounds = push_relabel_rounds(
        engine,
        graph,
        state,
        options.schedule,
        options.cycles_for(graph),
        &counters,
        options.audit,
        |u| u == t || (u != s && excess[u as usize].load(Relaxed) < 0),
        |_| true,
    );

    // Flow = excess over the sink set that remained at height zero; any
    // still-deficient vertex accounts for flow the updates destroyed.
    let flow_value = engine.install(|| {
        (0..nn)
            .into_par_iter()
            .filter(|&u| state.h_plus(u) == 0)
            .map(|u| state.excess(u))
            .sum()
    });
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Schedule;
    use crate::oracle::{oracle_maxflow, verify_certificate, verify_preflow_state};
    use crate::state::FlowState;
    use crate::static_solver::solve_static;

    fn g1() -> BiCsrGraph {
        BiCsrGraph::build(
            &[(0, 1, 4), (0, 2, 2), (1, 2, 3), (1, 3, 1), (2, 3, 6)],
            4,
            0,
            3,
        )
        .unwrap()
    }

    fn solved_g1(engine: &Engine) -> (BiCsrGraph, FlowState) {
        let g = g1();
        let mut st = FlowState::new(&g);
        let r = solve_static(engine, &g, &mut st, &SolveOptions::default());
        assert_eq!(r.flow_value, 6);
        (g, st)
    }

    fn batch(kind: BatchKind, entries: &[(u32, u32, u32)]) -> UpdateBatch {
        UpdateBatch::new(
            kind,
            entries
                .iter()
                .map(|&(from, to, new_capacity)| UpdateEntry {
                    from,
                    to,
                    new_capacity,
                })
                .collect(),
        )
    }

    #[test]
    fn shrink_below_flow_clamps_and_creates_deficit() {
        let engine = Engine::with_threads(2);
        let (g, mut st) = solved_g1(&engine);
        apply_updates(
            &engine,
            &g,
            &mut st,
            &batch(BatchKind::Decremental, &[(0, 1, 2)]),
        )
        .unwrap();
        assert_eq!(st.residual(g.slot_between(0, 1).unwrap()), 0);
        assert_eq!(st.residual(g.slot_between(1, 0).unwrap()), 2);
        assert_eq!(st.current_capacity(g.slot_between(0, 1).unwrap()), 2);
        recompute_excess(&engine, &g, &st);
        assert_eq!(st.excess_snapshot(), vec![-4, -2, 0, 6]);
    }

    #[test]
    fn empty_batch_changes_nothing_and_resolves_to_same_flow() {
        let engine = Engine::with_threads(2);
        let (g, mut st) = solved_g1(&engine);
        let residual_before = st.residual_snapshot();
        apply_updates(&engine, &g, &mut st, &batch(BatchKind::Mixed, &[])).unwrap();
        assert_eq!(st.residual_snapshot(), residual_before);

        let r = solve_dynamic_pr(&engine, &g, &mut st, &SolveOptions::default());
        assert_eq!(r.flow_value, 6);
        // Fixed point: source slots were already saturated, nothing pushes.
        assert_eq!(r.stats.pushes, 0);
        assert_eq!(r.stats.relabels, 0);
        verify_certificate(&g, &st, &r).unwrap();
    }

    #[test]
    fn slack_increase_leaves_residuals_valid_without_clamping() {
        let engine = Engine::with_threads(2);
        let (g, mut st) = solved_g1(&engine);
        // (1,2) carries flow 3 of 3; raising to 8 leaves residual 5, nothing
        // negative anywhere.
        apply_updates(
            &engine,
            &g,
            &mut st,
            &batch(BatchKind::Incremental, &[(1, 2, 8)]),
        )
        .unwrap();
        assert_eq!(st.residual(g.slot_between(1, 2).unwrap()), 5);
        recompute_excess(&engine, &g, &st);
        assert!(verify_preflow_state(&g, &st).is_ok());
    }

    #[test]
    fn rejects_unknown_edges_and_duplicates_without_partial_application() {
        let engine = Engine::with_threads(2);
        let (g, mut st) = solved_g1(&engine);
        let before = st.residual_snapshot();

        let err = apply_updates(
            &engine,
            &g,
            &mut st,
            &batch(BatchKind::Mixed, &[(0, 1, 9), (0, 3, 5)]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::MissingEdge { u: 0, v: 3 }));
        assert_eq!(st.residual_snapshot(), before, "no partial application");

        let err = apply_updates(
            &engine,
            &g,
            &mut st,
            &batch(BatchKind::Mixed, &[(0, 1, 9), (0, 1, 2)]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateUpdate { u: 0, v: 1 }));
        assert_eq!(st.residual_snapshot(), before);
    }

    #[test]
    fn both_directions_of_a_pair_may_change_in_one_batch() {
        let engine = Engine::with_threads(2);
        let (g, mut st) = solved_g1(&engine);
        apply_updates(
            &engine,
            &g,
            &mut st,
            &batch(BatchKind::Mixed, &[(1, 2, 1), (2, 1, 7)]),
        )
        .unwrap();
        recompute_excess(&engine, &g, &st);
        assert!(verify_preflow_state(&g, &st).is_ok());
        let r = solve_dynamic_pr(&engine, &g, &mut st, &SolveOptions::default());
        let rebuilt = g.with_capacities(st.capacity_snapshot());
        assert_eq!(r.flow_value, oracle_maxflow(&rebuilt).value);
    }

    #[test]
    fn decrement_on_cut_edge_lowers_flow_to_oracle_value() {
        let engine = Engine::with_threads(4);
        for schedule in [Schedule::TopologyDriven, Schedule::DataDriven] {
            let (g, mut st) = solved_g1(&engine);
            apply_updates(
                &engine,
                &g,
                &mut st,
                &batch(BatchKind::Decremental, &[(0, 1, 2)]),
            )
            .unwrap();
            let mut opts = SolveOptions::with_schedule(schedule);
            opts.audit = true;
            let r = solve_dynamic_pr(&engine, &g, &mut st, &opts);
            assert_eq!(r.flow_value, 4);
            verify_certificate(&g, &st, &r).unwrap();
        }
    }

    #[test]
    fn increment_opens_more_flow() {
        let engine = Engine::with_threads(4);
        let (g, mut st) = solved_g1(&engine);
        apply_updates(
            &engine,
            &g,
            &mut st,
            &batch(BatchKind::Incremental, &[(0, 2, 10)]),
        )
        .unwrap();
        let opts = SolveOptions {
            audit: true,
            ..Default::default()
        };
        let r = solve_dynamic_pr(&engine, &g, &mut st, &opts);
        assert_eq!(r.flow_value, 7);
        verify_certificate(&g, &st, &r).unwrap();
        // Deficient-reachability shape at termination: positives at |V|,
        // negatives at 0.
        for u in 0..4u32 {
            if u == g.source() || u == g.sink() {
                continue;
            }
            let e = st.excess(u);
            if e > 0 {
                assert_eq!(st.h_plus(u), 4);
            }
            if e < 0 {
                assert_eq!(st.h_plus(u), 0);
            }
        }
    }

    #[test]
    fn source_edge_updates_are_honored_by_resaturation() {
        let engine = Engine::with_threads(2);
        let (g, mut st) = solved_g1(&engine);
        // Drop both source edges to 1: flow collapses to 2.
        apply_updates(
            &engine,
            &g,
            &mut st,
            &batch(BatchKind::Decremental, &[(0, 1, 1), (0, 2, 1)]),
        )
        .unwrap();
        let r = solve_dynamic_pr(&engine, &g, &mut st, &SolveOptions::default());
        let rebuilt = g.with_capacities(st.capacity_snapshot());
        assert_eq!(r.flow_value, oracle_maxflow(&rebuilt).value);
        assert_eq!(r.flow_value, 2);
        verify_certificate(&g, &st, &r).unwrap();
    }

    #[test]
    fn minimal_two_vertex_graph_repairs_in_both_directions() {
        let engine = Engine::with_threads(2);
        let g = BiCsrGraph::build(&[(0, 1, 7)], 2, 0, 1).unwrap();
        let mut st = FlowState::new(&g);
        assert_eq!(
            solve_static(&engine, &g, &mut st, &SolveOptions::default()).flow_value,
            7
        );
        for (new_cap, expected) in [(3u32, 3i64), (12, 12), (0, 0), (5, 5)] {
            apply_updates(
                &engine,
                &g,
                &mut st,
                &batch(BatchKind::Mixed, &[(0, 1, new_cap)]),
            )
            .unwrap();
            let r = solve_dynamic_pr(&engine, &g, &mut st, &SolveOptions::default());
            assert_eq!(r.flow_value, expected);
            verify_certificate(&g, &st, &r).unwrap();
        }
    }

    #[test]
    fn zero_capacity_simulates_removal_and_restore_simulates_insertion() {
        let engine = Engine::with_threads(2);
        let (g, mut st) = solved_g1(&engine);
        apply_updates(
            &engine,
            &g,
            &mut st,
            &batch(BatchKind::Decremental, &[(2, 3, 0)]),
        )
        .unwrap();
        let r = solve_dynamic_pr(&engine, &g, &mut st, &SolveOptions::default());
        assert_eq!(r.flow_value, 1, "only the (1,3) edge still reaches t");

        // Jump from zero back to a positive capacity: edge insertion.
        apply_updates(
            &engine,
            &g,
            &mut st,
            &batch(BatchKind::Incremental, &[(2, 3, 6)]),
        )
        .unwrap();
        let r = solve_dynamic_pr(&engine, &g, &mut st, &SolveOptions::default());
        assert_eq!(r.flow_value, 6);
        verify_certificate(&g, &st, &r).unwrap();
    }
}
