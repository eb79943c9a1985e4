//! Repair max-flow after capacity updates instead of recomputing.
//!
//! A batch lowers and raises some capacities; `apply_updates` folds the
//! changes into the residual graph (leaving deficient vertices where flow
//! exceeded a shrunk capacity) and `solve_dynamic_pr` repairs from there,
//! treating the deficient vertices as auxiliary sinks.
//!
//! Run with: cargo run --example dynamic_repair

use dynflow::{
    apply_updates, oracle_maxflow, solve_dynamic_pr, solve_static, workload, BatchKind, Engine,
    FlowState, SolveOptions,
};

fn main() -> dynflow::Result<()> {
    let graph = workload::generate_random_graph(2_000, 12_000, 100, 42)?;
    let engine = Engine::new();
    let options = SolveOptions::default();

    let mut state = FlowState::new(&graph);
    let initial = solve_static(&engine, &graph, &mut state, &options);
    println!("initial flow: {}", initial.flow_value);

    // 5% of the edges change capacity, half up, half down; edges at the
    // source and sink are ten times more likely to be picked.
    let batch = workload::generate_batch(&graph, 5.0, BatchKind::Mixed, 7, 10)?;
    println!("applying {} capacity updates", batch.len());

    apply_updates(&engine, &graph, &mut state, &batch)?;
    let repaired = solve_dynamic_pr(&engine, &graph, &mut state, &options);
    println!(
        "repaired flow: {} ({} rounds, {} pushes)",
        repaired.flow_value, repaired.stats.rounds, repaired.stats.pushes
    );

    // Same answer as solving the updated graph from scratch.
    let rebuilt = graph.with_capacities(state.capacity_snapshot());
    let expected = oracle_maxflow(&rebuilt).value;
    assert_eq!(repaired.flow_value, expected);
    println!("matches the from-scratch oracle: {expected}");
    Ok(())
}
