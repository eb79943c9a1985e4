//! Push-pull repair: exploit a surviving min-cut.
//!
//! After small batches the min-cut usually barely moves. The push-pull
//! solver saturates the old cut, then repairs the sink side with pushes and
//! the source side with pulls as two concurrent pipelines, and finally runs
//! a localized push-relabel pass on whatever pocket neither side reached.
//!
//! Run with: cargo run --example push_pull_repair

use dynflow::{
    apply_updates, oracle_maxflow, solve_dynamic_pp, solve_static, workload, BatchKind, Engine,
    FlowState, SolveOptions,
};

fn main() -> dynflow::Result<()> {
    let graph = workload::generate_random_graph(2_000, 12_000, 100, 11)?;
    let engine = Engine::new();
    let options = SolveOptions::default();

    let mut state = FlowState::new(&graph);
    let initial = solve_static(&engine, &graph, &mut state, &options);
    println!("initial flow: {}", initial.flow_value);

    // The push-pull solver needs the previous solve's h+ labeling: its
    // below-|V| entries are the surviving sink side of the cut.
    let prev_h_plus = state.h_plus_snapshot();

    let batch = workload::generate_batch(&graph, 2.0, BatchKind::Decremental, 3, 10)?;
    println!("applying {} decremental updates", batch.len());
    apply_updates(&engine, &graph, &mut state, &batch)?;

    let repaired = solve_dynamic_pp(&engine, &graph, &mut state, &prev_h_plus, &options);
    println!(
        "repaired flow: {} ({} rounds, {} push/pull ops)",
        repaired.flow_value, repaired.stats.rounds, repaired.stats.pushes
    );

    let rebuilt = graph.with_capacities(state.capacity_snapshot());
    assert_eq!(repaired.flow_value, oracle_maxflow(&rebuilt).value);
    println!("matches the from-scratch oracle");
    Ok(())
}
