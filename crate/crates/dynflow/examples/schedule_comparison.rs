//! Topology-driven vs data-driven scheduling.
//!
//! Topology-driven kernels launch on every vertex and let inactive ones
//! no-op; data-driven kernels compact the active vertices into a worklist
//! first. Both must produce the same flow value — they differ only in how
//! much work the launch wastes vs how much the compaction costs.
//!
//! Run with: cargo run --release --example schedule_comparison

use std::time::Instant;

use dynflow::{solve_static, workload, Engine, FlowState, Schedule, SolveOptions};

fn main() -> dynflow::Result<()> {
    let graph = workload::generate_random_graph(50_000, 400_000, 100, 2)?;
    println!(
        "instance: {} vertices, {} edges, {} threads",
        graph.vertex_count(),
        graph.edge_count(),
        Engine::new().thread_count()
    );

    let engine = Engine::new();
    let mut flows = Vec::new();
    for schedule in [Schedule::TopologyDriven, Schedule::DataDriven] {
        let mut state = FlowState::new(&graph);
        let options = SolveOptions::with_schedule(schedule);
        let t0 = Instant::now();
        let result = solve_static(&engine, &graph, &mut state, &options);
        println!(
            "{schedule:>8}: flow {} in {:>8.2} ms ({} rounds, {} pushes)",
            result.flow_value,
            t0.elapsed().as_secs_f64() * 1e3,
            result.stats.rounds,
            result.stats.pushes
        );
        flows.push(result.flow_value);
    }
    assert_eq!(flows[0], flows[1], "schedules must agree on the flow value");
    println!("schedules agree");
    Ok(())
}
