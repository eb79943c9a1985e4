//! Compute max-flow and min-cut on a small hand-built network.
//!
//! Run with: cargo run --example static_mincut

use dynflow::{
    solve_static, verify_certificate, BiCsrGraph, CutSide, Engine, FlowState, SolveOptions,
};

fn main() -> dynflow::Result<()> {
    // A four-vertex network; source 0, sink 3.
    let edges = [(0, 1, 4), (0, 2, 2), (1, 2, 3), (1, 3, 1), (2, 3, 6)];
    let graph = BiCsrGraph::build(&edges, 4, 0, 3)?;

    let engine = Engine::new();
    let mut state = FlowState::new(&graph);
    let result = solve_static(&engine, &graph, &mut state, &SolveOptions::default());

    println!("max flow: {}", result.flow_value);
    let source_side: Vec<u32> = result.cut_source_side().collect();
    let sink_side: Vec<u32> = (0..4)
        .filter(|&u| result.cut_side[u as usize] == CutSide::T)
        .collect();
    println!("min cut: S = {source_side:?}, T = {sink_side:?}");

    // The cut is a certificate: its forward capacity equals the flow and
    // every forward edge is saturated.
    verify_certificate(&graph, &state, &result).expect("certificate must hold");
    println!("certificate verified: cut capacity equals the flow value");

    let s = &result.stats;
    println!(
        "work: {} rounds, {} pushes, {} relabels",
        s.rounds,
        s.pushes,
        s.total_relabels()
    );
    Ok(())
}
