//! Generate instance files and read them back.
//!
//! Graphs travel in DIMACS max format (`p max`, `n ... s/t`, `a u v cap`),
//! batches in a small `u <k> <kind>` header format; both are 1-indexed on
//! disk. Generation is deterministic per seed.
//!
//! Run with: cargo run --example workload_files

use dynflow::{io, workload, BatchKind};

fn main() -> dynflow::Result<()> {
    let dir = std::env::temp_dir().join("dynflow-example");
    std::fs::create_dir_all(&dir)?;
    let graph_path = dir.join("demo.max");
    let batch_path = dir.join("demo.upd");

    let graph = workload::generate_random_graph(500, 2_500, 100, 123)?;
    io::write_dimacs(&graph_path, &graph)?;
    println!(
        "wrote {} ({} vertices, {} edges)",
        graph_path.display(),
        graph.vertex_count(),
        graph.edge_count()
    );

    let batch = workload::generate_batch(&graph, 10.0, BatchKind::Decremental, 9, 10)?;
    io::write_batch(&batch_path, &batch)?;
    println!("wrote {} ({} entries)", batch_path.display(), batch.len());

    // Round-trip: the files describe the same instance.
    let reloaded = io::read_graph(&graph_path)?;
    assert_eq!(reloaded.vertex_count(), graph.vertex_count());
    assert_eq!(reloaded.edge_count(), graph.edge_count());
    let reloaded_batch = io::read_batch(&batch_path)?;
    assert_eq!(reloaded_batch.entries, batch.entries);
    println!("round-trip verified; try them with the dynflow CLI:");
    println!(
        "  dynflow bench --graph {} --updates {} --mode dyn-pr --verify",
        graph_path.display(),
        batch_path.display()
    );
    Ok(())
}
