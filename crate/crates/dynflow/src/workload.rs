//! Synthetic graphs and update batches.
//!
//! Reproducibility is part of the contract here: all randomness comes from
//! `ChaCha8Rng` seeded with the caller's `u64` seed, bounded draws use plain
//! modulo reduction on `next_u64`, and sampling without replacement walks a
//! Fenwick tree of integer weights. Identical inputs produce identical output
//! on every platform.

use std::collections::HashSet;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::dynamic_pr::{BatchKind, UpdateBatch, UpdateEntry};
use crate::error::{Error, Result};
use crate::graph::BiCsrGraph;

/// Uniform draw in `[0, bound)` by modulo reduction. The bias is below
/// 2^-32 for every bound this crate uses; determinism matters more than the
/// last decimal of uniformity.
fn uniform(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    rng.next_u64() % bound
}

/// Uniform draw in the inclusive range `[lo, hi]`.
fn uniform_range(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> i64 {
    debug_assert!(lo <= hi);
    lo + uniform(rng, (hi - lo + 1) as u64) as i64
}

/// Fenwick tree over per-slot weights; supports prefix search and removal,
/// which is all weighted sampling without replacement needs.
struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    fn new(weights: &[u64]) -> Self {
        let mut tree = vec![0u64; weights.len() + 1];
        for (i, &w) in weights.iter().enumerate() {
            let mut idx = i + 1;
            while idx < tree.len() {
                tree[idx] += w;
                idx += idx & idx.wrapping_neg();
            }
        }
        Fenwick { tree }
    }

    fn total(&self) -> u64 {
        let mut sum = 0;
        let mut idx = self.tree.len() - 1;
        while idx > 0 {
            sum += self.tree[idx];
            idx -= idx & idx.wrapping_neg();
        }
        sum
    }

    /// Smallest index whose prefix sum exceeds `target`.
    fn search(&self, mut target: u64) -> usize {
        let mut pos = 0usize;
        let mut step = self.tree.len().next_power_of_two() / 2;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                target -= self.tree[next];
                pos = next;
            }
            step /= 2;
        }
        pos // zero-based slot index
    }

    fn subtract(&mut self, i: usize, w: u64) {
        let mut idx = i + 1;
        while idx < self.tree.len() {
            self.tree[idx] -= w;
            idx += idx & idx.wrapping_neg();
        }
    }
}

/// Random simple directed graph with capacities uniform in `[1, cap_max]`.
///
/// Source and sink are picked as a BFS-deepest pair: forward BFS from up to
/// eight probe vertices, keeping the probe whose tree runs deepest and its
/// farthest reachable vertex. That guarantees an s-t path (so positive flow)
/// whenever the graph has any edge at all, and gives the solver real work.
pub fn generate_random_graph(n: usize, m: usize, cap_max: u32, seed: u64) -> Result<BiCsrGraph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 vertices, got {n}"
        )));
    }
    if cap_max == 0 {
        return Err(Error::InvalidParameter("cap_max must be positive".into()));
    }
    let space = n as u64 * (n as u64 - 1);
    if m as u64 > space {
        return Err(Error::TooManyEdges {
            requested: m as u64,
            vertices: n,
            max: space,
        });
    }
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one edge".into()));
    }
    // Slot ids are u32 and every edge may need a reverse filler.
    if m as u64 > u32::MAX as u64 / 2 {
        return Err(Error::InvalidParameter(format!(
            "{m} edges exceed the addressable slot space"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Ordered pairs (u, v), u != v, encoded as u * (n-1) + v', sampled
    // distinct. Rejection for sparse requests, a partial shuffle of the full
    // pair space when the request is dense (the space is at most 2m then).
    let codes: Vec<u64> = if (m as u64) * 2 <= space {
        let mut seen = HashSet::with_capacity(m * 2);
        let mut codes = Vec::with_capacity(m);
        while codes.len() < m {
            let code = uniform(&mut rng, space);
            if seen.insert(code) {
                codes.push(code);
            }
        }
        codes
    } else {
        let mut all: Vec<u64> = (0..space).collect();
        for i in 0..m {
            let j = i as u64 + uniform(&mut rng, space - i as u64);
            all.swap(i, j as usize);
        }
        all.truncate(m);
        all
    };

    let decode = |code: u64| {
        let u = (code / (n as u64 - 1)) as u32;
        let r = (code % (n as u64 - 1)) as u32;
        let v = if r < u { r } else { r + 1 };
        (u, v)
    };
    let edges: Vec<(u32, u32, u32)> = codes
        .into_iter()
        .map(|code| {
            let (u, v) = decode(code);
            (u, v, 1 + uniform(&mut rng, cap_max as u64) as u32)
        })
        .collect();

    let (source, sink) = deepest_pair(n, &edges);
    BiCsrGraph::build(&edges, n, source, sink)
}

/// Forward-BFS from a few probes; return the (probe, farthest vertex) pair
/// with the deepest tree. Ties break toward smaller ids so the choice is
/// deterministic.
fn deepest_pair(n: usize, edges: &[(u32, u32, u32)]) -> (u32, u32) {
    let mut adjacency = vec![Vec::new(); n];
    for &(u, v, _) in edges {
        adjacency[u as usize].push(v);
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }

    let mut best: Option<(u32, u32, u32)> = None; // (depth, source, sink)
    let probes = (0..n as u32)
        .filter(|&u| !adjacency[u as usize].is_empty())
        .take(8);
    let mut dist = vec![u32::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for probe in probes {
        dist.iter_mut().for_each(|d| *d = u32::MAX);
        dist[probe as usize] = 0;
        queue.clear();
        queue.push_back(probe);
        let mut far = (0u32, probe); // (depth, vertex), smallest id at depth
        while let Some(u) = queue.pop_front() {
            for &v in &adjacency[u as usize] {
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = dist[u as usize] + 1;
                    if dist[v as usize] > far.0 {
                        far = (dist[v as usize], v);
                    }
                    queue.push_back(v);
                }
            }
        }
        if far.0 > 0 && best.is_none_or(|(d, _, _)| far.0 > d) {
            best = Some((far.0, probe, far.1));
        }
    }
    let (_, s, t) = best.expect("m >= 1 guarantees some probe reaches a neighbor");
    (s, t)
}

/// Sample a batch of capacity updates against a graph's original capacities.
///
/// `k = ceil(percent * |E| / 100)` distinct positive-capacity slots are drawn
/// by weighted sampling without replacement; slots leaving the source or
/// entering the sink carry weight `bias_factor`, everything else weight 1.
/// Incremental entries raise the capacity by a uniform `[1, 100]`,
/// decremental entries drop it to a uniform `[0, old - 1]`; a mixed batch
/// applies the increment rule to the first `ceil(k/2)` sampled slots and the
/// decrement rule to the rest.
pub fn generate_batch(
    graph: &BiCsrGraph,
    percent: f64,
    kind: BatchKind,
    seed: u64,
    bias_factor: u64,
) -> Result<UpdateBatch> {
    if !(percent > 0.0 && percent <= 100.0) {
        return Err(Error::InvalidParameter(format!(
            "percent must be in (0, 100], got {percent}"
        )));
    }
    if bias_factor == 0 {
        return Err(Error::InvalidParameter("bias factor must be >= 1".into()));
    }
    let slots = graph.slot_count();
    let weights: Vec<u64> = (0..slots as u32)
        .map(|slot| {
            if graph.capacity(slot) <= 0 {
                0
            } else if graph.slot_owner(slot) == graph.source()
                || graph.target(slot) == graph.sink()
            {
                bias_factor
            } else {
                1
            }
        })
        .collect();
    let pool = weights.iter().filter(|&&w| w > 0).count();
    if pool == 0 {
        return Err(Error::InvalidParameter(
            "graph has no positive-capacity slot to update".into(),
        ));
    }

    let k = ((percent * graph.edge_count() as f64 / 100.0).ceil() as usize)
        .max(1)
        .min(pool);
    let incremental_cut = match kind {
        BatchKind::Incremental => k,
        BatchKind::Decremental => 0,
        BatchKind::Mixed => k.div_ceil(2),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fenwick = Fenwick::new(&weights);
    let mut entries = Vec::with_capacity(k);
    for i in 0..k {
        let total = fenwick.total();
        let slot = fenwick.search(uniform(&mut rng, total)) as u32;
        fenwick.subtract(slot as usize, weights[slot as usize]);
        let old = graph.capacity(slot);
        let new_capacity = if i < incremental_cut {
            (old + uniform_range(&mut rng, 1, 100)).min(u32::MAX as i64)
        } else {
            uniform_range(&mut rng, 0, old - 1)
        };
        entries.push(UpdateEntry {
            from: graph.slot_owner(slot),
            to: graph.target(slot),
            new_capacity: new_capacity as u32,
        });
    }
    Ok(UpdateBatch::new(kind, entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_maxflow;

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
    fn full_decremental_batch_shrinks_every_edge() {
        let g = g1();
        let b = generate_batch(&g, 100.0, BatchKind::Decremental, 5, 10).unwrap();
        assert_eq!(b.len(), 5, "all positive-capacity slots selected");
        for e in &b.entries {
            let old = g.capacity(g.slot_between(e.from, e.to).unwrap());
            assert!((e.new_capacity as i64) < old);
        }
    }

    #[test]
    fn batches_are_deterministic_per_seed() {
        let g = generate_random_graph(40, 120, 100, 3).unwrap();
        let a = generate_batch(&g, 25.0, BatchKind::Mixed, 17, 10).unwrap();
        let b = generate_batch(&g, 25.0, BatchKind::Mixed, 17, 10).unwrap();
        assert_eq!(a.entries, b.entries);
        let c = generate_batch(&g, 25.0, BatchKind::Mixed, 18, 10).unwrap();
        assert_ne!(a.entries, c.entries, "different seed, different batch");
    }

    #[test]
    fn kind_bounds_hold_and_pairs_are_unique() {
        let g = generate_random_graph(60, 240, 100, 11).unwrap();
        for kind in [BatchKind::Incremental, BatchKind::Decremental, BatchKind::Mixed] {
            let b = generate_batch(&g, 50.0, kind, 23, 10).unwrap();
            let mut pairs: Vec<_> = b.entries.iter().map(|e| (e.from, e.to)).collect();
            pairs.sort_unstable();
            pairs.dedup();
            assert_eq!(pairs.len(), b.len(), "no duplicate ordered pairs");
            let (mut ups, mut downs) = (0usize, 0usize);
            for e in &b.entries {
                let old = g.capacity(g.slot_between(e.from, e.to).unwrap());
                match (e.new_capacity as i64).cmp(&old) {
                    std::cmp::Ordering::Greater => ups += 1,
                    std::cmp::Ordering::Less => downs += 1,
                    std::cmp::Ordering::Equal => panic!("entry must change the capacity"),
                }
            }
            match kind {
                BatchKind::Incremental => assert_eq!(downs, 0),
                BatchKind::Decremental => assert_eq!(ups, 0),
                BatchKind::Mixed => {
                    assert_eq!(ups, b.len().div_ceil(2));
                    assert_eq!(downs, b.len() / 2);
                }
            }
        }
    }

    #[test]
    fn bias_factor_shifts_sampling_toward_terminal_edges() {
        // Star-through topology: s -> a_i -> b_i -> t gives 30 biased slots
        // (source-leaving plus sink-entering) and 30 interior ones of equal
        // count. With weight 10 the per-slot hit ratio should be close to 10.
        let lanes = 30u32;
        let mut edges = Vec::new();
        let s = 0u32;
        let t = 1u32;
        for i in 0..lanes {
            let a = 2 + 2 * i;
            let b = 3 + 2 * i;
            edges.push((s, a, 10));
            edges.push((a, b, 10));
            edges.push((b, t, 10));
        }
        let n = 2 + 2 * lanes as usize;
        let g = BiCsrGraph::build(&edges, n, s, t).unwrap();

        let (mut terminal_hits, mut interior_hits) = (0u64, 0u64);
        for seed in 0..1000 {
            let b = generate_batch(&g, 4.0, BatchKind::Incremental, seed, 10).unwrap();
            for e in &b.entries {
                if e.from == s || e.to == t {
                    terminal_hits += 1;
                } else {
                    interior_hits += 1;
                }
            }
        }
        // 60 biased vs 30 interior slots: normalize to per-slot frequency.
        let per_terminal = terminal_hits as f64 / (2.0 * lanes as f64);
        let per_interior = interior_hits as f64 / lanes as f64;
        let ratio = per_terminal / per_interior;
        assert!(
            (8.0..=12.0).contains(&ratio),
            "per-slot bias ratio {ratio:.2} outside 10 +/- 20%"
        );
    }

    #[test]
    fn tiny_graph_is_the_single_edge() {
        let g = generate_random_graph(2, 1, 100, 0).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(oracle_maxflow(&g).value > 0, "s-t must span the edge");
    }

    #[test]
    fn generation_is_deterministic_and_rejects_overfull() {
        let a = generate_random_graph(30, 200, 100, 9).unwrap();
        let b = generate_random_graph(30, 200, 100, 9).unwrap();
        assert_eq!(a.capacities(), b.capacities());
        assert_eq!(a.source(), b.source());
        assert_eq!(a.sink(), b.sink());
        assert!(matches!(
            generate_random_graph(3, 7, 100, 0),
            Err(Error::TooManyEdges { .. })
        ));
    }

    #[test]
    fn deep_pair_selection_yields_positive_flow() {
        let mut positive = 0;
        for seed in 0..100 {
            let g = generate_random_graph(200, 1000, 100, seed).unwrap();
            if oracle_maxflow(&g).value > 0 {
                positive += 1;
            }
        }
        assert!(positive >= 95, "only {positive}/100 seeds had s->t flow");
    }

    #[test]
    fn dense_request_uses_the_whole_pair_space() {
        let n = 6;
        let m = n * (n - 1); // complete digraph
        let g = generate_random_graph(n, m, 10, 4).unwrap();
        assert_eq!(g.edge_count(), m);
    }
}
