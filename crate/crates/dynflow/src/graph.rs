//! Bi-directional CSR graph representation.
//!
//! A [`BiCsrGraph`] stores the outgoing adjacency of every vertex in CSR form
//! and, on top of that, two auxiliary indices that make residual-graph updates
//! cheap from both endpoints of an edge:
//!
//! * `reverse_index` maps the slot of `(u, v)` to the slot of `(v, u)`, so a
//!   push updates both residual cells in constant time;
//! * `in_offsets`/`in_slots` list, for every vertex `v`, the slot ids of edges
//!   pointing at `v`, so pull operations and backward BFS traverse incoming
//!   edges without searching.
//!
//! Every ordered pair is materialized in both directions: when the input lacks
//! a reverse edge, a zero-capacity slot is inserted. Parallel input edges are
//! merged by summing their capacities, self-loops are rejected.

use crate::error::{Error, Result};

/// Immutable topology plus the original edge capacities.
///
/// The structure never changes after construction; solvers keep all mutable
/// quantities (current capacities, residuals, excess, heights) in
/// [`crate::FlowState`].
#[derive(Debug, Clone)]
pub struct BiCsrGraph {
    vertex_count: usize,
    source: u32,
    sink: u32,
    /// Number of distinct ordered pairs present in the input (zero-capacity
    /// filler slots excluded). Used for batch sizing and the kernel-cycles
    /// heuristic.
    edge_count: usize,
    out_offsets: Vec<u32>,
    out_targets: Vec<u32>,
    in_offsets: Vec<u32>,
    in_slots: Vec<u32>,
    reverse_index: Vec<u32>,
    capacity: Vec<i64>,
}

impl BiCsrGraph {
    /// Build the Bi-CSR representation from a directed edge list.
    ///
    /// Duplicate `(u, v)` entries are merged by summing capacities; missing
    /// reverse directions are added as zero-capacity slots. Self-loops,
    /// out-of-range vertex ids and `source == sink` are rejected.
    pub fn build(
        edges: &[(u32, u32, u32)],
        vertex_count: usize,
        source: u32,
        sink: u32,
    ) -> Result<Self> {
        if source == sink {
            return Err(Error::SourceEqualsSink);
        }
        for &id in &[source, sink] {
            if id as usize >= vertex_count {
                return Err(Error::VertexOutOfRange {
                    id: id as u64,
                    vertex_count,
                });
            }
        }
        for &(u, v, _) in edges {
            if u as usize >= vertex_count || v as usize >= vertex_count {
                return Err(Error::VertexOutOfRange {
                    id: u.max(v) as u64,
                    vertex_count,
                });
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
        }

        // Merge parallel edges by capacity summation.
        let mut merged: Vec<(u32, u32, i64)> = edges
            .iter()
            .map(|&(u, v, c)| (u, v, c as i64))
            .collect();
        merged.sort_unstable_by_key(|&(u, v, _)| (u, v));
        merged.dedup_by(|cur, acc| {
            if acc.0 == cur.0 && acc.1 == cur.1 {
                acc.2 += cur.2;
                true
            } else {
                false
            }
        });
        let edge_count = merged.len();

        // Materialize missing reverse directions as zero-capacity slots.
        let mut all = merged.clone();
        for &(u, v, _) in &merged {
            if merged
                .binary_search_by_key(&(v, u), |&(a, b, _)| (a, b))
                .is_err()
            {
                all.push((v, u, 0));
            }
        }
        all.sort_unstable_by_key(|&(u, v, _)| (u, v));

        let slots = all.len();
        if slots > u32::MAX as usize {
            return Err(Error::InvalidParameter(format!(
                "graph needs {slots} slots, exceeding the u32 index space"
            )));
        }

        let mut out_offsets = vec![0u32; vertex_count + 1];
        for &(u, _, _) in &all {
            out_offsets[u as usize + 1] += 1;
        }
        for i in 1..=vertex_count {
            out_offsets[i] += out_offsets[i - 1];
        }

        let out_targets: Vec<u32> = all.iter().map(|&(_, v, _)| v).collect();
        let capacity: Vec<i64> = all.iter().map(|&(_, _, c)| c).collect();

        // reverse_index: the pair (v, u) exists by construction.
        let mut reverse_index = vec![0u32; slots];
        for (i, &(u, v, _)) in all.iter().enumerate() {
            let j = all
                .binary_search_by_key(&(v, u), |&(a, b, _)| (a, b))
                .expect("reverse slot materialized above");
            reverse_index[i] = j as u32;
        }

        // Incoming adjacency: slot ids grouped by target, ascending slot id.
        let mut in_offsets = vec![0u32; vertex_count + 1];
        for &v in &out_targets {
            in_offsets[v as usize + 1] += 1;
        }
        for i in 1..=vertex_count {
            in_offsets[i] += in_offsets[i - 1];
        }
        let mut cursor: Vec<u32> = in_offsets[..vertex_count].to_vec();
        let mut in_slots = vec![0u32; slots];
        for (i, &v) in out_targets.iter().enumerate() {
            in_slots[cursor[v as usize] as usize] = i as u32;
            cursor[v as usize] += 1;
        }

        Ok(Self {
            vertex_count,
            source,
            sink,
            edge_count,
            out_offsets,
            out_targets,
            in_offsets,
            in_slots,
            reverse_index,
            capacity,
        })
    }

    /// Clone the topology with a different capacity array (same slot layout).
    ///
    /// This is how a "rebuilt" graph is produced after capacity updates: slot
    /// ids, reverse indices and adjacency are bit-identical to the original.
    pub fn with_capacities(&self, capacity: Vec<i64>) -> Self {
        assert_eq!(capacity.len(), self.capacity.len(), "capacity len mismatch");
        assert!(capacity.iter().all(|&c| c >= 0), "capacities must be >= 0");
        Self {
            capacity,
            ..self.clone()
        }
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Total slot count (original edges plus zero-capacity fillers).
    #[inline]
    pub fn slot_count(&self) -> usize {
        self.out_targets.len()
    }

    /// Distinct ordered pairs that appeared in the input.
    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn source(&self) -> u32 {
        self.source
    }

    #[inline]
    pub fn sink(&self) -> u32 {
        self.sink
    }

    /// Slot range of `u`'s outgoing edges.
    #[inline]
    pub fn out_slots(&self, u: u32) -> std::ops::Range<u32> {
        self.out_offsets[u as usize]..self.out_offsets[u as usize + 1]
    }

    /// Target vertex of a slot.
    #[inline]
    pub fn target(&self, slot: u32) -> u32 {
        self.out_targets[slot as usize]
    }

    /// Slot of the opposite direction of `slot`.
    #[inline]
    pub fn reverse(&self, slot: u32) -> u32 {
        self.reverse_index[slot as usize]
    }

    /// Owner (tail vertex) of a slot, recovered through the reverse slot.
    #[inline]
    pub fn slot_owner(&self, slot: u32) -> u32 {
        self.out_targets[self.reverse_index[slot as usize] as usize]
    }

    /// Slot ids of edges pointing at `v`.
    #[inline]
    pub fn in_slots(&self, v: u32) -> &[u32] {
        let lo = self.in_offsets[v as usize] as usize;
        let hi = self.in_offsets[v as usize + 1] as usize;
        &self.in_slots[lo..hi]
    }

    /// Find the slot of the ordered pair `(u, v)`, if present.
    pub fn slot_between(&self, u: u32, v: u32) -> Option<u32> {
        if u as usize >= self.vertex_count || v as usize >= self.vertex_count {
            return None;
        }
        let range = self.out_slots(u);
        let lo = range.start as usize;
        let hi = range.end as usize;
        self.out_targets[lo..hi]
            .binary_search(&v)
            .ok()
            .map(|i| (lo + i) as u32)
    }

    /// Original capacity of a slot.
    #[inline]
    pub fn capacity(&self, slot: u32) -> i64 {
        self.capacity[slot as usize]
    }

    #[inline]
    pub fn capacities(&self) -> &[i64] {
        &self.capacity
    }

    /// Kernel-cycles heuristic: average degree `|E| / |V|`, at least 1.
    pub fn default_kernel_cycles(&self) -> u32 {
        let n = self.vertex_count.max(1) as u64;
        let m = self.edge_count as u64;
        (((m + n / 2) / n).max(1)).min(u32::MAX as u64) as u32
    }
}
