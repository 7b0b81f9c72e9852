//! Size caps and numerical tolerances shared by every module.

use serde::Serialize;

/// Upper limits that keep exhaustive loops at desk scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Caps {
    /// Largest admissible ring order q^r.
    pub max_ring_size: u64,
    /// Largest vertex part for which the orthogonality graph is materialized.
    pub max_graph_vertices: usize,
    /// Largest vertex part for which singular values are computed.
    pub spectral_cap: usize,
    /// Largest arity n accepted by the counting routines.
    pub max_n: usize,
    /// Largest number of (x, b, c) tuples enumerated by one count.
    pub max_tuples: u64,
    /// Largest |U|·|V| for which edges are counted pair by pair without a graph.
    pub max_edge_pairs: u64,
    /// Largest U or V materialized by an embedding.
    pub max_embedding_points: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_ring_size: 1 << 16,
            max_graph_vertices: 5000,
            spectral_cap: 5000,
            max_n: 4,
            max_tuples: 4_000_000_000,
            max_edge_pairs: 50_000_000,
            max_embedding_points: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Absolute slack on singular-value and mixing comparisons.
    pub spectral: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { spectral: 1e-6 }
    }
}
