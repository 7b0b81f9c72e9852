//! End-to-end replay of the counting arguments on concrete rings and sets.
//!
//! Exact proof steps (counts, Cauchy–Schwarz, edge bounds) are asserted.
//! Statements that carry unspecified implied constants are only reported as
//! ratios.

mod explore;
mod pipeline;
mod regime;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use itertools::Itertools;
use serde::Serialize;

use crate::config::{Caps, Tolerances};
use crate::error::Result;
use crate::graph::{class_count, OrthGraph};
use crate::ring::{Filter, Ring};
use crate::setops::{hpv_quantities, ElementSet, HpvQuantities};

pub use explore::{
    bound_ratio_scan, extremal_search, objective, RegimeCounts, ScanRow, ScanTable, SearchResult, Summary, SEARCH_CHAINS,
};
pub use pipeline::{Hypothesis, PipelineReport, SetStats, Step, StepMode, StepStatus};
pub use regime::{classify_counts, classify_regime, Constants, Regime, RegimeThresholds, RegimeVerdict};

/// Per-ring verification context; caches orthogonality graphs by dimension.
pub struct Verifier {
    ring: Arc<Ring>,
    caps: Caps,
    tol: Tolerances,
    graphs: Mutex<HashMap<usize, Arc<OrthGraph>>>,
}

impl Verifier {
    pub fn new(ring: Arc<Ring>, caps: Caps, tol: Tolerances) -> Self {
        Verifier { ring, caps, tol, graphs: Mutex::new(HashMap::new()) }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn caps(&self) -> &Caps {
        &self.caps
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// The graph `E_{q,d}`, or `None` when it exceeds the vertex cap.
    pub fn graph(&self, d: usize) -> Result<Option<Arc<OrthGraph>>> {
        if class_count(self.ring.q() as u64, self.ring.r(), d) > self.caps.max_graph_vertices as u128 {
            return Ok(None);
        }
        let mut graphs = self.graphs.lock().expect("graph cache poisoned");
        if let Some(g) = graphs.get(&d) {
            return Ok(Some(Arc::clone(g)));
        }
        let g = Arc::new(OrthGraph::build(&self.ring, d, &self.caps)?);
        graphs.insert(d, Arc::clone(&g));
        Ok(Some(g))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SquareHalvingReport {
    pub schema: u32,
    pub ring: String,
    pub units: usize,
    pub exhaustive_limit: usize,
    /// False when the exhaustive family was too large and only samples ran.
    pub exhaustive: bool,
    pub exhaustive_subsets: u64,
    pub sampled_subsets: u64,
    pub violations: u64,
    /// Every unit square has preimage exactly `{y, -y}` in the unit group.
    pub fiber_ok: bool,
    pub pass: bool,
}

const MAX_EXHAUSTIVE_SUBSETS: u128 = 20_000_000;

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Checks `|A|/2 <= |A^2| <= |A|` over every unit subset of size at most
/// `exhaustive_limit`, plus `samples` random unit subsets of random size.
pub fn check_square_halving(ring: &Arc<Ring>, exhaustive_limit: usize, samples: u64, seed: u64) -> SquareHalvingReport {
    let units: Vec<u32> = ring.enumerate(Filter::Units).collect();
    let mut square_ids: HashMap<u32, usize> = HashMap::new();
    let mut fibers: Vec<Vec<u32>> = Vec::new();
    let ids: Vec<usize> = units
        .iter()
        .map(|&y| {
            let next = square_ids.len();
            let id = *square_ids.entry(ring.square(y)).or_insert(next);
            if id == fibers.len() {
                fibers.push(Vec::new());
            }
            fibers[id].push(y);
            id
        })
        .collect();
    let fiber_ok = fibers.iter().all(|f| f.len() == 2 && f[0] != f[1] && ring.neg(f[0]) == f[1]);

    let mut stamp = vec![u64::MAX; fibers.len()];
    let mut epoch = 0u64;
    let mut distinct_squares = |members: &[usize]| {
        epoch += 1;
        members.iter().filter(|&&m| std::mem::replace(&mut stamp[ids[m]], epoch) != epoch).count()
    };
    let halving_holds = |size: usize, squares: usize| 2 * squares >= size && squares <= size;

    let limit = exhaustive_limit.min(units.len());
    let family: u128 = (0..=limit).map(|k| binomial(units.len() as u128, k as u128)).sum();
    let exhaustive = family <= MAX_EXHAUSTIVE_SUBSETS;
    let mut violations = 0u64;
    let mut exhaustive_subsets = 0u64;
    if exhaustive {
        for k in 0..=limit {
            for combo in (0..units.len()).combinations(k) {
                exhaustive_subsets += 1;
                if !halving_holds(k, distinct_squares(&combo)) {
                    violations += 1;
                }
            }
        }
    }
    let mut rng = crate::seed::trial_rng(seed, &[]);
    for _ in 0..samples {
        let members = crate::graph::random_vertex_subset(units.len(), &mut rng);
        if !halving_holds(members.len(), distinct_squares(&members)) {
            violations += 1;
        }
    }
    SquareHalvingReport {
        schema: 1,
        ring: ring.to_string(),
        units: units.len(),
        exhaustive_limit,
        exhaustive,
        exhaustive_subsets,
        sampled_subsets: samples,
        violations,
        fiber_ok,
        pass: violations == 0 && fiber_ok,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HpvSide {
    pub lhs: u64,
    pub rhs: f64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HpvReport {
    pub schema: u32,
    pub ring: String,
    pub sizes: [usize; 3],
    pub quantities: HpvQuantities,
    /// Multiplicity of `g(x) = x`.
    pub m: u32,
    /// `|A·B||B+C|` against `min{q^r|B|/m, |A||B|^2|C|/(m^2 q^{2r-1})}`.
    pub additive: HpvSide,
    /// `|A·B||B·C|` against the same right-hand side.
    pub multiplicative: HpvSide,
}

/// Ratio report for the product-set specialization `f(x, y) = xy`.
pub fn verify_hpv(a: &ElementSet, b: &ElementSet, c: &ElementSet) -> Result<HpvReport> {
    let quantities = hpv_quantities(a, b, c)?;
    let ring = a.ring();
    let (q, r) = (ring.q() as f64, ring.r() as i32);
    let m = 1.0;
    let (na, nb, nc) = (a.len() as f64, b.len() as f64, c.len() as f64);
    let rhs = (q.powi(r) * nb / m).min(na * nb * nb * nc / (m * m * q.powi(2 * r - 1)));
    let side = |lhs: u64| HpvSide { lhs, rhs, ratio: (rhs > 0.0).then(|| lhs as f64 / rhs) };
    Ok(HpvReport {
        schema: 1,
        ring: ring.to_string(),
        sizes: [a.len(), b.len(), c.len()],
        quantities,
        m: 1,
        additive: side((quantities.product_ab * quantities.sum_bc) as u64),
        multiplicative: side((quantities.product_ab * quantities.product_bc) as u64),
    })
}
