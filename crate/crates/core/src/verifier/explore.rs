//! Randomized ratio scans and hill-climbing searches over unit subsets.

use std::sync::Arc;

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use super::regime::{classify_counts, Constants, Regime};
use crate::error::{Error, Result};
use crate::ring::{Filter, Ring};
use crate::seed::trial_rng;
use crate::setops::{square_set, sumset, ElementSet};

/// `max{|A+A|, |A^2+A^2|}`.
pub fn objective(a: &ElementSet) -> usize {
    let squares = square_set(a);
    let s1 = sumset(a, a).expect("same ring").len();
    let s2 = sumset(&squares, &squares).expect("same ring").len();
    s1.max(s2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl Summary {
    fn of(values: &mut [f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        values.sort_by(f64::total_cmp);
        let n = values.len();
        let median = if n % 2 == 1 { values[n / 2] } else { (values[n / 2 - 1] + values[n / 2]) / 2.0 };
        Some(Summary { min: values[0], median, max: values[n - 1] })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RegimeCounts {
    pub one: usize,
    pub two: usize,
    pub three: usize,
    pub none: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub size: usize,
    /// `thm1`, `thm2` (both at n = 2) or `corollary`.
    pub theorem: &'static str,
    pub trials: usize,
    /// Trials for which a right-hand side exists.
    pub applicable: usize,
    pub lhs: Summary,
    pub ratio: Option<Summary>,
    pub regimes: RegimeCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanTable {
    pub schema: u32,
    pub ring: String,
    pub seed: u64,
    pub trials: usize,
    pub constants: Constants,
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "size,theorem,trials,applicable,lhs_min,lhs_median,lhs_max,ratio_min,ratio_median,ratio_max,regime1,regime2,regime3,regime_none\n",
        );
        for row in &self.rows {
            let ratio = |f: fn(&Summary) -> f64| row.ratio.as_ref().map(|s| f(s).to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                row.size,
                row.theorem,
                row.trials,
                row.applicable,
                row.lhs.min,
                row.lhs.median,
                row.lhs.max,
                ratio(|s| s.min),
                ratio(|s| s.median),
                ratio(|s| s.max),
                row.regimes.one,
                row.regimes.two,
                row.regimes.three,
                row.regimes.none,
            ));
        }
        out
    }
}

struct Trial {
    lhs: usize,
    thm1: f64,
    thm2: f64,
    corollary: Option<f64>,
    regime: Regime,
}

/// For each size, samples `trials` uniform unit subsets and summarizes
/// `max{|A+A|, |A^2+A^2|}` against each tracked right-hand side.
///
/// Trial `i` of size index `j` draws from its own generator seeded by
/// `(seed, j, i)`, so the table does not depend on the worker count.
pub fn bound_ratio_scan(ring: &Arc<Ring>, sizes: &[usize], trials: usize, seed: u64, constants: Constants) -> Result<ScanTable> {
    let max = ring.unit_count() as usize;
    if let Some(&k) = sizes.iter().find(|&&k| k == 0 || k > max) {
        return Err(Error::BadSize { k, max });
    }
    let (q, r) = (ring.q() as f64, ring.r() as f64);
    let mut rows = Vec::with_capacity(sizes.len() * 3);
    for (j, &size) in sizes.iter().enumerate() {
        let results: Vec<Trial> = (0..trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = trial_rng(seed, &[j as u64, i as u64]);
                let a = ElementSet::random_units(ring, size, &mut rng)?;
                let squares = square_set(&a);
                let sums = sumset(&a, &a)?.len();
                let square_sums = sumset(&squares, &squares)?.len();
                let verdict = classify_counts(ring.q(), ring.r(), size, sums, square_sums, constants);
                let k = size as f64;
                let thm1_rhs = (q.powf(r / 2.0) * k.sqrt()).min(k * k / q.powf((2.0 * r - 1.0) / 2.0));
                let thm2_rhs = q.powf(r / 3.0) * k.powf(2.0 / 3.0);
                let lhs = verdict.lhs;
                Ok(Trial {
                    lhs,
                    thm1: lhs as f64 / thm1_rhs,
                    thm2: lhs as f64 / thm2_rhs,
                    corollary: verdict.ratio,
                    regime: verdict.regime,
                })
            })
            .collect::<Result<_>>()?;

        let mut regimes = RegimeCounts::default();
        for t in &results {
            match t.regime {
                Regime::One => regimes.one += 1,
                Regime::Two => regimes.two += 1,
                Regime::Three => regimes.three += 1,
                Regime::None => regimes.none += 1,
            }
        }
        let mut lhs: Vec<f64> = results.iter().map(|t| t.lhs as f64).collect();
        let lhs = Summary::of(&mut lhs).unwrap_or(Summary { min: 0.0, median: 0.0, max: 0.0 });
        let columns: [(&'static str, Vec<f64>); 3] = [
            ("thm1", results.iter().map(|t| t.thm1).collect()),
            ("thm2", results.iter().map(|t| t.thm2).collect()),
            ("corollary", results.iter().filter_map(|t| t.corollary).collect()),
        ];
        for (theorem, mut ratios) in columns {
            rows.push(ScanRow {
                size,
                theorem,
                trials,
                applicable: ratios.len(),
                lhs,
                ratio: Summary::of(&mut ratios),
                regimes,
            });
        }
    }
    Ok(ScanTable { schema: 1, ring: ring.to_string(), seed, trials, constants, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub schema: u32,
    pub ring: String,
    pub k: usize,
    pub iters: usize,
    pub seed: u64,
    pub chains: usize,
    pub best: Vec<u32>,
    pub best_objective: usize,
    pub start_objective: usize,
    pub restarts: usize,
    /// Best objective seen after each step, merged across chains.
    pub trace: Vec<usize>,
}

/// Independent hill-climbing chains run per search.
pub const SEARCH_CHAINS: usize = 4;
/// Steps without strict improvement before a chain restarts.
const PLATEAU: usize = 64;

struct Chain {
    best: Vec<u32>,
    best_objective: usize,
    restarts: usize,
    trace: Vec<usize>,
}

fn run_chain(ring: &Arc<Ring>, units: &[u32], k: usize, iters: usize, seed: u64, chain: usize) -> Result<Chain> {
    let mut rng = trial_rng(seed, &[chain as u64]);
    let fresh = |rng: &mut rand_chacha::ChaCha8Rng| -> Result<Vec<u32>> {
        Ok(ElementSet::random_units(ring, k, rng)?.to_vec())
    };
    let eval = |members: &[u32]| -> Result<usize> {
        Ok(objective(&ElementSet::from_indices(ring, members.iter().map(|&a| a as u64))?))
    };
    let mut current = fresh(&mut rng)?;
    let mut current_obj = eval(&current)?;
    let mut best = current.clone();
    let mut best_objective = current_obj;
    let mut restarts = 0;
    let mut since_improvement = 0;
    let mut trace = Vec::with_capacity(iters + 1);
    trace.push(best_objective);
    for _ in 0..iters {
        let outside: Vec<u32> = units.iter().copied().filter(|u| !current.contains(u)).collect();
        let mut candidate = current.clone();
        let slot = rng.random_range(0..k);
        candidate[slot] = outside[rng.random_range(0..outside.len())];
        let obj = eval(&candidate)?;
        if obj <= current_obj {
            current = candidate;
            current_obj = obj;
        }
        if current_obj < best_objective {
            best = current.clone();
            best_objective = current_obj;
            since_improvement = 0;
        } else {
            since_improvement += 1;
        }
        if since_improvement >= PLATEAU {
            current = fresh(&mut rng)?;
            current_obj = eval(&current)?;
            restarts += 1;
            since_improvement = 0;
            if current_obj < best_objective {
                best = current.clone();
                best_objective = current_obj;
            }
        }
        trace.push(best_objective);
    }
    best.sort_unstable();
    Ok(Chain { best, best_objective, restarts, trace })
}

/// Randomized search for a `k`-subset of `R*` minimizing `max{|A+A|, |A^2+A^2|}`.
///
/// Each step swaps one member for a non-member and keeps the swap unless the
/// objective increases; a chain restarts from a fresh random set after a
/// plateau. Chains are seeded independently and merged in chain order.
pub fn extremal_search(ring: &Arc<Ring>, k: usize, iters: usize, seed: u64) -> Result<SearchResult> {
    let units: Vec<u32> = ring.enumerate(Filter::Units).collect();
    if k == 0 || k > units.len() {
        return Err(Error::BadSize { k, max: units.len() });
    }
    let result = |best: Vec<u32>, best_objective, start_objective, restarts, trace, chains| SearchResult {
        schema: 1,
        ring: ring.to_string(),
        k,
        iters,
        seed,
        chains,
        best,
        best_objective,
        start_objective,
        restarts,
        trace,
    };
    if k == units.len() {
        let obj = objective(&ElementSet::units(ring));
        return Ok(result(units, obj, obj, 0, vec![obj], 0));
    }
    let chains: Vec<Chain> = (0..SEARCH_CHAINS)
        .into_par_iter()
        .map(|c| run_chain(ring, &units, k, iters, seed, c))
        .collect::<Result<_>>()?;
    let trace: Vec<usize> =
        (0..=iters).map(|t| chains.iter().map(|c| c.trace[t]).min().expect("at least one chain")).collect();
    let winner = chains
        .iter()
        .min_by_key(|c| c.best_objective)
        .expect("at least one chain");
    Ok(result(
        winner.best.clone(),
        winner.best_objective,
        trace[0],
        chains.iter().map(|c| c.restarts).sum(),
        trace,
        SEARCH_CHAINS,
    ))
}
