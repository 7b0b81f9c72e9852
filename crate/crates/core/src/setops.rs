//! Subsets of a ring as bitmasks, and the exact counts N and E.
//!
//! N counts solutions of `x + (b_1 - c_1)^2 + ... + (b_{n-1} - c_{n-1})^2 = t`
//! with `x in A^2`, `b_i in A+A`, `c_i in A`, `t in nA^2`. E counts pairs of
//! `(x, b, c)` tuples on which the left-hand form agrees.

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Caps;
use crate::error::{Error, Result};
use crate::ring::{Filter, Ring};

#[derive(Clone)]
pub struct ElementSet {
    ring: Arc<Ring>,
    bits: Vec<u64>,
    card: usize,
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ElementSet({} ", self.ring)?;
        f.debug_set().entries(self.iter()).finish()?;
        write!(f, ")")
    }
}

impl PartialEq for ElementSet {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.bits == other.bits
    }
}

impl Eq for ElementSet {}

impl ElementSet {
    pub fn empty(ring: &Arc<Ring>) -> Self {
        let words = (ring.size() as usize).div_ceil(64);
        ElementSet { ring: Arc::clone(ring), bits: vec![0; words], card: 0 }
    }

    pub fn from_indices<I: IntoIterator<Item = u64>>(ring: &Arc<Ring>, indices: I) -> Result<Self> {
        let mut set = Self::empty(ring);
        for i in indices {
            if !ring.contains(i) {
                return Err(Error::ElementOutOfRange { index: i, size: ring.size() });
            }
            set.insert(i as u32);
        }
        Ok(set)
    }

    fn from_filter(ring: &Arc<Ring>, filter: Filter) -> Self {
        let mut set = Self::empty(ring);
        for a in ring.enumerate(filter) {
            set.insert(a);
        }
        set
    }

    pub fn all(ring: &Arc<Ring>) -> Self {
        Self::from_filter(ring, Filter::All)
    }

    pub fn units(ring: &Arc<Ring>) -> Self {
        Self::from_filter(ring, Filter::Units)
    }

    pub fn maximal_ideal(ring: &Arc<Ring>) -> Self {
        Self::from_filter(ring, Filter::MaximalIdeal)
    }

    /// Uniform `k`-subset of the unit group via a seeded partial shuffle.
    pub fn random_units<R: rand::Rng + ?Sized>(ring: &Arc<Ring>, k: usize, rng: &mut R) -> Result<Self> {
        let mut units: Vec<u32> = ring.enumerate(Filter::Units).collect();
        if k > units.len() {
            return Err(Error::BadSize { k, max: units.len() });
        }
        let (chosen, _) = units.partial_shuffle(rng, k);
        Self::from_indices(ring, chosen.iter().map(|&a| a as u64))
    }

    /// Parses `1,2,4`, `units`, `all`, `ideal`, `empty` or `random:<size>:<seed>`.
    pub fn parse_literal(ring: &Arc<Ring>, literal: &str) -> Result<Self> {
        let literal = literal.trim();
        match literal {
            "units" => return Ok(Self::units(ring)),
            "all" => return Ok(Self::all(ring)),
            "ideal" => return Ok(Self::maximal_ideal(ring)),
            "empty" | "" => return Ok(Self::empty(ring)),
            _ => {}
        }
        if let Some(rest) = literal.strip_prefix("random:") {
            let (size, seed) = rest
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected random:<size>:<seed>, got {literal:?}")))?;
            let size: usize = size.parse().map_err(|_| Error::Parse(format!("bad size {size:?}")))?;
            let seed: u64 = seed.parse().map_err(|_| Error::Parse(format!("bad seed {seed:?}")))?;
            let mut rng = crate::seed::trial_rng(seed, &[]);
            return Self::random_units(ring, size, &mut rng);
        }
        let indices = literal
            .split(',')
            .map(|tok| tok.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad element index {tok:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_indices(ring, indices)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.card
    }

    pub fn is_empty(&self) -> bool {
        self.card == 0
    }

    #[inline]
    pub fn contains(&self, a: u32) -> bool {
        let a = a as usize;
        a < self.ring.size() as usize && self.bits[a / 64] >> (a % 64) & 1 == 1
    }

    fn insert(&mut self, a: u32) {
        let (w, b) = (a as usize / 64, a as usize % 64);
        if self.bits[w] >> b & 1 == 0 {
            self.bits[w] |= 1 << b;
            self.card += 1;
        }
    }

    /// Members in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let b = word.trailing_zeros();
                word &= word - 1;
                Some(w as u32 * 64 + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().collect()
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.ring == other.ring && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn all_units(&self) -> bool {
        self.iter().all(|a| self.ring.is_unit(a))
    }

    fn same_ring(&self, other: &ElementSet) -> Result<()> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    fn map_pairs(&self, other: &ElementSet, op: impl Fn(&Ring, u32, u32) -> u32) -> Result<ElementSet> {
        self.same_ring(other)?;
        let mut out = ElementSet::empty(&self.ring);
        let rhs = other.to_vec();
        for a in self.iter() {
            for &b in &rhs {
                out.insert(op(&self.ring, a, b));
            }
        }
        Ok(out)
    }
}

/// `{a + b : a in A, b in B}`.
pub fn sumset(a: &ElementSet, b: &ElementSet) -> Result<ElementSet> {
    a.map_pairs(b, Ring::add)
}

/// `{a * b : a in A, b in B}`.
pub fn productset(a: &ElementSet, b: &ElementSet) -> Result<ElementSet> {
    a.map_pairs(b, Ring::mul)
}

/// `{x^2 : x in A}`.
pub fn square_set(a: &ElementSet) -> ElementSet {
    let mut out = ElementSet::empty(&a.ring);
    for x in a.iter() {
        out.insert(a.ring.square(x));
    }
    out
}

/// The n-fold sumset `S + ... + S`.
pub fn iterated_sumset(s: &ElementSet, n: usize) -> Result<ElementSet> {
    if n < 1 {
        return Err(Error::BadArity { n, min: 1, max: usize::MAX });
    }
    let mut acc = s.clone();
    for _ in 1..n {
        acc = sumset(&acc, s)?;
    }
    Ok(acc)
}

/// `A ∩ R*`.
pub fn restrict_to_units(a: &ElementSet) -> ElementSet {
    let mut out = ElementSet::empty(&a.ring);
    for x in a.iter().filter(|&x| a.ring.is_unit(x)) {
        out.insert(x);
    }
    out
}

/// The enumeration domain of the form `x + sum (b_i - c_i)^2`.
struct FormSpace<'a> {
    ring: &'a Ring,
    squares: Vec<u32>,
    /// `(b - c)^2` for every `(b, c) in (A+A) x A`, with multiplicity.
    pair_terms: Vec<u32>,
    depth: usize,
}

impl<'a> FormSpace<'a> {
    fn new(a: &'a ElementSet, n: usize, caps: &Caps) -> Result<Self> {
        if n < 2 || n > caps.max_n {
            return Err(Error::BadArity { n, min: 2, max: caps.max_n });
        }
        if !a.all_units() {
            return Err(Error::NotUnits);
        }
        let ring = a.ring.as_ref();
        let sums = sumset(a, a)?;
        let squares = square_set(a).to_vec();
        let mut pair_terms = Vec::with_capacity(sums.len() * a.len());
        for b in sums.iter() {
            for c in a.iter() {
                pair_terms.push(ring.square(ring.sub(b, c)));
            }
        }
        let space = FormSpace { ring, squares, pair_terms, depth: n - 1 };
        let tuples = space.tuple_count();
        if tuples > caps.max_tuples as u128 {
            return Err(Error::TooLarge { what: "form tuples", count: tuples, cap: caps.max_tuples as u128 });
        }
        Ok(space)
    }

    fn tuple_count(&self) -> u128 {
        self.squares.len() as u128 * (self.pair_terms.len() as u128).pow(self.depth as u32)
    }

    fn visit(&self, level: usize, partial: u32, f: &mut impl FnMut(u32)) {
        if level == self.depth {
            f(partial);
            return;
        }
        for &w in &self.pair_terms {
            self.visit(level + 1, self.ring.add(partial, w), f);
        }
    }

    /// Outer jobs are `(x, first pair)`; the remaining pairs are walked serially.
    fn jobs(&self) -> impl ParallelIterator<Item = u32> + '_ {
        let width = self.pair_terms.len();
        (0..self.squares.len() * width)
            .into_par_iter()
            .map(move |j| self.ring.add(self.squares[j / width], self.pair_terms[j % width]))
    }

    fn count_in(&self, target: &ElementSet) -> u64 {
        self.jobs()
            .map(|start| {
                let mut hits = 0u64;
                self.visit(1, start, &mut |v| hits += target.contains(v) as u64);
                hits
            })
            .sum()
    }

    fn histogram(&self) -> Vec<u64> {
        let size = self.ring.size() as usize;
        self.jobs()
            .fold(
                || vec![0u64; size],
                |mut hist, start| {
                    self.visit(1, start, &mut |v| hist[v as usize] += 1);
                    hist
                },
            )
            .reduce(
                || vec![0u64; size],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            )
    }
}

/// Value distribution `m(v)` of the form over all `(x, b, c)` tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormHistogram {
    pub counts: Vec<u64>,
}

impl FormHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `sum_v m(v)^2`.
    pub fn energy(&self) -> u128 {
        self.counts.iter().map(|&m| m as u128 * m as u128).sum()
    }

    /// `sum_{v in target} m(v)`.
    pub fn mass_on(&self, target: &ElementSet) -> u64 {
        target.iter().map(|v| self.counts[v as usize]).sum()
    }
}

pub fn form_histogram(a: &ElementSet, n: usize, caps: &Caps) -> Result<FormHistogram> {
    let space = FormSpace::new(a, n, caps)?;
    Ok(FormHistogram { counts: space.histogram() })
}

/// Exact N; `t` is eliminated by a membership test against `nA^2`.
pub fn count_solutions_n(a: &ElementSet, n: usize, caps: &Caps) -> Result<u64> {
    let space = FormSpace::new(a, n, caps)?;
    let target = iterated_sumset(&square_set(a), n)?;
    Ok(space.count_in(&target))
}

/// Exact E as the sum of squared histogram counts.
pub fn energy_e(a: &ElementSet, n: usize, caps: &Caps) -> Result<u128> {
    Ok(form_histogram(a, n, caps)?.energy())
}

/// `(|A·B|, |B·C|, |B+C|)` for unit sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HpvQuantities {
    pub product_ab: usize,
    pub product_bc: usize,
    pub sum_bc: usize,
}

pub fn hpv_quantities(a: &ElementSet, b: &ElementSet, c: &ElementSet) -> Result<HpvQuantities> {
    if !(a.all_units() && b.all_units() && c.all_units()) {
        return Err(Error::NotUnits);
    }
    Ok(HpvQuantities {
        product_ab: productset(a, b)?.len(),
        product_bc: productset(b, c)?.len(),
        sum_bc: sumset(b, c)?.len(),
    })
}
