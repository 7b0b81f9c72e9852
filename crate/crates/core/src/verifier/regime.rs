//! Three-regime classification of a set by its size.
//!
//! Regime 1: `|A| >= c1 q^{r-1/3}`, bound `q^{r/2} |A|^{1/2}`.
//! Regime 2: `c2 q^{r-3/8} <= |A| < c1 q^{r-1/3}`, bound `|A|^2 / q^{(2r-1)/2}`.
//! Regime 3: `2q^{r-1} <= |A| < c2 q^{r-3/8}` and `|A+A||A|^2 >= c3 q^{3r-1}`,
//! bound `q^{r/3} |A|^{2/3}`.
//! The thresholds are applied literally; regimes that contain no integer size
//! for the ring are reported as empty.

use serde::{Serialize, Serializer};

use crate::setops::{square_set, sumset, ElementSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants { c1: 1.0, c2: 1.0, c3: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    One,
    Two,
    Three,
    None,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::One => "1",
            Regime::Two => "2",
            Regime::Three => "3",
            Regime::None => "none",
        }
    }
}

impl Serialize for Regime {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeThresholds {
    /// `c1 q^{r-1/3}`.
    pub large: f64,
    /// `c2 q^{r-3/8}`.
    pub medium: f64,
    /// `2 q^{r-1}`.
    pub min_size: u64,
    /// `c3 q^{3r-1}`.
    pub hypothesis: f64,
}

impl RegimeThresholds {
    pub fn new(q: u32, r: u32, c: &Constants) -> Self {
        let (qf, rf) = (q as f64, r as f64);
        RegimeThresholds {
            large: c.c1 * qf.powf(rf - 1.0 / 3.0),
            medium: c.c2 * qf.powf(rf - 3.0 / 8.0),
            min_size: 2 * (q as u64).pow(r - 1),
            hypothesis: c.c3 * qf.powf(3.0 * rf - 1.0),
        }
    }

    /// Regimes that no size in `[1, q^r]` can reach, ignoring the sumset hypothesis.
    fn empty_regimes(&self, ring_size: u64) -> Vec<Regime> {
        let has_integer = |lo: f64, hi_exclusive: f64| {
            let first = lo.max(1.0).ceil();
            first < hi_exclusive && first <= ring_size as f64
        };
        let mut empty = Vec::new();
        if !has_integer(self.large, f64::INFINITY) {
            empty.push(Regime::One);
        }
        if !has_integer(self.medium, self.large) {
            empty.push(Regime::Two);
        }
        if !has_integer(self.min_size as f64, self.medium.min(self.large)) {
            empty.push(Regime::Three);
        }
        empty
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeVerdict {
    pub regime: Regime,
    pub constants: Constants,
    pub thresholds: RegimeThresholds,
    pub size: usize,
    pub sumset: usize,
    pub square_sumset: usize,
    /// `|A+A| |A|^2`.
    pub hypothesis_value: u128,
    /// `max{|A+A|, |A^2+A^2|}`.
    pub lhs: usize,
    pub rhs: Option<f64>,
    pub ratio: Option<f64>,
    pub empty_regimes: Vec<Regime>,
}

/// Pure classification from the counts.
pub fn classify_counts(q: u32, r: u32, size: usize, sumset: usize, square_sumset: usize, constants: Constants) -> RegimeVerdict {
    let thresholds = RegimeThresholds::new(q, r, &constants);
    let a = size as f64;
    let hypothesis_value = sumset as u128 * (size as u128).pow(2);
    let (qf, rf) = (q as f64, r as f64);
    let regime = if a >= thresholds.large {
        Regime::One
    } else if a >= thresholds.medium {
        Regime::Two
    } else if size as u64 >= thresholds.min_size && hypothesis_value as f64 >= thresholds.hypothesis {
        Regime::Three
    } else {
        Regime::None
    };
    let rhs = match regime {
        Regime::One => Some(qf.powf(rf / 2.0) * a.sqrt()),
        Regime::Two => Some(a * a / qf.powf((2.0 * rf - 1.0) / 2.0)),
        Regime::Three => Some(qf.powf(rf / 3.0) * a.powf(2.0 / 3.0)),
        Regime::None => None,
    };
    let lhs = sumset.max(square_sumset);
    RegimeVerdict {
        regime,
        constants,
        thresholds,
        size,
        sumset,
        square_sumset,
        hypothesis_value,
        lhs,
        rhs,
        ratio: rhs.filter(|&x| x > 0.0).map(|x| lhs as f64 / x),
        empty_regimes: thresholds.empty_regimes((q as u64).pow(r)),
    }
}

pub fn classify_regime(a: &ElementSet, constants: Constants) -> RegimeVerdict {
    let ring = a.ring();
    let sums = sumset(a, a).expect("same ring").len();
    let squares = square_set(a);
    let square_sums = sumset(&squares, &squares).expect("same ring").len();
    classify_counts(ring.q(), ring.r(), a.len(), sums, square_sums, constants)
}
