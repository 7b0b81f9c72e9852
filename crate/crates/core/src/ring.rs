//! Finite valuation rings `Z/p^r` and `F_q[t]/(t^r)`.
//!
//! Elements are canonical indices in `[0, q^r)`. Writing an element as
//! `sum_k c_k z^k` with residue digits `c_k`, the index is `sum_k c_k q^k`,
//! and each residue digit is itself the base-p encoding used by
//! [`ResidueField`]. For `Z/p^r` this is just the integer residue.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::ResidueField;

/// Rings up to this order carry precomputed addition and multiplication tables.
const TABLE_LIMIT: u32 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    /// `Z/p^r`, uniformizer `p`.
    #[serde(rename = "z")]
    Zpr,
    /// `F_q[t]/(t^r)`, uniformizer `t`.
    #[serde(rename = "f")]
    Fqtr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingParams {
    pub p: u32,
    pub s: u32,
    pub r: u32,
    pub family: Family,
}

impl RingParams {
    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.s)
    }
}

impl fmt::Display for RingParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Zpr => write!(f, "z:{}:{}", self.p, self.r),
            Family::Fqtr => write!(f, "f:{}:{}", self.q(), self.r),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Filter {
    All,
    Units,
    MaximalIdeal,
}

#[derive(Debug)]
struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
}

/// A finite valuation ring of order `q^r` with `q` odd.
#[derive(Debug)]
pub struct Ring {
    params: RingParams,
    q: u32,
    size: u32,
    field: ResidueField,
    tables: Option<Tables>,
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
    }
}

impl Eq for Ring {}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.params.fmt(f)
    }
}

impl Ring {
    /// Builds a ring with the default order cap of 2^16.
    pub fn new(p: u32, s: u32, r: u32, family: Family) -> Result<Arc<Ring>> {
        Self::with_cap(RingParams { p, s, r, family }, 1 << 16)
    }

    pub fn with_cap(params: RingParams, max_size: u64) -> Result<Arc<Ring>> {
        let RingParams { p, s, r, family } = params;
        if p == 2 {
            return Err(Error::EvenPrime);
        }
        if !crate::field::is_prime(p as u64) {
            return Err(Error::NonPrime(p as u64));
        }
        if s == 0 || r == 0 {
            return Err(Error::InvalidParameter("s and r must be >= 1".into()));
        }
        if family == Family::Zpr && s != 1 {
            return Err(Error::BadFamilyCombo(s));
        }
        let size = (p as u64)
            .checked_pow(s)
            .and_then(|q| q.checked_pow(r))
            .unwrap_or(u64::MAX);
        let cap = max_size.min(u32::MAX as u64);
        if size > cap {
            return Err(Error::RingTooLarge { size, cap });
        }
        let field = ResidueField::new(p, s)?;
        let mut ring = Ring { params, q: field.order(), size: size as u32, field, tables: None };
        if ring.size <= TABLE_LIMIT {
            ring.tables = Some(ring.build_tables());
        }
        Ok(Arc::new(ring))
    }

    fn build_tables(&self) -> Tables {
        let n = self.size;
        let mut add = Vec::with_capacity((n * n) as usize);
        let mut mul = Vec::with_capacity((n * n) as usize);
        for a in 0..n {
            for b in 0..n {
                add.push(self.add_slow(a, b));
                mul.push(self.mul_slow(a, b));
            }
        }
        let neg = (0..n).map(|a| self.neg_slow(a)).collect();
        Tables { add, mul, neg }
    }

    pub fn params(&self) -> RingParams {
        self.params
    }

    pub fn family(&self) -> Family {
        self.params.family
    }

    pub fn p(&self) -> u32 {
        self.params.p
    }

    pub fn s(&self) -> u32 {
        self.params.s
    }

    /// Nilpotency degree of the uniformizer.
    pub fn r(&self) -> u32 {
        self.params.r
    }

    /// Residue field order.
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn residue_field(&self) -> &ResidueField {
        &self.field
    }

    /// Irreducible modulus of the residue field when `s > 1`.
    pub fn modulus(&self) -> Option<&[u32]> {
        (self.params.s > 1).then(|| self.field.modulus())
    }

    pub fn zero(&self) -> u32 {
        0
    }

    pub fn one(&self) -> u32 {
        1
    }

    /// `p` for `Z/p^r`, `t` for `F_q[t]/(t^r)`; zero when `r = 1`.
    pub fn uniformizer(&self) -> u32 {
        if self.params.r == 1 {
            0
        } else {
            self.q
        }
    }

    pub fn contains(&self, index: u64) -> bool {
        index < self.size as u64
    }

    pub fn element(&self, index: u64) -> Result<Element<'_>> {
        if !self.contains(index) {
            return Err(Error::ElementOutOfRange { index, size: self.size });
        }
        Ok(Element { ring: self, index: index as u32 })
    }

    /// Residue digits `c_0, ..., c_{r-1}`.
    pub fn digits(&self, mut a: u32) -> Vec<u32> {
        (0..self.params.r)
            .map(|_| {
                let d = a % self.q;
                a /= self.q;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.q + d)
    }

    fn add_slow(&self, a: u32, b: u32) -> u32 {
        match self.params.family {
            Family::Zpr => ((a as u64 + b as u64) % self.size as u64) as u32,
            Family::Fqtr => crate::field::carryless_add(a, b, self.params.p),
        }
    }

    fn neg_slow(&self, a: u32) -> u32 {
        match self.params.family {
            Family::Zpr => (self.size - a) % self.size,
            Family::Fqtr => crate::field::carryless_neg(a, self.params.p),
        }
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        match self.params.family {
            Family::Zpr => (a as u64 * b as u64 % self.size as u64) as u32,
            Family::Fqtr => {
                let (da, db) = (self.digits(a), self.digits(b));
                let r = self.params.r as usize;
                let mut out = vec![0u32; r];
                for (i, &x) in da.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    for (j, &y) in db.iter().take(r - i).enumerate() {
                        out[i + j] = self.field.add(out[i + j], self.field.mul(x, y));
                    }
                }
                self.from_digits(&out)
            }
        }
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            Some(t) => t.add[(a * self.size + b) as usize],
            None => self.add_slow(a, b),
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            Some(t) => t.mul[(a * self.size + b) as usize],
            None => self.mul_slow(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        match &self.tables {
            Some(t) => t.neg[a as usize],
            None => self.neg_slow(a),
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn square(&self, a: u32) -> u32 {
        self.mul(a, a)
    }

    /// `r` for zero, otherwise the index of the first nonzero residue digit.
    pub fn valuation(&self, mut a: u32) -> u32 {
        if a == 0 {
            return self.params.r;
        }
        let mut k = 0;
        while a.is_multiple_of(self.q) {
            a /= self.q;
            k += 1;
        }
        k
    }

    #[inline]
    pub fn is_unit(&self, a: u32) -> bool {
        !a.is_multiple_of(self.q)
    }

    /// Inverse of a unit: invert the residue digit in the field, then lift by
    /// Newton steps `y <- y(2 - xy)`, each doubling the z-adic precision.
    pub fn inv(&self, a: u32) -> Result<u32> {
        if !self.is_unit(a) {
            return Err(Error::NotAUnit(a));
        }
        let residue = a % self.q;
        let mut y = self.field.inv(residue).expect("unit has nonzero residue");
        let two = self.add(1, 1);
        let mut precision = 1;
        while precision < self.params.r {
            y = self.mul(y, self.sub(two, self.mul(a, y)));
            precision *= 2;
        }
        debug_assert_eq!(self.mul(a, y), 1);
        Ok(y)
    }

    /// Extended-Euclid inverse, only meaningful for `Z/p^r`.
    pub fn inv_ext_gcd(&self, a: u32) -> Result<u32> {
        if self.params.family != Family::Zpr {
            return Err(Error::InvalidParameter("extended gcd route applies to z:<p>:<r> only".into()));
        }
        if !self.is_unit(a) {
            return Err(Error::NotAUnit(a));
        }
        let m = self.size as i64;
        let (mut old_r, mut r) = (a as i64, m);
        let (mut old_s, mut s) = (1i64, 0i64);
        while r != 0 {
            let quot = old_r / r;
            (old_r, r) = (r, old_r - quot * r);
            (old_s, s) = (s, old_s - quot * s);
        }
        debug_assert_eq!(old_r, 1);
        Ok(old_s.rem_euclid(m) as u32)
    }

    pub fn enumerate(&self, filter: Filter) -> impl Iterator<Item = u32> + '_ {
        (0..self.size).filter(move |&a| match filter {
            Filter::All => true,
            Filter::Units => self.is_unit(a),
            Filter::MaximalIdeal => !self.is_unit(a),
        })
    }

    /// Closed-form `|(z^k)| = q^{r-k}`.
    pub fn ideal_size(&self, k: u32) -> u64 {
        (self.q as u64).pow(self.params.r.saturating_sub(k))
    }

    /// Closed-form `|R*| = q^r - q^{r-1}`.
    pub fn unit_count(&self) -> u64 {
        self.size as u64 - self.ideal_size(1)
    }
}

/// An element bound to its ring, for checked arithmetic.
#[derive(Debug, Clone, Copy)]
pub struct Element<'a> {
    ring: &'a Ring,
    index: u32,
}

impl PartialEq for Element<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && self.ring == other.ring
    }
}

impl<'a> Element<'a> {
    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn ring(&self) -> &'a Ring {
        self.ring
    }

    pub fn coefficients(&self) -> Vec<u32> {
        self.ring.digits(self.index)
    }

    fn same_ring(&self, other: &Element<'_>) -> Result<()> {
        if std::ptr::eq(self.ring, other.ring) || self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    fn lift(&self, index: u32) -> Element<'a> {
        Element { ring: self.ring, index }
    }

    pub fn add(&self, other: &Element<'_>) -> Result<Element<'a>> {
        self.same_ring(other)?;
        Ok(self.lift(self.ring.add(self.index, other.index)))
    }

    pub fn sub(&self, other: &Element<'_>) -> Result<Element<'a>> {
        self.same_ring(other)?;
        Ok(self.lift(self.ring.sub(self.index, other.index)))
    }

    pub fn mul(&self, other: &Element<'_>) -> Result<Element<'a>> {
        self.same_ring(other)?;
        Ok(self.lift(self.ring.mul(self.index, other.index)))
    }

    pub fn neg(&self) -> Element<'a> {
        self.lift(self.ring.neg(self.index))
    }

    pub fn inv(&self) -> Result<Element<'a>> {
        Ok(self.lift(self.ring.inv(self.index)?))
    }

    pub fn valuation(&self) -> u32 {
        self.ring.valuation(self.index)
    }

    pub fn is_unit(&self) -> bool {
        self.ring.is_unit(self.index)
    }
}
