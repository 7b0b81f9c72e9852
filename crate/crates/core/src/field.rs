//! Residue fields F_q = F_p[x]/(m(x)).
//!
//! A field element is encoded as an integer in `[0, q)` whose base-p digits
//! are the coefficients of its reduced polynomial representative, constant
//! term first.

use crate::error::{Error, Result};

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Decomposes `q = p^s` with p prime, or returns `None`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut s = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        s += 1;
    }
    (rest == 1).then_some((p, s))
}

fn trim(poly: &mut Vec<u32>) {
    while poly.last() == Some(&0) {
        poly.pop();
    }
}

/// Remainder of `f` modulo the monic polynomial `g` over F_p.
fn poly_rem(f: &[u32], g: &[u32], p: u32) -> Vec<u32> {
    let mut rem = f.to_vec();
    trim(&mut rem);
    let dg = g.len() - 1;
    debug_assert_eq!(g[dg], 1);
    while rem.len() > dg {
        let lead = *rem.last().unwrap();
        let shift = rem.len() - 1 - dg;
        for (i, &gc) in g.iter().enumerate() {
            let sub = (lead as u64 * gc as u64 % p as u64) as u32;
            rem[shift + i] = (rem[shift + i] + p - sub) % p;
        }
        trim(&mut rem);
    }
    rem
}

fn monic_from_code(code: u64, degree: u32, p: u32) -> Vec<u32> {
    let mut poly = Vec::with_capacity(degree as usize + 1);
    let mut c = code;
    for _ in 0..degree {
        poly.push((c % p as u64) as u32);
        c /= p as u64;
    }
    poly.push(1);
    poly
}

/// Irreducibility over F_p by trial division against every monic polynomial
/// of degree at most half the degree of `poly`.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let degree = poly.len().saturating_sub(1) as u32;
    if degree == 0 {
        return false;
    }
    for div_degree in 1..=degree / 2 {
        let count = (p as u64).pow(div_degree);
        for code in 0..count {
            let g = monic_from_code(code, div_degree, p);
            if poly_rem(poly, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The smallest monic irreducible polynomial of the given degree over F_p.
///
/// Candidates `x^s + a_{s-1} x^{s-1} + ... + a_0` are ordered by the integer
/// `sum a_j p^j`, i.e. lexicographically from `a_{s-1}` down to `a_0`.
pub fn smallest_irreducible(p: u32, degree: u32) -> Vec<u32> {
    let count = (p as u64).pow(degree);
    (0..count)
        .map(|code| monic_from_code(code, degree, p))
        .find(|poly| is_irreducible(poly, p))
        .expect("irreducible polynomials exist in every degree")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueField {
    p: u32,
    s: u32,
    q: u32,
    /// Monic modulus, constant term first; `[0, 1]` (the polynomial x) when s = 1.
    modulus: Vec<u32>,
}

impl ResidueField {
    pub fn new(p: u32, s: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NonPrime(p as u64));
        }
        if s == 0 {
            return Err(Error::InvalidParameter("residue degree s must be >= 1".into()));
        }
        let q = (p as u64)
            .checked_pow(s)
            .filter(|&q| q <= u32::MAX as u64)
            .ok_or_else(|| Error::InvalidParameter(format!("{p}^{s} overflows")))?;
        let modulus = if s == 1 { vec![0, 1] } else { smallest_irreducible(p, s) };
        Ok(ResidueField { p, s, q: q as u32, modulus })
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.s
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    fn to_poly(&self, a: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.s as usize);
        let mut a = a;
        for _ in 0..self.s {
            out.push(a % self.p);
            a /= self.p;
        }
        out
    }

    fn encode_poly(&self, poly: &[u32]) -> u32 {
        poly.iter().rev().fold(0u32, |acc, &c| acc * self.p + c)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.s == 1 {
            return (a + b) % self.p;
        }
        carryless_add(a, b, self.p)
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.s == 1 {
            return (self.p - a % self.p) % self.p;
        }
        carryless_neg(a, self.p)
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        if self.s == 1 {
            return (a as u64 * b as u64 % p) as u32;
        }
        let (pa, pb) = (self.to_poly(a), self.to_poly(b));
        let mut prod = vec![0u32; 2 * self.s as usize - 1];
        for (i, &x) in pa.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in pb.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p) as u32;
            }
        }
        let rem = poly_rem(&prod, &self.modulus, self.p);
        self.encode_poly(&rem)
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via `a^(q-2)`; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.pow(a, self.q as u64 - 2))
    }
}

/// Digitwise base-p addition without carries.
pub(crate) fn carryless_add(mut a: u32, mut b: u32, p: u32) -> u32 {
    let mut out = 0;
    let mut place = 1;
    while a > 0 || b > 0 {
        out += ((a % p + b % p) % p) * place;
        a /= p;
        b /= p;
        place *= p;
    }
    out
}

pub(crate) fn carryless_neg(mut a: u32, p: u32) -> u32 {
    let mut out = 0;
    let mut place = 1;
    while a > 0 {
        out += ((p - a % p) % p) * place;
        a /= p;
        place *= p;
    }
    out
}
