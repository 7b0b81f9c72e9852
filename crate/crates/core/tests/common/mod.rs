#![allow(dead_code)]

//! Naive reference implementations used as test oracles. Nothing here calls
//! the arithmetic it is checking.

use std::collections::BTreeSet;
use std::sync::Arc;

use valring::{ElementSet, Family, Ring};

/// Straight-line arithmetic on the index encoding `sum c_k q^k`,
/// each `c_k = sum a_j p^j` a residue-field element.
pub struct OracleRing {
    pub p: u64,
    pub s: usize,
    pub r: usize,
    pub q: u64,
    pub size: u64,
    pub family: Family,
    /// Monic, constant term first, length s + 1.
    pub modulus: Vec<u64>,
}

impl OracleRing {
    pub fn new(p: u64, s: usize, r: usize, family: Family) -> Self {
        let q = p.pow(s as u32);
        let modulus = if s == 1 { vec![0, 1] } else { brute_force_modulus(p, s) };
        OracleRing { p, s, r, q, size: q.pow(r as u32), family, modulus }
    }

    pub fn of(ring: &Ring) -> Self {
        Self::new(ring.p() as u64, ring.s() as usize, ring.r() as usize, ring.family())
    }

    fn field_digits(&self, mut c: u64) -> Vec<u64> {
        (0..self.s)
            .map(|_| {
                let d = c % self.p;
                c /= self.p;
                d
            })
            .collect()
    }

    fn field_encode(&self, d: &[u64]) -> u64 {
        d.iter().rev().fold(0, |acc, &x| acc * self.p + x)
    }

    pub fn field_mul(&self, x: u64, y: u64) -> u64 {
        let d = field_mul_mod(&self.field_digits(x), &self.field_digits(y), &self.modulus, self.p);
        self.field_encode(&d)
    }

    fn field_add(&self, x: u64, y: u64) -> u64 {
        let (a, b) = (self.field_digits(x), self.field_digits(y));
        let d: Vec<u64> = a.iter().zip(&b).map(|(u, v)| (u + v) % self.p).collect();
        self.field_encode(&d)
    }

    fn coeffs(&self, mut a: u64) -> Vec<u64> {
        (0..self.r)
            .map(|_| {
                let c = a % self.q;
                a /= self.q;
                c
            })
            .collect()
    }

    fn encode(&self, c: &[u64]) -> u64 {
        c.iter().rev().fold(0, |acc, &x| acc * self.q + x)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        match self.family {
            Family::Zpr => (a + b) % self.size,
            Family::Fqtr => {
                let c: Vec<u64> =
                    self.coeffs(a).iter().zip(self.coeffs(b)).map(|(&x, y)| self.field_add(x, y)).collect();
                self.encode(&c)
            }
        }
    }

    pub fn neg(&self, a: u64) -> u64 {
        (0..self.size).find(|&b| self.add(a, b) == 0).expect("additive group")
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        match self.family {
            Family::Zpr => a * b % self.size,
            Family::Fqtr => {
                let (x, y) = (self.coeffs(a), self.coeffs(b));
                let mut out = vec![0u64; self.r];
                for i in 0..self.r {
                    for j in 0..self.r - i {
                        out[i + j] = self.field_add(out[i + j], self.field_mul(x[i], y[j]));
                    }
                }
                self.encode(&out)
            }
        }
    }

    /// Largest k with a in the ideal generated by z^k (r for zero).
    pub fn valuation(&self, a: u64) -> u32 {
        match self.family {
            Family::Zpr => {
                if a == 0 {
                    return self.r as u32;
                }
                let mut k = 0;
                let mut x = a;
                while x.is_multiple_of(self.p) {
                    x /= self.p;
                    k += 1;
                }
                k
            }
            Family::Fqtr => self.coeffs(a).iter().position(|&c| c != 0).unwrap_or(self.r) as u32,
        }
    }

    pub fn brute_inverse(&self, a: u64) -> Option<u64> {
        (0..self.size).find(|&b| self.mul(a, b) == 1 % self.size)
    }
}

fn field_mul_mod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let s = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * s];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for k in (s..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        for (j, &m) in modulus.iter().enumerate() {
            let idx = k - s + j;
            prod[idx] = (prod[idx] + (p - c) * m) % p;
        }
    }
    prod.truncate(s);
    prod
}

/// Smallest monic `m` of degree s (ordered by `sum a_j p^j` over the lower
/// coefficients) for which F_p[x]/(m) has no zero divisors.
pub fn brute_force_modulus(p: u64, s: usize) -> Vec<u64> {
    let q = p.pow(s as u32);
    let digits = |mut c: u64| -> Vec<u64> {
        (0..s)
            .map(|_| {
                let d = c % p;
                c /= p;
                d
            })
            .collect()
    };
    for code in 0..q {
        let mut m = digits(code);
        m.push(1);
        let domain =
            (1..q).all(|x| (1..q).all(|y| field_mul_mod(&digits(x), &digits(y), &m, p).iter().any(|&d| d != 0)));
        if domain {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

pub fn z(p: u32, r: u32) -> Arc<Ring> {
    Ring::new(p, 1, r, Family::Zpr).unwrap()
}

pub fn f(p: u32, s: u32, r: u32) -> Arc<Ring> {
    Ring::new(p, s, r, Family::Fqtr).unwrap()
}

pub fn set(ring: &Arc<Ring>, items: impl IntoIterator<Item = u32>) -> ElementSet {
    ElementSet::from_indices(ring, items.into_iter().map(u64::from)).unwrap()
}

pub fn naive_sumset(o: &OracleRing, a: &[u32], b: &[u32]) -> BTreeSet<u32> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| o.add(x as u64, y as u64) as u32)).collect()
}

pub fn naive_productset(o: &OracleRing, a: &[u32], b: &[u32]) -> BTreeSet<u32> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| o.mul(x as u64, y as u64) as u32)).collect()
}

pub fn naive_squares(o: &OracleRing, a: &[u32]) -> Vec<u32> {
    let s: BTreeSet<u32> = a.iter().map(|&x| o.mul(x as u64, x as u64) as u32).collect();
    s.into_iter().collect()
}

pub fn naive_iterated(o: &OracleRing, s: &[u32], n: usize) -> Vec<u32> {
    let mut acc: Vec<u32> = s.to_vec();
    for _ in 1..n {
        acc = naive_sumset(o, &acc, s).into_iter().collect();
    }
    acc
}

/// Every value of `x + sum (b_i - c_i)^2` over `x in A^2`, `b_i in A+A`,
/// `c_i in A`, one entry per tuple.
pub fn naive_form_values(o: &OracleRing, a: &[u32], n: usize) -> Vec<u64> {
    let squares = naive_squares(o, a);
    let sums: Vec<u32> = naive_sumset(o, a, a).into_iter().collect();
    let mut pairs = Vec::new();
    for &b in &sums {
        for &c in a {
            let diff = o.add(b as u64, o.neg(c as u64));
            pairs.push(o.mul(diff, diff));
        }
    }
    let mut values: Vec<u64> = squares.iter().map(|&x| x as u64).collect();
    for _ in 1..n {
        values = values.iter().flat_map(|&v| pairs.iter().map(move |&p| (v, p))).map(|(v, p)| o.add(v, p)).collect();
    }
    values
}

/// N by enumerating t explicitly as well.
pub fn naive_n(o: &OracleRing, a: &[u32], n: usize) -> u64 {
    let targets = naive_iterated(o, &naive_squares(o, a), n);
    let values = naive_form_values(o, a, n);
    let mut count = 0;
    for &v in &values {
        for &t in &targets {
            if v == t as u64 {
                count += 1;
            }
        }
    }
    count
}

/// E as the number of ordered pairs of tuples with equal form values,
/// compared pair by pair.
pub fn naive_e(o: &OracleRing, a: &[u32], n: usize) -> u128 {
    let values = naive_form_values(o, a, n);
    let mut count = 0u128;
    for &u in &values {
        for &v in &values {
            if u == v {
                count += 1;
            }
        }
    }
    count
}
