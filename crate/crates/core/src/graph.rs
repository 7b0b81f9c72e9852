//! The bipartite orthogonality graph on unit-scaling classes of `R^d`.
//!
//! Both vertex parts are the classes `[x]` of tuples with at least one unit
//! coordinate, and `[x] ~ [y]` iff `x · y = 0`. The same ordered class list
//! indexes both parts, so the biadjacency matrix is symmetric.

use std::io::Write;
use std::sync::{Arc, OnceLock};

use itertools::Itertools;
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Caps, Tolerances};
use crate::error::{Error, Result};
use crate::ring::{Filter, Ring};
use crate::setops::{iterated_sumset, square_set, sumset, ElementSet};

/// Canonical representative of a unit-scaling class: the first unit
/// coordinate is 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjClass {
    coords: Vec<u32>,
}

impl ProjClass {
    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Scales `v` by the inverse of its first unit coordinate.
pub fn canonicalize(ring: &Ring, v: &[u32]) -> Result<ProjClass> {
    if let Some(&bad) = v.iter().find(|&&a| !ring.contains(a as u64)) {
        return Err(Error::ElementOutOfRange { index: bad as u64, size: ring.size() });
    }
    let lead = v.iter().copied().find(|&a| ring.is_unit(a)).ok_or(Error::AllNonUnits)?;
    let scale = ring.inv(lead)?;
    Ok(ProjClass { coords: v.iter().map(|&a| ring.mul(scale, a)).collect() })
}

pub fn dot(ring: &Ring, u: &[u32], v: &[u32]) -> u32 {
    u.iter().zip(v).fold(0, |acc, (&a, &b)| ring.add(acc, ring.mul(a, b)))
}

/// `q^{(d-1)(r-1)} (q^d - 1)/(q - 1)`.
pub fn class_count(q: u64, r: u32, d: usize) -> u128 {
    let q = q as u128;
    let d = d as u32;
    q.pow((d - 1) * (r - 1)) * (q.pow(d) - 1) / (q - 1)
}

/// `q^{(d-2)(r-1)} (q^{d-1} - 1)/(q - 1)`.
pub fn degree_formula(q: u64, r: u32, d: usize) -> u128 {
    let q = q as u128;
    let d = d as u32;
    q.pow((d - 2) * (r - 1)) * (q.pow(d - 1) - 1) / (q - 1)
}

/// Upper bound `sqrt(q^{(d-2)(2r-1)})` on the third adjacency eigenvalue.
pub fn lambda3_bound(q: u64, r: u32, d: usize) -> f64 {
    ((q as f64).powi(((d as i32) - 2) * (2 * r as i32 - 1))).sqrt()
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("dimension d = {d} must be >= 2")));
    }
    Ok(())
}

/// All canonical representatives in lexicographic order of coordinate indices.
pub fn enumerate_classes(ring: &Ring, d: usize, max_vertices: usize) -> Result<Vec<ProjClass>> {
    check_dim(d)?;
    let expected = class_count(ring.q() as u64, ring.r(), d);
    if expected > max_vertices as u128 {
        return Err(Error::TooLarge { what: "graph vertices", count: expected, cap: max_vertices as u128 });
    }
    let ideal: Vec<u32> = ring.enumerate(Filter::MaximalIdeal).collect();
    let all: Vec<u32> = ring.enumerate(Filter::All).collect();
    let mut classes = Vec::with_capacity(expected as usize);
    for lead in 0..d {
        let slots = (0..d).map(|k| match k.cmp(&lead) {
            std::cmp::Ordering::Less => ideal.clone(),
            std::cmp::Ordering::Equal => vec![1],
            std::cmp::Ordering::Greater => all.clone(),
        });
        classes.extend(slots.multi_cartesian_product().map(|coords| ProjClass { coords }));
    }
    classes.sort();
    if classes.len() as u128 != expected {
        return Err(Error::FormulaMismatch(format!("{} classes, expected {expected}", classes.len())));
    }
    Ok(classes)
}

/// Where λ₃ came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Lambda3Source {
    Computed,
    Theoretical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lambda3 {
    pub value: f64,
    pub source: Lambda3Source,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixingReport {
    pub edges: u64,
    pub main_term: f64,
    pub residual: f64,
    pub bound: f64,
    pub lambda3: Lambda3,
    pub pass: bool,
}

impl MixingReport {
    fn new(edges: u64, x: usize, y: usize, density: f64, lambda3: Lambda3, tol: f64) -> Self {
        let main_term = density * x as f64 * y as f64;
        let residual = (edges as f64 - main_term).abs();
        let bound = lambda3.value * ((x as f64) * (y as f64)).sqrt();
        MixingReport { edges, main_term, residual, bound, lambda3, pass: residual <= bound + tol }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphHeader {
    pub schema: u32,
    pub ring: String,
    pub q: u32,
    pub r: u32,
    pub d: usize,
    pub classes: usize,
    pub degree: u64,
    pub sigma1: Option<f64>,
    pub sigma2: Option<f64>,
    pub bound: f64,
}

/// `E_{q,d}(R)` stored as a dense symmetric bit matrix.
#[derive(Debug)]
pub struct OrthGraph {
    ring: Arc<Ring>,
    d: usize,
    classes: Vec<ProjClass>,
    rows: Vec<Vec<u64>>,
    degree: u64,
    spectrum: OnceLock<Vec<f64>>,
}

impl OrthGraph {
    /// Builds the graph and audits every row and column sum against the
    /// closed-form degree.
    pub fn build(ring: &Arc<Ring>, d: usize, caps: &Caps) -> Result<Self> {
        let classes = enumerate_classes(ring, d, caps.max_graph_vertices)?;
        let n = classes.len();
        let words = n.div_ceil(64);
        let rows: Vec<Vec<u64>> = classes
            .par_iter()
            .map(|ci| {
                let mut row = vec![0u64; words];
                for (j, cj) in classes.iter().enumerate() {
                    if dot(ring, &ci.coords, &cj.coords) == 0 {
                        row[j / 64] |= 1 << (j % 64);
                    }
                }
                row
            })
            .collect();
        let degree = degree_formula(ring.q() as u64, ring.r(), d) as u64;
        let mut col_sums = vec![0u64; n];
        for (i, row) in rows.iter().enumerate() {
            let row_sum: u64 = row.iter().map(|w| w.count_ones() as u64).sum();
            if row_sum != degree {
                return Err(Error::FormulaMismatch(format!("row {i} has degree {row_sum}, expected {degree}")));
            }
            for (j, sum) in col_sums.iter_mut().enumerate() {
                *sum += row[j / 64] >> (j % 64) & 1;
            }
        }
        if let Some(j) = col_sums.iter().position(|&s| s != degree) {
            return Err(Error::FormulaMismatch(format!("column {j} has degree {}, expected {degree}", col_sums[j])));
        }
        Ok(OrthGraph { ring: Arc::clone(ring), d, classes, rows, degree, spectrum: OnceLock::new() })
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Size of each vertex part.
    pub fn vertex_count(&self) -> usize {
        self.classes.len()
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    /// `deg(A)/|B|`, the edge density used by the mixing lemma.
    pub fn density(&self) -> f64 {
        self.degree as f64 / self.classes.len() as f64
    }

    pub fn classes(&self) -> &[ProjClass] {
        &self.classes
    }

    pub fn index_of(&self, class: &ProjClass) -> Option<usize> {
        self.classes.binary_search(class).ok()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.rows[i][j / 64] >> (j % 64) & 1 == 1
    }

    pub fn theoretical_lambda3(&self) -> f64 {
        lambda3_bound(self.ring.q() as u64, self.ring.r(), self.d)
    }

    /// Singular values of the biadjacency matrix, descending.
    ///
    /// The matrix is symmetric, so these are the absolute eigenvalues.
    pub fn singular_values(&self, spectral_cap: usize) -> Result<&[f64]> {
        let n = self.classes.len();
        if n > spectral_cap {
            return Err(Error::TooLargeForSpectrum { vertices: n, cap: spectral_cap });
        }
        Ok(self.spectrum.get_or_init(|| {
            let m = self.biadjacency();
            let mut sv: Vec<f64> = m.symmetric_eigenvalues().iter().map(|x| x.abs()).collect();
            sv.sort_by(|a, b| b.total_cmp(a));
            sv
        }))
    }

    pub fn biadjacency(&self) -> DMatrix<f64> {
        let n = self.classes.len();
        DMatrix::from_fn(n, n, |i, j| if self.adjacent(i, j) { 1.0 } else { 0.0 })
    }

    /// Second singular value if computable, else the theoretical bound.
    pub fn lambda3(&self, spectral_cap: usize) -> Lambda3 {
        match self.singular_values(spectral_cap) {
            Ok(sv) => Lambda3 { value: sv.get(1).copied().unwrap_or(0.0), source: Lambda3Source::Computed },
            Err(_) => Lambda3 { value: self.theoretical_lambda3(), source: Lambda3Source::Theoretical },
        }
    }

    fn mask(&self, ys: &[usize]) -> Result<Vec<u64>> {
        let n = self.classes.len();
        let mut mask = vec![0u64; n.div_ceil(64)];
        for &j in ys {
            if j >= n {
                return Err(Error::BadIndex { index: j, len: n });
            }
            mask[j / 64] |= 1 << (j % 64);
        }
        Ok(mask)
    }

    /// `e(X, Y) = sum_{i in X, j in Y} B[i][j]`. Duplicate indices count once.
    pub fn edge_count(&self, xs: &[usize], ys: &[usize]) -> Result<u64> {
        let xmask = self.mask(xs)?;
        let ymask = self.mask(ys)?;
        let mut total = 0u64;
        for (w, &word) in xmask.iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let i = w * 64 + word.trailing_zeros() as usize;
                word &= word - 1;
                total += self.rows[i].iter().zip(&ymask).map(|(a, b)| (a & b).count_ones() as u64).sum::<u64>();
            }
        }
        Ok(total)
    }

    pub fn mixing_check(&self, xs: &[usize], ys: &[usize], lambda3: Lambda3, tol: &Tolerances) -> Result<MixingReport> {
        let edges = self.edge_count(xs, ys)?;
        let (nx, ny) = (xs.iter().unique().count(), ys.iter().unique().count());
        Ok(MixingReport::new(edges, nx, ny, self.density(), lambda3, tol.spectral))
    }

    pub fn header(&self, spectral_cap: usize) -> GraphHeader {
        let sv = self.singular_values(spectral_cap).ok();
        GraphHeader {
            schema: 1,
            ring: self.ring.to_string(),
            q: self.ring.q(),
            r: self.ring.r(),
            d: self.d,
            classes: self.classes.len(),
            degree: self.degree,
            sigma1: sv.and_then(|s| s.first().copied()),
            sigma2: sv.and_then(|s| s.get(1).copied()),
            bound: self.theoretical_lambda3(),
        }
    }

    /// Edge list as `i,j` lines under an `i,j` header.
    pub fn write_edges_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "i,j")?;
        for i in 0..self.classes.len() {
            for j in 0..self.classes.len() {
                if self.adjacent(i, j) {
                    writeln!(out, "{i},{j}")?;
                }
            }
        }
        Ok(())
    }
}

/// A vertex subset of uniformly random size in `[1, n]`, uniformly chosen.
pub fn random_vertex_subset<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let k = rng.random_range(1..=n);
    let mut all: Vec<usize> = (0..n).collect();
    let (chosen, _) = all.partial_shuffle(rng, k);
    let mut chosen = chosen.to_vec();
    chosen.sort_unstable();
    chosen
}

/// Pair-by-pair count of orthogonal `(u, v)`; needs no materialized graph.
pub fn count_orthogonal_pairs(ring: &Ring, us: &[ProjClass], vs: &[ProjClass]) -> u64 {
    us.par_iter()
        .map(|u| vs.iter().filter(|v| dot(ring, &u.coords, &v.coords) == 0).count() as u64)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EmbeddingAudit {
    pub u_params: u128,
    pub u_classes: u128,
    pub v_params: u128,
    pub v_classes: u128,
}

/// The vertex sets `U`, `V` used to bound a count by edges of `E_{q,dim}`.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub dim: usize,
    pub u: Vec<ProjClass>,
    pub v: Vec<ProjClass>,
    pub audit: EmbeddingAudit,
}

impl Embedding {
    pub fn indices_in(&self, graph: &OrthGraph) -> Result<(Vec<usize>, Vec<usize>)> {
        let lookup = |set: &[ProjClass]| {
            set.iter()
                .map(|c| graph.index_of(c).ok_or_else(|| Error::FormulaMismatch("embedded class missing from graph".into())))
                .collect::<Result<Vec<_>>>()
        };
        Ok((lookup(&self.u)?, lookup(&self.v)?))
    }
}

/// Parameter-tuple counts `(|U|, |V|)` for the first embedding, by the product formula.
pub fn thm1_embedding_sizes(a: &ElementSet, n: usize) -> Result<(u128, u128)> {
    let sums = sumset(a, a)?.len() as u128;
    let squares = square_set(a);
    let d = iterated_sumset(&squares, n)?.len() as u128;
    let k = (n - 1) as u32;
    Ok((sums.pow(k) * squares.len() as u128, (a.len() as u128).pow(k) * d))
}

/// Parameter-tuple count `|U| = |V|` for the second embedding.
pub fn thm2_embedding_size(a: &ElementSet, n: usize) -> Result<u128> {
    let sums = sumset(a, a)?.len() as u128;
    let k = (n - 1) as u32;
    Ok(sums.pow(k) * (a.len() as u128).pow(k) * square_set(a).len() as u128)
}

fn tuples(items: &[u32], k: usize) -> Vec<Vec<u32>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    (0..k).map(|_| items.iter().copied()).multi_cartesian_product().collect()
}

fn sum_squares(ring: &Ring, xs: &[u32]) -> u32 {
    xs.iter().fold(0, |acc, &x| ring.add(acc, ring.square(x)))
}

fn dedup_audited(ring: &Ring, points: Vec<Vec<u32>>) -> Result<(Vec<ProjClass>, u128, u128)> {
    let params = points.len() as u128;
    let mut classes = points.iter().map(|p| canonicalize(ring, p)).collect::<Result<Vec<_>>>()?;
    classes.sort();
    classes.dedup();
    let distinct = classes.len() as u128;
    if distinct != params {
        return Err(Error::EmbeddingCollision { params, classes: distinct });
    }
    Ok((classes, params, distinct))
}

fn check_embedding_input(a: &ElementSet, n: usize, caps: &Caps, points: u128) -> Result<()> {
    if n < 2 || n > caps.max_n {
        return Err(Error::BadArity { n, min: 2, max: caps.max_n });
    }
    if !a.all_units() {
        return Err(Error::NotUnits);
    }
    if points > caps.max_embedding_points as u128 {
        return Err(Error::TooLarge { what: "embedding points", count: points, cap: caps.max_embedding_points as u128 });
    }
    Ok(())
}

/// `U = {(-2b_1..-2b_{n-1}, sum b_i^2 + x, 1)}`, `V = {(c_1..c_{n-1}, 1, sum c_i^2 - t)}` in `E_{q,n+1}`.
///
/// `dot(u, v) = x + sum (b_i - c_i)^2 - t`, so orthogonal pairs are exactly
/// the solutions counted by N.
pub fn embed_thm1_sets(a: &ElementSet, n: usize, caps: &Caps) -> Result<Embedding> {
    if n >= 2 {
        let (nu, nv) = thm1_embedding_sizes(a, n)?;
        check_embedding_input(a, n, caps, nu.max(nv))?;
    } else {
        check_embedding_input(a, n, caps, 0)?;
    }
    let ring = a.ring().as_ref();
    let sums = sumset(a, a)?.to_vec();
    let squares = square_set(a);
    let targets = iterated_sumset(&squares, n)?.to_vec();
    let squares = squares.to_vec();
    let units = a.to_vec();
    let minus_two = ring.neg(ring.add(1, 1));

    let mut u_points = Vec::new();
    for b in tuples(&sums, n - 1) {
        let base = sum_squares(ring, &b);
        for &x in &squares {
            let mut p: Vec<u32> = b.iter().map(|&bi| ring.mul(minus_two, bi)).collect();
            p.push(ring.add(base, x));
            p.push(1);
            u_points.push(p);
        }
    }
    let mut v_points = Vec::new();
    for c in tuples(&units, n - 1) {
        let base = sum_squares(ring, &c);
        for &t in &targets {
            let mut p = c.clone();
            p.push(1);
            p.push(ring.sub(base, t));
            v_points.push(p);
        }
    }
    let (u, u_params, u_classes) = dedup_audited(ring, u_points)?;
    let (v, v_params, v_classes) = dedup_audited(ring, v_points)?;
    Ok(Embedding { dim: n + 1, u, v, audit: EmbeddingAudit { u_params, u_classes, v_params, v_classes } })
}

/// `U = {(-2b, 2d, 1, sum b_i^2 - sum d_i^2 + x)}`, `V = {(c, e, sum c_i^2 - sum e_i^2 - y, 1)}` in `E_{q,2n}`,
/// with `b, e in (A+A)^{n-1}`, `c, d in A^{n-1}`, `x, y in A^2`.
///
/// `dot(u, v) = x + sum (b_i - c_i)^2 - y - sum (e_i - d_i)^2`, so orthogonal
/// pairs are exactly the coincidences counted by E.
pub fn embed_thm2_sets(a: &ElementSet, n: usize, caps: &Caps) -> Result<Embedding> {
    let points = if n >= 2 { thm2_embedding_size(a, n)? } else { 0 };
    check_embedding_input(a, n, caps, points)?;
    let ring = a.ring().as_ref();
    let sums = sumset(a, a)?.to_vec();
    let squares = square_set(a).to_vec();
    let units = a.to_vec();
    let two = ring.add(1, 1);
    let minus_two = ring.neg(two);

    let mut u_points = Vec::new();
    for b in tuples(&sums, n - 1) {
        let sb = sum_squares(ring, &b);
        for d in tuples(&units, n - 1) {
            let base = ring.sub(sb, sum_squares(ring, &d));
            for &x in &squares {
                let mut p: Vec<u32> = b.iter().map(|&bi| ring.mul(minus_two, bi)).collect();
                p.extend(d.iter().map(|&di| ring.mul(two, di)));
                p.push(1);
                p.push(ring.add(base, x));
                u_points.push(p);
            }
        }
    }
    let mut v_points = Vec::new();
    for c in tuples(&units, n - 1) {
        let sc = sum_squares(ring, &c);
        for e in tuples(&sums, n - 1) {
            let base = ring.sub(sc, sum_squares(ring, &e));
            for &y in &squares {
                let mut p = c.clone();
                p.extend_from_slice(&e);
                p.push(ring.sub(base, y));
                p.push(1);
                v_points.push(p);
            }
        }
    }
    let (u, u_params, u_classes) = dedup_audited(ring, u_points)?;
    let (v, v_params, v_classes) = dedup_audited(ring, v_points)?;
    Ok(Embedding { dim: 2 * n, u, v, audit: EmbeddingAudit { u_params, u_classes, v_params, v_classes } })
}
