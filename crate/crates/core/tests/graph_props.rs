mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use common::{f, set, z, OracleRing};
use nalgebra::DMatrix;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use valring::graph::{
    canonicalize, class_count, degree_formula, dot, embed_thm1_sets, embed_thm2_sets, enumerate_classes,
    lambda3_bound, OrthGraph,
};
use valring::setops::{count_solutions_n, energy_e};
use valring::{Caps, Error, Filter, Ring, Tolerances};

/// (ring, d) for every graph in the q in {3,5,9}, r in {1,2,3}, d in {2,3,4}
/// matrix that fits the default vertex cap.
fn matrix() -> Vec<(Arc<Ring>, usize)> {
    let rings = [z(3, 1), z(3, 2), z(3, 3), z(5, 1), z(5, 2), z(5, 3), f(3, 2, 1), f(3, 2, 2), f(3, 2, 3)];
    let cap = Caps::default().max_graph_vertices as u128;
    let mut out = Vec::new();
    for ring in rings {
        for d in 2..=4 {
            if class_count(ring.q() as u64, ring.r(), d) <= cap {
                out.push((Arc::clone(&ring), d));
            }
        }
    }
    out
}

fn all_tuples(size: u32, d: usize) -> impl Iterator<Item = Vec<u32>> {
    (0..(size as u64).pow(d as u32)).map(move |mut code| {
        (0..d)
            .map(|_| {
                let c = (code % size as u64) as u32;
                code /= size as u64;
                c
            })
            .collect()
    })
}

/// Orbit representatives under unit scaling, picked as the lexicographic
/// minimum of the orbit (a different rule from the library's).
fn orbit_minima(ring: &Ring, d: usize) -> BTreeSet<Vec<u32>> {
    let o = OracleRing::of(ring);
    let units: Vec<u64> = (0..ring.size() as u64).filter(|&a| o.brute_inverse(a).is_some()).collect();
    let unit_set: BTreeSet<u64> = units.iter().copied().collect();
    all_tuples(ring.size(), d)
        .filter(|v| v.iter().any(|&c| unit_set.contains(&(c as u64))))
        .map(|v| {
            units
                .iter()
                .map(|&t| v.iter().map(|&c| o.mul(t, c as u64) as u32).collect::<Vec<_>>())
                .min()
                .unwrap()
        })
        .collect()
}

#[test]
fn class_counts_match_orbit_partition() {
    for (ring, d) in [(z(3, 1), 2), (z(3, 1), 3), (z(3, 1), 4), (z(3, 2), 2), (z(3, 2), 3), (z(5, 2), 2), (f(3, 2, 1), 3), (z(3, 3), 2)] {
        let orbits = orbit_minima(&ring, d);
        let classes = enumerate_classes(&ring, d, 5000).unwrap();
        assert_eq!(classes.len(), orbits.len(), "{ring} d={d}");
        assert_eq!(classes.len() as u128, class_count(ring.q() as u64, ring.r(), d));
        // sorted, canonical, and one per orbit
        assert!(classes.windows(2).all(|w| w[0] < w[1]));
        for c in &classes {
            let first_unit = c.coords().iter().position(|&x| ring.is_unit(x)).unwrap();
            assert_eq!(c.coords()[first_unit], 1);
        }
    }
    let q3 = enumerate_classes(&z(3, 1), 2, 5000).unwrap();
    let coords: Vec<&[u32]> = q3.iter().map(|c| c.coords()).collect();
    assert_eq!(coords, vec![&[0, 1][..], &[1, 0], &[1, 1], &[1, 2]]);
}

#[test]
fn class_and_degree_formulas_across_matrix() {
    for (ring, d) in matrix() {
        let g = OrthGraph::build(&ring, d, &Caps::default()).unwrap();
        let (q, r) = (ring.q() as u64, ring.r());
        assert_eq!(g.vertex_count() as u128, class_count(q, r, d), "{ring} d={d}");
        assert_eq!(g.degree() as u128, degree_formula(q, r, d), "{ring} d={d}");
        let n = g.vertex_count();
        for i in 0..n {
            let row = (0..n).filter(|&j| g.adjacent(i, j)).count() as u64;
            assert_eq!(row, g.degree());
        }
        // symmetry
        for i in 0..n.min(200) {
            for j in 0..n {
                assert_eq!(g.adjacent(i, j), g.adjacent(j, i));
            }
        }
    }
}

#[test]
fn adjacency_matches_oracle_dot_products() {
    for (ring, d) in [(z(3, 2), 3), (f(3, 2, 1), 3), (z(5, 1), 4), (f(3, 2, 2), 2)] {
        let o = OracleRing::of(&ring);
        let g = OrthGraph::build(&ring, d, &Caps::default()).unwrap();
        let classes = g.classes();
        for (i, u) in classes.iter().enumerate() {
            for (j, v) in classes.iter().enumerate() {
                let s = u.coords().iter().zip(v.coords()).fold(0u64, |acc, (&a, &b)| o.add(acc, o.mul(a as u64, b as u64)));
                assert_eq!(g.adjacent(i, j), s == 0, "{ring} d={d} {i},{j}");
            }
        }
    }
}

#[test]
fn canonicalize_is_orbit_constant() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let rings = [z(3, 2), z(5, 2), f(3, 2, 2), z(3, 4), f(5, 2, 1)];
    for trial in 0..10_000 {
        let ring = &rings[trial % rings.len()];
        let d = rng.random_range(2..=5);
        let mut v: Vec<u32> = (0..d).map(|_| rng.random_range(0..ring.size())).collect();
        if !v.iter().any(|&c| ring.is_unit(c)) {
            let units: Vec<u32> = ring.enumerate(Filter::Units).collect();
            v[rng.random_range(0..d)] = *units.choose(&mut rng).unwrap();
        }
        let t = loop {
            let t = rng.random_range(0..ring.size());
            if ring.is_unit(t) {
                break t;
            }
        };
        let tv: Vec<u32> = v.iter().map(|&c| ring.mul(t, c)).collect();
        let cv = canonicalize(ring, &v).unwrap();
        assert_eq!(cv, canonicalize(ring, &tv).unwrap());
        assert_eq!(canonicalize(ring, cv.coords()).unwrap(), cv);
    }
    let r9 = z(3, 2);
    assert_eq!(canonicalize(&r9, &[3, 2]).unwrap().coords(), &[6, 1]);
    assert_eq!(canonicalize(&r9, &[3, 6]), Err(Error::AllNonUnits));
}

#[test]
fn symmetric_eigenvalues_agree_with_svd() {
    for (ring, d) in [(z(3, 1), 2), (z(3, 1), 3), (z(3, 2), 2), (z(3, 2), 3), (z(5, 1), 3), (f(3, 2, 1), 3), (z(3, 3), 2), (z(5, 1), 4)] {
        let g = OrthGraph::build(&ring, d, &Caps::default()).unwrap();
        let n = g.vertex_count();
        let m = DMatrix::from_fn(n, n, |i, j| if g.adjacent(i, j) { 1.0 } else { 0.0 });
        let mut svd: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
        svd.sort_by(|a, b| b.total_cmp(a));
        let ours = g.singular_values(5000).unwrap();
        assert_eq!(ours.len(), n);
        for (a, b) in ours.iter().zip(&svd) {
            assert!((a - b).abs() < 1e-8, "{ring} d={d}: {a} vs {b}");
        }
    }
}

#[test]
fn spectral_bound_across_matrix() {
    for (ring, d) in matrix() {
        let g = OrthGraph::build(&ring, d, &Caps::default()).unwrap();
        let sv = g.singular_values(5000).unwrap();
        let deg = g.degree() as f64;
        assert!((sv[0] - deg).abs() <= 1e-6 * deg, "{ring} d={d}");
        let bound = lambda3_bound(ring.q() as u64, ring.r(), d);
        assert!(sv[1] <= bound + 1e-6, "{ring} d={d}: {} > {bound}", sv[1]);
    }
}

#[test]
fn spectrum_witnesses() {
    let g = OrthGraph::build(&z(3, 1), 2, &Caps::default()).unwrap();
    assert!(g.singular_values(5000).unwrap().iter().all(|s| (s - 1.0).abs() < 1e-9));
    let g = OrthGraph::build(&z(3, 1), 3, &Caps::default()).unwrap();
    let sv = g.singular_values(5000).unwrap();
    assert!((sv[0] - 4.0).abs() < 1e-9 && sv[1] <= 3f64.sqrt() + 1e-6);
    let g = OrthGraph::build(&z(3, 2), 3, &Caps::default()).unwrap();
    let sv = g.singular_values(5000).unwrap();
    assert!((sv[0] - 12.0).abs() < 1e-9 && sv[1] <= 27f64.sqrt() + 1e-6);
    assert!(matches!(g.singular_values(100), Err(Error::TooLargeForSpectrum { .. })));
}

#[test]
fn edge_counts_and_mixing_edges_cases() {
    let ring = z(3, 1);
    let g = OrthGraph::build(&ring, 3, &Caps::default()).unwrap();
    let all: Vec<usize> = (0..13).collect();
    assert_eq!(g.edge_count(&all, &all).unwrap(), 52);
    assert_eq!(g.edge_count(&[], &all).unwrap(), 0);
    assert!(matches!(g.edge_count(&[13], &all), Err(Error::BadIndex { .. })));
    let l3 = g.lambda3(5000);
    let tol = Tolerances::default();
    let rep = g.mixing_check(&all, &all, l3, &tol).unwrap();
    assert!(rep.residual < 1e-9 && rep.pass);
    for i in 0..13 {
        for j in 0..13 {
            assert!(g.mixing_check(&[i], &[j], l3, &tol).unwrap().pass);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let g = OrthGraph::build(&z(3, 2), 3, &Caps::default()).unwrap();
    let l3 = g.lambda3(5000);
    for _ in 0..1000 {
        let xs = valring::graph::random_vertex_subset(g.vertex_count(), &mut rng);
        let ys = valring::graph::random_vertex_subset(g.vertex_count(), &mut rng);
        let naive = xs.iter().flat_map(|&i| ys.iter().map(move |&j| (i, j))).filter(|&(i, j)| g.adjacent(i, j)).count();
        let rep = g.mixing_check(&xs, &ys, l3, &tol).unwrap();
        assert_eq!(rep.edges as usize, naive);
        assert!(rep.pass);
    }
}

#[test]
fn embedding_dot_identity_and_sizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ring = z(5, 2);
    let o = OracleRing::of(&ring);
    let units: Vec<u32> = ring.enumerate(Filter::Units).collect();
    let caps = Caps::default();
    for _ in 0..100 {
        let mut pool = units.clone();
        pool.shuffle(&mut rng);
        pool.truncate(rng.random_range(1..=6));
        let a = set(&ring, pool.clone());
        let emb = embed_thm1_sets(&a, 2, &caps).unwrap();
        // pick (x, b, c, t) with x in A^2, b in A+A, c in A, t in 2A^2
        let pick = |rng: &mut ChaCha8Rng| pool[rng.random_range(0..pool.len())] as u64;
        let (a1, a2, a3, a4, a5, a6) = (pick(&mut rng), pick(&mut rng), pick(&mut rng), pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let x = o.mul(a1, a1);
        let b = o.add(a2, a3);
        let c = a4;
        let t = o.add(o.mul(a5, a5), o.mul(a6, a6));
        let minus_two = o.neg(2);
        let u = [o.mul(minus_two, b), o.add(o.mul(b, b), x), 1];
        let v = [c, 1, o.add(o.mul(c, c), o.neg(t))];
        let dot_uv = (0..3).fold(0, |acc, i| o.add(acc, o.mul(u[i], v[i])));
        let diff = o.add(b, o.neg(c));
        assert_eq!(dot_uv, o.add(o.add(x, o.mul(diff, diff)), o.neg(t)));
        let u32s = |p: &[u64]| p.iter().map(|&c| c as u32).collect::<Vec<_>>();
        assert!(emb.u.contains(&canonicalize(&ring, &u32s(&u)).unwrap()));
        assert!(emb.v.contains(&canonicalize(&ring, &u32s(&v)).unwrap()));
        assert_eq!(dot(&ring, &u32s(&u), &u32s(&v)) as u64, dot_uv);
    }
}

#[test]
fn embedded_edges_equal_the_counts() {
    let caps = Caps::default();
    let ring = z(3, 2);
    let g3 = OrthGraph::build(&ring, 3, &caps).unwrap();
    let g4 = OrthGraph::build(&ring, 4, &caps).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let units: Vec<u32> = ring.enumerate(Filter::Units).collect();
    for _ in 0..20 {
        let mut pool = units.clone();
        pool.shuffle(&mut rng);
        pool.truncate(rng.random_range(1..=6));
        let a = set(&ring, pool);
        let e1 = embed_thm1_sets(&a, 2, &caps).unwrap();
        let (us, vs) = e1.indices_in(&g3).unwrap();
        assert_eq!(g3.edge_count(&us, &vs).unwrap(), count_solutions_n(&a, 2, &caps).unwrap());
        let e2 = embed_thm2_sets(&a, 2, &caps).unwrap();
        let (us, vs) = e2.indices_in(&g4).unwrap();
        assert_eq!(g4.edge_count(&us, &vs).unwrap() as u128, energy_e(&a, 2, &caps).unwrap());
    }
    let a = set(&ring, [1, 2]);
    let e1 = embed_thm1_sets(&a, 2, &caps).unwrap();
    assert_eq!((e1.u.len(), e1.v.len()), (6, 6));
    let e2 = embed_thm2_sets(&a, 2, &caps).unwrap();
    assert_eq!((e2.u.len(), e2.v.len()), (12, 12));
    assert_eq!(embed_thm1_sets(&set(&ring, [3]), 2, &caps).unwrap_err(), Error::NotUnits);
}

#[test]
fn vertex_cap_is_enforced() {
    let caps = Caps { max_graph_vertices: 100, ..Caps::default() };
    assert!(matches!(OrthGraph::build(&z(3, 2), 3, &caps), Err(Error::TooLarge { .. })));
}
