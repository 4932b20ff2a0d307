mod common;

use std::collections::HashSet;

use common::*;
use confpersist::cochain::{cohomology_basis_z2, cup_power, is_coboundary, Cochain};
use confpersist::covering::{build_config_rips, w1, RipsParams};
use confpersist::metric::{sample_circle, Tolerance};
use confpersist::obstruction::{bockstein_c1, sw_power_max_t};
use confpersist::persistence::{betti_at, compute_persistence, Ring};

#[test]
fn barcode_counts_match_dense_betti() {
    let tol = Tolerance::default();
    for (name, k) in fixture_complexes() {
        let max_q = k.dim_cap();
        let barcode = compute_persistence(&k, max_q).unwrap();
        let mut radii = k.critical_values();
        let mids: Vec<f64> = radii.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect();
        radii.extend(mids);
        for r in radii.into_iter().filter(|r| r.is_finite()) {
            let snap = k.snapshot(r, tol);
            let simplices: Vec<Vec<usize>> = (0..=max_q)
                .flat_map(|q| snap.simplices(q).to_vec())
                .collect();
            let oracle = betti_z2(&simplices, max_q);
            for (q, &b) in oracle.iter().enumerate() {
                assert_eq!(
                    barcode.count_at(q, r, tol),
                    b,
                    "{name}: degree {q} at r = {r}"
                );
                let fixed = betti_at(&k, r, q, Ring::Z2, tol).unwrap();
                assert_eq!(fixed.betti, b, "{name}: fixed-scale degree {q} at r = {r}");
            }
        }
    }
}

const RP2_EDGES: usize = 15;

fn rp2_edges() -> Vec<[usize; 2]> {
    let mut e: Vec<[usize; 2]> = RP2
        .iter()
        .flat_map(|t| [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]])
        .collect();
    e.sort();
    e.dedup();
    e
}

/// Brute force over all 2^15 edge cochains of the projective plane.
#[test]
fn rp2_exhaustive_cup_square() {
    let edges = rp2_edges();
    assert_eq!(edges.len(), RP2_EDGES);
    let eidx = |a: usize, b: usize| {
        edges
            .iter()
            .position(|e| *e == [a.min(b), a.max(b)])
            .unwrap()
    };
    let delta1 = |c: u32| -> u16 {
        let mut out = 0u16;
        for (t, tri) in RP2.iter().enumerate() {
            let bit = |a, b| (c >> eidx(a, b)) & 1;
            if (bit(tri[1], tri[2]) ^ bit(tri[0], tri[2]) ^ bit(tri[0], tri[1])) == 1 {
                out |= 1 << t;
            }
        }
        out
    };
    let delta0 = |f: u32| -> u32 {
        let mut out = 0u32;
        for (i, e) in edges.iter().enumerate() {
            if ((f >> e[0]) ^ (f >> e[1])) & 1 == 1 {
                out |= 1 << i;
            }
        }
        out
    };
    let coboundaries1: HashSet<u32> = (0..64u32).map(delta0).collect();
    let cocycles: Vec<u32> = (0..1u32 << RP2_EDGES).filter(|&c| delta1(c) == 0).collect();
    assert_eq!(
        cocycles.len() / coboundaries1.len(),
        2,
        "H^1(RP2; Z/2) has two elements"
    );
    let coboundaries2: HashSet<u16> = (0..1u32 << RP2_EDGES).map(delta1).collect();
    let square = |c: u32| -> u16 {
        let mut out = 0u16;
        for (t, tri) in RP2.iter().enumerate() {
            let front = (c >> eidx(tri[0], tri[1])) & 1;
            let back = (c >> eidx(tri[1], tri[2])) & 1;
            if front & back == 1 {
                out |= 1 << t;
            }
        }
        out
    };
    for &a in cocycles.iter().filter(|a| !coboundaries1.contains(a)) {
        assert!(!coboundaries2.contains(&square(a)), "a^2 must be nonzero");
    }

    // the pipeline agrees on its own generator
    let k = rp2_complex();
    let basis = cohomology_basis_z2(&k, 1);
    assert_eq!(basis.len(), 1);
    let a = &basis[0];
    let mask: u32 = edges
        .iter()
        .enumerate()
        .filter(|(_, e)| a.get(&e[..]) != 0)
        .map(|(i, _)| 1u32 << i)
        .sum();
    assert!(!coboundaries1.contains(&mask));
    let sq = cup_power(a, 2, &k).unwrap();
    let sq_mask: u16 = RP2
        .iter()
        .enumerate()
        .filter(|(_, t)| sq.get(&t[..]) != 0)
        .map(|(i, _)| 1u16 << i)
        .sum();
    assert_eq!(sq_mask, square(mask));
    assert_eq!(sw_power_max_t(&k, a, 3), 2);
}

/// H²(RP²; Z) = Z/2 injects into H²(RP²; Z/2), which is detected by the sum
/// over all triangles; so an integral 2-cocycle is a coboundary iff that
/// sum is even.
#[test]
fn rp2_bockstein_against_parity_oracle() {
    let k = rp2_complex();
    for a in cohomology_basis_z2(&k, 1) {
        let b = bockstein_c1(&k, &a, 2).unwrap();
        let total: i64 = RP2.iter().map(|t| b.c1.get(&t[..])).sum();
        assert_eq!(b.nonzero, total % 2 != 0);
        assert!(b.nonzero);
        assert!(is_coboundary(&b.c1.scaled(2), &k).unwrap().is_coboundary);
    }
}

#[test]
fn sw_power_matches_dense_oracle() {
    let tol = Tolerance::default();
    let x = sample_circle(12, 12.0).unwrap();
    let (model, g) =
        build_config_rips(&x, 2, 1.0, &[1.0, 1.5, 2.0], RipsParams::default()).unwrap();
    let w = w1(&g);
    for s in [1.0, 1.5, 2.0] {
        let snap = model.snapshot(s, tol);
        let c = w.to_cochain(&model, s, tol);
        let mut oracle_t = 0;
        for t in 1..=2 {
            let p = cup_power(&c, t, &snap).unwrap();
            let dense: Vec<u8> = snap
                .simplices(t)
                .iter()
                .map(|sx| p.get(sx).rem_euclid(2) as u8)
                .collect();
            if !in_coboundary_image_z2(snap.simplices(t - 1), snap.simplices(t), &dense) {
                oracle_t = t;
            }
        }
        assert_eq!(sw_power_max_t(&snap, &c, 2), oracle_t, "scale {s}");
    }
    let rp2 = rp2_complex();
    let a = &cohomology_basis_z2(&rp2, 1)[0];
    let dense: Vec<u8> = rp2
        .simplices(2)
        .iter()
        .map(|sx| cup_power(a, 2, &rp2).unwrap().get(sx) as u8)
        .collect();
    assert!(!in_coboundary_image_z2(
        rp2.simplices(1),
        rp2.simplices(2),
        &dense
    ));
    let zero = Cochain::zero(1, Ring::Z2, None);
    assert_eq!(sw_power_max_t(&rp2, &zero, 2), 0);
}
