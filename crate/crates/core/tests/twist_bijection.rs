//! The stored coordinate change of each twist family really is a bijection
//! between specializations in the same square class, verified by exhaustive
//! enumeration at small primes.

mod common;

use cytwist::charfield::PrimeModulus;
use cytwist::varieties::{Ambient, Catalog, CatalogEntry, VarietySpec};

/// All normalized projective representatives (first nonzero coordinate of
/// each factor equal to 1), by filtering the full vector space.
fn enumerate_points(variety: &VarietySpec, p: u64) -> Vec<Vec<u64>> {
    let Ambient::Projective(factors) = &variety.ambient else {
        panic!("enumeration wants a projective ambient");
    };
    assert!(factors.iter().all(|f| !f.is_weighted()));
    let n = variety.coordinates();
    let pm = PrimeModulus::new(p).unwrap();
    let mut out = Vec::new();
    let mut coords = vec![0u64; n];
    'outer: loop {
        let mut base = 0;
        let mut normalized = true;
        for f in factors {
            match coords[base..base + f.dim + 1].iter().find(|&&c| c != 0) {
                Some(&1) => {}
                _ => normalized = false,
            }
            base += f.dim + 1;
        }
        if normalized
            && variety
                .equations
                .iter()
                .all(|eq| eq.evaluate_mod_p(&coords, &pm).unwrap() == 0)
        {
            out.push(coords.clone());
        }
        for i in (0..n).rev() {
            coords[i] += 1;
            if coords[i] < p {
                continue 'outer;
            }
            coords[i] = 0;
        }
        break;
    }
    out
}

/// Rescale each factor so its first nonzero coordinate is 1.
fn normalize(point: &[u64], variety: &VarietySpec, p: u64) -> Vec<u64> {
    let Ambient::Projective(factors) = &variety.ambient else {
        unreachable!()
    };
    let pm = PrimeModulus::new(p).unwrap();
    let mut out = point.to_vec();
    let mut base = 0;
    for f in factors {
        let first = out[base..base + f.dim + 1]
            .iter()
            .find(|&&c| c != 0)
            .copied()
            .expect("projective point has a nonzero coordinate");
        if first != 1 {
            let inv = pm.pow(first, p - 2);
            for c in out[base..base + f.dim + 1].iter_mut() {
                *c = *c * inv % p;
            }
        }
        base += f.dim + 1;
    }
    out
}

fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    (1..p).find(|&s| s * s % p == a % p)
}

/// For d and d' in the same square class mod p, the diagonal change with some
/// square root must carry the points of one specialization bijectively onto
/// the other.
fn check_family(entry: &CatalogEntry, p: u64, d: i64, d_prime: i64) {
    let pm = PrimeModulus::new(p).unwrap();
    let fam = entry.twist_family().unwrap();
    let spec_d = entry.specialize(d).unwrap();
    let spec_dp = entry.specialize(d_prime).unwrap();
    let from = enumerate_points(&spec_dp, p);
    let targets: std::collections::BTreeSet<Vec<u64>> =
        enumerate_points(&spec_d, p).into_iter().collect();
    assert_eq!(from.len(), targets.len(), "{} p={p}", entry.variety.id);

    let ratio = pm.reduce(d_prime) * pm.pow(pm.reduce(d), p - 2) % p;
    let ratio_inv = pm.pow(ratio, p - 2);
    let mut worked = false;
    for target_ratio in [ratio, ratio_inv] {
        let Some(s) = sqrt_mod(target_ratio, p) else {
            continue;
        };
        let mut images = std::collections::BTreeSet::new();
        let mut all_land = true;
        for pt in &from {
            let image = normalize(&fam.change.apply_mod_p(pt, s, p), &spec_d, p);
            if !targets.contains(&image) {
                all_land = false;
                break;
            }
            images.insert(image);
        }
        if all_land && images.len() == from.len() {
            worked = true;
            break;
        }
    }
    assert!(
        worked,
        "{} p={p}: no square root of d'/d or d/d' induces a bijection",
        entry.variety.id
    );
}

#[test]
fn diagonal_changes_are_point_bijections() {
    let cat = Catalog::builtin();
    // (id, p, same-class pairs): 2 is a square mod 7, 3 and 5 are not;
    // mod 11 the classes {1, 3, 5} and {2, -1} work the same way.
    let cases: &[(&str, u64, &[(i64, i64)])] = &[
        ("schoen-quintic-uv", 7, &[(1, 2), (3, 5), (-1, 3)]),
        ("schoen-quintic-uv", 11, &[(1, 3), (2, -1)]),
        ("v33-uv", 7, &[(1, 2), (3, 5)]),
        ("v24", 7, &[(1, 2), (3, 5)]),
        ("vgn", 3, &[(1, -2), (2, 5)]),
        ("hirzebruch-quintic", 7, &[(1, 2), (3, 5)]),
        ("beauville-V", 7, &[(1, 2), (3, 5), (-1, 3)]),
        ("beauville-V", 11, &[(1, 3), (2, -1)]),
        ("elliptic-calibration", 7, &[(1, 2), (3, 5)]),
        ("elliptic-calibration", 13, &[(1, 3), (2, 5)]),
    ];
    for &(id, p, pairs) in cases {
        let entry = cat.get(id).unwrap();
        for &(d, d_prime) in pairs {
            check_family(entry, p, d, d_prime);
        }
    }
}

#[test]
fn specializations_keep_their_multidegrees() {
    let cat = Catalog::builtin();
    for entry in cat.families() {
        let base_degrees: Vec<_> = entry
            .variety
            .equations
            .iter()
            .map(|e| e.multi_degree())
            .collect();
        for d in [-1i64, 2, -2, 3, -3, 5, 6, -30] {
            let spec = entry.specialize(d).unwrap();
            let degrees: Vec<_> = spec.equations.iter().map(|e| e.multi_degree()).collect();
            assert_eq!(degrees, base_degrees, "{} d={d}", entry.variety.id);
        }
    }
}
