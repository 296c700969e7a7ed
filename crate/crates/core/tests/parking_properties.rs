use std::collections::{BTreeMap, BTreeSet};

use avalanche_core::avalanche::for_each_avalanche;
use avalanche_core::parking::{
    concat_parking, is_parking, parking_to_recurrent, phi, phi_inverse, recurrent_to_parking, ParkingFunction,
};
use avalanche_core::sandpile::{enumerate_recurrents, is_recurrent};
use avalanche_core::{Error, Graph, Sandpile, DEFAULT_STATE_LIMIT};
use proptest::prelude::*;

/// Random parking function of length `n`: a shuffled vector with sorted
/// entries under the diagonal.
fn parking(max_len: usize) -> impl Strategy<Value = Vec<u64>> {
    (0..=max_len)
        .prop_flat_map(|n| (prop::collection::vec(0u64..=10, n), Just(n)))
        .prop_flat_map(|(raw, n)| {
            let mut v: Vec<u64> = raw.iter().enumerate().map(|(i, &x)| x % (i as u64 + 1)).collect();
            v.sort_unstable();
            Just(v).prop_shuffle().prop_map(move |p| {
                debug_assert_eq!(p.len(), n);
                p
            })
        })
}

proptest! {
    #[test]
    fn permutations_of_parking_functions_park(p in parking(9)) {
        prop_assert!(is_parking(&p));
        let mut rev = p.clone();
        rev.reverse();
        prop_assert!(is_parking(&rev));
        let mut rot = p.clone();
        if !rot.is_empty() {
            rot.rotate_left(1);
        }
        prop_assert!(is_parking(&rot));
    }

    #[test]
    fn concatenation_parks(p in parking(6), q in parking(6)) {
        let (pp, qq) = (ParkingFunction::new(p.clone()).unwrap(), ParkingFunction::new(q.clone()).unwrap());
        let r = concat_parking(&pp, &qq);
        prop_assert!(is_parking(r.values()));
        prop_assert_eq!(&r.values()[..p.len()], &p[..]);
        prop_assert_eq!(r.len(), p.len() + q.len());
    }

    #[test]
    fn parking_and_recurrents_correspond(p in parking(7)) {
        prop_assume!(!p.is_empty());
        let pf = ParkingFunction::new(p).unwrap();
        let c = parking_to_recurrent(&pf);
        let g = Graph::complete(pf.len() + 1).unwrap();
        prop_assert!(is_recurrent(&g, &c).unwrap());
        prop_assert_eq!(recurrent_to_parking(&c).unwrap(), pf);
    }
}

#[test]
fn two_level_sandpile_is_recurrent() {
    for n in 1..=6usize {
        for m in 0..=n {
            let mut p = vec![0u64; m];
            p.extend(std::iter::repeat_n(m as u64, n - m));
            assert!(is_parking(&p));
            let mut c = vec![n as u64 - 1; m];
            if m < n {
                c.extend(std::iter::repeat_n((n - 1 - m) as u64, n - m));
            }
            let c = Sandpile::new(c);
            assert_eq!(recurrent_to_parking(&c).unwrap().values(), &p[..]);
        }
    }
}

#[test]
fn recurrent_parking_round_trip() {
    for n in 1..=5usize {
        let g = Graph::complete(n + 1).unwrap();
        let mut count = 0;
        for c in enumerate_recurrents(&g, DEFAULT_STATE_LIMIT).unwrap() {
            let p = recurrent_to_parking(&c).unwrap();
            assert_eq!(parking_to_recurrent(&p), c);
            count += 1;
        }
        assert_eq!(count, (n + 1).pow(n as u32 - 1));
    }
}

#[test]
fn avalanche_bounds_on_complete_graphs() {
    for n in 1..=5usize {
        let g = Graph::complete(n + 1).unwrap();
        let nn = n as u64;
        for_each_avalanche(&g, DEFAULT_STATE_LIMIT, |r| {
            let m = r.size;
            if m == 0 {
                return;
            }
            let c = r.recurrent.grains();
            assert_eq!(c[r.vertex], nn - 1);
            // A legal toppling order: other toppled vertices by decreasing grains.
            let mut w: Vec<u64> = (0..n)
                .filter(|&i| i != r.vertex && r.topplings[i] > 0)
                .map(|i| c[i])
                .collect();
            w.sort_unstable_by(|a, b| b.cmp(a));
            for (k, &x) in w.iter().enumerate() {
                let i = k as u64 + 1;
                assert!(nn - i <= x && x <= nn - 1, "{:?} at {}", c, r.vertex);
            }
            let mut u: Vec<u64> = (0..n).filter(|&i| r.topplings[i] == 0).map(|i| c[i]).collect();
            u.sort_unstable_by(|a, b| b.cmp(a));
            for (i, &x) in u.iter().enumerate() {
                let i = i as u64;
                assert!(nn - m - i - 1 <= x && x <= nn - m - 1, "{:?} at {}", c, r.vertex);
            }
        })
        .unwrap();
    }
}

fn pow_or_one(base: usize, exp: i64) -> usize {
    if exp < 0 {
        assert_eq!(base, 1);
        1
    } else {
        base.pow(exp as u32)
    }
}

#[test]
fn decomposition_is_a_bijection() {
    for n in 1..=5usize {
        let g = Graph::complete(n + 1).unwrap();
        let mut images = BTreeSet::new();
        let mut per_support: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
        let mut nonempty = 0;
        for c in enumerate_recurrents(&g, DEFAULT_STATE_LIMIT).unwrap() {
            for v in 0..n {
                let img = match phi(&c, v) {
                    Ok(img) => img,
                    Err(Error::EmptyAvalanche) => continue,
                    Err(e) => panic!("{e}"),
                };
                nonempty += 1;
                let m = img.size();
                let k1 = Graph::complete(m).ok();
                if let Some(k1) = &k1 {
                    assert!(is_recurrent(k1, &img.c1).unwrap());
                }
                if n - m >= 1 {
                    let k2 = Graph::complete(n - m + 1).unwrap();
                    assert!(is_recurrent(&k2, &img.c2).unwrap());
                } else {
                    assert!(img.c2.is_empty());
                }
                assert_eq!(phi_inverse(&img).unwrap(), (c.clone(), v));
                *per_support.entry((v, img.j.clone())).or_default() += 1;
                assert!(images.insert(img), "phi is not injective");
            }
        }
        assert_eq!(images.len(), nonempty);
        assert_eq!(per_support.len(), n << (n - 1), "every (v, J) is hit");
        for ((_, j), count) in per_support {
            let m = j.len() + 1;
            let expected = pow_or_one(m, m as i64 - 2) * pow_or_one(n - m + 1, (n - m) as i64 - 1);
            assert_eq!(count, expected, "n = {n}, m = {m}");
        }
    }
}
