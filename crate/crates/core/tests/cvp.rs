use latgauss::cvp::{
    ccvp_solve, cluster_test, exact_cvp, good_index, simple_reduction_cvp, sparse_shift_count, CcvpConfig, CvpConfig,
};
use latgauss::lattice::{cvp_enum, hkz_basis, Basis, ShiftedLattice};
use latgauss::rational::{q_frac, q_int, Q};
use latgauss::rng::rng_from_seed;
use proptest::prelude::*;

fn basis(rows: &[Vec<i64>]) -> Basis {
    Basis::from_integers(rows).unwrap()
}

// Nearest lattice points by brute force over a coefficient box.
fn box_min(b: &Basis, t: &[Q], r: i64) -> Q {
    let lat = ShiftedLattice::new(b.clone(), t.to_vec()).unwrap();
    let n = b.rank();
    let mut y = vec![-r; n];
    let mut best = lat.dist_sq_exact(&y);
    loop {
        let d = lat.dist_sq_exact(&y);
        if d < best {
            best = d;
        }
        let mut i = 0;
        while i < n && y[i] == r {
            y[i] = -r;
            i += 1;
        }
        if i == n {
            return best;
        }
        y[i] += 1;
    }
}

#[test]
fn ccvp_hits_the_closest_coset_on_z2() {
    // t = (0.4, 0.1): the closest point is the origin, the next one is
    // (1, 0) at a clearly larger distance
    let b = basis(&[vec![1, 0], vec![0, 1]]);
    let t = vec![q_frac(2, 5), q_frac(1, 10)];
    let mut rng = rng_from_seed(31);
    let trials = 100;
    let hits = (0..trials)
        .filter(|_| {
            let c = ccvp_solve(&b, &t, &CcvpConfig::default(), &mut rng).unwrap();
            c.vectors.first() == Some(&vec![0, 0])
        })
        .count();
    assert!(hits * 100 >= 95 * trials, "{hits}/{trials}");
}

#[test]
fn exact_cvp_breaks_ties_to_a_closest_point() {
    // deep hole of Z²: four closest points at squared distance 1/2
    let b = basis(&[vec![1, 0], vec![0, 1]]);
    let t = vec![q_frac(1, 2), q_frac(1, 2)];
    let s = exact_cvp(&b, &t, &CvpConfig::default(), &mut rng_from_seed(32)).unwrap();
    assert_eq!(s.dist_sq, q_frac(1, 2));
    assert!(s.coeffs.iter().all(|c| *c == 0 || *c == 1));
}

#[test]
fn census_starts_at_full_rank() {
    let b = basis(&[vec![4, 1, 0, 1], vec![1, 5, 1, 0], vec![0, 1, 6, 2], vec![1, 0, 2, 7]]);
    let t = vec![q_frac(1, 3), q_frac(5, 2), q_frac(-7, 4), q_frac(2, 5)];
    let s = exact_cvp(&b, &t, &CvpConfig::default(), &mut rng_from_seed(33)).unwrap();
    assert_eq!(s.census.first(), Some(&(4, 1)));
    assert_eq!(s.dist_sq, cvp_enum(&b, &t).unwrap().dist_sq);
}

#[test]
fn clustering_holds_within_a_coset() {
    // every same-coset pair among the points with squared distance below
    // d² + r² passes the cluster test
    let b = hkz_basis(&basis(&[vec![3, 1, 0], vec![-1, 4, 2], vec![0, 2, 5]])).unwrap().basis;
    let t = vec![q_frac(7, 5), q_frac(-2, 3), q_frac(9, 4)];
    let lat = ShiftedLattice::new(b.clone(), t.clone()).unwrap();
    let d_sq = cvp_enum(&b, &t).unwrap().dist_sq;
    let r_sq = b.gs().exact.norms_sq.iter().max().unwrap().clone();
    let cut = &d_sq + &r_sq;
    let mut pts = Vec::new();
    for a in -4..=4i64 {
        for c in -4..=4i64 {
            for e in -4..=4i64 {
                let y = vec![a, c, e];
                if lat.dist_sq_exact(&y) < cut {
                    pts.push(y);
                }
            }
        }
    }
    let mut pairs = 0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[i].iter().zip(&pts[j]).all(|(x, y)| (x - y) % 2 == 0) {
                pairs += 1;
                assert!(cluster_test(&lat, &pts[i], &pts[j], &r_sq, &r_sq).unwrap());
            }
        }
    }
    assert!(pairs > 0);
}

#[test]
fn shift_count_within_bound() {
    let b = basis(&[vec![2, 0, 1], vec![1, 3, 0], vec![0, 1, 4]]);
    let t = vec![q_frac(1, 2), q_frac(1, 3), q_frac(3, 4)];
    for k in 1..=3 {
        for ell in k..=4 {
            for s in [1.0, 2.0, 3.0] {
                let c = sparse_shift_count(&b, &t, k, ell, s).unwrap();
                if c.condition_ok {
                    assert!(c.count >= 1 && c.count as f64 <= c.bound, "k={k} l={ell} s={s}: {c:?}");
                }
            }
        }
    }
}

#[test]
fn good_index_window_is_long_enough() {
    let h = hkz_basis(&basis(&[vec![1, 0, 0], vec![0, 10, 0], vec![0, 0, 100]])).unwrap();
    let gi = good_index(&h, 1).unwrap();
    assert!(gi.k >= 1 && gi.k <= 3);
    assert!(gi.shift_bound >= 1.0);
}

#[test]
fn simple_reduction_with_an_exact_oracle() {
    let b = basis(&[vec![5, 2, 0, 1], vec![1, -4, 3, 0], vec![2, 1, 6, -1], vec![0, 3, 1, 7]]);
    let t = vec![q_frac(9, 4), q_frac(-3, 2), q_frac(5, 3), q_int(2)];
    let mut oracle = |bb: &Basis, tt: &[Q]| cvp_enum(bb, tt).map(|c| c.coeffs);
    let y = simple_reduction_cvp(&b, &t, &mut oracle).unwrap();
    let lat = ShiftedLattice::new(b.clone(), t.clone()).unwrap();
    assert_eq!(lat.dist_sq_exact(&y), box_min(&b, &t, 3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exact_cvp_matches_brute_force(
        rows in prop::collection::vec(prop::collection::vec(-5i64..=5, 3), 3),
        num in prop::collection::vec(-40i64..=40, 3),
        seed in any::<u64>(),
    ) {
        let Ok(b) = Basis::from_integers(&rows) else { return Ok(()) };
        let t: Vec<Q> = num.iter().map(|&p| q_frac(p, 7)).collect();
        let cfg = CvpConfig { repeat: 5, ..Default::default() };
        let s = exact_cvp(&b, &t, &cfg, &mut rng_from_seed(seed)).unwrap();
        let want = cvp_enum(&b, &t).unwrap().dist_sq;
        prop_assert_eq!(&s.dist_sq, &want);
        let lat = ShiftedLattice::new(b, t).unwrap();
        prop_assert_eq!(lat.dist_sq_exact(&s.coeffs), want);
    }
}
