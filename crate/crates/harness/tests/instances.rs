use latgauss::lattice::{cvp_enum, ShiftedLattice};
use latgauss::rational::{q_frac, q_to_f64};
use latgauss_harness::{gen_instance, TargetMode};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn instances_are_full_rank_and_reproducible(n in 1usize..=6, bound in 1i64..=12, seed in any::<u64>(), m in 0usize..3) {
        let mode = TargetMode::mixed(m);
        let a = gen_instance(n, bound, seed, mode).unwrap();
        let b = gen_instance(n, bound, seed, mode).unwrap();
        prop_assert_eq!(a.hash(), b.hash());
        prop_assert_eq!(a.basis.rank(), n);
        prop_assert!(a.basis.gram_det() != q_frac(0, 1));
        prop_assert_eq!(a.target.len(), n);
        for row in a.basis.rows() {
            for x in row {
                prop_assert!(x.is_integer() && q_to_f64(x).abs() <= bound as f64);
            }
        }
    }
}

#[test]
fn deep_holes_sit_at_half_integer_coefficients() {
    for seed in 0..20 {
        let inst = gen_instance(3, 8, seed, TargetMode::DeepHole).unwrap();
        let lat = ShiftedLattice::new(inst.basis.clone(), inst.target.clone()).unwrap();
        let c = lat.target_coefficients().unwrap();
        assert!(c.iter().all(|x| (x * q_frac(2, 1)).is_integer()));
        assert!(c.iter().any(|x| !x.is_integer()));
    }
}

#[test]
fn near_targets_are_near() {
    for seed in 0..20 {
        let inst = gen_instance(4, 10, seed, TargetMode::NearLattice { noise: 0.25 }).unwrap();
        let d = cvp_enum(&inst.basis, &inst.target).unwrap().dist_sq;
        assert!(d <= q_frac(4, 16));
    }
}
