use std::collections::HashMap;

use latgauss::gaussian::{
    check_rs_holder, check_rs_identity, coset_ladder, coset_mass, coset_masses, m_target, mass, rho,
    sample_1d, support, ExactSampler, KleinSampler,
};
use latgauss::lattice::{cvp_enum, Basis, CosetLabel, ShiftedLattice};
use latgauss::rational::{q_frac, q_from_f64, Q};
use latgauss::rng::rng_from_seed;
use proptest::prelude::*;
use rand::Rng;

const EPS: f64 = 1e-12;

fn ident(n: usize) -> Basis {
    let rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    Basis::from_integers(&rows).unwrap()
}

fn shifted(b: &Basis, t: &[f64]) -> ShiftedLattice {
    ShiftedLattice::new(b.clone(), t.iter().map(|&x| q_from_f64(x).unwrap()).collect()).unwrap()
}

// Direct sum of exp(-pi (k*step + off)^2 / s^2) for |k| <= 60.
fn sum_1d(step: f64, off: f64, s: f64) -> f64 {
    (-60..=60).map(|k| (-std::f64::consts::PI * (k as f64 * step + off).powi(2) / (s * s)).exp()).sum()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

#[test]
fn rho_direct_values() {
    assert_eq!(rho(1.0, &[0.0]), 1.0);
    assert!(close(rho(1.0, &[1.0]), 0.04321391826377226, 1e-14));
    assert!(close(rho(2.0, &[1.0, 1.0]), (-std::f64::consts::FRAC_PI_2).exp(), 1e-14));
}

#[test]
fn one_dim_masses_match_direct_sums() {
    let z = shifted(&ident(1), &[0.0]);
    let m = mass(&z, 1.0, EPS).unwrap();
    assert!(m.rel_err <= EPS);
    assert!(close(m.value(), sum_1d(1.0, 0.0, 1.0), 1e-12));
    assert!(close(m.value(), 1.0864348112, 1e-10));
    let cm = coset_masses(&z, 1.0, EPS).unwrap();
    let even = cm.get(CosetLabel::zero(1)).value();
    let odd = cm.get(CosetLabel::from_coeffs(&[1])).value();
    assert!(close(even, sum_1d(2.0, 0.0, 1.0), 1e-12));
    assert!(close(odd, sum_1d(2.0, 1.0, 1.0), 1e-12));
    assert!(close(even, 1.0000069747, 1e-10));
    assert!(close(odd, 0.0864278365, 1e-9));
    let mt = m_target(&z, 1.0, EPS).unwrap();
    assert!(close(mt, sum_1d(1.0, 0.0, 1.0) / sum_1d(2.0, 0.0, 1.0), 1e-12));
    assert!(close(mt, 1.0864272, 1e-7));
}

#[test]
fn coset_containing_origin_dominates_half_shift() {
    let lat = shifted(&ident(2), &[0.5, 0.0]);
    let cm = coset_masses(&lat, 1.0, EPS).unwrap();
    // cosets (0,0) and (1,0) tie for the shift (0.5, 0); the second coordinate picks even
    let best = cm.max().value();
    let zero = cm.get(CosetLabel::zero(2)).value();
    assert!(close(best, zero, 1e-12));
    assert!(zero > cm.get(CosetLabel::from_coeffs(&[0, 1])).value());
}

#[test]
fn m_target_limits() {
    let z2 = shifted(&ident(2), &[0.0, 0.0]);
    let small = m_target(&z2, 0.05, EPS).unwrap();
    assert!((small - 1.0).abs() < 1e-12);
    let big = m_target(&z2, 100.0, EPS).unwrap();
    assert!((big - 4.0).abs() < 1e-9, "{big}");
}

#[test]
fn sample_1d_zero_probability() {
    let mut rng = rng_from_seed(11);
    let n = 200_000;
    let zeros = (0..n).filter(|_| sample_1d(&mut rng, 0.0, 1.0) == 0).count();
    let p = 1.0 / sum_1d(1.0, 0.0, 1.0);
    let sd = (p * (1.0 - p) / n as f64).sqrt();
    assert!((zeros as f64 / n as f64 - p).abs() < 5.0 * sd);
    assert!((p - 0.92044).abs() < 1e-5);
}

#[test]
fn sample_1d_tiny_width_is_rounding() {
    let mut rng = rng_from_seed(12);
    for _ in 0..10_000 {
        assert_eq!(sample_1d(&mut rng, 0.2, 0.01), 0);
    }
}

#[test]
fn sample_1d_symmetric_and_wide() {
    let mut rng = rng_from_seed(13);
    let n = 100_000;
    let mut pos = 0usize;
    let mut neg = 0usize;
    for _ in 0..n {
        let k = sample_1d(&mut rng, 0.0, 3.0);
        if k > 0 {
            pos += 1;
        } else if k < 0 {
            neg += 1;
        }
    }
    let tot = (pos + neg) as f64;
    assert!(((pos as f64) - tot / 2.0).abs() < 5.0 * (tot / 4.0).sqrt());
    // rejection branch: mean and variance of D_{Z+c, s} for large s
    let s = 200.0;
    let c = 0.37;
    let draws: Vec<f64> = (0..n).map(|_| sample_1d(&mut rng, c, s) as f64).collect();
    let mean = draws.iter().sum::<f64>() / n as f64;
    let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    let sigma2 = s * s / (2.0 * std::f64::consts::PI);
    assert!((mean - c).abs() < 5.0 * (sigma2 / n as f64).sqrt());
    assert!((var / sigma2 - 1.0).abs() < 0.03);
}

fn tv_against_support(counts: &HashMap<Vec<i64>, usize>, sup: &latgauss::gaussian::Support, draws: usize) -> f64 {
    let mut tv = 0.0;
    let mut seen = 0usize;
    for i in 0..sup.len() {
        let c = counts.get(sup.point(i)).copied().unwrap_or(0);
        seen += c;
        tv += (c as f64 / draws as f64 - sup.probs[i]).abs();
    }
    tv += (draws - seen) as f64 / draws as f64;
    tv / 2.0
}

#[test]
fn klein_matches_exact_on_z2() {
    // s = 3 on Z^2 needs a klein factor below the default of 4
    let lat = shifted(&ident(2), &[0.5, 0.5]);
    let klein = KleinSampler::new(lat.clone(), 3.0, 2.0).unwrap();
    assert!(KleinSampler::new(lat.clone(), 3.0, 4.0).is_err());
    let sup = support(&lat, 3.0, 1e-9).unwrap();
    let mut rng = rng_from_seed(21);
    let draws = 100_000;
    let mut counts = HashMap::new();
    for _ in 0..draws {
        *counts.entry(klein.sample(&mut rng)).or_insert(0usize) += 1;
    }
    let tv = tv_against_support(&counts, &sup, draws);
    assert!(tv <= 0.02, "tv {tv}");
}

#[test]
fn exact_sampler_matches_its_support_and_degenerates() {
    let b = Basis::from_integers(&[vec![2, 0], vec![1, 3]]).unwrap();
    let lat = shifted(&b, &[0.3, 0.4]);
    let ex = ExactSampler::new(&lat, 4.0, 1e-9).unwrap();
    let mut rng = rng_from_seed(22);
    let draws = 100_000;
    let mut counts = HashMap::new();
    for _ in 0..draws {
        *counts.entry(ex.sample(&mut rng).to_vec()).or_insert(0usize) += 1;
    }
    assert!(tv_against_support(&counts, ex.support(), draws) <= 0.02);
    // tiny s: all mass on the closest vector
    let tiny = ExactSampler::new(&lat, 0.01, 1e-9).unwrap();
    let cv = cvp_enum(&b, lat.target()).unwrap();
    let y = tiny.sample(&mut rng).to_vec();
    assert_eq!(y, cv.coeffs);
    // centered: mode at the origin
    let cen = ExactSampler::new(&ShiftedLattice::centered(b.clone()), 2.0, 1e-9).unwrap();
    let sup = cen.support();
    let best = (0..sup.len()).max_by(|&i, &j| sup.probs[i].total_cmp(&sup.probs[j])).unwrap();
    assert!(sup.point(best).iter().all(|&c| c == 0));
}

#[test]
fn klein_huge_parameter_equidistributes_labels() {
    let b = Basis::from_integers(&[vec![3, 1], vec![-1, 4]]).unwrap();
    let lat = shifted(&b, &[0.2, 0.9]);
    let s = 1e6 * b.max_gs_norm();
    let klein = KleinSampler::new(lat, s, 4.0).unwrap();
    let mut rng = rng_from_seed(23);
    let draws = 40_000;
    let mut counts = [0usize; 4];
    for _ in 0..draws {
        let y = klein.sample(&mut rng);
        counts[CosetLabel::from_coeffs(&y).index()] += 1;
    }
    let e = draws as f64 / 4.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    // 3 degrees of freedom, p = 0.001 critical value
    assert!(chi2 < 16.27, "chi2 {chi2}");
}

#[test]
fn identity_residuals() {
    let z = ident(1);
    let r = check_rs_identity(&z, &[q_frac(3, 10)], &[q_frac(7, 10)], 1.0, EPS).unwrap();
    assert!(r <= 1e-9);
    let r0 = check_rs_identity(&z, &[q_frac(0, 1)], &[q_frac(0, 1)], 1.3, EPS).unwrap();
    assert!(r0 <= 3.0 * EPS);
    let b = Basis::from_integers(&[vec![3, 1], vec![1, 2]]).unwrap();
    let x: Vec<Q> = vec![q_frac(1, 3), q_frac(-2, 7)];
    let y: Vec<Q> = vec![q_frac(5, 11), q_frac(1, 2)];
    assert!(check_rs_identity(&b, &x, &y, 1.7, EPS).unwrap() <= 1e-9);
}

#[test]
fn holder_at_origin_and_small_s() {
    let b = Basis::from_integers(&[vec![2, 1], vec![0, 3]]).unwrap();
    let cen = ShiftedLattice::centered(b.clone());
    let h = check_rs_holder(&cen, 2.0, EPS).unwrap();
    // at t = 0 the left side is rho_s(2L)^2
    let two_l = Basis::from_integers(&[vec![4, 2], vec![0, 6]]).unwrap();
    let r2l = mass(&ShiftedLattice::centered(two_l), 2.0, EPS).unwrap();
    assert!((h.log_lhs - 2.0 * r2l.log_mass).abs() < 1e-11);
    assert!(h.margin >= -1e-9);
    let small = check_rs_holder(&shifted(&b, &[0.4, 0.1]), 0.05, EPS).unwrap();
    assert!(small.margin >= -1e-9 && small.margin < 1e-6);
}

#[test]
fn ladder_on_integers_and_2d() {
    let z = shifted(&ident(1), &[0.0]);
    let tr = coset_ladder(&z, 4.0, 4, EPS, 1e-9).unwrap();
    assert!((1..=4).contains(&tr.chosen_i));
    // t = 0 and y = 0: the sandwich ratio is max-coset / rho(2L) = 1
    for q in &tr.sandwich {
        assert!((q - 1.0).abs() < 1e-9);
    }
    assert!(tr.sandwich_holds(1, 1e-9));
    let b = Basis::from_integers(&[vec![3, 1], vec![1, 2]]).unwrap();
    let lat = shifted(&b, &[0.61, -1.27]);
    let tr = coset_ladder(&lat, 5.0, 6, EPS, 1e-9).unwrap();
    assert!(tr.sandwich_holds(2, 1e-9), "{tr:?}");
    let cap = 2f64.powf(2.0 / 4.0) + 1e-9;
    assert!(tr.s_ratios.iter().all(|&s| s >= 1.0 - 1e-9 && s <= cap));
}

#[test]
fn mass_record_format() {
    let m = mass(&shifted(&ident(1), &[0.0]), 1.0, EPS).unwrap();
    let rec = m.record();
    assert!(rec.starts_with("mass log=") && rec.contains(" relerr="));
}

fn basis_2d() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1i64..5, -4i64..5, 1i64..5).prop_map(|(a, b, c)| vec![vec![a, 0], vec![b, c]])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partition_identity(rows in basis_2d(), t0 in -2.0f64..2.0, t1 in -2.0f64..2.0, s in 0.3f64..4.0) {
        let b = Basis::from_integers(&rows).unwrap();
        let lat = shifted(&b, &[t0, t1]);
        let total = mass(&lat, s, EPS).unwrap().value();
        let parts = coset_masses(&lat, s, EPS).unwrap();
        let sum: f64 = parts.masses.iter().map(|m| m.value()).sum();
        prop_assert!((sum / total - 1.0).abs() <= 8.0 * EPS);
        let c = CosetLabel::from_coeffs(&[1, 0]);
        prop_assert!((coset_mass(&lat, c, s, EPS).unwrap().value() / parts.get(c).value() - 1.0).abs() < 1e-12);
        let m = m_target(&lat, s, EPS).unwrap();
        prop_assert!(m >= 1.0 - 1e-12 && m <= 4.0 + 1e-12);
    }

    #[test]
    fn shift_bounds_and_monotone(rows in basis_2d(), t0 in -2.0f64..2.0, t1 in -2.0f64..2.0, s in 0.3f64..3.0) {
        let b = Basis::from_integers(&rows).unwrap();
        let lat = shifted(&b, &[t0, t1]);
        let cen = ShiftedLattice::centered(b.clone());
        let ratio = mass(&lat, s, EPS).unwrap().value() / mass(&cen, s, EPS).unwrap().value();
        let t_norm = [t0, t1];
        prop_assert!(ratio <= 1.0 + 1e-12);
        prop_assert!(ratio >= rho(s, &t_norm) * (1.0 - 1e-12));
        let mut prev = 0.0;
        for k in 0..5 {
            let v = mass(&lat, s * (1.0 + 0.25 * k as f64), EPS).unwrap().value();
            prop_assert!(v >= prev * (1.0 - 1e-12));
            prev = v;
        }
        let big = 1.0 + s;
        prop_assert!(mass(&cen, big, EPS).unwrap().value() <= big * big * mass(&cen, 1.0, EPS).unwrap().value() * (1.0 + 1e-12));
    }

    #[test]
    fn identity_randomized(rows in basis_2d(), x in prop::array::uniform2(-2.0f64..2.0), y in prop::array::uniform2(-2.0f64..2.0), s in 0.5f64..3.0) {
        let b = Basis::from_integers(&rows).unwrap();
        let xq: Vec<Q> = x.iter().map(|&v| q_from_f64(v).unwrap()).collect();
        let yq: Vec<Q> = y.iter().map(|&v| q_from_f64(v).unwrap()).collect();
        prop_assert!(check_rs_identity(&b, &xq, &yq, s, EPS).unwrap() <= 3.0 * EPS + 1e-13);
    }

    #[test]
    fn holder_randomized(rows in basis_2d(), t in prop::array::uniform2(-2.0f64..2.0), s in 0.3f64..4.0) {
        let b = Basis::from_integers(&rows).unwrap();
        let h = check_rs_holder(&shifted(&b, &t), s, EPS).unwrap();
        prop_assert!(h.margin >= -1e-9);
    }

    #[test]
    fn empirical_tail_below_bound(seed in 0u64..1000) {
        let b = ident(2);
        let lat = shifted(&b, &[0.25, -0.5]);
        let s = 1.5;
        let ex = ExactSampler::new(&lat, s, 1e-12).unwrap();
        let mut rng = rng_from_seed(seed);
        let r = 1.0;
        let n = 2usize;
        let d = (0.25f64 * 0.25 + 0.25).sqrt();
        let log_bound = latgauss::gaussian::tail::log_tail_bound(n, std::f64::consts::PI * d * d / (s * s), r);
        let draws = 2000;
        let far = (0..draws).filter(|_| lat.dist_sq(ex.sample(&mut rng)) >= (r * s).powi(2) * n as f64).count();
        let p = far as f64 / draws as f64;
        prop_assert!(p <= log_bound.exp() + 5.0 * (log_bound.exp() / draws as f64).sqrt());
        let _ = rng.gen::<u8>();
    }
}
