use std::collections::BTreeMap;

use latgauss::rng::rng_from_seed;
use latgauss_harness::stats::{chi2_tv, ks_uniform};
use rand::Rng;

fn draw(p: &[f64], n: usize, rng: &mut impl Rng) -> BTreeMap<usize, u64> {
    let mut counts = BTreeMap::new();
    for _ in 0..n {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let i = p.iter().position(|&x| {
            acc += x;
            u < acc
        });
        *counts.entry(i.unwrap_or(p.len() - 1)).or_insert(0) += 1;
    }
    counts
}

// Under the null the p-values of the χ² test are close to uniform.
#[test]
fn chi2_p_values_are_calibrated() {
    let p = [0.4, 0.3, 0.15, 0.1, 0.04, 0.01];
    let expected: BTreeMap<usize, f64> = p.iter().copied().enumerate().collect();
    let mut rng = rng_from_seed(41);
    let ps: Vec<f64> = (0..300).map(|_| chi2_tv(&draw(&p, 2000, &mut rng), &expected).unwrap().p_value).collect();
    let (d, pv) = ks_uniform(&ps);
    assert!(pv > 1e-3, "D = {d}, p = {pv}");
}

#[test]
fn chi2_detects_a_shifted_law() {
    let p = [0.5, 0.3, 0.2];
    let q = [0.45, 0.3, 0.25];
    let expected: BTreeMap<usize, f64> = p.iter().copied().enumerate().collect();
    let mut rng = rng_from_seed(42);
    let r = chi2_tv(&draw(&q, 20_000, &mut rng), &expected).unwrap();
    assert!(r.p_value < 1e-6);
    assert!((r.tv - 0.05).abs() < 0.01);
}
