//! Samplers: exact one-dimensional, Klein's randomized nearest plane, and
//! an inverse-CDF sampler over the enumerated support.

use std::f64::consts::PI;

use rand::Rng;

use super::mass::{support, Support};
use crate::error::{Error, Result};
use crate::lattice::ShiftedLattice;

pub const DEFAULT_KLEIN_FACTOR: f64 = 4.0;

// Above this parameter the outward walk gets long; switch to rejection.
const WALK_LIMIT: f64 = 48.0;

/// Σ_k exp(−π(k − c)²/s²) by Poisson summation; accurate for s ≥ 1.5.
fn theta_sum(c: f64, s: f64) -> f64 {
    let mut z = 1.0;
    let mut m = 1.0;
    loop {
        let w = (-PI * m * m * s * s).exp();
        if w < 1e-20 {
            break;
        }
        z += 2.0 * w * (2.0 * PI * m * c).cos();
        m += 1.0;
    }
    s * z
}

/// Integer k with probability ∝ ρ_s(k − c), over the window
/// |k − c| ≤ 10s + 1. Exact inverse CDF, walking outward from the mode.
pub fn sample_1d<R: Rng + ?Sized>(rng: &mut R, c: f64, s: f64) -> i64 {
    debug_assert!(s > 0.0);
    let w = 10.0 * s + 1.0;
    let lo = (c - w).ceil();
    let hi = (c + w).floor();
    if s > WALK_LIMIT {
        return rejection(rng, c, s, lo, hi);
    }
    let a = PI / (s * s);
    let k0 = c.round();
    let off = k0 - c;
    // weights relative to the mode
    let q = (-2.0 * a).exp();
    let mut rr = (-a * (2.0 * off + 1.0)).exp();
    let mut rl = (-a * (1.0 - 2.0 * off)).exp();
    let z_rel = if s >= 1.5 {
        theta_sum(c, s) / (-a * off * off).exp()
    } else {
        let mut z = 1.0;
        let (mut wr, mut wl, mut r1, mut l1) = (1.0, 1.0, rr, rl);
        let mut k = k0 + 1.0;
        while k <= hi {
            wr *= r1;
            r1 *= q;
            z += wr;
            k += 1.0;
        }
        k = k0 - 1.0;
        while k >= lo {
            wl *= l1;
            l1 *= q;
            z += wl;
            k -= 1.0;
        }
        z
    };
    let u = rng.gen::<f64>() * z_rel;
    let mut acc = 1.0;
    if u < acc {
        return k0 as i64;
    }
    let (mut kr, mut kl) = (k0 + 1.0, k0 - 1.0);
    let (mut wr, mut wl) = (rr, rl);
    loop {
        let right_ok = kr <= hi;
        let left_ok = kl >= lo;
        if !right_ok && !left_ok {
            // rounding slack at the window edge
            return if c - lo > hi - c { lo as i64 } else { hi as i64 };
        }
        let take_right = right_ok && (!left_ok || wr >= wl);
        if take_right {
            acc += wr;
            if u < acc {
                return kr as i64;
            }
            rr *= q;
            wr *= rr;
            kr += 1.0;
        } else {
            acc += wl;
            if u < acc {
                return kl as i64;
            }
            rl *= q;
            wl *= rl;
            kl -= 1.0;
        }
    }
}

fn rejection<R: Rng + ?Sized>(rng: &mut R, c: f64, s: f64, lo: f64, hi: f64) -> i64 {
    let a = PI / (s * s);
    let (lo, hi) = (lo as i64, hi as i64);
    loop {
        let k = rng.gen_range(lo..=hi);
        let d = k as f64 - c;
        if rng.gen::<f64>() < (-a * d * d).exp() {
            return k;
        }
    }
}

/// Klein's randomized nearest-plane sampler for D_{L−t,s}.
#[derive(Clone, Debug)]
pub struct KleinSampler {
    lat: ShiftedLattice,
    s: f64,
    level_s: Vec<f64>,
    // mu_t[i][j] = μ_{j,i} for j > i
    mu_t: Vec<Vec<f64>>,
}

impl KleinSampler {
    /// Checks s ≥ klein_factor·√ln(n+2)·max||b̃_i||.
    pub fn new(lat: ShiftedLattice, s: f64, klein_factor: f64) -> Result<Self> {
        let n = lat.rank();
        let required = klein_factor * ((n as f64 + 2.0).ln()).sqrt() * lat.basis().max_gs_norm();
        if !(s >= required) || !s.is_finite() {
            return Err(Error::KleinParameterTooSmall { s, required });
        }
        let gs = lat.basis().gs();
        let level_s = gs.gs_norms.iter().map(|g| s / g).collect();
        let mu_t = (0..n).map(|i| (0..n).map(|j| if j > i { gs.mu[j][i] } else { 0.0 }).collect()).collect();
        Ok(KleinSampler { lat, s, level_s, mu_t })
    }

    pub fn lattice(&self) -> &ShiftedLattice {
        &self.lat
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Write the coefficients y of one sample B·y − t into `out`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [i64]) {
        let n = self.level_s.len();
        let tau = self.lat.tau();
        for i in (0..n).rev() {
            let row = &self.mu_t[i];
            let mut c = tau[i];
            for j in i + 1..n {
                c -= row[j] * out[j] as f64;
            }
            out[i] = sample_1d(rng, c, self.level_s[i]);
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<i64> {
        let mut y = vec![0; self.level_s.len()];
        self.sample_into(rng, &mut y);
        y
    }
}

/// One Klein sample with the default precondition factor.
pub fn sample_klein<R: Rng + ?Sized>(lat: &ShiftedLattice, s: f64, rng: &mut R) -> Result<Vec<i64>> {
    Ok(KleinSampler::new(lat.clone(), s, DEFAULT_KLEIN_FACTOR)?.sample(rng))
}

/// Inverse-CDF sampler over the certified support.
#[derive(Clone, Debug)]
pub struct ExactSampler {
    support: Support,
    cdf: Vec<f64>,
}

impl ExactSampler {
    pub fn new(lat: &ShiftedLattice, s: f64, eps_rel: f64) -> Result<Self> {
        let support = support(lat, s, eps_rel)?;
        let mut cdf = Vec::with_capacity(support.len());
        let mut acc = 0.0;
        for p in &support.probs {
            acc += p;
            cdf.push(acc);
        }
        Ok(ExactSampler { support, cdf })
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.gen::<f64>() * self.cdf[self.cdf.len() - 1];
        self.cdf.partition_point(|&x| x <= u).min(self.cdf.len() - 1)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &[i64] {
        let i = self.sample_index(rng);
        self.support.point(i)
    }
}

pub fn sample_exact<R: Rng + ?Sized>(lat: &ShiftedLattice, s: f64, rng: &mut R) -> Result<Vec<i64>> {
    Ok(ExactSampler::new(lat, s, 1e-12)?.sample(rng).to_vec())
}
