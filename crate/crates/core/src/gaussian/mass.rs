//! Certified truncated Gaussian masses by enumeration.

use std::f64::consts::PI;

use super::tail::{log_tail_bound_with, tail_radius};
use super::Neumaier;
use crate::error::{Error, Result};
use crate::lattice::{closest, enumerate_levels, CosetLabel, ShiftedLattice, DEFAULT_NODE_BUDGET};
use crate::rational;

/// Natural log of a truncated mass with a certified relative error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassEstimate {
    pub log_mass: f64,
    pub rel_err: f64,
}

impl MassEstimate {
    pub fn value(&self) -> f64 {
        self.log_mass.exp()
    }

    /// "mass log=<v> relerr=<v>"
    pub fn record(&self) -> String {
        format!("mass log={} relerr={:e}", self.log_mass, self.rel_err)
    }
}

/// Limits for the enumeration-backed oracles.
#[derive(Clone, Debug)]
pub struct MassConfig {
    pub dim_cap: usize,
    pub max_points: u64,
    pub max_support: usize,
}

impl Default for MassConfig {
    fn default() -> Self {
        MassConfig { dim_cap: 12, max_points: 200_000_000, max_support: 5_000_000 }
    }
}

fn check(lat: &ShiftedLattice, s: f64, eps: f64, cfg: &MassConfig) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!("s = {s}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps_rel = {eps}")));
    }
    if lat.rank() > cfg.dim_cap {
        return Err(Error::DimensionTooLarge { dim: lat.rank(), cap: cfg.dim_cap });
    }
    Ok(())
}

/// Distance from the projected target to the lattice.
fn projected_distance(lat: &ShiftedLattice) -> Result<f64> {
    let c = closest(lat, DEFAULT_NODE_BUDGET)?;
    let d2 = rational::q_to_f64(&(c.dist_sq - lat.perp_sq()));
    Ok(d2.max(0.0).sqrt())
}

/// Online log-sum-exp per key over the ball of the given projected radius.
struct Buckets {
    max: Vec<f64>,
    sum: Vec<Neumaier>,
    min_dist_sq: Vec<f64>,
}

impl Buckets {
    fn new(k: usize) -> Self {
        Buckets {
            max: vec![f64::NEG_INFINITY; k],
            sum: vec![Neumaier::default(); k],
            min_dist_sq: vec![f64::INFINITY; k],
        }
    }

    #[inline]
    fn add(&mut self, key: usize, a: f64, dist_sq: f64) {
        if a > self.max[key] {
            if self.max[key] > f64::NEG_INFINITY {
                self.sum[key].scale((self.max[key] - a).exp());
            }
            self.max[key] = a;
            self.sum[key].add(1.0);
        } else {
            self.sum[key].add((a - self.max[key]).exp());
        }
        if dist_sq < self.min_dist_sq[key] {
            self.min_dist_sq[key] = dist_sq;
        }
    }

    fn log(&self, key: usize) -> f64 {
        if self.max[key] == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max[key] + self.sum[key].total().ln()
        }
    }
}

fn ball<F>(lat: &ShiftedLattice, s: f64, radius: f64, nkeys: usize, cfg: &MassConfig, key: F) -> Result<Buckets>
where
    F: Fn(&[i64]) -> usize,
{
    let mut b = Buckets::new(nkeys);
    let mut count: u64 = 0;
    let inv = PI / (s * s);
    let r2 = radius * radius;
    let mut overflow = false;
    enumerate_levels(lat.basis().gs(), 0, lat.tau(), r2, DEFAULT_NODE_BUDGET, |y, d2| {
        count += 1;
        if count > cfg.max_points {
            overflow = true;
            return -1.0;
        }
        b.add(key(y), -inv * d2, d2);
        r2
    })
    .map_err(|_| Error::MassDidNotConverge("enumeration budget exhausted".into()))?;
    if overflow {
        return Err(Error::MassDidNotConverge(format!("more than {} points within radius {radius}", cfg.max_points)));
    }
    Ok(b)
}

/// ρ_s(L − t), truncated to a radius chosen from the tail bound so that the
/// certified relative error is at most `eps_rel`.
pub fn mass(lat: &ShiftedLattice, s: f64, eps_rel: f64) -> Result<MassEstimate> {
    mass_with(lat, s, eps_rel, &MassConfig::default())
}

pub fn mass_with(lat: &ShiftedLattice, s: f64, eps_rel: f64, cfg: &MassConfig) -> Result<MassEstimate> {
    check(lat, s, eps_rel, cfg)?;
    let n = lat.rank();
    let perp = -PI * lat.perp_sq_f64() / (s * s);
    if n == 0 {
        return Ok(MassEstimate { log_mass: perp, rel_err: 0.0 });
    }
    let d = projected_distance(lat)?;
    let radius = tail_radius(n, s, d, eps_rel);
    let b = ball(lat, s, radius, 1, cfg, |_| 0)?;
    let rfac = radius / (s * (n as f64).sqrt());
    let rel_err = log_tail_bound_with(n, PI * d * d / (s * s), rfac).exp();
    Ok(MassEstimate { log_mass: b.log(0) + perp, rel_err })
}

/// All 2^n masses ρ_s(c − t), c ∈ L/2L, indexed by `CosetLabel::index`.
#[derive(Clone, Debug)]
pub struct CosetMasses {
    pub masses: Vec<MassEstimate>,
}

impl CosetMasses {
    pub fn total(&self) -> MassEstimate {
        let logs: Vec<f64> = self.masses.iter().map(|m| m.log_mass).collect();
        let rel_err = self.masses.iter().map(|m| m.rel_err).fold(0.0, f64::max);
        MassEstimate { log_mass: super::log_sum_exp(&logs), rel_err }
    }

    pub fn max(&self) -> MassEstimate {
        *self.masses.iter().max_by(|a, b| a.log_mass.total_cmp(&b.log_mass)).expect("at least one coset")
    }

    pub fn argmax(&self) -> CosetLabel {
        let dim = self.masses.len().trailing_zeros() as usize;
        let (i, _) = self
            .masses
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.log_mass.total_cmp(&b.1.log_mass))
            .expect("at least one coset");
        CosetLabel::from_bits(i as u64, dim)
    }

    pub fn get(&self, c: CosetLabel) -> MassEstimate {
        self.masses[c.index()]
    }
}

/// Masses of every coset of 2L. The radius covers the farthest coset, and
/// each coset's certificate uses its own distance to t.
pub fn coset_masses(lat: &ShiftedLattice, s: f64, eps_rel: f64) -> Result<CosetMasses> {
    let cfg = MassConfig::default();
    check(lat, s, eps_rel, &cfg)?;
    let n = lat.rank();
    let perp = -PI * lat.perp_sq_f64() / (s * s);
    if n == 0 {
        return Ok(CosetMasses { masses: vec![MassEstimate { log_mass: perp, rel_err: 0.0 }] });
    }
    // covering radius of 2L is at most (Σ ||b̃_i||²)^{1/2}
    let d_cap = lat.basis().gs().norms_sq.iter().sum::<f64>().sqrt();
    let radius = tail_radius(n, s, d_cap, eps_rel);
    let b = ball(lat, s, radius, 1 << n, &cfg, |y| CosetLabel::from_coeffs(y).index())?;
    let rfac = radius / (s * (n as f64).sqrt());
    let mut masses = Vec::with_capacity(1 << n);
    for c in 0..1usize << n {
        if b.min_dist_sq[c] == f64::INFINITY {
            return Err(Error::Internal("coset missed by the covering radius".into()));
        }
        let rel_err = log_tail_bound_with(n, PI * b.min_dist_sq[c] / (s * s), rfac).exp();
        masses.push(MassEstimate { log_mass: b.log(c) + perp, rel_err });
    }
    Ok(CosetMasses { masses })
}

pub fn coset_mass(lat: &ShiftedLattice, c: CosetLabel, s: f64, eps_rel: f64) -> Result<MassEstimate> {
    if c.dim() != lat.rank() {
        return Err(Error::DimensionMismatch { expected: lat.rank(), got: c.dim() });
    }
    Ok(coset_masses(lat, s, eps_rel)?.get(c))
}

/// m(L − t, s) = ρ_s(L − t)/max_c ρ_s(c − t).
pub fn m_target(lat: &ShiftedLattice, s: f64, eps_rel: f64) -> Result<f64> {
    let cm = coset_masses(lat, s, eps_rel)?;
    Ok((cm.total().log_mass - cm.max().log_mass).exp())
}

/// Enumerated support of D_{L−t,s} with normalized probabilities.
#[derive(Clone, Debug)]
pub struct Support {
    pub dim: usize,
    pub points: Vec<i64>,
    pub probs: Vec<f64>,
    pub log_mass: f64,
    pub rel_err: f64,
}

impl Support {
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn point(&self, i: usize) -> &[i64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    /// Total variation distance between the empirical law of `samples` and
    /// these probabilities. Samples outside the support count in full.
    pub fn tv_distance<'a, I>(&self, samples: I) -> f64
    where
        I: IntoIterator<Item = &'a [i64]>,
    {
        let mut counts: std::collections::HashMap<&[i64], usize> = std::collections::HashMap::new();
        let mut total = 0usize;
        for y in samples {
            *counts.entry(y).or_insert(0) += 1;
            total += 1;
        }
        if total == 0 {
            return 1.0;
        }
        let mut seen = 0usize;
        let mut tv = 0.0;
        for i in 0..self.len() {
            let c = counts.get(self.point(i)).copied().unwrap_or(0);
            seen += c;
            tv += (c as f64 / total as f64 - self.probs[i]).abs();
        }
        tv += (total - seen) as f64 / total as f64;
        tv / 2.0
    }
}

pub fn support(lat: &ShiftedLattice, s: f64, eps_rel: f64) -> Result<Support> {
    let cfg = MassConfig::default();
    let m = mass_with(lat, s, eps_rel, &cfg)?;
    let n = lat.rank();
    if n == 0 {
        return Ok(Support { dim: 0, points: Vec::new(), probs: vec![1.0], log_mass: m.log_mass, rel_err: 0.0 });
    }
    let d = projected_distance(lat)?;
    let radius = tail_radius(n, s, d, eps_rel);
    let r2 = radius * radius;
    let inv = PI / (s * s);
    let perp = -inv * lat.perp_sq_f64();
    let mut points = Vec::new();
    let mut probs = Vec::new();
    let mut too_many = false;
    enumerate_levels(lat.basis().gs(), 0, lat.tau(), r2, DEFAULT_NODE_BUDGET, |y, d2| {
        if probs.len() >= cfg.max_support {
            too_many = true;
            return -1.0;
        }
        points.extend_from_slice(y);
        probs.push((-inv * d2 + perp - m.log_mass).exp());
        r2
    })?;
    if too_many {
        return Err(Error::MassDidNotConverge(format!("support larger than {}", cfg.max_support)));
    }
    let total: f64 = probs.iter().sum();
    for p in probs.iter_mut() {
        *p /= total;
    }
    Ok(Support { dim: n, points, probs, log_mass: m.log_mass, rel_err: m.rel_err })
}
