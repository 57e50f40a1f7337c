//! The coset square sampler, pair averaging within cosets of 2L, and the
//! multi-stage pipeline that takes D_{L−t,s} samples to D_{L−t,2^{−ℓ/2}s}.

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gaussian::{m_target, GaussianParam};
use crate::lattice::{CosetLabel, ShiftedLattice, MAX_LABEL_DIM};
use crate::rational::QVec;

/// One stage's contribution to the statistical-distance budget. The constants
/// in the analytic bound are unknown, so this is recorded, not enforced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SdEntry {
    pub stage: usize,
    pub input: usize,
    pub dim: usize,
    pub kappa: f64,
}

/// Samples from L − t, stored as integer coefficient vectors y with the
/// sample being B·y − t. Membership in L − t holds by construction.
#[derive(Clone, Debug)]
pub struct SampleBatch {
    lat: Arc<ShiftedLattice>,
    param: GaussianParam,
    dim: usize,
    coeffs: Vec<i64>,
    ledger: Vec<SdEntry>,
}

impl SampleBatch {
    pub fn new(lat: Arc<ShiftedLattice>, param: GaussianParam, coeffs: Vec<i64>) -> Result<Self> {
        let dim = lat.rank();
        if dim == 0 && !coeffs.is_empty() || dim > 0 && coeffs.len() % dim != 0 {
            return Err(Error::DimensionMismatch { expected: dim, got: coeffs.len() });
        }
        Ok(SampleBatch { lat, param, dim, coeffs, ledger: Vec::new() })
    }

    pub fn from_samples(lat: Arc<ShiftedLattice>, param: GaussianParam, samples: &[Vec<i64>]) -> Result<Self> {
        let dim = lat.rank();
        let mut coeffs = Vec::with_capacity(samples.len() * dim);
        for y in samples {
            if y.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: y.len() });
            }
            coeffs.extend_from_slice(y);
        }
        Self::new(lat, param, coeffs)
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.coeffs.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lattice(&self) -> &ShiftedLattice {
        &self.lat
    }

    pub fn shared_lattice(&self) -> Arc<ShiftedLattice> {
        self.lat.clone()
    }

    pub fn param(&self) -> GaussianParam {
        self.param
    }

    pub fn s(&self) -> f64 {
        self.param.value()
    }

    pub fn sample(&self, i: usize) -> &[i64] {
        &self.coeffs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i64]> + '_ {
        self.coeffs.chunks_exact(self.dim.max(1))
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    /// The sample B·y − t, exactly.
    pub fn vector(&self, i: usize) -> QVec {
        self.lat.point(self.sample(i))
    }

    pub fn label(&self, i: usize) -> CosetLabel {
        CosetLabel::from_coeffs(self.sample(i))
    }

    pub fn sd_ledger(&self) -> &[SdEntry] {
        &self.ledger
    }

    /// Splits into the first ⌈len/2⌉ and the remaining samples.
    pub fn split_half(self) -> (SampleBatch, SampleBatch) {
        let mid = self.len().div_ceil(2) * self.dim;
        let mut first = self.coeffs;
        let second = first.split_off(mid);
        let a = SampleBatch { lat: self.lat.clone(), param: self.param, dim: self.dim, coeffs: first, ledger: self.ledger.clone() };
        let b = SampleBatch { lat: self.lat, param: self.param, dim: self.dim, coeffs: second, ledger: self.ledger };
        (a, b)
    }

    /// Appends `other`, which must share the lattice and parameter.
    pub fn extend(&mut self, other: SampleBatch) -> Result<()> {
        if !Arc::ptr_eq(&self.lat, &other.lat) && *self.lat.basis() != *other.lat.basis() || self.param != other.param {
            return Err(Error::InvalidParameter("batches over different lattices or parameters".into()));
        }
        self.coeffs.extend_from_slice(&other.coeffs);
        self.ledger.extend(other.ledger);
        Ok(())
    }
}

fn label_bits(y: &[i64]) -> u64 {
    y.iter().enumerate().fold(0u64, |acc, (i, x)| acc | (((x & 1) as u64) << i))
}

/// Per-label groups of accepted indices, each group of even length, in
/// ascending label order. Split the (shuffled) input into halves A and B;
/// each element of B is kept with probability count_A(label)/max count_A and
/// symmetrically for A. Pairs are formed from the kept elements in order.
fn square_select<R: Rng + ?Sized>(keys: &[u64], rng: &mut R) -> Vec<(u64, Vec<usize>)> {
    let m = keys.len();
    let mut perm: Vec<usize> = (0..m).collect();
    perm.shuffle(rng);
    let (a, b) = perm.split_at(m / 2);
    let count = |half: &[usize]| {
        let mut c: HashMap<u64, u64> = HashMap::new();
        for &i in half {
            *c.entry(keys[i]).or_insert(0) += 1;
        }
        let max = c.values().copied().max().unwrap_or(0);
        (c, max)
    };
    let (ca, max_a) = count(a);
    let (cb, max_b) = count(b);
    let mut kept: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut accept = |half: &[usize], other: &HashMap<u64, u64>, max: u64| {
        if max == 0 {
            return;
        }
        for &i in half {
            let c = other.get(&keys[i]).copied().unwrap_or(0);
            if c == max || c > 0 && rng.gen::<f64>() * (max as f64) < c as f64 {
                kept.entry(keys[i]).or_default().push(i);
            }
        }
    };
    accept(b, &ca, max_a);
    accept(a, &cb, max_b);
    let mut out: Vec<(u64, Vec<usize>)> = kept
        .into_iter()
        .map(|(k, mut v)| {
            v.truncate(v.len() / 2 * 2);
            (k, v)
        })
        .filter(|(_, v)| !v.is_empty())
        .collect();
    out.sort_unstable_by_key(|(k, _)| *k);
    out
}

/// Turns i.i.d. labels with probabilities p_i into labels approximately
/// i.i.d. with probabilities ∝ p_i², each label appearing at most half as
/// often as in the input. `kappa` only enters the error ledger: the two-half
/// scheme has no tunable confidence knob.
pub fn square_sampler<R: Rng + ?Sized>(labels: &[CosetLabel], _kappa: f64, rng: &mut R) -> Vec<CosetLabel> {
    let keys: Vec<u64> = labels.iter().map(|c| c.bits()).collect();
    let dim = labels.first().map_or(0, |c| c.dim());
    let mut out = Vec::new();
    for (k, idx) in square_select(&keys, rng) {
        out.extend(std::iter::repeat(CosetLabel::from_bits(k, dim)).take(idx.len() / 2));
    }
    out.shuffle(rng);
    out
}

/// One combiner stage: square-sample the labels, then average pairs of
/// same-label samples. The output has parameter s/√2.
pub fn combine_once<R: Rng + ?Sized>(batch: SampleBatch, kappa: f64, rng: &mut R) -> Result<SampleBatch> {
    let n = batch.dim;
    if n > MAX_LABEL_DIM {
        return Err(Error::DimensionTooLarge { dim: n, cap: MAX_LABEL_DIM });
    }
    let m = batch.len();
    let keys: Vec<u64> = batch.iter().map(label_bits).collect();
    let groups = square_select(&keys, rng);
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (_, idx) in &groups {
        pairs.extend(idx.chunks_exact(2).map(|p| (p[0], p[1])));
    }
    pairs.shuffle(rng);
    let mut coeffs = Vec::with_capacity(pairs.len() * n);
    for (i, j) in pairs {
        let (a, b) = (batch.sample(i), batch.sample(j));
        for k in 0..n {
            let s = a[k].checked_add(b[k]).ok_or(Error::Overflow)?;
            if s & 1 != 0 {
                return Err(Error::LabelMismatch);
            }
            coeffs.push(s / 2);
        }
    }
    let stage = batch.ledger.len() + 1;
    let mut ledger = batch.ledger;
    ledger.push(SdEntry { stage, input: m, dim: n, kappa });
    Ok(SampleBatch { lat: batch.lat, param: batch.param.halved(), dim: n, coeffs, ledger })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineConfig {
    /// Number of combiner stages ℓ.
    pub ell: usize,
    /// Confidence parameter κ ≥ 2.
    pub kappa: f64,
    /// Enforce the (32κ)^{ℓ+1}·2^n input size and the final count bound.
    pub strict: bool,
    /// Compute m_target per stage and flag shortfalls.
    pub verify: bool,
    pub eps_mass: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { ell: 2, kappa: 4.0, strict: false, verify: false, eps_mass: 1e-12 }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa >= 2.0) || !self.kappa.is_finite() {
            return Err(Error::InvalidParameter(format!("kappa must be at least 2, got {}", self.kappa)));
        }
        if !(self.eps_mass > 0.0) {
            return Err(Error::InvalidParameter("eps_mass must be positive".into()));
        }
        Ok(())
    }

    /// (32κ)^{ℓ+1}·2^n, saturating.
    pub fn required_input(&self, n: usize) -> u128 {
        let v = (32.0 * self.kappa).powi(self.ell as i32 + 1) * 2f64.powi(n as i32);
        if v >= u128::MAX as f64 {
            u128::MAX
        } else {
            v.ceil() as u128
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StageRecord {
    pub stage: usize,
    /// Parameter of the stage's output.
    pub s: f64,
    pub input: usize,
    pub output: usize,
    pub m_target: Option<f64>,
}

impl StageRecord {
    pub fn record(&self) -> String {
        let mt = self.m_target.map_or_else(|| "na".to_string(), |v| format!("{v}"));
        format!("stage={} s={} in={} out={} m_target={}", self.stage, self.s, self.input, self.output, mt)
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub batch: SampleBatch,
    pub stages: Vec<StageRecord>,
    /// Verification mode: final count fell below m_target.
    pub shortfall: bool,
}

/// Applies `combine_once` ℓ times.
pub fn pipeline<R: Rng + ?Sized>(batch: SampleBatch, cfg: &PipelineConfig, rng: &mut R) -> Result<PipelineOutput> {
    cfg.validate()?;
    let n = batch.dim();
    if cfg.strict {
        let required = cfg.required_input(n);
        if (batch.len() as u128) < required {
            return Err(Error::InsufficientInput { got: batch.len(), required });
        }
    }
    let check = cfg.strict || cfg.verify;
    let mut stages = Vec::with_capacity(cfg.ell);
    let mut cur = batch;
    let mut last_target = None;
    for stage in 1..=cfg.ell {
        let input = cur.len();
        cur = combine_once(cur, cfg.kappa, rng)?;
        let mt = if check { Some(m_target(cur.lattice(), cur.s(), cfg.eps_mass)?) } else { None };
        last_target = mt;
        stages.push(StageRecord { stage, s: cur.s(), input, output: cur.len(), m_target: mt });
    }
    let shortfall = last_target.is_some_and(|m| (cur.len() as f64) < m);
    if cfg.strict && shortfall {
        return Err(Error::PipelineStarved { got: cur.len(), expected: last_target.unwrap_or(0.0) });
    }
    Ok(PipelineOutput { batch: cur, stages, shortfall })
}
