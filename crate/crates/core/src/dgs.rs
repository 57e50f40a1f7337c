//! Shifted discrete Gaussian sampling above the smoothing-free threshold:
//! HKZ reduction, a short prefix sublattice with an anchor, Klein seeding
//! at a raised parameter, and two combiner pipelines down to s.

use std::collections::HashSet;
use std::sync::Arc;

use rand::Rng;

use crate::combiner::{pipeline, PipelineConfig, SampleBatch, StageRecord};
use crate::error::{Error, Result};
use crate::gaussian::{m_target, support, tail::tail_radius, GaussianParam, KleinSampler, DEFAULT_KLEIN_FACTOR};
use crate::lattice::{
    babai, closest, hkz_basis, projected_closest, Basis, DistanceEstimate, HkzBasis, ShiftedLattice,
    SublatticeSplit, DEFAULT_NODE_BUDGET,
};
use crate::rational::{self, Q};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DgsConfig {
    /// Requested number of combiner stages; raised when the sublattice
    /// conditions need a larger starting parameter.
    pub ell: usize,
    pub kappa: f64,
    pub strict: bool,
    pub verify: bool,
    pub eps_mass: f64,
    pub klein_factor: f64,
    /// Default sample count is count_factor · 2^{rank(L′) + ℓ}.
    pub count_factor: f64,
    /// Enumeration knob; inert because the HKZ basis is exact.
    pub u: f64,
    /// Mass allowed outside the sublattice coset at the starting parameter.
    pub eps_tail: f64,
    pub max_ell: usize,
    /// Cap on the default sample count (not on an explicit override).
    pub max_count: Option<usize>,
}

impl Default for DgsConfig {
    fn default() -> Self {
        DgsConfig {
            ell: 0,
            kappa: 4.0,
            strict: false,
            verify: false,
            eps_mass: 1e-12,
            klein_factor: DEFAULT_KLEIN_FACTOR,
            count_factor: 64.0,
            u: 2.0,
            eps_tail: 1e-12,
            max_ell: 40,
            max_count: None,
        }
    }
}

impl DgsConfig {
    fn pipeline_config(&self, ell: usize) -> PipelineConfig {
        PipelineConfig { ell, kappa: self.kappa, strict: self.strict, verify: self.verify, eps_mass: self.eps_mass }
    }
}

/// A sampling request for D_{L−t,s}.
#[derive(Clone, Debug)]
pub struct DgsRequest {
    pub lat: ShiftedLattice,
    pub s: f64,
    /// Approximation budget f(n); the request needs s > dist(t, L)/f.
    pub f: f64,
    /// Target statistical distance, recorded only.
    pub eps: f64,
    pub distance: DistanceEstimate,
}

impl DgsRequest {
    /// Rejects s that is provably at or below dist(t, L)/f.
    pub fn check(&self) -> Result<()> {
        if !(self.s > 0.0) || !self.s.is_finite() {
            return Err(Error::InvalidParameter(format!("s must be positive, got {}", self.s)));
        }
        let bound = self.distance.lower / self.f;
        if self.s <= bound {
            return Err(Error::BelowSmoothing { s: self.s, bound });
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct DgsOutput {
    /// Samples over the input basis and target, parameter exactly s.
    pub batch: SampleBatch,
    pub ell: usize,
    pub split: SublatticeSplit,
    pub input: usize,
    pub stages: Vec<StageRecord>,
    pub m_target: Option<f64>,
    pub shortfall: bool,
    /// Verification mode: TV distance of the output to D_{L−t,s}.
    pub tv: Option<f64>,
}

/// The HKZ data of a shifted lattice, computed once and reused across
/// parameters.
#[derive(Clone, Debug)]
pub struct DgsPlan {
    lat: ShiftedLattice,
    hkz: HkzBasis,
    lat_h: ShiftedLattice,
}

impl DgsPlan {
    pub fn new(lat: &ShiftedLattice) -> Result<Self> {
        let hkz = hkz_basis(lat.basis())?;
        Self::from_hkz(lat, hkz)
    }

    pub fn from_hkz(lat: &ShiftedLattice, hkz: HkzBasis) -> Result<Self> {
        let lat_h = ShiftedLattice::new(hkz.basis.clone(), lat.target().to_vec())?;
        Ok(DgsPlan { lat: lat.clone(), hkz, lat_h })
    }

    pub fn lattice(&self) -> &ShiftedLattice {
        &self.lat
    }

    pub fn hkz(&self) -> &HkzBasis {
        &self.hkz
    }

    fn prefix_len(&self, r: f64) -> usize {
        self.hkz.basis.gs().gs_norms.iter().take_while(|&&g| g <= r).count()
    }

    /// Sublattice L′ spanned by the HKZ vectors before the first
    /// Gram-Schmidt norm above r, and the anchor fixing the remaining
    /// coefficients to the closest point of the projected lattice.
    pub fn split(&self, r: f64, u: f64, dist: &DistanceEstimate) -> Result<SublatticeSplit> {
        let n = self.lat.rank();
        let k1 = self.prefix_len(r);
        let mut anchor = vec![0i64; n];
        if k1 < n {
            // γ = 1 for an exact HKZ basis, so the factors u^{n/u} drop out
            let required = (1.0 + (n as f64).sqrt()) * dist.upper;
            if r < required {
                return Err(Error::RadiusTooSmall { r, required });
            }
            let (tail, _) = projected_closest(&self.lat_h, k1, DEFAULT_NODE_BUDGET)?;
            anchor[k1..].copy_from_slice(&tail);
        }
        Ok(SublatticeSplit {
            k: k1 + 1,
            hkz: self.hkz.clone(),
            sub_basis: self.hkz.basis.prefix(k1),
            anchor,
            radius: r,
            u,
        })
    }

    /// Radius r = ŝ/(klein_factor·√ln(n+2)): every Gram-Schmidt norm of L′
    /// is at most r, which is exactly the Klein precondition at ŝ.
    fn radius(&self, s_hat: f64, klein_factor: f64) -> f64 {
        let n = self.lat.rank() as f64;
        s_hat / (klein_factor * (n + 2.0).ln().sqrt())
    }

    /// Whether starting from ŝ keeps all but eps_tail of D_{L−t,ŝ} inside
    /// L′ + anchor − t. Vectors outside have length at least
    /// ||b̃_k|| − dist(t, L), because ||b̃_k|| is the minimum of the HKZ
    /// projection.
    fn admissible(&self, s_hat: f64, dist: &DistanceEstimate, cfg: &DgsConfig) -> bool {
        let n = self.lat.rank();
        let r = self.radius(s_hat, cfg.klein_factor);
        let k1 = self.prefix_len(r);
        if k1 == n {
            return true;
        }
        let gap = self.hkz.basis.gs().gs_norms[k1];
        r >= (1.0 + (n as f64).sqrt()) * dist.upper
            && gap - dist.upper >= tail_radius(n, s_hat, dist.upper, cfg.eps_tail)
    }

    /// Smallest ℓ ≥ cfg.ell with an admissible starting parameter 2^{ℓ/2}s.
    pub fn required_ell(&self, s: f64, dist: &DistanceEstimate, cfg: &DgsConfig) -> Option<usize> {
        (cfg.ell..=cfg.max_ell).find(|&l| self.admissible(GaussianParam::raised(s, l).value(), dist, cfg))
    }

    /// Klein samples from L′ + anchor − t at ŝ, over the sublattice.
    pub fn init_samples<R: Rng + ?Sized>(
        &self,
        m: usize,
        s_hat: GaussianParam,
        dist: &DistanceEstimate,
        cfg: &DgsConfig,
        rng: &mut R,
    ) -> Result<(SublatticeSplit, SampleBatch)> {
        let r = self.radius(s_hat.value(), cfg.klein_factor);
        let split = self.split(r, cfg.u, dist)?;
        let anchor_vec = self.hkz.basis.combine(&split.anchor);
        let sub = Arc::new(ShiftedLattice::new(split.sub_basis.clone(), rational::sub(self.lat.target(), &anchor_vec))?);
        let k1 = split.k - 1;
        let mut coeffs = vec![0i64; m * k1];
        if k1 > 0 {
            let klein = KleinSampler::new((*sub).clone(), s_hat.value(), cfg.klein_factor)?;
            for chunk in coeffs.chunks_exact_mut(k1) {
                klein.sample_into(rng, chunk);
            }
        }
        let batch = SampleBatch::new(sub, s_hat, coeffs)?;
        Ok((split, batch))
    }

    /// Samples from D_{L−t,s}.
    pub fn solve<R: Rng + ?Sized>(
        &self,
        req: &DgsRequest,
        cfg: &DgsConfig,
        m_override: Option<usize>,
        rng: &mut R,
    ) -> Result<DgsOutput> {
        req.check()?;
        let n = self.lat.rank();
        let ell = self
            .required_ell(req.s, &req.distance, cfg)
            .ok_or(Error::TooManyStages { s: req.s, max: cfg.max_ell })?;
        let s_hat = GaussianParam::raised(req.s, ell);
        let pcfg = cfg.pipeline_config(ell);
        pcfg.validate()?;
        let k1 = self.prefix_len(self.radius(s_hat.value(), cfg.klein_factor));
        let m = match m_override {
            Some(m) => m,
            None if cfg.strict => {
                let per_half = pcfg.required_input(k1);
                usize::try_from(per_half.saturating_mul(2)).map_err(|_| Error::Overflow)?
            }
            None => {
                let m = (cfg.count_factor * 2f64.powi((k1 + ell) as i32)).ceil();
                cfg.max_count.map_or(m, |c| m.min(c as f64)) as usize
            }
        };
        let (split, batch) = self.init_samples(m, s_hat, &req.distance, cfg, rng)?;

        let mut stages = Vec::new();
        let sub_coeffs: Vec<i64>;
        let mut count = 0usize;
        if k1 == 0 {
            // L′ = {0}: every sample is the anchor
            sub_coeffs = Vec::new();
            count = m;
        } else {
            let (a, b) = batch.split_half();
            let out_a = pipeline(a, &pcfg, rng)?;
            let out_b = pipeline(b, &pcfg, rng)?;
            stages.extend(out_a.stages);
            stages.extend(out_b.stages);
            let mut merged = out_a.batch;
            merged.extend(out_b.batch)?;
            sub_coeffs = merged.coeffs().to_vec();
        }

        let tail = &split.anchor[k1..];
        let mut coeffs = Vec::with_capacity(n * sub_coeffs.len().max(count * n) / k1.max(1));
        let mut x = split.anchor.clone();
        if k1 == 0 {
            let y = self.hkz.to_input_coeffs(&x)?;
            for _ in 0..count {
                coeffs.extend_from_slice(&y);
            }
        } else {
            for y in sub_coeffs.chunks_exact(k1) {
                x[..k1].copy_from_slice(y);
                x[k1..].copy_from_slice(tail);
                coeffs.extend(self.hkz.to_input_coeffs(&x)?);
            }
        }
        let final_param = (0..ell).fold(s_hat, |p, _| p.halved());
        let batch = SampleBatch::new(Arc::new(self.lat.clone()), final_param, coeffs)?;

        let check = cfg.strict || cfg.verify;
        let mt = if check { Some(m_target(&self.lat, req.s, cfg.eps_mass)?) } else { None };
        let shortfall = mt.is_some_and(|v| (batch.len() as f64) < v);
        if cfg.strict && shortfall {
            return Err(Error::PipelineStarved { got: batch.len(), expected: mt.unwrap_or(0.0) });
        }
        let tv = if cfg.verify { Some(support(&self.lat, req.s, 1e-9)?.tv_distance(batch.iter())) } else { None };
        Ok(DgsOutput { batch, ell, split, input: m, stages, m_target: mt, shortfall, tv })
    }
}

/// Split of (B, t) for the radius r; see [`DgsPlan::split`].
pub fn shifted_sublattice(b: &Basis, t: &[Q], r: f64, u: f64, dist: &DistanceEstimate) -> Result<SublatticeSplit> {
    DgsPlan::new(&ShiftedLattice::new(b.clone(), t.to_vec())?)?.split(r, u, dist)
}

/// Samples from D_{L−t,s}, reducing the basis first.
pub fn dgs_solve<R: Rng + ?Sized>(
    req: &DgsRequest,
    cfg: &DgsConfig,
    m_override: Option<usize>,
    rng: &mut R,
) -> Result<DgsOutput> {
    DgsPlan::new(&req.lat)?.solve(req, cfg, m_override, rng)
}

/// Factor-2 bracket on dist(t, L). With `oracle` the distance is exact.
/// Otherwise: start from the Babai distance D and repeatedly sample at
/// s = D/2, replacing D by the shortest sample, until no sample improves it.
pub fn estimate_distance<R: Rng + ?Sized>(
    plan: &DgsPlan,
    cfg: &DgsConfig,
    oracle: bool,
    rng: &mut R,
) -> Result<DistanceEstimate> {
    let lat = plan.lattice();
    if oracle {
        let d = rational::q_to_f64(&closest(lat, DEFAULT_NODE_BUDGET)?.dist_sq).sqrt();
        return Ok(DistanceEstimate::exact(d));
    }
    let y = babai(lat.basis(), lat.target())?;
    let mut d = rational::q_to_f64(&lat.dist_sq_exact(&y)).sqrt();
    if d == 0.0 {
        return Ok(DistanceEstimate::exact(0.0));
    }
    for _ in 0..4 {
        let dist = DistanceEstimate { lower: d / 2.0, upper: d };
        let req = DgsRequest { lat: lat.clone(), s: d / 2.0, f: f64::INFINITY, eps: 0.0, distance: dist };
        let c = DgsConfig { strict: false, verify: false, ..*cfg };
        let out = plan.solve(&req, &c, None, rng)?;
        let best = out.batch.iter().map(|y| lat.dist_sq(y)).fold(f64::INFINITY, f64::min).sqrt();
        if best < d * (1.0 - 1e-9) {
            d = best;
        } else {
            break;
        }
    }
    Ok(DistanceEstimate { lower: d / 2.0, upper: d })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproxCvpConfig {
    /// Approximation budget: the answer is within (1 + 1/f)·dist(t, L).
    pub f: f64,
    pub oracle: bool,
    pub dgs: DgsConfig,
}

impl Default for ApproxCvpConfig {
    fn default() -> Self {
        ApproxCvpConfig { f: 100.0, oracle: false, dgs: DgsConfig { max_ell: 12, ..DgsConfig::default() } }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxCvp {
    /// Coefficients of the returned lattice vector in the input basis.
    pub coeffs: Vec<i64>,
    pub dist_sq: Q,
    pub s: f64,
    pub ell: usize,
    pub samples: usize,
}

/// Index of the sample closest to the target, exact on near ties, and its
/// exact squared distance.
pub(crate) fn closest_sample(lat: &ShiftedLattice, batch: &SampleBatch) -> Option<(Vec<i64>, Q)> {
    let mut uniq: HashSet<&[i64]> = HashSet::new();
    let mut scored: Vec<(&[i64], f64)> = Vec::new();
    for y in batch.iter() {
        if uniq.insert(y) {
            scored.push((y, lat.dist_sq(y)));
        }
    }
    let min = scored.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return None;
    }
    let cut = min * (1.0 + 1e-9) + 1e-12;
    scored
        .into_iter()
        .filter(|(_, d)| *d <= cut)
        .map(|(y, _)| (y.to_vec(), lat.dist_sq_exact(y)))
        .min_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)))
}

/// Approximate CVP by sampling D_{L−t,s} at s ≈ d̃/(n·f) and returning the
/// closest sample. When that s needs more than `max_ell` stages, s is
/// raised by factors of √2 until it fits.
pub fn approx_cvp<R: Rng + ?Sized>(b: &Basis, t: &[Q], cfg: &ApproxCvpConfig, rng: &mut R) -> Result<ApproxCvp> {
    let lat = ShiftedLattice::new(b.clone(), t.to_vec())?;
    if !lat.in_span() {
        return Err(Error::TargetNotInSpan);
    }
    if let Some(y) = lat.target_in_lattice() {
        return Ok(ApproxCvp { coeffs: y, dist_sq: Q::from_integer(0.into()), s: 0.0, ell: 0, samples: 0 });
    }
    let plan = DgsPlan::new(&lat)?;
    let dist = estimate_distance(&plan, &cfg.dgs, cfg.oracle, rng)?;
    let n = lat.rank() as f64;
    let mut s = dist.upper / (n * cfg.f);
    while plan.required_ell(s, &dist, &cfg.dgs).is_none() {
        s *= std::f64::consts::SQRT_2;
    }
    let req = DgsRequest { lat: lat.clone(), s, f: f64::INFINITY, eps: 0.0, distance: dist };
    let out = plan.solve(&req, &cfg.dgs, None, rng)?;
    let (coeffs, dist_sq) = closest_sample(&lat, &out.batch).ok_or(Error::SolverStarved)?;
    Ok(ApproxCvp { coeffs, dist_sq, s, ell: out.ell, samples: out.batch.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q_frac;
    use crate::rng::rng_from_seed;

    #[test]
    fn whole_lattice_when_radius_is_large() {
        let b = Basis::from_integers(&[vec![1, 0], vec![0, 1]]).unwrap();
        let sp = shifted_sublattice(&b, &[q_frac(1, 10), q_frac(0, 1)], 5.0, 2.0, &DistanceEstimate::exact(0.1)).unwrap();
        assert_eq!(sp.k, 3);
        assert_eq!(sp.anchor, vec![0, 0]);
    }

    #[test]
    fn huge_gap_gives_line_sublattice() {
        let b = Basis::from_integers(&[vec![1, 0], vec![0, 100]]).unwrap();
        let sp = shifted_sublattice(&b, &[q_frac(1, 10), q_frac(0, 1)], 2.0, 2.0, &DistanceEstimate::exact(0.1)).unwrap();
        assert_eq!(sp.k, 2);
        assert_eq!(sp.sub_basis.rows()[0], vec![q_frac(1, 1), q_frac(0, 1)]);
        assert_eq!(sp.anchor, vec![0, 0]);
        let err = shifted_sublattice(&b, &[q_frac(1, 10), q_frac(0, 1)], 2.0, 2.0, &DistanceEstimate::exact(1.0));
        assert!(matches!(err, Err(Error::RadiusTooSmall { .. })));
    }

    #[test]
    fn parameter_lands_exactly() {
        let b = Basis::from_integers(&[vec![2, 1], vec![0, 3]]).unwrap();
        let lat = ShiftedLattice::new(b, vec![q_frac(1, 3), q_frac(1, 2)]).unwrap();
        let req = DgsRequest { lat, s: 1.3, f: 1.0, eps: 0.0, distance: DistanceEstimate { lower: 0.3, upper: 0.6 } };
        let cfg = DgsConfig { ell: 1, count_factor: 8.0, ..Default::default() };
        let out = dgs_solve(&req, &cfg, None, &mut rng_from_seed(1)).unwrap();
        assert_eq!(out.batch.param(), GaussianParam::new(1.3));
        assert_eq!(out.batch.s(), 1.3);
        assert!(out.ell >= 1);
    }

    #[test]
    fn approx_cvp_small_cases() {
        let b = Basis::from_integers(&[vec![1, 0], vec![0, 1]]).unwrap();
        let mut rng = rng_from_seed(2);
        let r = approx_cvp(&b, &[q_frac(3, 10), q_frac(-7, 10)], &ApproxCvpConfig::default(), &mut rng).unwrap();
        assert_eq!(r.coeffs, vec![0, -1]);
        let r = approx_cvp(&b, &[q_frac(2, 1), q_frac(-5, 1)], &ApproxCvpConfig::default(), &mut rng).unwrap();
        assert_eq!(r.coeffs, vec![2, -5]);
        assert_eq!(r.dist_sq, q_frac(0, 1));
    }
}
