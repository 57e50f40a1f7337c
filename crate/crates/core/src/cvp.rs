//! Exact CVP through cluster CVP: candidate lists from discrete Gaussian
//! samples along a ladder of parameters, the good-index choice of a prefix
//! sublattice, and recursion over the occupied shifts of that sublattice.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_traits::Zero;
use rand::Rng;

use crate::dgs::{estimate_distance, DgsConfig, DgsPlan, DgsRequest};
use crate::error::{Error, Result};
use crate::gaussian::tail::point_count_bound;
use crate::lattice::{
    covering_radius_upper, enumerate_ball, hkz_basis, Basis, CosetLabel, DistanceEstimate, HkzBasis, ShiftedLattice,
    DEFAULT_NODE_BUDGET,
};
use crate::rational::{self, Q};
use crate::rng::{derive_seed, rng_from_seed};

/// Knobs of the cluster-CVP solver. `None` fields take their defaults at
/// the rank of the lattice being solved, so recursive calls rescale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CcvpConfig {
    /// Pruning slack: candidates at distance ≥ (1 + α)·min are dropped.
    pub alpha: Option<f64>,
    /// Maximum number of candidates returned.
    pub p_cap: Option<usize>,
    /// Cluster knob f(n) of the good-index choice and the ladder length.
    pub f_cluster: Option<usize>,
    /// Recursion exponent; recorded only.
    pub delta: f64,
    /// Number of ladder steps below the top parameter.
    pub ell: Option<usize>,
    /// Top of the ladder is top_factor · d̃.
    pub top_factor: f64,
    /// Cap on sampler runs per ladder parameter.
    pub run_cap: usize,
    /// Use the enumeration distance instead of the sampled bracket.
    pub oracle_distance: bool,
    /// Keep every pre-pruning candidate for audits.
    pub instrument: bool,
    pub dgs: DgsConfig,
}

impl Default for CcvpConfig {
    fn default() -> Self {
        CcvpConfig {
            alpha: None,
            p_cap: None,
            f_cluster: None,
            delta: 0.5,
            ell: None,
            top_factor: 1.0,
            run_cap: 1,
            oracle_distance: false,
            instrument: false,
            dgs: DgsConfig { klein_factor: 1.5, count_factor: 8.0, max_count: Some(1 << 17), max_ell: 30, ..DgsConfig::default() },
        }
    }
}

impl CcvpConfig {
    /// α = 1/(10n³).
    pub fn alpha_for(&self, n: usize) -> f64 {
        self.alpha.unwrap_or(1.0 / (10.0 * (n as f64).powi(3)))
    }

    /// f = max(1, ⌈n^{1/3}⌉).
    pub fn f_for(&self, n: usize) -> usize {
        self.f_cluster.unwrap_or_else(|| ((n as f64).cbrt() - 1e-9).ceil().max(1.0) as usize)
    }

    /// ℓ = max(4, ⌈log₂(10 f)⌉).
    pub fn ell_for(&self, n: usize) -> usize {
        self.ell.unwrap_or_else(|| 4usize.max((10.0 * self.f_for(n) as f64).log2().ceil() as usize))
    }

    pub fn p_for(&self, n: usize) -> usize {
        self.p_cap.unwrap_or(1usize << n.min(16)).max(1)
    }

    /// min(n²·⌈2^{n/ℓ}⌉, run_cap).
    pub fn runs_for(&self, n: usize) -> usize {
        let ell = self.ell_for(n) as f64;
        let full = (n * n) as f64 * 2f64.powf(n as f64 / ell).ceil();
        (full as usize).min(self.run_cap).max(1)
    }
}

/// Candidate closest vectors with exact squared distances and labels mod
/// 2L, sorted by distance and then coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CandidateSet {
    /// Coefficients in the basis the solver was called with.
    pub vectors: Vec<Vec<i64>>,
    pub distances: Vec<Q>,
    pub coset_labels: Vec<CosetLabel>,
    /// Instrumented runs: every distinct candidate before pruning.
    pub unpruned: Option<Vec<(Vec<i64>, Q)>>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    fn push(&mut self, y: Vec<i64>, d: Q) {
        self.coset_labels.push(CosetLabel::from_coeffs(&y));
        self.vectors.push(y);
        self.distances.push(d);
    }
}

/// Whether ||w₁ − w₂||² < 2(r₁² + r₂²) for w_i = B·y_i − t. The two points
/// must lie in the same coset of 2L.
pub fn cluster_test(lat: &ShiftedLattice, y1: &[i64], y2: &[i64], r1_sq: &Q, r2_sq: &Q) -> Result<bool> {
    if CosetLabel::from_coeffs(y1) != CosetLabel::from_coeffs(y2) {
        return Err(Error::LabelMismatch);
    }
    let w1 = lat.point(y1);
    let w2 = lat.point(y2);
    let diff = rational::norm_sq(&rational::sub(&w1, &w2));
    Ok(diff < (r1_sq + r2_sq) * rational::q_int(2))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GoodIndexCase {
    /// m_j = m_{j−1} for some j ≤ f.
    Repeated { j: usize },
    /// m_{j−1} − m_j < n/f for some j in [f, 2f − 1].
    Window { j: usize, ell: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoodIndex {
    /// 1-based index; L′ is spanned by the first k − 1 basis vectors.
    pub k: usize,
    /// Bound on the number of shifts of L′ holding near-closest vectors.
    pub shift_bound: f64,
    pub case: GoodIndexCase,
    /// m_0, …, m_{2f−1}, 1-based.
    pub m: Vec<usize>,
}

/// Choice of k for an HKZ basis: with R the largest Gram-Schmidt norm and
/// m_j the first index whose norm reaches R/n^j, either two consecutive m_j
/// agree for some j ≤ f, or a window with a small drop exists in [f, 2f−1].
pub fn good_index(h: &HkzBasis, f_cluster: usize) -> Result<GoodIndex> {
    let b = &h.basis;
    let n = b.rank();
    if n == 0 {
        return Err(Error::EmptyBasis);
    }
    let f = f_cluster.max(1);
    let norms = &b.gs().exact.norms_sq;
    let r_sq = norms.iter().max().cloned().unwrap_or_else(Q::zero);
    let n_sq = rational::q_int(n as i64 * n as i64);
    let mut m = Vec::with_capacity(2 * f);
    let mut scale = rational::q_int(1);
    for _ in 0..2 * f {
        // ||b̃_i|| ≥ R/n^j  ⇔  ||b̃_i||²·n^{2j} ≥ R²
        let idx = norms.iter().position(|x| x * &scale >= r_sq).map(|i| i + 1).unwrap_or(n);
        m.push(idx);
        scale *= &n_sq;
    }
    let nf = n as f64;
    let pick = (1..=f.min(2 * f - 1)).find(|&j| m[j] == m[j - 1]);
    let (k, shift_bound, case) = if let Some(j) = pick {
        let k = m[j];
        (k, 2f64.powi((n - k + 1) as i32), GoodIndexCase::Repeated { j })
    } else {
        let j = (f..2 * f)
            .find(|&j| ((m[j - 1] - m[j]) as f64) < nf / f as f64)
            .ok_or_else(|| Error::Internal("no good index".into()))?;
        let k = m[j];
        let bound = 2f64.powi((n - k + 2) as i32) * nf.powf(nf / f as f64);
        (k, bound, GoodIndexCase::Window { j, ell: m[j - 1] })
    };
    // ||b̃_k|| ≥ μ/n^{2f}, checked against an upper bound on μ
    let mu = covering_radius_upper(b.gs());
    if b.gs().gs_norms[k - 1] * nf.powi(2 * f as i32) < mu * (1.0 - 1e-12) {
        return Err(Error::Internal(format!("good index {k} is too short")));
    }
    Ok(GoodIndex { k, shift_bound, case, m })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftCount {
    /// Distinct shifts c + L′ with dist(t, c)² < dist(t, L)² + r².
    pub count: usize,
    pub bound: f64,
    /// The largest r² for which the count bound applies.
    pub r_sq: f64,
    /// False when no positive r satisfies the condition.
    pub condition_ok: bool,
}

/// Exhaustive count of the shifts of L′ = L(b₁, …, b_{k−1}) (HKZ basis)
/// near t, against 2^{n−k+1}(2⌈2s⌉^{ℓ−k} − 1). Indices are 1-based with
/// k ≤ ℓ ≤ n + 1.
pub fn sparse_shift_count(b: &Basis, t: &[Q], k: usize, ell: usize, s: f64) -> Result<ShiftCount> {
    let h = hkz_basis(b)?;
    sparse_shift_count_hkz(&h, t, k, ell, s)
}

pub fn sparse_shift_count_hkz(h: &HkzBasis, t: &[Q], k: usize, ell: usize, s: f64) -> Result<ShiftCount> {
    let n = h.basis.rank();
    if k == 0 || k > n || ell < k || ell > n + 1 {
        return Err(Error::InvalidParameter(format!("need 1 ≤ k ≤ ℓ ≤ n + 1, got k={k} ℓ={ell} n={n}")));
    }
    let g = h.basis.gs();
    let mut cap = s * s * g.norms_sq[k - 1];
    if ell <= n {
        cap = cap.min(g.norms_sq[ell - 1]);
    }
    let head: f64 = g.norms_sq[..k - 1].iter().sum();
    let r_sq = cap - (k - 1) as f64 / 2.0 * head;
    let bound = 2f64.powi((n - k + 1) as i32) * point_count_bound(ell - k, s);
    if r_sq <= 0.0 {
        return Ok(ShiftCount { count: 0, bound, r_sq, condition_ok: false });
    }
    let lat = ShiftedLattice::new(h.basis.clone(), t.to_vec())?;
    let d_sq = rational::q_to_f64(&crate::lattice::closest(&lat, DEFAULT_NODE_BUDGET)?.dist_sq);
    // strict inequality, shaved to stay on the safe side of rounding
    let radius = (d_sq + r_sq) * (1.0 - 1e-12);
    let mut keys: HashSet<Vec<i64>> = HashSet::new();
    enumerate_ball(&lat, radius, DEFAULT_NODE_BUDGET, |y, _| {
        keys.insert(y[k - 1..].to_vec());
    })?;
    Ok(ShiftCount { count: keys.len(), bound, r_sq, condition_ok: true })
}

// Largest sampler input tried when a ladder run comes back empty.
const RETRY_LIMIT: usize = 1 << 20;

/// Cluster CVP on a prepared plan: sample along s_i = 2^{−i/2}·s₀ for
/// i = 0..ℓ, keep the (1 + α)-approximate lattice vectors, cap at p.
/// Coefficients are in the plan's input basis.
pub fn ccvp_plan<R: Rng + ?Sized>(plan: &DgsPlan, cfg: &CcvpConfig, rng: &mut R) -> Result<CandidateSet> {
    let lat = plan.lattice();
    let mut out = CandidateSet::default();
    if let Some(y) = lat.target_in_lattice() {
        out.push(y, Q::zero());
        return Ok(out);
    }
    let dist = estimate_distance(plan, &cfg.dgs, cfg.oracle_distance, rng)?;
    ccvp_with_distance(plan, &dist, cfg, rng)
}

pub(crate) fn ccvp_with_distance<R: Rng + ?Sized>(
    plan: &DgsPlan,
    dist: &DistanceEstimate,
    cfg: &CcvpConfig,
    rng: &mut R,
) -> Result<CandidateSet> {
    let lat = plan.lattice();
    let n = lat.rank();
    let ell = cfg.ell_for(n);
    let runs = cfg.runs_for(n);
    let s0 = cfg.top_factor * dist.upper;
    let ladder: Vec<f64> = (0..=ell).map(|i| s0 * 2f64.powf(-(i as f64) / 2.0)).filter(|s| *s > 0.0).collect();
    let mut seen: HashMap<Vec<i64>, f64> = HashMap::new();
    let collect = |s: f64, m: Option<usize>, seen: &mut HashMap<Vec<i64>, f64>, rng: &mut R| -> Result<usize> {
        let req = DgsRequest { lat: lat.clone(), s, f: f64::INFINITY, eps: 0.0, distance: dist.clone() };
        let res = plan.solve(&req, &cfg.dgs, m, rng)?;
        for y in res.batch.iter() {
            if !seen.contains_key(y) {
                seen.insert(y.to_vec(), lat.dist_sq(y));
            }
        }
        Ok(res.input)
    };
    let mut top_input = 0;
    for (i, &s) in ladder.iter().enumerate() {
        for _ in 0..runs {
            let m = collect(s, None, &mut seen, rng)?;
            if i == 0 {
                top_input = m;
            }
        }
    }
    // The combiner can starve when the coset masses are skewed. Retry the
    // top of the ladder, the cheapest step, with doubled input.
    let mut m = top_input.max(1);
    while seen.is_empty() && m < RETRY_LIMIT && !ladder.is_empty() {
        m = (2 * m).min(RETRY_LIMIT);
        collect(ladder[0], Some(m), &mut seen, rng)?;
    }
    if seen.is_empty() {
        return Err(Error::SolverStarved);
    }
    let min_f = seen.values().cloned().fold(f64::INFINITY, f64::min);
    let alpha = cfg.alpha_for(n);
    let factor = (1.0 + alpha) * (1.0 + alpha);
    // exact distances for everything that could survive the cut
    let loose = min_f * factor * (1.0 + 1e-9) + 1e-12;
    let mut exact: Vec<(Vec<i64>, Q)> = seen
        .iter()
        .filter(|(_, d)| **d <= loose || cfg.instrument)
        .map(|(y, _)| (y.clone(), lat.dist_sq_exact(y)))
        .collect();
    exact.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    let min = exact[0].1.clone();
    let cut = min * rational::q_from_f64(factor).ok_or(Error::Overflow)?;
    let mut set = CandidateSet::default();
    let p = cfg.p_for(n);
    for (y, d) in &exact {
        if set.len() >= p {
            break;
        }
        // keep strictly closer than (1 + α)·min; the minimum itself always stays
        if *d < cut || set.is_empty() {
            set.push(y.clone(), d.clone());
        }
    }
    if cfg.instrument {
        set.unpruned = Some(exact);
    }
    Ok(set)
}

/// Cluster CVP for (B, t): reduces B first.
pub fn ccvp_solve<R: Rng + ?Sized>(b: &Basis, t: &[Q], cfg: &CcvpConfig, rng: &mut R) -> Result<CandidateSet> {
    let lat = ShiftedLattice::new(b.clone(), t.to_vec())?;
    if !lat.in_span() {
        return Err(Error::TargetNotInSpan);
    }
    ccvp_plan(&DgsPlan::new(&lat)?, cfg, rng)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CvpConfig {
    pub ccvp: CcvpConfig,
    /// Independent repetitions; the best answer is kept.
    pub repeat: usize,
    pub max_depth: usize,
}

impl Default for CvpConfig {
    fn default() -> Self {
        CvpConfig { ccvp: CcvpConfig::default(), repeat: 1, max_depth: 64 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CvpSolution {
    /// Coefficients of the closest vector in the input basis.
    pub coeffs: Vec<i64>,
    pub dist_sq: Q,
    /// Recursive calls per rank, highest rank first.
    pub census: Vec<(usize, u64)>,
}

struct Solver<'a> {
    cfg: &'a CvpConfig,
    census: BTreeMap<usize, u64>,
}

impl Solver<'_> {
    /// Closest vector to the projection of `t` onto span(b), as coefficients
    /// in b. `reduced` marks a basis already known to be HKZ.
    fn solve(&mut self, b: &Basis, t: &[Q], reduced: bool, seed: u64, depth: usize) -> Result<Vec<i64>> {
        let d = b.rank();
        *self.census.entry(d).or_insert(0) += 1;
        if depth > self.cfg.max_depth {
            return Err(Error::RecursionDepth);
        }
        if d == 0 {
            return Ok(Vec::new());
        }
        let lat = ShiftedLattice::new(b.clone(), t.to_vec())?.projected();
        if d == 1 {
            let c = rational::round_ties_down(&lat.tau_exact()[0]);
            return Ok(vec![rational::to_i64(&c)?]);
        }
        if let Some(y) = lat.target_in_lattice() {
            return Ok(y);
        }
        let hkz = if reduced { HkzBasis::assume_reduced(b.clone()) } else { hkz_basis(b)? };
        let ident = HkzBasis::assume_reduced(hkz.basis.clone());
        let lat_h = ShiftedLattice::new(hkz.basis.clone(), lat.target().to_vec())?;
        let plan = DgsPlan::from_hkz(&lat_h, ident)?;
        let mut rng = rng_from_seed(derive_seed(seed, &[depth as i64, -1]));
        let cands = ccvp_plan(&plan, &self.cfg.ccvp, &mut rng)?;
        let gi = good_index(&hkz, self.cfg.ccvp.f_for(d))?;
        let k1 = gi.k - 1;
        let sub = hkz.basis.prefix(k1);

        let mut groups: Vec<(Vec<i64>, Vec<i64>)> = Vec::new();
        let mut keys: HashSet<Vec<i64>> = HashSet::new();
        for y in &cands.vectors {
            let key = y[k1..].to_vec();
            if keys.insert(key.clone()) {
                groups.push((key, y.clone()));
            }
        }
        let mut best: Option<(Vec<i64>, Q)> = None;
        for (key, rep) in groups {
            let shifted = rational::sub(lat.target(), &hkz.basis.combine(&rep));
            let child_seed = derive_seed(seed, &[depth as i64].iter().chain(key.iter()).copied().collect::<Vec<_>>());
            let x = self.solve(&sub, &shifted, true, child_seed, depth + 1)?;
            let mut y = rep.clone();
            for (a, b) in y.iter_mut().zip(&x) {
                *a = a.checked_add(*b).ok_or(Error::Overflow)?;
            }
            let coeffs = hkz.to_input_coeffs(&y)?;
            let dist = lat.dist_sq_exact(&coeffs);
            let better = match &best {
                None => true,
                Some((bc, bd)) => dist < *bd || (dist == *bd && coeffs < *bc),
            };
            if better {
                best = Some((coeffs, dist));
            }
        }
        best.map(|(c, _)| c).ok_or(Error::SolverStarved)
    }
}

/// Exact closest vector to t, via the cluster-CVP recursion. Repeats the
/// whole solve `cfg.repeat` times and keeps the best answer.
pub fn exact_cvp<R: Rng + ?Sized>(b: &Basis, t: &[Q], cfg: &CvpConfig, rng: &mut R) -> Result<CvpSolution> {
    let lat = ShiftedLattice::new(b.clone(), t.to_vec())?;
    if !lat.in_span() {
        return Err(Error::TargetNotInSpan);
    }
    let mut solver = Solver { cfg, census: BTreeMap::new() };
    let mut best: Option<(Vec<i64>, Q)> = None;
    for _ in 0..cfg.repeat.max(1) {
        let seed = rng.gen::<u64>();
        let y = solver.solve(b, t, false, seed, 0)?;
        let d = lat.dist_sq_exact(&y);
        let better = match &best {
            None => true,
            Some((by, bd)) => d < *bd || (d == *bd && y < *by),
        };
        if better {
            best = Some((y, d));
        }
    }
    let (coeffs, dist_sq) = best.expect("at least one repetition");
    let census = solver.census.into_iter().rev().collect();
    Ok(CvpSolution { coeffs, dist_sq, census })
}

/// Calls per rank of one `exact_cvp` run, highest rank first.
pub fn recursion_census<R: Rng + ?Sized>(b: &Basis, t: &[Q], cfg: &CvpConfig, rng: &mut R) -> Result<Vec<(usize, u64)>> {
    Ok(exact_cvp(b, t, &CvpConfig { repeat: 1, ..*cfg }, rng)?.census)
}

/// The single-candidate reduction: HKZ-reduce, ask `oracle` for one
/// lattice vector y near a closest vector, pick the first k with
/// ||b̃_k|| > ||y − t||/√n, and recurse on L(b₁, …, b_{k−1}) and t − y.
/// `oracle` receives a basis and a target in its span and returns
/// coefficients in that basis.
pub fn simple_reduction_cvp<F>(b: &Basis, t: &[Q], oracle: &mut F) -> Result<Vec<i64>>
where
    F: FnMut(&Basis, &[Q]) -> Result<Vec<i64>>,
{
    let lat = ShiftedLattice::new(b.clone(), t.to_vec())?;
    if !lat.in_span() {
        return Err(Error::TargetNotInSpan);
    }
    simple_rec(b, t, oracle)
}

fn simple_rec<F>(b: &Basis, t: &[Q], oracle: &mut F) -> Result<Vec<i64>>
where
    F: FnMut(&Basis, &[Q]) -> Result<Vec<i64>>,
{
    let d = b.rank();
    if d == 0 {
        return Ok(Vec::new());
    }
    let lat = ShiftedLattice::new(b.clone(), t.to_vec())?.projected();
    if d == 1 {
        return Ok(vec![rational::to_i64(&rational::round_ties_down(&lat.tau_exact()[0]))?]);
    }
    let hkz = hkz_basis(b)?;
    let lat_h = ShiftedLattice::new(hkz.basis.clone(), lat.target().to_vec())?;
    let y = oracle(&hkz.basis, lat_h.target())?;
    // ||b̃_k||² > ||y − t||²/n, compared exactly
    let dy = lat_h.dist_sq_exact(&y);
    let nq = rational::q_int(d as i64);
    let k = hkz.basis.gs().exact.norms_sq.iter().position(|g| g * &nq > dy).map_or(d, |i| i + 1);
    let sub = hkz.basis.prefix(k - 1);
    let shifted = rational::sub(lat_h.target(), &hkz.basis.combine(&y));
    let x = simple_rec(&sub, &shifted, oracle)?;
    let mut z = y;
    for (a, b) in z.iter_mut().zip(&x) {
        *a = a.checked_add(*b).ok_or(Error::Overflow)?;
    }
    hkz.to_input_coeffs(&z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::cvp_enum;
    use crate::rational::q_frac;
    use crate::rng::rng_from_seed;

    fn id(n: usize) -> Basis {
        Basis::from_integers(&(0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn good_index_identity() {
        let h = hkz_basis(&id(4)).unwrap();
        let gi = good_index(&h, 2).unwrap();
        assert_eq!(gi.k, 1);
        assert_eq!(gi.m[0], 1);
        assert_eq!(gi.m[1], 1);
        assert_eq!(gi.shift_bound, 16.0);
    }

    #[test]
    fn good_index_spread_norms() {
        let b = Basis::from_integers(&[vec![1, 0], vec![0, 100]]).unwrap();
        let gi = good_index(&HkzBasis::assume_reduced(b), 1).unwrap();
        // R = 100, thresholds 100 and 50: both first met at index 2
        assert_eq!(gi.m, vec![2, 2]);
        assert_eq!(gi.k, 2);
    }

    #[test]
    fn good_index_long_first_vector() {
        let b = Basis::from_integers(&[vec![100, 0], vec![0, 1]]).unwrap();
        let gi = good_index(&HkzBasis::assume_reduced(b), 1).unwrap();
        assert_eq!(gi.m, vec![1, 1]);
        assert_eq!(gi.k, 1);
    }

    #[test]
    fn cluster_identical_points() {
        let lat = ShiftedLattice::new(id(2), vec![q_frac(1, 2), q_frac(1, 2)]).unwrap();
        assert!(cluster_test(&lat, &[0, 0], &[0, 0], &q_frac(1, 4), &q_frac(1, 4)).unwrap());
        assert!(cluster_test(&lat, &[0, 0], &[1, 0], &q_frac(1, 4), &q_frac(1, 4)).is_err());
    }

    #[test]
    fn exact_cvp_small() {
        let mut rng = rng_from_seed(9);
        let b = id(1);
        let s = exact_cvp(&b, &[q_frac(5, 2)], &CvpConfig::default(), &mut rng).unwrap();
        assert_eq!(s.coeffs, vec![2]);
        let b = Basis::from_integers(&[vec![3, 1, 0], vec![-1, 4, 2], vec![0, 2, 5]]).unwrap();
        for t in [[q_frac(1, 3), q_frac(7, 5), q_frac(-2, 3)], [q_frac(5, 2), q_frac(0, 1), q_frac(9, 4)]] {
            let s = exact_cvp(&b, &t, &CvpConfig::default(), &mut rng).unwrap();
            assert_eq!(s.dist_sq, cvp_enum(&b, &t).unwrap().dist_sq);
        }
    }

    #[test]
    fn simple_reduction_with_enum_oracle() {
        let b = Basis::from_integers(&[vec![2, 1, 0], vec![1, -3, 1], vec![0, 1, 4]]).unwrap();
        let t = vec![q_frac(7, 3), q_frac(-1, 2), q_frac(5, 4)];
        let mut oracle = |bb: &Basis, tt: &[Q]| cvp_enum(bb, tt).map(|c| c.coeffs);
        let y = simple_reduction_cvp(&b, &t, &mut oracle).unwrap();
        let lat = ShiftedLattice::new(b.clone(), t.clone()).unwrap();
        assert_eq!(lat.dist_sq_exact(&y), cvp_enum(&b, &t).unwrap().dist_sq);
    }
}
