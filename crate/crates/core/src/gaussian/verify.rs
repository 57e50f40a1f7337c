//! Numeric checks of the coset identity, the Hölder-type coset bound and
//! the coset-mass ladder, all from the mass oracles.

use super::mass::{coset_masses, mass};
use super::log_sum_exp;
use crate::error::{Error, Result};
use crate::lattice::{closest, Basis, ShiftedLattice, DEFAULT_NODE_BUDGET};
use crate::rational::{self, Q};

fn shifted(b: &Basis, t: Vec<Q>) -> Result<ShiftedLattice> {
    ShiftedLattice::new(b.clone(), t)
}

/// |LHS − RHS|/LHS for
/// ρ_s(L − x)ρ_s(L − y) = Σ_{c ∈ L/2L} ρ_{√2 s}(c − x − y)·ρ_{√2 s}(c − x + y).
pub fn check_rs_identity(b: &Basis, x: &[Q], y: &[Q], s: f64, eps_rel: f64) -> Result<f64> {
    let lx = mass(&shifted(b, x.to_vec())?, s, eps_rel)?;
    let ly = mass(&shifted(b, y.to_vec())?, s, eps_rel)?;
    let s2 = s * std::f64::consts::SQRT_2;
    let plus = coset_masses(&shifted(b, rational::add(x, y))?, s2, eps_rel)?;
    let minus = coset_masses(&shifted(b, rational::sub(x, y))?, s2, eps_rel)?;
    let terms: Vec<f64> =
        plus.masses.iter().zip(&minus.masses).map(|(p, m)| p.log_mass + m.log_mass).collect();
    let lhs = lx.log_mass + ly.log_mass;
    let rhs = log_sum_exp(&terms);
    Ok((rhs - lhs).exp_m1().abs())
}

/// Both sides of max_c ρ_s(c − t)² ≤ max_c ρ_{s/√2}(c − t)·ρ_{s/√2}(L), in
/// log form, and the relative margin (RHS − LHS)/RHS.
#[derive(Clone, Copy, Debug)]
pub struct HolderCheck {
    pub log_lhs: f64,
    pub log_rhs: f64,
    pub margin: f64,
}

pub fn check_rs_holder(lat: &ShiftedLattice, s: f64, eps_rel: f64) -> Result<HolderCheck> {
    let at_s = coset_masses(lat, s, eps_rel)?;
    let s_half = s * std::f64::consts::FRAC_1_SQRT_2;
    let at_half = coset_masses(lat, s_half, eps_rel)?;
    let theta = mass(&ShiftedLattice::centered(lat.basis().clone()), s_half, eps_rel)?;
    let log_lhs = 2.0 * at_s.max().log_mass;
    let log_rhs = at_half.max().log_mass + theta.log_mass;
    Ok(HolderCheck { log_lhs, log_rhs, margin: -(log_lhs - log_rhs).exp_m1() })
}

/// Ladder quantities at s_i = 2^{−i/2}s, with θ(i) = ρ_{s_i}(L):
/// S_i = Π_{j≥1} θ(i+j)^{1/2^j}/θ(i+2) and R_i = θ(i+1)/θ(i+2), for
/// i = 1..ℓ, plus the sandwich ratio
/// Q_i = max_c ρ_{s_i}(c − t)/(ρ_{s_i}(y − t)·ρ_{s_i}(2L)), y a closest vector.
#[derive(Clone, Debug)]
pub struct LadderTrace {
    pub ell: usize,
    /// S_1..S_ℓ from the truncated product (a lower value).
    pub s_ratios: Vec<f64>,
    /// S_i with the truncated tail bounded above by monotonicity of θ.
    pub s_upper: Vec<f64>,
    pub r_ratios: Vec<f64>,
    pub sandwich: Vec<f64>,
    /// First i with S_i ≤ 2^{3n/(4ℓ)}·(1 + tol), 1-based.
    pub chosen_i: usize,
}

/// Product terms with weight below 2^{−40} are dropped.
const LADDER_DEPTH: usize = 40;

pub fn coset_ladder(lat: &ShiftedLattice, s: f64, ell: usize, eps_rel: f64, tol: f64) -> Result<LadderTrace> {
    if ell == 0 {
        return Err(Error::InvalidParameter("ell must be at least 1".into()));
    }
    let n = lat.rank();
    let centered = ShiftedLattice::centered(lat.basis().clone());
    let si = |i: usize| s * 2f64.powf(-(i as f64) / 2.0);
    // log θ(i) for i = 0..=ell + LADDER_DEPTH + 1
    let top = ell + LADDER_DEPTH + 1;
    let mut log_theta = Vec::with_capacity(top + 1);
    for i in 0..=top {
        log_theta.push(mass(&centered, si(i), eps_rel)?.log_mass);
    }
    let d2 = rational::q_to_f64(&closest(lat, DEFAULT_NODE_BUDGET)?.dist_sq);
    let mut s_ratios = Vec::with_capacity(ell);
    let mut s_upper = Vec::with_capacity(ell);
    let mut r_ratios = Vec::with_capacity(ell);
    let mut sandwich = Vec::with_capacity(ell);
    for i in 1..=ell {
        let mut log_prod = 0.0;
        for j in 1..=LADDER_DEPTH {
            log_prod += log_theta[i + j] * 2f64.powi(-(j as i32));
        }
        let tail = log_theta[i + LADDER_DEPTH] * 2f64.powi(-(LADDER_DEPTH as i32));
        s_ratios.push((log_prod - log_theta[i + 2]).exp());
        s_upper.push((log_prod + tail - log_theta[i + 2]).exp());
        r_ratios.push((log_theta[i + 1] - log_theta[i + 2]).exp());
        let phi = coset_masses(lat, si(i), eps_rel)?.max().log_mass;
        let log_rho_y = -std::f64::consts::PI * d2 / (si(i) * si(i));
        // ρ_{s_i}(2L) = ρ_{s_i/2}(L) = θ(i + 2)
        sandwich.push((phi - log_rho_y - log_theta[i + 2]).exp());
    }
    let bound = 2f64.powf(3.0 * n as f64 / (4.0 * ell as f64)) * (1.0 + tol);
    let chosen = s_upper.iter().position(|&x| x <= bound).ok_or(Error::LadderViolation)?;
    Ok(LadderTrace { ell, s_ratios, s_upper, r_ratios, sandwich, chosen_i: chosen + 1 })
}

impl LadderTrace {
    /// 1 ≤ Q_i ≤ S_i ≤ 2^{n/4} and 1 ≤ R_i ≤ 2^{n/2}, all within `tol`.
    pub fn sandwich_holds(&self, n: usize, tol: f64) -> bool {
        let cap_s = 2f64.powf(n as f64 / 4.0) * (1.0 + tol);
        let cap_r = 2f64.powf(n as f64 / 2.0) * (1.0 + tol);
        (0..self.ell).all(|k| {
            let (q, s, su, r) = (self.sandwich[k], self.s_ratios[k], self.s_upper[k], self.r_ratios[k]);
            q >= 1.0 - tol && q <= su * (1.0 + tol) && s >= 1.0 - tol && su <= cap_s && r >= 1.0 - tol && r <= cap_r
        })
    }
}
