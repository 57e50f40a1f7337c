//! Gaussian weights, certified lattice masses, samplers, and the numeric
//! checks of the coset identity, the Hölder-type inequality and the
//! coset-mass ladder.

mod mass;
mod sampler;
pub mod tail;
mod verify;

use std::f64::consts::PI;

pub use mass::{coset_mass, coset_masses, mass, m_target, support, CosetMasses, MassConfig, MassEstimate, Support};
pub use sampler::{
    sample_1d, sample_exact, sample_klein, ExactSampler, KleinSampler, DEFAULT_KLEIN_FACTOR,
};
pub use verify::{check_rs_holder, check_rs_identity, coset_ladder, HolderCheck, LadderTrace};

/// Gaussian parameter s, stored as base · 2^{−half_steps/2} so that a run of
/// halvings of s² lands exactly back on a dyadic multiple of the base.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianParam {
    base: f64,
    half_steps: i32,
}

impl GaussianParam {
    pub fn new(s: f64) -> Self {
        assert!(s.is_finite() && s > 0.0, "Gaussian parameter must be positive and finite");
        GaussianParam { base: s, half_steps: 0 }
    }

    /// 2^{ℓ/2}·s, which ℓ halvings of s² bring back to exactly s.
    pub fn raised(s: f64, ell: usize) -> Self {
        let mut p = Self::new(s);
        p.half_steps = -(ell as i32);
        p
    }

    /// The parameter divided by √2.
    pub fn halved(self) -> Self {
        GaussianParam { base: self.base, half_steps: self.half_steps + 1 }
    }

    pub fn half_steps(&self) -> i32 {
        self.half_steps
    }

    pub fn value(&self) -> f64 {
        let h = self.half_steps;
        let even = h.div_euclid(2);
        let v = self.base * 2f64.powi(-even);
        if h.rem_euclid(2) == 1 {
            v * std::f64::consts::FRAC_1_SQRT_2
        } else {
            v
        }
    }
}

/// ρ_s(x) = exp(−π||x||²/s²).
pub fn rho(s: f64, x: &[f64]) -> f64 {
    log_rho(s, x.iter().map(|v| v * v).sum()).exp()
}

/// ln ρ_s at a point of squared norm `norm_sq`.
#[inline]
pub fn log_rho(s: f64, norm_sq: f64) -> f64 {
    -PI * norm_sq / (s * s)
}

/// Numerically stable ln(Σ exp(a_i)).
pub fn log_sum_exp(a: &[f64]) -> f64 {
    let m = a.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let mut acc = Neumaier::default();
    for x in a {
        acc.add((x - m).exp());
    }
    m + acc.total().ln()
}

/// Compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn scale(&mut self, f: f64) {
        self.sum *= f;
        self.comp *= f;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_values() {
        assert_eq!(rho(1.0, &[0.0, 0.0]), 1.0);
        assert!((rho(1.0, &[1.0, 0.0]) - 0.04321391826377226).abs() < 1e-15);
        assert!((rho(2.0, &[1.0, 1.0]) - (-PI / 2.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn param_lands_exactly() {
        let s = 0.731;
        let mut p = GaussianParam::raised(s, 7);
        assert!((p.value() - s * 2f64.powf(3.5)).abs() < 1e-12);
        for _ in 0..7 {
            p = p.halved();
        }
        assert_eq!(p.value(), s);
    }

    #[test]
    fn lse_is_stable() {
        let v = log_sum_exp(&[-1000.0, -1000.0]);
        assert!((v - (-1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
