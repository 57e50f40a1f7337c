//! Analytic tail and counting bounds.

use std::f64::consts::{E, PI};

/// ln of e^{πnα²}(√(2πe r²) e^{−πr²})^n, the bound on
/// Pr[||X|| ≥ r s √n] for X ~ D_{L−t,s} with α = dist(t,L)/(√n s).
/// Valid for r ≥ 1/√(2π).
pub fn log_tail_bound(n: usize, alpha: f64, r: f64) -> f64 {
    let n = n as f64;
    PI * n * alpha * alpha + n * (0.5 * (2.0 * PI * E * r * r).ln() - PI * r * r)
}

/// Same bound with the prefactor given directly as ln(ρ_s(L)/ρ_s(L−t)).
pub fn log_tail_bound_with(n: usize, log_prefactor: f64, r: f64) -> f64 {
    let n = n as f64;
    log_prefactor + n * (0.5 * (2.0 * PI * E * r * r).ln() - PI * r * r)
}

/// Smallest r ≥ 1/√(2π) (to bisection accuracy, rounded up) with
/// log_tail_bound_with(n, log_prefactor, r) ≤ log_eps.
pub fn tail_radius_factor(n: usize, log_prefactor: f64, log_eps: f64) -> f64 {
    let r0 = 1.0 / (2.0 * PI).sqrt();
    if n == 0 {
        return r0;
    }
    let f = |r: f64| log_tail_bound_with(n, log_prefactor, r) - log_eps;
    if f(r0) <= 0.0 {
        return r0;
    }
    let mut hi = r0.max(1.0);
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    let mut lo = r0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Radius R with Pr[||X|| ≥ R] ≤ eps for X ~ D_{L−t,s}, given d = dist(t, L).
pub fn tail_radius(n: usize, s: f64, d: f64, eps: f64) -> f64 {
    let lp = PI * d * d / (s * s);
    tail_radius_factor(n, lp, eps.ln()) * s * (n as f64).sqrt()
}

/// e^{−3n²}, the bound on Pr[||X||² ≥ d² + 2(sn)²] when α ≤ 2^n.
pub fn log_square_tail_bound(n: usize) -> f64 {
    -3.0 * (n * n) as f64
}

/// 2⌈2s⌉^n − 1: at most this many lattice points have norm ≤ s·λ_1.
pub fn point_count_bound(n: usize, s: f64) -> f64 {
    2.0 * (2.0 * s).ceil().powi(n as i32) - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_meets_bound() {
        for n in 1..8 {
            for lp in [0.0, 3.0, 40.0] {
                let r = tail_radius_factor(n, lp, (1e-12f64).ln());
                assert!(log_tail_bound_with(n, lp, r) <= (1e-12f64).ln() + 1e-9);
                assert!(log_tail_bound_with(n, lp, r * 0.999) > (1e-12f64).ln());
            }
        }
    }

    #[test]
    fn square_tail_matches_first_bound() {
        // at r² = α² + 2n the first bound is below e^{−3n²} whenever α ≤ 2^n
        for n in 1..6usize {
            for alpha in [0.0, 0.5, 1.0, 2f64.powi(n as i32)] {
                let r = (alpha * alpha + 2.0 * n as f64).sqrt();
                assert!(log_tail_bound(n, alpha, r) <= log_square_tail_bound(n));
            }
        }
    }
}
