use num_traits::Zero;

use super::Basis;
use crate::error::{Error, Result};
use crate::rational::{self, Q, QVec};

/// A lattice together with a target shift t: the support of D_{L−t,s}.
/// Points are handled as integer coefficient vectors y, standing for the
/// vector B·y − t.
#[derive(Clone, Debug)]
pub struct ShiftedLattice {
    basis: Basis,
    target: QVec,
    tau_exact: QVec,
    tau: Vec<f64>,
    perp_sq: Q,
    perp_sq_f: f64,
}

impl ShiftedLattice {
    pub fn new(basis: Basis, target: QVec) -> Result<Self> {
        let (tau_exact, perp_sq) = basis.project(&target)?;
        let tau = rational::to_f64_vec(&tau_exact);
        let perp_sq_f = rational::q_to_f64(&perp_sq);
        Ok(ShiftedLattice { basis, target, tau_exact, tau, perp_sq, perp_sq_f })
    }

    /// Unshifted lattice (t = 0).
    pub fn centered(basis: Basis) -> Self {
        let t = vec![Q::zero(); basis.ambient()];
        Self::new(basis, t).expect("zero target has the right length")
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn target(&self) -> &[Q] {
        &self.target
    }

    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    /// Gram-Schmidt coordinates of the target's projection.
    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn tau_exact(&self) -> &[Q] {
        &self.tau_exact
    }

    pub fn perp_sq(&self) -> &Q {
        &self.perp_sq
    }

    pub fn perp_sq_f64(&self) -> f64 {
        self.perp_sq_f
    }

    pub fn in_span(&self) -> bool {
        self.perp_sq.is_zero()
    }

    /// The same lattice with the target replaced by its projection.
    pub fn projected(&self) -> ShiftedLattice {
        if self.in_span() {
            return self.clone();
        }
        let mut t = vec![Q::zero(); self.basis.ambient()];
        for (c, g) in self.tau_exact.iter().zip(&self.basis.gs().exact.gs_vectors) {
            for (x, y) in t.iter_mut().zip(g) {
                *x += c * y;
            }
        }
        ShiftedLattice::new(self.basis.clone(), t).expect("projection has the right length")
    }

    /// ||B·y − t||², float.
    pub fn dist_sq(&self, y: &[i64]) -> f64 {
        self.basis.gs().dist_sq_f64(y, &self.tau) + self.perp_sq_f
    }

    /// ||B·y − t||², exact.
    pub fn dist_sq_exact(&self, y: &[i64]) -> Q {
        self.basis.gs().exact_partial_dist_sq(0, y, Some(&self.tau_exact)) + &self.perp_sq
    }

    /// Exact vector B·y − t.
    pub fn point(&self, y: &[i64]) -> QVec {
        rational::sub(&self.basis.combine(y), &self.target)
    }

    /// Exact coefficients of t with respect to B (target in span only).
    pub fn target_coefficients(&self) -> Result<QVec> {
        if !self.in_span() {
            return Err(Error::TargetNotInSpan);
        }
        Ok(self.basis.gs().coefficients_from_tau(&self.tau_exact))
    }

    /// Same lattice, target moved to t − B·y.
    pub fn recentered(&self, y: &[i64]) -> ShiftedLattice {
        let t = rational::sub(&self.target, &self.basis.combine(y));
        ShiftedLattice::new(self.basis.clone(), t).expect("same dimension")
    }

    /// Whether t itself is a lattice point.
    pub fn target_in_lattice(&self) -> Option<Vec<i64>> {
        let c = self.target_coefficients().ok()?;
        if !super::all_integral(&c) {
            return None;
        }
        c.iter().map(|x| rational::to_i64(&x.to_integer()).ok()).collect()
    }
}
