//! Exact lattice linear algebra: bases, Gram-Schmidt data, enumeration
//! oracles, HKZ reduction and coset labels.

mod coset;
mod enumerate;
mod format;
mod gso;
mod hkz;
mod shifted;

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{self, Q, QVec};

pub use coset::{coset_label, CosetLabel, MAX_LABEL_DIM};
pub use enumerate::{babai, cvp_enum, enumerate_ball, svp_enum, ClosestVector, DEFAULT_NODE_BUDGET};
pub use format::{format_basis_file, parse_basis_file, parse_target, BasisFile, MAX_FILE_DIM};
pub use gso::{covering_radius_upper, gram_schmidt, ExactGs, GramSchmidt};
pub use hkz::{hkz_basis, is_hkz, HkzBasis};
pub use shifted::ShiftedLattice;

pub(crate) use enumerate::{closest, enumerate_levels, projected_closest};

/// A lattice basis: `rank` linearly independent rational row vectors in
/// R^ambient. Inputs from outside the crate are square; the CVP recursion
/// also builds lower-rank sublattices of a square lattice.
#[derive(Clone, Debug)]
pub struct Basis {
    inner: Arc<BasisData>,
}

#[derive(Debug)]
struct BasisData {
    rows: Vec<QVec>,
    ambient: usize,
    float_rows: Vec<Vec<f64>>,
    gs: GramSchmidt,
}

impl Basis {
    /// Full-rank square basis. Rejects dependent or non-square input.
    pub fn new(rows: Vec<QVec>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyBasis);
        }
        let n = rows.len();
        for r in &rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: r.len() });
            }
        }
        Self::with_ambient(rows, n)
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.iter().map(|&x| rational::q_int(x)).collect()).collect())
    }

    /// Basis of possibly lower rank inside R^ambient.
    pub(crate) fn with_ambient(rows: Vec<QVec>, ambient: usize) -> Result<Self> {
        for r in &rows {
            if r.len() != ambient {
                return Err(Error::DimensionMismatch { expected: ambient, got: r.len() });
            }
        }
        let gs = gso::compute(&rows)?;
        let float_rows = rows.iter().map(|r| rational::to_f64_vec(r)).collect();
        Ok(Basis { inner: Arc::new(BasisData { rows, ambient, float_rows, gs }) })
    }

    pub fn rank(&self) -> usize {
        self.inner.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.inner.ambient
    }

    pub fn is_square(&self) -> bool {
        self.rank() == self.ambient()
    }

    pub fn rows(&self) -> &[QVec] {
        &self.inner.rows
    }

    pub fn float_rows(&self) -> &[Vec<f64>] {
        &self.inner.float_rows
    }

    pub fn gs(&self) -> &GramSchmidt {
        &self.inner.gs
    }

    /// Gram determinant, the squared covolume.
    pub fn gram_det(&self) -> Q {
        self.gs().exact.norms_sq.iter().fold(rational::q_int(1), |acc, x| acc * x)
    }

    /// Sublattice spanned by the first `k` vectors.
    pub fn prefix(&self, k: usize) -> Basis {
        Basis::with_ambient(self.rows()[..k].to_vec(), self.ambient()).expect("prefix of a basis is a basis")
    }

    pub fn combine(&self, coeffs: &[i64]) -> QVec {
        let mut v = vec![Q::zero(); self.ambient()];
        for (c, row) in coeffs.iter().zip(self.rows()) {
            if *c == 0 {
                continue;
            }
            let c = rational::q_int(*c);
            for (x, b) in v.iter_mut().zip(row) {
                *x += &c * b;
            }
        }
        v
    }

    pub fn combine_f64(&self, coeffs: &[i64]) -> Vec<f64> {
        let mut v = vec![0.0; self.ambient()];
        for (c, row) in coeffs.iter().zip(self.float_rows()) {
            for (x, b) in v.iter_mut().zip(row) {
                *x += *c as f64 * b;
            }
        }
        v
    }

    /// Gram-Schmidt coordinates τ_i = <v, b̃_i>/||b̃_i||² and the squared
    /// norm of the component of `v` orthogonal to the span.
    pub fn project(&self, v: &[Q]) -> Result<(QVec, Q)> {
        if v.len() != self.ambient() {
            return Err(Error::DimensionMismatch { expected: self.ambient(), got: v.len() });
        }
        let ex = &self.gs().exact;
        let mut tau = Vec::with_capacity(self.rank());
        let mut par_sq = Q::zero();
        for (g, nsq) in ex.gs_vectors.iter().zip(&ex.norms_sq) {
            let t = rational::dot(v, g) / nsq;
            par_sq += &t * &t * nsq;
            tau.push(t);
        }
        let perp = rational::norm_sq(v) - par_sq;
        Ok((tau, perp))
    }

    /// Exact coefficients of a vector in the span, by back substitution
    /// through the Gram-Schmidt coordinates.
    pub fn coefficients(&self, v: &[Q]) -> Result<QVec> {
        let (tau, perp) = self.project(v)?;
        if !perp.is_zero() {
            return Err(Error::TargetNotInSpan);
        }
        Ok(self.gs().coefficients_from_tau(&tau))
    }

    /// Integer coefficients of a lattice vector.
    pub fn integer_coefficients(&self, v: &[Q]) -> Result<Vec<BigInt>> {
        let c = self.coefficients(v).map_err(|e| match e {
            Error::TargetNotInSpan => Error::NotALatticeVector,
            e => e,
        })?;
        c.into_iter()
            .map(|x| if x.is_integer() { Ok(x.to_integer()) } else { Err(Error::NotALatticeVector) })
            .collect()
    }

    /// Largest Gram-Schmidt norm ||B̃||.
    pub fn max_gs_norm(&self) -> f64 {
        self.gs().gs_norms.iter().cloned().fold(0.0, f64::max)
    }

    /// Exact squared norm of a combination.
    pub fn norm_sq_of(&self, coeffs: &[i64]) -> Q {
        rational::norm_sq(&self.combine(coeffs))
    }
}

impl PartialEq for Basis {
    fn eq(&self, other: &Self) -> bool {
        self.ambient() == other.ambient() && self.rows() == other.rows()
    }
}

/// Lexicographic order on coefficient vectors, the global tie-breaker.
pub fn lex_less(a: &[i64], b: &[i64]) -> bool {
    a < b
}

/// Signed magnitude check used by callers that need integral data.
pub(crate) fn all_integral(v: &[Q]) -> bool {
    v.iter().all(|x| x.is_integer())
}

/// Factor-2 bracket on dist(t, L).
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceEstimate {
    pub lower: f64,
    pub upper: f64,
}

impl DistanceEstimate {
    pub fn exact(d: f64) -> Self {
        DistanceEstimate { lower: d, upper: d }
    }

    /// Bracket invariant 0 ≤ lower ≤ upper ≤ 2·lower.
    pub fn is_valid(&self) -> bool {
        self.lower >= 0.0 && self.lower <= self.upper && self.upper <= 2.0 * self.lower * (1.0 + 1e-12)
    }
}

/// A prefix sublattice L′ of an HKZ basis with an anchor point, so that the
/// short part of L − t lies inside L′ + anchor − t.
#[derive(Clone, Debug)]
pub struct SublatticeSplit {
    /// One more than the rank of L′.
    pub k: usize,
    pub hkz: HkzBasis,
    pub sub_basis: Basis,
    /// Anchor lattice point, coefficients with respect to the HKZ basis.
    /// Samples lie in L′ + anchor − t.
    pub anchor: Vec<i64>,
    pub radius: f64,
    /// Enumeration knob kept for interface fidelity; inert with exact HKZ.
    pub u: f64,
}
