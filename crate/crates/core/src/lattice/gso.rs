use num_traits::{One, Zero};

use super::Basis;
use crate::error::{Error, Result};
use crate::rational::{self, Q, QVec};

/// Exact Gram-Schmidt data.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactGs {
    pub gs_vectors: Vec<QVec>,
    /// `mu[i][j]` for `j < i`; `mu[i][i] = 1`.
    pub mu: Vec<QVec>,
    pub norms_sq: Vec<Q>,
}

/// Gram-Schmidt orthogonalization, computed exactly and rounded once to
/// floats for the numeric consumers.
#[derive(Clone, Debug)]
pub struct GramSchmidt {
    pub gs_vectors: Vec<Vec<f64>>,
    pub mu: Vec<Vec<f64>>,
    pub gs_norms: Vec<f64>,
    pub norms_sq: Vec<f64>,
    pub exact: ExactGs,
}

pub(super) fn compute(rows: &[QVec]) -> Result<GramSchmidt> {
    let d = rows.len();
    let mut gs_vectors: Vec<QVec> = Vec::with_capacity(d);
    let mut mu: Vec<QVec> = Vec::with_capacity(d);
    let mut norms_sq: Vec<Q> = Vec::with_capacity(d);
    for (i, b) in rows.iter().enumerate() {
        let mut v = b.clone();
        let mut mrow = vec![Q::zero(); d];
        for j in 0..i {
            let m = rational::dot(b, &gs_vectors[j]) / &norms_sq[j];
            if !m.is_zero() {
                for (x, g) in v.iter_mut().zip(&gs_vectors[j]) {
                    *x -= &m * g;
                }
            }
            mrow[j] = m;
        }
        mrow[i] = Q::one();
        let nsq = rational::norm_sq(&v);
        if nsq.is_zero() {
            return Err(Error::DegenerateBasis);
        }
        gs_vectors.push(v);
        mu.push(mrow);
        norms_sq.push(nsq);
    }
    let exact = ExactGs { gs_vectors, mu, norms_sq };
    Ok(GramSchmidt::from_exact(exact))
}

impl GramSchmidt {
    fn from_exact(exact: ExactGs) -> Self {
        let gs_vectors = exact.gs_vectors.iter().map(|v| rational::to_f64_vec(v)).collect();
        let mu = exact.mu.iter().map(|v| rational::to_f64_vec(v)).collect();
        let norms_sq: Vec<f64> = exact.norms_sq.iter().map(rational::q_to_f64).collect();
        let gs_norms = norms_sq.iter().map(|x| x.sqrt()).collect();
        GramSchmidt { gs_vectors, mu, gs_norms, norms_sq, exact }
    }

    pub fn rank(&self) -> usize {
        self.norms_sq.len()
    }

    /// Coefficients c with Σ c_i b_i = Σ τ_i b̃_i.
    pub fn coefficients_from_tau(&self, tau: &[Q]) -> QVec {
        let d = self.rank();
        let mut c = vec![Q::zero(); d];
        for i in (0..d).rev() {
            let mut x = tau[i].clone();
            for j in i + 1..d {
                x -= &self.exact.mu[j][i] * &c[j];
            }
            c[i] = x;
        }
        c
    }

    /// Exact squared length of the projection of Σ y_i b_i − Σ τ_i b̃_i onto
    /// span(b̃_start, …), with `y` indexed from `start`.
    pub fn exact_partial_dist_sq(&self, start: usize, y: &[i64], tau: Option<&[Q]>) -> Q {
        let d = self.rank();
        let ex = &self.exact;
        let mut total = Q::zero();
        for i in start..d {
            let mut coord = rational::q_int(y[i - start]);
            for j in i + 1..d {
                let yj = y[j - start];
                if yj != 0 {
                    coord += &ex.mu[j][i] * rational::q_int(yj);
                }
            }
            if let Some(t) = tau {
                coord -= &t[i];
            }
            total += &coord * &coord * &ex.norms_sq[i];
        }
        total
    }

    /// Float version of the same quantity over the full rank.
    pub fn dist_sq_f64(&self, y: &[i64], tau: &[f64]) -> f64 {
        let d = self.rank();
        let mut total = 0.0;
        for i in 0..d {
            let mut coord = y[i] as f64 - tau[i];
            for j in i + 1..d {
                coord += self.mu[j][i] * y[j] as f64;
            }
            total += coord * coord * self.norms_sq[i];
        }
        total
    }
}

pub fn gram_schmidt(b: &Basis) -> GramSchmidt {
    b.gs().clone()
}

/// (¼ Σ ||b̃_i||²)^{1/2}, an upper bound on the covering radius.
pub fn covering_radius_upper(g: &GramSchmidt) -> f64 {
    (0.25 * g.norms_sq.iter().sum::<f64>()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q_int;

    #[test]
    fn identity_is_its_own_gs() {
        let b = Basis::from_integers(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let g = gram_schmidt(&b);
        for i in 0..3 {
            assert_eq!(g.exact.gs_vectors[i], b.rows()[i]);
            for j in 0..i {
                assert!(g.exact.mu[i][j].is_zero());
            }
        }
    }

    #[test]
    fn one_projection_step() {
        let b = Basis::from_integers(&[vec![1, 0], vec![1, 1]]).unwrap();
        let g = gram_schmidt(&b);
        assert_eq!(g.exact.gs_vectors[1], vec![q_int(0), q_int(1)]);
        assert_eq!(g.exact.mu[1][0], q_int(1));
    }

    #[test]
    fn dependent_rows_rejected() {
        let err = Basis::from_integers(&[vec![1, 2], vec![2, 4]]).unwrap_err();
        assert_eq!(err, Error::DegenerateBasis);
    }

    #[test]
    fn reconstruction_on_integer_basis() {
        let rows = vec![vec![3, -1, 4, 1], vec![5, 9, -2, 6], vec![5, 3, 5, -8], vec![9, 7, 9, 3]];
        let b = Basis::from_integers(&rows).unwrap();
        let g = gram_schmidt(&b);
        for i in 0..4 {
            for k in 0..4 {
                let mut x = g.gs_vectors[i][k];
                for j in 0..i {
                    x += g.mu[i][j] * g.gs_vectors[j][k];
                }
                assert!((x - rows[i][k] as f64).abs() < 1e-9);
            }
            for j in 0..i {
                let ip: f64 = g.gs_vectors[i].iter().zip(&g.gs_vectors[j]).map(|(a, b)| a * b).sum();
                assert!(ip.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn covering_bound_values() {
        let z3 = Basis::from_integers(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert!((covering_radius_upper(z3.gs()) - 3f64.sqrt() / 2.0).abs() < 1e-15);
        let z = Basis::from_integers(&[vec![1]]).unwrap();
        assert_eq!(covering_radius_upper(z.gs()), 0.5);
    }
}
