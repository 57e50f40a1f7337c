//! Exact HKZ reduction by repeated projected-SVP insertion.

use num_traits::Zero;

use super::{enumerate::projected_svp, Basis};
use crate::error::{Error, Result};
use crate::rational::{self, Q, QVec};

/// An HKZ-reduced basis with the integer transform from the input basis:
/// row i of `basis` equals Σ_j transform[i][j] · (input row j).
#[derive(Clone, Debug)]
pub struct HkzBasis {
    pub basis: Basis,
    pub gamma: f64,
    pub transform: Vec<Vec<i64>>,
}

impl HkzBasis {
    /// Coefficients with respect to the input basis of a vector given by
    /// coefficients `c` in the HKZ basis.
    pub fn to_input_coeffs(&self, c: &[i64]) -> Result<Vec<i64>> {
        let d = self.basis.rank();
        let mut out = vec![0i64; d];
        for (ci, row) in c.iter().zip(&self.transform) {
            if *ci == 0 {
                continue;
            }
            for (o, t) in out.iter_mut().zip(row) {
                *o = t.checked_mul(*ci).and_then(|x| o.checked_add(x)).ok_or(Error::Overflow)?;
            }
        }
        Ok(out)
    }

    /// Wrap a basis already known to be HKZ.
    pub(crate) fn assume_reduced(basis: Basis) -> Self {
        let d = basis.rank();
        let transform = (0..d).map(|i| (0..d).map(|j| (i == j) as i64).collect()).collect();
        HkzBasis { basis, gamma: 1.0, transform }
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    // returns (g, x, y) with a x + b y = g ≥ 0
    let (mut old_r, mut r) = (a as i128, b as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (old_r, old_s, old_t) = (-old_r, -old_s, -old_t);
    }
    (old_r as i64, old_s as i64, old_t as i64)
}

fn combine_rows(a: &QVec, b: &QVec, x: i64, y: i64) -> QVec {
    let (x, y) = (rational::q_int(x), rational::q_int(y));
    a.iter().zip(b).map(|(p, q)| &x * p + &y * q).collect()
}

fn combine_int(a: &[i64], b: &[i64], x: i64, y: i64) -> Result<Vec<i64>> {
    a.iter()
        .zip(b)
        .map(|(p, q)| {
            x.checked_mul(*p)
                .zip(y.checked_mul(*q))
                .and_then(|(u, v)| u.checked_add(v))
                .ok_or(Error::Overflow)
        })
        .collect()
}

/// Replace rows[start..] by a unimodular recombination whose first row is
/// Σ v_j rows[start + j]. `v` must be primitive.
fn insert_primitive(rows: &mut [QVec], tr: &mut [Vec<i64>], start: usize, v: &[i64]) -> Result<()> {
    let mut v = v.to_vec();
    for j in (1..v.len()).rev() {
        let (a, b) = (v[j - 1], v[j]);
        if b == 0 {
            continue;
        }
        let (g, x, y) = ext_gcd(a, b);
        let (p, q) = (a / g, b / g);
        let (i0, i1) = (start + j - 1, start + j);
        // [[p, q], [-y, x]] has determinant p x + q y = 1
        let r0 = combine_rows(&rows[i0], &rows[i1], p, q);
        let r1 = combine_rows(&rows[i0], &rows[i1], -y, x);
        let t0 = combine_int(&tr[i0], &tr[i1], p, q)?;
        let t1 = combine_int(&tr[i0], &tr[i1], -y, x)?;
        rows[i0] = r0;
        rows[i1] = r1;
        tr[i0] = t0;
        tr[i1] = t1;
        v[j - 1] = g;
        v[j] = 0;
    }
    match v[0] {
        1 => Ok(()),
        -1 => {
            for x in rows[start].iter_mut() {
                *x = -x.clone();
            }
            for x in tr[start].iter_mut() {
                *x = -*x;
            }
            Ok(())
        }
        _ => Err(Error::Internal("shortest vector is not primitive".into())),
    }
}

/// Exact HKZ basis (γ = 1) of the lattice spanned by `b`.
pub fn hkz_basis(b: &Basis) -> Result<HkzBasis> {
    let d = b.rank();
    let ambient = b.ambient();
    let mut rows: Vec<QVec> = b.rows().to_vec();
    let mut tr: Vec<Vec<i64>> = (0..d).map(|i| (0..d).map(|j| (i == j) as i64).collect()).collect();
    let mut cur = b.clone();
    for i in 0..d.saturating_sub(1) {
        let (v, norm) = projected_svp(cur.gs(), i)?;
        // keep the current vector when it is already shortest
        if norm == cur.gs().exact.norms_sq[i] {
            continue;
        }
        insert_primitive(&mut rows, &mut tr, i, &v)?;
        cur = Basis::with_ambient(rows.clone(), ambient)?;
    }
    // size reduction
    let mut mu: Vec<QVec> = cur.gs().exact.mu.clone();
    for i in 1..d {
        for j in (0..i).rev() {
            let q = rational::round_ties_down(&mu[i][j]);
            if q.is_zero() {
                continue;
            }
            let qi = rational::to_i64(&q)?;
            let qq = Q::from_integer(q);
            let (lo, hi) = rows.split_at_mut(i);
            for (x, y) in hi[0].iter_mut().zip(&lo[j]) {
                *x -= &qq * y;
            }
            let (tlo, thi) = tr.split_at_mut(i);
            for (x, y) in thi[0].iter_mut().zip(&tlo[j]) {
                *x = y.checked_mul(qi).and_then(|z| x.checked_sub(z)).ok_or(Error::Overflow)?;
            }
            for l in 0..=j {
                let m = mu[j][l].clone();
                mu[i][l] -= &qq * m;
            }
        }
    }
    let basis = Basis::with_ambient(rows, ambient)?;
    Ok(HkzBasis { basis, gamma: 1.0, transform: tr })
}

/// Check the three HKZ conditions with γ = 1 exactly.
pub fn is_hkz(b: &Basis) -> Result<bool> {
    let g = b.gs();
    let half = rational::q_frac(1, 2);
    for i in 0..b.rank() {
        for j in 0..i {
            if g.exact.mu[i][j].clone() > half.clone() || g.exact.mu[i][j].clone() < -half.clone() {
                return Ok(false);
            }
        }
        let (_, n) = projected_svp(g, i)?;
        if n != g.exact.norms_sq[i] {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::svp_enum;
    use crate::rational::q_int;

    #[test]
    fn identity_is_fixed() {
        let b = Basis::from_integers(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let h = hkz_basis(&b).unwrap();
        assert_eq!(h.basis, b);
    }

    #[test]
    fn first_vector_is_shortest() {
        // the matrix ((1,1),(0,3)) read column-wise
        let b = Basis::from_integers(&[vec![1, 0], vec![1, 3]]).unwrap();
        let h = hkz_basis(&b).unwrap();
        let lam = b.norm_sq_of(&svp_enum(&b).unwrap());
        assert_eq!(lam, q_int(1));
        assert_eq!(rational::norm_sq(&h.basis.rows()[0]), lam);
        assert!(is_hkz(&h.basis).unwrap());
    }

    #[test]
    fn transform_reproduces_rows() {
        let b = Basis::from_integers(&[vec![4, 1, -3, 2], vec![1, 7, 2, -1], vec![-2, 3, 6, 5], vec![3, -4, 1, 8]]).unwrap();
        let h = hkz_basis(&b).unwrap();
        assert!(is_hkz(&h.basis).unwrap());
        for (row, t) in h.basis.rows().iter().zip(&h.transform) {
            assert_eq!(*row, b.combine(t));
        }
        assert_eq!(h.basis.gram_det(), b.gram_det());
    }

    #[test]
    fn gcd_identity() {
        for (a, b) in [(3, 5), (-4, 6), (0, -7), (12, 0), (-9, -6)] {
            let (g, x, y) = ext_gcd(a, b);
            assert_eq!(a * x + b * y, g);
            assert!(g > 0);
        }
    }
}
