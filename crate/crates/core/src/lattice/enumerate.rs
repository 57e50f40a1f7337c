//! Depth-first Schnorr–Euchner enumeration. Floats steer the search; the
//! final choice among near-ties is made in exact arithmetic.

use super::{Basis, GramSchmidt, ShiftedLattice};
use crate::error::{Error, Result};
use crate::rational::Q;

pub const DEFAULT_NODE_BUDGET: u64 = 2_000_000_000;

/// Closest lattice point with its exact squared distance.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosestVector {
    pub coeffs: Vec<i64>,
    pub dist_sq: Q,
}

/// Enumerate integer vectors y on levels `start..d` whose projected
/// distance Σ_i ||b̃_i||² (y_i + Σ_{j>i} μ_{j,i} y_j − τ_i)² is at most the
/// current radius. `visit` receives each hit and returns the new radius.
pub(crate) fn enumerate_levels<F>(
    gs: &GramSchmidt,
    start: usize,
    tau: &[f64],
    mut radius_sq: f64,
    budget: u64,
    mut visit: F,
) -> Result<u64>
where
    F: FnMut(&[i64], f64) -> f64,
{
    let d = gs.rank();
    let m = d - start;
    if m == 0 {
        if radius_sq >= 0.0 {
            visit(&[], 0.0);
        }
        return Ok(1);
    }
    let mu = &gs.mu;
    let nsq = &gs.norms_sq;
    let center = |k: usize, y: &[i64]| -> f64 {
        let i = start + k;
        let mut c = tau[i];
        for l in k + 1..m {
            c -= mu[start + l][i] * y[l] as f64;
        }
        c
    };
    let mut y = vec![0i64; m];
    let mut ctr = vec![0f64; m];
    let mut dx = vec![0i64; m];
    let mut ddx = vec![0i64; m];
    let mut partial = vec![0f64; m + 1];
    let mut nodes: u64 = 0;

    let mut k = m - 1;
    ctr[k] = center(k, &y);
    start_level(k, &ctr, &mut y, &mut dx, &mut ddx);
    loop {
        nodes += 1;
        if nodes > budget {
            return Err(Error::EnumerationBudget);
        }
        let diff = y[k] as f64 - ctr[k];
        let dist = partial[k + 1] + diff * diff * nsq[start + k];
        if dist <= radius_sq {
            if k == 0 {
                radius_sq = visit(&y, dist);
                step(k, &mut y, &mut dx, &mut ddx);
            } else {
                partial[k] = dist;
                k -= 1;
                ctr[k] = center(k, &y);
                start_level(k, &ctr, &mut y, &mut dx, &mut ddx);
            }
        } else {
            k += 1;
            if k == m {
                break;
            }
            step(k, &mut y, &mut dx, &mut ddx);
        }
    }
    Ok(nodes)
}

fn start_level(k: usize, ctr: &[f64], y: &mut [i64], dx: &mut [i64], ddx: &mut [i64]) {
    let r = ctr[k].round();
    y[k] = r as i64;
    let s = if ctr[k] < r { -1 } else { 1 };
    dx[k] = s;
    ddx[k] = s;
}

// Zigzag around the center: distances are nondecreasing along the walk.
fn step(k: usize, y: &mut [i64], dx: &mut [i64], ddx: &mut [i64]) {
    y[k] += dx[k];
    ddx[k] = -ddx[k];
    dx[k] = ddx[k] - dx[k];
}

fn slack(x: f64, unit: f64) -> f64 {
    x * (1.0 + 1e-9) + 1e-9 * unit
}

fn unit_scale(gs: &GramSchmidt, start: usize) -> f64 {
    gs.norms_sq[start..].iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Nearest-plane rounding on the Gram-Schmidt coordinates.
pub(crate) fn babai_levels(gs: &GramSchmidt, tau: &[f64]) -> (Vec<i64>, f64) {
    babai_from(gs, 0, tau)
}

/// Nearest-plane rounding on levels `start..d`.
fn babai_from(gs: &GramSchmidt, start: usize, tau: &[f64]) -> (Vec<i64>, f64) {
    let d = gs.rank();
    let m = d - start;
    let mut y = vec![0i64; m];
    let mut dist = 0.0;
    for i in (start..d).rev() {
        let mut c = tau[i];
        for j in i + 1..d {
            c -= gs.mu[j][i] * y[j - start] as f64;
        }
        y[i - start] = c.round() as i64;
        let diff = y[i - start] as f64 - c;
        dist += diff * diff * gs.norms_sq[i];
    }
    (y, dist)
}

/// Babai nearest-plane point for `t` (projected onto the span).
pub fn babai(b: &Basis, t: &[Q]) -> Result<Vec<i64>> {
    let lat = ShiftedLattice::new(b.clone(), t.to_vec())?;
    Ok(babai_levels(b.gs(), lat.tau()).0)
}

/// Every lattice point y with ||By − t||² ≤ radius_sq, as coefficients
/// with the float squared distance (the orthogonal component included).
pub fn enumerate_ball<F>(lat: &ShiftedLattice, radius_sq: f64, budget: u64, mut visit: F) -> Result<u64>
where
    F: FnMut(&[i64], f64),
{
    let perp = lat.perp_sq_f64();
    let r = radius_sq - perp;
    if r < 0.0 {
        return Ok(0);
    }
    enumerate_levels(lat.basis().gs(), 0, lat.tau(), r, budget, |y, d| {
        visit(y, d + perp);
        r
    })
}

/// Exact closest point of the shifted lattice, lexicographic on ties.
/// The target need not lie in the span.
pub(crate) fn closest(lat: &ShiftedLattice, budget: u64) -> Result<ClosestVector> {
    let (coeffs, d) = projected_closest(lat, 0, budget)?;
    Ok(ClosestVector { coeffs, dist_sq: d + lat.perp_sq() })
}

/// Closest point to the projection of t in the projection of L onto
/// span(b̃_start, …): coefficients on levels `start..d` and the exact
/// projected squared distance (orthogonal part of t excluded).
pub(crate) fn projected_closest(lat: &ShiftedLattice, start: usize, budget: u64) -> Result<(Vec<i64>, Q)> {
    let gs = lat.basis().gs();
    let d = gs.rank();
    if start == d {
        return Ok((Vec::new(), Q::from_integer(0.into())));
    }
    let (yb, db) = babai_from(gs, start, lat.tau());
    let unit = unit_scale(gs, start);
    let mut best = db;
    let mut cands: Vec<(Vec<i64>, f64)> = vec![(yb, db)];
    enumerate_levels(gs, start, lat.tau(), slack(db, unit), budget, |y, dist| {
        if dist <= slack(best, unit) {
            if dist < best {
                best = dist;
                if cands.len() > 64 {
                    cands.retain(|(_, x)| *x <= slack(best, unit));
                }
            }
            cands.push((y.to_vec(), dist));
        }
        slack(best, unit)
    })?;
    pick_exact(cands.into_iter().filter(|(_, x)| *x <= slack(best, unit)).map(|(y, _)| y), |y| {
        gs.exact_partial_dist_sq(start, y, Some(lat.tau_exact()))
    })
    .ok_or_else(|| Error::Internal("closest-vector enumeration found no point".into()))
}

fn pick_exact<I, F>(cands: I, eval: F) -> Option<(Vec<i64>, Q)>
where
    I: Iterator<Item = Vec<i64>>,
    F: Fn(&[i64]) -> Q,
{
    let mut best: Option<(Vec<i64>, Q)> = None;
    for y in cands {
        let v = eval(&y);
        let better = match &best {
            None => true,
            Some((by, bv)) => v < *bv || (v == *bv && y < *by),
        };
        if better {
            best = Some((y, v));
        }
    }
    best
}

/// Closest lattice vector to `t`, which must lie in the span of `b`.
pub fn cvp_enum(b: &Basis, t: &[Q]) -> Result<ClosestVector> {
    let lat = ShiftedLattice::new(b.clone(), t.to_vec())?;
    if !lat.in_span() {
        return Err(Error::TargetNotInSpan);
    }
    closest(&lat, DEFAULT_NODE_BUDGET)
}

/// Shortest nonzero vector of the projection of L(b_start, …, b_d) onto
/// span(b̃_start, …), as coefficients on those levels; exact minimum with
/// lexicographic tie-break.
pub(crate) fn projected_svp(gs: &GramSchmidt, start: usize) -> Result<(Vec<i64>, Q)> {
    let d = gs.rank();
    let m = d - start;
    if m == 0 {
        return Err(Error::Internal("shortest vector of the zero lattice".into()));
    }
    // projected norms of the basis vectors themselves bound λ_1
    let mut init = f64::INFINITY;
    for i in start..d {
        let mut x = 0.0;
        for l in start..=i {
            let c = if l == i { 1.0 } else { gs.mu[i][l] };
            x += c * c * gs.norms_sq[l];
        }
        init = init.min(x);
    }
    let unit = unit_scale(gs, start);
    let tau = vec![0.0; d];
    let mut best = init;
    let mut cands: Vec<(Vec<i64>, f64)> = Vec::new();
    enumerate_levels(gs, start, &tau, slack(init, unit), DEFAULT_NODE_BUDGET, |y, dist| {
        if y.iter().all(|&c| c == 0) {
            return slack(best, unit);
        }
        if dist <= slack(best, unit) {
            if dist < best {
                best = dist;
                if cands.len() > 64 {
                    cands.retain(|(_, x)| *x <= slack(best, unit));
                }
            }
            cands.push((y.to_vec(), dist));
        }
        slack(best, unit)
    })?;
    pick_exact(cands.into_iter().filter(|(_, x)| *x <= slack(best, unit)).map(|(y, _)| y), |y| {
        gs.exact_partial_dist_sq(start, y, None)
    })
    .ok_or_else(|| Error::Internal("shortest-vector enumeration found no point".into()))
}

/// Shortest nonzero lattice vector, as coefficients; lexicographically
/// smallest among the shortest.
pub fn svp_enum(b: &Basis) -> Result<Vec<i64>> {
    Ok(projected_svp(b.gs(), 0)?.0)
}
