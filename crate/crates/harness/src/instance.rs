//! Seeded random instances.

use latgauss::lattice::{format_basis_file, Basis};
use latgauss::rational::{q_frac, q_int, Q, QVec};
use latgauss::rng::rng_from_seed;
use latgauss::{Error, Result};
use rand::Rng;
use sha2::{Digest, Sha256};

/// How the target is placed relative to the lattice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TargetMode {
    /// Uniform in the fundamental parallelepiped.
    Uniform,
    /// A lattice point plus noise uniform in [−noise, noise]^n.
    NearLattice { noise: f64 },
    /// Half the sum of a random nonempty subset of basis vectors.
    DeepHole,
}

impl TargetMode {
    pub fn name(&self) -> &'static str {
        match self {
            TargetMode::Uniform => "uniform",
            TargetMode::NearLattice { .. } => "near-lattice",
            TargetMode::DeepHole => "deep-hole",
        }
    }

    pub fn parse(s: &str, noise: f64) -> Option<Self> {
        match s {
            "uniform" => Some(TargetMode::Uniform),
            "near-lattice" | "near" => Some(TargetMode::NearLattice { noise }),
            "deep-hole" | "deep" => Some(TargetMode::DeepHole),
            _ => None,
        }
    }

    /// Cycles through the three modes, for mixed suites.
    pub fn mixed(i: usize) -> Self {
        match i % 3 {
            0 => TargetMode::Uniform,
            1 => TargetMode::NearLattice { noise: 0.25 },
            _ => TargetMode::DeepHole,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub basis: Basis,
    pub target: QVec,
}

impl Instance {
    /// First 16 hex digits of the SHA-256 of the canonical file text.
    pub fn hash(&self) -> String {
        let text = format_basis_file(&self.basis, Some(&self.target));
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Rational in [0, 1) with denominator 2^16.
fn unit<R: Rng>(rng: &mut R) -> Q {
    q_frac(rng.gen_range(0..1 << 16), 1 << 16)
}

/// Basis with entries uniform in [−bound, bound], resampled until full
/// rank, and a target placed according to `mode`.
pub fn gen_instance(n: usize, entry_bound: i64, seed: u64, mode: TargetMode) -> Result<Instance> {
    if n == 0 || entry_bound < 1 {
        return Err(Error::InvalidParameter("need n ≥ 1 and entry_bound ≥ 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let basis = loop {
        let rows: Vec<Vec<i64>> =
            (0..n).map(|_| (0..n).map(|_| rng.gen_range(-entry_bound..=entry_bound)).collect()).collect();
        match Basis::from_integers(&rows) {
            Ok(b) => break b,
            Err(Error::DegenerateBasis) => continue,
            Err(e) => return Err(e),
        }
    };
    let combine = |c: &[Q]| -> QVec {
        let mut t = vec![q_int(0); n];
        for (ci, row) in c.iter().zip(basis.rows()) {
            for (x, b) in t.iter_mut().zip(row) {
                *x += ci * b;
            }
        }
        t
    };
    let target = match mode {
        TargetMode::Uniform => combine(&(0..n).map(|_| unit(&mut rng)).collect::<Vec<_>>()),
        TargetMode::NearLattice { noise } => {
            let y: Vec<Q> = (0..n).map(|_| q_int(rng.gen_range(-3..=3))).collect();
            let mut t = combine(&y);
            if noise > 0.0 {
                let scale = latgauss::rational::q_from_f64(noise).ok_or(Error::Overflow)?;
                for x in t.iter_mut() {
                    *x += (unit(&mut rng) * q_int(2) - q_int(1)) * &scale;
                }
            }
            t
        }
        TargetMode::DeepHole => {
            let mut mask = 0u64;
            while mask == 0 {
                mask = rng.gen::<u64>() & ((1u64 << n.min(63)) - 1);
            }
            let c: Vec<Q> = (0..n).map(|i| if (mask >> i) & 1 == 1 { q_frac(1, 2) } else { q_int(0) }).collect();
            combine(&c)
        }
    };
    Ok(Instance { basis, target })
}

#[cfg(test)]
mod tests {
    use super::*;
    use latgauss::lattice::ShiftedLattice;

    #[test]
    fn deterministic_and_full_rank() {
        let a = gen_instance(3, 10, 42, TargetMode::Uniform).unwrap();
        let b = gen_instance(3, 10, 42, TargetMode::Uniform).unwrap();
        assert_eq!(a.basis, b.basis);
        assert_eq!(a.target, b.target);
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.basis.gram_det(), q_int(0));
    }

    #[test]
    fn noiseless_near_lattice_is_a_lattice_point() {
        let inst = gen_instance(4, 5, 7, TargetMode::NearLattice { noise: 0.0 }).unwrap();
        let lat = ShiftedLattice::new(inst.basis, inst.target).unwrap();
        assert!(lat.target_in_lattice().is_some());
    }
}
