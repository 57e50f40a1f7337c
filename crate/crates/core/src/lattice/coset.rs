use super::Basis;
use crate::error::{Error, Result};
use crate::rational::Q;

pub const MAX_LABEL_DIM: usize = 64;

/// Element of L/2L: the coefficients of a representative, reduced mod 2,
/// packed into a bit set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetLabel {
    bits: u64,
    dim: u8,
}

impl CosetLabel {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= MAX_LABEL_DIM);
        CosetLabel { bits: 0, dim: dim as u8 }
    }

    #[inline]
    pub fn from_coeffs(c: &[i64]) -> Self {
        debug_assert!(c.len() <= MAX_LABEL_DIM);
        let mut bits = 0u64;
        for (i, x) in c.iter().enumerate() {
            bits |= ((x & 1) as u64) << i;
        }
        CosetLabel { bits, dim: c.len() as u8 }
    }

    pub fn from_bits(bits: u64, dim: usize) -> Self {
        assert!(dim <= MAX_LABEL_DIM);
        let mask = if dim == 64 { u64::MAX } else { (1u64 << dim) - 1 };
        CosetLabel { bits: bits & mask, dim: dim as u8 }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    /// Index in 0..2^n, for dense tables.
    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn coeffs(&self) -> Vec<u8> {
        (0..self.dim()).map(|i| ((self.bits >> i) & 1) as u8).collect()
    }
}

impl std::fmt::Display for CosetLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in self.coeffs() {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Coset of `v` in L/2L with respect to the basis `b`.
pub fn coset_label(b: &Basis, v: &[Q]) -> Result<CosetLabel> {
    if b.rank() > MAX_LABEL_DIM {
        return Err(Error::DimensionTooLarge { dim: b.rank(), cap: MAX_LABEL_DIM });
    }
    let c = b.integer_coefficients(v)?;
    let mut bits = 0u64;
    for (i, x) in c.iter().enumerate() {
        if x.bit(0) {
            bits |= 1 << i;
        }
    }
    Ok(CosetLabel { bits, dim: b.rank() as u8 })
}
