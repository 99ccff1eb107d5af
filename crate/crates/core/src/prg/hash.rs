//! ℓ-wise independent hash families: a random polynomial of degree ℓ-1 over
//! GF(2^s), evaluated at the index and truncated to the low `log2 m` bits.

use super::PrgError;
use crate::bits::{BitSource, SourceExhausted};
use crate::gf2e::{FieldCtx, FieldElem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashFamilySeed {
    ell_wise: u32,
    n_domain: u64,
    m_range: u64,
    ctx: FieldCtx,
    /// `coeffs[j]` multiplies `x^j`.
    coeffs: Vec<FieldElem>,
}

/// Field width used for a family on `[n] -> [m]`.
pub fn hash_field_width(n_domain: u64, m_range: u64) -> u32 {
    let top = n_domain.max(m_range).max(2);
    64 - (top - 1).leading_zeros()
}

impl HashFamilySeed {
    pub fn new<B: BitSource + ?Sized>(ell_wise: u32, n_domain: u64, m_range: u64, rng: &mut B) -> Result<Self, PrgError> {
        Self::check_params(ell_wise, n_domain, m_range)?;
        let ctx = FieldCtx::exact(hash_field_width(n_domain, m_range)).expect("width <= 64");
        let coeffs = (0..ell_wise).map(|_| ctx.random_elem(rng)).collect::<Result<Vec<_>, SourceExhausted>>()?;
        Ok(HashFamilySeed { ell_wise, n_domain, m_range, ctx, coeffs })
    }

    /// Seed with explicit coefficients (low bits of each `u64`, reduced into the field).
    pub fn from_coeffs(n_domain: u64, m_range: u64, coeffs: &[u64]) -> Result<Self, PrgError> {
        Self::check_params(coeffs.len() as u32, n_domain, m_range)?;
        let ctx = FieldCtx::exact(hash_field_width(n_domain, m_range)).expect("width <= 64");
        let mask = low_mask(ctx.width());
        Ok(HashFamilySeed {
            ell_wise: coeffs.len() as u32,
            n_domain,
            m_range,
            ctx,
            coeffs: coeffs.iter().map(|c| FieldElem::from_u64(c & mask)).collect(),
        })
    }

    fn check_params(ell_wise: u32, n_domain: u64, m_range: u64) -> Result<(), PrgError> {
        if !m_range.is_power_of_two() {
            return Err(PrgError::RangeNotPowerOfTwo(m_range));
        }
        if ell_wise == 0 {
            return Err(PrgError::ZeroIndependence);
        }
        if n_domain == 0 {
            return Err(PrgError::EmptyDomain);
        }
        Ok(())
    }

    pub fn ell_wise(&self) -> u32 {
        self.ell_wise
    }

    pub fn n_domain(&self) -> u64 {
        self.n_domain
    }

    pub fn m_range(&self) -> u64 {
        self.m_range
    }

    pub fn field_width(&self) -> u32 {
        self.ctx.width()
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn seed_bits(&self) -> u64 {
        self.ell_wise as u64 * self.ctx.width() as u64
    }

    /// Bytes of live state: coefficients plus the parameter words.
    pub fn live_bytes(&self) -> u64 {
        self.ell_wise as u64 * self.ctx.width().div_ceil(8) as u64 + 24
    }

    pub fn eval(&self, i: u64) -> Result<u64, PrgError> {
        if i >= self.n_domain {
            return Err(PrgError::IndexOutOfDomain { index: i, domain: self.n_domain });
        }
        Ok(self.eval_unchecked(i))
    }

    /// Horner evaluation without the domain check; callers guarantee `i < n`.
    #[inline]
    pub fn eval_unchecked(&self, i: u64) -> u64 {
        let x = FieldElem::from_u64(i);
        let mut acc = FieldElem::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = self.ctx.mul(acc, x) + *c;
        }
        acc.low_u64() & (self.m_range - 1)
    }
}

fn low_mask(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1 << n) - 1
    }
}
