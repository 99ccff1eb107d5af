//! Binary seed encoding. The layout is described in `docs/seed-format.md`.

use super::{BiasedSeed, HashFamilySeed, PrgError, YaoSampleSeed};
use crate::gf2e::FieldElem;

pub const FORMAT_VERSION: u8 = 1;

const TAG_HASH: u8 = 0x01;
const TAG_BIASED: u8 = 0x02;
const TAG_YAO: u8 = 0x03;

#[derive(Debug, Clone, PartialEq)]
pub enum Seed {
    Hash(HashFamilySeed),
    Biased(BiasedSeed),
    Yao(YaoSampleSeed),
}

pub fn encode(seed: &Seed) -> Vec<u8> {
    let mut out = vec![FORMAT_VERSION];
    match seed {
        Seed::Hash(h) => {
            out.push(TAG_HASH);
            out.extend_from_slice(&h.ell_wise().to_le_bytes());
            out.extend_from_slice(&h.n_domain().to_le_bytes());
            out.extend_from_slice(&h.m_range().to_le_bytes());
            for c in h.coeffs() {
                out.extend(c.to_bytes(h.field_width()));
            }
        }
        Seed::Biased(b) => put_biased(&mut out, b),
        Seed::Yao(y) => {
            out.push(TAG_YAO);
            out.extend_from_slice(&y.n_len().to_le_bytes());
            out.extend_from_slice(&y.k_pow().to_le_bytes());
            put_biased(&mut out, y.block1());
            put_biased(&mut out, y.block2());
        }
    }
    out
}

fn put_biased(out: &mut Vec<u8>, b: &BiasedSeed) {
    out.push(TAG_BIASED);
    out.extend_from_slice(&b.m_len().to_le_bytes());
    out.extend_from_slice(&b.neg_log2_delta().to_le_bytes());
    out.extend_from_slice(&(b.width() as u16).to_le_bytes());
    out.extend(b.step().to_bytes(b.width()));
    out.extend(b.start().to_bytes(b.width()));
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], PrgError> {
        if self.buf.len() < n {
            return Err(PrgError::Malformed("truncated"));
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    fn u8(&mut self) -> Result<u8, PrgError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, PrgError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, PrgError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, PrgError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, PrgError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn elem(&mut self, width: u32) -> Result<FieldElem, PrgError> {
        Ok(FieldElem::from_bytes(self.take(width.div_ceil(8) as usize)?))
    }
}

pub fn decode(bytes: &[u8]) -> Result<Seed, PrgError> {
    let mut r = Reader { buf: bytes };
    if r.u8()? != FORMAT_VERSION {
        return Err(PrgError::Malformed("unknown version"));
    }
    let seed = match r.u8()? {
        TAG_HASH => {
            let ell = r.u32()?;
            let n = r.u64()?;
            let m = r.u64()?;
            if ell == 0 || ell > 1 << 16 {
                return Err(PrgError::Malformed("independence parameter"));
            }
            let width = super::hash::hash_field_width(n, m);
            let mut coeffs = Vec::with_capacity(ell as usize);
            for _ in 0..ell {
                let e = r.elem(width)?;
                if e.limbs()[1..] != [0, 0, 0] || (width < 64 && e.low_u64() >> width != 0) {
                    return Err(PrgError::SeedOutOfField);
                }
                coeffs.push(e.low_u64());
            }
            Seed::Hash(HashFamilySeed::from_coeffs(n, m, &coeffs)?)
        }
        TAG_BIASED => Seed::Biased(get_biased(&mut r)?),
        TAG_YAO => {
            let n = r.u64()?;
            let k = r.u64()?;
            if r.u8()? != TAG_BIASED {
                return Err(PrgError::Malformed("expected block 1"));
            }
            let b1 = get_biased(&mut r)?;
            if r.u8()? != TAG_BIASED {
                return Err(PrgError::Malformed("expected block 2"));
            }
            let b2 = get_biased(&mut r)?;
            Seed::Yao(YaoSampleSeed::from_blocks(n, k, b1, b2)?)
        }
        _ => return Err(PrgError::Malformed("unknown tag")),
    };
    if !r.buf.is_empty() {
        return Err(PrgError::Malformed("trailing bytes"));
    }
    Ok(seed)
}

fn get_biased(r: &mut Reader<'_>) -> Result<BiasedSeed, PrgError> {
    let m = r.u64()?;
    let d = r.f64()?;
    let width = r.u16()? as u32;
    if !(d.is_finite() && d > 0.0) {
        return Err(PrgError::Malformed("bias"));
    }
    if super::biased::biased_width(m, d)? != width {
        return Err(PrgError::Malformed("width does not match parameters"));
    }
    let step = r.elem(width)?;
    let start = r.elem(width)?;
    BiasedSeed::from_parts(m, d, step, start)
}

/// Seeds for a top-level biased block start with the version byte.
pub fn encode_biased(b: &BiasedSeed) -> Vec<u8> {
    encode(&Seed::Biased(b.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::SeededBits;

    #[test]
    fn round_trips() {
        let mut src = SeededBits::derive(8, "codec");
        let seeds = vec![
            Seed::Hash(HashFamilySeed::new(6, 1 << 20, 1 << 10, &mut src).unwrap()),
            Seed::Hash(HashFamilySeed::new(2, 16, 8, &mut src).unwrap()),
            Seed::Biased(BiasedSeed::new(1000, 0.01, &mut src).unwrap()),
            Seed::Yao(YaoSampleSeed::new(1 << 14, 8, 0.005, 0.005, &mut src).unwrap()),
        ];
        for s in seeds {
            let bytes = encode(&s);
            assert_eq!(bytes[0], FORMAT_VERSION);
            assert_eq!(decode(&bytes).unwrap(), s);
        }
    }

    #[test]
    fn rejects_corruption() {
        let mut src = SeededBits::derive(9, "codec");
        let bytes = encode(&Seed::Biased(BiasedSeed::new(1000, 0.01, &mut src).unwrap()));
        assert!(decode(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode(&extra).is_err());
        let mut ver = bytes.clone();
        ver[0] = 9;
        assert!(decode(&ver).is_err());
        let mut tag = bytes;
        tag[1] = 0x7f;
        assert!(decode(&tag).is_err());
    }

    #[test]
    fn hash_layout() {
        let h = HashFamilySeed::from_coeffs(16, 8, &[5, 9]).unwrap();
        let bytes = encode(&Seed::Hash(h));
        let mut want = vec![1u8, 1, 2, 0, 0, 0];
        want.extend_from_slice(&16u64.to_le_bytes());
        want.extend_from_slice(&8u64.to_le_bytes());
        want.extend_from_slice(&[5, 9]);
        assert_eq!(bytes, want);
    }
}
