//! Binary key and ciphertext files.
//!
//! Key file: `"MCC1"`, version, kind (0 public, 1 private), then the
//! parameter block `n p q K N l` as u32 LE, `e` as two u64 LE, the CRC
//! polynomial as a length-prefixed bit string. A public key continues with
//! `G`; a private key with `G_P`, `G_Q` (u32 count, then length-prefixed
//! polynomials), `S`, `S^-1`, the permutation (u32 LE indices), the mask
//! basis (u32 count, then `N`-bit rows) and the masking matrix.
//!
//! Bit strings are packed LSB first and padded with zeros to a byte.
//! Matrix rows are padded individually; dimensions come from the
//! parameter block.

use mcc_core::{
    BinPoly, BitVec, Ciphertext, CodeParams, MaskBasis, MatF2, Permutation, PolyGenMatrix, PrivateKey, PublicKey, Ratio,
};

use crate::error::FormatError;

pub const KEY_MAGIC: &[u8; 4] = b"MCC1";
pub const CT_MAGIC: &[u8; 4] = b"MCCc";
pub const VERSION: u8 = 1;
const KIND_PUBLIC: u8 = 0;
const KIND_PRIVATE: u8 = 1;

type Result<T> = std::result::Result<T, FormatError>;

fn field(field: &'static str, msg: impl ToString) -> FormatError {
    FormatError::Field {
        field,
        msg: msg.to_string(),
    }
}

pub fn pack_bits(v: &BitVec) -> Vec<u8> {
    let mut out = vec![0u8; v.len().div_ceil(8)];
    for i in v.ones_iter() {
        out[i / 8] |= 1 << (i % 8);
    }
    out
}

/// Inverse of [`pack_bits`]; padding bits must be zero.
pub fn unpack_bits(bytes: &[u8], len: usize) -> Option<BitVec> {
    if bytes.len() != len.div_ceil(8) {
        return None;
    }
    let mut v = BitVec::zeros(len);
    for (i, &b) in bytes.iter().enumerate() {
        for j in 0..8 {
            if b >> j & 1 == 1 {
                let pos = i * 8 + j;
                if pos >= len {
                    return None;
                }
                v.set(pos, true);
            }
        }
    }
    Some(v)
}

#[derive(Default)]
struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }

    fn u32(&mut self, v: usize) {
        self.0.extend_from_slice(&(v as u32).to_le_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn bits(&mut self, v: &BitVec) {
        self.0.extend_from_slice(&pack_bits(v));
    }

    fn prefixed(&mut self, v: &BitVec) {
        self.u32(v.len());
        self.bits(v);
    }

    fn matrix(&mut self, m: &MatF2) {
        for row in m.row_iter() {
            self.bits(&row);
        }
    }

    fn polys(&mut self, g: &PolyGenMatrix) {
        self.u32(g.n());
        for p in g.polys() {
            self.prefixed(p.coeffs());
        }
    }

    fn header(&mut self, kind: u8, params: &CodeParams) {
        self.0.extend_from_slice(KEY_MAGIC);
        self.u8(VERSION);
        self.u8(kind);
        for v in [params.n, params.p, params.q, params.k, params.big_n(), params.l] {
            self.u32(v);
        }
        self.u64(params.e.num());
        self.u64(params.e.den());
        self.prefixed(params.r_poly.coeffs());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or(FormatError::Truncated(self.buf.len()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")) as usize)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn bits(&mut self, len: usize) -> Result<BitVec> {
        unpack_bits(self.take(len.div_ceil(8))?, len).ok_or(FormatError::Padding)
    }

    fn prefixed(&mut self) -> Result<BitVec> {
        let len = self.u32()?;
        self.bits(len)
    }

    fn matrix(&mut self, rows: usize, cols: usize, name: &'static str) -> Result<MatF2> {
        let rows = (0..rows).map(|_| self.bits(cols)).collect::<Result<Vec<_>>>()?;
        MatF2::from_rows(&rows, cols).map_err(|e| field(name, e))
    }

    fn polys(&mut self, name: &'static str) -> Result<PolyGenMatrix> {
        let n = self.u32()?;
        if n > self.buf.len() {
            return Err(field(name, "implausible polynomial count"));
        }
        let polys = (0..n)
            .map(|_| Ok(BinPoly::from_coeffs(self.prefixed()?)))
            .collect::<Result<Vec<_>>>()?;
        PolyGenMatrix::new(polys).map_err(|e| field(name, e))
    }

    fn magic(&mut self, magic: &'static [u8; 4]) -> Result<()> {
        let expected = std::str::from_utf8(magic).expect("ascii magic");
        if self.take(4).map_err(|_| FormatError::BadMagic { expected })? != magic {
            return Err(FormatError::BadMagic { expected });
        }
        match self.u8()? {
            VERSION => Ok(()),
            v => Err(FormatError::Version(v)),
        }
    }

    fn header(&mut self, kind: u8) -> Result<CodeParams> {
        self.magic(KEY_MAGIC)?;
        let got = self.u8()?;
        if got != kind {
            return Err(FormatError::Kind(got));
        }
        let [n, p, q, k, big_n, l] = [
            self.u32()?,
            self.u32()?,
            self.u32()?,
            self.u32()?,
            self.u32()?,
            self.u32()?,
        ];
        let e = Ratio::new(self.u64()?, self.u64()?).map_err(|err| field("e", err))?;
        let r_poly = BinPoly::from_coeffs(self.prefixed()?);
        let params = CodeParams::new(n, p, q, k, l, e, r_poly).map_err(|err| field("params", err))?;
        if params.big_n() != big_n {
            return Err(field(
                "N",
                format!("{big_n} does not equal n(K+p+q) = {}", params.big_n()),
            ));
        }
        Ok(params)
    }

    fn finish(&self) -> Result<()> {
        match self.buf.len() - self.pos {
            0 => Ok(()),
            extra => Err(FormatError::Trailing(extra)),
        }
    }
}

pub fn encode_public(key: &PublicKey) -> Vec<u8> {
    let mut w = Writer::default();
    w.header(KIND_PUBLIC, &key.params);
    w.matrix(&key.g);
    w.0
}

pub fn decode_public(bytes: &[u8]) -> Result<PublicKey> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let params = r.header(KIND_PUBLIC)?;
    let g = r.matrix(params.k, params.big_n(), "G")?;
    r.finish()?;
    let key = PublicKey { params, g };
    key.validate().map_err(FormatError::Invalid)?;
    Ok(key)
}

pub fn encode_private(key: &PrivateKey) -> Vec<u8> {
    let mut w = Writer::default();
    w.header(KIND_PRIVATE, &key.params);
    w.polys(&key.g_p);
    w.polys(&key.g_q);
    w.matrix(&key.s);
    w.matrix(&key.s_inv);
    for &i in key.perm.map() {
        w.u32(i as usize);
    }
    w.u32(key.mask_basis.rank());
    for v in key.mask_basis.vectors() {
        w.bits(v);
    }
    w.matrix(&key.mask_matrix);
    w.0
}

pub fn decode_private(bytes: &[u8]) -> Result<PrivateKey> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let params = r.header(KIND_PRIVATE)?;
    let (k, big_n) = (params.k, params.big_n());
    let g_p = r.polys("G_P")?;
    let g_q = r.polys("G_Q")?;
    let s = r.matrix(k, k, "S")?;
    let s_inv = r.matrix(k, k, "S^-1")?;
    let map = (0..big_n)
        .map(|_| r.u32().map(|i| i as u32))
        .collect::<Result<Vec<_>>>()?;
    let perm = Permutation::new(map).map_err(|e| field("permutation", e))?;
    let l = r.u32()?;
    if l != params.l {
        return Err(field("mask basis", format!("{l} vectors, expected {}", params.l)));
    }
    let vectors = (0..l).map(|_| r.bits(big_n)).collect::<Result<Vec<_>>>()?;
    let mask_basis = MaskBasis::new(vectors, big_n).map_err(|e| field("mask basis", e))?;
    let mask_matrix = r.matrix(k, big_n, "mask matrix")?;
    r.finish()?;
    let key = PrivateKey {
        params,
        g_p,
        g_q,
        s,
        s_inv,
        perm,
        mask_basis,
        mask_matrix,
    };
    key.validate().map_err(FormatError::Invalid)?;
    Ok(key)
}

pub fn encode_ciphertext(ct: &Ciphertext) -> Vec<u8> {
    let mut w = Writer::default();
    w.0.extend_from_slice(CT_MAGIC);
    w.u8(VERSION);
    w.u64(ct.bits.len() as u64);
    w.bits(&ct.bits);
    w.0
}

pub fn decode_ciphertext(bytes: &[u8]) -> Result<Ciphertext> {
    let mut r = Reader { buf: bytes, pos: 0 };
    r.magic(CT_MAGIC)?;
    let len = usize::try_from(r.u64()?).map_err(|_| field("length", "does not fit in memory"))?;
    if len.div_ceil(8) > bytes.len() {
        return Err(FormatError::Truncated(bytes.len()));
    }
    let bits = r.bits(len)?;
    r.finish()?;
    Ok(Ciphertext { bits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use mcc_core::fixtures::worked_example;

    #[test]
    fn pack_is_lsb_first() {
        let v = BitVec::parse01("1000000001").unwrap();
        assert_eq!(pack_bits(&v), [0x01, 0x02]);
        assert_eq!(unpack_bits(&[0x01, 0x02], 10), Some(v));
        assert_eq!(unpack_bits(&[0x01, 0x06], 10), None);
    }

    #[test]
    fn keys_round_trip() {
        let ex = worked_example().unwrap();
        let bytes = encode_public(&ex.public);
        assert_eq!(&bytes[..6], b"MCC1\x01\x00");
        assert_eq!(decode_public(&bytes).unwrap(), ex.public);
        assert_eq!(decode_private(&encode_private(&ex.private)).unwrap(), ex.private);
    }

    #[test]
    fn structured_load_errors() {
        let ex = worked_example().unwrap();
        let bytes = encode_private(&ex.private);
        assert_eq!(decode_public(&bytes), Err(FormatError::Kind(1)));
        assert!(matches!(
            decode_private(&bytes[..bytes.len() - 1]),
            Err(FormatError::Truncated(_))
        ));
        let mut extra = bytes.clone();
        extra.push(0);
        assert_eq!(decode_private(&extra), Err(FormatError::Trailing(1)));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert_eq!(decode_private(&bad), Err(FormatError::BadMagic { expected: "MCC1" }));
        bad = bytes.clone();
        bad[4] = 9;
        assert_eq!(decode_private(&bad), Err(FormatError::Version(9)));
        // Flip one bit of the last mask row: it leaves the basis span.
        bad = bytes.clone();
        let last = bad.len() - 1;
        bad[last] ^= 0x01;
        assert!(matches!(decode_private(&bad), Err(FormatError::Invalid(_))));
    }

    #[test]
    fn ciphertext_round_trip() {
        let ct = Ciphertext {
            bits: BitVec::parse01("100011101101000011011101001010").unwrap(),
        };
        let bytes = encode_ciphertext(&ct);
        assert_eq!(bytes.len(), 4 + 1 + 8 + 4);
        assert_eq!(decode_ciphertext(&bytes).unwrap(), ct);
        assert!(decode_ciphertext(&bytes[..10]).is_err());
        assert!(decode_ciphertext(b"MCC1\x01").is_err());
    }
}
