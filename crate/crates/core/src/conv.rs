//! Rate-1/n convolutional code machinery: interleaving, scalar generator
//! matrix expansion and stream encoding.

use alloc::vec::Vec;

use crate::bits::BitVec;
use crate::error::{check_dim, Error, Result};
use crate::matrix::MatF2;
use crate::poly::BinPoly;
use crate::rational::Ratio;

/// Largest supported mask rank; decryption runs `2^l` decoders.
pub const MAX_MASK_RANK: usize = 20;
/// Largest supported trellis memory.
pub const MAX_MEMORY: usize = 16;

/// The `n` generator polynomials of one rate-1/n code.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyGenMatrix {
    polys: Vec<BinPoly>,
}

impl PolyGenMatrix {
    pub fn new(polys: Vec<BinPoly>) -> Result<Self> {
        if polys.is_empty() {
            return Err(Error::Param("generator matrix needs at least one polynomial"));
        }
        if polys.iter().any(BinPoly::is_zero) {
            return Err(Error::Param("generator polynomial is zero"));
        }
        Ok(Self { polys })
    }

    pub fn from_exponents(lists: &[&[usize]]) -> Result<Self> {
        Self::new(lists.iter().map(|e| BinPoly::from_exponents(e)).collect())
    }

    /// Octal generators as in the usual code tables: the most significant
    /// set bit across the set is the coefficient of `x^0`, so coefficient
    /// `x^k` of each polynomial is bit `m - k` of its value, where `m` is the
    /// set's memory.
    pub fn from_octal(digits: &[&str]) -> Result<Self> {
        let mut values = Vec::with_capacity(digits.len());
        for d in digits {
            let v = u64::from_str_radix(d.trim(), 8).map_err(|_| Error::Param("bad octal generator"))?;
            values.push(v);
        }
        let memory = values
            .iter()
            .map(|v| (64 - v.leading_zeros()) as usize)
            .max()
            .unwrap_or(0)
            .checked_sub(1)
            .ok_or(Error::Param("generator polynomial is zero"))?;
        let polys = values
            .iter()
            .map(|&v| {
                let exps: Vec<usize> = (0..=memory).filter(|&k| (v >> (memory - k)) & 1 == 1).collect();
                BinPoly::from_exponents(&exps)
            })
            .collect();
        Self::new(polys)
    }

    /// Inverse of [`PolyGenMatrix::from_octal`].
    pub fn to_octal(&self) -> Vec<alloc::string::String> {
        let memory = self.memory();
        self.polys
            .iter()
            .map(|p| {
                let v = p.exponents().iter().fold(0u64, |acc, &k| acc | 1 << (memory - k));
                alloc::format!("{v:o}")
            })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.polys.len()
    }

    /// Largest polynomial degree.
    pub fn memory(&self) -> usize {
        self.polys.iter().filter_map(BinPoly::degree).max().unwrap_or(0)
    }

    pub fn polys(&self) -> &[BinPoly] {
        &self.polys
    }

    /// Stream-wise products `p_j(x) q_j(x)`.
    pub fn compose(&self, other: &PolyGenMatrix) -> Result<PolyGenMatrix> {
        check_dim("compose", self.n(), other.n())?;
        Self::new(self.polys.iter().zip(&other.polys).map(|(a, b)| a.mul(b)).collect())
    }
}

/// Code and channel parameters shared by both keys.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CodeParams {
    /// Output streams.
    pub n: usize,
    /// Memory of the decodable code.
    pub p: usize,
    /// Memory of the high-memory factors.
    pub q: usize,
    /// Message length including CRC bits.
    pub k: usize,
    /// Mask rank.
    pub l: usize,
    /// Bit-flip probability.
    pub e: Ratio,
    pub r_poly: BinPoly,
}

impl CodeParams {
    pub fn new(n: usize, p: usize, q: usize, k: usize, l: usize, e: Ratio, r_poly: BinPoly) -> Result<Self> {
        let params = Self {
            n,
            p,
            q,
            k,
            l,
            e,
            r_poly,
        };
        params.validate()?;
        Ok(params)
    }

    /// Parameters implied by a pair of generator sets.
    pub fn for_code(
        g_p: &PolyGenMatrix,
        g_q: &PolyGenMatrix,
        k: usize,
        l: usize,
        e: Ratio,
        r_poly: BinPoly,
    ) -> Result<Self> {
        check_dim("G_Q stream count", g_p.n(), g_q.n())?;
        Self::new(g_p.n(), g_p.memory(), g_q.memory(), k, l, e, r_poly)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Param("n must be at least 1"));
        }
        if self.k == 0 {
            return Err(Error::Param("K must be at least 1"));
        }
        if self.l > MAX_MASK_RANK {
            return Err(Error::Param("mask rank l above cap 20"));
        }
        if self.p > MAX_MEMORY {
            return Err(Error::MemoryCap {
                memory: self.p,
                cap: MAX_MEMORY,
            });
        }
        match self.r_poly.degree() {
            None => Err(Error::DivisionByZero),
            Some(r) if r >= self.k => Err(Error::Param("CRC degree must be below K")),
            Some(_) => Ok(()),
        }
    }

    /// Ciphertext length `n (K + p + q)`.
    pub fn big_n(&self) -> usize {
        self.n * (self.k + self.p + self.q)
    }

    /// CRC width `r`.
    pub fn crc_bits(&self) -> usize {
        self.r_poly.degree().unwrap_or(0)
    }

    /// Plaintext length `K - r`.
    pub fn plaintext_len(&self) -> usize {
        self.k - self.crc_bits()
    }

    /// Per-stream length of a ciphertext, `K + p + q`.
    pub fn stream_len(&self) -> usize {
        self.k + self.p + self.q
    }

    /// Length of the Viterbi input, `n (K + p)`.
    pub fn decoder_len(&self) -> usize {
        self.n * (self.k + self.p)
    }

    /// Checks that the generator sets match these parameters.
    pub fn check_code(&self, g_p: &PolyGenMatrix, g_q: &PolyGenMatrix) -> Result<()> {
        check_dim("G_P streams", self.n, g_p.n())?;
        check_dim("G_Q streams", self.n, g_q.n())?;
        check_dim("G_P memory", self.p, g_p.memory())?;
        check_dim("G_Q memory", self.q, g_q.memory())
    }
}

/// Output position `n t + j` is position `t` of stream `j`.
pub fn interleave(streams: &[BitVec]) -> Result<BitVec> {
    let n = streams.len();
    let len = streams.first().map_or(0, BitVec::len);
    for s in streams {
        check_dim("interleave", len, s.len())?;
    }
    let mut out = BitVec::zeros(n * len);
    for (j, s) in streams.iter().enumerate() {
        for t in s.ones_iter() {
            out.set(n * t + j, true);
        }
    }
    Ok(out)
}

/// Positions `i, n + i, 2n + i, ...` of `v`.
pub fn deinterleave(v: &BitVec, n: usize, i: usize) -> Result<BitVec> {
    if n == 0 || i >= n {
        return Err(Error::Param("deinterleave index out of range"));
    }
    if !v.len().is_multiple_of(n) {
        return Err(Error::Dimension {
            op: "deinterleave",
            expected: v.len().next_multiple_of(n),
            found: v.len(),
        });
    }
    let mut out = BitVec::zeros(v.len() / n);
    for pos in v.ones_iter().filter(|p| p % n == i) {
        out.set(pos / n, true);
    }
    Ok(out)
}

/// Scalar generator matrix: `K` rows, each the previous shifted right by `n`.
pub fn expand_scalar(polys: &PolyGenMatrix, k: usize, memory: usize) -> Result<MatF2> {
    let degree = polys.memory();
    if memory < degree {
        return Err(Error::MemoryTooSmall { memory, degree });
    }
    let n = polys.n();
    let mut m = MatF2::zeros(k, n * (k + memory));
    for t in 0..k {
        for (j, p) in polys.polys().iter().enumerate() {
            for i in p.coeffs().ones_iter() {
                m.set(t, n * (t + i) + j, true);
            }
        }
    }
    Ok(m)
}

/// Interleaved products `m(x) poly_j(x)`, each padded to `K + memory`.
pub fn encode_streams(message: &BitVec, polys: &PolyGenMatrix, memory: usize) -> Result<BitVec> {
    let degree = polys.memory();
    if memory < degree {
        return Err(Error::MemoryTooSmall { memory, degree });
    }
    let m = BinPoly::from_coeffs(message.clone());
    let len = message.len() + memory;
    let streams: Vec<BitVec> = polys.polys().iter().map(|p| m.mul(p).to_bitvec(len)).collect();
    interleave(&streams)
}
