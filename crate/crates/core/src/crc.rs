//! CRC append and verify.
//!
//! A word `m_r` of length `K` is the message `m` (bits `0..K-r`) followed
//! by `r` check bits `c`. Its CRC polynomial is `x^r m(x) + c(x)`, where
//! `c(x) = x^r m(x) mod r(x)`, so a valid word is one whose CRC polynomial
//! is divisible by `r(x)`. Both parts keep the bit `i` = `x^i` convention.

use crate::bits::BitVec;
use crate::error::{Error, Result};
use crate::poly::{divmod_bits, BinPoly};

/// `1 + x^5 + x^12 + x^16` (CRC-16-CCITT).
pub fn default_crc() -> BinPoly {
    BinPoly::from_exponents(&[0, 5, 12, 16])
}

fn check_bits(message: &BitVec, r_poly: &BinPoly) -> Result<BitVec> {
    let r = r_poly.degree().ok_or(Error::DivisionByZero)?;
    let shifted = BitVec::zeros(r).concat(message);
    let (_, rem) = divmod_bits(&shifted, r_poly)?;
    Ok(rem)
}

/// `m` followed by the `deg r_poly` remainder bits of `x^r m(x) mod r(x)`.
pub fn crc_append(message: &BitVec, r_poly: &BinPoly) -> Result<BitVec> {
    Ok(message.concat(&check_bits(message, r_poly)?))
}

/// True when the word's CRC polynomial leaves no remainder.
pub fn crc_verify(word: &BitVec, r_poly: &BinPoly) -> Result<bool> {
    let r = r_poly.degree().ok_or(Error::DivisionByZero)?;
    if word.len() < r {
        return Err(Error::Dimension {
            op: "crc_verify",
            expected: r,
            found: word.len(),
        });
    }
    let k = word.len() - r;
    // x^r m(x) + c(x) as one vector: check bits low, message high.
    let poly = word.slice(k, r).concat(&word.slice(0, k));
    let (_, rem) = divmod_bits(&poly, r_poly)?;
    Ok(rem.is_zero())
}

/// Message part of a CRC word.
pub fn crc_strip(word: &BitVec, r_poly: &BinPoly) -> BitVec {
    let r = r_poly.degree().unwrap_or(0);
    word.slice(0, word.len().saturating_sub(r))
}
