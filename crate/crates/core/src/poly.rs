//! Binary polynomials. Bit `i` of the coefficient vector is the coefficient
//! of `x^i`; the stored vector never extends past the leading term.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::bits::BitVec;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BinPoly {
    coeffs: BitVec,
}

impl BinPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0)
    }

    pub fn monomial(exp: usize) -> Self {
        Self::from_exponents(&[exp])
    }

    /// Sum of `x^e` over the given exponents; repeated exponents cancel.
    pub fn from_exponents(exps: &[usize]) -> Self {
        let len = exps.iter().max().map_or(0, |&m| m + 1);
        let mut c = BitVec::zeros(len);
        for &e in exps {
            c.flip(e);
        }
        Self::from_coeffs(c)
    }

    /// Trailing zero coefficients are dropped.
    pub fn from_coeffs(mut coeffs: BitVec) -> Self {
        let len = coeffs.last_one().map_or(0, |d| d + 1);
        coeffs.resize(len);
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &BitVec {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> bool {
        i < self.coeffs.len() && self.coeffs.get(i)
    }

    pub fn exponents(&self) -> Vec<usize> {
        self.coeffs.ones_iter().collect()
    }

    pub fn weight(&self) -> usize {
        self.coeffs.weight()
    }

    /// Coefficients `0..len`, zero-padded or truncated.
    pub fn to_bitvec(&self, len: usize) -> BitVec {
        let mut v = self.coeffs.clone();
        v.resize(len);
        v
    }

    pub fn add(&self, other: &BinPoly) -> BinPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut a = self.to_bitvec(len);
        a.xor_assign(&other.to_bitvec(len)).expect("equal lengths");
        Self::from_coeffs(a)
    }

    /// Carryless product.
    pub fn mul(&self, other: &BinPoly) -> BinPoly {
        let (Some(da), Some(db)) = (self.degree(), other.degree()) else {
            return BinPoly::zero();
        };
        let (short, long) = if self.weight() <= other.weight() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = BitVec::zeros(da + db + 1);
        let long_ones: Vec<usize> = long.coeffs.ones_iter().collect();
        for s in short.coeffs.ones_iter() {
            for &l in &long_ones {
                out.flip(s + l);
            }
        }
        Self::from_coeffs(out)
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn divmod(&self, divisor: &BinPoly) -> Result<(BinPoly, BinPoly)> {
        let (q, r) = divmod_bits(&self.coeffs, divisor)?;
        Ok((Self::from_coeffs(q), Self::from_coeffs(r)))
    }

    pub fn rem(&self, divisor: &BinPoly) -> Result<BinPoly> {
        Ok(self.divmod(divisor)?.1)
    }

    pub fn shl(&self, k: usize) -> BinPoly {
        match self.degree() {
            None => BinPoly::zero(),
            Some(d) => {
                let mut c = BitVec::zeros(d + k + 1);
                for i in self.coeffs.ones_iter() {
                    c.set(i + k, true);
                }
                Self { coeffs: c }
            }
        }
    }
}

/// Schoolbook division of a coefficient vector by `divisor`, top term down.
///
/// The quotient has `len - deg(divisor)` coefficients (none if the dividend
/// is shorter than the divisor); the remainder has `deg(divisor)`.
pub fn divmod_bits(dividend: &BitVec, divisor: &BinPoly) -> Result<(BitVec, BitVec)> {
    let d = divisor.degree().ok_or(Error::DivisionByZero)?;
    let taps: Vec<usize> = divisor.coeffs.ones_iter().filter(|&e| e != d).collect();
    let mut work = dividend.clone();
    let qlen = dividend.len().saturating_sub(d);
    let mut quotient = BitVec::zeros(qlen);
    for k in (d..dividend.len()).rev() {
        if work.get(k) {
            work.flip(k);
            quotient.set(k - d, true);
            for &t in &taps {
                work.flip(k - d + t);
            }
        }
    }
    Ok((quotient, work.slice(0, d)))
}

impl fmt::Display for BinPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .coeffs
            .ones_iter()
            .map(|e| match e {
                0 => String::from("1"),
                1 => String::from("x"),
                e => alloc::format!("x^{e}"),
            })
            .collect();
        f.write_str(&terms.join("+"))
    }
}

impl fmt::Debug for BinPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinPoly({self})")
    }
}
