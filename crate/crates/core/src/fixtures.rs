//! The small worked example: `n = 2`, `p = 2`, `q = 7`, `K = 6`, `N = 30`,
//! mask rank 2, no CRC, three channel errors.

use alloc::vec::Vec;

use crate::bits::BitVec;
use crate::conv::{CodeParams, PolyGenMatrix};
use crate::error::Result;
use crate::keys::{MaskBasis, PrivateKey, PublicKey};
use crate::matrix::MatF2;
use crate::perm::Permutation;
use crate::poly::BinPoly;
use crate::rational::Ratio;

/// Image of each ciphertext position under the permutation, 1-based as
/// usually written.
pub const PERMUTATION_1BASED: [u32; 30] = [
    14, 25, 9, 18, 30, 8, 21, 1, 10, 29, 5, 26, 3, 11, 23, 28, 15, 2, 7, 12, 20, 6, 17, 4, 27, 16, 24, 13, 22, 19,
];

pub const SCRAMBLER: [&str; 6] = ["100100", "010001", "001000", "001110", "000010", "001011"];

pub const MESSAGE: &str = "111001";

/// Channel error positions, 0-based.
pub const ERROR_POSITIONS: [usize; 3] = [3, 16, 18];

/// Basis vectors `A = (10)^15` and `B = (01)^15`.
pub fn basis_vectors() -> [BitVec; 2] {
    let a = BitVec::from_bools((0..30).map(|i| i % 2 == 0));
    let b = BitVec::from_bools((0..30).map(|i| i % 2 == 1));
    [a, b]
}

/// Rows of the masking matrix, as bitmasks over `[A, B]`.
pub const MASK_ROWS: [u32; 6] = [1, 2, 1, 2, 2, 1];

pub struct WorkedExample {
    pub public: PublicKey,
    pub private: PrivateKey,
    pub message: BitVec,
    pub errors: BitVec,
}

pub fn g_p() -> PolyGenMatrix {
    PolyGenMatrix::from_exponents(&[&[0, 2], &[0, 1, 2]]).expect("valid")
}

pub fn g_q() -> PolyGenMatrix {
    PolyGenMatrix::from_exponents(&[&[0, 7], &[7]]).expect("valid")
}

pub fn params() -> CodeParams {
    CodeParams::for_code(&g_p(), &g_q(), 6, 2, Ratio::new(1, 10).expect("valid"), BinPoly::one()).expect("valid")
}

pub fn worked_example() -> Result<WorkedExample> {
    let params = params();
    let n = params.big_n();
    let basis = MaskBasis::new(basis_vectors().to_vec(), n)?;
    let rows: Vec<BitVec> = MASK_ROWS.iter().map(|&m| basis.combination(m)).collect();
    let mask = MatF2::from_rows(&rows, n)?;
    let s = MatF2::parse_rows(&SCRAMBLER).expect("0/1 rows");
    let perm = Permutation::new(PERMUTATION_1BASED.iter().map(|&p| p - 1).collect())?;
    let private = PrivateKey::from_parts(params, g_p(), g_q(), s, perm, basis, mask)?;
    let public = private.public_key()?;
    Ok(WorkedExample {
        public,
        private,
        message: BitVec::parse01(MESSAGE).expect("0/1"),
        errors: BitVec::from_positions(n, &ERROR_POSITIONS),
    })
}
