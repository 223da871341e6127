//! Masked high-memory convolutional code (MCC) public-key cryptosystem.
//!
//! A rate-1/n convolutional code `G_P(x)` is multiplied stream-wise by
//! high-memory polynomials `G_Q(x)`, expanded to a finite scalar generator
//! matrix, masked with a dense low-rank matrix, scrambled and permuted to
//! form the public key. Decryption enumerates the `2^l` mask hypotheses,
//! divides out `G_Q(x)`, runs one Viterbi decoder per hypothesis and accepts
//! the lowest-weight outcome that passes the CRC.
//!
//! The crate is `no_std` with `alloc`. Randomness is always passed in
//! explicitly. File formats, parameter files and the command line live in
//! the `mcc-cli` companion crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod analysis;
pub mod bits;
pub mod conv;
pub mod crc;
mod error;
pub mod exec;
pub mod fixtures;
pub mod keys;
pub mod matrix;
pub mod perm;
pub mod pipeline;
pub mod poly;
pub mod presets;
pub mod rational;
pub mod trellis;

pub use bits::BitVec;
pub use conv::{CodeParams, PolyGenMatrix};
pub use error::{Error, Result};
pub use keys::{MaskBasis, PrivateKey, PublicKey};
pub use matrix::MatF2;
pub use perm::Permutation;
pub use pipeline::{Ciphertext, DecoderMode, DecryptOptions, Decryption};
pub use poly::BinPoly;
pub use rational::Ratio;
pub use trellis::{DecodeResult, Trellis};
