//! Plaintext IO: ASCII `0`/`1` text or raw bytes, LSB first.

use std::path::Path;

use clap::ValueEnum;
use mcc_core::BitVec;

use crate::error::{CliError, Result};
use crate::format::{pack_bits, unpack_bits};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BitFormat {
    /// ASCII when the input is only `0`, `1` and whitespace, else binary.
    Auto,
    Ascii,
    Binary,
}

fn looks_ascii(bytes: &[u8]) -> bool {
    !bytes.is_empty()
        && bytes
            .iter()
            .all(|b| matches!(b, b'0' | b'1') || b.is_ascii_whitespace())
}

/// Decodes `bytes` to exactly `len` bits. Binary input must be
/// `ceil(len / 8)` bytes with zero padding.
pub fn decode(bytes: &[u8], len: usize, format: BitFormat) -> Result<BitVec> {
    let ascii = match format {
        BitFormat::Auto => looks_ascii(bytes),
        BitFormat::Ascii => true,
        BitFormat::Binary => false,
    };
    let bits = if ascii {
        let text = std::str::from_utf8(bytes).map_err(|_| CliError::Usage("plaintext is not ASCII 0/1 text".into()))?;
        BitVec::parse01(text).ok_or_else(|| CliError::Usage("plaintext has characters other than 0 and 1".into()))?
    } else {
        unpack_bits(bytes, len).ok_or_else(|| {
            CliError::Usage(format!(
                "binary plaintext must be {} bytes with zero padding",
                len.div_ceil(8)
            ))
        })?
    };
    if bits.len() != len {
        return Err(CliError::Usage(format!(
            "plaintext has {} bits, the key takes {len}",
            bits.len()
        )));
    }
    Ok(bits)
}

pub fn encode(bits: &BitVec, format: BitFormat) -> Vec<u8> {
    match format {
        BitFormat::Binary => pack_bits(bits),
        _ => format!("{bits}\n").into_bytes(),
    }
}

/// `--in` names a file when one exists, else it is taken as a literal bit
/// string.
pub fn read_input(arg: &str, len: usize, format: BitFormat) -> Result<BitVec> {
    let path = Path::new(arg);
    if path.is_file() {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        decode(&bytes, len, format)
    } else if looks_ascii(arg.as_bytes()) && format != BitFormat::Binary {
        decode(arg.as_bytes(), len, BitFormat::Ascii)
    } else {
        Err(CliError::Usage(format!("{arg:?} is neither a file nor a 0/1 string")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_encodings_round_trip() {
        let v = BitVec::parse01("1110010110").unwrap();
        for f in [BitFormat::Ascii, BitFormat::Binary] {
            assert_eq!(decode(&encode(&v, f), 10, f).unwrap(), v);
        }
        assert_eq!(decode(&encode(&v, BitFormat::Ascii), 10, BitFormat::Auto).unwrap(), v);
        assert!(decode(b"111", 10, BitFormat::Ascii).is_err());
        assert!(decode(&[0xff, 0xff], 10, BitFormat::Binary).is_err());
    }
}
