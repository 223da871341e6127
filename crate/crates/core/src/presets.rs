//! Named parameter sets.
//!
//! `desk` is small enough for Monte Carlo runs in seconds. `paper-a` is the
//! rate-1/2, `N = 5600` configuration and `paper-b` the rate-1/4 one built on
//! the memory-10 code `(2327, 2353, 2671, 3175)`.

use crate::conv::{CodeParams, PolyGenMatrix};
use crate::crc::default_crc;
use crate::error::{Error, Result};
use crate::rational::Ratio;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preset {
    pub name: &'static str,
    pub g_p: PolyGenMatrix,
    pub g_q: PolyGenMatrix,
    pub params: CodeParams,
}

pub const NAMES: [&str; 3] = ["desk", "paper-a", "paper-b"];

fn build(name: &'static str, octal: &[&str], g_q: &[&[usize]], k: usize, l: usize, e: (u64, u64)) -> Result<Preset> {
    let g_p = PolyGenMatrix::from_octal(octal)?;
    let g_q = PolyGenMatrix::from_exponents(g_q)?;
    let params = CodeParams::for_code(&g_p, &g_q, k, l, Ratio::new(e.0, e.1)?, default_crc())?;
    Ok(Preset { name, g_p, g_q, params })
}

/// `n = 2`, `p = 8`, `q = 64`, `K = 256`, `l = 4`, `e = 1/100`.
pub fn desk() -> Preset {
    build("desk", &["561", "753"], &[&[32], &[0, 64]], 256, 4, (1, 100)).expect("valid preset")
}

/// `n = 2`, `p = 14`, `q = 186`, `K = 2600`, `l = 5`, `e = 1/50`.
pub fn paper_a() -> Preset {
    build("paper-a", &["63057", "44735"], &[&[93], &[0, 186]], 2600, 5, (1, 50)).expect("valid preset")
}

/// `n = 4`, `p = 10`, `q = 990`, `l = 5`, `e = 1/25`; `K` is chosen so the
/// decoder input is exactly 228 windows of 44 bits.
pub fn paper_b() -> Preset {
    build(
        "paper-b",
        &["2327", "2353", "2671", "3175"],
        &[&[0, 495, 990], &[247], &[743], &[0, 990]],
        2498,
        5,
        (1, 25),
    )
    .expect("valid preset")
}

pub fn by_name(name: &str) -> Result<Preset> {
    match name {
        "desk" => Ok(desk()),
        "paper-a" => Ok(paper_a()),
        "paper-b" => Ok(paper_b()),
        _ => Err(Error::Param("unknown preset")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert_eq!(desk().params.big_n(), 656);
        assert_eq!(paper_a().params.big_n(), 5600);
        let b = paper_b();
        assert_eq!(b.params.decoder_len(), 228 * 44);
        assert_eq!((b.params.p, b.params.q), (10, 990));
        assert!(by_name("nope").is_err());
    }
}
