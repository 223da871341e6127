//! Line-oriented `key = value` parameter files.
//!
//! ```text
//! # comment
//! preset = desk          # optional base, later keys override it
//! g_p = 0 2; 0 1 2       # exponent lists, one per stream
//! g_q.octal = 5 7        # or octal, most significant set bit is x^0
//! k = 6
//! l = 2
//! e = 1/10               # or a decimal such as 0.02
//! crc = none             # `default`, `none` or an exponent list
//! seed = 7
//! ```
//!
//! `n`, `p` and `q` may be given as checks against the polynomials. `N` is
//! always derived. `inject.*` keys fix the otherwise random keygen draws:
//! `inject.s` and `inject.basis` take rows of `0`/`1`, `inject.perm` the
//! 0-based index map and `inject.mask` one basis bitmask per masking row.

use std::collections::BTreeMap;
use std::path::Path;

use mcc_core::crc::default_crc;
use mcc_core::{presets, BinPoly, BitVec, CodeParams, MatF2, PolyGenMatrix, Ratio};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Inject {
    pub s: Option<MatF2>,
    pub perm: Option<Vec<u32>>,
    pub basis: Option<Vec<BitVec>>,
    pub mask: Option<Vec<u32>>,
}

impl Inject {
    pub fn is_empty(&self) -> bool {
        *self == Inject::default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamFile {
    pub g_p: PolyGenMatrix,
    pub g_q: PolyGenMatrix,
    pub params: CodeParams,
    pub seed: Option<u64>,
    pub inject: Inject,
}

pub fn load(path: &Path) -> Result<ParamFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text, &path.display().to_string())
}

struct Entry {
    line: usize,
    value: String,
}

struct Ctx<'a> {
    source: &'a str,
    entries: BTreeMap<String, Entry>,
}

impl Ctx<'_> {
    fn err(&self, line: usize, msg: impl Into<String>) -> CliError {
        CliError::Params {
            path: self.source.to_string(),
            line,
            msg: msg.into(),
        }
    }

    fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn parse_with<T>(
        &mut self,
        key: &str,
        f: impl Fn(&str) -> std::result::Result<T, String>,
    ) -> Result<Option<(usize, T)>> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => f(&e.value)
                .map(|v| Some((e.line, v)))
                .map_err(|m| self.err(e.line, format!("{key}: {m}"))),
        }
    }

    fn num(&mut self, key: &str) -> Result<Option<(usize, usize)>> {
        self.parse_with(key, |v| v.parse::<usize>().map_err(|e| e.to_string()))
    }
}

fn parse_ratio(v: &str) -> std::result::Result<Ratio, String> {
    let (num, den) = match v.split_once('/') {
        Some((a, b)) => (
            a.trim().parse::<u64>().map_err(|e| e.to_string())?,
            b.trim().parse::<u64>().map_err(|e| e.to_string())?,
        ),
        None => {
            let (int, frac) = v.split_once('.').unwrap_or((v, ""));
            if int.trim() != "0" && !(int.trim().is_empty() && !frac.is_empty()) {
                return Err("expected a probability below 1".into());
            }
            if frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err("expected a decimal with at most 18 digits".into());
            }
            (frac.parse::<u64>().unwrap_or(0), 10u64.pow(frac.len() as u32))
        }
    };
    Ratio::new(num, den).map_err(|e| e.to_string())
}

fn parse_exponents(v: &str) -> std::result::Result<Vec<usize>, String> {
    v.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|e| format!("{s:?}: {e}")))
        .collect()
}

fn parse_poly_lists(v: &str) -> std::result::Result<PolyGenMatrix, String> {
    let polys = v
        .split(';')
        .map(|s| parse_exponents(s).map(|e| BinPoly::from_exponents(&e)))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    PolyGenMatrix::new(polys).map_err(|e| e.to_string())
}

fn parse_octal(v: &str) -> std::result::Result<PolyGenMatrix, String> {
    let digits: Vec<&str> = v
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    PolyGenMatrix::from_octal(&digits).map_err(|e| e.to_string())
}

fn parse_rows(v: &str) -> std::result::Result<Vec<BitVec>, String> {
    v.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| BitVec::parse01(s).ok_or_else(|| format!("{s:?} is not a 0/1 string")))
        .collect()
}

fn parse_u32s(v: &str) -> std::result::Result<Vec<u32>, String> {
    v.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<u32>().map_err(|e| format!("{s:?}: {e}")))
        .collect()
}

fn parse_crc(v: &str) -> std::result::Result<BinPoly, String> {
    match v {
        "default" => Ok(default_crc()),
        "none" => Ok(BinPoly::one()),
        _ => {
            let p = BinPoly::from_exponents(&parse_exponents(v)?);
            if p.is_zero() {
                Err("CRC polynomial must be nonzero".into())
            } else {
                Ok(p)
            }
        }
    }
}

const KEYS: [&str; 17] = [
    "preset",
    "n",
    "p",
    "q",
    "k",
    "l",
    "e",
    "crc",
    "g_p",
    "g_p.octal",
    "g_q",
    "g_q.octal",
    "seed",
    "inject.s",
    "inject.perm",
    "inject.basis",
    "inject.mask",
];

pub fn parse(text: &str, source: &str) -> Result<ParamFile> {
    let mut ctx = Ctx {
        source,
        entries: BTreeMap::new(),
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ctx.err(line, "expected `key = value`"))?;
        let key = match key.trim() {
            "N" => return Err(ctx.err(line, "N is derived from n, K, p and q")),
            "K" => "k".to_string(),
            k => k.to_string(),
        };
        if !KEYS.contains(&key.as_str()) {
            return Err(ctx.err(line, format!("unknown key {key:?}")));
        }
        let entry = Entry {
            line,
            value: value.trim().to_string(),
        };
        if ctx.entries.insert(key.clone(), entry).is_some() {
            return Err(ctx.err(line, format!("duplicate key {key:?}")));
        }
    }

    let base = ctx
        .parse_with("preset", |v| {
            presets::by_name(v).map_err(|_| format!("one of {:?}", presets::NAMES))
        })?
        .map(|(_, p)| p);

    let pick_code = |ctx: &mut Ctx, key: &str, base: Option<&PolyGenMatrix>| -> Result<PolyGenMatrix> {
        let lists = ctx.parse_with(key, parse_poly_lists)?;
        let octal = ctx.parse_with(&format!("{key}.octal"), parse_octal)?;
        match (lists, octal) {
            (Some((line, _)), Some(_)) => Err(ctx.err(line, format!("give {key} either as exponents or in octal"))),
            (Some((_, g)), None) | (None, Some((_, g))) => Ok(g),
            (None, None) => base.cloned().ok_or_else(|| ctx.err(0, format!("missing {key}"))),
        }
    };
    let g_p = pick_code(&mut ctx, "g_p", base.as_ref().map(|b| &b.g_p))?;
    let g_q = pick_code(&mut ctx, "g_q", base.as_ref().map(|b| &b.g_q))?;

    let k = ctx
        .num("k")?
        .map(|v| v.1)
        .or(base.as_ref().map(|b| b.params.k))
        .ok_or_else(|| ctx.err(0, "missing k"))?;
    let l = ctx
        .num("l")?
        .map(|v| v.1)
        .or(base.as_ref().map(|b| b.params.l))
        .unwrap_or(0);
    let e = ctx
        .parse_with("e", parse_ratio)?
        .map(|v| v.1)
        .or(base.as_ref().map(|b| b.params.e))
        .unwrap_or(Ratio::ZERO);
    let r_poly = ctx
        .parse_with("crc", parse_crc)?
        .map(|v| v.1)
        .or(base.as_ref().map(|b| b.params.r_poly.clone()))
        .unwrap_or_else(default_crc);
    let params = CodeParams::for_code(&g_p, &g_q, k, l, e, r_poly).map_err(|e| ctx.err(0, e.to_string()))?;

    for (key, derived) in [("n", params.n), ("p", params.p), ("q", params.q)] {
        if let Some((line, given)) = ctx.num(key)? {
            if given != derived {
                return Err(ctx.err(line, format!("{key} = {given} but the polynomials give {derived}")));
            }
        }
    }

    let seed = ctx
        .parse_with("seed", |v| v.parse::<u64>().map_err(|e| e.to_string()))?
        .map(|v| v.1);
    let s = match ctx.parse_with("inject.s", parse_rows)? {
        None => None,
        Some((line, rows)) => {
            Some(MatF2::from_rows(&rows, params.k).map_err(|e| ctx.err(line, format!("inject.s: {e}")))?)
        }
    };
    let inject = Inject {
        s,
        perm: ctx.parse_with("inject.perm", parse_u32s)?.map(|v| v.1),
        basis: ctx.parse_with("inject.basis", parse_rows)?.map(|v| v.1),
        mask: ctx.parse_with("inject.mask", parse_u32s)?.map(|v| v.1),
    };
    Ok(ParamFile {
        g_p,
        g_q,
        params,
        seed,
        inject,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_and_octal_forms_agree() {
        let a = parse("g_p = 0 2; 0 1 2\ng_q = 0,7;7\nk = 6\ncrc = none\ne = 1/10\nl = 2", "t").unwrap();
        let b = parse("g_p.octal = 5 7\ng_q = 0 7; 7\nk = 6\ncrc = none\ne = 0.1\nl = 2", "t").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.params.big_n(), 30);
        assert_eq!(a.params.crc_bits(), 0);
    }

    #[test]
    fn presets_and_overrides() {
        let f = parse("preset = desk\ne = 0.02\nseed = 9", "t").unwrap();
        assert_eq!(f.params.k, 256);
        assert_eq!(f.params.e, Ratio::new(1, 50).unwrap());
        assert_eq!(f.seed, Some(9));
        assert_eq!(parse("preset = paper-a", "t").unwrap().params.big_n(), 5600);
    }

    #[test]
    fn errors_carry_lines() {
        let err = |s: &str| match parse(s, "f") {
            Err(CliError::Params { line, msg, .. }) => (line, msg),
            other => panic!("{other:?}"),
        };
        assert_eq!(err("preset = desk\nbogus = 1").0, 2);
        assert_eq!(err("preset = desk\n\nn = 3").0, 3);
        assert_eq!(err("preset = desk\nN = 656").0, 2);
        assert_eq!(err("preset = desk\ne = 1.5").0, 2);
        assert_eq!(err("preset = desk\nk = 6\nk = 7").0, 3);
        assert!(err("k = 6").1.contains("g_p"));
    }
}
