//! Error propagation, distance bounds, attack cost and failure estimates.
//!
//! Complexities are in log2 throughout; the raw magnitudes do not fit in
//! an `f64` for realistic parameters.

use alloc::vec::Vec;

use libm::{exp, log, log1p, log2, sqrt};
use rand::Rng;

use crate::bits::BitVec;
use crate::conv::PolyGenMatrix;
use crate::error::{Error, Result};
use crate::matrix::MatF2;
use crate::poly::divmod_bits;

/// Mean weight change caused by dividing pure error streams by `q_j(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaEstimate {
    /// Mean of `wt(e_j / q_j) - wt(e_j)` for each stream. Negative when
    /// truncation drops more error bits than division creates.
    pub per_stream: Vec<f64>,
    pub alpha_total: f64,
    /// Mean and sample standard deviation of the total truncated quotient
    /// weight.
    pub weight_mean: f64,
    pub weight_std: f64,
    pub trials: usize,
    pub stream_len: usize,
}

impl AlphaEstimate {
    /// `alpha / N`, with `N = n * stream_len`.
    pub fn relative(&self) -> f64 {
        self.alpha_total / (self.per_stream.len() * self.stream_len) as f64
    }

    /// Per-stream increase relative to the stream length.
    pub fn per_stream_relative(&self) -> Vec<f64> {
        self.per_stream.iter().map(|a| a / self.stream_len as f64).collect()
    }
}

/// Positions of a Bernoulli(`e`) vector, drawn by geometric gaps.
fn bernoulli_vec<R: Rng + ?Sized>(len: usize, e: f64, rng: &mut R) -> BitVec {
    let mut v = BitVec::zeros(len);
    if e <= 0.0 {
        return v;
    }
    let scale = 1.0 / log1p(-e);
    let mut pos = 0usize;
    loop {
        let u: f64 = 1.0 - rng.gen::<f64>();
        let gap = (log(u) * scale) as usize;
        pos = match pos.checked_add(gap) {
            Some(p) if p < len => p,
            _ => break,
        };
        v.set(pos, true);
        pos += 1;
    }
    v
}

/// Monte Carlo estimate of the division error increase. The quotient is
/// truncated to `stream_len - q` coefficients as in decryption.
pub fn estimate_alpha<R: Rng + ?Sized>(
    g_q: &PolyGenMatrix,
    e: f64,
    stream_len: usize,
    trials: usize,
    rng: &mut R,
) -> Result<AlphaEstimate> {
    if trials == 0 {
        return Err(Error::Param("at least one trial"));
    }
    if !(0.0..1.0).contains(&e) {
        return Err(Error::Param("error probability must lie in [0, 1)"));
    }
    let keep = stream_len
        .checked_sub(g_q.memory())
        .ok_or(Error::Param("stream shorter than the high-memory degree"))?;
    let mut sums = alloc::vec![0i64; g_q.n()];
    let (mut w_sum, mut w_sq) = (0.0f64, 0.0f64);
    for _ in 0..trials {
        let mut total = 0usize;
        for (sum, q) in sums.iter_mut().zip(g_q.polys()) {
            let err = bernoulli_vec(stream_len, e, rng);
            let (mut quotient, _) = divmod_bits(&err, q)?;
            quotient.resize(keep);
            total += quotient.weight();
            *sum += quotient.weight() as i64 - err.weight() as i64;
        }
        w_sum += total as f64;
        w_sq += (total * total) as f64;
    }
    let per_stream: Vec<f64> = sums.iter().map(|&s| s as f64 / trials as f64).collect();
    let alpha_total = per_stream.iter().sum();
    let t = trials as f64;
    let weight_std = if trials > 1 {
        sqrt(((w_sq - w_sum * w_sum / t) / (t - 1.0)).max(0.0))
    } else {
        0.0
    };
    Ok(AlphaEstimate {
        per_stream,
        alpha_total,
        weight_mean: w_sum / t,
        weight_std,
        trials,
        stream_len,
    })
}

/// `(e N + alpha) / N`.
pub fn effective_error_rate(e: f64, alpha: f64, big_n: usize) -> f64 {
    (e * big_n as f64 + alpha) / big_n as f64
}

pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * log2(x) - (1.0 - x) * log2(1.0 - x)
}

/// Relative distance `x` in `(0, 1/2)` with `E(x) = 1 - rho`.
pub fn gilbert_relative_distance(rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Param("rate must lie in (0, 1)"));
    }
    let target = 1.0 - rho;
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// log2 of `C(N, K) / (0.29 C(N - t, K))`, the expected number of
/// information-set decoding iterations.
pub fn isd_log2(big_n: usize, k: usize, t: usize) -> Result<f64> {
    if k == 0 || k >= big_n {
        return Err(Error::Param("need 0 < K < N"));
    }
    if t > big_n - k {
        return Err(Error::Param("need t <= N - K"));
    }
    let sum: f64 = (0..t).map(|i| log2((big_n - i) as f64 / (big_n - k - i) as f64)).sum();
    Ok(sum - log2(0.29))
}

/// Quantum (Grover-accelerated) cost: the square root of [`isd_log2`].
pub fn qisd_log2(big_n: usize, k: usize, t: usize) -> Result<f64> {
    Ok(isd_log2(big_n, k, t)? / 2.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecurityReport {
    pub isd_log2: f64,
    pub qisd_log2: f64,
    pub big_n: usize,
    pub k: usize,
    pub t: usize,
    /// Decryption work per bit: `2^l` decoders with `2^p` states each.
    pub acs_per_bit_log2: f64,
}

pub fn security_report(big_n: usize, k: usize, t: usize, l: usize, p: usize) -> Result<SecurityReport> {
    let isd = isd_log2(big_n, k, t)?;
    Ok(SecurityReport {
        isd_log2: isd,
        qisd_log2: isd / 2.0,
        big_n,
        k,
        t,
        acs_per_bit_log2: (l + p) as f64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowFailure {
    /// Probability of more than `t_corr` errors in one window.
    pub p_window: f64,
    /// Probability that no window fails.
    pub p_success_all: f64,
}

/// Binomial tail `P(X > t_corr)` for `X ~ Bin(window_bits, p)`, and the
/// chance that all `windows` independent windows stay within capacity.
pub fn window_failure(p: f64, window_bits: usize, t_corr: usize, windows: usize) -> Result<WindowFailure> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Param("probability must lie in [0, 1]"));
    }
    if t_corr >= window_bits {
        return Err(Error::Param("t_corr must be below the window length"));
    }
    let p_window = if p == 0.0 {
        0.0
    } else if p == 1.0 {
        1.0
    } else {
        let (lp, lq) = (log(p), log1p(-p));
        let mut ln_choose = 0.0;
        let (mut upper, mut lower) = (0.0, 0.0);
        for i in 0..=window_bits {
            let term = exp(ln_choose + i as f64 * lp + (window_bits - i) as f64 * lq);
            if i > t_corr {
                upper += term;
            } else {
                lower += term;
            }
            ln_choose += log((window_bits - i) as f64 / (i + 1) as f64);
        }
        // Sum the smaller side directly so neither tail drifts past 0 or 1.
        if upper <= lower {
            upper
        } else {
            (1.0 - lower).clamp(0.0, 1.0)
        }
    };
    let p_success_all = exp(windows as f64 * log1p(-p_window));
    Ok(WindowFailure {
        p_window,
        p_success_all,
    })
}

/// Rank and weight statistics of a public matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct KeyRandomness {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub col_mean: f64,
    pub col_std: f64,
    /// `(weight, number of columns)`, ascending by weight.
    pub col_histogram: Vec<(usize, usize)>,
    pub row_mean: f64,
    pub row_std: f64,
    pub row_min: usize,
    pub row_max: usize,
    /// Mean column weight against `Bin(K, 1/2)` averaged over all columns.
    pub col_mean_z: f64,
}

fn mean_std(values: &[usize]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<usize>() as f64 / n;
    let var = values
        .iter()
        .map(|&v| (v as f64 - mean) * (v as f64 - mean))
        .sum::<f64>()
        / n;
    (mean, sqrt(var))
}

pub fn key_randomness_report(g: &MatF2) -> KeyRandomness {
    let cols = g.column_weights();
    let rows: Vec<usize> = g.row_iter().map(|r| r.weight()).collect();
    let (col_mean, col_std) = mean_std(&cols);
    let (row_mean, row_std) = mean_std(&rows);
    let mut col_histogram: Vec<(usize, usize)> = Vec::new();
    let mut sorted = cols.clone();
    sorted.sort_unstable();
    for w in sorted {
        match col_histogram.last_mut() {
            Some((last, count)) if *last == w => *count += 1,
            _ => col_histogram.push((w, 1)),
        }
    }
    let k = g.rows() as f64;
    let col_mean_z = if cols.is_empty() || g.rows() == 0 {
        0.0
    } else {
        (col_mean - k / 2.0) / (sqrt(k / 4.0) / sqrt(cols.len() as f64))
    };
    KeyRandomness {
        rows: g.rows(),
        cols: g.cols(),
        rank: g.rank(),
        col_mean,
        col_std,
        col_histogram,
        row_mean,
        row_std,
        row_min: rows.iter().copied().min().unwrap_or(0),
        row_max: rows.iter().copied().max().unwrap_or(0),
        col_mean_z,
    }
}
