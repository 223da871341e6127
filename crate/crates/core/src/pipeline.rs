//! Encryption and the list-decoding decryption pipeline.
//!
//! Decryption undoes the permutation, then for each of the `2^l` mask
//! hypotheses `c~ + l_i` divides every stream by its `q_j(x)`, keeps the
//! first `K + p` quotient coefficients and runs the Viterbi decoder. Outcomes
//! are ranked by error weight and the first one that passes the weight gate
//! and the CRC is accepted.

use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::estimate_alpha;
use crate::bits::BitVec;
use crate::conv::{deinterleave, interleave, CodeParams, PolyGenMatrix};
use crate::crc::{crc_append, crc_strip, crc_verify};
use crate::error::{check_dim, Error, Result};
use crate::exec::{Executor, Sequential};
use crate::keys::{MaskBasis, PrivateKey, PublicKey};
use crate::poly::BinPoly;
use crate::rational::Ratio;
use crate::trellis::{DecodeResult, Trellis};

/// Seed for the decryption-time estimate of the division error increase.
pub const ALPHA_SEED: u64 = 0x6d63_635f_616c_7068;
pub const ALPHA_TRIALS: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ciphertext {
    pub bits: BitVec,
}

/// Each position flips independently with probability `e`.
pub fn sample_errors<R: Rng + ?Sized>(len: usize, e: Ratio, rng: &mut R) -> BitVec {
    if e.is_zero() {
        return BitVec::zeros(len);
    }
    BitVec::from_bools((0..len).map(|_| e.sample(rng)))
}

/// `crc_append(m) G + e` with a freshly sampled error vector.
pub fn encrypt<R: Rng + ?Sized>(public: &PublicKey, message: &BitVec, rng: &mut R) -> Result<Ciphertext> {
    let errors = sample_errors(public.params.big_n(), public.params.e, rng);
    encrypt_with_errors(public, message, &errors)
}

/// Encryption with a caller-chosen error vector.
pub fn encrypt_with_errors(public: &PublicKey, message: &BitVec, errors: &BitVec) -> Result<Ciphertext> {
    let params = &public.params;
    check_dim("plaintext length", params.plaintext_len(), message.len())?;
    check_dim("error vector length", params.big_n(), errors.len())?;
    let word = crc_append(message, &params.r_poly)?;
    let mut bits = public.g.mul_vec(&word)?;
    bits.xor_assign(errors)?;
    Ok(Ciphertext { bits })
}

/// The `2^l` hypotheses `c~ + l_i` in Gray-code order, each tagged with the
/// bitmask of basis vectors it adds.
pub fn enumerate_candidates(c_tilde: &BitVec, basis: &MaskBasis) -> Result<Vec<(u32, BitVec)>> {
    check_dim("candidate length", basis.vector_len(), c_tilde.len())?;
    let count = 1usize << basis.rank();
    let mut out = Vec::with_capacity(count);
    let mut current = c_tilde.clone();
    let mut mask = 0u32;
    out.push((mask, current.clone()));
    for step in 1..count {
        let bit = step.trailing_zeros() as usize;
        current.xor_assign(&basis.vectors()[bit])?;
        mask ^= 1 << bit;
        out.push((mask, current.clone()));
    }
    Ok(out)
}

/// Divides stream `j` of `candidate` by `q_j(x)` and truncates every quotient
/// to `K + p` coefficients. Returns the re-interleaved quotients and the
/// total weight of the discarded remainders.
pub fn invert_highmem(candidate: &BitVec, g_q: &PolyGenMatrix, params: &CodeParams) -> Result<(BitVec, usize)> {
    check_dim("candidate length", params.big_n(), candidate.len())?;
    check_dim("G_Q streams", params.n, g_q.n())?;
    let keep = params.k + params.p;
    let mut remainder_weight = 0;
    let mut streams = Vec::with_capacity(params.n);
    for (j, q) in g_q.polys().iter().enumerate() {
        let stream = deinterleave(candidate, params.n, j)?;
        let (mut quotient, rem) = crate::poly::divmod_bits(&stream, q)?;
        remainder_weight += rem.weight();
        quotient.resize(keep);
        streams.push(quotient);
    }
    Ok((interleave(&streams)?, remainder_weight))
}

/// Number of received positions of a length-`len` stream whose errors add
/// into each of the first `keep` quotient coefficients after division by `q`.
///
/// Quotient bit `i` collects dividend bit `k` exactly when `x^(k-1-i)` has a
/// nonzero `x^(d-1)` coefficient modulo `q`, so the counts are prefix sums of
/// that coefficient sequence.
pub fn quotient_fan_in(q: &BinPoly, len: usize, keep: usize) -> Result<Vec<usize>> {
    let d = q.degree().ok_or(Error::DivisionByZero)?;
    let mut prefix = Vec::with_capacity(len);
    if d > 0 {
        let mut r = BinPoly::one().to_bitvec(d);
        let taps = q.coeffs().slice(0, d);
        let mut acc = 0;
        for _ in 0..len {
            let top = r.get(d - 1);
            acc += top as usize;
            prefix.push(acc);
            // r <- x r mod q
            let mut shifted = BitVec::zeros(d);
            for i in r.ones_iter().filter(|&i| i + 1 < d) {
                shifted.set(i + 1, true);
            }
            if top {
                shifted.xor_assign(&taps)?;
            }
            r = shifted;
        }
    }
    Ok((0..keep)
        .map(|i| match (d, (len as isize) - 2 - i as isize) {
            (0, _) => usize::from(i < len),
            (_, m) if m < 0 => 0,
            (_, m) => prefix[m as usize],
        })
        .collect())
}

/// Scale of the integer branch metrics used by [`Metric::Reliability`].
pub const RELIABILITY_SCALE: f64 = 16.0;

/// Per-position Viterbi costs `log((1 - p_i) / p_i)`, where `p_i` is the
/// chance that an odd number of channel errors lands in quotient bit `i`.
pub fn reliability_weights(g_q: &PolyGenMatrix, params: &CodeParams) -> Result<Vec<u32>> {
    let e = params.e.to_f64();
    let keep = params.k + params.p;
    let mut weights = alloc::vec![0u32; params.decoder_len()];
    for (j, q) in g_q.polys().iter().enumerate() {
        for (i, fan) in quotient_fan_in(q, params.stream_len(), keep)?.into_iter().enumerate() {
            weights[i * params.n + j] = cost(fan, e);
        }
    }
    Ok(weights)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateOutcome {
    /// Bitmask of basis vectors added to the received word.
    pub mask_index: u32,
    /// Viterbi input after division and truncation.
    pub quotient_word: BitVec,
    pub decode: DecodeResult,
    pub remainder_weight: usize,
}

/// Ranking order: error weight, then mask index.
pub fn outcome_order(a: &CandidateOutcome, b: &CandidateOutcome) -> Ordering {
    (a.decode.error_weight, a.mask_index).cmp(&(b.decode.error_weight, b.mask_index))
}

/// Error-weight bound `e N + alpha + sigmas * sqrt(N e (1 - e))`.
pub fn gate_threshold(params: &CodeParams, alpha: f64, sigmas: f64) -> f64 {
    gate_threshold_spread(params, alpha, sigmas, 0.0)
}

/// As [`gate_threshold`], with the binomial deviation replaced by `spread`
/// when that is larger. Division lets one channel error flip many quotient
/// bits, so the weight varies far more than a binomial count.
pub fn gate_threshold_spread(params: &CodeParams, alpha: f64, sigmas: f64, spread: f64) -> f64 {
    let n = params.big_n() as f64;
    let e = params.e.to_f64();
    e * n + alpha + sigmas * libm::sqrt(n * e * (1.0 - e)).max(spread)
}

/// Whether the outcome's error weight is plausible for the channel, with a
/// 4-sigma margin.
pub fn candidate_gate(outcome: &CandidateOutcome, params: &CodeParams, alpha: f64) -> bool {
    outcome.decode.error_weight as f64 <= gate_threshold(params, alpha, DEFAULT_SIGMAS)
}

pub const DEFAULT_SIGMAS: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    Off,
    /// Estimate the division error increase and the spread of the
    /// quotient error weight at decryption time.
    Auto,
    /// Use the given expected error increase.
    Alpha(f64),
}

/// How each unmasked candidate is turned into an information word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecoderMode {
    /// Top-down division, quotients truncated, Hamming-metric Viterbi.
    Standard,
    /// As `Standard`, with mismatches weighted by how many channel errors
    /// feed each quotient bit.
    Reliability,
    /// Reliability weighting plus, for every `q_j` with a constant term, a
    /// second estimate of stream `j` from the power-series inverse
    /// `D_j q_j^-1 mod x^(K+p)`. That estimate accumulates errors towards the
    /// end of the stream while the top-down quotient accumulates them
    /// towards the start, and the two draw on disjoint channel positions.
    Bidirectional,
}

/// Per-candidate pipeline shared by all hypotheses of one decryption.
pub struct CandidateDecoder<'a> {
    g_q: &'a PolyGenMatrix,
    params: &'a CodeParams,
    /// Trellis over the `n` streams, used to score the chosen path.
    base: Trellis,
    /// Trellis actually searched; has extra streams in bidirectional mode.
    search: Trellis,
    weights: Option<Vec<u32>>,
    /// `(stream, q_j^-1 mod x^(K+p))` for each extra stream.
    inverses: Vec<(usize, BinPoly)>,
}

/// `q^-1 mod x^len` for `q` with a constant term.
pub fn series_inverse(q: &BinPoly, len: usize) -> Result<BinPoly> {
    if !q.coeff(0) {
        return Err(Error::Param("power-series inverse needs a constant term"));
    }
    let taps: Vec<usize> = q.exponents().into_iter().filter(|&k| k > 0).collect();
    let mut inv = BitVec::zeros(len);
    for i in 0..len {
        let bit = taps.iter().fold(i == 0, |b, &k| b ^ (k <= i && inv.get(i - k)));
        inv.set(i, bit);
    }
    Ok(BinPoly::from_coeffs(inv))
}

fn cost(fan_in: usize, e: f64) -> u32 {
    let p = ((1.0 - libm::pow(1.0 - 2.0 * e, fan_in as f64)) / 2.0).max(1e-9);
    if p >= 0.5 {
        0
    } else {
        libm::round(libm::log((1.0 - p) / p) * RELIABILITY_SCALE) as u32
    }
}

impl<'a> CandidateDecoder<'a> {
    pub fn new(g_p: &PolyGenMatrix, g_q: &'a PolyGenMatrix, params: &'a CodeParams, mode: DecoderMode) -> Result<Self> {
        params.check_code(g_p, g_q)?;
        let base = Trellis::build(g_p, params.k)?;
        let keep = params.k + params.p;
        let inverses: Vec<(usize, BinPoly)> = match mode {
            DecoderMode::Bidirectional => g_q
                .polys()
                .iter()
                .enumerate()
                .filter(|(_, q)| q.coeff(0) && q.degree() != Some(0))
                .map(|(j, q)| Ok((j, series_inverse(q, keep)?)))
                .collect::<Result<_>>()?,
            _ => Vec::new(),
        };
        let (search, weights) = match mode {
            DecoderMode::Standard => (base.clone(), None),
            DecoderMode::Reliability => (base.clone(), Some(reliability_weights(g_q, params)?)),
            DecoderMode::Bidirectional => {
                let mut polys = g_p.polys().to_vec();
                polys.extend(inverses.iter().map(|(j, _)| g_p.polys()[*j].clone()));
                let width = polys.len();
                let search = Trellis::build(&PolyGenMatrix::new(polys)?, params.k)?;
                let top = reliability_weights(g_q, params)?;
                let e = params.e.to_f64();
                let mut weights = alloc::vec![0u32; width * keep];
                for i in 0..keep {
                    weights[i * width..i * width + params.n].copy_from_slice(&top[i * params.n..(i + 1) * params.n]);
                }
                for (x, (_, inv)) in inverses.iter().enumerate() {
                    let mut fan = 0;
                    for i in 0..keep {
                        fan += inv.coeff(i) as usize;
                        weights[i * width + params.n + x] = cost(fan, e);
                    }
                }
                (search, Some(weights))
            }
        };
        Ok(Self {
            g_q,
            params,
            base,
            search,
            weights,
            inverses,
        })
    }

    pub fn decode(&self, mask_index: u32, candidate: &BitVec) -> Result<CandidateOutcome> {
        let (quotient_word, remainder_weight) = invert_highmem(candidate, self.g_q, self.params)?;
        let decode = match (&self.weights, self.inverses.is_empty()) {
            (None, _) => self.search.decode(&quotient_word)?,
            (Some(w), true) => self.search.decode_weighted(&quotient_word, w)?,
            (Some(w), false) => {
                let keep = self.params.k + self.params.p;
                let n = self.params.n;
                let mut streams: Vec<BitVec> = (0..n)
                    .map(|j| deinterleave(&quotient_word, n, j))
                    .collect::<Result<_>>()?;
                for (j, inv) in &self.inverses {
                    let low = deinterleave(candidate, n, *j)?.slice(0, keep);
                    streams.push(BinPoly::from_coeffs(low).mul(inv).to_bitvec(keep));
                }
                let info = self.search.decode_weighted(&interleave(&streams)?, w)?.info;
                self.base.evaluate(info, &quotient_word)?
            }
        };
        Ok(CandidateOutcome {
            mask_index,
            quotient_word,
            decode,
            remainder_weight,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecryptOptions {
    pub gate: Gate,
    pub decoder: DecoderMode,
    pub sigmas: f64,
    /// Monte Carlo trials for [`Gate::Auto`].
    pub alpha_trials: usize,
}

impl Default for DecryptOptions {
    fn default() -> Self {
        Self {
            gate: Gate::Auto,
            decoder: DecoderMode::Standard,
            sigmas: DEFAULT_SIGMAS,
            alpha_trials: ALPHA_TRIALS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    GateRejected,
    CrcRejected,
    /// Ranked below the accepted outcome.
    NotTried,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transcript {
    /// All outcomes, ranked.
    pub outcomes: Vec<CandidateOutcome>,
    pub verdicts: Vec<Verdict>,
    /// Error-weight bound used, if the gate was on.
    pub threshold: Option<f64>,
}

impl Transcript {
    /// `(mask_index, error_weight)` for each ranked outcome.
    pub fn weights(&self) -> Vec<(u32, usize)> {
        self.outcomes
            .iter()
            .map(|o| (o.mask_index, o.decode.error_weight))
            .collect()
    }

    pub fn accepted(&self) -> Option<&CandidateOutcome> {
        self.verdicts
            .iter()
            .position(|v| *v == Verdict::Accepted)
            .map(|i| &self.outcomes[i])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decryption {
    Recovered { plaintext: BitVec, transcript: Transcript },
    Failed { transcript: Transcript },
}

impl Decryption {
    pub fn plaintext(&self) -> Option<&BitVec> {
        match self {
            Decryption::Recovered { plaintext, .. } => Some(plaintext),
            Decryption::Failed { .. } => None,
        }
    }

    pub fn transcript(&self) -> &Transcript {
        match self {
            Decryption::Recovered { transcript, .. } | Decryption::Failed { transcript } => transcript,
        }
    }
}

pub fn decrypt(private: &PrivateKey, public: &PublicKey, ct: &Ciphertext, opts: &DecryptOptions) -> Result<Decryption> {
    decrypt_with(private, public, ct, opts, &Sequential)
}

/// Decryption with the per-hypothesis decoders run by `exec`. Only `N`, `e`
/// and the CRC polynomial are taken from the public key.
pub fn decrypt_with<E: Executor>(
    private: &PrivateKey,
    public: &PublicKey,
    ct: &Ciphertext,
    opts: &DecryptOptions,
    exec: &E,
) -> Result<Decryption> {
    let params = &private.params;
    check_dim("public key length", params.big_n(), public.params.big_n())?;
    check_dim("ciphertext length", params.big_n(), ct.bits.len())?;
    let (e, r_poly) = (public.params.e, &public.params.r_poly);

    let c_tilde = private.perm.apply(&ct.bits, true)?;
    let candidates = enumerate_candidates(&c_tilde, &private.mask_basis)?;
    let decoder = CandidateDecoder::new(&private.g_p, &private.g_q, params, opts.decoder)?;

    let results = exec.map(candidates.len(), |i| {
        let (mask_index, cand) = &candidates[i];
        decoder.decode(*mask_index, cand)
    });
    let mut outcomes = results.into_iter().collect::<Result<Vec<_>>>()?;
    outcomes.sort_by(outcome_order);

    let threshold = match opts.gate {
        Gate::Off => None,
        Gate::Alpha(alpha) => Some(gate_threshold(&public.params, alpha, opts.sigmas)),
        Gate::Auto => {
            let mut rng = ChaCha8Rng::seed_from_u64(ALPHA_SEED);
            let est = estimate_alpha(
                &private.g_q,
                e.to_f64(),
                params.stream_len(),
                opts.alpha_trials,
                &mut rng,
            )?;
            Some(gate_threshold_spread(
                &public.params,
                est.alpha_total,
                opts.sigmas,
                est.weight_std,
            ))
        }
    };

    let mut verdicts = Vec::with_capacity(outcomes.len());
    let mut plaintext = None;
    for o in &outcomes {
        if plaintext.is_some() {
            verdicts.push(Verdict::NotTried);
            continue;
        }
        if threshold.is_some_and(|t| o.decode.error_weight as f64 > t) {
            verdicts.push(Verdict::GateRejected);
            continue;
        }
        let word = private.s_inv.mul_vec(&o.decode.info)?;
        if crc_verify(&word, r_poly)? {
            plaintext = Some(crc_strip(&word, r_poly));
            verdicts.push(Verdict::Accepted);
        } else {
            verdicts.push(Verdict::CrcRejected);
        }
    }
    if verdicts.len() != outcomes.len() {
        return Err(Error::Invariant("verdict per outcome"));
    }
    let transcript = Transcript {
        outcomes,
        verdicts,
        threshold,
    };
    Ok(match plaintext {
        Some(plaintext) => Decryption::Recovered { plaintext, transcript },
        None => Decryption::Failed { transcript },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keys::keygen;
    use crate::poly::BinPoly;

    #[test]
    fn gate_margins() {
        let params = crate::presets::paper_a().params;
        let plain = gate_threshold(&params, 280.0, DEFAULT_SIGMAS);
        // 0.02 * 5600 + 280 + 4 sqrt(5600 * 0.02 * 0.98)
        assert!((plain - (112.0 + 280.0 + 4.0 * libm::sqrt(109.76))).abs() < 1e-9);
        assert!(616.0 > plain);
        assert_eq!(gate_threshold_spread(&params, 280.0, DEFAULT_SIGMAS, 1.0), plain);
        assert!((gate_threshold_spread(&params, 280.0, DEFAULT_SIGMAS, 50.0) - 592.0).abs() < 1e-9);
        let quiet = CodeParams {
            e: Ratio::ZERO,
            ..params
        };
        assert_eq!(gate_threshold(&quiet, 0.0, DEFAULT_SIGMAS), 0.0);
    }

    fn setup(l: usize, e: Ratio) -> (PublicKey, PrivateKey) {
        let g_p = PolyGenMatrix::from_octal(&["5", "7"]).unwrap();
        let g_q = PolyGenMatrix::from_exponents(&[&[0, 9], &[4]]).unwrap();
        let params = CodeParams::for_code(&g_p, &g_q, 24, l, e, BinPoly::from_exponents(&[0, 1, 4])).unwrap();
        keygen(&params, &g_p, &g_q, &mut ChaCha8Rng::seed_from_u64(3)).unwrap()
    }

    #[test]
    fn gray_order_changes_one_vector_per_step() {
        let (_, private) = setup(3, Ratio::ZERO);
        let c = BitVec::zeros(private.params.big_n());
        let cands = enumerate_candidates(&c, &private.mask_basis).unwrap();
        let masks: Vec<u32> = cands.iter().map(|(m, _)| *m).collect();
        assert_eq!(masks, [0, 1, 3, 2, 6, 7, 5, 4]);
        for (m, v) in &cands {
            assert_eq!(*v, private.mask_basis.combination(*m));
        }
    }

    #[test]
    fn noiseless_round_trip() {
        let (public, private) = setup(2, Ratio::ZERO);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let m = BitVec::random(public.params.plaintext_len(), &mut rng);
            let ct = encrypt(&public, &m, &mut rng).unwrap();
            let d = decrypt(&private, &public, &ct, &DecryptOptions::default()).unwrap();
            assert_eq!(d.plaintext(), Some(&m));
            assert_eq!(d.transcript().accepted().unwrap().decode.error_weight, 0);
        }
    }

    #[test]
    fn fan_in_counts() {
        // Pure shift: every kept bit sees exactly one channel position.
        assert_eq!(quotient_fan_in(&BinPoly::monomial(3), 10, 7).unwrap(), [1; 7]);
        assert_eq!(quotient_fan_in(&BinPoly::one(), 10, 10).unwrap(), [1; 10]);
        // 1 + x^3 over 10 positions: bit i collects i+3, i+6, i+9.
        assert_eq!(
            quotient_fan_in(&BinPoly::from_exponents(&[0, 3]), 10, 7).unwrap(),
            [3, 2, 2, 2, 1, 1, 1]
        );
        // Brute force for a denser divisor.
        let q = BinPoly::from_exponents(&[0, 1, 4]);
        let mut counts = [0usize; 8];
        for k in 0..12 {
            let (quot, _) = crate::poly::divmod_bits(&BitVec::from_positions(12, &[k]), &q).unwrap();
            for i in quot.ones_iter().filter(|&i| i < 8) {
                counts[i] += 1;
            }
        }
        assert_eq!(quotient_fan_in(&q, 12, 8).unwrap(), counts);
    }

    #[test]
    fn series_inverse_is_inverse() {
        let q = BinPoly::from_exponents(&[0, 3, 5]);
        let inv = series_inverse(&q, 40).unwrap();
        assert_eq!(q.mul(&inv).to_bitvec(40), BinPoly::one().to_bitvec(40));
        assert!(series_inverse(&BinPoly::monomial(2), 5).is_err());
    }

    #[test]
    fn all_modes_round_trip_noiselessly() {
        let (public, private) = setup(2, Ratio::ZERO);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for decoder in [
            DecoderMode::Standard,
            DecoderMode::Reliability,
            DecoderMode::Bidirectional,
        ] {
            let m = BitVec::random(public.params.plaintext_len(), &mut rng);
            let ct = encrypt(&public, &m, &mut rng).unwrap();
            let opts = DecryptOptions {
                decoder,
                ..Default::default()
            };
            let d = decrypt(&private, &public, &ct, &opts).unwrap();
            assert_eq!(d.plaintext(), Some(&m));
            assert_eq!(d.transcript().accepted().unwrap().decode.error_weight, 0);
        }
    }

    #[test]
    fn wrong_lengths_rejected() {
        let (public, private) = setup(1, Ratio::ZERO);
        assert!(encrypt_with_errors(&public, &BitVec::zeros(3), &BitVec::zeros(public.params.big_n())).is_err());
        let ct = Ciphertext { bits: BitVec::zeros(5) };
        assert!(decrypt(&private, &public, &ct, &DecryptOptions::default()).is_err());
    }

    #[test]
    fn all_ones_errors_fail_honestly() {
        let (public, private) = setup(2, Ratio::new(1, 10).unwrap());
        let m = BitVec::zeros(public.params.plaintext_len());
        let ct = encrypt_with_errors(&public, &m, &BitVec::ones(public.params.big_n())).unwrap();
        let d = decrypt(&private, &public, &ct, &DecryptOptions::default()).unwrap();
        let t = d.transcript();
        assert_eq!(t.outcomes.len(), 4);
        assert_eq!(t.weights().len(), 4);
        if d.plaintext().is_none() {
            assert!(t
                .verdicts
                .iter()
                .all(|v| matches!(v, Verdict::GateRejected | Verdict::CrcRejected)));
        }
    }
}
