use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mcc_core::analysis::{
    effective_error_rate, estimate_alpha, gilbert_relative_distance, isd_log2, key_randomness_report, qisd_log2,
    window_failure, AlphaEstimate,
};
use mcc_core::keys::{gen_mask_matrix, keygen};
use mcc_core::pipeline::{decrypt_with, encrypt, encrypt_with_errors, Gate, Verdict, ALPHA_TRIALS, DEFAULT_SIGMAS};
use mcc_core::{
    exec::Sequential, BitVec, Ciphertext, DecoderMode, DecryptOptions, Decryption, MaskBasis, MatF2, Permutation,
    PolyGenMatrix, PrivateKey, PublicKey,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{CliError, Result};
use crate::exec::Rayon;
use crate::format;
use crate::params::{self, ParamFile};
use crate::plaintext::{self, BitFormat};
use crate::report::Report;

#[derive(Debug, Parser)]
#[command(name = "mcc", version, about = "Masked high-memory convolutional code cryptosystem")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a key pair from a parameter file.
    Keygen {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out_pub: PathBuf,
        #[arg(long)]
        out_priv: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Encrypt a plaintext of K - r bits.
    Encrypt {
        #[arg(long = "pub")]
        public: PathBuf,
        /// Plaintext file, or a literal 0/1 string.
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "auto")]
        format: BitFormat,
        /// Fixed 0-based error positions instead of random draws.
        #[arg(long, hide = true, value_delimiter = ',')]
        inject_errors: Option<Vec<usize>>,
    },
    /// Decrypt a ciphertext and print the plaintext bits.
    Decrypt {
        #[arg(long = "priv")]
        private: PathBuf,
        #[arg(long = "pub")]
        public: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "ascii")]
        format: BitFormat,
        #[command(flatten)]
        decode: DecodeArgs,
        /// Print every candidate's weight and verdict to stderr.
        #[arg(long)]
        transcript: bool,
    },
    #[command(subcommand)]
    Analyze(Analyze),
    /// Monte Carlo key generation, encryption and decryption.
    Simulate {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        decode: DecodeArgs,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DecoderArg {
    Standard,
    Reliability,
    Bidirectional,
}

#[derive(Clone, Debug, Args)]
pub struct DecodeArgs {
    #[arg(long, value_enum, default_value = "standard")]
    pub decoder: DecoderArg,
    /// `auto`, `off`, or a fixed expected error increase alpha.
    #[arg(long, default_value = "auto")]
    pub gate: String,
    #[arg(long, default_value_t = DEFAULT_SIGMAS)]
    pub sigmas: f64,
}

impl DecodeArgs {
    pub fn options(&self) -> Result<DecryptOptions> {
        let gate = match self.gate.as_str() {
            "auto" => Gate::Auto,
            "off" => Gate::Off,
            v => Gate::Alpha(
                v.parse()
                    .map_err(|_| CliError::Usage(format!("--gate: {v:?} is not auto, off or a number")))?,
            ),
        };
        let decoder = match self.decoder {
            DecoderArg::Standard => DecoderMode::Standard,
            DecoderArg::Reliability => DecoderMode::Reliability,
            DecoderArg::Bidirectional => DecoderMode::Bidirectional,
        };
        Ok(DecryptOptions {
            gate,
            decoder,
            sigmas: self.sigmas,
            alpha_trials: ALPHA_TRIALS,
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Analyze {
    /// Information-set decoding cost in log2. Without arguments compares
    /// the Goppa reference with paper-a.
    Isd {
        #[arg(long, requires_all = ["k", "t"])]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Gilbert-Varshamov relative distance for a code rate.
    Gilbert {
        #[arg(long)]
        rate: f64,
        #[arg(long)]
        json: bool,
    },
    /// Monte Carlo error increase from dividing by G_Q.
    Alpha {
        #[command(flatten)]
        code: CodeSource,
        /// Overrides the file's error probability.
        #[arg(long)]
        e: Option<f64>,
        /// Stream length; defaults to K + p + q.
        #[arg(long)]
        stream_len: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Window failure probability of the decoder.
    Failure {
        #[arg(long, default_value_t = 0.1175)]
        p: f64,
        #[arg(long, default_value_t = 44)]
        window: usize,
        #[arg(long, default_value_t = 14)]
        t: usize,
        #[arg(long, default_value_t = 228)]
        windows: usize,
        #[arg(long)]
        json: bool,
    },
    /// Rank and weight statistics of public keys.
    Keyrand {
        #[arg(long = "pub", conflicts_with = "params")]
        public: Option<PathBuf>,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        keys: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Debug, Args)]
#[group(required = true, multiple = false)]
pub struct CodeSource {
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
}

impl CodeSource {
    fn load(&self) -> Result<ParamFile> {
        match (&self.params, &self.preset) {
            (Some(p), _) => params::load(p),
            (None, Some(name)) => params::parse(&format!("preset = {name}"), "--preset"),
            (None, None) => Err(CliError::Usage("need --params or --preset".into())),
        }
    }
}

/// What a command produced: text for stdout and text for stderr.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn load_public(path: &Path) -> Result<PublicKey> {
    Ok(format::decode_public(&read(path)?)?)
}

pub fn load_private(path: &Path) -> Result<PrivateKey> {
    Ok(format::decode_private(&read(path)?)?)
}

/// The given seed, or a fresh one from the OS, noted on stderr.
fn resolve_seed(seed: Option<u64>, out: &mut Output) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        out.stderr.push_str(&format!("seed = {s}\n"));
        s
    })
}

/// Key pair from a parameter file, with any injected components in place
/// of the random draws. Draw order matches `keygen`.
pub fn keygen_from(file: &ParamFile, seed: u64) -> Result<(PublicKey, PrivateKey)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inj = &file.inject;
    if inj.is_empty() {
        return Ok(keygen(&file.params, &file.g_p, &file.g_q, &mut rng)?);
    }
    let params = &file.params;
    let big_n = params.big_n();
    let bad = |what: &str, e: mcc_core::Error| CliError::Usage(format!("{what}: {e}"));
    let basis = match &inj.basis {
        Some(v) => MaskBasis::new(v.clone(), big_n).map_err(|e| bad("inject.basis", e))?,
        None => MaskBasis::generate(big_n, params.l, &mut rng)?,
    };
    let mask_matrix = match &inj.mask {
        Some(rows) => {
            if rows.len() != params.k || rows.iter().any(|&m| m >> basis.rank() != 0) {
                return Err(CliError::Usage(format!(
                    "inject.mask needs {} bitmasks below 2^{}",
                    params.k,
                    basis.rank()
                )));
            }
            MatF2::from_rows(&rows.iter().map(|&m| basis.combination(m)).collect::<Vec<_>>(), big_n)?
        }
        None => {
            let g_pq = mcc_core::conv::expand_scalar(&file.g_p.compose(&file.g_q)?, params.k, params.p + params.q)?;
            gen_mask_matrix(&basis, params.k, &g_pq, &mut rng)?
        }
    };
    let s = match &inj.s {
        Some(s) => s.clone(),
        None => MatF2::random_nonsingular(params.k, &mut rng),
    };
    let perm = match &inj.perm {
        Some(map) => Permutation::new(map.clone()).map_err(|e| bad("inject.perm", e))?,
        None => Permutation::random(big_n, &mut rng),
    };
    let private = PrivateKey::from_parts(
        params.clone(),
        file.g_p.clone(),
        file.g_q.clone(),
        s,
        perm,
        basis,
        mask_matrix,
    )
    .map_err(|e| bad("injected key", e))?;
    Ok((private.public_key()?, private))
}

fn cmd_keygen(params_path: &Path, out_pub: &Path, out_priv: &Path, seed: Option<u64>) -> Result<Output> {
    let mut out = Output::default();
    let file = params::load(params_path)?;
    let seed = resolve_seed(seed.or(file.seed), &mut out);
    let (public, private) = keygen_from(&file, seed)?;
    write(out_pub, &format::encode_public(&public))?;
    write(out_priv, &format::encode_private(&private))?;
    let p = &public.params;
    let mut r = Report::new();
    r.put("n", p.n)
        .put("p", p.p)
        .put("q", p.q)
        .put("k", p.k)
        .put("big_n", p.big_n())
        .put("l", p.l);
    r.put("e", p.e.to_string())
        .put("plaintext_bits", p.plaintext_len())
        .put("rank", public.g.rank());
    out.stdout = r.to_text();
    Ok(out)
}

fn cmd_encrypt(
    pub_path: &Path,
    input: &str,
    out_path: &Path,
    seed: Option<u64>,
    fmt: BitFormat,
    inject: Option<&[usize]>,
) -> Result<Output> {
    let mut out = Output::default();
    let public = load_public(pub_path)?;
    let message = plaintext::read_input(input, public.params.plaintext_len(), fmt)?;
    let ct = match inject {
        Some(pos) => {
            let big_n = public.params.big_n();
            if let Some(&bad) = pos.iter().find(|&&i| i >= big_n) {
                return Err(CliError::Usage(format!("error position {bad} is outside 0..{big_n}")));
            }
            encrypt_with_errors(&public, &message, &BitVec::from_positions(big_n, pos))?
        }
        None => {
            let seed = resolve_seed(seed, &mut out);
            encrypt(&public, &message, &mut ChaCha8Rng::seed_from_u64(seed))?
        }
    };
    write(out_path, &format::encode_ciphertext(&ct))?;
    Ok(out)
}

fn transcript_text(d: &Decryption) -> String {
    let t = d.transcript();
    let mut s = String::new();
    if let Some(th) = t.threshold {
        s.push_str(&format!("gate_threshold = {th:.2}\n"));
    }
    for (o, v) in t.outcomes.iter().zip(&t.verdicts) {
        let verdict = match v {
            Verdict::Accepted => "accepted",
            Verdict::GateRejected => "gate_rejected",
            Verdict::CrcRejected => "crc_rejected",
            Verdict::NotTried => "not_tried",
        };
        s.push_str(&format!(
            "mask {} weight {} {verdict}\n",
            o.mask_index, o.decode.error_weight
        ));
    }
    s
}

fn cmd_decrypt(
    priv_path: &Path,
    pub_path: &Path,
    input: &Path,
    out_path: Option<&Path>,
    fmt: BitFormat,
    opts: &DecryptOptions,
    show: bool,
) -> Result<Output> {
    let mut out = Output::default();
    let private = load_private(priv_path)?;
    let public = load_public(pub_path)?;
    let ct = format::decode_ciphertext(&read(input)?)?;
    if public.params != private.params {
        return Err(CliError::Usage(
            "public and private keys have different parameters".into(),
        ));
    }
    let d = decrypt_with(&private, &public, &ct, opts, &Rayon)?;
    if show {
        out.stderr.push_str(&transcript_text(&d));
    }
    match d.plaintext() {
        Some(m) => {
            if let Some(path) = out_path {
                write(path, &plaintext::encode(m, fmt))?;
            }
            out.stdout = format!("{m}\n");
            Ok(out)
        }
        None => {
            let best = d.transcript().outcomes.first().map(|o| o.decode.error_weight);
            Err(CliError::Decrypt(format!(
                "no candidate passed the checks (best weight {}); request retransmission\n{}",
                best.map_or("none".into(), |w| w.to_string()),
                transcript_text(&d).trim_end()
            )))
        }
    }
}

/// Trials per independent random stream in the parallel alpha estimate.
const ALPHA_CHUNK: usize = 256;

/// [`estimate_alpha`] split into fixed chunks, each on its own ChaCha
/// stream, so the result does not depend on the thread count.
pub fn parallel_alpha(
    g_q: &PolyGenMatrix,
    e: f64,
    stream_len: usize,
    trials: usize,
    seed: u64,
) -> Result<AlphaEstimate> {
    if trials == 0 {
        return Err(CliError::Usage("need at least one trial".into()));
    }
    let chunks = trials.div_ceil(ALPHA_CHUNK);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let n = ALPHA_CHUNK.min(trials - c * ALPHA_CHUNK);
            estimate_alpha(g_q, e, stream_len, n, &mut rng)
        })
        .collect::<mcc_core::Result<Vec<_>>>()?;
    let t = trials as f64;
    let mut per_stream = vec![0.0; g_q.n()];
    for part in &parts {
        for (acc, a) in per_stream.iter_mut().zip(&part.per_stream) {
            *acc += a * part.trials as f64;
        }
    }
    per_stream.iter_mut().for_each(|a| *a /= t);
    let alpha_total = per_stream.iter().sum();
    let weight_mean = parts.iter().map(|p| p.weight_mean * p.trials as f64).sum::<f64>() / t;
    // Pooled sample variance across chunks.
    let ss: f64 = parts
        .iter()
        .map(|p| {
            let n = p.trials as f64;
            (n - 1.0) * p.weight_std * p.weight_std + n * (p.weight_mean - weight_mean).powi(2)
        })
        .sum();
    let weight_std = if trials > 1 { (ss / (t - 1.0)).sqrt() } else { 0.0 };
    Ok(AlphaEstimate {
        per_stream,
        alpha_total,
        weight_mean,
        weight_std,
        trials,
        stream_len,
    })
}

fn isd_entry(r: &mut Report, name: &str, n: usize, k: usize, t: usize) -> Result<f64> {
    let isd = isd_log2(n, k, t)?;
    r.put(format!("{name}.n"), n)
        .put(format!("{name}.k"), k)
        .put(format!("{name}.t"), t);
    r.put(format!("{name}.isd_log2"), isd)
        .put(format!("{name}.qisd_log2"), qisd_log2(n, k, t)?);
    Ok(isd)
}

fn cmd_analyze(a: &Analyze) -> Result<Output> {
    let mut out = Output::default();
    let (report, json) = match a {
        Analyze::Isd { n, k, t, json } => {
            let mut r = Report::new();
            match (n, k, t) {
                (Some(n), Some(k), Some(t)) => {
                    isd_entry(&mut r, "code", *n, *k, *t)?;
                }
                _ => {
                    let goppa = isd_entry(&mut r, "goppa", 4096, 3556, 45)?;
                    let mcc = isd_entry(&mut r, "paper_a", 5600, 2600, 392)?;
                    r.put("improvement_log2", mcc - goppa);
                }
            }
            (r, *json)
        }
        Analyze::Gilbert { rate, json } => {
            let mut r = Report::new();
            r.put("rate", *rate)
                .put("relative_distance", gilbert_relative_distance(*rate)?);
            (r, *json)
        }
        Analyze::Alpha {
            code,
            e,
            stream_len,
            trials,
            seed,
            json,
        } => {
            let file = code.load()?;
            let e = e.unwrap_or(file.params.e.to_f64());
            let stream_len = stream_len.unwrap_or(file.params.stream_len());
            let seed = resolve_seed(*seed, &mut out);
            let est = parallel_alpha(&file.g_q, e, stream_len, *trials, seed)?;
            let big_n = file.g_q.n() * stream_len;
            let mut r = Report::new();
            r.put("e", e)
                .put("stream_len", stream_len)
                .put("big_n", big_n)
                .put("trials", *trials)
                .put("seed", seed);
            r.put("alpha", est.alpha_total).put("alpha_relative", est.relative());
            r.put("per_stream", est.per_stream.clone());
            r.put("weight_mean", est.weight_mean).put("weight_std", est.weight_std);
            r.put("effective_rate", effective_error_rate(e, est.alpha_total, big_n));
            (r, *json)
        }
        Analyze::Failure {
            p,
            window,
            t,
            windows,
            json,
        } => {
            let w = window_failure(*p, *window, *t, *windows)?;
            let mut r = Report::new();
            r.put("p", *p)
                .put("window_bits", *window)
                .put("t_corr", *t)
                .put("windows", *windows);
            r.put("p_window", w.p_window).put("p_success_all", w.p_success_all);
            (r, *json)
        }
        Analyze::Keyrand {
            public,
            params: params_path,
            keys,
            seed,
            json,
        } => {
            let mut r = Report::new();
            match (public, params_path) {
                (Some(path), _) => {
                    let k = key_randomness_report(&load_public(path)?.g);
                    r.put("rows", k.rows).put("cols", k.cols).put("rank", k.rank);
                    r.put("col_mean", k.col_mean)
                        .put("col_std", k.col_std)
                        .put("col_mean_z", k.col_mean_z);
                    r.put("row_mean", k.row_mean)
                        .put("row_std", k.row_std)
                        .put("row_min", k.row_min)
                        .put("row_max", k.row_max);
                    r.put(
                        "col_histogram",
                        k.col_histogram.iter().map(|&(w, c)| vec![w, c]).collect::<Vec<_>>(),
                    );
                }
                (None, Some(path)) => {
                    let file = params::load(path)?;
                    let seed = resolve_seed(*seed, &mut out);
                    let stats = keyrand_batch(&file, *keys, seed)?;
                    let k = file.params.k as f64;
                    let full = stats.iter().filter(|s| s.rank == file.params.k).count();
                    let mean = stats.iter().map(|s| s.col_mean).sum::<f64>() / stats.len().max(1) as f64;
                    r.put("keys", *keys)
                        .put("seed", seed)
                        .put("k", file.params.k)
                        .put("full_rank", full);
                    r.put("col_mean", mean).put("col_mean_over_k", mean / k);
                    r.put(
                        "col_mean_min",
                        stats.iter().map(|s| s.col_mean).fold(f64::INFINITY, f64::min),
                    );
                    r.put(
                        "col_mean_max",
                        stats.iter().map(|s| s.col_mean).fold(f64::NEG_INFINITY, f64::max),
                    );
                }
                (None, None) => return Err(CliError::Usage("need --pub or --params".into())),
            }
            (r, *json)
        }
    };
    out.stdout = report.render(json);
    Ok(out)
}

/// Randomness reports for `keys` fresh key pairs; key `i` uses stream `i`
/// of the seed.
pub fn keyrand_batch(file: &ParamFile, keys: usize, seed: u64) -> Result<Vec<mcc_core::analysis::KeyRandomness>> {
    (0..keys)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let (public, _) = keygen(&file.params, &file.g_p, &file.g_q, &mut rng)?;
            Ok(key_randomness_report(&public.g))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrialOutcome {
    Recovered,
    /// Decryption reported failure.
    Flagged,
    /// A plaintext was returned and it is wrong.
    Silent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub outcome: TrialOutcome,
    pub winner_weight: usize,
    pub channel_errors: usize,
    /// The correct mask hypothesis ranked first with a strictly lower
    /// weight than every other hypothesis.
    pub separated: bool,
}

/// One full keygen, encrypt and decrypt round on stream `trial` of `seed`.
pub fn run_trial(file: &ParamFile, opts: &DecryptOptions, seed: u64, trial: usize) -> Result<TrialResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let (public, private) = keygen(&file.params, &file.g_p, &file.g_q, &mut rng)?;
    let message = BitVec::random(file.params.plaintext_len(), &mut rng);
    let errors = mcc_core::pipeline::sample_errors(file.params.big_n(), file.params.e, &mut rng);
    let ct: Ciphertext = encrypt_with_errors(&public, &message, &errors)?;
    let d = decrypt_with(&private, &public, &ct, opts, &Sequential)?;
    let outcome = match d.plaintext() {
        Some(m) if *m == message => TrialOutcome::Recovered,
        Some(_) => TrialOutcome::Silent,
        None => TrialOutcome::Flagged,
    };
    let outcomes = &d.transcript().outcomes;
    let winner_weight = outcomes.first().map_or(0, |o| o.decode.error_weight);
    // m_r S M lies in the span of the basis; its coordinates name the mask
    // hypothesis that cancels it.
    let m_r = mcc_core::crc::crc_append(&message, &file.params.r_poly)?;
    let masked = private.mask_matrix.mul_vec(&private.s.mul_vec(&m_r)?)?;
    let true_mask = private
        .mask_basis
        .coordinates(&masked)
        .ok_or(mcc_core::Error::Invariant("mask outside span"))?;
    let separated = outcomes.first().is_some_and(|o| o.mask_index == true_mask)
        && outcomes.get(1).is_none_or(|o| o.decode.error_weight > winner_weight);
    Ok(TrialResult {
        outcome,
        winner_weight,
        channel_errors: errors.weight(),
        separated,
    })
}

pub fn simulate(file: &ParamFile, opts: &DecryptOptions, trials: usize, seed: u64) -> Result<Report> {
    let results = (0..trials)
        .into_par_iter()
        .map(|i| run_trial(file, opts, seed, i))
        .collect::<Result<Vec<_>>>()?;
    let count = |o: TrialOutcome| results.iter().filter(|r| r.outcome == o).count();
    let p = &file.params;
    let mut r = Report::new();
    r.put("n", p.n)
        .put("p", p.p)
        .put("q", p.q)
        .put("k", p.k)
        .put("big_n", p.big_n())
        .put("l", p.l);
    r.put("e", p.e.to_string()).put("seed", seed).put("trials", trials);
    r.put("decoder", format!("{:?}", opts.decoder).to_lowercase());
    r.put("recovered", count(TrialOutcome::Recovered));
    r.put("flagged_failures", count(TrialOutcome::Flagged));
    r.put("silent_failures", count(TrialOutcome::Silent));
    r.put("separated", results.iter().filter(|t| t.separated).count());
    r.put(
        "success_rate",
        if trials == 0 {
            0.0
        } else {
            count(TrialOutcome::Recovered) as f64 / trials as f64
        },
    );
    if trials > 0 {
        let mean = |f: fn(&TrialResult) -> usize| results.iter().map(f).sum::<usize>() as f64 / trials as f64;
        r.put("mean_channel_errors", mean(|t| t.channel_errors));
        r.put("mean_winner_weight", mean(|t| t.winner_weight));
    }
    Ok(r)
}

/// Runs a parsed command.
pub fn run(cli: Cli) -> Result<Output> {
    match cli.command {
        Command::Keygen {
            params,
            out_pub,
            out_priv,
            seed,
        } => cmd_keygen(&params, &out_pub, &out_priv, seed),
        Command::Encrypt {
            public,
            input,
            out,
            seed,
            format,
            inject_errors,
        } => cmd_encrypt(&public, &input, &out, seed, format, inject_errors.as_deref()),
        Command::Decrypt {
            private,
            public,
            input,
            out,
            format,
            decode,
            transcript,
        } => cmd_decrypt(
            &private,
            &public,
            &input,
            out.as_deref(),
            format,
            &decode.options()?,
            transcript,
        ),
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Simulate {
            params: path,
            trials,
            seed,
            decode,
            json,
        } => {
            let mut out = Output::default();
            let file = params::load(&path)?;
            let seed = resolve_seed(seed.or(file.seed), &mut out);
            out.stdout = simulate(&file, &decode.options()?, trials, seed)?.render(json);
            Ok(out)
        }
    }
}
