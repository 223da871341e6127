//! Independent reference computations for the decoder and the analysis
//! formulas.

use mcc_core::analysis::{
    binary_entropy, effective_error_rate, estimate_alpha, gilbert_relative_distance, isd_log2, qisd_log2,
    security_report, window_failure,
};
use mcc_core::conv::{deinterleave, encode_streams, interleave};
use mcc_core::pipeline::invert_highmem;
use mcc_core::poly::divmod_bits;
use mcc_core::trellis::free_distance;
use mcc_core::{presets, BinPoly, BitVec, CodeParams, PolyGenMatrix, Ratio, Trellis};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_code(rng: &mut impl Rng) -> PolyGenMatrix {
    let n = rng.gen_range(1..=3);
    let memory = rng.gen_range(0..=3);
    loop {
        let polys: Vec<BinPoly> = (0..n)
            .map(|_| BinPoly::from_coeffs(BitVec::from_bools((0..=memory).map(|_| rng.gen::<bool>()))))
            .collect();
        if let Ok(g) = PolyGenMatrix::new(polys) {
            return g;
        }
    }
}

/// Minimum distance from `rx` to any zero-tail codeword, by enumeration.
fn brute_force_distance(code: &PolyGenMatrix, k: usize, rx: &BitVec) -> usize {
    (0u32..1 << k)
        .map(|v| {
            let m = BitVec::from_bools((0..k).map(|i| (v >> i) & 1 == 1));
            encode_streams(&m, code, code.memory()).unwrap().distance(rx).unwrap()
        })
        .min()
        .unwrap()
}

#[test]
fn viterbi_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let code = random_code(&mut rng);
        let k = rng.gen_range(1..=10);
        let t = Trellis::build(&code, k).unwrap();
        let rx = BitVec::random(code.n() * (k + code.memory()), &mut rng);
        let d = t.decode(&rx).unwrap();
        assert_eq!(d.error_weight, brute_force_distance(&code, k, &rx));
        assert_eq!(d.codeword, t.encode(&d.info).unwrap());
        assert_eq!(d.codeword.distance(&rx).unwrap(), d.error_weight);
    }
}

#[test]
fn corrects_two_spread_errors_on_small_code() {
    let code = PolyGenMatrix::from_exponents(&[&[0, 2], &[0, 1, 2]]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..300 {
        let k = 20;
        let t = Trellis::build(&code, k).unwrap();
        let info = BitVec::random(k, &mut rng);
        let mut rx = t.encode(&info).unwrap();
        let a = rng.gen_range(0..rx.len());
        let b = (a + rng.gen_range(12..rx.len() - 12)) % rx.len();
        rx.flip(a);
        if rng.gen() {
            rx.flip(b);
        }
        assert_eq!(t.decode(&rx).unwrap().info, info);
    }
}

#[test]
fn free_distances() {
    let small = PolyGenMatrix::from_exponents(&[&[0, 2], &[0, 1, 2]]).unwrap();
    assert_eq!(free_distance(&small).unwrap(), 5);
    assert_eq!(
        free_distance(&PolyGenMatrix::from_octal(&["133", "171"]).unwrap()).unwrap(),
        10
    );
    assert_eq!(free_distance(&presets::desk().g_p).unwrap(), 12);
    assert_eq!(free_distance(&presets::paper_a().g_p).unwrap(), 18);
    assert_eq!(free_distance(&presets::paper_b().g_p).unwrap(), 29);
    // The generator set exactly as printed, one digit off the table code.
    let printed = PolyGenMatrix::from_octal(&["2327", "2313", "2671", "3175"]).unwrap();
    assert_eq!(free_distance(&printed).unwrap(), 28);
}

fn binomial(n: usize, k: usize) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    let shift = bits.saturating_sub(60);
    let top = (x >> shift).to_u64_digits().first().copied().unwrap_or(0) as f64;
    top.log2() + shift as f64
}

#[test]
fn isd_matches_exact_binomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let n = rng.gen_range(2..=200);
        let k = rng.gen_range(1..n);
        let t = rng.gen_range(0..=n - k);
        let exact = log2_big(&binomial(n, k)) - log2_big(&binomial(n - t, k)) - 0.29f64.log2();
        let got = isd_log2(n, k, t).unwrap();
        assert!((got - exact).abs() < 1e-9, "N={n} K={k} t={t}: {got} vs {exact}");
        assert_eq!(qisd_log2(n, k, t).unwrap(), got / 2.0);
    }
}

#[test]
fn security_report_invariants() {
    let r = security_report(5600, 2600, 392, 5, 14).unwrap();
    assert_eq!(r.qisd_log2, r.isd_log2 / 2.0);
    assert_eq!(r.acs_per_bit_log2, 19.0);
    assert!((isd_log2(4096, 3556, 45).unwrap() - 135.7).abs() < 1.0);
    assert!((r.isd_log2 - 373.1).abs() < 2.0);
    assert!((qisd_log2(4096, 3556, 45).unwrap() - 67.9).abs() < 0.5);
    assert!((qisd_log2(5600, 2600, 392).unwrap() - 186.6).abs() < 1.0);
    assert!((qisd_log2(10, 5, 0).unwrap() - 0.893).abs() < 1e-3);
}

/// Direct summation with exact binomial coefficients.
fn tail_oracle(p: f64, w: usize, t: usize) -> f64 {
    ((t + 1)..=w)
        .map(|i| {
            let c: f64 = binomial(w, i).to_string().parse().unwrap();
            c * p.powi(i as i32) * (1.0 - p).powi((w - i) as i32)
        })
        .sum()
}

#[test]
fn window_tail_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let w = rng.gen_range(1..=120);
        let t = rng.gen_range(0..w);
        let p: f64 = rng.gen_range(0.001..0.5);
        let got = window_failure(p, w, t, 1).unwrap().p_window;
        let want = tail_oracle(p, w, t);
        assert!(
            ((got - want) / want).abs() < 1e-12,
            "p={p} w={w} t={t}: {got} vs {want}"
        );
    }
    let r = window_failure(0.1175, 44, 14, 228).unwrap();
    assert!(((r.p_window - tail_oracle(0.1175, 44, 14)) / r.p_window).abs() < 1e-12);
    assert!(r.p_window > 8.998e-5 / 2.0 && r.p_window < 8.998e-5 * 2.0);
    assert!((r.p_success_all - 0.98).abs() <= 0.02);
    assert!((r.p_success_all - (1.0 - r.p_window).powi(228)).abs() < 1e-12);
}

#[test]
fn window_failure_is_monotone() {
    let mut last = 0.0;
    for i in 1..100 {
        let p = window_failure(i as f64 / 100.0, 44, 14, 1).unwrap().p_window;
        assert!(p >= last);
        last = p;
    }
    let mut last = 0.0;
    for w in 15..200 {
        let p = window_failure(0.1, w, 14, 1).unwrap().p_window;
        assert!(p >= last);
        last = p;
    }
}

#[test]
fn gilbert_inverts_entropy() {
    for i in 1..100 {
        let rho = i as f64 / 100.0;
        let x = gilbert_relative_distance(rho).unwrap();
        assert!((binary_entropy(x) - (1.0 - rho)).abs() < 1e-5);
        assert!(x > 0.0 && x < 0.5);
    }
    for (rho, want) in [(0.5, 0.110), (1.0 / 3.0, 0.174), (0.25, 0.215)] {
        assert!((gilbert_relative_distance(rho).unwrap() - want).abs() < 1e-3);
    }
    assert!(gilbert_relative_distance(1e-9).unwrap() > 0.499);
}

#[test]
fn effective_rate_arithmetic() {
    assert!((effective_error_rate(0.02, 0.05 * 5600.0, 5600) - 0.07).abs() < 1e-12);
    assert_eq!(effective_error_rate(0.3, 0.0, 100), 0.3);
    assert!((effective_error_rate(0.04, 0.0775 * 1000.0, 1000) - 0.1175).abs() < 1e-12);
}

#[test]
fn shift_divisors_only_lose_errors() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let one = PolyGenMatrix::from_exponents(&[&[0]]).unwrap();
    let est = estimate_alpha(&one, 0.1, 400, 200, &mut rng).unwrap();
    assert_eq!(est.per_stream, [0.0]);
    // Division by x^i is a shift. Truncation to `stream_len - 40` then drops
    // 40 error positions from either stream, whatever its own shift.
    let shift = PolyGenMatrix::from_exponents(&[&[5], &[40]]).unwrap();
    let est = estimate_alpha(&shift, 0.1, 400, 2000, &mut rng).unwrap();
    assert!(est.per_stream.iter().all(|&a| a <= 0.0));
    assert!((est.per_stream[0] + 4.0).abs() < 0.3);
    assert!((est.per_stream[1] + 4.0).abs() < 0.3);
    assert!((est.alpha_total - est.per_stream.iter().sum::<f64>()).abs() < 1e-9);
}

/// The error-only increase measured by the estimator equals the increase
/// seen end to end on a full noisy codeword.
#[test]
fn error_only_quotient_matches_end_to_end() {
    let preset = presets::desk();
    let params = &preset.params;
    let composed = preset.g_p.compose(&preset.g_q).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..30 {
        let m = BitVec::random(params.k, &mut rng);
        let clean = encode_streams(&m, &composed, params.p + params.q).unwrap();
        let errors = BitVec::from_bools((0..params.big_n()).map(|_| rng.gen_bool(0.05)));
        let (d, _) = invert_highmem(&clean.xor(&errors).unwrap(), &preset.g_q, params).unwrap();
        let expected = encode_streams(&m, &preset.g_p, params.p).unwrap();
        let end_to_end = d.distance(&expected).unwrap();

        let keep = params.k + params.p;
        let mut quotients = Vec::new();
        for (j, q) in preset.g_q.polys().iter().enumerate() {
            let (mut quot, _) = divmod_bits(&deinterleave(&errors, params.n, j).unwrap(), q).unwrap();
            quot.resize(keep);
            quotients.push(quot);
        }
        assert_eq!(end_to_end, interleave(&quotients).unwrap().weight());
    }
}

#[test]
fn alpha_is_stable() {
    let g_q = presets::paper_a().g_q;
    let a = estimate_alpha(&g_q, 0.02, 2800, 10_000, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let b = estimate_alpha(&g_q, 0.02, 2800, 10_000, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    assert!(((a.alpha_total - b.alpha_total) / a.alpha_total).abs() < 0.05);
    let rate = effective_error_rate(0.02, a.alpha_total, 2 * 2800);
    assert!((rate - 0.07).abs() <= 0.01, "effective rate {rate}");
}

#[test]
fn keygen_preset_rank() {
    let preset = presets::desk();
    let params = CodeParams {
        l: 4,
        e: Ratio::new(1, 100).unwrap(),
        ..preset.params.clone()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..5 {
        let (public, _) = mcc_core::keys::keygen(&params, &preset.g_p, &preset.g_q, &mut rng).unwrap();
        assert_eq!(public.g.rank(), params.k);
    }
}
