use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mcc_cli::format::decode_ciphertext;
use mcc_core::BitVec;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn mcc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn value(report: &str, key: &str) -> String {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no {key} in\n{report}"))
        .to_string()
}

#[test]
fn packaged_fixture_decrypts() {
    let (pr, pu, ct) = (
        fixture("worked_example.priv"),
        fixture("worked_example.pub"),
        fixture("worked_example.ct"),
    );
    let o = mcc(&["decrypt", "--priv", p(&pr), "--pub", p(&pu), "--in", p(&ct)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "111001\n");
}

#[test]
fn fixture_files_regenerate_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let (pu, pr, ct) = (
        dir.path().join("k.pub"),
        dir.path().join("k.priv"),
        dir.path().join("c"),
    );
    let params = fixture("worked_example.params");
    let o = mcc(&[
        "keygen",
        "--params",
        p(&params),
        "--out-pub",
        p(&pu),
        "--out-priv",
        p(&pr),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(value(&stdout(&o), "rank"), "6");
    assert_eq!(
        std::fs::read(&pu).unwrap(),
        std::fs::read(fixture("worked_example.pub")).unwrap()
    );
    assert_eq!(
        std::fs::read(&pr).unwrap(),
        std::fs::read(fixture("worked_example.priv")).unwrap()
    );
    let o = mcc(&[
        "encrypt",
        "--pub",
        p(&pu),
        "--in",
        "111001",
        "--out",
        p(&ct),
        "--inject-errors",
        "3,16,18",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let bytes = std::fs::read(&ct).unwrap();
    assert_eq!(bytes, std::fs::read(fixture("worked_example.ct")).unwrap());
    assert_eq!(
        decode_ciphertext(&bytes).unwrap().bits,
        BitVec::parse01("100011101101000011011101001010").unwrap()
    );
}

#[test]
fn transcript_lists_all_masks() {
    let (pr, pu, ct) = (
        fixture("worked_example.priv"),
        fixture("worked_example.pub"),
        fixture("worked_example.ct"),
    );
    let o = mcc(&[
        "decrypt",
        "--priv",
        p(&pr),
        "--pub",
        p(&pu),
        "--in",
        p(&ct),
        "--transcript",
        "--gate",
        "off",
    ]);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.starts_with("mask 3 weight 2 accepted\n"), "{err}");
    assert_eq!(err.lines().count(), 4);
}

#[test]
fn gilbert_report() {
    let o = mcc(&["analyze", "gilbert", "--rate", "0.5"]);
    let x: f64 = value(&stdout(&o), "relative_distance").parse().unwrap();
    assert!((x - 0.110).abs() <= 0.001);
    let o = mcc(&["analyze", "gilbert", "--rate", "0.5", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["relative_distance"].as_f64(), Some(x));
}

#[test]
fn isd_and_failure_reports() {
    let out = stdout(&mcc(&["analyze", "isd"]));
    let goppa: f64 = value(&out, "goppa.isd_log2").parse().unwrap();
    let improvement: f64 = value(&out, "improvement_log2").parse().unwrap();
    assert!((goppa - 135.7).abs() < 1.0);
    assert!((improvement - 237.4).abs() < 0.5);
    let out = stdout(&mcc(&["analyze", "isd", "--n", "10", "--k", "5", "--t", "0"]));
    assert!((value(&out, "code.isd_log2").parse::<f64>().unwrap() - 1.786).abs() < 1e-3);
    let out = stdout(&mcc(&["analyze", "failure"]));
    let pw: f64 = value(&out, "p_window").parse().unwrap();
    assert!(pw > 4.4e-5 && pw < 1.8e-4);
}

#[test]
fn alpha_is_seed_deterministic() {
    let args = [
        "analyze", "alpha", "--preset", "paper-a", "--trials", "600", "--seed", "5",
    ];
    let a = mcc(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, mcc(&args).stdout);
    let rate: f64 = value(&stdout(&a), "effective_rate").parse().unwrap();
    assert!((rate - 0.07).abs() <= 0.01);
}

#[test]
fn simulate_desk_is_reproducible() {
    let params = fixture("desk.params");
    let args = ["simulate", "--params", p(&params), "--trials", "100", "--seed", "11"];
    let a = mcc(&args);
    assert_eq!(a.status.code(), Some(0));
    let report = stdout(&a);
    assert!(
        value(&report, "success_rate").parse::<f64>().unwrap() >= 0.95,
        "{report}"
    );
    assert_eq!(value(&report, "silent_failures"), "0");
    assert_eq!(a.stdout, mcc(&args).stdout);
}

#[test]
fn missing_seed_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let (pu, pr) = (dir.path().join("a"), dir.path().join("b"));
    let params = dir.path().join("p");
    std::fs::write(
        &params,
        "g_p = 0 2; 0 1 2\ng_q = 0 7; 7\nk = 20\nl = 2\ne = 1/20\ncrc = 0 1 3\n",
    )
    .unwrap();
    let o = mcc(&[
        "keygen",
        "--params",
        p(&params),
        "--out-pub",
        p(&pu),
        "--out-priv",
        p(&pr),
    ]);
    let err = String::from_utf8(o.stderr).unwrap();
    let seed: u64 = value(&err, "seed").parse().unwrap();
    let (pu2, pr2) = (dir.path().join("c"), dir.path().join("d"));
    let s = seed.to_string();
    mcc(&[
        "keygen",
        "--params",
        p(&params),
        "--out-pub",
        p(&pu2),
        "--out-priv",
        p(&pr2),
        "--seed",
        &s,
    ]);
    assert_eq!(std::fs::read(&pr).unwrap(), std::fs::read(&pr2).unwrap());
}

#[test]
fn plaintext_round_trips_in_both_encodings() {
    let dir = tempfile::tempdir().unwrap();
    let d = |n: &str| dir.path().join(n);
    let params = d("p");
    std::fs::write(&params, "preset = desk\ne = 0\n").unwrap();
    mcc(&[
        "keygen",
        "--params",
        p(&params),
        "--out-pub",
        p(&d("pub")),
        "--out-priv",
        p(&d("priv")),
        "--seed",
        "4",
    ]);
    let msg: Vec<u8> = (0..30u8).map(|i| i.wrapping_mul(37) ^ 0x5a).collect();
    std::fs::write(d("m.bin"), &msg).unwrap();
    for (fmt, input) in [("binary", "m.bin"), ("ascii", "m.txt")] {
        if fmt == "ascii" {
            let bits = mcc_cli::format::unpack_bits(&msg, 240).unwrap();
            std::fs::write(d("m.txt"), format!("{bits}\n")).unwrap();
        }
        let o = mcc(&[
            "encrypt",
            "--pub",
            p(&d("pub")),
            "--in",
            p(&d(input)),
            "--out",
            p(&d("ct")),
            "--seed",
            "1",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let out = d(&format!("out.{fmt}"));
        let o = mcc(&[
            "decrypt",
            "--priv",
            p(&d("priv")),
            "--pub",
            p(&d("pub")),
            "--in",
            p(&d("ct")),
            "--out",
            p(&out),
            "--format",
            fmt,
        ]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(d(input)).unwrap());
    }
}

#[test]
fn exit_codes() {
    assert_eq!(mcc(&[]).status.code(), Some(1));
    assert_eq!(mcc(&["decrypt", "--bogus"]).status.code(), Some(1));
    assert_eq!(mcc(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk");
    std::fs::write(&junk, b"MCC1\x01\x01\x02").unwrap();
    let ct = fixture("worked_example.ct");
    let o = mcc(&["decrypt", "--priv", p(&junk), "--pub", p(&junk), "--in", p(&ct)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("truncated"));

    let params = dir.path().join("p");
    std::fs::write(&params, "preset = desk\nN = 656\n").unwrap();
    let o = mcc(&["simulate", "--params", p(&params), "--trials", "1"]);
    assert_eq!(o.status.code(), Some(2));

    // Garbage under a key with a CRC: no candidate survives the checks.
    let desk = fixture("desk.params");
    let (pu, pr, bad) = (
        dir.path().join("pub"),
        dir.path().join("priv"),
        dir.path().join("bad.ct"),
    );
    mcc(&[
        "keygen",
        "--params",
        p(&desk),
        "--out-pub",
        p(&pu),
        "--out-priv",
        p(&pr),
    ]);
    let mut x = 0x9e37_79b9_7f4a_7c15u64;
    let bits = BitVec::from_bools((0..656).map(|_| {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        x & 1 == 1
    }));
    let garbage = mcc_cli::format::encode_ciphertext(&mcc_core::Ciphertext { bits });
    std::fs::write(&bad, garbage).unwrap();
    let o = mcc(&["decrypt", "--priv", p(&pr), "--pub", p(&pu), "--in", p(&bad)]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(String::from_utf8_lossy(&o.stderr).contains("retransmission"));

    let invariant = mcc_cli::CliError::Core(mcc_core::Error::Invariant("x"));
    assert_eq!(invariant.exit_code(), 4);
}

#[test]
fn keyrand_reports() {
    let pu = fixture("worked_example.pub");
    let out = stdout(&mcc(&["analyze", "keyrand", "--pub", p(&pu)]));
    assert_eq!(value(&out, "rank"), "6");
    let params = fixture("desk.params");
    let out = stdout(&mcc(&[
        "analyze",
        "keyrand",
        "--params",
        p(&params),
        "--keys",
        "8",
        "--seed",
        "2",
    ]));
    assert_eq!(value(&out, "full_rank"), "8");
    let ratio: f64 = value(&out, "col_mean_over_k").parse().unwrap();
    assert!((0.45..=0.55).contains(&ratio));
}
