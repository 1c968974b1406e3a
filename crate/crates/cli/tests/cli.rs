//! End-to-end runs of the `pixtone` binary through real files, including
//! the exit-code contract: 0 success, 2 usage, 3 no transmission,
//! 4 infeasible plan, 5 decode failure.

use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

fn pixtone(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pixtone"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn gen_writes_fig1_style_pattern() {
    let tmp = TempDir::new().unwrap();
    let out = pixtone(
        tmp.path(),
        &[
            "gen", "--preset", "720p60", "--freq", "1000", "--out", "p.pgm",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("cycle size: 55296 px"));
    let bmp = pixtone_core::pgm::read_pgm_file(tmp.path().join("p.pgm")).unwrap();
    assert_eq!((bmp.width, bmp.height), (1280, 720));
    // 1 kHz on the 55,296,000 Hz clock: 27,648 white pixels then 27,648
    // black, wrapping across rows.
    assert!(bmp.pixels[..27_648].iter().all(|&p| p == 255));
    assert!(bmp.pixels[27_648..55_296].iter().all(|&p| p == 0));
}

#[test]
fn gen_conformance_duty_cycle_pattern() {
    let tmp = TempDir::new().unwrap();
    let out = pixtone(
        tmp.path(),
        &[
            "gen",
            "--preset",
            "1080p60-cea",
            "--freq",
            "15000",
            "--duty",
            "0.25",
            "--effective-clock",
            "--conformance",
            "--out",
            "d.pgm",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("cycle size: 9900 px"));
    let bmp = pixtone_core::pgm::read_pgm_file(tmp.path().join("d.pgm")).unwrap();
    // First quarter of the 9,900 px cycle high. The counter skips blanking
    // pixels at row ends, so check only the first row.
    assert_eq!(bmp.get(0, 0), 255);
    assert_eq!(bmp.get(1919, 0), 255); // still inside the first 2,475 px
}

#[test]
fn gen_rejects_zero_frequency() {
    let tmp = TempDir::new().unwrap();
    let out = pixtone(
        tmp.path(),
        &["gen", "--preset", "720p60", "--freq", "0", "--out", "x.pgm"],
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("frequency"));
}

#[test]
fn tx_rx_loopback_recovers_payload() {
    let tmp = TempDir::new().unwrap();
    let out = pixtone(
        tmp.path(),
        &[
            "--seed",
            "1",
            "tx",
            "--payload",
            "0xDEADBEEF",
            "--f0",
            "3000",
            "--f1",
            "7800",
            "--tb-ms",
            "100",
            "--snr",
            "20",
            "--sample-rate",
            "16000",
            "--wav",
            "tx.wav",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    // 48 bits x 0.1 s plus leading and trailing gaps.
    assert!(stdout(&out).contains("5.200 s"));
    assert!(tmp.path().join("tx.sched").exists());
    assert!(tmp.path().join("tx.wav.manifest").exists());

    let out = pixtone(
        tmp.path(),
        &[
            "rx", "tx.wav", "--f0", "3000", "--f1", "7800", "--tb-ms", "100",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("0xdeadbeef"), "{text}");
    assert!(text.contains("checksum OK"));
}

#[test]
fn tx_zero_length_payload_still_emits_a_packet() {
    let tmp = TempDir::new().unwrap();
    let out = pixtone(
        tmp.path(),
        &[
            "--seed",
            "1",
            "tx",
            "--sample-rate",
            "16000",
            "--wav",
            "z.wav",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = pixtone(tmp.path(), &["rx", "z.wav", "--tb-ms", "100"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("0x00000000"));
}

#[test]
fn rx_pure_noise_exits_3() {
    let tmp = TempDir::new().unwrap();
    // Deterministic pseudo-noise, no carrier structure.
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: 16_000,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut w = hound::WavWriter::create(tmp.path().join("noise.wav"), spec).unwrap();
    let mut state = 0x2545_F491_4F6C_DD1Du64;
    for _ in 0..80_000 {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        w.write_sample((state >> 48) as i16 / 4).unwrap();
    }
    w.finalize().unwrap();
    let out = pixtone(tmp.path(), &["rx", "noise.wav", "--tb-ms", "100"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert!(stderr(&out).contains("no transmission"));
}

#[test]
fn rx_truncated_transmission_exits_5() {
    let tmp = TempDir::new().unwrap();
    pixtone(
        tmp.path(),
        &[
            "--seed",
            "1",
            "tx",
            "--payload",
            "0x12345678",
            "--sample-rate",
            "16000",
            "--snr",
            "20",
            "--wav",
            "full.wav",
        ],
    );
    // Keep the gap, the preamble, and a few payload symbols; the packet
    // can never complete.
    let mut reader = hound::WavReader::open(tmp.path().join("full.wav")).unwrap();
    let spec = reader.spec();
    let samples: Vec<i16> = reader.samples::<i16>().map(|s| s.unwrap()).collect();
    let keep = 3_200 + 13 * 1_600;
    let mut w = hound::WavWriter::create(tmp.path().join("cut.wav"), spec).unwrap();
    for &s in &samples[..keep] {
        w.write_sample(s).unwrap();
    }
    w.finalize().unwrap();
    let out = pixtone(tmp.path(), &["rx", "cut.wav", "--tb-ms", "100"]);
    assert_eq!(code(&out), 5, "{} {}", stdout(&out), stderr(&out));
    assert!(stderr(&out).contains("no packet"));
}

#[test]
fn rx_wrong_carrier_reports_failure_not_success() {
    let tmp = TempDir::new().unwrap();
    let out = pixtone(
        tmp.path(),
        &[
            "--seed",
            "1",
            "tx",
            "--payload",
            "0xDEADBEEF",
            "--sample-rate",
            "16000",
            "--snr",
            "20",
            "--wav",
            "tx.wav",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    // Probing far from the real f1 (7,800 Hz): bit-1 symbols carry no
    // energy at the probe, so the decode cannot succeed. Depending on how
    // the noise scores, this surfaces as decode failure (5) or as no
    // transmission (3); both are failures distinct from success.
    let out = pixtone(
        tmp.path(),
        &["rx", "tx.wav", "--f0", "3000", "--f1", "6500", "--tb-ms", "100"],
    );
    assert_eq!(code(&out), 5, "{} {}", stdout(&out), stderr(&out));
    let out = pixtone(
        tmp.path(),
        &["rx", "tx.wav", "--f0", "3000", "--f1", "5000", "--tb-ms", "100"],
    );
    assert_eq!(code(&out), 3, "{} {}", stdout(&out), stderr(&out));
}

#[test]
fn plan_reports_channels_and_infeasibility() {
    let tmp = TempDir::new().unwrap();
    let out = pixtone(
        tmp.path(),
        &[
            "plan",
            "--channels",
            "2",
            "--band",
            "3000,20000",
            "--delta-f",
            "1000",
            "--symbol-rate",
            "10",
        ],
    );
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(
        text.contains("channel 0: f0 = 3000.0 Hz, f1 = 4000.0 Hz"),
        "{text}"
    );
    assert!(text.contains("channel 1"));

    let out = pixtone(
        tmp.path(),
        &[
            "plan",
            "--channels",
            "9",
            "--band",
            "3000,9000",
            "--delta-f",
            "1000",
            "--symbol-rate",
            "10",
        ],
    );
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("at most"));
}

#[test]
fn tx_outputs_are_byte_reproducible_under_seed() {
    let tmp = TempDir::new().unwrap();
    let run = |wav: &str| {
        pixtone(
            tmp.path(),
            &[
                "--seed",
                "42",
                "tx",
                "--payload",
                "0xCAFEF00D",
                "--snr",
                "15",
                "--sample-rate",
                "16000",
                "--wav",
                wav,
            ],
        )
    };
    assert_eq!(code(&run("a.wav")), 0);
    assert_eq!(code(&run("b.wav")), 0);
    let a = std::fs::read(tmp.path().join("a.wav")).unwrap();
    let b = std::fs::read(tmp.path().join("b.wav")).unwrap();
    assert_eq!(a, b, "same seed must give identical bytes");

    let out = Command::new(env!("CARGO_BIN_EXE_pixtone"))
        .current_dir(tmp.path())
        .args([
            "--seed",
            "43",
            "tx",
            "--payload",
            "0xCAFEF00D",
            "--snr",
            "15",
            "--sample-rate",
            "16000",
            "--wav",
            "c.wav",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let c = std::fs::read(tmp.path().join("c.wav")).unwrap();
    assert_ne!(a, c, "different seed must change the noise");
}

#[test]
fn two_strip_concurrent_transmission_decodes_both_streams() {
    let tmp = TempDir::new().unwrap();
    let out = pixtone(
        tmp.path(),
        &[
            "--seed",
            "2",
            "tx",
            "--strips",
            "2",
            "--payload",
            "0x11112222",
            "--payload",
            "0x33334444",
            "--freqs",
            "3000,7800,5100,11300",
            "--tb-ms",
            "50",
            "--snr",
            "20",
            "--wav",
            "dual.wav",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rx_a = pixtone(
        tmp.path(),
        &[
            "rx", "dual.wav", "--f0", "3000", "--f1", "7800", "--tb-ms", "50",
        ],
    );
    assert_eq!(code(&rx_a), 0, "{}", stderr(&rx_a));
    assert!(stdout(&rx_a).contains("0x11112222"));
    let rx_b = pixtone(
        tmp.path(),
        &[
            "rx", "dual.wav", "--f0", "5100", "--f1", "11300", "--tb-ms", "50",
        ],
    );
    assert_eq!(code(&rx_b), 0, "{}", stderr(&rx_b));
    assert!(stdout(&rx_b).contains("0x33334444"));
}

#[test]
fn config_file_preamble_applies_to_both_ends() {
    let tmp = TempDir::new().unwrap();
    std::fs::write(tmp.path().join("mod.conf"), "preamble = 0b11001100\n").unwrap();
    let out = pixtone(
        tmp.path(),
        &[
            "--config",
            "mod.conf",
            "--seed",
            "3",
            "tx",
            "--payload",
            "0x0F0F0F0F",
            "--snr",
            "20",
            "--sample-rate",
            "16000",
            "--wav",
            "alt.wav",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    // Default preamble cannot validate these packets.
    let wrong = pixtone(tmp.path(), &["rx", "alt.wav", "--tb-ms", "100"]);
    assert_ne!(code(&wrong), 0);
    let right = pixtone(
        tmp.path(),
        &["--config", "mod.conf", "rx", "alt.wav", "--tb-ms", "100"],
    );
    assert_eq!(code(&right), 0, "{}", stderr(&right));
    assert!(stdout(&right).contains("0x0f0f0f0f"));
}

#[test]
fn analyze_rates_emits_reference_rows() {
    let tmp = TempDir::new().unwrap();
    let out = pixtone(
        tmp.path(),
        &["--seed", "9", "analyze", "--sweep", "rates", "--out", "an"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = std::fs::read_to_string(tmp.path().join("an/rates.csv")).unwrap();
    assert!(csv.contains("0.1,8,10,3.3333"), "{csv}");
    assert!(csv.contains("1,16,1,0.2500"));
    let agg = std::fs::read_to_string(tmp.path().join("an/aggregate_rates.csv")).unwrap();
    assert!(agg.contains("0.1,4,40"));
}

#[test]
fn analyze_distance_tracks_fit_and_is_seeded() {
    let tmp = TempDir::new().unwrap();
    let out = pixtone(
        tmp.path(),
        &[
            "--seed",
            "5",
            "analyze",
            "--sweep",
            "distance",
            "--distances",
            "0.5,2.0,5.0",
            "--out",
            "an",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = std::fs::read_to_string(tmp.path().join("an/distance_sweep.csv")).unwrap();
    assert!(csv.starts_with("# seed=5"));
    for line in csv.lines().skip(2) {
        let cols: Vec<&str> = line.split(',').collect();
        let fitted: f64 = cols[1].parse().unwrap();
        let measured: f64 = cols[3].parse().unwrap();
        assert!((fitted - measured).abs() < 0.5, "{line}");
    }
}

#[test]
fn analyze_empty_grid_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let out = pixtone(
        tmp.path(),
        &["analyze", "--sweep", "ber", "--runs", "0", "--out", "an"],
    );
    assert_eq!(code(&out), 2);
}
