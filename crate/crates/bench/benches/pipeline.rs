use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use pixtone_core::channel::{add_noise, synthesize, ChannelModel};
use pixtone_core::codec::{encode_packet, packets_to_schedule, ModemConfig};
use pixtone_core::display::DisplayConfig;
use pixtone_core::pattern::{generate_square_bitmap, measure_bitmap_frequency, PatternSpec};
use pixtone_core::receiver::{demodulate, measure_snr, tone_energy, DemodConfig};
use std::hint::black_box;

fn bench_bitmap_generation(c: &mut Criterion) {
    let cfg = DisplayConfig::preset("1080p60").unwrap();
    let mut group = c.benchmark_group("bitmap");
    group.throughput(Throughput::Elements(cfg.width as u64 * cfg.height as u64));
    for freq in [1_000.0, 15_000.0] {
        group.bench_with_input(BenchmarkId::new("generate", freq as u64), &freq, |b, &f| {
            let spec = PatternSpec::new(f, 0.5);
            b.iter(|| generate_square_bitmap(black_box(&cfg), black_box(&spec)).unwrap())
        });
    }
    group.bench_function("measure_frequency", |b| {
        let bmp = generate_square_bitmap(&cfg, &PatternSpec::new(15_000.0, 0.5)).unwrap();
        let clock = cfg.nominal_pixel_clock() as f64;
        b.iter(|| measure_bitmap_frequency(black_box(&bmp), clock).unwrap())
    });
    group.finish();
}

fn bench_synthesis(c: &mut Criterion) {
    let modem = ModemConfig::new(vec![3_000.0, 7_800.0], 0.01).unwrap();
    let pkt = encode_packet(0xDEAD_BEEF, None);
    let sched = packets_to_schedule(&[pkt], &modem, 2.0);
    let model = ChannelModel::default();
    let samples = (sched.total_duration() * model.sample_rate as f64) as u64;
    let mut group = c.benchmark_group("channel");
    group.throughput(Throughput::Elements(samples));
    group.bench_function("synthesize_48k", |b| {
        b.iter(|| synthesize(black_box(&sched), black_box(&model)).unwrap())
    });
    group.bench_function("add_noise_48k", |b| {
        let clean = synthesize(&sched, &model).unwrap();
        b.iter(|| add_noise(black_box(&clean), 20.0, 1, &modem.freqs, 1_000.0).unwrap())
    });
    group.finish();
}

fn bench_receiver(c: &mut Criterion) {
    let modem = ModemConfig::new(vec![3_000.0, 7_800.0], 0.01).unwrap();
    let model = ChannelModel {
        sample_rate: 16_000,
        ..ChannelModel::default()
    };
    let pkt = encode_packet(0xC0FF_EE00, None);
    let sched = packets_to_schedule(&[pkt], &modem, 2.0);
    let clean = synthesize(&sched, &model).unwrap();
    let buf = add_noise(&clean, 20.0, 7, &modem.freqs, 500.0).unwrap();
    let cfg = DemodConfig::from_modem(&modem);

    let mut group = c.benchmark_group("receiver");
    group.throughput(Throughput::Elements(buf.samples.len() as u64));
    group.bench_function("tone_energy_window", |b| {
        b.iter(|| tone_energy(black_box(&buf), 3_000.0, 0, buf.samples.len()).unwrap())
    });
    group.bench_function("demodulate_packet", |b| {
        b.iter(|| demodulate(black_box(&buf), black_box(&cfg)).unwrap())
    });
    group.bench_function("measure_snr_fft", |b| {
        b.iter(|| measure_snr(black_box(&buf), &modem.freqs, 500.0))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_bitmap_generation,
    bench_synthesis,
    bench_receiver
);
criterion_main!(benches);
