use statrs::distribution::{ChiSquared, ContinuousCDF};

use heraldsim_core::detect::{
    intensify_frame, sample_events, timeline_stats, DetectionEvent, DetectorParams, EventKind, PixelSampler,
};
use heraldsim_core::experiments::{run_experiment, ExperimentConfig};
use heraldsim_core::rng::stage_rng;

#[test]
fn uniform_sampler_passes_chi_square() {
    let bins = 512;
    let flat = vec![1.0 / bins as f64; bins];
    let sampler = PixelSampler::from_marginals(&flat, &flat);
    let mut rng = stage_rng(2024, 0);
    let n = 100_000;
    let mut hx = vec![0u64; bins];
    let mut hy = vec![0u64; bins];
    for _ in 0..n {
        let (ix, iy) = sampler.sample(&mut rng);
        hx[ix] += 1;
        hy[iy] += 1;
    }
    let expected = n as f64 / bins as f64;
    let dist = ChiSquared::new((bins - 1) as f64).unwrap();
    for h in [hx, hy] {
        let chi2: f64 = h.iter().map(|c| (*c as f64 - expected).powi(2) / expected).sum();
        let p = 1.0 - dist.cdf(chi2);
        assert!((0.001..=0.999).contains(&p), "chi2 {chi2}, p {p}");
    }
}

#[test]
fn sampled_histogram_follows_the_map() {
    let det = DetectorParams::default();
    let map = run_experiment(&ExperimentConfig::default()).unwrap();
    let (px, py) = map.pixel_marginals(&det).unwrap();
    let sampler = PixelSampler::from_marginals(&px, &py);
    let mut rng = stage_rng(5, 0);
    let n = 1_000_000;
    let mut hx = vec![0u64; px.len()];
    let mut hy = vec![0u64; py.len()];
    for _ in 0..n {
        let (ix, iy) = sampler.sample(&mut rng);
        hx[ix] += 1;
        hy[iy] += 1;
    }
    for (h, p) in [(hx, px), (hy, py)] {
        let l1: f64 = h.iter().zip(&p).map(|(c, q)| (*c as f64 / n as f64 - q).abs()).sum();
        assert!(l1 < 0.05, "L1 {l1}");
    }
}

#[test]
fn event_counts_match_rates() {
    let det = DetectorParams {
        cathode_noise_rate: 2e5,
        ..DetectorParams::default()
    };
    let stats = timeline_stats(1e5, &det);
    let map = run_experiment(&ExperimentConfig::default()).unwrap();
    let n = 100_000u64;
    let events = sample_events(&map, &stats, n, &det, 3).unwrap();
    let within = |observed: usize, mean: f64, var: f64| (observed as f64 - mean).abs() <= 3.0 * var.sqrt();
    let p = stats.true_coincidence_prob;
    let signal = events.count(EventKind::Signal);
    assert!(within(signal, p * n as f64, p * (1.0 - p) * n as f64), "{signal}");
    let dark = events.count(EventKind::Dark);
    assert!(within(dark, stats.dark_mean * n as f64, stats.dark_mean * n as f64), "{dark}");
    let cathode = events.count(EventKind::CathodeNoise);
    assert!(
        within(cathode, stats.cathode_mean * n as f64, stats.cathode_mean * n as f64),
        "{cathode}"
    );
    assert!(events.events.iter().all(|e| e.frame_index == 0));
}

#[test]
fn intensifier_gain_has_the_configured_mean() {
    let det = DetectorParams::default();
    let n = 10_000;
    let events: Vec<DetectionEvent> = (0..n)
        .map(|i| DetectionEvent {
            frame_index: 0,
            pixel: (200 + i % 100, 200 + (i / 100) % 100),
            kind: EventKind::Signal,
        })
        .collect();
    let frame = intensify_frame(&events, &det, &mut stage_rng(9, 0));
    let per_event = frame.iter().map(|v| u64::from(*v)).sum::<u64>() as f64 / n as f64;
    let mean = det.gain_mean * det.adu_per_photon;
    // Exponential gain: standard deviation equals the mean.
    let standard_error = mean / (n as f64).sqrt();
    assert!((per_event - mean).abs() <= 3.0 * standard_error, "{per_event} vs {mean}");
}
