//! Photon counting: herald trigger statistics, single-photon events on the
//! gated camera, the intensifier response and frame accumulation.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Geometric, Poisson};

use crate::error::{Error, Result};
use crate::experiments::ProbabilityMap;
use crate::rng::stage_rng;

const MAX_PHOTONS_PER_PIXEL: f64 = 0.1;
const MAX_SUGGESTED_FRAMES: usize = 100_000;
const PSF_SPAN: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorParams {
    pub spad_qe: f64,
    /// Herald detector dark counts per second.
    pub spad_dark_rate: f64,
    /// Probability that a pair photon is routed to a given arm.
    pub bs_split: f64,
    /// Camera coincidence gate in seconds.
    pub gate: f64,
    /// Trigger pulse width in seconds (informational).
    pub ttl_width: f64,
    pub camera_qe: f64,
    /// Photocathode emission per second while the gate is open.
    pub cathode_noise_rate: f64,
    /// Intensifier spot standard deviation in pixels.
    pub psf_sigma: f64,
    /// `(width, height)`.
    pub pixels: (usize, usize),
    /// Camera-plane pixel side in meters.
    pub pixel_pitch: f64,
    /// Mean of the exponential intensifier gain, in photon units.
    pub gain_mean: f64,
    /// Readout counts for a unit-gain photon.
    pub adu_per_photon: f64,
}

impl Default for DetectorParams {
    fn default() -> Self {
        Self {
            spad_qe: 0.65,
            spad_dark_rate: 100.0,
            bs_split: 0.5,
            gate: 5e-9,
            ttl_width: 15e-9,
            camera_qe: 0.2,
            cathode_noise_rate: 50.0,
            psf_sigma: 1.5,
            pixels: (512, 512),
            pixel_pitch: 31.25e-6,
            gain_mean: 1.0,
            adu_per_photon: 100.0,
        }
    }
}

fn probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::NotAProbability { name, value })
    }
}

fn nonnegative(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}

impl DetectorParams {
    pub fn validate(&self) -> Result<()> {
        probability("spad_qe", self.spad_qe)?;
        probability("bs_split", self.bs_split)?;
        probability("camera_qe", self.camera_qe)?;
        nonnegative("spad_dark_rate", self.spad_dark_rate)?;
        nonnegative("cathode_noise_rate", self.cathode_noise_rate)?;
        nonnegative("ttl_width", self.ttl_width)?;
        nonnegative("psf_sigma", self.psf_sigma)?;
        positive("gate", self.gate)?;
        positive("pixel_pitch", self.pixel_pitch)?;
        positive("gain_mean", self.gain_mean)?;
        positive("adu_per_photon", self.adu_per_photon)?;
        if self.pixels.0 == 0 || self.pixels.1 == 0 {
            return Err(Error::BadSampleCount { n: 0 });
        }
        Ok(())
    }

    pub fn pixel_count(&self) -> usize {
        self.pixels.0 * self.pixels.1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriggerStats {
    /// Herald clicks (true and dark) per second.
    pub trigger_rate: f64,
    /// Probability that a trigger carries a detected partner photon.
    pub true_coincidence_prob: f64,
    /// Probability of an uncorrelated camera event inside the gate.
    pub accidental_prob: f64,
    pub blank_fraction: f64,
    /// Poisson means per gate of the two noise sources.
    pub dark_mean: f64,
    pub cathode_mean: f64,
}

/// Rates for a source emitting `pair_rate` pairs per second.
pub fn timeline_stats(pair_rate: f64, params: &DetectorParams) -> TriggerStats {
    let pair_rate = pair_rate.max(0.0);
    let heralds = pair_rate * params.bs_split * params.spad_qe;
    let trigger_rate = heralds + params.spad_dark_rate;
    let true_coincidence_prob = if trigger_rate > 0.0 {
        heralds / trigger_rate * params.camera_qe * params.bs_split
    } else {
        0.0
    };
    let dark_mean = params.gate * pair_rate * params.bs_split * params.camera_qe;
    let cathode_mean = params.gate * params.cathode_noise_rate;
    let accidental_prob = (dark_mean + cathode_mean).min(1.0 - true_coincidence_prob);
    TriggerStats {
        trigger_rate,
        true_coincidence_prob,
        accidental_prob,
        blank_fraction: 1.0 - true_coincidence_prob - accidental_prob,
        dark_mean,
        cathode_mean,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    /// The heralded partner photon.
    Signal,
    /// An uncorrelated down-converted photon inside the gate.
    Dark,
    /// Photocathode emission.
    CathodeNoise,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::Signal => "signal",
            EventKind::Dark => "dark",
            EventKind::CathodeNoise => "cathode",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectionEvent {
    pub frame_index: usize,
    /// `(ix, iy)`.
    pub pixel: (usize, usize),
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventStream {
    pub events: Vec<DetectionEvent>,
    pub n_triggers: u64,
}

impl EventStream {
    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }
}

/// Inverse-CDF sampler over the detector pixels.
#[derive(Debug, Clone)]
pub struct PixelSampler {
    cdf_x: Vec<f64>,
    cdf_y: Vec<f64>,
}

fn cumulative(p: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = p
        .iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect();
    // Close the last occupied pixel (and any empty ones after it) so that
    // rounding in the total can never select an empty trailing pixel.
    if let Some(last) = p.iter().rposition(|v| *v > 0.0) {
        cdf[last..].iter_mut().for_each(|c| *c = f64::INFINITY);
    }
    cdf
}

fn draw(cdf: &[f64], u: f64) -> usize {
    cdf.partition_point(|c| *c <= u).min(cdf.len() - 1)
}

impl PixelSampler {
    pub fn new(map: &ProbabilityMap, params: &DetectorParams) -> Result<Self> {
        let (px, py) = map.pixel_marginals(params)?;
        Ok(Self::from_marginals(&px, &py))
    }

    /// Marginals must each sum to one.
    pub fn from_marginals(px: &[f64], py: &[f64]) -> Self {
        Self {
            cdf_x: cumulative(px),
            cdf_y: cumulative(py),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize) {
        let ix = draw(&self.cdf_x, rng.random::<f64>());
        let iy = draw(&self.cdf_y, rng.random::<f64>());
        (ix, iy)
    }
}

fn uniform_pixel<R: Rng + ?Sized>(rng: &mut R, params: &DetectorParams) -> (usize, usize) {
    (
        rng.random_range(0..params.pixels.0),
        rng.random_range(0..params.pixels.1),
    )
}

fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    match Poisson::new(mean) {
        Ok(d) => d.sample(rng) as u64,
        Err(_) => 0,
    }
}

fn push_noise<R: Rng + ?Sized>(
    rng: &mut R,
    events: &mut Vec<DetectionEvent>,
    frame_index: usize,
    kind: EventKind,
    count: u64,
    params: &DetectorParams,
) {
    for _ in 0..count {
        events.push(DetectionEvent {
            frame_index,
            pixel: uniform_pixel(rng, params),
            kind,
        });
    }
}

/// Simulates `n_triggers` gates: each carries at most one Signal photon,
/// plus Poisson Dark and CathodeNoise events spread uniformly over the
/// sensor. All events go to frame 0.
pub fn sample_events(
    map: &ProbabilityMap,
    stats: &TriggerStats,
    n_triggers: u64,
    params: &DetectorParams,
    seed: u64,
) -> Result<EventStream> {
    params.validate()?;
    let sampler = PixelSampler::new(map, params)?;
    let mut rng = stage_rng(seed, 0);
    let mut events = Vec::new();
    for _ in 0..n_triggers {
        if rng.random::<f64>() < stats.true_coincidence_prob {
            events.push(DetectionEvent {
                frame_index: 0,
                pixel: sampler.sample(&mut rng),
                kind: EventKind::Signal,
            });
        }
        let dark = poisson(&mut rng, stats.dark_mean);
        push_noise(&mut rng, &mut events, 0, EventKind::Dark, dark, params);
        let cathode = poisson(&mut rng, stats.cathode_mean);
        push_noise(&mut rng, &mut events, 0, EventKind::CathodeNoise, cathode, params);
    }
    Ok(EventStream { events, n_triggers })
}

/// Runs triggers until `budget` Signal photons have been recorded. The
/// number of triggers between photons is geometric, and the noise collected
/// over all those gates is Poisson with the summed mean.
pub fn sample_frame(
    sampler: &PixelSampler,
    stats: &TriggerStats,
    budget: u64,
    params: &DetectorParams,
    rng: &mut ChaCha8Rng,
    frame_index: usize,
) -> Result<EventStream> {
    let p = stats.true_coincidence_prob;
    if budget > 0 && !(p > 0.0) {
        return Err(Error::NoSignal(p));
    }
    let mut events = Vec::with_capacity(budget as usize);
    let mut n_triggers = 0u64;
    if budget > 0 {
        let gaps = Geometric::new(p).map_err(|_| Error::NoSignal(p))?;
        for _ in 0..budget {
            n_triggers += gaps.sample(rng) + 1;
            events.push(DetectionEvent {
                frame_index,
                pixel: sampler.sample(rng),
                kind: EventKind::Signal,
            });
        }
    }
    let gates = n_triggers as f64;
    let dark = poisson(rng, stats.dark_mean * gates);
    push_noise(rng, &mut events, frame_index, EventKind::Dark, dark, params);
    let cathode = poisson(rng, stats.cathode_mean * gates);
    push_noise(rng, &mut events, frame_index, EventKind::CathodeNoise, cathode, params);
    Ok(EventStream { events, n_triggers })
}

/// Per-frame count grids (row-major, `height` rows of `width`) and their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameStack {
    pub width: usize,
    pub height: usize,
    pub frames: Vec<Vec<u32>>,
    pub cumulative: Vec<u64>,
    /// Signal photons per frame.
    pub budgets: Vec<u64>,
}

impl FrameStack {
    /// Assembles frames in order and sums them.
    pub fn from_frames(width: usize, height: usize, frames: Vec<Vec<u32>>, budgets: Vec<u64>) -> Self {
        let mut cumulative = alloc::vec![0u64; width * height];
        for frame in &frames {
            for (c, v) in cumulative.iter_mut().zip(frame) {
                *c += u64::from(*v);
            }
        }
        Self {
            width,
            height,
            frames,
            cumulative,
            budgets,
        }
    }
}

/// Integral of a unit Gaussian (std `sigma`, centred on pixel centre 0) over
/// the pixel at offset `k`.
fn pixel_weight(k: i64, sigma: f64) -> f64 {
    let s = sigma * core::f64::consts::SQRT_2;
    0.5 * (libm::erf((k as f64 + 0.5) / s) - libm::erf((k as f64 - 0.5) / s))
}

fn psf_kernel(sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return alloc::vec![1.0];
    }
    let r = (PSF_SPAN * sigma).ceil() as i64;
    let w: Vec<f64> = (-r..=r).map(|k| pixel_weight(k, sigma)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|v| v / total).collect()
}

/// Adds one intensified event to `frame`: exponential gain, separable pixel
/// integrated Gaussian spot, stochastic rounding to integer counts.
fn deposit(
    frame: &mut [u32],
    event: &DetectionEvent,
    kernel: &[f64],
    params: &DetectorParams,
    rng: &mut ChaCha8Rng,
) {
    let gain: f64 = Exp1.sample(rng);
    let amplitude = gain * params.gain_mean * params.adu_per_photon;
    let r = (kernel.len() / 2) as i64;
    let (w, h) = (params.pixels.0 as i64, params.pixels.1 as i64);
    let (ex, ey) = (event.pixel.0 as i64, event.pixel.1 as i64);
    for (dy, ky) in kernel.iter().enumerate() {
        let y = ey + dy as i64 - r;
        if y < 0 || y >= h {
            continue;
        }
        for (dx, kx) in kernel.iter().enumerate() {
            let x = ex + dx as i64 - r;
            if x < 0 || x >= w {
                continue;
            }
            let value = amplitude * kx * ky;
            let base = value.floor();
            let extra = u32::from(rng.random::<f64>() < value - base);
            let slot = &mut frame[(y * w + x) as usize];
            *slot = slot.saturating_add(base as u32).saturating_add(extra);
        }
    }
}

/// Renders the events of one frame with its own generator.
pub fn intensify_frame(events: &[DetectionEvent], params: &DetectorParams, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let kernel = psf_kernel(params.psf_sigma);
    let mut frame = alloc::vec![0u32; params.pixel_count()];
    for e in events {
        deposit(&mut frame, e, &kernel, params, rng);
    }
    frame
}

/// Intensifier response for a frame-indexed stream. Frame `k` draws from
/// child generator `k` of `seed`.
pub fn intensify(events: &EventStream, n_frames: usize, params: &DetectorParams, seed: u64) -> FrameStack {
    let mut by_frame: Vec<Vec<DetectionEvent>> = alloc::vec![Vec::new(); n_frames];
    let mut budgets = alloc::vec![0u64; n_frames];
    for e in events.events.iter().filter(|e| e.frame_index < n_frames) {
        by_frame[e.frame_index].push(*e);
        if e.kind == EventKind::Signal {
            budgets[e.frame_index] += 1;
        }
    }
    let frames = by_frame
        .iter()
        .enumerate()
        .map(|(k, ev)| intensify_frame(ev, params, &mut stage_rng(seed, k as u64)))
        .collect();
    FrameStack::from_frames(params.pixels.0, params.pixels.1, frames, budgets)
}

/// One complete video frame: events for `budget` signal photons, then the
/// intensifier. Depends only on `(seed, frame_index)`, so frames can be
/// produced in any order.
pub fn render_frame(
    sampler: &PixelSampler,
    stats: &TriggerStats,
    budget: u64,
    params: &DetectorParams,
    seed: u64,
    frame_index: usize,
) -> Result<Vec<u32>> {
    let mut rng = stage_rng(seed, frame_index as u64);
    let events = sample_frame(sampler, stats, budget, params, &mut rng, frame_index)?;
    Ok(intensify_frame(&events.events, params, &mut rng))
}

/// Serial video: one rendered frame per budget.
pub fn simulate_video(
    map: &ProbabilityMap,
    stats: &TriggerStats,
    budgets: &[u64],
    params: &DetectorParams,
    seed: u64,
) -> Result<FrameStack> {
    params.validate()?;
    let sampler = PixelSampler::new(map, params)?;
    let frames = budgets
        .iter()
        .enumerate()
        .map(|(k, b)| render_frame(&sampler, stats, *b, params, seed, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(FrameStack::from_frames(
        params.pixels.0,
        params.pixels.1,
        frames,
        budgets.to_vec(),
    ))
}

fn geometric_budgets(total: u64, n_frames: usize, ratio: f64) -> Vec<u64> {
    if n_frames == 1 {
        return alloc::vec![total];
    }
    let weights: Vec<f64> = (0..n_frames).map(|k| ratio.powi(k as i32)).collect();
    let sum: f64 = weights.iter().sum();
    let mut budgets: Vec<u64> = weights
        .iter()
        .map(|w| (total as f64 * w / sum + 1e-9).floor() as u64)
        .collect();
    let assigned: u64 = budgets.iter().sum();
    let last = budgets.len() - 1;
    budgets[last] += total.saturating_sub(assigned);
    budgets
}

fn peak_density(budgets: &[u64], n_pixels: usize) -> f64 {
    budgets.iter().copied().max().unwrap_or(0) as f64 / n_pixels as f64
}

/// Per-frame photon budgets growing by `ratio` per frame, summing exactly to
/// `total_photons` (rounding remainder in the last frame). Every frame must
/// stay below 0.1 photons per pixel on a sensor of `n_pixels`.
pub fn plan_video_ramp(total_photons: u64, n_frames: usize, ratio: f64, n_pixels: usize) -> Result<Vec<u64>> {
    if n_frames == 0 {
        return Err(Error::NoFrames);
    }
    if n_pixels == 0 {
        return Err(Error::BadSampleCount { n: 0 });
    }
    if n_frames > 1 && !(ratio > 1.0 && ratio.is_finite()) {
        return Err(Error::BadRampRatio(ratio));
    }
    let budgets = geometric_budgets(total_photons, n_frames, ratio);
    let per_pixel = peak_density(&budgets, n_pixels);
    if per_pixel < MAX_PHOTONS_PER_PIXEL {
        return Ok(budgets);
    }
    // With growth r the last frame never carries less than (r - 1) / r of
    // the total, whatever the frame count.
    let reachable = ratio > 1.0
        && ratio.is_finite()
        && total_photons as f64 * (ratio - 1.0) / ratio / (n_pixels as f64) < MAX_PHOTONS_PER_PIXEL;
    let suggested_frames = reachable
        .then(|| {
            (n_frames + 1..=MAX_SUGGESTED_FRAMES).find(|&n| {
                peak_density(&geometric_budgets(total_photons, n, ratio), n_pixels) < MAX_PHOTONS_PER_PIXEL
            })
        })
        .flatten();
    Err(Error::PhotonDensity {
        per_pixel,
        suggested_frames,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::Profile;
    use crate::experiments::{Fiber, MapMetadata, Mode};

    fn flat_map(params: &DetectorParams) -> ProbabilityMap {
        let nx = params.pixels.0;
        let ny = params.pixels.1;
        let pitch = params.pixel_pitch;
        let profile = |n: usize| {
            Profile::new(-(n as f64) * pitch / 2.0 + pitch / 2.0, pitch, alloc::vec![1.0; n])
                .unwrap()
                .normalized()
                .unwrap()
        };
        ProbabilityMap {
            x: profile(nx),
            y: profile(ny),
            meta: MapMetadata {
                mode: Mode::HeraldedImage,
                fiber: Fiber::SingleMode,
                herald_probability_x: 1.0,
                herald_probability_y: 1.0,
                herald_probability: 1.0,
                transmission: 1.0,
            },
        }
    }

    #[test]
    fn trigger_rate_examples() {
        let d = DetectorParams::default();
        let s = timeline_stats(1e5, &d);
        assert_eq!(s.trigger_rate, 32_600.0);
        let expected = 32_500.0 / 32_600.0 * 0.2 * 0.5;
        assert!((s.true_coincidence_prob - expected).abs() < 1e-15);
        assert!((s.blank_fraction - (1.0 - s.true_coincidence_prob - s.accidental_prob)).abs() < 1e-12);

        let dark = timeline_stats(0.0, &d);
        assert_eq!(dark.trigger_rate, 100.0);
        assert_eq!(dark.true_coincidence_prob, 0.0);

        let short = DetectorParams { gate: 1e-15, ..d };
        assert!(timeline_stats(1e5, &short).accidental_prob < 1e-9);
    }

    #[test]
    fn validation() {
        assert_eq!(DetectorParams::default().validate(), Ok(()));
        let bad = DetectorParams {
            spad_qe: 1.2,
            ..DetectorParams::default()
        };
        assert!(matches!(bad.validate(), Err(Error::NotAProbability { .. })));
        let bad = DetectorParams {
            gate: 0.0,
            ..DetectorParams::default()
        };
        assert!(matches!(bad.validate(), Err(Error::NonPositive { .. })));
    }

    #[test]
    fn hot_pixel_collects_every_signal() {
        let mut px = alloc::vec![0.0; 64];
        px[17] = 1.0;
        let mut py = alloc::vec![0.0; 32];
        py[30] = 1.0;
        let sampler = PixelSampler::from_marginals(&px, &py);
        let mut rng = stage_rng(3, 0);
        for _ in 0..1000 {
            assert_eq!(sampler.sample(&mut rng), (17, 30));
        }
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let d = DetectorParams {
            pixels: (64, 64),
            ..DetectorParams::default()
        };
        let map = flat_map(&d);
        let s = timeline_stats(1e5, &d);
        let a = sample_events(&map, &s, 5000, &d, 11).unwrap();
        let b = sample_events(&map, &s, 5000, &d, 11).unwrap();
        let c = sample_events(&map, &s, 5000, &d, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn blob_centroid_and_zero_frames() {
        let d = DetectorParams {
            pixels: (64, 64),
            ..DetectorParams::default()
        };
        let stream = EventStream {
            events: alloc::vec![DetectionEvent {
                frame_index: 0,
                pixel: (31, 20),
                kind: EventKind::Signal,
            }],
            n_triggers: 1,
        };
        let stack = intensify(&stream, 1, &d, 5);
        let f = &stack.frames[0];
        let total: f64 = f.iter().map(|v| f64::from(*v)).sum();
        assert!(total > 0.0);
        let (mut cx, mut cy) = (0.0, 0.0);
        for (i, v) in f.iter().enumerate() {
            cx += (i % 64) as f64 * f64::from(*v);
            cy += (i / 64) as f64 * f64::from(*v);
        }
        assert!((cx / total - 31.0).abs() < 0.5);
        assert!((cy / total - 20.0).abs() < 0.5);

        let empty = intensify(&EventStream::default(), 3, &d, 5);
        assert!(empty.frames.iter().all(|f| f.iter().all(|v| *v == 0)));
        assert!(empty.cumulative.iter().all(|v| *v == 0));
    }

    #[test]
    fn ramp_examples() {
        assert_eq!(plan_video_ramp(1000, 1, 7.0, 512 * 512).unwrap(), alloc::vec![1000]);
        assert_eq!(plan_video_ramp(700, 3, 2.0, 512 * 512).unwrap(), alloc::vec![100, 200, 400]);
        let b = plan_video_ramp(1_000_000, 60, 1.15, 4096 * 4096).unwrap();
        assert_eq!(b.len(), 60);
        assert_eq!(b.iter().sum::<u64>(), 1_000_000);
        assert!(b.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn ramp_density_bound() {
        // At ratio 1.15 the final frame alone carries > 13 % of the photons.
        match plan_video_ramp(1_000_000, 60, 1.15, 512 * 512) {
            Err(Error::PhotonDensity {
                per_pixel,
                suggested_frames,
            }) => {
                assert!(per_pixel >= 0.1);
                assert_eq!(suggested_frames, None);
            }
            other => panic!("{other:?}"),
        }
        match plan_video_ramp(1_000_000, 5, 1.015, 512 * 512) {
            Err(Error::PhotonDensity {
                suggested_frames: Some(n),
                ..
            }) => {
                assert!(n > 5);
                let ok = plan_video_ramp(1_000_000, n, 1.015, 512 * 512).unwrap();
                assert_eq!(ok.iter().sum::<u64>(), 1_000_000);
                assert!(plan_video_ramp(1_000_000, n - 1, 1.015, 512 * 512).is_err());
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(plan_video_ramp(10, 0, 2.0, 100), Err(Error::NoFrames));
        assert_eq!(plan_video_ramp(10, 3, 1.0, 100), Err(Error::BadRampRatio(1.0)));
    }

    #[test]
    fn frame_budget_is_met() {
        let d = DetectorParams {
            pixels: (32, 32),
            ..DetectorParams::default()
        };
        let map = flat_map(&d);
        let s = timeline_stats(1e5, &d);
        let sampler = PixelSampler::new(&map, &d).unwrap();
        let ev = sample_frame(&sampler, &s, 250, &d, &mut stage_rng(1, 4), 4).unwrap();
        assert_eq!(ev.count(EventKind::Signal), 250);
        assert!(ev.n_triggers >= 250);
        assert!(ev.events.iter().all(|e| e.frame_index == 4));
        let none = timeline_stats(0.0, &d);
        assert_eq!(
            sample_frame(&sampler, &none, 1, &d, &mut stage_rng(1, 4), 0),
            Err(Error::NoSignal(0.0))
        );
    }
}
