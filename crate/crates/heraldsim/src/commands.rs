//! The `run`, `video` and `analyze` commands.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use heraldsim_core::analysis::{self, cross_section, Direction, Profile};
use heraldsim_core::detect::{
    plan_video_ramp, render_frame, sample_events, timeline_stats, EventKind, FrameStack, PixelSampler,
};
use heraldsim_core::experiments::{central_visibility, run_experiment, theory_fringe_period, ProbabilityMap};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io;

type Summary = Vec<(String, String)>;

fn push(summary: &mut Summary, key: &str, value: impl ToString) {
    summary.push((key.to_string(), value.to_string()));
}

fn describe_profile(summary: &mut Summary, prefix: &str, profile: &Profile) {
    match analysis::fringe_period(profile) {
        Ok(p) => push(summary, &format!("{prefix}fringe_period_m"), p),
        Err(_) => push(summary, &format!("{prefix}fringe_period_m"), "none"),
    }
    if let Ok(w) = analysis::rms_width(profile) {
        push(summary, &format!("{prefix}rms_width_m"), w);
    }
    if let Ok(bands) = analysis::bands(profile, 0.5) {
        push(summary, &format!("{prefix}band_count"), bands.len());
        for (i, b) in bands.iter().enumerate() {
            push(summary, &format!("{prefix}band_{i}_centre_m"), b.centre);
            push(summary, &format!("{prefix}band_{i}_width_m"), b.width());
        }
    }
}

fn map_summary(cfg: &RunConfig, map: &ProbabilityMap) -> Summary {
    let exp = cfg.experiment();
    let mut s = Summary::new();
    push(&mut s, "mode", exp.mode.name());
    push(&mut s, "fiber_modes", exp.fiber.mode_count());
    push(&mut s, "herald_probability", map.meta.herald_probability);
    push(&mut s, "herald_probability_x", map.meta.herald_probability_x);
    push(&mut s, "herald_probability_y", map.meta.herald_probability_y);
    push(&mut s, "transmission", map.meta.transmission);
    if exp.mode.is_diffraction() {
        let theory = theory_fringe_period(exp.f_fourier, exp.source.signal_wavelength, exp.slit.separation);
        push(&mut s, "theory_fringe_period_m", theory);
        if let Ok(v) = central_visibility(&exp, &map.x) {
            push(&mut s, "visibility", v);
        }
    }
    describe_profile(&mut s, "x_", &map.x);
    if let Ok(w) = analysis::rms_width(&map.y) {
        push(&mut s, "y_rms_width_m", w);
    }
    s
}

/// Probability map, pixel marginals, a sampled event stream and a summary.
pub fn cmd_run(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let exp = cfg.experiment();
    let map = run_experiment(&exp)?;
    let det = cfg.detector();
    let out = PathBuf::from(&cfg.out_dir);
    io::ensure_dir(&out)?;
    io::write_profile(&out.join("x_profile.csv"), &map.x)?;
    io::write_profile(&out.join("y_profile.csv"), &map.y)?;
    let (px, py) = map.pixel_marginals(&det)?;
    io::write_pixel_marginal(&out.join("map_x.csv"), det.pixel_pitch, &px)?;
    io::write_pixel_marginal(&out.join("map_y.csv"), det.pixel_pitch, &py)?;

    let stats = timeline_stats(cfg.pair_rate_hz, &det);
    let events = sample_events(&map, &stats, cfg.n_triggers, &det, cfg.seed)?;
    io::write_events(&out.join("events.csv"), &events)?;

    let mut s = map_summary(cfg, &map);
    push(&mut s, "trigger_rate_hz", stats.trigger_rate);
    push(&mut s, "true_coincidence_prob", stats.true_coincidence_prob);
    push(&mut s, "accidental_prob", stats.accidental_prob);
    push(&mut s, "blank_fraction", stats.blank_fraction);
    push(&mut s, "n_triggers", cfg.n_triggers);
    push(&mut s, "signal_events", events.count(EventKind::Signal));
    push(&mut s, "dark_events", events.count(EventKind::Dark));
    push(&mut s, "cathode_events", events.count(EventKind::CathodeNoise));
    push(&mut s, "seed", cfg.seed);
    io::write_summary(&out.join("summary.txt"), &s)?;
    Ok(out)
}

/// Renders every frame of the exponential ramp. Frames are computed in
/// parallel; each depends only on its index and the master seed.
pub fn render_video(cfg: &RunConfig) -> Result<FrameStack, CliError> {
    let exp = cfg.experiment();
    let det = cfg.detector();
    let budgets = plan_video_ramp(
        cfg.video_photons,
        cfg.video_frames,
        cfg.video_ramp_ratio,
        det.pixel_count(),
    )?;
    let map = run_experiment(&exp)?;
    let stats = timeline_stats(cfg.pair_rate_hz, &det);
    let sampler = PixelSampler::new(&map, &det)?;
    let frames = budgets
        .par_iter()
        .enumerate()
        .map(|(k, b)| render_frame(&sampler, &stats, *b, &det, cfg.seed, k))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FrameStack::from_frames(det.pixels.0, det.pixels.1, frames, budgets))
}

/// Per-frame and running-sum PGM sequences, the final sum, and the budgets.
pub fn cmd_video(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let stack = render_video(cfg)?;
    let out = PathBuf::from(&cfg.out_dir);
    let frames_dir = out.join("frames");
    let cumulative_dir = out.join("cumulative");
    io::ensure_dir(&frames_dir)?;
    io::ensure_dir(&cumulative_dir)?;
    let digits = stack.frames.len().to_string().len().max(4);
    let mut running = vec![0u64; stack.width * stack.height];
    for (k, frame) in stack.frames.iter().enumerate() {
        io::write_pgm(
            &frames_dir.join(format!("frame_{k:0digits$}.pgm")),
            stack.width,
            stack.height,
            frame,
        )?;
        for (r, v) in running.iter_mut().zip(frame) {
            *r += u64::from(*v);
        }
        io::write_pgm(
            &cumulative_dir.join(format!("cumulative_{k:0digits$}.pgm")),
            stack.width,
            stack.height,
            &running,
        )?;
    }
    io::write_pgm(&out.join("cumulative.pgm"), stack.width, stack.height, &stack.cumulative)?;
    io::write_budgets(&out.join("budgets.csv"), &stack.budgets)?;
    let pixels = (stack.width * stack.height) as f64;
    let mut s = Summary::new();
    push(&mut s, "mode", cfg.mode.name());
    push(&mut s, "frames", stack.frames.len());
    push(&mut s, "photons", stack.budgets.iter().sum::<u64>());
    push(
        &mut s,
        "max_photons_per_pixel",
        stack.budgets.iter().copied().max().unwrap_or(0) as f64 / pixels,
    );
    push(&mut s, "seed", cfg.seed);
    io::write_summary(&out.join("summary.txt"), &s)?;
    Ok(out)
}

/// Summary of a profile CSV or a PGM frame (column sums over all rows for x,
/// row sums for y).
pub fn cmd_analyze(cfg: &RunConfig, path: &Path) -> Result<Summary, CliError> {
    let is_pgm = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    let mut s = Summary::new();
    if is_pgm {
        let image = io::read_pgm(path)?.to_image(cfg.pixel_pitch_um * 1e-6);
        let x = cross_section(&image, Direction::X, (0, image.height))?;
        let y = cross_section(&image, Direction::Y, (0, image.width))?;
        push(&mut s, "width_px", image.width);
        push(&mut s, "height_px", image.height);
        push(&mut s, "total_counts", image.data.iter().sum::<f64>());
        describe_profile(&mut s, "x_", &x);
        if let Ok(w) = analysis::rms_width(&y) {
            push(&mut s, "y_rms_width_m", w);
        }
    } else {
        let p = io::read_profile(path)?;
        push(&mut s, "samples", p.len());
        push(&mut s, "pitch_m", p.pitch());
        if let Ok(v) = analysis::visibility(&p, 0.3) {
            push(&mut s, "visibility", v);
        }
        describe_profile(&mut s, "", &p);
    }
    Ok(s)
}
