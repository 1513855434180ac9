use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use heraldsim::io::read_pgm;
use heraldsim_core::analysis::{bands, cross_section, Direction};

fn heraldsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heraldsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn summary(path: &Path) -> Vec<(String, String)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| {
            let (k, v) = l.split_once(" = ").expect("key = value");
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn value(summary: &[(String, String)], key: &str) -> String {
    summary
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.clone())
        .unwrap_or_else(|| panic!("{key} missing"))
}

#[test]
fn config_reference_lists_keys() {
    let out = heraldsim(&["config-reference"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("slit_sep_um") && text.contains("[apparatus value]"));
}

#[test]
fn run_writes_maps_events_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n_triggers = 20000\n");
    let out_dir = dir.path().join("out");
    let out = heraldsim(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap(), "--seed", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["x_profile.csv", "y_profile.csv", "map_x.csv", "map_y.csv", "events.csv", "summary.txt"] {
        assert!(out_dir.join(name).is_file(), "{name}");
    }
    let s = summary(&out_dir.join("summary.txt"));
    assert_eq!(value(&s, "seed"), "4");
    assert_eq!(value(&s, "trigger_rate_hz"), "32600");
    let period: f64 = value(&s, "x_fringe_period_m").parse().unwrap();
    assert!((period - 710e-6).abs() / 710e-6 < 0.02, "{period}");
    let visibility: f64 = value(&s, "visibility").parse().unwrap();
    assert!(visibility > 0.8);
    let events = fs::read_to_string(out_dir.join("events.csv")).unwrap();
    assert!(events.starts_with("frame_index,ix,iy,kind\n"));

    let analyzed = heraldsim(&["analyze", out_dir.join("x_profile.csv").to_str().unwrap()]);
    assert!(analyzed.status.success());
    let text = String::from_utf8(analyzed.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("fringe_period_m = ")), "{text}");
}

#[test]
fn exit_codes_separate_error_classes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = write_config(dir.path(), "colour = blue\n");
    assert_eq!(heraldsim(&["run", "--config", &bad_key]).status.code(), Some(2));

    let overlap = write_config(dir.path(), "slit_width_um = 600\nslit_sep_um = 500\n");
    assert_eq!(heraldsim(&["run", "--config", &overlap]).status.code(), Some(2));

    let missing = dir.path().join("nope.cfg");
    assert_eq!(
        heraldsim(&["run", "--config", missing.to_str().unwrap()]).status.code(),
        Some(4)
    );

    let blocked = write_config(
        dir.path(),
        &format!(
            "mode = ghost_image\nslit_width_um = 50\nslit_sep_um = 7600\nout_dir = {}\n",
            dir.path().join("blocked").display()
        ),
    );
    assert_eq!(heraldsim(&["run", "--config", &blocked]).status.code(), Some(3));

    let text = dir.path().join("notes.pgm");
    fs::write(&text, "hello").unwrap();
    assert_eq!(heraldsim(&["analyze", text.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn video_with_too_few_frames_suggests_more() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!("video_frames = 5\nout_dir = {}\n", dir.path().join("v").display()),
    );
    let out = heraldsim(&["video", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("frames"), "{err}");
}

fn small_video(dir: &Path, mode: &str, seed: &str) -> std::path::PathBuf {
    let out = dir.join(format!("{mode}_{seed}"));
    let cfg = write_config(
        dir,
        &format!("mode = {mode}\nvideo_frames = 12\nvideo_photons = 60000\nvideo_ramp_ratio = 1.2\n"),
    );
    let run = heraldsim(&["video", "--config", &cfg, "--seed", seed, "--out", out.to_str().unwrap()]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    out
}

#[test]
fn video_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let other = tempfile::tempdir().unwrap();
    let a = small_video(dir.path(), "heralded_diffraction", "8");
    let b = small_video(other.path(), "heralded_diffraction", "8");
    for name in ["frames/frame_0000.pgm", "frames/frame_0011.pgm", "cumulative/cumulative_0011.pgm", "cumulative.pgm", "budgets.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    assert_eq!(
        fs::read(a.join("cumulative/cumulative_0011.pgm")).unwrap(),
        fs::read(a.join("cumulative.pgm")).unwrap()
    );
    let c = small_video(dir.path(), "heralded_diffraction", "9");
    assert_ne!(fs::read(a.join("cumulative.pgm")).unwrap(), fs::read(c.join("cumulative.pgm")).unwrap());
}

#[test]
fn ghost_image_video_shows_two_bands() {
    let dir = tempfile::tempdir().unwrap();
    let out = small_video(dir.path(), "ghost_image", "1");
    let image = read_pgm(&out.join("cumulative.pgm")).unwrap().to_image(31.25e-6);
    let profile = cross_section(&image, Direction::X, (0, image.height)).unwrap();
    let found = bands(&profile, 0.5).unwrap();
    assert_eq!(found.len(), 2, "{found:?}");
    let pitch = 31.25e-6;
    assert!((found[0].centre + 250e-6).abs() < 2.0 * pitch, "{found:?}");
    assert!((found[1].centre - 250e-6).abs() < 2.0 * pitch, "{found:?}");

    let analyzed = heraldsim(&["analyze", out.join("cumulative.pgm").to_str().unwrap()]);
    assert!(analyzed.status.success());
    let text = String::from_utf8(analyzed.stdout).unwrap();
    assert!(text.contains("x_band_count = 2"), "{text}");
}

#[test]
fn selftest_passes() {
    let out = heraldsim(&["selftest"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
}
