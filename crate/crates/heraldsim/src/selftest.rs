//! Fast oracle checks run by the `selftest` command.

use std::f64::consts::PI;

use heraldsim_core::analysis::{fringe_period, rms_width, visibility, Profile};
use heraldsim_core::biphoton::{double_gaussian, schmidt_number, validate_energy, SourceParams};
use heraldsim_core::detect::{plan_video_ramp, timeline_stats, DetectorParams};
use heraldsim_core::experiments::{run_experiment, theory_fringe_period, ExperimentConfig};
use heraldsim_core::field::{fourier_centered, fresnel_propagate, make_axis, ComplexField};
use num_complex::Complex64;

pub struct Check {
    pub name: &'static str,
    pub run: fn() -> Result<(), String>,
}

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn sampled(n: usize, pitch: f64, f: impl Fn(f64) -> f64) -> Profile {
    let origin = -(n as f64 / 2.0) * pitch;
    Profile::new(origin, pitch, (0..n).map(|j| f(origin + j as f64 * pitch)).collect())
        .expect("finite non-negative samples")
}

fn parseval() -> Result<(), String> {
    let axis = make_axis(1024, 8e-3).map_err(|e| e.to_string())?;
    let f = ComplexField::from_fn(axis, |x| Complex64::new((x * 3e3).sin() + 0.2, (x * 1e3).cos()));
    let g = fourier_centered(&f);
    let rel = (g.norm() - f.norm()).abs() / f.norm();
    ensure(rel <= 1e-12, || format!("norm changed by {rel:e}"))
}

fn gaussian_beam() -> Result<(), String> {
    let axis = make_axis(4096, 16e-3).map_err(|e| e.to_string())?;
    let (w0, lambda, z) = (0.5e-3, 710e-9, 0.5);
    let f = ComplexField::from_fn(axis, |x| Complex64::new((-x * x / (w0 * w0)).exp(), 0.0));
    let out = fresnel_propagate(&f, z, lambda).map_err(|e| e.to_string())?;
    let total: f64 = out.intensity().iter().sum();
    let second: f64 = axis
        .coordinates()
        .zip(out.intensity())
        .map(|(x, i)| x * x * i)
        .sum::<f64>()
        / total;
    let radius = 2.0 * second.sqrt();
    let zr = PI * w0 * w0 / lambda;
    let expected = w0 * (1.0 + (z / zr).powi(2)).sqrt();
    let rel = (radius - expected).abs() / expected;
    ensure(rel < 1e-3, || format!("w(z) off by {rel:e}"))
}

fn energy() -> Result<(), String> {
    let ok = SourceParams::default();
    let bad = SourceParams {
        herald_wavelength: 700e-9,
        ..ok
    };
    ensure(validate_energy(&ok) && !validate_energy(&bad), || "validator disagrees".into())
}

fn theory_period() -> Result<(), String> {
    let p = theory_fringe_period(0.5, 710e-9, 500e-6);
    ensure((p - 7.1e-4).abs() < 1e-15, || format!("{p}"))
}

fn trigger_rate() -> Result<(), String> {
    let s = timeline_stats(1e5, &DetectorParams::default());
    ensure(s.trigger_rate == 32_600.0, || format!("{}", s.trigger_rate))
}

fn ramp() -> Result<(), String> {
    let a = plan_video_ramp(1000, 1, 3.0, 512 * 512).map_err(|e| e.to_string())?;
    let b = plan_video_ramp(700, 3, 2.0, 512 * 512).map_err(|e| e.to_string())?;
    ensure(a == [1000] && b == [100, 200, 400], || format!("{a:?} {b:?}"))
}

fn synthetic_fringe() -> Result<(), String> {
    let period = 710e-6;
    let p = sampled(4096, 16e-3 / 4096.0, |x| (PI * x / period).cos().powi(2));
    let est = fringe_period(&p).map_err(|e| e.to_string())?;
    let bin = period * period / p.extent();
    ensure((est - period).abs() < bin, || format!("{est}"))
}

fn cos2_visibility() -> Result<(), String> {
    let period = 710e-6;
    let p = sampled(4096, period / 200.0, |x| (PI * x / period).cos().powi(2));
    let v = visibility(&p, 0.3).map_err(|e| e.to_string())?;
    ensure((v - 1.0).abs() < 1e-9, || format!("{v}"))
}

fn gaussian_width() -> Result<(), String> {
    let sigma = 1e-3;
    let p = sampled(4096, 16e-3 / 4096.0, |x| (-x * x / (2.0 * sigma * sigma)).exp());
    let w = rms_width(&p).map_err(|e| e.to_string())?;
    ensure((w - sigma).abs() / sigma < 5e-3, || format!("{w}"))
}

fn separable_schmidt() -> Result<(), String> {
    let axis = make_axis(128, 1.6e-3).map_err(|e| e.to_string())?;
    let params = SourceParams {
        sigma_plus: 50e-6,
        sigma_minus: 50e-6,
        ..SourceParams::default()
    };
    let b = double_gaussian(&params, axis, axis).map_err(|e| e.to_string())?;
    let k = schmidt_number(&b);
    ensure((k - 1.0).abs() < 1e-6, || format!("K = {k}"))
}

fn heralded_period() -> Result<(), String> {
    let map = run_experiment(&ExperimentConfig::default()).map_err(|e| e.to_string())?;
    let p = fringe_period(&map.x).map_err(|e| e.to_string())?;
    ensure((p - 710e-6).abs() / 710e-6 <= 0.02, || format!("{p}"))
}

pub const CHECKS: &[Check] = &[
    Check { name: "fourier transform preserves the norm", run: parseval },
    Check { name: "gaussian beam radius after 0.5 m", run: gaussian_beam },
    Check { name: "energy conservation validator", run: energy },
    Check { name: "theoretical fringe period", run: theory_period },
    Check { name: "herald trigger rate", run: trigger_rate },
    Check { name: "video ramp budgets", run: ramp },
    Check { name: "fringe period of a synthetic pattern", run: synthetic_fringe },
    Check { name: "visibility of cos^2", run: cos2_visibility },
    Check { name: "rms width of a gaussian", run: gaussian_width },
    Check { name: "separable state has K = 1", run: separable_schmidt },
    Check { name: "heralded diffraction fringe period", run: heralded_period },
];

/// Runs every check, printing one line each. Returns the failure count.
pub fn run_all(mut out: impl std::io::Write) -> usize {
    let mut failures = 0;
    for check in CHECKS {
        match (check.run)() {
            Ok(()) => {
                let _ = writeln!(out, "PASS {}", check.name);
            }
            Err(why) => {
                failures += 1;
                let _ = writeln!(out, "FAIL {}: {why}", check.name);
            }
        }
    }
    failures
}
