//! Flat `key = value` run configuration.
//!
//! Values are stored in the units named by their keys (`_um`, `_nm`, ...)
//! and converted to SI only when the experiment is assembled, so printing a
//! config and parsing it back reproduces it exactly.

use std::fmt::{self, Write as _};

use heraldsim_core::biphoton::SourceParams;
use heraldsim_core::detect::DetectorParams;
use heraldsim_core::experiments::{ExperimentConfig, Fiber, Grids, Mode, RunParams, Slits};

use crate::error::ConfigError;

/// Where a default comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Reported for the apparatus being modelled.
    Apparatus,
    /// Chosen by this implementation.
    Implementation,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::Apparatus => "apparatus value",
            Provenance::Implementation => "implementation default",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberKind {
    Single,
    Multi,
}

trait ConfigValue: Sized {
    const EXPECTED: &'static str;
    fn parse_value(text: &str) -> Option<Self>;
    fn render(&self) -> String;
}

impl ConfigValue for f64 {
    const EXPECTED: &'static str = "a finite number";
    fn parse_value(text: &str) -> Option<Self> {
        text.parse::<f64>().ok().filter(|v| v.is_finite())
    }
    fn render(&self) -> String {
        format!("{self}")
    }
}

impl ConfigValue for u64 {
    const EXPECTED: &'static str = "a non-negative integer";
    fn parse_value(text: &str) -> Option<Self> {
        text.parse().ok()
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

impl ConfigValue for usize {
    const EXPECTED: &'static str = "a non-negative integer";
    fn parse_value(text: &str) -> Option<Self> {
        text.parse().ok()
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

impl ConfigValue for String {
    const EXPECTED: &'static str = "a non-empty string";
    fn parse_value(text: &str) -> Option<Self> {
        (!text.is_empty()).then(|| text.to_string())
    }
    fn render(&self) -> String {
        self.clone()
    }
}

impl ConfigValue for Mode {
    const EXPECTED: &'static str = "heralded_image, heralded_diffraction, ghost_image or ghost_diffraction";
    fn parse_value(text: &str) -> Option<Self> {
        Mode::from_name(text)
    }
    fn render(&self) -> String {
        self.name().to_string()
    }
}

impl ConfigValue for FiberKind {
    const EXPECTED: &'static str = "single or multi";
    fn parse_value(text: &str) -> Option<Self> {
        match text {
            "single" => Some(FiberKind::Single),
            "multi" => Some(FiberKind::Multi),
            _ => None,
        }
    }
    fn render(&self) -> String {
        match self {
            FiberKind::Single => "single",
            FiberKind::Multi => "multi",
        }
        .to_string()
    }
}

/// One documented configuration key.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyInfo {
    pub name: &'static str,
    pub default: String,
    pub provenance: Provenance,
    pub description: &'static str,
}

macro_rules! run_config {
    ($( $field:ident : $ty:ty = $default:expr, $prov:ident, $desc:literal; )*) => {
        /// All run settings, in key units.
        #[derive(Debug, Clone, PartialEq)]
        pub struct RunConfig {
            $( pub $field: $ty, )*
        }

        impl Default for RunConfig {
            fn default() -> Self {
                Self { $( $field: $default, )* }
            }
        }

        impl RunConfig {
            /// Every key with its default, provenance and meaning.
            pub fn reference() -> Vec<KeyInfo> {
                let d = RunConfig::default();
                vec![$( KeyInfo {
                    name: stringify!($field),
                    default: d.$field.render(),
                    provenance: Provenance::$prov,
                    description: $desc,
                }, )*]
            }

            fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
                match key {
                    $( stringify!($field) => {
                        self.$field = <$ty as ConfigValue>::parse_value(value).ok_or_else(|| {
                            ConfigError::Malformed {
                                line,
                                key: key.to_string(),
                                value: value.to_string(),
                                expected: <$ty as ConfigValue>::EXPECTED,
                            }
                        })?;
                        Ok(())
                    } )*
                    _ => Err(ConfigError::UnknownKey { line, key: key.to_string() }),
                }
            }

            fn entries(&self) -> Vec<(&'static str, String)> {
                vec![$( (stringify!($field), self.$field.render()), )*]
            }
        }
    };
}

run_config! {
    mode: Mode = Mode::HeraldedDiffraction, Implementation,
        "measurement: heralded_image, heralded_diffraction, ghost_image or ghost_diffraction";
    fiber: FiberKind = FiberKind::Single, Implementation, "herald fiber: single or multi";
    fiber_modes: usize = 10, Implementation, "guided Hermite-Gauss modes per direction when fiber = multi";
    fiber_mode_radius_um: f64 = 50.0, Implementation, "fundamental mode radius at the fiber face";
    f_coupling_m: f64 = 0.1, Implementation, "herald-arm lens between crystal plane and fiber face";
    pump_wavelength_nm: f64 = 355.0, Apparatus, "pump wavelength";
    signal_wavelength_nm: f64 = 710.0, Apparatus, "camera-arm photon wavelength";
    herald_wavelength_nm: f64 = 710.0, Apparatus, "herald-arm photon wavelength";
    sigma_plus_um: f64 = 500.0, Implementation, "pump-envelope width along x1 + x2";
    sigma_minus_um: f64 = 20.0, Implementation, "phase-matching width along x1 - x2";
    crystal_thickness_mm: f64 = 3.0, Apparatus, "BBO thickness (informational)";
    slit_width_um: f64 = 100.0, Apparatus, "width of each slit";
    slit_sep_um: f64 = 500.0, Apparatus, "centre-to-centre slit separation";
    f_fourier_m: f64 = 0.5, Apparatus, "camera-arm Fourier lens (diffraction modes)";
    f_imaging1_m: f64 = 0.25, Apparatus, "first lens of the camera-arm 4f relay (image modes)";
    f_imaging2_m: f64 = 0.25, Apparatus, "second lens of the camera-arm 4f relay (image modes)";
    object_samples: usize = 4096, Implementation, "object-plane samples (power of two)";
    object_extent_mm: f64 = 16.0, Implementation, "object-plane window";
    joint_samples: usize = 2048, Implementation, "joint-amplitude samples per coordinate (power of two)";
    joint_extent_mm: f64 = 8.0, Implementation, "joint-amplitude window; pitch must equal the object pitch";
    spad_qe: f64 = 0.65, Apparatus, "herald detector quantum efficiency";
    spad_dark_rate_hz: f64 = 100.0, Apparatus, "herald detector dark counts";
    bs_split: f64 = 0.5, Apparatus, "beamsplitter routing probability per arm";
    gate_ns: f64 = 5.0, Apparatus, "camera coincidence gate";
    ttl_width_ns: f64 = 15.0, Apparatus, "trigger pulse width (informational)";
    camera_qe: f64 = 0.2, Implementation, "camera photocathode quantum efficiency";
    cathode_noise_rate_hz: f64 = 50.0, Implementation, "photocathode emission rate while gated";
    psf_sigma_px: f64 = 1.5, Implementation, "intensifier spot standard deviation";
    sensor_width_px: usize = 512, Implementation, "sensor width";
    sensor_height_px: usize = 512, Implementation, "sensor height";
    pixel_pitch_um: f64 = 31.25, Implementation, "camera-plane pixel side";
    gain_mean: f64 = 1.0, Implementation, "mean of the exponential intensifier gain";
    adu_per_photon: f64 = 100.0, Implementation, "readout counts per unit-gain photon";
    pair_rate_hz: f64 = 100000.0, Implementation, "pairs emitted per second";
    n_triggers: u64 = 100000, Implementation, "triggers simulated by `run`";
    seed: u64 = 1, Implementation, "master random seed";
    out_dir: String = String::from("out"), Implementation, "output directory";
    video_frames: usize = 60, Implementation, "frames in the `video` ramp";
    video_photons: u64 = 1000000, Implementation, "signal photons over the whole video";
    video_ramp_ratio: f64 = 1.015, Implementation, "frame-to-frame growth of the photon budget";
}

impl RunConfig {
    pub fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            mode: self.mode,
            fiber: match self.fiber {
                FiberKind::Single => Fiber::SingleMode,
                FiberKind::Multi => Fiber::MultiMode(self.fiber_modes),
            },
            source: SourceParams {
                pump_wavelength: self.pump_wavelength_nm * 1e-9,
                signal_wavelength: self.signal_wavelength_nm * 1e-9,
                herald_wavelength: self.herald_wavelength_nm * 1e-9,
                sigma_plus: self.sigma_plus_um * 1e-6,
                sigma_minus: self.sigma_minus_um * 1e-6,
                crystal_thickness: self.crystal_thickness_mm * 1e-3,
            },
            slit: Slits {
                width: self.slit_width_um * 1e-6,
                separation: self.slit_sep_um * 1e-6,
            },
            f_fourier: self.f_fourier_m,
            f_imaging: (self.f_imaging1_m, self.f_imaging2_m),
            f_coupling: self.f_coupling_m,
            fiber_mode_radius: self.fiber_mode_radius_um * 1e-6,
            grids: Grids {
                object_n: self.object_samples,
                object_extent: self.object_extent_mm * 1e-3,
                joint_n: self.joint_samples,
                joint_extent: self.joint_extent_mm * 1e-3,
            },
            detector: self.detector(),
            run: RunParams {
                n_triggers: self.n_triggers,
                seed: self.seed,
                pair_rate: self.pair_rate_hz,
            },
        }
    }

    pub fn detector(&self) -> DetectorParams {
        DetectorParams {
            spad_qe: self.spad_qe,
            spad_dark_rate: self.spad_dark_rate_hz,
            bs_split: self.bs_split,
            gate: self.gate_ns * 1e-9,
            ttl_width: self.ttl_width_ns * 1e-9,
            camera_qe: self.camera_qe,
            cathode_noise_rate: self.cathode_noise_rate_hz,
            psf_sigma: self.psf_sigma_px,
            pixels: (self.sensor_width_px, self.sensor_height_px),
            pixel_pitch: self.pixel_pitch_um * 1e-6,
            gain_mean: self.gain_mean,
            adu_per_photon: self.adu_per_photon,
        }
    }

    /// Physical constraints, checked after every key has been read.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.experiment().validate().map_err(ConfigError::Constraint)?;
        if self.video_frames == 0 {
            return Err(ConfigError::Constraint(heraldsim_core::Error::NoFrames));
        }
        if self.video_frames > 1 && !(self.video_ramp_ratio > 1.0) {
            return Err(ConfigError::Constraint(heraldsim_core::Error::BadRampRatio(
                self.video_ramp_ratio,
            )));
        }
        Ok(())
    }
}

/// Parses the flat config format. Absent keys keep their defaults; the
/// result is validated before it is returned.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut seen: Vec<String> = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: raw.to_string(),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if seen.iter().any(|k| k == key) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
        cfg.set(key, value, line)?;
        seen.push(key.to_string());
    }
    cfg.validate()?;
    Ok(cfg)
}

impl fmt::Display for RunConfig {
    /// Every key, one `key = value` line each, in reference order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (key, value) in self.entries() {
            writeln!(f, "{key} = {value}")?;
        }
        Ok(())
    }
}

/// Text of the `config-reference` command.
pub fn reference_text() -> String {
    let keys = RunConfig::reference();
    let width = keys.iter().map(|k| k.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(out, "# key = default    [provenance] description");
    for k in keys {
        let _ = writeln!(
            out,
            "{:width$} = {:<12} [{}] {}",
            k.name,
            k.default,
            k.provenance.label(),
            k.description
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mode_and_fiber_keep_other_defaults() {
        let cfg = parse_config("mode = ghost_diffraction\nfiber = single").unwrap();
        assert_eq!(cfg.mode, Mode::GhostDiffraction);
        assert_eq!(cfg.fiber, FiberKind::Single);
        let expected = RunConfig {
            mode: Mode::GhostDiffraction,
            ..RunConfig::default()
        };
        assert_eq!(cfg, expected);
    }

    #[test]
    fn overlapping_slits_are_a_constraint_error() {
        let err = parse_config("slit_width_um = 600\nslit_sep_um = 500").unwrap_err();
        assert!(matches!(
            err,
            ConfigError::Constraint(heraldsim_core::Error::SlitOverlap { .. })
        ));
    }

    #[test]
    fn empty_file_gives_documented_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        for key in RunConfig::reference() {
            let line = format!("{} = {}", key.name, key.default);
            assert!(cfg.to_string().lines().any(|l| l == line), "{line}");
        }
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let cfg = parse_config("# heading\n\n  seed = 9   # trailing\n").unwrap();
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn errors_are_distinct() {
        assert!(matches!(
            parse_config("colour = blue"),
            Err(ConfigError::UnknownKey { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("seed = 1\nseed = 2"),
            Err(ConfigError::DuplicateKey { line: 2, .. })
        ));
        assert!(matches!(
            parse_config("seed = -3"),
            Err(ConfigError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("mode = hologram"),
            Err(ConfigError::Malformed { .. })
        ));
        assert!(matches!(
            parse_config("slit_width_um = nan"),
            Err(ConfigError::Malformed { .. })
        ));
        assert!(matches!(parse_config("just words"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(
            parse_config("herald_wavelength_nm = 700"),
            Err(ConfigError::Constraint(heraldsim_core::Error::EnergyMismatch))
        ));
        assert!(matches!(
            parse_config("video_frames = 0"),
            Err(ConfigError::Constraint(heraldsim_core::Error::NoFrames))
        ));
    }

    #[test]
    fn reference_lists_every_key_with_provenance() {
        let text = reference_text();
        let cfg = RunConfig::default();
        for (key, _) in cfg.entries() {
            let line = text
                .lines()
                .find(|l| l.split_whitespace().next() == Some(key))
                .unwrap_or_else(|| panic!("{key} missing"));
            assert!(line.contains("[apparatus value]") || line.contains("[implementation default]"));
        }
        assert!(text.contains("slit_sep_um") && text.contains("[apparatus value]"));
    }

    fn arb_config() -> impl Strategy<Value = RunConfig> {
        (
            (0usize..4, any::<bool>(), 1usize..20, 40.0f64..80.0),
            (60.0f64..200.0, 50.0f64..1000.0, 0.1f64..1.0),
            (0.0f64..1.0, 0.0f64..1e3, 0.0f64..3.0, 1e3f64..1e7),
            (any::<u64>(), any::<u64>(), "[a-z0-9_/]{1,12}"),
            (1usize..200, 0u64..10_000_000, 1.001f64..1.5),
        )
            .prop_map(
                |((mode, multi, modes, radius), (width, gap, f), (qe, dark, psf, rate), (seed, n, out), (frames, photons, ratio))| {
                    RunConfig {
                        mode: Mode::ALL[mode],
                        fiber: if multi { FiberKind::Multi } else { FiberKind::Single },
                        fiber_modes: modes,
                        fiber_mode_radius_um: radius,
                        slit_width_um: width,
                        slit_sep_um: width + gap,
                        f_fourier_m: f,
                        spad_qe: qe,
                        spad_dark_rate_hz: dark,
                        psf_sigma_px: psf,
                        pair_rate_hz: rate,
                        seed,
                        n_triggers: n,
                        out_dir: out,
                        video_frames: frames,
                        video_photons: photons,
                        video_ramp_ratio: ratio,
                        ..RunConfig::default()
                    }
                },
            )
    }

    proptest! {
        #[test]
        fn print_then_parse_is_identity(cfg in arb_config()) {
            let text = cfg.to_string();
            prop_assert_eq!(parse_config(&text).unwrap(), cfg);
        }
    }
}
