use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

/// Contract violations raised by the simulation core.
///
/// Every variant is a physics or numerics problem (as opposed to I/O or
/// configuration syntax, which the CLI crate reports separately).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample count {n} must be a power of two and at least 8")]
    BadSampleCount { n: usize },
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must lie in [0, 1], got {value}")]
    NotAProbability { name: &'static str, value: f64 },
    #[error("expected {expected} samples, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("field contains a non-finite sample")]
    NonFinite,
    #[error("fields live on different axes")]
    AxisMismatch,
    #[error("slit width {width} m must be smaller than separation {separation} m")]
    SlitOverlap { width: f64, separation: f64 },
    #[error("slit pair spanning {span} m does not fit a {extent} m window")]
    SlitOutsideGrid { span: f64, extent: f64 },
    #[error("focal length must be non-zero and finite")]
    ZeroFocalLength,
    #[error("coordinate map leaves the representable output window")]
    OutputWindow,
    #[error("{what}: {samples:.2} samples per width, at least {required} required")]
    UnderResolved {
        what: &'static str,
        samples: f64,
        required: f64,
    },
    #[error("{what}: half window {half_extent} m, at least {required} m required")]
    NotContained {
        what: &'static str,
        half_extent: f64,
        required: f64,
    },
    #[error("mode is not unit-normalised (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("modes {i} and {j} overlap by {overlap:e}, basis is not orthonormal")]
    NotOrthonormal { i: usize, j: usize, overlap: f64 },
    #[error("at least one mode is required")]
    NoModes,
    #[error("pump, signal and herald wavelengths violate energy conservation")]
    EnergyMismatch,
    #[error("herald probability {probability:e} is below 1e-12: the configuration blocks all light")]
    HeraldBlocked { probability: f64 },
    #[error("{0}")]
    UnsupportedMode(&'static str),
    #[error("no fringe: spectral peak is {ratio:.2}x the median floor (3x required)")]
    NoFringe { ratio: f64 },
    #[error("band is empty or outside the sensor")]
    EmptyBand,
    #[error("visibility window must be in (0, 1], got {0}")]
    BadWindow(f64),
    #[error("profile has no mass in the requested region")]
    ZeroMass,
    #[error("profile values must be finite and non-negative")]
    InvalidProfile,
    #[error(
        "{per_pixel:.3} photons per pixel in one frame exceeds 0.1; {}",
        match suggested_frames {
            Some(n) => alloc::format!("try n_frames = {n}"),
            None => alloc::string::String::from("lower the ramp ratio"),
        }
    )]
    PhotonDensity {
        per_pixel: f64,
        suggested_frames: Option<usize>,
    },
    #[error("object grid pitch {object} m differs from joint grid pitch {joint} m")]
    GridPitchMismatch { object: f64, joint: f64 },
    #[error("a video needs at least one frame")]
    NoFrames,
    #[error("ramp ratio must exceed 1, got {0}")]
    BadRampRatio(f64),
    #[error("signal photons requested but the coincidence probability is {0:e}")]
    NoSignal(f64),
}
