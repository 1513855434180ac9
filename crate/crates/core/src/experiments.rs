//! The four measurement configurations (heralded or ghost, image or
//! diffraction) and the advanced-wave prediction for ghost setups.
//!
//! Plane layout: the crystal exit face, the slit plane and the object plane
//! coincide (the relay between them is an identity). In the herald arm a
//! coupling lens of focal length `f_coupling` maps the crystal plane onto
//! the fiber face. In the camera arm either a 4f relay (image) or a single
//! Fourier lens (diffraction) maps the object plane onto the camera.
//!
//! The source is separable in x and y. Slits only act along x, so the
//! y-profile is computed by the same procedure with an open aperture.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::analysis::{self, Direction, Profile};
use crate::biphoton::{
    double_gaussian, herald_multimode, hermite_gauss_modes, project_unchecked, trace_out_herald,
    validate_energy, BiphotonAmplitude, EnsembleMember, MixedEnsemble, SourceParams,
};
use crate::detect::DetectorParams;
use crate::error::{Error, Result};
use crate::field::{Axis, ComplexField};
use crate::optics::{adjoint_system, apply_system, double_slit, Element, OpticalSystem};

const MIN_HERALD_PROBABILITY: f64 = 1e-12;
const VISIBILITY_WINDOW: f64 = 0.3;
const VISIBILITY_PERIODS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    HeraldedImage,
    HeraldedDiffraction,
    GhostImage,
    GhostDiffraction,
}

impl Mode {
    pub const ALL: [Mode; 4] = [
        Mode::HeraldedImage,
        Mode::HeraldedDiffraction,
        Mode::GhostImage,
        Mode::GhostDiffraction,
    ];

    /// Slits in the herald arm rather than the camera arm.
    pub fn is_ghost(self) -> bool {
        matches!(self, Mode::GhostImage | Mode::GhostDiffraction)
    }

    /// Camera in the Fourier plane of the object.
    pub fn is_diffraction(self) -> bool {
        matches!(self, Mode::HeraldedDiffraction | Mode::GhostDiffraction)
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::HeraldedImage => "heralded_image",
            Mode::HeraldedDiffraction => "heralded_diffraction",
            Mode::GhostImage => "ghost_image",
            Mode::GhostDiffraction => "ghost_diffraction",
        }
    }

    pub fn from_name(name: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fiber {
    SingleMode,
    /// Guides the first `N` Hermite-Gauss modes per transverse direction.
    MultiMode(usize),
}

impl Fiber {
    pub fn mode_count(self) -> usize {
        match self {
            Fiber::SingleMode => 1,
            Fiber::MultiMode(n) => n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slits {
    pub width: f64,
    pub separation: f64,
}

/// Sampling of the object plane and of the joint amplitude. Both grids must
/// share a pitch so that conditional fields embed without resampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grids {
    pub object_n: usize,
    pub object_extent: f64,
    pub joint_n: usize,
    pub joint_extent: f64,
}

impl Grids {
    pub fn object_axis(&self) -> Result<Axis> {
        Axis::new(self.object_n, self.object_extent)
    }

    pub fn joint_axis(&self) -> Result<Axis> {
        Axis::new(self.joint_n, self.joint_extent)
    }
}

impl Default for Grids {
    fn default() -> Self {
        Self {
            object_n: 4096,
            object_extent: 16e-3,
            joint_n: 2048,
            joint_extent: 8e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunParams {
    pub n_triggers: u64,
    pub seed: u64,
    /// Pairs emitted per second.
    pub pair_rate: f64,
}

impl Default for RunParams {
    fn default() -> Self {
        Self {
            n_triggers: 100_000,
            seed: 1,
            pair_rate: 1e5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub fiber: Fiber,
    pub source: SourceParams,
    pub slit: Slits,
    /// Camera-arm Fourier lens (diffraction modes).
    pub f_fourier: f64,
    /// Camera-arm 4f relay `(f1, f2)` (image modes).
    pub f_imaging: (f64, f64),
    /// Herald-arm lens between the crystal plane and the fiber face.
    pub f_coupling: f64,
    /// Fundamental-mode radius at the fiber face.
    pub fiber_mode_radius: f64,
    pub grids: Grids,
    pub detector: DetectorParams,
    pub run: RunParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: Mode::HeraldedDiffraction,
            fiber: Fiber::SingleMode,
            source: SourceParams::default(),
            slit: Slits {
                width: 100e-6,
                separation: 500e-6,
            },
            f_fourier: 0.5,
            f_imaging: (0.25, 0.25),
            f_coupling: 0.1,
            fiber_mode_radius: 50e-6,
            grids: Grids::default(),
            detector: DetectorParams::default(),
            run: RunParams::default(),
        }
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive { name, value })
    }
}

impl ExperimentConfig {
    /// Checks everything that can be checked without building the state.
    pub fn validate(&self) -> Result<()> {
        if !validate_energy(&self.source) {
            return Err(Error::EnergyMismatch);
        }
        positive("sigma_plus", self.source.sigma_plus)?;
        positive("sigma_minus", self.source.sigma_minus)?;
        positive("f_fourier", self.f_fourier)?;
        positive("f_imaging.0", self.f_imaging.0)?;
        positive("f_imaging.1", self.f_imaging.1)?;
        positive("f_coupling", self.f_coupling)?;
        positive("fiber_mode_radius", self.fiber_mode_radius)?;
        if !(self.run.pair_rate >= 0.0 && self.run.pair_rate.is_finite()) {
            return Err(Error::NonPositive {
                name: "pair_rate",
                value: self.run.pair_rate,
            });
        }
        if self.fiber.mode_count() == 0 {
            return Err(Error::NoModes);
        }
        let object = self.grids.object_axis()?;
        let joint = self.grids.joint_axis()?;
        if (object.pitch() - joint.pitch()).abs() > 1e-9 * object.pitch() {
            return Err(Error::GridPitchMismatch {
                object: object.pitch(),
                joint: joint.pitch(),
            });
        }
        if object.len() < joint.len() {
            return Err(Error::AxisMismatch);
        }
        let slit_axis = if self.mode.is_ghost() { joint } else { object };
        double_slit(self.slit.width, self.slit.separation, slit_axis)?;
        self.detector.validate()
    }

    fn camera_system(&self) -> OpticalSystem {
        let element = if self.mode.is_diffraction() {
            Element::FourierLens { f: self.f_fourier }
        } else {
            Element::Imaging4f {
                f1: self.f_imaging.0,
                f2: self.f_imaging.1,
            }
        };
        OpticalSystem::new(alloc::vec![element], self.source.signal_wavelength)
    }

    /// Crystal plane to fiber face, including the slits in ghost modes.
    fn herald_system(&self, direction: Direction, joint: Axis) -> Result<OpticalSystem> {
        let mut elements = Vec::new();
        if self.mode.is_ghost() && direction == Direction::X {
            elements.push(Element::Mask(double_slit(
                self.slit.width,
                self.slit.separation,
                joint,
            )?));
        }
        elements.push(Element::FourierLens { f: self.f_coupling });
        Ok(OpticalSystem::new(elements, self.source.herald_wavelength))
    }

    fn fiber_modes(&self, joint: Axis) -> Result<Vec<ComplexField>> {
        let fiber_axis = joint
            .conjugate()
            .scaled(self.source.herald_wavelength * self.f_coupling)?;
        hermite_gauss_modes(self.fiber_mode_radius, self.fiber.mode_count(), fiber_axis)
    }

    fn half_window(&self, direction: Direction) -> f64 {
        let pixels = match direction {
            Direction::X => self.detector.pixels.0,
            Direction::Y => self.detector.pixels.1,
        };
        pixels as f64 * self.detector.pixel_pitch / 2.0
    }

    pub fn build_biphoton(&self) -> Result<BiphotonAmplitude> {
        let joint = self.grids.joint_axis()?;
        double_gaussian(&self.source, joint, joint)
    }
}

/// `f·λ/d`.
pub fn theory_fringe_period(f: f64, wavelength: f64, d: f64) -> f64 {
    f * wavelength / d
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapMetadata {
    pub mode: Mode,
    pub fiber: Fiber,
    /// Probability that the herald photon couples into the fiber (x and y
    /// factors and their product).
    pub herald_probability_x: f64,
    pub herald_probability_y: f64,
    pub herald_probability: f64,
    /// Fraction of heralded camera-arm photons passing the camera-arm slits
    /// (1 in ghost modes).
    pub transmission: f64,
}

/// Single-photon detection density on the camera, as a product of x and y
/// profiles cropped to the sensor and normalised to unit integral.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMap {
    pub x: Profile,
    pub y: Profile,
    pub meta: MapMetadata,
}

impl ProbabilityMap {
    /// Per-pixel probabilities along x and y on the detector grid, each
    /// summing to one.
    pub fn pixel_marginals(&self, detector: &DetectorParams) -> Result<(Vec<f64>, Vec<f64>)> {
        let bin = |p: &Profile, n: usize| -> Result<Vec<f64>> {
            let mut cells = p.rebin_centered(n, detector.pixel_pitch);
            let total: f64 = cells.iter().sum();
            if !(total > 0.0) {
                return Err(Error::ZeroMass);
            }
            cells.iter_mut().for_each(|c| *c /= total);
            Ok(cells)
        };
        Ok((bin(&self.x, detector.pixels.0)?, bin(&self.y, detector.pixels.1)?))
    }
}

/// Camera-arm conditional state at the object plane for one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectPlane {
    /// After the camera-arm slits in heralded modes. Weights sum to
    /// `herald_probability · transmission`.
    pub ensemble: MixedEnsemble,
    pub herald_probability: f64,
    pub transmission: f64,
}

fn embed_member(field: &ComplexField, object: Axis) -> Result<ComplexField> {
    if (field.axis().pitch() - object.pitch()).abs() > 1e-9 * object.pitch() {
        return Err(Error::GridPitchMismatch {
            object: object.pitch(),
            joint: field.axis().pitch(),
        });
    }
    field.embed(object)
}

fn object_plane_with(
    cfg: &ExperimentConfig,
    b: &BiphotonAmplitude,
    direction: Direction,
) -> Result<ObjectPlane> {
    let joint = *b.axis2();
    let object = cfg.grids.object_axis()?;
    let adjoint = adjoint_system(&cfg.herald_system(direction, joint)?);
    let modes = cfg.fiber_modes(joint)?;
    let back: Vec<ComplexField> = modes
        .iter()
        .map(|g| apply_system(g, &adjoint))
        .collect::<Result<_>>()?;

    if cfg.mode.is_ghost() {
        // The masked back-propagated modes are not orthonormal; each fiber
        // mode is still a separate outcome of the herald measurement.
        let mut members = Vec::with_capacity(back.len());
        for m in &back {
            let h = project_unchecked(b, m);
            if !h.is_null {
                members.push(EnsembleMember {
                    weight: h.probability,
                    field: embed_member(&h.field, object)?,
                });
            }
        }
        let ensemble = MixedEnsemble { members };
        let herald_probability = ensemble.total_weight();
        return Ok(ObjectPlane {
            ensemble,
            herald_probability,
            transmission: 1.0,
        });
    }

    let heralded = herald_multimode(b, &back)?;
    let herald_probability = heralded.total_weight();
    let mask = match direction {
        Direction::X => Some(double_slit(cfg.slit.width, cfg.slit.separation, object)?),
        Direction::Y => None,
    };
    let mut members = Vec::with_capacity(heralded.len());
    for member in &heralded.members {
        if member.weight == 0.0 {
            continue;
        }
        let mut field = embed_member(&member.field, object)?;
        if let Some(mask) = &mask {
            for (v, t) in field.values_mut().iter_mut().zip(mask.values()) {
                *v *= *t;
            }
        }
        let passed = field.norm();
        if let Some(unit) = field.normalized().filter(|_| passed > 0.0) {
            members.push(EnsembleMember {
                weight: member.weight * passed,
                field: unit,
            });
        }
    }
    let ensemble = MixedEnsemble { members };
    let transmission = if herald_probability > 0.0 {
        ensemble.total_weight() / herald_probability
    } else {
        0.0
    };
    Ok(ObjectPlane {
        ensemble,
        herald_probability,
        transmission,
    })
}

/// Conditional camera-arm ensemble at the object plane.
pub fn object_plane_ensemble(cfg: &ExperimentConfig, direction: Direction) -> Result<ObjectPlane> {
    cfg.validate()?;
    object_plane_with(cfg, &cfg.build_biphoton()?, direction)
}

/// Incoherent intensity of `fields` (amplitude-weighted by `weights`) after
/// the camera system, cropped to the sensor and normalised.
fn camera_profile<'a>(
    cfg: &ExperimentConfig,
    direction: Direction,
    members: impl Iterator<Item = (f64, &'a ComplexField)>,
) -> Result<Profile> {
    let system = cfg.camera_system();
    let mut density: Vec<f64> = Vec::new();
    let mut out_axis = None;
    for (weight, field) in members {
        let out = apply_system(field, &system)?;
        if density.is_empty() {
            density = alloc::vec![0.0; out.axis().len()];
            out_axis = Some(*out.axis());
        }
        for (d, v) in density.iter_mut().zip(out.values()) {
            *d += weight * v.norm_sqr();
        }
    }
    let Some(axis) = out_axis else {
        return Err(Error::HeraldBlocked { probability: 0.0 });
    };
    let half = cfg.half_window(direction);
    Profile::on_axis(&axis, density)?.crop(-half, half)?.normalized()
}

fn direction_profile(
    cfg: &ExperimentConfig,
    b: &BiphotonAmplitude,
    direction: Direction,
) -> Result<(Profile, ObjectPlane)> {
    let plane = object_plane_with(cfg, b, direction)?;
    let passed = plane.herald_probability * plane.transmission;
    if !(passed >= MIN_HERALD_PROBABILITY) {
        return Err(Error::HeraldBlocked { probability: passed });
    }
    let profile = camera_profile(
        cfg,
        direction,
        plane.ensemble.members.iter().map(|m| (m.weight, &m.field)),
    )?;
    Ok((profile, plane))
}

/// Builds the biphoton, heralds it through the configured fiber and
/// propagates the conditional camera-arm photon to the sensor.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ProbabilityMap> {
    cfg.validate()?;
    let b = cfg.build_biphoton()?;
    let (x, px) = direction_profile(cfg, &b, Direction::X)?;
    let (y, py) = direction_profile(cfg, &b, Direction::Y)?;
    let herald_probability = px.herald_probability * py.herald_probability;
    if herald_probability * px.transmission < MIN_HERALD_PROBABILITY {
        return Err(Error::HeraldBlocked {
            probability: herald_probability * px.transmission,
        });
    }
    Ok(ProbabilityMap {
        x,
        y,
        meta: MapMetadata {
            mode: cfg.mode,
            fiber: cfg.fiber,
            herald_probability_x: px.herald_probability,
            herald_probability_y: py.herald_probability,
            herald_probability,
            transmission: px.transmission * py.transmission,
        },
    })
}

/// x-profile only; used by the convergence sweep.
fn run_x_profile(cfg: &ExperimentConfig, b: &BiphotonAmplitude) -> Result<Profile> {
    direction_profile(cfg, b, Direction::X).map(|(p, _)| p)
}

fn klyshko_direction(cfg: &ExperimentConfig, joint: Axis, direction: Direction) -> Result<Profile> {
    let object = cfg.grids.object_axis()?;
    let adjoint = adjoint_system(&cfg.herald_system(direction, joint)?);
    let fiber = &cfg.fiber_modes(joint)?[0];
    let back = apply_system(fiber, &adjoint)?;
    let two_var = 2.0 * cfg.source.sigma_plus * cfg.source.sigma_plus;
    let values: Vec<Complex64> = back
        .values()
        .iter()
        .zip(joint.coordinates())
        .map(|(m, x)| m.conj() * (-x * x / two_var).exp())
        .collect();
    let mirror = ComplexField::new(joint, values)?;
    let weight = mirror.norm();
    let Some(unit) = mirror.normalized().filter(|_| weight >= MIN_HERALD_PROBABILITY) else {
        return Err(Error::HeraldBlocked { probability: weight });
    };
    let unit = embed_member(&unit, object)?;
    camera_profile(cfg, direction, core::iter::once((1.0, &unit)))
}

/// Advanced-wave prediction: the fiber mode is sent backwards through the
/// herald arm, reflected at the crystal by the pump envelope, and sent
/// forwards through the camera arm. Exact in the limit of perfect position
/// correlation.
pub fn klyshko_predict(cfg: &ExperimentConfig) -> Result<ProbabilityMap> {
    if !cfg.mode.is_ghost() {
        return Err(Error::UnsupportedMode(
            "the advanced-wave prediction covers ghost configurations only",
        ));
    }
    if cfg.fiber != Fiber::SingleMode {
        return Err(Error::UnsupportedMode(
            "the advanced-wave prediction needs a single-mode fiber",
        ));
    }
    cfg.validate()?;
    let joint = cfg.grids.joint_axis()?;
    let x = klyshko_direction(cfg, joint, Direction::X)?;
    let y = klyshko_direction(cfg, joint, Direction::Y)?;
    Ok(ProbabilityMap {
        x,
        y,
        meta: MapMetadata {
            mode: cfg.mode,
            fiber: cfg.fiber,
            herald_probability_x: f64::NAN,
            herald_probability_y: f64::NAN,
            herald_probability: f64::NAN,
            transmission: 1.0,
        },
    })
}

/// Relative L2 distance between the projection result and the advanced-wave
/// prediction (x-profiles) for each `sigma_minus`.
pub fn klyshko_convergence(cfg: &ExperimentConfig, sigma_minus: &[f64]) -> Result<Vec<(f64, f64)>> {
    if !cfg.mode.is_ghost() || cfg.fiber != Fiber::SingleMode {
        return Err(Error::UnsupportedMode(
            "convergence study needs a single-mode ghost configuration",
        ));
    }
    let mut out = Vec::with_capacity(sigma_minus.len());
    for &s in sigma_minus {
        let mut c = cfg.clone();
        c.source.sigma_minus = s;
        c.validate()?;
        let joint = c.grids.joint_axis()?;
        let predicted = klyshko_direction(&c, joint, Direction::X)?;
        let b = c.build_biphoton()?;
        let simulated = run_x_profile(&c, &b)?;
        drop(b);
        out.push((s, analysis::relative_l2(&simulated, &predicted)?));
    }
    Ok(out)
}

/// x-profile with the herald traced out instead of projected. In heralded
/// modes the camera arm keeps its slits; in ghost modes the slits sit in the
/// discarded arm and drop out.
pub fn unheralded_profile(cfg: &ExperimentConfig) -> Result<Profile> {
    cfg.validate()?;
    let b = cfg.build_biphoton()?;
    let object = cfg.grids.object_axis()?;
    let mask = (!cfg.mode.is_ghost())
        .then(|| double_slit(cfg.slit.width, cfg.slit.separation, object))
        .transpose()?;
    let reduced = trace_out_herald(&b);
    drop(b);
    let peak = reduced.members.iter().map(|m| m.weight).fold(0.0, f64::max);
    let mut fields = Vec::with_capacity(reduced.len());
    for m in reduced.members.iter().filter(|m| m.weight > 1e-16 * peak) {
        let mut field = embed_member(&m.field, object)?;
        if let Some(mask) = &mask {
            for (v, t) in field.values_mut().iter_mut().zip(mask.values()) {
                *v *= *t;
            }
        }
        fields.push((m.weight, field));
    }
    camera_profile(cfg, Direction::X, fields.iter().map(|(w, f)| (*w, f)))
}

/// Fringe visibility of a diffraction profile over its central fringes:
/// the profile is cut to `±2` theoretical periods and the extrema are taken
/// over the central 30 %.
pub fn central_visibility(cfg: &ExperimentConfig, profile: &Profile) -> Result<f64> {
    let period = theory_fringe_period(
        cfg.f_fourier,
        cfg.source.signal_wavelength,
        cfg.slit.separation,
    );
    let span = VISIBILITY_PERIODS * period;
    analysis::visibility(&profile.crop(-span, span)?, VISIBILITY_WINDOW)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::fourier_centered;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    fn cfg(mode: Mode, fiber: Fiber) -> ExperimentConfig {
        ExperimentConfig {
            mode,
            fiber,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn theory_period_examples() {
        assert!(close(theory_fringe_period(0.5, 710e-9, 500e-6), 7.10e-4, 1e-12));
        assert!(close(theory_fringe_period(1.0, 710e-9, 500e-6), 1.42e-3, 1e-12));
        assert!(close(
            theory_fringe_period(0.5, 710e-9, 1000e-6),
            theory_fringe_period(0.5, 710e-9, 500e-6) / 2.0,
            1e-12
        ));
    }

    #[test]
    fn mode_names_round_trip() {
        for m in Mode::ALL {
            assert_eq!(Mode::from_name(m.name()), Some(m));
        }
        assert_eq!(Mode::from_name("heralded"), None);
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut c = ExperimentConfig::default();
        c.slit.width = 600e-6;
        assert!(matches!(c.validate(), Err(Error::SlitOverlap { .. })));

        let mut c = ExperimentConfig::default();
        c.source.herald_wavelength = 700e-9;
        assert_eq!(c.validate(), Err(Error::EnergyMismatch));

        let mut c = ExperimentConfig::default();
        c.grids.joint_n = 1024;
        assert!(matches!(c.validate(), Err(Error::GridPitchMismatch { .. })));

        let c = cfg(Mode::HeraldedImage, Fiber::MultiMode(0));
        assert_eq!(c.validate(), Err(Error::NoModes));
        assert_eq!(ExperimentConfig::default().validate(), Ok(()));
    }

    #[test]
    fn heralded_diffraction_period() {
        let map = run_experiment(&ExperimentConfig::default()).unwrap();
        let p = analysis::fringe_period(&map.x).unwrap();
        assert!(close(p, 710e-6, 0.02), "{p}");
        assert!((map.x.integral() - 1.0).abs() < 1e-9);
        assert!((map.y.integral() - 1.0).abs() < 1e-9);
        assert!(map.meta.herald_probability > 0.0 && map.meta.herald_probability <= 1.0);
        assert!(map.meta.transmission > 0.0 && map.meta.transmission < 1.0);
    }

    #[test]
    fn fourier_plane_relation() {
        let image = cfg(Mode::HeraldedImage, Fiber::MultiMode(3));
        let plane = object_plane_ensemble(&image, Direction::X).unwrap();
        let diffraction = cfg(Mode::HeraldedDiffraction, Fiber::MultiMode(3));
        let map = run_experiment(&diffraction).unwrap();

        // Independent path: raw centered transform, axis rescaled by λf.
        let lf = diffraction.source.signal_wavelength * diffraction.f_fourier;
        let mut density: Vec<f64> = Vec::new();
        let mut axis = None;
        for m in &plane.ensemble.members {
            let spectrum = fourier_centered(&m.field);
            if density.is_empty() {
                density = alloc::vec![0.0; spectrum.axis().len()];
                axis = Some(spectrum.axis().scaled(lf).unwrap());
            }
            for (d, v) in density.iter_mut().zip(spectrum.values()) {
                *d += m.weight * v.norm_sqr() / lf;
            }
        }
        let half = diffraction.half_window(Direction::X);
        let expected = Profile::on_axis(&axis.unwrap(), density)
            .unwrap()
            .crop(-half, half)
            .unwrap()
            .normalized()
            .unwrap();
        let peak = expected.values().iter().copied().fold(0.0, f64::max);
        for (a, b) in map.x.values().iter().zip(expected.values()) {
            assert!((a - b).abs() <= 1e-9 * peak);
        }
    }

    #[test]
    fn klyshko_rejects_heralded_and_multimode() {
        assert!(matches!(
            klyshko_predict(&ExperimentConfig::default()),
            Err(Error::UnsupportedMode(_))
        ));
        assert!(matches!(
            klyshko_predict(&cfg(Mode::GhostImage, Fiber::MultiMode(2))),
            Err(Error::UnsupportedMode(_))
        ));
    }

    #[test]
    fn blocked_configuration_is_an_error() {
        // Slits far outside the back-propagated fiber mode.
        let mut c = cfg(Mode::GhostImage, Fiber::SingleMode);
        c.slit = Slits {
            width: 50e-6,
            separation: 7.6e-3,
        };
        assert!(matches!(run_experiment(&c), Err(Error::HeraldBlocked { .. })));
    }
}
